//! Covering spectra and rescaled lengths of warped circle bundles over a
//! line: cylinders dr^2 + f(r)^2 dy^2, metric cones, and the conic limits
//! that connect the two.

use crate::expr::{ExprError, WarpFunction};
use crate::geodesic::{fiber_distance, GeodesicError, ProfilePlane, DEFAULT_REL_TOL};
use crate::par::par_map;
use crate::spectrum::{
    integer_filtration_spectrum, sequence_limit_estimate, AccumulationPoint, Certainty,
    Provenance, Spectrum, SpectrumValue,
};
use crate::value::Value;
use std::f64::consts::PI;
use thiserror::Error;

/// An infimum below this threshold, backed by a decreasing tail (or an
/// outright numeric zero), is reported as a slipping translate.
pub const SLIPPING_THRESHOLD: f64 = 1e-4;

/// Generator powers tracked when building a cylinder's covering spectrum.
pub const POWERS_TRACKED: i64 = 4;

#[derive(Debug, Error)]
pub enum WarpedError {
    #[error("fiber circumference must be positive and finite, got {0}")]
    BadCircumference(f64),
    #[error("fiber gap must be nonnegative and finite, got {0}")]
    BadFiberGap(f64),
    #[error("loop length must be positive and finite, got {0}")]
    BadLoopLength(f64),
    #[error("cone opening constant must be positive and finite, got {0}")]
    BadConeConstant(f64),
    #[error("cone radii must be nonnegative and finite, got {0}")]
    BadConeRadius(f64),
    #[error("base distance must be nonnegative and finite, got {0}")]
    BadBaseDistance(f64),
    #[error("schedule must list at least two strictly increasing positive radii")]
    BadSchedule,
    #[error(
        "the second fiber has loops but its scale factor does not vanish at the axis; \
         those loops would keep a fixed positive length and the tail estimate would not \
         bound the rescaled length"
    )]
    HypothesesNotMet,
    #[error("warp function: {0}")]
    Warp(#[from] ExprError),
    #[error("geodesic solve failed: {0}")]
    Geodesic(#[from] GeodesicError),
}

/// Distance between (r, y) and (r, y + d) on the cylinder with fiber scale f.
pub fn warped_geodesic_f(
    f: &WarpFunction,
    r: f64,
    d: f64,
    rel_tol: f64,
) -> Result<f64, WarpedError> {
    let plane = ProfilePlane::warped(f);
    Ok(fiber_distance(&plane, r, d, rel_tol)?.length)
}

/// Infimum over base positions of the distance between a point and its
/// translate d units along the fiber.
#[derive(Clone, Debug)]
pub struct ShiftEstimate {
    /// Best length found.
    pub value: f64,
    /// Base coordinate realizing it.
    pub witness: f64,
    /// False when the minimizer kept escaping with the sampling frontier:
    /// the value is then an infimum approached only at infinity.
    pub attained: bool,
    /// Best-so-far lengths after each frontier expansion.
    pub tail: Vec<f64>,
}

impl ShiftEstimate {
    /// The per-frontier best lengths keep strictly improving over the last
    /// three expansions (ties allowed once the values are numerically zero).
    pub fn decreasing_tail(&self) -> bool {
        let n = self.tail.len();
        if n < 3 {
            return false;
        }
        let floor = 1e-12 * (1.0 + self.tail[0].abs());
        self.tail[n - 3..].windows(2).all(|w| w[1] < w[0] || w[1] <= floor)
    }

    /// The translate slips: its displacement infimum vanishes in the limit.
    pub fn slips(&self) -> bool {
        self.value < SLIPPING_THRESHOLD && (self.value.abs() <= 1e-12 || self.decreasing_tail())
    }
}

const BASE_GRID: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0];
const FRONTIER_LEVELS: i32 = 21;
const STALL_LIMIT: u32 = 2;

/// Infimum of x -> dist((x, 0), (x, d)) over the plane's base domain.
///
/// Samples a fixed core grid plus geometrically expanding frontiers at
/// 0.75 * 2^k and 2^k, stopping after two consecutive frontiers fail to
/// improve the best length; an interior best is then polished by golden
/// section between its sampled neighbors. The infimum is flagged unattained
/// when frontier samples both improved the best and still matched it at the
/// final expansion — the signature of a minimizer escaping to infinity.
pub fn cylinder_shift(
    p: &ProfilePlane,
    d: f64,
    rel_tol: f64,
) -> Result<ShiftEstimate, WarpedError> {
    if !d.is_finite() || d < 0.0 {
        return Err(WarpedError::BadFiberGap(d));
    }
    let eval_batch = |xs: &[f64]| -> Result<Vec<(f64, f64)>, GeodesicError> {
        par_map(xs, |x| fiber_distance(p, x, d, rel_tol).map(|g| (x, g.length)))
            .into_iter()
            .collect()
    };
    let best_of = |s: &[(f64, f64)]| {
        s.iter().copied().fold(
            (f64::NAN, f64::INFINITY),
            |acc, (x, v)| if v < acc.1 { (x, v) } else { acc },
        )
    };

    let core: Vec<f64> = if p.has_pole() {
        BASE_GRID.to_vec()
    } else {
        let mut xs = vec![0.0];
        for &x in &BASE_GRID[1..] {
            xs.push(-x);
            xs.push(x);
        }
        xs
    };
    let mut samples = eval_batch(&core)?;
    let (mut best_x, mut best) = best_of(&samples);
    let mut tail = vec![best];
    let mut improved_by_frontier = false;
    let mut frontier_matches = false;
    let mut stall = 0u32;
    for k in 3..=FRONTIER_LEVELS {
        let x_front = 2f64.powi(k);
        let mut front = vec![0.75 * x_front, x_front];
        if !p.has_pole() {
            front.push(-0.75 * x_front);
            front.push(-x_front);
        }
        let batch = eval_batch(&front)?;
        let (frontier_x, frontier_best) = best_of(&batch);
        samples.extend_from_slice(&batch);
        let improvement = best - frontier_best;
        if frontier_best < best - 1e-12 * (1.0 + best.abs()) {
            improved_by_frontier = true;
        }
        frontier_matches = frontier_best <= best + 1e-9 * (1.0 + best.abs());
        if frontier_best < best {
            best = frontier_best;
            best_x = frontier_x;
        }
        tail.push(best);
        if improvement < 1e-12 * (1.0 + best.abs()) {
            stall += 1;
            if stall >= STALL_LIMIT {
                break;
            }
        } else {
            stall = 0;
        }
    }

    // Polish an interior minimum between its sampled neighbors; a best on
    // the outermost sample has no bracket and needs none.
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(i) = samples.iter().position(|&(x, _)| x == best_x) {
        if i > 0 && i + 1 < samples.len() {
            let golden = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (samples[i - 1].0, samples[i + 1].0);
            let mut x1 = b - golden * (b - a);
            let mut x2 = a + golden * (b - a);
            let mut f1 = fiber_distance(p, x1, d, rel_tol)?.length;
            let mut f2 = fiber_distance(p, x2, d, rel_tol)?.length;
            for _ in 0..40 {
                if f1 < f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - golden * (b - a);
                    f1 = fiber_distance(p, x1, d, rel_tol)?.length;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + golden * (b - a);
                    f2 = fiber_distance(p, x2, d, rel_tol)?.length;
                }
                let (x_new, f_new) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
                if f_new < best {
                    best = f_new;
                    best_x = x_new;
                }
            }
        }
    }

    let attained = !(improved_by_frontier && frontier_matches);
    Ok(ShiftEstimate { value: best, witness: best_x, attained, tail })
}

/// Length data for one tracked power of the fiber generator.
#[derive(Clone, Debug)]
pub struct PowerLength {
    pub exponent: i64,
    pub shift: ShiftEstimate,
}

/// Covering-spectrum report for a warped cylinder with fiber generator g.
#[derive(Clone, Debug)]
pub struct CylinderReport {
    /// Breakpoints of the filtration of <g> by short powers.
    pub spectrum: Spectrum,
    /// Translation-length estimates for g^1 .. g^N.
    pub powers: Vec<PowerLength>,
    /// The generator's displacement infimum vanishes at infinity.
    pub generator_slips: bool,
}

/// Covering spectrum of the cylinder with fiber scale f and fiber
/// circumference c: translation lengths of the generator powers feed the
/// cyclic-filtration breakpoint test.
pub fn covspec_warped_cylinder(
    f: &WarpFunction,
    circumference: f64,
) -> Result<CylinderReport, WarpedError> {
    covspec_warped_cylinder_with_tol(f, circumference, DEFAULT_REL_TOL)
}

pub fn covspec_warped_cylinder_with_tol(
    f: &WarpFunction,
    circumference: f64,
    rel_tol: f64,
) -> Result<CylinderReport, WarpedError> {
    let plane = ProfilePlane::warped(f);
    covspec_from_plane(&plane, circumference, rel_tol)
}

/// Same computation over an already-built plane (any radial scale or slant).
pub(crate) fn covspec_from_plane(
    plane: &ProfilePlane,
    circumference: f64,
    rel_tol: f64,
) -> Result<CylinderReport, WarpedError> {
    if !circumference.is_finite() || circumference <= 0.0 {
        return Err(WarpedError::BadCircumference(circumference));
    }
    let mut powers = Vec::new();
    for n in 1..=POWERS_TRACKED {
        let shift = cylinder_shift(plane, n as f64 * circumference, rel_tol)?;
        powers.push(PowerLength { exponent: n, shift });
    }
    let lengths: Vec<(i64, SpectrumValue)> = powers
        .iter()
        .map(|p| {
            let sv = if p.shift.slips() {
                SpectrumValue::numeric(0.0, SLIPPING_THRESHOLD)
            } else {
                let v = p.shift.value;
                SpectrumValue::numeric(v, (10.0 * rel_tol * (1.0 + v)).max(1e-12))
            };
            (p.exponent, sv)
        })
        .collect();
    let spectrum = integer_filtration_spectrum(&lengths);
    let generator_slips = powers[0].shift.slips();
    Ok(CylinderReport { spectrum, powers, generator_slips })
}

/// Topology of the factor scaled by the collapsing warp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondFiber {
    SimplyConnected,
    HasLoops,
}

/// A doubly warped half-line metric dr^2 + h(r)^2 g_B + f(r)^2 g_M, where M
/// carries the loops being measured. The h factor never enters the length
/// computation — geodesics realizing a fiber shift project to the (r, M)
/// plane — but its topology gates the hypotheses: if B has loops of its own,
/// h must vanish at the axis so they rescale away.
#[derive(Clone, Debug)]
pub struct DoublyWarped {
    pub f: WarpFunction,
    pub h: Option<WarpFunction>,
    pub second_fiber: SecondFiber,
}

impl DoublyWarped {
    pub fn single(f: WarpFunction) -> DoublyWarped {
        DoublyWarped { f, h: None, second_fiber: SecondFiber::SimplyConnected }
    }

    pub fn check_hypotheses(&self) -> Result<(), WarpedError> {
        if let Some(h) = &self.h {
            if self.second_fiber == SecondFiber::HasLoops && h.f(0.0).abs() > 1e-9 {
                return Err(WarpedError::HypothesesNotMet);
            }
        }
        Ok(())
    }
}

/// Tail estimate for a limit of ratios along a radius schedule. The value is
/// the minimum over the tail of the schedule — an upper estimate for the
/// limit, not a converged quantity.
#[derive(Clone, Debug)]
pub struct TailEstimate {
    pub value: f64,
    /// (radius, ratio) along the schedule.
    pub samples: Vec<(f64, f64)>,
    /// Ratios were nonincreasing along the tail.
    pub tail_monotone: bool,
}

/// Strictly increasing geometric ladder from lo to hi inclusive.
pub fn geometric_schedule(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "schedule needs 0 < lo < hi and n >= 2");
    let step = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut out: Vec<f64> = (0..n).map(|i| lo * step.powi(i as i32)).collect();
    out[n - 1] = hi;
    out
}

/// Rescaled length of the loop of length `loop_length` in the M factor:
/// dist((r, 0), (r, loop_length)) / r minimized over the tail of the
/// schedule.
pub fn warped_rescaled_length(
    w: &DoublyWarped,
    loop_length: f64,
    schedule: &[f64],
    rel_tol: f64,
) -> Result<TailEstimate, WarpedError> {
    w.check_hypotheses()?;
    if !loop_length.is_finite() || loop_length <= 0.0 {
        return Err(WarpedError::BadLoopLength(loop_length));
    }
    let increasing = schedule.len() >= 2
        && schedule[0] > 0.0
        && schedule[0].is_finite()
        && schedule.windows(2).all(|w| w[1] > w[0] && w[1].is_finite());
    if !increasing {
        return Err(WarpedError::BadSchedule);
    }
    let plane = ProfilePlane::warped(&w.f);
    let ratios: Result<Vec<(f64, f64)>, GeodesicError> =
        par_map(schedule, |r| fiber_distance(&plane, r, loop_length, rel_tol).map(|g| (r, g.length / r)))
            .into_iter()
            .collect();
    let samples = ratios?;
    let tail = &samples[samples.len() / 2..];
    let value = tail.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    let tail_monotone = tail.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) + 1e-12);
    Ok(TailEstimate { value, samples, tail_monotone })
}

/// Image of one covering-spectrum value of the cross-section under the conic
/// chord map delta -> (1/2) sqrt(2 - 2 cos(min(pi, 2 k delta))).
///
/// In the clamped regime the map is locally constant at 1, so the result is
/// exact regardless of how delta was obtained; below the clamp it stays
/// numeric. Certainty is inherited.
pub fn cone_limit_value(k: f64, delta: &SpectrumValue) -> SpectrumValue {
    let d = delta.value.to_f64();
    let arg = 2.0 * k * d;
    if arg >= PI * (1.0 + 1e-9) {
        return SpectrumValue {
            value: Value::from_int(1),
            provenance: Provenance::Exact,
            certainty: delta.certainty,
        };
    }
    let clamped = arg.min(PI);
    let v = 0.5 * (2.0 - 2.0 * clamped.cos()).sqrt();
    let input_tol = match delta.provenance {
        Provenance::Exact => 0.0,
        Provenance::Numeric(t) => t,
    };
    SpectrumValue {
        value: Value::approx(v),
        provenance: Provenance::Numeric(k * input_tol + 1e-12 * (1.0 + v)),
        certainty: delta.certainty,
    }
}

fn cone_limit_accumulation(k: f64, a: &AccumulationPoint) -> AccumulationPoint {
    let arg = (2.0 * k * a.value).min(PI);
    AccumulationPoint {
        value: 0.5 * (2.0 - 2.0 * arg.cos()).sqrt(),
        confidence: a.confidence.max(k * a.confidence),
    }
}

/// The metric cone C_k(Y): radius r, cross-section Y at unit radius scaled
/// by k r. Distances depend on Y only through base distances clamped at pi.
#[derive(Clone, Debug)]
pub struct ConeSpace {
    pub k: f64,
    pub base_covspec: Spectrum,
}

impl ConeSpace {
    pub fn new(k: f64, base_covspec: Spectrum) -> Result<ConeSpace, WarpedError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(WarpedError::BadConeConstant(k));
        }
        Ok(ConeSpace { k, base_covspec })
    }
}

/// Distance in C_k(Y) between points at radii r1, r2 whose base points are
/// base_distance apart in Y: the planar law of cosines with the angle
/// k * base_distance clamped at pi.
pub fn cone_distance(
    k: f64,
    r1: f64,
    r2: f64,
    base_distance: f64,
) -> Result<f64, WarpedError> {
    if !k.is_finite() || k <= 0.0 {
        return Err(WarpedError::BadConeConstant(k));
    }
    for r in [r1, r2] {
        if !r.is_finite() || r < 0.0 {
            return Err(WarpedError::BadConeRadius(r));
        }
    }
    if !base_distance.is_finite() || base_distance < 0.0 {
        return Err(WarpedError::BadBaseDistance(base_distance));
    }
    Ok(crate::geodesic::cone_fiber_distance(k, r1, r2, base_distance))
}

/// Rescaled covering spectra of a metric cone.
#[derive(Clone, Debug)]
pub struct ConeSpectra {
    pub infinite: Spectrum,
    pub basepoint: Spectrum,
}

/// At infinity each base value maps through the clamped chord formula. From
/// the apex the spectrum is empty — every translate is realized along rays
/// from the apex with displacement growing slower than the distance to the
/// basepoint — so no sampling near the apex ever happens.
pub fn cone_rescaled_spectrum(cone: &ConeSpace) -> ConeSpectra {
    let values = cone
        .base_covspec
        .values
        .iter()
        .map(|sv| cone_limit_value(cone.k, sv))
        .collect();
    let mut infinite = Spectrum::from_values(values);
    infinite.accumulation_points = cone
        .base_covspec
        .accumulation_points
        .iter()
        .map(|a| cone_limit_accumulation(cone.k, a))
        .collect();
    ConeSpectra { infinite, basepoint: Spectrum::empty() }
}

/// What the ratio f(r)/r does as r grows.
#[derive(Clone, Debug, PartialEq)]
pub enum AsymVerdict {
    /// Converges to a positive slope: the space opens like a cone C_k.
    Conic { k: f64 },
    /// Converges to zero: fiber loops slip and the spectrum is empty.
    Slipping,
    /// No finite limit on the sampled range: no conclusion.
    NoLimit,
}

#[derive(Clone, Debug)]
pub struct AsymReport {
    pub verdict: AsymVerdict,
    /// Spectrum implied by the verdict; absent when no limit exists.
    pub spectrum: Option<Spectrum>,
    /// Fiber loops belong to the rescaled slipping group.
    pub fiber_slips: bool,
}

/// Rescaled covering spectrum at infinity of the cylinder with fiber scale f
/// over a cross-section with the given covering spectrum, decided by the
/// asymptotic slope of f.
pub fn asym_covspec(f: &WarpFunction, base: &Spectrum) -> AsymReport {
    let radii: Vec<f64> = (0..=24).map(|j| 10.0 * 2f64.powi(j)).collect();
    let ratios: Vec<f64> = radii.iter().map(|&r| f.f(r) / r).collect();
    let last = ratios[ratios.len() - 1];
    // a fitted decay model that explains every sample beats the raw tail
    // (slow decays like 1/sqrt(r) never flatten within reach); a flat tail
    // is accepted on its own when no model fits
    let fitted = sequence_limit_estimate(&ratios)
        .filter(|&(limit, residual)| limit.is_finite() && residual <= 1e-6 * (1.0 + limit.abs()));
    let window_tol = 1e-6 * (1.0 + last.abs());
    let window_settled = last.is_finite()
        && ratios[ratios.len() - 4..].iter().all(|&q| (q - last).abs() <= window_tol);
    let k = match fitted {
        Some((limit, _)) => limit,
        None if window_settled => last,
        None => {
            return AsymReport {
                verdict: AsymVerdict::NoLimit,
                spectrum: None,
                fiber_slips: false,
            }
        }
    };
    if k < -1e-9 {
        // the ratio of a positive warp cannot have a negative limit; the
        // fit latched onto something unstable
        return AsymReport { verdict: AsymVerdict::NoLimit, spectrum: None, fiber_slips: false };
    }
    if k.abs() <= 1e-9 {
        return AsymReport {
            verdict: AsymVerdict::Slipping,
            spectrum: Some(Spectrum::empty()),
            fiber_slips: true,
        };
    }
    let cone = ConeSpace { k, base_covspec: base.clone() };
    AsymReport {
        verdict: AsymVerdict::Conic { k },
        spectrum: Some(cone_rescaled_spectrum(&cone).infinite),
        fiber_slips: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Domain;
    use crate::value::Value;

    fn warp(src: &str, domain: Domain) -> WarpFunction {
        WarpFunction::parse(src, domain).unwrap()
    }

    #[test]
    fn flat_cylinder_spectrum_is_half_circumference() {
        let f = warp("1", Domain::FullLine);
        let c = 2.0 * PI;
        let report = covspec_warped_cylinder(&f, c).unwrap();
        for p in &report.powers {
            let want = p.exponent as f64 * c;
            assert!((p.shift.value - want).abs() <= 1e-9 * want);
            assert!(p.shift.attained, "flat shift is attained everywhere");
            assert!(!p.shift.slips());
        }
        assert!(!report.generator_slips);
        let got = report.spectrum.to_f64s();
        assert_eq!(got.len(), 1);
        assert!((got[0] - PI).abs() <= 1e-9);
    }

    #[test]
    fn bump_cylinder_infimum_escapes_to_infinity() {
        let f = warp("1+exp(-r^2)", Domain::FullLine);
        let c = 2.0 * PI;
        let report = covspec_warped_cylinder(&f, c).unwrap();
        let g = &report.powers[0].shift;
        assert!((g.value - c).abs() <= 1e-4, "generator length {} vs {}", g.value, c);
        assert!(!g.attained, "infimum only approached at infinity");
        assert!(!g.slips());
        let got = report.spectrum.to_f64s();
        assert_eq!(got.len(), 1);
        assert!((got[0] - PI).abs() <= 1e-3);
        // at finite base points the shift stays strictly above the limit
        let plane = ProfilePlane::warped(&f);
        for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let len = fiber_distance(&plane, r, c, DEFAULT_REL_TOL).unwrap().length;
            assert!(len > c + 1e-6, "shift at {} is {}", r, len);
        }
    }

    #[test]
    fn cusp_cylinder_slips_with_empty_spectrum() {
        let f = warp("exp(r)", Domain::FullLine);
        let report = covspec_warped_cylinder(&f, 2.0 * PI).unwrap();
        assert!(report.generator_slips);
        for p in &report.powers {
            assert!(p.shift.slips(), "power {} should slip", p.exponent);
            assert!(!p.shift.attained);
            assert!(p.shift.decreasing_tail() || p.shift.value == 0.0);
        }
        assert!(report.spectrum.is_empty());
    }

    #[test]
    fn shift_respects_fiber_scale_bounds() {
        // min f * d <= dist <= f(r) * d for any shift
        let f = warp("1+exp(-r^2)", Domain::FullLine);
        let plane = ProfilePlane::warped(&f);
        for d in [1.0, PI, 2.0 * PI] {
            for r in [0.0, 0.7, 1.3, 2.9] {
                let len = fiber_distance(&plane, r, d, DEFAULT_REL_TOL).unwrap().length;
                assert!(len >= d * 1.0 - 1e-9);
                assert!(len <= d * plane.f(r) + 1e-9);
            }
        }
    }

    #[test]
    fn shift_is_monotone_in_the_gap() {
        let f = warp("1+exp(-r^2)", Domain::FullLine);
        let plane = ProfilePlane::warped(&f);
        let mut prev = 0.0;
        for d in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let len = fiber_distance(&plane, 1.0, d, DEFAULT_REL_TOL).unwrap().length;
            assert!(len >= prev - 1e-9 * (1.0 + len));
            prev = len;
        }
    }

    #[test]
    fn cone_distance_matches_law_of_cosines() {
        // unit radii a half-turn apart with k = 1: a diameter through the apex
        assert!((cone_distance(1.0, 1.0, 1.0, PI).unwrap() - 2.0).abs() < 1e-12);
        // zero base distance: radial difference
        assert!((cone_distance(1.0, 2.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        // right angle: sqrt(1 + 4)
        let d = cone_distance(1.0, 2.0, 1.0, PI / 2.0).unwrap();
        assert!((d - 5f64.sqrt()).abs() < 1e-12);
        // angles past pi clamp: the geodesic passes through the apex
        assert!((cone_distance(1.0, 1.0, 1.0, 3.0 * PI).unwrap() - 2.0).abs() < 1e-12);
        assert!((cone_distance(2.0, 1.0, 1.0, PI / 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(cone_distance(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(cone_distance(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(cone_distance(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn cone_spectrum_clamps_to_exact_one() {
        // base value far past the clamp: pi / sqrt(2) with k = 1
        let delta = PI / 2f64.sqrt();
        let base = Spectrum::from_values(vec![SpectrumValue::numeric(delta, 1e-9)]);
        let cone = ConeSpace::new(1.0, base).unwrap();
        let spectra = cone_rescaled_spectrum(&cone);
        assert!(spectra.basepoint.is_empty());
        assert!(spectra.infinite.equals_exact(&[Value::from_int(1)]));
    }

    #[test]
    fn cone_spectrum_below_clamp_is_the_chord() {
        let base = Spectrum::from_values(vec![SpectrumValue::exact(Value::pi_times(1, 8))]);
        let cone = ConeSpace::new(1.0, base).unwrap();
        let got = cone_rescaled_spectrum(&cone).infinite.to_f64s();
        assert_eq!(got.len(), 1);
        let want = 0.5 * (2.0 - 2.0 * (PI / 4.0).cos()).sqrt();
        assert!((got[0] - want).abs() < 1e-12);
    }

    #[test]
    fn cone_spectrum_is_scale_invariant() {
        // C_{k}(Y) and C_{k/2}(Y scaled by 2) are the same cone
        let base1 = Spectrum::from_values(vec![SpectrumValue::numeric(PI / 8.0, 1e-12)]);
        let base2 = Spectrum::from_values(vec![SpectrumValue::numeric(PI / 4.0, 1e-12)]);
        let s1 = cone_rescaled_spectrum(&ConeSpace::new(1.0, base1).unwrap());
        let s2 = cone_rescaled_spectrum(&ConeSpace::new(0.5, base2).unwrap());
        let (a, b) = (s1.infinite.to_f64s(), s2.infinite.to_f64s());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn asym_linear_growth_reads_off_the_slope() {
        let f = warp("2*r+1", Domain::HalfLine);
        let base = Spectrum::from_values(vec![SpectrumValue::exact(Value::pi_times(1, 8))]);
        let report = asym_covspec(&f, &base);
        match report.verdict {
            AsymVerdict::Conic { k } => assert!((k - 2.0).abs() < 1e-6),
            ref v => panic!("expected conic verdict, got {:?}", v),
        }
        assert!(!report.fiber_slips);
        let got = report.spectrum.unwrap().to_f64s();
        assert_eq!(got.len(), 1);
        // 2 k delta = pi / 2
        let want = 0.5 * (2.0 - 2.0 * (PI / 2.0).cos()).sqrt();
        assert!((got[0] - want).abs() < 1e-6);
    }

    #[test]
    fn asym_sublinear_growth_slips() {
        let f = warp("sqrt(r)", Domain::HalfLine);
        let base = Spectrum::from_values(vec![SpectrumValue::exact(Value::pi_times(1, 1))]);
        let report = asym_covspec(&f, &base);
        assert_eq!(report.verdict, AsymVerdict::Slipping);
        assert!(report.fiber_slips);
        assert!(report.spectrum.unwrap().is_empty());
    }

    #[test]
    fn asym_superlinear_growth_has_no_limit() {
        let f = warp("exp(r)", Domain::HalfLine);
        let base = Spectrum::empty();
        let report = asym_covspec(&f, &base);
        assert_eq!(report.verdict, AsymVerdict::NoLimit);
        assert!(report.spectrum.is_none());
    }

    #[test]
    fn doubly_warped_hypotheses_gate_second_fiber_loops() {
        let f = warp("r+1", Domain::HalfLine);
        let bad = DoublyWarped {
            f: f.clone(),
            h: Some(warp("1", Domain::HalfLine)),
            second_fiber: SecondFiber::HasLoops,
        };
        assert!(matches!(bad.check_hypotheses(), Err(WarpedError::HypothesesNotMet)));
        let closed_axis = DoublyWarped {
            f: f.clone(),
            h: Some(warp("r", Domain::HalfLine)),
            second_fiber: SecondFiber::HasLoops,
        };
        assert!(closed_axis.check_hypotheses().is_ok());
        let simply_connected = DoublyWarped {
            f,
            h: Some(warp("1", Domain::HalfLine)),
            second_fiber: SecondFiber::SimplyConnected,
        };
        assert!(simply_connected.check_hypotheses().is_ok());
    }

    #[test]
    fn rescaled_length_of_shifted_cone_reaches_two() {
        // f = r + 10 opens like a unit-slope cone; a half-turn clamps
        let w = DoublyWarped::single(warp("r+10", Domain::HalfLine));
        let schedule = geometric_schedule(10.0, 1e4, 24);
        let est = warped_rescaled_length(&w, PI, &schedule, 1e-8).unwrap();
        assert!((est.value - 2.0).abs() < 1e-2, "tail value {}", est.value);
        assert!(est.tail_monotone);
    }

    #[test]
    fn rescaled_length_matches_the_cone_chord_below_clamp() {
        let w = DoublyWarped::single(warp("r", Domain::HalfLine));
        let schedule = geometric_schedule(1.0, 1e4, 24);
        let est = warped_rescaled_length(&w, PI / 4.0, &schedule, 1e-8).unwrap();
        let chord = (2.0 - 2.0 * (PI / 4.0).cos()).sqrt();
        assert!((est.value - chord).abs() < 1e-2, "tail value {}", est.value);
        // consistency with the half-angle spectrum map
        let half = cone_limit_value(1.0, &SpectrumValue::numeric(PI / 8.0, 1e-12));
        assert!((2.0 * half.value.to_f64() - chord).abs() < 1e-9);
    }

    #[test]
    fn rescaled_length_of_sublinear_warp_vanishes() {
        let w = DoublyWarped::single(warp("sqrt(r)", Domain::HalfLine));
        let schedule = geometric_schedule(1.0, 1e6, 16);
        let est = warped_rescaled_length(&w, PI, &schedule, 1e-8).unwrap();
        assert!(est.value < 1e-2, "tail value {}", est.value);
    }

    #[test]
    fn rescaled_length_validates_inputs() {
        let w = DoublyWarped::single(warp("r", Domain::HalfLine));
        assert!(matches!(
            warped_rescaled_length(&w, 0.0, &[1.0, 2.0], 1e-8),
            Err(WarpedError::BadLoopLength(_))
        ));
        assert!(matches!(
            warped_rescaled_length(&w, 1.0, &[2.0, 1.0], 1e-8),
            Err(WarpedError::BadSchedule)
        ));
        assert!(matches!(
            warped_rescaled_length(&w, 1.0, &[1.0], 1e-8),
            Err(WarpedError::BadSchedule)
        ));
    }

    #[test]
    fn geometric_schedule_is_strictly_increasing() {
        let s = geometric_schedule(1.0, 1e4, 9);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[8], 1e4);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }
}
