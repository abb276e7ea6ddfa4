//! Minimal geodesics in a profile plane: the metric a(x)^2 dx^2 + f(x)^2 dy^2
//! on a line or half-line of base coordinates x, with periodic or unbounded
//! fiber coordinate y.
//!
//! The central routine, [`fiber_distance`], computes the distance between two
//! points (r, 0) and (r, d) on the same base level. Along any geodesic the
//! quantity c = f(x)^2 dy/ds is conserved, so a geodesic between equal base
//! levels is symmetric about a single turning point x* with f(x*) = c, and
//! the half gap and half length are explicit integrals in x. The solver
//! brackets every Clairaut constant whose gap matches d on a logarithmic
//! grid, refines each bracket by bisection, and takes the minimum over the
//! dip branches, the constant-base fiber path, and (when the fiber collapses
//! at x = 0) the path through the pole.
//!
//! [`variational_length`] is an independent cross-check: direct minimization
//! of the discretized path length, sharing no code with the shooting solver.

use crate::expr::{Domain, WarpFunction};
use std::f64::consts::PI;
use thiserror::Error;

/// Default relative tolerance for solved lengths.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Bisection width on the Clairaut constant, relative to f(r). Kept near
/// machine epsilon: shallow dips win over the fiber path by margins that a
/// coarser constant would wash out.
pub const CLAIRAUT_TOL: f64 = 4.0 * f64::EPSILON;
/// Default node count for the variational oracle.
pub const ORACLE_NODES: usize = 1 << 10;

/// Points on the Clairaut-constant grid per side.
const GRID: usize = 64;
/// Smallest grid constant, as a fraction of f(r).
const GRID_FLOOR: f64 = 1e-9;
/// How far past the base point the turning-point march is allowed to go.
const MARCH_REACH: f64 = 1e6;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("fiber gap must be finite and nonnegative, got {0}")]
    BadGap(f64),
    #[error("base coordinate {0} lies outside the profile domain")]
    BadBase(f64),
}

type Profile = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A line (or half-line) of base coordinates with the metric
/// a(x)^2 dx^2 + f(x)^2 dy^2.
pub struct ProfilePlane {
    f: Profile,
    a: Profile,
    /// The fiber collapses to a point at x = 0: base coordinates live on
    /// [0, inf) and paths may pass through the pole.
    pole: bool,
    /// Base coordinates live on [0, inf) but the fiber survives at 0 (the
    /// other factors close the space there); the profile is evaluated at |x|
    /// so geodesics pass through the cap unimpeded.
    half: bool,
}

impl ProfilePlane {
    /// Build a plane from raw profile closures. `pole` marks a collapsed
    /// fiber at x = 0 (half-line domain, paths may cross the pole); `half`
    /// marks a half-line domain whose fiber survives at 0, where the even
    /// extension f(|x|), a(|x|) lets geodesics run through the cap.
    pub fn from_parts(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        pole: bool,
        half: bool,
    ) -> ProfilePlane {
        let half = half || pole;
        let (f, a): (Profile, Profile) = if half {
            (Box::new(move |x: f64| f(x.abs())), Box::new(move |x: f64| a(x.abs())))
        } else {
            (Box::new(f), Box::new(a))
        };
        ProfilePlane { f, a, pole, half }
    }

    /// The warped plane of `w`: a == 1. On a half-line domain, f(0) == 0
    /// means the fiber collapses at 0 (a cone apex or smooth pole); otherwise
    /// the space closes at 0 with the fiber intact and geodesics continue
    /// through the cap, which the even extension f(|x|) models exactly.
    pub fn warped(w: &WarpFunction) -> ProfilePlane {
        let expr = w.expr.clone();
        match w.domain {
            Domain::FullLine => ProfilePlane {
                f: Box::new(move |x| expr.eval(x)),
                a: Box::new(|_| 1.0),
                pole: false,
                half: false,
            },
            Domain::HalfLine => {
                let pole = w.f(0.0).abs() < 1e-12;
                ProfilePlane {
                    f: Box::new(move |x| expr.eval(x.abs())),
                    a: Box::new(|_| 1.0),
                    pole,
                    half: true,
                }
            }
        }
    }

    /// The surface of revolution with radius profile `rho`, parametrized by
    /// the axis coordinate: a = sqrt(1 + rho'^2) accounts for the slant.
    pub fn revolution(rho: &WarpFunction) -> ProfilePlane {
        let expr = rho.expr.clone();
        let d1 = rho.d1.clone();
        match rho.domain {
            Domain::FullLine => ProfilePlane {
                f: Box::new(move |x| expr.eval(x)),
                a: Box::new(move |x| (1.0 + d1.eval(x).powi(2)).sqrt()),
                pole: false,
                half: false,
            },
            Domain::HalfLine => {
                let pole = rho.f(0.0).abs() < 1e-12;
                ProfilePlane {
                    f: Box::new(move |x| expr.eval(x.abs())),
                    a: Box::new(move |x| (1.0 + d1.eval(x.abs()).powi(2)).sqrt()),
                    pole,
                    half: true,
                }
            }
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    pub fn has_pole(&self) -> bool {
        self.pole
    }

    /// Length of the base segment from x0 to x1 (a geodesic when the fiber
    /// coordinate is held fixed).
    pub fn radial_length(&self, x0: f64, x1: f64) -> f64 {
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        if lo == hi {
            return 0.0;
        }
        tanh_sinh(&|x| (self.a)(x), lo, hi, 1e-12).0
    }

    fn check_base(&self, r: f64) -> Result<(), GeodesicError> {
        if !r.is_finite() || ((self.pole || self.half) && r < 0.0) {
            return Err(GeodesicError::BadBase(r));
        }
        Ok(())
    }
}

/// Which way a dip leaves the base level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Toward smaller base coordinates.
    Lower,
    /// Toward larger base coordinates.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Branch {
    /// The constant-base path along the fiber.
    Fiber,
    /// A symmetric dip with one turning point.
    Dip(Side),
    /// Two base segments through the collapsed pole.
    Pole,
}

#[derive(Clone, Copy, Debug)]
pub struct Geodesic {
    pub length: f64,
    pub branch: Branch,
    /// Conserved f^2 dy/ds on dip branches.
    pub clairaut: Option<f64>,
    /// Turning-point base coordinate on dip branches.
    pub turning: Option<f64>,
}

/// Distance between (r, 0) and (r, d); `d` is the fiber gap in the y
/// coordinate. `rel_tol` controls the quadrature targets (lengths are
/// typically accurate to well below it).
pub fn fiber_distance(
    p: &ProfilePlane,
    r: f64,
    d: f64,
    rel_tol: f64,
) -> Result<Geodesic, GeodesicError> {
    if !d.is_finite() || d < 0.0 {
        return Err(GeodesicError::BadGap(d));
    }
    p.check_base(r)?;
    let fr = p.f(r);
    let fiber = Geodesic { length: fr * d, branch: Branch::Fiber, clairaut: None, turning: None };
    if d == 0.0 || fr == 0.0 {
        return Ok(Geodesic { length: 0.0, ..fiber });
    }
    let quad_tol = (rel_tol * 1e-2).max(1e-13);
    let mut best = fiber;
    if p.pole && r > 0.0 {
        let through = 2.0 * p.radial_length(0.0, r);
        if through < best.length {
            best = Geodesic { length: through, branch: Branch::Pole, clairaut: None, turning: Some(0.0) };
        }
    }
    for side in [Side::Lower, Side::Upper] {
        for dip in dip_candidates(p, r, d, fr, side, quad_tol) {
            if dip.length < best.length {
                best = dip;
            }
        }
    }
    Ok(best)
}

/// All dip geodesics on one side whose gap matches d: spans are sampled on a
/// logarithmic grid of Clairaut constants and every sign change of
/// span(c) - d is refined by bisection.
fn dip_candidates(
    p: &ProfilePlane,
    r: f64,
    d: f64,
    fr: f64,
    side: Side,
    quad_tol: f64,
) -> Vec<Geodesic> {
    // span(c) -> 0 as c -> f(r): an infinitesimal dip. Seeding the grid with
    // this limit lets shallow dips bracket against it.
    let mut samples: Vec<(f64, f64, f64)> = vec![(fr, 0.0, r)];
    let probe = |c: f64| -> Option<(f64, f64, f64)> {
        let x_turn = turning_point(p, r, c, side)?;
        let span = dip_gap(p, r, x_turn, quad_tol);
        (span.is_finite() && span > 0.0).then_some((c, span, x_turn))
    };
    let mut last_valid = fr;
    for i in 1..=GRID {
        let c = fr * (GRID_FLOOR.ln() * i as f64 / GRID as f64).exp();
        match probe(c) {
            Some(sample) => {
                samples.push(sample);
                last_valid = c;
            }
            None => {
                // the dip escapes below some critical level between this c
                // and the last valid one; spans blow up approaching that
                // level from above, so resolve it and sample the approach
                let (mut bad, mut good) = (c, last_valid);
                for _ in 0..60 {
                    let mid = 0.5 * (bad + good);
                    if turning_point(p, r, mid, side).is_some() {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                for k in 1..=12 {
                    let eps = (last_valid - good) * 10f64.powi(-k);
                    if eps <= 0.0 {
                        break;
                    }
                    if let Some(sample) = probe(good + eps) {
                        samples.push(sample);
                    }
                }
                break;
            }
        }
    }
    let mut out = Vec::new();
    for pair in samples.windows(2) {
        let (c_hi, span_hi, _) = pair[0];
        let (c_lo, span_lo, _) = pair[1];
        if (span_hi - d).signum() == (span_lo - d).signum() {
            continue;
        }
        let (mut lo, mut hi) = (c_lo, c_hi);
        let mut sign_lo = span_lo - d;
        let mut turn = None;
        while hi - lo > CLAIRAUT_TOL * fr {
            let mid = 0.5 * (lo + hi);
            let Some(x_turn) = turning_point(p, r, mid, side) else { break };
            turn = Some(x_turn);
            let gap = dip_gap(p, r, x_turn, quad_tol) - d;
            if gap.abs() <= 1e-12 * d {
                break;
            }
            if gap.signum() == sign_lo.signum() {
                lo = mid;
                sign_lo = gap;
            } else {
                hi = mid;
            }
        }
        let c = 0.5 * (lo + hi);
        let Some(x_turn) = turning_point(p, r, c, side).or(turn) else { continue };
        let mut length = 2.0 * dip_half_length(p, r, x_turn, quad_tol);
        let span = dip_gap(p, r, x_turn, quad_tol);
        // close any residual gap along the fiber at the turning level, where
        // the dip is tangent to the fiber; the combined path stays
        // admissible, so the bound stays honest
        length += c * (d - span).max(0.0);
        out.push(Geodesic {
            length,
            branch: Branch::Dip(side),
            clairaut: Some(c),
            turning: Some(x_turn),
        });
    }
    // Tangent-patched dips: when spans never reach d (a valley bottoms out
    // at a corner or the profile opens like a cone), the distance is still
    // realized by dipping to the turning level, running along the fiber
    // there, and mirroring back up. Within one family of dips the patched
    // length increases with the Clairaut constant — the constant is the
    // momentum conjugate to the fiber gap, so dLength = c dSpan along the
    // family — and only each family's smallest constant needs measuring.
    // Families are split where the turning point jumps to another valley.
    let mut short: Vec<(f64, f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(c, span, _)| c > 0.0 && span < d)
        .collect();
    short.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut prev_turn = f64::NAN;
    for (i, &(c, span, x_t)) in short.iter().enumerate() {
        let family_min = i == 0
            || (x_t - prev_turn).abs() > 0.6 * (1.0 + x_t.abs().max(prev_turn.abs()));
        prev_turn = x_t;
        if !family_min {
            continue;
        }
        let length = 2.0 * dip_half_length(p, r, x_t, quad_tol) + c * (d - span);
        out.push(Geodesic {
            length,
            branch: Branch::Dip(side),
            clairaut: Some(c),
            turning: Some(x_t),
        });
    }
    out
}

/// First base coordinate on the given side of r where the profile falls to c,
/// found by a growing march and bisection. None when the profile stays above
/// c within reach (the dip escapes and connects nothing). The returned point
/// sits on the f > c side of the crossing so the dip integrands keep a
/// strictly positive radicand.
fn turning_point(p: &ProfilePlane, r: f64, c: f64, side: Side) -> Option<f64> {
    let dir = match side {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    // bisect the crossing inside (good, bad) with f(good) > c >= f(bad),
    // answering on the f > c side
    let refine = |mut good: f64, mut bad: f64| -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (good + bad);
            if p.f(mid) > c {
                good = mid;
            } else {
                bad = mid;
            }
            if (good - bad).abs() <= 1e-14 * (1.0 + mid.abs()) {
                break;
            }
        }
        good
    };
    let mut prev = r;
    let mut f_prev = p.f(r);
    let mut older: Option<(f64, f64)> = None;
    let mut step = 0.02 * (1.0 + r.abs());
    let reach = r.abs() + MARCH_REACH;
    loop {
        // cap the stride so valleys near the origin are not stepped over:
        // feature widths are assumed to scale with distance from the origin
        let stride = step.min(0.25 * (1.0 + prev.abs()));
        let mut x = prev + dir * stride;
        if p.pole && x < 0.0 {
            x = 0.0;
        }
        let fx = p.f(x);
        if fx <= c {
            return Some(refine(prev, x));
        }
        if let Some((old, f_old)) = older {
            if f_prev < f_old && f_prev < fx {
                // three samples bracket a valley whose bottom may still dip
                // below c even though every sample stayed above it
                let (x_min, f_min) = valley_bottom(p, old, x);
                if f_min <= c {
                    let good = if (x_min - prev) * dir > 0.0 { prev } else { old };
                    return Some(refine(good, x_min));
                }
            }
        }
        if (p.pole && x == 0.0) || x.abs() > reach {
            return None;
        }
        older = Some((prev, f_prev));
        prev = x;
        f_prev = fx;
        step *= 1.6;
    }
}

/// Golden-section minimum of the profile over [a, b].
fn valley_bottom(p: &ProfilePlane, a: f64, b: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = p.f(x1);
    let mut f2 = p.f(x2);
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = p.f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = p.f(x2);
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Local model of the profile at a turning point. Evaluating f(x) - c
/// directly loses all digits in a narrow layer around the turning point, so
/// inside `z_switch` the drop is replaced by its Taylor form with
/// finite-difference slope and curvature.
struct Turn {
    x_t: f64,
    c: f64,
    slope: f64,
    curv: f64,
    z_switch: f64,
}

impl Turn {
    fn at(p: &ProfilePlane, x_t: f64) -> Turn {
        let scale = 1.0 + x_t.abs();
        let mut e = 1e-6 * scale;
        if (p.pole || p.half) && x_t.abs() > 0.0 {
            // keep the stencil away from the |x| kink at the origin
            e = e.min(0.5 * x_t.abs());
        }
        let c = p.f(x_t);
        let up = p.f(x_t + e);
        let down = p.f(x_t - e);
        let slope = (up - down) / (2.0 * e);
        let curv = (up - 2.0 * c + down) / (e * e);
        // stay inside the trust region of the quadratic model, where the
        // linear term still dominates
        let trust = if curv.abs() > 0.0 { 0.5 * slope.abs() / curv.abs() } else { f64::INFINITY };
        Turn { x_t, c, slope, curv, z_switch: (10.0 * e).min(1e-4 * scale).min(trust) }
    }

    /// f(x_t + z) - f(x_t), stable down to z = 0.
    fn drop(&self, p: &ProfilePlane, z: f64) -> f64 {
        if z.abs() >= self.z_switch {
            p.f(self.x_t + z) - self.c
        } else {
            self.slope * z + 0.5 * self.curv * z * z
        }
    }
}

/// Fiber gap spanned by the full dip with turning point x_turn: twice the
/// integral of a c / (f sqrt(f^2 - c^2)) in x from x_turn to r. The
/// substitution x = x_turn + (r - x_turn) s^2 cancels the inverse square
/// root at the turning point, leaving a smooth integrand on [0, 1].
fn dip_gap(p: &ProfilePlane, r: f64, x_turn: f64, quad_tol: f64) -> f64 {
    let turn = Turn::at(p, x_turn);
    let stretch = r - x_turn;
    let g = |s: f64| {
        let z = stretch * s * s;
        let drop = turn.drop(p, z);
        let fx = turn.c + drop;
        let rad = (drop * (fx + turn.c)).max(1e-300);
        2.0 * stretch.abs() * s * p.a(x_turn + z) * turn.c / (fx * rad.sqrt())
    };
    2.0 * tanh_sinh(&g, 0.0, 1.0, quad_tol).0
}

/// Length of the full dip: twice the integral of a f / sqrt(f^2 - c^2),
/// under the same turning-point substitution as [`dip_gap`].
fn dip_half_length(p: &ProfilePlane, r: f64, x_turn: f64, quad_tol: f64) -> f64 {
    let turn = Turn::at(p, x_turn);
    let stretch = r - x_turn;
    let g = |s: f64| {
        let z = stretch * s * s;
        let drop = turn.drop(p, z);
        let fx = turn.c + drop;
        let rad = (drop * (fx + turn.c)).max(1e-300);
        2.0 * stretch.abs() * s * p.a(x_turn + z) * fx / rad.sqrt()
    };
    tanh_sinh(&g, 0.0, 1.0, quad_tol).0
}

/// Tanh-sinh quadrature on (lo, hi). Handles integrable endpoint
/// singularities; returns (value, last correction).
fn tanh_sinh(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let mid = 0.5 * (lo + hi);
    let rad = 0.5 * (hi - lo);
    let t_max = 5.0;
    let node = |t: f64| -> f64 {
        let u = (0.5 * PI * t.sinh()).tanh();
        let w = 0.5 * PI * t.cosh() / (0.5 * PI * t.sinh()).cosh().powi(2);
        if w < 1e-280 {
            return 0.0;
        }
        let x = mid + rad * u;
        if x <= lo || x >= hi {
            return 0.0;
        }
        w * g(x)
    };
    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1.0;
    while k * h <= t_max {
        sum += node(k * h) + node(-k * h);
        k += 1.0;
    }
    let mut value = rad * h * sum;
    let mut err = f64::INFINITY;
    for _ in 0..10 {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            sum += node(t) + node(-t);
            t += 2.0 * h;
        }
        let next = rad * h * sum;
        err = (next - value).abs();
        value = next;
        if err <= rel_tol * value.abs().max(1e-30) {
            break;
        }
    }
    (value, err)
}

/// Independent length oracle: minimize the discrete length of a path with
/// fixed endpoints (r, 0) and (r, d) over `nodes` fiber steps by damped
/// Newton iteration, Richardson-extrapolating the node count. Shares nothing
/// with the shooting solver.
pub fn variational_length(p: &ProfilePlane, r: f64, d: f64, nodes: usize) -> f64 {
    let n = nodes.max(16);
    let coarse = minimized_path_length(p, r, d, n / 2);
    let fine = minimized_path_length(p, r, d, n);
    // midpoint discretization error is O(h^2)
    (4.0 * fine - coarse) / 3.0
}

fn minimized_path_length(p: &ProfilePlane, r: f64, d: f64, n: usize) -> f64 {
    let amp = 0.75 * (1.0 + r.abs());
    let mut best = f64::INFINITY;
    for seed in [0.0, -amp, amp, -4.0 * amp, 4.0 * amp] {
        let len = descend_path(p, r, d, n, seed);
        if len < best {
            best = len;
        }
    }
    best
}

fn descend_path(p: &ProfilePlane, r: f64, d: f64, n: usize, seed: f64) -> f64 {
    let h = d / n as f64;
    let clamp = |v: f64| if p.pole { v.max(0.0) } else { v };
    let mut x: Vec<f64> = (0..=n)
        .map(|i| clamp(r - seed * (PI * i as f64 / n as f64).sin()))
        .collect();
    let mut lambda = 1e-8;
    let mut len = discrete_length(p, &x, h);
    for _ in 0..120 {
        let grad = discrete_gradient(p, &x, h);
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < 1e-12 * (1.0 + len) {
            break;
        }
        let (diag, off) = tridiagonal_hessian(p, &x, h);
        let mut step = None;
        for _ in 0..40 {
            if let Some(s) = solve_tridiagonal(&diag, &off, &grad, lambda) {
                step = Some(s);
                break;
            }
            lambda *= 10.0;
        }
        let Some(step) = step else { break };
        let mut tau = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&step)
                .map(|(&xi, &si)| clamp(xi - tau * si))
                .collect();
            let trial_len = discrete_length(p, &trial, h);
            if trial_len < len {
                let gain = len - trial_len;
                x = trial;
                len = trial_len;
                improved = true;
                lambda = (lambda * 0.3).max(1e-12);
                if gain < 1e-14 * (1.0 + len) {
                    return len;
                }
                break;
            }
            tau *= 0.5;
        }
        if !improved {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    len
}

fn segment(p: &ProfilePlane, x0: f64, x1: f64, h: f64) -> f64 {
    let m = 0.5 * (x0 + x1);
    let (am, fm) = (p.a(m), p.f(m));
    ((am * (x1 - x0)).powi(2) + (fm * h).powi(2)).sqrt()
}

fn discrete_length(p: &ProfilePlane, x: &[f64], h: f64) -> f64 {
    x.windows(2).map(|w| segment(p, w[0], w[1], h)).sum()
}

/// d(segment)/d(x0) and d(segment)/d(x1), with the profile derivatives taken
/// by central differences.
fn segment_grad(p: &ProfilePlane, x0: f64, x1: f64, h: f64) -> (f64, f64) {
    let m = 0.5 * (x0 + x1);
    let e = 1e-6 * (1.0 + m.abs());
    let (am, fm) = (p.a(m), p.f(m));
    let da = (p.a(m + e) - p.a(m - e)) / (2.0 * e);
    let df = (p.f(m + e) - p.f(m - e)) / (2.0 * e);
    let delta = x1 - x0;
    let len = ((am * delta).powi(2) + (fm * h).powi(2)).sqrt().max(1e-300);
    let mid_term = 0.5 * (am * da * delta * delta + fm * df * h * h) / len;
    let delta_term = am * am * delta / len;
    (mid_term - delta_term, mid_term + delta_term)
}

fn discrete_gradient(p: &ProfilePlane, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len() - 1;
    let mut grad = vec![0.0; n + 1];
    for i in 0..n {
        let (g0, g1) = segment_grad(p, x[i], x[i + 1], h);
        grad[i] += g0;
        grad[i + 1] += g1;
    }
    // endpoints are fixed
    grad[0] = 0.0;
    grad[n] = 0.0;
    grad
}

/// Tridiagonal Hessian bands by finite differences of the segment gradients.
fn tridiagonal_hessian(p: &ProfilePlane, x: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() - 1;
    let mut diag = vec![1.0; n + 1];
    let mut off = vec![0.0; n];
    for i in 1..n {
        let e = 1e-7 * (1.0 + x[i].abs());
        let left = segment_grad(p, x[i - 1], x[i] + e, h).1 - segment_grad(p, x[i - 1], x[i] - e, h).1;
        let right = segment_grad(p, x[i] + e, x[i + 1], h).0 - segment_grad(p, x[i] - e, x[i + 1], h).0;
        diag[i] = (left + right) / (2.0 * e);
        if i + 1 < n {
            let ec = 1e-7 * (1.0 + x[i + 1].abs());
            let cross =
                segment_grad(p, x[i], x[i + 1] + ec, h).0 - segment_grad(p, x[i], x[i + 1] - ec, h).0;
            off[i] = cross / (2.0 * ec);
        }
    }
    (diag, off)
}

/// Solve (H + lambda I) s = g for the interior unknowns; None when a pivot
/// degenerates (caller raises lambda and retries).
fn solve_tridiagonal(diag: &[f64], off: &[f64], g: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let n = diag.len() - 1;
    if n < 2 {
        return Some(vec![0.0; diag.len()]);
    }
    let m = n - 1;
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[1] + lambda;
    if denom.abs() < 1e-300 || !denom.is_finite() {
        return None;
    }
    c[0] = if m > 1 { off[1] / denom } else { 0.0 };
    d[0] = g[1] / denom;
    for i in 1..m {
        let sub = off[i];
        denom = diag[i + 1] + lambda - sub * c[i - 1];
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return None;
        }
        if i + 1 < m {
            c[i] = off[i + 1] / denom;
        }
        d[i] = (g[i + 1] - sub * d[i - 1]) / denom;
    }
    let mut s = vec![0.0; diag.len()];
    s[m] = d[m - 1];
    for i in (0..m - 1).rev() {
        s[i + 1] = d[i] - c[i] * s[i + 2];
    }
    if s.iter().all(|v| v.is_finite()) {
        Some(s)
    } else {
        None
    }
}

/// Closed form on the metric cone a == 1, f(x) = k x: unrolling the cone
/// turns geodesics into chords, so
/// dist = sqrt(r1^2 + r2^2 - 2 r1 r2 cos(min(pi, k d))).
pub fn cone_fiber_distance(k: f64, r1: f64, r2: f64, d: f64) -> f64 {
    let angle = (k * d).min(PI);
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * angle.cos()).sqrt().max(0.0)
}

/// Closed form for f(x) = e^x, a == 1: horocyclic coordinates on the
/// hyperbolic plane give cosh(dist) = 1 + d^2 e^(2r) / 2.
pub fn exp_profile_distance(r: f64, d: f64) -> f64 {
    (1.0 + 0.5 * d * d * (2.0 * r).exp()).acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Domain, WarpFunction};

    fn warp(src: &str, domain: Domain) -> ProfilePlane {
        ProfilePlane::warped(&WarpFunction::parse(src, domain).unwrap())
    }

    fn dist(p: &ProfilePlane, r: f64, d: f64) -> Geodesic {
        fiber_distance(p, r, d, DEFAULT_REL_TOL).unwrap()
    }

    fn assert_rel(got: f64, want: f64, tol: f64) {
        let err = (got - want).abs() / want.abs().max(1e-12);
        assert!(err <= tol, "got {got}, want {want} (rel err {err:.3e})");
    }

    #[test]
    fn flat_profile_is_isometric_to_the_plane() {
        let p = warp("1", Domain::FullLine);
        for r in [-2.0, 0.0, 5.0] {
            for d in [0.0, 0.5, 3.0, 20.0] {
                let g = dist(&p, r, d);
                assert_rel(g.length, d.max(1e-300), 1e-10);
                assert_eq!(g.branch, Branch::Fiber);
            }
        }
    }

    #[test]
    fn constant_profile_scales_the_fiber() {
        let p = warp("2", Domain::FullLine);
        assert_rel(dist(&p, 1.0, 3.0).length, 6.0, 1e-10);
    }

    #[test]
    fn cone_profile_matches_the_law_of_cosines() {
        let p = warp("r", Domain::HalfLine);
        assert!(p.has_pole());
        let r = 2.0;
        for d in [0.3, PI / 4.0, PI / 2.0, 2.8] {
            let g = dist(&p, r, d);
            assert_rel(g.length, cone_fiber_distance(1.0, r, r, d), 1e-7);
            assert!(matches!(g.branch, Branch::Dip(Side::Lower)));
        }
        // past the unrolling angle the geodesic passes through the apex
        let g = dist(&p, r, 3.3);
        assert_rel(g.length, 2.0 * r, 1e-9);
        assert_eq!(g.branch, Branch::Pole);
    }

    #[test]
    fn steeper_cones_fold_sooner() {
        let p = warp("2*r", Domain::HalfLine);
        let r = 1.5;
        let g = dist(&p, r, 0.7);
        assert_rel(g.length, cone_fiber_distance(2.0, r, r, 0.7), 1e-7);
        let g = dist(&p, r, 2.0);
        assert_rel(g.length, 2.0 * r, 1e-9);
        assert_eq!(g.branch, Branch::Pole);
    }

    #[test]
    fn exp_profile_matches_the_hyperbolic_plane() {
        let p = warp("exp(r)", Domain::FullLine);
        for r in [-3.0, 0.0, 1.0] {
            for d in [0.7, 2.0, 6.0] {
                let g = dist(&p, r, d);
                assert_rel(g.length, exp_profile_distance(r, d), 1e-7);
            }
        }
    }

    #[test]
    fn bumped_profile_stays_above_the_flat_bound() {
        let p = warp("1 + exp(-r^2)", Domain::FullLine);
        let d = 2.0 * PI;
        for r in [0.0, 1.0, 2.0, 3.0] {
            let len = dist(&p, r, d).length;
            assert!(len > d, "r = {r}: {len} should exceed {d}");
            assert!(len <= p.f(r) * d + 1e-9);
        }
        // at the bump the dip beats the fiber path outright
        assert!(dist(&p, 0.0, d).length < 0.9 * p.f(0.0) * d);
    }

    #[test]
    fn length_brackets_hold_on_a_grid() {
        let cases: [(ProfilePlane, f64, f64); 4] = [
            (warp("1", Domain::FullLine), 1.0, 1.0),
            (warp("1 + exp(-r^2)", Domain::FullLine), 0.5, 1.0),
            (warp("exp(r)", Domain::FullLine), 0.0, 0.0),
            (warp("r", Domain::HalfLine), 2.0, 0.0),
        ];
        for (p, r, floor) in cases {
            for d in [0.4, 1.0, 2.0, 5.0] {
                let len = dist(&p, r, d).length;
                assert!(len <= p.f(r) * d + 1e-9);
                assert!(len + 1e-9 >= floor * d);
            }
        }
    }

    #[test]
    fn displacement_is_monotone_in_the_gap() {
        for (src, domain, r) in [
            ("1 + exp(-r^2)", Domain::FullLine, 0.7),
            ("exp(r)", Domain::FullLine, 0.0),
            ("sqrt(r)", Domain::HalfLine, 9.0),
        ] {
            let p = warp(src, domain);
            let mut prev = 0.0;
            for i in 1..=10 {
                let len = dist(&p, r, 0.6 * i as f64).length;
                assert!(len + 1e-9 >= prev, "{src}: length dropped at step {i}");
                prev = len;
            }
        }
    }

    #[test]
    fn variational_oracle_matches_closed_forms() {
        let flat = warp("1", Domain::FullLine);
        assert_rel(variational_length(&flat, 0.0, 2.0, 256), 2.0, 1e-8);
        let hyp = warp("exp(r)", Domain::FullLine);
        assert_rel(variational_length(&hyp, 0.0, 2.0, 512), exp_profile_distance(0.0, 2.0), 1e-6);
        assert_rel(variational_length(&hyp, -1.0, 3.0, 512), exp_profile_distance(-1.0, 3.0), 1e-6);
    }

    #[test]
    fn shooting_agrees_with_direct_minimization() {
        let cases: [(ProfilePlane, f64, f64); 6] = [
            (warp("1 + exp(-r^2)", Domain::FullLine), 0.0, 2.0),
            (warp("1 + exp(-r^2)", Domain::FullLine), 2.0, PI),
            (warp("exp(r)", Domain::FullLine), 0.0, 1.0),
            (warp("sqrt(1 + r^2)", Domain::FullLine), 1.0, 2.0),
            (warp("r", Domain::HalfLine), 2.0, 1.0),
            (warp("2 + cos(r)", Domain::FullLine), 0.5, 2.0),
        ];
        for (p, r, d) in &cases {
            let shot = dist(p, *r, *d).length;
            let direct = variational_length(p, *r, *d, ORACLE_NODES);
            assert_rel(shot, direct, 1e-6);
        }
    }

    #[test]
    fn square_root_profile_flattens_at_infinity() {
        let p = warp("sqrt(r)", Domain::HalfLine);
        let r = 1e6;
        let g = dist(&p, r, PI);
        assert!(g.length / r < 1e-2);
        // the minimizing dip is barely below the fiber path
        assert_rel(g.length, PI * r.sqrt(), 1e-3);
        assert!(matches!(g.branch, Branch::Dip(Side::Lower)));
    }

    #[test]
    fn revolution_profile_accounts_for_slant() {
        // the cone of revolution rho(z) = z has slant sqrt(2): intrinsically
        // a metric cone with k = 1/sqrt(2) in arclength coordinates
        let p = ProfilePlane::revolution(&WarpFunction::parse("r", Domain::HalfLine).unwrap());
        let z = 2.0;
        let s = std::f64::consts::SQRT_2 * z;
        for d in [0.8, 2.0] {
            let g = dist(&p, z, d);
            assert_rel(g.length, cone_fiber_distance(1.0 / std::f64::consts::SQRT_2, s, s, d), 1e-7);
        }
        let g = dist(&p, z, 5.0);
        assert_rel(g.length, 2.0 * s, 1e-9);
    }

    #[test]
    fn neck_wrap_is_the_fiber_path() {
        // rho(z) = sqrt(z^2 + 1): at the neck the profile has a strict
        // minimum, so the wrap at z = 0 is the constant-base circle
        let p = ProfilePlane::revolution(&WarpFunction::parse("sqrt(r^2 + 1)", Domain::FullLine).unwrap());
        let g = dist(&p, 0.0, 2.0 * PI);
        assert_rel(g.length, 2.0 * PI, 1e-10);
        assert_eq!(g.branch, Branch::Fiber);
        // far out, wrapping once dips through the neck region: the ratio to
        // the radial distance from the neck approaches 2
        let z = 50.0;
        let ratio = dist(&p, z, 2.0 * PI).length / p.radial_length(0.0, z);
        assert!(ratio > 1.9 && ratio < 2.3, "ratio {ratio}");
    }

    #[test]
    fn half_line_caps_pass_geodesics_through() {
        // f(0) = 1 > 0 on a half line: the space closes at 0 with the fiber
        // intact, so a dip may cross the cap; the even extension makes the
        // distance from the mirrored profile
        let half = warp("1 + r^2/(1+r^2)", Domain::HalfLine);
        let full = warp("1 + r^2/(1+r^2)", Domain::FullLine);
        for d in [1.0, 4.0] {
            assert_rel(dist(&half, 1.0, d).length, dist(&full, 1.0, d).length, 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = warp("r", Domain::HalfLine);
        assert!(matches!(fiber_distance(&p, -1.0, 1.0, 1e-8), Err(GeodesicError::BadBase(_))));
        assert!(matches!(fiber_distance(&p, 1.0, -2.0, 1e-8), Err(GeodesicError::BadGap(_))));
        assert!(matches!(fiber_distance(&p, 1.0, f64::NAN, 1e-8), Err(GeodesicError::BadGap(_))));
    }

    #[test]
    fn radial_length_integrates_the_slant() {
        let p = ProfilePlane::revolution(&WarpFunction::parse("r", Domain::HalfLine).unwrap());
        assert_rel(p.radial_length(0.0, 3.0), 3.0 * std::f64::consts::SQRT_2, 1e-10);
        let flat = warp("1", Domain::FullLine);
        assert_rel(flat.radial_length(-1.0, 4.0), 5.0, 1e-12);
    }
}
