//! A catalog of noncompact length-space models behind one interface: every
//! model carries an infinite cyclic deck group generated by its fiber loop
//! and exposes the displacement of generator powers at escaping points, the
//! distance back to a basepoint, level-set diameters per end, and whatever
//! closed-form rescaled lengths the model can declare exactly.
//!
//! Four kinds cover the catalog: warped circle bundles over a line or
//! half-line, surfaces of revolution over the full line, metric cones with
//! the apex removed, and the flat Moebius band (a glide quotient of the
//! plane). Rescaling a model by R > 0 divides every distance by R; the
//! catalog keeps the rescale as a stored factor so closed forms stay exact.

use crate::expr::{parse_length, Domain, ExprError, WarpFunction};
use crate::geodesic::{fiber_distance, GeodesicError, ProfilePlane};
use crate::spectrum::{Certainty, Provenance, Spectrum, SpectrumValue};
use crate::value::Value;
use crate::warped::{covspec_from_plane, CylinderReport, PowerLength, ShiftEstimate, TailEstimate, WarpedError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("fiber circumference must be positive and finite, got {0}")]
    BadCircumference(f64),
    #[error("glide length must be positive and finite, got {0}")]
    BadGlide(f64),
    #[error("cone opening constant must be positive and finite, got {0}")]
    BadConeConstant(f64),
    #[error("rescale factor must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("point parameter {0} is not a valid level for this model")]
    BadPoint(f64),
    #[error("basepoint parameter {0} lies outside the model")]
    BadBasepoint(f64),
    #[error("this model does not have a {0:?} end")]
    MissingEnd(End),
    #[error("a half-line circle bundle needs a surviving fiber at the cap, but f(0) = {0}")]
    CollapsedFiber(f64),
    #[error("surfaces of revolution take a full-line profile; model a capped half-line profile as a warped cylinder")]
    HalfLineProfile,
    #[error("profile stays positive only up to a point: f({at}) = {value}")]
    ProfileNotPositive { at: f64, value: f64 },
    #[error("warp function: {0}")]
    Warp(#[from] ExprError),
    #[error(transparent)]
    Warped(#[from] WarpedError),
    #[error("geodesic solve failed: {0}")]
    Geodesic(#[from] GeodesicError),
}

/// One topological end of a model; levels are parametrized by the distance
/// coordinate growing toward that end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Negative,
    Positive,
}

/// The concrete geometry behind a model, at unit rescale.
#[derive(Clone, Debug)]
pub enum ModelKind {
    /// The warped circle bundle a(x)=1, fiber length circumference * f(x).
    /// A half-line domain means the space closes at x = 0 with the fiber
    /// intact (the circle survives the cap, so the deck group stays Z).
    WarpedCylinder { f: WarpFunction, circumference: f64 },
    /// Surface of revolution with radius profile rho over the full line,
    /// parametrized by the axis coordinate.
    Revolution { rho: WarpFunction },
    /// The metric cone over a circle of the given circumference, opened by
    /// the factor k, with the apex removed so the deck group stays Z.
    Cone { k: f64, base_circumference: f64 },
    /// The flat Moebius band: the plane modulo the glide (u, v) ->
    /// (u + glide, -v).
    Moebius { glide: f64 },
}

/// Closed-form rescaled lengths a preset declares for every generator power.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DeclaredLengths {
    /// No closed form; numeric sampling only.
    None,
    /// Every power slips: some end keeps the fiber loop bounded (or shrinks
    /// it outright), so both rescaled lengths vanish exactly.
    AllZero,
    /// The profile opens with slope making every clamped chord equal 2, so
    /// both rescaled lengths are exactly 2 for every power.
    AllTwo,
}

/// A closed-form rescaled length declared by a model.
#[derive(Clone, Debug)]
pub struct ExactLength {
    pub value: SpectrumValue,
    /// Whether the infimum is realized at actual points, as opposed to being
    /// approached only along a limit.
    pub attained: bool,
}

/// Names accepted by [`SpaceModel::preset`].
pub const PRESETS: [&str; 7] = [
    "flat-cylinder",
    "gauss-bump-cylinder",
    "cusp-cylinder",
    "hyperboloid",
    "cone",
    "moebius",
    "nabonnand-shape",
];

#[derive(Clone, Debug)]
pub struct SpaceModel {
    name: String,
    kind: ModelKind,
    /// All distances are the unit-rescale ones divided by this factor.
    scale: f64,
    declared: DeclaredLengths,
}

impl SpaceModel {
    pub fn warped_cylinder(
        name: impl Into<String>,
        f: WarpFunction,
        circumference: f64,
    ) -> Result<SpaceModel, ModelError> {
        if !circumference.is_finite() || circumference <= 0.0 {
            return Err(ModelError::BadCircumference(circumference));
        }
        if f.domain == Domain::HalfLine && f.f(0.0).abs() < 1e-9 {
            return Err(ModelError::CollapsedFiber(f.f(0.0)));
        }
        check_profile_positive(&f)?;
        Ok(SpaceModel {
            name: name.into(),
            kind: ModelKind::WarpedCylinder { f, circumference },
            scale: 1.0,
            declared: DeclaredLengths::None,
        })
    }

    pub fn revolution(name: impl Into<String>, rho: WarpFunction) -> Result<SpaceModel, ModelError> {
        if rho.domain == Domain::HalfLine {
            return Err(ModelError::HalfLineProfile);
        }
        check_profile_positive(&rho)?;
        Ok(SpaceModel {
            name: name.into(),
            kind: ModelKind::Revolution { rho },
            scale: 1.0,
            declared: DeclaredLengths::None,
        })
    }

    pub fn cone(
        name: impl Into<String>,
        k: f64,
        base_circumference: f64,
    ) -> Result<SpaceModel, ModelError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(ModelError::BadConeConstant(k));
        }
        if !base_circumference.is_finite() || base_circumference <= 0.0 {
            return Err(ModelError::BadCircumference(base_circumference));
        }
        Ok(SpaceModel {
            name: name.into(),
            kind: ModelKind::Cone { k, base_circumference },
            scale: 1.0,
            declared: DeclaredLengths::None,
        })
    }

    pub fn moebius(name: impl Into<String>, glide: f64) -> Result<SpaceModel, ModelError> {
        if !glide.is_finite() || glide <= 0.0 {
            return Err(ModelError::BadGlide(glide));
        }
        Ok(SpaceModel {
            name: name.into(),
            kind: ModelKind::Moebius { glide },
            scale: 1.0,
            declared: DeclaredLengths::None,
        })
    }

    /// Build a named catalog space. Presets also declare the closed-form
    /// rescaled lengths that are theorems for their geometry.
    pub fn preset(name: &str) -> Result<SpaceModel, ModelError> {
        let mut model = match name {
            // Fiber loops keep length 2 pi at every level: everything slips.
            "flat-cylinder" => {
                let f = WarpFunction::parse("1", Domain::FullLine)?;
                SpaceModel::warped_cylinder(name, f, 2.0 * PI)?
            }
            // A unit bump over the flat cylinder: loops shorten toward both
            // ends, the infimum 2 pi is approached but never attained.
            "gauss-bump-cylinder" => {
                let f = WarpFunction::parse("1 + exp(-r^2)", Domain::FullLine)?;
                SpaceModel::warped_cylinder(name, f, 2.0 * PI)?
            }
            // Fibers collapse exponentially toward the negative end, so
            // every loop slips down it.
            "cusp-cylinder" => {
                let f = WarpFunction::parse("exp(r)", Domain::FullLine)?;
                SpaceModel::warped_cylinder(name, f, 2.0 * PI)?
            }
            // Radius sqrt(z^2 + 1): asymptotic to the cone with arc-length
            // slope 1/sqrt(2) over a circle of circumference 2 pi, so every
            // clamped chord equals 2.
            "hyperboloid" => {
                let rho = WarpFunction::parse("sqrt(r^2 + 1)", Domain::FullLine)?;
                SpaceModel::revolution(name, rho)?
            }
            // The cone over a circle of diameter pi / sqrt(2), opened with
            // k = 1 — the asymptotic cone of the hyperboloid above.
            "cone" => SpaceModel::cone(name, 1.0, PI * 2f64.sqrt())?,
            "moebius" => SpaceModel::moebius(name, 2.0 * PI)?,
            // Decreasing fiber scale with f'(0) = 0, the shape forced on a
            // circle bundle by positive Ricci curvature: loops shrink to
            // nothing and the whole group slips.
            "nabonnand-shape" => {
                let f = WarpFunction::parse("1 / (1 + r^2)", Domain::HalfLine)?;
                SpaceModel::warped_cylinder(name, f, 2.0 * PI)?
            }
            _ => return Err(ModelError::UnknownPreset(name.to_string())),
        };
        model.declared = match name {
            "flat-cylinder" | "gauss-bump-cylinder" | "cusp-cylinder" | "nabonnand-shape" => {
                DeclaredLengths::AllZero
            }
            "hyperboloid" => DeclaredLengths::AllTwo,
            _ => DeclaredLengths::None,
        };
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Complete as a metric space. The cone is the one incomplete model: its
    /// apex is deleted to keep the deck group nontrivial, and sequences
    /// sliding down a ray are Cauchy with no limit.
    pub fn is_complete(&self) -> bool {
        !matches!(self.kind, ModelKind::Cone { .. })
    }

    /// The model with every distance divided by `ratio`. Declared closed
    /// forms are scale invariant and carry over unchanged.
    pub fn rescale(&self, ratio: f64) -> Result<SpaceModel, ModelError> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(ModelError::BadScale(ratio));
        }
        let mut out = self.clone();
        out.scale *= ratio;
        Ok(out)
    }

    pub fn ends(&self) -> Vec<End> {
        match &self.kind {
            ModelKind::WarpedCylinder { f, .. } => match f.domain {
                Domain::FullLine => vec![End::Negative, End::Positive],
                Domain::HalfLine => vec![End::Positive],
            },
            ModelKind::Revolution { .. } => vec![End::Negative, End::Positive],
            ModelKind::Cone { .. } | ModelKind::Moebius { .. } => vec![End::Positive],
        }
    }

    /// Canonical basepoint level: the neck/cap for bundles and surfaces, the
    /// core line for the Moebius band, radius 1 for the cone (the apex is
    /// not a point of the space).
    pub fn default_basepoint(&self) -> f64 {
        match self.kind {
            ModelKind::Cone { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// The profile plane computing this model's displacement numerically;
    /// the Moebius band is flat and works by closed form instead.
    pub fn plane(&self) -> Option<ProfilePlane> {
        let s = self.scale;
        match &self.kind {
            ModelKind::WarpedCylinder { f, .. } => {
                let expr = f.expr.clone();
                let half = f.domain == Domain::HalfLine;
                Some(ProfilePlane::from_parts(move |x| expr.eval(s * x) / s, |_| 1.0, false, half))
            }
            ModelKind::Revolution { rho } => {
                let expr = rho.expr.clone();
                let d1 = rho.d1.clone();
                Some(ProfilePlane::from_parts(
                    move |x| expr.eval(s * x) / s,
                    move |x| (1.0 + d1.eval(s * x).powi(2)).sqrt(),
                    false,
                    false,
                ))
            }
            // Self-similar: the rescale factor cancels out of k x exactly.
            ModelKind::Cone { k, .. } => {
                let k = *k;
                Some(ProfilePlane::from_parts(move |x| k * x, |_| 1.0, true, false))
            }
            ModelKind::Moebius { .. } => None,
        }
    }

    /// Universal-cover displacement of the n-th generator power at the point
    /// `t` levels out along `end`.
    pub fn displacement(&self, n: i64, end: End, t: f64, rel_tol: f64) -> Result<f64, ModelError> {
        self.check_end(end)?;
        self.check_level(t)?;
        if n == 0 {
            return Ok(0.0);
        }
        let wraps = n.unsigned_abs() as f64;
        match &self.kind {
            ModelKind::WarpedCylinder { circumference, .. } => {
                let plane = self.plane().expect("circle bundles have a plane");
                let x = self.signed(end, t);
                Ok(fiber_distance(&plane, x, wraps * circumference, rel_tol)?.length)
            }
            ModelKind::Revolution { .. } => {
                let plane = self.plane().expect("revolutions have a plane");
                let x = self.signed(end, t);
                Ok(fiber_distance(&plane, x, wraps * 2.0 * PI, rel_tol)?.length)
            }
            ModelKind::Cone { k, base_circumference } => {
                let angle = (k * wraps * base_circumference).min(PI);
                Ok(2.0 * t * (0.5 * angle).sin())
            }
            ModelKind::Moebius { glide } => {
                let b = glide / self.scale;
                if n % 2 == 0 {
                    Ok(wraps * b)
                } else {
                    Ok((wraps * b).hypot(2.0 * t))
                }
            }
        }
    }

    /// Distance from the point `t` levels out along `end` back to the
    /// basepoint at level `basepoint`.
    pub fn base_distance(&self, end: End, t: f64, basepoint: f64) -> Result<f64, ModelError> {
        self.check_end(end)?;
        self.check_level(t)?;
        self.check_basepoint(basepoint)?;
        match &self.kind {
            // a = 1: radial distance is the coordinate gap.
            ModelKind::WarpedCylinder { .. } => Ok((self.signed(end, t) - basepoint).abs()),
            ModelKind::Revolution { .. } => {
                let plane = self.plane().expect("revolutions have a plane");
                Ok(plane.radial_length(basepoint, self.signed(end, t)))
            }
            ModelKind::Cone { .. } => Ok((t - basepoint).abs()),
            ModelKind::Moebius { glide } => {
                let b = glide / self.scale;
                // level points sit on the line u = b/2, farthest from the
                // base line u = 0, where the odd-power ratio bottoms out
                Ok(moebius_distance(b, 0.5 * b, t, basepoint))
            }
        }
    }

    /// Diameter of the level set `t` levels out along one end (one boundary
    /// component of the ball around the basepoint region).
    pub fn level_diameter(&self, end: End, t: f64, rel_tol: f64) -> Result<f64, ModelError> {
        self.check_end(end)?;
        self.check_level(t)?;
        match &self.kind {
            ModelKind::WarpedCylinder { circumference, .. } => {
                let plane = self.plane().expect("circle bundles have a plane");
                Ok(fiber_distance(&plane, self.signed(end, t), 0.5 * circumference, rel_tol)?.length)
            }
            ModelKind::Revolution { .. } => {
                let plane = self.plane().expect("revolutions have a plane");
                Ok(fiber_distance(&plane, self.signed(end, t), PI, rel_tol)?.length)
            }
            ModelKind::Cone { k, base_circumference } => {
                let angle = (k * 0.5 * base_circumference).min(PI);
                Ok(2.0 * t * (0.5 * angle).sin())
            }
            ModelKind::Moebius { glide } => {
                let b = glide / self.scale;
                // the level set |v| = t is one circle; scan representative
                // pairs across it for the farthest
                let mut best: f64 = 0.0;
                for i in 0..=64 {
                    let du = b * i as f64 / 64.0;
                    for v2 in [t, -t] {
                        best = best.max(moebius_distance(b, du, t, v2));
                    }
                }
                Ok(best)
            }
        }
    }

    /// Closed-form rescaled length at infinity for the n-th generator power,
    /// when the model declares one.
    pub fn exact_length_infinity(&self, n: i64) -> Option<ExactLength> {
        if n == 0 {
            return Some(ExactLength { value: SpectrumValue::exact(Value::zero()), attained: true });
        }
        match (&self.kind, self.declared) {
            (ModelKind::Cone { k, base_circumference }, _) => {
                Some(cone_chord_length(*k, n.unsigned_abs() as f64 * base_circumference))
            }
            (ModelKind::Moebius { .. }, _) => Some(moebius_parity_length(n)),
            (_, DeclaredLengths::AllZero) => Some(ExactLength {
                value: SpectrumValue::exact(Value::zero()),
                attained: false,
            }),
            (_, DeclaredLengths::AllTwo) => Some(ExactLength {
                value: SpectrumValue::exact(Value::from_int(2)),
                attained: false,
            }),
            (_, DeclaredLengths::None) => None,
        }
    }

    /// Closed-form basepoint rescaled length for the n-th generator power,
    /// when the model declares one. For the cone every power gives zero: the
    /// ratio collapses along any ray running down toward the deleted apex,
    /// so the basepoint spectrum is empty without ever sampling near it.
    pub fn exact_length_basepoint(&self, n: i64) -> Option<ExactLength> {
        if n == 0 {
            return Some(ExactLength { value: SpectrumValue::exact(Value::zero()), attained: true });
        }
        match (&self.kind, self.declared) {
            (ModelKind::Cone { .. }, _) => Some(ExactLength {
                value: SpectrumValue::exact(Value::zero()),
                attained: false,
            }),
            (ModelKind::Moebius { .. }, _) => Some(moebius_parity_length(n)),
            (_, DeclaredLengths::AllZero) => Some(ExactLength {
                value: SpectrumValue::exact(Value::zero()),
                attained: false,
            }),
            (_, DeclaredLengths::AllTwo) => Some(ExactLength {
                value: SpectrumValue::exact(Value::from_int(2)),
                attained: false,
            }),
            (_, DeclaredLengths::None) => None,
        }
    }

    /// Ordinary covering spectrum of the model: translation lengths of the
    /// generator powers through the cyclic filtration. Plane-backed models
    /// run the shift solver; the cone and the Moebius band are closed form.
    pub fn ordinary_covspec(&self, rel_tol: f64) -> Result<CylinderReport, ModelError> {
        match &self.kind {
            ModelKind::WarpedCylinder { circumference, .. } => {
                let plane = self.plane().expect("circle bundles have a plane");
                Ok(covspec_from_plane(&plane, *circumference, rel_tol)?)
            }
            ModelKind::Revolution { .. } => {
                let plane = self.plane().expect("revolutions have a plane");
                Ok(covspec_from_plane(&plane, 2.0 * PI, rel_tol)?)
            }
            // Every power's displacement 2 t sin(...) slides to 0 toward the
            // deleted apex: all translation lengths vanish unattained.
            ModelKind::Cone { .. } => {
                let powers = (1..=crate::warped::POWERS_TRACKED)
                    .map(|n| PowerLength {
                        exponent: n,
                        shift: ShiftEstimate {
                            value: 0.0,
                            witness: 0.0,
                            attained: false,
                            tail: Vec::new(),
                        },
                    })
                    .collect();
                Ok(CylinderReport {
                    spectrum: Spectrum::empty(),
                    powers,
                    generator_slips: true,
                })
            }
            // Flat geometry: the n-th power translates the core circle by
            // n * glide, attained on the core line.
            ModelKind::Moebius { glide } => {
                let b = glide / self.scale;
                let powers: Vec<PowerLength> = (1..=crate::warped::POWERS_TRACKED)
                    .map(|n| PowerLength {
                        exponent: n,
                        shift: ShiftEstimate {
                            value: n as f64 * b,
                            witness: 0.0,
                            attained: true,
                            tail: Vec::new(),
                        },
                    })
                    .collect();
                let lengths: Vec<(i64, SpectrumValue)> = powers
                    .iter()
                    .map(|p| {
                        let v = p.shift.value;
                        (p.exponent, SpectrumValue::numeric(v, 1e-12 * (1.0 + v)))
                    })
                    .collect();
                Ok(CylinderReport {
                    spectrum: crate::spectrum::integer_filtration_spectrum(&lengths),
                    powers,
                    generator_slips: false,
                })
            }
        }
    }

    fn signed(&self, end: End, t: f64) -> f64 {
        match end {
            End::Positive => t,
            End::Negative => -t,
        }
    }

    fn check_end(&self, end: End) -> Result<(), ModelError> {
        if self.ends().contains(&end) {
            Ok(())
        } else {
            Err(ModelError::MissingEnd(end))
        }
    }

    fn check_level(&self, t: f64) -> Result<(), ModelError> {
        let ok = match self.kind {
            // the apex is not a point of the cone
            ModelKind::Cone { .. } => t.is_finite() && t > 0.0,
            _ => t.is_finite() && t >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::BadPoint(t))
        }
    }

    fn check_basepoint(&self, basepoint: f64) -> Result<(), ModelError> {
        let ok = match &self.kind {
            ModelKind::Cone { .. } => basepoint.is_finite() && basepoint > 0.0,
            ModelKind::WarpedCylinder { f, .. } if f.domain == Domain::HalfLine => {
                basepoint.is_finite() && basepoint >= 0.0
            }
            _ => basepoint.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::BadBasepoint(basepoint))
        }
    }
}

/// Quotient distance on the Moebius band of glide b between points whose
/// plane representatives differ by du horizontally, at heights v1 and v2:
/// minimum over nearby deck translates of the second point.
fn moebius_distance(b: f64, du: f64, v1: f64, v2: f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in -2i32..=2 {
        let v_image = if k % 2 == 0 { v2 } else { -v2 };
        best = best.min((du - k as f64 * b).hypot(v1 - v_image));
    }
    best
}

/// Chord length sqrt(2 - 2 cos(min(pi, k L))) of a base loop of length L
/// seen from infinity on the cone. Clamped chords are exactly 2.
fn cone_chord_length(k: f64, base_loop: f64) -> ExactLength {
    let arg = k * base_loop;
    if arg >= PI {
        return ExactLength {
            value: SpectrumValue::exact(Value::from_int(2)),
            attained: false,
        };
    }
    let v = 2.0 * (0.5 * arg).sin();
    ExactLength {
        value: SpectrumValue {
            value: Value::approx(v),
            provenance: Provenance::Numeric(1e-12 * (1.0 + v)),
            certainty: Certainty::Proven,
        },
        attained: false,
    }
}

/// Rescaled lengths on the Moebius band: odd powers flip the band and cost
/// exactly 2 (attained on the half-glide line for the generator itself);
/// even powers are plane translations whose ratio dies off.
fn moebius_parity_length(n: i64) -> ExactLength {
    if n % 2 == 0 {
        ExactLength { value: SpectrumValue::exact(Value::zero()), attained: false }
    } else {
        ExactLength {
            value: SpectrumValue::exact(Value::from_int(2)),
            attained: n.unsigned_abs() == 1,
        }
    }
}

/// Positivity of a warp profile: dense near the cap or neck, then a sparse
/// geometric ladder toward the horizon (overflow to +inf counts as
/// positive — exponential profiles are legitimate).
fn check_profile_positive(w: &WarpFunction) -> Result<(), ModelError> {
    let lo = match w.domain {
        Domain::HalfLine => 0.0,
        Domain::FullLine => -50.0,
    };
    w.check_positive(lo, 50.0, 256)?;
    for k in 0..=20 {
        let t = 50.0 * 2f64.powi(k);
        let probes: &[f64] = match w.domain {
            Domain::HalfLine => &[t],
            Domain::FullLine => &[t, -t],
        };
        for &at in probes {
            let value = w.f(at);
            // underflow to +0 (cusp profiles) and overflow to +inf both
            // count as positive out here; only a genuine sign flip fails
            if value < 0.0 || value.is_nan() {
                return Err(ModelError::ProfileNotPositive { at, value });
            }
        }
    }
    Ok(())
}

/// Rescaled length of the `winding`-th power on a surface of revolution:
/// geodesic lengths between (z, 0) and (z, 2 pi winding) divided by the
/// radial distance to the axis origin, minimized over the schedule tail.
/// Half-line profiles vanishing at 0 (cone-like surfaces) are allowed; the
/// ratio is measured on the cover unrolled around the axis point.
pub fn revolution_rescaled_length(
    rho: &WarpFunction,
    winding: i64,
    schedule: &[f64],
    rel_tol: f64,
) -> Result<TailEstimate, ModelError> {
    let increasing = schedule.len() >= 2
        && schedule[0] > 0.0
        && schedule[0].is_finite()
        && schedule.windows(2).all(|w| w[1] > w[0] && w[1].is_finite());
    if !increasing {
        return Err(ModelError::Warped(WarpedError::BadSchedule));
    }
    let plane = ProfilePlane::revolution(rho);
    let gap = winding.unsigned_abs() as f64 * 2.0 * PI;
    let samples: Result<Vec<(f64, f64)>, GeodesicError> = crate::par::par_map(schedule, |z| {
        fiber_distance(&plane, z, gap, rel_tol).map(|g| (z, g.length / plane.radial_length(0.0, z)))
    })
    .into_iter()
    .collect();
    let samples = samples?;
    let tail = &samples[samples.len() / 2..];
    let value = tail.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    let tail_monotone = tail.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) + 1e-12);
    Ok(TailEstimate { value, samples, tail_monotone })
}

/// Diameter-growth reading of a model: the limsup estimate of
/// diam(level set) / distance over a schedule, per end, paired with the
/// model's rescaled spectrum into a consistency report. The pairing is an
/// observation, never an assertion — the inclusion it checks is a
/// conjecture, and `consistent` simply records whether this model obeys it.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// Limsup estimate of diam/distance over the schedule tail.
    pub a: f64,
    /// (distance to basepoint, diam/distance), the worst end at each level.
    pub samples: Vec<(f64, f64)>,
    /// Every spectrum value lies in (0, a/2] up to tolerance or equals 1.
    pub consistent: bool,
}

pub fn diameter_growth_estimate(
    model: &SpaceModel,
    spectrum: &Spectrum,
    schedule: &[f64],
    rel_tol: f64,
) -> Result<GrowthReport, ModelError> {
    let increasing = schedule.len() >= 2
        && schedule[0] > 0.0
        && schedule[0].is_finite()
        && schedule.windows(2).all(|w| w[1] > w[0] && w[1].is_finite());
    if !increasing {
        return Err(ModelError::Warped(WarpedError::BadSchedule));
    }
    let basepoint = model.default_basepoint();
    let mut samples = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let mut worst: Option<(f64, f64)> = None;
        for end in model.ends() {
            let dist = model.base_distance(end, t, basepoint)?;
            if dist <= 0.0 {
                continue;
            }
            let diam = model.level_diameter(end, t, rel_tol)?;
            let ratio = diam / dist;
            if worst.map_or(true, |(_, w)| ratio > w) {
                worst = Some((dist, ratio));
            }
        }
        if let Some(sample) = worst {
            samples.push(sample);
        }
    }
    let tail = &samples[samples.len() / 2..];
    let a = tail.iter().map(|&(_, q)| q).fold(0.0, f64::max);
    let one = Value::from_int(1);
    let consistent = spectrum
        .values
        .iter()
        .all(|v| v.value.to_f64() <= 0.5 * a + 1e-6 || v.value.same_as(&one))
        && spectrum
            .accumulation_points
            .iter()
            .all(|p| p.value <= 0.5 * a + p.confidence + 1e-6 || (p.value - 1.0).abs() <= 1e-6);
    Ok(GrowthReport { a, samples, consistent })
}
