//! Spectra: sorted sets of positive thresholds with provenance, plus
//! detection of one-sided accumulation points in truncated families.

use crate::value::{Value, NUMERIC_EPS};
use std::fmt;

/// How a spectrum value was established.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Provenance {
    /// Exact arithmetic end to end.
    Exact,
    /// Numeric computation, trusted to the given absolute tolerance.
    Numeric(f64),
}

/// Whether the value is a proven breakpoint or one that a budgeted decision
/// procedure could not settle. Undetermined candidates are always reported.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Certainty {
    Proven,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct SpectrumValue {
    pub value: Value,
    pub provenance: Provenance,
    pub certainty: Certainty,
}

impl SpectrumValue {
    pub fn exact(value: Value) -> Self {
        SpectrumValue { value, provenance: Provenance::Exact, certainty: Certainty::Proven }
    }

    pub fn numeric(value: f64, tol: f64) -> Self {
        SpectrumValue {
            value: Value::approx(value),
            provenance: Provenance::Numeric(tol),
            certainty: Certainty::Proven,
        }
    }

    pub fn undetermined(value: Value, provenance: Provenance) -> Self {
        SpectrumValue { value, provenance, certainty: Certainty::Undetermined }
    }
}

/// A one-sided cluster point of the value set, with a confidence radius for
/// the extrapolated limit.
#[derive(Clone, Copy, Debug)]
pub struct AccumulationPoint {
    pub value: f64,
    pub confidence: f64,
}

/// A sorted set of positive thresholds.
#[derive(Clone, Debug, Default)]
pub struct Spectrum {
    pub values: Vec<SpectrumValue>,
    pub accumulation_points: Vec<AccumulationPoint>,
    /// The spectrum is only known complete strictly below this bound
    /// (enumeration horizon), when present.
    pub complete_below: Option<Value>,
}

impl Spectrum {
    pub fn empty() -> Self {
        Spectrum::default()
    }

    /// Sort ascending and merge values that agree (exactly, or within the
    /// numeric tolerance); the strongest provenance and certainty win.
    pub fn from_values(mut values: Vec<SpectrumValue>) -> Self {
        values.sort_by(|a, b| a.value.cmp_val(&b.value));
        let mut merged: Vec<SpectrumValue> = Vec::new();
        for v in values {
            match merged.last_mut() {
                Some(last) if last.value.same_as(&v.value) => {
                    if rank(&v) > rank(last) {
                        let certainty = strongest(last.certainty, v.certainty);
                        *last = v;
                        last.certainty = certainty;
                    } else {
                        last.certainty = strongest(last.certainty, v.certainty);
                    }
                }
                _ => merged.push(v),
            }
        }
        Spectrum { values: merged, accumulation_points: Vec::new(), complete_below: None }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.accumulation_points.is_empty()
    }

    pub fn has_undetermined(&self) -> bool {
        self.values.iter().any(|v| v.certainty == Certainty::Undetermined)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value.to_f64()).collect()
    }

    /// Exact set equality against expected exact values.
    pub fn equals_exact(&self, expected: &[Value]) -> bool {
        self.values.len() == expected.len()
            && self.values.iter().zip(expected).all(|(got, want)| {
                got.provenance == Provenance::Exact && got.value.same_as(want)
            })
    }

    /// Run the accumulation detector over the current values.
    pub fn detect_accumulation(&mut self) {
        self.accumulation_points = detect_accumulation(&self.to_f64s());
    }
}

fn rank(v: &SpectrumValue) -> u8 {
    match v.provenance {
        Provenance::Exact => 2,
        Provenance::Numeric(_) => 1,
    }
}

fn strongest(a: Certainty, b: Certainty) -> Certainty {
    if a == Certainty::Proven || b == Certainty::Proven {
        Certainty::Proven
    } else {
        Certainty::Undetermined
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .values
            .iter()
            .map(|v| {
                let mut s = v.value.display_symbolic();
                if v.certainty == Certainty::Undetermined {
                    s.push('?');
                }
                s
            })
            .collect();
        for a in &self.accumulation_points {
            parts.push(format!("acc~{:.6}", a.value));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

const MIN_RUN: usize = 6;
const GAP_GROWTH: f64 = 1.005;

/// Detect one-sided accumulation points of a sorted ascending value list.
///
/// A cluster at the bottom end shows up as consecutive gaps that grow
/// steadily when walking away from the smallest value (and symmetrically at
/// the top end). The limit is then extrapolated from the values walking
/// toward the cluster.
pub fn detect_accumulation(sorted: &[f64]) -> Vec<AccumulationPoint> {
    let n = sorted.len();
    if n < MIN_RUN + 1 {
        return Vec::new();
    }
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::new();

    // Bottom end: gaps increase as the index moves up.
    let mut run = 0;
    while run + 1 < gaps.len() && gaps[run + 1] > gaps[run] * GAP_GROWTH && gaps[run] > 0.0 {
        run += 1;
    }
    if run + 1 >= MIN_RUN {
        let seq: Vec<f64> = (0..=run).rev().map(|i| sorted[i]).collect();
        if let Some((limit, confidence)) = extrapolate_limit(&seq) {
            if limit < sorted[0] - 3.0 * confidence.max(NUMERIC_EPS) {
                out.push(AccumulationPoint { value: limit, confidence });
            }
        }
    }

    // Top end: gaps increase as the index moves down.
    let mut run = 0;
    while run + 1 < gaps.len()
        && gaps[gaps.len() - 2 - run] > gaps[gaps.len() - 1 - run] * GAP_GROWTH
        && gaps[gaps.len() - 1 - run] > 0.0
    {
        run += 1;
    }
    if run + 1 >= MIN_RUN {
        let seq: Vec<f64> = (0..=run).map(|i| sorted[n - 1 - run + i]).collect();
        if let Some((limit, confidence)) = extrapolate_limit(&seq) {
            if limit > sorted[n - 1] + 3.0 * confidence.max(NUMERIC_EPS) {
                out.push(AccumulationPoint { value: limit, confidence });
            }
        }
    }

    out
}

/// Estimate the limit of a monotone convergent sequence, with a
/// confidence radius. `None` when the points are too few or fit no model.
pub fn sequence_limit_estimate(seq: &[f64]) -> Option<(f64, f64)> {
    extrapolate_limit(seq)
}

/// Extrapolate the limit of a monotone convergent sequence.
///
/// Tries a hyperbolic model `L + c/(i + a)` and a geometric model
/// `L + c*rho^i`; the residual over all points is the confidence, so the
/// winner is the model that actually explains the data. A few Aitken
/// passes serve as a fallback when neither model fits (more passes are
/// useless in doubles: each pass multiplies rounding noise by roughly the
/// squared gap ratio, so long iterations converge confidently to noise).
fn extrapolate_limit(seq: &[f64]) -> Option<(f64, f64)> {
    if seq.len() < 4 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for cand in [fit_hyperbolic(seq), fit_geometric(seq), aitken_capped(seq)]
        .into_iter()
        .flatten()
    {
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    }
    best
}

fn span_scale(seq: &[f64]) -> f64 {
    seq.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300)
}

/// Fit `x_i = L + c/(i + a)` through the first, middle, and last points;
/// the confidence is the worst deviation of the remaining points from the
/// fitted curve.
fn fit_hyperbolic(seq: &[f64]) -> Option<(f64, f64)> {
    let n = seq.len();
    let (p, q, r) = (0usize, n / 2, n - 1);
    if q == p || r == q {
        return None;
    }
    let scale = span_scale(seq);
    let d_pq = seq[p] - seq[q];
    let d_qr = seq[q] - seq[r];
    if d_qr.abs() < 1e-14 * scale {
        return None;
    }
    let ratio = d_pq / d_qr;
    let (pf, qf, rf) = (p as f64, q as f64, r as f64);
    let denom = ratio * (rf - qf) - (qf - pf);
    if denom.abs() < 1e-12 * (1.0 + ratio.abs()) {
        return None;
    }
    let a = ((qf - pf) * rf - ratio * (rf - qf) * pf) / denom;
    let (ap, ar) = (a + pf, a + rf);
    // The pole must lie outside the sample range.
    if ap == 0.0 || ar == 0.0 || ap.signum() != ar.signum() {
        return None;
    }
    let inv_diff = 1.0 / ap - 1.0 / ar;
    if inv_diff.abs() < 1e-300 {
        return None;
    }
    let c = (seq[p] - seq[r]) / inv_diff;
    let limit = seq[r] - c / ar;
    let mut resid = 0.0f64;
    for (i, &x) in seq.iter().enumerate() {
        let ai = a + i as f64;
        if ai == 0.0 || ai.signum() != ar.signum() {
            return None;
        }
        resid = resid.max((x - (limit + c / ai)).abs());
    }
    Some((limit, resid.max(1e-14 * scale)))
}

/// Fit `x_i = L + c*rho^i` from the last three points; confidence is the
/// worst deviation over all points.
fn fit_geometric(seq: &[f64]) -> Option<(f64, f64)> {
    let n = seq.len();
    let scale = span_scale(seq);
    let d1 = seq[n - 2] - seq[n - 3];
    let d2 = seq[n - 1] - seq[n - 2];
    if d1.abs() < 1e-14 * scale {
        return None;
    }
    let rho = d2 / d1;
    if !(rho.abs() < 0.95) || rho == 0.0 {
        return None;
    }
    let limit = seq[n - 1] + d2 * rho / (1.0 - rho);
    let c_end = seq[n - 1] - limit;
    let mut resid = 0.0f64;
    for (i, &x) in seq.iter().enumerate() {
        let model = limit + c_end * rho.powi(i as i32 - (n as i32 - 1));
        resid = resid.max((x - model).abs());
    }
    Some((limit, resid.max(1e-14 * scale)))
}

/// A few Aitken delta-squared passes; the confidence is the last
/// pass-to-pass movement (doubled, since the next step is about as large).
fn aitken_capped(seq: &[f64]) -> Option<(f64, f64)> {
    let scale = span_scale(seq);
    let mut cur = seq.to_vec();
    let mut estimate = *cur.last().unwrap();
    let mut movement = f64::INFINITY;
    for _ in 0..4 {
        if cur.len() < 3 {
            break;
        }
        let mut next = Vec::with_capacity(cur.len() - 2);
        for i in 0..cur.len() - 2 {
            let d1 = cur[i + 1] - cur[i];
            let d2 = cur[i + 2] - 2.0 * cur[i + 1] + cur[i];
            if d2.abs() < 1e-15 * scale {
                return None;
            }
            next.push(cur[i] - d1 * d1 / d2);
        }
        let prev = estimate;
        estimate = *next.last().unwrap();
        movement = (estimate - prev).abs();
        cur = next;
    }
    if !movement.is_finite() {
        return None;
    }
    Some((estimate, (2.0 * movement).max(1e-12 * scale)))
}

/// Breakpoints of the filtration of an infinite cyclic group `<g>` by the
/// subgroups generated by the powers whose length falls strictly below 2δ.
///
/// Input pairs are (exponent n, length of g^n). A set of powers of one
/// generator generates the subgroup indexed by the gcd of their exponents,
/// so δ is a breakpoint exactly when the gcd over {n : len(n) < 2δ} differs
/// from the gcd over {n : len(n) <= 2δ} — the group below δ differs from the
/// group at every level above δ, however small the step. Zero-length powers
/// qualify at every δ. Lengths flagged undetermined propagate to the
/// breakpoints they create.
pub fn integer_filtration_spectrum(lengths: &[(i64, SpectrumValue)]) -> Spectrum {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let subgroup = |delta: &Value, closed: bool| -> i64 {
        let mut g = 0;
        for (n, len) in lengths {
            let half = len.value.half();
            let short = if closed { !delta.strictly_below(&half) } else { half.strictly_below(delta) };
            if short {
                g = gcd(g, *n);
            }
        }
        g
    };
    let mut out = Vec::new();
    for (_, len) in lengths {
        let delta = len.value.half();
        if !delta.strictly_below(&Value::zero()) && !delta.same_as(&Value::zero()) {
            if subgroup(&delta, false) != subgroup(&delta, true) {
                out.push(SpectrumValue { value: delta, ..len.clone() });
            }
        }
    }
    Spectrum::from_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn merges_duplicates_keeping_exact() {
        let s = Spectrum::from_values(vec![
            SpectrumValue::numeric(1.0 + 4e-10, 1e-6),
            SpectrumValue::exact(Value::from_int(1)),
            SpectrumValue::exact(Value::from_int(2)),
        ]);
        assert_eq!(s.values.len(), 2);
        assert_eq!(s.values[0].provenance, Provenance::Exact);
    }

    #[test]
    fn harmonic_family_accumulates_at_pi() {
        // Values pi*(1 + 1/j), j = 1..=50: the truncation of a family whose
        // full closure adds the limit pi.
        let mut vals: Vec<f64> = (1..=50).map(|j| PI * (1.0 + 1.0 / j as f64)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let acc = detect_accumulation(&vals);
        assert_eq!(acc.len(), 1);
        assert!((acc[0].value - PI).abs() < 1e-6, "got {}", acc[0].value);
    }

    #[test]
    fn increasing_family_accumulates_from_below() {
        let mut vals: Vec<f64> = (1..=40).map(|j| 2.0 - 1.0 / j as f64).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let acc = detect_accumulation(&vals);
        assert_eq!(acc.len(), 1);
        assert!((acc[0].value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn geometric_family_accumulates_at_one() {
        // Stop at 2^-25: closer approach would sit inside the tolerance
        // band that guards against phantom limits below the minimum.
        let mut vals: Vec<f64> = (1..=25).map(|j| 1.0 + 0.5f64.powi(j)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let acc = detect_accumulation(&vals);
        assert_eq!(acc.len(), 1);
        assert!((acc[0].value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_false_positives_on_regular_sets() {
        assert!(detect_accumulation(&[1.0, 2.0, 3.0]).is_empty());
        let arith: Vec<f64> = (1..=30).map(|j| j as f64 * 0.5).collect();
        assert!(detect_accumulation(&arith).is_empty());
    }

    #[test]
    fn undetermined_values_are_kept_and_flagged() {
        let s = Spectrum::from_values(vec![SpectrumValue::undetermined(
            Value::from_int(1),
            Provenance::Exact,
        )]);
        assert!(s.has_undetermined());
        assert_eq!(format!("{}", s), "{1?}");
    }

    #[test]
    fn cyclic_filtration_of_monotone_lengths_breaks_once() {
        // Lengths growing with the exponent: once the generator itself is
        // short the whole group is generated, so only len(g)/2 survives.
        let lengths: Vec<(i64, SpectrumValue)> = (1..=4)
            .map(|n| (n, SpectrumValue::exact(Value::pi_times(2 * n, 1))))
            .collect();
        let s = integer_filtration_spectrum(&lengths);
        assert!(s.equals_exact(&[Value::pi_times(1, 1)]));
    }

    #[test]
    fn cyclic_filtration_sees_short_even_powers() {
        // Odd powers stay at length 2 while even powers vanish: the group
        // jumps from <g^2> to <g> at delta = 1 and never changes below.
        let lengths = vec![
            (1, SpectrumValue::exact(Value::from_int(2))),
            (2, SpectrumValue::exact(Value::zero())),
            (3, SpectrumValue::exact(Value::from_int(2))),
            (4, SpectrumValue::exact(Value::zero())),
        ];
        let s = integer_filtration_spectrum(&lengths);
        assert!(s.equals_exact(&[Value::from_int(1)]));
    }

    #[test]
    fn cyclic_filtration_of_slipping_lengths_is_empty() {
        let lengths = vec![
            (1, SpectrumValue::exact(Value::zero())),
            (2, SpectrumValue::exact(Value::zero())),
        ];
        assert!(integer_filtration_spectrum(&lengths).is_empty());
    }
}
