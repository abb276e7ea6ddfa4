//! Lattice translation lengths and the covering spectrum of flat tori.
//!
//! A torus is a product of circles of intrinsic diameters `r_1..r_k`
//! (circumferences `2*r_i`); its deck group is `Z^k` and the element
//! `v` translates by `sqrt(sum (2 r_i v_i)^2)`. The delta-filtration is
//! computed honestly: enumerate all short lattice vectors, generate
//! sublattices, and compare them in Hermite normal form at each candidate
//! threshold against the threshold's closure.

use crate::spectrum::{Provenance, Spectrum, SpectrumValue};
use crate::value::{Value, NUMERIC_EPS};
use num::rational::Rational64;
use num::Zero;

pub type LatticeElement = Vec<i64>;

/// Translation length of `v` acting on the universal cover of the torus.
pub fn lattice_shift_length(v: &[i64], diameters: &[Value]) -> Value {
    assert_eq!(v.len(), diameters.len(), "element/diameter dimension mismatch");
    let nonzero: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    match nonzero.len() {
        0 => Value::zero(),
        1 => {
            let i = nonzero[0];
            diameters[i].mul_int(2 * v[i].abs())
        }
        _ => {
            if let Some(squares) = rational_square_sum(v, diameters) {
                Value::Exact(crate::value::PiRat::new(squares, Rational64::zero())).sqrt()
            } else {
                let mut s = 0.0;
                for i in 0..v.len() {
                    let t = 2.0 * diameters[i].to_f64() * v[i] as f64;
                    s += t * t;
                }
                Value::approx(s.sqrt())
            }
        }
    }
}

fn rational_square_sum(v: &[i64], diameters: &[Value]) -> Option<Rational64> {
    let mut s = Rational64::zero();
    for i in 0..v.len() {
        let r = diameters[i].as_rational()?;
        let t = r * Rational64::from_integer(2 * v[i]);
        s += t * t;
    }
    Some(s)
}

/// Breakpoints of the delta-filtration of the torus with the given circle
/// diameters. Uses exact rational arithmetic when every diameter is
/// rational, floating point with a `1e-9` tolerance otherwise.
pub fn lattice_covering_spectrum(diameters: &[Value]) -> Spectrum {
    assert!(!diameters.is_empty(), "need at least one circle");
    assert!(diameters.iter().all(|d| d.to_f64() > 0.0), "diameters must be positive");
    if let Some(rats) = diameters.iter().map(|d| d.as_rational()).collect::<Option<Vec<_>>>() {
        covering_spectrum_exact(&rats)
    } else {
        covering_spectrum_numeric(diameters)
    }
}

fn covering_spectrum_exact(diameters: &[Rational64]) -> Spectrum {
    let max_r = diameters.iter().cloned().fold(Rational64::zero(), |a, b| a.max(b));
    // All vectors of length <= 2*max_r, as (vector, squared half-length).
    let bounds: Vec<i64> = diameters
        .iter()
        .map(|r| (max_r / r).floor().to_integer())
        .collect();
    let vectors = enumerate_box(&bounds);
    let mut entries: Vec<(Vec<i64>, Rational64)> = Vec::new();
    let max_q = max_r * max_r;
    for v in vectors {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let mut q = Rational64::zero();
        for i in 0..v.len() {
            let t = diameters[i] * Rational64::from_integer(v[i]);
            q += t * t;
        }
        if q <= max_q {
            entries.push((v, q));
        }
    }
    entries.sort_by(|a, b| a.1.cmp(&b.1));

    let mut candidates: Vec<Rational64> = entries.iter().map(|e| e.1).collect();
    candidates.dedup();

    let mut values = Vec::new();
    for q in candidates {
        let below: Vec<Vec<i64>> =
            entries.iter().filter(|e| e.1 < q).map(|e| e.0.clone()).collect();
        let at: Vec<Vec<i64>> =
            entries.iter().filter(|e| e.1 <= q).map(|e| e.0.clone()).collect();
        if !lattice_span_equal(&below, &at) {
            let delta = Value::Exact(crate::value::PiRat::new(q, Rational64::zero())).sqrt();
            values.push(match delta {
                Value::Exact(_) => SpectrumValue::exact(delta),
                Value::Approx(x) => SpectrumValue::numeric(x, NUMERIC_EPS),
            });
        }
    }
    Spectrum::from_values(values)
}

fn covering_spectrum_numeric(diameters: &[Value]) -> Spectrum {
    let r: Vec<f64> = diameters.iter().map(|d| d.to_f64()).collect();
    let max_r = r.iter().cloned().fold(0.0f64, f64::max);
    let bounds: Vec<i64> = r.iter().map(|ri| (max_r / ri + NUMERIC_EPS).floor() as i64).collect();
    let vectors = enumerate_box(&bounds);
    // Keep an exact threshold value when the vector is supported on one axis.
    let mut entries: Vec<(Vec<i64>, f64, Value)> = Vec::new();
    for v in vectors {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let q: f64 = (0..v.len()).map(|i| (r[i] * v[i] as f64).powi(2)).sum();
        if q <= max_r * max_r * (1.0 + NUMERIC_EPS) {
            let delta = lattice_shift_length(&v, diameters).half();
            entries.push((v, q, delta));
        }
    }
    entries.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let mut values = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        // Group entries whose squared half-length agrees within tolerance.
        let q = entries[i].1;
        let mut j = i;
        while j < entries.len() && entries[j].1 <= q + NUMERIC_EPS {
            j += 1;
        }
        let below: Vec<Vec<i64>> = entries[..i].iter().map(|e| e.0.clone()).collect();
        let at: Vec<Vec<i64>> = entries[..j].iter().map(|e| e.0.clone()).collect();
        if !lattice_span_equal(&below, &at) {
            let delta = entries[i].2;
            values.push(SpectrumValue {
                value: delta,
                provenance: Provenance::Numeric(NUMERIC_EPS),
                certainty: crate::spectrum::Certainty::Proven,
            });
        }
        i = j;
    }
    Spectrum::from_values(values)
}

fn enumerate_box(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (2 * b as usize + 1));
        for prefix in &out {
            for x in -b..=b {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Row-style Hermite normal form over the integers: the canonical basis of
/// the sublattice spanned by `rows`. Two generating sets span the same
/// sublattice iff their forms agree.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    if m.is_empty() {
        return Vec::new();
    }
    let dim = m[0].len();
    let mut pivot_row = 0;
    for col in 0..dim {
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m.len() {
                if m[r][col] != 0
                    && best.is_none_or(|b| m[r][col].abs() < m[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][col] != 0 {
                    let q = m[r][col] / m[pivot_row][col];
                    for c in 0..dim {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && m[pivot_row][col] != 0 {
            if m[pivot_row][col] < 0 {
                for c in 0..dim {
                    m[pivot_row][c] = -m[pivot_row][c];
                }
            }
            let p = m[pivot_row][col];
            for r in 0..pivot_row {
                let q = m[r][col].div_euclid(p);
                if q != 0 {
                    for c in 0..dim {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m
}

pub fn lattice_span_equal(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    hermite_normal_form(a) == hermite_normal_form(b)
}

/// Whether `v` lies in the sublattice spanned by `rows`.
pub fn lattice_member(v: &[i64], rows: &[Vec<i64>]) -> bool {
    let h = hermite_normal_form(rows);
    let mut v = v.to_vec();
    for row in &h {
        let col = match row.iter().position(|&x| x != 0) {
            Some(c) => c,
            None => continue,
        };
        if v[col] != 0 {
            if v[col] % row[col] != 0 {
                return false;
            }
            let q = v[col] / row[col];
            for c in 0..v.len() {
                v[c] -= q * row[c];
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|&x| Value::from_int(x)).collect()
    }

    #[test]
    fn shift_length_matches_flat_distance() {
        // Independent check: the translate of the origin by (1,1) in the
        // plane with periods (6,4) sits at (6,4), distance sqrt(52).
        let diams = ints(&[3, 2]);
        let got = lattice_shift_length(&[1, 1], &diams);
        let oracle = ((2.0 * 3.0f64).powi(2) + (2.0 * 2.0f64).powi(2)).sqrt();
        assert!((got.to_f64() - oracle).abs() < 1e-12);
        assert!((got.to_f64() - 52.0f64.sqrt()).abs() < 1e-12);

        let axis = lattice_shift_length(&[0, -3], &diams);
        assert!(axis.same_as(&Value::from_int(12)));
    }

    #[test]
    fn torus_spectrum_is_the_diameter_set() {
        let s = lattice_covering_spectrum(&ints(&[3, 2, 1]));
        assert!(s.equals_exact(&ints(&[1, 2, 3])), "got {}", s);
    }

    #[test]
    fn repeated_diameters_collapse() {
        let s = lattice_covering_spectrum(&ints(&[1, 1]));
        assert!(s.equals_exact(&ints(&[1])), "got {}", s);
    }

    #[test]
    fn rational_diameters_stay_exact() {
        let diams = vec![Value::from_rational(3, 2), Value::from_rational(1, 2)];
        let s = lattice_covering_spectrum(&diams);
        assert!(s.equals_exact(&[Value::from_rational(1, 2), Value::from_rational(3, 2)]));
    }

    #[test]
    fn pi_valued_diameters_report_numeric_breakpoints_at_exact_spots() {
        let diams = vec![Value::pi_times(1, 1), Value::pi_times(2, 1)];
        let s = lattice_covering_spectrum(&diams);
        let got = s.to_f64s();
        assert_eq!(got.len(), 2);
        assert!((got[0] - std::f64::consts::PI).abs() < 1e-9);
        assert!((got[1] - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn hnf_canonicalizes_spans() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let b = vec![vec![2, 3], vec![2, -3], vec![4, 3]];
        // Same span: (2,3)+(2,-3) = (4,0)... gcd structure differs; check via HNF
        let ha = hermite_normal_form(&a);
        let hb = hermite_normal_form(&b);
        assert_eq!(ha, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(hb, vec![vec![2, 0], vec![0, 3]]);
        assert!(lattice_span_equal(&a, &b));
    }

    #[test]
    fn membership_in_sublattice() {
        let rows = vec![vec![2, 0], vec![0, 2]];
        assert!(lattice_member(&[4, -2], &rows));
        assert!(!lattice_member(&[1, 0], &rows));
        assert!(lattice_member(&[0, 0], &[]));
        assert!(!lattice_member(&[1, 0], &[]));
    }
}
