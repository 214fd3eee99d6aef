//! Entropic weight of input sets and the bounds it satisfies.
//!
//! For a set `S` with `p_k = Pr(S ∩ F̂_k)` and `P = Pr(S)`,
//! `D(S) = -Σ p_k log₂(p_k / P)`, with `0·log 0 = 0`. Probabilities are exact
//! rationals; only the final ratios are converted to `f64`.

mod formula;
mod profile;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::domain::{Domain, InputSet};
use crate::error::{Error, Result};

pub use formula::{
    df_check, df_check_occurrence, formula_set, is_defining, mdf_check, mdf_check_occurrence,
    occurrence_set,
};
pub use profile::{
    class_weights, trace_profile, weighted_volume_profile, ClassWeights, ConvergenceProfile,
    ProfilePoint, VolumePoint, WeightedVolumeProfile,
};

/// Absolute tolerance for comparisons between entropy values.
pub const TOLERANCE: f64 = 1e-12;

/// `log₂` of a positive rational, accurate for tiny and huge values.
pub fn log2_ratio(r: &BigRational) -> f64 {
    debug_assert!(r > &BigRational::zero());
    match r.to_f64() {
        Some(v) if v.is_normal() => v.log2(),
        _ => big_log2(r.numer()) - big_log2(r.denom()),
    }
}

fn big_log2(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

/// `D(S)`.
pub fn entropic_weight(dom: &Domain, s: &InputSet) -> f64 {
    delta_of(&dom.class_measures(s), None)
}

fn delta_of(parts: &[BigRational], only: Option<&[usize]>) -> f64 {
    let total: BigRational = parts.iter().fold(BigRational::zero(), |a, b| a + b);
    if total.is_zero() {
        return 0.0;
    }
    let mut d = 0.0;
    for (k, p) in parts.iter().enumerate() {
        if p.is_zero() || only.is_some_and(|j| !j.contains(&k)) {
            continue;
        }
        d -= to_f64(p) * log2_ratio(&(p / &total));
    }
    // Rounding can leave -0.0 or a negative epsilon on exact zeros.
    if d <= 0.0 {
        0.0
    } else {
        d
    }
}

/// `D(S)` computed as `-Σ p_k log₂ p_k + P log₂ P`.
pub fn entropic_weight_alt(dom: &Domain, s: &InputSet) -> f64 {
    let parts = dom.class_measures(s);
    let total: BigRational = parts.iter().fold(BigRational::zero(), |a, b| a + b);
    if total.is_zero() {
        return 0.0;
    }
    let mut d = to_f64(&total) * log2_ratio(&total);
    for p in parts.iter().filter(|p| !p.is_zero()) {
        d -= to_f64(p) * log2_ratio(p);
    }
    d
}

/// The part of `D(S)` contributed by the preimages in `j` (0-based indices
/// into the domain's range).
pub fn delta(dom: &Domain, s: &InputSet, j: &[usize]) -> f64 {
    delta_of(&dom.class_measures(s), Some(j))
}

/// One inequality `lhs ≤ rhs`, checked with a tolerance or exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub holds: bool,
    /// Exact sides, when the comparison was exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<[String; 2]>,
}

impl BoundCheck {
    pub fn approx(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> BoundCheck {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + tol,
            exact: None,
        }
    }

    /// `lhs ≤ rhs` (or `<` when `strict`) on exact rationals.
    pub fn exact(
        name: impl Into<String>,
        lhs: &BigRational,
        rhs: &BigRational,
        strict: bool,
    ) -> BoundCheck {
        BoundCheck {
            name: name.into(),
            lhs: to_f64(lhs),
            rhs: to_f64(rhs),
            slack: to_f64(&(rhs - lhs)),
            holds: if strict { lhs < rhs } else { lhs <= rhs },
            exact: Some([lhs.to_string(), rhs.to_string()]),
        }
    }
}

/// Bounds on `Δ(S, J)` together with the checks that did not apply.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
    /// `(name, reason)` of checks whose premise fails.
    pub skipped: Vec<(String, String)>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// `Δ(S,J) ≤ (|J|/M)·log₂M` (needs `M ≥ 3`) and, when `S` misses every
/// preimage outside `J`, `Δ(S,J) ≤ Pr(S)·log₂|J| ≤ log₂|J|`.
pub fn check_bounds(dom: &Domain, s: &InputSet, j: &[usize]) -> BoundReport {
    let m = dom.m();
    let d = delta(dom, s, j);
    let mut report = BoundReport {
        checks: Vec::new(),
        skipped: Vec::new(),
    };
    let jn = j.len() as f64;
    if m >= 3 {
        let rhs = jn / m as f64 * (m as f64).log2();
        report.checks.push(BoundCheck::approx(
            "delta-le-share-of-log-m",
            d,
            rhs,
            TOLERANCE,
        ));
    } else {
        report
            .skipped
            .push(("delta-le-share-of-log-m".into(), format!("M = {m} < 3")));
    }
    let counts = dom.counts(s);
    let outside = (0..m).find(|k| !j.contains(k) && counts[*k] > 0);
    match outside {
        None if !j.is_empty() => {
            let pr = to_f64(&dom.measure(s));
            let mid = pr * jn.log2();
            report
                .checks
                .push(BoundCheck::approx("delta-le-pr-log-j", d, mid, TOLERANCE));
            report.checks.push(BoundCheck::approx(
                "pr-log-j-le-log-j",
                mid,
                jn.log2(),
                TOLERANCE,
            ));
        }
        None => report
            .skipped
            .push(("delta-le-pr-log-j".into(), "J is empty".into())),
        Some(k) => report.skipped.push((
            "delta-le-pr-log-j".into(),
            format!("S meets preimage {k} outside J"),
        )),
    }
    report
}

fn check_logical(s: u64, p: u64) -> Result<()> {
    if s < 2 || p >= s {
        return Err(Error::InvalidArgument(format!(
            "need s >= 2 and 0 <= p < s, got s = {s}, p = {p}"
        )));
    }
    Ok(())
}

/// `log₂s - (1 - 1/s)·log₂((s-1)/(s-p))`.
pub fn logical_uncertainty(s: u64, p: u64) -> Result<f64> {
    check_logical(s, p)?;
    let sf = s as f64;
    Ok(sf.log2() - (1.0 - 1.0 / sf) * ((sf - 1.0) / (sf - p as f64)).log2())
}

/// `(s-1) / (s·(s-p))`.
pub fn logical_step_prob(s: u64, p: u64) -> Result<BigRational> {
    check_logical(s, p)?;
    Ok(BigRational::new((s - 1).into(), (s * (s - p)).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DEFAULT_CAP};
    use crate::models::ModelId;

    fn maxps3() -> Domain {
        build_domain(ModelId::MaxPsA0, 3, 2, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn d1_d2_d3() {
        let d = maxps3();
        assert!((entropic_weight(&d, &d.full_set()) - 3f64.log2()).abs() < TOLERANCE);
        for k in 0..d.m() {
            assert_eq!(entropic_weight(&d, d.preimage(k)), 0.0);
            let one = InputSet::from_indices(d.len(), d.preimage(k).ones().take(1));
            assert_eq!(entropic_weight(&d, &one), 0.0);
        }
        assert_eq!(entropic_weight(&d, &d.empty_set()), 0.0);
        assert_eq!(entropic_weight_alt(&d, &d.empty_set()), 0.0);
    }

    #[test]
    fn two_word_set() {
        // aab (index 1, value 0) and aba (index 2, value 1)
        let d = maxps3();
        let s = InputSet::from_indices(d.len(), [1, 2]);
        let p0: f64 = 1.0 / 12.0;
        let p1: f64 = 1.0 / 6.0;
        let pt = p0 + p1;
        let oracle = -(p0 * (p0 / pt).log2() + p1 * (p1 / pt).log2());
        assert!((entropic_weight(&d, &s) - oracle).abs() < TOLERANCE);
        // 0.229574 to six places; the rounded figure 0.229572 is within 1e-5
        assert!((entropic_weight(&d, &s) - 0.229_572).abs() < 1e-5);
        assert!((entropic_weight_alt(&d, &s) - oracle).abs() < TOLERANCE);
    }

    #[test]
    fn delta_cases() {
        let d = maxps3();
        let all: Vec<usize> = (0..d.m()).collect();
        let s = InputSet::from_indices(d.len(), [1, 2, 5]);
        assert!((delta(&d, &s, &all) - entropic_weight(&d, &s)).abs() < TOLERANCE);
        let single = delta(&d, &d.full_set(), &[1]);
        assert!((single - 3f64.log2() / 3.0).abs() < TOLERANCE);
        assert_eq!(delta(&d, &d.empty_set(), &[0, 1]), 0.0);
        let r = check_bounds(&d, &d.full_set(), &[1]);
        assert!(r.all_hold());
        assert!(r.checks[0].slack.abs() < 1e-12);
        let r = check_bounds(&d, d.preimage(2), &[2]);
        assert_eq!(r.checks.len(), 3);
        assert!(r.all_hold());
    }

    #[test]
    fn logical_formulas() {
        assert!((logical_uncertainty(4, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((logical_uncertainty(2, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((logical_uncertainty(4, 3).unwrap() - 0.811_278).abs() < 1e-6);
        assert!(logical_uncertainty(1, 0).is_err());
        assert!(logical_uncertainty(4, 4).is_err());
        let n = 10;
        assert_eq!(
            logical_step_prob(n, 1).unwrap(),
            BigRational::new(1.into(), 10.into())
        );
        assert_eq!(
            logical_step_prob(n, 2).unwrap(),
            BigRational::new(9.into(), 80.into())
        );
        assert_eq!(
            logical_step_prob(3, 0).unwrap(),
            BigRational::new(2.into(), 9.into())
        );
    }

    #[test]
    fn log2_of_tiny_ratio() {
        let r = BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(2000));
        assert!((log2_ratio(&r) + 2000.0).abs() < 1e-9);
    }
}
