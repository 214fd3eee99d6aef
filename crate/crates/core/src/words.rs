//! Primitive words and the bound chains on the maxPS sets `G` and `H`.
//!
//! `γ(s)` counts primitive words of length `s` over an alphabet of size `α`
//! and `Γ(s)` those among them with `w(1) = w(3)`. A word of size `n` has
//! maximal prefix-suffix `n - s` with `s ≤ n/2` exactly when it is periodic
//! with a primitive period of length `s`, so `|F̂_{n-s}| = γ(s)` there.
//!
//! [`validate_annexe`] checks every step of the lower bound on `D(G)` and of
//! the upper bound on `D(H)` against exact counts, where `G` and `H` are the
//! occurrence sets of `w(1) = w(3)` and `w(n-2) ≠ w(n)` under the quadratic
//! algorithm. Claims that brute force contradicts are listed as
//! discrepancies with witnesses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{
    build_domain, build_event_index, next_word, word_at, Domain, EventIndex, InputSet,
    LiteralFilter,
};
use crate::entropy::{entropic_weight, log2_ratio, BoundCheck};
use crate::error::{Error, Result};
use crate::models::{maxps_oracle, named_sets, ModelId};

/// Tolerance for links evaluated in floating point.
pub const LINK_TOLERANCE: f64 = 1e-9;

/// Möbius function; `mobius(0)` is treated as 0.
pub fn mobius(m: u64) -> i32 {
    if m == 0 {
        return 0;
    }
    let mut m = m;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

fn divisors_below(s: u32) -> impl Iterator<Item = u32> {
    (1..s).filter(move |d| s.is_multiple_of(*d))
}

fn checked_pow(alpha: u32, e: u32) -> Result<i128> {
    (alpha as i128)
        .checked_pow(e)
        .filter(|v| *v < (1i128 << 100))
        .ok_or_else(|| Error::InvalidArgument(format!("{alpha}^{e} is too large")))
}

fn check_args(s: u32, alpha: u32) -> Result<()> {
    if s < 1 {
        return Err(Error::InvalidArgument(
            "word length must be at least 1".into(),
        ));
    }
    if alpha < 1 {
        return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
    }
    Ok(())
}

/// `γ(s) = Σ_{d | s} α^d μ(s/d)`.
pub fn gamma_mobius(s: u32, alpha: u32) -> Result<i128> {
    check_args(s, alpha)?;
    let mut sum = 0i128;
    for d in (1..=s).filter(|d| s.is_multiple_of(*d)) {
        sum += checked_pow(alpha, d)? * mobius((s / d) as u64) as i128;
    }
    Ok(sum)
}

/// `γ(s) = α^s - Σ_{d | s, d < s} γ(d)`.
pub fn gamma_recursive(s: u32, alpha: u32) -> Result<i128> {
    check_args(s, alpha)?;
    let mut table = vec![0i128; s as usize + 1];
    for t in 1..=s {
        let sub: i128 = divisors_below(t).map(|d| table[d as usize]).sum();
        table[t as usize] = checked_pow(alpha, t)? - sub;
    }
    Ok(table[s as usize])
}

/// `Γ(s) = α^{s-1} - Σ_{d | s, d < s} Γ(d)` for `s ≥ 3`, with `Γ(1) = α` and
/// `Γ(2) = α² - α`.
pub fn big_gamma_recursive(s: u32, alpha: u32) -> Result<i128> {
    check_args(s, alpha)?;
    let mut table = vec![0i128; s as usize + 1];
    for t in 1..=s {
        table[t as usize] = match t {
            1 => alpha as i128,
            2 => checked_pow(alpha, 2)? - alpha as i128,
            _ => {
                let sub: i128 = divisors_below(t).map(|d| table[d as usize]).sum();
                checked_pow(alpha, t - 1)? - sub
            }
        };
    }
    Ok(table[s as usize])
}

/// Extra condition on the words counted by [`brute_primitive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordConstraint {
    None,
    /// `w(1) = w(3)`; words shorter than 3 never satisfy it.
    FirstEqualsThird,
}

/// Whether `w` is not a power `u^i` with `i ≥ 2`.
pub fn is_primitive(w: &[u8]) -> bool {
    let s = w.len() as u32;
    !divisors_below(s).any(|d| {
        let d = d as usize;
        (d..w.len()).all(|i| w[i] == w[i - d])
    })
}

/// Number of primitive words of length `s`, by enumeration.
pub fn brute_primitive(s: u32, alpha: u32, constraint: WordConstraint, cap: u64) -> Result<u64> {
    check_args(s, alpha)?;
    let size = crate::domain::domain_size(s as usize, alpha, cap)?;
    const CHUNK: usize = 1 << 14;
    Ok((0..size.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut w = vec![0u8; s as usize];
            word_at(c * CHUNK, alpha, &mut w);
            let mut count = 0u64;
            for _ in c * CHUNK..((c + 1) * CHUNK).min(size) {
                let ok = match constraint {
                    WordConstraint::None => true,
                    WordConstraint::FirstEqualsThird => w.len() >= 3 && w[0] == w[2],
                };
                if ok && is_primitive(&w) {
                    count += 1;
                }
                next_word(&mut w, alpha);
            }
            count
        })
        .sum())
}

/// `|F̂_k|` of maxPS for `k = 0..n-1`, by enumeration.
pub fn preimage_counts(n: usize, alpha: u32, cap: u64) -> Result<Vec<u64>> {
    let size = crate::domain::domain_size(n, alpha, cap)?;
    const CHUNK: usize = 1 << 14;
    Ok((0..size.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut w = vec![0u8; n];
            word_at(c * CHUNK, alpha, &mut w);
            let mut counts = vec![0u64; n];
            for _ in c * CHUNK..((c + 1) * CHUNK).min(size) {
                counts[maxps_oracle(&w) as usize] += 1;
                next_word(&mut w, alpha);
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// `γ(s)` and, for `s ≥ 3`, `Γ(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveCount {
    pub s: u32,
    pub alphabet: u32,
    pub gamma: i128,
    pub big_gamma: Option<i128>,
}

pub fn primitive_count(s: u32, alpha: u32) -> Result<PrimitiveCount> {
    Ok(PrimitiveCount {
        s,
        alphabet: alpha,
        gamma: gamma_mobius(s, alpha)?,
        big_gamma: if s >= 3 {
            Some(big_gamma_recursive(s, alpha)?)
        } else {
            None
        },
    })
}

/// A stated identity or bound that brute force contradicts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: String,
    pub claim: String,
    pub observed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundChainReport {
    pub n: usize,
    pub alphabet: u32,
    pub links: Vec<BoundCheck>,
    pub discrepancies: Vec<Discrepancy>,
    /// `Pr(G)` as an exact fraction.
    pub pr_g: String,
    pub d_g: f64,
    /// The explicit lower bound on `D(G)`.
    pub d_g_lower: f64,
    /// `(1/(4α))·log₂n` minus the explicit lower bound.
    pub implied_c: f64,
    pub pr_h: String,
    pub d_h: f64,
    pub d_h_upper: f64,
}

impl BoundChainReport {
    pub fn all_links_hold(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &BoundCheck> {
        self.links.iter().filter(|l| !l.holds)
    }
}

fn q(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn qi(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn qpow(a: u32, e: i64) -> BigRational {
    let b = BigInt::from(a).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        qi(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

struct Links(Vec<BoundCheck>);

impl Links {
    fn exact(&mut self, name: String, lhs: BigRational, rhs: BigRational) {
        self.0.push(BoundCheck::exact(name, &lhs, &rhs, false));
    }

    fn strict(&mut self, name: String, lhs: BigRational, rhs: BigRational) {
        self.0.push(BoundCheck::exact(name, &lhs, &rhs, true));
    }

    fn equal(&mut self, name: String, lhs: BigRational, rhs: BigRational) {
        let mut c = BoundCheck::exact(name, &lhs, &rhs, false);
        c.holds = lhs == rhs;
        self.0.push(c);
    }

    fn approx(&mut self, name: String, lhs: f64, rhs: f64) {
        self.0
            .push(BoundCheck::approx(name, lhs, rhs, LINK_TOLERANCE));
    }

    fn same_set(&mut self, name: String, a: &InputSet, b: &InputSet) {
        let d = a.symmetric_difference(b).count();
        self.exact(name, qi(d as u64), BigRational::zero());
    }
}

/// Validates the bound chains for even `n ≥ 12` on a freshly built domain.
pub fn validate_annexe(n: usize, alpha: u32, cap: u64) -> Result<BoundChainReport> {
    check_annexe_args(n, alpha)?;
    let dom = build_domain(ModelId::MaxPsA0, n, alpha, cap)?;
    let index = build_event_index(ModelId::MaxPsA0.program(), &dom, LiteralFilter::Weeded)?;
    validate_annexe_with(&dom, &index)
}

fn check_annexe_args(n: usize, alpha: u32) -> Result<()> {
    if n < 12 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "the bound chains need an even n >= 12, got {n}"
        )));
    }
    if alpha < 2 {
        return Err(Error::InvalidArgument(format!(
            "alphabet must be at least 2, got {alpha}"
        )));
    }
    Ok(())
}

/// Validates the bound chains on a maxPS domain and the quadratic
/// algorithm's event index over it.
pub fn validate_annexe_with(dom: &Domain, index: &EventIndex) -> Result<BoundChainReport> {
    let (n, alpha) = (dom.n(), dom.alphabet());
    check_annexe_args(n, alpha)?;
    let sets = named_sets(dom, index)?;
    let a = alpha;
    let af = a as f64;
    let nn = n as i64;
    let half = n / 2;
    let mut links = Links(Vec::new());
    let mut discrepancies = Vec::new();

    let mut gam = vec![0i128; half + 1];
    let mut big = vec![0i128; half + 1];
    for s in 1..=half {
        gam[s] = gamma_mobius(s as u32, a)?;
        big[s] = big_gamma_recursive(s as u32, a)?;
    }
    let ratio = |s: usize| q(big[s], gam[s]);
    let aq = qi(a);
    let a_a1 = qi(a as i64 * (a as i64 + 1));

    // Structure of the preimages and of G.
    links.equal("range-size-is-n".into(), qi(dom.m() as u64), qi(n as u64));
    let fsize = |k: usize| dom.preimage(k).count() as i64;
    for s in 1..=half {
        links.equal(
            format!("preimage-size-is-gamma[s={s}]"),
            qi(fsize(n - s)),
            qi(gam[s]),
        );
    }
    for s in 2..=half {
        let c = sets.g.intersection_count(dom.preimage(n - s)) as i64;
        links.equal(
            format!("g-in-preimage-is-big-gamma[s={s}]"),
            qi(c),
            qi(big[s]),
        );
    }
    links.same_set(
        "g-misses-top-preimage".into(),
        &sets.g.intersection(dom.preimage(n - 1)),
        &dom.empty_set(),
    );
    links.same_set(
        "g-covers-preimage-n-2".into(),
        &sets.g.intersection(dom.preimage(n - 2)),
        dom.preimage(n - 2),
    );
    for k in 0..=n - 2 {
        links.same_set(
            format!("g-agrees-with-satisfaction[k={k}]"),
            &sets.g.intersection(dom.preimage(k)),
            &sets.g_sat.intersection(dom.preimage(k)),
        );
    }

    // Brackets of Γ around γ/α and the lower bound on γ.
    for s in 1..=half {
        let g = qi(gam[s]);
        let b = qi(big[s]);
        let slack = qi(a as i64 * a as i64 + a as i64);
        links.exact(
            format!("big-gamma-bracket-lower[s={s}]"),
            &g / &aq - &slack,
            b.clone(),
        );
        links.exact(
            format!("big-gamma-bracket-upper[s={s}]"),
            b,
            &g / &aq + &slack,
        );
        if s % 2 == 0 {
            let lhs = qpow(a, s as i64) - qpow(a, s as i64 / 2 + 1);
            links.exact(format!("gamma-lower[s={s}]"), lhs, g.clone());
        } else {
            let lhs = af.powi(s as i32) - af.powf(s as f64 / 2.0 + 1.0);
            links.approx(format!("gamma-lower[s={s}]"), lhs, gam[s] as f64);
        }
        links.exact(
            format!("ratio-lower-by-gamma[s={s}]"),
            aq.recip() - &a_a1 / &g,
            ratio(s),
        );
        let geo = (qpow(a, s as i64) - qi(1)) / qi(a as i64 - 1);
        links.exact(
            format!("geometric-sum-le-power[m={s}]"),
            geo,
            qpow(a, s as i64),
        );
    }

    // Ratio lower bounds.
    let den_real = |s: usize| af.powi(s as i32) - af.powf(s as f64 / 2.0 + 1.0);
    for s in 6..=half {
        let sf = s as f64;
        let aa1 = af * (af + 1.0);
        links.approx(
            format!("alpha-term-vs-gamma-lower[s={s}]"),
            aa1 / gam[s] as f64,
            aa1 / den_real(s),
        );
        links.approx(
            format!("alpha-term-three-halves[s={s}]"),
            aa1 / den_real(s),
            1.5 * af * af / den_real(s),
        );
        let x = af.powf(sf - 3.0) - af.powf(sf / 2.0 - 2.0);
        links.approx(format!("power-gap-at-least-six[s={s}]"), 6.0, x);
        links.approx(
            format!("alpha-term-le-quarter[s={s}]"),
            3.0 / (2.0 * af * x),
            1.0 / (4.0 * af),
        );
        links.approx(
            format!("ratio-lower-middle[s={s}]"),
            1.0 / af - aa1 / den_real(s),
            f(&ratio(s)),
        );
        links.exact(
            format!("ratio-ge-three-quarters[s={s}]"),
            q(3, 4 * a as i64),
            ratio(s),
        );
    }
    for s in [3usize, 4] {
        links.equal(
            format!("ratio-small-closed-form[s={s}]"),
            ratio(s),
            q(1, a as i64 + 1),
        );
        links.exact(
            format!("ratio-small-ge-half[s={s}]"),
            q(1, 2 * a as i64),
            ratio(s),
        );
    }
    let a3 = (a as i64).pow(3);
    links.equal(
        "ratio-small-closed-form[s=5]".into(),
        ratio(5),
        q(a3 - 1, a3 * a as i64 - 1),
    );
    links.exact(
        "ratio-small-ge-three-quarters[s=5]".into(),
        q(3, 4 * a as i64),
        ratio(5),
    );

    // Pr(G) and its pieces.
    let g_parts = dom.class_measures(&sets.g);
    let pr_g: BigRational = g_parts.iter().fold(BigRational::zero(), |x, y| x + y);
    for k in half..=n - 3 {
        let s = n - k;
        links.equal(
            format!("pr-g-piece-closed-form[k={k}]"),
            g_parts[k].clone(),
            ratio(s) / qi(nn),
        );
        links.exact(
            format!("pr-g-piece-lower[k={k}]"),
            q(1, 2 * nn * a as i64),
            g_parts[k].clone(),
        );
        links.exact(
            format!("pr-g-piece-upper[k={k}]"),
            g_parts[k].clone(),
            q(8, 5 * nn * a as i64),
        );
    }
    let n_q = qi(nn);
    let sum_ratios = (3..=half).fold(BigRational::zero(), |acc, s| acc + ratio(s) / &n_q);
    let head_sum = n_q.recip() + &sum_ratios;
    links.strict("pr-g-above-head".into(), head_sum.clone(), pr_g.clone());
    let coarse = n_q.recip() + q(1, nn * a as i64) + qi(half as i64 - 4) * q(3, 4 * nn * a as i64);
    links.exact("pr-g-head-ge-coarse".into(), coarse.clone(), head_sum);
    links.exact(
        "pr-g-coarse-ge-three-eighths".into(),
        q(3, 8 * a as i64),
        coarse,
    );
    links.exact(
        "pr-g-ge-three-eighths".into(),
        q(3, 8 * a as i64),
        pr_g.clone(),
    );

    // Ratio upper bounds.
    for s in 5..=half {
        let sf = s as f64;
        links.exact(
            format!("ratio-upper-by-gamma[s={s}]"),
            ratio(s),
            aq.recip() + &a_a1 / qi(gam[s]),
        );
        let step1 = 1.0 / af * (1.0 + 3.0 / (2.0 * (af.powf(sf - 3.0) - af.powf(sf / 2.0 - 2.0))));
        links.approx(
            format!("ratio-upper-three-halves[s={s}]"),
            1.0 / af + af * (af + 1.0) / gam[s] as f64,
            step1,
        );
        let step2 = 1.0 / af * (1.0 + 3.0 / (2.0 * af.sqrt() * (af * af.sqrt() - 1.0)));
        links.approx(format!("ratio-upper-at-s5[s={s}]"), step1, step2);
        let r2 = 2f64.sqrt();
        let step3 = 1.0 / af * (1.0 + 3.0 / (2.0 * r2 * (2.0 * r2 - 1.0)));
        links.approx(format!("ratio-upper-at-alpha2[s={s}]"), step2, step3);
        let step4 = 1.0 / af * (1.0 + 3.0 / (2.8 * 1.8));
        links.approx(format!("ratio-upper-rounded[s={s}]"), step3, step4);
        links.approx(
            format!("ratio-upper-eight-fifths-chain[s={s}]"),
            step4,
            8.0 / (5.0 * af),
        );
        links.exact(
            format!("ratio-le-eight-fifths[s={s}]"),
            ratio(s),
            q(8, 5 * a as i64),
        );
    }
    for s in [3usize, 4] {
        links.exact(
            format!("ratio-le-eight-fifths[s={s}]"),
            ratio(s),
            q(8, 5 * a as i64),
        );
    }

    // D(G) from below.
    let d_g = entropic_weight(dom, &sets.g);
    let nf = n as f64;
    let first = f(&g_parts[n - 2]) * log2_ratio(&(&pr_g / &g_parts[n - 2]));
    let mut head = first;
    for k in half..=n - 3 {
        let p = &g_parts[k];
        let term = f(p) * log2_ratio(&(&pr_g / p));
        head += term;
        links.approx(
            format!("d-g-term-lower[k={k}]"),
            1.0 / (2.0 * nf * af) * (nf.log2() - (64.0f64 / 15.0).log2()),
            term,
        );
    }
    links.equal(
        "d-g-first-piece-is-one-over-n".into(),
        g_parts[n - 2].clone(),
        n_q.recip(),
    );
    links.approx(
        "d-g-first-term-lower".into(),
        1.0 / nf * (nf.log2() - (8.0 * af / 3.0).log2()),
        first,
    );
    let explicit = 1.0 / nf * (nf.log2() - (8.0 * af / 3.0).log2())
        + (nf / 2.0 - 2.0) * (1.0 / (2.0 * nf * af)) * (nf.log2() - (64.0f64 / 15.0).log2());
    links.approx("d-g-head-le-d-g".into(), head, d_g);
    links.approx("d-g-explicit-le-head".into(), explicit, head);
    links.approx("d-g-explicit-le-d-g".into(), explicit, d_g);
    let implied_c = nf.log2() / (4.0 * af) - explicit;

    // H, W0, W1.
    let f0 = dom.preimage(0);
    let f1 = dom.preimage(1);
    let (c0, c1) = (f0.count() as i64, f1.count() as i64);
    let h0 = sets.h.intersection(f0);
    let h1 = sets.h.intersection(f1);
    links.same_set(
        "h-within-f0-f1".into(),
        &sets.h.difference(&f0.union(f1)),
        &dom.empty_set(),
    );
    links.same_set("h-in-f1-is-w1".into(), &h1, &sets.w1);
    let (ai, a1) = (a as i64, a as i64 - 1);
    links.equal(
        "w0-count-closed-form".into(),
        qi(sets.w0.count() as u64),
        qi(ai * a1 * (ai - 2)),
    );
    links.equal(
        "w1-count-closed-form".into(),
        qi(sets.w1.count() as u64),
        qi(ai * a1),
    );
    let f_lower = qpow(a, half as i64 - 1) * qi(a1);
    links.exact("f0-size-lower".into(), f_lower.clone(), qi(c0));
    links.exact("f1-size-lower".into(), f_lower, qi(c1));
    links.strict("f0-size-upper".into(), qi(c0), qpow(a, nn));
    links.strict("f1-size-upper".into(), qi(c1), qpow(a, nn - 1));

    let tail = qpow(a, half as i64 - 3) * &n_q;
    let top = tail.recip();
    let bottom = (qpow(a, nn + 1) * &n_q).recip();
    let cap_num = qi(ai * ai * a1);
    let p0 = dom.measure(&h0);
    let p1 = dom.measure(&h1);
    let p0_count = q(h0.count() as u64, nn) / qpow(a, nn);
    links.strict("pr-h0-lower-outer".into(), bottom.clone(), p0_count.clone());
    links.strict("pr-h0-lower-inner".into(), p0_count, p0.clone());
    links.strict("pr-h0-upper".into(), p0.clone(), &cap_num / (&n_q * qi(c0)));
    links.exact(
        "pr-h0-upper-outer".into(),
        &cap_num / (&n_q * qi(c0)),
        top.clone(),
    );
    let p1_closed = q(ai * a1, nn) / qpow(a, nn - 1);
    links.strict(
        "pr-w1-lower-outer".into(),
        bottom.clone(),
        p1_closed.clone(),
    );
    links.strict("pr-w1-lower-inner".into(), p1_closed, p1.clone());
    links.strict("pr-w1-upper".into(), p1.clone(), &cap_num / (&n_q * qi(c1)));
    links.exact(
        "pr-w1-upper-outer".into(),
        &cap_num / (&n_q * qi(c1)),
        top.clone(),
    );
    let pr_h = dom.measure(&sets.h);
    let h_mid = &cap_num / &n_q * (qi(c0).recip() + qi(c1).recip());
    links.strict("pr-h-upper".into(), pr_h.clone(), h_mid.clone());
    links.exact("pr-h-upper-outer".into(), h_mid, qi(2) * &top);

    let d_h = entropic_weight(dom, &sets.h);
    let two_terms = [&p0, &p1]
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| f(p) * log2_ratio(&(&pr_h / *p)))
        .sum::<f64>();
    links.approx("d-h-two-terms".into(), (d_h - two_terms).abs(), 0.0);
    let d_h_upper = 2.0 / (nf * af.powi(half as i32 - 3)) * (2.0 * af.powi(half as i32 + 4)).log2();
    links.approx("d-h-upper".into(), d_h, d_h_upper);

    // Claims checked against brute force but not used above.
    if h0 != sets.w0 {
        let witness = h0
            .symmetric_difference(&sets.w0)
            .ones()
            .next()
            .map(|i| dom.input(i).render(false));
        discrepancies.push(Discrepancy {
            id: "h-in-f0-is-w0".into(),
            claim:
                "H meets the preimage of 0 exactly in W0 = {abab...abac : a != b, c not in {a, b}}"
                    .into(),
            observed: format!(
                "|H n F0| = {}, |W0| = {}; H n F0 also holds a...ac with c != a",
                h0.count(),
                sets.w0.count()
            ),
            witness,
        });
    }
    let w0_closed = q(ai * a1 * (ai - 2), nn) / qpow(a, nn);
    if bottom >= w0_closed {
        discrepancies.push(Discrepancy {
            id: "w0-closed-form-lower-bracket".into(),
            claim: "1/(n a^(n+1)) < a(a-1)(a-2)/(n a^n)".into(),
            observed: format!("{bottom} >= {w0_closed}"),
            witness: Some(format!("alphabet {a}")),
        });
    }

    Ok(BoundChainReport {
        n,
        alphabet: a,
        links: links.0,
        discrepancies,
        pr_g: pr_g.to_string(),
        d_g,
        d_g_lower: explicit,
        implied_c,
        pr_h: pr_h.to_string(),
        d_h,
        d_h_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DEFAULT_CAP;

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(7), -1);
        assert_eq!(mobius(6), 1);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_mobius(2, 2).unwrap(), 2);
        assert_eq!(gamma_mobius(4, 2).unwrap(), 12);
        assert_eq!(gamma_mobius(6, 2).unwrap(), 54);
        assert_eq!(gamma_recursive(6, 2).unwrap(), 54);
        for a in 2..=5 {
            let a_ = a as i128;
            assert_eq!(big_gamma_recursive(3, a).unwrap(), a_ * a_ - a_);
        }
        assert_eq!(big_gamma_recursive(4, 2).unwrap(), 4);
        assert_eq!(big_gamma_recursive(5, 2).unwrap(), 14);
        assert!(gamma_mobius(0, 2).is_err());
    }

    #[test]
    fn brute_counts() {
        assert_eq!(
            brute_primitive(4, 2, WordConstraint::FirstEqualsThird, DEFAULT_CAP).unwrap(),
            4
        );
        assert_eq!(
            brute_primitive(2, 2, WordConstraint::None, DEFAULT_CAP).unwrap(),
            2
        );
        assert_eq!(
            brute_primitive(6, 2, WordConstraint::None, DEFAULT_CAP).unwrap(),
            54
        );
        assert!(brute_primitive(30, 2, WordConstraint::None, 1 << 20).is_err());
    }

    #[test]
    fn preimage_counts_small() {
        assert_eq!(preimage_counts(3, 2, DEFAULT_CAP).unwrap(), vec![4, 2, 2]);
        let c = preimage_counts(6, 2, DEFAULT_CAP).unwrap();
        assert_eq!(c[4], 2);
        assert_eq!(c[5], 2);
        assert_eq!(c.iter().sum::<u64>(), 64);
    }

    #[test]
    fn annexe_rejects_small_or_odd_n() {
        assert!(validate_annexe(10, 2, DEFAULT_CAP).is_err());
        assert!(validate_annexe(13, 2, DEFAULT_CAP).is_err());
        assert!(validate_annexe(12, 1, DEFAULT_CAP).is_err());
    }
}
