//! Enumerated input domains, the maximal-uncertainty measure, ordered
//! partitions and event occurrence sets.
//!
//! Inputs of size `n` over an alphabet of size `α` are indexed by their
//! rank in lexicographic order, so index `i` is `i` written in base `α`
//! with `n` digits. The range of the function is sorted ascending and the
//! `k`-th preimage (0-based) collects the inputs mapped to `range()[k]`.

mod index;
mod set;

use std::env;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::ModelId;
use crate::prog::InputInstance;

pub use index::{build_event_index, build_event_index_with, EventClass, EventIndex, LiteralFilter};
pub use set::InputSet;

/// Enumeration cap used when neither the caller nor `ENTROPIC_CAP` sets one.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// Inputs per parallel work unit.
pub(crate) const CHUNK: usize = 1 << 14;

/// The cap from `ENTROPIC_CAP`, else [`DEFAULT_CAP`].
pub fn configured_cap() -> u64 {
    env::var("ENTROPIC_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Number of inputs of size `n` over `alphabet`, refusing domains above `cap`.
pub fn domain_size(n: usize, alphabet: u32, cap: u64) -> Result<usize> {
    let size = (alphabet as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    Ok(size as usize)
}

/// Writes the word of rank `idx` into `word` (most significant digit first).
pub fn word_at(idx: usize, alphabet: u32, word: &mut [u8]) {
    let mut r = idx;
    for c in word.iter_mut().rev() {
        *c = (r % alphabet as usize) as u8;
        r /= alphabet as usize;
    }
}

/// Rank of `word` in lexicographic order.
pub fn index_of(word: &[u8], alphabet: u32) -> usize {
    word.iter()
        .fold(0usize, |acc, &c| acc * alphabet as usize + c as usize)
}

/// Advances `word` to its lexicographic successor, wrapping at the end.
pub(crate) fn next_word(word: &mut [u8], alphabet: u32) {
    for c in word.iter_mut().rev() {
        if (*c as u32) + 1 < alphabet {
            *c += 1;
            return;
        }
        *c = 0;
    }
}

/// All inputs of one size with the function's value on each.
#[derive(Clone, Debug)]
pub struct Domain {
    label: String,
    n: usize,
    alphabet: u32,
    /// Preimage index of each input.
    classes: Vec<u32>,
    range: Vec<i64>,
    preimages: Vec<InputSet>,
}

/// Builds the domain of `model` for inputs of size `n`.
///
/// The XOR model is defined on bit words and requires `alphabet == 2`.
pub fn build_domain(model: ModelId, n: usize, alphabet: u32, cap: u64) -> Result<Domain> {
    if model == ModelId::Xor && alphabet != 2 {
        return Err(Error::InvalidArgument(format!(
            "the xor model takes bit words; alphabet {alphabet} given"
        )));
    }
    Domain::from_oracle(model.name(), n, alphabet, cap, |w| model.oracle(w))
}

impl Domain {
    /// Enumerates every word of size `n` and applies `oracle` to it.
    pub fn from_oracle<F>(
        label: &str,
        n: usize,
        alphabet: u32,
        cap: u64,
        oracle: F,
    ) -> Result<Domain>
    where
        F: Fn(&[u8]) -> i64 + Sync,
    {
        if alphabet < 2 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be at least 2, got {alphabet}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("input size must be positive".into()));
        }
        let size = domain_size(n, alphabet, cap)?;
        let mut values = vec![0i64; size];
        values
            .par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, out)| {
                let mut word = vec![0u8; n];
                word_at(c * CHUNK, alphabet, &mut word);
                for v in out.iter_mut() {
                    *v = oracle(&word);
                    next_word(&mut word, alphabet);
                }
            });
        let mut range = values.clone();
        range.par_sort_unstable();
        range.dedup();
        let classes: Vec<u32> = values
            .par_iter()
            .map(|v| range.binary_search(v).expect("value in range") as u32)
            .collect();
        let mut preimages = vec![InputSet::empty(size); range.len()];
        for (i, &k) in classes.iter().enumerate() {
            preimages[k as usize].insert(i);
        }
        Ok(Domain {
            label: label.to_string(),
            n,
            alphabet,
            classes,
            range,
            preimages,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// Number of inputs, `α^n`.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Output values in ascending order.
    pub fn range(&self) -> &[i64] {
        &self.range
    }

    /// Number of distinct outputs.
    pub fn m(&self) -> usize {
        self.range.len()
    }

    /// Preimage index of input `idx`.
    pub fn class_of(&self, idx: usize) -> usize {
        self.classes[idx] as usize
    }

    pub fn output_of(&self, idx: usize) -> i64 {
        self.range[self.class_of(idx)]
    }

    /// Preimage index of an output value.
    pub fn class_of_value(&self, value: i64) -> Option<usize> {
        self.range.binary_search(&value).ok()
    }

    /// The `k`-th preimage.
    pub fn preimage(&self, k: usize) -> &InputSet {
        &self.preimages[k]
    }

    pub fn preimages(&self) -> &[InputSet] {
        &self.preimages
    }

    /// Preimage of an output value; empty if the value is not attained.
    pub fn preimage_of_value(&self, value: i64) -> InputSet {
        self.class_of_value(value)
            .map(|k| self.preimages[k].clone())
            .unwrap_or_else(|| self.empty_set())
    }

    pub fn preimage_sizes(&self) -> Vec<usize> {
        self.preimages.iter().map(InputSet::count).collect()
    }

    pub fn input(&self, idx: usize) -> InputInstance {
        let mut word = vec![0u8; self.n];
        word_at(idx, self.alphabet, &mut word);
        InputInstance::new(self.alphabet, word)
    }

    pub fn index_of(&self, input: &InputInstance) -> Option<usize> {
        (input.n() == self.n && input.word.iter().all(|&c| (c as u32) < self.alphabet))
            .then(|| index_of(&input.word, self.alphabet))
    }

    pub fn empty_set(&self) -> InputSet {
        InputSet::empty(self.len())
    }

    pub fn full_set(&self) -> InputSet {
        InputSet::full(self.len())
    }

    /// Calls `f(idx, input)` for every input with index in `start..end`.
    pub fn for_each_in(&self, start: usize, end: usize, mut f: impl FnMut(usize, &InputInstance)) {
        if start >= end {
            return;
        }
        let mut input = self.input(start);
        for idx in start..end {
            f(idx, &input);
            next_word(&mut input.word, self.alphabet);
        }
    }

    /// Whether `pred` holds on every input; stops at the first failure.
    pub fn all_inputs(&self, pred: impl Fn(&InputInstance) -> bool) -> bool {
        let mut input = self.input(0);
        for _ in 0..self.len() {
            if !pred(&input) {
                return false;
            }
            next_word(&mut input.word, self.alphabet);
        }
        true
    }

    /// The set of inputs satisfying `pred`.
    pub fn collect_set(&self, pred: impl Fn(&InputInstance) -> bool + Sync) -> InputSet {
        let hits: Vec<Vec<usize>> = (0..self.len().div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut v = Vec::new();
                let end = ((c + 1) * CHUNK).min(self.len());
                self.for_each_in(c * CHUNK, end, |i, inp| {
                    if pred(inp) {
                        v.push(i)
                    }
                });
                v
            })
            .collect();
        InputSet::from_indices(self.len(), hits.into_iter().flatten())
    }

    /// `|S ∩ F̂_k|` for every preimage.
    pub fn counts(&self, s: &InputSet) -> Vec<usize> {
        self.preimages
            .iter()
            .map(|p| p.intersection_count(s))
            .collect()
    }

    /// Mass of one input of preimage `k`: `1 / (M·|F̂_k|)`.
    pub fn point_mass(&self, k: usize) -> BigRational {
        self.fraction(1, k)
    }

    fn fraction(&self, count: usize, k: usize) -> BigRational {
        if count == 0 {
            return BigRational::zero();
        }
        let den = BigInt::from(self.m()) * BigInt::from(self.preimages[k].count());
        BigRational::new(BigInt::from(count), den)
    }

    /// `Pr(S ∩ F̂_k)` for every preimage, exactly.
    pub fn class_measures(&self, s: &InputSet) -> Vec<BigRational> {
        self.counts(s)
            .into_iter()
            .enumerate()
            .map(|(k, c)| self.fraction(c, k))
            .collect()
    }

    /// Maximal-uncertainty measure of `S`, exactly.
    pub fn measure(&self, s: &InputSet) -> BigRational {
        self.class_measures(s)
            .into_iter()
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// `π(S) = (S ∩ F̂_1, …, S ∩ F̂_M)`.
    pub fn partition_of(&self, s: &InputSet) -> OrderedPartition {
        OrderedPartition {
            slots: self.preimages.iter().map(|p| p.intersection(s)).collect(),
        }
    }

    /// The partition of the whole domain into preimages.
    pub fn graph_partition(&self) -> OrderedPartition {
        OrderedPartition {
            slots: self.preimages.clone(),
        }
    }

    /// `Π_k`: only slot `k` is nonempty and it holds `F̂_k`.
    pub fn graph_component(&self, k: usize) -> OrderedPartition {
        self.partition_of(&self.preimages[k])
    }

    /// `d(p, q) = Σ_i Pr(p_i Δ q_i)`.
    pub fn partition_distance(&self, p: &OrderedPartition, q: &OrderedPartition) -> BigRational {
        assert_eq!(
            p.slots.len(),
            q.slots.len(),
            "partitions of different domains"
        );
        p.slots
            .iter()
            .zip(&q.slots)
            .fold(BigRational::zero(), |acc, (a, b)| {
                acc + self.measure(&a.symmetric_difference(b))
            })
    }
}

/// `M` slots of input sets, indexed like the domain's preimages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPartition {
    pub slots: Vec<InputSet>,
}

impl OrderedPartition {
    /// Union of all slots.
    pub fn support(&self, universe: usize) -> InputSet {
        let mut s = InputSet::empty(universe);
        for slot in &self.slots {
            s.union_with(slot);
        }
        s
    }
}
