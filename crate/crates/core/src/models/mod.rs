//! The builtin functions and algorithms: sum over F₂ (`xor`) and the maximal
//! prefix-suffix with its quadratic (`maxps-a0`) and linear (`maxps-a1`)
//! algorithms, plus the named input sets used to analyse `maxps-a0`.

use std::fmt;
use std::sync::OnceLock;

use crate::domain::{Domain, EventIndex, InputSet};
use crate::error::{Error, Result};
use crate::prog::{parse_program, InputInstance, Program};

const XOR_SRC: &str = include_str!("xor.alg");
const MAXPS_A0_SRC: &str = include_str!("maxps_a0.alg");
const MAXPS_A1_SRC: &str = include_str!("maxps_a1.alg");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    Xor,
    MaxPsA0,
    MaxPsA1,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::Xor, ModelId::MaxPsA0, ModelId::MaxPsA1];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::Xor => "xor",
            ModelId::MaxPsA0 => "maxps-a0",
            ModelId::MaxPsA1 => "maxps-a1",
        }
    }

    pub fn parse(s: &str) -> Option<ModelId> {
        match s {
            "xor" => Some(ModelId::Xor),
            "maxps-a0" | "maxps" => Some(ModelId::MaxPsA0),
            "maxps-a1" => Some(ModelId::MaxPsA1),
            _ => None,
        }
    }

    pub fn is_maxps(self) -> bool {
        self != ModelId::Xor
    }

    /// The function the model's algorithm computes.
    pub fn oracle(self, word: &[u8]) -> i64 {
        match self {
            ModelId::Xor => parity(word),
            _ => maxps_oracle(word),
        }
    }

    pub fn program(self) -> &'static Program {
        builtin_program(self)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sum of the bits modulo 2, for any length.
pub fn parity(x: &[u8]) -> i64 {
    x.iter().fold(0, |acc, &b| acc ^ (b as i64 & 1))
}

/// The XOR model's function, defined on words of even length.
pub fn sigma_oracle(x: &[u8]) -> Result<i64> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sum over F2 is taken on words of even length, got {}",
            x.len()
        )));
    }
    Ok(parity(x))
}

/// Length of the longest proper prefix of `w` that is also a suffix.
pub fn maxps_oracle(w: &[u8]) -> i64 {
    let n = w.len();
    (0..n).rev().find(|&k| w[..k] == w[n - k..]).unwrap_or(0) as i64
}

pub fn builtin_program(id: ModelId) -> &'static Program {
    static CELLS: [OnceLock<Program>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let (cell, src) = match id {
        ModelId::Xor => (&CELLS[0], XOR_SRC),
        ModelId::MaxPsA0 => (&CELLS[1], MAXPS_A0_SRC),
        ModelId::MaxPsA1 => (&CELLS[2], MAXPS_A1_SRC),
    };
    cell.get_or_init(|| parse_program(src).expect("builtin program parses"))
}

/// Source text of a builtin program.
pub fn builtin_source(id: ModelId) -> &'static str {
    match id {
        ModelId::Xor => XOR_SRC,
        ModelId::MaxPsA0 => MAXPS_A0_SRC,
        ModelId::MaxPsA1 => MAXPS_A1_SRC,
    }
}

/// Key of the literal `ξ_{k,i}` of the quadratic algorithm on words of size
/// `n`: `w(i) = w(i + n - k)` for `i < k`, and `w(k) ≠ w(n)` for `i = k`.
pub fn xi_key(n: usize, k: usize, i: usize) -> String {
    assert!(1 <= i && i <= k && k < n, "xi index out of range");
    if i < k {
        format!("G(eq,w({i}),w({}))", i + n - k)
    } else {
        format!("G(ne,w({k}),w({n}))")
    }
}

/// The word `a…ab` of size `n`.
pub fn a_pow_b(n: usize, alphabet: u32) -> InputInstance {
    let mut word = vec![0u8; n];
    if let Some(last) = word.last_mut() {
        *last = 1;
    }
    InputInstance::new(alphabet, word)
}

/// Whether `w` is `abab…ab a c` with `a ≠ b` (even sizes only).
fn alternating_then(w: &[u8]) -> Option<(u8, u8, u8)> {
    let n = w.len();
    if n < 4 || !n.is_multiple_of(2) {
        return None;
    }
    let (a, b) = (w[0], w[1]);
    if a == b {
        return None;
    }
    let body_ok = w[..n - 1]
        .iter()
        .enumerate()
        .all(|(i, &c)| c == if i % 2 == 0 { a } else { b });
    body_ok.then_some((a, b, w[n - 1]))
}

/// Input sets of the quadratic maxPS analysis.
#[derive(Clone, Debug)]
pub struct NamedSets {
    /// Inputs whose trace contains `w(1) = w(3)`.
    pub g: InputSet,
    /// Inputs with `w(1) = w(3)`.
    pub g_sat: InputSet,
    /// Inputs whose trace contains `w(n-2) ≠ w(n)`.
    pub h: InputSet,
    /// `abab…abac` with `c ∉ {a, b}`; empty for odd `n`.
    pub w0: InputSet,
    /// `abab…abaa`; empty for odd `n`.
    pub w1: InputSet,
}

/// Builds the named sets from the quadratic algorithm's event index over
/// `dom` (any filter keeps the character comparisons).
pub fn named_sets(dom: &Domain, a0_index: &EventIndex) -> Result<NamedSets> {
    if !dom.label().starts_with("maxps") {
        return Err(Error::InvalidArgument(format!(
            "named sets are defined for maxps, not {}",
            dom.label()
        )));
    }
    let n = dom.n();
    if n < 4 {
        return Err(Error::InvalidArgument("named sets need n >= 4".into()));
    }
    let occ = |key: &str| {
        a0_index
            .get(key)
            .map(|c| c.occurrence.clone())
            .unwrap_or_else(|| dom.empty_set())
    };
    Ok(NamedSets {
        g: occ(&xi_key(n, n - 2, 1)),
        g_sat: dom.collect_set(|w| w.word[0] == w.word[2]),
        h: occ(&xi_key(n, n - 2, n - 2)),
        w0: dom.collect_set(
            |w| matches!(alternating_then(&w.word), Some((a, b, c)) if c != a && c != b),
        ),
        w1: dom.collect_set(|w| matches!(alternating_then(&w.word), Some((a, _, c)) if c == a)),
    })
}
