//! Defining formulas: conjunctions of trace literals whose set of inputs lies
//! inside one preimage.
//!
//! Two readings of a conjunction are offered. Under satisfaction semantics a
//! literal denotes the inputs on which it is true. Under occurrence semantics
//! it denotes the inputs whose trace contains it, which carries the control
//! context that led the algorithm to evaluate it.
//!
//! Either set shrinks as literals are added, so if some proper subconjunction
//! is a defining formula, so is every conjunction between it and the full one,
//! in particular one obtained by dropping a single literal. Minimality is
//! therefore decided by single drops.

use crate::domain::{Domain, EventIndex, InputSet};
use crate::prog::{InputInstance, Program};
use crate::symimg::TraceLiteral;

/// Inputs satisfying every literal of the conjunction.
pub fn formula_set(dom: &Domain, literals: &[&TraceLiteral]) -> InputSet {
    dom.collect_set(|inp| literals.iter().all(|l| l.satisfied_by(inp)))
}

/// Inputs whose traces contain every literal; literals absent from the index
/// occur nowhere.
pub fn occurrence_set(
    dom: &Domain,
    index: &EventIndex,
    program: &Program,
    literals: &[&TraceLiteral],
) -> InputSet {
    let mut s = dom.full_set();
    for l in literals {
        match index.get(&l.key(program)) {
            Some(c) => s.intersect_with(&c.occurrence),
            None => return dom.empty_set(),
        }
    }
    s
}

/// Whether `set` lies inside the preimage of `value`.
pub fn is_defining(dom: &Domain, set: &InputSet, value: i64) -> bool {
    set.is_subset(&dom.preimage_of_value(value))
}

fn value_of(dom: &Domain, x: &InputInstance) -> i64 {
    let idx = dom.index_of(x).expect("input belongs to the domain");
    dom.output_of(idx)
}

fn minimal(literals: &[TraceLiteral], defining: impl Fn(&[&TraceLiteral]) -> bool) -> bool {
    let all: Vec<&TraceLiteral> = literals.iter().collect();
    if !defining(&all) {
        return false;
    }
    (0..all.len()).all(|skip| {
        let rest: Vec<&TraceLiteral> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, l)| *l)
            .collect();
        !defining(&rest)
    })
}

/// DF under satisfaction semantics: the conjunction forces `F(x)`.
pub fn df_check(dom: &Domain, literals: &[TraceLiteral], x: &InputInstance) -> bool {
    let v = value_of(dom, x);
    let refs: Vec<&TraceLiteral> = literals.iter().collect();
    is_defining(dom, &formula_set(dom, &refs), v)
}

/// MDF under satisfaction semantics.
pub fn mdf_check(dom: &Domain, literals: &[TraceLiteral], x: &InputInstance) -> bool {
    let v = value_of(dom, x);
    minimal(literals, |ls| is_defining(dom, &formula_set(dom, ls), v))
}

/// DF under occurrence semantics.
pub fn df_check_occurrence(
    dom: &Domain,
    index: &EventIndex,
    program: &Program,
    literals: &[TraceLiteral],
    x: &InputInstance,
) -> bool {
    let v = value_of(dom, x);
    let refs: Vec<&TraceLiteral> = literals.iter().collect();
    is_defining(dom, &occurrence_set(dom, index, program, &refs), v)
}

/// MDF under occurrence semantics.
pub fn mdf_check_occurrence(
    dom: &Domain,
    index: &EventIndex,
    program: &Program,
    literals: &[TraceLiteral],
    x: &InputInstance,
) -> bool {
    let v = value_of(dom, x);
    minimal(literals, |ls| {
        is_defining(dom, &occurrence_set(dom, index, program, ls), v)
    })
}
