use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::entropic_weight;
use crate::domain::{Domain, EventIndex};
use crate::error::{Error, Result};
use crate::prog::{default_budget, run, InputInstance, Program};
use crate::symimg::Replay;

/// `D(Ê)` of every class of an index, by key.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClassWeights(pub BTreeMap<String, f64>);

impl ClassWeights {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }
}

pub fn class_weights(dom: &Domain, index: &EventIndex) -> ClassWeights {
    let classes: Vec<_> = index.classes().collect();
    ClassWeights(
        classes
            .par_iter()
            .map(|c| (c.key.clone(), entropic_weight(dom, &c.occurrence)))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub t: u32,
    pub literal_key: String,
    #[serde(rename = "D")]
    pub d: f64,
}

/// Entropic weights along one trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceProfile {
    pub input: String,
    pub points: Vec<ProfilePoint>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(rows: impl Iterator<Item = (u32, String, f64)>) -> String {
    let mut out = String::from("t,literal_key,D\n");
    for (t, key, d) in rows {
        let _ = writeln!(out, "{t},{},{d}", csv_field(&key));
    }
    out
}

impl ConvergenceProfile {
    pub fn to_csv(&self) -> String {
        csv(self
            .points
            .iter()
            .map(|p| (p.t, p.literal_key.clone(), p.d)))
    }

    /// The point at instant `t`.
    pub fn at(&self, t: u32) -> Option<&ProfilePoint> {
        self.points.iter().find(|p| p.t == t)
    }

    pub fn find(&self, key: &str) -> Option<&ProfilePoint> {
        self.points.iter().find(|p| p.literal_key == key)
    }
}

/// For every event of `x`'s trace whose literal has a class in `index`, the
/// pair (instant, weight of the class).
pub fn trace_profile(
    program: &Program,
    dom: &Domain,
    index: &EventIndex,
    weights: &ClassWeights,
    x: &InputInstance,
) -> Result<ConvergenceProfile> {
    let run_err = |source| Error::Run {
        input: x.render(x.alphabet == 2),
        source,
    };
    let trace = run(program, x, default_budget(dom.n())).map_err(run_err)?;
    let mut replay = Replay::new(program, x);
    let mut points = Vec::new();
    for ev in &trace.events {
        let lit = replay.step(ev).map_err(run_err)?;
        if lit.is_constant() {
            continue;
        }
        let key = lit.key(program);
        if index.get(&key).is_some() {
            let d = weights
                .get(&key)
                .unwrap_or_else(|| entropic_weight(dom, &index.get(&key).unwrap().occurrence));
            points.push(ProfilePoint {
                t: ev.time,
                literal_key: key,
                d,
            });
        }
    }
    Ok(ConvergenceProfile {
        input: x.render(x.alphabet == 2),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumePoint {
    pub t: u32,
    /// `DΓ(t)`.
    pub volume: f64,
    /// Number of classes occurring at `t` or later, the initialization class
    /// excluded.
    pub classes: usize,
}

/// `DΓ(t)`: total weight of the classes that occur at instant `t` or later in
/// some trace, plus `log₂M` for the initialization while `t ≤ init_time`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedVolumeProfile {
    pub init_time: u32,
    pub init_weight: f64,
    pub points: Vec<VolumePoint>,
}

impl WeightedVolumeProfile {
    pub fn at(&self, t: u32) -> Option<f64> {
        self.points.iter().find(|p| p.t == t).map(|p| p.volume)
    }

    pub fn to_csv(&self) -> String {
        csv(self
            .points
            .iter()
            .map(|p| (p.t, "DGamma".to_string(), p.volume)))
    }
}

pub fn weighted_volume_profile(
    dom: &Domain,
    index: &EventIndex,
    weights: &ClassWeights,
) -> WeightedVolumeProfile {
    let init_weight = (dom.m() as f64).log2();
    // Weights grouped by last instant, summed from the latest down so every
    // DΓ(t) adds the same terms in the same order.
    let mut by_last: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for c in index.classes() {
        let d = weights
            .get(&c.key)
            .unwrap_or_else(|| entropic_weight(dom, &c.occurrence));
        let e = by_last.entry(c.last_time).or_default();
        e.0 += d;
        e.1 += 1;
    }
    let end = index.max_time() + 1;
    let mut points = Vec::with_capacity(end as usize);
    let mut acc = 0.0;
    let mut count = 0;
    for t in (1..=end).rev() {
        if let Some((d, c)) = by_last.get(&t) {
            acc += d;
            count += c;
        }
        let init = if t <= index.init_time() {
            init_weight
        } else {
            0.0
        };
        points.push(VolumePoint {
            t,
            volume: acc + init,
            classes: count,
        });
    }
    points.reverse();
    WeightedVolumeProfile {
        init_time: index.init_time(),
        init_weight,
        points,
    }
}
