use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{Domain, InputSet, CHUNK};
use crate::error::{Error, Result};
use crate::prog::{default_budget, run, Program};
use crate::symimg::{Replay, TraceLiteral, TrivialityMemo};

/// Which literals enter the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiteralFilter {
    /// Non-constant literals.
    Weeded,
    /// Weeded literals that are not true on the whole domain.
    Essential,
}

impl LiteralFilter {
    pub fn name(self) -> &'static str {
        match self {
            LiteralFilter::Weeded => "weeded",
            LiteralFilter::Essential => "essential",
        }
    }

    pub fn parse(s: &str) -> Option<LiteralFilter> {
        match s {
            "weeded" => Some(LiteralFilter::Weeded),
            "essential" => Some(LiteralFilter::Essential),
            _ => None,
        }
    }
}

/// All events similar to one literal, across every trace of the domain.
#[derive(Clone, Debug)]
pub struct EventClass {
    pub key: String,
    /// The literal as it first occurred in enumeration order.
    pub literal: TraceLiteral,
    /// Inputs whose trace contains the literal.
    pub occurrence: InputSet,
    /// Earliest and latest instant at which the literal occurs in any trace.
    pub first_time: u32,
    pub last_time: u32,
    /// Number of events with this literal, counting repeats within a trace.
    pub occurrences: u64,
}

#[derive(Clone, Debug)]
pub struct EventIndex {
    filter: LiteralFilter,
    classes: BTreeMap<String, EventClass>,
    init_time: u32,
    max_time: u32,
    total: u64,
}

impl EventIndex {
    pub fn filter(&self) -> LiteralFilter {
        self.filter
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Classes in key order.
    pub fn classes(&self) -> impl Iterator<Item = &EventClass> {
        self.classes.values()
    }

    pub fn get(&self, key: &str) -> Option<&EventClass> {
        self.classes.get(key)
    }

    /// Length of the shortest run of updates that starts every trace.
    pub fn init_time(&self) -> u32 {
        self.init_time
    }

    /// Length of the longest trace.
    pub fn max_time(&self) -> u32 {
        self.max_time
    }

    /// Number of filtered literal events over all traces.
    pub fn total_occurrences(&self) -> u64 {
        self.total
    }
}

struct Partial {
    literal: TraceLiteral,
    members: Vec<u32>,
    first: u32,
    last: u32,
    count: u64,
}

struct Chunk {
    classes: HashMap<String, Partial>,
    init_time: u32,
    max_time: u32,
}

fn scan_chunk(
    program: &Program,
    dom: &Domain,
    start: usize,
    end: usize,
    budget: u64,
) -> Result<Chunk> {
    let mut out = Chunk {
        classes: HashMap::new(),
        init_time: u32::MAX,
        max_time: 0,
    };
    let mut key = String::new();
    let mut err = None;
    dom.for_each_in(start, end, |idx, input| {
        if err.is_some() {
            return;
        }
        let res = (|| {
            let trace = run(program, input, budget)?;
            let lead = trace.events.iter().take_while(|e| e.is_update()).count() as u32;
            out.init_time = out.init_time.min(lead);
            out.max_time = out.max_time.max(trace.len() as u32);
            let mut replay = Replay::new(program, input);
            for ev in &trace.events {
                let lit = replay.step(ev)?;
                if lit.is_constant() {
                    continue;
                }
                key.clear();
                lit.write_key(program, &mut key);
                match out.classes.get_mut(key.as_str()) {
                    Some(p) => {
                        if p.members.last() != Some(&(idx as u32)) {
                            p.members.push(idx as u32);
                        }
                        p.first = p.first.min(ev.time);
                        p.last = p.last.max(ev.time);
                        p.count += 1;
                    }
                    None => {
                        out.classes.insert(
                            key.clone(),
                            Partial {
                                literal: lit,
                                members: vec![idx as u32],
                                first: ev.time,
                                last: ev.time,
                                count: 1,
                            },
                        );
                    }
                }
            }
            Ok(())
        })();
        if let Err(source) = res {
            err = Some(Error::Run {
                input: input.render(input.alphabet == 2),
                source,
            });
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Runs `program` on every input of `dom` and groups the filtered literals
/// of all traces by key, with the default step budget.
pub fn build_event_index(
    program: &Program,
    dom: &Domain,
    filter: LiteralFilter,
) -> Result<EventIndex> {
    build_event_index_with(program, dom, filter, default_budget(dom.n()))
}

pub fn build_event_index_with(
    program: &Program,
    dom: &Domain,
    filter: LiteralFilter,
    budget: u64,
) -> Result<EventIndex> {
    let size = dom.len();
    let mut classes: BTreeMap<String, EventClass> = BTreeMap::new();
    let mut init_time = u32::MAX;
    let mut max_time = 0;
    // Bounded batches keep the per-chunk member lists from piling up.
    let batch = CHUNK * rayon::current_num_threads().max(1) * 4;
    let mut start = 0;
    while start < size {
        let end = (start + batch).min(size);
        let chunks: Vec<Chunk> = (start..end)
            .step_by(CHUNK)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|s| scan_chunk(program, dom, s, (s + CHUNK).min(end), budget))
            .collect::<Result<_>>()?;
        for chunk in chunks {
            init_time = init_time.min(chunk.init_time);
            max_time = max_time.max(chunk.max_time);
            for (key, p) in chunk.classes {
                let class = classes.entry(key).or_insert_with_key(|k| EventClass {
                    key: k.clone(),
                    literal: p.literal.clone(),
                    occurrence: InputSet::empty(size),
                    first_time: p.first,
                    last_time: p.last,
                    occurrences: 0,
                });
                // Chunks arrive in input order, so the first chunk to
                // create a class holds the earliest representative.
                for &m in &p.members {
                    class.occurrence.insert(m as usize);
                }
                class.first_time = class.first_time.min(p.first);
                class.last_time = class.last_time.max(p.last);
                class.occurrences += p.count;
            }
        }
        start = end;
    }

    if filter == LiteralFilter::Essential {
        let memo = TrivialityMemo::new();
        let trivial: Vec<String> = classes
            .par_iter()
            .filter(|(k, c)| memo.is_trivial(k, &c.literal, dom))
            .map(|(k, _)| k.clone())
            .collect();
        for k in trivial {
            classes.remove(&k);
        }
    }
    let total = classes.values().map(|c| c.occurrences).sum();
    Ok(EventIndex {
        filter,
        classes,
        init_time: if init_time == u32::MAX { 0 } else { init_time },
        max_time,
        total,
    })
}
