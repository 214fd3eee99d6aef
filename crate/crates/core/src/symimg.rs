//! Input images of terms, trace literals, and weeded traces.
//!
//! The input image of a term at instant `t` replaces every internal function
//! application by the image of the term last assigned to that location, so
//! images are built from constants, inputs and arithmetic only. [`SymTerm`]
//! has no variant for internal applications, which makes that property hold
//! by construction.
//!
//! The size parameter `n` is a constant of the domain and is folded to its
//! value. Constant subterms are folded and additive identities dropped;
//! nothing else is normalized, so `x(1)+x(2)` and `x(2)+x(1)` stay distinct.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use crate::domain::Domain;
use crate::error::{Error, Result, RunError};
use crate::prog::interp::{read_external, Store};
use crate::prog::{
    ArithOp, Event, EventKind, FuncId, InputInstance, InstrBody, Program, Relation, Sort, Term,
    Trace,
};

/// A term over inputs and constants only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymTerm {
    Const(i64),
    /// The input word applied to an argument image.
    Input(FuncId, Arc<SymTerm>),
    Op(ArithOp, Sort, Arc<SymTerm>, Arc<SymTerm>),
}

impl SymTerm {
    /// Builds `a op b` with constant folding and `0 + e = e + 0 = e - 0 = e`.
    pub fn op(op: ArithOp, sort: Sort, a: SymTerm, b: SymTerm) -> SymTerm {
        match (&a, &b) {
            (SymTerm::Const(x), SymTerm::Const(y)) => SymTerm::Const(op.apply(sort, *x, *y)),
            (SymTerm::Const(0), _) if op == ArithOp::Add => b,
            (_, SymTerm::Const(0)) => a,
            _ => SymTerm::Op(op, sort, Arc::new(a), Arc::new(b)),
        }
    }

    /// Whether an input application occurs anywhere in the term.
    pub fn has_input(&self) -> bool {
        match self {
            SymTerm::Const(_) => false,
            SymTerm::Input(..) => true,
            SymTerm::Op(_, _, a, b) => a.has_input() || b.has_input(),
        }
    }

    /// Value under `input`; `None` if an input is read out of range.
    pub fn eval(&self, input: &InputInstance) -> Option<i64> {
        match self {
            SymTerm::Const(v) => Some(*v),
            SymTerm::Input(_, arg) => {
                let i = arg.eval(input)?;
                if i < 1 || i as usize > input.n() {
                    None
                } else {
                    Some(input.word[i as usize - 1] as i64)
                }
            }
            SymTerm::Op(op, sort, a, b) => Some(op.apply(*sort, a.eval(input)?, b.eval(input)?)),
        }
    }

    /// Replaces every input leaf by its value under `input`, keeping the
    /// arithmetic structure unfolded.
    pub fn value_image(&self, input: &InputInstance) -> Option<ValueImage> {
        fn go(t: &SymTerm, input: &InputInstance) -> Option<SymTerm> {
            Some(match t {
                SymTerm::Const(v) => SymTerm::Const(*v),
                SymTerm::Input(..) => SymTerm::Const(t.eval(input)?),
                SymTerm::Op(op, sort, a, b) => {
                    SymTerm::Op(*op, *sort, Arc::new(go(a, input)?), Arc::new(go(b, input)?))
                }
            })
        }
        go(self, input).map(ValueImage)
    }

    /// Prefix serialization: `add(x(1),x(2))`, `w(3)`, `7`.
    pub fn write_key(&self, program: &Program, out: &mut String) {
        match self {
            SymTerm::Const(v) => {
                let _ = write!(out, "{v}");
            }
            SymTerm::Input(f, arg) => {
                out.push_str(program.name(*f));
                out.push('(');
                arg.write_key(program, out);
                out.push(')');
            }
            SymTerm::Op(op, _, a, b) => {
                out.push_str(op.name());
                out.push('(');
                a.write_key(program, out);
                out.push(',');
                b.write_key(program, out);
                out.push(')');
            }
        }
    }

    /// Infix rendering for reports: `x(1)+x(2)`.
    pub fn render(&self, program: &Program) -> String {
        match self {
            SymTerm::Const(v) => v.to_string(),
            SymTerm::Input(f, arg) => format!("{}({})", program.name(*f), arg.render(program)),
            SymTerm::Op(op, _, a, b) => {
                let rb = b.render(program);
                let rb = if matches!(**b, SymTerm::Op(..)) {
                    format!("({rb})")
                } else {
                    rb
                };
                format!("{}{}{}", a.render(program), op.symbol(), rb)
            }
        }
    }
}

/// A [`SymTerm`] whose input leaves were replaced by their values, with the
/// structure of the source image preserved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueImage(pub SymTerm);

/// The literal contributed by one event.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TraceLiteral {
    /// `image = value image` for an update of a non-output function.
    Update { lhs: SymTerm, rhs: ValueImage },
    /// The output update, folded to its value. `image` is the input image
    /// of the assigned term, used when the literal is read as a formula.
    Output {
        func: FuncId,
        value: i64,
        image: SymTerm,
    },
    /// A taken guard over input images.
    Guard {
        relation: Relation,
        lhs: SymTerm,
        rhs: SymTerm,
    },
}

impl TraceLiteral {
    /// Canonical key; two events are similar iff their keys are equal.
    pub fn key(&self, program: &Program) -> String {
        let mut s = String::new();
        self.write_key(program, &mut s);
        s
    }

    pub fn write_key(&self, program: &Program, out: &mut String) {
        match self {
            TraceLiteral::Update { lhs, rhs } => {
                out.push_str("U(");
                lhs.write_key(program, out);
                out.push(',');
                rhs.0.write_key(program, out);
                out.push(')');
            }
            TraceLiteral::Output { func, value, .. } => {
                let _ = write!(out, "O({},{value})", program.name(*func));
            }
            TraceLiteral::Guard { relation, lhs, rhs } => {
                out.push_str("G(");
                out.push_str(relation.tag());
                out.push(',');
                lhs.write_key(program, out);
                out.push(',');
                rhs.write_key(program, out);
                out.push(')');
            }
        }
    }

    pub fn is_output(&self) -> bool {
        matches!(self, TraceLiteral::Output { .. })
    }

    /// A literal mentioning no input. Output literals are never constant.
    pub fn is_constant(&self) -> bool {
        match self {
            TraceLiteral::Update { lhs, .. } => !lhs.has_input(),
            TraceLiteral::Output { .. } => false,
            TraceLiteral::Guard { lhs, rhs, .. } => !lhs.has_input() && !rhs.has_input(),
        }
    }

    /// Truth of the literal read as a formula about `input`.
    ///
    /// An update literal is matched structurally against its value image, so
    /// `x(1)+x(2) = 1+0` holds exactly for inputs with `x(1)=1` and
    /// `x(2)=0`. An output literal holds when the output's input image
    /// evaluates to the recorded value.
    pub fn satisfied_by(&self, input: &InputInstance) -> bool {
        fn matches(l: &SymTerm, r: &SymTerm, input: &InputInstance) -> bool {
            match (l, r) {
                (SymTerm::Op(o1, _, a1, b1), SymTerm::Op(o2, _, a2, b2)) if o1 == o2 => {
                    matches(a1, a2, input) && matches(b1, b2, input)
                }
                _ => matches!((l.eval(input), r.eval(input)), (Some(a), Some(b)) if a == b),
            }
        }
        match self {
            TraceLiteral::Update { lhs, rhs } => matches(lhs, &rhs.0, input),
            TraceLiteral::Output { value, image, .. } => image.eval(input) == Some(*value),
            TraceLiteral::Guard { relation, lhs, rhs } => {
                match (lhs.eval(input), rhs.eval(input)) {
                    (Some(a), Some(b)) => relation.holds(a, b),
                    _ => false,
                }
            }
        }
    }

    /// Human-readable form, e.g. `w(1) = w(3)` or `x(1)+x(2) = [1+0]`.
    pub fn render(&self, program: &Program) -> String {
        match self {
            TraceLiteral::Update { lhs, rhs } => {
                format!("{} = [{}]", lhs.render(program), rhs.0.render(program))
            }
            TraceLiteral::Output { func, value, .. } => {
                format!("{} = {value}", program.name(*func))
            }
            TraceLiteral::Guard { relation, lhs, rhs } => format!(
                "{} {} {}",
                lhs.render(program),
                relation.symbol(),
                rhs.render(program)
            ),
        }
    }
}

/// Steps through a trace maintaining both concrete values and input images.
pub struct Replay<'a> {
    program: &'a Program,
    input: &'a InputInstance,
    values: Store<i64>,
    images: Store<SymTerm>,
    time: u32,
}

impl<'a> Replay<'a> {
    pub fn new(program: &'a Program, input: &'a InputInstance) -> Replay<'a> {
        Replay {
            program,
            input,
            values: Store::new(program),
            images: Store::new(program),
            time: 0,
        }
    }

    /// Number of events applied so far.
    pub fn time(&self) -> u32 {
        self.time
    }

    fn value(&self, term: &Term) -> Result<i64, RunError> {
        crate::prog::eval_term(self.program, term, &self.values, self.input, self.time + 1)
    }

    fn arg_value(&self, args: &[Term]) -> Result<Option<i64>, RunError> {
        args.first().map(|a| self.value(a)).transpose()
    }

    /// Input image of `term` after the events applied so far.
    pub fn image(&self, term: &Term) -> Result<SymTerm, RunError> {
        Ok(match term {
            Term::Const { value, .. } => SymTerm::Const(*value),
            Term::Input(id, args) => match args.first() {
                None => SymTerm::Const(read_external(
                    self.program,
                    *id,
                    None,
                    self.input,
                    self.time + 1,
                )?),
                Some(a) => SymTerm::Input(*id, Arc::new(self.image(a)?)),
            },
            Term::Internal(id, args) => {
                let arg = self.arg_value(args)?;
                self.images
                    .get(*id, arg)
                    .cloned()
                    .ok_or_else(|| RunError::Unassigned {
                        name: self.program.name(*id).to_string(),
                        time: self.time + 1,
                    })?
            }
            Term::Op { op, sort, lhs, rhs } => {
                SymTerm::op(*op, *sort, self.image(lhs)?, self.image(rhs)?)
            }
        })
    }

    /// Applies the next event and returns its literal.
    pub fn step(&mut self, event: &Event) -> Result<TraceLiteral, RunError> {
        let ins = self.program.instruction(event.instr as usize);
        let lit = match (&ins.body, &event.kind) {
            (InstrBody::Assign { target, rhs, .. }, EventKind::Update { arg, value }) => {
                let image = self.image(rhs)?;
                let lit = if *target == self.program.output() {
                    TraceLiteral::Output {
                        func: *target,
                        value: *value,
                        image: image.clone(),
                    }
                } else {
                    let rhs = image
                        .value_image(self.input)
                        .expect("the run evaluated this term in range");
                    TraceLiteral::Update {
                        lhs: image.clone(),
                        rhs,
                    }
                };
                self.values.set(*target, *arg, *value);
                self.images.set(*target, *arg, image);
                lit
            }
            (InstrBody::If { guard, .. }, EventKind::Guard { holds }) => {
                let relation = if *holds {
                    guard.relation
                } else {
                    guard.relation.negate()
                };
                TraceLiteral::Guard {
                    relation,
                    lhs: self.image(&guard.lhs)?,
                    rhs: self.image(&guard.rhs)?,
                }
            }
            _ => unreachable!("event kind matches its instruction"),
        };
        self.time += 1;
        Ok(lit)
    }
}

fn replay_to<'a>(program: &'a Program, trace: &'a Trace, t: u32) -> Result<Replay<'a>> {
    if t as usize > trace.len() {
        return Err(Error::InvalidArgument(format!(
            "instant {t} beyond trace length {}",
            trace.len()
        )));
    }
    let mut r = Replay::new(program, &trace.input);
    for e in &trace.events[..t as usize] {
        r.step(e).map_err(|source| run_error(trace, source))?;
    }
    Ok(r)
}

fn run_error(trace: &Trace, source: RunError) -> Error {
    Error::Run {
        input: trace.input.render(trace.input.alphabet == 2),
        source,
    }
}

/// Input image of `term` at instant `t` (after the event at `t`).
pub fn input_image(program: &Program, trace: &Trace, t: u32, term: &Term) -> Result<SymTerm> {
    replay_to(program, trace, t)?
        .image(term)
        .map_err(|e| run_error(trace, e))
}

/// Literal of the event at instant `t` (1-based).
pub fn trace_literal(program: &Program, trace: &Trace, t: u32) -> Result<TraceLiteral> {
    if t == 0 {
        return Err(Error::InvalidArgument("instants start at 1".into()));
    }
    let mut r = replay_to(program, trace, t - 1)?;
    let ev = trace
        .event(t)
        .ok_or_else(|| Error::InvalidArgument(format!("no event at instant {t}")))?;
    r.step(ev).map_err(|e| run_error(trace, e))
}

/// All literals of a trace, in order.
pub fn literals(program: &Program, trace: &Trace) -> Result<Vec<TraceLiteral>> {
    let mut r = Replay::new(program, &trace.input);
    trace
        .events
        .iter()
        .map(|e| r.step(e).map_err(|s| run_error(trace, s)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeededEntry {
    pub literal: TraceLiteral,
    /// Instant of the event this literal came from.
    pub time: u32,
}

/// The non-constant literals of a trace, in trace order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeededTrace {
    pub input: InputInstance,
    pub entries: Vec<WeededEntry>,
}

impl WeededTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `k`-th literal, 1-based.
    pub fn get(&self, k: usize) -> Option<&TraceLiteral> {
        k.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|e| &e.literal)
    }

    /// Instant of the first occurrence of a literal with this key. A literal
    /// may recur in one trace; later instants are in [`Self::times_of`].
    pub fn time_of(&self, program: &Program, key: &str) -> Option<u32> {
        self.times_of(program, key).into_iter().next()
    }

    pub fn times_of(&self, program: &Program, key: &str) -> Vec<u32> {
        self.entries
            .iter()
            .filter(|e| e.literal.key(program) == key)
            .map(|e| e.time)
            .collect()
    }

    /// Weeding applied again; a no-op on an already weeded trace.
    pub fn weed(&self) -> WeededTrace {
        WeededTrace {
            input: self.input.clone(),
            entries: self
                .entries
                .iter()
                .filter(|e| !e.literal.is_constant())
                .cloned()
                .collect(),
        }
    }
}

/// Drops every constant literal from the trace's literal sequence.
pub fn weed(program: &Program, trace: &Trace) -> Result<WeededTrace> {
    let lits = literals(program, trace)?;
    Ok(WeededTrace {
        input: trace.input.clone(),
        entries: lits
            .into_iter()
            .zip(&trace.events)
            .filter(|(l, _)| !l.is_constant())
            .map(|(literal, e)| WeededEntry {
                literal,
                time: e.time,
            })
            .collect(),
    })
}

/// Memo of "true for every input of the domain" verdicts, keyed by literal
/// key. Verdicts are deterministic, so concurrent writers cannot disagree.
#[derive(Debug, Default)]
pub struct TrivialityMemo {
    verdicts: RwLock<HashMap<String, bool>>,
}

impl TrivialityMemo {
    pub fn new() -> TrivialityMemo {
        TrivialityMemo::default()
    }

    /// Whether `literal` holds on every input of `dom`. Output literals are
    /// never considered trivial.
    pub fn is_trivial(&self, key: &str, literal: &TraceLiteral, dom: &Domain) -> bool {
        if literal.is_output() {
            return false;
        }
        if let Some(v) = self.verdicts.read().expect("memo lock").get(key) {
            return *v;
        }
        let verdict = dom.all_inputs(|inp| literal.satisfied_by(inp));
        self.verdicts
            .write()
            .expect("memo lock")
            .insert(key.to_string(), verdict);
        verdict
    }

    pub fn len(&self) -> usize {
        self.verdicts.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The weeded literals that are not true for every input of `dom`.
pub fn essential_events(
    program: &Program,
    weeded: &WeededTrace,
    dom: &Domain,
    memo: &TrivialityMemo,
) -> Vec<WeededEntry> {
    weeded
        .entries
        .iter()
        .filter(|e| !memo.is_trivial(&e.literal.key(program), &e.literal, dom))
        .cloned()
        .collect()
}
