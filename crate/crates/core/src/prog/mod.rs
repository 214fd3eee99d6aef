//! A small labelled imperative language whose runs are recorded as traces
//! of updates and taken guards.
//!
//! Programs work over a vocabulary of *external* functions (the input word
//! and the size parameter `n`) and *internal* functions (the algorithm's
//! state). Internal functions have no initial value: reading one before it
//! has been assigned is a run error. Every run ends with exactly one update of
//! the declared output function, immediately followed by `halt`.
//!
//! The textual form is one instruction per line:
//!
//! ```text
//! % comments start with a percent sign
//! external x/1 bit
//! external n/0 int
//! internal i/0 int
//! internal s/0 bit
//! internal sigma/0 bit
//! output sigma
//! 1: i := 0
//! 2: s := 0
//! 3: if i < n then 4 else 7
//! 4: i := i + 1
//! 5: s := s + x(i)
//! 6: goto 3
//! 7: sigma := s
//! 8: halt
//! ```

pub(crate) mod interp;
mod parse;

use std::collections::HashMap;
use std::fmt;

pub use interp::{eval_term, run, ValueStore};
pub use parse::parse_program;

/// Largest magnitude a runtime value may take.
pub const VALUE_CAP: i64 = 1 << 31;

/// Value sort of a function or term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Int,
    /// Alphabet characters, encoded as `0..alphabet`.
    Char,
    /// The two-element field; addition and subtraction fold modulo 2.
    Bit,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Int => "int",
            Sort::Char => "char",
            Sort::Bit => "bit",
        }
    }

    pub(crate) fn parse(s: &str) -> Option<Sort> {
        match s {
            "int" => Some(Sort::Int),
            "char" => Some(Sort::Char),
            "bit" | "f2" => Some(Sort::Bit),
            _ => None,
        }
    }

    /// Normalizes an arithmetic result into this sort's carrier.
    pub fn normalize(self, v: i64) -> i64 {
        match self {
            Sort::Bit => v.rem_euclid(2),
            _ => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FuncKind {
    External,
    Internal,
}

/// Index of a function in its program's vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncId(pub u32);

impl FuncId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: String,
    pub arity: usize,
    pub sort: Sort,
    pub kind: FuncKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
}

impl ArithOp {
    pub fn apply(self, sort: Sort, a: i64, b: i64) -> i64 {
        let v = match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
        };
        sort.normalize(v)
    }

    pub fn name(self) -> &'static str {
        match self {
            ArithOp::Add => "add",
            ArithOp::Sub => "sub",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn negate(self) -> Relation {
        match self {
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Gt => Relation::Le,
            Relation::Ge => Relation::Lt,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Relation::Eq => a == b,
            Relation::Ne => a != b,
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
        }
    }

    /// Short tag used in canonical literal keys.
    pub fn tag(self) -> &'static str {
        match self {
            Relation::Eq => "eq",
            Relation::Ne => "ne",
            Relation::Lt => "lt",
            Relation::Le => "le",
            Relation::Gt => "gt",
            Relation::Ge => "ge",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// A literal constant; `sort` is set only for character literals.
    Const {
        value: i64,
        sort: Option<Sort>,
    },
    Input(FuncId, Vec<Term>),
    Internal(FuncId, Vec<Term>),
    Op {
        op: ArithOp,
        sort: Sort,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
}

impl Term {
    pub fn int(value: i64) -> Term {
        Term::Const { value, sort: None }
    }
}

/// A branch condition `lhs rel rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardLiteral {
    pub relation: Relation,
    pub lhs: Term,
    pub rhs: Term,
}

impl GuardLiteral {
    /// The literal in the polarity that held at run time.
    pub fn taken(&self, holds: bool) -> GuardLiteral {
        if holds {
            self.clone()
        } else {
            GuardLiteral {
                relation: self.relation.negate(),
                lhs: self.lhs.clone(),
                rhs: self.rhs.clone(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstrBody {
    Assign {
        target: FuncId,
        args: Vec<Term>,
        rhs: Term,
    },
    If {
        guard: GuardLiteral,
        then_label: u32,
        else_label: u32,
    },
    Goto(u32),
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub label: u32,
    pub body: InstrBody,
    /// Source line, for diagnostics.
    pub line: usize,
}

/// A parsed, validated program. Immutable and freely shareable across
/// threads.
#[derive(Clone, Debug)]
pub struct Program {
    functions: Vec<FuncDecl>,
    output: FuncId,
    instructions: Vec<Instruction>,
    label_index: HashMap<u32, usize>,
}

impl Program {
    pub fn functions(&self) -> &[FuncDecl] {
        &self.functions
    }

    pub fn decl(&self, id: FuncId) -> &FuncDecl {
        &self.functions[id.index()]
    }

    pub fn name(&self, id: FuncId) -> &str {
        &self.functions[id.index()].name
    }

    pub fn lookup(&self, name: &str) -> Option<FuncId> {
        self.functions
            .iter()
            .position(|f| f.name == name)
            .map(|i| FuncId(i as u32))
    }

    pub fn externals(&self) -> impl Iterator<Item = (FuncId, &FuncDecl)> {
        self.functions
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kind == FuncKind::External)
            .map(|(i, f)| (FuncId(i as u32), f))
    }

    pub fn internals(&self) -> impl Iterator<Item = (FuncId, &FuncDecl)> {
        self.functions
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kind == FuncKind::Internal)
            .map(|(i, f)| (FuncId(i as u32), f))
    }

    pub fn output(&self) -> FuncId {
        self.output
    }

    pub fn output_name(&self) -> &str {
        self.name(self.output)
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn instruction(&self, idx: usize) -> &Instruction {
        &self.instructions[idx]
    }

    pub fn entry_label(&self) -> u32 {
        self.instructions[0].label
    }

    pub(crate) fn index_of_label(&self, label: u32) -> Option<usize> {
        self.label_index.get(&label).copied()
    }

    /// The guard written at instruction `idx`, if it is a branch.
    pub fn guard_at(&self, idx: usize) -> Option<&GuardLiteral> {
        match &self.instructions[idx].body {
            InstrBody::If { guard, .. } => Some(guard),
            _ => None,
        }
    }

    /// Renders a term with the program's function names.
    pub fn display_term<'a>(&'a self, term: &'a Term) -> TermDisplay<'a> {
        TermDisplay {
            program: self,
            term,
        }
    }
}

pub struct TermDisplay<'a> {
    program: &'a Program,
    term: &'a Term,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Const { value, sort } => match sort {
                Some(Sort::Char) => write!(f, "'{}'", char_symbol(*value)),
                _ => write!(f, "{value}"),
            },
            Term::Input(id, args) | Term::Internal(id, args) => {
                f.write_str(self.program.name(*id))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", self.program.display_term(a))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::Op { op, lhs, rhs, .. } => {
                let r = self.program.display_term(rhs);
                if matches!(**rhs, Term::Op { .. }) {
                    write!(
                        f,
                        "{} {} ({r})",
                        self.program.display_term(lhs),
                        op.symbol()
                    )
                } else {
                    write!(f, "{} {} {r}", self.program.display_term(lhs), op.symbol())
                }
            }
        }
    }
}

/// Letter used to print character value `v` (`0 -> 'a'`).
pub fn char_symbol(v: i64) -> char {
    if (0..26).contains(&v) {
        (b'a' + v as u8) as char
    } else {
        '?'
    }
}

/// One input of size `n`: the word read through the program's unary
/// external, with `n` itself exposed as the nullary external `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputInstance {
    pub alphabet: u32,
    pub word: Vec<u8>,
}

impl InputInstance {
    pub fn new(alphabet: u32, word: Vec<u8>) -> InputInstance {
        InputInstance { alphabet, word }
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Parses `"aab"`-style words (letters from `a`) or `"0110"`-style bit
    /// words (digits).
    pub fn parse(text: &str, alphabet: u32) -> Option<InputInstance> {
        let mut word = Vec::with_capacity(text.len());
        for c in text.chars() {
            let v = match c {
                '0'..='9' => c as u32 - '0' as u32,
                'a'..='z' => c as u32 - 'a' as u32,
                _ => return None,
            };
            if v >= alphabet {
                return None;
            }
            word.push(v as u8);
        }
        Some(InputInstance { alphabet, word })
    }

    /// Letters for alphabets larger than two, digits for bit words.
    pub fn render(&self, digits: bool) -> String {
        self.word
            .iter()
            .map(|&c| {
                if digits {
                    (b'0' + c) as char
                } else {
                    char_symbol(c as i64)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// `target(arg) := rhs` executed; `value` is the assigned value.
    Update { arg: Option<i64>, value: i64 },
    /// A branch; `holds` tells whether the written guard was true, so the
    /// event's literal is the guard itself or its negation.
    Guard { holds: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    /// Instant, consecutive from 1.
    pub time: u32,
    /// Index of the executed instruction in [`Program::instructions`].
    pub instr: u32,
    pub kind: EventKind,
}

impl Event {
    pub fn is_update(&self) -> bool {
        matches!(self.kind, EventKind::Update { .. })
    }
}

/// The events of one run: executed updates and taken guards. `goto` and
/// `halt` never appear; the last event updates the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub input: InputInstance,
    pub events: Vec<Event>,
}

impl Trace {
    /// Number of events, the run's time complexity.
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Value assigned by the final output update.
    pub fn output_value(&self) -> i64 {
        match self.events.last().map(|e| &e.kind) {
            Some(EventKind::Update { value, .. }) => *value,
            _ => unreachable!("a completed trace ends with the output update"),
        }
    }

    /// The event at instant `t` (1-based).
    pub fn event(&self, t: u32) -> Option<&Event> {
        t.checked_sub(1).and_then(|i| self.events.get(i as usize))
    }

    /// Renders events in the `target(arg) := rhs [value]` / guard form.
    pub fn render(&self, program: &Program) -> Vec<String> {
        self.events
            .iter()
            .map(|e| {
                let instr = program.instruction(e.instr as usize);
                match (&instr.body, &e.kind) {
                    (InstrBody::Assign { target, rhs, .. }, EventKind::Update { arg, value }) => {
                        let name = program.name(*target);
                        let lhs = match arg {
                            Some(a) => format!("{name}({a})"),
                            None => name.to_string(),
                        };
                        format!("{lhs} := {} [{value}]", program.display_term(rhs))
                    }
                    (InstrBody::If { guard, .. }, EventKind::Guard { holds }) => {
                        let g = guard.taken(*holds);
                        format!(
                            "{} {} {}",
                            program.display_term(&g.lhs),
                            g.relation.symbol(),
                            program.display_term(&g.rhs)
                        )
                    }
                    _ => unreachable!("event kind matches its instruction"),
                }
            })
            .collect()
    }
}

/// Default step budget for inputs of size `n`.
pub fn default_budget(n: usize) -> u64 {
    64 * (n.max(1) as u64).pow(2)
}
