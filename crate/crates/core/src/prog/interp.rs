use std::collections::BTreeMap;

use super::{Event, EventKind, FuncId, InputInstance, InstrBody, Program, Term, Trace, VALUE_CAP};
use crate::error::RunError;

#[derive(Clone, Debug)]
enum Slot<T> {
    Nullary(Option<T>),
    Unary(BTreeMap<i64, T>),
}

/// Per-function storage for internal functions of arity 0 or 1, keyed by the
/// concrete argument. Unassigned locations read as `None`.
#[derive(Clone, Debug)]
pub struct Store<T> {
    slots: Vec<Slot<T>>,
}

impl<T: Clone> Store<T> {
    pub fn new(program: &Program) -> Store<T> {
        let slots = program
            .functions()
            .iter()
            .map(|f| {
                if f.arity == 0 {
                    Slot::Nullary(None)
                } else {
                    Slot::Unary(BTreeMap::new())
                }
            })
            .collect();
        Store { slots }
    }

    pub fn get(&self, id: FuncId, arg: Option<i64>) -> Option<&T> {
        match (&self.slots[id.index()], arg) {
            (Slot::Nullary(v), None) => v.as_ref(),
            (Slot::Unary(m), Some(a)) => m.get(&a),
            _ => None,
        }
    }

    pub fn set(&mut self, id: FuncId, arg: Option<i64>, value: T) {
        match (&mut self.slots[id.index()], arg) {
            (Slot::Nullary(v), None) => *v = Some(value),
            (Slot::Unary(m), Some(a)) => {
                m.insert(a, value);
            }
            _ => unreachable!("arity checked by the parser"),
        }
    }
}

/// Concrete values of internal functions.
pub type ValueStore = Store<i64>;

fn check_cap(value: i64, time: u32) -> Result<i64, RunError> {
    if value.abs() > VALUE_CAP {
        Err(RunError::ValueOverflow { value, time })
    } else {
        Ok(value)
    }
}

/// Reads external `id` at an already evaluated argument.
pub(crate) fn read_external(
    program: &Program,
    id: FuncId,
    arg: Option<i64>,
    input: &InputInstance,
    time: u32,
) -> Result<i64, RunError> {
    match arg {
        None => Ok(input.n() as i64),
        Some(i) => {
            if i < 1 || i as usize > input.n() {
                return Err(RunError::InputOutOfRange {
                    name: program.name(id).to_string(),
                    index: i,
                    n: input.n(),
                    time,
                });
            }
            Ok(input.word[i as usize - 1] as i64)
        }
    }
}

/// Value of `term` given the internal state and the input; `time` is only
/// used to label errors.
pub fn eval_term(
    program: &Program,
    term: &Term,
    state: &ValueStore,
    input: &InputInstance,
    time: u32,
) -> Result<i64, RunError> {
    match term {
        Term::Const { value, .. } => Ok(*value),
        Term::Input(id, args) => {
            let arg = match args.first() {
                Some(a) => Some(eval_term(program, a, state, input, time)?),
                None => None,
            };
            read_external(program, *id, arg, input, time)
        }
        Term::Internal(id, args) => {
            let arg = match args.first() {
                Some(a) => Some(eval_term(program, a, state, input, time)?),
                None => None,
            };
            state
                .get(*id, arg)
                .copied()
                .ok_or_else(|| RunError::Unassigned {
                    name: match arg {
                        Some(a) => format!("{}({a})", program.name(*id)),
                        None => program.name(*id).to_string(),
                    },
                    time,
                })
        }
        Term::Op { op, sort, lhs, rhs } => {
            let a = eval_term(program, lhs, state, input, time)?;
            let b = eval_term(program, rhs, state, input, time)?;
            check_cap(op.apply(*sort, a, b), time)
        }
    }
}

/// Executes `program` on `input`, recording every update and taken guard.
/// `budget` bounds the number of executed instructions, control transfers
/// included.
pub fn run(program: &Program, input: &InputInstance, budget: u64) -> Result<Trace, RunError> {
    let mut state = ValueStore::new(program);
    let mut events: Vec<Event> = Vec::new();
    let mut pc = 0usize;
    let mut steps = 0u64;
    let mut output_time: Option<u32> = None;
    let instructions = program.instructions();

    loop {
        steps += 1;
        if steps > budget {
            return Err(RunError::BudgetExceeded { budget });
        }
        let ins = &instructions[pc];
        let time = events.len() as u32 + 1;
        match &ins.body {
            InstrBody::Assign { target, args, rhs } => {
                if let Some(t) = output_time {
                    return Err(RunError::OutputNotFinal { time: t });
                }
                let arg = match args.first() {
                    Some(a) => Some(eval_term(program, a, &state, input, time)?),
                    None => None,
                };
                let sort = program.decl(*target).sort;
                let value = check_cap(
                    sort.normalize(eval_term(program, rhs, &state, input, time)?),
                    time,
                )?;
                state.set(*target, arg, value);
                events.push(Event {
                    time,
                    instr: pc as u32,
                    kind: EventKind::Update { arg, value },
                });
                if *target == program.output() {
                    output_time = Some(time);
                }
                pc += 1;
                if pc == instructions.len() {
                    return Err(RunError::FellOffEnd { label: ins.label });
                }
            }
            InstrBody::If {
                guard,
                then_label,
                else_label,
            } => {
                if let Some(t) = output_time {
                    return Err(RunError::OutputNotFinal { time: t });
                }
                let a = eval_term(program, &guard.lhs, &state, input, time)?;
                let b = eval_term(program, &guard.rhs, &state, input, time)?;
                let holds = guard.relation.holds(a, b);
                events.push(Event {
                    time,
                    instr: pc as u32,
                    kind: EventKind::Guard { holds },
                });
                let next = if holds { then_label } else { else_label };
                pc = program
                    .index_of_label(*next)
                    .expect("labels validated by the parser");
            }
            InstrBody::Goto(label) => {
                pc = program
                    .index_of_label(*label)
                    .expect("labels validated by the parser");
            }
            InstrBody::Halt => {
                if output_time.is_none() {
                    return Err(RunError::NoOutput);
                }
                return Ok(Trace {
                    input: input.clone(),
                    events,
                });
            }
        }
    }
}
