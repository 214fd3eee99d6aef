use std::collections::HashMap;

use super::{
    ArithOp, FuncDecl, FuncId, FuncKind, GuardLiteral, InstrBody, Instruction, Program, Relation,
    Sort, Term,
};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Char(i64),
    Assign,
    LParen,
    RParen,
    Comma,
    Colon,
    Slash,
    Plus,
    Minus,
    Rel(Relation),
}

fn tokenize(line: usize, text: &str) -> Result<Vec<Tok>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<i64>()
                .map_err(|_| ParseError::new(line, format!("integer `{s}` out of range")))?;
            out.push(Tok::Int(v));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            (':', Some('=')) => (Tok::Assign, 2),
            (':', _) => (Tok::Colon, 1),
            ('<', Some('=')) => (Tok::Rel(Relation::Le), 2),
            ('>', Some('=')) => (Tok::Rel(Relation::Ge), 2),
            ('!', Some('=')) => (Tok::Rel(Relation::Ne), 2),
            ('<', _) => (Tok::Rel(Relation::Lt), 1),
            ('>', _) => (Tok::Rel(Relation::Gt), 1),
            ('=', _) => (Tok::Rel(Relation::Eq), 1),
            ('≠', _) => (Tok::Rel(Relation::Ne), 1),
            ('≤', _) => (Tok::Rel(Relation::Le), 1),
            ('≥', _) => (Tok::Rel(Relation::Ge), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('/', _) => (Tok::Slash, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('\'', _) => {
                let letter = next.filter(|l| l.is_ascii_lowercase());
                match (letter, chars.get(i + 2)) {
                    (Some(l), Some('\'')) => (Tok::Char(l as i64 - 'a' as i64), 3),
                    _ => return Err(ParseError::new(line, "malformed character literal")),
                }
            }
            _ => return Err(ParseError::new(line, format!("unexpected character `{c}`"))),
        };
        out.push(tok);
        i += width;
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, msg)
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(self.err("expected a name")),
        }
    }

    fn label(&mut self) -> Result<u32, ParseError> {
        match self.next() {
            Some(Tok::Int(v)) if *v >= 0 && *v <= u32::MAX as i64 => Ok(*v as u32),
            _ => Err(self.err("expected a label")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) if s == kw => Ok(()),
            _ => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing tokens"))
        } else {
            Ok(())
        }
    }
}

struct Vocab {
    functions: Vec<FuncDecl>,
    by_name: HashMap<String, FuncId>,
}

impl Vocab {
    /// term := atom (('+' | '-') atom)*
    fn term(&self, cur: &mut Cursor) -> Result<Term, ParseError> {
        let mut lhs = self.atom(cur)?;
        loop {
            let op = match cur.peek() {
                Some(Tok::Plus) => ArithOp::Add,
                Some(Tok::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            cur.next();
            let rhs = self.atom(cur)?;
            let sort = self.op_sort(cur, &lhs, &rhs)?;
            lhs = Term::Op {
                op,
                sort,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn atom(&self, cur: &mut Cursor) -> Result<Term, ParseError> {
        match cur.next() {
            Some(Tok::Int(v)) => Ok(Term::int(*v)),
            Some(Tok::Char(v)) => Ok(Term::Const {
                value: *v,
                sort: Some(Sort::Char),
            }),
            Some(Tok::LParen) => {
                let t = self.term(cur)?;
                cur.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                let args = if cur.peek() == Some(&Tok::LParen) {
                    cur.next();
                    let mut args = vec![self.term(cur)?];
                    while cur.peek() == Some(&Tok::Comma) {
                        cur.next();
                        args.push(self.term(cur)?);
                    }
                    cur.expect(&Tok::RParen, "`)`")?;
                    args
                } else {
                    Vec::new()
                };
                self.application(cur, name, args)
            }
            _ => Err(cur.err("expected a term")),
        }
    }

    fn application(&self, cur: &Cursor, name: &str, args: Vec<Term>) -> Result<Term, ParseError> {
        let id = *self
            .by_name
            .get(name)
            .ok_or_else(|| cur.err(format!("unknown function `{name}`")))?;
        let decl = &self.functions[id.index()];
        if decl.arity != args.len() {
            return Err(cur.err(format!(
                "`{name}` has arity {} but is applied to {} argument(s)",
                decl.arity,
                args.len()
            )));
        }
        for a in &args {
            if !self.fits(a, Sort::Int) {
                return Err(cur.err(format!("arguments of `{name}` must be integers")));
            }
        }
        Ok(match decl.kind {
            FuncKind::External => Term::Input(id, args),
            FuncKind::Internal => Term::Internal(id, args),
        })
    }

    /// Sort of a term; `None` for an integer literal, which adapts to its
    /// context.
    fn sort_of(&self, t: &Term) -> Option<Sort> {
        match t {
            Term::Const { sort, .. } => *sort,
            Term::Input(id, _) | Term::Internal(id, _) => Some(self.functions[id.index()].sort),
            Term::Op { sort, .. } => Some(*sort),
        }
    }

    fn fits(&self, t: &Term, want: Sort) -> bool {
        match self.sort_of(t) {
            None => want != Sort::Char,
            Some(s) => s == want,
        }
    }

    fn op_sort(&self, cur: &Cursor, lhs: &Term, rhs: &Term) -> Result<Sort, ParseError> {
        let sort = match (self.sort_of(lhs), self.sort_of(rhs)) {
            (None, None) => Sort::Int,
            (Some(s), None) | (None, Some(s)) => s,
            (Some(a), Some(b)) if a == b => a,
            (Some(a), Some(b)) => {
                return Err(cur.err(format!(
                    "cannot combine {} and {} arithmetically",
                    a.name(),
                    b.name()
                )))
            }
        };
        if sort == Sort::Char {
            return Err(cur.err("no arithmetic on characters"));
        }
        Ok(sort)
    }

    fn guard(&self, cur: &mut Cursor) -> Result<GuardLiteral, ParseError> {
        let lhs = self.term(cur)?;
        let relation = match cur.next() {
            Some(Tok::Rel(r)) => *r,
            _ => return Err(cur.err("expected a relation")),
        };
        let rhs = self.term(cur)?;
        match (self.sort_of(&lhs), self.sort_of(&rhs)) {
            (Some(a), Some(b)) if a != b => {
                return Err(cur.err(format!("guard compares {} with {}", a.name(), b.name())))
            }
            (Some(Sort::Char), None) | (None, Some(Sort::Char)) => {
                return Err(cur.err("guard compares a character with an integer"))
            }
            _ => {}
        }
        Ok(GuardLiteral { relation, lhs, rhs })
    }
}

/// Parses the textual program format. Header lines declare the vocabulary
/// (`external name/arity sort`, `internal name/arity sort`, `output name`);
/// every other non-blank line is `LABEL: instruction`.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut vocab = Vocab {
        functions: Vec::new(),
        by_name: HashMap::new(),
    };
    let mut output: Option<(String, usize)> = None;
    let mut body_lines: Vec<(usize, Vec<Tok>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('%').next().unwrap_or("");
        let toks = tokenize(line, content)?;
        let Some(first) = toks.first() else { continue };
        match first {
            Tok::Ident(kw) if kw == "external" || kw == "internal" => {
                if !body_lines.is_empty() {
                    return Err(ParseError::new(
                        line,
                        "declarations must precede instructions",
                    ));
                }
                let mut cur = Cursor {
                    toks: &toks[1..],
                    pos: 0,
                    line,
                };
                let name = cur.ident()?.to_string();
                cur.expect(&Tok::Slash, "`/arity`")?;
                let arity = cur.label()? as usize;
                let sort_name = cur.ident()?;
                let sort = Sort::parse(sort_name)
                    .ok_or_else(|| cur.err(format!("unknown sort `{sort_name}`")))?;
                cur.done()?;
                let kind = if kw == "external" {
                    FuncKind::External
                } else {
                    FuncKind::Internal
                };
                if arity > 1 {
                    return Err(cur.err(format!("`{name}`: only arities 0 and 1 are supported")));
                }
                if kind == FuncKind::External && arity == 0 && name != "n" {
                    return Err(cur.err(format!(
                        "nullary external `{name}`: only the size parameter `n` is supported"
                    )));
                }
                if vocab.by_name.contains_key(&name) {
                    return Err(cur.err(format!("`{name}` declared twice")));
                }
                vocab
                    .by_name
                    .insert(name.clone(), FuncId(vocab.functions.len() as u32));
                vocab.functions.push(FuncDecl {
                    name,
                    arity,
                    sort,
                    kind,
                });
            }
            Tok::Ident(kw) if kw == "output" => {
                let mut cur = Cursor {
                    toks: &toks[1..],
                    pos: 0,
                    line,
                };
                let name = cur.ident()?.to_string();
                cur.done()?;
                if output.is_some() {
                    return Err(cur.err("output declared twice"));
                }
                output = Some((name, line));
            }
            _ => body_lines.push((line, toks)),
        }
    }

    if body_lines.is_empty() {
        return Err(ParseError::new(1, "no instructions"));
    }

    let (out_name, out_line) =
        output.ok_or_else(|| ParseError::new(1, "missing `output` declaration"))?;
    let out_id = *vocab
        .by_name
        .get(&out_name)
        .ok_or_else(|| ParseError::new(out_line, format!("unknown output `{out_name}`")))?;
    {
        let d = &vocab.functions[out_id.index()];
        if d.kind != FuncKind::Internal || d.arity != 0 {
            return Err(ParseError::new(
                out_line,
                "the output must be a nullary internal function",
            ));
        }
    }
    if vocab
        .functions
        .iter()
        .filter(|f| f.kind == FuncKind::External && f.arity == 1)
        .count()
        > 1
    {
        return Err(ParseError::new(
            1,
            "at most one unary external (the input word)",
        ));
    }

    let mut instructions = Vec::with_capacity(body_lines.len());
    for (line, toks) in &body_lines {
        let mut cur = Cursor {
            toks,
            pos: 0,
            line: *line,
        };
        let label = cur.label()?;
        cur.expect(&Tok::Colon, "`:` after the label")?;
        let body = match cur.peek() {
            Some(Tok::Ident(kw)) if kw == "halt" => {
                cur.next();
                InstrBody::Halt
            }
            Some(Tok::Ident(kw)) if kw == "goto" => {
                cur.next();
                InstrBody::Goto(cur.label()?)
            }
            Some(Tok::Ident(kw)) if kw == "if" => {
                cur.next();
                let guard = vocab.guard(&mut cur)?;
                cur.keyword("then")?;
                let then_label = cur.label()?;
                cur.keyword("else")?;
                let else_label = cur.label()?;
                InstrBody::If {
                    guard,
                    then_label,
                    else_label,
                }
            }
            Some(Tok::Ident(_)) => {
                let lhs = vocab.atom(&mut cur)?;
                let (target, args) = match lhs {
                    Term::Internal(id, args) => (id, args),
                    Term::Input(id, _) => {
                        return Err(cur.err(format!(
                            "external `{}` cannot be assigned",
                            vocab.functions[id.index()].name
                        )))
                    }
                    _ => return Err(cur.err("expected an assignment target")),
                };
                cur.expect(&Tok::Assign, "`:=`")?;
                let rhs = vocab.term(&mut cur)?;
                let tsort = vocab.functions[target.index()].sort;
                if !vocab.fits(&rhs, tsort) {
                    return Err(cur.err(format!(
                        "cannot assign a value of another sort to {} `{}`",
                        tsort.name(),
                        vocab.functions[target.index()].name
                    )));
                }
                InstrBody::Assign { target, args, rhs }
            }
            _ => return Err(cur.err("expected an instruction")),
        };
        cur.done()?;
        instructions.push(Instruction {
            label,
            body,
            line: *line,
        });
    }

    instructions.sort_by_key(|i| i.label);
    let mut label_index = HashMap::new();
    for (i, ins) in instructions.iter().enumerate() {
        if label_index.insert(ins.label, i).is_some() {
            return Err(ParseError::new(
                ins.line,
                format!("duplicate label {}", ins.label),
            ));
        }
    }
    for ins in &instructions {
        let targets: &[u32] = match &ins.body {
            InstrBody::If {
                then_label,
                else_label,
                ..
            } => &[*then_label, *else_label],
            InstrBody::Goto(l) => std::slice::from_ref(l),
            _ => &[],
        };
        for t in targets {
            if !label_index.contains_key(t) {
                return Err(ParseError::new(ins.line, format!("dangling label {t}")));
            }
        }
    }

    Ok(Program {
        functions: vocab.functions,
        output: out_id,
        instructions,
        label_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = "\
% sum over F2
external x/1 bit
external n/0 int
internal i/0 int
internal s/0 bit
internal σ/0 bit
output σ
1: i := 0
2: s := 0
3: if i < n then 4 else 7
4: i := i + 1
5: s := s + x(i)
6: goto 3
7: σ := s
8: halt
";

    #[test]
    fn parses_the_xor_listing() {
        let p = parse_program(XOR).unwrap();
        let ext: Vec<_> = p
            .externals()
            .map(|(_, d)| (d.name.as_str(), d.arity))
            .collect();
        assert_eq!(ext, vec![("x", 1), ("n", 0)]);
        let int: Vec<_> = p.internals().map(|(_, d)| d.name.as_str()).collect();
        assert_eq!(int, vec!["i", "s", "σ"]);
        assert_eq!(p.output_name(), "σ");
        assert_eq!(p.instructions().len(), 8);
        assert_eq!(p.entry_label(), 1);
    }

    #[test]
    fn empty_text_has_no_instructions() {
        let err = parse_program("").unwrap_err();
        assert_eq!(err.message, "no instructions");
        let err = parse_program("internal r/0 int\noutput r\n% nothing\n").unwrap_err();
        assert_eq!(err.message, "no instructions");
    }

    #[test]
    fn dangling_label_is_reported_with_its_line() {
        let src = "internal r/0 int\noutput r\n1: r := 0\n2: goto 99\n";
        let err = parse_program(src).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("dangling label 99"));
    }

    #[test]
    fn unknown_function_and_arity_mismatch() {
        let src = "internal r/0 int\noutput r\n1: r := q\n2: halt\n";
        assert!(parse_program(src)
            .unwrap_err()
            .message
            .contains("unknown function `q`"));
        let src = "external w/1 char\ninternal r/0 int\noutput r\n1: if w = w(1) then 2 else 2\n2: halt\n";
        assert!(parse_program(src).unwrap_err().message.contains("arity"));
    }

    #[test]
    fn externals_cannot_be_assigned() {
        let src = "external n/0 int\ninternal r/0 int\noutput r\n1: n := 0\n2: halt\n";
        assert!(parse_program(src)
            .unwrap_err()
            .message
            .contains("cannot be assigned"));
    }

    #[test]
    fn sort_errors() {
        let src = "external w/1 char\ninternal r/0 int\noutput r\n1: r := w(1) + 1\n2: halt\n";
        assert!(parse_program(src).is_err());
        let src = "external w/1 char\ninternal r/0 int\noutput r\n1: if w(1) < 2 then 2 else 2\n2: halt\n";
        assert!(parse_program(src).is_err());
        let src = "external w/1 char\ninternal r/0 int\noutput r\n1: if w(1) = 'b' then 2 else 2\n2: r := 0\n3: halt\n";
        assert!(parse_program(src).is_ok());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let src = "internal r/0 int\noutput r\n1: r := 0\n1: halt\n";
        assert!(parse_program(src)
            .unwrap_err()
            .message
            .contains("duplicate"));
    }
}
