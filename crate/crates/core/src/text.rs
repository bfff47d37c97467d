//! Concrete syntax.
//!
//! Formulas use parenthesized prefix notation:
//!
//! ```text
//! formula := atom | (not f) | (and f+) | (or f+) | (=> f f) | (iff f f)
//!          | (forall (var+) f) | (exists (var+) f)
//! atom    := true | false | (relop var var) | (relop (- var var) int)
//!          | (pred var) | (pred (+ var int)) | (int var)
//! relop   := < | <= | = | >= | >
//! ```
//!
//! Machines use a line-oriented format with `#` comments:
//!
//! ```text
//! states: qI qF
//! init: qI
//! halt: qF
//! trans: qI 0 -> qF 1 R
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::formula::{check_binders, free_vars, Atom, Formula, FormulaError, Pred, RelOp, Var};
use crate::tm::{Dir, TmError, TuringMachine};

/// Byte range `[start, end)` in the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at {}..{}{}", span.start, span.end, expected_suffix(expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: Vec::new() }
    }

    fn expecting(span: SourceSpan, message: impl Into<String>, expected: &[&str]) -> Self {
        ParseError { span, message: message.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
    }
}

const KEYWORDS: &[&str] = &["not", "and", "or", "=>", "iff", "forall", "exists", "int", "true", "false"];

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        // `_` is accepted as a first character so generated `_k<n>` names
        // read back.
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Option<(Tok<'a>, SourceSpan)> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        match *bytes.get(start)? {
            b'(' => {
                self.pos += 1;
                Some((Tok::Open, SourceSpan::new(start, start + 1)))
            }
            b')' => {
                self.pos += 1;
                Some((Tok::Close, SourceSpan::new(start, start + 1)))
            }
            _ => {
                while self.pos < bytes.len()
                    && !matches!(bytes[self.pos], b'(' | b')' | b' ' | b'\t' | b'\n' | b'\r' | b';')
                {
                    self.pos += 1;
                }
                // Multi-byte characters are consumed whole since only ASCII
                // bytes stop the scan.
                Some((Tok::Word(&self.src[start..self.pos]), SourceSpan::new(start, self.pos)))
            }
        }
    }
}

/// Parsed s-expression with spans.
#[derive(Debug, Clone)]
enum Sexp<'a> {
    Word(&'a str, SourceSpan),
    List(Vec<Sexp<'a>>, SourceSpan),
}

impl<'a> Sexp<'a> {
    fn span(&self) -> SourceSpan {
        match self {
            Sexp::Word(_, s) | Sexp::List(_, s) => *s,
        }
    }
}

fn read_sexp<'a>(lex: &mut Lexer<'a>) -> Result<Sexp<'a>, ParseError> {
    let end = lex.src.len();
    let (tok, span) = lex
        .next()
        .ok_or_else(|| ParseError::expecting(SourceSpan::new(end, end), "unexpected end of input", &["formula"]))?;
    match tok {
        Tok::Word(w) => Ok(Sexp::Word(w, span)),
        Tok::Close => Err(ParseError::expecting(span, "unexpected `)`", &["formula"])),
        Tok::Open => {
            let mut items = Vec::new();
            loop {
                let save = lex.pos;
                match lex.next() {
                    None => {
                        return Err(ParseError::expecting(SourceSpan::new(span.start, end), "unclosed `(`", &["`)`"]))
                    }
                    Some((Tok::Close, close)) => return Ok(Sexp::List(items, SourceSpan::new(span.start, close.end))),
                    Some(_) => {
                        lex.pos = save;
                        items.push(read_sexp(lex)?);
                    }
                }
            }
        }
    }
}

/// Options for [`parse_formula_with`].
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// When set, a bound atom `(op x c)` is read as `x - zero ⋈ c`.
    pub zero_anchor: Option<Var>,
}

/// Parses one formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &ParseOptions::default())
}

pub fn parse_formula_with(text: &str, opts: &ParseOptions) -> Result<Formula, ParseError> {
    let mut lex = Lexer::new(text);
    let sexp = read_sexp(&mut lex)?;
    if let Some((_, span)) = lex.next() {
        return Err(ParseError::expecting(span, "trailing input after formula", &["end of input"]));
    }
    FormulaReader { opts }.formula(&sexp)
}

struct FormulaReader<'o> {
    opts: &'o ParseOptions,
}

impl FormulaReader<'_> {
    fn var(&self, s: &Sexp) -> Result<Var, ParseError> {
        match s {
            Sexp::Word(w, _) if is_ident(w) => Ok(Var::new(*w)),
            other => Err(ParseError::expecting(other.span(), "invalid variable", &["identifier"])),
        }
    }

    fn int(&self, s: &Sexp) -> Result<i64, ParseError> {
        match s {
            Sexp::Word(w, span) => {
                let digits = w.strip_prefix('-').unwrap_or(w);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseError::expecting(*span, "invalid integer", &["integer"]));
                }
                w.parse().map_err(|_| ParseError::new(*span, "integer out of range"))
            }
            other => Err(ParseError::expecting(other.span(), "invalid integer", &["integer"])),
        }
    }

    fn formula(&self, s: &Sexp) -> Result<Formula, ParseError> {
        match s {
            Sexp::Word("true", _) => Ok(Formula::tt()),
            Sexp::Word("false", _) => Ok(Formula::ff()),
            Sexp::Word(_, span) => {
                Err(ParseError::expecting(*span, "bare word is not a formula", &["true", "false", "`(`"]))
            }
            Sexp::List(items, span) => {
                let span = *span;
                let (head, args) = match items.split_first() {
                    Some((Sexp::Word(h, _), args)) => (*h, args),
                    Some((other, _)) => {
                        return Err(ParseError::expecting(other.span(), "expected operator", &["operator"]))
                    }
                    None => return Err(ParseError::expecting(span, "empty list", &["operator"])),
                };
                let arity = |n: usize| -> Result<(), ParseError> {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(ParseError::new(span, format!("`{head}` takes {n} argument(s), got {}", args.len())))
                    }
                };
                match head {
                    "not" => {
                        arity(1)?;
                        Ok(Formula::not(self.formula(&args[0])?))
                    }
                    "and" | "or" => {
                        if args.is_empty() {
                            return Err(ParseError::expecting(span, format!("`{head}` needs operands"), &["formula"]));
                        }
                        let fs = args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>, _>>()?;
                        Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
                    }
                    "=>" | "iff" => {
                        arity(2)?;
                        let (a, b) = (self.formula(&args[0])?, self.formula(&args[1])?);
                        Ok(if head == "=>" { Formula::implies(a, b) } else { Formula::iff(a, b) })
                    }
                    "forall" | "exists" => {
                        arity(2)?;
                        let vars = match &args[0] {
                            Sexp::List(vs, _) if !vs.is_empty() => {
                                vs.iter().map(|v| self.var(v)).collect::<Result<Vec<_>, _>>()?
                            }
                            other => {
                                return Err(ParseError::expecting(other.span(), "expected binder list", &["(var+)"]))
                            }
                        };
                        let body = Box::new(self.formula(&args[1])?);
                        let f =
                            if head == "forall" { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) };
                        match check_binders(&f) {
                            Err(FormulaError::DuplicateBinder(v)) => {
                                Err(ParseError::new(args[0].span(), format!("duplicate binder variable `{v}`")))
                            }
                            _ => Ok(f),
                        }
                    }
                    "int" => {
                        arity(1)?;
                        Ok(Formula::is_int(self.var(&args[0])?))
                    }
                    _ => {
                        if let Some(op) = RelOp::from_symbol(head) {
                            arity(2)?;
                            self.relation(op, &args[0], &args[1], span)
                        } else if is_ident(head) {
                            arity(1)?;
                            self.predicate(Pred::new(head), &args[0])
                        } else {
                            Err(ParseError::expecting(
                                items[0].span(),
                                format!("unknown operator `{head}`"),
                                &["connective", "quantifier", "relation", "predicate"],
                            ))
                        }
                    }
                }
            }
        }
    }

    fn relation(&self, op: RelOp, lhs: &Sexp, rhs: &Sexp, span: SourceSpan) -> Result<Formula, ParseError> {
        match lhs {
            Sexp::List(items, _) => match items.as_slice() {
                [Sexp::Word("-", _), x, y] => {
                    let (x, y) = (self.var(x)?, self.var(y)?);
                    Ok(Formula::diff(x, y, op, self.int(rhs)?))
                }
                _ => Err(ParseError::expecting(lhs.span(), "malformed difference term", &["(- var var)"])),
            },
            Sexp::Word(..) => {
                let x = self.var(lhs)?;
                match rhs {
                    Sexp::Word(w, _) if is_ident(w) => Ok(Formula::order(x, op, Var::new(*w))),
                    Sexp::Word(..) => {
                        let c = self.int(rhs)?;
                        match &self.opts.zero_anchor {
                            Some(zero) => Ok(Formula::diff(x, zero.clone(), op, c)),
                            None => Err(ParseError::new(span, "constant bound needs a zero anchor variable")),
                        }
                    }
                    other => Err(ParseError::expecting(other.span(), "expected variable", &["identifier"])),
                }
            }
        }
    }

    fn predicate(&self, p: Pred, arg: &Sexp) -> Result<Formula, ParseError> {
        match arg {
            Sexp::Word(..) => Ok(Formula::pred(p, self.var(arg)?)),
            Sexp::List(items, span) => match items.as_slice() {
                [Sexp::Word("+", _), x, c] => Ok(Formula::pred_offset(p, self.var(x)?, self.int(c)?)),
                _ => Err(ParseError::expecting(*span, "malformed predicate argument", &["var", "(+ var int)"])),
            },
        }
    }
}

/// Canonical text of a formula.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Order { lhs, op, rhs } => write!(f, "({op} {lhs} {rhs})"),
            Atom::Diff { lhs, rhs, op, bound } => write!(f, "({op} (- {lhs} {rhs}) {bound})"),
            Atom::Pred { pred, var } => write!(f, "({pred} {var})"),
            Atom::PredOffset { pred, var, offset } => write!(f, "({pred} (+ {var} {offset}))"),
            Atom::IsInt(v) => write!(f, "(int {v})"),
            Atom::True => f.write_str("true"),
            Atom::False => f.write_str("false"),
        }
    }
}

fn write_vars(f: &mut fmt::Formatter<'_>, vs: &[Var]) -> fmt::Result {
    f.write_char('(')?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{v}")?;
    }
    f.write_char(')')
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) | Formula::Or(gs) if gs.is_empty() => {
                f.write_str(if matches!(self, Formula::And(_)) { "true" } else { "false" })
            }
            Formula::And(gs) | Formula::Or(gs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                f.write_char(')')
            }
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                f.write_str(if matches!(self, Formula::Exists(..)) { "(exists " } else { "(forall " })?;
                write_vars(f, vs)?;
                write!(f, " {g})")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// SMT-LIB 2

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmtError {
    #[error("formula still contains the shorthand atom {0}; expand it first")]
    Shorthand(String),
}

/// Symbols that must be quoted when used as user names.
const SMT_RESERVED: &[&str] = &[
    "and", "or", "not", "xor", "=>", "ite", "distinct", "let", "forall", "exists", "match", "par", "true", "false",
    "Real", "Int", "Bool", "is_int", "to_real", "to_int", "div", "mod", "abs", "as", "_", "!", "NUMERAL", "DECIMAL",
    "STRING",
];

fn smt_symbol(name: &str) -> String {
    if SMT_RESERVED.contains(&name) {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

fn smt_real(c: i64) -> String {
    if c < 0 {
        format!("(- {}.0)", c.unsigned_abs())
    } else {
        format!("{c}.0")
    }
}

fn smt_term(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(a) => match a {
            Atom::Order { lhs, op, rhs } => {
                let _ = write!(out, "({op} {} {})", smt_symbol(lhs.as_str()), smt_symbol(rhs.as_str()));
            }
            Atom::Diff { lhs, rhs, op, bound } => {
                let _ = write!(
                    out,
                    "({op} (- {} {}) {})",
                    smt_symbol(lhs.as_str()),
                    smt_symbol(rhs.as_str()),
                    smt_real(*bound)
                );
            }
            Atom::Pred { pred, var } => {
                let _ = write!(out, "({} {})", smt_symbol(pred.as_str()), smt_symbol(var.as_str()));
            }
            Atom::IsInt(v) => {
                let _ = write!(out, "(is_int {})", smt_symbol(v.as_str()));
            }
            Atom::True => out.push_str("true"),
            Atom::False => out.push_str("false"),
            Atom::PredOffset { .. } => unreachable!("rejected before rendering"),
        },
        Formula::Not(g) => {
            out.push_str("(not ");
            smt_term(g, out);
            out.push(')');
        }
        Formula::And(gs) | Formula::Or(gs) if gs.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" });
        }
        Formula::And(gs) | Formula::Or(gs) if gs.len() == 1 => smt_term(&gs[0], out),
        Formula::And(gs) | Formula::Or(gs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in gs {
                out.push(' ');
                smt_term(g, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            out.push_str(if matches!(f, Formula::Implies(..)) { "(=> " } else { "(= " });
            smt_term(a, out);
            out.push(' ');
            smt_term(b, out);
            out.push(')');
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            out.push_str(if matches!(f, Formula::Exists(..)) { "(exists (" } else { "(forall (" });
            smt_sorted_vars(vs.iter(), out);
            out.push_str(") ");
            smt_term(g, out);
            out.push(')');
        }
    }
}

fn smt_sorted_vars<'a>(vs: impl Iterator<Item = &'a Var>, out: &mut String) {
    for (i, v) in vs.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} Real)", smt_symbol(v.as_str()));
    }
}

/// Renders a complete SMT-LIB 2 script asserting `f`.
///
/// Free variables become `Real` constants, or are existentially closed when
/// `close_free` is set. The logic is `UFLRA` unless an integer guard occurs,
/// in which case `ALL` is used for `is_int`.
pub fn emit_smtlib(f: &Formula, close_free: bool) -> Result<String, SmtError> {
    let mut uses_int = false;
    let mut shorthand = None;
    f.for_each_atom(&mut |a| match a {
        Atom::IsInt(_) => uses_int = true,
        Atom::PredOffset { .. } if shorthand.is_none() => shorthand = Some(a.to_string()),
        _ => {}
    });
    if let Some(s) = shorthand {
        return Err(SmtError::Shorthand(s));
    }
    let mut out = String::new();
    let _ = writeln!(out, "(set-logic {})", if uses_int { "ALL" } else { "UFLRA" });
    for p in f.predicates() {
        let _ = writeln!(out, "(declare-fun {} (Real) Bool)", smt_symbol(p.as_str()));
    }
    let free: BTreeSet<Var> = free_vars(f);
    let mut body = String::new();
    smt_term(f, &mut body);
    if close_free && !free.is_empty() {
        let mut closed = String::from("(exists (");
        smt_sorted_vars(free.iter(), &mut closed);
        let _ = write!(closed, ") {body})");
        body = closed;
    } else {
        for v in &free {
            let _ = writeln!(out, "(declare-const {} Real)", smt_symbol(v.as_str()));
        }
    }
    let _ = writeln!(out, "(assert {body})");
    out.push_str("(check-sat)\n");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Turing machine files

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Machine(#[from] TmError),
}

fn tm_syntax(line: usize, message: impl Into<String>) -> TmParseError {
    TmParseError::Syntax { line, message: message.into() }
}

fn parse_bit(s: &str, line: usize) -> Result<bool, TmParseError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(tm_syntax(line, format!("expected 0 or 1, found `{s}`"))),
    }
}

/// Parses and validates a machine description.
pub fn parse_tm(text: &str) -> Result<TuringMachine, TmParseError> {
    let mut states: Option<Vec<String>> = None;
    let mut init = None;
    let mut halt = None;
    let mut trans = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(':').ok_or_else(|| tm_syntax(line, "expected `key: value`"))?;
        let words: Vec<&str> = rest.split_whitespace().collect();
        let single = |what: &str| -> Result<String, TmParseError> {
            match words.as_slice() {
                [w] => Ok(w.to_string()),
                _ => Err(tm_syntax(line, format!("`{what}` takes exactly one state name"))),
            }
        };
        match key.trim() {
            "states" => {
                if states.is_some() {
                    return Err(tm_syntax(line, "duplicate `states` line"));
                }
                if words.is_empty() {
                    return Err(tm_syntax(line, "`states` needs at least one name"));
                }
                states = Some(words.iter().map(|w| w.to_string()).collect());
            }
            "init" => init = Some(single("init")?),
            "halt" => halt = Some(single("halt")?),
            "trans" => match words.as_slice() {
                [q, r, "->", n, w, d] => {
                    let dir = match *d {
                        "L" => Dir::L,
                        "R" => Dir::R,
                        other => return Err(tm_syntax(line, format!("expected L or R, found `{other}`"))),
                    };
                    trans.push((q.to_string(), parse_bit(r, line)?, n.to_string(), parse_bit(w, line)?, dir));
                }
                _ => return Err(tm_syntax(line, "expected `trans: <q> <0|1> -> <q'> <0|1> <L|R>`")),
            },
            other => return Err(tm_syntax(line, format!("unknown key `{other}`"))),
        }
    }
    let states = states.ok_or_else(|| tm_syntax(0, "missing `states` line"))?;
    let init = init.ok_or_else(|| tm_syntax(0, "missing `init` line"))?;
    let halt = halt.ok_or_else(|| tm_syntax(0, "missing `halt` line"))?;
    Ok(TuringMachine::new(states, init, halt, trans)?)
}

/// Canonical machine file.
pub fn print_tm(m: &TuringMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", m.states.join(" "));
    let _ = writeln!(out, "init: {}", m.init);
    let _ = writeln!(out, "halt: {}", m.halt);
    // Declaration order of the source state, then the read symbol.
    let mut rows: BTreeMap<(usize, bool), String> = BTreeMap::new();
    for (q, read, act) in m.transitions() {
        let idx = m.state_index(q).unwrap_or(usize::MAX);
        rows.insert(
            (idx, read),
            format!("trans: {q} {} -> {} {} {}", u8::from(read), act.next, u8::from(act.write), act.dir),
        );
    }
    for row in rows.values() {
        let _ = writeln!(out, "{row}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_equal;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn parse_examples() {
        let f = parse_formula("(forall (x) (exists (y z) (and (< y x) (< x z))))").unwrap();
        let expected = Formula::forall(
            [v("x")],
            Formula::exists([v("y"), v("z")], Formula::and([Formula::lt("y", "x"), Formula::lt("x", "z")])),
        );
        assert_eq!(f, expected);

        let g = parse_formula("(and (int x) (int y) (<= (- x y) 2))").unwrap();
        assert_eq!(
            g,
            Formula::and([Formula::is_int("x"), Formula::is_int("y"), Formula::diff("x", "y", RelOp::Le, 2)])
        );

        let h = parse_formula("(P (+ x 2))").unwrap();
        assert_eq!(h, Formula::pred_offset("P", "x", 2));
    }

    #[test]
    fn print_examples() {
        assert_eq!(print_formula(&Formula::forall([v("x")], Formula::pred("P", "x"))), "(forall (x) (P x))");
        assert_eq!(print_formula(&Formula::diff("x", "y", RelOp::Eq, -1)), "(= (- x y) -1)");
        assert_eq!(print_formula(&Formula::tt()), "true");
    }

    #[test]
    fn duplicate_binders_are_parse_errors() {
        let err = parse_formula("(exists (x x) (P x))").unwrap_err();
        assert!(err.message.contains("duplicate"));
        assert_eq!(err.span, SourceSpan { start: 8, end: 13 });
    }

    #[test]
    fn error_spans_stay_inside_input() {
        for bad in [
            "",
            "(",
            "(and",
            ")",
            "(foo! x)",
            "(< x)",
            "(P (+ x y))",
            "(exists () true)",
            "(< (- x) 1)",
            "x",
            "(and true) y",
            "(int 3)",
        ] {
            let err = parse_formula(bad).unwrap_err();
            assert!(err.span.start <= err.span.end && err.span.end <= bad.len(), "{bad:?}: {err:?}");
            assert!(!err.message.is_empty());
        }
    }

    #[test]
    fn constant_bounds_need_an_anchor() {
        assert!(parse_formula("(<= x 5)").is_err());
        let opts = ParseOptions { zero_anchor: Some(v("zero")) };
        let f = parse_formula_with("(<= x 5)", &opts).unwrap();
        assert_eq!(f, Formula::diff("x", "zero", RelOp::Le, 5));
    }

    #[test]
    fn generated_names_round_trip() {
        let f = Formula::exists([v("_k0")], Formula::pred("P", "_k0"));
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
    }

    #[test]
    fn comments_are_skipped() {
        let f = parse_formula("; leading\n(P x) ; trailing").unwrap();
        assert!(alpha_equal(&f, &Formula::pred("P", "x")));
    }

    #[test]
    fn smt_basic() {
        let s = emit_smtlib(&Formula::pred("P", "x"), false).unwrap();
        assert!(s.contains("(set-logic UFLRA)"));
        assert!(s.contains("(declare-fun P (Real) Bool)"));
        assert!(s.contains("(declare-const x Real)"));
        assert!(s.contains("(assert (P x))"));
        assert!(s.ends_with("(check-sat)\n"));

        let s = emit_smtlib(&Formula::is_int("x"), false).unwrap();
        assert!(s.contains("(set-logic ALL)"));
        assert!(s.contains("(assert (is_int x))"));
    }

    #[test]
    fn smt_constants_and_closure() {
        let f = Formula::diff("x", "y", RelOp::Le, -2);
        let s = emit_smtlib(&f, true).unwrap();
        assert!(s.contains("(assert (exists ((x Real) (y Real)) (<= (- x y) (- 2.0))))"));
        assert!(!s.contains("declare-const"));
        let err = emit_smtlib(&Formula::pred_offset("P", "x", 1), false).unwrap_err();
        assert!(matches!(err, SmtError::Shorthand(_)));
    }

    #[test]
    fn smt_quotes_reserved_names() {
        let f = Formula::pred("Real", "div");
        let s = emit_smtlib(&f, false).unwrap();
        assert!(s.contains("(declare-fun |Real| (Real) Bool)"));
        assert!(s.contains("(|Real| |div|)"));
    }

    const M2: &str =
        "# halts after one step\nstates: qI qF\ninit: qI\nhalt: qF\ntrans: qI 0 -> qF 1 R\ntrans: qI 1 -> qF 1 R\n";

    #[test]
    fn tm_file_examples() {
        let m = parse_tm(M2).unwrap();
        assert_eq!(m.states.len(), 2);
        assert_eq!(m.delta.len(), 2);
        assert_eq!(parse_tm(&print_tm(&m)).unwrap(), m);

        let missing = M2.replace("trans: qI 1 -> qF 1 R\n", "");
        let err = parse_tm(&missing).unwrap_err();
        assert!(err.to_string().contains("delta not total"), "{err}");

        let out_of_halt = format!("{M2}trans: qF 0 -> qI 0 L\n");
        let err = parse_tm(&out_of_halt).unwrap_err();
        assert!(
            err.to_string().contains("halting state has outgoing transition")
                || err.to_string().contains("outgoing transition from halting state"),
            "{err}"
        );
    }

    #[test]
    fn tm_file_syntax_errors() {
        assert!(matches!(parse_tm("states qI"), Err(TmParseError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_tm("states: a\ninit: a\nhalt: a\ntrans: a 2 -> a 0 L"),
            Err(TmParseError::Syntax { line: 4, .. })
        ));
        let nondet = format!("{M2}trans: qI 0 -> qI 1 R\n");
        assert!(matches!(parse_tm(&nondet), Err(TmParseError::Machine(TmError::Nondeterministic { .. }))));
        // An exact duplicate is still functional.
        let dup = format!("{M2}trans: qI 0 -> qF 1 R\n");
        assert!(parse_tm(&dup).is_ok());
    }
}
