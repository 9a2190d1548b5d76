//! The `.acpm` specification format and the term syntax.
//!
//! ```text
//! act a, b, c, send/1, recv/1, comm;
//! comm a | b = c;
//! comm send | recv = comm;
//! meadow F 3;
//! set H = {a, b};
//! proc P = a . b + delta;
//! proc Q = encap(H, P || [u - u] -> send(2/2));
//! ```
//!
//! | notation | ASCII            |
//! |----------|------------------|
//! | δ        | `delta`          |
//! | x · y    | `x . y`          |
//! | x ∥ y    | `x \|\| y`       |
//! | x ⌊ y    | `x \|_ y`        |
//! | x \| y   | `x \| y`         |
//! | ∂_H(x)   | `encap(H, x)` or `encap({a, b}, x)` |
//! | p ⊲ x    | `[p] -> x`       |
//! | p⁻¹      | `inv(p)`         |
//!
//! `.` binds strongest, then the three parallel operators, then `+`. The
//! parallel operators associate to the left but cannot be mixed without
//! parentheses. `comm a | b = c` declares both `a|b` and `b|a`.

use std::fmt;

use num_bigint::BigUint;

use crate::meadow::{MeadowKind, QuantityTerm};
use crate::process::{is_identifier, ActionName, Alphabet, CommSpec, ProcessError, ProcessTerm, SpecContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigUint),
    Semi,
    Comma,
    Bar,
    BarBar,
    BarUnder,
    Eq,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::BarUnder => "|_",
            Tok::Eq => "=",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Arrow => "->",
            Tok::Dot => ".",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SpecError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && peek == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let digits: String = chars[start..i].iter().collect();
            out.push((Tok::Int(digits.parse().expect("decimal digits")), pos));
            continue;
        }
        let (tok, len) = match (c, peek) {
            ('|', Some('|')) => (Tok::BarBar, 2),
            ('|', Some('_')) => (Tok::BarUnder, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('|', _) => (Tok::Bar, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('=', _) => (Tok::Eq, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('.', _) => (Tok::Dot, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            _ => {
                return Err(SpecError { line, col, message: format!("unexpected character `{c}`") });
            }
        };
        advance(len, &mut i, &mut col);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Where names in process position are resolved.
#[derive(Clone, Copy)]
enum Names<'a> {
    /// Inside a `proc` body: only earlier definitions may be referenced.
    Definition { ctx: &'a SpecContext, defining: &'a str },
    /// A standalone term: unknown names become free process variables.
    Term { ctx: &'a SpecContext },
}

impl<'a> Names<'a> {
    fn ctx(&self) -> &'a SpecContext {
        match self {
            Names::Definition { ctx, .. } | Names::Term { ctx } => ctx,
        }
    }
}

struct Parser<'t> {
    toks: &'t [(Tok, Pos)],
    at: usize,
}

type PResult<T> = Result<T, SpecError>;

impl<'t> Parser<'t> {
    fn new(toks: &'t [(Tok, Pos)]) -> Self {
        Parser { toks, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_at<T>(&self, pos: Pos, message: impl Into<String>) -> PResult<T> {
        Err(SpecError { line: pos.line, col: pos.col, message: message.into() })
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.error_at(self.pos(), format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => self.unexpected("a name"),
        }
    }

    // ---- quantity expressions ----

    fn qexpr(&mut self) -> PResult<QuantityTerm> {
        let mut acc = self.qprod()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = QuantityTerm::add(acc, self.qprod()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = QuantityTerm::sub(acc, self.qprod()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn qprod(&mut self) -> PResult<QuantityTerm> {
        let mut acc = self.qunary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = QuantityTerm::mul(acc, self.qunary()?);
                }
                Tok::Slash => {
                    self.bump();
                    acc = QuantityTerm::div(acc, self.qunary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn qunary(&mut self) -> PResult<QuantityTerm> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(QuantityTerm::neg(self.qunary()?));
        }
        self.qatom()
    }

    fn qatom(&mut self) -> PResult<QuantityTerm> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(QuantityTerm::natural(n))
            }
            Tok::Ident(name) if name == "inv" && *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                let inner = self.qexpr()?;
                self.expect(Tok::RParen)?;
                Ok(QuantityTerm::inv(inner))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(QuantityTerm::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.qexpr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => self.unexpected("a quantity"),
        }
    }

    // ---- process expressions ----

    fn pexpr(&mut self, names: Names) -> PResult<ProcessTerm> {
        let mut acc = self.ppar(names)?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = ProcessTerm::alt(acc, self.ppar(names)?);
        }
        Ok(acc)
    }

    fn ppar(&mut self, names: Names) -> PResult<ProcessTerm> {
        let mut acc = self.pseq(names)?;
        let mut kind: Option<Tok> = None;
        loop {
            let tok = self.peek().clone();
            if !matches!(tok, Tok::BarBar | Tok::BarUnder | Tok::Bar) {
                return Ok(acc);
            }
            if let Some(k) = &kind {
                if *k != tok {
                    return self.error_at(
                        self.pos(),
                        format!("cannot mix {k} and {tok} without parentheses"),
                    );
                }
            }
            self.bump();
            let rhs = self.pseq(names)?;
            acc = match tok {
                Tok::BarBar => ProcessTerm::par(acc, rhs),
                Tok::BarUnder => ProcessTerm::left_merge(acc, rhs),
                _ => ProcessTerm::comm_merge(acc, rhs),
            };
            kind = Some(tok);
        }
    }

    fn pseq(&mut self, names: Names) -> PResult<ProcessTerm> {
        let mut acc = self.pfac(names)?;
        while *self.peek() == Tok::Dot {
            self.bump();
            acc = ProcessTerm::seq(acc, self.pfac(names)?);
        }
        Ok(acc)
    }

    fn pfac(&mut self, names: Names) -> PResult<ProcessTerm> {
        let ctx = names.ctx();
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.pexpr(names)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::LBracket => {
                self.bump();
                let q = self.qexpr()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Arrow)?;
                Ok(ProcessTerm::guard(q, self.pfac(names)?))
            }
            Tok::Ident(name) if name == "delta" => {
                self.bump();
                Ok(ProcessTerm::Deadlock)
            }
            Tok::Ident(name) if name == "encap" && *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                let h = if *self.peek() == Tok::LBrace {
                    let (set, pos) = self.name_set()?;
                    ctx.alphabet()
                        .encap_set(&set)
                        .or_else(|e| self.error_at(pos, e.to_string()))?
                } else {
                    let (set, pos) = self.ident()?;
                    match ctx.set(&set) {
                        Some(h) => h.clone(),
                        None => return self.error_at(pos, format!("unknown encapsulation set `{set}`")),
                    }
                };
                self.expect(Tok::Comma)?;
                let body = self.pexpr(names)?;
                self.expect(Tok::RParen)?;
                Ok(ProcessTerm::encap(h, body))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(action) = ctx.alphabet().get(&name) {
                    let action = action.clone();
                    let args = if *self.peek() == Tok::LParen {
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            args.push(self.qexpr()?);
                            while *self.peek() == Tok::Comma {
                                self.bump();
                                args.push(self.qexpr()?);
                            }
                        }
                        self.expect(Tok::RParen)?;
                        Some(args)
                    } else {
                        None
                    };
                    let used = args.as_ref().map_or(0, Vec::len);
                    if let Some(declared) = ctx.arity(&action) {
                        if declared != used {
                            return self.error_at(
                                pos,
                                ProcessError::ArityMismatch { name, declared, used }.to_string(),
                            );
                        }
                    }
                    return Ok(match args {
                        Some(args) => ProcessTerm::DataAction(action, args),
                        None => ProcessTerm::Action(action),
                    });
                }
                if *self.peek() == Tok::LParen {
                    return self.error_at(pos, format!("unknown action `{name}`"));
                }
                match names {
                    Names::Definition { ctx, defining } => {
                        if name == defining {
                            self.error_at(pos, format!("recursive definition of `{name}`"))
                        } else if ctx.definition(&name).is_none() {
                            self.error_at(pos, format!("undefined name `{name}`"))
                        } else {
                            Ok(ProcessTerm::ProcVar(name))
                        }
                    }
                    Names::Term { .. } => Ok(ProcessTerm::ProcVar(name)),
                }
            }
            _ => self.unexpected("a process term"),
        }
    }

    fn name_set(&mut self) -> PResult<(Vec<String>, Pos)> {
        let pos = self.pos();
        self.expect(Tok::LBrace)?;
        let mut names = Vec::new();
        if *self.peek() != Tok::RBrace {
            names.push(self.ident()?.0);
            while *self.peek() == Tok::Comma {
                self.bump();
                names.push(self.ident()?.0);
            }
        }
        self.expect(Tok::RBrace)?;
        Ok((names, pos))
    }
}

enum Decl<'t> {
    Act(Vec<(String, Option<usize>, Pos)>),
    Comm { left: (String, Pos), right: (String, Pos), result: (String, Pos), pos: Pos },
    Meadow(MeadowKind, Pos),
    Set { name: String, members: Vec<String>, pos: Pos },
    Proc { name: String, pos: Pos, body: &'t [(Tok, Pos)] },
}

fn declarations(toks: &[(Tok, Pos)]) -> PResult<Vec<Decl<'_>>> {
    let mut p = Parser::new(toks);
    let mut decls = Vec::new();
    while *p.peek() != Tok::Eof {
        let (keyword, pos) = p.ident()?;
        let decl = match keyword.as_str() {
            "act" => {
                let mut names = Vec::new();
                loop {
                    let (name, pos) = p.ident()?;
                    let arity = if *p.peek() == Tok::Slash {
                        p.bump();
                        match p.bump() {
                            Tok::Int(n) => Some(usize::try_from(n).map_err(|_| SpecError {
                                line: pos.line,
                                col: pos.col,
                                message: "arity too large".into(),
                            })?),
                            _ => return p.unexpected("an arity"),
                        }
                    } else {
                        None
                    };
                    names.push((name, arity, pos));
                    if *p.peek() != Tok::Comma {
                        break;
                    }
                    p.bump();
                }
                Decl::Act(names)
            }
            "comm" => {
                let left = p.ident()?;
                p.expect(Tok::Bar)?;
                let right = p.ident()?;
                p.expect(Tok::Eq)?;
                let result = p.ident()?;
                Decl::Comm { left, right, result, pos }
            }
            "meadow" => {
                let mut text = String::new();
                while !matches!(p.peek(), Tok::Semi | Tok::Eof) {
                    match p.bump() {
                        Tok::Ident(s) => text.push_str(&s),
                        Tok::Int(n) => text.push_str(&n.to_string()),
                        other => return p.error_at(pos, format!("unexpected {other} in meadow declaration")),
                    }
                }
                let kind = text.parse::<MeadowKind>().or_else(|e| p.error_at(pos, e.to_string()))?;
                Decl::Meadow(kind, pos)
            }
            "set" => {
                let (name, _) = p.ident()?;
                p.expect(Tok::Eq)?;
                let (members, _) = p.name_set()?;
                Decl::Set { name, members, pos }
            }
            "proc" => {
                let (name, _) = p.ident()?;
                p.expect(Tok::Eq)?;
                let start = p.at;
                while !matches!(p.peek(), Tok::Semi | Tok::Eof) {
                    p.bump();
                }
                // Bodies are parsed once the alphabet is complete; the
                // slice keeps the terminating `;` as its last token.
                Decl::Proc { name, pos, body: &toks[start..=p.at] }
            }
            other => return p.error_at(pos, format!("unknown declaration `{other}`")),
        };
        decls.push(decl);
        p.expect(Tok::Semi)?;
    }
    Ok(decls)
}

/// Parses and validates a whole specification.
/// The specification used when none is given.
pub const SAMPLE_SPEC: &str = include_str!("../specs/handshake.acpm");

pub fn parse_spec(src: &str) -> Result<SpecContext, SpecError> {
    let toks = lex(src)?;
    let decls = declarations(&toks)?;
    let err = |pos: Pos, message: String| SpecError { line: pos.line, col: pos.col, message };

    let mut alphabet = Alphabet::default();
    let mut arities = Vec::new();
    for d in &decls {
        if let Decl::Act(names) = d {
            for (name, arity, pos) in names {
                let action = ActionName::new(name).map_err(|e| err(*pos, e.to_string()))?;
                if let Some(n) = arity {
                    arities.push((action.clone(), *n));
                }
                alphabet.insert(action);
            }
        }
    }

    let mut meadow = None;
    let mut comm = CommSpec::new();
    for d in &decls {
        match d {
            Decl::Meadow(kind, pos) => {
                if meadow.replace(*kind).is_some() {
                    return Err(err(*pos, "meadow declared more than once".into()));
                }
            }
            Decl::Comm { left, right, result, pos } => {
                let name = |(s, p): &(String, Pos)| match alphabet.get(s) {
                    Some(n) => Ok(n.clone()),
                    None => Err(err(*p, format!("unknown action `{s}`"))),
                };
                let (l, r, c) = (name(left)?, name(right)?, name(result)?);
                for (x, y) in [(&l, &r), (&r, &l)] {
                    if let Some(existing) = comm.get(x, y) {
                        if *existing != c {
                            return Err(err(
                                *pos,
                                format!("asymmetric communication: {x}|{y} is already {existing}, not {c}"),
                            ));
                        }
                    }
                }
                comm.insert_symmetric(l, r, c);
                let report = comm.validate(&alphabet);
                if !report.is_valid() {
                    return Err(err(*pos, format!("invalid communication function: {report}")));
                }
            }
            _ => {}
        }
    }

    let mut ctx = SpecContext::new(alphabet, comm, meadow.unwrap_or(MeadowKind::Rationals))
        .map_err(|e| err(Pos { line: 1, col: 1 }, e.to_string()))?;
    for (action, n) in arities {
        ctx.declare_arity(&action, n).expect("declared action");
    }

    for d in &decls {
        match d {
            Decl::Set { name, members, pos } => {
                let set = ctx.alphabet().encap_set(members).map_err(|e| err(*pos, e.to_string()))?;
                ctx.define_set(name, set).map_err(|e| err(*pos, e.to_string()))?;
            }
            Decl::Proc { name, pos, body } => {
                if !is_identifier(name) {
                    return Err(err(*pos, format!("`{name}` is not a valid process name")));
                }
                let mut p = Parser::new(body);
                let term = p.pexpr(Names::Definition { ctx: &ctx, defining: name })?;
                if !matches!(p.peek(), Tok::Semi | Tok::Eof) {
                    return p.unexpected("`;`");
                }
                ctx.define(name, term).map_err(|e| err(*pos, e.to_string()))?;
            }
            _ => {}
        }
    }
    Ok(ctx)
}

/// Parses a standalone process term against `ctx`. Names that are neither
/// actions nor keywords become process variables (definition references).
pub fn parse_term(src: &str, ctx: &SpecContext) -> Result<ProcessTerm, SpecError> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks);
    let term = p.pexpr(Names::Term { ctx })?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(term)
}

/// Parses a standalone quantity expression.
pub fn parse_quantity(src: &str) -> Result<QuantityTerm, SpecError> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks);
    let q = p.qexpr()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meadow::QuantityTerm as Q;
    use ProcessTerm as P;

    #[test]
    fn sample_spec_parses() {
        let ctx = parse_spec(SAMPLE_SPEC).unwrap();
        assert_eq!(ctx.alphabet().len(), 7);
        let system = ctx.definition("System").unwrap();
        let nf = crate::normalizer::normalize(system, &ctx).unwrap();
        assert_eq!(nf.to_string(), "comm(1) . d");
    }

    const SAMPLE: &str = "act a,b,c; comm a|b=c; meadow F 3; proc P = a . b + delta;";

    fn ctx() -> SpecContext {
        parse_spec("act a, b, c, send, recv, comm; comm a|b=c; comm send|recv=comm; set H = {a, b};").unwrap()
    }

    #[test]
    fn sample_spec_keeps_the_parse_tree() {
        let c = parse_spec(SAMPLE).unwrap();
        assert_eq!(c.meadow(), MeadowKind::prime_field(3).unwrap());
        assert_eq!(
            c.definition("P").unwrap(),
            &P::alt(P::seq(P::act("a"), P::act("b")), P::Deadlock)
        );
        let (a, b) = (c.alphabet().get("a").unwrap(), c.alphabet().get("b").unwrap());
        assert_eq!(c.comm().get(b, a).unwrap().as_str(), "c");
    }

    #[test]
    fn subtraction_is_sugar() {
        let t = parse_term("[u - u] -> a", &ctx()).unwrap();
        assert_eq!(t, P::guard(Q::add(Q::var("u"), Q::neg(Q::var("u"))), P::act("a")));
    }

    #[test]
    fn undeclared_comm_result() {
        let e = parse_spec("act a, b; comm a|b=c;").unwrap_err();
        assert_eq!((e.line, e.col), (1, 20));
        assert!(e.message.contains("unknown action `c`"), "{e}");
    }

    #[test]
    fn simple_terms() {
        let c = ctx();
        assert_eq!(parse_term("a || b", &c).unwrap(), P::par(P::act("a"), P::act("b")));
        assert_eq!(parse_term("delta", &c).unwrap(), P::Deadlock);
        assert_eq!(
            parse_term("send(2/2)", &c).unwrap(),
            P::data("send", vec![Q::mul(Q::natural(2u32.into()), Q::inv(Q::natural(2u32.into())))])
        );
    }

    #[test]
    fn precedence() {
        let c = ctx();
        assert_eq!(
            parse_term("a + b . c", &c).unwrap(),
            P::alt(P::act("a"), P::seq(P::act("b"), P::act("c")))
        );
        assert_eq!(
            parse_term("a || b . c + c", &c).unwrap(),
            P::alt(P::par(P::act("a"), P::seq(P::act("b"), P::act("c"))), P::act("c"))
        );
        assert_eq!(
            parse_term("a | b | c", &c).unwrap(),
            P::comm_merge(P::comm_merge(P::act("a"), P::act("b")), P::act("c"))
        );
        assert_eq!(
            parse_term("[1] -> a . b", &c).unwrap(),
            P::seq(P::guard(Q::One, P::act("a")), P::act("b"))
        );
    }

    #[test]
    fn mixing_parallel_operators_needs_parentheses() {
        let c = ctx();
        let e = parse_term("a || b | c", &c).unwrap_err();
        assert!(e.message.contains("cannot mix"), "{e}");
        assert!(parse_term("(a || b) | c", &c).is_ok());
    }

    #[test]
    fn encapsulation_by_name_or_inline() {
        let c = ctx();
        let named = parse_term("encap(H, a || b)", &c).unwrap();
        let inline = parse_term("encap({b, a}, a || b)", &c).unwrap();
        assert_eq!(named, inline);
        assert!(parse_term("encap(K, a)", &c).is_err());
        assert!(parse_term("encap({z}, a)", &c).is_err());
    }

    #[test]
    fn semantic_errors() {
        assert!(parse_spec("act a; meadow F 4;").unwrap_err().message.contains("not prime"));
        assert!(parse_spec("act a; proc P = a . P;").unwrap_err().message.contains("recursive"));
        assert!(parse_spec("act a; proc P = Q; proc Q = a;").unwrap_err().message.contains("undefined"));
        assert!(parse_spec("act a,b,c,d; comm a|b=c; comm b|a=d;").unwrap_err().message.contains("asymmetric"));
        let e = parse_spec("act a,b,c,d,e; comm a|b=c; comm c|d=e;").unwrap_err();
        assert!(e.message.contains("not associative"), "{e}");
        assert!(parse_spec("act s/1; proc P = s;").unwrap_err().message.contains("arity"));
        assert!(parse_spec("act s/1; proc P = s(1);").is_ok());
        assert!(parse_spec("act a; set H = {b};").is_err());
        assert!(parse_spec("act delta;").is_err());
        assert!(parse_spec("act a; bogus;").is_err());
    }

    #[test]
    fn syntax_error_location() {
        let e = parse_spec("act a;\nproc P = a +;\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 13));
        let e = parse_term("a ? b", &ctx()).unwrap_err();
        assert_eq!(e.to_string(), "1:3: unexpected character `?`");
    }

    #[test]
    fn definitions_are_inlined() {
        let c = parse_spec("act a, b, c; proc P = a; proc Q = P + c;").unwrap();
        assert_eq!(c.definition("Q").unwrap(), &P::alt(P::act("a"), P::act("c")));
        let t = parse_term("Q . b", &c).unwrap();
        assert_eq!(c.inline_definitions(&t).unwrap().to_string(), "(a + c) . b");
        let t = parse_term("R", &c).unwrap();
        assert!(c.inline_definitions(&t).is_err());
    }

    #[test]
    fn quantities() {
        assert_eq!(parse_quantity("-3/4").unwrap().to_string(), "-3 / 4");
        assert_eq!(parse_quantity("inv(u) * (v + 1)").unwrap(), Q::mul(Q::inv(Q::var("u")), Q::add(Q::var("v"), Q::One)));
        assert!(parse_quantity("u +").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let c = parse_spec("// alphabet\nact a; // trailing\nproc P = a;").unwrap();
        assert!(c.definition("P").is_some());
    }
}
