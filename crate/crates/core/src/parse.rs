//! Reader and writer for the knowledge language.
//!
//! ```plain
//! program    := (directive | statement)*
//! directive  := ":-" atom "."
//! statement  := [number "::"] atom [":-" orexpr] [annotation] "."
//! orexpr     := andexpr (";" andexpr)*
//! andexpr    := goal ("," goal)*
//! goal       := "not" "(" orexpr ")" | "\+" goal | "(" orexpr ")" | term [cmpop term]
//! cmpop      := ">" | ">=" | "<" | "=<" | "==" | "\=="
//! annotation := "@" key "=" symbol ("," key "=" symbol)*   key := "id" | "src" | "time"
//! term       := variable | number | phrase | list | symbol ["(" term ("," term)* ")"]
//! list       := "[" [term ("," term)*] ["|" variable] "]"
//! query      := orexpr ["?"]
//! ```
//!
//! `%` starts a line comment. Phrases are quoted with `'` or `"`
//! interchangeably and may not contain either quote character.
//!
//! A `:- traced(pred, N).` directive declares that following fact rows of
//! `pred` written at arity `N` carry provenance inline: the first three
//! arguments are a one-element id list, a one-element source list and a time
//! tag, which are folded into the statement metadata. Rows already at the
//! logical arity `N - 3` pass through unchanged.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::term::{Atom, CompareOp, GoalExpr, Statement, Term};

/// Goal names the engine evaluates itself; not definable by clauses.
pub const BUILTINS: &[(&str, usize)] = &[("append", 3), ("append", 2), ("sort", 2)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}, col {}: {}", self.line, self.col, self.msg)
    }
}

/// A `:- ... .` directive in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Traced { pred: String, written_arity: usize },
    Selectional { role: String, event: String, ty: String },
    SourceDefault(String),
}

/// Result of parsing a whole program text.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramText {
    pub statements: Vec<Statement>,
    pub directives: Vec<Directive>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Sym(String),
    Var(String),
    Num(f64),
    Phrase(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Question,
    Pipe,
    At,
    Assign,
    ColonDash,
    ProbSep,
    NegPrefix,
    Cmp(CompareOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Var(v) => format!("variable `{v}`"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Phrase(p) => format!("phrase \"{p}\""),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::Question => "`?`".to_string(),
            Tok::Pipe => "`|`".to_string(),
            Tok::At => "`@`".to_string(),
            Tok::Assign => "`=`".to_string(),
            Tok::ColonDash => "`:-`".to_string(),
            Tok::ProbSep => "`::`".to_string(),
            Tok::NegPrefix => "`\\+`".to_string(),
            Tok::Cmp(op) => format!("`{}`", op.as_str()),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let err = |line: usize, col: usize, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| out.push(Spanned { tok, line: tl, col: tc });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | '[' | ']' | ',' | ';' | '?' | '|' | '@' => {
                push(match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '?' => Tok::Question,
                    '|' => Tok::Pipe,
                    _ => Tok::At,
                });
                i += 1;
                col += 1;
            }
            '.' => {
                push(Tok::Dot);
                i += 1;
                col += 1;
            }
            ':' => match chars.get(i + 1) {
                Some('-') => {
                    push(Tok::ColonDash);
                    i += 2;
                    col += 2;
                }
                Some(':') => {
                    push(Tok::ProbSep);
                    i += 2;
                    col += 2;
                }
                _ => return Err(err(line, col, "stray `:`".to_string())),
            },
            '\\' => match (chars.get(i + 1), chars.get(i + 2)) {
                (Some('+'), _) => {
                    push(Tok::NegPrefix);
                    i += 2;
                    col += 2;
                }
                (Some('='), Some('=')) => {
                    push(Tok::Cmp(CompareOp::Ne));
                    i += 3;
                    col += 3;
                }
                _ => return Err(err(line, col, "stray `\\`".to_string())),
            },
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Cmp(CompareOp::Ge));
                    i += 2;
                    col += 2;
                } else {
                    push(Tok::Cmp(CompareOp::Gt));
                    i += 1;
                    col += 1;
                }
            }
            '<' => {
                push(Tok::Cmp(CompareOp::Lt));
                i += 1;
                col += 1;
            }
            '=' => match chars.get(i + 1) {
                Some('<') => {
                    push(Tok::Cmp(CompareOp::Le));
                    i += 2;
                    col += 2;
                }
                Some('=') => {
                    push(Tok::Cmp(CompareOp::Eq));
                    i += 2;
                    col += 2;
                }
                _ => {
                    push(Tok::Assign);
                    i += 1;
                    col += 1;
                }
            },
            '\'' | '"' => {
                let quote = c;
                let other = if quote == '\'' { '"' } else { '\'' };
                let mut j = i + 1;
                let mut content = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(err(tl, tc, "unterminated phrase".to_string()))
                        }
                        Some(&ch) if ch == quote => break,
                        Some(&ch) if ch == other => {
                            return Err(err(
                                tl,
                                tc,
                                "phrase may not contain a quote character".to_string(),
                            ))
                        }
                        Some(&ch) => {
                            content.push(ch);
                            j += 1;
                        }
                    }
                }
                let width = j + 1 - i;
                push(Tok::Phrase(content));
                i = j + 1;
                col += width;
            }
            _ if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                if c == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let n: f64 = text
                    .parse()
                    .map_err(|_| err(tl, tc, format!("bad number `{text}`")))?;
                push(Tok::Num(n));
                col += i - start;
            }
            _ if c.is_ascii_lowercase() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(Tok::Sym(chars[start..i].iter().collect()));
                col += i - start;
            }
            _ if c.is_ascii_uppercase() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(Tok::Var(chars[start..i].iter().collect()));
                col += i - start;
            }
            _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    anon: u64,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, anon: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self
                .toks
                .last()
                .map(|s| (s.line, s.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let got = t.describe();
                self.fail(format!("expected {}, found {got}", want.describe()))
            }
            None => self.fail(format!("expected {}, found end of input", want.describe())),
        }
    }

    fn expect_sym(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Sym(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => {
                let got = t.describe();
                self.fail(format!("expected {what}, found {got}"))
            }
            None => self.fail(format!("expected {what}, found end of input")),
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.pos += 1;
                if v == "_" {
                    self.anon += 1;
                    Ok(Term::Variable(format!("_A{}", self.anon)))
                } else {
                    Ok(Term::Variable(v))
                }
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::Number(n))
            }
            Some(Tok::Phrase(p)) => {
                self.pos += 1;
                Ok(Term::Phrase(p))
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() != Some(&Tok::RBracket) {
                    items.push(self.parse_term()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        items.push(self.parse_term()?);
                    }
                }
                let tail = if self.peek() == Some(&Tok::Pipe) {
                    self.pos += 1;
                    match self.bump() {
                        Some(Tok::Var(v)) => Some(v),
                        _ => return self.fail("list tail must be a variable"),
                    }
                } else {
                    None
                };
                self.expect(&Tok::RBracket)?;
                Ok(Term::List(items, tail))
            }
            Some(Tok::Sym(s)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let args = self.parse_arglist()?;
                    Ok(Term::Compound(s, args))
                } else {
                    Ok(Term::Symbol(s))
                }
            }
            Some(t) => {
                let got = t.describe();
                self.fail(format!("expected a term, found {got}"))
            }
            None => self.fail("expected a term, found end of input"),
        }
    }

    fn parse_arglist(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        args.push(self.parse_term()?);
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.parse_term()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn parse_head(&mut self) -> Result<Atom, ParseError> {
        let pred = self.expect_sym("a predicate name")?;
        let args = if self.peek() == Some(&Tok::LParen) {
            self.parse_arglist()?
        } else {
            Vec::new()
        };
        if BUILTINS.contains(&(pred.as_str(), args.len())) {
            return self.fail(format!("`{pred}/{}` is a reserved builtin", args.len()));
        }
        Ok(Atom { pred, args })
    }

    fn parse_or(&mut self) -> Result<GoalExpr, ParseError> {
        let mut parts = Vec::new();
        parts.push(self.parse_and()?);
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { GoalExpr::Or(parts) })
    }

    fn parse_and(&mut self) -> Result<GoalExpr, ParseError> {
        let mut parts = Vec::new();
        parts.push(self.parse_goal()?);
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            parts.push(self.parse_goal()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { GoalExpr::And(parts) })
    }

    fn parse_goal(&mut self) -> Result<GoalExpr, ParseError> {
        match self.peek() {
            Some(Tok::NegPrefix) => {
                self.pos += 1;
                Ok(GoalExpr::Not(Box::new(self.parse_goal()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_or()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Sym(s)) if s == "not" && self.peek2() == Some(&Tok::LParen) => {
                self.pos += 1;
                self.expect(&Tok::LParen)?;
                let inner = self.parse_or()?;
                self.expect(&Tok::RParen)?;
                Ok(GoalExpr::Not(Box::new(inner)))
            }
            _ => {
                let left = self.parse_term()?;
                if let Some(Tok::Cmp(op)) = self.peek().cloned() {
                    self.pos += 1;
                    let right = self.parse_term()?;
                    return Ok(GoalExpr::Compare(op, left, right));
                }
                match left {
                    Term::Symbol(pred) => Ok(self.atom_goal(Atom { pred, args: Vec::new() })),
                    Term::Compound(pred, args) => Ok(self.atom_goal(Atom { pred, args })),
                    other => self.fail(format!("`{other}` cannot stand alone as a goal")),
                }
            }
        }
    }

    fn atom_goal(&self, atom: Atom) -> GoalExpr {
        if BUILTINS.contains(&(atom.pred.as_str(), atom.args.len())) {
            GoalExpr::Builtin(atom.pred, atom.args)
        } else {
            GoalExpr::Atom(atom)
        }
    }

    /// Returns the statement plus whether an annotation was present.
    fn parse_statement(&mut self) -> Result<(Statement, bool), ParseError> {
        let prob = if matches!((self.peek(), self.peek2()), (Some(Tok::Num(_)), Some(Tok::ProbSep)))
        {
            let Some(Tok::Num(p)) = self.bump() else { unreachable!() };
            self.pos += 1;
            if !(0.0..=1.0).contains(&p) {
                return self.fail(format!("probability {p} outside [0, 1]"));
            }
            p
        } else {
            1.0
        };
        let head = self.parse_head()?;
        let body = if self.peek() == Some(&Tok::ColonDash) {
            self.pos += 1;
            Some(self.parse_or()?)
        } else {
            None
        };
        // Source stays empty here; parse_program fills in the default for
        // statements whose annotation did not set one.
        let mut stmt = Statement {
            head,
            body,
            prob,
            id: String::new(),
            source: String::new(),
            time_tag: String::from("t_g"),
        };
        let mut annotated = false;
        if self.peek() == Some(&Tok::At) {
            self.pos += 1;
            annotated = true;
            loop {
                let key = self.expect_sym("an annotation key")?;
                self.expect(&Tok::Assign)?;
                let value = self.expect_sym("an annotation value")?;
                match key.as_str() {
                    "id" => stmt.id = value,
                    "src" => stmt.source = value,
                    "time" => stmt.time_tag = value,
                    other => return self.fail(format!("unknown annotation key `{other}`")),
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::Dot)?;
        Ok((stmt, annotated))
    }

    fn parse_directive(&mut self) -> Result<Directive, ParseError> {
        self.expect(&Tok::ColonDash)?;
        let name = self.expect_sym("a directive name")?;
        let args = self.parse_arglist()?;
        self.expect(&Tok::Dot)?;
        let sym_arg = |t: &Term| match t {
            Term::Symbol(s) => Some(s.clone()),
            _ => None,
        };
        match (name.as_str(), args.as_slice()) {
            ("traced", [Term::Symbol(pred), Term::Number(n)]) => {
                if *n < 4.0 || *n != (*n as usize) as f64 {
                    return self.fail("traced arity must be an integer of at least 4");
                }
                Ok(Directive::Traced { pred: pred.clone(), written_arity: *n as usize })
            }
            ("selectional", [a, b, c]) => {
                match (sym_arg(a), sym_arg(b), sym_arg(c)) {
                    (Some(role), Some(event), Some(ty)) => {
                        Ok(Directive::Selectional { role, event, ty })
                    }
                    _ => self.fail("selectional takes three symbols"),
                }
            }
            ("source_default", [Term::Symbol(s)]) => Ok(Directive::SourceDefault(s.clone())),
            ("traced", _) => self.fail("traced takes a predicate symbol and an arity"),
            ("selectional", _) => self.fail("selectional takes three symbols"),
            ("source_default", _) => self.fail("source_default takes one symbol"),
            (other, _) => self.fail(format!("unknown directive `{other}`")),
        }
    }
}

/// Parses a full program text, applying `traced` and `source_default`
/// directives to the statements that follow them.
pub fn parse_program(text: &str) -> Result<ProgramText, ParseError> {
    let mut p = Parser::new(text)?;
    let mut statements = Vec::new();
    let mut directives = Vec::new();
    let mut traced: alloc::collections::BTreeMap<String, usize> = Default::default();
    let mut default_source = String::from("kb");
    while p.peek().is_some() {
        if p.peek() == Some(&Tok::ColonDash) {
            let d = p.parse_directive()?;
            match &d {
                Directive::Traced { pred, written_arity } => {
                    traced.insert(pred.clone(), *written_arity);
                }
                Directive::SourceDefault(s) => default_source = s.clone(),
                Directive::Selectional { .. } => {}
            }
            directives.push(d);
            continue;
        }
        let start = p.here();
        let (mut stmt, annotated) = p.parse_statement()?;
        let at = |msg: String| ParseError { line: start.0, col: start.1, msg };
        if let Some(&written) = traced.get(&stmt.head.pred) {
            let logical = written - 3;
            let arity = stmt.head.args.len();
            if stmt.is_fact() && arity == written {
                if annotated {
                    return Err(at("traced row cannot also carry an annotation".to_string()));
                }
                strip_traced(&mut stmt).map_err(at)?;
            } else if arity != logical {
                return Err(at(format!(
                    "`{}` is traced at arity {written}: rows must use arity {written} or {logical}, found {arity}",
                    stmt.head.pred
                )));
            }
        }
        if stmt.source.is_empty() {
            stmt.source = default_source.clone();
        }
        statements.push(stmt);
    }
    Ok(ProgramText { statements, directives })
}

fn strip_traced(stmt: &mut Statement) -> Result<(), String> {
    let singleton = |t: &Term, what: &str| -> Result<String, String> {
        match t {
            Term::List(items, None) if items.len() == 1 => match &items[0] {
                Term::Symbol(s) => Ok(s.clone()),
                other => Err(format!("traced {what} list holds `{other}`, expected a symbol")),
            },
            _ => Err(format!("traced {what} must be a one-element list")),
        }
    };
    let id = singleton(&stmt.head.args[0], "id")?;
    let source = singleton(&stmt.head.args[1], "source")?;
    let time = match &stmt.head.args[2] {
        Term::Symbol(s) => s.clone(),
        other => return Err(format!("traced time tag `{other}` must be a symbol")),
    };
    stmt.head.args.drain(..3);
    stmt.id = id;
    stmt.source = source;
    stmt.time_tag = time;
    Ok(())
}

/// Parses a query into its top-level goals, to be solved left to right
/// under shared bindings. A trailing `?` is optional.
pub fn parse_query(text: &str) -> Result<Vec<GoalExpr>, ParseError> {
    let mut p = Parser::new(text)?;
    if p.peek().is_none() {
        return p.fail("empty query");
    }
    let expr = p.parse_or()?;
    if p.peek() == Some(&Tok::Question) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return p.fail("trailing input after query");
    }
    Ok(match expr {
        GoalExpr::And(goals) => goals,
        single => alloc::vec![single],
    })
}

/// Parses exactly one statement (no directives).
pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let program = parse_program(text)?;
    match (program.statements.len(), program.directives.len()) {
        (1, 0) => Ok(program.statements.into_iter().next().unwrap()),
        _ => Err(ParseError { line: 1, col: 1, msg: "expected exactly one statement".to_string() }),
    }
}

/// Canonical text form: probability prefix only when below certain, `src`
/// only when not `kb`, `time` only when not `t_g`.
pub fn print_statement(stmt: &Statement) -> String {
    let mut s = String::new();
    if stmt.prob != 1.0 {
        s.push_str(&format!("{}::", stmt.prob));
    }
    s.push_str(&stmt.head.to_string());
    if let Some(body) = &stmt.body {
        s.push_str(" :- ");
        s.push_str(&body.to_string());
    }
    let mut ann = Vec::new();
    if !stmt.id.is_empty() {
        ann.push(format!("id={}", stmt.id));
    }
    if stmt.source != "kb" {
        ann.push(format!("src={}", stmt.source));
    }
    if stmt.time_tag != "t_g" {
        ann.push(format!("time={}", stmt.time_tag));
    }
    if !ann.is_empty() {
        s.push_str(" @");
        s.push_str(&ann.join(", "));
    }
    s.push('.');
    s
}
