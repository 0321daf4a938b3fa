use std::collections::BTreeSet;
use std::fmt;

use symkit::GaussRat;

use crate::ast::{Declarations, Expr, LambdaItem, ProblemFile, Stored, SymmetryFile, Task, TaskKind};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}", line = pos.line, col = pos.col)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
    pub expected: BTreeSet<String>,
}

const SYMBOLS: &str = ";,=+-*/^()[]";

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Int(s), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Ident(s), pos));
        } else if SYMBOLS.contains(c) {
            chars.next();
            col += 1;
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(SyntaxError {
                pos,
                message: format!("unexpected character `{c}`"),
                expected: BTreeSet::new(),
            });
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    expected: BTreeSet<String>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            expected: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        self.expected.clear();
        t
    }

    fn error(&self) -> SyntaxError {
        let (tok, pos) = &self.toks[self.at];
        let list: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        SyntaxError {
            pos: *pos,
            message: format!("expected {}, found {tok}", list.join(" or ")),
            expected: self.expected.clone(),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            self.expected.insert(format!("`{c}`"));
            false
        }
    }

    fn sym(&mut self, c: char) -> PResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == k) {
            self.bump();
            true
        } else {
            self.expected.insert(format!("`{k}`"));
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if s != "i" && s != "D" => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => {
                self.expected.insert("identifier".into());
                Err(self.error())
            }
        }
    }

    fn int(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Int(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => {
                self.expected.insert("integer".into());
                Err(self.error())
            }
        }
    }

    fn small_int<T: std::str::FromStr>(&mut self) -> PResult<T> {
        let pos = self.toks[self.at].1;
        let s = self.int()?;
        s.parse().map_err(|_| SyntaxError {
            pos,
            message: format!("integer `{s}` out of range"),
            expected: BTreeSet::new(),
        })
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut v = vec![self.ident()?];
        while self.eat_sym(',') {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn at_eof(&mut self) -> bool {
        if *self.peek() == Tok::Eof {
            true
        } else {
            self.expected.insert("end of input".into());
            false
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat_sym('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat_sym('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat_sym('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    // unary := '-' unary | atom ('^' INT)?
    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let a = self.atom()?;
        if self.eat_sym('^') {
            let e = self.small_int()?;
            return Ok(Expr::Pow(Box::new(a), e));
        }
        Ok(a)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(Expr::Num(s.parse::<GaussRat>().expect("digits")))
            }
            Tok::Ident(s) if s == "i" => {
                self.bump();
                Ok(Expr::I)
            }
            Tok::Ident(s) if s == "D" => {
                self.bump();
                self.sym('[')?;
                let unknown = self.ident()?;
                self.sym(',')?;
                let vars = self.ident_list()?;
                self.sym(']')?;
                Ok(Expr::Deriv { unknown, vars })
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Var(s))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => {
                for e in ["integer", "identifier", "`i`", "`D`", "`(`"] {
                    self.expected.insert(e.into());
                }
                Err(self.error())
            }
        }
    }

    /// `(e1, e2, ...)` with at least two entries, or a plain expression.
    fn tuple_or_expr(&mut self) -> PResult<Result<Vec<Expr>, Expr>> {
        if *self.peek() == Tok::Sym('(') {
            let save = self.at;
            self.bump();
            let first = self.expr()?;
            if self.eat_sym(',') {
                let mut v = vec![first];
                loop {
                    v.push(self.expr()?);
                    if !self.eat_sym(',') {
                        break;
                    }
                }
                self.sym(')')?;
                return Ok(Ok(v));
            }
            self.at = save;
            self.expected.clear();
        }
        Ok(Err(self.expr()?))
    }

    fn task(&mut self) -> PResult<Task> {
        let kind = if self.eat_keyword("solve") {
            TaskKind::Solve
        } else if self.eat_keyword("evolution") {
            TaskKind::Evolution
        } else {
            return Err(self.error());
        };
        let mut task = Task::new(kind);
        loop {
            if self.eat_keyword("order") {
                self.sym('=')?;
                task.order = Some(self.small_int()?);
            } else if self.eat_keyword("caps") {
                self.sym('=')?;
                self.sym('[')?;
                let mut caps = Vec::new();
                if !self.eat_sym(']') {
                    loop {
                        caps.push(self.small_int()?);
                        if !self.eat_sym(',') {
                            break;
                        }
                    }
                    self.sym(']')?;
                }
                task.caps = Some(caps);
            } else if self.eat_keyword("lambda") {
                self.sym('=')?;
                task.lambda = Some(self.lambda_list()?);
            } else if self.eat_keyword("verify") {
                task.verify = true;
            } else {
                self.sym(';')?;
                return Ok(task);
            }
        }
    }

    fn lambda_list(&mut self) -> PResult<Vec<LambdaItem>> {
        self.sym('[')?;
        let mut items = Vec::new();
        if self.eat_sym(']') {
            return Ok(items);
        }
        loop {
            items.push(match self.tuple_or_expr()? {
                Ok(v) => LambdaItem::Tuple(v),
                Err(e) => LambdaItem::Scalar(e),
            });
            if !self.eat_sym(',') {
                break;
            }
        }
        self.sym(']')?;
        Ok(items)
    }

    fn statements(&mut self) -> PResult<Vec<(Statement, Pos)>> {
        let mut out = Vec::new();
        while !self.at_eof() {
            let pos = self.toks[self.at].1;
            let s = if self.eat_keyword("vars") {
                Statement::Vars(self.ident_list()?)
            } else if self.eat_keyword("unknowns") {
                Statement::Unknowns(self.ident_list()?)
            } else if self.eat_keyword("translations") {
                Statement::Translations(self.ident_list()?)
            } else if self.eat_keyword("eq") {
                let lhs = self.expr()?;
                self.sym('=')?;
                Statement::Eq(lhs, self.expr()?)
            } else if self.eat_keyword("task") {
                out.push((Statement::Task(self.task()?), pos));
                continue;
            } else if self.eat_keyword("operator") {
                Statement::Operator(self.expr()?)
            } else if self.eat_keyword("characteristic") {
                Statement::Characteristic(match self.tuple_or_expr()? {
                    Ok(v) => v,
                    Err(e) => vec![e],
                })
            } else {
                return Err(self.error());
            };
            self.sym(';')?;
            out.push((s, pos));
        }
        Ok(out)
    }
}

enum Statement {
    Vars(Vec<String>),
    Unknowns(Vec<String>),
    Translations(Vec<String>),
    Eq(Expr, Expr),
    Task(Task),
    Operator(Expr),
    Characteristic(Vec<Expr>),
}

fn misplaced(pos: Pos, message: impl Into<String>) -> SyntaxError {
    SyntaxError {
        pos,
        message: message.into(),
        expected: BTreeSet::new(),
    }
}

fn once<T>(slot: &mut Option<T>, v: T, pos: Pos, what: &str) -> PResult<()> {
    if slot.is_some() {
        return Err(misplaced(pos, format!("duplicate `{what}` statement")));
    }
    *slot = Some(v);
    Ok(())
}

struct Collected {
    vars: Option<Vec<String>>,
    unknowns: Option<Vec<String>>,
    translations: Option<Vec<String>>,
    eq: Option<(Expr, Expr)>,
    task: Option<Task>,
    stored: Option<Stored>,
    end: Pos,
}

fn collect(text: &str) -> PResult<Collected> {
    let mut p = Parser::new(text)?;
    let stmts = p.statements()?;
    let mut c = Collected {
        vars: None,
        unknowns: None,
        translations: None,
        eq: None,
        task: None,
        stored: None,
        end: p.toks[p.at].1,
    };
    for (s, pos) in stmts {
        match s {
            Statement::Vars(v) => once(&mut c.vars, v, pos, "vars")?,
            Statement::Unknowns(v) => once(&mut c.unknowns, v, pos, "unknowns")?,
            Statement::Translations(v) => once(&mut c.translations, v, pos, "translations")?,
            Statement::Eq(l, r) => once(&mut c.eq, (l, r), pos, "eq")?,
            Statement::Task(t) => once(&mut c.task, t, pos, "task")?,
            Statement::Operator(e) => once(&mut c.stored, Stored::Operator(e), pos, "operator/characteristic")?,
            Statement::Characteristic(e) => {
                once(&mut c.stored, Stored::Characteristic(e), pos, "operator/characteristic")?
            }
        }
    }
    Ok(c)
}

impl Collected {
    fn decls(&mut self) -> PResult<Declarations> {
        let end = self.end;
        Ok(Declarations {
            vars: self.vars.take().ok_or_else(|| misplaced(end, "missing `vars` statement"))?,
            unknowns: self
                .unknowns
                .take()
                .ok_or_else(|| misplaced(end, "missing `unknowns` statement"))?,
            translations: self.translations.take().unwrap_or_default(),
        })
    }
}

pub fn parse_problem(text: &str) -> PResult<ProblemFile> {
    let mut c = collect(text)?;
    if c.stored.is_some() {
        return Err(misplaced(c.end, "problem files cannot contain stored symmetries"));
    }
    let decls = c.decls()?;
    let (lhs, rhs) = c.eq.ok_or_else(|| misplaced(c.end, "missing `eq` statement"))?;
    Ok(ProblemFile {
        decls,
        lhs,
        rhs,
        task: c.task,
    })
}

pub fn parse_symmetry(text: &str) -> PResult<SymmetryFile> {
    let mut c = collect(text)?;
    if c.eq.is_some() || c.task.is_some() {
        return Err(misplaced(c.end, "symmetry files hold only declarations and one symmetry"));
    }
    let decls = c.decls()?;
    let symmetry = c
        .stored
        .ok_or_else(|| misplaced(c.end, "missing `operator` or `characteristic` statement"))?;
    Ok(SymmetryFile { decls, symmetry })
}

/// A bare expression, e.g. a command-line value.
pub fn parse_expr(text: &str) -> PResult<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.error());
    }
    Ok(e)
}

/// `0, i, (1, 2)` with or without surrounding brackets.
pub fn parse_lambda_list(text: &str) -> PResult<Vec<LambdaItem>> {
    let wrapped = if text.trim_start().starts_with('[') {
        text.to_string()
    } else {
        format!("[{text}]")
    };
    let mut p = Parser::new(&wrapped)?;
    let l = p.lambda_list()?;
    if !p.at_eof() {
        return Err(p.error());
    }
    Ok(l)
}
