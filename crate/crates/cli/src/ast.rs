use std::fmt;

use symkit::GaussRat;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative integer literal.
    Num(GaussRat),
    I,
    Var(String),
    /// `D[u, x, x]`
    Deriv { unknown: String, vars: Vec<String> },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Highest derivative order appearing in the expression.
    pub fn max_order(&self) -> usize {
        match self {
            Expr::Deriv { vars, .. } => vars.len(),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_order(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_order().max(b.max_order())
            }
            _ => 0,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::I => write!(f, "i"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Deriv { unknown, vars } => write!(f, "D[{unknown}, {}]", vars.join(", ")),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 3)
            }
            // right operands bind one level tighter so the tree re-parses
            // left-associated
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.write_at(f, 3)
            }
            Expr::Pow(a, e) => {
                a.write_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// One entry of a `lambda=[...]` list: a scalar, or a parenthesized tuple
/// with one weight per translation variable.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaItem {
    Scalar(Expr),
    Tuple(Vec<Expr>),
}

impl fmt::Display for LambdaItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaItem::Scalar(e) => write!(f, "{e}"),
            LambdaItem::Tuple(es) => write!(f, "({})", join(es)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Solve,
    Evolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub kind: TaskKind,
    pub order: Option<usize>,
    pub caps: Option<Vec<u32>>,
    pub lambda: Option<Vec<LambdaItem>>,
    pub verify: bool,
}

impl Task {
    pub fn new(kind: TaskKind) -> Self {
        Task {
            kind,
            order: None,
            caps: None,
            lambda: None,
            verify: false,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TaskKind::Solve => "solve",
            TaskKind::Evolution => "evolution",
        };
        write!(f, "task {kind}")?;
        if let Some(q) = self.order {
            write!(f, " order={q}")?;
        }
        if let Some(c) = &self.caps {
            write!(f, " caps=[{}]", join(c))?;
        }
        if let Some(l) = &self.lambda {
            write!(f, " lambda=[{}]", join(l))?;
        }
        if self.verify {
            write!(f, " verify")?;
        }
        write!(f, ";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarations {
    pub vars: Vec<String>,
    pub unknowns: Vec<String>,
    pub translations: Vec<String>,
}

impl fmt::Display for Declarations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars {};\nunknowns {};", self.vars.join(", "), self.unknowns.join(", "))?;
        if !self.translations.is_empty() {
            write!(f, "\ntranslations {};", self.translations.join(", "))?;
        }
        Ok(())
    }
}

/// A `.pde` problem: declarations, one equation and an optional task.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub decls: Declarations,
    pub lhs: Expr,
    pub rhs: Expr,
    pub task: Option<Task>,
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.decls)?;
        writeln!(f, "eq {} = {};", self.lhs, self.rhs)?;
        if let Some(t) = &self.task {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stored {
    /// Linear operator written as its action on the unknown.
    Operator(Expr),
    /// Characteristic, one component per unknown.
    Characteristic(Vec<Expr>),
}

/// A stored symmetry used by `bracket`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryFile {
    pub decls: Declarations,
    pub symmetry: Stored,
}

impl fmt::Display for SymmetryFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.decls)?;
        match &self.symmetry {
            Stored::Operator(e) => writeln!(f, "operator {e};"),
            Stored::Characteristic(es) if es.len() == 1 => writeln!(f, "characteristic {};", es[0]),
            Stored::Characteristic(es) => writeln!(f, "characteristic ({});", join(es)),
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
