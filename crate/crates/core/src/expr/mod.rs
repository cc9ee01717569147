//! Piecewise arithmetic expressions for vector-valued bi- and trifunctions.
//!
//! Text such as
//!
//! ```text
//! ( piecewise{ if x1 <= 0.5 : x1 + y1 ; else : 2*x1 + y1 },
//!   piecewise{ if x1 <= 0.5 : 2*x1 - z1 ; else : z1 - x1 } )
//! ```
//!
//! parses into a [`VExpr`]: one scalar tree per output component over the
//! indexed variables `x_i`, `y_i`, `z_i` (1-based). Piecewise blocks pick the
//! first branch whose guards all hold; comparisons are exact.

mod fixture;
mod parse;

use std::fmt;

use thiserror::Error;

pub use fixture::{fixture, FixtureError, FixtureId, FixtureParams};
pub use parse::ParseError;

/// Which argument slot of `F(x, y, z)` a variable refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    fn letter(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
    Sqrt,
    /// Euclidean norm of the argument list.
    Norm,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Sqrt => "sqrt",
            Func::Norm => "norm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Ge,
    Gt,
}

impl Rel {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Rel::Le => a <= b,
            Rel::Lt => a < b,
            Rel::Ge => a >= b,
            Rel::Gt => a > b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
}

/// A piecewise branch; an empty guard list is the `else` branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub guards: Vec<Guard>,
    pub body: Expr,
}

/// Scalar expression tree. Variable indices are stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var, usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Piecewise(Vec<Branch>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no piecewise branch matched and no else branch is present")]
    CoverageGap,
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("{var} has length {got}, expression needs at least {expected}")]
    DimensionMismatch {
        var: char,
        expected: usize,
        got: usize,
    },
}

/// Arguments an expression is evaluated at.
#[derive(Debug, Clone, Copy)]
struct Env<'a> {
    x: &'a [f64],
    y: &'a [f64],
    z: &'a [f64],
}

impl Env<'_> {
    fn get(&self, v: Var, i: usize) -> f64 {
        match v {
            Var::X => self.x[i],
            Var::Y => self.y[i],
            Var::Z => self.z[i],
        }
    }
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(v: Var, index0: usize) -> Expr {
        Expr::Var(v, index0)
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    fn eval(&self, env: &Env<'_>) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(v, i) => env.get(*v, *i),
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
            Expr::Call(f, args) => match f {
                Func::Abs => args[0].eval(env)?.abs(),
                Func::Sqrt => {
                    let v = args[0].eval(env)?;
                    if v < 0.0 {
                        return Err(EvalError::NegativeSqrt(v));
                    }
                    v.sqrt()
                }
                Func::Min => {
                    let mut acc = f64::INFINITY;
                    for a in args {
                        acc = acc.min(a.eval(env)?);
                    }
                    acc
                }
                Func::Max => {
                    let mut acc = f64::NEG_INFINITY;
                    for a in args {
                        acc = acc.max(a.eval(env)?);
                    }
                    acc
                }
                Func::Norm => {
                    let mut acc = 0.0;
                    for a in args {
                        let v = a.eval(env)?;
                        acc += v * v;
                    }
                    acc.sqrt()
                }
            },
            Expr::Piecewise(branches) => {
                for br in branches {
                    let mut hit = true;
                    for g in &br.guards {
                        if !g.rel.holds(g.lhs.eval(env)?, g.rhs.eval(env)?) {
                            hit = false;
                            break;
                        }
                    }
                    if hit {
                        return br.body.eval(env);
                    }
                }
                return Err(EvalError::CoverageGap);
            }
        })
    }

    /// Visits every variable reference.
    fn for_each_var(&self, f: &mut impl FnMut(Var, usize)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v, i) => f(*v, *i),
            Expr::Neg(e) => e.for_each_var(f),
            Expr::Bin(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
            Expr::Piecewise(branches) => {
                for br in branches {
                    for g in &br.guards {
                        g.lhs.for_each_var(f);
                        g.rhs.for_each_var(f);
                    }
                    br.body.for_each_var(f);
                }
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(Var) -> Var) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(v, i) => Expr::Var(f(*v), *i),
            Expr::Neg(e) => Expr::Neg(Box::new(e.map_vars(f))),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.map_vars(f), b.map_vars(f)),
            Expr::Call(func, args) => Expr::Call(*func, args.iter().map(|a| a.map_vars(f)).collect()),
            Expr::Piecewise(branches) => Expr::Piecewise(
                branches
                    .iter()
                    .map(|br| Branch {
                        guards: br
                            .guards
                            .iter()
                            .map(|g| Guard {
                                lhs: g.lhs.map_vars(f),
                                rel: g.rel,
                                rhs: g.rhs.map_vars(f),
                            })
                            .collect(),
                        body: br.body.map_vars(f),
                    })
                    .collect(),
            ),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized output that re-parses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Var(v, i) => write!(f, "{}{}", v.letter(), i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Piecewise(branches) => {
                f.write_str("piecewise{ ")?;
                for (k, br) in branches.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ; ")?;
                    }
                    if br.guards.is_empty() {
                        write!(f, "else : {}", br.body)?;
                    } else {
                        f.write_str("if ")?;
                        for (j, g) in br.guards.iter().enumerate() {
                            if j > 0 {
                                f.write_str(" and ")?;
                            }
                            write!(f, "{} {} {}", g.lhs, g.rel.symbol(), g.rhs)?;
                        }
                        write!(f, " : {}", br.body)?;
                    }
                }
                f.write_str(" }")
            }
        }
    }
}

/// A vector-valued expression in the variables `x`, `y`, `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct VExpr {
    components: Vec<Expr>,
    /// Largest 1-based variable index referenced (0 for constants).
    x_dim: usize,
    uses: [bool; 3],
}

impl VExpr {
    pub fn new(components: Vec<Expr>) -> VExpr {
        assert!(!components.is_empty(), "a VExpr needs at least one component");
        let mut x_dim = 0;
        let mut uses = [false; 3];
        for c in &components {
            c.for_each_var(&mut |v, i| {
                x_dim = x_dim.max(i + 1);
                uses[v as usize] = true;
            });
        }
        VExpr {
            components,
            x_dim,
            uses,
        }
    }

    /// Parses expression text; see the module docs for the grammar.
    pub fn parse(text: &str) -> Result<VExpr, ParseError> {
        parse::parse(text, None)
    }

    /// Parses and rejects variable indices above `dim`.
    pub fn parse_with_dim(text: &str, dim: usize) -> Result<VExpr, ParseError> {
        parse::parse(text, Some(dim))
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Output dimension.
    pub fn out_dim(&self) -> usize {
        self.components.len()
    }

    /// Smallest argument dimension the expression can be evaluated at.
    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn uses(&self, v: Var) -> bool {
        self.uses[v as usize]
    }

    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>, EvalError> {
        for (var, arg) in [(Var::X, x), (Var::Y, y), (Var::Z, z)] {
            if self.uses(var) && arg.len() < self.x_dim {
                return Err(EvalError::DimensionMismatch {
                    var: var.letter(),
                    expected: self.x_dim,
                    got: arg.len(),
                });
            }
        }
        let env = Env { x, y, z };
        self.components.iter().map(|c| c.eval(&env)).collect()
    }

    /// Evaluates a bifunction `f(x, y)`; `z` is bound to `x` if referenced.
    pub fn eval2(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.eval(x, y, x)
    }

    /// Rewrites every variable through `f`, e.g. to turn `f(x, y)` into `f(z, y)`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> VExpr {
        VExpr::new(self.components.iter().map(|c| c.map_vars(&f)).collect())
    }

    /// Componentwise sum; `None` when output dimensions differ.
    pub fn try_add(&self, other: &VExpr) -> Option<VExpr> {
        if self.out_dim() != other.out_dim() {
            return None;
        }
        Some(VExpr::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| Expr::bin(BinOp::Add, a.clone(), b.clone()))
                .collect(),
        ))
    }

    /// The trifunction `F1(x, y, z) = f(z, y) + g(x, y)` built from two bifunctions.
    pub fn perturbed_trifunction(f: &VExpr, g: &VExpr) -> Option<VExpr> {
        let f_zy = f.rename(|v| if v == Var::X { Var::Z } else { v });
        f_zy.try_add(g)
    }

    /// The trifunction `F2(x, y, z) = f(x, z) + g(x, y)`.
    pub fn dual_perturbed_trifunction(f: &VExpr, g: &VExpr) -> Option<VExpr> {
        let f_xz = f.rename(|v| if v == Var::Y { Var::Z } else { v });
        f_xz.try_add(g)
    }
}

impl fmt::Display for VExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}
