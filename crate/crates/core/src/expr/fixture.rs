//! Built-in closed-form expressions used as regression ground truth.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{BinOp, Expr, Func, VExpr, Var};

/// Named constants passed to [`fixture`]; vectors use indexed keys (`e1`, `e2`, ...).
pub type FixtureParams = BTreeMap<String, f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture parameter `{0}` is required")]
    MissingParam(String),
    #[error("fixture parameter `{name}` is invalid: {reason}")]
    BadParam { name: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixtureId {
    /// `F(x,y,z) = ((f(y) - f(x)) g(z), (f(y) - f(x)) g(z))` on `[-1, 1]`.
    Ex31F,
    /// The tent-like `f : [-1, 1] -> [0, 1]` of the first counterexample.
    Ex31SmallF,
    /// The `g : [-1, 1] -> [-1, 1]` multiplier of the first counterexample.
    Ex31SmallG,
    /// Piecewise trifunction on `[0, 1]` with a jump at `x = 1/2`.
    Ex32F,
    /// `F(x,y,z) = <A(z), y - x>` for an affine operator `A`.
    VviAffine,
    /// `g(x,y) = eps |x - y| e`.
    PerturbEps,
}

impl FixtureId {
    pub const ALL: [FixtureId; 6] = [
        FixtureId::Ex31F,
        FixtureId::Ex31SmallF,
        FixtureId::Ex31SmallG,
        FixtureId::Ex32F,
        FixtureId::VviAffine,
        FixtureId::PerturbEps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureId::Ex31F => "EX31_F",
            FixtureId::Ex31SmallF => "EX31_f",
            FixtureId::Ex31SmallG => "EX31_g",
            FixtureId::Ex32F => "EX32_F",
            FixtureId::VviAffine => "VVI_AFFINE",
            FixtureId::PerturbEps => "PERTURB_EPS",
        }
    }

    /// Box on which the fixture is declared, one interval per coordinate.
    pub fn domain(self) -> Option<[f64; 2]> {
        match self {
            FixtureId::Ex31F | FixtureId::Ex31SmallF | FixtureId::Ex31SmallG => Some([-1.0, 1.0]),
            FixtureId::Ex32F => Some([0.0, 1.0]),
            FixtureId::VviAffine | FixtureId::PerturbEps => None,
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureId {
    type Err = FixtureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FixtureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| FixtureError::UnknownFixture(s.to_string()))
    }
}

fn x1() -> Expr {
    Expr::var(Var::X, 0)
}

fn n(v: f64) -> Expr {
    Expr::num(v)
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Mul, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Add, a, b)
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Sub, a, b)
}

fn le(at: f64) -> Vec<super::Guard> {
    vec![super::Guard {
        lhs: x1(),
        rel: super::Rel::Le,
        rhs: n(at),
    }]
}

fn branch(guards: Vec<super::Guard>, body: Expr) -> super::Branch {
    super::Branch { guards, body }
}

/// f(x) = -2x - 1 on [-1, -1/2], 2x + 1 on (-1/2, 0], -2x + 1 on (0, 1].
fn ex31_small_f() -> Expr {
    Expr::Piecewise(vec![
        branch(le(-0.5), sub(mul(n(-2.0), x1()), n(1.0))),
        branch(le(0.0), add(mul(n(2.0), x1()), n(1.0))),
        branch(vec![], add(mul(n(-2.0), x1()), n(1.0))),
    ])
}

/// g(x) = -2x/3 + 1/3 on [-1, 1/2], -2x + 1 on (1/2, 1].
fn ex31_small_g() -> Expr {
    Expr::Piecewise(vec![
        branch(
            le(0.5),
            add(
                Expr::bin(BinOp::Div, mul(n(-2.0), x1()), n(3.0)),
                Expr::bin(BinOp::Div, n(1.0), n(3.0)),
            ),
        ),
        branch(vec![], add(mul(n(-2.0), x1()), n(1.0))),
    ])
}

fn ex31_big_f() -> VExpr {
    let f = ex31_small_f();
    let g = ex31_small_g();
    let f_y = VExpr::new(vec![f.clone()]).rename(|_| Var::Y).components()[0].clone();
    let g_z = VExpr::new(vec![g]).rename(|_| Var::Z).components()[0].clone();
    let comp = mul(sub(f_y, f), g_z);
    VExpr::new(vec![comp.clone(), comp])
}

fn ex32_big_f() -> VExpr {
    let y1 = Expr::var(Var::Y, 0);
    let z1 = Expr::var(Var::Z, 0);
    let first = Expr::Piecewise(vec![
        branch(le(0.5), add(x1(), y1.clone())),
        branch(vec![], add(mul(n(2.0), x1()), y1)),
    ]);
    let second = Expr::Piecewise(vec![
        branch(le(0.5), sub(mul(n(2.0), x1()), z1.clone())),
        branch(vec![], sub(z1, x1())),
    ]);
    VExpr::new(vec![first, second])
}

fn get(params: &FixtureParams, key: &str) -> Option<f64> {
    params.get(key).copied()
}

fn require(params: &FixtureParams, key: &str) -> Result<f64, FixtureError> {
    get(params, key).ok_or_else(|| FixtureError::MissingParam(key.to_string()))
}

fn dim_param(params: &FixtureParams, key: &str) -> Result<usize, FixtureError> {
    match get(params, key) {
        None => Ok(1),
        Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
        Some(v) => Err(FixtureError::BadParam {
            name: key.to_string(),
            reason: format!("expected a positive integer, got {v}"),
        }),
    }
}

/// Affine operator `A(z) = C + sum_k z_k S_k`, each term an `m x n` matrix.
///
/// Keys: `n`, `m` (default 1), `c_i_j` for the constant part and `s_k_i_j`
/// for the coefficient of `z_k` (all 1-based, default 0). In one dimension
/// `a` and `b` abbreviate `A(z) = a z + b`.
fn vvi_affine(params: &FixtureParams) -> Result<VExpr, FixtureError> {
    let n_dim = dim_param(params, "n")?;
    let m_dim = dim_param(params, "m")?;
    let has_coeff = params
        .keys()
        .any(|k| k == "a" || k == "b" || k.starts_with("c_") || k.starts_with("s_"));
    if !has_coeff {
        return Err(FixtureError::MissingParam("a".into()));
    }
    if (params.contains_key("a") || params.contains_key("b")) && (n_dim != 1 || m_dim != 1) {
        return Err(FixtureError::BadParam {
            name: "a".into(),
            reason: "scalar shorthand needs n = m = 1".into(),
        });
    }
    for key in params.keys() {
        let idx: Option<Vec<usize>> = key
            .strip_prefix("c_")
            .or_else(|| key.strip_prefix("s_"))
            .map(|rest| rest.split('_').filter_map(|p| p.parse().ok()).collect());
        if let Some(idx) = idx {
            let bounds: &[usize] = if key.starts_with("c_") {
                &[m_dim, n_dim]
            } else {
                &[n_dim, m_dim, n_dim]
            };
            if idx.len() != bounds.len() || idx.iter().zip(bounds).any(|(i, b)| *i == 0 || i > b) {
                return Err(FixtureError::BadParam {
                    name: key.clone(),
                    reason: "index out of range".into(),
                });
            }
        }
    }
    let constant = |i: usize, j: usize| -> f64 {
        if n_dim == 1 && m_dim == 1 {
            if let Some(b) = get(params, "b") {
                return b;
            }
        }
        get(params, &format!("c_{}_{}", i + 1, j + 1)).unwrap_or(0.0)
    };
    let slope = |k: usize, i: usize, j: usize| -> f64 {
        if n_dim == 1 && m_dim == 1 {
            if let Some(a) = get(params, "a") {
                return a;
            }
        }
        get(params, &format!("s_{}_{}_{}", k + 1, i + 1, j + 1)).unwrap_or(0.0)
    };
    let mut comps = Vec::with_capacity(m_dim);
    for i in 0..m_dim {
        let mut sum: Option<Expr> = None;
        for j in 0..n_dim {
            // Entry (i, j) of A(z).
            let mut entry: Option<Expr> = None;
            let c = constant(i, j);
            if c != 0.0 {
                entry = Some(n(c));
            }
            for k in 0..n_dim {
                let s = slope(k, i, j);
                if s != 0.0 {
                    let term = mul(n(s), Expr::var(Var::Z, k));
                    entry = Some(match entry {
                        Some(e) => add(e, term),
                        None => term,
                    });
                }
            }
            if let Some(e) = entry {
                let term = mul(e, sub(Expr::var(Var::Y, j), Expr::var(Var::X, j)));
                sum = Some(match sum {
                    Some(s) => add(s, term),
                    None => term,
                });
            }
        }
        comps.push(sum.unwrap_or(n(0.0)));
    }
    Ok(VExpr::new(comps))
}

/// `g(x, y) = eps * norm(x - y) * e`. Keys: `eps`, `e1..em`, `n` (default 1).
fn perturb_eps(params: &FixtureParams) -> Result<VExpr, FixtureError> {
    let eps = require(params, "eps")?;
    if eps < 0.0 {
        return Err(FixtureError::BadParam {
            name: "eps".into(),
            reason: "must be nonnegative".into(),
        });
    }
    let n_dim = dim_param(params, "n")?;
    let mut e = vec![require(params, "e1")?];
    while let Some(v) = get(params, &format!("e{}", e.len() + 1)) {
        e.push(v);
    }
    let dist = Expr::Call(
        Func::Norm,
        (0..n_dim)
            .map(|j| sub(Expr::var(Var::X, j), Expr::var(Var::Y, j)))
            .collect(),
    );
    Ok(VExpr::new(
        e.iter()
            .map(|ei| mul(mul(n(eps), dist.clone()), n(*ei)))
            .collect(),
    ))
}

/// Resolves a fixture to its closed-form expression.
pub fn fixture(id: FixtureId, params: &FixtureParams) -> Result<VExpr, FixtureError> {
    match id {
        FixtureId::Ex31F => Ok(ex31_big_f()),
        FixtureId::Ex31SmallF => Ok(VExpr::new(vec![ex31_small_f()])),
        FixtureId::Ex31SmallG => Ok(VExpr::new(vec![ex31_small_g()])),
        FixtureId::Ex32F => Ok(ex32_big_f()),
        FixtureId::VviAffine => vvi_affine(params),
        FixtureId::PerturbEps => perturb_eps(params),
    }
}
