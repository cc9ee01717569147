//! `.veq` problem files.
//!
//! ```text
//! # comment
//! space { x_dim = 1, z_dim = 2 }
//! cone { rows = [[1, 0], [0, 1]] }
//! domain { box = [[-1, 1]], step = 0.0025 }
//! fixture = "EX31_F"
//! tol = 1e-9
//! tschedule { t0 = 1, rho = 0.5, count = 20 }
//! seed = 0
//! ```
//!
//! Function blocks (`trifunction`, `bifunction_f`, `bifunction_g`) hold either
//! `expr = "..."` or `fixture = "NAME"` plus numeric fixture parameters. A
//! `vvi` block holds the affine operator coefficients (`a`, `b` or `c_i_j`,
//! `s_k_i_j`). Optional extras: `y_domain { ... }` for a finer y-scan and
//! `x0 = [...]` for the transfer panel.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;
use veq_core::expr::{fixture, FixtureError, FixtureParams};
use veq_core::geometry::GeometryError;
use veq_core::{ConeError, FixtureId, GridDomain, ParseError, PolyCone, TSchedule, VExpr, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("block `{block}`: {msg}")]
    Block { block: String, msg: String },
    #[error("expression in `{block}`: {source}")]
    Expr { block: String, source: ParseError },
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn block_err(block: &str, msg: impl Into<String>) -> SpecError {
    SpecError::Block {
        block: block.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    fn num(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn vector(&self) -> Option<Vec<f64>> {
        match self {
            Value::List(items) => items.iter().map(Value::num).collect(),
            _ => None,
        }
    }

    fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Value::List(items) => items.iter().map(Value::vector).collect(),
            _ => None,
        }
    }
}

/// A parsed item: `key = value` or `key { k = v, ... }`.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Scalar(Value),
    Block(Vec<(String, Value)>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, SpecError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (ln + 1, i + 1);
            let err = |msg: String| SpecError::Syntax { line, col, msg };
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '{' | '}' | '[' | ']' | '=' | ',' => {
                    let t = match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '=' => Tok::Eq,
                        _ => Tok::Comma,
                    };
                    out.push((t, line, col));
                    i += 1;
                }
                '"' => {
                    let end = chars[i + 1..]
                        .iter()
                        .position(|&ch| ch == '"')
                        .ok_or_else(|| err("unterminated string".into()))?;
                    out.push((Tok::Str(chars[i + 1..i + 1 + end].iter().collect()), line, col));
                    i += end + 2;
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let start = i;
                    i += 1;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric()
                            || chars[i] == '.'
                            || ((chars[i] == '-' || chars[i] == '+') && matches!(chars[i - 1], 'e' | 'E')))
                    {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let v = s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")))?;
                    out.push((Tok::Num(v), line, col));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), line, col));
                }
                _ => return Err(err(format!("unexpected character `{c}`"))),
            }
        }
    }
    let (line, col) = (text.lines().count() + 1, 1);
    out.push((Tok::Eof, line, col));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> SpecError {
        let (_, line, col) = self.toks[self.pos];
        SpecError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SpecError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn value(&mut self) -> Result<Value, SpecError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.next();
                Ok(Value::Num(v))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Value::Str(s))
            }
            Tok::LBracket => {
                self.next();
                let mut items = Vec::new();
                while *self.peek() != Tok::RBracket {
                    items.push(self.value()?);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else if *self.peek() != Tok::RBracket {
                        return Err(self.err("expected `,` or `]`"));
                    }
                }
                self.next();
                Ok(Value::List(items))
            }
            _ => Err(self.err("expected a number, string or list")),
        }
    }
}

/// Parses the raw item list, rejecting duplicate keys.
pub fn parse_items(text: &str) -> Result<BTreeMap<String, Item>, SpecError> {
    let mut lx = Lexer { toks: lex(text)?, pos: 0 };
    let mut items = BTreeMap::new();
    while *lx.peek() != Tok::Eof {
        let name = lx.ident()?;
        let item = match lx.next() {
            Tok::Eq => Item::Scalar(lx.value()?),
            Tok::LBrace => {
                let mut fields: Vec<(String, Value)> = Vec::new();
                while *lx.peek() != Tok::RBrace {
                    let k = lx.ident()?;
                    lx.expect(Tok::Eq, "`=`")?;
                    if fields.iter().any(|(f, _)| *f == k) {
                        return Err(lx.err(format!("duplicate key `{k}` in `{name}`")));
                    }
                    fields.push((k, lx.value()?));
                    if *lx.peek() == Tok::Comma {
                        lx.next();
                    }
                }
                lx.next();
                Item::Block(fields)
            }
            _ => {
                lx.pos -= 1;
                return Err(lx.err("expected `=` or `{`"));
            }
        };
        if items.insert(name.clone(), item).is_some() {
            return Err(block_err(&name, "appears twice"));
        }
    }
    Ok(items)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemBody {
    Trifunction(VExpr),
    /// `F(x,y,z) = f(z,y) + g(x,y)`, or `f(z,y)` without `g`.
    Bifunctions { f: VExpr, g: Option<VExpr> },
    Vvi(FixtureParams),
    Fixture(FixtureId, VExpr),
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub x_dim: usize,
    pub z_dim: usize,
    pub cone: PolyCone,
    pub domain: GridDomain,
    pub y_domain: Option<GridDomain>,
    pub body: ProblemBody,
    pub tol: f64,
    pub tschedule: TSchedule,
    pub seed: u64,
    pub x0: Option<Vec<f64>>,
}

fn fields<'a>(items: &'a BTreeMap<String, Item>, name: &str) -> Result<Option<&'a [(String, Value)]>, SpecError> {
    match items.get(name) {
        None => Ok(None),
        Some(Item::Block(f)) => Ok(Some(f)),
        Some(Item::Scalar(_)) => Err(block_err(name, "expected a `{ ... }` block")),
    }
}

fn field<'a>(fs: &'a [(String, Value)], key: &str) -> Option<&'a Value> {
    fs.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn only_keys(block: &str, fs: &[(String, Value)], allowed: &[&str]) -> Result<(), SpecError> {
    match fs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(block_err(block, format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

fn num_field(block: &str, fs: &[(String, Value)], key: &str) -> Result<Option<f64>, SpecError> {
    field(fs, key)
        .map(|v| v.num().ok_or_else(|| block_err(block, format!("`{key}` must be a number"))))
        .transpose()
}

fn dim_field(block: &str, fs: &[(String, Value)], key: &str) -> Result<Option<usize>, SpecError> {
    match num_field(block, fs, key)? {
        None => Ok(None),
        Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(Some(v as usize)),
        Some(v) => Err(block_err(block, format!("`{key}` must be a positive integer, got {v}"))),
    }
}

fn scalar<'a>(items: &'a BTreeMap<String, Item>, name: &str) -> Result<Option<&'a Value>, SpecError> {
    match items.get(name) {
        None => Ok(None),
        Some(Item::Scalar(v)) => Ok(Some(v)),
        Some(Item::Block(_)) => Err(block_err(name, "expected `name = value`")),
    }
}

fn grid_block(block: &str, fs: &[(String, Value)]) -> Result<GridDomain, SpecError> {
    only_keys(block, fs, &["box", "step", "points"])?;
    if let Some(p) = field(fs, "points") {
        if field(fs, "box").is_some() {
            return Err(block_err(block, "give either `box` or `points`"));
        }
        let pts = p
            .matrix()
            .or_else(|| p.vector().map(|v| v.into_iter().map(|x| vec![x]).collect()))
            .ok_or_else(|| block_err(block, "`points` must be a list of vectors"))?;
        return Ok(GridDomain::point_list(pts)?);
    }
    let bx = field(fs, "box")
        .ok_or_else(|| block_err(block, "needs `box` or `points`"))?
        .matrix()
        .filter(|m| m.iter().all(|r| r.len() == 2))
        .ok_or_else(|| block_err(block, "`box` must be a list of [lo, hi] pairs"))?;
    let step = num_field(block, fs, "step")?.ok_or_else(|| block_err(block, "`box` needs `step`"))?;
    let lo: Vec<f64> = bx.iter().map(|r| r[0]).collect();
    let hi: Vec<f64> = bx.iter().map(|r| r[1]).collect();
    Ok(GridDomain::box_grid(&lo, &hi, step)?)
}

fn params(block: &str, fs: &[(String, Value)], skip: &[&str]) -> Result<FixtureParams, SpecError> {
    let mut p = FixtureParams::new();
    for (k, v) in fs.iter().filter(|(k, _)| !skip.contains(&k.as_str())) {
        let v = v
            .num()
            .ok_or_else(|| block_err(block, format!("fixture parameter `{k}` must be a number")))?;
        p.insert(k.clone(), v);
    }
    Ok(p)
}

fn function(block: &str, fs: &[(String, Value)], x_dim: usize) -> Result<VExpr, SpecError> {
    match (field(fs, "expr"), field(fs, "fixture")) {
        (Some(Value::Str(text)), None) => {
            only_keys(block, fs, &["expr"])?;
            VExpr::parse_with_dim(text, x_dim).map_err(|source| SpecError::Expr {
                block: block.to_string(),
                source,
            })
        }
        (None, Some(Value::Str(name))) => {
            let id: FixtureId = name.parse()?;
            let mut p = params(block, fs, &["fixture"])?;
            if id == FixtureId::PerturbEps {
                p.entry("n".into()).or_insert(x_dim as f64);
            }
            Ok(fixture(id, &p)?)
        }
        _ => Err(block_err(block, "needs exactly one of `expr = \"...\"` or `fixture = \"NAME\"`")),
    }
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<ProblemSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ProblemSpec::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ProblemSpec, SpecError> {
        let items = parse_items(text)?;
        const KNOWN: [&str; 13] = [
            "space",
            "cone",
            "domain",
            "y_domain",
            "trifunction",
            "bifunction_f",
            "bifunction_g",
            "vvi",
            "fixture",
            "tol",
            "tschedule",
            "seed",
            "x0",
        ];
        if let Some(k) = items.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(block_err(k, "unknown block"));
        }

        let dom = fields(&items, "domain")?.ok_or_else(|| block_err("domain", "is required"))?;
        let domain = grid_block("domain", dom)?;
        let (mut x_dim, mut z_dim) = (domain.dim(), None);
        if let Some(fs) = fields(&items, "space")? {
            only_keys("space", fs, &["x_dim", "z_dim"])?;
            if let Some(d) = dim_field("space", fs, "x_dim")? {
                if d != domain.dim() {
                    return Err(block_err("space", format!("x_dim = {d} but the domain has dimension {}", domain.dim())));
                }
                x_dim = d;
            }
            z_dim = dim_field("space", fs, "z_dim")?;
        }
        let y_domain = match fields(&items, "y_domain")? {
            Some(fs) => {
                let g = grid_block("y_domain", fs)?;
                if g.dim() != x_dim {
                    return Err(block_err("y_domain", "dimension differs from the domain"));
                }
                Some(g)
            }
            None => None,
        };

        let defining: Vec<&str> = ["trifunction", "bifunction_f", "vvi", "fixture"]
            .into_iter()
            .filter(|k| items.contains_key(*k))
            .collect();
        if defining.len() != 1 {
            return Err(block_err(
                "problem",
                format!(
                    "exactly one of trifunction, bifunction_f, vvi, fixture is required (found {})",
                    if defining.is_empty() { "none".to_string() } else { defining.join(", ") }
                ),
            ));
        }
        if items.contains_key("bifunction_g") && defining[0] != "bifunction_f" {
            return Err(block_err("bifunction_g", "needs a `bifunction_f` block"));
        }
        let body = match defining[0] {
            "trifunction" => ProblemBody::Trifunction(function("trifunction", fields(&items, "trifunction")?.unwrap(), x_dim)?),
            "bifunction_f" => {
                let f = function("bifunction_f", fields(&items, "bifunction_f")?.unwrap(), x_dim)?;
                let g = match fields(&items, "bifunction_g")? {
                    Some(fs) => Some(function("bifunction_g", fs, x_dim)?),
                    None => None,
                };
                ProblemBody::Bifunctions { f, g }
            }
            "vvi" => {
                let fs = fields(&items, "vvi")?.unwrap();
                let mut p = params("vvi", fs, &[])?;
                p.entry("n".into()).or_insert(x_dim as f64);
                if let Some(m) = z_dim {
                    p.entry("m".into()).or_insert(m as f64);
                }
                fixture(FixtureId::VviAffine, &p)?;
                ProblemBody::Vvi(p)
            }
            _ => {
                let name = match scalar(&items, "fixture")? {
                    Some(Value::Str(s)) => s.clone(),
                    _ => return Err(block_err("fixture", "expected `fixture = \"NAME\"`")),
                };
                let id: FixtureId = name.parse()?;
                if let Some([lo, hi]) = id.domain() {
                    let outside = domain.points().iter().flatten().any(|&v| v < lo || v > hi);
                    if outside {
                        return Err(block_err("domain", format!("{id} is declared on [{lo}, {hi}]")));
                    }
                }
                ProblemBody::Fixture(id, fixture(id, &FixtureParams::new())?)
            }
        };

        let out_dim = match &body {
            ProblemBody::Trifunction(f) | ProblemBody::Fixture(_, f) | ProblemBody::Bifunctions { f, .. } => f.out_dim(),
            ProblemBody::Vvi(p) => p.get("m").map_or(1, |m| *m as usize),
        };
        if let ProblemBody::Bifunctions { g: Some(g), .. } = &body {
            if g.out_dim() != out_dim {
                return Err(block_err("bifunction_g", format!("has {} components, bifunction_f has {out_dim}", g.out_dim())));
            }
        }
        let z_dim = match z_dim {
            Some(m) if m != out_dim => {
                return Err(block_err("space", format!("z_dim = {m} but the function has {out_dim} components")))
            }
            _ => out_dim,
        };

        let cone = match fields(&items, "cone")? {
            None => PolyCone::orthant(z_dim),
            Some(fs) => {
                only_keys("cone", fs, &["rows", "orthant"])?;
                match (field(fs, "rows"), dim_field("cone", fs, "orthant")?) {
                    (Some(r), None) => {
                        let rows = r.matrix().ok_or_else(|| block_err("cone", "`rows` must be a list of vectors"))?;
                        PolyCone::new(rows, "rows")?
                    }
                    (None, Some(m)) => PolyCone::orthant(m),
                    _ => return Err(block_err("cone", "needs exactly one of `rows` or `orthant`")),
                }
            }
        };
        if cone.dim() != z_dim {
            return Err(block_err("cone", format!("has dimension {}, the function has {z_dim} components", cone.dim())));
        }

        let tol = match scalar(&items, "tol")? {
            None => DEFAULT_TOL,
            Some(Value::Num(t)) if *t > 0.0 && t.is_finite() => *t,
            Some(_) => return Err(block_err("tol", "must be a positive number")),
        };
        let tschedule = match fields(&items, "tschedule")? {
            None => TSchedule::default(),
            Some(fs) => {
                only_keys("tschedule", fs, &["t0", "rho", "count"])?;
                let t0 = num_field("tschedule", fs, "t0")?.unwrap_or(1.0);
                let rho = num_field("tschedule", fs, "rho")?.unwrap_or(0.5);
                let count = dim_field("tschedule", fs, "count")?.unwrap_or(20);
                TSchedule::geometric(t0, rho, count)?
            }
        };
        let seed = match scalar(&items, "seed")? {
            None => 0,
            Some(Value::Num(s)) if *s >= 0.0 && s.fract() == 0.0 => *s as u64,
            Some(_) => return Err(block_err("seed", "must be a nonnegative integer")),
        };
        let x0 = match scalar(&items, "x0")? {
            None => None,
            Some(v) => {
                let x = v.vector().ok_or_else(|| block_err("x0", "must be a vector"))?;
                if x.len() != x_dim {
                    return Err(block_err("x0", "dimension differs from the domain"));
                }
                Some(x)
            }
        };

        Ok(ProblemSpec {
            x_dim,
            z_dim,
            cone,
            domain,
            y_domain,
            body,
            tol,
            tschedule,
            seed,
            x0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX31: &str = r#"
        # first counterexample
        space { x_dim = 1, z_dim = 2 }
        cone { rows = [[1, 0], [0, 1]] }
        domain { box = [[-1, 1]], step = 0.25 }
        fixture = "EX31_F"
        tol = 1e-9
        tschedule { t0 = 1, rho = 0.5, count = 20 }
        seed = 3
    "#;

    #[test]
    fn parses_fixture_problem() {
        let p = ProblemSpec::parse(EX31).unwrap();
        assert_eq!((p.x_dim, p.z_dim, p.seed), (1, 2, 3));
        assert_eq!(p.domain.len(), 9);
        assert!(matches!(p.body, ProblemBody::Fixture(FixtureId::Ex31F, _)));
        assert_eq!(p.tschedule.values().len(), 20);
    }

    #[test]
    fn parses_bifunctions_and_lists() {
        let p = ProblemSpec::parse(
            "domain { points = [0, 0.5, 1] }\nbifunction_f { expr = \"x1 - y1\" }\nbifunction_g { fixture = \"PERTURB_EPS\", eps = 0.5, e1 = 1 }\nx0 = [1]",
        )
        .unwrap();
        let ProblemBody::Bifunctions { f, g: Some(g) } = &p.body else {
            panic!("{:?}", p.body)
        };
        assert_eq!(f.eval2(&[1.0], &[0.0]).unwrap(), vec![1.0]);
        assert_eq!(g.eval2(&[1.0], &[0.0]).unwrap(), vec![0.5]);
        assert_eq!(p.cone.dim(), 1);
        assert_eq!(p.x0, Some(vec![1.0]));
    }

    #[test]
    fn vvi_block_defaults_dimensions() {
        let p = ProblemSpec::parse("domain { box = [[0, 1]], step = 0.5 }\nvvi { a = 2, b = -1 }").unwrap();
        let ProblemBody::Vvi(params) = &p.body else { panic!() };
        assert_eq!(params["n"], 1.0);
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            ("domain { box = [[0, 1]], step = 0.5 }", "exactly one"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"y1\" }\nfixture = \"EX31_F\"", "exactly one"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"y1 +\" }", "expression"),
            ("domain { box = [[0, 1]], step = 0.5, foo = 1 }\ntrifunction { expr = \"y1\" }", "unknown key"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"(y1, x1)\" }\ncone { orthant = 1 }", "cone"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"y1\" }\nwat = 1", "unknown block"),
            ("domain { box = [[0, 2]], step = 0.5 }\nfixture = \"EX32_F\"", "declared on"),
            ("domain { box = [[0, 1]], step = 0.5 }\nfixture = \"NOPE\"", "unknown fixture"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"y1\" }\ntol = -1", "positive"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction = 3", "block"),
            ("domain { box = [[0, 1]], step = 0.5 }\ntrifunction { expr = \"y1\" \n", "name"),
        ];
        for (text, needle) in bad {
            let e = ProblemSpec::parse(text).unwrap_err().to_string();
            assert!(e.contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = ProblemSpec::parse("domain { box = [[0, 1]], step = 0.5 }\n  tol = @").unwrap_err();
        assert!(matches!(e, SpecError::Syntax { line: 2, col: 9, .. }), "{e:?}");
    }
}
