use thiserror::Error;

use super::{BinOp, Branch, Expr, Func, Guard, Rel, VExpr, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("variable `{name}` at {line}:{col} exceeds dimension {dim}")]
    IndexOutOfRange {
        name: String,
        line: usize,
        col: usize,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Rel(Rel),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: tl, col: tc });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' | '\u{2212}' => push(Tok::Minus, 1, &mut i, &mut col),
            '*' | '\u{b7}' => push(Tok::Star, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '<' | '>' => {
                let eq = chars.get(i + 1) == Some(&'=');
                let rel = match (c, eq) {
                    ('<', true) => Rel::Le,
                    ('<', false) => Rel::Lt,
                    ('>', true) => Rel::Ge,
                    _ => Rel::Gt,
                };
                push(Tok::Rel(rel), if eq { 2 } else { 1 }, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| ParseError::SyntaxError {
                    line: tl,
                    col: tc,
                    msg: format!("malformed number `{s}`"),
                })?;
                col += i - start;
                out.push(Spanned { tok: Tok::Num(v), line: tl, col: tc });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: tl,
                    col: tc,
                });
            }
            other => {
                return Err(ParseError::SyntaxError {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dim: Option<usize>,
}

pub(super) fn parse(text: &str, dim: Option<usize>) -> Result<VExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::SyntaxError {
            line: 1,
            col: 1,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        dim,
    };
    p.vexpr()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::SyntaxError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn vexpr(&mut self) -> Result<VExpr, ParseError> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            if let Ok(list) = self.tuple() {
                if *self.peek() == Tok::Eof {
                    return Ok(VExpr::new(list));
                }
            }
            self.pos = save;
        }
        let e = self.expr()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected trailing {:?}", self.peek()));
        }
        Ok(VExpr::new(vec![e]))
    }

    fn tuple(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut items = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(items)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.factor()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, line, col),
            other => Err(ParseError::SyntaxError {
                line,
                col,
                msg: format!("expected a value, found {other:?}"),
            }),
        }
    }

    fn identifier(&mut self, name: String, line: usize, col: usize) -> Result<Expr, ParseError> {
        if let Some(var) = parse_var(&name) {
            let (v, idx) = var;
            if idx == 0 || self.dim.is_some_and(|d| idx > d) {
                return Err(ParseError::IndexOutOfRange {
                    name,
                    line,
                    col,
                    dim: self.dim.unwrap_or(0),
                });
            }
            return Ok(Expr::Var(v, idx - 1));
        }
        let func = match name.as_str() {
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "sqrt" => Func::Sqrt,
            "norm" => Func::Norm,
            "piecewise" => return self.piecewise(),
            _ => return Err(ParseError::UnknownIdentifier { name, line, col }),
        };
        let args = self.tuple()?;
        let arity_ok = match func {
            Func::Abs | Func::Sqrt => args.len() == 1,
            _ => !args.is_empty(),
        };
        if !arity_ok {
            return Err(ParseError::SyntaxError {
                line,
                col,
                msg: format!("wrong number of arguments to `{name}`"),
            });
        }
        Ok(Expr::Call(func, args))
    }

    fn piecewise(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LBrace, "`{` after `piecewise`")?;
        let mut branches = Vec::new();
        loop {
            if *self.peek() == Tok::RBrace && !branches.is_empty() {
                break;
            }
            branches.push(self.branch()?);
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => break,
                other => return self.error(format!("expected `;` or `}}`, found {other:?}")),
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(Expr::Piecewise(branches))
    }

    fn branch(&mut self) -> Result<Branch, ParseError> {
        let guards = if self.is_keyword("else") {
            self.bump();
            Vec::new()
        } else if self.is_keyword("if") {
            self.bump();
            let mut guards = vec![self.guard()?];
            while self.is_keyword("and") {
                self.bump();
                guards.push(self.guard()?);
            }
            guards
        } else {
            return self.error("expected `if` or `else`");
        };
        self.expect(Tok::Colon, "`:`")?;
        Ok(Branch {
            guards,
            body: self.expr()?,
        })
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            other => return self.error(format!("expected comparison, found {other:?}")),
        };
        self.bump();
        Ok(Guard {
            lhs,
            rel,
            rhs: self.expr()?,
        })
    }
}

fn parse_var(name: &str) -> Option<(Var, usize)> {
    let mut chars = name.chars();
    let v = match chars.next()? {
        'x' => Var::X,
        'y' => Var::Y,
        'z' => Var::Z,
        _ => return None,
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some((v, digits.parse().ok()?))
}
