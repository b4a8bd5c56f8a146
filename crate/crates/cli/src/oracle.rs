//! Exact Gaussian moments from a small expression file.
//!
//! ```text
//! # ζ_k = x_k + i y_k with x_k, y_k independent N(0, 1) unless overridden
//! dim 1
//! cov x_1 y_1 1/2
//! expect (z_1*zb_1)^2
//! ```
//!
//! Expressions use `x_k`, `y_k`, `z_k`, `zb_k`, `J(m,n,z_k)`, `H(n,x_k)`,
//! `conj(..)`, `i`, rational or decimal literals, `+ - * ^` and parentheses.

use chaos_core::exact::{cint, cq, creal, rat, ComplexRational, Rational};
use chaos_core::hermite::{complex_hermite, HermiteIndex};
use chaos_core::tensor::parse_number;
use chaos_core::wick::{expect, GaussPoly, GaussianFamily, DEGREE_BUDGET};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("degree {degree} exceeds the budget of {budget}")]
    Budget { degree: u32, budget: u32 },
    #[error(transparent)]
    Core(#[from] chaos_core::ChaosError),
}

type Result<T> = std::result::Result<T, OracleError>;

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(OracleError::Parse {
        line,
        msg: msg.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
}

fn lex(src: &str, line: usize) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(parse_number(&text, line).map_err(|_| OracleError::Parse {
                line,
                msg: format!("bad number `{text}`"),
            })?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return parse_err(line, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// A real or complex coordinate named in the file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    X(usize),
    Y(usize),
    Z(usize),
    Zb(usize),
}

fn parse_var(name: &str, dim: usize, line: usize) -> Result<Var> {
    let (kind, idx) = match name.split_once('_') {
        Some(p) => p,
        None => return parse_err(line, format!("unknown name `{name}`")),
    };
    let k = match idx.parse::<usize>() {
        Ok(k) if k >= 1 && k <= dim => k - 1,
        _ => return parse_err(line, format!("`{name}`: index must be in 1..={dim}")),
    };
    Ok(match kind {
        "x" => Var::X(k),
        "y" => Var::Y(k),
        "z" => Var::Z(k),
        "zb" => Var::Zb(k),
        _ => return parse_err(line, format!("unknown variable `{name}`")),
    })
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    dim: usize,
    line: usize,
}

impl Parser<'_> {
    fn real_dim(&self) -> usize {
        2 * self.dim
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => parse_err(self.line, format!("expected `{c}`, found {other:?}")),
        }
    }

    fn uint(&mut self) -> Result<u32> {
        match self.next() {
            Some(Tok::Num(q)) if q.is_integer() && q >= rat(0) && q <= rat(1000) => {
                Ok(q.to_integer().try_into().expect("small integer"))
            }
            other => parse_err(self.line, format!("expected a nonnegative integer, found {other:?}")),
        }
    }

    fn budget(&self, degree: u32) -> Result<()> {
        if degree > DEGREE_BUDGET {
            return Err(OracleError::Budget {
                degree,
                budget: DEGREE_BUDGET,
            });
        }
        Ok(())
    }

    fn coord(&self, v: Var) -> Result<GaussPoly> {
        let d = self.real_dim();
        let x = |k| GaussPoly::var(d, k);
        Ok(match v {
            Var::X(k) => x(k)?,
            Var::Y(k) => x(self.dim + k)?,
            Var::Z(k) => &x(k)? + &x(self.dim + k)?.scale(&cq(rat(0), rat(1))),
            Var::Zb(k) => &x(k)? - &x(self.dim + k)?.scale(&cq(rat(0), rat(1))),
        })
    }

    fn expr(&mut self) -> Result<GaussPoly> {
        let mut acc = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<GaussPoly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Sym('*')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            self.budget(acc.degree() + rhs.degree())?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<GaussPoly> {
        if let Some(Tok::Sym('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.scale(&cint(-1)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<GaussPoly> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            let k = self.uint()?;
            self.budget(base.degree().saturating_mul(k))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<GaussPoly> {
        let d = self.real_dim();
        match self.next() {
            Some(Tok::Num(q)) => Ok(GaussPoly::constant(d, creal(q))),
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(GaussPoly::constant(d, cq(rat(0), rat(1)))),
                "conj" => {
                    self.expect_sym('(')?;
                    let e = self.expr()?;
                    self.expect_sym(')')?;
                    Ok(e.conj())
                }
                "J" => {
                    self.expect_sym('(')?;
                    let m = self.uint()?;
                    self.expect_sym(',')?;
                    let n = self.uint()?;
                    self.expect_sym(',')?;
                    let k = match self.next() {
                        Some(Tok::Ident(v)) => match parse_var(&v, self.dim, self.line)? {
                            Var::Z(k) => k,
                            _ => return parse_err(self.line, "J takes a complex coordinate z_k"),
                        },
                        other => return parse_err(self.line, format!("expected z_k, found {other:?}")),
                    };
                    self.expect_sym(')')?;
                    self.budget(m + n)?;
                    self.complex_hermite(m, n, k)
                }
                "H" => {
                    self.expect_sym('(')?;
                    let n = self.uint()?;
                    self.expect_sym(',')?;
                    let slot = match self.next() {
                        Some(Tok::Ident(v)) => match parse_var(&v, self.dim, self.line)? {
                            Var::X(k) => k,
                            Var::Y(k) => self.dim + k,
                            _ => return parse_err(self.line, "H takes a real coordinate x_k or y_k"),
                        },
                        other => return parse_err(self.line, format!("expected x_k or y_k, found {other:?}")),
                    };
                    self.expect_sym(')')?;
                    self.budget(n)?;
                    Ok(GaussPoly::hermite(d, slot, n)?)
                }
                v => self.coord(parse_var(v, self.dim, self.line)?),
            },
            other => parse_err(self.line, format!("unexpected {other:?}")),
        }
    }

    fn complex_hermite(&self, m: u32, n: u32, k: usize) -> Result<GaussPoly> {
        let xy = complex_hermite(&HermiteIndex::standard(m, n)).to_xy();
        let mut out = GaussPoly::zero(self.real_dim());
        for (&(a, b), c) in xy.terms() {
            let mut exps = vec![0; self.real_dim()];
            exps[k] = a;
            exps[self.dim + k] = b;
            out.add_term(exps, c.clone());
        }
        Ok(out)
    }
}

/// Parses a whole expression with `dim` complex coordinates.
pub fn parse_expr(src: &str, dim: usize, line: usize) -> Result<GaussPoly> {
    let toks = lex(src, line)?;
    if toks.is_empty() {
        return parse_err(line, "empty expression");
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        dim,
        line,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return parse_err(line, format!("trailing input at {:?}", toks[p.pos]));
    }
    Ok(e)
}

/// A parsed oracle file.
#[derive(Clone, Debug)]
pub struct OracleQuery {
    pub family: GaussianFamily,
    pub expr: GaussPoly,
}

pub fn parse_file(text: &str) -> Result<OracleQuery> {
    let mut dim: Option<usize> = None;
    let mut cov: Vec<Vec<Rational>> = Vec::new();
    let mut overridden: Vec<(usize, usize)> = Vec::new();
    let mut expr = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        match head {
            "dim" => {
                if dim.is_some() {
                    return parse_err(line, "`dim` given twice");
                }
                let d: usize = match rest.parse() {
                    Ok(d) if d >= 1 => d,
                    _ => return parse_err(line, "`dim` takes a positive integer"),
                };
                cov = (0..2 * d)
                    .map(|i| (0..2 * d).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
                    .collect();
                dim = Some(d);
            }
            "cov" => {
                let Some(d) = dim else {
                    return parse_err(line, "`cov` before `dim`");
                };
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return parse_err(line, "`cov` takes two real coordinates and a value");
                }
                let slot = |name: &str| -> Result<usize> {
                    match parse_var(name, d, line)? {
                        Var::X(k) => Ok(k),
                        Var::Y(k) => Ok(d + k),
                        _ => parse_err(line, "`cov` takes real coordinates x_k or y_k"),
                    }
                };
                let (a, b) = (slot(parts[0])?, slot(parts[1])?);
                let key = (a.min(b), a.max(b));
                if overridden.contains(&key) {
                    return parse_err(line, format!("covariance of {} and {} given twice", parts[0], parts[1]));
                }
                overridden.push(key);
                let v = parse_number(parts[2], line).map_err(|_| OracleError::Parse {
                    line,
                    msg: format!("bad number `{}`", parts[2]),
                })?;
                cov[a][b] = v.clone();
                cov[b][a] = v;
            }
            "expect" => {
                let Some(d) = dim else {
                    return parse_err(line, "`expect` before `dim`");
                };
                if expr.is_some() {
                    return parse_err(line, "only one `expect` per file");
                }
                expr = Some(parse_expr(rest, d, line)?);
            }
            other => return parse_err(line, format!("unknown directive `{other}`")),
        }
    }
    let Some(expr) = expr else {
        return parse_err(text.lines().count().max(1), "missing `expect` line");
    };
    let family = GaussianFamily::new(cov).map_err(|e| OracleError::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(OracleQuery { family, expr })
}

/// Exact expectation of the file's expression.
pub fn evaluate(text: &str) -> Result<ComplexRational> {
    let q = parse_file(text)?;
    Ok(expect(&q.family, &q.expr)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chaos_core::exact::format_complex;

    fn run(text: &str) -> String {
        format_complex(&evaluate(text).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(run("dim 1\nexpect (z_1*zb_1)^2\n"), "8");
        assert_eq!(run("dim 1\nexpect J(1,1,z_1)\n"), "0");
        assert_eq!(run("dim 1\nexpect J(1,1,z_1)^2\n"), "4");
        assert_eq!(run("dim 1\nexpect J(2,1,z_1)*conj(J(2,1,z_1))"), "16");
        assert_eq!(run("dim 1\nexpect H(3,x_1)^2 # 3!"), "6");
        assert_eq!(run("dim 1\ncov x_1 y_1 1/2\nexpect x_1*y_1 - 0.25"), "1/4");
        assert_eq!(run("dim 2\nexpect z_1*zb_2 + i*x_2^2"), "i");
    }

    #[test]
    fn errors() {
        assert!(matches!(evaluate("dim 1\nexpect (z_1"), Err(OracleError::Parse { line: 2, .. })));
        assert!(matches!(evaluate("dim 1\nexpect z_2"), Err(OracleError::Parse { .. })));
        assert!(matches!(evaluate("expect z_1"), Err(OracleError::Parse { .. })));
        assert!(matches!(evaluate("dim 1\nexpect x_1 $"), Err(OracleError::Parse { .. })));
        assert!(matches!(evaluate("dim 1\ncov x_1 y_1 2\nexpect x_1"), Err(OracleError::Parse { .. })));
        assert!(matches!(evaluate("dim 1\nexpect z_1^17"), Err(OracleError::Budget { degree: 17, .. })));
        assert!(matches!(evaluate("dim 1\nexpect J(9,9,z_1)"), Err(OracleError::Budget { .. })));
    }
}
