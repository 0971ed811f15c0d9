//! Recursive-descent parser.
//!
//! ```text
//! matexpr := expr | '[' row (',' row)* ']'      row := '[' expr (',' expr)* ']'
//! expr    := term (('+'|'-') term)*              term := ['-'] factor ('*' factor)*
//! factor  := atom ('^' ('-1' | '*' | INT))*      atom := NUMBER | 'i' | VAR | '(' expr ')'
//! VAR     := 'x' INT | 'u' INT ['*']
//! ```
//!
//! A `*` directly after `uK` is the starred letter `uK*` unless it is
//! followed by something that can start a factor.

use crate::error::{Error, Result};
use crate::freealg::Letter;
use crate::linalg::I;

use super::{MatRatExpr, RatExpr};

pub fn parse(text: &str) -> Result<MatRatExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let out = if p.peek() == Some(b'[') {
        p.matrix()?
    } else {
        MatRatExpr::scalar(p.expr()?)
    };
    p.expect_end()?;
    Ok(out)
}

/// Parse a single (non-matrix) expression.
pub fn parse_expr(text: &str) -> Result<RatExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", b as char)))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(b) => Err(self.error(format!("unexpected `{}`", b as char))),
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.pos, msg)
    }

    fn matrix(&mut self) -> Result<MatRatExpr> {
        self.expect(b'[')?;
        let mut rows = vec![self.row()?];
        while self.eat(b',') {
            rows.push(self.row()?);
        }
        self.expect(b']')?;
        let cols = rows[0].len();
        if let Some(k) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Arity(format!(
                "row {k} has {} entries, row 0 has {cols}",
                rows[k].len()
            )));
        }
        let n = rows.len();
        MatRatExpr::new(n, cols, rows.into_iter().flatten().collect())
    }

    fn row(&mut self) -> Result<Vec<RatExpr>> {
        self.expect(b'[')?;
        let mut entries = vec![self.expr()?];
        while self.eat(b',') {
            entries.push(self.expr()?);
        }
        self.expect(b']')?;
        Ok(entries)
    }

    fn expr(&mut self) -> Result<RatExpr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(RatExpr::negate(t));
            } else {
                break;
            }
        }
        Ok(RatExpr::sum(terms))
    }

    fn term(&mut self) -> Result<RatExpr> {
        let negative = self.eat(b'-');
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        let t = RatExpr::product(factors);
        Ok(if negative { RatExpr::negate(t) } else { t })
    }

    fn factor(&mut self) -> Result<RatExpr> {
        let mut e = self.atom()?;
        while self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let k = self.integer()?;
                    if k != 1 {
                        return Err(Error::syntax(at, "only `^-1` is allowed as a negative power"));
                    }
                    e = RatExpr::inverse(e).map_err(|_| Error::syntax(at, "inverse of the literal 0"))?;
                }
                Some(b'*') => {
                    self.pos += 1;
                    e = RatExpr::adjoint(e);
                }
                Some(b) if b.is_ascii_digit() => {
                    let k = self.integer()?;
                    e = RatExpr::product(vec![e; k as usize]);
                }
                _ => return Err(self.error("expected `-1`, `*` or an integer exponent")),
            }
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<RatExpr> {
        self.skip_ws();
        match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b'i') => {
                self.pos += 1;
                if matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric()) {
                    return Err(self.error("unknown identifier"));
                }
                Ok(RatExpr::Scalar(I))
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(RatExpr::Letter(Letter::X(self.index()?)))
            }
            Some(b'u') => {
                self.pos += 1;
                let j = self.index()?;
                if self.star_follows() {
                    self.eat(b'*');
                    Ok(RatExpr::Letter(Letter::UStar(j)))
                } else {
                    Ok(RatExpr::Letter(Letter::U(j)))
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) => Err(self.error(format!("unexpected `{}`", b as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    // `*` that does not introduce another factor
    fn star_follows(&self) -> bool {
        let mut k = self.pos;
        let ws = |k: &mut usize| {
            while matches!(self.src.get(*k), Some(b) if b.is_ascii_whitespace()) {
                *k += 1;
            }
        };
        ws(&mut k);
        if self.src.get(k) != Some(&b'*') {
            return false;
        }
        k += 1;
        ws(&mut k);
        !matches!(self.src.get(k), Some(b) if b.is_ascii_digit() || b"(.ixu".contains(b))
    }

    fn index(&mut self) -> Result<u32> {
        let at = self.pos;
        if !matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            return Err(self.error("expected a variable index"));
        }
        let k = self.integer()?;
        if k == 0 {
            return Err(Error::syntax(at, "variable indices start at 1"));
        }
        Ok(k)
    }

    fn integer(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::syntax(start, "expected an integer"))
    }

    fn number(&mut self) -> Result<RatExpr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while matches!(p.peek(), Some(b) if b.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            digits(self);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(RatExpr::real)
            .map_err(|_| Error::syntax(start, format!("malformed number `{text}`")))
    }
}
