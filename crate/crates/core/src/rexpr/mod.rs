//! Noncommutative rational expressions: syntax trees, parser, printer and
//! the structural queries used by the lifting constructions.
//!
//! Trees built through the smart constructors keep two invariants the
//! printer relies on for round-tripping: `Sum`/`Product` nodes have at least
//! two children and never consist solely of scalars, and no `Inverse` wraps
//! the literal scalar zero.

mod ops;
mod parser;
mod printer;

use std::fmt;

use crate::error::{Error, Result};
use crate::freealg::{Letter, MatPoly};
use crate::linalg::{c, C64};

pub use ops::{adjoint_expr, inverse_subterms, inversion_count, normalize, push_adjoints, substitute};
pub use parser::{parse, parse_expr};

#[derive(Clone, Debug, PartialEq)]
pub enum RatExpr {
    Scalar(C64),
    Letter(Letter),
    Sum(Vec<RatExpr>),
    Product(Vec<RatExpr>),
    Inverse(Box<RatExpr>),
    Adjoint(Box<RatExpr>),
}

impl RatExpr {
    pub fn real(x: f64) -> Self {
        RatExpr::Scalar(c(x))
    }

    pub fn x(i: u32) -> Self {
        RatExpr::Letter(Letter::X(i))
    }

    pub fn u(j: u32) -> Self {
        RatExpr::Letter(Letter::U(j))
    }

    pub fn as_scalar(&self) -> Option<C64> {
        match self {
            RatExpr::Scalar(z) => Some(*z),
            _ => None,
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, RatExpr::Scalar(_))
    }

    /// Sum node; folds all-scalar operand lists and unwraps singletons.
    pub fn sum(terms: Vec<RatExpr>) -> RatExpr {
        match terms.len() {
            0 => RatExpr::real(0.0),
            1 => terms.into_iter().next().unwrap(),
            _ if terms.iter().all(RatExpr::is_scalar) => {
                RatExpr::Scalar(terms.iter().filter_map(RatExpr::as_scalar).sum())
            }
            _ => RatExpr::Sum(terms),
        }
    }

    /// Product node; folds all-scalar factor lists and unwraps singletons.
    pub fn product(factors: Vec<RatExpr>) -> RatExpr {
        match factors.len() {
            0 => RatExpr::real(1.0),
            1 => factors.into_iter().next().unwrap(),
            _ if factors.iter().all(RatExpr::is_scalar) => {
                RatExpr::Scalar(factors.iter().filter_map(RatExpr::as_scalar).product())
            }
            _ => RatExpr::Product(factors),
        }
    }

    pub fn inverse(e: RatExpr) -> Result<RatExpr> {
        if e.as_scalar() == Some(C64::new(0.0, 0.0)) {
            return Err(Error::Invalid("inverse of the literal 0".into()));
        }
        Ok(RatExpr::Inverse(Box::new(e)))
    }

    pub fn adjoint(e: RatExpr) -> RatExpr {
        RatExpr::Adjoint(Box::new(e))
    }

    /// Negation as a `-1` product: a leading scalar factor absorbs the sign.
    pub fn negate(e: RatExpr) -> RatExpr {
        match e {
            RatExpr::Scalar(z) => RatExpr::Scalar(-z),
            RatExpr::Product(mut fs) => {
                if let RatExpr::Scalar(z) = fs[0] {
                    fs[0] = RatExpr::Scalar(-z);
                } else {
                    fs.insert(0, RatExpr::real(-1.0));
                }
                RatExpr::product(fs)
            }
            other => RatExpr::product(vec![RatExpr::real(-1.0), other]),
        }
    }

    pub fn difference(a: RatExpr, b: RatExpr) -> RatExpr {
        RatExpr::sum(vec![a, RatExpr::negate(b)])
    }

    pub fn children(&self) -> &[RatExpr] {
        match self {
            RatExpr::Sum(v) | RatExpr::Product(v) => v,
            RatExpr::Inverse(a) | RatExpr::Adjoint(a) => std::slice::from_ref(a.as_ref()),
            _ => &[],
        }
    }

    pub fn has_inverse(&self) -> bool {
        matches!(self, RatExpr::Inverse(_)) || self.children().iter().any(RatExpr::has_inverse)
    }

    /// Largest `x` index appearing in the tree.
    pub fn x_arity(&self) -> u32 {
        match self {
            RatExpr::Letter(Letter::X(i)) => *i,
            _ => self.children().iter().map(RatExpr::x_arity).max().unwrap_or(0),
        }
    }

    /// Largest `u` index appearing in the tree.
    pub fn u_arity(&self) -> u32 {
        match self {
            RatExpr::Letter(Letter::U(j)) | RatExpr::Letter(Letter::UStar(j)) => *j,
            _ => self.children().iter().map(RatExpr::u_arity).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(RatExpr::size).sum::<usize>()
    }

    /// Expand an inverse-free expression into a polynomial.
    pub fn to_poly(&self) -> Result<MatPoly> {
        Ok(match self {
            RatExpr::Scalar(z) => MatPoly::scalar(*z),
            RatExpr::Letter(l) => MatPoly::letter(*l),
            RatExpr::Sum(ts) => {
                let mut acc = MatPoly::zero(1, 1);
                for t in ts {
                    acc = acc.add(&t.to_poly()?)?;
                }
                acc
            }
            RatExpr::Product(fs) => {
                let mut acc = MatPoly::real(1.0);
                for f in fs {
                    acc = acc.mul(&f.to_poly()?)?;
                }
                acc
            }
            RatExpr::Adjoint(a) => a.to_poly()?.adjoint(),
            RatExpr::Inverse(_) => return Err(Error::NotPolynomial(self.to_string())),
        })
    }

    /// Expression for a 1x1 polynomial: a sum of `coef * letters` terms.
    pub fn from_poly(p: &MatPoly) -> Result<RatExpr> {
        if p.shape() != (1, 1) {
            return Err(Error::ShapeMismatch("expected a 1x1 polynomial".into()));
        }
        let terms = p
            .terms()
            .map(|(w, m)| {
                let z = m[(0, 0)];
                let mut fs = Vec::with_capacity(w.degree() + 1);
                if z != c(1.0) || w.is_empty() {
                    fs.push(RatExpr::Scalar(z));
                }
                fs.extend(w.letters().iter().map(|&l| RatExpr::Letter(l)));
                RatExpr::product(fs)
            })
            .collect();
        Ok(RatExpr::sum(terms))
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::print_expr(self))
    }
}

/// A matrix of rational expressions, entries in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct MatRatExpr {
    rows: usize,
    cols: usize,
    entries: Vec<RatExpr>,
}

impl MatRatExpr {
    pub fn new(rows: usize, cols: usize, entries: Vec<RatExpr>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::Arity(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(MatRatExpr { rows, cols, entries })
    }

    pub fn scalar(e: RatExpr) -> Self {
        MatRatExpr { rows: 1, cols: 1, entries: vec![e] }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| RatExpr::real(if k / n == k % n { 1.0 } else { 0.0 }))
            .collect();
        MatRatExpr { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[RatExpr] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &RatExpr {
        &self.entries[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&RatExpr) -> RatExpr) -> MatRatExpr {
        MatRatExpr { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn x_arity(&self) -> u32 {
        self.entries.iter().map(RatExpr::x_arity).max().unwrap_or(0)
    }

    pub fn u_arity(&self) -> u32 {
        self.entries.iter().map(RatExpr::u_arity).max().unwrap_or(0)
    }

    pub fn has_inverse(&self) -> bool {
        self.entries.iter().any(RatExpr::has_inverse)
    }

    /// Conjugate transpose with adjoints pushed to the leaves.
    pub fn adjoint(&self) -> MatRatExpr {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(adjoint_expr(self.entry(i, j)));
            }
        }
        MatRatExpr { rows: self.cols, cols: self.rows, entries }
    }

    pub fn mul(&self, other: &MatRatExpr) -> Result<MatRatExpr> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let zero = |e: &RatExpr| e.as_scalar() == Some(C64::new(0.0, 0.0));
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let terms: Vec<RatExpr> = (0..self.cols)
                    .filter(|&k| !zero(self.entry(i, k)) && !zero(other.entry(k, j)))
                    .map(|k| product_of(self.entry(i, k), other.entry(k, j)))
                    .collect();
                entries.push(RatExpr::sum(terms));
            }
        }
        Ok(MatRatExpr { rows: self.rows, cols: other.cols, entries })
    }

    pub fn to_matpoly(&self) -> Result<MatPoly> {
        let polys = self.entries.iter().map(RatExpr::to_poly).collect::<Result<Vec<_>>>()?;
        MatPoly::from_entries(self.rows, self.cols, &polys)
    }

    pub fn from_matpoly(p: &MatPoly) -> Result<MatRatExpr> {
        let mut entries = Vec::with_capacity(p.rows() * p.cols());
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                entries.push(RatExpr::from_poly(&p.entry(i, j))?);
            }
        }
        MatRatExpr::new(p.rows(), p.cols(), entries)
    }
}

// Multiplying by the scalar 1 is elided.
fn product_of(a: &RatExpr, b: &RatExpr) -> RatExpr {
    let one = Some(c(1.0));
    if a.as_scalar() == one {
        return b.clone();
    }
    if b.as_scalar() == one {
        return a.clone();
    }
    RatExpr::product(vec![a.clone(), b.clone()])
}

impl fmt::Display for MatRatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::print_matrix(self))
    }
}
