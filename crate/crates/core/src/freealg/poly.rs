use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};

use super::word::{Letter, Word};

// Coefficients below this are exact-zero leftovers (e.g. `a - a`).
const PRUNE: f64 = 1e-300;

/// A matricial noncommutative polynomial: a finite map from words to
/// `rows x cols` complex coefficient matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    terms: BTreeMap<Word, CMat>,
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatPoly { rows, cols, terms: BTreeMap::new() }
    }

    pub fn constant(m: CMat) -> Self {
        Self::term(Word::empty(), m)
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(linalg::identity(n))
    }

    pub fn scalar(z: C64) -> Self {
        Self::monomial(Word::empty(), z)
    }

    pub fn real(x: f64) -> Self {
        Self::scalar(c(x))
    }

    pub fn monomial(word: Word, z: C64) -> Self {
        Self::term(word, CMat::from_element(1, 1, z))
    }

    pub fn letter(l: Letter) -> Self {
        Self::monomial(Word::letter(l), c(1.0))
    }

    pub fn x(i: u32) -> Self {
        Self::letter(Letter::X(i))
    }

    pub fn u(j: u32) -> Self {
        Self::letter(Letter::U(j))
    }

    pub fn u_star(j: u32) -> Self {
        Self::letter(Letter::UStar(j))
    }

    pub fn term(word: Word, coef: CMat) -> Self {
        let (rows, cols) = coef.shape();
        let mut p = MatPoly::zero(rows, cols);
        if linalg::max_abs(&coef) >= PRUNE {
            p.terms.insert(word, coef);
        }
        p
    }

    /// Sum the given terms, merging repeated words.
    pub fn from_terms(rows: usize, cols: usize, terms: impl IntoIterator<Item = (Word, CMat)>) -> Result<Self> {
        let mut p = MatPoly::zero(rows, cols);
        for (w, m) in terms {
            if m.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch(format!(
                    "term {w} has shape {:?}, expected {:?}",
                    m.shape(),
                    (rows, cols)
                )));
            }
            p.accumulate(w, &m);
        }
        p.prune();
        Ok(p)
    }

    /// Assemble a matrix from 1x1 polynomial entries given in row-major order.
    pub fn from_entries(rows: usize, cols: usize, entries: &[MatPoly]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut p = MatPoly::zero(rows, cols);
        for (k, e) in entries.iter().enumerate() {
            if e.shape() != (1, 1) {
                return Err(Error::ShapeMismatch("matrix entries must be 1x1".into()));
            }
            let (i, j) = (k / cols, k % cols);
            for (w, m) in &e.terms {
                let slot = p.terms.entry(w.clone()).or_insert_with(|| CMat::zeros(rows, cols));
                slot[(i, j)] += m[(0, 0)];
            }
        }
        p.prune();
        Ok(p)
    }

    pub fn entry(&self, i: usize, j: usize) -> MatPoly {
        let mut p = MatPoly::zero(1, 1);
        for (w, m) in &self.terms {
            let z = m[(i, j)];
            if z.norm() >= PRUNE {
                p.terms.insert(w.clone(), CMat::from_element(1, 1, z));
            }
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> Option<&CMat> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.terms.keys().flat_map(|w| w.letters().iter().cloned()).collect()
    }

    /// Largest `i` with `x_i` present.
    pub fn x_arity(&self) -> u32 {
        self.letters().iter().filter(|l| l.is_x()).map(|l| l.index()).max().unwrap_or(0)
    }

    /// Largest `j` with `u_j` or `u_j*` present.
    pub fn u_arity(&self) -> u32 {
        self.letters().iter().filter(|l| !l.is_x()).map(|l| l.index()).max().unwrap_or(0)
    }

    fn accumulate(&mut self, w: Word, m: &CMat) {
        match self.terms.get_mut(&w) {
            Some(slot) => *slot += m,
            None => {
                self.terms.insert(w, m.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, m| linalg::max_abs(m) >= PRUNE);
    }

    pub fn add(&self, other: &MatPoly) -> Result<MatPoly> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = self.clone();
        for (w, m) in &other.terms {
            out.accumulate(w.clone(), m);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &MatPoly) -> Result<MatPoly> {
        self.add(&other.scale(c(-1.0)))
    }

    /// Cauchy product over word concatenation.
    pub fn mul(&self, other: &MatPoly) -> Result<MatPoly> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = MatPoly::zero(self.rows, other.cols);
        for (w1, m1) in &self.terms {
            for (w2, m2) in &other.terms {
                out.accumulate(w1.concat(w2), &(m1 * m2));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, z: C64) -> MatPoly {
        let mut out = MatPoly::zero(self.rows, self.cols);
        for (w, m) in &self.terms {
            out.terms.insert(w.clone(), m * z);
        }
        out.prune();
        out
    }

    /// The involution: conjugate-transpose coefficients, reverse-and-star words.
    pub fn adjoint(&self) -> MatPoly {
        let mut out = MatPoly::zero(self.cols, self.rows);
        for (w, m) in &self.terms {
            out.accumulate(w.adjoint(), &m.adjoint());
        }
        out
    }

    pub fn hermitian_part(&self) -> Result<MatPoly> {
        Ok(self.add(&self.adjoint())?.scale(c(0.5)))
    }

    /// Largest coefficient-wise deviation; infinite on shape mismatch.
    pub fn max_coefficient_diff(&self, other: &MatPoly) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        let words: BTreeSet<&Word> = self.terms.keys().chain(other.terms.keys()).collect();
        let zero = CMat::zeros(self.rows, self.cols);
        words
            .into_iter()
            .map(|w| {
                let a = self.terms.get(w).unwrap_or(&zero);
                let b = other.terms.get(w).unwrap_or(&zero);
                linalg::max_abs(&(a - b))
            })
            .fold(0.0, f64::max)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_coefficient_diff(&self.adjoint()) <= tol
    }

    /// `p ⊗ I_m`: every coefficient `C` becomes `C ⊗ I_m`.
    pub fn kron_identity(&self, m: usize) -> MatPoly {
        let id = linalg::identity(m);
        let mut out = MatPoly::zero(self.rows * m, self.cols * m);
        for (w, coef) in &self.terms {
            out.terms.insert(w.clone(), linalg::kron(coef, &id));
        }
        out
    }

    /// Replace every letter by a polynomial, keeping coefficient matrices.
    /// Each image must be 1x1.
    pub fn compose(&self, image: &dyn Fn(Letter) -> MatPoly) -> Result<MatPoly> {
        let mut out = MatPoly::zero(self.rows, self.cols);
        for (w, coef) in &self.terms {
            let mut prod = MatPoly::real(1.0);
            for &l in w.letters() {
                prod = prod.mul(&image(l))?;
            }
            if prod.shape() != (1, 1) {
                return Err(Error::ShapeMismatch("letter images must be 1x1".into()));
            }
            for (pw, pc) in &prod.terms {
                out.accumulate(pw.clone(), &(coef * pc[(0, 0)]));
            }
        }
        out.prune();
        Ok(out)
    }
}

impl Add for &MatPoly {
    type Output = MatPoly;
    fn add(self, rhs: &MatPoly) -> MatPoly {
        MatPoly::add(self, rhs).expect("shape mismatch in MatPoly addition")
    }
}

impl Sub for &MatPoly {
    type Output = MatPoly;
    fn sub(self, rhs: &MatPoly) -> MatPoly {
        MatPoly::sub(self, rhs).expect("shape mismatch in MatPoly subtraction")
    }
}

impl Mul for &MatPoly {
    type Output = MatPoly;
    fn mul(self, rhs: &MatPoly) -> MatPoly {
        MatPoly::mul(self, rhs).expect("shape mismatch in MatPoly product")
    }
}

impl Neg for &MatPoly {
    type Output = MatPoly;
    fn neg(self) -> MatPoly {
        self.scale(c(-1.0))
    }
}

/// A scalar noncommutative polynomial; a 1x1 [`MatPoly`].
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly(MatPoly);

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly(MatPoly::zero(1, 1))
    }

    pub fn monomial(word: Word, z: C64) -> Self {
        NcPoly(MatPoly::monomial(word, z))
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        self.0.coefficient(w).map_or(C64::new(0.0, 0.0), |m| m[(0, 0)])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, C64)> {
        self.0.terms().map(|(w, m)| (w, m[(0, 0)]))
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        NcPoly(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        NcPoly(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> NcPoly {
        NcPoly(self.0.adjoint())
    }

    pub fn as_mat(&self) -> &MatPoly {
        &self.0
    }

    pub fn into_mat(self) -> MatPoly {
        self.0
    }
}

impl TryFrom<MatPoly> for NcPoly {
    type Error = Error;
    fn try_from(p: MatPoly) -> Result<Self> {
        if p.shape() != (1, 1) {
            return Err(Error::ShapeMismatch(format!("expected 1x1, got {:?}", p.shape())));
        }
        Ok(NcPoly(p))
    }
}

impl From<NcPoly> for MatPoly {
    fn from(p: NcPoly) -> MatPoly {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn x(i: u32) -> MatPoly {
        MatPoly::x(i)
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = &x(1) + &(-&x(1));
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn distinct_words_stay_distinct() {
        let p = &(&x(1) * &x(2)) + &(&x(2) * &x(1));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn product_of_letters() {
        let p = &x(1) * &x(2);
        let w = Word::new(vec![Letter::X(1), Letter::X(2)]);
        assert_eq!(p.coefficient(&w).unwrap()[(0, 0)], c(1.0));
    }

    #[test]
    fn difference_of_squares() {
        let one = MatPoly::real(1.0);
        let p = &(&one + &x(1)) * &(&one - &x(1));
        let expected = &one - &(&x(1) * &x(1));
        assert_eq!(p, expected);
    }

    #[test]
    fn adjoint_of_u_x() {
        let p = &MatPoly::u(1) * &x(1);
        assert_eq!(p.adjoint(), &x(1) * &MatPoly::u_star(1));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = MatPoly::identity(2);
        let b = MatPoly::identity(3);
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch(_))));
        assert!(matches!(a.mul(&b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn worked_adjoint_example() {
        let x1 = x(1);
        let x2 = x(2);
        let e11 = MatPoly::scalar(C64::new(0.0, 7.0));
        let e12 = &(&(&x1 * &x2) * &x1).scale(c(1000.0)) - &(&x2 * &x2);
        let e21 = &(&x1 * &x1) + &(&x1 * &x2);
        let e22 = MatPoly::zero(1, 1);
        let m = MatPoly::from_entries(2, 2, &[e11, e12.clone(), e21, e22.clone()]).unwrap();
        let adj = m.adjoint();
        let expected = MatPoly::from_entries(
            2,
            2,
            &[MatPoly::scalar(-I * 7.0), &(&x1 * &x1) + &(&x2 * &x1), e12, e22],
        )
        .unwrap();
        assert_eq!(adj, expected);
    }

    #[test]
    fn compose_substitutes_letters() {
        let p = &MatPoly::u(1) * &x(1);
        let q = p
            .compose(&|l| match l {
                Letter::U(1) => &MatPoly::real(2.0) - &x(1),
                other => MatPoly::letter(other),
            })
            .unwrap();
        let expected = &(&MatPoly::real(2.0) - &x(1)) * &x(1);
        assert_eq!(q, expected);
    }
}
