//! Numerical evaluation of polynomials and rational expressions on tuples of
//! matrices, domain membership and sampling, randomized equivalence testing,
//! and samples of the kernel variety used to check ideal terms.

mod domain;
mod equiv;
mod zr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freealg::{Letter, MatPoly, Word};
use crate::linalg::{self, json, CMat};
use crate::rexpr::{MatRatExpr, RatExpr};

pub use domain::{in_domain, sample_domain, DomainKind, DomainReport, DomainSpec};
pub use equiv::{test_equivalence, EquivalenceReport, SizeStats, Verdict};
pub use zr::{inverse_values, sample_zr, ZFamily, ZSample};

/// Condition-number cap above which an inverse is treated as undefined.
pub const DEFAULT_COND_CAP: f64 = 1e12;

const HERMITIAN_TOL: f64 = 1e-12;

/// A tuple of Hermitian `n x n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoint {
    n: usize,
    xs: Vec<CMat>,
}

impl MatrixPoint {
    /// Size is taken from the first matrix; an empty tuple has size 1.
    pub fn new(xs: Vec<CMat>) -> Result<Self> {
        let n = xs.first().map_or(1, |m| m.nrows());
        Self::with_size(n, xs)
    }

    pub fn with_size(n: usize, xs: Vec<CMat>) -> Result<Self> {
        for (i, x) in xs.iter().enumerate() {
            if x.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "X{} has shape {:?}, expected {n}x{n}",
                    i + 1,
                    x.shape()
                )));
            }
            let defect = linalg::hermitian_defect(x);
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian(format!("X{} (defect {defect:e})", i + 1)));
            }
        }
        Ok(MatrixPoint { n, xs })
    }

    /// Scalar point `x_i = values[i]`.
    pub fn scalars(values: &[f64]) -> Self {
        MatrixPoint { n: 1, xs: values.iter().map(|&v| linalg::diag_real(&[v])).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[CMat] {
        &self.xs
    }

    pub fn x(&self, i: usize) -> &CMat {
        &self.xs[i]
    }

    /// Block-diagonal sum of two points of equal arity.
    pub fn direct_sum(&self, other: &MatrixPoint) -> MatrixPoint {
        let xs = self.xs.iter().zip(&other.xs).map(|(a, b)| block_diag(a, b)).collect();
        MatrixPoint { n: self.n + other.n, xs }
    }
}

pub(crate) fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((p, p), (q, q)).copy_from(b);
    out
}

/// A matrix point together with values for the `u` letters. `u_j*`
/// evaluates to the conjugate transpose of `U_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedPoint {
    base: MatrixPoint,
    us: Vec<CMat>,
}

impl ExtendedPoint {
    pub fn new(base: MatrixPoint, us: Vec<CMat>) -> Result<Self> {
        let n = base.n();
        if let Some(j) = us.iter().position(|u| u.shape() != (n, n)) {
            return Err(Error::ShapeMismatch(format!("U{} is not {n}x{n}", j + 1)));
        }
        Ok(ExtendedPoint { base, us })
    }

    pub fn base(&self) -> &MatrixPoint {
        &self.base
    }

    pub fn us(&self) -> &[CMat] {
        &self.us
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    fn letter(&self, l: Letter) -> Result<CMat> {
        let missing = || Error::ShapeMismatch(format!("point has no value for {l}"));
        let k = l.index() as usize - 1;
        match l {
            Letter::X(_) => self.base.xs.get(k).cloned().ok_or_else(missing),
            Letter::U(_) => self.us.get(k).cloned().ok_or_else(missing),
            Letter::UStar(_) => self.us.get(k).map(|u| u.adjoint()).ok_or_else(missing),
        }
    }

    fn word(&self, w: &Word) -> Result<CMat> {
        let mut acc = linalg::identity(self.n());
        for &l in w.letters() {
            acc *= self.letter(l)?;
        }
        Ok(acc)
    }
}

impl From<MatrixPoint> for ExtendedPoint {
    fn from(base: MatrixPoint) -> Self {
        ExtendedPoint { base, us: Vec::new() }
    }
}

/// JSON form `{"n": .., "X": [...], "U": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<json::MatrixJson>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<json::MatrixJson>>,
}

fn to_matrix_json(m: &CMat) -> json::MatrixJson {
    json::to_json(m)
        .into_iter()
        .map(|row| row.into_iter().map(json::Entry::Complex).collect())
        .collect()
}

impl From<&ExtendedPoint> for PointJson {
    fn from(p: &ExtendedPoint) -> Self {
        PointJson {
            n: p.n(),
            x: p.base.xs.iter().map(to_matrix_json).collect(),
            u: (!p.us.is_empty()).then(|| p.us.iter().map(to_matrix_json).collect()),
        }
    }
}

impl From<&MatrixPoint> for PointJson {
    fn from(p: &MatrixPoint) -> Self {
        PointJson { n: p.n, x: p.xs.iter().map(to_matrix_json).collect(), u: None }
    }
}

impl TryFrom<&PointJson> for ExtendedPoint {
    type Error = Error;
    fn try_from(j: &PointJson) -> Result<Self> {
        let conv = |ms: &[json::MatrixJson]| {
            ms.iter().map(|m| json::from_json(m).map_err(Error::Invalid)).collect::<Result<Vec<_>>>()
        };
        let base = MatrixPoint::with_size(j.n, conv(&j.x)?)?;
        let us = conv(j.u.as_deref().unwrap_or(&[]))?;
        ExtendedPoint::new(base, us)
    }
}

/// `p(X, U) = sum_w C_w ⊗ w(X, U)`, an `(rows·n) x (cols·n)` matrix.
pub fn eval_poly(p: &MatPoly, point: &ExtendedPoint) -> Result<CMat> {
    let n = point.n();
    let mut out = CMat::zeros(p.rows() * n, p.cols() * n);
    for (w, coef) in p.terms() {
        out += linalg::kron(coef, &point.word(w)?);
    }
    Ok(out)
}

/// Evaluate a matrix of rational expressions; block `(i, j)` holds entry
/// `(i, j)`. Inverses whose argument has condition number above `cond_cap`
/// raise `NotInDomain`.
pub fn eval_expr(e: &MatRatExpr, point: &ExtendedPoint, cond_cap: f64) -> Result<CMat> {
    let n = point.n();
    let mut out = CMat::zeros(e.rows() * n, e.cols() * n);
    for i in 0..e.rows() {
        for j in 0..e.cols() {
            let v = eval_rat(e.entry(i, j), point, cond_cap)?;
            out.view_mut((i * n, j * n), (n, n)).copy_from(&v);
        }
    }
    Ok(out)
}

/// Evaluate a single expression to an `n x n` matrix.
pub fn eval_rat(e: &RatExpr, point: &ExtendedPoint, cond_cap: f64) -> Result<CMat> {
    let n = point.n();
    Ok(match e {
        RatExpr::Scalar(z) => linalg::identity(n) * *z,
        RatExpr::Letter(l) => point.letter(*l)?,
        RatExpr::Sum(ts) => {
            let mut acc = CMat::zeros(n, n);
            for t in ts {
                acc += eval_rat(t, point, cond_cap)?;
            }
            acc
        }
        RatExpr::Product(fs) => {
            let mut acc = linalg::identity(n);
            for f in fs {
                acc *= eval_rat(f, point, cond_cap)?;
            }
            acc
        }
        RatExpr::Adjoint(a) => eval_rat(a, point, cond_cap)?.adjoint(),
        RatExpr::Inverse(a) => {
            let m = eval_rat(a, point, cond_cap)?;
            invert(&m, cond_cap).map_err(|reason| Error::NotInDomain { subterm: a.to_string(), reason })?
        }
    })
}

pub(crate) fn invert(m: &CMat, cond_cap: f64) -> std::result::Result<CMat, String> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("non-finite entries".into());
    }
    let cond = linalg::condition_number(m);
    if cond > cond_cap {
        return Err(format!("condition number {cond:e} exceeds {cond_cap:e}"));
    }
    m.clone().lu().try_inverse().ok_or_else(|| "singular matrix".to_string())
}

/// Largest relative entrywise deviation between two evaluations.
pub(crate) fn relative_deviation(a: &CMat, b: &CMat) -> f64 {
    let scale = 1.0 + linalg::max_abs(a).max(linalg::max_abs(b));
    linalg::max_abs(&(a - b)) / scale
}
