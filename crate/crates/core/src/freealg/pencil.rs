use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalnum::MatrixPoint;
use crate::linalg::{self, json, CMat};

use super::poly::MatPoly;
use super::word::{Letter, Word};

const HERMITIAN_TOL: f64 = 1e-12;

/// `L(x) = A0 + sum_i A_i x_i` with Hermitian coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPencil {
    a0: CMat,
    ai: Vec<CMat>,
}

impl LinearPencil {
    pub fn new(a0: CMat, ai: Vec<CMat>) -> Result<Self> {
        let size = a0.nrows();
        for (k, m) in std::iter::once(&a0).chain(ai.iter()).enumerate() {
            if m.shape() != (size, size) {
                return Err(Error::ShapeMismatch(format!(
                    "pencil coefficient {k} has shape {:?}, expected {size}x{size}",
                    m.shape()
                )));
            }
            let defect = linalg::hermitian_defect(m);
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian(format!(
                    "pencil coefficient {k} (defect {defect:e})"
                )));
            }
        }
        Ok(LinearPencil { a0, ai })
    }

    /// A pencil with `A0 = I`.
    pub fn monic(ai: Vec<CMat>) -> Result<Self> {
        let size = ai.first().map_or(0, |m| m.nrows());
        Self::new(linalg::identity(size), ai)
    }

    /// `diag(1 + x, 1 - x)`, whose domain is the operator interval `[-1, 1]`.
    pub fn interval() -> Self {
        Self::monic(vec![linalg::diag_real(&[1.0, -1.0])]).expect("valid pencil")
    }

    pub fn size(&self) -> usize {
        self.a0.nrows()
    }

    pub fn arity(&self) -> usize {
        self.ai.len()
    }

    pub fn a0(&self) -> &CMat {
        &self.a0
    }

    pub fn ai(&self) -> &[CMat] {
        &self.ai
    }

    pub fn monic_defect(&self) -> f64 {
        linalg::max_abs(&(&self.a0 - linalg::identity(self.size())))
    }

    pub fn is_monic(&self) -> bool {
        self.monic_defect() <= HERMITIAN_TOL
    }

    pub fn to_matpoly(&self) -> MatPoly {
        let mut terms = vec![(Word::empty(), self.a0.clone())];
        for (i, a) in self.ai.iter().enumerate() {
            terms.push((Word::letter(Letter::X(i as u32 + 1)), a.clone()));
        }
        MatPoly::from_terms(self.size(), self.size(), terms).expect("square coefficients")
    }

    /// `A0 ⊗ I_n + sum_i A_i ⊗ X_i`, symmetrized.
    pub fn eval(&self, point: &MatrixPoint) -> Result<CMat> {
        if point.arity() != self.arity() {
            return Err(Error::ShapeMismatch(format!(
                "pencil has {} variables, point has {}",
                self.arity(),
                point.arity()
            )));
        }
        let n = point.n();
        let mut out = linalg::kron(&self.a0, &linalg::identity(n));
        for (a, x) in self.ai.iter().zip(point.xs()) {
            out += linalg::kron(a, x);
        }
        Ok(linalg::hermitian_part(&out))
    }

    /// Largest `t` with `L(t e_i) ⪰ 0` in each direction `±e_i`; used as a
    /// per-coordinate sampling radius.
    pub fn axis_bounds(&self) -> Vec<f64> {
        self.ai
            .iter()
            .map(|a| {
                let (vals, _) = linalg::hermitian_eigen(a);
                let (lo, hi) = (vals[0], vals[vals.len() - 1]);
                let up = if lo < 0.0 { -1.0 / lo } else { f64::INFINITY };
                let down = if hi > 0.0 { 1.0 / hi } else { f64::INFINITY };
                up.max(down).min(1e6)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilJson {
    #[serde(rename = "A0")]
    pub a0: json::MatrixJson,
    #[serde(rename = "Ai")]
    pub ai: Vec<json::MatrixJson>,
}

impl TryFrom<PencilJson> for LinearPencil {
    type Error = Error;
    fn try_from(j: PencilJson) -> Result<Self> {
        let a0 = json::from_json(&j.a0).map_err(Error::Invalid)?;
        let ai = j
            .ai
            .iter()
            .map(|m| json::from_json(m).map_err(Error::Invalid))
            .collect::<Result<Vec<_>>>()?;
        LinearPencil::new(a0, ai)
    }
}

impl From<&LinearPencil> for PencilJson {
    fn from(l: &LinearPencil) -> Self {
        let conv = |m: &CMat| -> json::MatrixJson {
            json::to_json(m)
                .into_iter()
                .map(|row| row.into_iter().map(json::Entry::Complex).collect())
                .collect()
        };
        PencilJson { a0: conv(&l.a0), ai: l.ai.iter().map(conv).collect() }
    }
}
