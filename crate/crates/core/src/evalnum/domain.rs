use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::freealg::{LinearPencil, MatPoly};
use crate::lift::archimedean_check;
use crate::linalg::{self, c, CMat};

use super::{eval_poly, MatrixPoint};

const MAX_REJECTIONS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    /// Points where every listed self-adjoint polynomial is PSD.
    PolyList(Vec<MatPoly>),
    /// Points where the pencil is PSD.
    Pencil(LinearPencil),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub psd_tolerance: f64,
}

impl DomainSpec {
    pub fn poly_list(ps: Vec<MatPoly>) -> Result<Self> {
        for (k, p) in ps.iter().enumerate() {
            if !p.is_self_adjoint(1e-12) {
                return Err(Error::NotHermitian(format!("generator {k} `{p}` is not self-adjoint")));
            }
            if p.u_arity() > 0 {
                return Err(Error::Invalid(format!("generator {k} `{p}` involves u letters")));
            }
        }
        Ok(DomainSpec { kind: DomainKind::PolyList(ps), psd_tolerance: 1e-9 })
    }

    pub fn pencil(l: LinearPencil) -> Self {
        DomainSpec { kind: DomainKind::Pencil(l), psd_tolerance: 1e-9 }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.psd_tolerance = tol;
        self
    }

    /// Number of `x` variables the domain constrains.
    pub fn arity(&self) -> usize {
        match &self.kind {
            DomainKind::PolyList(ps) => ps.iter().map(|p| p.x_arity()).max().unwrap_or(0) as usize,
            DomainKind::Pencil(l) => l.arity(),
        }
    }

    /// Per-coordinate radius `r_i` with `‖X_i‖ ≤ r_i` on the domain, used to
    /// scale samples. Fails when some coordinate is unbounded.
    pub fn coordinate_bounds(&self, d: usize) -> Result<Vec<f64>> {
        match &self.kind {
            DomainKind::PolyList(ps) => {
                let report = archimedean_check(ps, d);
                report
                    .caps
                    .iter()
                    .enumerate()
                    .map(|(i, cap)| {
                        cap.map(f64::sqrt).ok_or_else(|| {
                            Error::NotArchimedean(format!("no element of the form C - x{}^2", i + 1))
                        })
                    })
                    .collect()
            }
            DomainKind::Pencil(l) => {
                if d != l.arity() {
                    return Err(Error::ShapeMismatch(format!(
                        "pencil has {} variables, asked for {d}",
                        l.arity()
                    )));
                }
                Ok(l.axis_bounds())
            }
        }
    }
}

/// Membership verdict with the smallest eigenvalue seen across generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainReport {
    pub inside: bool,
    pub margin: f64,
}

pub fn in_domain(dom: &DomainSpec, x: &MatrixPoint) -> Result<DomainReport> {
    let need = dom.arity();
    if x.arity() < need {
        return Err(Error::ShapeMismatch(format!("domain needs {need} variables, point has {}", x.arity())));
    }
    let margin = match &dom.kind {
        DomainKind::PolyList(ps) => {
            let point = x.clone().into();
            let mut m = f64::INFINITY;
            for p in ps {
                m = m.min(linalg::min_eigenvalue(&eval_poly(p, &point)?));
            }
            m
        }
        DomainKind::Pencil(l) => {
            if x.arity() != l.arity() {
                return Err(Error::ShapeMismatch(format!(
                    "pencil has {} variables, point has {}",
                    l.arity(),
                    x.arity()
                )));
            }
            linalg::min_eigenvalue(&l.eval(x)?)
        }
    };
    Ok(DomainReport { inside: margin >= -dom.psd_tolerance, margin })
}

/// Rejection sampling: each coordinate is a GUE matrix rescaled to spectral
/// norm `bound_i · t` with `t` uniform in `[0, 1)`.
pub fn sample_domain(dom: &DomainSpec, n: usize, count: usize, seed: u64) -> Result<Vec<MatrixPoint>> {
    let d = dom.arity();
    let bounds = dom.coordinate_bounds(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let xs = bounds.iter().map(|&b| scaled_hermitian(&mut rng, n, b)).collect();
        let point = MatrixPoint::with_size(n, xs)?;
        if in_domain(dom, &point)?.inside {
            out.push(point);
        } else {
            rejected += 1;
            if rejected >= MAX_REJECTIONS {
                return Err(Error::SamplingExhausted { attempts: rejected });
            }
        }
    }
    Ok(out)
}

pub(crate) fn scaled_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: f64) -> CMat {
    let h = linalg::random_hermitian(rng, n);
    let norm = linalg::spectral_norm(&h);
    let t: f64 = rng.random();
    if norm == 0.0 {
        return h;
    }
    h * c(bound * t / norm)
}
