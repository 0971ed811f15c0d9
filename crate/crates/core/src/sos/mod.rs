//! Weighted sum-of-squares certificates: Gram formulation, extraction, the
//! symbolic verifier and the certification pipelines.
//!
//! A [`Certificate`] claims
//!
//! ```text
//! q = Σ s_i^* s_i + Σ r_j^* g_j r_j + Σ (ι_k^* m_k + m_k^* ι_k)
//! ```
//!
//! and [`verify_certificate`] checks the claim by symbolic expansion, without
//! reference to how the factors were found.

mod gram;
mod pipeline;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalnum::{eval_expr, DomainSpec, ExtendedPoint, MatrixPoint, DEFAULT_COND_CAP};
use crate::freealg::MatPoly;
use crate::lift::probe_points;
use crate::linalg;
use crate::rexpr::{parse, MatRatExpr};

pub use gram::{
    build_gram_problem, extract_certificate, solve_gram, Functional, GramBlock, GramProblem, IdealBlock, WordBasis,
    RANK_TOL,
};
pub use pipeline::{
    assemble_rational_certificate, certify_pencil_rational, certify_polynomial, certify_rational, CertifyOptions,
    certify_rational_assembled, eval_certificate, pointwise_agreement, PencilOutcome, RationalCertificate,
    RationalOutcome,
};

/// Acceptance threshold on the verifier residual.
pub const ACCEPT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Polynomial,
    /// Over `(x, u)` with the augmented Archimedean generators.
    Lifted,
    /// Over `(x, u)` with a monic pencil and ideal terms.
    Pencil,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Polynomial => "polynomial",
            Pipeline::Lifted => "rational-lifted",
            Pipeline::Pencil => "pencil",
        }
    }

    fn from_name(s: &str) -> Result<Pipeline> {
        Ok(match s {
            "polynomial" => Pipeline::Polynomial,
            "rational-lifted" => Pipeline::Lifted,
            "pencil" => Pipeline::Pencil,
            other => return Err(Error::Invalid(format!("unknown pipeline `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub pipeline: Pipeline,
    pub delta: usize,
    pub target: MatPoly,
    pub generators: Vec<MatPoly>,
    /// Human-readable role of each generator.
    pub labels: Vec<String>,
    pub ideal_gens: Vec<MatPoly>,
    pub sos: Vec<MatPoly>,
    /// `(generator index, r)`.
    pub weighted: Vec<(usize, MatPoly)>,
    /// `(ideal generator index, ι)`.
    pub ideal: Vec<(usize, MatPoly)>,
    /// Largest coefficient deviation between the expansion and the target.
    pub residual: f64,
    /// Printed back-substitution `u_j ↦ g_j^-1`, when the target uses `u`.
    pub substitution: Vec<(String, String)>,
}

impl Certificate {
    /// The empty certificate for `q = 0`.
    pub fn empty(target: MatPoly, pipeline: Pipeline) -> Certificate {
        Certificate {
            pipeline,
            delta: 0,
            target,
            generators: Vec::new(),
            labels: Vec::new(),
            ideal_gens: Vec::new(),
            sos: Vec::new(),
            weighted: Vec::new(),
            ideal: Vec::new(),
            residual: 0.0,
            substitution: Vec::new(),
        }
    }

    /// Expansion against the certificate's own generators.
    pub fn expand(&self) -> Result<MatPoly> {
        expand_with(self, &self.generators, &self.ideal_gens)
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            pipeline: self.pipeline.name().to_string(),
            delta: self.delta,
            target: self.target.to_string(),
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            labels: self.labels.clone(),
            sos: self.sos.iter().map(|s| s.to_string()).collect(),
            weighted: self.weighted.iter().map(|(g, r)| WeightedJson { gen: *g, r: r.to_string() }).collect(),
            ideal: self
                .ideal
                .iter()
                .map(|(k, iota)| IdealJson { m: self.ideal_gens[*k].to_string(), iota: iota.to_string() })
                .collect(),
            residual: self.residual,
            substitution: self.substitution.iter().cloned().collect(),
        }
    }

    /// Read a certificate back; the residual is recomputed.
    pub fn from_json(j: &CertificateJson) -> Result<Certificate> {
        let poly = |s: &str| parse(s)?.to_matpoly();
        let generators = j.generators.iter().map(|s| poly(s)).collect::<Result<Vec<_>>>()?;
        let mut weighted = Vec::new();
        for w in &j.weighted {
            if w.gen >= generators.len() {
                return Err(Error::Invalid(format!("weighted term refers to generator {}", w.gen)));
            }
            weighted.push((w.gen, poly(&w.r)?));
        }
        let mut ideal_gens = Vec::new();
        let mut ideal = Vec::new();
        for (k, t) in j.ideal.iter().enumerate() {
            ideal_gens.push(poly(&t.m)?);
            ideal.push((k, poly(&t.iota)?));
        }
        let mut cert = Certificate {
            pipeline: Pipeline::from_name(&j.pipeline)?,
            delta: j.delta,
            target: poly(&j.target)?,
            labels: if j.labels.len() == generators.len() {
                j.labels.clone()
            } else {
                (1..=generators.len()).map(|k| format!("g{k}")).collect()
            },
            generators,
            ideal_gens,
            sos: j.sos.iter().map(|s| poly(s)).collect::<Result<Vec<_>>>()?,
            weighted,
            ideal,
            residual: 0.0,
            substitution: j.substitution.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        cert.residual = verify_certificate(&cert.target, &cert, &cert.generators, &cert.ideal_gens)?;
        Ok(cert)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedJson {
    pub gen: usize,
    pub r: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealJson {
    pub m: String,
    pub iota: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub pipeline: String,
    pub delta: usize,
    pub target: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub labels: Vec<String>,
    pub sos: Vec<String>,
    pub weighted: Vec<WeightedJson>,
    pub ideal: Vec<IdealJson>,
    pub residual: f64,
    #[serde(default)]
    pub substitution: BTreeMap<String, String>,
}

fn expand_with(c: &Certificate, gens: &[MatPoly], ideal_gens: &[MatPoly]) -> Result<MatPoly> {
    let m = c.target.rows();
    let mut acc = MatPoly::zero(m, m);
    for s in &c.sos {
        acc = acc.add(&s.adjoint().mul(s)?)?;
    }
    for (g, r) in &c.weighted {
        let gen = gens.get(*g).ok_or_else(|| Error::Invalid(format!("no generator {g}")))?;
        acc = acc.add(&r.adjoint().mul(gen)?.mul(r)?)?;
    }
    for (k, iota) in &c.ideal {
        let gen = ideal_gens.get(*k).ok_or_else(|| Error::Invalid(format!("no ideal generator {k}")))?;
        let gen = if gen.shape() == (1, 1) && iota.rows() != 1 { gen.kron_identity(iota.rows()) } else { gen.clone() };
        let t = iota.adjoint().mul(&gen)?;
        acc = acc.add(&t)?.add(&t.adjoint())?;
    }
    Ok(acc)
}

/// Largest coefficient deviation between `q` and the expansion of `c`
/// against the given generators.
pub fn verify_certificate(q: &MatPoly, c: &Certificate, gens: &[MatPoly], ideal_gens: &[MatPoly]) -> Result<f64> {
    Ok(expand_with(c, gens, ideal_gens)?.max_coefficient_diff(q))
}

/// Smallest eigenvalue of the Hermitian part of an expression over sampled
/// domain points.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub witness: MatrixPoint,
    pub samples: usize,
}

/// Evaluate at random domain samples of sizes `1..=n_sizes` (`count` per
/// size) plus, for polynomial domains, the scalar corner points.
pub fn check_positivity(
    e: &MatRatExpr,
    dom: &DomainSpec,
    n_sizes: usize,
    count: usize,
    seed: u64,
) -> Result<PositivityReport> {
    if e.rows() != e.cols() {
        return Err(Error::ShapeMismatch(format!("expression is {}x{}", e.rows(), e.cols())));
    }
    if e.u_arity() > 0 {
        return Err(Error::Invalid("positivity is checked over x letters only".into()));
    }
    let d = dom.arity().max(e.x_arity() as usize);
    let points = probe_points(dom, d, n_sizes, count, seed)?;
    let mut best: Option<(f64, MatrixPoint)> = None;
    for x in &points {
        let point = ExtendedPoint::from(x.clone());
        let v = eval_expr(e, &point, DEFAULT_COND_CAP)?;
        let lam = linalg::min_eigenvalue(&linalg::hermitian_part(&v));
        if best.as_ref().is_none_or(|(b, _)| lam < *b) {
            best = Some((lam, x.clone()));
        }
    }
    let (min_eigenvalue, witness) = best.ok_or_else(|| Error::Invalid("no sample points".into()))?;
    Ok(PositivityReport { min_eigenvalue, witness, samples: points.len() })
}
