//! The certification pipelines: polynomial targets on Archimedean domains,
//! rational targets through the `u` lift, and rational targets on monic
//! pencil domains through ideal terms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evalnum::{eval_expr, eval_poly, sample_domain, DomainSpec, ExtendedPoint, MatrixPoint, DEFAULT_COND_CAP};
use crate::freealg::{Letter, LinearPencil, MatPoly};
use crate::lift::{
    archimedean_check, build_hat, build_mr, build_o, closure_cr, estimate_d, probe_points, AugmentedSet, LiftResult,
    OTag,
};
use crate::linalg::{self, c, CMat};
use crate::rexpr::{substitute, MatRatExpr, RatExpr};
use crate::sdp::SdpOutcome;

use super::gram::{build_gram_problem, extract_certificate, solve_gram};
use super::{check_positivity, Certificate, Pipeline};

/// Sampled minima below this trigger a strictness warning.
const STRICTNESS_WARN: f64 = 1e-4;
/// Sampled minima below `-NEGATIVE_TOL` short-circuit to `NotCertified`.
const NEGATIVE_TOL: f64 = 1e-9;
/// Bound on dropped relation terms at inverse-type points.
const RELATION_TOL: f64 = 1e-8;
const RELATION_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub delta_max: usize,
    /// Solver contract tolerance.
    pub solver_tol: f64,
    /// Largest accepted verifier residual.
    pub accept_tol: f64,
    pub seed: u64,
    /// Matrix sizes `1..=max_size` are sampled for screening and caps.
    pub max_size: usize,
    pub per_size: usize,
    /// Points used for pointwise agreement checks.
    pub verify_samples: usize,
    pub safety: f64,
    /// How often the norm caps are doubled after a failed sweep.
    pub doublings: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            delta_max: 3,
            solver_tol: 1e-8,
            accept_tol: super::ACCEPT_TOL,
            seed: 0,
            max_size: 3,
            per_size: 20,
            verify_samples: 100,
            safety: crate::lift::DEFAULT_SAFETY,
            doublings: 4,
        }
    }
}

fn not_certified(delta_max: usize, margins: Vec<(usize, f64)>) -> Error {
    Error::NotCertified { delta_max, margins }
}

/// Try `delta = start ..= delta_max` and return the first certificate whose
/// verifier residual is within the acceptance tolerance.
fn sweep(
    target: &MatPoly,
    gens: &[MatPoly],
    ideal_gens: &[MatPoly],
    start: usize,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    let mut margins = Vec::new();
    for delta in start..=opts.delta_max {
        let problem = match build_gram_problem(target, gens, ideal_gens, delta) {
            Ok(p) => p,
            Err(Error::DegreeTooSmall { .. }) => {
                margins.push((delta, f64::NEG_INFINITY));
                continue;
            }
            Err(e) => return Err(e),
        };
        match solve_gram(&problem, opts.solver_tol) {
            Ok(SdpOutcome::Feasible(sol)) => {
                let cert = extract_certificate(&problem, &sol)?;
                if cert.residual <= opts.accept_tol {
                    return Ok(cert);
                }
                margins.push((delta, sol.margin));
            }
            Ok(SdpOutcome::Infeasible { margin_bound, .. }) => {
                margins.push((delta, margin_bound.unwrap_or(f64::NEG_INFINITY)))
            }
            Err(Error::SolverStalled { .. }) => margins.push((delta, f64::NAN)),
            Err(e) => return Err(e),
        }
    }
    Err(not_certified(opts.delta_max, margins))
}

fn start_delta(q: &MatPoly) -> usize {
    q.degree().div_ceil(2)
}

fn x_arity(q: &MatPoly, ps: &[MatPoly]) -> usize {
    ps.iter().map(|p| p.x_arity()).chain([q.x_arity()]).max().unwrap_or(0) as usize
}

/// Certify `q ⪰ 0` on the domain of an Archimedean generator list.
pub fn certify_polynomial(q: &MatPoly, ps: &[MatPoly], opts: &CertifyOptions) -> Result<Certificate> {
    if q.u_arity() > 0 {
        return Err(Error::Invalid("polynomial targets are over x letters only".into()));
    }
    let report = archimedean_check(ps, x_arity(q, ps));
    if !report.passes {
        return Err(Error::NotArchimedean(archimedean_message(&report.caps, &report.non_self_adjoint)));
    }
    if !q.is_self_adjoint(1e-12) {
        return Err(Error::NotHermitian(format!("target {q}")));
    }
    let mut cert = if q.is_zero() {
        Certificate::empty(q.clone(), Pipeline::Polynomial)
    } else {
        sweep(q, ps, &[], start_delta(q), opts)?
    };
    cert.generators = ps.to_vec();
    cert.labels = (1..=ps.len()).map(|k| format!("P{k}")).collect();
    Ok(cert)
}

fn archimedean_message(caps: &[Option<f64>], bad: &[usize]) -> String {
    let missing: Vec<String> = caps
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_none())
        .map(|(i, _)| format!("C - x{}^2", i + 1))
        .collect();
    let mut parts = Vec::new();
    if !missing.is_empty() {
        parts.push(format!("missing {}", missing.join(", ")));
    }
    if !bad.is_empty() {
        let ids: Vec<String> = bad.iter().map(|k| format!("P{}", k + 1)).collect();
        parts.push(format!("not self-adjoint: {}", ids.join(", ")));
    }
    parts.join("; ")
}

/// Result of the lifted pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalOutcome {
    /// Certificate over `(x, u)` for the Hermitian part of the lifted target.
    pub certificate: Certificate,
    pub lift: LiftResult,
    /// The augmented generator set the certificate refers to (`None` when
    /// the target has no inverses).
    pub augmented: Option<AugmentedSet>,
    /// Final norm caps.
    pub d: Vec<f64>,
    pub min_sampled: f64,
    pub warnings: Vec<String>,
}

fn back_bindings(lift: &LiftResult) -> Vec<(RatExpr, RatExpr)> {
    let mut out = Vec::new();
    for (j, g) in lift.inverses.iter().enumerate() {
        let inv = RatExpr::Inverse(Box::new(g.clone()));
        out.push((RatExpr::Letter(Letter::U(j as u32 + 1)), inv.clone()));
        out.push((RatExpr::Letter(Letter::UStar(j as u32 + 1)), RatExpr::Adjoint(Box::new(inv))));
    }
    out
}

fn substitution_map(lift: &LiftResult) -> Vec<(String, String)> {
    lift.inverses
        .iter()
        .enumerate()
        .map(|(j, g)| (format!("u{}", j + 1), RatExpr::Inverse(Box::new(g.clone())).to_string()))
        .collect()
}

fn screen(
    q: &MatRatExpr,
    dom: &DomainSpec,
    opts: &CertifyOptions,
    strict: bool,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    let report = check_positivity(q, dom, opts.max_size, opts.per_size, opts.seed)?;
    let min = report.min_eigenvalue;
    if min < -NEGATIVE_TOL {
        return Err(not_certified(opts.delta_max, Vec::new()));
    }
    if strict && min < STRICTNESS_WARN {
        warnings.push(format!("sampled minimum eigenvalue {min:e} is close to zero; the solver may stall"));
    }
    Ok(min)
}

/// Certify `q ≻ 0` on the domain of `ps` by lifting inverses to `u`
/// letters and certifying the lifted target against the augmented set.
pub fn certify_rational(q: &MatRatExpr, ps: &[MatPoly], opts: &CertifyOptions) -> Result<RationalOutcome> {
    let lift = build_hat(q)?;
    let d_x = ps.iter().map(|p| p.x_arity()).chain([q.x_arity()]).max().unwrap_or(0) as usize;
    let report = archimedean_check(ps, d_x);
    if !report.passes {
        return Err(Error::NotArchimedean(archimedean_message(&report.caps, &report.non_self_adjoint)));
    }
    if q.rows() != q.cols() {
        return Err(Error::ShapeMismatch(format!("target is {}x{}", q.rows(), q.cols())));
    }
    let dom = DomainSpec::poly_list(ps.to_vec())?;
    let mut warnings = Vec::new();
    let min_sampled = screen(q, &dom, opts, true, &mut warnings)?;
    let target = lift.hat_q.hermitian_part()?;

    if lift.u_arity == 0 {
        let certificate = certify_polynomial(&target, ps, opts)?;
        return Ok(RationalOutcome { certificate, lift, augmented: None, d: Vec::new(), min_sampled, warnings });
    }

    let points = probe_points(&dom, d_x, opts.max_size, opts.per_size, opts.seed)?;
    let mut d = (0..lift.u_arity)
        .map(|j| estimate_d(&lift, j, &points, opts.safety).map(|e| e.d))
        .collect::<Result<Vec<f64>>>()?;
    let mut all_margins = Vec::new();
    for attempt in 0..=opts.doublings {
        if attempt > 0 {
            d.iter_mut().for_each(|x| *x *= 2.0);
        }
        let augmented = build_o(ps, &lift, &d)?;
        match sweep(&target, &augmented.polys(), &[], start_delta(&target), opts) {
            Ok(mut cert) => {
                cert.pipeline = Pipeline::Lifted;
                cert.labels = augmented.tags().iter().map(|t| t.label()).collect();
                cert.substitution = substitution_map(&lift);
                return Ok(RationalOutcome {
                    certificate: cert,
                    lift,
                    augmented: Some(augmented),
                    d,
                    min_sampled,
                    warnings,
                });
            }
            Err(Error::NotCertified { margins, .. }) => all_margins.extend(margins),
            Err(e) => return Err(e),
        }
    }
    Err(not_certified(opts.delta_max, all_margins))
}

/// A certificate whose factors are rational expressions in `x` and whose
/// generators are the original domain generators.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCertificate {
    pub target: MatRatExpr,
    pub generators: Vec<MatPoly>,
    pub sos: Vec<MatRatExpr>,
    /// `(generator index, r)`.
    pub weighted: Vec<(usize, MatRatExpr)>,
    /// Number of relation-tagged terms removed after substitution.
    pub dropped_relations: usize,
    /// Largest norm of a dropped relation element at inverse-type points.
    pub relation_defect: f64,
    /// `(j, D_j, certificate of D_j g_j^* g_j - 1)` for every rewritten cap.
    pub caps: Vec<(usize, f64, RationalCertificate)>,
    /// Largest relative deviation between the factors and the target over
    /// the verification samples.
    pub residual: f64,
    pub samples: usize,
}

impl RationalCertificate {
    /// `Σ s^*s + Σ r^* p r` evaluated at a point.
    pub fn eval_expansion(&self, x: &MatrixPoint) -> Result<CMat> {
        let point = ExtendedPoint::from(x.clone());
        let n = x.n();
        let mut acc = CMat::zeros(self.target.rows() * n, self.target.cols() * n);
        for s in &self.sos {
            let v = eval_expr(s, &point, DEFAULT_COND_CAP)?;
            acc += v.adjoint() * v;
        }
        for (k, r) in &self.weighted {
            let v = eval_expr(r, &point, DEFAULT_COND_CAP)?;
            let p = eval_poly(&self.generators[*k], &point)?;
            acc += v.adjoint() * p * v;
        }
        Ok(acc)
    }

    /// Relative deviation from the Hermitian part of the target at a point.
    pub fn deviation(&self, x: &MatrixPoint) -> Result<f64> {
        let q = linalg::hermitian_part(&eval_expr(&self.target, &ExtendedPoint::from(x.clone()), DEFAULT_COND_CAP)?);
        let e = self.eval_expansion(x)?;
        Ok(linalg::spectral_norm(&(&q - e)) / (1.0 + linalg::spectral_norm(&q)))
    }

    fn from_polynomial(q: &MatRatExpr, cert: &Certificate) -> Result<RationalCertificate> {
        Ok(RationalCertificate {
            target: q.clone(),
            generators: cert.generators.clone(),
            sos: cert.sos.iter().map(MatRatExpr::from_matpoly).collect::<Result<_>>()?,
            weighted: cert
                .weighted
                .iter()
                .map(|(k, r)| Ok((*k, MatRatExpr::from_matpoly(r)?)))
                .collect::<Result<_>>()?,
            dropped_relations: 0,
            relation_defect: 0.0,
            caps: Vec::new(),
            residual: 0.0,
            samples: 0,
        })
    }
}

fn verification_points(dom: &DomainSpec, opts: &CertifyOptions, salt: u64) -> Result<Vec<MatrixPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt);
    let sizes = opts.max_size.max(1);
    let mut out = Vec::with_capacity(opts.verify_samples);
    for k in 0..sizes {
        let count = opts.verify_samples / sizes + usize::from(k < opts.verify_samples % sizes);
        out.extend(sample_domain(dom, k + 1, count, rng.random())?);
    }
    Ok(out)
}

/// Certify a rational target and rewrite the lifted certificate into one
/// over `x` alone whose generators are the original ones.
pub fn certify_rational_assembled(
    q: &MatRatExpr,
    ps: &[MatPoly],
    opts: &CertifyOptions,
) -> Result<(RationalOutcome, RationalCertificate)> {
    let outcome = certify_rational(q, ps, opts)?;
    let assembled = assemble_rational_certificate(&outcome, q, ps, opts)?;
    Ok((outcome, assembled))
}

/// Substitute `u_j ↦ g_j^-1`, drop the relation terms (checked to vanish at
/// inverse-type points) and rewrite every norm-cap term
/// `r^*(D - u^*u)r = (g^-1 r)^*(D g^*g - 1)(g^-1 r)` through a recursive
/// certificate of `D g^*g - 1`.
pub fn assemble_rational_certificate(
    outcome: &RationalOutcome,
    q: &MatRatExpr,
    ps: &[MatPoly],
    opts: &CertifyOptions,
) -> Result<RationalCertificate> {
    let dom = DomainSpec::poly_list(ps.to_vec())?;
    let cert = &outcome.certificate;
    let lift = &outcome.lift;
    let mut out = match &outcome.augmented {
        None => RationalCertificate::from_polynomial(q, cert)?,
        Some(augmented) => {
            let bindings = back_bindings(lift);
            let sub = |p: &MatPoly| -> Result<MatRatExpr> { Ok(substitute(&MatRatExpr::from_matpoly(p)?, &bindings)) };
            let mut out = RationalCertificate {
                target: q.clone(),
                generators: ps.to_vec(),
                sos: cert.sos.iter().map(sub).collect::<Result<_>>()?,
                weighted: Vec::new(),
                dropped_relations: 0,
                relation_defect: 0.0,
                caps: Vec::new(),
                residual: 0.0,
                samples: 0,
            };
            let rel_points = verification_points(&dom, opts, 0x5eed)?;
            let rel_points = &rel_points[..RELATION_SAMPLES.min(rel_points.len())];
            let mut cap_certs: Vec<Option<RationalCertificate>> = vec![None; lift.u_arity];
            for (gen, r) in &cert.weighted {
                let (tag, elem) = &augmented.elements[*gen];
                match *tag {
                    OTag::FromP(k) => out.weighted.push((k, sub(r)?)),
                    OTag::RelationLeft(..) | OTag::RelationRight(..) => {
                        for x in rel_points {
                            let point = ExtendedPoint::new(x.clone(), lift.u_values(x)?)?;
                            let v = linalg::max_abs(&eval_poly(elem, &point)?);
                            out.relation_defect = out.relation_defect.max(v);
                        }
                        if out.relation_defect > RELATION_TOL {
                            return Err(Error::Invalid(format!(
                                "relation term does not vanish at inverse-type points ({:e})",
                                out.relation_defect
                            )));
                        }
                        out.dropped_relations += 1;
                    }
                    OTag::NormCap(j) => {
                        if cap_certs[j].is_none() {
                            cap_certs[j] = Some(certify_cap(&lift.inverses[j], outcome.d[j], ps, opts)?);
                        }
                        let inner = cap_certs[j].as_ref().expect("just filled");
                        let inv = MatRatExpr::scalar(RatExpr::Inverse(Box::new(lift.inverses[j].clone())));
                        let tail = inv.mul(&sub(r)?)?;
                        for s in &inner.sos {
                            out.sos.push(s.mul(&tail)?);
                        }
                        for (k, rr) in &inner.weighted {
                            out.weighted.push((*k, rr.mul(&tail)?));
                        }
                    }
                }
            }
            out.caps = cap_certs
                .into_iter()
                .enumerate()
                .filter_map(|(j, c)| c.map(|c| (j, outcome.d[j], c)))
                .collect();
            out
        }
    };
    let points = verification_points(&dom, opts, 0xa55e)?;
    out.residual = 0.0;
    for x in &points {
        out.residual = out.residual.max(out.deviation(x)?);
    }
    out.samples = points.len();
    if out.residual > opts.accept_tol {
        return Err(Error::Invalid(format!("assembled certificate deviates by {:e}", out.residual)));
    }
    Ok(out)
}

/// Certificate of `D g^*g - 1` over `x`, recursing when `g` itself has
/// inverses.
fn certify_cap(g: &RatExpr, d: f64, ps: &[MatPoly], opts: &CertifyOptions) -> Result<RationalCertificate> {
    let gg = RatExpr::product(vec![RatExpr::Scalar(c(d)), RatExpr::Adjoint(Box::new(g.clone())), g.clone()]);
    let e = MatRatExpr::scalar(RatExpr::difference(gg, RatExpr::real(1.0)));
    if e.has_inverse() {
        return Ok(certify_rational_assembled(&e, ps, opts)?.1);
    }
    let cert = certify_polynomial(&e.to_matpoly()?, ps, opts)?;
    let mut out = RationalCertificate::from_polynomial(&e, &cert)?;
    let dom = DomainSpec::poly_list(ps.to_vec())?;
    let points = verification_points(&dom, opts, 0xca9)?;
    for x in &points {
        out.residual = out.residual.max(out.deviation(x)?);
    }
    out.samples = points.len();
    Ok(out)
}

/// Deviation between the factor expansion of a certificate over `(x, u)`
/// and the Hermitian part of `q`, at inverse-type points `U = g(X)^-1`.
pub fn pointwise_agreement(
    cert: &Certificate,
    q: &MatRatExpr,
    lift: &LiftResult,
    points: &[MatrixPoint],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        let point = ExtendedPoint::new(x.clone(), lift.u_values(x)?)?;
        let target = linalg::hermitian_part(&eval_expr(q, &ExtendedPoint::from(x.clone()), DEFAULT_COND_CAP)?);
        let e = eval_certificate(cert, &point)?;
        worst = worst.max(linalg::spectral_norm(&(&target - e)) / (1.0 + linalg::spectral_norm(&target)));
    }
    Ok(worst)
}

/// `Σ s^*s + Σ r^* g r + Σ (ι^* m + m^* ι)` evaluated factor by factor.
pub fn eval_certificate(cert: &Certificate, point: &ExtendedPoint) -> Result<CMat> {
    let n = point.n();
    let m = cert.target.rows();
    let mut acc = CMat::zeros(m * n, m * n);
    for s in &cert.sos {
        let v = eval_poly(s, point)?;
        acc += v.adjoint() * v;
    }
    for (g, r) in &cert.weighted {
        let v = eval_poly(r, point)?;
        acc += v.adjoint() * eval_poly(&cert.generators[*g], point)? * v;
    }
    for (k, iota) in &cert.ideal {
        let gen = &cert.ideal_gens[*k];
        let gen = if gen.shape() == (1, 1) && m > 1 { gen.kron_identity(m) } else { gen.clone() };
        let t = eval_poly(iota, point)?.adjoint() * eval_poly(&gen, point)?;
        acc += &t + t.adjoint();
    }
    Ok(acc)
}

/// Result of the pencil pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilOutcome {
    pub certificate: Certificate,
    pub lift: LiftResult,
    /// Relation polynomials used as ideal generators.
    pub mr: Vec<MatPoly>,
    /// Largest `‖m_k(X, g(X)^-1)‖` over the agreement samples.
    pub ideal_vanishing: f64,
    /// Largest relative deviation between the certificate at `U = g(X)^-1`
    /// and the target.
    pub agreement: f64,
    pub samples: usize,
    pub min_sampled: f64,
}

/// Certify `r ⪰ 0` on the domain of a monic pencil with ideal terms built
/// from the relation polynomials of `r`.
pub fn certify_pencil_rational(r: &MatRatExpr, l: &LinearPencil, opts: &CertifyOptions) -> Result<PencilOutcome> {
    if !l.is_monic() {
        return Err(Error::NonMonicPencil { defect: l.monic_defect() });
    }
    if r.rows() != r.cols() {
        return Err(Error::ShapeMismatch(format!("target is {}x{}", r.rows(), r.cols())));
    }
    if r.x_arity() as usize > l.arity() {
        return Err(Error::ShapeMismatch(format!("target uses x{}, pencil has {} variables", r.x_arity(), l.arity())));
    }
    let dom = DomainSpec::pencil(l.clone());
    let min_sampled = screen(r, &dom, opts, false, &mut Vec::new())?;
    let lift = build_hat(r)?;
    let closure = closure_cr(r)?;
    let mr = build_mr(&closure)?;
    let target = lift.hat_q.hermitian_part()?;
    let gens = [l.to_matpoly()];
    let mut cert = if target.is_zero() {
        Certificate::empty(target.clone(), Pipeline::Pencil)
    } else {
        sweep(&target, &gens, &mr, start_delta(&target), opts)?
    };
    cert.pipeline = Pipeline::Pencil;
    cert.generators = gens.to_vec();
    cert.labels = vec!["L".into()];
    cert.substitution = substitution_map(&lift);

    let points = verification_points(&dom, opts, 0x9e1c)?;
    let agreement = pointwise_agreement(&cert, r, &lift, &points)?;
    let mut ideal_vanishing: f64 = 0.0;
    for x in &points {
        let point = ExtendedPoint::new(x.clone(), lift.u_values(x)?)?;
        for m in &mr {
            ideal_vanishing = ideal_vanishing.max(linalg::spectral_norm(&eval_poly(m, &point)?));
        }
    }
    if ideal_vanishing > RELATION_TOL {
        return Err(Error::Invalid(format!("relations do not vanish at inverse-type points ({ideal_vanishing:e})")));
    }
    if agreement > opts.accept_tol {
        return Err(Error::Invalid(format!("certificate deviates from the target by {agreement:e}")));
    }
    Ok(PencilOutcome { certificate: cert, lift, mr, ideal_vanishing, agreement, samples: points.len(), min_sampled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rexpr::parse;

    fn poly(s: &str) -> MatPoly {
        parse(s).unwrap().to_matpoly().unwrap()
    }

    fn interval() -> Vec<MatPoly> {
        vec![poly("1 - x1^2")]
    }

    #[test]
    fn polynomial_examples() {
        let opts = CertifyOptions::default();
        let cert = certify_polynomial(&poly("2 - x1^2"), &interval(), &opts).unwrap();
        assert_eq!(cert.delta, 1);
        assert!(cert.residual <= 1e-6);
        let cert = certify_polynomial(&poly("(1 + x1)^2"), &interval(), &opts).unwrap();
        assert!(cert.residual <= 1e-6);
        assert!(matches!(
            certify_polynomial(&poly("x1"), &interval(), &opts),
            Err(Error::NotCertified { .. })
        ));
        let zero = certify_polynomial(&MatPoly::zero(1, 1), &interval(), &opts).unwrap();
        assert!(zero.sos.is_empty() && zero.weighted.is_empty());
    }

    #[test]
    fn requires_archimedean_generators() {
        let opts = CertifyOptions::default();
        assert!(matches!(
            certify_polynomial(&poly("1 + x1^2"), &[poly("x1")], &opts),
            Err(Error::NotArchimedean(_))
        ));
    }

    #[test]
    fn rational_interval() {
        let opts = CertifyOptions::default();
        let q = parse("(2 - x1)^-1").unwrap();
        let (outcome, assembled) = certify_rational_assembled(&q, &interval(), &opts).unwrap();
        assert_eq!(outcome.certificate.pipeline, Pipeline::Lifted);
        assert!(outcome.certificate.residual <= 1e-6);
        assert!(assembled.residual <= 1e-6, "{}", assembled.residual);
        assert_eq!(assembled.caps.len(), 1);
    }

    #[test]
    fn rational_without_inverses_is_polynomial() {
        let opts = CertifyOptions::default();
        let out = certify_rational(&parse("1").unwrap(), &interval(), &opts).unwrap();
        assert_eq!(out.certificate.pipeline, Pipeline::Polynomial);
        assert!(out.augmented.is_none());
    }

    #[test]
    fn rational_negative_somewhere() {
        let opts = CertifyOptions::default();
        assert!(matches!(
            certify_rational(&parse("(2 - x1)^-1 - 1").unwrap(), &interval(), &opts),
            Err(Error::NotCertified { .. })
        ));
    }

    #[test]
    fn pencil_examples() {
        let opts = CertifyOptions::default();
        let l = LinearPencil::interval();
        let out = certify_pencil_rational(&parse("(3 - x1)^-1").unwrap(), &l, &opts).unwrap();
        assert!(out.certificate.residual <= 1e-6);
        assert!(out.agreement <= 1e-6);
        assert_eq!(out.mr.len(), 1);
        assert!(matches!(
            certify_pencil_rational(&parse("x1").unwrap(), &l, &opts),
            Err(Error::NotCertified { .. })
        ));
        let shifted = LinearPencil::new(linalg::identity(2) * c(2.0), l.ai().to_vec()).unwrap();
        assert!(matches!(
            certify_pencil_rational(&parse("1").unwrap(), &shifted, &opts),
            Err(Error::NonMonicPencil { .. })
        ));
    }
}
