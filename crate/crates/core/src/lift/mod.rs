//! Set constructions that turn rational positivity problems into polynomial
//! ones over the extended alphabet `(x, u)`.
//!
//! For the Archimedean route every inverted subterm `g_j^-1` becomes a fresh
//! letter `u_j`, and the generator set is enlarged by the relation squares
//! and a norm cap per letter. For the pencil route the closure of the
//! expression under the splitting rules yields the relation polynomials
//! `g_j u_j b - b` that enter a certificate through ideal terms.

mod closure;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evalnum::{inverse_values, sample_domain, DomainKind, DomainSpec, MatrixPoint};
use crate::freealg::{Letter, MatPoly};
use crate::linalg::{self, c};
use crate::rexpr::{inverse_subterms, substitute, MatRatExpr, RatExpr};

pub use closure::{apply_rules, build_mr, closure_cr, ClosureSet, CLOSURE_LIMIT};

const CAP_TOL: f64 = 1e-12;

/// Outcome of the Archimedean test on a generator list.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchimedeanReport {
    pub passes: bool,
    /// `caps[i] = Some(C)` when some element equals `C - x_{i+1}^2`.
    pub caps: Vec<Option<f64>>,
    /// Indices of elements that are not self-adjoint.
    pub non_self_adjoint: Vec<usize>,
}

/// Check that every variable `x_1 .. x_d` is capped by an element
/// `C - x_i^2` with `C > 0` and that every element is self-adjoint.
pub fn archimedean_check(ps: &[MatPoly], d: usize) -> ArchimedeanReport {
    let mut caps = vec![None; d];
    let mut non_self_adjoint = Vec::new();
    for (k, p) in ps.iter().enumerate() {
        if !p.is_self_adjoint(CAP_TOL) {
            non_self_adjoint.push(k);
            continue;
        }
        if let Some((i, cap)) = as_cap(p) {
            if i < d {
                let slot: &mut Option<f64> = &mut caps[i];
                *slot = Some(slot.map_or(cap, |old| old.min(cap)));
            }
        }
    }
    let passes = non_self_adjoint.is_empty() && caps.iter().all(Option::is_some);
    ArchimedeanReport { passes, caps, non_self_adjoint }
}

// `C - x_i^2` with `C > 0`, returned as `(i - 1, C)`.
fn as_cap(p: &MatPoly) -> Option<(usize, f64)> {
    if p.shape() != (1, 1) || p.num_terms() != 2 {
        return None;
    }
    let mut constant = None;
    let mut square = None;
    for (w, m) in p.terms() {
        let z = m[(0, 0)];
        match w.letters() {
            [] => constant = Some(z),
            [Letter::X(i), Letter::X(j)] if i == j && (z - c(-1.0)).norm() <= CAP_TOL => square = Some(*i),
            _ => return None,
        }
    }
    match (constant, square) {
        (Some(z), Some(i)) if z.im.abs() <= CAP_TOL && z.re > 0.0 => Some((i as usize - 1, z.re)),
        _ => None,
    }
}

/// A rational expression rewritten over `(x, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftResult {
    /// The expression with every inverse replaced by its `u` letter.
    pub hat_expr: MatRatExpr,
    /// Its polynomial expansion.
    pub hat_q: MatPoly,
    /// `g_j` in `u` form: inner inverses already replaced by earlier letters.
    pub g_list: Vec<RatExpr>,
    /// `g_j` as they occur in the original expression.
    pub inverses: Vec<RatExpr>,
    pub u_arity: usize,
}

impl LiftResult {
    /// Substitutions `u_j ↦ g_j^-1` (original form) for back-substitution.
    pub fn back_bindings(&self) -> Vec<(RatExpr, RatExpr)> {
        self.inverses
            .iter()
            .enumerate()
            .map(|(j, g)| (RatExpr::u(j as u32 + 1), RatExpr::Inverse(Box::new(g.clone()))))
            .collect()
    }

    pub fn g_poly(&self, j: usize) -> MatPoly {
        self.g_list[j].to_poly().expect("lifted subterms are polynomial")
    }

    /// `U_j = g_j(X)^-1` for every letter.
    pub fn u_values(&self, x: &MatrixPoint) -> Result<Vec<linalg::CMat>> {
        inverse_values(&self.g_list, x)
    }
}

/// Replace each distinct inverse subterm, innermost first, by a fresh `u`.
pub fn build_hat(q: &MatRatExpr) -> Result<LiftResult> {
    if q.u_arity() > 0 {
        return Err(Error::Invalid("the expression already uses u letters".into()));
    }
    let inverses = inverse_subterms(q);
    let bindings: Vec<(RatExpr, RatExpr)> = inverses
        .iter()
        .enumerate()
        .map(|(j, g)| (RatExpr::Inverse(Box::new(g.clone())), RatExpr::u(j as u32 + 1)))
        .collect();
    let g_list: Vec<RatExpr> = inverses
        .iter()
        .map(|g| substitute(&MatRatExpr::scalar(g.clone()), &bindings).entry(0, 0).clone())
        .collect();
    let hat_expr = substitute(q, &bindings);
    let hat_q = hat_expr.to_matpoly()?;
    Ok(LiftResult { hat_expr, hat_q, u_arity: g_list.len(), g_list, inverses })
}

/// A scalar norm bound with the sample that attains it.
#[derive(Clone, Debug, PartialEq)]
pub struct DEstimate {
    pub d: f64,
    pub sup: f64,
    pub argmax: MatrixPoint,
}

pub const DEFAULT_SAFETY: f64 = 4.0;

/// `safety · max ‖g_j(X)^-1‖²` over the given points.
pub fn estimate_d(lift: &LiftResult, j: usize, points: &[MatrixPoint], safety: f64) -> Result<DEstimate> {
    let mut best: Option<(f64, &MatrixPoint)> = None;
    for x in points {
        let us = inverse_values(&lift.g_list[..=j], x)?;
        let s = linalg::spectral_norm(&us[j]).powi(2);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, x));
        }
    }
    let (sup, argmax) = best.ok_or_else(|| Error::Invalid("no sample points".into()))?;
    // keep D positive even when every sampled inverse vanishes
    Ok(DEstimate { d: safety * sup.max(1e-12), sup, argmax: argmax.clone() })
}

/// Sample points used to estimate norm caps: random domain samples for
/// sizes `1..=max_n` plus, for polynomial domains, the scalar points with
/// each coordinate in `{-√C_i, 0, √C_i}` that lie in the domain.
pub fn probe_points(dom: &DomainSpec, d: usize, max_n: usize, per_size: usize, seed: u64) -> Result<Vec<MatrixPoint>> {
    let mut out = Vec::new();
    if let DomainKind::PolyList(_) = dom.kind {
        let bounds = dom.coordinate_bounds(d)?;
        let total = 3usize.pow(d as u32);
        for code in 0..total {
            let mut k = code;
            let values: Vec<f64> = bounds
                .iter()
                .map(|&b| {
                    let v = [0.0, b, -b][k % 3];
                    k /= 3;
                    v
                })
                .collect();
            let p = MatrixPoint::scalars(&values);
            if crate::evalnum::in_domain(dom, &p)?.inside {
                out.push(p);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=max_n {
        let s = rand::Rng::random::<u64>(&mut rng);
        out.extend(sample_domain(dom, n, per_size, s)?);
    }
    Ok(out)
}

/// Role of an element of the augmented generator set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OTag {
    /// The `k`-th original generator.
    FromP(usize),
    /// `sign · (1 - u_j g_j)^*(1 - u_j g_j)`.
    RelationLeft(usize, i8),
    /// `sign · (1 - g_j u_j)^*(1 - g_j u_j)`.
    RelationRight(usize, i8),
    /// `D_j - u_j^* u_j`.
    NormCap(usize),
}

impl OTag {
    pub fn is_relation(self) -> bool {
        matches!(self, OTag::RelationLeft(..) | OTag::RelationRight(..))
    }

    pub fn label(self) -> String {
        let sign = |s: i8| if s > 0 { "+" } else { "-" };
        match self {
            OTag::FromP(k) => format!("P{}", k + 1),
            OTag::RelationLeft(j, s) => format!("{}rel_left(u{})", sign(s), j + 1),
            OTag::RelationRight(j, s) => format!("{}rel_right(u{})", sign(s), j + 1),
            OTag::NormCap(j) => format!("cap(u{})", j + 1),
        }
    }
}

/// The original generators together with relation squares and norm caps.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSet {
    pub elements: Vec<(OTag, MatPoly)>,
    pub d: Vec<f64>,
}

impl AugmentedSet {
    pub fn polys(&self) -> Vec<MatPoly> {
        self.elements.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn tags(&self) -> Vec<OTag> {
        self.elements.iter().map(|(t, _)| *t).collect()
    }
}

pub fn build_o(ps: &[MatPoly], lift: &LiftResult, d: &[f64]) -> Result<AugmentedSet> {
    if d.len() != lift.u_arity {
        return Err(Error::ShapeMismatch(format!("{} caps for {} letters", d.len(), lift.u_arity)));
    }
    let mut elements: Vec<(OTag, MatPoly)> =
        ps.iter().enumerate().map(|(k, p)| (OTag::FromP(k), p.clone())).collect();
    let one = MatPoly::real(1.0);
    for j in 0..lift.u_arity {
        let g = lift.g_poly(j);
        if g.shape() != (1, 1) {
            return Err(Error::ShapeMismatch("inverted subterms must be scalar".into()));
        }
        let u = MatPoly::u(j as u32 + 1);
        let left = one.sub(&u.mul(&g)?)?;
        let right = one.sub(&g.mul(&u)?)?;
        let left_sq = left.adjoint().mul(&left)?;
        let right_sq = right.adjoint().mul(&right)?;
        for s in [1i8, -1] {
            elements.push((OTag::RelationLeft(j, s), left_sq.scale(c(s as f64))));
        }
        for s in [1i8, -1] {
            elements.push((OTag::RelationRight(j, s), right_sq.scale(c(s as f64))));
        }
        let cap = MatPoly::real(d[j]).sub(&MatPoly::u_star(j as u32 + 1).mul(&u)?)?;
        elements.push((OTag::NormCap(j), cap));
    }
    Ok(AugmentedSet { elements, d: d.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalnum::{eval_expr, eval_poly, ExtendedPoint, DEFAULT_COND_CAP};
    use crate::rexpr::{parse, parse_expr};

    fn poly(s: &str) -> MatPoly {
        parse(s).unwrap().to_matpoly().unwrap()
    }

    fn interval() -> DomainSpec {
        DomainSpec::poly_list(vec![poly("1 - x1^2")]).unwrap()
    }

    #[test]
    fn archimedean_examples() {
        let r = archimedean_check(&[poly("1 - x1^2")], 1);
        assert!(r.passes);
        assert_eq!(r.caps, vec![Some(1.0)]);
        assert!(!archimedean_check(&[poly("1 - x1^2")], 2).passes);
        let r = archimedean_check(&[poly("1 - x1^2"), poly("x1*x2")], 1);
        assert!(!r.passes);
        assert_eq!(r.non_self_adjoint, vec![1]);
        assert_eq!(archimedean_check(&[poly("3 - x2^2"), poly("2 - x1*x1")], 2).caps, vec![Some(2.0), Some(3.0)]);
    }

    #[test]
    fn hat_examples() {
        let l = build_hat(&parse("(2 - x1)^-1").unwrap()).unwrap();
        assert_eq!(l.hat_q, MatPoly::u(1));
        assert_eq!(l.g_list, vec![parse_expr("2 - x1").unwrap()]);

        let l = build_hat(&parse("(1 + (2 - x1)^-1)^-1").unwrap()).unwrap();
        assert_eq!(l.hat_q, MatPoly::u(2));
        assert_eq!(l.g_list, vec![parse_expr("2 - x1").unwrap(), parse_expr("1 + u1").unwrap()]);

        let l = build_hat(&parse("x1*(2 - x1)^-1*x1").unwrap()).unwrap();
        assert_eq!(l.hat_q, poly("x1*u1*x1"));
    }

    #[test]
    fn hat_agrees_with_original() {
        let dom = interval();
        for text in ["(2 - x1)^-1", "x1*(2 - x1)^-1*x1", "(1 + (2 - x1)^-1)^-1 + x1^2"] {
            let q = parse(text).unwrap();
            let l = build_hat(&q).unwrap();
            for x in sample_domain(&dom, 3, 20, 1).unwrap() {
                let us = l.u_values(&x).unwrap();
                let a = eval_poly(&l.hat_q, &ExtendedPoint::new(x.clone(), us).unwrap()).unwrap();
                let b = eval_expr(&q, &x.into(), DEFAULT_COND_CAP).unwrap();
                assert!(linalg::max_abs(&(a - b)) < 1e-10, "{text}");
            }
        }
    }

    #[test]
    fn d_estimates() {
        let dom = interval();
        let pts = probe_points(&dom, 1, 3, 30, 0).unwrap();
        let l = build_hat(&parse("(2 - x1)^-1").unwrap()).unwrap();
        assert!((estimate_d(&l, 0, &pts, DEFAULT_SAFETY).unwrap().d - 4.0).abs() < 1e-12);
        let l = build_hat(&parse("(3 - x1)^-1").unwrap()).unwrap();
        assert!((estimate_d(&l, 0, &pts, DEFAULT_SAFETY).unwrap().d - 1.0).abs() < 1e-12);
        let l = build_hat(&parse("x1^-1").unwrap()).unwrap();
        assert!(matches!(estimate_d(&l, 0, &pts, DEFAULT_SAFETY), Err(Error::NotInDomain { .. })));
    }

    #[test]
    fn augmented_set() {
        let ps = vec![poly("1 - x1^2")];
        let l = build_hat(&parse("(2 - x1)^-1").unwrap()).unwrap();
        let o = build_o(&ps, &l, &[4.0]).unwrap();
        assert_eq!(o.elements.len(), 6);
        for (_, p) in &o.elements {
            assert_eq!(p.max_coefficient_diff(&p.adjoint()), 0.0);
        }
        for x in sample_domain(&interval(), 2, 20, 3).unwrap() {
            let pt = ExtendedPoint::new(x.clone(), l.u_values(&x).unwrap()).unwrap();
            for (tag, p) in &o.elements {
                let v = eval_poly(p, &pt).unwrap();
                match tag {
                    OTag::NormCap(_) => assert!(linalg::min_eigenvalue(&v) >= 3.0 - 1e-12),
                    t if t.is_relation() => assert!(linalg::max_abs(&v) <= 1e-12),
                    _ => {}
                }
            }
        }
    }
}
