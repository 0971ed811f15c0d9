use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::freealg::{LinearPencil, MatPoly};
use crate::linalg::{self, c, CMat, CVec};
use crate::rexpr::RatExpr;

use super::{
    block_diag, eval_poly, eval_rat, invert, sample_domain, DomainSpec, ExtendedPoint, MatrixPoint,
    DEFAULT_COND_CAP,
};

const KERNEL_THRESHOLD: f64 = 1e-10;
const MAX_KERNEL_ATTEMPTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZFamily {
    /// `U_j = g_j(X)^-1`; every relation vanishes identically.
    InverseType,
    /// `v` spans a numerical common kernel at a point that is not of
    /// inverse type.
    Kernel,
}

/// A point `(X, U)` of the pencil domain with a vector `v` annihilated by
/// every relation polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ZSample {
    pub point: ExtendedPoint,
    pub v: CVec,
    pub family: ZFamily,
}

/// Draw `count` samples, half of each family (only inverse-type samples when
/// `n = 1`, where no block splitting is possible).
///
/// `g` lists the inverted subterms aligned with the `u` letters; an entry may
/// mention earlier `u` letters or earlier inverses. Relations are scalar
/// polynomials acting on `v` of length `block·n`, that is, through `m ⊗ I`.
pub fn sample_zr(
    mr: &[MatPoly],
    l: &LinearPencil,
    g: &[RatExpr],
    block: usize,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<ZSample>> {
    let dom = DomainSpec::pencil(l.clone());
    let relations: Vec<MatPoly> = mr
        .iter()
        .map(|m| if m.shape() == (1, 1) && block > 1 { m.kron_identity(block) } else { m.clone() })
        .collect();
    let kernel_count = if n >= 2 { count / 2 } else { 0 };
    let inverse_count = count - kernel_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);

    for base in sample_domain(&dom, n, inverse_count, seed)? {
        let us = inverse_values(g, &base)?;
        let point = ExtendedPoint::new(base, us)?;
        let v = linalg::random_unit_vector(&mut rng, block * n);
        out.push(ZSample { point, v, family: ZFamily::InverseType });
    }

    let (n1, n2) = (n - n / 2, n / 2);
    let mut attempts = 0;
    let mut k = 0u64;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_KERNEL_ATTEMPTS * count.max(1) {
            return Err(Error::SamplingExhausted { attempts });
        }
        k += 1;
        let p1 = sample_domain(&dom, n1, 1, seed.wrapping_add(2 * k + 1))?.remove(0);
        let p2 = sample_domain(&dom, n2, 1, seed.wrapping_add(2 * k + 2))?.remove(0);
        let u1 = inverse_values(g, &p1)?;
        let us = u1
            .iter()
            .map(|u| {
                let w = linalg::random_complex_matrix(&mut rng, n2, n2);
                block_diag(u, &w)
            })
            .collect();
        let point = ExtendedPoint::new(p1.direct_sum(&p2), us)?;
        let Some(v) = common_kernel_vector(&relations, &point)? else { continue };
        out.push(ZSample { point, v, family: ZFamily::Kernel });
    }
    Ok(out)
}

/// `U_j = g_j(X, U_1..U_{j-1})^-1` in order.
pub fn inverse_values(g: &[RatExpr], base: &MatrixPoint) -> Result<Vec<CMat>> {
    let mut point = ExtendedPoint::from(base.clone());
    for gj in g {
        let val = eval_rat(gj, &point, DEFAULT_COND_CAP)?;
        let inv = invert(&val, DEFAULT_COND_CAP)
            .map_err(|reason| Error::NotInDomain { subterm: gj.to_string(), reason })?;
        point.us.push(inv);
    }
    Ok(point.us)
}

fn common_kernel_vector(relations: &[MatPoly], point: &ExtendedPoint) -> Result<Option<CVec>> {
    let mut blocks = Vec::with_capacity(relations.len());
    for m in relations {
        blocks.push(eval_poly(m, point)?);
    }
    let dim = relations.first().map_or(point.n(), |m| m.cols() * point.n());
    if blocks.is_empty() {
        return Ok(None);
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = CMat::zeros(rows, dim);
    let mut r = 0;
    for b in &blocks {
        stacked.view_mut((r, 0), (b.nrows(), dim)).copy_from(b);
        r += b.nrows();
    }
    // pad so the SVD always yields a full set of right singular vectors
    if rows < dim {
        stacked = stacked.resize_vertically(dim, c(0.0));
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (k, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    if smin > KERNEL_THRESHOLD {
        return Ok(None);
    }
    let v: CVec = v_t.row(k).adjoint();
    let residual = (&stacked * &v).norm();
    Ok((residual <= 1e-9 * v.norm()).then_some(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rexpr::{parse, parse_expr};

    fn poly(s: &str) -> MatPoly {
        parse(s).unwrap().to_matpoly().unwrap()
    }

    #[test]
    fn inverse_type_samples_annihilate_relations() {
        let m = poly("3*u1 - x1*u1 - 1");
        let g = vec![parse_expr("3 - x1").unwrap()];
        let samples = sample_zr(&[m.clone()], &LinearPencil::interval(), &g, 1, 3, 20, 0).unwrap();
        assert_eq!(samples.len(), 20);
        for s in &samples {
            let mv = eval_poly(&m, &s.point).unwrap() * &s.v;
            assert!(mv.norm() <= 1e-9 * s.v.norm(), "{:?} {}", s.family, mv.norm());
        }
        assert!(samples.iter().any(|s| s.family == ZFamily::Kernel));
    }

    #[test]
    fn scalar_size_gives_only_inverse_type() {
        let g = vec![parse_expr("3 - x1").unwrap()];
        let samples = sample_zr(&[poly("3*u1 - x1*u1 - 1")], &LinearPencil::interval(), &g, 1, 1, 5, 1)
            .unwrap();
        assert!(samples.iter().all(|s| s.family == ZFamily::InverseType));
    }

    #[test]
    fn nested_inverse_values() {
        let g = vec![parse_expr("2 - x1").unwrap(), parse_expr("1 + u1").unwrap()];
        let us = inverse_values(&g, &MatrixPoint::scalars(&[0.0])).unwrap();
        assert!((us[0][(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((us[1][(0, 0)] - c(1.0 / 1.5)).norm() < 1e-15);
    }
}
