use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rexpr::MatRatExpr;

use super::{eval_expr, relative_deviation, MatrixPoint, DEFAULT_COND_CAP};

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Agreement at every common point tried. Never a proof of equivalence.
    EquivalentSoFar,
    /// The first point found where the two evaluations differ.
    Distinguished { witness: MatrixPoint, deviation: f64 },
}

/// Trial counts for one matrix size.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeStats {
    pub n: usize,
    pub trials: usize,
    /// Points where both expressions were defined.
    pub evaluated: usize,
    pub distinguishing: usize,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub per_size: Vec<SizeStats>,
}

/// Compare two expressions on random Hermitian tuples (normalized GUE
/// samples) of each size. Points outside either domain are skipped; the
/// deviation is relative to `1 + max|entry|`.
pub fn test_equivalence(
    e1: &MatRatExpr,
    e2: &MatRatExpr,
    sizes: &[usize],
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    if e1.shape() != e2.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", e1.shape(), e2.shape())));
    }
    if e1.u_arity() > 0 || e2.u_arity() > 0 {
        return Err(Error::Invalid("equivalence testing takes expressions in x letters only".into()));
    }
    let d = e1.x_arity().max(e2.x_arity()) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = Verdict::EquivalentSoFar;
    let mut per_size = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut stats = SizeStats { n, trials, evaluated: 0, distinguishing: 0, max_deviation: 0.0 };
        for _ in 0..trials {
            let xs = (0..d)
                .map(|_| {
                    let h = linalg::random_hermitian(&mut rng, n);
                    let s = linalg::spectral_norm(&h).max(f64::MIN_POSITIVE);
                    h / linalg::c(s)
                })
                .collect();
            let point = MatrixPoint::with_size(n, xs)?;
            let ext = point.clone().into();
            let (a, b) = match (eval_expr(e1, &ext, DEFAULT_COND_CAP), eval_expr(e2, &ext, DEFAULT_COND_CAP)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::NotInDomain { .. }), _) | (_, Err(Error::NotInDomain { .. })) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            stats.evaluated += 1;
            let dev = relative_deviation(&a, &b);
            stats.max_deviation = stats.max_deviation.max(dev);
            if dev > tol {
                stats.distinguishing += 1;
                if verdict == Verdict::EquivalentSoFar {
                    verdict = Verdict::Distinguished { witness: point, deviation: dev };
                }
            }
        }
        per_size.push(stats);
    }
    if per_size.iter().all(|s| s.evaluated == 0) {
        return Err(Error::NoCommonPoints);
    }
    Ok(EquivalenceReport { verdict, per_size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rexpr::parse;

    fn run(a: &str, b: &str, sizes: &[usize]) -> Result<EquivalenceReport> {
        test_equivalence(&parse(a).unwrap(), &parse(b).unwrap(), sizes, 20, 1e-8, 0)
    }

    #[test]
    fn x_times_inverse_equals_one() {
        let r = run("x1*x1^-1", "1", &[1, 2, 3, 4]).unwrap();
        assert_eq!(r.verdict, Verdict::EquivalentSoFar);
        assert!(r.per_size.iter().all(|s| s.evaluated > 0));
    }

    #[test]
    fn noncommuting_product_distinguished() {
        let r = run("x1*x2", "x2*x1", &[2]).unwrap();
        assert!(matches!(r.verdict, Verdict::Distinguished { .. }));
        assert!(r.per_size[0].distinguishing >= 19);
        let scalar = run("x1*x2", "x2*x1", &[1]).unwrap();
        assert_eq!(scalar.verdict, Verdict::EquivalentSoFar);
    }

    #[test]
    fn one_letter_functions_commute() {
        let r = run("(1 + x1)^-1*x1", "x1*(1 + x1)^-1", &[1, 2, 3]).unwrap();
        assert_eq!(r.verdict, Verdict::EquivalentSoFar);
    }

    #[test]
    fn nowhere_defined() {
        assert!(matches!(run("(x1 - x1)^-1", "1", &[1, 2]), Err(Error::NoCommonPoints)));
    }
}
