//! Gram-matrix encoding of weighted sum-of-squares problems.
//!
//! A weighted term `r^* p r` with `r = Σ_b R_b b` (`R_b` of shape
//! `rows(p) × m`) is parametrized by one Hermitian PSD matrix `H` indexed by
//! triples `(word, generator row, target column)`:
//!
//! ```text
//! coefficient of a^* w b, entry (α, β)  +=  P_w[s, t] · H[(a, s, α), (b, t, β)]
//! ```
//!
//! The plain sum of squares is the weighted term for the generator `1`.
//! Ideal terms `ι^* m + m^* ι` enter through free real variables holding the
//! real and imaginary parts of the coefficients of `ι`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::freealg::{words_up_to, Letter, MatPoly, Word};
use crate::linalg::{self, c, CMat, C64, I};
use crate::sdp::{self, RowBuilder, SdpInstance, SdpOutcome, Solution, SolveOptions};

use super::{Certificate, Pipeline};

pub const RANK_TOL: f64 = 1e-9;

/// All words of degree at most `delta` over an alphabet, graded-lex sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct WordBasis {
    pub delta: usize,
    pub words: Vec<Word>,
}

impl WordBasis {
    pub fn new(alphabet: &[Letter], delta: usize) -> Self {
        WordBasis { delta, words: words_up_to(alphabet, delta) }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A complex linear form in the unknowns: `Σ c·H_k[i][j] + Σ γ·y`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Functional {
    pub psd: Vec<(usize, usize, usize, C64)>,
    pub free: Vec<(usize, C64)>,
}

impl Functional {
    pub fn eval(&self, blocks: &[CMat], free: &[f64]) -> C64 {
        let a: C64 = self.psd.iter().map(|&(k, i, j, z)| z * blocks[k][(i, j)]).sum();
        a + self.free.iter().map(|&(v, z)| z * free[v]).sum::<C64>()
    }
}

/// Shape of one PSD unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct GramBlock {
    /// `None` for the plain sum of squares, else the generator index.
    pub generator: Option<usize>,
    pub basis: WordBasis,
    /// Rows of the generator (1 for the plain sum of squares).
    pub gen_rows: usize,
}

impl GramBlock {
    pub fn dim(&self, m: usize) -> usize {
        self.basis.len() * self.gen_rows * m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealBlock {
    pub generator: MatPoly,
    pub basis: WordBasis,
    /// First free variable of this block.
    pub offset: usize,
}

impl IdealBlock {
    fn var(&self, b: usize, rho: usize, alpha: usize, m: usize, imag: bool) -> usize {
        self.offset + ((b * self.generator.rows() + rho) * m + alpha) * 2 + imag as usize
    }

    fn n_vars(&self, m: usize) -> usize {
        self.basis.len() * self.generator.rows() * m * 2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramProblem {
    pub target: MatPoly,
    pub delta: usize,
    pub gens: Vec<MatPoly>,
    /// Block 0 is the plain sum of squares, block `k + 1` belongs to
    /// `gens[k]`.
    pub blocks: Vec<GramBlock>,
    pub ideal: Vec<IdealBlock>,
    /// Coefficient of every touched word `v` (with `v <= v^*`), entry-wise.
    pub coefficient_map: BTreeMap<(Word, usize, usize), Functional>,
    pub instance: SdpInstance,
}

fn max_degree(p: &MatPoly) -> usize {
    p.degree()
}

fn alphabet_of(polys: &[&MatPoly]) -> Vec<Letter> {
    let mut set = BTreeSet::new();
    for p in polys {
        for l in p.letters() {
            set.insert(l);
            set.insert(l.adjoint());
        }
    }
    set.into_iter().collect()
}

/// Encode `q = Σ s^*s + Σ r^* g r + Σ ι^* m + m^* ι` with every factor
/// truncated so that each summand has degree at most `2·delta`.
///
/// Scalar ideal generators are promoted to `m ⊗ I` for an `m × m` target.
pub fn build_gram_problem(q: &MatPoly, gens: &[MatPoly], ideal_gens: &[MatPoly], delta: usize) -> Result<GramProblem> {
    let m = q.rows();
    if !q.is_self_adjoint(1e-12) {
        return Err(Error::NotHermitian(format!("target {q}")));
    }
    for (k, g) in gens.iter().enumerate() {
        if !g.is_self_adjoint(1e-12) {
            return Err(Error::NotHermitian(format!("generator {}: {g}", k + 1)));
        }
    }
    let ideal_gens: Vec<MatPoly> = ideal_gens
        .iter()
        .map(|g| if g.shape() == (1, 1) && m > 1 { g.kron_identity(m) } else { g.clone() })
        .collect();
    if let Some(g) = ideal_gens.iter().find(|g| g.cols() != m) {
        return Err(Error::ShapeMismatch(format!("ideal generator {g} has {} columns, target has {m}", g.cols())));
    }

    let mut all: Vec<&MatPoly> = vec![q];
    all.extend(gens.iter());
    all.extend(ideal_gens.iter());
    let alphabet = alphabet_of(&all);

    let mut blocks = vec![GramBlock { generator: None, basis: WordBasis::new(&alphabet, delta), gen_rows: 1 }];
    for (k, g) in gens.iter().enumerate() {
        let half = max_degree(g).div_ceil(2);
        if half > delta {
            continue;
        }
        blocks.push(GramBlock { generator: Some(k), basis: WordBasis::new(&alphabet, delta - half), gen_rows: g.rows() });
    }
    let mut ideal = Vec::new();
    let mut offset = 0;
    for g in &ideal_gens {
        let deg = max_degree(g);
        if deg > 2 * delta {
            continue;
        }
        let blk = IdealBlock { generator: g.clone(), basis: WordBasis::new(&alphabet, 2 * delta - deg), offset };
        offset += blk.n_vars(m);
        ideal.push(blk);
    }
    let n_free = offset;

    let mut map: BTreeMap<(Word, usize, usize), Functional> = BTreeMap::new();
    let one = MatPoly::real(1.0);
    for (k, blk) in blocks.iter().enumerate() {
        let p = blk.generator.map_or(&one, |g| &gens[g]);
        let sr = blk.gen_rows;
        let idx = |a: usize, s: usize, alpha: usize| (a * sr + s) * m + alpha;
        for (a, wa) in blk.basis.words.iter().enumerate() {
            let wa_star = wa.adjoint();
            for (w, pw) in p.terms() {
                let left = wa_star.concat(w);
                for (b, wb) in blk.basis.words.iter().enumerate() {
                    let v = left.concat(wb);
                    if v.canonical() != v {
                        continue;
                    }
                    for s in 0..sr {
                        for t in 0..sr {
                            let z = pw[(s, t)];
                            if z == c(0.0) {
                                continue;
                            }
                            for alpha in 0..m {
                                for beta in 0..m {
                                    map.entry((v.clone(), alpha, beta))
                                        .or_default()
                                        .psd
                                        .push((k, idx(a, s, alpha), idx(b, t, beta), z));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for blk in &ideal {
        let rr = blk.generator.rows();
        for (b, wb) in blk.basis.words.iter().enumerate() {
            let wb_star = wb.adjoint();
            for (w, mw) in blk.generator.terms() {
                // ι^* m: word b^* w, entry (α, β) += conj(I_b[ρ, α]) · M_w[ρ, β]
                let v = wb_star.concat(w);
                if v.canonical() == v {
                    for rho in 0..rr {
                        for alpha in 0..m {
                            for beta in 0..m {
                                let z = mw[(rho, beta)];
                                if z == c(0.0) {
                                    continue;
                                }
                                let f = map.entry((v.clone(), alpha, beta)).or_default();
                                f.free.push((blk.var(b, rho, alpha, m, false), z));
                                f.free.push((blk.var(b, rho, alpha, m, true), -I * z));
                            }
                        }
                    }
                }
                // m^* ι: word w^* b, entry (α, β) += conj(M_w[ρ, α]) · I_b[ρ, β]
                let v = w.adjoint().concat(wb);
                if v.canonical() == v {
                    for rho in 0..rr {
                        for alpha in 0..m {
                            let z = mw[(rho, alpha)].conj();
                            if z == c(0.0) {
                                continue;
                            }
                            for beta in 0..m {
                                let f = map.entry((v.clone(), alpha, beta)).or_default();
                                f.free.push((blk.var(b, rho, beta, m, false), z));
                                f.free.push((blk.var(b, rho, beta, m, true), I * z));
                            }
                        }
                    }
                }
            }
        }
    }

    let touched: BTreeSet<&Word> = map.keys().map(|(w, _, _)| w).collect();
    for (w, coef) in q.terms() {
        let v = w.canonical();
        if !touched.contains(&v) && linalg::max_abs(coef) > 0.0 {
            return Err(Error::DegreeTooSmall { word: w.to_string() });
        }
    }

    let dims: Vec<usize> = blocks.iter().map(|b| b.dim(m)).collect();
    let mut instance = SdpInstance::new(dims, n_free);
    let zero = CMat::zeros(m, m);
    for ((v, alpha, beta), f) in &map {
        let palindromic = v.is_self_adjoint();
        if palindromic && alpha > beta {
            continue;
        }
        let target = q.coefficient(v).unwrap_or(&zero)[(*alpha, *beta)];
        let parts: &[(C64, f64)] = if palindromic && alpha == beta {
            &[(c(1.0), 0.0)]
        } else {
            &[(c(1.0), 0.0), (-I, 1.0)]
        };
        for &(rot, _) in parts {
            let mut row = RowBuilder::new();
            for &(k, i, j, z) in &f.psd {
                row.add(k, i, j, rot * z);
            }
            for &(var, z) in &f.free {
                row.add_free(var, (rot * z).re);
            }
            let rhs = (rot * target).re;
            if row.is_empty() && rhs == 0.0 {
                continue;
            }
            instance.push(row.finish(rhs));
        }
    }

    Ok(GramProblem { target: q.clone(), delta, gens: gens.to_vec(), blocks, ideal, coefficient_map: map, instance })
}

impl GramProblem {
    pub fn m(&self) -> usize {
        self.target.rows()
    }

    /// The polynomial the constraint map assigns to an assignment of the
    /// unknowns, without going through factors.
    pub fn predict(&self, blocks: &[CMat], free: &[f64]) -> MatPoly {
        let m = self.m();
        let mut coefs: BTreeMap<Word, CMat> = BTreeMap::new();
        for ((v, alpha, beta), f) in &self.coefficient_map {
            let z = f.eval(blocks, free);
            coefs.entry(v.clone()).or_insert_with(|| CMat::zeros(m, m))[(*alpha, *beta)] += z;
        }
        let mut terms = Vec::new();
        for (v, cm) in coefs {
            let adj = v.adjoint();
            if adj != v {
                terms.push((adj, cm.adjoint()));
            }
            terms.push((v, cm));
        }
        MatPoly::from_terms(m, m, terms).expect("shapes agree")
    }
}

/// Solve the feasibility problem, maximizing the smallest Gram eigenvalue.
pub fn solve_gram(p: &GramProblem, tol: f64) -> Result<SdpOutcome> {
    let opts = SolveOptions { tol, ..SolveOptions::default() };
    sdp::solve(&p.instance, &opts)
}

/// Factor each Gram block spectrally (eigenvalues at most [`RANK_TOL`]
/// dropped) and read the ideal multipliers off the free variables. The
/// residual is recomputed from the factors.
pub fn extract_certificate(p: &GramProblem, assignment: &Solution) -> Result<Certificate> {
    let m = p.m();
    let mut sos = Vec::new();
    let mut weighted = Vec::new();
    for (k, blk) in p.blocks.iter().enumerate() {
        let (vals, vecs) = linalg::hermitian_eigen(&assignment.blocks[k]);
        let sr = blk.gen_rows;
        for (col, &lam) in vals.iter().enumerate() {
            if lam <= RANK_TOL {
                continue;
            }
            let scale = lam.sqrt();
            let v = vecs.column(col);
            let terms = blk.basis.words.iter().enumerate().map(|(a, w)| {
                let coef = CMat::from_fn(sr, m, |s, alpha| v[(a * sr + s) * m + alpha].conj() * scale);
                (w.clone(), coef)
            });
            let r = MatPoly::from_terms(sr, m, terms)?;
            match blk.generator {
                None => sos.push(r),
                Some(g) => weighted.push((g, r)),
            }
        }
    }
    let mut ideal = Vec::new();
    let mut ideal_gens = Vec::new();
    for (k, blk) in p.ideal.iter().enumerate() {
        let rr = blk.generator.rows();
        let terms = blk.basis.words.iter().enumerate().map(|(b, w)| {
            let coef = CMat::from_fn(rr, m, |rho, alpha| {
                C64::new(
                    assignment.free[blk.var(b, rho, alpha, m, false)],
                    assignment.free[blk.var(b, rho, alpha, m, true)],
                )
            });
            (w.clone(), coef)
        });
        ideal.push((k, MatPoly::from_terms(rr, m, terms)?));
        ideal_gens.push(blk.generator.clone());
    }
    let mut cert = Certificate {
        pipeline: Pipeline::Polynomial,
        delta: p.delta,
        target: p.target.clone(),
        generators: p.gens.clone(),
        labels: (1..=p.gens.len()).map(|k| format!("g{k}")).collect(),
        ideal_gens,
        sos,
        weighted,
        ideal,
        residual: 0.0,
        substitution: Vec::new(),
    };
    cert.residual = cert.expand()?.max_coefficient_diff(&p.target);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rexpr::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str) -> MatPoly {
        parse(s).unwrap().to_matpoly().unwrap()
    }

    fn feasible(p: &GramProblem) -> Solution {
        match solve_gram(p, 1e-8).unwrap() {
            SdpOutcome::Feasible(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn square_of_letter() {
        let p = build_gram_problem(&poly("x1^2"), &[], &[], 1).unwrap();
        let cert = extract_certificate(&p, &feasible(&p)).unwrap();
        assert!(cert.residual <= 1e-8, "{}", cert.residual);
    }

    #[test]
    fn interval_certificate() {
        let p = build_gram_problem(&poly("2 - x1^2"), &[poly("1 - x1^2")], &[], 1).unwrap();
        assert_eq!(p.blocks[1].basis.words, vec![Word::empty()]);
        let cert = extract_certificate(&p, &feasible(&p)).unwrap();
        assert!(cert.residual <= 1e-8);
        assert!(!cert.weighted.is_empty());
    }

    #[test]
    fn negative_constant_is_infeasible() {
        for delta in 0..3 {
            let p = build_gram_problem(&poly("-1"), &[], &[], delta).unwrap();
            assert!(matches!(solve_gram(&p, 1e-8).unwrap(), SdpOutcome::Infeasible { .. }));
        }
    }

    #[test]
    fn quartic_needs_degree_two() {
        assert!(matches!(
            build_gram_problem(&poly("x1^4"), &[], &[], 1),
            Err(Error::DegreeTooSmall { .. })
        ));
        let p = build_gram_problem(&poly("x1^4"), &[], &[], 2).unwrap();
        let cert = extract_certificate(&p, &feasible(&p)).unwrap();
        assert!(cert.residual <= 1e-8);
    }

    #[test]
    fn hand_built_gram_gives_single_factor() {
        let p = build_gram_problem(&poly("x1^2"), &[], &[], 1).unwrap();
        let mut h = CMat::zeros(2, 2);
        h[(1, 1)] = c(1.0);
        let sol = Solution { blocks: vec![h], free: vec![], margin: 0.0, residual: 0.0, iterations: 0 };
        let cert = extract_certificate(&p, &sol).unwrap();
        assert_eq!(cert.sos.len(), 1);
        let s = &cert.sos[0];
        assert!(s.max_coefficient_diff(&poly("x1")) < 1e-15 || s.max_coefficient_diff(&poly("-x1")) < 1e-15);
        assert_eq!(cert.residual, 0.0);
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        let g = linalg::random_complex_matrix(rng, n, n);
        &g * g.adjoint()
    }

    #[test]
    fn prediction_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pencil = poly("[[1 + x1, x2], [x2, 1 - x1]]");
        let q = poly("[[2, x1*x2], [x2*x1, 1 + u1 + u1*]]");
        let m = poly("x1*u1 - 1");
        let p = build_gram_problem(&q, &[poly("1 - x1^2"), pencil], &[m], 1).unwrap();
        for _ in 0..5 {
            let blocks: Vec<CMat> = p.instance.block_dims.iter().map(|&n| random_psd(&mut rng, n)).collect();
            let free: Vec<f64> = (0..p.instance.n_free).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5).collect();
            let sol = Solution { blocks: blocks.clone(), free: free.clone(), margin: 0.0, residual: 0.0, iterations: 0 };
            let predicted = p.predict(&blocks, &free);
            let cert = extract_certificate(&p, &sol).unwrap();
            let expanded = cert.expand().unwrap();
            let scale = 1.0 + expanded.max_coefficient();
            assert!(expanded.max_coefficient_diff(&predicted) <= 1e-12 * scale);
        }
    }
}
