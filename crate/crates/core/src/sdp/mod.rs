//! Dense semidefinite feasibility with a margin objective.
//!
//! An instance has complex Hermitian PSD blocks `X_k`, free real variables
//! `y` and real equality rows `<A_i, X> + f_i·y = b_i` with
//! `<A, X> = Re tr(A X)`. The solver maximizes the common margin `t` with
//! every `X_k ⪰ t I` (capped at [`SolveOptions::margin_cap`]) using a
//! primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector), and returns an assignment only if it meets the
//! residual and eigenvalue contract.
//!
//! Before solving, rows that pin a sum of same-signed diagonal entries to
//! zero are used to remove the corresponding rows and columns (a PSD matrix
//! with a zero diagonal entry has that whole row zero). Gram problems with
//! no strictly feasible point often become strictly feasible this way.

mod ipm;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::Result;
use crate::linalg::{self, c, CMat, C64};


/// One Hermitian coefficient: `A[i][j] = coef`, `A[j][i] = conj(coef)`,
/// with `i <= j` (diagonal coefficients are real).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub coef: C64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Constraint {
    pub entries: Vec<Entry>,
    pub free: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    /// `<A, X>` for Hermitian blocks (only the stored triangle is read).
    pub fn eval(&self, blocks: &[CMat], free: &[f64]) -> f64 {
        let mut acc = 0.0;
        for e in &self.entries {
            let x = &blocks[e.block];
            acc += if e.i == e.j {
                e.coef.re * x[(e.i, e.i)].re
            } else {
                2.0 * (e.coef * x[(e.i, e.j)].conj()).re
            };
        }
        acc + self.free.iter().map(|&(k, a)| a * free[k]).sum::<f64>()
    }
}

/// Accumulates a row from raw functionals `Re(c · X[k][l])`.
#[derive(Clone, Debug, Default)]
pub struct RowBuilder {
    entries: BTreeMap<(usize, usize, usize), C64>,
    free: BTreeMap<usize, f64>,
}

impl RowBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `Re(coef · X_block[k][l])`.
    pub fn add(&mut self, block: usize, k: usize, l: usize, coef: C64) {
        let (key, val) = match k.cmp(&l) {
            std::cmp::Ordering::Equal => ((block, k, k), c(coef.re)),
            std::cmp::Ordering::Less => ((block, k, l), coef.conj() * 0.5),
            std::cmp::Ordering::Greater => ((block, l, k), coef * 0.5),
        };
        *self.entries.entry(key).or_insert(c(0.0)) += val;
    }

    pub fn add_free(&mut self, k: usize, coef: f64) {
        *self.free.entry(k).or_insert(0.0) += coef;
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|z| *z == c(0.0)) && self.free.values().all(|&a| a == 0.0)
    }

    pub fn finish(self, rhs: f64) -> Constraint {
        Constraint {
            entries: self
                .entries
                .into_iter()
                .filter(|(_, z)| *z != c(0.0))
                .map(|((block, i, j), coef)| Entry { block, i, j, coef })
                .collect(),
            free: self.free.into_iter().filter(|&(_, a)| a != 0.0).collect(),
            rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SdpInstance {
    pub block_dims: Vec<usize>,
    pub n_free: usize,
    pub rows: Vec<Constraint>,
}

impl SdpInstance {
    pub fn new(block_dims: Vec<usize>, n_free: usize) -> Self {
        SdpInstance { block_dims, n_free, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Constraint) {
        self.rows.push(row);
    }

    /// Largest absolute equality violation.
    pub fn residual(&self, blocks: &[CMat], free: &[f64]) -> f64 {
        self.rows.iter().map(|r| (r.eval(blocks, free) - r.rhs).abs()).fold(0.0, f64::max)
    }

    /// One line per equality row:
    /// `rhs | block i j re im ; ... | var coef ; ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let dims: Vec<String> = self.block_dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "blocks {}", dims.join(" "));
        let _ = writeln!(out, "free {}", self.n_free);
        for r in &self.rows {
            let ents: Vec<String> = r
                .entries
                .iter()
                .map(|e| format!("{} {} {} {:e} {:e}", e.block, e.i, e.j, e.coef.re, e.coef.im))
                .collect();
            let free: Vec<String> = r.free.iter().map(|(k, a)| format!("{k} {a:e}")).collect();
            let _ = writeln!(out, "{:e} | {} | {}", r.rhs, ents.join(" ; "), free.join(" ; "));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Contract tolerance on residual and eigenvalues.
    pub tol: f64,
    pub iter_cap: usize,
    /// Upper bound on the margin the solver pushes towards.
    pub margin_cap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, iter_cap: 200, margin_cap: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub blocks: Vec<CMat>,
    pub free: Vec<f64>,
    /// Smallest eigenvalue over all blocks.
    pub margin: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SdpOutcome {
    Feasible(Solution),
    /// No assignment with margin `>= -tol` was found. `margin_bound` is an
    /// upper bound on the attainable margin when the solver could establish
    /// one (`None` for inconsistent equalities). The bound holds within the
    /// solver's internal trace cap, so this is a heuristic verdict.
    Infeasible { margin_bound: Option<f64>, iterations: usize },
}

impl SdpOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SdpOutcome::Feasible(s) => Some(s),
            SdpOutcome::Infeasible { .. } => None,
        }
    }
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn nearest_psd(m: &CMat) -> CMat {
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let d = linalg::diag_real(&clipped);
    linalg::hermitian_part(&(&vecs * d * vecs.adjoint()))
}

/// Solve after removing indices that every feasible point must zero.
pub fn solve(inst: &SdpInstance, opts: &SolveOptions) -> Result<SdpOutcome> {
    let zeroed = match forced_zeros(inst) {
        Some(z) => z,
        None => return Ok(SdpOutcome::Infeasible { margin_bound: None, iterations: 0 }),
    };
    if zeroed.iter().all(BTreeSet::is_empty) {
        return ipm::solve_core(inst, opts);
    }
    // kept[k] lists the surviving indices of block k; blocks left empty are removed
    let kept: Vec<Vec<usize>> =
        inst.block_dims.iter().zip(&zeroed).map(|(&n, z)| (0..n).filter(|i| !z.contains(i)).collect()).collect();
    let mut new_block = Vec::with_capacity(kept.len());
    let mut dims = Vec::new();
    for k in &kept {
        new_block.push((!k.is_empty()).then_some(dims.len()));
        if !k.is_empty() {
            dims.push(k.len());
        }
    }
    let position = |b: usize, i: usize| kept[b].binary_search(&i).ok();
    let mut reduced = SdpInstance::new(dims, inst.n_free);
    for row in &inst.rows {
        let entries = row
            .entries
            .iter()
            .filter_map(|e| {
                let block = new_block[e.block]?;
                Some(Entry { block, i: position(e.block, e.i)?, j: position(e.block, e.j)?, coef: e.coef })
            })
            .collect();
        reduced.push(Constraint { entries, free: row.free.clone(), rhs: row.rhs });
    }
    Ok(match ipm::solve_core(&reduced, opts)? {
        SdpOutcome::Feasible(sol) => {
            let blocks: Vec<CMat> = inst
                .block_dims
                .iter()
                .enumerate()
                .map(|(b, &n)| {
                    let mut full = CMat::zeros(n, n);
                    if let Some(nb) = new_block[b] {
                        for (a, &i) in kept[b].iter().enumerate() {
                            for (bb, &j) in kept[b].iter().enumerate() {
                                full[(i, j)] = sol.blocks[nb][(a, bb)];
                            }
                        }
                    }
                    full
                })
                .collect();
            let margin = blocks.iter().map(linalg::min_eigenvalue).fold(f64::INFINITY, f64::min);
            let residual = inst.residual(&blocks, &sol.free);
            SdpOutcome::Feasible(Solution { blocks, free: sol.free, margin, residual, iterations: sol.iterations })
        }
        other => other,
    })
}

/// Diagonal indices pinned to zero, iterated to a fixpoint, or `None` when
/// some row asks a sum of nonnegative entries to be negative.
fn forced_zeros(inst: &SdpInstance) -> Option<Vec<BTreeSet<usize>>> {
    let mut zeroed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); inst.block_dims.len()];
    loop {
        let mut changed = false;
        for row in &inst.rows {
            if !row.free.is_empty() {
                continue;
            }
            let live: Vec<&Entry> = row
                .entries
                .iter()
                .filter(|e| !zeroed[e.block].contains(&e.i) && !zeroed[e.block].contains(&e.j))
                .collect();
            if live.is_empty() || live.iter().any(|e| e.i != e.j) {
                continue;
            }
            let sign = live[0].coef.re.signum();
            if live.iter().any(|e| e.coef.re.signum() != sign || e.coef.re == 0.0) {
                continue;
            }
            let scale = live.iter().map(|e| e.coef.re.abs()).fold(0.0, f64::max);
            if sign * row.rhs < -ZERO_RHS * scale {
                return None;
            }
            if row.rhs.abs() <= ZERO_RHS * scale {
                for e in live {
                    changed |= zeroed[e.block].insert(e.i);
                }
            }
        }
        if !changed {
            return Some(zeroed);
        }
    }
}

/// Right-hand sides below this (relative to the row) count as zero.
const ZERO_RHS: f64 = 1e-14;

/// Convenience used by tests and examples.
pub fn solve_default(inst: &SdpInstance) -> Result<SdpOutcome> {
    solve(inst, &SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(rhs: f64) -> SdpInstance {
        let mut inst = SdpInstance::new(vec![1], 0);
        let mut r = RowBuilder::new();
        r.add(0, 0, 0, c(1.0));
        inst.push(r.finish(rhs));
        inst
    }

    #[test]
    fn one_by_one() {
        let s = solve_default(&single(2.0)).unwrap();
        let sol = s.solution().expect("feasible");
        assert!((sol.blocks[0][(0, 0)].re - 2.0).abs() < 1e-8);
        assert!((sol.margin - 2.0).abs() < 1e-8);
        assert!(matches!(solve_default(&single(-1.0)).unwrap(), SdpOutcome::Infeasible { .. }));
    }

    #[test]
    fn raw_functional_matches_hermitian_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = random_hermitian(&mut rng, 3);
        let mut r = RowBuilder::new();
        let coefs = [(0, 1, C64::new(0.3, -1.2)), (2, 0, C64::new(-0.7, 0.4)), (1, 1, C64::new(2.0, 5.0))];
        let mut expect = 0.0;
        for &(k, l, z) in &coefs {
            r.add(0, k, l, z);
            expect += (z * x[(k, l)]).re;
        }
        let row = r.finish(0.0);
        assert!((row.eval(&[x], &[]) - expect).abs() < 1e-12);
    }

    #[test]
    fn free_variables_and_rank_deficient_rows() {
        // X00 + y = 1, 2 X00 + 2 y = 2 (duplicate), X11 = 3, y free
        let mut inst = SdpInstance::new(vec![2], 1);
        for scale in [1.0, 2.0] {
            let mut r = RowBuilder::new();
            r.add(0, 0, 0, c(scale));
            r.add_free(0, scale);
            inst.push(r.finish(scale));
        }
        let mut r = RowBuilder::new();
        r.add(0, 1, 1, c(1.0));
        inst.push(r.finish(3.0));
        let out = solve_default(&inst).unwrap();
        let sol = out.solution().expect("feasible");
        assert!(sol.residual <= 1e-8);
        assert!(sol.margin >= -1e-8);
    }

    #[test]
    fn inconsistent_rows_are_infeasible() {
        let mut inst = SdpInstance::new(vec![1], 0);
        for rhs in [1.0, 2.0] {
            let mut r = RowBuilder::new();
            r.add(0, 0, 0, c(1.0));
            inst.push(r.finish(rhs));
        }
        assert!(matches!(solve_default(&inst).unwrap(), SdpOutcome::Infeasible { .. }));
    }

    #[test]
    fn boundary_feasible_problem() {
        // [[a, b], [b*, c]] with a = 1, c = 1, Re b = 1: only the rank-one point
        let mut inst = SdpInstance::new(vec![2], 0);
        for (k, l, z, rhs) in [(0, 0, c(1.0), 1.0), (1, 1, c(1.0), 1.0), (0, 1, c(1.0), 1.0)] {
            let mut r = RowBuilder::new();
            r.add(0, k, l, z);
            inst.push(r.finish(rhs));
        }
        let sol = solve_default(&inst).unwrap();
        let sol = sol.solution().expect("feasible within tolerance");
        assert!(sol.margin >= -1e-8 && sol.margin <= 1e-6);
    }

    #[test]
    fn pinned_diagonal_is_removed() {
        // X00 = 0 forces X01 = 0; X01 + X11 = 1 then needs X11 = 1
        let mut inst = SdpInstance::new(vec![2], 0);
        for (k, l, rhs) in [(0, 0, 0.0), (1, 1, 1.0)] {
            let mut r = RowBuilder::new();
            r.add(0, k, l, c(1.0));
            if k == 1 {
                r.add(0, 0, 1, c(1.0));
            }
            inst.push(r.finish(rhs));
        }
        let out = solve_default(&inst).unwrap();
        let sol = out.solution().expect("feasible");
        assert!(sol.blocks[0][(0, 0)].norm() == 0.0 && sol.blocks[0][(0, 1)].norm() == 0.0);
        assert!((sol.blocks[0][(1, 1)].re - 1.0).abs() < 1e-8);
        assert!(sol.margin.abs() < 1e-12);
        let mut neg = SdpInstance::new(vec![2], 0);
        let mut r = RowBuilder::new();
        r.add(0, 0, 0, c(1.0));
        r.add(0, 1, 1, c(2.0));
        neg.push(r.finish(-1.0));
        assert!(matches!(solve_default(&neg).unwrap(), SdpOutcome::Infeasible { .. }));
    }

    #[test]
    fn nearest_psd_examples() {
        let m = linalg::diag_real(&[1.0, -1.0]);
        assert!(linalg::max_abs(&(nearest_psd(&m) - linalg::diag_real(&[1.0, 0.0]))) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 5);
            let p = nearest_psd(&h);
            assert!(linalg::min_eigenvalue(&p) >= -1e-12);
            assert!(linalg::max_abs(&(nearest_psd(&p) - &p)) < 1e-12);
            let (vals, _) = linalg::hermitian_eigen(&h);
            let neg: f64 = vals.iter().filter(|v| **v < 0.0).map(|v| v * v).sum::<f64>().sqrt();
            assert!(((&h - &p).norm() - neg).abs() < 1e-10);
        }
    }

    #[test]
    fn dump_has_one_line_per_row() {
        let inst = single(2.0);
        let text = inst.dump();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().last().unwrap().starts_with("2e0 |"));
    }
}

#[cfg(test)]
mod random_tests {
    use super::*;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(seed: u64) -> SdpInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nb = rng.random_range(1..=3);
        let dims: Vec<usize> = (0..nb).map(|_| rng.random_range(1..=20)).collect();
        let n_free = rng.random_range(0..=2);
        let x: Vec<CMat> = dims
            .iter()
            .map(|&n| {
                let rank = rng.random_range(1..=n);
                let g = linalg::random_complex_matrix(&mut rng, n, rank);
                &g * g.adjoint()
            })
            .collect();
        let y: Vec<f64> = (0..n_free).map(|_| rng.random::<f64>()).collect();
        let mut inst = SdpInstance::new(dims.clone(), n_free);
        let rows = rng.random_range(1..=150);
        let planted = rng.random_bool(0.7);
        for _ in 0..rows {
            let mut r = RowBuilder::new();
            for _ in 0..rng.random_range(1..=6) {
                let b = rng.random_range(0..nb);
                let k = rng.random_range(0..dims[b]);
                let l = rng.random_range(0..dims[b]);
                r.add(b, k, l, linalg::random_complex(&mut rng));
            }
            if n_free > 0 && rng.random_bool(0.3) {
                r.add_free(rng.random_range(0..n_free), rng.random::<f64>() - 0.5);
            }
            let row = r.finish(0.0);
            let rhs = if planted { row.eval(&x, &y) } else { 4.0 * rng.random::<f64>() - 2.0 };
            inst.push(Constraint { rhs, ..row });
        }
        inst
    }

    #[test]
    fn determinism() {
        for seed in [3, 17] {
            let inst = random_instance(seed);
            assert_eq!(solve_default(&inst).unwrap(), solve_default(&inst).unwrap());
        }
    }

    #[test]
    fn contract_on_random_instances() {
        let mut counts = [0usize; 3];
        for seed in 0..200 {
            let inst = random_instance(seed);
            match solve_default(&inst) {
                Ok(SdpOutcome::Feasible(sol)) => {
                    counts[0] += 1;
                    assert!(inst.residual(&sol.blocks, &sol.free) <= 1e-8, "seed {seed}");
                    for b in &sol.blocks {
                        assert!(linalg::min_eigenvalue(b) >= -1e-8, "seed {seed}");
                    }
                }
                Ok(SdpOutcome::Infeasible { .. }) => counts[1] += 1,
                Err(Error::SolverStalled { .. }) => counts[2] += 1,
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
        assert!(counts[0] > 100 && counts[1] > 10, "{counts:?}");
        assert!(counts[2] <= 4, "{counts:?}");
    }
}
