//! Primal-dual interior-point method on the margin formulation.
//!
//! With `S_k = X_k - t I` the solver works on
//!
//! ```text
//! min -t   s.t.  <A_i, S> + t <A_i, I> + B_i y = b_i,
//!                t + s_cap = t_cap,
//!                sum_k tr S_k + s_tr = T,
//!                S_k, s_cap, s_tr ⪰ 0,  t, y free.
//! ```
//!
//! The trace row keeps the primal set bounded so that `Z = η I` is a strictly
//! feasible dual start; the least-norm solution of the equalities gives a
//! strictly feasible primal start.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};

use super::{SdpInstance, SdpOutcome, Solution, SolveOptions};

const PIVOT_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-8;
const MU_FLOOR: f64 = 1e-13;
const REFINE_STEPS: usize = 3;
const SNAPSHOT_TOL: f64 = 1e-7;
const POLISH_RANGE: f64 = 1e-5;
const POLISH_ROUNDS: usize = 100;

/// Nonzeros of one row inside one block: `(p, q, a)` with `p <= q` meaning
/// `A[p][q] = a`, `A[q][p] = conj(a)`.
#[derive(Clone, Debug)]
struct Part {
    block: usize,
    ents: Vec<(usize, usize, C64)>,
}

#[derive(Clone, Debug)]
struct Row {
    parts: Vec<Part>,
}

/// `Re tr(A W)` for an arbitrary (not necessarily Hermitian) `W`.
fn apply_row(row: &Row, w: &[CMat]) -> f64 {
    let mut acc = 0.0;
    for part in &row.parts {
        let m = &w[part.block];
        for &(p, q, a) in &part.ents {
            acc += if p == q {
                a.re * m[(p, p)].re
            } else {
                (a * m[(q, p)] + a.conj() * m[(p, q)]).re
            };
        }
    }
    acc
}

fn add_row(row: &Row, scale: f64, out: &mut [CMat]) {
    for part in &row.parts {
        let m = &mut out[part.block];
        for &(p, q, a) in &part.ents {
            if p == q {
                m[(p, p)] += c(scale * a.re);
            } else {
                m[(p, q)] += a * scale;
                m[(q, p)] += a.conj() * scale;
            }
        }
    }
}

fn row_dot(a: &Row, b: &Row) -> f64 {
    let mut acc = 0.0;
    for pa in &a.parts {
        let Some(pb) = b.parts.iter().find(|pb| pb.block == pa.block) else { continue };
        // entries are sorted by position, so a merge finds the overlaps
        let (mut i, mut j) = (0, 0);
        while i < pa.ents.len() && j < pb.ents.len() {
            let (p, q, x) = pa.ents[i];
            let (r, s, y) = pb.ents[j];
            match (p, q).cmp(&(r, s)) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = if p == q { 1.0 } else { 2.0 };
                    acc += w * (x * y.conj()).re;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    acc
}

/// Greedy pivoted Cholesky: indices of a maximal well-conditioned subset.
fn independent_subset(k: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let n = k.nrows();
    let mut diag: Vec<f64> = (0..n).map(|i| k[(i, i)]).collect();
    let scale = diag.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut l: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    let mut used = vec![false; n];
    loop {
        let Some((piv, &d)) = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            break;
        };
        if d <= tol * scale {
            break;
        }
        let s = d.sqrt();
        let col: Vec<f64> = (0..n)
            .map(|i| {
                let dot: f64 = l.iter().map(|lc| lc[i] * lc[piv]).sum();
                (k[(i, piv)] - dot) / s
            })
            .collect();
        for i in 0..n {
            diag[i] -= col[i] * col[i];
        }
        used[piv] = true;
        chosen.push(piv);
        l.push(col);
    }
    chosen.sort_unstable();
    chosen
}

fn hermitian_inverse(m: &CMat) -> Option<CMat> {
    m.clone().cholesky().map(|ch| ch.inverse())
}

/// Largest `α` with `m + α dm ⪰ 0` (infinite if the direction never leaves
/// the cone), or `None` if `m` is not numerically positive definite.
fn max_step(m: &CMat, dm: &CMat) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(f64::INFINITY);
    }
    let l = m.clone().cholesky()?.l();
    let w = l.solve_lower_triangular(dm)?;
    let w = l.solve_lower_triangular(&w.adjoint())?;
    let lam = linalg::min_eigenvalue(&w);
    Some(if lam >= 0.0 { f64::INFINITY } else { -1.0 / lam })
}

fn inner(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p * q.conj()).re).sum::<f64>()).sum()
}

fn herm(m: &CMat) -> CMat {
    linalg::hermitian_part(m)
}

struct Normalized {
    rows: Vec<Row>,
    bmat: DMatrix<f64>,
    rhs: DVector<f64>,
    /// Scale applied to each row.
    scale: Vec<f64>,
}

fn normalize(inst: &SdpInstance) -> Normalized {
    let m = inst.rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut bmat = DMatrix::zeros(m, inst.n_free);
    let mut rhs = DVector::zeros(m);
    let mut scale = Vec::with_capacity(m);
    for (i, con) in inst.rows.iter().enumerate() {
        let mut parts: Vec<Part> = Vec::new();
        for e in &con.entries {
            let (p, q, a) = if e.i <= e.j { (e.i, e.j, e.coef) } else { (e.j, e.i, e.coef.conj()) };
            let a = if p == q { c(a.re) } else { a };
            match parts.iter_mut().find(|pt| pt.block == e.block) {
                Some(pt) => pt.ents.push((p, q, a)),
                None => parts.push(Part { block: e.block, ents: vec![(p, q, a)] }),
            }
        }
        for pt in &mut parts {
            pt.ents.sort_by_key(|&(p, q, _)| (p, q));
            let mut merged: Vec<(usize, usize, C64)> = Vec::new();
            for &(p, q, a) in &pt.ents {
                match merged.last_mut() {
                    Some(last) if (last.0, last.1) == (p, q) => last.2 += a,
                    _ => merged.push((p, q, a)),
                }
            }
            pt.ents = merged;
        }
        parts.sort_by_key(|pt| pt.block);
        let row = Row { parts };
        let mut norm2 = row_dot(&row, &row);
        for &(k, a) in &con.free {
            bmat[(i, k)] += a;
        }
        norm2 += bmat.row(i).norm_squared();
        let s = if norm2 > 0.0 { 1.0 / norm2.sqrt() } else { 0.0 };
        let mut row = row;
        for pt in &mut row.parts {
            for e in &mut pt.ents {
                e.2 *= s;
            }
        }
        for k in 0..inst.n_free {
            bmat[(i, k)] *= s;
        }
        rhs[i] = if s > 0.0 { con.rhs * s } else { con.rhs };
        scale.push(s);
        rows.push(row);
    }
    Normalized { rows, bmat, rhs, scale }
}

/// Least-norm corrector for the selected (independent) rows.
struct Projector {
    sel: Vec<usize>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Projector {
    fn new(nz: &Normalized) -> Option<Projector> {
        let m = nz.rows.len();
        let mut k = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = row_dot(&nz.rows[i], &nz.rows[j]) + nz.bmat.row(i).dot(&nz.bmat.row(j));
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        let sel = independent_subset(&k, PIVOT_TOL);
        let ks = DMatrix::from_fn(sel.len(), sel.len(), |a, b| k[(sel[a], sel[b])]);
        Some(Projector { chol: ks.cholesky()?, sel })
    }

    /// Shift `(x, y)` by the least-norm correction onto the selected rows.
    fn correct(&self, nz: &Normalized, x: &mut [CMat], y: &mut DVector<f64>) {
        let r = DVector::from_iterator(
            self.sel.len(),
            self.sel.iter().map(|&i| nz.rhs[i] - apply_row(&nz.rows[i], x) - nz.bmat.row(i).dot(&y.transpose())),
        );
        let w = self.chol.solve(&r);
        for (a, &i) in self.sel.iter().enumerate() {
            add_row(&nz.rows[i], w[a], x);
            for k in 0..y.len() {
                y[k] += w[a] * nz.bmat[(i, k)];
            }
        }
    }
}

fn normalized_residual(nz: &Normalized, x: &[CMat], y: &DVector<f64>) -> f64 {
    (0..nz.rows.len())
        .map(|i| (nz.rhs[i] - apply_row(&nz.rows[i], x) - nz.bmat.row(i).dot(&y.transpose())).abs())
        .fold(0.0, f64::max)
}

fn min_margin(x: &[CMat]) -> f64 {
    x.iter().filter(|m| m.nrows() > 0).map(linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
}

/// The interior-point problem in standard form (only PSD blocks and free
/// columns).
struct Standard {
    dims: Vec<usize>,
    rows: Vec<Row>,
    bmat: DMatrix<f64>,
    rhs: DVector<f64>,
    cost: DVector<f64>,
    /// For every block, the rows touching it.
    touching: Vec<Vec<usize>>,
}

impl Standard {
    fn apply(&self, w: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|r| apply_row(r, w)))
    }

    fn adjoint(&self, lam: &DVector<f64>) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.dims.iter().map(|&n| CMat::zeros(n, n)).collect();
        for (i, r) in self.rows.iter().enumerate() {
            if lam[i] != 0.0 {
                add_row(r, lam[i], &mut out);
            }
        }
        out
    }

    fn schur(&self, x: &[CMat], zinv: &[CMat]) -> DMatrix<f64> {
        let m = self.rows.len();
        let mut mm = DMatrix::zeros(m, m);
        for (j, rj) in self.rows.iter().enumerate() {
            for part in &rj.parts {
                let k = part.block;
                let n = self.dims[k];
                let xk = &x[k];
                // X A_j, column by column from the sparse entries
                let mut xa = CMat::zeros(n, n);
                for &(p, q, a) in &part.ents {
                    if p == q {
                        for r in 0..n {
                            xa[(r, q)] += xk[(r, p)] * a.re;
                        }
                    } else {
                        for r in 0..n {
                            xa[(r, q)] += xk[(r, p)] * a;
                            xa[(r, p)] += xk[(r, q)] * a.conj();
                        }
                    }
                }
                let g = xa * &zinv[k];
                for &i in &self.touching[k] {
                    let ri = &self.rows[i];
                    for pi in ri.parts.iter().filter(|pi| pi.block == k) {
                        let mut acc = 0.0;
                        for &(p, q, a) in &pi.ents {
                            acc += if p == q { a.re * g[(p, p)].re } else { (a * g[(q, p)] + a.conj() * g[(p, q)]).re };
                        }
                        mm[(i, j)] += acc;
                    }
                }
            }
        }
        (&mm + mm.transpose()) * 0.5
    }
}

struct Iterate {
    x: Vec<CMat>,
    z_free: DVector<f64>,
    lam: DVector<f64>,
    zd: Vec<CMat>,
}

enum Stop {
    Converged,
    MarginReached,
    DualBound(f64),
    Stalled,
}

/// Solve `inst` to the contract in [`SolveOptions`]; see the module docs.
pub(super) fn solve_core(inst: &SdpInstance, opts: &SolveOptions) -> Result<SdpOutcome> {
    for (i, r) in inst.rows.iter().enumerate() {
        for e in &r.entries {
            let n = *inst.block_dims.get(e.block).ok_or_else(|| Error::Invalid(format!("row {i}: block {} out of range", e.block)))?;
            if e.i >= n || e.j >= n {
                return Err(Error::Invalid(format!("row {i}: entry ({}, {}) outside block {}", e.i, e.j, e.block)));
            }
        }
        if let Some(&(k, _)) = r.free.iter().find(|(k, _)| *k >= inst.n_free) {
            return Err(Error::Invalid(format!("row {i}: free variable {k} out of range")));
        }
    }

    let nz = normalize(inst);
    let nblocks = inst.block_dims.len();
    let zero_blocks = || -> Vec<CMat> { inst.block_dims.iter().map(|&n| CMat::zeros(n, n)).collect() };

    // rows with no unknowns must have zero right-hand side
    for i in 0..nz.rows.len() {
        if nz.scale[i] == 0.0 && inst.rows[i].rhs.abs() > opts.tol {
            return Ok(SdpOutcome::Infeasible { margin_bound: None, iterations: 0 });
        }
    }

    let proj = Projector::new(&nz).ok_or(Error::SolverStalled { iterations: 0 })?;
    let mut x0 = zero_blocks();
    let mut y0 = DVector::zeros(inst.n_free);
    proj.correct(&nz, &mut x0, &mut y0);
    proj.correct(&nz, &mut x0, &mut y0);
    if normalized_residual(&nz, &x0, &y0) > CONSISTENCY_TOL {
        return Ok(SdpOutcome::Infeasible { margin_bound: None, iterations: 0 });
    }

    let psd_dim: usize = inst.block_dims.iter().sum();
    if psd_dim == 0 {
        return finish(inst, &nz, &proj, x0, y0, opts, 0, None);
    }

    let sel = &proj.sel;
    let t_cap = opts.margin_cap;
    let lam0 = min_margin(&x0);
    let t0 = (lam0 - 1.0).min(t_cap - 1.0);
    let s0: Vec<CMat> = x0.iter().map(|m| m - CMat::identity(m.nrows(), m.nrows()) * c(t0)).collect();
    let tr_s0: f64 = s0.iter().map(|m| m.trace().re).sum();
    let trace_cap = 10.0 * (tr_s0 + psd_dim as f64);

    // free columns: the original y's, then t; drop dependent ones
    let m_sel = sel.len();
    let m = m_sel + 2;
    let nf_all = inst.n_free + 1;
    let mut b_all = DMatrix::zeros(m, nf_all);
    for (a, &i) in sel.iter().enumerate() {
        for k in 0..inst.n_free {
            b_all[(a, k)] = nz.bmat[(i, k)];
        }
        let diag: f64 = nz.rows[i]
            .parts
            .iter()
            .flat_map(|pt| pt.ents.iter())
            .filter(|(p, q, _)| p == q)
            .map(|(_, _, a)| a.re)
            .sum();
        b_all[(a, inst.n_free)] = diag;
    }
    b_all[(m_sel, inst.n_free)] = 1.0;
    let col_gram = b_all.transpose() * &b_all;
    let mut cols = independent_subset(&col_gram, PIVOT_TOL);
    if !cols.contains(&inst.n_free) {
        cols.push(inst.n_free);
    }
    let bmat = DMatrix::from_fn(m, cols.len(), |r, k| b_all[(r, cols[k])]);
    let t_col = cols.len() - 1;
    let mut cost = DVector::zeros(cols.len());
    cost[t_col] = -1.0;

    let cap_block = nblocks;
    let tr_block = nblocks + 1;
    let mut dims = inst.block_dims.clone();
    dims.push(1);
    dims.push(1);
    let mut rows: Vec<Row> = sel.iter().map(|&i| nz.rows[i].clone()).collect();
    rows.push(Row { parts: vec![Part { block: cap_block, ents: vec![(0, 0, c(1.0))] }] });
    let mut tr_parts: Vec<Part> = inst
        .block_dims
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(k, &n)| Part { block: k, ents: (0..n).map(|p| (p, p, c(1.0))).collect() })
        .collect();
    tr_parts.push(Part { block: tr_block, ents: vec![(0, 0, c(1.0))] });
    rows.push(Row { parts: tr_parts });
    let mut rhs = DVector::zeros(m);
    for (a, &i) in sel.iter().enumerate() {
        rhs[a] = nz.rhs[i];
    }
    rhs[m_sel] = t_cap;
    rhs[m_sel + 1] = trace_cap;
    let mut touching = vec![Vec::new(); dims.len()];
    for (i, r) in rows.iter().enumerate() {
        for pt in &r.parts {
            touching[pt.block].push(i);
        }
    }
    let sp = Standard { dims, rows, bmat, rhs, cost, touching };

    let mut x = s0;
    x.push(CMat::from_element(1, 1, c(t_cap - t0)));
    x.push(CMat::from_element(1, 1, c(trace_cap - tr_s0)));
    let mut z_free = DVector::zeros(cols.len());
    for (k, &col) in cols.iter().enumerate() {
        z_free[k] = if col == inst.n_free { t0 } else { y0[col] };
    }
    let eta = 1.0;
    let mut lam = DVector::zeros(m);
    lam[m_sel] = -1.0;
    lam[m_sel + 1] = -eta;
    let zd = {
        let a = sp.adjoint(&lam);
        a.iter().map(|b| -b).collect()
    };
    let mut it = Iterate { x, z_free, lam, zd };

    // back to the original variables, corrected onto the equalities
    let recover = |x: &[CMat], z: &DVector<f64>| -> (Vec<CMat>, DVector<f64>) {
        let t = z[t_col];
        let mut x_out: Vec<CMat> =
            x[..nblocks].iter().map(|s| herm(&(s + CMat::identity(s.nrows(), s.nrows()) * c(t)))).collect();
        let mut y_out = DVector::zeros(inst.n_free);
        for (k, &col) in cols.iter().enumerate() {
            if col < inst.n_free {
                y_out[col] = z[k];
            }
        }
        proj.correct(&nz, &mut x_out, &mut y_out);
        (x_out, y_out)
    };
    let score = |x: &[CMat], z: &DVector<f64>| -> f64 {
        let (x, y) = recover(x, z);
        if inst.residual(&x, y.as_slice()) <= opts.tol {
            min_margin(&x)
        } else {
            f64::NEG_INFINITY
        }
    };

    let (stop, iterations) = run(&sp, &mut it, opts, t_col, &score);
    let (x_out, y_out) = recover(&it.x, &it.z_free);
    let bound = match stop {
        Stop::DualBound(b) => Some(b),
        Stop::Converged => Some(it.z_free[t_col]),
        _ => None,
    };
    finish(inst, &nz, &proj, x_out, y_out, opts, iterations, bound)
}

type Score<'a> = &'a dyn Fn(&[CMat], &DVector<f64>) -> f64;

/// Run the iteration; if it stalls, fall back to the iterate whose corrected
/// assignment had the largest margin.
fn run(sp: &Standard, it: &mut Iterate, opts: &SolveOptions, t_col: usize, score: Score) -> (Stop, usize) {
    let mut best = None;
    let (stop, iters) = iterate(sp, it, opts, t_col, score, &mut best);
    if let (Stop::Stalled, Some((_, x, z))) = (&stop, best) {
        it.x = x;
        it.z_free = z;
    }
    (stop, iters)
}

type Snapshot = Option<(f64, Vec<CMat>, DVector<f64>)>;

fn iterate(
    sp: &Standard,
    it: &mut Iterate,
    opts: &SolveOptions,
    t_col: usize,
    score: Score,
    best: &mut Snapshot,
) -> (Stop, usize) {
    let ntot: usize = sp.dims.iter().sum();
    let bnorm = 1.0 + sp.rhs.norm();
    for iter in 0..opts.iter_cap {
        let Some(zinv) = it.zd.iter().map(hermitian_inverse).collect::<Option<Vec<_>>>() else {
            return (Stop::Stalled, iter);
        };
        let mu = inner(&it.x, &it.zd) / ntot as f64;
        let rp = &sp.rhs - sp.apply(&it.x) - &sp.bmat * &it.z_free;
        let at_lam = sp.adjoint(&it.lam);
        let rd: Vec<CMat> = at_lam.iter().zip(&it.zd).map(|(a, z)| -a - z).collect();
        let rf = &sp.cost - sp.bmat.transpose() * &it.lam;
        let pinf = rp.norm() / bnorm;
        let dinf = (inner(&rd, &rd).sqrt() + rf.norm()) / 2.0;
        let pobj = sp.cost.dot(&it.z_free);
        let dobj = sp.rhs.dot(&it.lam);
        let t = it.z_free[t_col];
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= INNER_TOL && t >= opts.margin_cap / 2.0 {
            return (Stop::MarginReached, iter);
        }
        if pinf <= SNAPSHOT_TOL {
            let sc = score(&it.x, &it.z_free);
            if best.as_ref().is_none_or(|(b, _, _)| sc > *b) {
                *best = Some((sc, it.x.clone(), it.z_free.clone()));
            }
        }
        if pinf <= INNER_TOL && dinf <= INNER_TOL && (rel_gap <= GAP_TOL || mu <= MU_FLOOR * (1.0 + pobj.abs())) {
            return (Stop::Converged, iter);
        }
        if dinf <= INNER_TOL && -dobj < -10.0 * opts.tol {
            return (Stop::DualBound(-dobj), iter);
        }

        let mmat = sp.schur(&it.x, &zinv);
        let m = sp.rows.len();
        let nf = sp.bmat.ncols();
        let reg = 1e-14 * (0..m).map(|i| mmat[(i, i)]).fold(1.0, f64::max);
        let mut kkt = DMatrix::zeros(m + nf, m + nf);
        kkt.view_mut((0, 0), (m, m)).copy_from(&mmat);
        for i in 0..m {
            kkt[(i, i)] += reg;
        }
        kkt.view_mut((0, m), (m, nf)).copy_from(&sp.bmat);
        kkt.view_mut((m, 0), (nf, m)).copy_from(&sp.bmat.transpose());
        let lu = kkt.lu();

        let xrdz: Vec<CMat> = it.x.iter().zip(&rd).zip(&zinv).map(|((x, r), zi)| x * r * zi).collect();
        let base = &rp + sp.apply(&it.x) + sp.apply(&xrdz);

        let direction = |sigma: f64, corr: Option<&Vec<CMat>>| -> Option<(DVector<f64>, DVector<f64>, Vec<CMat>, Vec<CMat>)> {
            let mut h = &base - sp.apply(&zinv) * (sigma * mu);
            if let Some(cw) = corr {
                h += sp.apply(cw);
            }
            let mut full = DVector::zeros(m + nf);
            full.rows_mut(0, m).copy_from(&h);
            full.rows_mut(m, nf).copy_from(&rf);
            let sol = lu.solve(&full)?;
            let mut dlam = sol.rows(0, m).into_owned();
            let mut dz = sol.rows(m, nf).into_owned();
            let build = |dlam: &DVector<f64>| {
                let at = sp.adjoint(dlam);
                let dzd: Vec<CMat> = rd.iter().zip(&at).map(|(r, a)| r - a).collect();
                let dx: Vec<CMat> = (0..sp.dims.len())
                    .map(|k| {
                        let mut v = &zinv[k] * c(sigma * mu) - &it.x[k] - &it.x[k] * &dzd[k] * &zinv[k];
                        if let Some(cw) = corr {
                            v -= &cw[k];
                        }
                        herm(&v)
                    })
                    .collect();
                (dx, dzd)
            };
            let (mut dx, mut dzd) = build(&dlam);
            // iterative refinement against the exact operator; the reduced
            // system loses accuracy as X and Z approach the boundary
            for _ in 0..REFINE_STEPS {
                let r1 = &rp - sp.apply(&dx) - &sp.bmat * &dz;
                let r2 = &rf - sp.bmat.transpose() * &dlam;
                if r1.norm() + r2.norm() <= 1e-15 * bnorm {
                    break;
                }
                full.rows_mut(0, m).copy_from(&r1);
                full.rows_mut(m, nf).copy_from(&r2);
                let delta = lu.solve(&full)?;
                dlam += delta.rows(0, m);
                dz += delta.rows(m, nf);
                (dx, dzd) = build(&dlam);
            }
            Some((dlam, dz, dx, dzd))
        };
        let steps = |dx: &[CMat], dzd: &[CMat]| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..sp.dims.len() {
                ap = ap.min(max_step(&it.x[k], &dx[k])?);
                ad = ad.min(max_step(&it.zd[k], &dzd[k])?);
            }
            Some((ap, ad))
        };

        let Some((_, _, dxa, dza)) = direction(0.0, None) else { return (Stop::Stalled, iter) };
        let Some((apa, ada)) = steps(&dxa, &dza) else { return (Stop::Stalled, iter) };
        let (apa, ada) = (apa.min(1.0), ada.min(1.0));
        let xa: Vec<CMat> = it.x.iter().zip(&dxa).map(|(x, d)| x + d * c(apa)).collect();
        let za: Vec<CMat> = it.zd.iter().zip(&dza).map(|(z, d)| z + d * c(ada)).collect();
        let mu_aff = inner(&xa, &za) / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr: Vec<CMat> = (0..sp.dims.len()).map(|k| &dxa[k] * &dza[k] * &zinv[k]).collect();

        let Some((dlam, dz, dx, dzd)) = direction(sigma, Some(&corr)) else { return (Stop::Stalled, iter) };
        let Some((ap, ad)) = steps(&dx, &dzd) else { return (Stop::Stalled, iter) };
        let tau = if mu < 1e-6 { 0.98 } else { 0.95 };
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            return (Stop::Stalled, iter);
        }
        for k in 0..sp.dims.len() {
            it.x[k] = herm(&(&it.x[k] + &dx[k] * c(ap)));
            it.zd[k] = herm(&(&it.zd[k] + &dzd[k] * c(ad)));
        }
        it.z_free += dz * ap;
        it.lam += dlam * ad;
    }
    (Stop::Stalled, opts.iter_cap)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    inst: &SdpInstance,
    nz: &Normalized,
    proj: &Projector,
    mut x: Vec<CMat>,
    mut y: DVector<f64>,
    opts: &SolveOptions,
    iterations: usize,
    bound: Option<f64>,
) -> Result<SdpOutcome> {
    // a second correction pass cleans up rounding from the first
    if inst.residual(&x, y.as_slice()) > opts.tol / 10.0 {
        proj.correct(nz, &mut x, &mut y);
    }
    let mut residual = inst.residual(&x, y.as_slice());
    let mut margin = min_margin(&x);
    // near misses: alternate between the PSD cone and the affine subspace
    let mut rounds = 0;
    while (residual > opts.tol || margin < -opts.tol) && margin > -POLISH_RANGE && rounds < POLISH_ROUNDS {
        for b in &mut x {
            *b = super::nearest_psd(b);
        }
        proj.correct(nz, &mut x, &mut y);
        residual = inst.residual(&x, y.as_slice());
        margin = min_margin(&x);
        rounds += 1;
    }
    let margin = if margin.is_finite() { margin } else { 0.0 };
    if residual <= opts.tol && margin >= -opts.tol {
        return Ok(SdpOutcome::Feasible(Solution { blocks: x, free: y.iter().cloned().collect(), margin, residual, iterations }));
    }
    match bound {
        Some(b) if b < -opts.tol => Ok(SdpOutcome::Infeasible { margin_bound: Some(b), iterations }),
        _ => Err(Error::SolverStalled { iterations }),
    }
}
