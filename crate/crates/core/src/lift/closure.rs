//! Closure of an expression under the splitting rules
//!
//! 1. `a·b ∈ C ⇒ b ∈ C` (every proper suffix, including the empty one `1`),
//! 2. `(a + b)·c ∈ C ⇒ a·c, b·c ∈ C`,
//! 3. `a + b ∈ C ⇒ a, b ∈ C`,
//! 4. `a^-1·b ∈ C ⇒ a·a^-1·b ∈ C`,
//!
//! and the relation polynomials `g_j u_j b - b` read off its `u` image.
//!
//! Elements are kept as flat factor lists: nested products are spliced,
//! nested sums are merged and factors equal to `1` dropped. Products and
//! sums are split at every position.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::freealg::MatPoly;
use crate::linalg::c;
use crate::rexpr::{inverse_subterms, MatRatExpr, RatExpr};

pub const CLOSURE_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureSet {
    /// Elements in discovery order.
    pub cr: Vec<RatExpr>,
    /// The same elements with `g_j^-1` replaced by `u_j`.
    pub ctilde: Vec<RatExpr>,
    /// `g_j` in `u` form, aligned with the letters.
    pub g_list: Vec<RatExpr>,
}

fn factors(e: &RatExpr) -> Vec<RatExpr> {
    let mut out = Vec::new();
    push_factors(e, &mut out);
    out
}

fn push_factors(e: &RatExpr, out: &mut Vec<RatExpr>) {
    match e {
        RatExpr::Product(fs) => fs.iter().for_each(|f| push_factors(f, out)),
        RatExpr::Scalar(z) if *z == c(1.0) => {}
        RatExpr::Sum(_) => out.push(flat_sum(e)),
        other => out.push(other.clone()),
    }
}

fn flat_sum(e: &RatExpr) -> RatExpr {
    fn go(e: &RatExpr, out: &mut Vec<RatExpr>) {
        match e {
            RatExpr::Sum(ts) => ts.iter().for_each(|t| go(t, out)),
            other => out.push(normal(other)),
        }
    }
    let mut ts = Vec::new();
    go(e, &mut ts);
    RatExpr::sum(ts)
}

fn normal(e: &RatExpr) -> RatExpr {
    RatExpr::product(factors(e))
}

/// Everything the four rules derive from one element in a single step.
pub fn apply_rules(e: &RatExpr) -> Vec<RatExpr> {
    let fs = factors(e);
    let mut out = Vec::new();
    for i in 1..=fs.len() {
        out.push(RatExpr::product(fs[i..].to_vec()));
    }
    match fs.first() {
        Some(RatExpr::Sum(ts)) => {
            for i in 1..ts.len() {
                for part in [&ts[..i], &ts[i..]] {
                    let mut v = factors(&RatExpr::sum(part.to_vec()));
                    v.extend_from_slice(&fs[1..]);
                    out.push(RatExpr::product(v));
                }
            }
        }
        Some(inv @ RatExpr::Inverse(a)) => {
            let mut v = factors(a);
            v.push(inv.clone());
            v.extend_from_slice(&fs[1..]);
            out.push(RatExpr::product(v));
        }
        _ => {}
    }
    out.into_iter().map(|x| normal(&x)).collect()
}

/// Least fixpoint of the rules containing every entry of `r`.
pub fn closure_cr(r: &MatRatExpr) -> Result<ClosureSet> {
    let lift = super::build_hat(r)?;
    let mut seen = HashSet::new();
    let mut cr = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for e in r.entries() {
        let e = normal(e);
        if seen.insert(e.to_string()) {
            queue.push_back(e.clone());
            cr.push(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        for next in apply_rules(&e) {
            if seen.insert(next.to_string()) {
                if cr.len() >= CLOSURE_LIMIT {
                    return Err(Error::ClosureOverflow { limit: CLOSURE_LIMIT });
                }
                queue.push_back(next.clone());
                cr.push(next);
            }
        }
    }
    let bindings = inverse_bindings(r);
    let ctilde = cr
        .iter()
        .map(|e| normal(&crate::rexpr::substitute(&MatRatExpr::scalar(e.clone()), &bindings).entry(0, 0).clone()))
        .collect();
    Ok(ClosureSet { cr, ctilde, g_list: lift.g_list })
}

fn inverse_bindings(r: &MatRatExpr) -> Vec<(RatExpr, RatExpr)> {
    inverse_subterms(r)
        .into_iter()
        .enumerate()
        .map(|(j, g)| (RatExpr::Inverse(Box::new(g)), RatExpr::u(j as u32 + 1)))
        .collect()
}

/// `g_j u_j b - b` for every element of the `u` image whose factors start
/// with those of `g_j` followed by `u_j`.
pub fn build_mr(set: &ClosureSet) -> Result<Vec<MatPoly>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (j, g) in set.g_list.iter().enumerate() {
        let head = factors(g);
        let u = RatExpr::u(j as u32 + 1);
        for e in &set.ctilde {
            let fs = factors(e);
            if fs.len() <= head.len() || fs[..head.len()] != head[..] || fs[head.len()] != u {
                continue;
            }
            let b = RatExpr::product(fs[head.len() + 1..].to_vec());
            let m = RatExpr::product(fs.clone()).to_poly()?.sub(&b.to_poly()?)?;
            if !m.is_zero() && seen.insert(m.to_string()) {
                out.push(m);
            }
        }
    }
    Ok(out)
}
