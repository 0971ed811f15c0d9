use super::{MatRatExpr, RatExpr};

/// The adjoint with every `Adjoint` node pushed to the leaves.
///
/// Scalars are conjugated, `x` letters are fixed, `u_j` and `u_j*` swap,
/// products reverse (scalar factors are then moved to the front) and
/// inverses commute with the adjoint.
pub fn adjoint_expr(e: &RatExpr) -> RatExpr {
    match e {
        RatExpr::Scalar(z) => RatExpr::Scalar(z.conj()),
        RatExpr::Letter(l) => RatExpr::Letter(l.adjoint()),
        RatExpr::Sum(ts) => RatExpr::sum(ts.iter().map(adjoint_expr).collect()),
        RatExpr::Product(fs) => RatExpr::product(scalars_first(fs.iter().rev().map(adjoint_expr).collect())),
        RatExpr::Inverse(a) => RatExpr::Inverse(Box::new(adjoint_expr(a))),
        RatExpr::Adjoint(a) => push_adjoints(a),
    }
}

/// Remove all `Adjoint` nodes.
pub fn push_adjoints(e: &RatExpr) -> RatExpr {
    match e {
        RatExpr::Adjoint(a) => adjoint_expr(a),
        RatExpr::Sum(ts) => RatExpr::sum(ts.iter().map(push_adjoints).collect()),
        RatExpr::Product(fs) => RatExpr::product(fs.iter().map(push_adjoints).collect()),
        RatExpr::Inverse(a) => RatExpr::Inverse(Box::new(push_adjoints(a))),
        leaf => leaf.clone(),
    }
}

/// Adjoints pushed down and scalar factors moved to the front of every
/// product. Two expressions that differ only in those respects normalize to
/// the same tree.
pub fn normalize(e: &RatExpr) -> RatExpr {
    fn go(e: &RatExpr) -> RatExpr {
        match e {
            RatExpr::Sum(ts) => RatExpr::sum(ts.iter().map(go).collect()),
            RatExpr::Product(fs) => RatExpr::product(scalars_first(fs.iter().map(go).collect())),
            RatExpr::Inverse(a) => RatExpr::Inverse(Box::new(go(a))),
            RatExpr::Adjoint(a) => go(&adjoint_expr(a)),
            leaf => leaf.clone(),
        }
    }
    go(&push_adjoints(e))
}

fn scalars_first(fs: Vec<RatExpr>) -> Vec<RatExpr> {
    let (mut s, rest): (Vec<_>, Vec<_>) = fs.into_iter().partition(RatExpr::is_scalar);
    s.extend(rest);
    s
}

/// Distinct arguments of `Inverse` nodes, innermost first.
pub fn inverse_subterms(e: &MatRatExpr) -> Vec<RatExpr> {
    let mut out = Vec::new();
    for entry in e.entries() {
        collect_inverses(entry, &mut out);
    }
    out
}

fn collect_inverses(e: &RatExpr, out: &mut Vec<RatExpr>) {
    for ch in e.children() {
        collect_inverses(ch, out);
    }
    if let RatExpr::Inverse(a) = e {
        if !out.contains(a) {
            out.push(a.as_ref().clone());
        }
    }
}

/// Number of distinct inverse subterms.
pub fn inversion_count(e: &MatRatExpr) -> usize {
    inverse_subterms(e).len()
}

/// Simultaneous replacement of subtrees.
///
/// A node equal to a key is replaced outright. Otherwise its children are
/// rewritten first and the rebuilt node is tried against the keys again, so
/// bindings whose keys mention other keys' replacements also fire.
pub fn substitute(e: &MatRatExpr, bindings: &[(RatExpr, RatExpr)]) -> MatRatExpr {
    e.map(|x| substitute_expr(x, bindings))
}

pub(crate) fn substitute_expr(e: &RatExpr, bindings: &[(RatExpr, RatExpr)]) -> RatExpr {
    let lookup = |x: &RatExpr| bindings.iter().find(|(k, _)| k == x).map(|(_, v)| v.clone());
    if let Some(v) = lookup(e) {
        return v;
    }
    let rebuilt = match e {
        RatExpr::Sum(ts) => RatExpr::sum(ts.iter().map(|t| substitute_expr(t, bindings)).collect()),
        RatExpr::Product(fs) => RatExpr::product(fs.iter().map(|f| substitute_expr(f, bindings)).collect()),
        RatExpr::Inverse(a) => RatExpr::Inverse(Box::new(substitute_expr(a, bindings))),
        RatExpr::Adjoint(a) => RatExpr::Adjoint(Box::new(substitute_expr(a, bindings))),
        leaf => return leaf.clone(),
    };
    lookup(&rebuilt).unwrap_or(rebuilt)
}
