//! Canonical text form. Every tree satisfying the constructor invariants
//! prints to a string that parses back to the same tree.

use crate::freealg::{format_coefficient, Letter};
use crate::linalg::format_real;

use super::{MatRatExpr, RatExpr};

pub fn print_expr(e: &RatExpr) -> String {
    match e {
        RatExpr::Sum(ts) => {
            let mut out = term(&ts[0], true);
            for t in &ts[1..] {
                match negated(t) {
                    Some(pos) => {
                        out.push_str(" - ");
                        out.push_str(&term(&pos, false));
                    }
                    None => {
                        out.push_str(" + ");
                        out.push_str(&term(t, false));
                    }
                }
            }
            out
        }
        other => term(other, true),
    }
}

pub fn print_matrix(m: &MatRatExpr) -> String {
    if m.shape() == (1, 1) {
        return print_expr(m.entry(0, 0));
    }
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let entries: Vec<String> = (0..m.cols()).map(|j| print_expr(m.entry(i, j))).collect();
            format!("[{}]", entries.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn is_negative_real(e: &RatExpr) -> bool {
    matches!(e, RatExpr::Scalar(z) if z.im == 0.0 && z.re < 0.0)
}

// The same term with its leading negative real scalar flipped, if it has one.
fn negated(t: &RatExpr) -> Option<RatExpr> {
    match t {
        RatExpr::Scalar(z) if is_negative_real(t) => Some(RatExpr::Scalar(-z)),
        RatExpr::Product(fs) if is_negative_real(&fs[0]) => {
            // `a - x` rather than `a - 1*x`; parsing negates back to `-1*x`
            if fs[0].as_scalar() == Some(crate::linalg::c(-1.0)) && !fs[1].is_scalar() {
                return Some(RatExpr::product(fs[1..].to_vec()));
            }
            let mut fs = fs.clone();
            if let RatExpr::Scalar(z) = fs[0] {
                fs[0] = RatExpr::Scalar(-z);
            }
            Some(RatExpr::Product(fs))
        }
        _ => None,
    }
}

// `leading` allows a bare negative real scalar at the front.
fn term(e: &RatExpr, leading: bool) -> String {
    match e {
        RatExpr::Product(fs) => {
            let mut out = String::new();
            for (k, f) in fs.iter().enumerate() {
                if k > 0 {
                    let after_star = matches!(fs[k - 1], RatExpr::Letter(Letter::UStar(_)) | RatExpr::Adjoint(_));
                    out.push_str(if after_star { " * " } else { "*" });
                }
                out.push_str(&factor(f, leading && k == 0));
            }
            out
        }
        RatExpr::Sum(_) => format!("({})", print_expr(e)),
        other => factor(other, leading),
    }
}

fn factor(e: &RatExpr, leading: bool) -> String {
    match e {
        RatExpr::Scalar(z) => {
            if z.im != 0.0 {
                format_coefficient(*z)
            } else if z.re < 0.0 && !leading {
                format!("({})", format_real(z.re))
            } else {
                format_real(z.re)
            }
        }
        RatExpr::Letter(l) => l.to_string(),
        RatExpr::Sum(_) | RatExpr::Product(_) => format!("({})", print_expr(e)),
        RatExpr::Inverse(a) => format!("{}^-1", operand(a)),
        RatExpr::Adjoint(a) => format!("{}^*", operand(a)),
    }
}

fn operand(e: &RatExpr) -> String {
    match e {
        RatExpr::Letter(Letter::X(_)) | RatExpr::Letter(Letter::U(_)) => e.to_string(),
        RatExpr::Scalar(z) if z.im == 0.0 && z.re >= 0.0 => format_real(z.re),
        RatExpr::Scalar(z) if z.im != 0.0 => format_coefficient(*z),
        _ => format!("({})", print_expr(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::linalg::C64;
    use proptest::prelude::*;

    #[test]
    fn simple_forms() {
        let x1 = RatExpr::x(1);
        assert_eq!(print_expr(&RatExpr::Inverse(Box::new(x1.clone()))), "x1^-1");
        let s = RatExpr::Sum(vec![x1, RatExpr::x(2)]);
        let e = RatExpr::Adjoint(Box::new(RatExpr::Inverse(Box::new(s))));
        assert_eq!(print_expr(&e), "((x1 + x2)^-1)^*");
    }

    #[test]
    fn signs_and_stars() {
        let e = RatExpr::Sum(vec![
            RatExpr::real(2.0),
            RatExpr::Product(vec![RatExpr::real(-1.0), RatExpr::x(1)]),
            RatExpr::Product(vec![RatExpr::Letter(Letter::UStar(1)), RatExpr::x(1), RatExpr::real(-3.0)]),
        ]);
        assert_eq!(print_expr(&e), "2 - x1 + u1* * x1*(-3)");
        let z = RatExpr::Scalar(C64::new(1.0, -2.0));
        assert_eq!(print_expr(&z), "(1 - 2*i)");
        let inv = RatExpr::Inverse(Box::new(RatExpr::Letter(Letter::UStar(2))));
        assert_eq!(print_expr(&inv), "(u2*)^-1");
    }

    #[test]
    fn matrix_form() {
        let m = parse("[[1, x1],[x1, 1]]").unwrap();
        assert_eq!(print_matrix(&m), "[[1, x1], [x1, 1]]");
    }

    fn scalar() -> impl Strategy<Value = RatExpr> {
        prop_oneof![
            (-6i32..7).prop_map(|k| RatExpr::real(k as f64 / 2.0)),
            ((-3i32..4), (-3i32..4)).prop_map(|(a, b)| RatExpr::Scalar(C64::new(a as f64, b as f64))),
        ]
    }

    fn letter() -> impl Strategy<Value = RatExpr> {
        prop_oneof![
            (1u32..4).prop_map(RatExpr::x),
            (1u32..3).prop_map(RatExpr::u),
            (1u32..3).prop_map(|j| RatExpr::Letter(Letter::UStar(j))),
        ]
    }

    fn tree() -> impl Strategy<Value = RatExpr> {
        let leaf = prop_oneof![scalar(), letter()];
        leaf.prop_recursive(6, 64, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(RatExpr::sum),
                prop::collection::vec(inner.clone(), 2..4).prop_map(RatExpr::product),
                inner.clone().prop_map(|e| RatExpr::inverse(e).unwrap_or_else(|_| RatExpr::x(1))),
                inner.prop_map(RatExpr::adjoint),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(e in tree()) {
            let text = print_expr(&e);
            let back = parse(&text).unwrap();
            prop_assert_eq!(back.entry(0, 0), &e, "text: {}", text);
        }
    }
}
