//! Canonical text form of polynomials.
//!
//! Terms are printed in graded-lex order as `coef*word`; the output is valid
//! input for the expression parser, so `parse(p.to_string())` expands back to
//! `p` exactly.

use std::fmt;

use crate::linalg::{format_real, C64};

use super::poly::{MatPoly, NcPoly};
use super::word::Word;

/// A complex coefficient as a single parser factor.
pub(crate) fn format_coefficient(z: C64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.re == 0.0 {
        format!("({}*i)", format_real(z.im))
    } else if z.im < 0.0 {
        format!("({} - {}*i)", format_real(z.re), format_real(-z.im))
    } else {
        format!("({} + {}*i)", format_real(z.re), format_real(z.im))
    }
}

fn format_terms<'a>(terms: impl Iterator<Item = (&'a Word, C64)>) -> String {
    let mut out = String::new();
    for (k, (w, z)) in terms.enumerate() {
        let negative = z.im == 0.0 && z.re < 0.0;
        let mag = if negative { -z } else { z };
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if w.is_empty() {
            out.push_str(&format_coefficient(mag));
        } else if mag == C64::new(1.0, 0.0) {
            out.push_str(&w.to_string());
        } else {
            out.push_str(&format_coefficient(mag));
            out.push('*');
            out.push_str(&w.to_string());
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shape() == (1, 1) {
            return write!(f, "{}", format_terms(self.terms().map(|(w, m)| (w, m[(0, 0)]))));
        }
        write!(f, "[")?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let entry = self.entry(i, j);
                write!(f, "{}", format_terms(entry.terms().map(|(w, m)| (w, m[(0, 0)]))))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_mat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn graded_lex_text() {
        let x1 = MatPoly::x(1);
        let x2 = MatPoly::x(2);
        let p = &(&(&x2 * &x2).scale(c(-1.0)) + &(&(&x1 * &x2) * &x1).scale(c(1000.0)))
            + &MatPoly::real(2.0);
        assert_eq!(p.to_string(), "2 - x2*x2 + 1000*x1*x2*x1");
    }

    #[test]
    fn complex_and_starred() {
        let p = &MatPoly::scalar(C64::new(0.0, 7.0)) + &(&MatPoly::u_star(1) * &MatPoly::x(1));
        assert_eq!(p.to_string(), "(7*i) + u1* * x1");
    }

    #[test]
    fn zero_and_matrix() {
        assert_eq!(MatPoly::zero(1, 1).to_string(), "0");
        assert_eq!(MatPoly::identity(2).to_string(), "[[1, 0], [0, 1]]");
    }
}
