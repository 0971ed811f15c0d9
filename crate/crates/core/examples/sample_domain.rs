//! Sample points of a polynomial domain and of a pencil spectrahedron.

use ncert::evalnum::{in_domain, sample_domain, DomainSpec};
use ncert::freealg::LinearPencil;
use ncert::linalg;
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    // the noncommutative unit ball; sampling needs an explicit cap C - x_i^2
    // for every variable, so the coordinate caps are listed alongside
    let ball = DomainSpec::poly_list(
        ["1 - x1^2 - x2^2", "1 - x1^2", "1 - x2^2"].iter().map(|s| parse(s)?.to_matpoly()).collect::<ncert::Result<_>>()?,
    )?;
    let pencil = DomainSpec::pencil(LinearPencil::interval());
    for (name, dom) in [("ball", &ball), ("pencil interval", &pencil)] {
        for x in sample_domain(dom, 2, 3, 0)? {
            let report = in_domain(dom, &x)?;
            let norms: Vec<f64> = x.xs().iter().map(linalg::spectral_norm).collect();
            println!("{name}: |X_i| = {norms:.3?}, margin {:.3}", report.margin);
        }
    }
    Ok(())
}
