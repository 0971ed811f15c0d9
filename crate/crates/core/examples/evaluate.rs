//! Evaluate a rational expression at a random point of a matrix domain.

use ncert::evalnum::{eval_expr, sample_domain, DomainSpec, ExtendedPoint, DEFAULT_COND_CAP};
use ncert::linalg;
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    let q = parse("(2 - x1)^-1 + x2*x1*x2")?;
    let dom = DomainSpec::poly_list(vec![parse("1 - x1^2")?.to_matpoly()?, parse("1 - x2^2")?.to_matpoly()?])?;
    for x in sample_domain(&dom, 3, 2, 0)? {
        let v = eval_expr(&q, &ExtendedPoint::from(x), DEFAULT_COND_CAP)?;
        println!("q(X) =\n{v:.4}");
        println!("eigenvalues of the Hermitian part: {:.4?}\n", linalg::hermitian_eigen(&linalg::hermitian_part(&v)).0.as_slice());
    }
    Ok(())
}
