//! Points of the variety cut out by the relations, with vectors in the common
//! kernel, on the pencil interval.

use ncert::evalnum::{eval_expr, eval_poly, sample_zr, ExtendedPoint, DEFAULT_COND_CAP};
use ncert::freealg::LinearPencil;
use ncert::lift::{build_hat, build_mr, closure_cr};
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    let r = parse("(3 - x1)^-1")?;
    let mr = build_mr(&closure_cr(&r)?)?;
    let lift = build_hat(&r)?;
    for s in sample_zr(&mr, &LinearPencil::interval(), &lift.g_list, 1, 2, 4, 0)? {
        let mv = eval_poly(&mr[0], &s.point)? * &s.v;
        let rt = eval_poly(&lift.hat_q, &s.point)? * &s.v;
        let rx = eval_expr(&r, &ExtendedPoint::from(s.point.base().clone()), DEFAULT_COND_CAP)? * &s.v;
        println!("{:?}: |m v| = {:.1e}, |r~ v - r v| = {:.1e}", s.family, mv.norm(), (rt - rx).norm());
    }
    Ok(())
}
