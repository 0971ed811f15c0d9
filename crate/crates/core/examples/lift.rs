//! Replace inverses by fresh letters and build the Archimedean lift.

use ncert::evalnum::{sample_domain, DomainSpec};
use ncert::lift::{build_hat, build_o, estimate_d, probe_points};
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    let ps = vec![parse("1 - x1^2")?.to_matpoly()?];
    let dom = DomainSpec::poly_list(ps.clone())?;
    let q = parse("x1*(2 - x1)^-1*x1")?;
    let lift = build_hat(&q)?;
    println!("hat q = {}", lift.hat_q);
    for (j, g) in lift.g_list.iter().enumerate() {
        println!("u{} stands for ({g})^-1", j + 1);
    }
    let probes = probe_points(&dom, 1, 3, 20, 0)?;
    let d: Vec<f64> = (0..lift.u_arity).map(|j| estimate_d(&lift, j, &probes, 4.0).map(|e| e.d)).collect::<ncert::Result<_>>()?;
    println!("norm caps D = {d:?}");
    let o = build_o(&ps, &lift, &d)?;
    for (tag, p) in &o.elements {
        println!("  {:<16} {p}", tag.label());
    }
    // hat q at (X, g(X)^-1) reproduces q(X)
    let x = &sample_domain(&dom, 3, 1, 5)?[0];
    let point = ncert::evalnum::ExtendedPoint::new(x.clone(), lift.u_values(x)?)?;
    let lifted = ncert::evalnum::eval_poly(&lift.hat_q, &point)?;
    let direct = ncert::evalnum::eval_expr(&q, &x.clone().into(), ncert::evalnum::DEFAULT_COND_CAP)?;
    println!("max |hat q - q| at a 3x3 point: {:.1e}", ncert::linalg::max_abs(&(lifted - direct)));
    Ok(())
}
