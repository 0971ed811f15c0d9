//! Build the Gram problem for a polynomial, solve it and read off the
//! sum-of-squares decomposition.

use ncert::rexpr::parse;
use ncert::sdp::SdpOutcome;
use ncert::sos::{build_gram_problem, extract_certificate, solve_gram};

fn main() -> ncert::Result<()> {
    let q = parse("2 - x1^2")?.to_matpoly()?;
    let gens = vec![parse("1 - x1^2")?.to_matpoly()?];
    let p = build_gram_problem(&q, &gens, &[], 1)?;
    println!("blocks {:?}, {} equations", p.instance.block_dims, p.instance.rows.len());
    match solve_gram(&p, 1e-8)? {
        SdpOutcome::Feasible(sol) => {
            println!("margin {:.4}, residual {:.1e}, {} iterations", sol.margin, sol.residual, sol.iterations);
            let c = extract_certificate(&p, &sol)?;
            for s in &c.sos {
                println!("  s = {s}");
            }
            for (k, r) in &c.weighted {
                println!("  r* ({}) r with r = {r}", gens[*k]);
            }
            println!("expansion {}", c.expand()?);
        }
        SdpOutcome::Infeasible { .. } => println!("infeasible"),
    }
    Ok(())
}
