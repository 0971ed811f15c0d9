//! Certify a rational expression through its Archimedean lift and assemble
//! the certificate back in terms of the original inverses.

use ncert::rexpr::parse;
use ncert::sos::{certify_rational_assembled, CertifyOptions};

fn main() -> ncert::Result<()> {
    let ps = vec![parse("1 - x1^2")?.to_matpoly()?];
    let q = parse("(2 - x1)^-1")?;
    let (out, rational) = certify_rational_assembled(&q, &ps, &CertifyOptions::default())?;
    println!("lifted target {}", out.certificate.target);
    println!("certified at delta {} with D = {:?}, residual {:.1e}", out.certificate.delta, out.d, out.certificate.residual);
    for w in &out.warnings {
        println!("warning: {w}");
    }
    println!(
        "rational certificate: {} squares, {} weighted terms, {} relation terms dropped",
        rational.sos.len(),
        rational.weighted.len(),
        rational.dropped_relations
    );
    for (j, _, cap) in &rational.caps {
        println!("  cap for u{}: {} certified with residual {:.1e}", j + 1, cap.target, cap.residual);
    }
    println!("max relative deviation over {} samples: {:.1e}", rational.samples, rational.residual);
    Ok(())
}
