//! Certificates on a monic pencil spectrahedron with the relation ideal.

use ncert::freealg::LinearPencil;
use ncert::rexpr::parse;
use ncert::sos::{certify_pencil_rational, CertifyOptions};

fn main() -> ncert::Result<()> {
    let l = LinearPencil::interval();
    println!("L(x) = {}", l.to_matpoly());
    let r = parse("(3 - x1)^-1")?;
    let out = certify_pencil_rational(&r, &l, &CertifyOptions::default())?;
    println!("relations {:?}", out.mr.iter().map(|m| m.to_string()).collect::<Vec<_>>());
    println!(
        "certified at delta {}: residual {:.1e}, agreement {:.1e} over {} samples, ideal vanishing {:.1e}",
        out.certificate.delta, out.certificate.residual, out.agreement, out.samples, out.ideal_vanishing
    );
    println!("{} squares, {} pencil terms, {} ideal terms", out.certificate.sos.len(), out.certificate.weighted.len(), out.certificate.ideal.len());
    Ok(())
}
