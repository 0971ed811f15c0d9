//! Positivstellensatz certificates for polynomials on Archimedean domains.

use ncert::rexpr::parse;
use ncert::sos::{certify_polynomial, CertifyOptions};
use ncert::Error;

fn main() -> ncert::Result<()> {
    let interval = vec![parse("1 - x1^2")?.to_matpoly()?];
    let square = vec![parse("1 - x1^2")?.to_matpoly()?, parse("1 - x2^2")?.to_matpoly()?];
    let cases = [
        ("2 - x1^2", &interval),
        ("[[2, x1], [x1, 2]]", &interval),
        ("5 - x1^2 - x2^2 + x1*x2 + x2*x1", &square),
        ("x1", &interval),
    ];
    for (text, ps) in cases {
        let q = parse(text)?.to_matpoly()?;
        match certify_polynomial(&q, ps, &CertifyOptions::default()) {
            Ok(c) => println!("{text}: certified at delta {} ({} squares, residual {:.1e})", c.delta, c.sos.len(), c.residual),
            Err(Error::NotCertified { margins, .. }) => println!("{text}: not certified, margins {margins:?}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
