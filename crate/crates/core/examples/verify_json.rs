//! Serialize a certificate, read it back and check it independently.

use ncert::rexpr::parse;
use ncert::sos::{certify_polynomial, verify_certificate, Certificate, CertificateJson, CertifyOptions};

fn main() -> ncert::Result<()> {
    let ps = vec![parse("1 - x1^2")?.to_matpoly()?];
    let c = certify_polynomial(&parse("3 + x1 - x1^2")?.to_matpoly()?, &ps, &CertifyOptions::default())?;
    let text = serde_json::to_string_pretty(&c.to_json())?;
    println!("{text}");

    let back: CertificateJson = serde_json::from_str(&text)?;
    let back = Certificate::from_json(&back)?;
    let res = verify_certificate(&back.target, &back, &ps, &back.ideal_gens)?;
    println!("verified against the given domain: residual {res:.1e}");

    // the same certificate does not prove a different target
    let other = parse("4 + x1 - x1^2")?.to_matpoly()?;
    println!("against 4 + x1 - x1^2: residual {:.1e}", verify_certificate(&other, &back, &ps, &back.ideal_gens)?);
    Ok(())
}
