//! Parse expressions, print their canonical form and take adjoints.

use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    for text in ["x1*(2 - x1)^-1*x1", "((1 + x2)^-1)^* + u1* * x1", "[[7*i, 1000*x1*x2*x1 - x2^2], [x1^2 + x1*x2, 0]]"] {
        let e = parse(text)?;
        println!("input     {text}");
        println!("canonical {e}");
        println!("adjoint   {}", e.adjoint());
        if let Ok(p) = e.to_matpoly() {
            println!("expanded  {p}");
        }
        println!();
    }
    // inverting the literal zero is rejected at parse time
    println!("0^-1 -> {}", parse("0^-1").unwrap_err());
    Ok(())
}
