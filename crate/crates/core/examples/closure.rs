//! The closure of an expression under the rewriting rules and the relations
//! that annihilate its inverse letters.

use ncert::lift::{build_mr, closure_cr};
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    for text in ["x1^-1", "(3 - x1)^-1", "x2*(1 + x1*(2 - x2)^-1*x1)^-1"] {
        let set = closure_cr(&parse(text)?)?;
        println!("{text}");
        for (e, t) in set.cr.iter().zip(&set.ctilde) {
            println!("  {e:<40} ~ {t}");
        }
        for m in build_mr(&set)? {
            println!("  relation {m}");
        }
    }
    Ok(())
}
