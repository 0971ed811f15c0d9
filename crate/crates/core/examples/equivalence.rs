//! Randomized identity testing: evaluate both sides at random matrix points.

use ncert::evalnum::{test_equivalence, Verdict};
use ncert::rexpr::parse;

fn main() -> ncert::Result<()> {
    let pairs = [
        ("x1*x1^-1", "1"),
        ("(x1*x2)^-1", "x2^-1*x1^-1"),
        ("x1*(1 - x2*x1)^-1", "(1 - x1*x2)^-1*x1"),
        ("x1*x2", "x2*x1"),
    ];
    for (a, b) in pairs {
        let r = test_equivalence(&parse(a)?, &parse(b)?, &[1, 2, 3, 4], 20, 1e-8, 0)?;
        match &r.verdict {
            Verdict::EquivalentSoFar => println!("{a}  vs  {b}: equivalent so far"),
            Verdict::Distinguished { witness, deviation } => {
                println!("{a}  vs  {b}: distinguished at n = {} (deviation {deviation:.3})", witness.n())
            }
        }
        for s in &r.per_size {
            println!("  n = {}: {}/{} evaluated, {} distinguishing, max deviation {:.1e}", s.n, s.evaluated, s.trials, s.distinguishing, s.max_deviation);
        }
    }
    Ok(())
}
