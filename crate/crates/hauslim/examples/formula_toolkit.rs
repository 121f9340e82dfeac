//! Parse quantifier-free sign conditions, evaluate them with tolerance,
//! and build the tuple formula that carves out an expanded diagonal.
//!
//! ```bash
//! cargo run --example formula_toolkit
//! ```

use hauslim::bounds::diagonal_format_alg;
use hauslim::formula::{diagonal_formula, format_of, parse_formula};
use num_rational::BigRational;

fn main() -> hauslim::Result<()> {
    let circle = parse_formula("x1^2 + x2^2 - (1 + l)^2 = 0")?;
    println!("formula     : {circle}");
    println!("p-closed    : {}", circle.is_p_closed());
    println!("format      : {:?}", format_of(&circle));

    for (x, lambda) in [([1.0, 0.0], 0.0), ([1.25, 0.0], 0.25), ([1.1, 0.0], 0.0)] {
        println!(
            "holds at x={x:?}, l={lambda}: {}",
            circle.evaluate(&x, lambda, 1e-9)?
        );
    }

    // The diagonal formula conjoins one copy per block of variables with
    // a scatter atom; its format follows the (n(p+1), max(2,d), s(p+1)+1)
    // rule realized by the bounds module.
    let delta = BigRational::new(1.into(), 10.into());
    for p in 0..=2 {
        let diag = diagonal_formula(&circle, p, &delta);
        println!(
            "p = {p}: measured format {:?}, rule {:?}",
            format_of(&diag),
            diagonal_format_alg(format_of(&circle), p as u64),
        );
        if p == 1 {
            println!("  tuple formula: {diag}");
        }
    }

    // Negations and strict atoms break the closed flag.
    let open = parse_formula("!(x1 >= 0) || x2 > 0")?;
    println!("open formula: {open}  (p-closed: {})", open.is_p_closed());
    Ok(())
}
