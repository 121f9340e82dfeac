//! Evaluate the effective Betti-number bound formulas in exact integer
//! arithmetic. Unspecified constants are substituted explicitly and
//! recorded in the output.
//!
//! ```bash
//! cargo run --example bound_calculators
//! ```

use hauslim::bounds::*;
use hauslim::formula::AlgFormat;

fn main() -> hauslim::Result<()> {
    println!("root-count bounds");
    println!("  chain bound (l=2, a=1, betas=[2])   = {}", khovanskii_bound(2, 1, &[2])?.value);
    println!("  monomial-count bound (n=2, l=2)     = {}", fewnomial_bound(2, 2).value);
    println!(
        "  general-domain bound (1,1,1,1, c=1) = {}",
        khovanskii_domain_bound(1, 1, 1, 1, 1).value
    );

    println!("\ntotal-Betti bounds for sign-condition sets, format (n=2, d=3, s=4)");
    println!("  closed formulas     (c s d)^n   = {}", basu_bound(2, 3, 4, 1).value);
    println!("  arbitrary formulas  (c s^2 d)^n = {}", gv_bound(2, 3, 4, 1).value);

    let pf = PfaffFormat { n: 2, ell: 1, alpha: 1, beta: 2, s: 3 };
    println!("\nthe same pair for a chain-defined format {pf:?}");
    println!("  closed    = {}", pclosed_pfaffian_bound(pf, 1).value);
    println!("  arbitrary = {}", qf_pfaffian_bound(pf, 1).value);

    println!("\nlimit bounds");
    for k in 0..=3u64 {
        let open = hausdorff_limit_bound_alg(k, 2, 3, 4, 1, false);
        let closed = hausdorff_limit_bound_alg(k, 2, 3, 4, 1, true);
        println!("  k={k}: polynomial family (2,3,4): {} (closed: {})", open.value, closed.value);
    }
    let rc = relative_closure_bound(2, pf, 1, false);
    println!("  k=2 chain-defined family {pf:?}: {}", rc.value);

    println!("\nformat arithmetic for diagonal formulas");
    let f = AlgFormat { n: 2, d: 3, s: 4 };
    for p in 0..=2u64 {
        println!("  {f:?} at order {p} -> {:?}", diagonal_format_alg(f, p));
    }
    for p in 0..=2u64 {
        println!("  {pf:?} at order {p} -> {:?}", diagonal_format_pfaff(pf, p));
    }
    Ok(())
}
