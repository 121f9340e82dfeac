//! End-to-end verification of the limit inequality on the circle family
//! `x1^2 + x2^2 = (1 + l)^2`: the Betti numbers of the sampled limit are
//! bounded by sums of Betti numbers of expanded diagonals of one fiber.
//!
//! ```bash
//! cargo run --example limit_inequality_circle
//! ```

use hauslim::fixtures::circle_family;
use hauslim::pipeline::{summarize_inequalities, verify_limit, VerifyOptions};

fn main() -> hauslim::Result<()> {
    let family = circle_family();
    let opts = VerifyOptions { lambda_fiber: 0.25, k_max: 1, ..Default::default() };
    let report = verify_limit(&family, &opts)?;

    println!("family        : {}", report.formula);
    println!(
        "limit proxy   : {} points at l = {}, betti {:?} on radius plateau [{:.3}, {:.3}]",
        report.limit_proxy.points,
        report.lambda_limit,
        report.limit_proxy.betti,
        report.limit_proxy.radius_plateau.lo,
        report.limit_proxy.radius_plateau.hi
    );
    println!("convergence   : d_H between successive proxies {:.4}", report.convergence_indicator);
    for d in &report.diagonals {
        println!(
            "diagonal p={} : delta {:.4} ({}), {} tuples, betti {:?}",
            d.p, d.delta, d.delta_mode, d.tuples_total, d.betti
        );
    }
    println!();
    print!("{}", summarize_inequalities(&report));
    println!("\nall inequalities hold: {}", report.all_inequalities_hold);
    Ok(())
}
