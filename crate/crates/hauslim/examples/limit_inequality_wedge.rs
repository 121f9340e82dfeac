//! The limit inequality on a family whose limit changes topology: two
//! unit circles drifting together until they touch. Fibers have two
//! components and two loops; the limit is a wedge with one component and
//! two loops. The inequality absorbs the component collapse through the
//! order-one diagonal.
//!
//! ```bash
//! cargo run --example limit_inequality_wedge
//! ```

use hauslim::fixtures::two_circle_family;
use hauslim::pipeline::{summarize_inequalities, verify_limit, VerifyOptions};

fn main() -> hauslim::Result<()> {
    let family = two_circle_family();
    let opts = VerifyOptions { lambda_fiber: 0.25, k_max: 1, ..Default::default() };
    let report = verify_limit(&family, &opts)?;

    println!("family      : {}", report.formula);
    println!("limit betti : {:?}  (one piece, two loops)", report.limit_proxy.betti);
    for d in &report.diagonals {
        println!("diagonal p={}: betti {:?}", d.p, d.betti);
    }
    println!();
    print!("{}", summarize_inequalities(&report));
    println!("\nall inequalities hold: {}", report.all_inequalities_hold);
    Ok(())
}
