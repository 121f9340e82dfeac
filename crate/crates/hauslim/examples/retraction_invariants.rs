//! Run the piecewise-linear retraction machinery through its identity
//! suite on the bundled complexes: idempotence, constancy along
//! retraction segments, factorization through lower fibers, the explicit
//! homeomorphism inverse, displacement bounds, lift round-trips, and the
//! scatter inclusions with their margin.
//!
//! ```bash
//! cargo run --example retraction_invariants
//! ```

use hauslim::fixtures::demo_complexes;
use hauslim::pipeline::{retract_demo, RetractDemoOptions};

fn main() -> hauslim::Result<()> {
    let opts = RetractDemoOptions::default();
    for (name, complex) in demo_complexes() {
        let report = retract_demo(name, &complex, &opts)?;
        println!(
            "== {name}: {} vertices, {} simplices, threshold level {}",
            report.vertices, report.simplices, report.threshold_level
        );
        for inv in &report.invariants {
            println!(
                "   {:38} samples {:>6}  worst {:>10.2e}  [{}]",
                inv.name,
                inv.samples,
                inv.worst_residual,
                if inv.pass { "pass" } else { "FAIL" }
            );
        }
        for line in &report.fibered_products {
            println!(
                "   fibered product at level {:.3}, eps {:>8.4}: {} of {} tuples within margin {:.4}",
                line.lambda, line.epsilon, line.tuples_within_margin, line.tuples, line.margin
            );
        }
        println!("   all pass: {}\n", report.all_pass);
    }
    Ok(())
}
