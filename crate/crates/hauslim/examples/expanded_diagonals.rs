//! Build expanded diagonals of a sampled fiber: all ordered tuples whose
//! scatter (sum of squared pairwise distances) stays under a threshold.
//!
//! ```bash
//! cargo run --example expanded_diagonals
//! ```

use hauslim::fixtures::circle_points;
use hauslim::geometry::{bounding_radius, expanded_diagonal, tuple_scatter};

fn main() -> hauslim::Result<()> {
    let cloud = circle_points(48);
    let radius = bounding_radius(&cloud)?;
    println!("base cloud: {} points on the unit circle (radius {radius})\n", cloud.len());

    println!("{:>10} {:>3} {:>10} {:>10} {:>12}", "delta", "p", "matches", "kept", "subsampled");
    for p in [1usize, 2] {
        // at the scatter range the diagonal is the full Cartesian power
        let full = (p * (p + 1)) as f64 / 2.0 * (2.0 * radius) * (2.0 * radius);
        for delta in [0.01, 0.1, 1.0, full] {
            let d = expanded_diagonal(&cloud, p, delta, 20_000, 0);
            println!(
                "{delta:>10.3} {p:>3} {:>10} {:>10} {:>12}",
                d.total_matches,
                d.len(),
                d.subsampled
            );
        }
    }

    // scatter on a few explicit tuples
    let a = [0.0, 0.0];
    let b = [3.0, 4.0];
    let c = [1.0, 0.0];
    println!("\nscatter((0,0),(3,4))         = {}", tuple_scatter(&[&a, &b])?);
    println!("scatter((0,0),(1,0),(0,0))   = {}", tuple_scatter(&[&a, &c, &a])?);
    Ok(())
}
