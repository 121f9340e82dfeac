//! Sample fibers of a one-parameter family on a grid and watch them
//! converge in Hausdorff distance as the parameter shrinks.
//!
//! ```bash
//! cargo run --example fiber_sampling
//! ```

use hauslim::fixtures::circle_family;
use hauslim::formula::parse_formula;
use hauslim::geometry::{bounding_radius, hausdorff_distance, sample_fiber};

fn main() -> hauslim::Result<()> {
    let family = circle_family();
    let f = parse_formula(&family.formula)?;
    let box_: Vec<(f64, f64)> = family.sample_box.iter().map(|b| (b[0], b[1])).collect();
    let resolution = 241;
    let spacing = box_
        .iter()
        .map(|(lo, hi)| (hi - lo) / (resolution - 1) as f64)
        .fold(0.0f64, f64::max);
    let tol = 2.0 * spacing;

    println!("family: {}", family.formula);
    println!("grid {resolution} per axis, equality thickened by {tol:.4}\n");

    let limit = sample_fiber(&f, 1e-4, &box_, resolution, tol)?;
    println!("{:>8} {:>8} {:>12} {:>10}", "lambda", "points", "d_H(to limit)", "radius");
    for lambda in [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625] {
        let fiber = sample_fiber(&f, lambda, &box_, resolution, tol)?;
        let d = hausdorff_distance(&fiber, &limit)?;
        println!(
            "{lambda:>8} {:>8} {:>12.5} {:>10.5}",
            fiber.len(),
            d,
            bounding_radius(&fiber)?
        );
    }
    println!("\nthe distance column shrinks with lambda: the fibers converge");
    Ok(())
}
