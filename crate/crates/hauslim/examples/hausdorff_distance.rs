//! The Hausdorff distance in the sum convention: both directed max-min
//! terms added. Small values mean the clouds nearly coincide as sets.
//!
//! ```bash
//! cargo run --example hausdorff_distance
//! ```

use hauslim::fixtures::circle_points;
use hauslim::geometry::{hausdorff_distance, PointCloud};

fn main() -> hauslim::Result<()> {
    let a = PointCloud::new(1, vec![vec![0.0]])?;
    let b = PointCloud::new(1, vec![vec![0.0], vec![1.0]])?;
    println!("d({{0}}, {{0,1}})          = {}", hausdorff_distance(&a, &b)?);

    let c = PointCloud::new(1, vec![vec![0.0], vec![2.0]])?;
    let d = PointCloud::new(1, vec![vec![1.0]])?;
    println!("d({{0,2}}, {{1}})          = {}", hausdorff_distance(&c, &d)?);

    // denser circle samples approximate the same set: the distance decays
    println!("\ncircle samples against a dense reference:");
    let reference = circle_points(4096);
    for n in [8, 16, 32, 64, 128, 256] {
        let sample = circle_points(n);
        println!(
            "  {n:>4} points: d = {:.6}",
            hausdorff_distance(&sample, &reference)?
        );
    }
    Ok(())
}
