//! Track Betti numbers of a point cloud across the Rips radius and pick a
//! stable plateau. The curve prints in the CSV plot-data format.
//!
//! ```bash
//! cargo run --example betti_plateau
//! ```

use hauslim::fixtures::circle_points;
use hauslim::homology::{betti_curve, default_scale_grid, stable_plateau};
use hauslim::io::write_betti_curve_csv;

fn main() -> hauslim::Result<()> {
    let cloud = circle_points(64);
    let grid = default_scale_grid(&cloud, 24)?;
    let curve = betti_curve(&cloud, &grid, 1)?;

    let mut stdout = std::io::stdout();
    write_betti_curve_csv(&mut stdout, &curve)?;

    let plateau = stable_plateau(&curve, 0.1)?;
    println!(
        "\nwidest stable plateau: radius in [{:.4}, {:.4}], betti {}",
        plateau.lo, plateau.hi, plateau.betti
    );
    println!("a 64-point circle shows one component and one loop there");
    Ok(())
}
