//! Built-in families, clouds, and complexes used by the examples, the
//! invariant demos, and the test suites.

use crate::geometry::PointCloud;
use crate::io::FamilyFile;
use crate::simplicial::{LambdaComplex, Vertex};

/// Circle of radius `1 + l` around the origin; the limit is the unit circle.
pub fn circle_family() -> FamilyFile {
    FamilyFile {
        formula: "x1^2 + x2^2 - (1 + l)^2 = 0".into(),
        sample_box: vec![[-2.0, 2.0], [-2.0, 2.0]],
        lambda_range: [0.0, 1.0],
    }
}

/// Two unit circles centered at `(±(1 + l), 0)`: disjoint for `l > 0`,
/// tangent at the origin in the limit (a wedge of two circles).
pub fn two_circle_family() -> FamilyFile {
    FamilyFile {
        formula:
            "(x1 - 1 - l)^2 + x2^2 - 1 = 0 || (x1 + 1 + l)^2 + x2^2 - 1 = 0".into(),
        sample_box: vec![[-2.8, 2.8], [-1.6, 1.6]],
        lambda_range: [0.0, 1.0],
    }
}

/// The unit segment on the x-axis plus two satellite points `(0, l)` and
/// `(l, l)`. The pair of satellites enters the expanded first diagonal
/// exactly when the scatter threshold reaches `l^2` (their squared
/// distance), which is the regression target for the threshold scan.
pub fn segment_with_satellites(lambda: f64, segment_points: usize) -> PointCloud {
    assert!(segment_points >= 2);
    let mut points: Vec<Vec<f64>> = (0..segment_points)
        .map(|i| vec![i as f64 / (segment_points - 1) as f64, 0.0])
        .collect();
    points.push(vec![0.0, lambda]);
    points.push(vec![lambda, lambda]);
    PointCloud::new(2, points).unwrap().with_label("segment-with-satellites")
}

/// `n` points evenly spaced on the unit circle.
pub fn circle_points(n: usize) -> PointCloud {
    let pts = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            vec![t.cos(), t.sin()]
        })
        .collect();
    PointCloud::new(2, pts).unwrap().with_label("circle")
}

fn v(coords: &[f64], lambda: f64) -> Vertex {
    Vertex { coords: coords.to_vec(), lambda }
}

/// One edge from a base vertex to a vertex at level one.
pub fn single_edge_complex() -> LambdaComplex {
    LambdaComplex::new(vec![v(&[0.0], 0.0), v(&[1.0], 1.0)], vec![vec![0, 1]]).unwrap()
}

/// A triangle whose base edge sits at level zero, apex at level one.
pub fn triangle_complex() -> LambdaComplex {
    LambdaComplex::new(
        vec![v(&[0.0, 0.0], 0.0), v(&[1.0, 0.0], 0.0), v(&[0.0, 1.0], 1.0)],
        vec![vec![0, 1, 2]],
    )
    .unwrap()
}

/// Two triangles sharing an edge that climbs away from the base: the
/// second triangle touches the base in a single vertex.
pub fn two_triangle_fan_complex() -> LambdaComplex {
    LambdaComplex::new(
        vec![
            v(&[0.0, 0.0], 0.0),
            v(&[1.0, 0.0], 0.0),
            v(&[0.5, 1.0], 1.0),
            v(&[1.5, 1.0], 1.0),
        ],
        vec![vec![0, 1, 2], vec![1, 2, 3]],
    )
    .unwrap()
}

/// The three standard demo complexes with their names.
pub fn demo_complexes() -> Vec<(&'static str, LambdaComplex)> {
    vec![
        ("single-edge", single_edge_complex()),
        ("triangle-with-base-edge", triangle_complex()),
        ("two-triangle-fan", two_triangle_fan_complex()),
    ]
}
