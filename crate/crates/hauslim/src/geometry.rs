//! Finite point clouds: grid sampling of formula fibers, Hausdorff
//! distance, the scatter metric on tuples, and expanded diagonals.

use crate::error::{Error, Result};
use crate::formula::{CompiledFormula, Formula};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A finite subset of `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub label: Option<String>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("non-finite coordinate in point cloud".into()));
            }
        }
        Ok(PointCloud { dim, points, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest pairwise distance; 0 for clouds with fewer than two points.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.max(dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    /// Smallest nonzero pairwise distance, if any two points differ.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let d = dist(&self.points[i], &self.points[j]);
                if d > 0.0 && best.map_or(true, |b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Deterministic seeded subsample of at most `max_points` points,
    /// keeping the original ordering of the survivors.
    pub fn subsample(&self, max_points: usize, seed: u64) -> (PointCloud, bool) {
        if self.points.len() <= max_points {
            return (self.clone(), false);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, self.points.len(), max_points)
            .into_vec();
        idx.sort_unstable();
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        (
            PointCloud { dim: self.dim, points, label: self.label.clone() },
            true,
        )
    }

    /// Greedy farthest-point (maxmin) subsample: near-uniform spacing, so
    /// connectivity scales of the subsample track the cloud instead of
    /// random-gap statistics. The seed picks the starting point; ties
    /// break toward smaller indices. Survivors keep the original order.
    pub fn subsample_farthest(&self, max_points: usize, seed: u64) -> (PointCloud, bool) {
        if self.points.len() <= max_points || max_points == 0 {
            return (self.clone(), false);
        }
        let n = self.points.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = rng.gen_range(0..n);
        let mut chosen = vec![start];
        let mut best: Vec<f64> = self.points.iter().map(|p| dist_sq(p, &self.points[start])).collect();
        while chosen.len() < max_points {
            let mut far = 0usize;
            let mut far_d = -1.0;
            for (i, &d) in best.iter().enumerate() {
                if d > far_d {
                    far_d = d;
                    far = i;
                }
            }
            chosen.push(far);
            for (i, d) in best.iter_mut().enumerate() {
                let nd = dist_sq(&self.points[i], &self.points[far]);
                if nd < *d {
                    *d = nd;
                }
            }
        }
        chosen.sort_unstable();
        let points = chosen.iter().map(|&i| self.points[i].clone()).collect();
        (
            PointCloud { dim: self.dim, points, label: self.label.clone() },
            true,
        )
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A finite set of `(p+1)`-tuples of points of `R^base_dim`, stored as
/// flat vectors of length `base_dim * arity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleCloud {
    pub base_dim: usize,
    pub arity: usize,
    pub tuples: Vec<Vec<f64>>,
    /// True when the enumeration exceeded the cap and a seeded subsample
    /// was kept instead of the full set.
    pub subsampled: bool,
    /// Number of tuples that satisfied the scatter threshold before any
    /// subsampling.
    pub total_matches: u64,
}

impl TupleCloud {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// View the tuples as a plain cloud in `R^{base_dim * arity}`.
    pub fn as_point_cloud(&self) -> PointCloud {
        PointCloud {
            dim: self.base_dim * self.arity,
            points: self.tuples.clone(),
            label: None,
        }
    }
}

/// All grid points of `box_` (resolution points per axis, endpoints
/// included) where the formula holds at parameter `lambda` with the given
/// tolerance, in lexicographic grid order.
pub fn sample_fiber(
    f: &Formula,
    lambda: f64,
    box_: &[(f64, f64)],
    resolution: usize,
    tol: f64,
) -> Result<PointCloud> {
    if box_.len() != f.num_vars() {
        return Err(Error::DimensionMismatch { expected: f.num_vars(), got: box_.len() });
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    for &(lo, hi) in box_ {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!("degenerate box axis [{lo}, {hi}]")));
        }
    }
    let compiled = f.compile();
    sample_fiber_compiled(&compiled, lambda, box_, resolution, tol)
}

pub fn sample_fiber_compiled(
    f: &CompiledFormula,
    lambda: f64,
    box_: &[(f64, f64)],
    resolution: usize,
    tol: f64,
) -> Result<PointCloud> {
    let n = f.num_vars();
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &(lo, hi) in box_ {
        let step = (hi - lo) / (resolution - 1) as f64;
        axes.push((0..resolution).map(|i| lo + step * i as f64).collect());
    }
    let mut points = Vec::new();
    let mut index = vec![0usize; n];
    let mut x = vec![0.0f64; n];
    if n == 0 {
        // Zero variables: the grid is the single empty point.
        if f.evaluate(&x, lambda, tol) {
            points.push(x);
        }
        return PointCloud::new(0, points);
    }
    'outer: loop {
        for (k, &i) in index.iter().enumerate() {
            x[k] = axes[k][i];
        }
        if f.evaluate(&x, lambda, tol) {
            points.push(x.clone());
        }
        // advance the last axis fastest: lexicographic order on the index tuple
        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            index[k] += 1;
            if index[k] < resolution {
                break;
            }
            index[k] = 0;
        }
    }
    PointCloud::new(n, points)
}

/// Hausdorff distance in the sum convention: the two directed max–min
/// distances added together.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud("hausdorff distance needs nonempty clouds".into()));
    }
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
    }
    Ok(directed_hausdorff(a, b) + directed_hausdorff(b, a))
}

fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let mut worst = 0.0f64;
    for p in &a.points {
        let mut best = f64::INFINITY;
        for q in &b.points {
            let d = dist_sq(p, q);
            if d < best {
                best = d;
            }
        }
        let best = best.sqrt();
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Sum of squared pairwise distances over a tuple of points; zero for a
/// single point (the empty sum).
pub fn tuple_scatter(points: &[&[f64]]) -> Result<f64> {
    for w in points.windows(2) {
        if w[0].len() != w[1].len() {
            return Err(Error::DimensionMismatch { expected: w[0].len(), got: w[1].len() });
        }
    }
    Ok(scatter_unchecked(points))
}

fn scatter_unchecked(points: &[&[f64]]) -> f64 {
    let mut acc = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            acc += dist_sq(points[i], points[j]);
        }
    }
    acc
}

/// Scatter of a flat tuple (blocks of length `base_dim`).
pub fn tuple_scatter_flat(tuple: &[f64], base_dim: usize) -> f64 {
    let arity = tuple.len() / base_dim;
    let blocks: Vec<&[f64]> = (0..arity)
        .map(|i| &tuple[i * base_dim..(i + 1) * base_dim])
        .collect();
    scatter_unchecked(&blocks)
}

/// Every ordered `(p+1)`-tuple of cloud points (repetitions allowed) whose
/// scatter is at most `delta`, in lexicographic index order. When more than
/// `cap` tuples qualify, a seeded uniform subsample of size `cap` is
/// returned and flagged.
pub fn expanded_diagonal(
    cloud: &PointCloud,
    p: usize,
    delta: f64,
    cap: usize,
    seed: u64,
) -> TupleCloud {
    assert!(cap >= 1, "cap must be at least 1");
    let arity = p + 1;
    let _n = cloud.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Reservoir of (enumeration index, tuple indices).
    let mut reservoir: Vec<(u64, Vec<u32>)> = Vec::with_capacity(cap.min(4096));
    let mut total: u64 = 0;

    // Scatter grows when a point is appended, so a partial sum already
    // above delta prunes the whole branch. The slack covers the different
    // summation order of the final exact check.
    let slack = 1e-9 * (1.0 + delta.abs());
    let mut prefix: Vec<u32> = Vec::with_capacity(arity);
    let mut partial: Vec<f64> = vec![0.0; arity + 1];

    fn recurse(
        cloud: &PointCloud,
        arity: usize,
        delta: f64,
        slack: f64,
        prefix: &mut Vec<u32>,
        partial: &mut Vec<f64>,
        total: &mut u64,
        reservoir: &mut Vec<(u64, Vec<u32>)>,
        cap: usize,
        rng: &mut ChaCha8Rng,
    ) {
        let depth = prefix.len();
        if depth == arity {
            // Exact acceptance uses the canonical pair order.
            let blocks: Vec<&[f64]> =
                prefix.iter().map(|&i| cloud.points[i as usize].as_slice()).collect();
            if scatter_unchecked(&blocks) <= delta {
                let t = *total;
                *total += 1;
                if reservoir.len() < cap {
                    reservoir.push((t, prefix.clone()));
                } else {
                    let j = rng.gen_range(0..=t);
                    if (j as usize) < cap {
                        reservoir[j as usize] = (t, prefix.clone());
                    }
                }
            }
            return;
        }
        for i in 0..cloud.len() {
            let mut added = 0.0;
            for &q in prefix.iter() {
                added += dist_sq(&cloud.points[q as usize], &cloud.points[i]);
            }
            let next = partial[depth] + added;
            if next > delta + slack {
                continue;
            }
            partial[depth + 1] = next;
            prefix.push(i as u32);
            recurse(cloud, arity, delta, slack, prefix, partial, total, reservoir, cap, rng);
            prefix.pop();
        }
    }

    recurse(
        cloud,
        arity,
        delta,
        slack,
        &mut prefix,
        &mut partial,
        &mut total,
        &mut reservoir,
        cap,
        &mut rng,
    );

    reservoir.sort_unstable_by_key(|(t, _)| *t);
    let tuples: Vec<Vec<f64>> = reservoir
        .iter()
        .map(|(_, idx)| {
            let mut flat = Vec::with_capacity(cloud.dim * arity);
            for &i in idx {
                flat.extend_from_slice(&cloud.points[i as usize]);
            }
            flat
        })
        .collect();

    TupleCloud {
        base_dim: cloud.dim,
        arity,
        subsampled: total > cap as u64,
        total_matches: total,
        tuples,
    }
}

/// Max Euclidean norm over the cloud.
pub fn bounding_radius(cloud: &PointCloud) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud("bounding radius of an empty cloud".into()));
    }
    Ok(cloud
        .points
        .iter()
        .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}
