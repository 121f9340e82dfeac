//! Vietoris–Rips homology over Z/2, Betti curves across a scale grid, and
//! plateau detection for scale selection.

use crate::error::{Error, Result};
use crate::geometry::{dist, PointCloud};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Homology ranks `b_0..b_K` over Z/2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub ranks: Vec<usize>,
}

impl BettiVector {
    pub fn new(ranks: Vec<usize>) -> Self {
        BettiVector { ranks }
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for BettiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})",
            self.ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

/// Betti vectors tracked across an increasing scale grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiCurve {
    pub scales: Vec<f64>,
    pub betti: Vec<BettiVector>,
}

/// A maximal interval of scales with constant Betti vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub betti: BettiVector,
}

/// A flag complex listed dimension by dimension; `dims[q]` holds the
/// `q`-simplices as strictly increasing vertex-index lists.
#[derive(Debug, Clone)]
pub struct FlagComplex {
    pub dims: Vec<Vec<Vec<u32>>>,
}

impl FlagComplex {
    pub fn simplex_count(&self) -> usize {
        self.dims.iter().map(Vec::len).sum()
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(q, s)| if q % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }
}

/// Flag complex of the graph `{dist(x_i, x_j) <= radius}` up to dimension
/// `max_dim`, vertices in cloud order, simplices in lexicographic order.
pub fn rips_complex(cloud: &PointCloud, radius: f64, max_dim: usize) -> FlagComplex {
    let n = cloud.len();
    let mut dims: Vec<Vec<Vec<u32>>> = Vec::with_capacity(max_dim + 1);
    dims.push((0..n as u32).map(|i| vec![i]).collect());
    if max_dim == 0 || n == 0 {
        return FlagComplex { dims };
    }

    // neighbors with larger index, sorted
    let mut above: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(&cloud.points[i], &cloud.points[j]) <= radius {
                above[i].push(j as u32);
            }
        }
    }

    // grow cliques one vertex at a time, keeping the common upper
    // neighborhood of each simplex as its extension candidates
    let mut current: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();
    let mut cands: Vec<Vec<u32>> = above.clone();
    for _dim in 1..=max_dim {
        let mut next_simplices = Vec::new();
        let mut next_cands = Vec::new();
        for (s, cand) in current.iter().zip(&cands) {
            for &v in cand {
                let mut simplex = s.clone();
                simplex.push(v);
                let cv = intersect_sorted(cand, &above[v as usize]);
                next_simplices.push(simplex);
                next_cands.push(cv);
            }
        }
        if next_simplices.is_empty() {
            break;
        }
        dims.push(next_simplices.clone());
        current = next_simplices;
        cands = next_cands;
    }
    FlagComplex { dims }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Z/2 homology ranks of a simplicial complex given dimension by
/// dimension. Ranks are reported for `0..=max_k`; boundary matrices are
/// reduced top dimension first so that pivot rows clear columns one
/// dimension down.
pub fn betti_from_simplices(dims: &[Vec<Vec<u32>>], max_k: usize) -> Vec<usize> {
    let top = dims.len().saturating_sub(1);
    let mut ranks = vec![0usize; dims.len().max(1)]; // rank of boundary map per dimension
    let mut cleared: Vec<bool> = Vec::new();

    for q in (1..=top).rev() {
        let faces: HashMap<&[u32], u32> = dims[q - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i as u32))
            .collect();
        let n_rows = dims[q - 1].len();
        let mut owner: Vec<u32> = vec![u32::MAX; n_rows];
        let mut stored: Vec<Vec<u32>> = Vec::new();
        let mut rank = 0usize;
        let skip = std::mem::take(&mut cleared);

        for (ci, simplex) in dims[q].iter().enumerate() {
            if skip.get(ci).copied().unwrap_or(false) {
                continue;
            }
            let mut col: Vec<u32> = Vec::with_capacity(simplex.len());
            let mut face = simplex.clone();
            for omit in 0..simplex.len() {
                face.remove(omit);
                col.push(faces[face.as_slice()]);
                face.insert(omit, simplex[omit]);
            }
            col.sort_unstable();
            loop {
                let Some(&pivot) = col.last() else { break };
                let o = owner[pivot as usize];
                if o == u32::MAX {
                    owner[pivot as usize] = stored.len() as u32;
                    stored.push(col);
                    rank += 1;
                    break;
                }
                col = xor_sorted(&col, &stored[o as usize]);
            }
        }

        ranks[q] = rank;
        let mut next_cleared = vec![false; n_rows];
        for (row, &o) in owner.iter().enumerate() {
            if o != u32::MAX {
                next_cleared[row] = true;
            }
        }
        cleared = next_cleared;
    }

    (0..=max_k)
        .map(|k| {
            let n_k = dims.get(k).map_or(0, Vec::len);
            let r_k = if k == 0 { 0 } else { ranks.get(k).copied().unwrap_or(0) };
            let r_k1 = ranks.get(k + 1).copied().unwrap_or(0);
            n_k.saturating_sub(r_k + r_k1)
        })
        .collect()
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Connected components of the distance graph at one radius (`b_0` of the
/// Rips complex), via union-find.
pub fn component_count(cloud: &PointCloud, radius: f64) -> usize {
    let n = cloud.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut components = n;
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(&cloud.points[i], &cloud.points[j]) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
    }
    components
}

/// Z/2 Betti numbers of the Rips complex at one radius, built to
/// dimension `max_k + 1`.
pub fn betti_numbers(cloud: &PointCloud, radius: f64, max_k: usize) -> BettiVector {
    let n = cloud.len();
    if n == 0 {
        return BettiVector::new(vec![0; max_k + 1]);
    }
    // At or beyond the diameter the complex is the truncated full simplex:
    // contractible through dimension max_k.
    if n >= 2 && radius >= cloud.diameter() {
        let mut ranks = vec![0; max_k + 1];
        ranks[0] = 1;
        return BettiVector::new(ranks);
    }
    let complex = rips_complex(cloud, radius, max_k + 1);
    BettiVector::new(betti_from_simplices(&complex.dims, max_k))
}

/// Betti numbers at every scale of an increasing grid; scales are
/// evaluated in parallel, the output order follows the grid.
pub fn betti_curve(cloud: &PointCloud, grid: &[f64], max_k: usize) -> Result<BettiCurve> {
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput("scale grid must be strictly increasing".into()));
        }
    }
    let betti: Vec<BettiVector> = grid
        .par_iter()
        .map(|&r| betti_numbers(cloud, r, max_k))
        .collect();
    Ok(BettiCurve { scales: grid.to_vec(), betti })
}

/// Default grid: geometric steps from half the smallest nonzero pairwise
/// distance up to the diameter.
pub fn default_scale_grid(cloud: &PointCloud, steps: usize) -> Result<Vec<f64>> {
    let lo = cloud
        .min_positive_distance()
        .ok_or_else(|| Error::EmptyCloud("cloud has no two distinct points".into()))?
        / 2.0;
    let hi = cloud.diameter();
    Ok(geometric_grid(lo, hi, steps))
}

pub fn geometric_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && steps >= 2);
    let ratio = (hi / lo).powf(1.0 / (steps - 1) as f64);
    let mut grid: Vec<f64> = (0..steps).map(|i| lo * ratio.powi(i as i32)).collect();
    // guard against rounding pushing the endpoint past hi
    grid[steps - 1] = hi;
    grid
}

fn constant_runs(curve: &BettiCurve) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0usize;
    for i in 1..curve.betti.len() {
        if curve.betti[i] != curve.betti[start] {
            runs.push((start, i - 1));
            start = i;
        }
    }
    if !curve.betti.is_empty() {
        runs.push((start, curve.betti.len() - 1));
    }
    runs
}

/// Widest maximal constant run whose width reaches
/// `min_width_fraction * (grid span)`; ties break toward smaller scales.
/// Short leading noise runs fall below the width threshold and are skipped.
pub fn stable_plateau(curve: &BettiCurve, min_width_fraction: f64) -> Result<Plateau> {
    pick_plateau(curve, min_width_fraction, false)
}

/// First (smallest-scale) qualifying run instead of the widest one. Scale
/// selection for expanded diagonals wants the lowest stable interval: the
/// meaningful threshold interval sits just above the sampling noise.
pub fn first_stable_plateau(curve: &BettiCurve, min_width_fraction: f64) -> Result<Plateau> {
    pick_plateau(curve, min_width_fraction, true)
}

fn pick_plateau(curve: &BettiCurve, min_width_fraction: f64, first: bool) -> Result<Plateau> {
    if curve.betti.is_empty() {
        return Err(Error::InvalidInput("empty Betti curve".into()));
    }
    let span = curve.scales[curve.scales.len() - 1] - curve.scales[0];
    let threshold = min_width_fraction * span;
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, j) in constant_runs(curve) {
        let width = curve.scales[j] - curve.scales[i];
        if width < threshold || width <= 0.0 {
            continue;
        }
        if first {
            best = Some((width, i, j));
            break;
        }
        if best.map_or(true, |(w, _, _)| width > w) {
            best = Some((width, i, j));
        }
    }
    let (_, i, j) = best.ok_or(Error::NoPlateau)?;
    Ok(Plateau {
        lo: curve.scales[i],
        hi: curve.scales[j],
        betti: curve.betti[i].clone(),
    })
}
