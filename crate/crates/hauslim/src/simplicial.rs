//! Finite simplicial complexes in `R^n x [0,1]` with an affine projection
//! onto the last coordinate (the parameter level), and the piecewise-linear
//! retraction machinery onto the level-zero sub-complex: the star, the
//! retraction, the per-level fiber maps and their witnesses (lift, level
//! homeomorphism), displacement bounds, fibered products, and Z/2 homology.

use crate::error::{Error, Result};
use crate::geometry::{dist, TupleCloud};
use crate::homology::{betti_from_simplices, BettiVector};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Absolute tolerance for barycentric identities.
pub const CHECK_TOL: f64 = 1e-9;
/// Weights at or below this are treated as zero when finding a carrier.
const WEIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub coords: Vec<f64>,
    pub lambda: f64,
}

impl Vertex {
    fn total(&self) -> Vec<f64> {
        let mut v = self.coords.clone();
        v.push(self.lambda);
        v
    }
}

/// A finite, face-closed simplicial complex whose vertices carry a
/// non-negative level; the level function is affine on every simplex.
/// The base sub-complex consists of the simplices all of whose vertices
/// sit at level zero.
#[derive(Debug, Clone)]
pub struct LambdaComplex {
    dim: usize,
    vertices: Vec<Vertex>,
    simplices: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    base_vertex: Vec<bool>,
}

/// A point addressed by carrier simplex and barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint {
    pub simplex: usize,
    pub weights: Vec<f64>,
}

/// Indices of the simplices forming the star of the base sub-complex.
#[derive(Debug, Clone, PartialEq)]
pub struct StarComplex {
    pub simplices: Vec<usize>,
}

impl StarComplex {
    pub fn contains(&self, simplex: usize) -> bool {
        self.simplices.binary_search(&simplex).is_ok()
    }
}

impl LambdaComplex {
    /// Build a complex from vertices and simplices. Faces are completed
    /// automatically; affine independence and level signs are validated.
    pub fn new(vertices: Vec<Vertex>, simplices: Vec<Vec<u32>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidComplex("no vertices".into()));
        }
        let dim = vertices[0].coords.len();
        for (i, v) in vertices.iter().enumerate() {
            if v.coords.len() != dim {
                return Err(Error::InvalidComplex(format!(
                    "vertex {i} has {} coordinates, expected {dim}",
                    v.coords.len()
                )));
            }
            if !v.lambda.is_finite() || v.lambda < 0.0 {
                return Err(Error::InvalidComplex(format!(
                    "vertex {i} has negative or non-finite level {}",
                    v.lambda
                )));
            }
            if v.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidComplex(format!("vertex {i} has non-finite coordinates")));
            }
        }

        let mut normalized: Vec<Vec<u32>> = Vec::with_capacity(simplices.len());
        for s in &simplices {
            let mut t = s.clone();
            t.sort_unstable();
            for w in t.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidComplex(format!(
                        "simplex {s:?} repeats vertex {} (affinely dependent)",
                        w[0]
                    )));
                }
            }
            if let Some(&v) = t.last() {
                if v as usize >= vertices.len() {
                    return Err(Error::InvalidComplex(format!(
                        "simplex {s:?} references missing vertex {v}"
                    )));
                }
            }
            if t.is_empty() {
                return Err(Error::InvalidComplex("empty simplex".into()));
            }
            normalized.push(t);
        }
        {
            let mut sorted = normalized.clone();
            sorted.sort();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidComplex(format!("duplicate simplex {:?}", w[0])));
                }
            }
        }

        for s in &normalized {
            check_affine_independence(&vertices, s)?;
        }

        // close under faces
        let mut closed: BTreeSet<Vec<u32>> = BTreeSet::new();
        for s in &normalized {
            insert_with_faces(s, &mut closed);
        }
        for (i, _) in vertices.iter().enumerate() {
            closed.insert(vec![i as u32]);
        }

        // dimension-major, then lexicographic order
        let mut all: Vec<Vec<u32>> = closed.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let index = all.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let base_vertex = vertices.iter().map(|v| v.lambda == 0.0).collect();

        Ok(LambdaComplex { dim, vertices, simplices: all, index, base_vertex })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<u32>] {
        &self.simplices
    }

    pub fn simplex_index(&self, simplex: &[u32]) -> Option<usize> {
        self.index.get(simplex).copied()
    }

    pub fn is_base_vertex(&self, v: u32) -> bool {
        self.base_vertex[v as usize]
    }

    /// All vertices at level zero.
    pub fn base_simplex(&self, idx: usize) -> bool {
        self.simplices[idx].iter().all(|&v| self.base_vertex[v as usize])
    }

    /// Indices of the base sub-complex.
    pub fn base_simplices(&self) -> Vec<usize> {
        (0..self.simplices.len()).filter(|&i| self.base_simplex(i)).collect()
    }

    /// Smallest level over the vertices outside the base; the fiber maps
    /// are defined strictly below this threshold.
    pub fn lambda_min(&self) -> Result<f64> {
        self.vertices
            .iter()
            .filter(|v| v.lambda > 0.0)
            .map(|v| v.lambda)
            .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))))
            .ok_or_else(|| Error::InvalidComplex("every vertex lies in the base".into()))
    }

    /// The base together with every open simplex having at least one
    /// vertex in the base.
    pub fn star(&self) -> StarComplex {
        StarComplex {
            simplices: (0..self.simplices.len())
                .filter(|&i| self.simplices[i].iter().any(|&v| self.base_vertex[v as usize]))
                .collect(),
        }
    }

    pub fn max_vertex_norm_total(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.total().iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_vertex_norm_x(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.coords.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Level of a point (the affine projection).
    pub fn level(&self, p: &ComplexPoint) -> f64 {
        let s = &self.simplices[p.simplex];
        s.iter().zip(&p.weights).map(|(&v, w)| self.vertices[v as usize].lambda * w).sum()
    }

    /// Spatial coordinates of a point (without the level).
    pub fn coords_x(&self, p: &ComplexPoint) -> Vec<f64> {
        let s = &self.simplices[p.simplex];
        let mut out = vec![0.0; self.dim];
        for (&v, w) in s.iter().zip(&p.weights) {
            for (o, c) in out.iter_mut().zip(&self.vertices[v as usize].coords) {
                *o += w * c;
            }
        }
        out
    }

    /// Drop zero weights and re-address the point by its carrier (the open
    /// simplex where all weights are positive). Weights are renormalized.
    pub fn canonicalize(&self, p: &ComplexPoint) -> Result<ComplexPoint> {
        let s = self
            .simplices
            .get(p.simplex)
            .ok_or_else(|| Error::InvalidInput(format!("no simplex {}", p.simplex)))?;
        if s.len() != p.weights.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), got: p.weights.len() });
        }
        let mut verts = Vec::new();
        let mut weights = Vec::new();
        for (&v, &w) in s.iter().zip(&p.weights) {
            if w < -1e-9 {
                return Err(Error::InvalidInput(format!("negative barycentric weight {w}")));
            }
            if w > WEIGHT_EPS {
                verts.push(v);
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!("barycentric weights sum to {total}")));
        }
        for w in &mut weights {
            *w /= total;
        }
        let carrier = self
            .index
            .get(&verts)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("carrier {verts:?} is not a simplex")))?;
        Ok(ComplexPoint { simplex: carrier, weights })
    }

    /// The retraction onto the base: weights on base vertices of the
    /// carrier are renormalized, all others dropped. Points of the base
    /// are fixed.
    pub fn retract(&self, p: &ComplexPoint) -> Result<ComplexPoint> {
        let p = self.canonicalize(p)?;
        let s = &self.simplices[p.simplex];
        let base_mass: f64 = s
            .iter()
            .zip(&p.weights)
            .filter(|(&v, _)| self.base_vertex[v as usize])
            .map(|(_, &w)| w)
            .sum();
        if base_mass == 0.0 {
            return Err(Error::OutsideStar);
        }
        if self.base_simplex(p.simplex) {
            return Ok(p);
        }
        let mut verts = Vec::new();
        let mut weights = Vec::new();
        for (&v, &w) in s.iter().zip(&p.weights) {
            if self.base_vertex[v as usize] {
                verts.push(v);
                weights.push(w / base_mass);
            }
        }
        let carrier = self.index[&verts];
        Ok(ComplexPoint { simplex: carrier, weights })
    }

    /// The fiber map at a level `0 < lambda < lambda_min`: the retraction,
    /// restricted to the level fiber (which lies inside the star there).
    pub fn fiber_map(&self, p: &ComplexPoint, lambda: f64) -> Result<ComplexPoint> {
        let l0 = self.lambda_min()?;
        if !(lambda > 0.0 && lambda < l0) {
            return Err(Error::InvalidInput(format!(
                "level {lambda} outside (0, {l0}) where the fiber map is defined"
            )));
        }
        let level = self.level(p);
        if (level - lambda).abs() > CHECK_TOL {
            return Err(Error::InvalidInput(format!(
                "point has level {level}, expected {lambda}"
            )));
        }
        self.retract(p)
    }

    /// Witness for surjectivity of the fiber map: a point of the
    /// `lambda`-fiber mapping onto the given base point. The carrier of
    /// `zeta` is extended by non-base vertices, half of the mass is moved
    /// onto them, and the point is slid down the retraction segment to the
    /// requested level.
    pub fn lift_to_fiber(&self, zeta: &ComplexPoint, lambda: f64) -> Result<ComplexPoint> {
        let l0 = self.lambda_min()?;
        if !(lambda > 0.0 && lambda < l0) {
            return Err(Error::InvalidInput(format!(
                "level {lambda} outside (0, {l0}) where the fiber map is defined"
            )));
        }
        let zeta = self.canonicalize(zeta)?;
        if !self.base_simplex(zeta.simplex) {
            return Err(Error::InvalidInput("lift input must lie in the base".into()));
        }
        let carrier = self.simplices[zeta.simplex].clone();

        // First simplex (dimension-major order) extending the carrier with
        // at least one non-base vertex; its non-base vertices, together
        // with the carrier, span the face we lift into.
        let extension = self
            .simplices
            .iter()
            .position(|s| {
                s.len() > carrier.len()
                    && carrier.iter().all(|v| s.contains(v))
                    && s.iter().any(|&v| !self.base_vertex[v as usize])
            })
            .ok_or(Error::NoExtendingSimplex)?;

        let nonbase: Vec<u32> = self.simplices[extension]
            .iter()
            .copied()
            .filter(|&v| !self.base_vertex[v as usize])
            .collect();
        let mut verts: Vec<u32> = carrier.iter().copied().chain(nonbase.iter().copied()).collect();
        verts.sort_unstable();
        let face = self.index[&verts];

        // xi: half the mass on the carrier (weights v_i/2), half spread
        // evenly over the non-base vertices.
        let m = nonbase.len() as f64;
        let xi_weight = |v: u32| -> f64 {
            if let Some(pos) = carrier.iter().position(|&c| c == v) {
                zeta.weights[pos] / 2.0
            } else {
                0.5 / m
            }
        };
        let xi_level: f64 = verts
            .iter()
            .map(|&v| xi_weight(v) * self.vertices[v as usize].lambda)
            .sum();
        // The segment (1-t) zeta + t xi has level t * xi_level.
        let t = lambda / xi_level;
        let weights: Vec<f64> = verts
            .iter()
            .map(|&v| {
                let base_part = carrier
                    .iter()
                    .position(|&c| c == v)
                    .map_or(0.0, |pos| zeta.weights[pos]);
                (1.0 - t) * base_part + t * xi_weight(v)
            })
            .collect();
        self.canonicalize(&ComplexPoint { simplex: face, weights })
    }

    /// The homeomorphism between the `lambda`-fiber and the `lambda_to`-
    /// fiber sliding each point along its retraction segment:
    /// `h(x) = (lambda_to/lambda) x + (1 - lambda_to/lambda) F(x)`.
    pub fn level_homeomorphism(
        &self,
        p: &ComplexPoint,
        lambda: f64,
        lambda_to: f64,
    ) -> Result<ComplexPoint> {
        let l0 = self.lambda_min()?;
        if !(0.0 < lambda_to && lambda_to <= lambda && lambda < l0) {
            return Err(Error::InvalidInput(format!(
                "levels must satisfy 0 < {lambda_to} <= {lambda} < {l0}"
            )));
        }
        let p = self.canonicalize(p)?;
        let level = self.level(&p);
        if (level - lambda).abs() > CHECK_TOL {
            return Err(Error::InvalidInput(format!(
                "point has level {level}, expected {lambda}"
            )));
        }
        let t = lambda_to / lambda;
        self.slide(&p, t, false)
    }

    /// Explicit inverse of [`Self::level_homeomorphism`]: a point of the
    /// `lambda_from`-fiber is pushed back up to the `lambda`-fiber via
    /// `x = (lambda/lambda_from) tau - (lambda/lambda_from - 1) F(tau)`.
    pub fn level_homeomorphism_inverse(
        &self,
        p: &ComplexPoint,
        lambda: f64,
        lambda_from: f64,
    ) -> Result<ComplexPoint> {
        let l0 = self.lambda_min()?;
        if !(0.0 < lambda_from && lambda_from <= lambda && lambda < l0) {
            return Err(Error::InvalidInput(format!(
                "levels must satisfy 0 < {lambda_from} <= {lambda} < {l0}"
            )));
        }
        let p = self.canonicalize(p)?;
        let t = lambda / lambda_from;
        self.slide(&p, t, true)
    }

    /// `t x + (1-t) F(x)` expressed in the carrier of `x`. For `expand`
    /// (t >= 1) the same affine expression walks the segment the other way.
    fn slide(&self, p: &ComplexPoint, t: f64, expand: bool) -> Result<ComplexPoint> {
        let s = &self.simplices[p.simplex];
        let base_mass: f64 = s
            .iter()
            .zip(&p.weights)
            .filter(|(&v, _)| self.base_vertex[v as usize])
            .map(|(_, &w)| w)
            .sum();
        if base_mass == 0.0 {
            return Err(Error::OutsideStar);
        }
        debug_assert!(expand || t <= 1.0);
        let weights: Vec<f64> = s
            .iter()
            .zip(&p.weights)
            .map(|(&v, &w)| {
                if self.base_vertex[v as usize] {
                    t * w + (1.0 - t) * w / base_mass
                } else {
                    t * w
                }
            })
            .collect();
        self.canonicalize(&ComplexPoint { simplex: p.simplex, weights })
    }

    /// Deterministic barycentric sample of the level fiber: each simplex
    /// crossed by the level is sliced, and the slice polytope is sampled
    /// by convex combinations of its edge-crossing generators.
    pub fn sample_fiber_points(
        &self,
        lambda: f64,
        per_simplex: usize,
    ) -> Result<Vec<ComplexPoint>> {
        if lambda <= 0.0 {
            return Err(Error::InvalidInput("fiber level must be positive".into()));
        }
        let mut out = Vec::new();
        for (si, s) in self.simplices.iter().enumerate() {
            if s.len() < 2 {
                let v = s[0];
                if self.vertices[v as usize].lambda == lambda {
                    out.push(ComplexPoint { simplex: si, weights: vec![1.0] });
                }
                continue;
            }
            let gens = self.slice_generators(si, lambda);
            if gens.is_empty() {
                continue;
            }
            for w in composition_weights(gens.len(), per_simplex) {
                let mut weights = vec![0.0; s.len()];
                for (g, &wg) in gens.iter().zip(&w) {
                    for (slot, &gw) in g.iter().enumerate() {
                        weights[slot] += wg * gw;
                    }
                }
                out.push(self.canonicalize(&ComplexPoint { simplex: si, weights })?);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidInput(format!("the level {lambda} fiber is empty")));
        }
        Ok(out)
    }

    /// Vertices of the slice polytope of one simplex at a level, as weight
    /// vectors over that simplex: on-level vertices plus edge crossings.
    fn slice_generators(&self, simplex: usize, lambda: f64) -> Vec<Vec<f64>> {
        let s = &self.simplices[simplex];
        let levels: Vec<f64> = s.iter().map(|&v| self.vertices[v as usize].lambda).collect();
        let k = s.len();
        let mut gens = Vec::new();
        for i in 0..k {
            if levels[i] == lambda {
                let mut w = vec![0.0; k];
                w[i] = 1.0;
                gens.push(w);
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let (a, b) = (levels[i], levels[j]);
                let (lo, hi) = (a.min(b), a.max(b));
                if lo < lambda && lambda < hi {
                    let mut w = vec![0.0; k];
                    let t = (lambda - a) / (b - a);
                    w[i] = 1.0 - t;
                    w[j] = t;
                    gens.push(w);
                }
            }
        }
        gens
    }

    /// Sampled max displacement `|x - F(x)|` (spatial coordinates) over a
    /// deterministic fiber sample, together with the analytic bound
    /// `2 (lambda/lambda_min) max|vertex|`.
    pub fn max_displacement(
        &self,
        lambda: f64,
        samples_per_simplex: usize,
    ) -> Result<Displacement> {
        let l0 = self.lambda_min()?;
        if !(lambda > 0.0 && lambda < l0) {
            return Err(Error::InvalidInput(format!(
                "level {lambda} outside (0, {l0})"
            )));
        }
        let fiber = self.sample_fiber_points(lambda, samples_per_simplex)?;
        let mut worst = 0.0f64;
        for p in &fiber {
            let image = self.retract(p)?;
            let d = dist(&self.coords_x(p), &self.coords_x(&image));
            worst = worst.max(d);
        }
        Ok(Displacement {
            sampled: worst,
            analytic_bound: 2.0 * (lambda / l0) * self.max_vertex_norm_total(),
            samples: fiber.len(),
        })
    }

    /// Sampled fibered product: all ordered `(p+1)`-tuples of fiber points
    /// whose retraction images have scatter at most `epsilon`. `epsilon = 0`
    /// keeps exactly the tuples sharing one image.
    pub fn fibered_product_sample(
        &self,
        lambda: f64,
        p: usize,
        epsilon: f64,
        fiber: &[ComplexPoint],
    ) -> Result<TupleCloud> {
        let l0 = self.lambda_min()?;
        if !(lambda > 0.0 && lambda < l0) {
            return Err(Error::InvalidInput(format!("level {lambda} outside (0, {l0})")));
        }
        if epsilon < 0.0 {
            return Err(Error::InvalidInput("epsilon must be non-negative".into()));
        }
        let mut xs = Vec::with_capacity(fiber.len());
        let mut images = Vec::with_capacity(fiber.len());
        for pt in fiber {
            let level = self.level(pt);
            if (level - lambda).abs() > CHECK_TOL {
                return Err(Error::InvalidInput(format!(
                    "fiber point has level {level}, expected {lambda}"
                )));
            }
            xs.push(self.coords_x(pt));
            images.push(self.coords_x(&self.retract(pt)?));
        }
        let arity = p + 1;
        let n = fiber.len();
        let mut tuples = Vec::new();
        let mut idx = vec![0usize; arity];
        'odometer: loop {
            let blocks: Vec<&[f64]> = idx.iter().map(|&i| images[i].as_slice()).collect();
            if crate::geometry::tuple_scatter(&blocks)? <= epsilon {
                let mut flat = Vec::with_capacity(self.dim * arity);
                for &i in &idx {
                    flat.extend_from_slice(&xs[i]);
                }
                tuples.push(flat);
            }
            let mut k = arity;
            loop {
                if k == 0 {
                    break 'odometer;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
        let total = tuples.len() as u64;
        Ok(TupleCloud {
            base_dim: self.dim,
            arity,
            tuples,
            subsampled: false,
            total_matches: total,
        })
    }

    /// Z/2 homology ranks of the whole complex up to degree `max_k`.
    pub fn betti(&self, max_k: usize) -> BettiVector {
        self.betti_of(&(0..self.simplices.len()).collect::<Vec<_>>(), max_k)
    }

    /// Z/2 homology ranks of a face-closed set of simplices.
    pub fn betti_of(&self, simplex_indices: &[usize], max_k: usize) -> BettiVector {
        let top = simplex_indices
            .iter()
            .map(|&i| self.simplices[i].len() - 1)
            .max()
            .unwrap_or(0);
        let mut dims: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
        for &i in simplex_indices {
            let s = &self.simplices[i];
            dims[s.len() - 1].push(s.clone());
        }
        for d in &mut dims {
            d.sort();
        }
        BettiVector::new(betti_from_simplices(&dims, max_k))
    }

    /// All closed-simplex samples of the base sub-complex, for exercising
    /// the lift. Barycentric grid with `per_simplex` granularity.
    pub fn sample_base_points(&self, per_simplex: usize) -> Vec<ComplexPoint> {
        let mut out = Vec::new();
        for (si, s) in self.simplices.iter().enumerate() {
            if !self.base_simplex(si) {
                continue;
            }
            let k = s.len();
            let gens: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    let mut w = vec![0.0; k];
                    w[i] = 1.0;
                    w
                })
                .collect();
            for w in composition_weights(gens.len(), per_simplex) {
                let weights: Vec<f64> =
                    (0..k).map(|slot| gens.iter().zip(&w).map(|(g, &wg)| wg * g[slot]).sum()).collect();
                if let Ok(pt) = self.canonicalize(&ComplexPoint { simplex: si, weights }) {
                    out.push(pt);
                }
            }
        }
        out
    }

    /// Sampled sufficient check of the pairwise-intersection condition:
    /// barycentric grid points of each simplex that also lie inside another
    /// simplex must lie in the simplex spanned by the shared vertices.
    /// Violations are reported; passing the sampled check is not a proof.
    pub fn validate_strict(&self, grid: usize) -> Result<()> {
        // even lattice total, so midpoints (where interior crossings of
        // straight pieces sit) are on the grid
        let total = (grid.max(2) + 1) & !1;
        for i in 0..self.simplices.len() {
            for j in 0..self.simplices.len() {
                if i == j {
                    continue;
                }
                let (si, sj) = (&self.simplices[i], &self.simplices[j]);
                let shared: Vec<u32> =
                    si.iter().copied().filter(|v| sj.contains(v)).collect();
                for w in lattice_weights(si.len(), total) {
                    let pt = ComplexPoint { simplex: i, weights: w.clone() };
                    let x = {
                        let mut t = self.coords_x(&pt);
                        t.push(self.level(&pt));
                        t
                    };
                    if let Some(bary) = barycentric_in(&self.vertex_matrix(sj), &x) {
                        // the point lies in both closed simplices
                        let mass_outside_shared: f64 = sj
                            .iter()
                            .zip(&bary)
                            .filter(|(v, _)| !shared.contains(v))
                            .map(|(_, &b)| b)
                            .sum();
                        if mass_outside_shared > 1e-7 {
                            return Err(Error::InvalidComplex(format!(
                                "simplices {si:?} and {sj:?} overlap outside their common face"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn vertex_matrix(&self, s: &[u32]) -> Vec<Vec<f64>> {
        s.iter().map(|&v| self.vertices[v as usize].total()).collect()
    }
}

/// Displacement of the fiber map at one level.
#[derive(Debug, Clone, Serialize)]
pub struct Displacement {
    pub sampled: f64,
    pub analytic_bound: f64,
    pub samples: usize,
}

/// Scatter correction term `p (p+1) (4 R m + 2 m^2)` bounding how much the
/// tuple scatter can change under a map that moves points by at most `m`
/// inside a ball of radius `R`.
pub fn scatter_margin(p: usize, radius: f64, max_disp: f64) -> f64 {
    (p * (p + 1)) as f64 * (4.0 * radius * max_disp + 2.0 * max_disp * max_disp)
}

fn insert_with_faces(s: &[u32], closed: &mut BTreeSet<Vec<u32>>) {
    if s.is_empty() || closed.contains(s) {
        return;
    }
    closed.insert(s.to_vec());
    if s.len() == 1 {
        return;
    }
    for omit in 0..s.len() {
        let mut face: Vec<u32> = s.to_vec();
        face.remove(omit);
        insert_with_faces(&face, closed);
    }
}

fn check_affine_independence(vertices: &[Vertex], s: &[u32]) -> Result<()> {
    if s.len() <= 1 {
        return Ok(());
    }
    let v0 = vertices[s[0] as usize].total();
    let mut rows: Vec<Vec<f64>> = s[1..]
        .iter()
        .map(|&v| {
            vertices[v as usize]
                .total()
                .iter()
                .zip(&v0)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|c| c.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    let rank = gauss_rank(&mut rows, 1e-9 * scale);
    if rank < s.len() - 1 {
        return Err(Error::InvalidComplex(format!(
            "simplex {s:?} is affinely dependent"
        )));
    }
    Ok(())
}

fn gauss_rank(rows: &mut [Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len())
            .filter(|&r| rows[r][c].abs() > tol)
            .max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))
        else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in (rank + 1)..rows.len() {
            let f = rows[r][c] / rows[rank][c];
            for cc in c..cols {
                rows[r][cc] -= f * rows[rank][cc];
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Barycentric coordinates of `x` in the closed simplex with the given
/// vertex rows, or None when `x` lies outside (or off the affine hull).
fn barycentric_in(verts: &[Vec<f64>], x: &[f64]) -> Option<Vec<f64>> {
    let k = verts.len();
    let d = x.len();
    // solve [v1-v0 ... v_{k-1}-v0]^T w = x - v0 in least squares via
    // normal equations, then validate the residual
    let mut a = vec![vec![0.0; k - 1]; d];
    for (c, v) in verts[1..].iter().enumerate() {
        for r in 0..d {
            a[r][c] = v[r] - verts[0][r];
        }
    }
    let b: Vec<f64> = (0..d).map(|r| x[r] - verts[0][r]).collect();
    // normal equations A^T A w = A^T b
    let m = k - 1;
    if m == 0 {
        let res: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        return (res < 1e-8).then(|| vec![1.0]);
    }
    let mut ata = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            ata[i][j] = (0..d).map(|r| a[r][i] * a[r][j]).sum();
        }
        ata[i][m] = (0..d).map(|r| a[r][i] * b[r]).sum();
    }
    let w_tail = solve_gauss(&mut ata)?;
    let mut w = vec![0.0; k];
    w[0] = 1.0 - w_tail.iter().sum::<f64>();
    w[1..].copy_from_slice(&w_tail);
    // validate: reconstruction must hit x and weights must be admissible
    for (r, &xr) in x.iter().enumerate() {
        let got: f64 = verts.iter().zip(&w).map(|(v, &wi)| v[r] * wi).sum();
        if (got - xr).abs() > 1e-7 {
            return None;
        }
    }
    if w.iter().any(|&wi| wi < -1e-9) {
        return None;
    }
    Some(w)
}

fn solve_gauss(aug: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = aug.len();
    for c in 0..n {
        let pivot = (c..n).max_by(|&a, &b| aug[a][c].abs().total_cmp(&aug[b][c].abs()))?;
        if aug[pivot][c].abs() < 1e-12 {
            return None;
        }
        aug.swap(c, pivot);
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = aug[r][c] / aug[c][c];
            for cc in c..=n {
                aug[r][cc] -= f * aug[c][cc];
            }
        }
    }
    Some((0..n).map(|r| aug[r][n] / aug[r][r]).collect())
}

/// All compositions of a lattice total into `parts` non-negative weights
/// summing to one; the total is chosen as large as possible while keeping
/// the composition count at or below `budget` (at least the corners).
fn composition_weights(parts: usize, budget: usize) -> Vec<Vec<f64>> {
    assert!(parts >= 1);
    if parts == 1 {
        return vec![vec![1.0]];
    }
    let count = |t: usize| -> usize {
        // C(t + parts - 1, parts - 1), saturating
        let mut acc: usize = 1;
        for i in 0..(parts - 1) {
            acc = acc.saturating_mul(t + i + 1) / (i + 1);
        }
        acc
    };
    let mut total = 1usize;
    while count(total + 1) <= budget.max(parts) {
        total += 1;
        if total > 4096 {
            break;
        }
    }
    lattice_weights(parts, total)
}

/// All compositions of `total` into `parts` slots, as weight vectors.
fn lattice_weights(parts: usize, total: usize) -> Vec<Vec<f64>> {
    assert!(parts >= 1 && total >= 1);
    if parts == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    let mut comp = vec![0usize; parts];
    fn rec(comp: &mut Vec<usize>, slot: usize, left: usize, total: usize, out: &mut Vec<Vec<f64>>) {
        if slot + 1 == comp.len() {
            comp[slot] = left;
            out.push(comp.iter().map(|&c| c as f64 / total as f64).collect());
            return;
        }
        for v in (0..=left).rev() {
            comp[slot] = v;
            rec(comp, slot + 1, left - v, total, out);
        }
    }
    rec(&mut comp, 0, total, total, &mut out);
    out
}

/// Serializable form of a complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexData {
    pub vertices: Vec<Vertex>,
    pub simplices: Vec<Vec<u32>>,
}

/// Validate and index a complex from its serialized form.
pub fn load_complex(data: ComplexData) -> Result<LambdaComplex> {
    LambdaComplex::new(data.vertices, data.simplices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64], lambda: f64) -> Vertex {
        Vertex { coords: coords.to_vec(), lambda }
    }

    /// Single edge from a base vertex at x=0 up to a level-one vertex at x=1.
    fn edge() -> LambdaComplex {
        LambdaComplex::new(vec![v(&[0.0], 0.0), v(&[1.0], 1.0)], vec![vec![0, 1]]).unwrap()
    }

    /// Triangle with base edge [0,1] at level zero and an apex at level one.
    fn triangle() -> LambdaComplex {
        LambdaComplex::new(
            vec![v(&[0.0, 0.0], 0.0), v(&[1.0, 0.0], 0.0), v(&[0.0, 1.0], 1.0)],
            vec![vec![0, 1, 2]],
        )
        .unwrap()
    }

    fn pt(k: &LambdaComplex, verts: &[u32], weights: &[f64]) -> ComplexPoint {
        let mut vs = verts.to_vec();
        vs.sort_unstable();
        ComplexPoint {
            simplex: k.simplex_index(&vs).unwrap(),
            weights: weights.to_vec(),
        }
    }

    #[test]
    fn load_completes_faces_and_finds_base() {
        let k = edge();
        assert_eq!(k.simplices().len(), 3); // two vertices + the edge
        assert_eq!(k.base_simplices().len(), 1);
        assert!(k.is_base_vertex(0));
        assert!(!k.is_base_vertex(1));

        let t = triangle();
        // 3 vertices + 3 edges + 1 triangle
        assert_eq!(t.simplices().len(), 7);
        let base: Vec<_> = t.base_simplices();
        // base = vertices 0,1 and the edge [0,1]
        assert_eq!(base.len(), 3);
    }

    #[test]
    fn load_rejects_bad_input() {
        let bad = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[1.0], 1.0)],
            vec![vec![0, 0, 1]],
        );
        assert!(matches!(bad, Err(Error::InvalidComplex(_))));

        let dup = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[1.0], 1.0)],
            vec![vec![0, 1], vec![1, 0]],
        );
        assert!(matches!(dup, Err(Error::InvalidComplex(_))));

        let neg = LambdaComplex::new(vec![v(&[0.0], -0.5)], vec![vec![0]]);
        assert!(matches!(neg, Err(Error::InvalidComplex(_))));

        // three collinear points are affinely dependent
        let collinear = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[1.0], 0.0), v(&[2.0], 0.0)],
            vec![vec![0, 1, 2]],
        );
        assert!(matches!(collinear, Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn lambda_min_examples() {
        let k = LambdaComplex::new(
            vec![
                v(&[0.0], 0.0),
                v(&[1.0], 1.0),
                v(&[2.0], 0.5),
                v(&[3.0], 0.25),
            ],
            vec![vec![0, 1], vec![0, 2], vec![0, 3]],
        )
        .unwrap();
        assert_eq!(k.lambda_min().unwrap(), 0.25);
        assert_eq!(edge().lambda_min().unwrap(), 1.0);

        let all_base =
            LambdaComplex::new(vec![v(&[0.0], 0.0), v(&[1.0], 0.0)], vec![vec![0, 1]]).unwrap();
        assert!(all_base.lambda_min().is_err());
    }

    #[test]
    fn star_contains_base_and_adjacent_simplices() {
        let k = edge();
        let s = k.star();
        // vertex 0 and the edge [0,1] belong; vertex 1 does not
        assert_eq!(s.simplices.len(), 2);
        assert!(s.contains(k.simplex_index(&[0]).unwrap()));
        assert!(s.contains(k.simplex_index(&[0, 1]).unwrap()));
        assert!(!s.contains(k.simplex_index(&[1]).unwrap()));

        // a triangle floating above the base is excluded entirely
        let far = LambdaComplex::new(
            vec![
                v(&[0.0, 0.0], 0.0),
                v(&[0.0, 1.0], 1.0),
                v(&[1.0, 1.0], 1.0),
                v(&[0.5, 2.0], 2.0),
            ],
            vec![vec![0], vec![1, 2, 3]],
        )
        .unwrap();
        let star = far.star();
        assert_eq!(star.simplices.len(), 1);
    }

    #[test]
    fn retract_examples() {
        let k = edge();
        let r = k.retract(&pt(&k, &[0, 1], &[0.5, 0.5])).unwrap();
        assert_eq!(r, pt(&k, &[0], &[1.0]));

        let t = triangle();
        let r = t
            .retract(&pt(&t, &[0, 1, 2], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]))
            .unwrap();
        assert_eq!(t.simplices()[r.simplex], vec![0, 1]);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
        let x = t.coords_x(&r);
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);

        // base points are fixed
        let base = pt(&t, &[0, 1], &[0.3, 0.7]);
        assert_eq!(t.retract(&base).unwrap(), base);

        // a point with no base vertex in its carrier is outside the star
        let far = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[1.0], 1.0), v(&[2.0], 1.0)],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let outside = pt(&far, &[1, 2], &[0.5, 0.5]);
        assert!(matches!(far.retract(&outside), Err(Error::OutsideStar)));
    }

    #[test]
    fn fiber_map_examples() {
        let k = edge();
        let image = k.fiber_map(&pt(&k, &[0, 1], &[0.7, 0.3]), 0.3).unwrap();
        assert_eq!(image, pt(&k, &[0], &[1.0]));

        let t = triangle();
        let image = t.fiber_map(&pt(&t, &[0, 1, 2], &[0.2, 0.3, 0.5]), 0.5).unwrap();
        let x = t.coords_x(&image);
        assert!((x[0] - 0.6).abs() < 1e-12 && x[1].abs() < 1e-12);

        // at or above the threshold level the map is undefined
        assert!(k.fiber_map(&pt(&k, &[0, 1], &[0.0, 1.0]), 1.0).is_err());
        // level mismatch is rejected
        assert!(k.fiber_map(&pt(&k, &[0, 1], &[0.7, 0.3]), 0.4).is_err());
    }

    #[test]
    fn lift_examples() {
        let k = edge();
        let lifted = k.lift_to_fiber(&pt(&k, &[0], &[1.0]), 0.3).unwrap();
        assert_eq!(k.simplices()[lifted.simplex], vec![0, 1]);
        assert!((lifted.weights[0] - 0.7).abs() < 1e-12);
        assert!((lifted.weights[1] - 0.3).abs() < 1e-12);

        let t = triangle();
        let zeta = pt(&t, &[0, 1], &[0.5, 0.5]);
        let lifted = t.lift_to_fiber(&zeta, 0.5).unwrap();
        assert_eq!(t.simplices()[lifted.simplex], vec![0, 1, 2]);
        for (got, want) in lifted.weights.iter().zip([0.25, 0.25, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let back = t.fiber_map(&lifted, 0.5).unwrap();
        let (a, b) = (t.coords_x(&back), t.coords_x(&zeta));
        assert!(dist(&a, &b) < 1e-9);

        // a base point with no extension cannot be lifted
        let island = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[5.0], 0.0), v(&[6.0], 1.0)],
            vec![vec![0], vec![1, 2]],
        )
        .unwrap();
        let zeta = ComplexPoint { simplex: island.simplex_index(&[0]).unwrap(), weights: vec![1.0] };
        assert!(matches!(
            island.lift_to_fiber(&zeta, 0.5),
            Err(Error::NoExtendingSimplex)
        ));
    }

    #[test]
    fn homeomorphism_examples() {
        let k = edge();
        let h = k
            .level_homeomorphism(&pt(&k, &[0, 1], &[0.5, 0.5]), 0.5, 0.25)
            .unwrap();
        assert!((h.weights[0] - 0.75).abs() < 1e-12);
        assert!((h.weights[1] - 0.25).abs() < 1e-12);
        let x = k.coords_x(&h);
        assert!((x[0] - 0.25).abs() < 1e-12);
        assert!((k.level(&h) - 0.25).abs() < 1e-12);

        // lambda_to = lambda is the identity
        let p = pt(&k, &[0, 1], &[0.6, 0.4]);
        let h = k.level_homeomorphism(&p, 0.4, 0.4).unwrap();
        assert!(dist(&k.coords_x(&h), &k.coords_x(&p)) < 1e-12);

        // halving the level of a triangle fiber point: the retraction
        // image must be preserved and the level must land on target
        let t = triangle();
        let p = pt(&t, &[0, 1, 2], &[0.2, 0.3, 0.5]);
        let h = t.level_homeomorphism(&p, 0.5, 0.25).unwrap();
        assert!((t.level(&h) - 0.25).abs() < 1e-12);
        let fp = t.coords_x(&t.retract(&p).unwrap());
        let fh = t.coords_x(&t.retract(&h).unwrap());
        assert!(dist(&fp, &fh) < 1e-9);
        for (got, want) in h.weights.iter().zip([0.3, 0.45, 0.25]) {
            assert!((got - want).abs() < 1e-12, "weights {:?}", h.weights);
        }

        // ordering violations are rejected
        assert!(k.level_homeomorphism(&p, 0.4, 0.6).is_err());
    }

    #[test]
    fn scatter_margin_examples() {
        assert_eq!(scatter_margin(1, 1.0, 0.0), 0.0);
        assert!((scatter_margin(1, 1.0, 0.1) - 0.84).abs() < 1e-15);
        assert_eq!(scatter_margin(2, 2.0, 0.5), 27.0);
    }

    #[test]
    fn displacement_examples() {
        let k = edge();
        let d = k.max_displacement(0.3, 8).unwrap();
        assert!((d.sampled - 0.3).abs() < 1e-12);
        assert!(d.sampled <= d.analytic_bound + 1e-12);

        // displacement shrinks to zero with the level
        let mut last = f64::INFINITY;
        for lambda in [0.5, 0.25, 0.1, 0.01] {
            let d = k.max_displacement(lambda, 8).unwrap();
            assert!(d.sampled <= last);
            last = d.sampled;
        }
        assert!(last < 0.02);
    }

    #[test]
    fn fibered_product_examples() {
        let k = edge();
        let fiber = k.sample_fiber_points(0.3, 16).unwrap();
        let w = k.fibered_product_sample(0.3, 1, 0.0, &fiber).unwrap();
        // all fiber points share the image, so every ordered pair qualifies
        assert_eq!(w.len(), fiber.len() * fiber.len());

        // two edges landing on base vertices at distance 1
        let two = LambdaComplex::new(
            vec![
                v(&[0.0], 0.0),
                v(&[1.0], 0.0),
                v(&[0.0], 1.0),
                v(&[1.0], 1.0),
            ],
            vec![vec![0, 2], vec![1, 3]],
        )
        .unwrap();
        let fiber = two.sample_fiber_points(0.5, 4).unwrap();
        let tight = two.fibered_product_sample(0.5, 1, 0.0, &fiber).unwrap();
        let loose = two.fibered_product_sample(0.5, 1, 1.0, &fiber).unwrap();
        // mixed pairs have image scatter exactly 1
        let n = fiber.len();
        assert!(tight.len() < n * n);
        assert_eq!(loose.len(), n * n);

        // huge epsilon: the full Cartesian power, via the scatter bound
        let r = two.max_vertex_norm_x();
        let eps = 1.0 * (2.0 * r) * (2.0 * r); // p(p+1)/2 = 1 for p = 1
        let full = two.fibered_product_sample(0.5, 1, eps, &fiber).unwrap();
        assert_eq!(full.len(), n * n);

        // points off the requested fiber are rejected
        let off = two.sample_fiber_points(0.25, 4).unwrap();
        assert!(two.fibered_product_sample(0.5, 1, 0.0, &off).is_err());
    }

    #[test]
    fn betti_examples() {
        // hollow triangle: a circle
        let hollow = LambdaComplex::new(
            vec![v(&[0.0, 0.0], 0.0), v(&[1.0, 0.0], 0.0), v(&[0.0, 1.0], 0.0)],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(hollow.betti(1).ranks, vec![1, 1]);

        // full triangle: contractible
        let full = triangle();
        assert_eq!(full.betti(2).ranks, vec![1, 0, 0]);

        // two isolated vertices
        let dots = LambdaComplex::new(
            vec![v(&[0.0], 0.0), v(&[1.0], 0.0)],
            vec![vec![0], vec![1]],
        )
        .unwrap();
        assert_eq!(dots.betti(0).ranks, vec![2]);
    }

    #[test]
    fn strict_validation_flags_overlap() {
        // two segments crossing in their interiors: not a simplicial complex
        let crossing = LambdaComplex::new(
            vec![
                v(&[0.0, 0.0], 0.0),
                v(&[1.0, 1.0], 0.0),
                v(&[0.0, 1.0], 0.0),
                v(&[1.0, 0.0], 0.0),
            ],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        assert!(crossing.validate_strict(8).is_err());
        assert!(triangle().validate_strict(8).is_ok());
    }
}
