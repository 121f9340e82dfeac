//! End-to-end pipelines: the limit-inequality verification, the
//! piecewise-linear invariant demo, the satellite threshold scan, and the
//! bound-calculator front end.

use crate::error::{Error, Result};
use crate::formula::parse_formula;
use crate::geometry::{
    dist, expanded_diagonal, hausdorff_distance, tuple_scatter_flat, PointCloud,
};
use crate::homology::{
    betti_curve, betti_numbers, component_count, default_scale_grid, geometric_grid,
    BettiCurve, BettiVector, Plateau,
};
use crate::io::FamilyFile;
use crate::simplicial::{scatter_margin, LambdaComplex, CHECK_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Scatter threshold choice for each diagonal order.
#[derive(Debug, Clone)]
pub enum DeltaMode {
    /// Plateau-selected threshold for every order.
    Auto,
    /// Per-order overrides; `None` entries fall back to auto.
    PerOrder(Vec<Option<f64>>),
}

impl DeltaMode {
    fn fixed_for(&self, p: usize) -> Option<f64> {
        match self {
            DeltaMode::Auto => None,
            DeltaMode::PerOrder(v) => v.get(p).copied().flatten(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub lambda_fiber: f64,
    /// Proxy level for the limit; defaults to `lambda_fiber / 50`.
    pub lambda_limit: Option<f64>,
    pub k_max: usize,
    /// Grid points per axis when sampling fibers.
    pub resolution: usize,
    /// Thickening for equality atoms; defaults to twice the grid spacing.
    pub tol: Option<f64>,
    pub seed: u64,
    pub delta: DeltaMode,
    /// Cap on enumerated diagonal tuples.
    pub cap: usize,
    /// If false, exceeding the cap is an error instead of a subsample.
    pub allow_subsample: bool,
    /// Vertex budget for Rips homology.
    pub rips_budget: usize,
    /// Steps in radius scale grids.
    pub scale_steps: usize,
    /// Minimal plateau length as a fraction of the scale-grid steps.
    pub plateau_step_fraction: f64,
    /// Steps in the scatter-threshold grid.
    pub delta_steps: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            lambda_fiber: 0.25,
            lambda_limit: None,
            k_max: 1,
            resolution: 321,
            tol: None,
            seed: 0,
            delta: DeltaMode::Auto,
            cap: 20_000,
            allow_subsample: true,
            rips_budget: 160,
            scale_steps: 40,
            plateau_step_fraction: 0.1,
            delta_steps: 24,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlateauReport {
    pub lo: f64,
    pub hi: f64,
    pub betti: Vec<usize>,
}

impl From<&Plateau> for PlateauReport {
    fn from(p: &Plateau) -> Self {
        PlateauReport { lo: p.lo, hi: p.hi, betti: p.betti.ranks.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CloudReport {
    pub label: String,
    pub lambda: f64,
    pub points: usize,
    pub homology_points: usize,
    pub homology_subsampled: bool,
    pub radius_plateau: PlateauReport,
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalReport {
    pub p: usize,
    pub delta_mode: String,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_plateau: Option<PlateauReport>,
    pub radius: f64,
    /// Total qualifying tuples (decimal string).
    pub tuples_total: String,
    pub tuples_kept: usize,
    pub cap_subsampled: bool,
    pub homology_points: usize,
    pub homology_subsampled: bool,
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityTerm {
    pub p: usize,
    pub q: usize,
    pub value: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub k: usize,
    pub limit_betti: usize,
    pub terms: Vec<InequalityTerm>,
    pub bound: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Timings {
    pub total_ms: u128,
    pub stages: Vec<(String, u128)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub family_label: String,
    pub formula: String,
    pub sample_box: Vec<[f64; 2]>,
    pub lambda_fiber: f64,
    pub lambda_limit: f64,
    pub k_max: usize,
    pub resolution: usize,
    pub tol: f64,
    pub seed: u64,
    pub cap: usize,
    pub rips_budget: usize,
    pub limit_proxy: CloudReport,
    /// The fiber supplying the expanded diagonals; its radius plateau
    /// also fixes the tuple-cloud Rips radius.
    pub fiber: CloudReport,
    /// Hausdorff distance between the proxies at `lambda_limit` and
    /// `lambda_limit / 2`; small values indicate convergence.
    pub convergence_indicator: f64,
    pub diagonals: Vec<DiagonalReport>,
    pub inequalities: Vec<InequalityReport>,
    pub all_inequalities_hold: bool,
    pub timings: Timings,
}

impl VerifyReport {
    /// JSON with timing fields removed; two runs with the same inputs and
    /// seed must agree byte for byte on this form.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(map) = value.as_object_mut() {
            map.remove("timings");
        }
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

/// Run the full limit-inequality pipeline on a family file.
pub fn verify_limit(family: &FamilyFile, opts: &VerifyOptions) -> Result<VerifyReport> {
    let start = Instant::now();
    let mut stages: Vec<(String, u128)> = Vec::new();
    let mut mark = Instant::now();
    let stage = |name: &str, stages: &mut Vec<(String, u128)>, mark: &mut Instant| {
        stages.push((name.to_string(), mark.elapsed().as_millis()));
        *mark = Instant::now();
    };

    let f = parse_formula(&family.formula)?;
    let lambda_fiber = opts.lambda_fiber;
    let lambda_limit = opts.lambda_limit.unwrap_or(lambda_fiber / 50.0);
    if !(0.0 < lambda_limit && lambda_limit < lambda_fiber) {
        return Err(Error::InvalidInput(format!(
            "need 0 < lambda_limit ({lambda_limit}) < lambda_fiber ({lambda_fiber})"
        )));
    }
    let box_: Vec<(f64, f64)> = family.sample_box.iter().map(|b| (b[0], b[1])).collect();
    let spacing = box_
        .iter()
        .map(|(lo, hi)| (hi - lo) / (opts.resolution - 1) as f64)
        .fold(0.0f64, f64::max);
    let tol = opts.tol.unwrap_or(2.0 * spacing);

    let compiled = f.compile();
    let sample = |lambda: f64| -> Result<PointCloud> {
        let c = crate::geometry::sample_fiber_compiled(&compiled, lambda, &box_, opts.resolution, tol)?;
        if c.is_empty() {
            return Err(Error::EmptyCloud(format!("fiber at lambda = {lambda} is empty")));
        }
        Ok(c)
    };
    let limit_cloud = sample(lambda_limit)?;
    let limit_cloud_half = sample(lambda_limit / 2.0)?;
    let fiber_cloud = sample(lambda_fiber)?;
    stage("sample-fibers", &mut stages, &mut mark);

    let convergence = hausdorff_distance(&limit_cloud, &limit_cloud_half)?;
    stage("convergence-indicator", &mut stages, &mut mark);

    let limit_report = cloud_homology("limit-proxy", &limit_cloud, lambda_limit, opts.k_max, opts)?;
    stage("limit-homology", &mut stages, &mut mark);

    let fiber_report = cloud_homology("fiber", &fiber_cloud, lambda_fiber, opts.k_max, opts)?;
    let radius_star =
        (fiber_report.radius_plateau.lo * fiber_report.radius_plateau.hi).sqrt();
    stage("fiber-homology", &mut stages, &mut mark);

    let mut diagonals = Vec::with_capacity(opts.k_max + 1);
    // order zero: single points, scatter is identically zero, the diagonal
    // is the fiber itself at every threshold
    diagonals.push(DiagonalReport {
        p: 0,
        delta_mode: "degenerate".into(),
        delta: 0.0,
        delta_plateau: None,
        radius: radius_star,
        tuples_total: fiber_cloud.len().to_string(),
        tuples_kept: fiber_cloud.len(),
        cap_subsampled: false,
        homology_points: fiber_report.homology_points,
        homology_subsampled: fiber_report.homology_subsampled,
        betti: fiber_report.betti.clone(),
    });

    for p in 1..=opts.k_max {
        let report = diagonal_homology(&fiber_cloud, p, radius_star, opts)?;
        diagonals.push(report);
        stage(&format!("diagonal-p{p}"), &mut stages, &mut mark);
    }

    let mut inequalities = Vec::with_capacity(opts.k_max + 1);
    let mut all_hold = true;
    for k in 0..=opts.k_max {
        let lhs = limit_report.betti.get(k).copied().unwrap_or(0);
        let terms: Vec<InequalityTerm> = (0..=k)
            .map(|p| InequalityTerm {
                p,
                q: k - p,
                value: diagonals[p].betti.get(k - p).copied().unwrap_or(0),
            })
            .collect();
        let bound: usize = terms.iter().map(|t| t.value).sum();
        let holds = lhs <= bound;
        all_hold &= holds;
        inequalities.push(InequalityReport { k, limit_betti: lhs, terms, bound, holds });
    }

    Ok(VerifyReport {
        family_label: family_label(family),
        formula: family.formula.clone(),
        sample_box: family.sample_box.clone(),
        lambda_fiber,
        lambda_limit,
        k_max: opts.k_max,
        resolution: opts.resolution,
        tol,
        seed: opts.seed,
        cap: opts.cap,
        rips_budget: opts.rips_budget,
        limit_proxy: limit_report,
        fiber: fiber_report,
        convergence_indicator: convergence,
        diagonals,
        inequalities,
        all_inequalities_hold: all_hold,
        timings: Timings { total_ms: start.elapsed().as_millis(), stages },
    })
}

fn family_label(family: &FamilyFile) -> String {
    family.formula.chars().take(60).collect()
}

/// Betti vector of a cloud on its first stable radius plateau. The grid
/// is geometric, so plateau length is measured in grid steps (log scale):
/// an absolute width rule would favor the degenerate large-radius regime.
fn cloud_homology(
    label: &str,
    cloud: &PointCloud,
    lambda: f64,
    max_k: usize,
    opts: &VerifyOptions,
) -> Result<CloudReport> {
    let (sub, subsampled) = cloud.subsample_farthest(opts.rips_budget, opts.seed);
    let grid = default_scale_grid(&sub, opts.scale_steps)?;
    let curve = betti_curve(&sub, &grid, max_k)?;
    let plateau = first_plateau_by_steps(&curve, opts.plateau_step_fraction, true)?;
    Ok(CloudReport {
        label: label.to_string(),
        lambda,
        points: cloud.len(),
        homology_points: sub.len(),
        homology_subsampled: subsampled,
        radius_plateau: PlateauReport::from(&plateau),
        betti: plateau.betti.ranks,
    })
}

/// Betti vector of the order-`p` expanded diagonal, at a fixed threshold
/// or on a plateau over a geometric threshold grid. The tuple-cloud Rips
/// radius is coupled to the fiber radius: blockwise-close tuples stay
/// within `radius * sqrt(p+1)`.
fn diagonal_homology(
    fiber: &PointCloud,
    p: usize,
    radius_star: f64,
    opts: &VerifyOptions,
) -> Result<DiagonalReport> {
    let radius = radius_star * ((p + 1) as f64).sqrt();
    let max_k = opts.k_max - p;
    let betti_at = |delta: f64| -> Result<(BettiVector, u64, usize, bool, usize, bool)> {
        let tuples = expanded_diagonal(fiber, p, delta, opts.cap, opts.seed);
        if tuples.subsampled && !opts.allow_subsample {
            return Err(Error::InvalidInput(format!(
                "{} tuples exceed the cap {} and subsampling is disabled",
                tuples.total_matches, opts.cap
            )));
        }
        let cloud = tuples.as_point_cloud();
        let (sub, subsampled) = cloud.subsample_farthest(opts.rips_budget, opts.seed);
        let betti = betti_numbers(&sub, radius, max_k);
        Ok((
            betti,
            tuples.total_matches,
            tuples.len(),
            tuples.subsampled,
            sub.len(),
            subsampled,
        ))
    };

    if let Some(delta) = opts.delta.fixed_for(p) {
        let (betti, total, kept, capped, hpts, hsub) = betti_at(delta)?;
        return Ok(DiagonalReport {
            p,
            delta_mode: "fixed".into(),
            delta,
            delta_plateau: None,
            radius,
            tuples_total: total.to_string(),
            tuples_kept: kept,
            cap_subsampled: capped,
            homology_points: hpts,
            homology_subsampled: hsub,
            betti: betti.ranks,
        });
    }

    // automatic threshold: scan a geometric grid and take the first
    // stable run of Betti vectors
    let min_dist = fiber
        .min_positive_distance()
        .ok_or_else(|| Error::EmptyCloud("fiber has no two distinct points".into()))?;
    let diam = fiber.diameter();
    let lo = (2.0 * min_dist).powi(2);
    let hi = ((diam / 2.0).powi(2)).max(lo * 16.0);
    let grid = geometric_grid(lo, hi, opts.delta_steps);
    let evals: Vec<Result<(BettiVector, u64, usize, bool, usize, bool)>> =
        grid.par_iter().map(|&d| betti_at(d)).collect();
    let mut betti_list = Vec::with_capacity(grid.len());
    for e in evals {
        betti_list.push(e?);
    }
    let curve = BettiCurve {
        scales: grid.clone(),
        betti: betti_list.iter().map(|(b, ..)| b.clone()).collect(),
    };
    let plateau = first_plateau_by_steps(&curve, opts.plateau_step_fraction, false)?;
    let delta = (plateau.lo * plateau.hi).sqrt();
    let (betti, total, kept, capped, hpts, hsub) = betti_at(delta)?;
    if betti != plateau.betti {
        // the plateau midpoint must reproduce the plateau's Betti vector
        return Err(Error::NoPlateau);
    }
    Ok(DiagonalReport {
        p,
        delta_mode: "auto".into(),
        delta,
        delta_plateau: Some(PlateauReport::from(&plateau)),
        radius,
        tuples_total: total.to_string(),
        tuples_kept: kept,
        cap_subsampled: capped,
        homology_points: hpts,
        homology_subsampled: hsub,
        betti: betti.ranks,
    })
}

/// First run of constant Betti vectors covering at least
/// `fraction * (len - 1)` grid steps. Geometric grids measure plateau
/// length in steps (log scale), not in absolute width. Radius curves set
/// `skip_leading`: the run touching the smallest scale is sampling noise
/// (isolated points) unless the whole curve is constant.
fn first_plateau_by_steps(
    curve: &BettiCurve,
    fraction: f64,
    skip_leading: bool,
) -> Result<Plateau> {
    let n = curve.betti.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty Betti curve".into()));
    }
    let needed = ((fraction * (n - 1) as f64).ceil() as usize).max(1);
    let mut start = 0usize;
    for i in 1..=n {
        if i == n || curve.betti[i] != curve.betti[start] {
            let whole_curve = start == 0 && i == n;
            if i - 1 - start >= needed && (!skip_leading || start > 0 || whole_curve) {
                return Ok(Plateau {
                    lo: curve.scales[start],
                    hi: curve.scales[i - 1],
                    betti: curve.betti[start].clone(),
                });
            }
            start = i;
        }
    }
    Err(Error::NoPlateau)
}

// ---------------------------------------------------------------------------
// Piecewise-linear invariant demo
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RetractDemoOptions {
    /// Fiber levels as fractions of the threshold level.
    pub level_fractions: Vec<f64>,
    /// Tuple order for the scatter-inclusion checks.
    pub p: usize,
    pub samples_per_simplex: usize,
    /// Cap on sampled tuples per level.
    pub tuple_budget: usize,
    /// Image-scatter thresholds for the fibered-product table, as
    /// fractions of the scatter range `p(p+1)/2 (2R)^2`.
    pub epsilon_fractions: Vec<f64>,
    pub seed: u64,
}

impl Default for RetractDemoOptions {
    fn default() -> Self {
        RetractDemoOptions {
            level_fractions: vec![0.1, 0.25, 0.5, 0.75, 0.9],
            p: 1,
            samples_per_simplex: 24,
            tuple_budget: 4000,
            epsilon_fractions: vec![0.0, 0.01, 0.1, 1.0],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub samples: usize,
    pub worst_residual: f64,
    pub pass: bool,
}

/// One fibered-product sample: tuples of fiber points whose retraction
/// images have scatter at most `epsilon`, and the count of those that
/// also stay within the margin-inflated scatter ball (all of them, when
/// the inclusion holds).
#[derive(Debug, Clone, Serialize)]
pub struct FiberedProductLine {
    pub lambda: f64,
    pub epsilon: f64,
    pub margin: f64,
    pub fiber_points: usize,
    pub tuples: usize,
    pub tuples_within_margin: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RetractDemoReport {
    pub label: String,
    pub vertices: usize,
    pub simplices: usize,
    pub threshold_level: f64,
    pub levels: Vec<f64>,
    pub invariants: Vec<InvariantResult>,
    pub fibered_products: Vec<FiberedProductLine>,
    pub all_pass: bool,
}

struct Residual {
    name: &'static str,
    samples: usize,
    worst: f64,
}

impl Residual {
    fn new(name: &'static str) -> Self {
        Residual { name, samples: 0, worst: 0.0 }
    }

    fn record(&mut self, r: f64) {
        self.samples += 1;
        if r > self.worst {
            self.worst = r;
        }
    }

    fn finish(self) -> InvariantResult {
        InvariantResult {
            name: self.name.to_string(),
            samples: self.samples,
            worst_residual: self.worst,
            pass: self.worst <= CHECK_TOL,
        }
    }
}

/// Exercise every identity of the retraction machinery on a complex over
/// a grid of fiber levels, reporting worst-case residuals.
pub fn retract_demo(
    label: &str,
    k: &LambdaComplex,
    opts: &RetractDemoOptions,
) -> Result<RetractDemoReport> {
    let l0 = k.lambda_min()?;
    let levels: Vec<f64> = opts.level_fractions.iter().map(|f| f * l0).collect();
    for &l in &levels {
        if !(0.0 < l && l < l0) {
            return Err(Error::InvalidInput(format!("level {l} outside (0, {l0})")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut idempotence = Residual::new("retract-idempotence");
    let mut constancy = Residual::new("retraction-segment-constancy");
    let mut factorization = Residual::new("fiber-map-factorization");
    let mut bijectivity = Residual::new("level-homeomorphism-bijectivity");
    let mut displacement = Residual::new("displacement-bound");
    let mut lift = Residual::new("lift-round-trip");
    let mut inclusion_up = Residual::new("scatter-inclusion-forward");
    let mut inclusion_down = Residual::new("scatter-inclusion-backward");
    let mut euler = Residual::new("euler-characteristic");

    let radius_x = k.max_vertex_norm_x();

    for &lambda in &levels {
        let fiber = k.sample_fiber_points(lambda, opts.samples_per_simplex)?;

        // per-point displacement against the analytic bound; the sampled
        // max also feeds the scatter margin below
        let analytic = 2.0 * (lambda / l0) * k.max_vertex_norm_total();
        let mut max_disp = 0.0f64;
        for pt in &fiber {
            let image = k.retract(pt)?;
            let d = dist(&k.coords_x(pt), &k.coords_x(&image));
            max_disp = max_disp.max(d);
            displacement.record((d - analytic).max(0.0));
        }

        for pt in &fiber {
            let image = k.retract(pt)?;
            // idempotence
            let twice = k.retract(&image)?;
            idempotence.record(dist(&k.coords_x(&image), &k.coords_x(&twice)));

            // constancy along the retraction segment
            let t: f64 = rng.gen_range(0.05..0.95);
            let mid = k.level_homeomorphism(pt, lambda, t * lambda)?;
            let image_mid = k.retract(&mid)?;
            constancy.record(dist(&k.coords_x(&image), &k.coords_x(&image_mid)));

            for &frac in &[0.25, 0.5] {
                let lambda_to = frac * lambda;
                let h = k.level_homeomorphism(pt, lambda, lambda_to)?;
                // factorization through the lower fiber
                let image_low = k.fiber_map(&h, lambda_to)?;
                factorization.record(dist(&k.coords_x(&image), &k.coords_x(&image_low)));
                // explicit inverse undoes the slide
                let back = k.level_homeomorphism_inverse(&h, lambda, lambda_to)?;
                let d_space = dist(&k.coords_x(&back), &k.coords_x(pt));
                let d_level = (k.level(&back) - lambda).abs();
                bijectivity.record(d_space.max(d_level));
            }
        }

        // lift round-trip over base samples
        for zeta in k.sample_base_points(opts.samples_per_simplex) {
            match k.lift_to_fiber(&zeta, lambda) {
                Ok(tau) => {
                    let back = k.fiber_map(&tau, lambda)?;
                    lift.record(dist(&k.coords_x(&back), &k.coords_x(&zeta)));
                }
                Err(Error::NoExtendingSimplex) => {}
                Err(e) => return Err(e),
            }
        }

        // scatter inclusions on sampled tuples: the image scatter can
        // drift from the point scatter by at most the margin
        let margin = scatter_margin(opts.p, radius_x, max_disp);
        let arity = opts.p + 1;
        let images: Vec<Vec<f64>> = fiber
            .iter()
            .map(|pt| k.retract(pt).map(|i| k.coords_x(&i)))
            .collect::<Result<_>>()?;
        let xs: Vec<Vec<f64>> = fiber.iter().map(|pt| k.coords_x(pt)).collect();
        let total = (fiber.len() as u64).pow(arity as u32);
        let stride = (total / opts.tuple_budget as u64).max(1);
        let mut code = 0u64;
        while code < total {
            let mut idx = Vec::with_capacity(arity);
            let mut c = code;
            for _ in 0..arity {
                idx.push((c % fiber.len() as u64) as usize);
                c /= fiber.len() as u64;
            }
            let mut flat_x = Vec::new();
            let mut flat_f = Vec::new();
            for &i in &idx {
                flat_x.extend_from_slice(&xs[i]);
                flat_f.extend_from_slice(&images[i]);
            }
            let rho = tuple_scatter_flat(&flat_x, k.dim());
            let rho_img = tuple_scatter_flat(&flat_f, k.dim());
            inclusion_up.record((rho_img - rho - margin).max(0.0));
            inclusion_down.record((rho - rho_img - margin).max(0.0));
            code += stride;
        }
    }

    // Euler characteristic of the whole complex against its Betti ranks
    {
        let top = k.simplices().iter().map(|s| s.len() - 1).max().unwrap_or(0);
        let betti = k.betti(top);
        let chi_b: i64 = betti
            .ranks
            .iter()
            .enumerate()
            .map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        let chi_s: i64 = k
            .simplices()
            .iter()
            .map(|s| if (s.len() - 1) % 2 == 0 { 1i64 } else { -1i64 })
            .sum();
        euler.record((chi_b - chi_s).abs() as f64);
    }

    // fibered-product table on representative levels: sampled tuples with
    // image scatter below each threshold, against the margin-inflated
    // point-scatter ball
    let mut fibered_products = Vec::new();
    {
        let scatter_range = (opts.p * (opts.p + 1)) as f64 / 2.0
            * (2.0 * radius_x) * (2.0 * radius_x);
        let mut picks = vec![0usize];
        if levels.len() > 2 {
            picks.push(levels.len() / 2);
        }
        if levels.len() > 1 {
            picks.push(levels.len() - 1);
        }
        for &li in &picks {
            let lambda = levels[li];
            let mut fiber = k.sample_fiber_points(lambda, opts.samples_per_simplex)?;
            // keep the Cartesian power enumerable
            let arity = opts.p + 1;
            while fiber.len().pow(arity as u32) > 40_000 {
                fiber = fiber.iter().step_by(2).cloned().collect();
            }
            let mut max_disp = 0.0f64;
            for pt in &fiber {
                let image = k.retract(pt)?;
                max_disp = max_disp.max(dist(&k.coords_x(pt), &k.coords_x(&image)));
            }
            let margin = scatter_margin(opts.p, radius_x, max_disp);
            for &frac in &opts.epsilon_fractions {
                let epsilon = frac * scatter_range;
                let w = k.fibered_product_sample(lambda, opts.p, epsilon, &fiber)?;
                let within = w
                    .tuples
                    .iter()
                    .filter(|t| tuple_scatter_flat(t, k.dim()) <= epsilon + margin + CHECK_TOL)
                    .count();
                fibered_products.push(FiberedProductLine {
                    lambda,
                    epsilon,
                    margin,
                    fiber_points: fiber.len(),
                    tuples: w.len(),
                    tuples_within_margin: within,
                });
            }
        }
    }

    let invariants: Vec<InvariantResult> = vec![
        idempotence.finish(),
        constancy.finish(),
        factorization.finish(),
        bijectivity.finish(),
        displacement.finish(),
        lift.finish(),
        inclusion_up.finish(),
        inclusion_down.finish(),
        euler.finish(),
    ];
    let all_pass = invariants.iter().all(|i| i.pass)
        && fibered_products.iter().all(|l| l.tuples == l.tuples_within_margin);
    Ok(RetractDemoReport {
        label: label.to_string(),
        vertices: k.vertices().len(),
        simplices: k.simplices().len(),
        threshold_level: l0,
        levels,
        invariants,
        fibered_products,
        all_pass,
    })
}

// ---------------------------------------------------------------------------
// Satellite threshold scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdScanReport {
    pub lambda: f64,
    pub segment_points: usize,
    pub radius: f64,
    pub grid_step: f64,
    pub baseline_components: usize,
    /// First scatter threshold where the component count changes.
    pub observed_threshold: Option<f64>,
    /// Squared satellite distance: where the metric actually transitions.
    pub squared_metric_threshold: f64,
    /// The raw distance, for comparison; the scan shows the transition
    /// does NOT happen here.
    pub linear_threshold: f64,
    pub matches_squared_metric: bool,
    pub matches_linear_threshold: bool,
}

/// Scan the order-1 expanded diagonal of the segment-with-satellites
/// fixture across a linear scatter grid and locate the first change in
/// the number of connected components.
pub fn satellite_threshold_scan(
    lambda: f64,
    segment_points: usize,
    steps: usize,
    cap: usize,
    seed: u64,
) -> Result<ThresholdScanReport> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::InvalidInput("lambda must lie in (0, 1)".into()));
    }
    let h = 1.0 / (segment_points - 1) as f64;
    if std::f64::consts::SQRT_2 * h >= lambda {
        return Err(Error::InvalidInput(format!(
            "segment spacing {h} too coarse to isolate satellites at lambda {lambda}"
        )));
    }
    // connect consecutive diagonal tuples, keep satellites separate
    let radius = (std::f64::consts::SQRT_2 * h + lambda) / 2.0;
    let cloud = crate::fixtures::segment_with_satellites(lambda, segment_points);

    let step = 1.5 * lambda / (steps - 1) as f64;
    let grid: Vec<f64> = (0..steps).map(|i| i as f64 * step).collect();
    let counts: Vec<usize> = grid
        .par_iter()
        .map(|&delta| {
            let tuples = expanded_diagonal(&cloud, 1, delta, cap, seed);
            component_count(&tuples.as_point_cloud(), radius)
        })
        .collect();

    let baseline = counts[0];
    let observed = grid
        .iter()
        .zip(&counts)
        .find(|(_, &c)| c != baseline)
        .map(|(&d, _)| d);
    let squared = lambda * lambda;
    let eps = 1e-12;
    let matches = |target: f64| -> bool {
        observed.map_or(false, |obs| (obs - target).abs() <= step + eps)
    };
    Ok(ThresholdScanReport {
        lambda,
        segment_points,
        radius,
        grid_step: step,
        baseline_components: baseline,
        observed_threshold: observed,
        squared_metric_threshold: squared,
        linear_threshold: lambda,
        matches_squared_metric: matches(squared),
        matches_linear_threshold: matches(lambda),
    })
}

// ---------------------------------------------------------------------------
// Bound-calculator front end
// ---------------------------------------------------------------------------

/// Flag bundle for the named bound formulas.
#[derive(Debug, Clone, Default)]
pub struct BoundFlags {
    pub k: u64,
    pub n: u64,
    pub d: u64,
    pub s: u64,
    pub ell: u64,
    pub alpha: u64,
    pub beta: u64,
    pub betas: Option<Vec<u64>>,
    pub c: u64,
    pub p: u64,
    pub p_closed: bool,
}

/// Evaluate a bound formula by name into the CLI's JSON shape.
pub fn evaluate_bound(name: &str, flags: &BoundFlags) -> Result<serde_json::Value> {
    use crate::bounds::*;
    use serde_json::json;
    let c = flags.c.max(1);
    let pf = PfaffFormat {
        n: flags.n,
        ell: flags.ell,
        alpha: flags.alpha,
        beta: flags.beta,
        s: flags.s,
    };
    let (inputs, bound) = match name {
        "khovanskii" => {
            let betas = flags
                .betas
                .clone()
                .ok_or_else(|| Error::InvalidInput("khovanskii needs --betas".into()))?;
            let b = khovanskii_bound(flags.ell, flags.alpha, &betas)?;
            (json!({"ell": flags.ell, "alpha": flags.alpha, "betas": betas}), b)
        }
        "fewnomial" => (
            json!({"n": flags.n, "ell": flags.ell}),
            fewnomial_bound(flags.n, flags.ell),
        ),
        "khovanskii-domain" => (
            json!({"n": flags.n, "ell": flags.ell, "alpha": flags.alpha, "beta": flags.beta, "c": c}),
            khovanskii_domain_bound(flags.n, flags.ell, flags.alpha, flags.beta, c),
        ),
        "basu" => (
            json!({"n": flags.n, "d": flags.d, "s": flags.s, "c": c}),
            basu_bound(flags.n, flags.d, flags.s, c),
        ),
        "gv" => (
            json!({"n": flags.n, "d": flags.d, "s": flags.s, "c": c}),
            gv_bound(flags.n, flags.d, flags.s, c),
        ),
        "pclosed-pfaffian" => (
            json!({"format": pf, "c": c}),
            pclosed_pfaffian_bound(pf, c),
        ),
        "qf-pfaffian" => (json!({"format": pf, "c": c}), qf_pfaffian_bound(pf, c)),
        "hausdorff-limit" => (
            json!({"k": flags.k, "n": flags.n, "d": flags.d, "s": flags.s, "c": c, "p_closed": flags.p_closed}),
            hausdorff_limit_bound_alg(flags.k, flags.n, flags.d, flags.s, c, flags.p_closed),
        ),
        "relative-closure" => (
            json!({"k": flags.k, "format": pf, "c": c, "p_closed": flags.p_closed}),
            relative_closure_bound(flags.k, pf, c, flags.p_closed),
        ),
        "diagonal-format-alg" => {
            let f = crate::formula::AlgFormat { n: flags.n, d: flags.d, s: flags.s };
            let out = diagonal_format_alg(f, flags.p);
            return Ok(json!({
                "formula": name,
                "inputs": {"format": f, "p": flags.p},
                "value": out,
            }));
        }
        "diagonal-format-pfaff" => {
            let out = diagonal_format_pfaff(pf, flags.p);
            return Ok(json!({
                "formula": name,
                "inputs": {"format": pf, "p": flags.p},
                "value": out,
            }));
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown bound formula `{other}` (expected one of khovanskii, fewnomial, \
                 khovanskii-domain, basu, gv, pclosed-pfaffian, qf-pfaffian, hausdorff-limit, \
                 relative-closure, diagonal-format-alg, diagonal-format-pfaff)"
            )));
        }
    };
    Ok(serde_json::json!({
        "formula": name,
        "inputs": inputs,
        "constant_assumed": bound.constant_assumed,
        "value": bound.value.to_string(),
        "k_raised_to_one": bound.k_raised_to_one,
    }))
}

/// Quick textual summary of a verify report: one line per inequality.
pub fn summarize_inequalities(report: &VerifyReport) -> String {
    let mut out = String::new();
    for ineq in &report.inequalities {
        let terms = ineq
            .terms
            .iter()
            .map(|t| format!("b_{}(D^{})={}", t.q, t.p, t.value))
            .collect::<Vec<_>>()
            .join(" + ");
        out.push_str(&format!(
            "b_{}(limit) = {} <= {} = {}  [{}]\n",
            ineq.k,
            ineq.limit_betti,
            terms,
            ineq.bound,
            if ineq.holds { "ok" } else { "VIOLATED" }
        ));
    }
    out
}
