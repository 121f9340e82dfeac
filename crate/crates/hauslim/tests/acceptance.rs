//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Every threshold is pinned here, not tuned at runtime.

use hauslim::bounds::*;
use hauslim::fixtures;
use hauslim::formula::AlgFormat;
use hauslim::geometry::{hausdorff_distance, PointCloud};
use hauslim::homology::{betti_curve, betti_from_simplices, default_scale_grid, stable_plateau};
use hauslim::pipeline::{
    retract_demo, satellite_threshold_scan, verify_limit, RetractDemoOptions, VerifyOptions,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

// -------------------------------------------------------------------------
// criterion 1: the limit inequality holds end to end on both families
// -------------------------------------------------------------------------

#[test]
fn criterion_1_main_inequality_on_both_families() {
    for (name, family) in [
        ("circle", fixtures::circle_family()),
        ("two-circle wedge", fixtures::two_circle_family()),
    ] {
        let opts = VerifyOptions { lambda_fiber: 0.25, k_max: 1, seed: 0, ..Default::default() };
        let start = Instant::now();
        let report = verify_limit(&family, &opts).expect(name);
        let secs = start.elapsed().as_secs_f64();

        assert!(report.limit_proxy.points >= 64, "{name}: fiber too sparse");
        for d in &report.diagonals {
            if d.p == 0 {
                assert!(d.tuples_kept >= 64, "{name}: order-0 diagonal too sparse");
            }
        }
        assert!(
            report.all_inequalities_hold,
            "{name}: inequality violated: {:?}",
            report.inequalities
        );
        assert!(secs < 60.0, "{name}: took {secs:.1}s");
        println!(
            "[criterion 1] PASS {name}: limit betti {:?}, inequalities hold, {secs:.1}s",
            report.limit_proxy.betti
        );
    }
}

// -------------------------------------------------------------------------
// criterion 2: the satellite-pair threshold sits at lambda^2, not lambda
// -------------------------------------------------------------------------

#[test]
fn criterion_2_satellite_threshold_regression() {
    for lambda in [0.2, 0.1, 0.05] {
        let scan = satellite_threshold_scan(lambda, 48, 151, 20_000, 0).unwrap();
        let observed = scan.observed_threshold.expect("a transition must be observed");
        assert!(
            scan.matches_squared_metric,
            "lambda {lambda}: observed {observed} not within one step of {}",
            scan.squared_metric_threshold
        );
        assert!(
            !scan.matches_linear_threshold,
            "lambda {lambda}: observed {observed} should not match the linear threshold"
        );
        println!(
            "[criterion 2] PASS lambda={lambda}: transition at {observed:.5} ~ lambda^2={:.5} \
             (grid step {:.5}); linear threshold {lambda} rejected",
            scan.squared_metric_threshold, scan.grid_step
        );
    }
}

// -------------------------------------------------------------------------
// criterion 3: the retraction machinery passes its invariants on three
// fixtures with at least a thousand sampled points each
// -------------------------------------------------------------------------

#[test]
fn criterion_3_simplicial_invariant_suite() {
    let configs = [
        ("single-edge", fixtures::single_edge_complex(), 1000usize, 4usize),
        ("triangle-with-base-edge", fixtures::triangle_complex(), 40, 32),
        ("two-triangle-fan", fixtures::two_triangle_fan_complex(), 40, 32),
    ];
    for (name, complex, level_count, per_simplex) in configs {
        let opts = RetractDemoOptions {
            level_fractions: (1..=level_count)
                .map(|i| i as f64 / (level_count + 1) as f64)
                .collect(),
            p: 1,
            samples_per_simplex: per_simplex,
            tuple_budget: 4000,
            epsilon_fractions: vec![0.0, 0.01, 0.1, 1.0],
            seed: 0,
        };
        let report = retract_demo(name, &complex, &opts).unwrap();
        assert!(report.all_pass, "{name}: {:#?}", report.invariants);
        for inv in &report.invariants {
            assert!(
                inv.worst_residual <= 1e-9,
                "{name}/{}: residual {}",
                inv.name,
                inv.worst_residual
            );
            if inv.name != "euler-characteristic" {
                assert!(
                    inv.samples >= 1000,
                    "{name}/{}: only {} samples",
                    inv.name,
                    inv.samples
                );
            }
        }
        let worst = report
            .invariants
            .iter()
            .map(|i| i.worst_residual)
            .fold(0.0f64, f64::max);
        println!(
            "[criterion 3] PASS {name}: {} invariants, worst residual {worst:.2e}",
            report.invariants.len()
        );
    }
}

// -------------------------------------------------------------------------
// criterion 4: reduction agrees with a brute-force rank oracle
// -------------------------------------------------------------------------

/// Dense GF(2) Gaussian elimination; no sharing with the library path.
fn oracle_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let (a, b) = if r < rank {
                    let (lo, hi) = rows.split_at_mut(rank);
                    (&mut lo[r], &hi[0])
                } else {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&mut hi[0], &lo[rank])
                };
                for (x, y) in a.iter_mut().zip(b) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn oracle_betti(dims: &[Vec<Vec<u32>>]) -> Vec<usize> {
    let top = dims.len() - 1;
    let mut ranks = vec![0usize; top + 2];
    for q in 1..=top {
        let index: std::collections::HashMap<&[u32], usize> = dims[q - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let rows: Vec<Vec<bool>> = dims[q]
            .iter()
            .map(|s| {
                let mut row = vec![false; dims[q - 1].len()];
                for omit in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(omit);
                    row[index[face.as_slice()]] = true;
                }
                row
            })
            .collect();
        // rank of the boundary matrix (rows are simplices, transposition
        // does not change rank)
        ranks[q] = oracle_rank(rows);
    }
    (0..=top)
        .map(|q| {
            let r_q = if q == 0 { 0 } else { ranks[q] };
            dims[q].len() - r_q - ranks[q + 1]
        })
        .collect()
}

fn close_faces(maximal: &[&[u32]]) -> Vec<Vec<Vec<u32>>> {
    use std::collections::BTreeSet;
    let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
    fn insert(s: &[u32], all: &mut BTreeSet<Vec<u32>>) {
        if s.is_empty() || all.contains(s) {
            return;
        }
        all.insert(s.to_vec());
        for omit in 0..s.len() {
            let mut f = s.to_vec();
            f.remove(omit);
            insert(&f, all);
        }
    }
    for s in maximal {
        let mut t = s.to_vec();
        t.sort_unstable();
        insert(&t, &mut all);
    }
    let top = all.iter().map(|s| s.len() - 1).max().unwrap();
    let mut dims = vec![Vec::new(); top + 1];
    for s in all {
        dims[s.len() - 1].push(s);
    }
    for d in &mut dims {
        d.sort();
    }
    dims
}

#[test]
fn criterion_4_homology_matches_oracle() {
    let mut corpus: Vec<(String, Vec<Vec<Vec<u32>>>)> = Vec::new();

    corpus.push(("circle-4".into(), close_faces(&[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])));
    corpus.push(("segment".into(), close_faces(&[&[0, 1], &[1, 2]])));
    corpus.push(("two-points".into(), close_faces(&[&[0], &[1]])));
    corpus.push(("filled-triangle".into(), close_faces(&[&[0, 1, 2]])));
    corpus.push(("solid-tetra".into(), close_faces(&[&[0, 1, 2, 3]])));
    corpus.push((
        "sphere".into(),
        close_faces(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]),
    ));
    corpus.push((
        "wedge-of-circles".into(),
        close_faces(&[&[0, 1], &[1, 2], &[0, 2], &[0, 3], &[3, 4], &[0, 4]]),
    ));
    corpus.push((
        "torus".into(),
        close_faces(&[
            &[0, 7, 3], &[3, 8, 4], &[4, 2, 0], &[2, 0, 7], &[7, 3, 8], &[8, 4, 2],
            &[2, 5, 7], &[7, 6, 8], &[8, 1, 2], &[1, 2, 5], &[5, 7, 6], &[6, 8, 1],
            &[1, 3, 5], &[5, 4, 6], &[6, 0, 1], &[1, 0, 3], &[5, 3, 4], &[6, 4, 0],
        ]),
    ));
    corpus.push((
        "circle-x-segment".into(),
        close_faces(&[
            &[0, 1, 4], &[1, 4, 5], &[1, 2, 5], &[2, 5, 3], &[2, 0, 3], &[0, 3, 4],
        ]),
    ));

    // random Rips complexes over random clouds
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut made = 0;
    while made < 150 {
        let n = rng.gen_range(3..=10);
        let dim = rng.gen_range(1..=3);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0f64)).collect())
            .collect();
        let cloud = PointCloud::new(dim, pts).unwrap();
        let radius = rng.gen_range(0.1..1.8);
        let max_dim = rng.gen_range(1..=3);
        let complex = hauslim::homology::rips_complex(&cloud, radius, max_dim);
        if complex.simplex_count() > 200 || complex.dims.len() < 2 {
            continue;
        }
        corpus.push((format!("rips-{made}"), complex.dims));
        made += 1;
    }

    let expected: &[(&str, &[usize])] = &[
        ("circle-4", &[1, 1]),
        ("two-points", &[2]),
        ("filled-triangle", &[1, 0, 0]),
        ("solid-tetra", &[1, 0, 0, 0]),
        ("sphere", &[1, 0, 1]),
        ("wedge-of-circles", &[1, 2]),
        ("torus", &[1, 2, 1]),
        ("circle-x-segment", &[1, 1, 0]),
    ];

    let mut checked = 0;
    for (name, dims) in &corpus {
        let total: usize = dims.iter().map(Vec::len).sum();
        assert!(total <= 200, "{name} exceeds the corpus size bound");
        let top = dims.len() - 1;
        let fast = betti_from_simplices(dims, top);
        let slow = oracle_betti(dims);
        assert_eq!(fast, slow, "{name}: reduction disagrees with the oracle");
        if let Some((_, want)) = expected.iter().find(|(n, _)| n == name) {
            assert_eq!(&fast, want, "{name}: known Betti vector");
        }
        checked += 1;
    }

    // the 64-point circle lands on (1,1) on its widest plateau
    let circle = fixtures::circle_points(64);
    let grid = default_scale_grid(&circle, 32).unwrap();
    let curve = betti_curve(&circle, &grid, 1).unwrap();
    let plateau = stable_plateau(&curve, 0.1).unwrap();
    assert_eq!(plateau.betti.ranks, vec![1, 1]);

    println!(
        "[criterion 4] PASS: {checked} complexes agree with the brute-force oracle; \
         64-point circle plateau betti (1,1)"
    );
}

// -------------------------------------------------------------------------
// criterion 5: Hausdorff distance matches the exhaustive oracle exactly
// -------------------------------------------------------------------------

fn oracle_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let directed = |x: &PointCloud, y: &PointCloud| -> f64 {
        x.points
            .iter()
            .map(|p| {
                y.points
                    .iter()
                    .map(|q| {
                        p.iter()
                            .zip(q)
                            .map(|(u, v)| (u - v) * (u - v))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b) + directed(b, a)
}

#[test]
fn criterion_5_hausdorff_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for trial in 0..100 {
        let dim = rng.gen_range(1..=3);
        let mk = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=200);
            PointCloud::new(
                dim,
                (0..n)
                    .map(|_| (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect())
                    .collect(),
            )
            .unwrap()
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let got = hausdorff_distance(&a, &b).unwrap();
        let want = oracle_hausdorff(&a, &b);
        assert_eq!(got, want, "trial {trial}");
        assert_eq!(got, hausdorff_distance(&b, &a).unwrap(), "symmetry, trial {trial}");
        let c = mk(&mut rng);
        let ac = hausdorff_distance(&a, &c).unwrap();
        let cb = hausdorff_distance(&c, &b).unwrap();
        assert!(got <= ac + cb + 1e-12, "triangle inequality, trial {trial}");
    }
    println!("[criterion 5] PASS: 100 random pairs match the exhaustive oracle to the bit");
}

// -------------------------------------------------------------------------
// criterion 6: bound calculators are exact, monotone, and overflow-free
// -------------------------------------------------------------------------

#[test]
fn criterion_6_bound_calculators() {
    // pinned spot checks
    assert_eq!(khovanskii_bound(2, 1, &[2]).unwrap().value, BigUint::from(36u32));
    assert_eq!(fewnomial_bound(2, 2).value, BigUint::from(18u32));
    assert_eq!(
        diagonal_format_alg(AlgFormat { n: 2, d: 3, s: 4 }, 1),
        AlgFormat { n: 4, d: 3, s: 9 }
    );

    // monotonicity: sweep each argument over 0..=5 while the remaining
    // arguments range over 1..=5 (degenerate zero bases such as 0^n are
    // not monotone in the exponent and are excluded by construction)
    let ctx = [1u64, 3, 5];
    let sweep = |name: &str, f: &dyn Fn(u64) -> BigUint| {
        let mut last = f(0);
        for v in 1..=5u64 {
            let cur = f(v);
            assert!(cur >= last, "{name} decreased at {v}");
            last = cur;
        }
    };

    for &a in &ctx {
        for &b in &ctx {
            for &c in &ctx {
                sweep("khovanskii/ell", &|v| khovanskii_bound(v, a, &[b, c]).unwrap().value);
                sweep("khovanskii/alpha", &|v| khovanskii_bound(a, v, &[b, c]).unwrap().value);
                sweep("khovanskii/beta", &|v| {
                    khovanskii_bound(a, b, &[v.max(1), c]).unwrap().value
                });
                sweep("fewnomial/n", &|v| fewnomial_bound(v, a).value);
                sweep("fewnomial/ell", &|v| fewnomial_bound(a, v).value);
                for &d in &ctx {
                    sweep("domain/n", &|v| khovanskii_domain_bound(v, a, b, c, d).value);
                    sweep("domain/ell", &|v| khovanskii_domain_bound(a, v, b, c, d).value);
                    sweep("domain/alpha", &|v| khovanskii_domain_bound(a, b, v, c, d).value);
                    sweep("domain/beta", &|v| khovanskii_domain_bound(a, b, c, v, d).value);
                    sweep("domain/c", &|v| {
                        khovanskii_domain_bound(a, b, c, d, v.max(1)).value
                    });
                    sweep("basu/n", &|v| basu_bound(v, a, b, c).value);
                    sweep("basu/d", &|v| basu_bound(a, v, b, c).value);
                    sweep("basu/s", &|v| basu_bound(a, b, v, c).value);
                    sweep("basu/c", &|v| basu_bound(a, b, c, v.max(1)).value);
                    sweep("gv/n", &|v| gv_bound(v, a, b, c).value);
                    sweep("gv/d", &|v| gv_bound(a, v, b, c).value);
                    sweep("gv/s", &|v| gv_bound(a, b, v, c).value);
                    sweep("gv/c", &|v| gv_bound(a, b, c, v.max(1)).value);
                    for &e in &[1u64, 4] {
                        let pf = |n, ell, alpha, beta, s| PfaffFormat { n, ell, alpha, beta, s };
                        sweep("pclosed/n", &|v| pclosed_pfaffian_bound(pf(v, a, b, c, d), e).value);
                        sweep("pclosed/ell", &|v| pclosed_pfaffian_bound(pf(a, v, b, c, d), e).value);
                        sweep("pclosed/alpha", &|v| pclosed_pfaffian_bound(pf(a, b, v, c, d), e).value);
                        sweep("pclosed/beta", &|v| pclosed_pfaffian_bound(pf(a, b, c, v, d), e).value);
                        sweep("pclosed/s", &|v| pclosed_pfaffian_bound(pf(a, b, c, d, v), e).value);
                        sweep("qf/n", &|v| qf_pfaffian_bound(pf(v, a, b, c, d), e).value);
                        sweep("qf/s", &|v| qf_pfaffian_bound(pf(a, b, c, d, v), e).value);
                        sweep("limit/k", &|v| {
                            hausdorff_limit_bound_alg(v, a, b, c, e, false).value
                        });
                        sweep("limit/n", &|v| {
                            hausdorff_limit_bound_alg(a, v, b, c, e, false).value
                        });
                        sweep("limit/d", &|v| {
                            hausdorff_limit_bound_alg(a, b, v, c, e, false).value
                        });
                        sweep("limit/s", &|v| {
                            hausdorff_limit_bound_alg(a, b, c, v, e, false).value
                        });
                        sweep("rcb/k", &|v| {
                            relative_closure_bound(v, pf(a, b, c, d, e), 1, false).value
                        });
                        sweep("rcb/n", &|v| {
                            relative_closure_bound(a, pf(v, b, c, d, e), 1, false).value
                        });
                        sweep("rcb/ell", &|v| {
                            relative_closure_bound(a, pf(b, v, c, d, e), 1, false).value
                        });
                        sweep("rcb/s", &|v| {
                            relative_closure_bound(a, pf(b, c, d, e, v), 1, false).value
                        });
                    }
                }
            }
        }
    }

    // format arithmetic is monotone too
    for p in 0..=5u64 {
        let f = diagonal_format_alg(AlgFormat { n: 2, d: 1, s: 3 }, p);
        let g = diagonal_format_alg(AlgFormat { n: 2, d: 1, s: 3 }, p + 1);
        assert!(g.n >= f.n && g.d >= f.d && g.s >= f.s);
    }

    // overflow-free far beyond the sweep: arguments up to 50
    let huge = relative_closure_bound(
        50,
        PfaffFormat { n: 50, ell: 50, alpha: 50, beta: 50, s: 50 },
        50,
        false,
    );
    assert!(huge.value.bits() > 3_000_000);
    let kh = khovanskii_bound(50, 50, &vec![50u64; 50]).unwrap();
    assert!(kh.value > BigUint::from(0u32));
    let hl = hausdorff_limit_bound_alg(50, 50, 50, 50, 50, false);
    assert!(hl.value.bits() > 10_000);

    println!(
        "[criterion 6] PASS: spot checks exact, monotone sweeps hold, arguments up to 50 \
         evaluate without overflow ({} bits at the largest)",
        huge.value.bits()
    );
}

// -------------------------------------------------------------------------
// criterion 7: reports are byte-identical modulo timings
// -------------------------------------------------------------------------

#[test]
fn criterion_7_deterministic_reports() {
    let family = fixtures::circle_family();
    let opts = VerifyOptions { lambda_fiber: 0.25, k_max: 1, seed: 7, ..Default::default() };
    let a = verify_limit(&family, &opts).unwrap();
    let b = verify_limit(&family, &opts).unwrap();
    let ja = a.deterministic_json().unwrap();
    let jb = b.deterministic_json().unwrap();
    assert_eq!(ja, jb, "reports must agree byte for byte once timings are stripped");
    println!(
        "[criterion 7] PASS: two runs agree on {} bytes of report (timings stripped)",
        ja.len()
    );
}
