//! Thin command-line front end; all logic lives in the library.

use clap::{Parser, Subcommand, ValueEnum};
use hauslim::error::{Error, Result};
use hauslim::pipeline::{
    evaluate_bound, retract_demo, satellite_threshold_scan, summarize_inequalities, verify_limit,
    BoundFlags, DeltaMode, RetractDemoOptions, VerifyOptions,
};
use hauslim::{fixtures, geometry, homology, io as hio};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hauslim",
    about = "Topology of one-parameter Hausdorff limits at desk scale",
    version
)]
struct Cli {
    /// Seed for every random choice (subsampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for thickened equality atoms (default: twice the grid spacing).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where both make sense.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the limit inequality on a family file.
    VerifyLimit {
        /// Family JSON: { "formula", "box", "lambda_range" }, or a
        /// builtin name ("circle", "two-circles").
        family: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        lambda_fiber: f64,
        /// Limit proxy level (default lambda_fiber / 50).
        #[arg(long)]
        lambda_limit: Option<f64>,
        #[arg(long, default_value_t = 1)]
        k_max: usize,
        /// Grid points per axis.
        #[arg(long, default_value_t = 321)]
        resolution: usize,
        /// "auto", a number for all orders, or a comma list per order
        /// mixing numbers and "auto".
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
        /// Error out instead of subsampling when the cap is exceeded.
        #[arg(long)]
        strict_cap: bool,
        /// Vertex budget for Rips homology.
        #[arg(long, default_value_t = 160)]
        rips_budget: usize,
    },
    /// Hausdorff distance (sum of directed terms) between two cloud files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Betti numbers of a cloud file at a radius or on its auto plateau.
    Betti {
        cloud: PathBuf,
        /// A radius, or "auto" for plateau selection.
        #[arg(long, default_value = "auto")]
        radius: String,
        #[arg(long, default_value_t = 1)]
        k_max: usize,
        /// Vertex budget: larger clouds are subsampled with the seed
        /// (0 disables the guard).
        #[arg(long, default_value_t = 256)]
        budget: usize,
        /// Minimal plateau width as a fraction of the scale-grid span.
        #[arg(long, default_value_t = 0.05)]
        plateau_fraction: f64,
        /// Also write the full Betti curve as CSV to this path.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
    /// Expanded diagonal of a cloud file, written as a tuple-cloud CSV.
    Diagonal {
        cloud: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
    },
    /// Run the piecewise-linear invariant suite on a complex file.
    RetractDemo {
        /// Complex JSON: { "vertices": [{"coords", "lambda"}], "simplices" }.
        complex: PathBuf,
        /// Fiber levels as fractions of the threshold level.
        #[arg(long, default_value = "0.1,0.25,0.5,0.75,0.9")]
        levels: String,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 24)]
        samples: usize,
        /// Also run the quadratic pairwise-intersection check.
        #[arg(long)]
        strict_complex: bool,
    },
    /// Evaluate a named bound formula exactly.
    Bounds {
        /// khovanskii | fewnomial | khovanskii-domain | basu | gv |
        /// pclosed-pfaffian | qf-pfaffian | hausdorff-limit |
        /// relative-closure | diagonal-format-alg | diagonal-format-pfaff
        formula: String,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        d: u64,
        #[arg(long, default_value_t = 0)]
        s: u64,
        #[arg(long, default_value_t = 0)]
        ell: u64,
        #[arg(long, default_value_t = 0)]
        alpha: u64,
        #[arg(long, default_value_t = 0)]
        beta: u64,
        /// Comma-separated degrees for the khovanskii formula.
        #[arg(long)]
        betas: Option<String>,
        /// Constant substituted for each unspecified factor.
        #[arg(long, default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 0)]
        p: u64,
        #[arg(long)]
        p_closed: bool,
    },
    /// Sample a fiber of a family file into a cloud CSV.
    Sample {
        family: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 161)]
        resolution: usize,
    },
    /// Scan the segment-with-satellites fixture for the scatter threshold
    /// where its first diagonal changes components.
    ThresholdScan {
        #[arg(long, default_value_t = 0.2)]
        lambda: f64,
        #[arg(long, default_value_t = 48)]
        segment_points: usize,
        #[arg(long, default_value_t = 151)]
        steps: usize,
    },
}

fn main() {
    std::process::exit(match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoPlateau => 3,
                _ => 2,
            }
        }
    });
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };

    match &cli.cmd {
        Cmd::VerifyLimit {
            family,
            lambda_fiber,
            lambda_limit,
            k_max,
            resolution,
            delta,
            cap,
            strict_cap,
            rips_budget,
        } => {
            let fam = load_family(family)?;
            let opts = VerifyOptions {
                lambda_fiber: *lambda_fiber,
                lambda_limit: *lambda_limit,
                k_max: *k_max,
                resolution: *resolution,
                tol: cli.tol,
                seed: cli.seed,
                delta: parse_delta(delta, *k_max)?,
                cap: *cap,
                allow_subsample: !*strict_cap,
                rips_budget: *rips_budget,
                ..Default::default()
            };
            let report = verify_limit(&fam, &opts)?;
            writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?;
            eprint!("{}", summarize_inequalities(&report));
            Ok(if report.all_inequalities_hold { 0 } else { 1 })
        }
        Cmd::Hausdorff { a, b } => {
            let a = hio::read_cloud_file(a)?.cloud;
            let b = hio::read_cloud_file(b)?.cloud;
            let d = geometry::hausdorff_distance(&a, &b)?;
            writeln!(sink, "{d}")?;
            Ok(0)
        }
        Cmd::Betti { cloud, radius, k_max, budget, plateau_fraction, curve_out } => {
            let full = hio::read_cloud_file(cloud)?.cloud;
            let (cloud, subsampled) = if *budget > 0 {
                full.subsample_farthest(*budget, cli.seed)
            } else {
                (full, false)
            };
            if subsampled {
                eprintln!(
                    "note: cloud subsampled to {} points for homology (--budget)",
                    cloud.len()
                );
            }
            let (radius_used, betti, plateau) = if radius == "auto" {
                let grid = homology::default_scale_grid(&cloud, 32)?;
                let curve = homology::betti_curve(&cloud, &grid, *k_max)?;
                if let Some(path) = curve_out {
                    let mut f = std::fs::File::create(path)?;
                    hio::write_betti_curve_csv(&mut f, &curve)?;
                }
                let p = homology::stable_plateau(&curve, *plateau_fraction)?;
                ((p.lo * p.hi).sqrt(), p.betti.clone(), Some(p))
            } else {
                let r: f64 = radius
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad radius `{radius}`")))?;
                (r, homology::betti_numbers(&cloud, r, *k_max), None)
            };
            if cli.format == Format::Csv {
                let curve = homology::BettiCurve {
                    scales: vec![radius_used],
                    betti: vec![betti.clone()],
                };
                hio::write_betti_curve_csv(&mut sink, &curve)?;
            } else {
                let value = serde_json::json!({
                    "points": cloud.len(),
                    "radius": radius_used,
                    "betti": betti.ranks,
                    "plateau": plateau.map(|p| serde_json::json!({"lo": p.lo, "hi": p.hi})),
                });
                writeln!(sink, "{}", serde_json::to_string_pretty(&value)?)?;
            }
            Ok(0)
        }
        Cmd::Diagonal { cloud, p, delta, cap } => {
            let cloud = hio::read_cloud_file(cloud)?.cloud;
            let tuples = geometry::expanded_diagonal(&cloud, *p, *delta, *cap, cli.seed);
            hio::write_tuple_csv(&mut sink, &tuples)?;
            if tuples.subsampled {
                eprintln!(
                    "note: {} qualifying tuples exceeded the cap {}; a seeded subsample was kept",
                    tuples.total_matches, cap
                );
            }
            Ok(0)
        }
        Cmd::RetractDemo { complex, levels, p, samples, strict_complex } => {
            let k = hio::read_complex(complex)?;
            if *strict_complex {
                k.validate_strict(6)?;
            }
            let fractions: Vec<f64> = levels
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad level fraction `{s}`")))
                })
                .collect::<Result<_>>()?;
            let opts = RetractDemoOptions {
                level_fractions: fractions,
                p: *p,
                samples_per_simplex: *samples,
                seed: cli.seed,
                ..Default::default()
            };
            let name = complex.file_stem().and_then(|s| s.to_str()).unwrap_or("complex");
            let report = retract_demo(name, &k, &opts)?;
            writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?;
            for inv in &report.invariants {
                eprintln!(
                    "{:40} samples {:>7}  worst residual {:>12.3e}  [{}]",
                    inv.name,
                    inv.samples,
                    inv.worst_residual,
                    if inv.pass { "pass" } else { "FAIL" }
                );
            }
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Cmd::Bounds {
            formula,
            k,
            n,
            d,
            s,
            ell,
            alpha,
            beta,
            betas,
            c,
            p,
            p_closed,
        } => {
            let betas = betas
                .as_ref()
                .map(|text| {
                    text.split(',')
                        .map(|v| {
                            v.trim().parse::<u64>().map_err(|_| {
                                Error::InvalidInput(format!("bad beta `{v}`"))
                            })
                        })
                        .collect::<Result<Vec<u64>>>()
                })
                .transpose()?;
            let flags = BoundFlags {
                k: *k,
                n: *n,
                d: *d,
                s: *s,
                ell: *ell,
                alpha: *alpha,
                beta: *beta,
                betas,
                c: *c,
                p: *p,
                p_closed: *p_closed,
            };
            let value = evaluate_bound(formula, &flags)?;
            writeln!(sink, "{}", serde_json::to_string_pretty(&value)?)?;
            Ok(0)
        }
        Cmd::Sample { family, lambda, resolution } => {
            let fam = load_family(family)?;
            let f = hauslim::formula::parse_formula(&fam.formula)?;
            let box_: Vec<(f64, f64)> = fam.sample_box.iter().map(|b| (b[0], b[1])).collect();
            let spacing = box_
                .iter()
                .map(|(lo, hi)| (hi - lo) / (*resolution - 1) as f64)
                .fold(0.0f64, f64::max);
            let tol = cli.tol.unwrap_or(2.0 * spacing);
            let cloud = geometry::sample_fiber(&f, *lambda, &box_, *resolution, tol)?;
            hio::write_cloud_csv(&mut sink, &cloud)?;
            eprintln!("{} points at lambda = {lambda} (tol {tol})", cloud.len());
            Ok(0)
        }
        Cmd::ThresholdScan { lambda, segment_points, steps } => {
            let report =
                satellite_threshold_scan(*lambda, *segment_points, *steps, 20_000, cli.seed)?;
            writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
    }
}

fn parse_delta(text: &str, k_max: usize) -> Result<DeltaMode> {
    let text = text.trim();
    if text == "auto" {
        return Ok(DeltaMode::Auto);
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() == 1 {
        let v: f64 = parts[0]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad delta `{text}`")))?;
        return Ok(DeltaMode::PerOrder(vec![Some(v); k_max + 1]));
    }
    let mut per = Vec::with_capacity(parts.len());
    for part in parts {
        let part = part.trim();
        if part == "auto" {
            per.push(None);
        } else {
            per.push(Some(part.parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("bad delta entry `{part}`"))
            })?));
        }
    }
    Ok(DeltaMode::PerOrder(per))
}

/// A family path, or one of the builtin names for quick starts.
fn load_family(path: &std::path::Path) -> Result<hio::FamilyFile> {
    match path.to_str() {
        Some("circle") => Ok(fixtures::circle_family()),
        Some("two-circles") => Ok(fixtures::two_circle_family()),
        _ => hio::read_family(path),
    }
}
