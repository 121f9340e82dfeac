//! File formats: point-cloud CSV, complex and family JSON, Betti-curve CSV.

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, TupleCloud};
use crate::homology::BettiCurve;
use crate::simplicial::{ComplexData, LambdaComplex};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// One-parameter family definition: a formula in `x1..xN` and `l`, the
/// sampling box (one `[lo, hi]` per x-variable), and the parameter range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub formula: String,
    #[serde(rename = "box")]
    pub sample_box: Vec<[f64; 2]>,
    pub lambda_range: [f64; 2],
}

pub fn read_family(path: &Path) -> Result<FamilyFile> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_complex(path: &Path) -> Result<LambdaComplex> {
    let data: ComplexData = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    crate::simplicial::load_complex(data)
}

/// `# dim=<n>` header, then one comma-separated point per line.
pub fn write_cloud_csv<W: Write>(w: &mut W, cloud: &PointCloud) -> Result<()> {
    writeln!(w, "# dim={}", cloud.dim)?;
    for p in &cloud.points {
        let line = p.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Tuple clouds serialize as a cloud of dimension `base_dim * arity` with
/// a `# base_dim=<n> arity=<p+1>` header.
pub fn write_tuple_csv<W: Write>(w: &mut W, cloud: &TupleCloud) -> Result<()> {
    writeln!(w, "# base_dim={} arity={}", cloud.base_dim, cloud.arity)?;
    for t in &cloud.tuples {
        let line = t.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// A cloud loaded from CSV; tuple headers are preserved.
#[derive(Debug, Clone)]
pub struct LoadedCloud {
    pub cloud: PointCloud,
    /// `(base_dim, arity)` when the file was a serialized tuple cloud.
    pub tuple_shape: Option<(usize, usize)>,
}

pub fn read_cloud_csv<R: BufRead>(r: R) -> Result<LoadedCloud> {
    let mut dim: Option<usize> = None;
    let mut tuple_shape = None;
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(d) = rest.strip_prefix("dim=") {
                dim = Some(d.trim().parse().map_err(|_| bad_header(lineno, line))?);
            } else if rest.starts_with("base_dim=") {
                let mut base = None;
                let mut arity = None;
                for part in rest.split_whitespace() {
                    if let Some(v) = part.strip_prefix("base_dim=") {
                        base = v.parse::<usize>().ok();
                    } else if let Some(v) = part.strip_prefix("arity=") {
                        arity = v.parse::<usize>().ok();
                    }
                }
                let (b, a) = match (base, arity) {
                    (Some(b), Some(a)) => (b, a),
                    _ => return Err(bad_header(lineno, line)),
                };
                dim = Some(b * a);
                tuple_shape = Some((b, a));
            }
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let coords = coords.map_err(|_| Error::InvalidInput(format!(
            "line {}: expected comma-separated numbers, got `{line}`",
            lineno + 1
        )))?;
        points.push(coords);
    }
    let dim = dim
        .or_else(|| points.first().map(Vec::len))
        .ok_or_else(|| Error::InvalidInput("empty cloud file".into()))?;
    Ok(LoadedCloud { cloud: PointCloud::new(dim, points)?, tuple_shape })
}

fn bad_header(lineno: usize, line: &str) -> Error {
    Error::InvalidInput(format!("line {}: malformed header `{line}`", lineno + 1))
}

pub fn read_cloud_file(path: &Path) -> Result<LoadedCloud> {
    let file = std::fs::File::open(path)?;
    read_cloud_csv(std::io::BufReader::new(file))
}

/// `scale,b_0..b_K` columns; the plot-data format.
pub fn write_betti_curve_csv<W: Write>(w: &mut W, curve: &BettiCurve) -> Result<()> {
    let max_k = curve.betti.iter().map(|b| b.ranks.len()).max().unwrap_or(1);
    let header: Vec<String> = std::iter::once("scale".to_string())
        .chain((0..max_k).map(|k| format!("b_{k}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (scale, betti) in curve.scales.iter().zip(&curve.betti) {
        let mut row = vec![format!("{scale}")];
        for k in 0..max_k {
            row.push(betti.rank(k).to_string());
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
