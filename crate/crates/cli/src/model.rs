//! Covariance model strings such as `ma1:a=0.5` or `hilbert`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use gdecouple::covmodel::{
    inverse_power_gamma_sequence, CovarianceMatrix, HilbertSpec, MovingAverageSpec, SparseSupportSpec,
};
use gdecouple::decoupling::{row_sum_coefficient, stationary_decoupling_coefficient};
use gdecouple::szego::SpectralSymbol;
use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A named covariance family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Identity,
    Equicorrelated { rho: f64 },
    Ma1 { a: f64 },
    InversePower { r: f64 },
    Hilbert,
    Sparse { support: Vec<u64> },
    Constant { v: f64 },
    Dense { path: PathBuf },
    Gamma { path: PathBuf },
    Ma { path: PathBuf },
    Grid { path: PathBuf },
}

fn parse_params(body: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if body.is_empty() {
        return Ok(out);
    }
    // Values may contain commas (`A=1,4`), so split on `,key=` boundaries.
    let mut current: Option<(String, String)> = None;
    for piece in body.split(',') {
        match piece.split_once('=') {
            Some((k, v)) if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
                if let Some((k, v)) = current.take() {
                    out.insert(k, v);
                }
                current = Some((k.to_string(), v.to_string()));
            }
            _ => match current.as_mut() {
                Some((_, v)) => {
                    v.push(',');
                    v.push_str(piece);
                }
                None => bail!("expected key=value, found `{piece}`"),
            },
        }
    }
    if let Some((k, v)) = current {
        out.insert(k, v);
    }
    Ok(out)
}

fn take_f64(params: &mut BTreeMap<String, String>, key: &str) -> anyhow::Result<f64> {
    let raw = params
        .remove(key)
        .ok_or_else(|| anyhow!("missing parameter `{key}`"))?;
    raw.trim()
        .parse()
        .with_context(|| format!("parameter `{key}` is not a number: `{raw}`"))
}

fn take_path(params: &mut BTreeMap<String, String>) -> anyhow::Result<PathBuf> {
    params
        .remove("path")
        .map(PathBuf::from)
        .ok_or_else(|| anyhow!("missing parameter `path`"))
}

impl FromStr for ModelSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let mut params = parse_params(body.trim())?;
        let spec = match name.trim() {
            "identity" | "white_noise" => ModelSpec::Identity,
            "equicorrelated" => ModelSpec::Equicorrelated {
                rho: take_f64(&mut params, "rho")?,
            },
            "ma1" => ModelSpec::Ma1 {
                a: take_f64(&mut params, "a")?,
            },
            "inverse_power" => ModelSpec::InversePower {
                r: take_f64(&mut params, "r")?,
            },
            "hilbert" => {
                // `a=1..n` is the only supported sequence and is the default.
                if let Some(a) = params.remove("a") {
                    if a.trim() != "1..n" {
                        bail!("hilbert supports a=1..n only, found `{a}`");
                    }
                }
                ModelSpec::Hilbert
            }
            "sparse" => {
                let raw = params
                    .remove("A")
                    .ok_or_else(|| anyhow!("missing parameter `A`"))?;
                let support = raw
                    .split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| format!("`A` must be a comma-separated list of integers: `{raw}`"))?;
                ModelSpec::Sparse { support }
            }
            "constant" => ModelSpec::Constant {
                v: params.remove("v").map_or(Ok(1.0), |v| v.trim().parse()).context("parameter `v`")?,
            },
            "dense" => ModelSpec::Dense {
                path: take_path(&mut params)?,
            },
            "gamma" => ModelSpec::Gamma {
                path: take_path(&mut params)?,
            },
            "ma" => ModelSpec::Ma {
                path: take_path(&mut params)?,
            },
            "grid" => ModelSpec::Grid {
                path: take_path(&mut params)?,
            },
            other => bail!(
                "unknown model `{other}` (expected identity, equicorrelated, ma1, inverse_power, hilbert, sparse, constant, dense, gamma, ma, grid)"
            ),
        };
        if let Some(k) = params.keys().next() {
            bail!("unexpected parameter `{k}` for model `{}`", name.trim());
        }
        Ok(spec)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Identity => write!(f, "identity"),
            ModelSpec::Equicorrelated { rho } => write!(f, "equicorrelated:rho={rho}"),
            ModelSpec::Ma1 { a } => write!(f, "ma1:a={a}"),
            ModelSpec::InversePower { r } => write!(f, "inverse_power:r={r}"),
            ModelSpec::Hilbert => write!(f, "hilbert:a=1..n"),
            ModelSpec::Sparse { support } => {
                let s: Vec<String> = support.iter().map(u64::to_string).collect();
                write!(f, "sparse:A={}", s.join(","))
            }
            ModelSpec::Constant { v } => write!(f, "constant:v={v}"),
            ModelSpec::Dense { path } => write!(f, "dense:path={}", path.display()),
            ModelSpec::Gamma { path } => write!(f, "gamma:path={}", path.display()),
            ModelSpec::Ma { path } => write!(f, "ma:path={}", path.display()),
            ModelSpec::Grid { path } => write!(f, "grid:path={}", path.display()),
        }
    }
}

impl Serialize for ModelSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: anyhow::Error| serde::de::Error::custom(format!("{e:#}")))
    }
}

/// Reads a vector from a JSON array or a single CSV column.
pub fn read_vector(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if is_json(path, &text) {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: line {}", path.display(), line + 1))?;
        let field = rec.get(0).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if line == 0 => continue, // header row
            Err(_) => bail!("{}: line {}: `{field}` is not a number", path.display(), line + 1),
        }
    }
    Ok(out)
}

/// Reads a square matrix from a JSON array of rows or a headerless CSV.
pub fn read_matrix(path: &Path) -> anyhow::Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<f64>> = if is_json(path, &text) {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.with_context(|| format!("{}: line {}", path.display(), line + 1))?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("{}: line {}", path.display(), line + 1))?;
            rows.push(row);
        }
        rows
    };
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        bail!("{}: row {} has {} entries, expected {n}", path.display(), i + 1, r.len());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('[') || text.trim_start().starts_with('{')
}

/// Moving-average coefficients as a JSON object `{"offset": coeff, ...}`.
fn read_ma(path: &Path) -> anyhow::Result<MovingAverageSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<i64, f64> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(MovingAverageSpec::from_map(&map)?)
}

impl ModelSpec {
    /// Autocovariance `γ(0..len)` for stationary families.
    pub fn gamma(&self, len: usize) -> anyhow::Result<Option<Vec<f64>>> {
        Ok(match self {
            ModelSpec::Identity => Some((0..len).map(|h| (h == 0) as u8 as f64).collect()),
            ModelSpec::Constant { v } => Some((0..len).map(|h| if h == 0 { *v } else { 0.0 }).collect()),
            ModelSpec::Ma1 { a } => Some(MovingAverageSpec::ma1(*a)?.autocovariance(len)),
            ModelSpec::InversePower { r } => Some(inverse_power_gamma_sequence(len, *r)),
            ModelSpec::Sparse { support } => Some(SparseSupportSpec::unit(support)?.autocovariance(len)?),
            ModelSpec::Ma { path } => Some(read_ma(path)?.autocovariance(len)),
            ModelSpec::Gamma { path } => {
                let mut g = read_vector(path)?;
                g.resize(len.max(g.len()), 0.0);
                g.truncate(len);
                Some(g)
            }
            ModelSpec::Grid { path } => Some(SpectralSymbol::from_grid(&read_vector(path)?)?.autocovariance(len)),
            ModelSpec::Equicorrelated { .. } | ModelSpec::Hilbert | ModelSpec::Dense { .. } => None,
        })
    }

    /// Dense entries of the `n`-section without factorization.
    pub fn entries(&self, n: usize) -> anyhow::Result<DMatrix<f64>> {
        if let Some(g) = self.gamma(n)? {
            return Ok(gdecouple::covmodel::toeplitz(&g));
        }
        Ok(match self {
            ModelSpec::Equicorrelated { rho } => DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { *rho }),
            ModelSpec::Hilbert => {
                let a = HilbertSpec::natural(n).a;
                DMatrix::from_fn(n, n, |k, l| 1.0 / (a[k] + a[l]))
            }
            ModelSpec::Dense { path } => {
                let m = read_matrix(path)?;
                if m.nrows() < n {
                    bail!("{} is {}x{}, smaller than n = {n}", path.display(), m.nrows(), m.nrows());
                }
                m.view((0, 0), (n, n)).into_owned()
            }
            _ => unreachable!("stationary families handled above"),
        })
    }

    /// Validated covariance of the `n`-section.
    pub fn covariance(&self, n: usize) -> anyhow::Result<CovarianceMatrix> {
        Ok(match self {
            ModelSpec::Identity => CovarianceMatrix::identity(n),
            ModelSpec::Equicorrelated { rho } => CovarianceMatrix::equicorrelated(n, *rho)?,
            ModelSpec::Hilbert => CovarianceMatrix::hilbert(&HilbertSpec::natural(n), n)?,
            ModelSpec::Ma1 { a } => CovarianceMatrix::from_moving_average(&MovingAverageSpec::ma1(*a)?, n)?,
            ModelSpec::Sparse { support } => CovarianceMatrix::sparse_support(&SparseSupportSpec::unit(support)?, n)?,
            _ => CovarianceMatrix::build_dense(self.entries(n)?)?,
        })
    }

    /// `p(X)` of the `n`-section; `O(n)` for stationary families.
    pub fn decoupling_coefficient(&self, n: usize) -> anyhow::Result<f64> {
        if let Some(g) = self.gamma(n)? {
            if !(g[0] > 0.0) {
                bail!("autocovariance at lag 0 must be positive, found {}", g[0]);
            }
            return Ok(stationary_decoupling_coefficient(&g, n));
        }
        if let ModelSpec::Hilbert = self {
            // Row i of 1/(i+j) over its diagonal 1/(2i): 2i Σ_j 1/(i+j).
            let best = (1..=n)
                .map(|i| {
                    let s: f64 = (1..=n).rev().map(|j| 1.0 / (i + j) as f64).sum();
                    2.0 * i as f64 * s
                })
                .fold(f64::NEG_INFINITY, f64::max);
            return Ok(best);
        }
        Ok(row_sum_coefficient(&self.entries(n)?))
    }

    /// Spectral symbol sampled on `grid_len` points, for the Szegő commands.
    pub fn symbol(&self, grid_len: usize) -> anyhow::Result<SpectralSymbol> {
        Ok(match self {
            ModelSpec::Identity => SpectralSymbol::constant(1.0, grid_len)?,
            ModelSpec::Constant { v } => SpectralSymbol::constant(*v, grid_len)?,
            ModelSpec::Ma1 { a } => SpectralSymbol::ma1(*a, grid_len)?,
            ModelSpec::InversePower { r } => SpectralSymbol::inverse_power(*r, grid_len)?,
            ModelSpec::Grid { path } => SpectralSymbol::from_grid(&read_vector(path)?)?,
            other => bail!("model `{other}` has no spectral symbol"),
        })
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(
            self,
            ModelSpec::Equicorrelated { .. } | ModelSpec::Hilbert | ModelSpec::Dense { .. }
        )
    }
}
