//! Complete signed weighted graphs with asymmetric classification errors.
//!
//! An [`Instance`] labels every pair of vertices as similar (`+1`) or
//! dissimilar (`-1`) and attaches a positive weight. The asymmetric-error model
//! asks that positive weights lie in `[alpha * w, w]` and negative weights be at
//! least `alpha * w`; [`Instance::validate`] reports every pair breaking that.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Sign of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    n: usize,
    alpha: f64,
    w_scale: f64,
    sign: Vec<i8>,
    weight: Vec<f64>,
}

/// On-disk layout. Diagonals are written as 0 and ignored when read.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    alpha: f64,
    w_scale: f64,
    sign: Vec<Vec<i8>>,
    weight: Vec<Vec<f64>>,
}

/// One pair that breaks the weight-range model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub u: usize,
    pub v: usize,
    pub positive: bool,
    pub weight: f64,
    pub message: String,
}

impl Instance {
    /// Builds an instance from full `n x n` matrices.
    ///
    /// Checks symmetry, signs in `{+1, -1}` and positive finite weights off the
    /// diagonal. Diagonal entries are ignored.
    pub fn from_matrices(
        alpha: f64,
        w_scale: f64,
        sign: &[Vec<i8>],
        weight: &[Vec<f64>],
    ) -> Result<Self> {
        let n = sign.len();
        if weight.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weight.len(),
            });
        }
        check_model_params(alpha, w_scale)?;
        let mut inst = Instance {
            n,
            alpha,
            w_scale,
            sign: vec![0; n * n],
            weight: vec![0.0; n * n],
        };
        for u in 0..n {
            if sign[u].len() != n || weight[u].len() != n {
                return Err(Error::InvalidInstance(format!("row {u} does not have {n} entries")));
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let (s, t) = (sign[u][v], sign[v][u]);
                if s != t {
                    return Err(Error::InvalidInstance(format!(
                        "sign matrix asymmetric at ({u}, {v}): {s} vs {t}"
                    )));
                }
                if s != 1 && s != -1 {
                    return Err(Error::InvalidInstance(format!(
                        "sign at ({u}, {v}) must be +1 or -1, got {s}"
                    )));
                }
                let (a, b) = (weight[u][v], weight[v][u]);
                if a != b {
                    return Err(Error::InvalidInstance(format!(
                        "weight matrix asymmetric at ({u}, {v}): {a} vs {b}"
                    )));
                }
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "weight at ({u}, {v}) must be positive and finite, got {a}"
                    )));
                }
                inst.put(u, v, if s == 1 { Sign::Positive } else { Sign::Negative }, a);
            }
        }
        Ok(inst)
    }

    /// Builds an instance from a per-pair function evaluated for `u < v`.
    pub fn from_fn(
        n: usize,
        alpha: f64,
        w_scale: f64,
        mut f: impl FnMut(usize, usize) -> (Sign, f64),
    ) -> Result<Self> {
        check_model_params(alpha, w_scale)?;
        let mut inst = Instance {
            n,
            alpha,
            w_scale,
            sign: vec![0; n * n],
            weight: vec![0.0; n * n],
        };
        for u in 0..n {
            for v in (u + 1)..n {
                let (s, w) = f(u, v);
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "weight at ({u}, {v}) must be positive and finite, got {w}"
                    )));
                }
                inst.put(u, v, s, w);
            }
        }
        Ok(inst)
    }

    fn put(&mut self, u: usize, v: usize, s: Sign, w: f64) {
        let n = self.n;
        self.sign[u * n + v] = s.as_i8();
        self.sign[v * n + u] = s.as_i8();
        self.weight[u * n + v] = w;
        self.weight[v * n + u] = w;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn w_scale(&self) -> f64 {
        self.w_scale
    }

    #[inline]
    pub fn sign(&self, u: usize, v: usize) -> Sign {
        if self.sign[u * self.n + v] > 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    #[inline]
    pub fn is_positive(&self, u: usize, v: usize) -> bool {
        self.sign[u * self.n + v] > 0
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weight[u * self.n + v]
    }

    /// Largest edge weight (0 for `n <= 1`).
    pub fn max_weight(&self) -> f64 {
        self.weight.iter().copied().fold(0.0, f64::max)
    }

    /// Reports every pair whose weight falls outside the asymmetric-error model.
    pub fn validate(&self) -> Vec<Violation> {
        let lo = self.alpha * self.w_scale;
        let hi = self.w_scale;
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let w = self.weight(u, v);
                let positive = self.is_positive(u, v);
                let message = if positive && w < lo {
                    format!("positive edge ({u}, {v}) has weight {w} < alpha*w = {lo}")
                } else if positive && w > hi {
                    format!("positive edge ({u}, {v}) has weight {w} > w = {hi}")
                } else if !positive && w < lo {
                    format!("negative edge ({u}, {v}) has weight {w} < alpha*w = {lo}")
                } else {
                    continue;
                };
                out.push(Violation {
                    u,
                    v,
                    positive,
                    weight: w,
                    message,
                });
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let n = self.n;
        let file = InstanceFile {
            n,
            alpha: self.alpha,
            w_scale: self.w_scale,
            sign: (0..n).map(|u| self.sign[u * n..(u + 1) * n].to_vec()).collect(),
            weight: (0..n).map(|u| self.weight[u * n..(u + 1) * n].to_vec()).collect(),
        };
        serde_json::to_string(&file).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, InstanceParseError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(InstanceParseError::Json)?;
        if file.sign.len() != file.n || file.weight.len() != file.n {
            return Err(InstanceParseError::Invalid(Error::InvalidInstance(format!(
                "declared n = {} but matrices have {} and {} rows",
                file.n,
                file.sign.len(),
                file.weight.len()
            ))));
        }
        Instance::from_matrices(file.alpha, file.w_scale, &file.sign, &file.weight)
            .map_err(InstanceParseError::Invalid)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Instance::from_json(&text).map_err(|e| match e {
            InstanceParseError::Json(source) => Error::Parse {
                path: path.to_path_buf(),
                source,
            },
            InstanceParseError::Invalid(e) => e,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_json().as_bytes())
    }
}

/// Failure modes of [`Instance::from_json`].
#[derive(Debug)]
pub enum InstanceParseError {
    Json(serde_json::Error),
    Invalid(Error),
}

impl std::fmt::Display for InstanceParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceParseError::Json(e) => write!(f, "{e}"),
            InstanceParseError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

fn check_model_params(alpha: f64, w_scale: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(w_scale.is_finite() && w_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("w_scale must be positive, got {w_scale}")));
    }
    Ok(())
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

/// A partition of `0..n` as contiguous 0-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ClusteringFile", into = "ClusteringFile")]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct ClusteringFile {
    labels: Vec<usize>,
}

impl TryFrom<ClusteringFile> for Clustering {
    type Error = Error;
    fn try_from(f: ClusteringFile) -> Result<Self> {
        Clustering::from_labels(f.labels)
    }
}

impl From<Clustering> for ClusteringFile {
    fn from(c: Clustering) -> Self {
        ClusteringFile { labels: c.labels }
    }
}

impl Clustering {
    /// Accepts labels that already use every value in `0..k`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(empty) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidArgument(format!(
                "cluster label {empty} is unused; labels must be contiguous"
            )));
        }
        Ok(Clustering { labels, k })
    }

    /// Relabels arbitrary ids by order of first appearance.
    pub fn canonical<T: PartialEq + Copy>(raw: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let labels = raw
            .iter()
            .map(|x| match seen.iter().position(|s| s == x) {
                Some(i) => i,
                None => {
                    seen.push(*x);
                    seen.len() - 1
                }
            })
            .collect();
        Clustering { labels, k: seen.len() }
    }

    pub fn single(n: usize) -> Self {
        Clustering {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("clustering serialization cannot fail")
    }
}

/// Integrality-gap instance: a unit-weight path `0 - 1 - ... - (n-1)` whose
/// endpoints are joined by a unit negative edge, every other pair positive
/// with weight `alpha`, and `n = 1 + ceil(sqrt(1/alpha))`.
///
/// Requires `alpha <= 1/4` so the path has at least two edges.
pub fn gen_gap(alpha: f64) -> Result<Instance> {
    if !(alpha > 0.0 && alpha <= 0.25) {
        return Err(Error::InvalidParameter(format!(
            "gap instances need alpha in (0, 1/4], got {alpha}"
        )));
    }
    let n = gap_size(alpha);
    Instance::from_fn(n, alpha, 1.0, |u, v| {
        if v == u + 1 {
            (Sign::Positive, 1.0)
        } else if u == 0 && v == n - 1 {
            (Sign::Negative, 1.0)
        } else {
            (Sign::Positive, alpha)
        }
    })
}

/// `1 + ceil(sqrt(1/alpha))`, guarding against `sqrt` landing a hair above an
/// integer for exact powers like `1/16`.
pub fn gap_size(alpha: f64) -> usize {
    let s = (1.0 / alpha).sqrt();
    let r = s.round();
    let c = if (s - r).abs() <= 1e-12 * r.max(1.0) { r } else { s.ceil() };
    1 + c as usize
}

/// Parameters of [`gen_random`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub alpha: f64,
    pub planted_k: usize,
    pub flip_prob: f64,
    pub seed: u64,
}

/// Planted-partition instance: vertex `i` belongs to cluster `i mod k`; pairs
/// inside a cluster are positive and across clusters negative, then each sign
/// flips with probability `flip_prob`. Weights are uniform in `[alpha, 1]`
/// (`w_scale = 1`). Pairs are visited in row-major `u < v` order, drawing the
/// flip before the weight.
pub fn gen_random(spec: RandomSpec) -> Result<(Instance, Clustering)> {
    let RandomSpec {
        n,
        alpha,
        planted_k,
        flip_prob,
        seed,
    } = spec;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if planted_k == 0 {
        return Err(Error::InvalidParameter("planted_k must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&flip_prob) {
        return Err(Error::InvalidParameter(format!(
            "flip_prob must lie in [0, 1/2), got {flip_prob}"
        )));
    }
    check_model_params(alpha, 1.0)?;
    let k = planted_k.min(n);
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let mut r = rng::seeded(seed);
    let inst = Instance::from_fn(n, alpha, 1.0, |u, v| {
        let same = labels[u] == labels[v];
        let flip = rng::uniform01(&mut r) < flip_prob;
        let positive = same != flip;
        let w = alpha + (1.0 - alpha) * rng::uniform01(&mut r);
        // uniform01 < 1 so w < 1; alpha itself is reachable
        (if positive { Sign::Positive } else { Sign::Negative }, w)
    })?;
    Ok((inst, Clustering::from_labels(labels)?))
}
