//! Kernel two-sample statistics and the one-dimensional distances used to
//! compare feature distributions.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{FeatureMatrix, Frame};
use crate::par;

pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 95.0;
pub const DEFAULT_SUBSAMPLE: usize = 600;
/// Negative values down to this floor are rounding noise and get clamped.
pub const NEGATIVE_FLOOR: f64 = -1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("need at least {needed} rows, have {available}")]
    TooFewRows { needed: usize, available: usize },
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("samples live in different standardization frames")]
    FrameMismatch,
    #[error("degenerate pooled sample: median pairwise distance is zero")]
    DegenerateSample,
    #[error("bandwidth must be positive and finite, got {0}")]
    Bandwidth(f64),
    #[error("confidence level must lie strictly between 0 and 100, got {0}")]
    Level(f64),
    #[error("at least one draw is required")]
    NoDraws,
    #[error("pooled standard deviation is zero")]
    ZeroVariance,
    #[error("squared MMD {0} is below the numerical floor")]
    Negative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Rbf,
}

/// `k(x, y) = exp(-|x - y|^2 / (2 h^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub bandwidth: f64,
    pub fitted_on: String,
}

impl KernelConfig {
    pub fn rbf(bandwidth: f64) -> Result<Self, StatsError> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(StatsError::Bandwidth(bandwidth));
        }
        Ok(KernelConfig {
            kind: KernelKind::Rbf,
            bandwidth,
            fitted_on: String::new(),
        })
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        (-sq_dist(x, y) * self.gamma()).exp()
    }

    fn gamma(&self) -> f64 {
        1.0 / (2.0 * self.bandwidth * self.bandwidth)
    }
}

#[inline]
fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let xc = x.chunks_exact(4);
    let yc = y.chunks_exact(4);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for k in 0..4 {
            let d = a[k] - b[k];
            acc[k] += d * d;
        }
    }
    let mut tail = 0.0;
    for (a, b) in xr.iter().zip(yr) {
        let d = a - b;
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Median of a slice, averaging the two central values for even lengths.
fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, &mut upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

/// Median Euclidean distance over all unordered pairs of distinct rows.
pub fn median_bandwidth(pooled: &FeatureMatrix) -> Result<KernelConfig, StatsError> {
    let n = pooled.nrows();
    if n < 2 {
        return Err(StatsError::TooFewRows {
            needed: 2,
            available: n,
        });
    }
    let mut dists: Vec<f64> = par::map_range(n - 1, |i| {
        let xi = pooled.row(i);
        ((i + 1)..n)
            .map(|j| sq_dist(xi, pooled.row(j)).sqrt())
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let h = median_in_place(&mut dists);
    if h <= 0.0 {
        return Err(StatsError::DegenerateSample);
    }
    let mut k = KernelConfig::rbf(h)?;
    k.fitted_on = format!(
        "{} rows, register `{}`, {}",
        n,
        pooled.register,
        match &pooled.frame {
            Frame::Raw => "raw frame".to_string(),
            Frame::Standardized { register, .. } => format!("standardized on `{register}`"),
        }
    );
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmdEstimate {
    pub value: f64,
    pub m: usize,
    pub n: usize,
    pub kernel: KernelConfig,
    /// Set when a tiny negative rounding residue was clamped to zero.
    pub clamped: bool,
}

/// Rows of a matrix as slices, without the surrounding labels.
#[derive(Clone, Copy)]
pub struct Rows<'a> {
    data: &'a [f64],
    width: usize,
}

impl<'a> Rows<'a> {
    pub fn new(data: &'a [f64], width: usize) -> Self {
        debug_assert!(width == 0 || data.len().is_multiple_of(width));
        Rows { data, width }
    }

    pub fn of(m: &'a FeatureMatrix) -> Self {
        Rows::new(m.values(), m.ncols())
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }
}

/// Sum of k over all ordered pairs of one sample, diagonal included.
fn within_sum(x: Rows, gamma: f64) -> f64 {
    let m = x.len();
    let partial = par::map_range(m, |i| {
        let xi = x.row(i);
        let mut s = 0.0;
        for j in (i + 1)..m {
            s += (-sq_dist(xi, x.row(j)) * gamma).exp();
        }
        s
    });
    m as f64 + 2.0 * partial.iter().sum::<f64>()
}

fn cross_sum(x: Rows, y: Rows, gamma: f64) -> f64 {
    let partial = par::map_range(x.len(), |i| {
        let xi = x.row(i);
        let mut s = 0.0;
        for j in 0..y.len() {
            s += (-sq_dist(xi, y.row(j)) * gamma).exp();
        }
        s
    });
    partial.iter().sum()
}

/// Canonical argument order so that swapping the samples cannot change a
/// single bit of the result.
fn canonical<'a>(x: Rows<'a>, y: Rows<'a>) -> (Rows<'a>, Rows<'a>) {
    let key = |r: &Rows| r.len();
    let swap = match key(&x).cmp(&key(&y)) {
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => {
            let a = x.data.iter().map(|v| v.to_bits());
            let b = y.data.iter().map(|v| v.to_bits());
            a.cmp(b) == std::cmp::Ordering::Greater
        }
    };
    if swap {
        (y, x)
    } else {
        (x, y)
    }
}

/// Biased squared MMD on raw row buffers.
pub fn mmd_squared_rows(x: Rows, y: Rows, kernel: &KernelConfig) -> Result<MmdEstimate, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::Empty);
    }
    if x.width != y.width {
        return Err(StatsError::WidthMismatch(x.width, y.width));
    }
    let (m, n) = (x.len(), y.len());
    let (a, b) = canonical(x, y);
    let g = kernel.gamma();
    let (ma, nb) = (a.len() as f64, b.len() as f64);
    let kaa = within_sum(a, g) / (ma * ma);
    let kbb = within_sum(b, g) / (nb * nb);
    let kab = cross_sum(a, b, g) / (ma * nb);
    let raw = kaa + kbb - 2.0 * kab;
    let (value, clamped) = if raw < 0.0 {
        if raw < NEGATIVE_FLOOR {
            return Err(StatsError::Negative(raw));
        }
        (0.0, true)
    } else {
        (raw, false)
    };
    Ok(MmdEstimate {
        value,
        m,
        n,
        kernel: kernel.clone(),
        clamped,
    })
}

pub fn mmd_squared(
    x: &FeatureMatrix,
    y: &FeatureMatrix,
    kernel: &KernelConfig,
) -> Result<MmdEstimate, StatsError> {
    if x.frame != y.frame {
        return Err(StatsError::FrameMismatch);
    }
    if x.ncols() != y.ncols() {
        return Err(StatsError::WidthMismatch(x.ncols(), y.ncols()));
    }
    mmd_squared_rows(Rows::of(x), Rows::of(y), kernel)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub low: f64,
    pub high: f64,
    pub mean: f64,
    pub draws: usize,
    pub subsample_size: usize,
    pub coupled: bool,
    /// The resampled statistics in draw order.
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Linear-interpolation percentile (`p` in [0, 100]) of sorted data.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn check_level(level: f64) -> Result<(), StatsError> {
    if level > 0.0 && level < 100.0 {
        Ok(())
    } else {
        Err(StatsError::Level(level))
    }
}

/// Percentile interval over `samples`.
pub fn interval(samples: Vec<f64>, level: f64, subsample_size: usize, coupled: bool) -> ConfidenceInterval {
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let tail = (100.0 - level) / 2.0;
    ConfidenceInterval {
        level,
        low: percentile_sorted(&sorted, tail),
        high: percentile_sorted(&sorted, 100.0 - tail),
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
        draws: samples.len(),
        subsample_size,
        coupled,
        samples,
    }
}

/// Independent random stream for iteration `i` of a resampling run.
pub fn stream_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn gather(m: &FeatureMatrix, indices: impl Iterator<Item = usize>, buf: &mut Vec<f64>) {
    buf.clear();
    for i in indices {
        buf.extend_from_slice(m.row(i));
    }
}

/// Each draw splits one random `2n`-permutation of the rows into two
/// disjoint halves and measures their squared MMD.
pub fn human_human_ci(
    full: &FeatureMatrix,
    n: usize,
    draws: usize,
    level: f64,
    kernel: &KernelConfig,
    seed: u64,
) -> Result<ConfidenceInterval, StatsError> {
    check_level(level)?;
    if draws == 0 {
        return Err(StatsError::NoDraws);
    }
    if n == 0 || 2 * n > full.nrows() {
        return Err(StatsError::TooFewRows {
            needed: 2 * n.max(1),
            available: full.nrows(),
        });
    }
    let width = full.ncols();
    let samples = (0..draws)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let perm = index::sample(&mut rng, full.nrows(), 2 * n).into_vec();
            let (mut x, mut y) = (Vec::new(), Vec::new());
            gather(full, perm[..n].iter().copied(), &mut x);
            gather(full, perm[n..].iter().copied(), &mut y);
            mmd_squared_rows(Rows::new(&x, width), Rows::new(&y, width), kernel).map(|e| e.value)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(interval(samples, level, n, false))
}

/// Each draw takes `n` rows from each corpus using one shared stream.
pub fn coupled_ci(
    human: &FeatureMatrix,
    model: &FeatureMatrix,
    n: usize,
    draws: usize,
    level: f64,
    kernel: &KernelConfig,
    seed: u64,
) -> Result<ConfidenceInterval, StatsError> {
    check_level(level)?;
    if draws == 0 {
        return Err(StatsError::NoDraws);
    }
    if human.frame != model.frame {
        return Err(StatsError::FrameMismatch);
    }
    if human.ncols() != model.ncols() {
        return Err(StatsError::WidthMismatch(human.ncols(), model.ncols()));
    }
    let available = human.nrows().min(model.nrows());
    if n == 0 || n > available {
        return Err(StatsError::TooFewRows {
            needed: n.max(1),
            available,
        });
    }
    let width = human.ncols();
    let samples = (0..draws)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let hx = index::sample(&mut rng, human.nrows(), n);
            let my = index::sample(&mut rng, model.nrows(), n);
            let (mut x, mut y) = (Vec::new(), Vec::new());
            gather(human, hx.iter(), &mut x);
            gather(model, my.iter(), &mut y);
            mmd_squared_rows(Rows::new(&x, width), Rows::new(&y, width), kernel).map(|e| e.value)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(interval(samples, level, n, true))
}

/// Human-human intervals over a range of subsample sizes.
pub fn stability_curve(
    full: &FeatureMatrix,
    sizes: &[usize],
    draws: usize,
    level: f64,
    kernel: &KernelConfig,
    seed: u64,
) -> Result<Vec<ConfidenceInterval>, StatsError> {
    sizes
        .iter()
        .map(|&n| human_human_ci(full, n, draws, level, kernel, seed))
        .collect()
}

/// W1 between two empirical distributions, integrating the absolute
/// difference of their quantile functions.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(wasserstein_sorted(&a, &b))
}

/// [`wasserstein_1d`] for inputs that are already sorted and non-empty.
pub fn wasserstein_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as u128, b.len() as u128);
    // Positions on [0, 1] are counted in units of 1 / (na * nb).
    let (mut i, mut j, mut pos) = (0usize, 0usize, 0u128);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let end_a = (i as u128 + 1) * nb;
        let end_b = (j as u128 + 1) * na;
        let end = end_a.min(end_b);
        total += (end - pos) as f64 * (a[i] - b[j]).abs();
        pos = end;
        if end_a == end {
            i += 1;
        }
        if end_b == end {
            j += 1;
        }
    }
    total / (na * nb) as f64
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `(mean(a) - mean(b)) / pooled sd`.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewRows {
                needed: 2,
                available: s.len(),
            });
        }
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((ma - mb) / pooled)
}

/// Mean absolute Cohen's d across columns, skipping zero-variance columns.
/// Returns the mean and the number of skipped columns.
pub fn mean_abs_cohens_d(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<(f64, usize), StatsError> {
    if a.ncols() != b.ncols() {
        return Err(StatsError::WidthMismatch(a.ncols(), b.ncols()));
    }
    let mut sum = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for j in 0..a.ncols() {
        match cohens_d(&a.column(j), &b.column(j)) {
            Ok(d) => {
                sum += d.abs();
                used += 1;
            }
            Err(StatsError::ZeroVariance) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sum / used as f64, skipped))
}

/// Sum of the per-column sample variances.
pub fn trace_dispersion(z: &FeatureMatrix) -> Result<f64, StatsError> {
    trace_rows(Rows::of(z))
}

fn trace_rows(z: Rows) -> Result<f64, StatsError> {
    let n = z.len();
    if n < 2 {
        return Err(StatsError::TooFewRows {
            needed: 2,
            available: n,
        });
    }
    let width = z.width;
    let mut means = vec![0.0; width];
    for i in 0..n {
        for (m, v) in means.iter_mut().zip(z.row(i)) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut total = 0.0;
    for i in 0..n {
        for (m, v) in means.iter().zip(z.row(i)) {
            total += (v - m) * (v - m);
        }
    }
    Ok(total / (n - 1) as f64)
}

/// Interval for the trace dispersion of size-`n` subsamples of `full`.
pub fn trace_dispersion_ci(
    full: &FeatureMatrix,
    n: usize,
    draws: usize,
    level: f64,
    seed: u64,
) -> Result<ConfidenceInterval, StatsError> {
    check_level(level)?;
    if draws == 0 {
        return Err(StatsError::NoDraws);
    }
    if n < 2 || n > full.nrows() {
        return Err(StatsError::TooFewRows {
            needed: n.max(2),
            available: full.nrows(),
        });
    }
    let width = full.ncols();
    let samples = par::map_range(draws, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let mut x = Vec::new();
        gather(full, index::sample(&mut rng, full.nrows(), n).iter(), &mut x);
        trace_rows(Rows::new(&x, width))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(interval(samples, level, n, false))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossMatrix {
    pub names: Vec<String>,
    /// Symmetric, zero on the diagonal.
    pub values: Vec<Vec<f64>>,
}

/// Squared MMD between every pair of named samples.
pub fn mmd_cross_matrix(
    samples: &[(String, FeatureMatrix)],
    kernel: &KernelConfig,
) -> Result<CrossMatrix, StatsError> {
    if let Some((_, first)) = samples.first() {
        for (_, m) in samples {
            if m.frame != first.frame {
                return Err(StatsError::FrameMismatch);
            }
            if m.ncols() != first.ncols() {
                return Err(StatsError::WidthMismatch(first.ncols(), m.ncols()));
            }
        }
    }
    let k = samples.len();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = mmd_squared(&samples[i].1, &samples[j].1, kernel)?.value;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(CrossMatrix {
        names: samples.iter().map(|(n, _)| n.clone()).collect(),
        values,
    })
}

/// One line of the distance results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmdReportRow {
    pub pair: String,
    pub register: String,
    pub mmd2: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub draws: usize,
    pub bandwidth: f64,
    pub seed: u64,
}
