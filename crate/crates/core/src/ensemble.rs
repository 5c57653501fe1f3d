//! Monte Carlo spectra of the cross-covariance `C = Ỹᵀ X̃ / T`.
//!
//! The nonzero eigenvalues of `CᵀC` coincide with those of
//! `W_X W_Y / (p_X p_Y)`, where `W = X Xᵀ / (N σ²)` is `T × T`. Each `W` is
//! accumulated block by block from freshly generated columns, so the
//! `T × N` data matrices never exist in memory. With `W_X = L Lᵀ` the
//! spectrum is that of the symmetric matrix `Lᵀ W_Y L / (p_X p_Y)`.
//!
//! All dense kernels run sequentially; parallelism is across realizations
//! only, which keeps every result independent of the thread count.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{cholesky_in_place, cholesky_in_place_scratch, LltRegularization};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::linalg::matmul::triangular::{matmul as tri_matmul, BlockStructure};
use faer::{Accum, Mat, MatRef, Par};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edges::find_edges_numeric;
use crate::error::{Error, Result};
use crate::rng::{x_stream, y_stream, GaussianStream};
use crate::spectral::{delta_mass, to_ratios, DensityCurve, ProblemShape, Representation, SpectralBand, Variable};

/// Eigenvalues at or below this fraction of the largest are numerical zeros.
pub const ZERO_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_BINS: usize = 80;
pub const DEFAULT_BLOCK_SIZE: usize = 256;

/// `rows × cols` matrix of `N(0, σ²)` entries, filled column by column.
pub fn sample_gaussian_matrix(rows: usize, cols: usize, sigma: f64, stream: &mut GaussianStream) -> Mat<f64> {
    let mut buf = vec![0.0; rows * cols];
    stream.fill(&mut buf, sigma);
    Mat::from_fn(rows, cols, |i, j| buf[i + j * rows])
}

/// `X Xᵀ / (N σ²)` for a `T × N` Gaussian `X` generated `block_size`
/// columns at a time. Draws the same numbers as [`sample_gaussian_matrix`]
/// on the same stream.
pub fn gram_accumulate(t: usize, n: usize, sigma: f64, stream: &mut GaussianStream, block_size: usize) -> Mat<f64> {
    let block_size = block_size.clamp(1, n.max(1));
    let mut g = Mat::<f64>::zeros(t, t);
    let mut block = Mat::<f64>::zeros(t, block_size);
    let mut buf = vec![0.0; t * block_size];
    let mut done = 0;
    while done < n {
        let w = block_size.min(n - done);
        stream.fill(&mut buf[..t * w], sigma);
        for j in 0..w {
            for i in 0..t {
                block[(i, j)] = buf[i + j * t];
            }
        }
        let b = block.as_ref().subcols(0, w);
        tri_matmul(
            g.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Add,
            b,
            BlockStructure::Rectangular,
            b.transpose(),
            BlockStructure::Rectangular,
            1.0,
            Par::Seq,
        );
        done += w;
    }
    finish_gram(&mut g, 1.0 / (n as f64 * sigma * sigma));
    g
}

/// Gram matrix of an explicit `T × N` data matrix.
pub fn gram_of(x: MatRef<'_, f64>, sigma: f64) -> Mat<f64> {
    let t = x.nrows();
    let mut g = Mat::<f64>::zeros(t, t);
    tri_matmul(
        g.as_mut(),
        BlockStructure::TriangularLower,
        Accum::Replace,
        x,
        BlockStructure::Rectangular,
        x.transpose(),
        BlockStructure::Rectangular,
        1.0,
        Par::Seq,
    );
    finish_gram(&mut g, 1.0 / (x.ncols() as f64 * sigma * sigma));
    g
}

fn finish_gram(g: &mut Mat<f64>, scale: f64) {
    let t = g.nrows();
    for j in 0..t {
        for i in j..t {
            let v = g[(i, j)] * scale;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
}

fn eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let mut s = Diag::<f64>::zeros(n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::No,
        par,
        Default::default(),
    ));
    self_adjoint_evd(a, s.as_mut(), None, par, MemStack::new(&mut mem), Default::default())
        .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e:?}")))?;
    Ok(s.column_vector().iter().copied().collect())
}

/// `W = L Lᵀ` with `L` of shape `T × r`: lower-triangular Cholesky factor
/// when `W` is numerically definite, otherwise `V_r √μ_r` from the
/// eigendecomposition with the null space dropped.
enum Factor {
    Cholesky(Mat<f64>),
    EigenRoot(Mat<f64>),
}

fn cholesky(w: &Mat<f64>) -> Option<Mat<f64>> {
    let t = w.nrows();
    let mut l = w.clone();
    let par = Par::Seq;
    let mut mem = MemBuffer::new(cholesky_in_place_scratch::<f64>(t, par, Default::default()));
    let reg = LltRegularization {
        dynamic_regularization_delta: 0.0,
        dynamic_regularization_epsilon: 0.0,
    };
    cholesky_in_place(l.as_mut(), reg, par, MemStack::new(&mut mem), Default::default()).ok()?;
    for j in 0..t {
        for i in 0..j {
            l[(i, j)] = 0.0;
        }
    }
    Some(l)
}

fn eigen_root(w: &Mat<f64>) -> Result<Mat<f64>> {
    let t = w.nrows();
    let mut s = Diag::<f64>::zeros(t);
    let mut u = Mat::<f64>::zeros(t, t);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        t,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    self_adjoint_evd(
        w.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e:?}")))?;
    let mu: Vec<f64> = s.column_vector().iter().copied().collect();
    let top = mu.iter().fold(0.0f64, |m, v| m.max(*v));
    let keep: Vec<usize> = (0..t).filter(|&k| mu[k] > ZERO_THRESHOLD * top).collect();
    Ok(Mat::from_fn(t, keep.len(), |i, j| u[(i, keep[j])] * mu[keep[j]].sqrt()))
}

fn factor(w: &Mat<f64>, full_rank: bool) -> Result<Factor> {
    if full_rank {
        if let Some(l) = cholesky(w) {
            return Ok(Factor::Cholesky(l));
        }
        log::debug!("Cholesky failed on a nominally full-rank Gram matrix; using the eigen square root");
    }
    eigen_root(w).map(Factor::EigenRoot)
}

/// Nonzero singular values of one realization, with zero-mode bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    /// Ascending, unscaled.
    pub values: Vec<f64>,
    /// Computed eigenvalues at or below the zero threshold.
    pub numerical_zeros: usize,
    /// Exact zeros of `CᵀC` implied by the rank count: `N_X − len(values)`.
    pub zero_modes: usize,
}

/// Spectrum from the two Gram matrices. `nx`, `ny` are the (canonical)
/// dataset sizes used for the rank choices and the zero count.
fn spectrum_from_grams(wx: Mat<f64>, wy: Mat<f64>, shape: &ProblemShape) -> Result<SpectrumSample> {
    let t = shape.t;
    let ratios = to_ratios(shape);
    let alpha = 1.0 / ratios.product();
    // Factor the matrix that is full rank if there is one, otherwise the
    // one with the smaller rank.
    let (fac, other) = if shape.nx >= t {
        (factor(&wx, true)?, wy)
    } else if shape.ny >= t {
        (factor(&wy, true)?, wx)
    } else if shape.nx <= shape.ny {
        (factor(&wx, false)?, wy)
    } else {
        (factor(&wy, false)?, wx)
    };
    let m = match &fac {
        Factor::Cholesky(l) => {
            let mut b = Mat::<f64>::zeros(t, t);
            tri_matmul(
                b.as_mut(),
                BlockStructure::Rectangular,
                Accum::Replace,
                other.as_ref(),
                BlockStructure::Rectangular,
                l.as_ref(),
                BlockStructure::TriangularLower,
                1.0,
                Par::Seq,
            );
            let mut m = Mat::<f64>::zeros(t, t);
            tri_matmul(
                m.as_mut(),
                BlockStructure::TriangularLower,
                Accum::Replace,
                l.transpose(),
                BlockStructure::TriangularUpper,
                b.as_ref(),
                BlockStructure::Rectangular,
                alpha,
                Par::Seq,
            );
            m
        }
        Factor::EigenRoot(l) => {
            let r = l.ncols();
            let mut b = Mat::<f64>::zeros(t, r);
            matmul(b.as_mut(), Accum::Replace, other.as_ref(), l.as_ref(), 1.0, Par::Seq);
            let mut m = Mat::<f64>::zeros(r, r);
            tri_matmul(
                m.as_mut(),
                BlockStructure::TriangularLower,
                Accum::Replace,
                l.transpose(),
                BlockStructure::Rectangular,
                b.as_ref(),
                BlockStructure::Rectangular,
                alpha,
                Par::Seq,
            );
            m
        }
    };
    let lambda = eigenvalues(m.as_ref())?;
    let top = lambda.iter().fold(0.0f64, |a, v| a.max(*v));
    let cut = ZERO_THRESHOLD * top;
    let values: Vec<f64> = lambda.iter().filter(|l| **l > cut).map(|l| l.sqrt()).collect();
    let numerical_zeros = lambda.len() - values.len();
    let (canon, _) = shape.canonical();
    Ok(SpectrumSample {
        zero_modes: canon.nx.saturating_sub(values.len()),
        numerical_zeros,
        values,
    })
}

/// Nonzero singular values of `C` for realization `realization` under
/// `master_seed`; X uses stream `2r`, Y stream `2r+1`.
pub fn nonzero_singular_values(
    shape: &ProblemShape,
    master_seed: u64,
    realization: u64,
    block_size: usize,
) -> Result<SpectrumSample> {
    shape.validate()?;
    let mut sx = GaussianStream::new(master_seed, x_stream(realization));
    let mut sy = GaussianStream::new(master_seed, y_stream(realization));
    let wx = gram_accumulate(shape.t, shape.nx, shape.sigma_x, &mut sx, block_size);
    let wy = gram_accumulate(shape.t, shape.ny, shape.sigma_y, &mut sy, block_size);
    spectrum_from_grams(wx, wy, shape)
}

/// Nonzero singular values of `C = Ỹᵀ X̃ / T` for explicit `T × N_X` and
/// `T × N_Y` data with known noise scales.
pub fn cross_covariance_spectrum(
    x: MatRef<'_, f64>,
    y: MatRef<'_, f64>,
    sigma_x: f64,
    sigma_y: f64,
) -> Result<SpectrumSample> {
    if x.nrows() != y.nrows() {
        return Err(Error::invalid("y", format!("{} rows, X has {}", y.nrows(), x.nrows())));
    }
    let shape = ProblemShape::new(x.nrows(), x.ncols(), y.ncols(), sigma_x, sigma_y)?;
    spectrum_from_grams(gram_of(x, sigma_x), gram_of(y, sigma_y), &shape)
}

/// Approximate peak bytes held by one realization.
pub fn memory_estimate(t: usize, block_size: usize) -> usize {
    // Two Gram matrices, the factor, one product, the projected matrix and
    // decomposition workspace, plus the column block and its staging copy.
    8 * (7 * t * t + 2 * t * block_size)
}

/// Largest block size in `[1, preferred]` that keeps `workers` concurrent
/// realizations under `budget` bytes.
pub fn block_size_for_budget(t: usize, preferred: usize, workers: usize, budget: usize) -> Result<usize> {
    let per_worker = budget / workers.max(1);
    let fixed = memory_estimate(t, 0);
    if per_worker <= fixed || (per_worker - fixed) / (16 * t) == 0 {
        return Err(Error::MemoryBudget {
            budget,
            required: memory_estimate(t, 1) * workers.max(1),
        });
    }
    Ok(((per_worker - fixed) / (16 * t)).min(preferred).max(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub shape: ProblemShape,
    pub realizations: usize,
    pub master_seed: u64,
    pub bins: usize,
    pub scale_by_sqrt_pxpy: bool,
    pub block_size: usize,
    /// Keep realization 0's singular values in the result.
    pub keep_sample: bool,
}

impl EnsembleConfig {
    pub fn new(shape: ProblemShape, realizations: usize, master_seed: u64) -> Self {
        Self {
            shape,
            realizations,
            master_seed,
            bins: DEFAULT_BINS,
            scale_by_sqrt_pxpy: false,
            block_size: DEFAULT_BLOCK_SIZE,
            keep_sample: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "need at least 1"));
        }
        if self.bins < 8 {
            return Err(Error::invalid("bins", format!("need at least 8, got {}", self.bins)));
        }
        if self.block_size == 0 {
            return Err(Error::invalid("block_size", "need at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    /// Bin-centre densities normalized to the continuous mass of `CᵀC`.
    pub histogram: DensityCurve,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values that fell outside the histogram range.
    pub out_of_range: u64,
    pub total_values: u64,
    pub zero_modes_per_realization: usize,
    pub numerical_zeros: u64,
    pub realized: usize,
    pub seed: u64,
    pub scaled: bool,
    /// Theory band the histogram range was built from, in the reported
    /// (possibly scaled) variable.
    pub band: SpectralBand,
    pub empirical_min: f64,
    pub empirical_max: f64,
    /// Mean of unscaled `γ²` over all nonzero values.
    pub mean_gamma_sq: f64,
    /// Standard error of `mean_gamma_sq` from the spread of per-realization
    /// means.
    pub mean_gamma_sq_stderr: f64,
    pub per_realization_mean_gamma_sq: Vec<f64>,
    /// Unscaled singular values of realization 0, when requested.
    pub sample: Option<Vec<f64>>,
    pub swapped: bool,
    pub block_size: usize,
}

struct Partial {
    counts: Vec<u64>,
    out_of_range: u64,
    total: u64,
    zero_modes: usize,
    numerical_zeros: usize,
    min: f64,
    max: f64,
    mean_sq: f64,
    values: Option<Vec<f64>>,
}

/// Runs the ensemble on the current rayon pool. The output depends only on
/// `config`.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleResult> {
    config.validate()?;
    let (shape, swapped) = config.shape.canonical();
    let ratios = to_ratios(&shape);
    let factor = if config.scale_by_sqrt_pxpy {
        ratios.scale_factor()
    } else {
        1.0
    };
    let band = find_edges_numeric(ratios)?.to_singular().scaled(factor);
    let lo = 0.9 * band.lower;
    let hi = 1.1 * band.upper;
    let bins = config.bins;
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();

    let partials: Vec<Result<Partial>> = (0..config.realizations)
        .into_par_iter()
        .map(|r| {
            let sample =
                nonzero_singular_values(&shape, config.master_seed, r as u64, config.block_size).map_err(|e| {
                    Error::Realization {
                        index: r,
                        source: Box::new(e),
                    }
                })?;
            let mut counts = vec![0u64; bins];
            let mut out_of_range = 0;
            for v in &sample.values {
                let x = v * factor;
                let k = ((x - lo) / width).floor();
                if k >= 0.0 && (k as usize) < bins {
                    counts[k as usize] += 1;
                } else if x == hi {
                    counts[bins - 1] += 1;
                } else {
                    out_of_range += 1;
                }
            }
            let n = sample.values.len();
            let mean_sq = if n > 0 {
                sample.values.iter().map(|v| v * v).sum::<f64>() / n as f64
            } else {
                0.0
            };
            Ok(Partial {
                counts,
                out_of_range,
                total: n as u64,
                zero_modes: sample.zero_modes,
                numerical_zeros: sample.numerical_zeros,
                min: sample.values.first().copied().unwrap_or(f64::INFINITY) * factor,
                max: sample.values.last().copied().unwrap_or(f64::NEG_INFINITY) * factor,
                mean_sq,
                values: (config.keep_sample && r == 0).then_some(sample.values),
            })
        })
        .collect();

    // Ordered reduction.
    let mut counts = vec![0u64; bins];
    let mut out_of_range = 0;
    let mut total = 0;
    let mut numerical_zeros = 0u64;
    let mut zero_modes = None;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut means = Vec::with_capacity(config.realizations);
    let mut sample = None;
    for p in partials {
        let p = p?;
        for (c, k) in counts.iter_mut().zip(&p.counts) {
            *c += k;
        }
        out_of_range += p.out_of_range;
        total += p.total;
        numerical_zeros += p.numerical_zeros as u64;
        if zero_modes.is_some_and(|z| z != p.zero_modes) {
            log::warn!("zero-mode count varies across realizations");
        }
        zero_modes.get_or_insert(p.zero_modes);
        min = min.min(p.min);
        max = max.max(p.max);
        means.push(p.mean_sq);
        if p.values.is_some() {
            sample = p.values;
        }
    }

    let zero_mass = delta_mass(&shape, Representation::CtC).fraction;
    let continuous = 1.0 - zero_mass;
    let norm = if total > 0 {
        continuous / (total as f64 * width)
    } else {
        0.0
    };
    let centres: Vec<f64> = bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 * norm).collect();

    let r = means.len() as f64;
    let mean = means.iter().sum::<f64>() / r;
    let stderr = if means.len() > 1 {
        (means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt() / r.sqrt()
    } else {
        f64::NAN
    };

    Ok(EnsembleResult {
        histogram: DensityCurve::new(
            centres,
            density,
            zero_mass,
            Variable::SingularValue,
            config.scale_by_sqrt_pxpy,
        )?,
        bin_edges,
        counts,
        out_of_range,
        total_values: total,
        zero_modes_per_realization: zero_modes.unwrap_or(0),
        numerical_zeros,
        realized: config.realizations,
        seed: config.master_seed,
        scaled: config.scale_by_sqrt_pxpy,
        band,
        empirical_min: min,
        empirical_max: max,
        mean_gamma_sq: mean,
        mean_gamma_sq_stderr: stderr,
        per_realization_mean_gamma_sq: means,
        sample,
        swapped,
        block_size: config.block_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(t: usize, nx: usize, ny: usize) -> ProblemShape {
        ProblemShape::standard(t, nx, ny).unwrap()
    }

    #[test]
    fn sampled_moments() {
        let mut s = GaussianStream::new(3, 0);
        let m = sample_gaussian_matrix(1000, 500, 1.0, &mut s);
        let n = 500_000.0;
        let mean = m
            .col_iter()
            .flat_map(|c| c.iter().copied().collect::<Vec<_>>())
            .sum::<f64>()
            / n;
        let var = m
            .col_iter()
            .flat_map(|c| c.iter().map(|v| v * v).collect::<Vec<_>>())
            .sum::<f64>()
            / n;
        assert!(mean.abs() < 4.0 / n.sqrt());
        assert!((var - 1.0).abs() < 0.01);

        let mut s = GaussianStream::new(3, 1);
        let m = sample_gaussian_matrix(1000, 500, 2.0, &mut s);
        let var = m
            .col_iter()
            .flat_map(|c| c.iter().map(|v| v * v).collect::<Vec<_>>())
            .sum::<f64>()
            / n;
        assert!((var / 4.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn same_stream_same_matrix() {
        let a = sample_gaussian_matrix(20, 30, 1.0, &mut GaussianStream::new(5, 7));
        let b = sample_gaussian_matrix(20, 30, 1.0, &mut GaussianStream::new(5, 7));
        assert_eq!(a, b);
    }

    #[test]
    fn blocked_gram_matches_unblocked() {
        let (t, n) = (60, 200);
        let g1 = gram_accumulate(t, n, 1.3, &mut GaussianStream::new(1, 0), n);
        let g2 = gram_accumulate(t, n, 1.3, &mut GaussianStream::new(1, 0), 37);
        let x = sample_gaussian_matrix(t, n, 1.3, &mut GaussianStream::new(1, 0));
        let g3 = gram_of(x.as_ref(), 1.3);
        for i in 0..t {
            for j in 0..t {
                assert!((g1[(i, j)] - g2[(i, j)]).abs() < 1e-12);
                assert!((g1[(i, j)] - g3[(i, j)]).abs() < 1e-12);
                assert_eq!(g1[(i, j)], g1[(j, i)]);
            }
        }
    }

    #[test]
    fn gram_trace() {
        let t = 1000;
        let g = gram_accumulate(t, 1000, 1.0, &mut GaussianStream::new(11, 0), 256);
        let tr: f64 = (0..t).map(|i| g[(i, i)]).sum();
        assert!((tr / t as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn gram_rank() {
        let g = gram_accumulate(100, 50, 1.0, &mut GaussianStream::new(2, 0), 16);
        let ev = eigenvalues(g.as_ref()).unwrap();
        let top = ev[ev.len() - 1];
        assert_eq!(ev.iter().filter(|v| **v > ZERO_THRESHOLD * top).count(), 50);
    }

    #[test]
    fn rank_counting() {
        let s = nonzero_singular_values(&shape(50, 25, 25), 1, 0, 8).unwrap();
        assert_eq!(s.values.len(), 25);
        assert_eq!(s.zero_modes, 0);
        let s = nonzero_singular_values(&shape(30, 40, 12), 1, 0, 8).unwrap();
        assert_eq!(s.values.len(), 12);
        assert_eq!(s.zero_modes, 0);
        let s = nonzero_singular_values(&shape(20, 40, 60), 1, 0, 8).unwrap();
        assert_eq!(s.values.len(), 20);
        assert_eq!(s.zero_modes, 20);
    }

    #[test]
    fn budget_sizing() {
        let t = 200;
        let b = block_size_for_budget(t, 256, 1, 64 << 20).unwrap();
        assert_eq!(b, 256);
        assert!(memory_estimate(t, b) <= 64 << 20);
        let small = block_size_for_budget(t, 256, 1, memory_estimate(t, 10)).unwrap();
        assert_eq!(small, 10);
        assert!(matches!(
            block_size_for_budget(t, 256, 1, 1000),
            Err(Error::MemoryBudget { .. })
        ));
    }

    #[test]
    fn histogram_normalization() {
        let mut cfg = EnsembleConfig::new(shape(60, 120, 120), 4, 9);
        cfg.bins = 20;
        let res = run_ensemble(&cfg).unwrap();
        let width = res.bin_edges[1] - res.bin_edges[0];
        let integral: f64 = res.histogram.density.iter().sum::<f64>() * width;
        let inside = 1.0 - res.out_of_range as f64 / res.total_values as f64;
        assert!((integral - 0.5 * inside).abs() < 1e-12);
        assert_eq!(res.histogram.zero_mass, 0.5);
        assert_eq!(res.total_values, 4 * 60);
        assert!(res.empirical_min <= res.empirical_max);
    }

    #[test]
    fn config_validation() {
        let mut cfg = EnsembleConfig::new(shape(10, 10, 10), 0, 0);
        assert!(run_ensemble(&cfg).is_err());
        cfg.realizations = 1;
        cfg.bins = 4;
        assert!(run_ensemble(&cfg).is_err());
    }
}
