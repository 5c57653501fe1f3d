//! Flags singular values above the null band.
//!
//! The threshold is the limiting upper edge inflated by a margin that absorbs
//! finite-size fluctuations of the largest noise singular value. There is no
//! edge-statistics model behind it; calibrate the margin with the ensemble
//! simulator when it matters.

use serde::{Deserialize, Serialize};

use crate::edges::{edges, EdgeMode, Regime};
use crate::ensemble::{cross_covariance_spectrum, sample_gaussian_matrix, SpectrumSample};
use crate::error::{Error, Result};
use crate::rng::GaussianStream;
use crate::spectral::{to_ratios, ProblemShape, SpectralBand};

pub const DEFAULT_MARGIN: f64 = 0.03;

/// Singular-value band of pure noise at the given shape, unscaled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseBand {
    pub band: SpectralBand,
    pub regime: Regime,
    /// `√(p_X p_Y)`.
    pub scale_factor: f64,
}

pub fn noise_band(shape: &ProblemShape, mode: EdgeMode) -> Result<NoiseBand> {
    shape.validate()?;
    let ratios = to_ratios(shape);
    let report = edges(ratios, mode)?;
    Ok(NoiseBand {
        band: report.band,
        regime: report.regime,
        scale_factor: ratios.scale_factor(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outlier {
    pub index: usize,
    pub value: f64,
    /// `value / γ+`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Band in the same units as the observed values.
    pub band: SpectralBand,
    pub scaled: bool,
    pub margin: f64,
    pub threshold: f64,
    /// Sorted by descending ratio.
    pub outliers_above: Vec<Outlier>,
    pub values_below_band: usize,
    pub regime: Regime,
}

/// Flags values above `γ+ (1 + margin)`. With `scaled`, `observed` is taken
/// to be multiplied by `√(p_X p_Y)` and the band is scaled to match.
pub fn detect_outliers(
    observed: &[f64],
    shape: &ProblemShape,
    margin: f64,
    mode: EdgeMode,
    scaled: bool,
) -> Result<DetectionReport> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::invalid("margin", format!("need margin >= 0, got {margin}")));
    }
    if let Some((i, v)) = observed
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::invalid(
            "observed",
            format!("value {v} at index {i} is not a nonnegative number"),
        ));
    }
    let nb = noise_band(shape, mode)?;
    let band = if scaled {
        nb.band.scaled(nb.scale_factor)
    } else {
        nb.band
    };
    let threshold = band.upper * (1.0 + margin);
    let mut outliers_above: Vec<Outlier> = observed
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > threshold)
        .map(|(index, &value)| Outlier {
            index,
            value,
            ratio: value / band.upper,
        })
        .collect();
    outliers_above.sort_by(|a, b| b.ratio.total_cmp(&a.ratio).then(a.index.cmp(&b.index)));
    let values_below_band = observed.iter().filter(|v| **v < band.lower).count();
    Ok(DetectionReport {
        band,
        scaled,
        margin,
        threshold,
        outliers_above,
        values_below_band,
        regime: nb.regime,
    })
}

/// Exploratory: spectrum of `X = a s uᵀ + noise`, `Y = a s vᵀ + noise` with a
/// shared factor `s` of norm `√T` and unit loadings `u`, `v`. The null theory
/// says nothing about where the resulting outlier lands.
pub fn planted_rank_one_spectrum(shape: &ProblemShape, amplitude: f64, seed: u64) -> Result<SpectrumSample> {
    shape.validate()?;
    let (t, nx, ny) = (shape.t, shape.nx, shape.ny);
    let unit = |n: usize, stream: u64, target: f64| {
        let mut g = GaussianStream::new(seed, stream);
        let mut v = vec![0.0; n];
        g.fill(&mut v, 1.0);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x *= target / norm);
        v
    };
    let s = unit(t, 0, (t as f64).sqrt());
    let u = unit(nx, 1, 1.0);
    let v = unit(ny, 2, 1.0);
    let mut x = sample_gaussian_matrix(t, nx, shape.sigma_x, &mut GaussianStream::new(seed, 3));
    let mut y = sample_gaussian_matrix(t, ny, shape.sigma_y, &mut GaussianStream::new(seed, 4));
    for j in 0..nx {
        for i in 0..t {
            x[(i, j)] += amplitude * s[i] * u[j];
        }
    }
    for j in 0..ny {
        for i in 0..t {
            y[(i, j)] += amplitude * s[i] * v[j];
        }
    }
    cross_covariance_spectrum(x.as_ref(), y.as_ref(), shape.sigma_x, shape.sigma_y)
}
