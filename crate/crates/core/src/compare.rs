//! Theory versus simulation: histogram distance, edge gaps and the first
//! moment.

use serde::{Deserialize, Serialize};

use crate::ensemble::{run_ensemble, EnsembleConfig, EnsembleResult};
use crate::error::Result;
use crate::spectral::{to_ratios, AspectRatios, Representation, SpectralBand, Variable};
use crate::stieltjes::{bin_average, density_curve, CurveOptions, DEFAULT_ETA};

pub const DEFAULT_TOL: f64 = 0.05;
/// Allowed relative overshoot of the empirical extremes past the edges.
pub const EDGE_ALLOWANCE: f64 = 0.03;
const SUBSAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub ensemble: EnsembleConfig,
    /// Theory parameters; defaults to the simulated shape's ratios.
    pub theory: Option<AspectRatios>,
    pub grid_points: usize,
    pub eta: f64,
    pub tol: f64,
}

impl CompareConfig {
    pub fn new(ensemble: EnsembleConfig) -> Self {
        Self {
            ensemble,
            theory: None,
            grid_points: 2048,
            eta: DEFAULT_ETA,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `Σ |hist − theory| · width`, both normalized to the continuous mass.
    pub l1: f64,
    /// The same distance with both sides rescaled to unit mass.
    pub l1_shape: f64,
    pub tol: f64,
    /// Theory density averaged over each histogram bin.
    pub theory_histogram: Vec<f64>,
    /// Theory band in the histogram's variable.
    pub theory_band: SpectralBand,
    pub theory_ratios: AspectRatios,
    pub empirical_min: f64,
    pub empirical_max: f64,
    /// `empirical_max / γ+ − 1`.
    pub upper_gap: f64,
    /// `empirical_min / γ− − 1`, absent when `γ− = 0`.
    pub lower_gap: Option<f64>,
    pub edges_ok: bool,
    pub mean_gamma_sq: f64,
    /// Wick value `N_X N_Y / (T · min(N_X, N_Y, T))` at the theory ratios.
    pub theory_mean_gamma_sq: f64,
    /// Moment gap in standard errors.
    pub moment_z: f64,
    pub pass: bool,
}

/// Mean of `γ²` over nonzero singular values implied by the ratios.
pub fn wick_mean_gamma_sq(ratios: AspectRatios) -> f64 {
    ratios.qx() * ratios.qy() / ratios.qx().min(ratios.qy()).min(1.0)
}

/// Scores an ensemble against the theory curve over the histogram's bins.
pub fn compare_result(result: &EnsembleResult, theory: AspectRatios, config: &CompareConfig) -> Result<Comparison> {
    let options = CurveOptions {
        grid_points: config.grid_points,
        eta: config.eta,
        variable: Variable::SingularValue,
        scaled: result.scaled,
    };
    let tc = density_curve(theory, Representation::CtC, &options)?;
    let factor = if result.scaled { theory.scale_factor() } else { 1.0 };
    let band = tc.band.scaled(factor);

    let expected = bin_average(&tc.curve, &result.bin_edges, SUBSAMPLES);
    let widths: Vec<f64> = result.bin_edges.windows(2).map(|w| w[1] - w[0]).collect();
    let hist = &result.histogram.density;
    let l1: f64 = hist
        .iter()
        .zip(&expected)
        .zip(&widths)
        .map(|((h, t), w)| (h - t).abs() * w)
        .sum();
    let mass = |d: &[f64]| d.iter().zip(&widths).map(|(v, w)| v * w).sum::<f64>();
    let (mh, mt) = (mass(hist), mass(&expected));
    let l1_shape: f64 = if mh > 0.0 && mt > 0.0 {
        hist.iter()
            .zip(&expected)
            .zip(&widths)
            .map(|((h, t), w)| (h / mh - t / mt).abs() * w)
            .sum()
    } else {
        2.0
    };

    let upper_gap = result.empirical_max / band.upper - 1.0;
    let lower_gap = (band.lower > 0.0).then(|| result.empirical_min / band.lower - 1.0);
    let edges_ok = upper_gap <= EDGE_ALLOWANCE && lower_gap.is_none_or(|g| g >= -EDGE_ALLOWANCE);

    let theory_mean = wick_mean_gamma_sq(theory);
    let moment_z = (result.mean_gamma_sq - theory_mean) / result.mean_gamma_sq_stderr;
    Ok(Comparison {
        l1,
        l1_shape,
        tol: config.tol,
        theory_histogram: expected,
        theory_band: band,
        theory_ratios: theory,
        empirical_min: result.empirical_min,
        empirical_max: result.empirical_max,
        upper_gap,
        lower_gap,
        edges_ok,
        mean_gamma_sq: result.mean_gamma_sq,
        theory_mean_gamma_sq: theory_mean,
        moment_z,
        pass: l1 < config.tol && edges_ok,
    })
}

/// Runs the ensemble and compares it with theory.
pub fn compare(config: &CompareConfig) -> Result<(EnsembleResult, Comparison)> {
    let result = run_ensemble(&config.ensemble)?;
    let theory = config.theory.unwrap_or_else(|| to_ratios(&config.ensemble.shape));
    let cmp = compare_result(&result, theory, config)?;
    Ok((result, cmp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ProblemShape;

    #[test]
    fn wick_values() {
        let r = AspectRatios::new(0.5, 0.5).unwrap();
        assert_eq!(wick_mean_gamma_sq(r), 4.0);
        // Scaled by p_X p_Y this is max(1, max p).
        for &(px, py) in &[(0.5, 0.5), (1.25, 1.25), (2.0, 0.01), (0.3, 4.0)] {
            let r = AspectRatios::new(px, py).unwrap();
            let scaled = wick_mean_gamma_sq(r) * px * py;
            assert!((scaled - px.max(py).max(1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_theory_is_far() {
        let shape = ProblemShape::standard(200, 400, 400).unwrap();
        let mut ens = EnsembleConfig::new(shape, 6, 3);
        ens.bins = 40;
        let cfg = CompareConfig::new(ens);
        let (res, good) = compare(&cfg).unwrap();
        let bad = compare_result(&res, AspectRatios::new(0.25, 0.25).unwrap(), &cfg).unwrap();
        assert!(bad.l1 > 2.0 * good.l1, "{} vs {}", bad.l1, good.l1);
        assert!(!bad.pass);
    }
}
