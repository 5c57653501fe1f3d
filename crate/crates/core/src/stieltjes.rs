//! Stieltjes transform `𝔥(z)` of the limiting spectrum of `H`, and the
//! densities read off from it.
//!
//! `𝔥` solves `a 𝔥³ + b 𝔥² + c 𝔥 + d = 0` with coefficients from
//! [`cubic_coefficients`]. Internally the substitution `u = z 𝔥` is used,
//!
//! ```text
//! p_X p_Y u³ + B u² + (C₀ − p_X p_Y z) u + p_X p_Y z = 0,
//! ```
//!
//! which stays well scaled both at large `|z|` (`u → 1`) and near the origin
//! (`u → {0, 1 − 1/p_X, 1 − 1/p_Y}`). The transform includes the point mass
//! of `H` at zero, `m₀ = max(0, 1 − 1/max(p_X, p_Y))`, so `u(0) = m₀`.
//!
//! Roots are selected by continuity along a sweep that starts far outside
//! the spectrum, where `𝔥 ≈ 1/z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{self, solve_cubic};
use crate::edges::find_edges_numeric;
use crate::error::{Error, Result};
use crate::spectral::{
    delta_mass, to_ratios, AspectRatios, DensityCurve, ProblemShape, Representation, SpectralBand, Variable,
};

/// Lower bound on `Im 𝔥`, relative to `max(1, |𝔥|)`, for a root to count as
/// Herglotz.
pub const HERGLOTZ_TOL: f64 = 1e-14;
/// Raw densities below this are reported rather than silently clamped.
pub const NEGATIVE_DENSITY_WARN: f64 = -1e-8;
pub const DEFAULT_ETA: f64 = 1e-9;
pub const DEFAULT_GRID_POINTS: usize = 1024;

const LEAD_IN_POINTS: usize = 256;
const PATH_POINTS_PER_DECADE: f64 = 128.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl CubicCoefficients {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn residual(&self, h: Complex64) -> f64 {
        cubic::relative_residual(self.as_array(), h)
    }
}

struct Params {
    s: f64,
    b1: f64,
    c0: f64,
    m0: f64,
}

impl Params {
    fn new(ratios: AspectRatios) -> Self {
        let (px, py) = (ratios.px(), ratios.py());
        Self {
            s: px * py,
            b1: py * (1.0 - px) + px * (1.0 - py),
            c0: (1.0 - px) * (1.0 - py),
            m0: ratios.zero_mass(Representation::H),
        }
    }

    fn u_roots(&self, z: Complex64) -> Result<[Complex64; 3]> {
        let s = Complex64::new(self.s, 0.0);
        solve_cubic(s, Complex64::new(self.b1, 0.0), self.c0 - self.s * z, self.s * z)
    }
}

/// `a = z² p_X p_Y`, `b = z (p_Y(1−p_X) + p_X(1−p_Y))`,
/// `c = (1−p_X)(1−p_Y) − z p_X p_Y`, `d = p_X p_Y`.
pub fn cubic_coefficients(ratios: AspectRatios, z: Complex64) -> CubicCoefficients {
    let p = Params::new(ratios);
    CubicCoefficients {
        a: z * z * p.s,
        b: z * p.b1,
        c: p.c0 - z * p.s,
        d: Complex64::new(p.s, 0.0),
    }
}

fn herglotz_nearest(values: &[Complex64; 3], target: Complex64) -> Option<usize> {
    (0..3)
        .filter(|&k| values[k].im >= -HERGLOTZ_TOL * values[k].norm().max(1.0))
        .min_by(|&x, &y| (values[x] - target).norm().total_cmp(&(values[y] - target).norm()))
}

/// Picks the Herglotz root closest to `previous` (or to `1/z` when there is
/// none). Requires `Im z < 0`.
pub fn select_stieltjes_root(roots: [Complex64; 3], z: Complex64, previous: Option<Complex64>) -> Result<Complex64> {
    let target = previous.unwrap_or_else(|| z.inv());
    herglotz_nearest(&roots, target)
        .map(|k| roots[k])
        .ok_or(Error::BranchSelection { z, roots })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Plane {
    /// Path points are `z` itself.
    Eigen,
    /// Path points are `w` with `z = w²`.
    Singular,
}

/// Sequential root tracker over a sweep of evaluation points.
///
/// Selection runs on the transform of the continuous part alone,
/// `(u − m₀)/z` (or `(u − m₀)/w` in the singular-value plane). Near the
/// origin the point mass dominates `Im 𝔥` for every candidate and would
/// make the Herglotz test useless there.
pub struct StieltjesTracker {
    params: Params,
    plane: Plane,
    previous: Option<Complex64>,
}

impl StieltjesTracker {
    pub fn new(ratios: AspectRatios) -> Self {
        Self::in_plane(ratios, Plane::Eigen)
    }

    fn in_plane(ratios: AspectRatios, plane: Plane) -> Self {
        Self {
            params: Params::new(ratios),
            plane,
            previous: None,
        }
    }

    fn z_of(&self, w: Complex64) -> Complex64 {
        match self.plane {
            Plane::Eigen => w,
            Plane::Singular => w * w,
        }
    }

    /// Returns the selected `u` given the three candidates at point `w`.
    fn select_u(&mut self, w: Complex64, u_roots: [Complex64; 3]) -> Result<Complex64> {
        let m0 = self.params.m0;
        let g = u_roots.map(|u| (u - m0) / w);
        let target = self.previous.unwrap_or_else(|| (1.0 - m0) / w);
        let k = herglotz_nearest(&g, target).ok_or(Error::BranchSelection { z: w, roots: g })?;
        self.previous = Some(g[k]);
        Ok(u_roots[k])
    }

    /// `𝔥(z)`, continuing from the previously selected root.
    pub fn step(&mut self, z: Complex64) -> Result<Complex64> {
        let roots = self.params.u_roots(self.z_of(z))?;
        Ok(self.select_u(z, roots)? / self.z_of(z))
    }

    /// `u = z𝔥` along a path; roots are solved in parallel and selected in
    /// order.
    fn sweep_u(&mut self, path: &[Complex64]) -> Result<Vec<Complex64>> {
        let roots: Vec<Result<[Complex64; 3]>> = {
            let this = &*self;
            path.par_iter().map(|w| this.params.u_roots(this.z_of(*w))).collect()
        };
        path.iter().zip(roots).map(|(w, r)| self.select_u(*w, r?)).collect()
    }
}

/// `(1+√p_X)²(1+√p_Y)²/(p_X p_Y)`, which bounds `λ+` from above.
pub fn spectral_radius_bound(ratios: AspectRatios) -> f64 {
    let f = |p: f64| (1.0 + p.sqrt()).powi(2);
    f(ratios.px()) * f(ratios.py()) / ratios.product()
}

fn log_path(from: f64, to: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (from.ln(), to.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / n as f64).exp())
}

/// `𝔥(z)` for `Im z < 0`, tracked radially inwards from `|z| ≫ λ+`.
pub fn stieltjes_transform(ratios: AspectRatios, z: Complex64) -> Result<Complex64> {
    if !(z.im < 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("z", format!("need finite z with Im z < 0, got {z}")));
    }
    let start = (1e4 * spectral_radius_bound(ratios) / z.norm()).max(1.0);
    let n = ((start.log10() * PATH_POINTS_PER_DECADE).ceil() as usize).max(LEAD_IN_POINTS);
    let mut path: Vec<Complex64> = log_path(start, 1.0, n).map(|t| z * t).collect();
    path.push(z);
    let u = StieltjesTracker::new(ratios).sweep_u(&path)?;
    Ok(u[u.len() - 1] / z)
}

/// `𝔥(λ − iη)` at every `λ` of an ascending grid, from one continuity
/// sweep.
pub fn stieltjes_on_grid(ratios: AspectRatios, lambdas: &[f64], eta: f64) -> Result<Vec<Complex64>> {
    if let Some(i) = lambdas.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "lambdas",
            format!("not strictly increasing at index {}", i + 1),
        ));
    }
    let Some(&top) = lambdas.last() else {
        return Ok(Vec::new());
    };
    let lead_top = 1e4 * spectral_radius_bound(ratios);
    let mut path: Vec<Complex64> = if top < lead_top {
        log_path(lead_top, top, LEAD_IN_POINTS)
            .map(|x| Complex64::new(x, -eta))
            .collect()
    } else {
        Vec::new()
    };
    let lead = path.len();
    path.extend(lambdas.iter().rev().map(|&x| Complex64::new(x, -eta)));
    let u = StieltjesTracker::new(ratios).sweep_u(&path)?;
    let mut h: Vec<Complex64> = path[lead..].iter().zip(&u[lead..]).map(|(z, u)| u / z).collect();
    h.reverse();
    Ok(h)
}

/// `(1/π) Im[𝔥(λ − iη) − m₀/(λ − iη)]`, clamped at zero: the continuous
/// part of the spectral density of `H` at `λ`. Its integral over the band is
/// `min(1, 1/max(p_X, p_Y))`.
pub fn h_density(lambda: f64, ratios: AspectRatios, eta: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("need finite λ >= 0, got {lambda}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", format!("need η > 0, got {eta}")));
    }
    let z = Complex64::new(lambda, -eta);
    let h = stieltjes_transform(ratios, z)?;
    let m0 = ratios.zero_mass(Representation::H);
    Ok((((h * z - m0) / z).im / PI).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub grid_points: usize,
    /// Regulator relative to `max(1, upper edge)`.
    pub eta: f64,
    pub variable: Variable,
    /// Multiply singular values by `√(p_X p_Y)` (eigenvalues by `p_X p_Y`).
    pub scaled: bool,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            eta: DEFAULT_ETA,
            variable: Variable::SingularValue,
            scaled: false,
        }
    }
}

/// A density curve with the band it was sampled over and diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryCurve {
    pub curve: DensityCurve,
    /// Unscaled support, in the curve's variable.
    pub band: SpectralBand,
    /// Absolute regulator used (`η` in `λ`, or `ε` in `γ`).
    pub eta_abs: f64,
    /// Points whose raw density fell below the warning threshold.
    pub negative_points: usize,
}

/// Continuous density of `representation` at the given ratios.
pub fn density_curve(
    ratios: AspectRatios,
    representation: Representation,
    options: &CurveOptions,
) -> Result<TheoryCurve> {
    let zero_mass = ratios.zero_mass(representation);
    density_curve_with_mass(ratios, representation, zero_mass, options)
}

/// As [`density_curve`], with the exact zero mass of a finite shape attached.
pub fn density_curve_for_shape(
    shape: &ProblemShape,
    representation: Representation,
    options: &CurveOptions,
) -> Result<TheoryCurve> {
    let zero_mass = delta_mass(shape, representation).fraction;
    density_curve_with_mass(to_ratios(shape), representation, zero_mass, options)
}

fn density_curve_with_mass(
    ratios: AspectRatios,
    representation: Representation,
    zero_mass: f64,
    options: &CurveOptions,
) -> Result<TheoryCurve> {
    if options.grid_points < 16 {
        return Err(Error::invalid(
            "grid_points",
            format!("need at least 16, got {}", options.grid_points),
        ));
    }
    if !(options.eta > 0.0 && options.eta.is_finite()) {
        return Err(Error::invalid("eta", format!("need η > 0, got {}", options.eta)));
    }
    let eig_band = find_edges_numeric(ratios)?;
    let band = match options.variable {
        Variable::Eigenvalue => eig_band,
        Variable::SingularValue => eig_band.to_singular(),
    };
    let n = options.grid_points;
    let lo = 0.9 * band.lower;
    let hi = 1.1 * band.upper;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let eta_abs = options.eta * band.upper.max(1.0);

    let params = Params::new(ratios);
    let weight = ratios.continuous_mass(representation) / ratios.continuous_mass(Representation::H);

    // Sweep from the top of the grid downwards, after a lead-in from far
    // outside the spectrum.
    let lead_top = 1e4 * spectral_radius_bound(ratios);
    let (lead, points): (Vec<Complex64>, Vec<Complex64>) = match options.variable {
        Variable::Eigenvalue => (
            log_path(lead_top, hi, LEAD_IN_POINTS)
                .map(|x| Complex64::new(x, -eta_abs))
                .collect(),
            grid.iter().rev().map(|&x| Complex64::new(x, -eta_abs)).collect(),
        ),
        Variable::SingularValue => (
            log_path(lead_top.sqrt(), hi, LEAD_IN_POINTS)
                .map(|g| Complex64::new(g, -eta_abs))
                .collect(),
            // γ = 0 would put z = w² on the negative real axis, where the
            // Herglotz test cannot separate the candidates.
            grid.iter()
                .rev()
                .map(|&g| Complex64::new(g.max(eta_abs), -eta_abs))
                .collect(),
        ),
    };
    let plane = match options.variable {
        Variable::Eigenvalue => Plane::Eigen,
        Variable::SingularValue => Plane::Singular,
    };
    let path: Vec<Complex64> = lead.iter().chain(&points).copied().collect();
    let mut tracker = StieltjesTracker::in_plane(ratios, plane);
    let u = tracker.sweep_u(&path)?;
    let u = &u[lead.len()..];

    let mut negative_points = 0;
    let mut density: Vec<f64> = points
        .iter()
        .zip(u)
        .map(|(&w, &u)| {
            let raw = match options.variable {
                // Symmetrized singular-value transform w 𝔥(w²) = u/w.
                Variable::SingularValue => 2.0 * ((u - params.m0) / w).im / PI,
                Variable::Eigenvalue => ((u - params.m0) / w).im / PI,
            } * weight;
            if raw < NEGATIVE_DENSITY_WARN {
                negative_points += 1;
                log::warn!("negative density {raw:e} at {} (ratios {ratios:?})", w.re);
            }
            raw.max(0.0)
        })
        .collect();
    density.reverse();
    // Outside the band the exact density vanishes; what remains is regulator
    // leakage of order η.
    for (x, d) in grid.iter().zip(density.iter_mut()) {
        if !band.contains(*x) {
            *d = 0.0;
        }
    }

    let (abscissa, density) = if options.scaled {
        let f = match options.variable {
            Variable::Eigenvalue => ratios.product(),
            Variable::SingularValue => ratios.scale_factor(),
        };
        (
            grid.iter().map(|x| x * f).collect(),
            density.iter().map(|d| d / f).collect(),
        )
    } else {
        (grid, density)
    };
    Ok(TheoryCurve {
        curve: DensityCurve::new(abscissa, density, zero_mass, options.variable, options.scaled)?,
        band,
        eta_abs,
        negative_points,
    })
}

/// Density values of a singular-value curve averaged over each histogram bin,
/// using `sub` midpoint samples per bin taken by linear interpolation.
pub fn bin_average(curve: &DensityCurve, edges: &[f64], sub: usize) -> Vec<f64> {
    edges
        .windows(2)
        .map(|w| {
            let step = (w[1] - w[0]) / sub as f64;
            (0..sub)
                .map(|k| interpolate(curve, w[0] + (k as f64 + 0.5) * step))
                .sum::<f64>()
                / sub as f64
        })
        .collect()
}

/// Linear interpolation, zero outside the sampled range.
pub fn interpolate(curve: &DensityCurve, x: f64) -> f64 {
    let xs = &curve.abscissa;
    if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|v| *v <= x).min(xs.len() - 1).max(1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let (y0, y1) = (curve.density[i - 1], curve.density[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edges::edges_equal_ratio;
    use crate::spectral::trapezoid;

    fn r(px: f64, py: f64) -> AspectRatios {
        AspectRatios::new(px, py).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn coefficient_examples() {
        let k = cubic_coefficients(r(1.0, 1.0), c(1.0));
        assert_eq!(k.as_array(), [c(1.0), c(0.0), c(-1.0), c(1.0)]);
        let k = cubic_coefficients(r(0.5, 0.5), c(1.0));
        assert_eq!(k.as_array(), [c(0.25), c(0.5), c(0.0), c(0.25)]);
        let z = Complex64::new(0.7, -2.0);
        assert_eq!(cubic_coefficients(r(0.5, 0.01), z), cubic_coefficients(r(0.01, 0.5), z));
    }

    #[test]
    fn large_z_follows_inverse() {
        let z = Complex64::new(100.0, -1e-9);
        let h = stieltjes_transform(r(1.0, 1.0), z).unwrap();
        assert!((z * h - 1.0).norm() < 0.05);
        assert!(h.im >= 0.0);
        assert!((h.re - 0.01).abs() < 1e-3);
    }

    #[test]
    fn inside_and_outside_band_at_unit_ratio() {
        let h = stieltjes_transform(r(1.0, 1.0), Complex64::new(2.0, -1e-9)).unwrap();
        assert!(h.im > 1e-3, "{h}");
        let h = stieltjes_transform(r(1.0, 1.0), Complex64::new(10.0, -1e-9)).unwrap();
        assert!(h.im.abs() < 1e-6, "{h}");
    }

    #[test]
    fn selected_root_satisfies_original_cubic() {
        let ratios = r(0.5, 0.2);
        for z in [
            Complex64::new(3.0, -1e-9),
            Complex64::new(40.0, -1e-3),
            Complex64::new(0.5, -2.0),
        ] {
            let h = stieltjes_transform(ratios, z).unwrap();
            assert!(cubic_coefficients(ratios, z).residual(h) < cubic::RESIDUAL_TOL);
        }
    }

    #[test]
    fn branch_failure_reports_roots() {
        let roots = [Complex64::new(1.0, -1.0); 3];
        let err = select_stieltjes_root(roots, Complex64::new(1.0, -1.0), None).unwrap_err();
        assert!(matches!(err, Error::BranchSelection { .. }));
    }

    #[test]
    fn h_density_edge_and_outside() {
        let ratios = r(0.5, 0.5);
        let band = find_edges_numeric(ratios).unwrap();
        let eta = 1e-9 * band.upper;
        assert!(h_density(2.0 * band.upper, ratios, eta).unwrap() < 1e-6);
        assert!(h_density(band.upper, ratios, eta).unwrap() < 1e-3);
        assert!(h_density(band.midpoint(), ratios, eta).unwrap() > 1e-3);
    }

    #[test]
    fn unit_ratio_mass() {
        // The continuous part of H integrates to one at p = 1.
        let ratios = r(1.0, 1.0);
        let opts = CurveOptions {
            grid_points: 4096,
            variable: Variable::SingularValue,
            ..CurveOptions::default()
        };
        let tc = density_curve(ratios, Representation::H, &opts).unwrap();
        assert_eq!(tc.curve.zero_mass, 0.0);
        // γ-density diverges mildly at the origin; integrate away from it.
        let mass = trapezoid(&tc.curve.abscissa[1..], &tc.curve.density[1..]);
        assert!((mass - 1.0).abs() < 2e-2, "{mass}");
    }

    #[test]
    fn support_matches_edges() {
        let tc = density_curve(r(0.5, 0.5), Representation::CtC, &CurveOptions::default()).unwrap();
        let exact = edges_equal_ratio(0.5);
        for (g, d) in tc.curve.abscissa.iter().zip(&tc.curve.density) {
            if *d > 1e-6 {
                assert!(*g >= exact.lower * 0.999 && *g <= exact.upper * 1.001, "{g} {d}");
            }
        }
        assert!((tc.curve.total_mass() - 1.0).abs() < 1e-3, "{}", tc.curve.total_mass());
        assert_eq!(tc.curve.zero_mass, 0.5);
    }

    #[test]
    fn eigen_and_singular_curves_agree() {
        let ratios = r(0.4, 0.3);
        let eig = density_curve(
            ratios,
            Representation::CtC,
            &CurveOptions {
                variable: Variable::Eigenvalue,
                ..CurveOptions::default()
            },
        )
        .unwrap();
        let sv = density_curve(ratios, Representation::CtC, &CurveOptions::default()).unwrap();
        for (g, d) in sv.curve.abscissa.iter().zip(&sv.curve.density).step_by(37) {
            let want = 2.0 * g * interpolate(&eig.curve, g * g);
            assert!((d - want).abs() < 2e-3 * (1.0 + want), "{g}: {d} vs {want}");
        }
    }

    #[test]
    fn interpolation_outside_is_zero() {
        let curve = DensityCurve::new(vec![1.0, 2.0], vec![1.0, 3.0], 0.0, Variable::Eigenvalue, false).unwrap();
        assert_eq!(interpolate(&curve, 0.5), 0.0);
        assert_eq!(interpolate(&curve, 1.5), 2.0);
        assert_eq!(interpolate(&curve, 2.0), 3.0);
    }
}
