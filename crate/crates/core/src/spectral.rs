//! Shared domain types: aspect ratios, problem shapes, density curves and
//! spectral bands, together with the zero-mode bookkeeping and the
//! eigenvalue/singular-value change of variables.
//!
//! Conventions used throughout the crate:
//!
//! * `p = T / N` for each dataset, so `p > 1` is oversampled.
//! * `C = Ỹᵀ X̃ / T` is the normalized cross-covariance, `λ` an eigenvalue of
//!   `CᵀC` (equivalently of the `T × T` matrix `H`), and `γ = √λ` a singular
//!   value of `C`.
//! * Zero modes are carried as a separate mass, never as a spike in a curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Theory-side parameters `p_X = T/N_X` and `p_Y = T/N_Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AspectRatios {
    px: f64,
    py: f64,
}

impl AspectRatios {
    pub fn new(px: f64, py: f64) -> Result<Self> {
        for (name, v) in [("px", px), ("py", py)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { px, py })
    }

    pub fn px(&self) -> f64 {
        self.px
    }

    pub fn py(&self) -> f64 {
        self.py
    }

    pub fn qx(&self) -> f64 {
        1.0 / self.px
    }

    pub fn qy(&self) -> f64 {
        1.0 / self.py
    }

    pub fn swapped(&self) -> Self {
        Self {
            px: self.py,
            py: self.px,
        }
    }

    /// `p_X p_Y`.
    pub fn product(&self) -> f64 {
        self.px * self.py
    }

    /// `√(p_X p_Y)`, the factor that brings singular values to order one.
    pub fn scale_factor(&self) -> f64 {
        self.product().sqrt()
    }

    /// Ratio of the better-sampled dataset (smaller `N`).
    pub fn larger(&self) -> f64 {
        self.px.max(self.py)
    }

    pub fn smaller(&self) -> f64 {
        self.px.min(self.py)
    }

    pub fn is_equal(&self) -> bool {
        self.px == self.py
    }

    /// Weight of the continuous part of the spectrum of the given matrix.
    ///
    /// With `N_X ≤ N_Y` (so `p_X ≥ p_Y`) the common rank is `min(N_X, T)`,
    /// which gives `min(1, p_X)` for `CᵀC`, `p_Y min(1, 1/p_X)` for `CCᵀ`
    /// and `min(1, 1/p_X)` for `H`.
    pub fn continuous_mass(&self, representation: Representation) -> f64 {
        let hi = self.larger();
        let lo = self.smaller();
        match representation {
            Representation::CtC => hi.min(1.0),
            Representation::CCt => lo * (1.0 / hi).min(1.0),
            Representation::H => (1.0 / hi).min(1.0),
        }
    }

    pub fn zero_mass(&self, representation: Representation) -> f64 {
        1.0 - self.continuous_mass(representation)
    }
}

/// Integer dimensions and noise scales of a simulated problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemShape {
    pub t: usize,
    pub nx: usize,
    pub ny: usize,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl ProblemShape {
    pub fn new(t: usize, nx: usize, ny: usize, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        let shape = Self {
            t,
            nx,
            ny,
            sigma_x,
            sigma_y,
        };
        shape.validate()?;
        Ok(shape)
    }

    /// Unit-variance shape.
    pub fn standard(t: usize, nx: usize, ny: usize) -> Result<Self> {
        Self::new(t, nx, ny, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t", self.t), ("nx", self.nx), ("ny", self.ny)] {
            if v == 0 {
                return Err(Error::invalid(name, "dimension must be at least 1"));
            }
        }
        for (name, v) in [("sigma_x", self.sigma_x), ("sigma_y", self.sigma_y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn to_ratios(&self) -> AspectRatios {
        to_ratios(self)
    }

    /// Shape with X and Y exchanged so that `nx <= ny`, plus whether a swap
    /// happened.
    pub fn canonical(&self) -> (Self, bool) {
        if self.nx > self.ny {
            (self.swapped(), true)
        } else {
            (*self, false)
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            t: self.t,
            nx: self.ny,
            ny: self.nx,
            sigma_x: self.sigma_y,
            sigma_y: self.sigma_x,
        }
    }

    /// Number of nonzero singular values of `C`: `min(N_X, N_Y, T)`.
    pub fn rank(&self) -> usize {
        self.t.min(self.nx).min(self.ny)
    }
}

/// `p_X = T/N_X`, `p_Y = T/N_Y`.
pub fn to_ratios(shape: &ProblemShape) -> AspectRatios {
    AspectRatios {
        px: shape.t as f64 / shape.nx as f64,
        py: shape.t as f64 / shape.ny as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Eigenvalue,
    SingularValue,
}

/// Which of the three matrices sharing the nonzero spectrum a density
/// refers to: the `N_X × N_X` matrix `CᵀC`, the `N_Y × N_Y` matrix `CCᵀ`, or
/// the `T × T` matrix `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    CtC,
    CCt,
    H,
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ctc" => Ok(Self::CtC),
            "cct" => Ok(Self::CCt),
            "h" => Ok(Self::H),
            other => Err(Error::invalid("representation", format!("unknown `{other}`"))),
        }
    }
}

/// Exact zero-mode count of one representation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroMass {
    /// Fraction of eigenvalues that are exactly zero.
    pub fraction: f64,
    pub zero_count: usize,
    /// Matrix dimension the fraction refers to.
    pub dimension: usize,
    /// X and Y were exchanged to enforce `N_X <= N_Y`.
    pub swapped: bool,
}

/// Point mass at zero of `CᵀC`, `CCᵀ` or `H`.
///
/// The roles of X and Y are exchanged first when `N_X > N_Y`, so `CᵀC` is
/// always the smaller of the two squares.
pub fn delta_mass(shape: &ProblemShape, representation: Representation) -> ZeroMass {
    let (shape, swapped) = shape.canonical();
    let rank = shape.nx.min(shape.t);
    let dimension = match representation {
        Representation::CtC => shape.nx,
        Representation::CCt => shape.ny,
        Representation::H => shape.t,
    };
    let zero_count = dimension - rank;
    ZeroMass {
        fraction: 1.0 - rank as f64 / dimension as f64,
        zero_count,
        dimension,
        swapped,
    }
}

/// Composite trapezoid rule on a tabulated function.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Sampled density of the nonzero part of a spectrum plus its zero mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub abscissa: Vec<f64>,
    pub density: Vec<f64>,
    pub zero_mass: f64,
    pub variable: Variable,
    /// Abscissa multiplied by `√(p_X p_Y)` (singular values) or `p_X p_Y`
    /// (eigenvalues).
    pub scaled: bool,
}

impl DensityCurve {
    pub fn new(
        abscissa: Vec<f64>,
        density: Vec<f64>,
        zero_mass: f64,
        variable: Variable,
        scaled: bool,
    ) -> Result<Self> {
        let curve = Self {
            abscissa,
            density,
            zero_mass,
            variable,
            scaled,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.abscissa.len() != self.density.len() {
            return Err(Error::InvalidCurve(format!(
                "abscissa has {} points but density has {}",
                self.abscissa.len(),
                self.density.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.zero_mass) {
            return Err(Error::InvalidCurve(format!(
                "zero mass {} outside [0, 1]",
                self.zero_mass
            )));
        }
        if let Some(i) = self.abscissa.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve(format!(
                "abscissa not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = self.density.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidCurve(format!(
                "density[{i}] = {} is negative or not finite",
                self.density[i]
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    /// Trapezoid integral of the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        trapezoid(&self.abscissa, &self.density)
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.zero_mass
    }
}

/// Eigenvalue density to singular-value density: `γ = √λ`,
/// `ρ(γ) = 2γ ρ(λ)`. The zero mass carries over unchanged.
pub fn eig_to_singular(curve: &DensityCurve) -> Result<DensityCurve> {
    if curve.variable != Variable::Eigenvalue {
        return Err(Error::InvalidCurve("expected an eigenvalue curve".into()));
    }
    if let Some((index, &value)) = curve.abscissa.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeAbscissa { index, value });
    }
    let abscissa: Vec<f64> = curve.abscissa.iter().map(|l| l.sqrt()).collect();
    let density = abscissa.iter().zip(&curve.density).map(|(g, d)| 2.0 * g * d).collect();
    DensityCurve::new(
        abscissa,
        density,
        curve.zero_mass,
        Variable::SingularValue,
        curve.scaled,
    )
}

/// Inverse of [`eig_to_singular`]. A point at `γ = 0` has no finite
/// eigenvalue density and is dropped.
pub fn singular_to_eig(curve: &DensityCurve) -> Result<DensityCurve> {
    if curve.variable != Variable::SingularValue {
        return Err(Error::InvalidCurve("expected a singular-value curve".into()));
    }
    if let Some((index, &value)) = curve.abscissa.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeAbscissa { index, value });
    }
    let (abscissa, density) = curve
        .abscissa
        .iter()
        .zip(&curve.density)
        .filter(|(g, _)| **g > 0.0)
        .map(|(g, d)| (g * g, d / (2.0 * g)))
        .unzip();
    DensityCurve::new(abscissa, density, curve.zero_mass, Variable::Eigenvalue, curve.scaled)
}

/// Support `[lower, upper]` of the continuous part of a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBand {
    pub lower: f64,
    pub upper: f64,
    pub variable: Variable,
}

impl SpectralBand {
    pub fn new(lower: f64, upper: f64, variable: Variable) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && 0.0 <= lower && lower <= upper) {
            return Err(Error::invalid(
                "band",
                format!("need 0 <= lower <= upper, got [{lower}, {upper}]"),
            ));
        }
        Ok(Self { lower, upper, variable })
    }

    /// `γ_± = √λ_±`; identity on singular-value bands.
    pub fn to_singular(&self) -> Self {
        match self.variable {
            Variable::SingularValue => *self,
            Variable::Eigenvalue => Self {
                lower: self.lower.sqrt(),
                upper: self.upper.sqrt(),
                variable: Variable::SingularValue,
            },
        }
    }

    pub fn to_eigen(&self) -> Self {
        match self.variable {
            Variable::Eigenvalue => *self,
            Variable::SingularValue => Self {
                lower: self.lower * self.lower,
                upper: self.upper * self.upper,
                variable: Variable::Eigenvalue,
            },
        }
    }

    /// Multiplies both endpoints by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lower: self.lower * factor,
            upper: self.upper * factor,
            variable: self.variable,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}
