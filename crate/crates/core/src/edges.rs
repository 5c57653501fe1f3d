//! Support edges of the nonzero spectrum.
//!
//! The exact edges are the positive real zeros of the discriminant of the
//! cubic satisfied by the Stieltjes transform. Closed forms for the various
//! sampling limits are provided alongside, plus a dispatcher.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{AspectRatios, SpectralBand, Variable};

const SCAN_NODES: usize = 4096;
const BISECT_RTOL: f64 = 1e-12;

/// Advisory upper limit on the small parameter of the limit formulas.
pub const ADVISORY_SMALL: f64 = 0.1;
/// Advisory lower limit on `p` for [`edges_oversampled_limit`].
pub const ADVISORY_LARGE: f64 = 10.0;

/// Coefficients of `D(z)` in increasing powers `z⁰ … z⁵`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantPolynomial {
    pub coefficients: [f64; 6],
}

impl DiscriminantPolynomial {
    pub fn eval(&self, z: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// `|D(z)| / (max|k_i| · max(1, z)⁵)`.
    pub fn scaled_residual(&self, z: f64) -> f64 {
        self.eval(z).abs() / (self.max_abs_coefficient() * z.max(1.0).powi(5))
    }
}

/// Expands `b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd` in `z`, with
/// `a = p_X p_Y z²`, `b = z (p_Y(1−p_X) + p_X(1−p_Y))`,
/// `c = (1−p_X)(1−p_Y) − p_X p_Y z` and `d = p_X p_Y`.
///
/// The `z⁰` and `z¹` terms vanish identically.
pub fn discriminant_coeffs(ratios: AspectRatios) -> DiscriminantPolynomial {
    let (px, py) = (ratios.px(), ratios.py());
    let s = px * py;
    let b1 = py * (1.0 - px) + px * (1.0 - py);
    let c0 = (1.0 - px) * (1.0 - py);
    let dp = px - py;

    // b1² − 4 s c0 = (p_X − p_Y)², which keeps this coefficient exact at
    // equal ratios.
    let k2 = c0 * c0 * dp * dp;
    let k3 = s * (-2.0 * b1 * b1 * c0 + 12.0 * s * c0 * c0 - 4.0 * b1 * b1 * b1 + 18.0 * s * b1 * c0);
    let k4 = s * s * (b1 * b1 - 12.0 * s * c0 - 27.0 * s * s - 18.0 * s * b1);
    let k5 = 4.0 * s * s * s * s;
    DiscriminantPolynomial {
        coefficients: [0.0, 0.0, k2, k3, k4, k5],
    }
}

/// Which edge formula produced a band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Numeric,
    EqualRatio,
    TinyEqual,
    Disparate,
    BothTiny,
    OversampledLimit,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Numeric => "numeric",
            Regime::EqualRatio => "equal_ratio",
            Regime::TinyEqual => "tiny_equal",
            Regime::Disparate => "disparate",
            Regime::BothTiny => "both_tiny",
            Regime::OversampledLimit => "oversampled_limit",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Regime::Numeric => "positive zeros of the cubic discriminant D(z)",
            Regime::EqualRatio => "z± = (8p² + 20p³ − p⁴ ± p^(5/2) (8+p)^(3/2)) / (8p⁴)",
            Regime::TinyEqual => "γ± = (1 ± √(2p)) / p",
            Regime::Disparate => "γ± = |1 ± √p_X| / √(p_X p_Y)",
            Regime::BothTiny => "γ± = (1 ± √(p_X + p_Y)) / √(p_X p_Y)",
            Regime::OversampledLimit => "γ− = 0, γ+ = √(3 / (2p))",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    Numeric,
    AutoLimit,
}

impl std::str::FromStr for EdgeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(Self::Numeric),
            "auto_limit" => Ok(Self::AutoLimit),
            other => Err(Error::invalid("mode", format!("unknown `{other}`"))),
        }
    }
}

/// A singular-value band together with the formula that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub band: SpectralBand,
    pub regime: Regime,
}

/// Real roots of the reduced discriminant and whether an extra zero at the
/// origin was factored out.
#[derive(Clone, Debug, PartialEq)]
struct Reduced {
    coeffs: Vec<f64>,
    origin_degenerate: bool,
}

fn reduce(d: &DiscriminantPolynomial) -> Reduced {
    // D = z² R(z); R keeps dropping exact zero constant terms.
    let mut coeffs: Vec<f64> = d.coefficients[2..].to_vec();
    let mut origin_degenerate = false;
    while coeffs.len() > 1 && coeffs[0] == 0.0 {
        coeffs.remove(0);
        origin_degenerate = true;
    }
    Reduced {
        coeffs,
        origin_degenerate,
    }
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

fn horner_deriv(coeffs: &[f64], z: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, c)| acc * z + i as f64 * c)
}

/// Positive real zeros of the discriminant, found by a sign-change scan over
/// log-spaced nodes and bisection.
pub fn discriminant_positive_roots(ratios: AspectRatios) -> Vec<f64> {
    let d = discriminant_coeffs(ratios);
    positive_roots(&reduce(&d).coeffs, ratios)
}

fn positive_roots(coeffs: &[f64], ratios: AspectRatios) -> Vec<f64> {
    let n = coeffs.len();
    if n < 2 {
        return Vec::new();
    }
    let lead = coeffs[n - 1];
    let low = coeffs[0];
    let max_rest = coeffs[..n - 1].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let max_high = coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    // Cauchy bounds on the moduli of the roots.
    let upper = (1.0 + max_rest / lead.abs()).max(10.0 / ratios.product());
    let lower = low.abs() / (low.abs() + max_high);

    let (lo, hi) = ((0.5 * lower).ln(), (2.0 * upper).ln());
    let mut nodes: Vec<f64> = (0..SCAN_NODES)
        .map(|i| (lo + (hi - lo) * i as f64 / (SCAN_NODES - 1) as f64).exp())
        .collect();
    // Critical points split brackets that would otherwise hide a root pair.
    nodes.extend(critical_points(coeffs).into_iter().filter(|z| *z > 0.0));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut roots = Vec::new();
    let mut prev = (nodes[0], horner(coeffs, nodes[0]));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for &z in &nodes[1..] {
        let f = horner(coeffs, z);
        if f == 0.0 {
            roots.push(z);
        } else if prev.1 != 0.0 && (f > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(coeffs, prev.0, z));
        }
        prev = (z, f);
    }
    roots
}

fn critical_points(coeffs: &[f64]) -> Vec<f64> {
    // Derivative has degree at most two here.
    let deriv: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
    match deriv.len() {
        2 => vec![-deriv[0] / deriv[1]],
        3 => {
            let (c, b, a) = (deriv[0], deriv[1], deriv[2]);
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return Vec::new();
            }
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut out = Vec::new();
            if a != 0.0 {
                out.push(q / a);
            }
            if q != 0.0 {
                out.push(c / q);
            }
            out
        }
        _ => Vec::new(),
    }
}

fn bisect(coeffs: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = horner(coeffs, a);
    while (b - a) > BISECT_RTOL * b {
        let m = 0.5 * (a + b);
        let fm = horner(coeffs, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut z = 0.5 * (a + b);
    // Newton polish, kept only while it stays inside the bracket.
    for _ in 0..3 {
        let df = horner_deriv(coeffs, z);
        if df == 0.0 {
            break;
        }
        let next = z - horner(coeffs, z) / df;
        if !(a <= next && next <= b) || horner(coeffs, next).abs() >= horner(coeffs, z).abs() {
            break;
        }
        z = next;
    }
    z
}

/// Eigenvalue band from the discriminant scan alone, without the equal-ratio
/// shortcut used by [`find_edges_numeric`].
pub fn scan_discriminant_edges(ratios: AspectRatios) -> Result<SpectralBand> {
    let d = discriminant_coeffs(ratios);
    let reduced = reduce(&d);
    let roots = positive_roots(&reduced.coeffs, ratios);
    let topology = || Error::EdgeTopology {
        px: ratios.px(),
        py: ratios.py(),
        count: roots.len(),
        roots: roots.clone(),
    };
    match roots.as_slice() {
        [lo, hi] => SpectralBand::new(*lo, *hi, Variable::Eigenvalue),
        [hi] if ratios.smaller() >= 1.0 || reduced.origin_degenerate => {
            SpectralBand::new(0.0, *hi, Variable::Eigenvalue)
        }
        _ => Err(topology()),
    }
}

/// Exact eigenvalue band `[λ−, λ+]`.
///
/// At exactly equal ratios the closed form is exact and is used directly.
pub fn find_edges_numeric(ratios: AspectRatios) -> Result<SpectralBand> {
    if ratios.is_equal() {
        return Ok(edges_equal_ratio(ratios.px()).to_eigen());
    }
    scan_discriminant_edges(ratios)
}

fn advisory(name: &str, ok: bool, detail: impl FnOnce() -> String) {
    if !ok {
        log::warn!("{name}: outside advisory range ({})", detail());
    }
}

/// Exact band at `p_X = p_Y = p`, in singular values.
pub fn edges_equal_ratio(p: f64) -> SpectralBand {
    let (z_plus, z_minus) = equal_ratio_eigen_edges(p);
    let lower = if p < 1.0 { z_minus.max(0.0).sqrt() } else { 0.0 };
    SpectralBand {
        lower,
        upper: z_plus.sqrt(),
        variable: Variable::SingularValue,
    }
}

fn equal_ratio_eigen_edges(p: f64) -> (f64, f64) {
    let p2 = p * p;
    let p4 = p2 * p2;
    let root = p2 * p.sqrt() * (8.0 + p).powf(1.5);
    let z_plus = (8.0 * p2 + 20.0 * p2 * p - p4 + root) / (8.0 * p4);
    // z+ z− = (1−p)³/p⁴ avoids cancellation in the smaller root.
    let z_minus = (1.0 - p).powi(3) / (p4 * z_plus);
    (z_plus, z_minus)
}

/// Equal, strongly undersampled ratios: `γ± = (1 ± √(2p))/p`.
pub fn edges_tiny_equal(p: f64) -> SpectralBand {
    advisory("tiny_equal", 0.0 < p && p < ADVISORY_SMALL, || format!("p = {p}"));
    let r = (2.0 * p).sqrt();
    SpectralBand {
        lower: ((1.0 - r) / p).max(0.0),
        upper: (1.0 + r) / p,
        variable: Variable::SingularValue,
    }
}

/// One dataset far higher-dimensional than the other (`p_Y ≪ p_X`):
/// `γ± = |1 ± √p_X| / √(p_X p_Y)`. Holds for `p_X` on either side of one.
pub fn edges_disparate(px: f64, py: f64) -> SpectralBand {
    advisory("disparate", py / px < ADVISORY_SMALL, || {
        format!("p_Y/p_X = {}", py / px)
    });
    let s = (px * py).sqrt();
    let r = px.sqrt();
    SpectralBand {
        lower: (1.0 - r).abs() / s,
        upper: (1.0 + r) / s,
        variable: Variable::SingularValue,
    }
}

/// Both datasets strongly undersampled:
/// `γ± = (1 ± √(p_X + p_Y)) / √(p_X p_Y)`.
pub fn edges_both_tiny(px: f64, py: f64) -> SpectralBand {
    advisory("both_tiny", px.max(py) < ADVISORY_SMALL, || {
        format!("max p = {}", px.max(py))
    });
    let s = (px * py).sqrt();
    let r = (px + py).sqrt();
    SpectralBand {
        lower: ((1.0 - r) / s).max(0.0),
        upper: (1.0 + r) / s,
        variable: Variable::SingularValue,
    }
}

/// Strongly oversampled equal ratios, as the textbook limit `√(3/(2p))`.
///
/// This expression does not match the exact equal-ratio edge, whose upper
/// end behaves as `2/√p` for large `p`; it is kept for comparison only and
/// is never selected by [`edges`].
pub fn edges_oversampled_limit(p: f64) -> SpectralBand {
    advisory("oversampled_limit", p > ADVISORY_LARGE, || format!("p = {p}"));
    SpectralBand {
        lower: 0.0,
        upper: (1.5 / p).sqrt(),
        variable: Variable::SingularValue,
    }
}

/// Limit formula whose advisory range covers `ratios`, if any.
pub fn limit_regime(ratios: AspectRatios) -> Option<Regime> {
    let (hi, lo) = (ratios.larger(), ratios.smaller());
    if ratios.is_equal() {
        Some(if hi < ADVISORY_SMALL {
            Regime::TinyEqual
        } else {
            Regime::EqualRatio
        })
    } else if hi < ADVISORY_SMALL {
        Some(Regime::BothTiny)
    } else if lo / hi < ADVISORY_SMALL {
        Some(Regime::Disparate)
    } else {
        None
    }
}

/// Evaluates one closed form; `Numeric` is rejected. Disparate ratios are
/// ordered so the smaller `p` plays the role of `p_Y`.
pub fn closed_form(ratios: AspectRatios, regime: Regime) -> Result<SpectralBand> {
    let (hi, lo) = (ratios.larger(), ratios.smaller());
    let need_equal = || {
        if ratios.is_equal() {
            Ok(())
        } else {
            Err(Error::invalid("regime", format!("{} needs p_X = p_Y", regime.label())))
        }
    };
    match regime {
        Regime::Numeric => Err(Error::invalid("regime", "numeric is not a closed form")),
        Regime::EqualRatio => need_equal().map(|_| edges_equal_ratio(hi)),
        Regime::TinyEqual => need_equal().map(|_| edges_tiny_equal(hi)),
        Regime::OversampledLimit => need_equal().map(|_| edges_oversampled_limit(hi)),
        Regime::Disparate => Ok(edges_disparate(hi, lo)),
        Regime::BothTiny => Ok(edges_both_tiny(ratios.px(), ratios.py())),
    }
}

/// Singular-value band by the requested route.
pub fn edges(ratios: AspectRatios, mode: EdgeMode) -> Result<EdgeReport> {
    let numeric = || -> Result<EdgeReport> {
        Ok(EdgeReport {
            band: find_edges_numeric(ratios)?.to_singular(),
            regime: Regime::Numeric,
        })
    };
    match mode {
        EdgeMode::Numeric => numeric(),
        EdgeMode::AutoLimit => match limit_regime(ratios) {
            Some(regime) => Ok(EdgeReport {
                band: closed_form(ratios, regime)?,
                regime,
            }),
            None => numeric(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(px: f64, py: f64) -> AspectRatios {
        AspectRatios::new(px, py).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn unit_ratio_discriminant() {
        let d = discriminant_coeffs(r(1.0, 1.0));
        assert_eq!(d.coefficients, [0.0, 0.0, 0.0, 0.0, -27.0, 4.0]);
    }

    #[test]
    fn equal_ratio_coefficients() {
        for p in [0.5, 0.01, 1.25, 3.0] {
            let k = discriminant_coeffs(r(p, p)).coefficients;
            let want3 = 4.0 * p.powi(4) - 12.0 * p.powi(5) + 12.0 * p.powi(6) - 4.0 * p.powi(7);
            let want4 = -8.0 * p.powi(6) - 20.0 * p.powi(7) + p.powi(8);
            assert_eq!(&k[..3], &[0.0; 3]);
            assert!((k[3] - want3).abs() <= 1e-14 * want3.abs().max(p.powi(4)));
            assert!((k[4] - want4).abs() <= 1e-14 * want4.abs());
            assert!(rel(k[5], 4.0 * p.powi(8)) < 1e-15);
        }
        assert!((discriminant_coeffs(r(0.5, 0.5)).coefficients[3] - 0.03125).abs() < 1e-15);
    }

    /// Direct complex evaluation of `b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd`.
    fn brute_discriminant(px: f64, py: f64, z: f64) -> f64 {
        let a = z * z * px * py;
        let b = z * (py * (1.0 - px) + px * (1.0 - py));
        let c = (1.0 - px) * (1.0 - py) - z * px * py;
        let d = px * py;
        b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d + 18.0 * a * b * c * d
    }

    #[test]
    fn expansion_matches_direct_evaluation() {
        for &(px, py) in &[(0.5, 0.01), (2.0, 0.01), (0.3, 4.0), (1.7, 0.9)] {
            let d = discriminant_coeffs(r(px, py));
            for z in [0.1, 0.7, 3.0, 25.0] {
                let want = brute_discriminant(px, py, z);
                let scale = d.max_abs_coefficient() * z.max(1.0).powi(5);
                assert!((d.eval(z) - want).abs() < 1e-12 * scale, "({px},{py}) z={z}");
            }
        }
    }

    #[test]
    fn numeric_edges_examples() {
        let b = find_edges_numeric(r(1.0, 1.0)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(rel(b.upper, 6.75) < 1e-12);
        let b = scan_discriminant_edges(r(1.0, 1.0)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(rel(b.upper, 6.75) < 1e-12);

        // Reference values are numpy roots of the reduced quintic.
        let b = scan_discriminant_edges(r(0.5, 0.5)).unwrap();
        assert!((b.lower - 0.11340055).abs() < 1e-8, "{b:?}");
        assert!((b.upper - 17.637).abs() < 5e-4, "{b:?}");

        let b = scan_discriminant_edges(r(1.25, 1.25)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - 5.03127204).abs() < 1e-8, "{b:?}");
    }

    #[test]
    fn equal_ratio_examples() {
        let b = edges_equal_ratio(0.5);
        assert!(
            (b.lower - 0.33674997).abs() < 1e-8 && (b.upper - 4.19959515).abs() < 1e-8,
            "{b:?}"
        );
        let b = edges_equal_ratio(1.0);
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - 6.75f64.sqrt()).abs() < 1e-14);
        let b = edges_equal_ratio(1.25);
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - 2.2430).abs() < 5e-5);
    }

    #[test]
    fn scan_agrees_with_equal_ratio_closed_form() {
        for p in [1e-3, 0.01, 0.2, 0.5, 0.9, 1.1, 1.25, 3.0, 10.0] {
            let scan = scan_discriminant_edges(r(p, p)).unwrap().to_singular();
            let exact = edges_equal_ratio(p);
            assert!(rel(scan.upper, exact.upper) < 1e-9, "p={p}");
            assert!((scan.lower - exact.lower).abs() < 1e-9 * exact.upper, "p={p}");
        }
    }

    #[test]
    fn oversampled_equal_edge_tends_to_whitened_bound() {
        for p in [1e3, 1e5] {
            let b = edges_equal_ratio(p);
            assert!(rel(b.upper, 2.0 / p.sqrt()) < 10.0 / p, "p={p}");
        }
        let b = edges_oversampled_limit(100.0);
        assert!((b.upper - 0.12247).abs() < 5e-6);
        assert!((edges_oversampled_limit(37.0).upper / (2.0 / 37f64.sqrt()) - 1.5f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_equal_examples() {
        let b = edges_tiny_equal(0.01);
        assert!((b.lower - 85.858).abs() < 5e-4 && (b.upper - 114.14).abs() < 5e-3);
        let s = b.scaled(0.01);
        assert!((s.lower - 0.8586).abs() < 5e-5 && (s.upper - 1.1414).abs() < 5e-5);
        let exact = find_edges_numeric(r(0.01, 0.01)).unwrap().to_singular();
        assert!(rel(b.lower, exact.lower) < 0.05 && rel(b.upper, exact.upper) < 0.05);
        let tiny = edges_tiny_equal(1e-8);
        assert!((tiny.upper * 1e-8 - 1.0).abs() < 1e-3 && (tiny.lower * 1e-8 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn disparate_examples() {
        let b = edges_disparate(0.5, 0.01);
        assert!(
            (b.lower - 4.142).abs() < 5e-4 && (b.upper - 24.14).abs() < 5e-3,
            "{b:?}"
        );
        let s = b.scaled(0.005f64.sqrt());
        assert!((s.lower - 0.2929).abs() < 5e-5 && (s.upper - 1.7071).abs() < 5e-5);
        let b = edges_disparate(2.0, 0.01);
        assert!(
            (b.lower - 2.929).abs() < 5e-4 && (b.upper - 17.07).abs() < 5e-3,
            "{b:?}"
        );
        let b = edges_disparate(1.0, 1e-6);
        assert_eq!(b.lower, 0.0);
    }

    #[test]
    fn both_tiny_examples() {
        let b = edges_both_tiny(0.01, 0.05).scaled(0.0005f64.sqrt());
        assert!(
            (b.lower - 0.7551).abs() < 5e-5 && (b.upper - 1.2449).abs() < 5e-5,
            "{b:?}"
        );
        assert_eq!(edges_both_tiny(0.01, 0.01), edges_tiny_equal(0.01));
    }

    #[test]
    fn dispatcher() {
        let rep = edges(r(0.5, 0.5), EdgeMode::Numeric).unwrap();
        let exact = edges_equal_ratio(0.5);
        assert!(rel(rep.band.upper, exact.upper) < 1e-9 && rel(rep.band.lower, exact.lower) < 1e-9);
        assert_eq!(
            edges(r(0.01, 0.05), EdgeMode::AutoLimit).unwrap().regime,
            Regime::BothTiny
        );
        assert_eq!(
            edges(r(1.25, 1.25), EdgeMode::AutoLimit).unwrap().regime,
            Regime::EqualRatio
        );
        assert_eq!(
            edges(r(2.0, 0.01), EdgeMode::AutoLimit).unwrap().regime,
            Regime::Disparate
        );
        assert_eq!(
            edges(r(0.01, 2.0), EdgeMode::AutoLimit).unwrap().regime,
            Regime::Disparate
        );
        assert_eq!(edges(r(0.5, 0.7), EdgeMode::AutoLimit).unwrap().regime, Regime::Numeric);
        assert_eq!(
            edges(r(0.02, 0.02), EdgeMode::AutoLimit).unwrap().regime,
            Regime::TinyEqual
        );
    }

    #[test]
    fn unit_ratio_with_other_side() {
        // A square X with an undersampled Y gives a hard edge at the origin.
        for py in [0.3, 0.9] {
            let b = scan_discriminant_edges(r(1.0, py)).unwrap();
            assert_eq!(b.lower, 0.0, "py={py}");
            assert!(b.upper > 0.0);
        }
        // With Y oversampled the compression keeps the spectrum off zero.
        assert!(scan_discriminant_edges(r(1.0, 2.0)).unwrap().lower > 0.0);
    }

    fn log_uniform() -> impl Strategy<Value = f64> {
        (-3.0f64..1.0).prop_map(|e| 10f64.powf(e))
    }

    proptest! {
        #[test]
        fn edges_are_discriminant_zeros(px in log_uniform(), py in log_uniform()) {
            let ratios = r(px, py);
            let band = scan_discriminant_edges(ratios).unwrap();
            let d = discriminant_coeffs(ratios);
            for z in [band.lower, band.upper] {
                if z > 0.0 {
                    let scale = d.max_abs_coefficient() * z.powi(5);
                    prop_assert!(d.eval(z).abs() < 1e-8 * scale);
                }
            }
            let g = band.to_singular().upper * ratios.scale_factor();
            prop_assert!((0.5..=10.0).contains(&g));
        }

        #[test]
        fn discriminant_symmetric(px in log_uniform(), py in log_uniform()) {
            prop_assert_eq!(discriminant_coeffs(r(px, py)), discriminant_coeffs(r(py, px)));
        }
    }
}
