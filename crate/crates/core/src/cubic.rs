//! Roots of a complex cubic `a x³ + b x² + c x + d`.
//!
//! Cardano's formula in the `Δ₀/Δ₁` form, which works directly over the
//! complex numbers, followed by a few guarded Newton steps per root.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Residual tolerance relative to `max(|a|,|b|,|c|,|d|) · max(1, |r|)³`.
pub const RESIDUAL_TOL: f64 = 1e-10;

const NEWTON_STEPS: usize = 4;

fn eval(coeffs: [Complex64; 4], x: Complex64) -> Complex64 {
    let [a, b, c, d] = coeffs;
    ((a * x + b) * x + c) * x + d
}

fn eval_deriv(coeffs: [Complex64; 4], x: Complex64) -> Complex64 {
    let [a, b, c, _] = coeffs;
    (3.0 * a * x + 2.0 * b) * x + c
}

/// Scaled residual `|p(r)| / (max|coeff| · max(1, |r|)³)`.
pub fn relative_residual(coeffs: [Complex64; 4], r: Complex64) -> f64 {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let m = r.norm().max(1.0);
    eval(coeffs, r).norm() / (scale * m * m * m)
}

/// The three roots of `a x³ + b x² + c x + d`, sorted by real part, then by
/// imaginary part.
pub fn solve_cubic(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<[Complex64; 3]> {
    if a == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateCubic);
    }
    let coeffs = [a, b, c, d];
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::invalid("cubic", "non-finite coefficient"));
    }

    let delta0 = b * b - 3.0 * a * c;
    let delta1 = (2.0 * b * b - 9.0 * a * c) * b + 27.0 * a * a * d;
    let disc = (delta1 * delta1 - 4.0 * delta0 * delta0 * delta0).sqrt();
    // Pick the sign that avoids cancellation.
    let plus = 0.5 * (delta1 + disc);
    let minus = 0.5 * (delta1 - disc);
    let big = if plus.norm() >= minus.norm() { plus } else { minus };

    let third = -1.0 / (3.0 * a);
    let mut roots = if big.norm() == 0.0 {
        [third * b; 3]
    } else {
        let cc = big.powf(1.0 / 3.0);
        let xi = Complex64::new(-0.5, 0.75f64.sqrt());
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut rot = Complex64::new(1.0, 0.0);
        for r in out.iter_mut() {
            let ck = rot * cc;
            *r = third * (b + ck + delta0 / ck);
            rot *= xi;
        }
        out
    };

    for r in roots.iter_mut() {
        *r = polish(coeffs, *r);
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(roots)
}

fn polish(coeffs: [Complex64; 4], mut x: Complex64) -> Complex64 {
    let mut f = eval(coeffs, x).norm();
    for _ in 0..NEWTON_STEPS {
        if f == 0.0 {
            break;
        }
        let df = eval_deriv(coeffs, x);
        if df.norm() == 0.0 {
            break;
        }
        let next = x - eval(coeffs, x) / df;
        let fn_ = eval(coeffs, next).norm();
        if !(fn_ < f) {
            break;
        }
        x = next;
        f = fn_;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = solve_cubic(c(1.0), c(0.0), c(0.0), c(-1.0)).unwrap();
        let h = 0.75f64.sqrt();
        assert!(close(r[0], Complex64::new(-0.5, -h), 1e-14));
        assert!(close(r[1], Complex64::new(-0.5, h), 1e-14));
        assert!(close(r[2], c(1.0), 1e-14));
    }

    #[test]
    fn factored_polynomial() {
        let r = solve_cubic(c(1.0), c(-6.0), c(11.0), c(-6.0)).unwrap();
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!(close(*got, c(want), 1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn triple_and_double_roots() {
        let r = solve_cubic(c(2.0), c(-6.0), c(6.0), c(-2.0)).unwrap();
        assert!(r.iter().all(|x| close(*x, c(1.0), 1e-12)));
        // (x-1)²(x+2)
        let r = solve_cubic(c(1.0), c(0.0), c(-3.0), c(2.0)).unwrap();
        assert!(close(r[0], c(-2.0), 1e-12));
        assert!(close(r[1], c(1.0), 1e-7) && close(r[2], c(1.0), 1e-7));
    }

    #[test]
    fn zero_root() {
        let r = solve_cubic(c(1.0), c(-1.0), c(0.0), c(0.0)).unwrap();
        assert!(close(r[0], c(0.0), 1e-12) || close(r[1], c(0.0), 1e-12));
    }

    #[test]
    fn degenerate_rejected() {
        assert_eq!(solve_cubic(c(0.0), c(1.0), c(1.0), c(1.0)), Err(Error::DegenerateCubic));
    }

    #[test]
    fn unit_ratio_inside_band_has_one_upper_root() {
        // a h³ + b h² + c h + d at p_X = p_Y = 1: z² h³ + 0 h² − z h + 1.
        let z = Complex64::new(2.0, -1e-8);
        let r = solve_cubic(z * z, c(0.0), -z, c(1.0)).unwrap();
        let coeffs = [z * z, c(0.0), -z, c(1.0)];
        for x in &r {
            assert!(relative_residual(coeffs, *x) < RESIDUAL_TOL);
        }
        let upper: Vec<_> = r.iter().filter(|x| x.im > 1e-4).collect();
        assert_eq!(upper.len(), 1, "{r:?}");
    }

    #[test]
    fn order_is_deterministic() {
        let a = solve_cubic(c(1.0), c(2.0), c(3.0), c(4.0)).unwrap();
        let b = solve_cubic(c(1.0), c(2.0), c(3.0), c(4.0)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].re <= w[1].re));
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn residual_bound_holds(a in cplx(), b in cplx(), cc in cplx(), d in cplx()) {
            prop_assume!(a.norm() > 1e-3);
            let roots = solve_cubic(a, b, cc, d).unwrap();
            for r in roots {
                prop_assert!(relative_residual([a, b, cc, d], r) < RESIDUAL_TOL);
            }
        }

        #[test]
        fn recovers_planted_roots(r1 in cplx(), r2 in cplx(), r3 in cplx()) {
            // Expand (x-r1)(x-r2)(x-r3).
            let b = -(r1 + r2 + r3);
            let cc = r1 * r2 + r1 * r3 + r2 * r3;
            let d = -(r1 * r2 * r3);
            let roots = solve_cubic(c(1.0), b, cc, d).unwrap();
            for r in roots {
                prop_assert!(relative_residual([c(1.0), b, cc, d], r) < RESIDUAL_TOL);
            }
            let sum = roots[0] + roots[1] + roots[2];
            prop_assert!((sum + b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }
}
