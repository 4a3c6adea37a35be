//! The cardinal hyperbolic sine and its derivatives.

use crate::error::{Error, Result};

/// Below this magnitude `shc` switches to its even Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-2;

/// `sinh(xi)/xi`, with the removable singularity at zero filled by 1.
pub fn shc(xi: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "shc of non-finite value {xi}"
        )));
    }
    Ok(shc_unchecked(xi))
}

/// [`shc`] without the finiteness check; non-finite input propagates.
#[inline]
pub fn shc_unchecked(xi: f64) -> f64 {
    if xi.abs() < SERIES_THRESHOLD {
        // 1 + x^2/6 + x^4/120 + x^6/5040; the next term is below 1e-18 here
        let x2 = xi * xi;
        1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 / 5040.0))
    } else {
        xi.sinh() / xi
    }
}

#[inline]
pub fn ch(xi: f64) -> f64 {
    xi.cosh()
}

/// `[shc(xi), shc'(xi), ..., shc^(order)(xi)]`.
///
/// The value comes from [`shc_unchecked`]. Higher derivatives use the power
/// series for `|xi| < 1` and otherwise the recurrence obtained by
/// differentiating `xi * shc(xi) = sinh(xi)`:
/// `shc^(n) = (sinh^(n)(xi) - n shc^(n-1)) / xi`.
pub fn shc_derivatives(xi: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(shc_unchecked(xi));
    if order == 0 {
        return out;
    }
    if xi.abs() < 1.0 {
        for n in 1..=order {
            out.push(series_derivative(xi, n));
        }
    } else {
        let (s, c) = (xi.sinh(), xi.cosh());
        for n in 1..=order {
            let sinh_n = if n % 2 == 0 { s } else { c };
            let prev = out[n - 1];
            out.push((sinh_n - n as f64 * prev) / xi);
        }
    }
    out
}

/// n-th derivative of `sum_k xi^(2k) / (2k+1)!`.
fn series_derivative(xi: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    let k0 = n.div_ceil(2);
    for k in k0..k0 + 30 {
        let p = 2 * k;
        // p!/(p-n)! / (p+1)!  ==  1 / ((p+1) (p-n)!)
        let mut coef = 1.0 / (p as f64 + 1.0);
        for j in 1..=(p - n) {
            coef /= j as f64;
        }
        let term = coef * xi.powi((p - n) as i32);
        sum += term;
        if term.abs() < 1e-20 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn shc_at_zero_is_one() {
        assert_eq!(shc(0.0).unwrap(), 1.0);
    }

    #[test]
    fn shc_at_two() {
        // sinh(2)/2 from a 40-digit evaluation
        assert_relative_eq!(
            shc(2.0).unwrap(),
            1.813_430_203_923_509_4,
            max_relative = 1e-15
        );
        assert_eq!(shc(-2.0).unwrap(), shc(2.0).unwrap());
    }

    #[test]
    fn shc_reference_values() {
        // 40-digit references for sinh(x)/x
        let cases = [
            (1e-8, 1.000_000_000_000_000_0),
            (1e-3, 1.000_000_166_666_675_0),
            (0.00999, 1.000_016_633_433_000_7),
            (0.01, 1.000_016_666_750_000_2),
            (0.5, 1.042_190_610_987_494_7),
            (5.0, 14.840_642_115_557_752),
            (20.0, 12_129_129.885_244_757),
        ];
        for (xi, expected) in cases {
            let got = shc(xi).unwrap();
            assert!(
                ((got - expected) / expected).abs() <= 1e-15,
                "shc({xi}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn shc_rejects_non_finite() {
        assert!(matches!(shc(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(shc(f64::INFINITY), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn derivatives_continuous_across_branch_switch() {
        let below = shc_derivatives(1.0 - 1e-12, 4);
        let above = shc_derivatives(1.0 + 1e-12, 4);
        for (a, b) in below.iter().zip(&above) {
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn derivatives_at_zero() {
        // shc = 1 + x^2/6 + x^4/120: f'' = 1/3, f'''' = 1/5
        let d = shc_derivatives(0.0, 4);
        assert_eq!(d[0], 1.0);
        assert_eq!(d[1], 0.0);
        assert_relative_eq!(d[2], 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(d[3], 0.0);
        assert_relative_eq!(d[4], 0.2, max_relative = 1e-15);
    }

    #[test]
    fn first_derivative_matches_closed_form() {
        for &xi in &[-3.0, -0.7, 0.2, 1.5, 4.0] {
            let d = shc_derivatives(xi, 1);
            let closed = (xi.cosh() - xi.sinh() / xi) / xi;
            assert_relative_eq!(d[1], closed, max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn shc_even_and_at_least_one(xi in -30.0f64..30.0) {
            let a = shc(xi).unwrap();
            prop_assert_eq!(a, shc(-xi).unwrap());
            prop_assert!(a >= 1.0);
        }

        #[test]
        fn shc_matches_direct_quotient(mag in -8.0f64..1.30103, neg in proptest::bool::ANY) {
            // 1e-8 <= |xi| <= 20
            let xi = 10f64.powf(mag) * if neg { -1.0 } else { 1.0 };
            let v = shc(xi).unwrap();
            let direct = xi.sinh() / xi;
            prop_assert!(((v - direct) / v).abs() <= 1e-14);
        }
    }
}
