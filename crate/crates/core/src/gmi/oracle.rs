//! Quadrature reference value for standard bivariate Gaussians.

use super::{GmiError, Result};

pub const DEFAULT_ORACLE_GRID: usize = 256;

const HALF_WIDTH: f64 = 6.0;

/// `I(X; Y)` for a standard bivariate Gaussian with correlation `r`, by the
/// midpoint rule with `grid` points per axis over `[-6, 6]^2`.
///
/// With `f` the joint density and `g = f_X f_Y`, the measure
/// `1 - 2 ∬ f g / (f + g)` equals `∬ (f - g)^2 / (2 (f + g))` because both
/// densities integrate to one. The second form is used: it is exactly zero at
/// `r = 0` and insensitive to the mass lost by truncating the domain.
pub fn gaussian_gmi_oracle(r: f64, grid: usize) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(GmiError::Domain(format!("correlation must lie in (-1, 1), got {r}")));
    }
    if grid < 64 {
        return Err(GmiError::Domain(format!("quadrature grid must be >= 64, got {grid}")));
    }
    let h = 2.0 * HALF_WIDTH / grid as f64;
    let one_minus = 1.0 - r * r;
    let joint_norm = 1.0 / (2.0 * std::f64::consts::PI * one_minus.sqrt());
    let prod_norm = 1.0 / (2.0 * std::f64::consts::PI);

    let mut total = 0.0;
    for i in 0..grid {
        let x = -HALF_WIDTH + (i as f64 + 0.5) * h;
        let mut row = 0.0;
        for j in 0..grid {
            let y = -HALF_WIDTH + (j as f64 + 0.5) * h;
            let f = joint_norm * (-(x * x - 2.0 * r * x * y + y * y) / (2.0 * one_minus)).exp();
            let g = prod_norm * (-(x * x + y * y) / 2.0).exp();
            let s = f + g;
            if s > 0.0 {
                row += (f - g) * (f - g) / (2.0 * s);
            }
        }
        total += row;
    }
    Ok(total * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_is_zero() {
        assert_eq!(gaussian_gmi_oracle(0.0, 128).unwrap(), 0.0);
    }

    #[test]
    fn sign_symmetric() {
        for r in [0.3, 0.7, 0.95] {
            let a = gaussian_gmi_oracle(r, 128).unwrap();
            let b = gaussian_gmi_oracle(-r, 128).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(gaussian_gmi_oracle(1.0, 256).is_err());
        assert!(gaussian_gmi_oracle(-1.2, 256).is_err());
        assert!(gaussian_gmi_oracle(f64::NAN, 256).is_err());
        assert!(gaussian_gmi_oracle(0.5, 32).is_err());
    }

    #[test]
    fn increases_with_correlation() {
        let vals: Vec<f64> = [0.1, 0.4, 0.7, 0.9].iter().map(|&r| gaussian_gmi_oracle(r, 128).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
        assert!(vals.iter().all(|v| (0.0..1.0).contains(v)));
    }
}
