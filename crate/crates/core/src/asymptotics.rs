//! Closed-form limit objects: large-deviation rate functions, limit laws of
//! rescaled low-dimensional projections, and self-normalized partial-sum
//! paths.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::ball::sample_cone_sphere;
use crate::error::{param_err, Result};
use crate::geometry::{abs_pow, ln_one_minus_pow, Coordinate};
use crate::rng::RandomStream;
use crate::sampling::{check_p, check_positive};

/// Value of a rate function, `+∞` outside its effective domain.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateValue(f64);

impl RateValue {
    pub const INFINITE: RateValue = RateValue(f64::INFINITY);

    fn finite(v: f64) -> Self {
        // -ln(1 - s) for tiny s can round to -0.0
        RateValue(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::fmt::Display for RateValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `I(x) = -(1/p) ln(1 - ||x||_p^p)`, infinite for `||x||_p >= 1`.
pub fn ldp_rate_ball<T: Coordinate>(x: &[T], p: f64) -> Result<RateValue> {
    check_p(p)?;
    let s: f64 = x.iter().map(|v| abs_pow(v.modulus(), p)).sum();
    if s >= 1.0 {
        return Ok(RateValue::INFINITE);
    }
    Ok(RateValue::finite(-(-s).ln_1p() / p))
}

/// `J(c) = -(1/p) Σ ln(1 - |c_i|^p)`, infinite once some `|c_i| >= 1`.
pub fn ldp_rate_canonical<T: Coordinate>(c: &[T], p: f64) -> Result<RateValue> {
    check_p(p)?;
    if c.iter().any(|v| v.modulus() >= 1.0) {
        return Ok(RateValue::INFINITE);
    }
    let s: f64 = c.iter().map(|v| ln_one_minus_pow(v.modulus(), p)).sum();
    Ok(RateValue::finite(-s / p))
}

/// Rate of `Beta(a, c n)` draws as `n → ∞`: `-c ln(1 - x)` on `[0, 1)`.
pub fn ldp_rate_beta(x: f64, c: f64) -> Result<RateValue> {
    check_positive("c", c)?;
    if !(x >= 0.0) {
        return param_err(format!("x = {x} must be in [0, 1)"));
    }
    if x >= 1.0 {
        return Ok(RateValue::INFINITE);
    }
    Ok(RateValue::finite(-c * (-x).ln_1p()))
}

/// `-(1/2) ln(1 - ||f||_2)` for `f` given by its coefficients in an
/// orthonormal basis. The norm enters unsquared.
pub fn ldp_rate_functional(coeffs: &[f64]) -> RateValue {
    let scale = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm = if scale == 0.0 {
        0.0
    } else {
        scale
            * coeffs
                .iter()
                .map(|v| (v / scale).powi(2))
                .sum::<f64>()
                .sqrt()
    };
    if norm >= 1.0 {
        return RateValue::INFINITE;
    }
    RateValue::finite(-0.5 * (-norm).ln_1p())
}

fn check_ap(a: f64, p: f64) -> Result<()> {
    check_positive("a", a)?;
    check_p(p)
}

/// Density of `ε Z^{1/p}` with `Z ~ Gamma(a, rate 1/p)`:
/// `p^{1-a} / (2Γ(a)) |x|^{pa-1} exp(-|x|^p / p)`.
pub fn limit_density_pgd(a: f64, p: f64, x: f64) -> Result<f64> {
    check_ap(a, p)?;
    let t = x.abs();
    if t == 0.0 {
        let pa = p * a;
        return Ok(if pa < 1.0 {
            f64::INFINITY
        } else if pa == 1.0 {
            p.powf(1.0 - a) / (2.0 * ln_gamma(a).exp())
        } else {
            0.0
        });
    }
    let ln = (1.0 - a) * p.ln() - std::f64::consts::LN_2 - ln_gamma(a) + (p * a - 1.0) * t.ln()
        - t.powf(p) / p;
    Ok(ln.exp())
}

/// CDF of [`limit_density_pgd`]: `1/2 ± P(a, |x|^p/p)/2`.
pub fn limit_cdf_pgd(a: f64, p: f64, x: f64) -> Result<f64> {
    check_ap(a, p)?;
    Ok(symmetric_gamma_cdf(a, x.abs().powf(p) / p, x))
}

/// CDF of `G_p`, the law with density proportional to `exp(-|x|^p)`.
pub fn gp_cdf(p: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    Ok(symmetric_gamma_cdf(1.0 / p, x.abs().powf(p), x))
}

fn symmetric_gamma_cdf(a: f64, z: f64, x: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    let half = 0.5 * gamma_lr(a, z);
    if x > 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// `E G_p^2 = Γ(3/p) / Γ(1/p)`, the variance of the s = 1 marginal of
/// [`self_normalized_path`] in the limit.
pub fn gp_second_moment(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((ln_gamma(3.0 / p) - ln_gamma(1.0 / p)).exp())
}

/// Values `p^{-1/p} N^{1/p-1/2} Σ_{k<=⌊Ns⌋} η_k` at each `s` of `grid`, with
/// `η` one cone-measure draw on the sphere of dimension `N`.
pub fn self_normalized_path(
    n: usize,
    p: f64,
    grid: &[f64],
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    check_p(p)?;
    if n == 0 {
        return param_err("N must be at least 1");
    }
    if grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return param_err("grid values must lie in [0, 1]");
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return param_err("grid must be strictly increasing");
    }
    let eta = sample_cone_sphere(n, p, 1, stream)?.rows()[0].clone();
    let scale = p.powf(-1.0 / p) * (n as f64).powf(1.0 / p - 0.5);
    let mut out = Vec::with_capacity(grid.len());
    let (mut k, mut sum) = (0usize, 0.0);
    for &s in grid {
        let upto = ((n as f64 * s).floor() as usize).min(n);
        while k < upto {
            sum += eta[k];
            k += 1;
        }
        out.push(scale * sum);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rate_examples() {
        assert_eq!(ldp_rate_ball(&[0.0, 0.0], 1.5).unwrap().value(), 0.0);
        // ||x||_p^p = 1 - e^{-p}
        let p = 3.0f64;
        let x = (1.0 - (-p).exp()).powf(1.0 / p);
        assert!((ldp_rate_ball(&[x], p).unwrap().value() - 1.0).abs() < 1e-14);
        assert!(ldp_rate_ball(&[0.6, 0.8], 2.0).unwrap().is_infinite());
        assert!(ldp_rate_ball(&[Complex64::new(0.6, 0.8)], 2.0)
            .unwrap()
            .is_infinite());

        assert_eq!(ldp_rate_canonical(&[0.0; 3], 2.0).unwrap().value(), 0.0);
        let j1 = ldp_rate_canonical(&[0.4], 1.5).unwrap().value();
        assert!((j1 + (1.0 - 0.4f64.powf(1.5)).ln() / 1.5).abs() < 1e-15);
        let j2 = ldp_rate_canonical(&[-0.7, 0.2], 1.5).unwrap().value();
        let j12 = ldp_rate_canonical(&[0.4, -0.7, 0.2], 1.5).unwrap().value();
        assert!((j12 - j1 - j2).abs() < 1e-15);
        assert!(ldp_rate_canonical(&[0.2, 1.0], 1.0).unwrap().is_infinite());
    }

    #[test]
    fn beta_rate_examples() {
        assert_eq!(ldp_rate_beta(0.0, 2.5).unwrap().value(), 0.0);
        let c = 2.5f64;
        let x = 1.0 - (-1.0 / c).exp();
        assert!((ldp_rate_beta(x, c).unwrap().value() - 1.0).abs() < 1e-14);
        assert!(ldp_rate_beta(1.0, c).unwrap().is_infinite());
        assert!(ldp_rate_beta(0.5, 0.0).is_err());
    }

    #[test]
    fn functional_rate() {
        assert_eq!(ldp_rate_functional(&[0.0, 0.0]).value(), 0.0);
        let r = 1.0 - (-2.0f64).exp();
        let v = [r * 0.6, r * 0.8];
        assert!((ldp_rate_functional(&v).value() - 1.0).abs() < 1e-14);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let w = [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        assert!((ldp_rate_functional(&w).value() - 1.0).abs() < 1e-12);
        assert!(ldp_rate_functional(&[1.0]).is_infinite());
    }

    #[test]
    fn density_special_cases() {
        // p = 1, a = 1: Laplace
        for x in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            let d = limit_density_pgd(1.0, 1.0, x).unwrap();
            assert!((d - 0.5 * (-f64::abs(x)).exp()).abs() < 1e-15);
            assert_eq!(d, limit_density_pgd(1.0, 1.0, -x).unwrap());
        }
        // a = 1/p: (2 p^{1/p} Γ(1+1/p))^{-1} exp(-|x|^p/p)
        let p: f64 = 1.7;
        let norm = 2.0 * p.powf(1.0 / p) * ln_gamma(1.0 + 1.0 / p).exp();
        for x in [0.0, 0.4, -1.3] {
            let want = (-f64::abs(x).powf(p) / p).exp() / norm;
            assert!((limit_density_pgd(1.0 / p, p, x).unwrap() - want).abs() < 1e-14);
        }
        assert!(limit_density_pgd(0.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn cdf_limits() {
        assert_eq!(limit_cdf_pgd(0.5, 2.0, 0.0).unwrap(), 0.5);
        assert!(limit_cdf_pgd(2.0, 2.0, 40.0).unwrap() > 1.0 - 1e-15);
        assert!(gp_cdf(1.0, -40.0).unwrap() < 1e-15);
        // G_1 is Laplace with unit scale.
        assert!((gp_cdf(1.0, 1.0).unwrap() - (1.0 - 0.5 * (-1.0f64).exp())).abs() < 1e-15);
        assert!((gp_second_moment(2.0).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn path_shape() {
        let mut s = RandomStream::new(5);
        let v = self_normalized_path(100, 2.0, &[0.0, 0.5, 1.0], &mut s).unwrap();
        assert_eq!(v[0], 0.0);
        assert_eq!(v.len(), 3);
        assert!(self_normalized_path(10, 2.0, &[0.5, 0.5], &mut s).is_err());
        assert!(self_normalized_path(10, 2.0, &[1.5], &mut s).is_err());
    }
}
