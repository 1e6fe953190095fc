//! Limit laws checked against quadrature.

#![allow(clippy::too_many_arguments)]

use lpball::asymptotics::{
    gp_cdf, gp_second_moment, limit_cdf_pgd, limit_density_pgd, self_normalized_path,
};
use lpball::ball::pgd_coordinate_cdf;
use lpball::stats::ks_one_sample;
use lpball::RandomStream;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // Fixed panels first so narrow features are not skipped.
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            rec(
                f,
                lo,
                hi,
                fa,
                fm,
                fb,
                h / 6.0 * (fa + 4.0 * fm + fb),
                tol / PANELS as f64,
                40,
            )
        })
        .sum()
}

/// `∫_0^upper f`, substituting `x = y^k` so an integrable `x^{s-1}` factor at
/// the origin becomes smooth.
fn integrate_from_zero(f: impl Fn(f64) -> f64, upper: f64, k: f64) -> f64 {
    let g = |y: f64| {
        if y == 0.0 {
            0.0
        } else {
            f(y.powf(k)) * k * y.powf(k - 1.0)
        }
    };
    simpson(&g, 0.0, upper.powf(1.0 / k), 1e-13)
}

fn density_mass(a: f64, p: f64) -> f64 {
    // Substitution exponent making the |x|^{pa-1} singularity smooth.
    let k = (2.0 / (p * a)).max(1.0);
    let upper = (p * 60.0).powf(1.0 / p) + 2.0;
    2.0 * integrate_from_zero(|x| limit_density_pgd(a, p, x).unwrap(), upper, k)
}

#[test]
fn limit_density_integrates_to_one() {
    for p in [1.0, 1.5, 2.0, 3.0, 5.0] {
        for a in [0.3, 1.0 / p, 0.5, 1.0, 2.0, 4.5] {
            let m = density_mass(a, p);
            assert!((m - 1.0).abs() < 1e-8, "a={a} p={p}: {m}");
        }
    }
}

#[test]
fn gp_family_member_has_closed_form() {
    for p in [1.0f64, 1.5, 2.0, 3.0] {
        let norm = 2.0 * p.powf(1.0 / p) * gamma(1.0 + 1.0 / p);
        for x in [-2.5f64, -0.7, 0.1, 1.3, 4.0] {
            let want = (-x.abs().powf(p) / p).exp() / norm;
            let got = limit_density_pgd(1.0 / p, p, x).unwrap();
            assert!((got - want).abs() < 1e-14 * want.max(1.0), "p={p} x={x}");
        }
    }
    for x in [-3.0, -0.2, 0.5, 2.0] {
        let got = limit_density_pgd(1.0, 1.0, x).unwrap();
        assert!((got - 0.5 * (-x.abs()).exp()).abs() < 1e-15);
    }
}

#[test]
fn limit_cdf_matches_integrated_density() {
    for (a, p) in [(0.5f64, 1.0f64), (1.0, 2.0), (2.0, 1.5), (0.7, 3.0)] {
        let k = (2.0 / (p * a)).max(1.0);
        for x in [0.2, 0.9, 1.7] {
            let mass = integrate_from_zero(|t| limit_density_pgd(a, p, t).unwrap(), x, k);
            let cdf = limit_cdf_pgd(a, p, x).unwrap();
            assert!((cdf - 0.5 - mass).abs() < 1e-9, "a={a} p={p} x={x}");
            assert!((limit_cdf_pgd(a, p, -x).unwrap() - (1.0 - cdf)).abs() < 1e-15);
        }
    }
}

#[test]
fn gp_moments_and_cdf_by_quadrature() {
    for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
        let upper = 60f64.powf(1.0 / p) + 5.0;
        let z = 2.0 * simpson(&|x| (-x.powf(p)).exp(), 0.0, upper, 1e-14);
        let second = 2.0 * simpson(&|x| x * x * (-x.powf(p)).exp(), 0.0, upper, 1e-14) / z;
        let m = gp_second_moment(p).unwrap();
        assert!((m - second).abs() < 1e-9 * second, "p={p}: {m} vs {second}");
        for x in [0.3, 1.0, 1.8] {
            let mass = simpson(&|t| (-t.powf(p)).exp(), 0.0, x, 1e-14) / z;
            assert!(
                (gp_cdf(p, x).unwrap() - 0.5 - mass).abs() < 1e-10,
                "p={p} x={x}"
            );
        }
    }
}

#[test]
fn pgd_coordinate_cdf_by_quadrature() {
    for (a, b, p) in [
        (0.5f64, 1.0f64, 2.0f64),
        (1.0, 3.0, 1.0),
        (2.0, 1.5, 3.0),
        (0.7, 2.2, 1.5),
    ] {
        let k = (2.0 / (p * a)).max(1.0);
        let kernel = |x: f64| x.powf(p * a - 1.0) * (1.0 - x.powf(p)).powf(b - 1.0);
        let total = integrate_from_zero(kernel, 1.0, k);
        for x in [0.1, 0.45, 0.8] {
            let mass = integrate_from_zero(kernel, x, k) / total;
            let got = pgd_coordinate_cdf(a, b, p, x);
            assert!(
                (got - 0.5 - 0.5 * mass).abs() < 1e-9,
                "a={a} b={b} p={p} x={x}"
            );
        }
    }
}

#[test]
fn self_normalized_path_endpoint_is_normal() {
    let n = 10_000;
    let upper = 12.0;
    let z = 2.0 * simpson(&|x| (-x * x).exp(), 0.0, upper, 1e-14);
    let variance = 2.0 * simpson(&|x| x * x * (-x * x).exp(), 0.0, upper, 1e-14) / z;
    let normal = Normal::new(0.0, variance.sqrt()).unwrap();
    let mut s = RandomStream::new(2024);
    let ends: Vec<f64> = (0..2000)
        .map(|_| self_normalized_path(n, 2.0, &[0.0, 1.0], &mut s).unwrap()[1])
        .collect();
    let (_, pv) = ks_one_sample(&ends, |x| normal.cdf(x)).unwrap();
    assert!(pv > 1e-3, "p-value {pv}");
    assert_eq!(
        self_normalized_path(n, 2.0, &[0.0], &mut s).unwrap(),
        vec![0.0]
    );
}

#[test]
fn path_increments_are_uncorrelated() {
    let grid = [0.25, 0.5, 0.75, 1.0];
    let mut s = RandomStream::new(77);
    let reps = 2000;
    let incs: Vec<[f64; 4]> = (0..reps)
        .map(|_| {
            let v = self_normalized_path(4000, 1.5, &grid, &mut s).unwrap();
            [v[0], v[1] - v[0], v[2] - v[1], v[3] - v[2]]
        })
        .collect();
    let col = |j: usize| incs.iter().map(|r| r[j]).collect::<Vec<_>>();
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (col(i), col(j));
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let (ma, mb) = (mean(&a), mean(&b));
            let cov: f64 = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - ma) * (y - mb))
                .sum::<f64>()
                / reps as f64;
            let sd = |v: &[f64], m: f64| {
                (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / reps as f64).sqrt()
            };
            let r = cov / (sd(&a, ma) * sd(&b, mb));
            assert!(
                r.abs() < 3.0 / (reps as f64).sqrt(),
                "cells {i},{j}: r = {r}"
            );
        }
    }
}
