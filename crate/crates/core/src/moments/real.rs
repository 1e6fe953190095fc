//! Canonical moments of probability measures on `[0, 1]`.
//!
//! Given interior moments `m_1..m_{n-1}`, the admissible `m_n` fill an
//! interval `[c_n^-, c_n^+]`. Each end is the zero of a Hankel determinant
//! that is affine in `m_n` (it only enters the bottom-right corner), so it is
//! a Schur complement of the leading block:
//!
//! * lower: `H_n` with entries `m_{i+j+(n mod 2)}`; `c^- = b^T A^{-1} b`
//! * upper: `Hbar_n` with entries `m_{i+j+o} - m_{i+j+o+1}`, `o = 1 - n mod 2`;
//!   `c^+ = m_{n-1} - b^T A^{-1} b`
//!
//! The solves run in double-double arithmetic. The canonical moment is
//! `c_n = (m_n - c^-)/(c^+ - c^-)`.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{param_err, Error, Result};
use crate::linalg;
use crate::rng::RandomStream;
use crate::sampling::draw_beta;

/// Largest supported number of moments. The moment maps lose about
/// `log10(4) ≈ 0.6` digits per moment, and beyond this even double-double
/// Hankel solves no longer determine the trailing canonical moments.
pub const MAX_MOMENT_DIM: usize = 20;

/// Pivot ratio above which a Hankel solve is reported as ill-conditioned.
const MAX_PIVOT_RATIO: f64 = 1e28;

/// Moments `(m_1, .., m_N)` in the interior of the moment space of `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealMomentVector(Vec<f64>);

impl RealMomentVector {
    /// Validates interiority by running the canonical-moment map.
    pub fn new(m: Vec<f64>) -> Result<Self> {
        canonical_dd(&m)?;
        Ok(Self(m))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Canonical moments, each in the open interval (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealCanonicalMoments(Vec<f64>);

impl RealCanonicalMoments {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        check_dim(c.len())?;
        if let Some(j) = c.iter().position(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Domain(format!(
                "canonical moment c_{} = {} is not in (0,1)",
                j + 1,
                c[j]
            )));
        }
        Ok(Self(c))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return param_err("moment vectors must be nonempty");
    }
    if n > MAX_MOMENT_DIM {
        return param_err(format!(
            "{n} moments exceed the supported maximum of {MAX_MOMENT_DIM} (the maps are exponentially ill-conditioned)"
        ));
    }
    Ok(())
}

/// Schur-complement root of an `size x size` matrix with entries `entry(i+j)`.
fn schur_root(size: usize, entry: impl Fn(usize) -> Dd, n: usize) -> Result<Dd> {
    let s = size - 1;
    if s == 0 {
        return Ok(Dd::ZERO);
    }
    let a: Vec<Vec<Dd>> = (0..s)
        .map(|i| (0..s).map(|j| entry(i + j)).collect())
        .collect();
    let b: Vec<Dd> = (0..s).map(|i| entry(i + s)).collect();
    let f = linalg::factor(a).ok_or_else(|| Error::MomentBoundary {
        index: n - 1,
        detail: "singular Hankel block".into(),
    })?;
    let cond = f.pivot_ratio();
    if !(cond < MAX_PIVOT_RATIO) {
        return Err(Error::Conditioning {
            index: n,
            condition: cond,
        });
    }
    let x = f.solve(&b);
    Ok(b.iter()
        .zip(&x)
        .fold(Dd::ZERO, |acc, (&bi, &xi)| acc + bi * xi))
}

/// `m` holds `m_0 = 1, m_1, .., m_{n-1}` (at least).
fn bounds_dd(m: &[Dd], n: usize) -> Result<(Dd, Dd)> {
    let odd = n % 2;
    let lower = schur_root(n / 2 + 1, |k| m[k + odd], n)?;
    let o = 1 - odd;
    let upper = m[n - 1] - schur_root(n.div_ceil(2), |k| m[k + o] - m[k + o + 1], n)?;
    Ok((lower, upper))
}

/// Extreme admissible values `(c^-, c^+)` of `m_n` given the interior prefix
/// `m_1..m_{n-1}`. The empty prefix gives `(0, 1)`.
pub fn hankel_bounds(prefix: &[f64]) -> Result<(f64, f64)> {
    check_dim(prefix.len() + 1)?;
    canonical_dd(prefix)?;
    let mut m: Vec<Dd> = std::iter::once(Dd::ONE)
        .chain(prefix.iter().map(|&v| Dd::from(v)))
        .collect();
    m.push(Dd::ZERO);
    let (lo, hi) = bounds_dd(&m, prefix.len() + 1)?;
    Ok((lo.to_f64(), hi.to_f64()))
}

/// Canonical moments together with the range `c^+ - c^-` at every step.
fn canonical_dd(m: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if m.is_empty() {
        return Ok((vec![], vec![]));
    }
    check_dim(m.len())?;
    let mm: Vec<Dd> = std::iter::once(Dd::ONE)
        .chain(m.iter().map(|&v| Dd::from(v)))
        .collect();
    let mut c = Vec::with_capacity(m.len());
    let mut ranges = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let (lo, hi) = bounds_dd(&mm, n)?;
        let range = hi - lo;
        let pos = mm[n] - lo;
        if !(pos.to_f64() > 0.0 && (hi - mm[n]).to_f64() > 0.0) {
            return Err(Error::MomentBoundary {
                index: n,
                detail: format!(
                    "m_{n} = {} is outside ({}, {})",
                    m[n - 1],
                    lo.to_f64(),
                    hi.to_f64()
                ),
            });
        }
        let cn = (pos / range).to_f64();
        if !(cn > 0.0 && cn < 1.0) {
            return Err(Error::MomentBoundary {
                index: n,
                detail: format!("canonical moment rounds to {cn}"),
            });
        }
        c.push(cn);
        ranges.push(range.to_f64());
    }
    Ok((c, ranges))
}

pub fn real_moments_to_canonical(m: &RealMomentVector) -> Result<RealCanonicalMoments> {
    let (c, _) = canonical_dd(m.as_slice())?;
    Ok(RealCanonicalMoments(c))
}

/// Canonical moments and the per-step ranges `c_n^+ - c_n^-`.
pub fn real_moments_to_canonical_with_ranges(
    m: &RealMomentVector,
) -> Result<(RealCanonicalMoments, Vec<f64>)> {
    let (c, r) = canonical_dd(m.as_slice())?;
    Ok((RealCanonicalMoments(c), r))
}

/// Rebuilds `m_n = c_n^- + c_n (c_n^+ - c_n^-)` one moment at a time, keeping
/// the partial moments in double-double until the end.
pub fn real_canonical_to_moments(c: &RealCanonicalMoments) -> Result<RealMomentVector> {
    Ok(real_canonical_to_moments_with_ranges(c)?.0)
}

/// Moments and the ranges `c_n^+ - c_n^-` met while building them.
pub fn real_canonical_to_moments_with_ranges(
    c: &RealCanonicalMoments,
) -> Result<(RealMomentVector, Vec<f64>)> {
    let n_max = c.len();
    let mut ranges = Vec::with_capacity(n_max);
    let mut mm = Vec::with_capacity(n_max + 2);
    mm.push(Dd::ONE);
    for n in 1..=n_max {
        mm.push(Dd::ZERO);
        let (lo, hi) = bounds_dd(&mm, n)?;
        mm[n] = lo + Dd::from(c.as_slice()[n - 1]) * (hi - lo);
        ranges.push((hi - lo).to_f64());
    }
    Ok((
        RealMomentVector(mm[1..].iter().map(|v| v.to_f64()).collect()),
        ranges,
    ))
}

/// `ln` of the Jacobian `∂(m)/∂(c) = ∏_{j<N} (c_j (1 - c_j))^{N-j}`.
pub fn real_canonical_jacobian_logdet(c: &RealCanonicalMoments) -> f64 {
    let n = c.len();
    c.as_slice()
        .iter()
        .enumerate()
        .take(n.saturating_sub(1))
        .map(|(i, &cj)| (n - i - 1) as f64 * (cj * (1.0 - cj)).ln())
        .sum()
}

/// Uniform draws from the moment space: independent canonical moments
/// `C_j ~ Beta(N-j+1, N-j+1)` pushed through [`real_canonical_to_moments`].
pub fn sample_uniform_moment_space(
    n: usize,
    count: usize,
    stream: &mut RandomStream,
) -> Result<Vec<RealMomentVector>> {
    check_dim(n)?;
    (0..count)
        .map(|_| {
            let c: Vec<f64> = (1..=n)
                .map(|j| {
                    let s = (n - j + 1) as f64;
                    draw_beta(s, s, false, stream)
                })
                .collect::<Result<_>>()?;
            real_canonical_to_moments(&RealCanonicalMoments(c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Moments of the two-point measure `w δ_x + (1-w) δ_y`.
    fn two_point(w: f64, x: f64, y: f64, k: i32) -> f64 {
        w * x.powi(k) + (1.0 - w) * y.powi(k)
    }

    #[test]
    fn first_moment_range() {
        assert_eq!(hankel_bounds(&[]).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn second_moment_range_matches_two_point_search() {
        // Brute force over two-point measures with mean 1/2.
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=400 {
            let x = 0.5 * i as f64 / 400.0;
            for j in 0..=400 {
                let y = 0.5 + 0.5 * j as f64 / 400.0;
                if y - x < 1e-12 {
                    continue;
                }
                let w = (y - 0.5) / (y - x);
                let m2 = two_point(w, x, y, 2);
                lo = lo.min(m2);
                hi = hi.max(m2);
            }
        }
        let (l, h) = hankel_bounds(&[0.5]).unwrap();
        assert!(close(l, lo, 1e-12) && close(l, 0.25, 1e-15));
        assert!(close(h, hi, 1e-12) && close(h, 0.5, 1e-15));
    }

    #[test]
    fn arcsine_and_lebesgue() {
        let m = RealMomentVector::new(vec![0.5, 0.375, 0.3125]).unwrap();
        for c in real_moments_to_canonical(&m).unwrap().as_slice() {
            assert!(close(*c, 0.5, 1e-15));
        }
        let m = RealMomentVector::new(vec![0.5, 1.0 / 3.0, 0.25]).unwrap();
        let c = real_moments_to_canonical(&m).unwrap();
        let want = [0.5, 1.0 / 3.0, 0.5];
        for (a, b) in c.as_slice().iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn boundary_reports_index() {
        // m_2 = m_1^2 is a point mass: on the boundary.
        let err = RealMomentVector::new(vec![0.5, 0.25, 0.1]).unwrap_err();
        assert!(
            matches!(err, Error::MomentBoundary { index: 2, .. }),
            "{err}"
        );
        let err = RealMomentVector::new(vec![0.5, 0.3, 0.3]).unwrap_err();
        assert!(
            matches!(err, Error::MomentBoundary { index: 3, .. }),
            "{err}"
        );
        assert!(RealMomentVector::new(vec![1.2]).is_err());
        assert!(RealCanonicalMoments::new(vec![0.2, 1.0]).is_err());
        assert!(RealCanonicalMoments::new(vec![0.5; MAX_MOMENT_DIM + 1]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let c = RealCanonicalMoments::new(vec![0.5, 0.77]).unwrap();
        assert!(close(
            real_canonical_jacobian_logdet(&c),
            0.25f64.ln(),
            1e-15
        ));
        let c = RealCanonicalMoments::new(vec![0.3]).unwrap();
        assert_eq!(real_canonical_jacobian_logdet(&c), 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut s = RandomStream::new(21);
        for n in 2..=8 {
            let c: Vec<f64> = (0..n).map(|_| 0.1 + 0.8 * s.next_open01()).collect();
            let h = 1e-6;
            let jac: Vec<Vec<f64>> = (0..n)
                .map(|row| {
                    (0..n)
                        .map(|col| {
                            let mut up = c.clone();
                            let mut dn = c.clone();
                            up[col] += h;
                            dn[col] -= h;
                            let mu = real_canonical_to_moments(&RealCanonicalMoments(up)).unwrap();
                            let md = real_canonical_to_moments(&RealCanonicalMoments(dn)).unwrap();
                            (mu.as_slice()[row] - md.as_slice()[row]) / (2.0 * h)
                        })
                        .collect()
                })
                .collect();
            let det = linalg::determinant(&jac);
            let want = real_canonical_jacobian_logdet(&RealCanonicalMoments(c)).exp();
            assert!(((det - want) / want).abs() < 1e-5, "n={n}: {det} vs {want}");
        }
    }

    #[test]
    fn uniform_moment_space_first_coordinate() {
        let mut s = RandomStream::new(2);
        let draws = sample_uniform_moment_space(1, 20_000, &mut s).unwrap();
        let mean = draws.iter().map(|m| m.as_slice()[0]).sum::<f64>() / 20_000.0;
        assert!(close(mean, 0.5, 0.01));
        assert!(sample_uniform_moment_space(0, 1, &mut s).is_err());
    }
}
