//! Trigonometric moments of measures on the unit circle and their Verblunsky
//! coefficients.
//!
//! With `t_0 = 1` and `t_{-k} = conj(t_k)`, the monic orthogonal polynomials
//! `Φ_n` come from Gram–Schmidt on `1, z, .., z^N` under
//! `<z^j, z^k> = t_{j-k}`. Orthogonality does not depend on which argument is
//! conjugated, so `Φ_n` and `c_n = -conj(Φ_n(0))` are convention free.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{Cdd, Dd};
use crate::error::{param_err, Error, Result};
use crate::geometry::BallPoint;

/// Trigonometric moments `(t_1, .., t_N)` of a nontrivial probability measure
/// (positive definite Toeplitz matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigMomentVector(Vec<Complex64>);

impl TrigMomentVector {
    /// Validates positive definiteness of every leading Toeplitz minor.
    pub fn new(t: Vec<Complex64>) -> Result<Self> {
        if t.is_empty() {
            return param_err("moment vectors must be nonempty");
        }
        OpucSystem::build(&t)?;
        Ok(Self(t))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

/// Verblunsky coefficients, each strictly inside the unit disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerblunskyCoeffs(Vec<Complex64>);

impl VerblunskyCoeffs {
    pub fn new(c: Vec<Complex64>) -> Result<Self> {
        if c.is_empty() {
            return param_err("coefficient vectors must be nonempty");
        }
        if let Some(j) = c.iter().position(|v| !(v.norm() < 1.0)) {
            return Err(Error::Domain(format!(
                "|c_{}| = {} is not below 1",
                j + 1,
                c[j].norm()
            )));
        }
        Ok(Self(c))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

/// Monic orthogonal polynomials `Φ_0..Φ_N` (coefficients, constant term
/// first) and their squared norms. Gram–Schmidt loses about twice the digits
/// the moment map itself does, so it runs in double-double.
#[derive(Debug, Clone)]
pub struct OpucSystem {
    polys: Vec<Vec<Cdd>>,
    norms_sq: Vec<Dd>,
}

impl OpucSystem {
    fn start() -> Self {
        OpucSystem {
            polys: vec![vec![Cdd::ONE]],
            norms_sq: vec![Dd::ONE],
        }
    }

    fn build(t: &[Complex64]) -> Result<Self> {
        let tt: Vec<Cdd> = std::iter::once(Cdd::ONE)
            .chain(t.iter().map(|&v| Cdd::from(v)))
            .collect();
        let mut sys = Self::start();
        for n in 1..=t.len() {
            sys.extend(&tt, n)?;
        }
        Ok(sys)
    }

    /// Appends `Φ_n` using `t_0..t_n`.
    fn extend(&mut self, t: &[Cdd], n: usize) -> Result<()> {
        let mut v = vec![Cdd::default(); n + 1];
        v[n] = Cdd::ONE;
        for k in 0..n {
            let coef = inner(&v, &self.polys[k], t).div_real(self.norms_sq[k]);
            for (vi, pi) in v.iter_mut().zip(&self.polys[k]) {
                *vi = *vi - coef * *pi;
            }
        }
        let nsq = inner(&v, &v, t).re;
        if !(nsq.to_f64() > 0.0) {
            let det = self.norms_sq.iter().fold(nsq, |acc, &x| acc * x);
            return Err(Error::MomentValidity {
                minor: n + 1,
                value: det.to_f64(),
            });
        }
        self.polys.push(v);
        self.norms_sq.push(nsq);
        Ok(())
    }

    /// Coefficients of `Φ_n`, constant term first.
    pub fn poly(&self, n: usize) -> Vec<Complex64> {
        self.polys[n].iter().map(|v| v.to_c64()).collect()
    }

    /// `‖Φ_n‖²`.
    pub fn norm_sq(&self, n: usize) -> f64 {
        self.norms_sq[n].to_f64()
    }

    pub fn degree(&self) -> usize {
        self.polys.len() - 1
    }

    /// `c_n = -conj(Φ_n(0))` for `n = 1..N`.
    pub fn verblunsky(&self) -> Vec<Complex64> {
        self.polys[1..]
            .iter()
            .map(|p| (-p[0].conj()).to_c64())
            .collect()
    }
}

fn toeplitz(t: &[Cdd], d: isize) -> Cdd {
    if d >= 0 {
        t[d as usize]
    } else {
        t[(-d) as usize].conj()
    }
}

/// `<f, g> = Σ f_j conj(g_k) t_{j-k}`.
fn inner(f: &[Cdd], g: &[Cdd], t: &[Cdd]) -> Cdd {
    let mut s = Cdd::default();
    for (j, fj) in f.iter().enumerate() {
        if *fj == Cdd::default() {
            continue;
        }
        for (k, gk) in g.iter().enumerate() {
            s = s + *fj * gk.conj() * toeplitz(t, j as isize - k as isize);
        }
    }
    s
}

/// Monic orthogonal polynomials of the measure with moments `t`.
pub fn orthogonal_polynomials(t: &TrigMomentVector) -> OpucSystem {
    OpucSystem::build(t.as_slice()).expect("validated at construction")
}

pub fn verblunsky_from_trig_moments(t: &TrigMomentVector) -> Result<VerblunskyCoeffs> {
    Ok(VerblunskyCoeffs(
        OpucSystem::build(t.as_slice())?.verblunsky(),
    ))
}

/// Inverse map. Writing `Φ_n = zΦ_{n-1} - conj(c_n)Φ*_{n-1}` and pairing with
/// the constant 1 gives `Σ_j φ_j t_{j+1} = conj(c_n)‖Φ_{n-1}‖²`, which fixes
/// `t_n` from the known lower moments.
pub fn trig_moments_from_verblunsky(c: &VerblunskyCoeffs) -> Result<TrigMomentVector> {
    let mut t = vec![Cdd::ONE];
    let mut sys = OpucSystem::start();
    for n in 1..=c.len() {
        let phi = &sys.polys[n - 1];
        let mut tn = Cdd::from(c.as_slice()[n - 1])
            .conj()
            .scale(sys.norms_sq[n - 1]);
        for (j, pj) in phi.iter().enumerate().take(n - 1) {
            tn = tn - *pj * t[j + 1];
        }
        t.push(tn);
        sys.extend(&t, n)?;
    }
    Ok(TrigMomentVector(
        t[1..].iter().map(|v| v.to_c64()).collect(),
    ))
}

/// The coordinates `π_0..π_N` with `π_0 = ∏_r sqrt(1-|c_r|²)` and
/// `π_k = -conj(c_k) ∏_{r>k} sqrt(1-|c_r|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiCoordinates {
    pi: Vec<Complex64>,
}

impl PiCoordinates {
    /// `π_0..π_N`.
    pub fn values(&self) -> &[Complex64] {
        &self.pi
    }

    /// `π_0`, the mass left outside the ball.
    pub fn pi0(&self) -> f64 {
        self.pi[0].re
    }

    /// The reversed vector `z_j = π_{N+1-j}` as a point of the complex
    /// Euclidean ball.
    pub fn ball_point(&self) -> Result<BallPoint<Complex64>> {
        BallPoint::new(self.pi[1..].iter().rev().copied().collect(), 2.0)
    }
}

pub fn reversed_pi_coordinates(c: &VerblunskyCoeffs) -> PiCoordinates {
    let n = c.len();
    let mut pi = vec![Complex64::default(); n + 1];
    let mut tail = 1.0;
    for k in (1..=n).rev() {
        let ck = c.as_slice()[k - 1];
        pi[k] = -ck.conj() * tail;
        tail *= (1.0 - ck.norm_sqr()).sqrt();
    }
    pi[0] = Complex64::new(tail, 0.0);
    PiCoordinates { pi }
}
