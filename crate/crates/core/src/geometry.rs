//! Canonical coordinates on real and complex `l_p` balls.
//!
//! For `x` in the open unit ball, `c_1 = x_1` and
//! `c_k = x_k (1 - ||x^{(k-1)}||_p^p)^{-1/p}`. The map is triangular and sends
//! the ball onto the cube `(-1,1)^N` (the polydisk in the complex case). The
//! remaining mass `1 - ||x^{(k)}||_p^p` is carried in double-double: as the
//! product `∏_{j<=k} (1 - |c_j|^p)` going forward, and by subtracting `|x_k|^p`
//! going back.

use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::{domain_err, Result};
use crate::sampling::check_p;

/// Points closer than this to the unit sphere are rejected, not clamped.
pub const BOUNDARY_MARGIN: f64 = 1e-14;

/// Scalar field of a ball: `f64` or `Complex64`.
pub trait Coordinate: Copy + std::fmt::Debug + PartialEq + Send + Sync {
    const IS_COMPLEX: bool;
    fn modulus(self) -> f64;
    fn scale(self, factor: f64) -> Self;
    fn zero() -> Self;
    /// Real and imaginary parts.
    fn parts(self) -> (f64, f64);
    /// Inverse of [`Coordinate::parts`]; real fields drop `im`.
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Coordinate for f64 {
    const IS_COMPLEX: bool = false;

    fn modulus(self) -> f64 {
        self.abs()
    }

    fn scale(self, factor: f64) -> Self {
        self * factor
    }

    fn zero() -> Self {
        0.0
    }

    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }

    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Coordinate for Complex64 {
    const IS_COMPLEX: bool = true;

    fn modulus(self) -> f64 {
        self.norm()
    }

    fn scale(self, factor: f64) -> Self {
        self * factor
    }

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

/// `|t|^p`
#[inline]
pub(crate) fn abs_pow(t: f64, p: f64) -> f64 {
    let t = t.abs();
    if p == 1.0 {
        t
    } else if p == 2.0 {
        t * t
    } else {
        t.powf(p)
    }
}

/// `ln(1 - |t|^p)` without cancellation near `|t| = 0` or `|t| = 1`.
#[inline]
pub(crate) fn ln_one_minus_pow(t: f64, p: f64) -> f64 {
    let tp = abs_pow(t, p);
    if tp < 0.5 {
        (-tp).ln_1p()
    } else {
        (-(p * t.abs().ln()).exp_m1()).ln()
    }
}

/// `||x||_p`, rescaled by `max |x_i|` so large or tiny entries do not
/// overflow or underflow.
pub fn p_norm<T: Coordinate>(x: &[T], p: f64) -> Result<f64> {
    check_p(p)?;
    if x.is_empty() {
        return domain_err("p-norm of an empty vector");
    }
    Ok(p_norm_unchecked(x, p))
}

pub(crate) fn p_norm_unchecked<T: Coordinate>(x: &[T], p: f64) -> f64 {
    let m = x.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.modulus()).sum();
    }
    let s: f64 = x.iter().map(|v| abs_pow(v.modulus() / m, p)).sum();
    m * s.powf(1.0 / p)
}

/// A point strictly inside the unit `l_p` ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T: Coordinate = f64> {
    coords: Vec<T>,
    p: f64,
}

impl<T: Coordinate> BallPoint<T> {
    pub fn new(coords: Vec<T>, p: f64) -> Result<Self> {
        let norm = p_norm(&coords, p)?;
        if !(norm < 1.0 - BOUNDARY_MARGIN) {
            return domain_err(format!(
                "||x||_{p} = {norm} is not below 1 - {BOUNDARY_MARGIN:e}"
            ));
        }
        Ok(Self { coords, p })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }
}

/// Canonical coordinates: every `|c_k| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCoords<T: Coordinate = f64> {
    c: Vec<T>,
    p: f64,
}

impl<T: Coordinate> CanonicalCoords<T> {
    pub fn new(c: Vec<T>, p: f64) -> Result<Self> {
        check_p(p)?;
        if c.is_empty() {
            return domain_err("canonical coordinates must be nonempty");
        }
        if let Some(k) = c.iter().position(|v| !(v.modulus() < 1.0)) {
            return domain_err(format!("|c_{}| = {} is not below 1", k + 1, c[k].modulus()));
        }
        Ok(Self { c, p })
    }

    pub fn coords(&self) -> &[T] {
        &self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn into_coords(self) -> Vec<T> {
        self.c
    }
}

pub fn to_canonical<T: Coordinate>(x: &BallPoint<T>) -> Result<CanonicalCoords<T>> {
    let mut c = vec![T::zero(); x.dim()];
    to_canonical_into(x.coords(), x.p(), &mut c)?;
    Ok(CanonicalCoords { c, p: x.p() })
}

const ROUNDING_SLACK: f64 = 1e-12;
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
const RESCALE_BITS: i32 = 256;
// 2^-256
const RESCALE_BELOW: f64 = 8.636168555094445e-78;

/// Remaining mass `m · 2^e` in double-double. The exponent keeps long
/// products of small factors from underflowing.
#[derive(Clone, Copy)]
struct Mass {
    m: Dd,
    e: i32,
}

impl Mass {
    const ONE: Mass = Mass { m: Dd::ONE, e: 0 };

    fn times(&mut self, f: Dd) {
        self.m = self.m * f;
        while self.m.hi() > 0.0 && self.m.hi() < RESCALE_BELOW {
            self.m = self.m * Dd::from(2f64.powi(RESCALE_BITS));
            self.e -= RESCALE_BITS;
        }
    }

    /// `1 - ||x^{(k)}||_p^p` from `1 - ||x^{(k-1)}||_p^p` by subtracting
    /// `|x_k|^p`. Only used while no rescaling has happened, where the
    /// subtraction is exact up to the rounding of `|x_k|^p`.
    fn try_minus(&self, t: Dd) -> Option<Mass> {
        let m = self.m - t;
        (self.e == 0 && m.hi() > 0.0).then_some(Mass { m, e: 0 })
    }

    /// `(m · 2^e)^{1/p}`
    fn root(&self, p: f64) -> Dd {
        let r = if p == 1.0 {
            self.m
        } else if p == 2.0 {
            self.m.sqrt()
        } else {
            self.m.powd(Dd::ONE / Dd::from(p))
        };
        if self.e == 0 {
            r
        } else {
            r * Dd::from((self.e as f64 / p).exp2())
        }
    }

    fn to_f64(self) -> f64 {
        self.m.to_f64() * (self.e as f64).exp2()
    }
}

/// `|v|^p` in double-double.
fn abs_pow_dd<T: Coordinate>(v: T, p: f64) -> Dd {
    let (re, im) = v.parts();
    if p == 1.0 && !T::IS_COMPLEX {
        return Dd::from(re.abs());
    }
    let sq = Dd::prod(re, re) + Dd::prod(im, im);
    if p == 2.0 {
        sq
    } else {
        sq.powd(Dd::from(p) / Dd::from(2.0))
    }
}

/// `v · f`, rounded once.
fn scale_dd<T: Coordinate>(v: T, f: Dd) -> T {
    let (re, im) = v.parts();
    T::from_parts((Dd::from(re) * f).to_f64(), (Dd::from(im) * f).to_f64())
}

pub(crate) fn to_canonical_into<T: Coordinate>(x: &[T], p: f64, out: &mut [T]) -> Result<()> {
    let mut rest = Mass::ONE;
    for (k, (&xk, ck)) in x.iter().zip(out.iter_mut()).enumerate() {
        let mut v = scale_dd(xk, Dd::ONE / rest.root(p));
        let r = v.modulus();
        if (1.0..1.0 + ROUNDING_SLACK).contains(&r) {
            // The remaining mass is only known to a few ulps; a point that
            // passed the norm check keeps its coordinate inside the interval.
            v = v.scale(BELOW_ONE / r);
        }
        if !(v.modulus() < 1.0) {
            let prefix = (1.0 - rest.to_f64()).max(0.0).powf(1.0 / p);
            return domain_err(format!(
                "coordinate {} leaves the ball (prefix norm ||x^({k})||_p = {prefix})",
                k + 1
            ));
        }
        *ck = v;
        match rest.try_minus(abs_pow_dd(xk, p)) {
            Some(next) => rest = next,
            None => rest.times(Dd::ONE - abs_pow_dd(v, p)),
        }
    }
    Ok(())
}

/// `x_k = c_k ∏_{j<k} (1 - |c_j|^p)^{1/p}`.
pub fn from_canonical<T: Coordinate>(c: &CanonicalCoords<T>) -> Result<BallPoint<T>> {
    let mut x = vec![T::zero(); c.dim()];
    from_canonical_into(c.coords(), c.p(), &mut x);
    Ok(BallPoint {
        coords: x,
        p: c.p(),
    })
}

pub(crate) fn from_canonical_into<T: Coordinate>(c: &[T], p: f64, out: &mut [T]) {
    let mut rest = Mass::ONE;
    for (&ck, xk) in c.iter().zip(out.iter_mut()) {
        *xk = scale_dd(ck, rest.root(p));
        rest.times(Dd::ONE - abs_pow_dd(ck, p));
    }
}

/// `ln ∏_k (1 - |c_k|^p)`, which equals `ln(1 - ||x||_p^p)` for
/// `x = from_canonical(c)`.
pub fn log_remaining_mass<T: Coordinate>(c: &CanonicalCoords<T>) -> f64 {
    c.coords()
        .iter()
        .map(|v| ln_one_minus_pow(v.modulus(), c.p()))
        .sum()
}

/// Log-determinant of `∂x/∂c` for the real ball:
/// `Σ_k ((N-k)/p) ln(1 - |c_k|^p)`.
pub fn jacobian_logdet(c: &CanonicalCoords<f64>) -> f64 {
    let n = c.dim();
    c.coords()
        .iter()
        .enumerate()
        .map(|(i, &ck)| (n - i - 1) as f64 / c.p() * ln_one_minus_pow(ck, c.p()))
        .sum()
}

/// `∏_k (1 - |c_k|^p)^{(N-k)/p}` evaluated factor by factor.
pub fn jacobian_product(c: &CanonicalCoords<f64>) -> f64 {
    let n = c.dim();
    c.coords()
        .iter()
        .enumerate()
        .map(|(i, &ck)| (1.0 - abs_pow(ck, c.p())).powf((n - i - 1) as f64 / c.p()))
        .product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarPair {
    pub radius: f64,
    pub direction: Vec<f64>,
}

impl PolarPair {
    pub fn recompose(&self) -> Vec<f64> {
        self.direction.iter().map(|d| d * self.radius).collect()
    }
}

/// `x -> (||x||_p, x / ||x||_p)`
pub fn polar(x: &[f64], p: f64) -> Result<PolarPair> {
    let radius = p_norm(x, p)?;
    if radius == 0.0 {
        return domain_err("polar decomposition of the zero vector");
    }
    Ok(PolarPair {
        radius,
        direction: x.iter().map(|v| v / radius).collect(),
    })
}

/// `(x_1 + i y_1, ..) -> (x_1, y_1, ..)`. Maps the complex `l_2` ball onto the
/// real `l_2` ball of twice the dimension; for other `p` the image of the
/// ball is not a ball.
pub fn complex_embed(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|v| [v.re, v.im]).collect()
}
