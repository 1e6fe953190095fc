//! Univariate and simplex building blocks.
//!
//! Everything here draws from a caller-owned [`RandomStream`] in a fixed,
//! documented order so that draws are reproducible from `(seed, position)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain_err, param_err, Result};
use crate::rng::RandomStream;

/// Positive parameter vectors `(a, b)` of a generalized Dirichlet law: the
/// stick-breaking variables are independent `Beta(a_j, b_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdParams {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl GdParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return param_err(format!("a has {} entries but b has {}", a.len(), b.len()));
        }
        if a.is_empty() {
            return param_err("generalized Dirichlet parameters must be nonempty");
        }
        for (j, (&aj, &bj)) in a.iter().zip(&b).enumerate() {
            if !(aj > 0.0 && aj.is_finite() && bj > 0.0 && bj.is_finite()) {
                return param_err(format!(
                    "a[{j}]={aj}, b[{j}]={bj}: entries must be positive and finite"
                ));
            }
        }
        Ok(Self { a, b })
    }

    /// Parameters satisfying `b_{j-1} = a_j + b_j`, for which the GD law is
    /// `Dir_n(a_1..a_n; b_n)`.
    pub fn dirichlet(a: Vec<f64>, b_last: f64) -> Result<Self> {
        let mut b = vec![0.0; a.len()];
        let mut acc = b_last;
        for j in (0..a.len()).rev() {
            b[j] = acc;
            acc += a[j];
        }
        Self::new(a, b)
    }

    /// Parameters of the uniform law on the `n`-dimensional `l_p` ball:
    /// `a_j = 1/p`, `b_j = 1 + (n-j)/p`.
    pub fn uniform_ball(n: usize, p: f64) -> Result<Self> {
        check_p(p)?;
        let a = vec![1.0 / p; n];
        let b = (1..=n).map(|j| 1.0 + (n - j) as f64 / p).collect();
        Self::new(a, b)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The first `k` parameter pairs.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return param_err(format!("cannot truncate {} parameters to {k}", self.len()));
        }
        Self::new(self.a[..k].to_vec(), self.b[..k].to_vec())
    }

    /// Whether `b_{j-1} = a_j + b_j` holds up to a relative tolerance.
    pub fn is_dirichlet(&self, tol: f64) -> bool {
        self.b
            .windows(2)
            .zip(&self.a[1..])
            .all(|(w, &a)| (w[0] - (a + w[1])).abs() <= tol * w[0].abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplexKind {
    /// `x_1 + ... + x_k < 1`
    Open,
    /// `x_1 + ... + x_k = 1`
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
    kind: SimplexKind,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>, kind: SimplexKind) -> Result<Self> {
        if coords.is_empty() {
            return domain_err("simplex point must be nonempty");
        }
        if let Some(j) = coords.iter().position(|&x| !(x > 0.0)) {
            return domain_err(format!(
                "simplex coordinate {j} is {} (must be > 0)",
                coords[j]
            ));
        }
        let sum: f64 = coords.iter().sum();
        match kind {
            SimplexKind::Open if !(sum < 1.0) => {
                return domain_err(format!("open simplex point sums to {sum}"));
            }
            SimplexKind::Closed if (sum - 1.0).abs() > 1e-12 => {
                return domain_err(format!("closed simplex point sums to {sum}"));
            }
            _ => {}
        }
        Ok(Self { coords, kind })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn kind(&self) -> SimplexKind {
        self.kind
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return param_err(format!("p = {p}: need 1 <= p < infinity"));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return param_err(format!("{name} = {v}: must be positive and finite"));
    }
    Ok(())
}

/// Standard normal by the Marsaglia polar method (second variate discarded).
pub fn draw_standard_normal(stream: &mut RandomStream) -> f64 {
    loop {
        let u = stream.next_open_signed();
        let v = stream.next_open_signed();
        let s = u * u + v * v;
        if s < 1.0 && s > 0.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

pub fn draw_exponential(stream: &mut RandomStream) -> f64 {
    -stream.next_open01().ln()
}

/// Unit-rate Gamma, Marsaglia-Tsang squeeze for shape >= 1.
fn gamma_unit(shape: f64, stream: &mut RandomStream) -> f64 {
    if shape < 1.0 {
        // gamma(a) = gamma(a + 1) * U^{1/a}
        let g = gamma_unit(shape + 1.0, stream);
        let u = stream.next_open01();
        return g * (u.ln() / shape).exp();
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = draw_standard_normal(stream);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = stream.next_open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One variate of the Gamma law with density `y^{a-1} λ^a e^{-λy} / Γ(a)`.
pub fn draw_gamma(shape: f64, rate: f64, stream: &mut RandomStream) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    Ok(gamma_unit(shape, stream) / rate)
}

fn beta_unchecked(a: f64, b: f64, stream: &mut RandomStream) -> f64 {
    loop {
        let x = gamma_unit(a, stream);
        let y = gamma_unit(b, stream);
        let z = x / (x + y);
        // Probability-zero at exact arithmetic; keeps later transforms interior.
        if z > 0.0 && z < 1.0 {
            return z;
        }
    }
}

/// `Beta(a, b)` on (0,1) as `γ(a)/(γ(a)+γ(b))`; with `symmetric` the value is
/// pushed forward to (-1,1) by `x -> 2x - 1`.
pub fn draw_beta(a: f64, b: f64, symmetric: bool, stream: &mut RandomStream) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let z = beta_unchecked(a, b, stream);
    Ok(if symmetric { 2.0 * z - 1.0 } else { z })
}

/// Variate of `G_p`, density `e^{-|x|^p} / (2Γ(1+1/p))`, drawn as `ε γ(1/p)^{1/p}`.
/// The magnitude is drawn before the sign.
pub fn draw_gp(p: f64, stream: &mut RandomStream) -> Result<f64> {
    check_p(p)?;
    Ok(gp_unchecked(p, stream))
}

pub(crate) fn gp_unchecked(p: f64, stream: &mut RandomStream) -> f64 {
    let z = gamma_unit(1.0 / p, stream);
    let mag = if p == 1.0 { z } else { z.powf(1.0 / p) };
    mag * stream.next_sign()
}

pub fn draw_rademacher(stream: &mut RandomStream) -> f64 {
    stream.next_sign()
}

/// `Dir(a_1, .., a_{k+1})` on the closed simplex by normalizing Gamma draws.
pub fn draw_dirichlet(a: &[f64], stream: &mut RandomStream) -> Result<SimplexPoint> {
    if a.is_empty() {
        return param_err("Dirichlet parameter vector is empty");
    }
    for (i, &ai) in a.iter().enumerate() {
        check_positive(&format!("a[{i}]"), ai)?;
    }
    let mut g = vec![0.0; a.len()];
    loop {
        for (gi, &ai) in g.iter_mut().zip(a) {
            *gi = gamma_unit(ai, stream);
        }
        let total: f64 = g.iter().sum();
        if g.iter().all(|&x| x > 0.0) && total.is_finite() {
            let coords: Vec<f64> = g.iter().map(|x| x / total).collect();
            if let Ok(pt) = SimplexPoint::new(coords, SimplexKind::Closed) {
                return Ok(pt);
            }
        }
    }
}

/// `P_j = Z_j ∏_{k<j} (1 - Z_k)`.
pub fn stick_break(z: &[f64]) -> Result<SimplexPoint> {
    if z.is_empty() {
        return domain_err("stick-breaking input is empty");
    }
    let mut rest = 1.0;
    let mut p = Vec::with_capacity(z.len());
    for (j, &zj) in z.iter().enumerate() {
        if !(zj > 0.0 && zj < 1.0) {
            return domain_err(format!("z[{j}] = {zj} is not in (0,1)"));
        }
        p.push(zj * rest);
        rest *= 1.0 - zj;
    }
    SimplexPoint::new(p, SimplexKind::Open)
}

/// `Z_j = P_j / (1 - P_1 - ... - P_{j-1})`, with the remaining stick updated
/// multiplicatively as `∏(1 - Z_k)`.
pub fn stick_break_inverse(p: &SimplexPoint) -> Result<Vec<f64>> {
    let mut rest = 1.0;
    let mut z = Vec::with_capacity(p.coords().len());
    for (j, &pj) in p.coords().iter().enumerate() {
        let zj = pj / rest;
        if !(zj > 0.0 && zj < 1.0) {
            return domain_err(format!("partial sum through index {j} reaches 1"));
        }
        z.push(zj);
        rest *= 1.0 - zj;
    }
    Ok(z)
}

/// Generalized Dirichlet draw: independent `Z_j ~ Beta(a_j, b_j)` pushed
/// through [`stick_break`].
pub fn draw_gd(params: &GdParams, stream: &mut RandomStream) -> Result<SimplexPoint> {
    loop {
        let z: Vec<f64> = params
            .a()
            .iter()
            .zip(params.b())
            .map(|(&a, &b)| beta_unchecked(a, b, stream))
            .collect();
        // A remainder that rounds to zero would put the point on the
        // simplex face; redraw like any other boundary value.
        if let Ok(pt) = stick_break(&z) {
            return Ok(pt);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GemKind {
    /// `Z_j ~ Beta(1, θ)`
    Theta,
    /// `Z_j ~ Beta(1 - α, θ + jα)`, `j = 1, 2, ...`
    AlphaTheta,
}

/// Stick-breaking parameters of the first `n` factors of a GEM model.
pub fn gem_params(kind: GemKind, theta: f64, alpha: f64, n: usize) -> Result<GdParams> {
    let alpha = match kind {
        GemKind::Theta => {
            if alpha != 0.0 {
                return param_err(format!("GEM(theta) takes no alpha (got {alpha})"));
            }
            0.0
        }
        GemKind::AlphaTheta => alpha,
    };
    if !(0.0..1.0).contains(&alpha) {
        return param_err(format!("alpha = {alpha}: need 0 <= alpha < 1"));
    }
    if !(theta > -alpha) || !theta.is_finite() {
        return param_err(format!("theta = {theta}: need theta > -alpha = {}", -alpha));
    }
    let a = vec![1.0 - alpha; n];
    let b = (1..=n).map(|j| theta + j as f64 * alpha).collect();
    GdParams::new(a, b)
}
