//! Samplers for laws on the real `l_p` ball and its sphere.
//!
//! Row layout is row-major, draw by draw. Within a row the stream is consumed
//! in a fixed order: for p-generalized Dirichlet rows each Beta magnitude is
//! followed by its Rademacher sign; for the polar samplers the `G_p`
//! coordinates come first and the radial variable last.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{param_err, Error, Result};
use crate::geometry::{self, abs_pow, p_norm_unchecked, BOUNDARY_MARGIN};
use crate::rng::RandomStream;
use crate::sampling::{self, check_p, draw_exponential, gp_unchecked, GdParams};

/// Rows per sub-stream in [`sample`]. Block `b` always draws from
/// sub-stream `b` of the seed, whatever the thread count.
pub const BLOCK_ROWS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniformMethod {
    /// Independent canonical coordinates with the uniform-law parameters.
    Canonical,
    /// `U^{1/N} G / ||G||_p`
    ScaledCone,
    /// `G / (||G||_p^p + E)^{1/p}`, `E` standard exponential.
    GammaExp,
}

impl UniformMethod {
    pub const ALL: [UniformMethod; 3] = [Self::Canonical, Self::ScaledCone, Self::GammaExp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Canonical => "canonical",
            Self::ScaledCone => "scaled-cone",
            Self::GammaExp => "gamma-exp",
        }
    }
}

impl fmt::Display for UniformMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UniformMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown uniform method '{s}' (expected canonical, scaled-cone or gamma-exp)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BallLaw {
    Pgd { params: GdParams },
    Uniform { method: UniformMethod },
    ConeSphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDistributionSpec {
    n: usize,
    p: f64,
    law: BallLaw,
}

impl BallDistributionSpec {
    pub fn new(n: usize, p: f64, law: BallLaw) -> Result<Self> {
        if n == 0 {
            return param_err("dimension must be at least 1");
        }
        match &law {
            BallLaw::Uniform { method } if p == f64::INFINITY => {
                // the cube (-1,1)^N; every method degenerates to iid uniforms
                let _ = method;
            }
            _ => check_p(p)?,
        }
        if let BallLaw::Pgd { params } = &law {
            if params.len() != n {
                return param_err(format!(
                    "{} parameter pairs for dimension {n}",
                    params.len()
                ));
            }
        }
        Ok(Self { n, p, law })
    }

    pub fn pgd(params: GdParams, p: f64) -> Result<Self> {
        Self::new(params.len(), p, BallLaw::Pgd { params })
    }

    pub fn uniform(n: usize, p: f64, method: UniformMethod) -> Result<Self> {
        Self::new(n, p, BallLaw::Uniform { method })
    }

    pub fn cone_sphere(n: usize, p: f64) -> Result<Self> {
        Self::new(n, p, BallLaw::ConeSphere)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn law(&self) -> &BallLaw {
        &self.law
    }

    fn draw_row(&self, stream: &mut RandomStream, out: &mut [f64]) {
        let p = self.p;
        match &self.law {
            BallLaw::Uniform { .. } if p == f64::INFINITY => {
                out.iter_mut().for_each(|x| *x = stream.next_open_signed());
            }
            BallLaw::Pgd { params } => loop {
                pgd_row(params.a(), params.b(), p, stream, out);
                if inside(out, p) {
                    return;
                }
            },
            BallLaw::Uniform {
                method: UniformMethod::Canonical,
            } => {
                let params = GdParams::uniform_ball(self.n, p).expect("validated");
                loop {
                    pgd_row(params.a(), params.b(), p, stream, out);
                    if inside(out, p) {
                        return;
                    }
                }
            }
            BallLaw::Uniform {
                method: UniformMethod::ScaledCone,
            } => loop {
                let norm = fill_gp(p, stream, out);
                let radius = (stream.next_open01().ln() / self.n as f64).exp();
                out.iter_mut().for_each(|x| *x *= radius / norm);
                if inside(out, p) {
                    return;
                }
            },
            BallLaw::Uniform {
                method: UniformMethod::GammaExp,
            } => loop {
                let norm = fill_gp(p, stream, out);
                let e = draw_exponential(stream);
                let scale = (abs_pow(norm, p) + e).powf(-1.0 / p);
                out.iter_mut().for_each(|x| *x *= scale);
                if inside(out, p) {
                    return;
                }
            },
            BallLaw::ConeSphere => {
                let norm = fill_gp(p, stream, out);
                out.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }
}

fn inside(x: &[f64], p: f64) -> bool {
    p_norm_unchecked(x, p) < 1.0 - BOUNDARY_MARGIN
}

/// iid `G_p` coordinates; returns their p-norm (nonzero almost surely).
fn fill_gp(p: f64, stream: &mut RandomStream, out: &mut [f64]) -> f64 {
    loop {
        out.iter_mut().for_each(|x| *x = gp_unchecked(p, stream));
        let norm = p_norm_unchecked(out, p);
        if norm > 0.0 && norm.is_finite() {
            return norm;
        }
    }
}

/// `C_j = ε_j Z_j^{1/p}` with `Z_j ~ Beta(a_j, b_j)`, mapped to the ball.
fn pgd_row(a: &[f64], b: &[f64], p: f64, stream: &mut RandomStream, out: &mut [f64]) {
    for ((x, &aj), &bj) in out.iter_mut().zip(a).zip(b) {
        let z = sampling::draw_beta(aj, bj, false, stream).expect("validated parameters");
        let mag = if p == 1.0 { z } else { z.powf(1.0 / p) };
        *x = mag * stream.next_sign();
    }
    let c = out.to_vec();
    geometry::from_canonical_into(&c, p, out);
}

/// A batch of draws, one row per draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    spec: BallDistributionSpec,
    seed: u64,
    rows: Vec<Vec<f64>>,
}

impl SampleBatch {
    pub fn new(spec: BallDistributionSpec, seed: u64, rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|r| r.len() != spec.dim()) {
            return Err(Error::Usage(format!(
                "row {i} has {} values, expected {}",
                rows[i].len(),
                spec.dim()
            )));
        }
        Ok(Self { spec, seed, rows })
    }

    pub fn spec(&self) -> &BallDistributionSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// `||x||_p^p` of every row.
    pub fn radial_powers(&self) -> Vec<f64> {
        let p = self.spec.p();
        self.rows
            .iter()
            .map(|r| abs_pow(p_norm_unchecked(r, p), p))
            .collect()
    }

    /// Canonical coordinates of every row.
    pub fn canonical_rows(&self) -> Result<Vec<Vec<f64>>> {
        let p = self.spec.p();
        check_p(p)?;
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![0.0; r.len()];
                geometry::to_canonical_into(r, p, &mut c)?;
                Ok(c)
            })
            .collect()
    }
}

fn draw_sequential(
    spec: BallDistributionSpec,
    count: usize,
    stream: &mut RandomStream,
) -> SampleBatch {
    let rows = (0..count)
        .map(|_| {
            let mut row = vec![0.0; spec.dim()];
            spec.draw_row(stream, &mut row);
            row
        })
        .collect();
    SampleBatch {
        seed: stream.seed(),
        spec,
        rows,
    }
}

/// p-generalized Dirichlet draws through independent canonical coordinates.
pub fn sample_pgd(
    params: &GdParams,
    p: f64,
    count: usize,
    stream: &mut RandomStream,
) -> Result<SampleBatch> {
    let spec = BallDistributionSpec::pgd(params.clone(), p)?;
    Ok(draw_sequential(spec, count, stream))
}

/// Uniform draws in the ball by one of three independent constructions.
/// `p = f64::INFINITY` gives iid uniforms on `(-1,1)`.
pub fn sample_uniform_ball(
    n: usize,
    p: f64,
    method: UniformMethod,
    count: usize,
    stream: &mut RandomStream,
) -> Result<SampleBatch> {
    let spec = BallDistributionSpec::uniform(n, p, method)?;
    Ok(draw_sequential(spec, count, stream))
}

/// Cone-measure draws on the unit sphere, `G / ||G||_p`.
pub fn sample_cone_sphere(
    n: usize,
    p: f64,
    count: usize,
    stream: &mut RandomStream,
) -> Result<SampleBatch> {
    let spec = BallDistributionSpec::cone_sphere(n, p)?;
    Ok(draw_sequential(spec, count, stream))
}

/// Block-parallel batch generation. The output depends only on
/// `(spec, count, seed)`: block `b` of [`BLOCK_ROWS`] rows is drawn from
/// sub-stream `b`, so thread count and scheduling do not matter.
pub fn sample(spec: &BallDistributionSpec, count: usize, seed: u64) -> SampleBatch {
    let root = RandomStream::new(seed);
    let blocks = count.div_ceil(BLOCK_ROWS);
    let rows: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut stream = root.substream(b as u64);
            let len = BLOCK_ROWS.min(count - b * BLOCK_ROWS);
            (0..len)
                .map(|_| {
                    let mut row = vec![0.0; spec.dim()];
                    spec.draw_row(&mut stream, &mut row);
                    row
                })
                .collect::<Vec<_>>()
        })
        .collect();
    SampleBatch {
        spec: spec.clone(),
        seed,
        rows,
    }
}

/// First `k` coordinates of cone-measure draws on the sphere of dimension
/// `n`. The `n - k` trailing `|G_i|^p` are replaced by their sum, one
/// `γ((n-k)/p)` variate, which has the same joint law with the prefix.
pub fn sample_cone_sphere_prefix(
    n: usize,
    k: usize,
    p: f64,
    count: usize,
    stream: &mut RandomStream,
) -> Result<Vec<Vec<f64>>> {
    prefix_rows(n, k, p, count, stream, false)
}

/// First `k` coordinates of uniform draws in the `n`-dimensional ball by the
/// scaled-cone construction, with the same tail reduction as
/// [`sample_cone_sphere_prefix`].
pub fn sample_uniform_ball_prefix(
    n: usize,
    k: usize,
    p: f64,
    count: usize,
    stream: &mut RandomStream,
) -> Result<Vec<Vec<f64>>> {
    prefix_rows(n, k, p, count, stream, true)
}

fn prefix_rows(
    n: usize,
    k: usize,
    p: f64,
    count: usize,
    stream: &mut RandomStream,
    ball: bool,
) -> Result<Vec<Vec<f64>>> {
    check_p(p)?;
    if k == 0 || k > n {
        return param_err(format!("prefix length {k} must be in 1..={n}"));
    }
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let mut row: Vec<f64> = (0..k).map(|_| gp_unchecked(p, stream)).collect();
        let head: f64 = row.iter().map(|&g| abs_pow(g, p)).sum();
        let tail = if k < n {
            sampling::draw_gamma((n - k) as f64 / p, 1.0, stream)?
        } else {
            0.0
        };
        let mut scale = (head + tail).powf(-1.0 / p);
        if ball {
            scale *= (stream.next_open01().ln() / n as f64).exp();
        }
        row.iter_mut().for_each(|x| *x *= scale);
        rows.push(row);
    }
    Ok(rows)
}

/// CDF of a canonical coordinate `ε Z^{1/p}`, `Z ~ Beta(a, b)`:
/// `1/2 ± I_{|x|^p}(a, b)/2`.
pub fn pgd_coordinate_cdf(a: f64, b: f64, p: f64, x: f64) -> f64 {
    let t = abs_pow(x, p);
    if t == 0.0 {
        return 0.5;
    }
    let half = if t >= 1.0 {
        0.5
    } else {
        0.5 * beta_reg(a, b, t)
    };
    if x > 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// CDF of `||X||_p^p` for `X` uniform in the ball: `t^{N/p}`.
pub fn radial_cdf(n: usize, p: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} is outside [0, 1]")));
    }
    Ok(t.powf(n as f64 / p))
}
