//! Named verification suites. Each suite draws from sub-streams of one seed
//! and condenses its checks into a [`TestReport`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::function::beta::beta_reg;

use crate::asymptotics::{self, gp_cdf, limit_cdf_pgd};
use crate::ball::{self, pgd_coordinate_cdf, sample, BallDistributionSpec, UniformMethod};
use crate::error::{Error, Result};
use crate::geometry::{self, abs_pow, BallPoint};
use crate::moments::{self, RealMomentVector, VerblunskyCoeffs};
use crate::rng::RandomStream;
use crate::sampling::{draw_dirichlet, GdParams};
use crate::stats::{
    independence_scan, ks2_outcome, ks_outcome, nuod_check_rows, TestOutcome, TestReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    UniformEquivalence,
    PgdCanonical,
    RadialLaw,
    ConeDirichlet,
    Nuod,
    PoincareBorel,
    TpoingLimit,
    RateIdentities,
    MomentRoundtrips,
    SigmaPushforward,
    VerblunskyRoundtrips,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::UniformEquivalence,
        Suite::PgdCanonical,
        Suite::RadialLaw,
        Suite::ConeDirichlet,
        Suite::Nuod,
        Suite::PoincareBorel,
        Suite::TpoingLimit,
        Suite::RateIdentities,
        Suite::MomentRoundtrips,
        Suite::SigmaPushforward,
        Suite::VerblunskyRoundtrips,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UniformEquivalence => "uniform-equivalence",
            Suite::PgdCanonical => "pgd-canonical",
            Suite::RadialLaw => "radial-law",
            Suite::ConeDirichlet => "cone-dirichlet",
            Suite::Nuod => "nuod",
            Suite::PoincareBorel => "poincare-borel",
            Suite::TpoingLimit => "tpoing-limit",
            Suite::RateIdentities => "rate-identities",
            Suite::MomentRoundtrips => "moment-roundtrips",
            Suite::SigmaPushforward => "sigma-pushforward",
            Suite::VerblunskyRoundtrips => "verblunsky-roundtrips",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::Usage(format!(
                    "unknown suite '{s}'; known suites: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Overrides for a suite. Unset fields take the suite's own defaults, which
/// are recorded in the report digest after resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub count: Option<usize>,
    pub alpha: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: None,
            p: None,
            count: None,
            alpha: 0.01,
        }
    }
}

#[derive(Serialize)]
struct Resolved<'a> {
    suite: &'a str,
    n: Vec<usize>,
    p: Vec<f64>,
    count: usize,
    alpha: f64,
}

fn digest(r: &Resolved<'_>) -> String {
    let json = serde_json::to_vec(r).expect("config serializes");
    Sha256::digest(&json)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Seed for the `tag`-th independent draw of a suite.
fn derive(seed: u64, tag: u64) -> u64 {
    RandomStream::new(seed).substream(tag).next_u64()
}

fn stream(seed: u64, tag: u64) -> RandomStream {
    RandomStream::new(seed).substream(tag)
}

pub fn run_suite(suite: Suite, config: &SuiteConfig, seed: u64) -> Result<TestReport> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "alpha = {} must be in (0, 1)",
            config.alpha
        )));
    }
    if config.count == Some(0) {
        return Err(Error::Parameter("count must be positive".into()));
    }
    let c = Ctx {
        seed,
        alpha: config.alpha,
    };
    let ps = |default: &[f64]| config.p.map_or_else(|| default.to_vec(), |p| vec![p]);
    let ns = |default: &[usize]| config.n.map_or_else(|| default.to_vec(), |n| vec![n]);
    let count = |default: usize| config.count.unwrap_or(default);

    let (res, outcomes) = match suite {
        Suite::UniformEquivalence => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[5]),
                p: ps(&[1.0, 1.5, 2.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.uniform_equivalence(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::RadialLaw => {
            let pairs: Vec<(usize, f64)> = match (config.n, config.p) {
                (None, None) => vec![(3, 1.0), (5, 2.0), (8, 3.0)],
                (n, p) => vec![(n.unwrap_or(5), p.unwrap_or(1.5))],
            };
            let r = Resolved {
                suite: suite.name(),
                n: pairs.iter().map(|x| x.0).collect(),
                p: pairs.iter().map(|x| x.1).collect(),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.radial_law(&pairs, r.count)?;
            (r, o)
        }
        Suite::PgdCanonical => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[5]),
                p: ps(&[1.0, 1.5, 2.0, 3.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.pgd_canonical(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::ConeDirichlet => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[5]),
                p: ps(&[1.0, 1.5, 2.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.cone_dirichlet(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::Nuod => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[3]),
                p: ps(&[1.0, 2.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.nuod(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::PoincareBorel => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[10_000]),
                p: ps(&[1.0, 2.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.poincare_borel(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::TpoingLimit => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[10_000]),
                p: ps(&[1.0, 2.0]),
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.tpoing_limit(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::RateIdentities => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[5]),
                p: ps(&[1.0, 1.5, 2.0, 3.0]),
                count: count(10_000),
                alpha: c.alpha,
            };
            let o = c.rate_identities(r.n[0], &r.p, r.count)?;
            (r, o)
        }
        Suite::MomentRoundtrips => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[12]),
                p: vec![],
                count: count(100),
                alpha: c.alpha,
            };
            let o = c.moment_roundtrips(r.n[0], r.count)?;
            (r, o)
        }
        Suite::SigmaPushforward => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[4]),
                p: vec![2.0],
                count: count(100_000),
                alpha: c.alpha,
            };
            let o = c.sigma_pushforward(r.n[0], r.count)?;
            (r, o)
        }
        Suite::VerblunskyRoundtrips => {
            let r = Resolved {
                suite: suite.name(),
                n: ns(&[12]),
                p: vec![],
                count: count(100),
                alpha: c.alpha,
            };
            let o = c.verblunsky_roundtrips(r.n[0], r.count)?;
            (r, o)
        }
    };
    Ok(TestReport::new(suite.name(), seed, digest(&res), outcomes))
}

/// Tolerances of the deterministic checks.
pub mod tol {
    pub const TRANSFORM: f64 = 1e-12;
    pub const RATE: f64 = 1e-12;
    pub const BETA_CONTRACTION: f64 = 1e-6;
    pub const MOMENT_ROUNDTRIP: f64 = 1e-10;
    pub const SKIBINSKY: f64 = 1e-10;
    pub const VERBLUNSKY_ROUNDTRIP: f64 = 1e-10;
    pub const NORM_RECURSION: f64 = 1e-10;
    pub const PI_MASS: f64 = 1e-12;
}

struct Ctx {
    seed: u64,
    alpha: f64,
}

impl Ctx {
    fn uniform_equivalence(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let tests = ps.len() * 3 * (n + 1);
        let level = self.alpha / tests as f64;
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            let batches: Vec<_> = UniformMethod::ALL
                .iter()
                .enumerate()
                .map(|(mi, &m)| {
                    let spec = BallDistributionSpec::uniform(n, p, m)?;
                    Ok(sample(
                        &spec,
                        count,
                        derive(self.seed, (pi * 3 + mi) as u64),
                    ))
                })
                .collect::<Result<_>>()?;
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (&batches[i], &batches[j]);
                    let tag = format!(
                        "p={p}/{}-vs-{}",
                        UniformMethod::ALL[i],
                        UniformMethod::ALL[j]
                    );
                    for k in 0..n {
                        out.push(ks2_outcome(
                            &format!("{tag}/x{}", k + 1),
                            &a.column(k),
                            &b.column(k),
                            level,
                            self.seed,
                        )?);
                    }
                    out.push(ks2_outcome(
                        &format!("{tag}/radial"),
                        &a.radial_powers(),
                        &b.radial_powers(),
                        level,
                        self.seed,
                    )?);
                }
            }
        }
        Ok(out)
    }

    fn radial_law(&self, pairs: &[(usize, f64)], count: usize) -> Result<Vec<TestOutcome>> {
        let level = self.alpha / (pairs.len() * 3) as f64;
        let mut out = Vec::new();
        for (pi, &(n, p)) in pairs.iter().enumerate() {
            for (mi, &m) in UniformMethod::ALL.iter().enumerate() {
                let spec = BallDistributionSpec::uniform(n, p, m)?;
                let batch = sample(&spec, count, derive(self.seed, (pi * 3 + mi) as u64));
                let cdf = |t: f64| t.clamp(0.0, 1.0).powf(n as f64 / p);
                out.push(ks_outcome(
                    &format!("n={n}/p={p}/{m}"),
                    &batch.radial_powers(),
                    cdf,
                    level,
                    self.seed,
                )?);
            }
        }
        Ok(out)
    }

    fn pgd_canonical(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let params = GdParams::new(vec![0.5, 1.0, 2.0, 0.7], vec![1.0, 2.0, 3.0, 1.5])?;
        // Per-coordinate KS tests plus one scan per batch share alpha.
        let scan = |d: usize| usize::from(d >= 2);
        let tests = ps.len() * (n + scan(n) + params.len() + scan(params.len()));
        let level = self.alpha / tests as f64;
        let mut out = Vec::new();
        let mut tag = 0u64;
        let mut next = || {
            tag += 1;
            derive(self.seed, tag)
        };
        for &p in ps {
            // Uniform draws built without canonical coordinates.
            let spec = BallDistributionSpec::uniform(n, p, UniformMethod::GammaExp)?;
            let batch = sample(&spec, count, next());
            out.extend(self.canonical_checks(
                &format!("uniform/p={p}"),
                &batch.canonical_rows()?,
                &GdParams::uniform_ball(n, p)?,
                p,
                level,
            )?);
        }
        for &p in ps {
            let spec = BallDistributionSpec::pgd(params.clone(), p)?;
            let batch = sample(&spec, count, next());
            out.extend(self.canonical_checks(
                &format!("pgd/p={p}"),
                &batch.canonical_rows()?,
                &params,
                p,
                level,
            )?);
        }
        // The scan has power: raw l1-ball coordinates are dependent.
        let spec = BallDistributionSpec::uniform(2, 1.0, UniformMethod::ScaledCone)?;
        let batch = sample(&spec, count.min(20_000), next());
        let scan = independence_scan(batch.rows(), self.alpha)?;
        out.push(TestOutcome::tolerance(
            "power/raw-l1-ball-dependence-detected",
            scan.p_value,
            scan.threshold,
            batch.len(),
            self.seed,
        ));
        Ok(out)
    }

    fn canonical_checks(
        &self,
        tag: &str,
        rows: &[Vec<f64>],
        params: &GdParams,
        p: f64,
        level: f64,
    ) -> Result<Vec<TestOutcome>> {
        let n = params.len();
        let mut out = Vec::new();
        for j in 0..n {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let (a, b) = (params.a()[j], params.b()[j]);
            out.push(ks_outcome(
                &format!("{tag}/c{}", j + 1),
                &col,
                |x| pgd_coordinate_cdf(a, b, p, x),
                level,
                self.seed,
            )?);
        }
        if n >= 2 {
            out.push(
                independence_scan(rows, level)?
                    .named(format!("{tag}/independence"))
                    .with_seed(self.seed),
            );
        }
        Ok(out)
    }

    fn cone_dirichlet(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let level = self.alpha / (ps.len() * (2 * n - 1)) as f64;
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            let spec = BallDistributionSpec::cone_sphere(n, p)?;
            let batch = sample(&spec, count, derive(self.seed, 2 * pi as u64));
            let pw: Vec<Vec<f64>> = batch
                .rows()
                .iter()
                .map(|r| r.iter().map(|&x| abs_pow(x, p)).collect())
                .collect();
            let mut s = stream(self.seed, 2 * pi as u64 + 1);
            let dir: Vec<Vec<f64>> = (0..count)
                .map(|_| draw_dirichlet(&vec![1.0 / p; n], &mut s).map(|d| d.into_coords()))
                .collect::<Result<_>>()?;
            for i in 0..n {
                let a: Vec<f64> = pw.iter().map(|r| r[i]).collect();
                let b: Vec<f64> = dir.iter().map(|r| r[i]).collect();
                out.push(ks2_outcome(
                    &format!("p={p}/dirichlet/x{}", i + 1),
                    &a,
                    &b,
                    level,
                    self.seed,
                )?);
            }
            for k in 1..n {
                let prefix: Vec<f64> = pw.iter().map(|r| r[..k].iter().sum()).collect();
                let (a, b) = (k as f64 / p, (n - k) as f64 / p);
                let cdf = |t: f64| {
                    if t <= 0.0 {
                        0.0
                    } else if t >= 1.0 {
                        1.0
                    } else {
                        beta_reg(a, b, t)
                    }
                };
                out.push(ks_outcome(
                    &format!("p={p}/prefix-beta/k={k}"),
                    &prefix,
                    cdf,
                    level,
                    self.seed,
                )?);
            }
        }
        Ok(out)
    }

    fn nuod(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let grid = vec![vec![0.2, 0.4, 0.6]; n];
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            for (li, (label, spec)) in [
                (
                    "uniform-ball",
                    BallDistributionSpec::uniform(n, p, UniformMethod::Canonical)?,
                ),
                ("cone-sphere", BallDistributionSpec::cone_sphere(n, p)?),
            ]
            .into_iter()
            .enumerate()
            {
                let s = derive(self.seed, (pi * 2 + li) as u64);
                let batch = sample(&spec, count, s);
                out.push(
                    nuod_check_rows(batch.rows(), &grid, s)?
                        .named(format!("p={p}/{label}"))
                        .with_seed(self.seed),
                );
            }
        }
        // Independent coordinates sit on the equality case.
        let mut st = stream(self.seed, 1000);
        let rows: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..n).map(|_| st.next_open_signed()).collect())
            .collect();
        out.push(
            nuod_check_rows(&rows, &grid, derive(self.seed, 1001))?
                .named("calibration/product-law")
                .with_seed(self.seed),
        );
        Ok(out)
    }

    /// Rescaled prefixes against `G_p` and against `p^{1/p} G_p`, the limit
    /// that the law of large numbers for `Σ|g_k|^p / N → 1/p` produces.
    fn poincare_borel(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        const K: usize = 3;
        let k = K.min(n);
        let level = self.alpha / (ps.len() * 2 * k * 2) as f64;
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            for (li, label) in ["sphere", "ball"].into_iter().enumerate() {
                let mut s = stream(self.seed, (pi * 2 + li) as u64);
                let rows = if li == 0 {
                    ball::sample_cone_sphere_prefix(n, k, p, count, &mut s)?
                } else {
                    ball::sample_uniform_ball_prefix(n, k, p, count, &mut s)?
                };
                let scale = (n as f64).powf(1.0 / p);
                for j in 0..k {
                    let col: Vec<f64> = rows.iter().map(|r| scale * r[j]).collect();
                    out.push(ks_outcome(
                        &format!("p={p}/{label}/x{}/gp", j + 1),
                        &col,
                        |x| gp_cdf(p, x).unwrap_or(f64::NAN),
                        level,
                        self.seed,
                    )?);
                    out.push(ks_outcome(
                        &format!("p={p}/{label}/x{}/scaled-gp", j + 1),
                        &col,
                        |x| limit_cdf_pgd(1.0 / p, p, x).unwrap_or(f64::NAN),
                        level,
                        self.seed,
                    )?);
                }
            }
        }
        Ok(out)
    }

    fn tpoing_limit(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let a = [0.5, 1.0, 2.0];
        let level = self.alpha / (ps.len() * a.len()) as f64;
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            // The first k coordinates depend only on the first k parameter pairs.
            let params = GdParams::new(a.to_vec(), vec![n as f64 / p; a.len()])?;
            let mut s = stream(self.seed, pi as u64);
            let batch = ball::sample_pgd(&params, p, count, &mut s)?;
            let scale = (n as f64).powf(1.0 / p);
            for (j, &aj) in a.iter().enumerate() {
                let col: Vec<f64> = batch.column(j).iter().map(|x| scale * x).collect();
                out.push(ks_outcome(
                    &format!("p={p}/x{}/a={aj}", j + 1),
                    &col,
                    |x| limit_cdf_pgd(aj, p, x).unwrap_or(f64::NAN),
                    level,
                    self.seed,
                )?);
            }
        }
        Ok(out)
    }

    fn rate_identities(&self, n: usize, ps: &[f64], count: usize) -> Result<Vec<TestOutcome>> {
        let mut out = Vec::new();
        for (pi, &p) in ps.iter().enumerate() {
            let spec = BallDistributionSpec::uniform(n, p, UniformMethod::GammaExp)?;
            let batch = sample(&spec, count, derive(self.seed, pi as u64));
            let (mut rate_err, mut mass_err) = (0.0f64, 0.0f64);
            for r in batch.rows() {
                let x = BallPoint::new(r.clone(), p)?;
                let c = geometry::to_canonical(&x)?;
                let i = asymptotics::ldp_rate_ball(r, p)?.value();
                let j = asymptotics::ldp_rate_canonical(c.coords(), p)?.value();
                if i > 0.0 {
                    rate_err = rate_err.max((i - j).abs() / i);
                }
                let prod = geometry::log_remaining_mass(&c).exp();
                let direct = one_minus_norm_pow(r, p);
                mass_err = mass_err.max((prod - direct).abs() / direct);
            }
            out.push(TestOutcome::tolerance(
                format!("p={p}/rate-ball-vs-canonical"),
                rate_err,
                tol::RATE,
                count,
                self.seed,
            ));
            out.push(TestOutcome::tolerance(
                format!("p={p}/remaining-mass-product"),
                mass_err,
                tol::RATE,
                count,
                self.seed,
            ));
        }
        let mut worst = 0.0f64;
        for c in [0.5, 1.0, 2.0, 3.7] {
            for x in [0.05, 0.3, 0.5, 0.8, 0.95] {
                let want = asymptotics::ldp_rate_beta(x, c)?.value();
                worst = worst.max((beta_contraction(x, c) - want).abs());
            }
        }
        out.push(TestOutcome::tolerance(
            "beta-contraction",
            worst,
            tol::BETA_CONTRACTION,
            20,
            self.seed,
        ));
        out.push(ldp_trend(self.seed)?);
        Ok(out)
    }

    fn moment_roundtrips(&self, n_max: usize, per_n: usize) -> Result<Vec<TestOutcome>> {
        let mut s = stream(self.seed, 0);
        let (mut mcm, mut cmc, mut skib) = (0.0f64, 0.0f64, 0.0f64);
        for n in 1..=n_max {
            for m in moments::sample_uniform_moment_space(n, per_n, &mut s)? {
                let (c, fwd_ranges) = moments::real_moments_to_canonical_with_ranges(&m)?;
                let (m2, back_ranges) = moments::real_canonical_to_moments_with_ranges(&c)?;
                mcm = mcm.max(max_abs_diff(m.as_slice(), m2.as_slice()));
                let c2 = moments::real_moments_to_canonical(&m2)?;
                cmc = cmc.max(max_abs_diff(c.as_slice(), c2.as_slice()));
                skib = skib
                    .max(skibinsky_error(c.as_slice(), &fwd_ranges))
                    .max(skibinsky_error(c.as_slice(), &back_ranges));
            }
        }
        let total = n_max * per_n;
        let mut out = vec![
            TestOutcome::tolerance(
                "moments-canonical-moments",
                mcm,
                tol::MOMENT_ROUNDTRIP,
                total,
                self.seed,
            ),
            TestOutcome::tolerance(
                "canonical-moments-canonical",
                cmc,
                tol::MOMENT_ROUNDTRIP,
                total,
                self.seed,
            ),
            TestOutcome::tolerance("skibinsky-range", skib, tol::SKIBINSKY, total, self.seed),
        ];
        // Arcsine moments C(2k,k)/4^k are dyadic, hence exact in binary.
        let nn = n_max.max(1);
        let mut arcsine = Vec::with_capacity(nn);
        let mut v = 1.0;
        for k in 1..=nn {
            v *= (2 * k - 1) as f64 / (2 * k) as f64;
            arcsine.push(v);
        }
        let c = moments::real_moments_to_canonical(&RealMomentVector::new(arcsine)?)?;
        let err = c
            .as_slice()
            .iter()
            .map(|x| (x - 0.5).abs())
            .fold(0.0, f64::max);
        out.push(TestOutcome::tolerance(
            "arcsine-all-half",
            err,
            tol::MOMENT_ROUNDTRIP,
            1,
            self.seed,
        ));
        // Lebesgue: p_{2k-1} = 1/2, p_{2k} = k/(2k+1). Inputs 1/(k+1) carry
        // rounding that the map amplifies, so this runs to N = 10.
        let nl = nn.min(10);
        let leb = RealMomentVector::new((1..=nl).map(|k| 1.0 / (k + 1) as f64).collect())?;
        let c = moments::real_moments_to_canonical(&leb)?;
        let err = c
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let j = i + 1;
                let want = if j % 2 == 1 {
                    0.5
                } else {
                    (j / 2) as f64 / (j + 1) as f64
                };
                (x - want).abs()
            })
            .fold(0.0, f64::max);
        out.push(TestOutcome::tolerance(
            "lebesgue-canonical",
            err,
            tol::MOMENT_ROUNDTRIP,
            1,
            self.seed,
        ));
        Ok(out)
    }

    fn sigma_pushforward(&self, n: usize, count: usize) -> Result<Vec<TestOutcome>> {
        let level = self.alpha / (n + 1) as f64;
        let mut s = stream(self.seed, 0);
        let pushed: Vec<Vec<f64>> = moments::sample_uniform_moment_space(n, count, &mut s)?
            .iter()
            .map(|m| moments::sigma_map(m).map(|x| x.into_coords()))
            .collect::<Result<_>>()?;
        let a = vec![0.5; n];
        let b: Vec<f64> = (1..=n).map(|j| (n - j + 1) as f64).collect();
        let spec = BallDistributionSpec::pgd(GdParams::new(a, b)?, 2.0)?;
        let direct = sample(&spec, count, derive(self.seed, 1));
        let mut out = Vec::new();
        for j in 0..n {
            let col: Vec<f64> = pushed.iter().map(|r| r[j]).collect();
            out.push(ks2_outcome(
                &format!("x{}", j + 1),
                &col,
                &direct.column(j),
                level,
                self.seed,
            )?);
        }
        let radial: Vec<f64> = pushed
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum())
            .collect();
        out.push(ks2_outcome(
            "radial",
            &radial,
            &direct.radial_powers(),
            level,
            self.seed,
        )?);
        Ok(out)
    }

    fn verblunsky_roundtrips(&self, n_max: usize, per_n: usize) -> Result<Vec<TestOutcome>> {
        let mut s = stream(self.seed, 0);
        let (mut ctc, mut tct, mut rec, mut mass) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for n in 1..=n_max {
            for _ in 0..per_n {
                // Uniform on the disk of radius 0.9.
                let c: Vec<Complex64> = (0..n)
                    .map(|_| {
                        let r = 0.9 * s.next_open01().sqrt();
                        Complex64::from_polar(r, std::f64::consts::TAU * s.next_open01())
                    })
                    .collect();
                let c = VerblunskyCoeffs::new(c)?;
                let t = moments::trig_moments_from_verblunsky(&c)?;
                let c2 = moments::verblunsky_from_trig_moments(&t)?;
                ctc = ctc.max(max_cabs_diff(c.as_slice(), c2.as_slice()));
                let t2 = moments::trig_moments_from_verblunsky(&c2)?;
                tct = tct.max(max_cabs_diff(t.as_slice(), t2.as_slice()));
                let sys = moments::orthogonal_polynomials(&t);
                for (k, ck) in c2.as_slice().iter().enumerate() {
                    let want = (1.0 - ck.norm_sqr()) * sys.norm_sq(k);
                    rec = rec.max((sys.norm_sq(k + 1) - want).abs() / want);
                }
                let pi = moments::reversed_pi_coordinates(&c);
                let total: f64 = pi.values().iter().map(|v| v.norm_sqr()).sum();
                mass = mass.max((total - 1.0).abs());
            }
        }
        let total = n_max * per_n;
        Ok(vec![
            TestOutcome::tolerance(
                "coefficients-moments-coefficients",
                ctc,
                tol::VERBLUNSKY_ROUNDTRIP,
                total,
                self.seed,
            ),
            TestOutcome::tolerance(
                "moments-coefficients-moments",
                tct,
                tol::VERBLUNSKY_ROUNDTRIP,
                total,
                self.seed,
            ),
            TestOutcome::tolerance("norm-recursion", rec, tol::NORM_RECURSION, total, self.seed),
            TestOutcome::tolerance("pi-unit-mass", mass, tol::PI_MASS, total, self.seed),
        ])
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_cabs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Relative gap between `c_n^+ - c_n^-` and `∏_{j<n} c_j (1 - c_j)`.
fn skibinsky_error(c: &[f64], ranges: &[f64]) -> f64 {
    let mut prod = 1.0;
    let mut worst = 0.0f64;
    for (cj, r) in c.iter().zip(ranges) {
        worst = worst.max((r - prod).abs() / prod);
        prod *= cj * (1.0 - cj);
    }
    worst
}

/// `1 - Σ|x_i|^p` with the sum carried in two-term compensated form.
fn one_minus_norm_pow(x: &[f64], p: f64) -> f64 {
    let (mut s, mut e) = (0.0f64, 0.0f64);
    for &v in x {
        let t = abs_pow(v, p);
        let y = s + t;
        let bb = y - s;
        e += (s - (y - bb)) + (t - bb);
        s = y;
    }
    (1.0 - s) - e
}

/// Value of the contraction `inf { y_1 + Λ_c(y_2) : y_1/(y_1+y_2) = x }`,
/// where `y_1` has rate `y` (a `γ(a)` variate over θ) and `y_2` rate
/// `Λ_c(y) = y - c - c ln(y/c)` (a `γ(cθ)` variate over θ). Minimized by
/// golden-section search over `ln y_2`.
pub fn beta_contraction(x: f64, c: f64) -> f64 {
    let f = |ly: f64| {
        let y2 = ly.exp();
        let y1 = x * y2 / (1.0 - x);
        y1 + y2 - c - c * (y2 / c).ln()
    };
    golden_min(f, c.ln() - 40.0, c.ln() + 40.0, 1e-12)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    f(0.5 * (lo + hi))
}

/// Finite-N trend behind the large-deviation principle for the first
/// coordinate of a p-generalized Dirichlet law with `a = 1`, `p b = N`,
/// `p = 2`. Uses exact Beta tails: `-ln P(|X_1| > r) / N` must increase with
/// `r` at every `N`, and its gap to `I(r)` must shrink as `N` grows.
fn ldp_trend(seed: u64) -> Result<TestOutcome> {
    let (a, p) = (1.0, 2.0);
    let radii = [0.3, 0.5, 0.7];
    let sizes = [50.0, 200.0, 800.0];
    let mut violations = 0usize;
    let mut prev_gap = vec![f64::INFINITY; radii.len()];
    for &n in &sizes {
        let b = n / p;
        let mut prev = f64::NEG_INFINITY;
        for (i, &r) in radii.iter().enumerate() {
            // P(B > r^p) = I_{1 - r^p}(b, a)
            let tail = beta_reg(b, a, 1.0 - abs_pow(r, p));
            let emp = -tail.ln() / n;
            if !(emp > prev) {
                violations += 1;
            }
            prev = emp;
            let gap = (emp - asymptotics::ldp_rate_ball(&[r], p)?.value()).abs();
            if !(gap < prev_gap[i]) {
                violations += 1;
            }
            prev_gap[i] = gap;
        }
    }
    Ok(TestOutcome::tolerance(
        "ldp-finite-n-trend",
        violations as f64,
        0.0,
        radii.len() * sizes.len(),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        let err = "nope".parse::<Suite>().unwrap_err().to_string();
        assert!(err.contains("verblunsky-roundtrips"));
    }

    #[test]
    fn contraction_matches_closed_form() {
        for c in [0.3f64, 1.0, 4.0] {
            for x in [0.1f64, 0.6, 0.9] {
                let want = -c * (-x).ln_1p();
                assert!((beta_contraction(x, c) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn compensated_remaining_mass() {
        let x = [0.5, 0.25, 0.125];
        assert_eq!(one_minus_norm_pow(&x, 1.0), 0.125);
    }

    #[test]
    fn bad_config() {
        let cfg = SuiteConfig {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(run_suite(Suite::RateIdentities, &cfg, 1).is_err());
        let cfg = SuiteConfig {
            count: Some(0),
            ..Default::default()
        };
        assert!(run_suite(Suite::RadialLaw, &cfg, 1).is_err());
    }

    #[test]
    fn small_suite_is_reproducible() {
        let cfg = SuiteConfig {
            count: Some(2000),
            ..Default::default()
        };
        let a = run_suite(Suite::RadialLaw, &cfg, 9).unwrap().to_json();
        let b = run_suite(Suite::RadialLaw, &cfg, 9).unwrap().to_json();
        assert_eq!(a, b);
        let c = run_suite(Suite::RadialLaw, &cfg, 10).unwrap();
        assert_ne!(a, c.to_json());
    }
}
