//! Statistical checks: Kolmogorov–Smirnov tests, the orthant-dependence
//! inequality, and pairwise independence scans. Each check condenses to a
//! [`TestOutcome`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::ball::SampleBatch;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Bootstrap resamples behind the standard errors of [`nuod_check`].
pub const NUOD_BOOTSTRAP: usize = 200;

/// Width of the tolerated NUOD violation, in bootstrap standard errors.
pub const NUOD_BANDS: f64 = 3.0;

/// Minimum rows for [`independence_scan`].
pub const INDEPENDENCE_MIN_ROWS: usize = 100;

/// How an outcome decides pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    /// `passed ⇔ p_value >= threshold`
    PValue,
    /// `passed ⇔ statistic <= threshold`
    Band,
    /// Deterministic error check: `passed ⇔ statistic <= threshold`.
    Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub name: String,
    pub kind: OutcomeKind,
    pub statistic: f64,
    pub p_value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub sample_size: usize,
    pub seed: u64,
}

impl TestOutcome {
    pub fn p_value(
        name: impl Into<String>,
        statistic: f64,
        p_value: f64,
        threshold: f64,
        sample_size: usize,
        seed: u64,
    ) -> Self {
        TestOutcome {
            name: name.into(),
            kind: OutcomeKind::PValue,
            statistic,
            p_value,
            threshold,
            passed: p_value >= threshold,
            sample_size,
            seed,
        }
    }

    /// An error measurement against a fixed tolerance. `p_value` is 1 on
    /// success and 0 on failure.
    pub fn tolerance(
        name: impl Into<String>,
        error: f64,
        tol: f64,
        sample_size: usize,
        seed: u64,
    ) -> Self {
        let passed = error <= tol;
        TestOutcome {
            name: name.into(),
            kind: OutcomeKind::Tolerance,
            statistic: error,
            p_value: if passed { 1.0 } else { 0.0 },
            threshold: tol,
            passed,
            sample_size,
            seed,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Outcomes of one suite run. Reproducible bit for bit from the suite name,
/// the seed and the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub suite: String,
    pub seed: u64,
    pub config_digest: String,
    pub passed: bool,
    pub outcomes: Vec<TestOutcome>,
}

impl TestReport {
    /// Sorts the outcomes by name and sets the overall flag.
    pub fn new(
        suite: impl Into<String>,
        seed: u64,
        config_digest: String,
        mut outcomes: Vec<TestOutcome>,
    ) -> Self {
        outcomes.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = outcomes.iter().all(|o| o.passed);
        TestReport {
            suite: suite.into(),
            seed,
            config_digest,
            passed,
            outcomes,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let width = self
            .outcomes
            .iter()
            .map(|o| o.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut s = format!(
            "suite {} seed {} config {}\n",
            self.suite, self.seed, self.config_digest
        );
        s += &format!(
            "{:<width$}  {:>12}  {:>10}  {:>10}  {:>9}  result\n",
            "test", "statistic", "p", "threshold", "n"
        );
        for o in &self.outcomes {
            s += &format!(
                "{:<width$}  {:>12.5e}  {:>10.4e}  {:>10.3e}  {:>9}  {}\n",
                o.name,
                o.statistic,
                o.p_value,
                o.threshold,
                o.sample_size,
                if o.passed { "pass" } else { "FAIL" }
            );
        }
        s += if self.passed {
            "overall: pass\n"
        } else {
            "overall: FAIL\n"
        };
        s
    }
}

/// Limiting Kolmogorov survival function `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    const TAIL: f64 = 1e-10;
    if lambda < 1.18 {
        // theta-function form of the CDF, fast for small λ
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut cdf = 0.0;
        for k in 1.. {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * pi2 / (8.0 * lambda * lambda)).exp();
            cdf += term;
            if term < TAIL {
                break;
            }
        }
        (1.0 - cdf * (2.0 * std::f64::consts::PI).sqrt() / lambda).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        for k in 1.. {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sf += if k % 2 == 1 { term } else { -term };
            if term < TAIL {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Usage("KS test needs a nonempty sample".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Usage("KS sample contains NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS: `(D, p)` with `p` from the Kolmogorov series at
/// `λ = sqrt(n) D`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let v = sorted_finite(samples)?;
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok((d, kolmogorov_sf(n.sqrt() * d)))
}

/// Two-sample KS with effective size `n1 n2 / (n1 + n2)`.
pub fn ks_two_sample(s1: &[f64], s2: &[f64]) -> Result<(f64, f64)> {
    let a = sorted_finite(s1)?;
    let b = sorted_finite(s2)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    // One sample exhausted: the other ECDF still has to climb to 1.
    if i < a.len() || j < b.len() {
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = n1 * n2 / (n1 + n2);
    Ok((d, kolmogorov_sf(ne.sqrt() * d)))
}

/// KS outcome against a one-sample CDF.
pub fn ks_outcome(
    name: &str,
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    alpha: f64,
    seed: u64,
) -> Result<TestOutcome> {
    let (d, p) = ks_one_sample(samples, cdf)?;
    Ok(TestOutcome::p_value(name, d, p, alpha, samples.len(), seed))
}

/// Two-sample KS outcome.
pub fn ks2_outcome(
    name: &str,
    s1: &[f64],
    s2: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<TestOutcome> {
    let (d, p) = ks_two_sample(s1, s2)?;
    Ok(TestOutcome::p_value(
        name,
        d,
        p,
        alpha,
        s1.len().min(s2.len()),
        seed,
    ))
}

/// Orthant-dependence check on `|X|`. For every point `x` of the product
/// grid, `v(x) = P(|X_i| > x_i ∀i) - ∏ P(|X_i| > x_i)` (empirical); the
/// negatively upper orthant dependent law has `v <= 0`. Passes when
/// `max_x v(x)/se(x) <= 3`, with `se` from [`NUOD_BOOTSTRAP`] bootstrap
/// resamples driven by `seed`.
pub fn nuod_check(batch: &SampleBatch, grid: &[Vec<f64>]) -> Result<TestOutcome> {
    nuod_check_rows(batch.rows(), grid, batch.seed())
}

pub fn nuod_check_rows(rows: &[Vec<f64>], grid: &[Vec<f64>], seed: u64) -> Result<TestOutcome> {
    let d = grid.len();
    if d == 0 || grid.iter().any(|g| g.is_empty()) {
        return Err(Error::Usage(
            "NUOD grid needs at least one threshold per coordinate".into(),
        ));
    }
    if rows.is_empty() {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Usage(format!(
            "NUOD grid has {d} coordinates but rows differ in length"
        )));
    }
    let mut sorted: Vec<Vec<f64>> = grid.to_vec();
    sorted.iter_mut().for_each(|g| g.sort_by(f64::total_cmp));

    // A row only matters through how many thresholds each |x_i| exceeds.
    let levels: Vec<Vec<u8>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&sorted)
                .map(|(x, g)| g.iter().filter(|&&t| x.abs() > t).count() as u8)
                .collect()
        })
        .collect();
    let mut cell_ids: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let row_cell: Vec<usize> = levels
        .iter()
        .map(|l| {
            let next = cell_ids.len();
            *cell_ids.entry(l.clone()).or_insert(next)
        })
        .collect();
    let mut cells: Vec<Vec<u8>> = vec![vec![]; cell_ids.len()];
    for (l, &id) in &cell_ids {
        cells[id] = l.clone();
    }

    let points = grid_points(&sorted);
    let eval = |counts: &[usize], out: &mut Vec<f64>| {
        let n = counts.iter().sum::<usize>() as f64;
        out.clear();
        for pt in &points {
            let mut joint = 0usize;
            let mut marg = vec![0usize; d];
            for (cell, &c) in cells.iter().zip(counts) {
                if c == 0 {
                    continue;
                }
                let mut all = true;
                for i in 0..d {
                    if cell[i] as usize > pt[i] {
                        marg[i] += c;
                    } else {
                        all = false;
                    }
                }
                if all {
                    joint += c;
                }
            }
            let prod: f64 = marg.iter().map(|&m| m as f64 / n).product();
            out.push(joint as f64 / n - prod);
        }
    };

    let mut counts = vec![0usize; cells.len()];
    for &c in &row_cell {
        counts[c] += 1;
    }
    let mut observed = Vec::new();
    eval(&counts, &mut observed);

    let mut stream = RandomStream::new(seed).substream(0x6e75_6f64);
    let n = rows.len();
    let mut sum = vec![0.0; points.len()];
    let mut sum_sq = vec![0.0; points.len()];
    let mut v = Vec::new();
    for _ in 0..NUOD_BOOTSTRAP {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            let idx = ((stream.next_u64() as u128 * n as u128) >> 64) as usize;
            counts[row_cell[idx]] += 1;
        }
        eval(&counts, &mut v);
        for (k, &x) in v.iter().enumerate() {
            sum[k] += x;
            sum_sq[k] += x * x;
        }
    }
    let b = NUOD_BOOTSTRAP as f64;
    let mut worst = f64::NEG_INFINITY;
    for (k, &obs) in observed.iter().enumerate() {
        let var = (sum_sq[k] - sum[k] * sum[k] / b) / (b - 1.0);
        // Orthants nobody reaches have v = 0 exactly and no spread.
        let se = var.max(0.0).sqrt().max(1.0 / n as f64);
        worst = worst.max(obs / se);
    }
    let p = 0.5 * erfc(worst / std::f64::consts::SQRT_2);
    Ok(TestOutcome {
        name: "nuod".into(),
        kind: OutcomeKind::Band,
        statistic: worst,
        p_value: p,
        threshold: NUOD_BANDS,
        passed: worst <= NUOD_BANDS,
        sample_size: n,
        seed,
    })
}

/// All index tuples of the product grid; entry `i` is the position of the
/// threshold in coordinate `i`'s sorted list.
fn grid_points(grid: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut pts = vec![vec![]];
    for g in grid {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..g.len()).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Ranks `0..n` (ties broken by position; the inputs are continuous).
fn ranks(col: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..col.len()).collect();
    idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
    let mut r = vec![0; col.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank;
    }
    r
}

/// Pairwise independence scan. For each pair of columns: Spearman's rank
/// correlation (normal approximation `ρ sqrt(n-1)`) and a chi-square test on
/// the 4x4 table of rank quartiles (9 degrees of freedom). Passes when every
/// p-value clears `alpha / (number of tests)`.
pub fn independence_scan(rows: &[Vec<f64>], alpha: f64) -> Result<TestOutcome> {
    let n = rows.len();
    if n < INDEPENDENCE_MIN_ROWS {
        return Err(Error::InsufficientSample {
            needed: INDEPENDENCE_MIN_ROWS,
            got: n,
        });
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Usage("rows differ in length".into()));
    }
    if d < 2 {
        return Err(Error::Usage(
            "independence scan needs at least two columns".into(),
        ));
    }
    let rk: Vec<Vec<usize>> = (0..d)
        .map(|j| ranks(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect();
    let quart: Vec<Vec<usize>> = rk
        .iter()
        .map(|r| r.iter().map(|&v| 4 * v / n).collect())
        .collect();
    let nf = n as f64;
    let mean = (nf - 1.0) / 2.0;
    let var = (nf * nf - 1.0) / 12.0;
    let chi = ChiSquared::new(9.0).expect("valid dof");

    let mut worst = (f64::INFINITY, 0.0);
    let mut tests = 0usize;
    for a in 0..d {
        for b in a + 1..d {
            let cov: f64 = rk[a]
                .iter()
                .zip(&rk[b])
                .map(|(&x, &y)| (x as f64 - mean) * (y as f64 - mean))
                .sum::<f64>()
                / nf;
            let rho = cov / var;
            let z = rho * (nf - 1.0).sqrt();
            let p_rho = erfc(z.abs() / std::f64::consts::SQRT_2);

            let mut table = [[0usize; 4]; 4];
            for (&qa, &qb) in quart[a].iter().zip(&quart[b]) {
                table[qa][qb] += 1;
            }
            let rs: Vec<f64> = (0..4)
                .map(|i| table[i].iter().sum::<usize>() as f64)
                .collect();
            let cs: Vec<f64> = (0..4)
                .map(|j| (0..4).map(|i| table[i][j]).sum::<usize>() as f64)
                .collect();
            let mut stat = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    let e = rs[i] * cs[j] / nf;
                    stat += (table[i][j] as f64 - e).powi(2) / e;
                }
            }
            let p_chi = chi.sf(stat);
            tests += 2;
            for (p, s) in [(p_rho, z.abs()), (p_chi, stat)] {
                if p < worst.0 {
                    worst = (p, s);
                }
            }
        }
    }
    Ok(TestOutcome::p_value(
        "independence",
        worst.1,
        worst.0,
        alpha / tests as f64,
        n,
        0,
    ))
}
