//! Acceptance criteria, one line each. Exits nonzero when any criterion
//! fails.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use statrs::distribution::{Beta, ContinuousCDF};

use lpball::ball::{sample, BallDistributionSpec, UniformMethod};
use lpball::geometry::{from_canonical, jacobian_logdet, to_canonical, BallPoint, CanonicalCoords};
use lpball::moments::{
    real_canonical_jacobian_logdet, real_canonical_to_moments, real_moments_to_canonical,
    RealCanonicalMoments, RealMomentVector,
};
use lpball::stats::TestReport;
use lpball::suites::{run_suite, Suite, SuiteConfig};
use lpball::RandomStream;

const SEED: u64 = 20_240_917;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn suite(s: Suite) -> TestReport {
    run_suite(s, &SuiteConfig::default(), SEED).expect("suite runs")
}

fn failures(r: &TestReport) -> String {
    let f: Vec<String> = r
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| {
            format!(
                "{} (stat {:.3e}, p {:.3e}, threshold {:.3e})",
                o.name, o.statistic, o.p_value, o.threshold
            )
        })
        .collect();
    if f.is_empty() {
        format!("{} checks", r.outcomes.len())
    } else {
        format!(
            "{} of {} checks failed: {}",
            f.len(),
            r.outcomes.len(),
            f.join("; ")
        )
    }
}

fn suite_verdict(reports: &[TestReport]) -> Verdict {
    let passed = reports.iter().all(|r| r.passed);
    let detail = reports
        .iter()
        .map(|r| format!("{}: {}", r.suite, failures(r)))
        .collect::<Vec<_>>()
        .join(" | ");
    verdict(passed, detail)
}

fn transform_exactness() -> Verdict {
    let mut elapsed = Duration::ZERO;
    let mut s = RandomStream::new(SEED);
    let (mut worst, mut worst_c, mut cube_worst) = (0.0f64, 0.0f64, 0.0f64);
    let (mut skipped, mut cube_skipped) = (0usize, 0usize);
    for p in [1.0, 1.5, 2.0, 3.0] {
        for n in [1, 2, 5, 20] {
            let spec = BallDistributionSpec::uniform(n, p, UniformMethod::GammaExp).unwrap();
            let batch = sample(&spec, 10_000, s.next_u64());
            let start = Instant::now();
            for row in batch.rows() {
                let x = BallPoint::new(row.clone(), p).unwrap();
                let back = from_canonical(&to_canonical(&x).unwrap()).unwrap();
                worst = worst.max(max_diff(row, back.coords()));
            }
            elapsed += start.elapsed();
            // Canonical coordinates of uniform interior points are independent
            // with |c_j|^p ~ Beta(1/p, (N-j)/p + 1) and a symmetric sign.
            let laws: Vec<Beta> = (1..=n)
                .map(|j| Beta::new(1.0 / p, (n - j) as f64 / p + 1.0).unwrap())
                .collect();
            let draws: Vec<Vec<f64>> = (0..10_000)
                .map(|_| {
                    laws.iter()
                        .map(|law| {
                            let r = law
                                .inverse_cdf(s.next_open01())
                                .powf(1.0 / p)
                                .min(1.0 - f64::EPSILON);
                            if s.next_u64() & 1 == 0 {
                                r
                            } else {
                                -r
                            }
                        })
                        .collect()
                })
                .collect();
            let start = Instant::now();
            for c in &draws {
                worst_c = worst_c.max(canonical_roundtrip(c, p, &mut skipped).unwrap_or(0.0));
            }
            elapsed += start.elapsed();
            for _ in 0..10_000 {
                let cube: Vec<f64> = (0..n).map(|_| s.next_open_signed()).collect();
                cube_worst =
                    cube_worst.max(canonical_roundtrip(&cube, p, &mut cube_skipped).unwrap_or(0.0));
            }
        }
    }
    let t = elapsed;
    verdict(
        worst <= 1e-12 && worst_c <= 1e-12 && t < Duration::from_secs(10),
        format!(
            "ball side {worst:.2e}, canonical side {worst_c:.2e} (tol 1e-12, {skipped} skipped), {:.2}s in transforms (limit 10s); \
             info: uniform cube {cube_worst:.2e} ({cube_skipped} skipped)",
            t.as_secs_f64()
        ),
    )
}

/// Round trip `c -> x -> c`; `None` when the image rounds onto the sphere.
fn canonical_roundtrip(c: &[f64], p: f64, skipped: &mut usize) -> Option<f64> {
    let image = from_canonical(&CanonicalCoords::new(c.to_vec(), p).unwrap())
        .unwrap()
        .into_coords();
    let Ok(x) = BallPoint::new(image, p) else {
        *skipped += 1;
        return None;
    };
    Some(max_diff(c, to_canonical(&x).unwrap().coords()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det_oracle(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Central-difference Jacobian of `f` at `c`.
fn fd_jacobian(c: &[f64], h: f64, f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let n = c.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut up = c.to_vec();
            let mut dn = c.to_vec();
            up[j] += h;
            dn[j] -= h;
            let (fu, fd) = (f(&up), f(&dn));
            fu.iter()
                .zip(&fd)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

fn jacobians() -> Verdict {
    let mut s = RandomStream::new(SEED ^ 2);
    let (mut ball_err, mut mom_err) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let p = [1.0, 1.5, 2.0, 3.0][i % 4];
        let n = 2 + i % 7;
        let c: Vec<f64> = (0..n).map(|_| 0.9 * s.next_open_signed()).collect();
        let jac = fd_jacobian(&c, 1e-5, |v| {
            from_canonical(&CanonicalCoords::new(v.to_vec(), p).unwrap())
                .unwrap()
                .into_coords()
        });
        let want = jacobian_logdet(&CanonicalCoords::new(c.clone(), p).unwrap()).exp();
        ball_err = ball_err.max(((det_oracle(jac) - want) / want).abs());
    }
    for i in 0..100 {
        let n = 2 + i % 5;
        let c: Vec<f64> = (0..n).map(|_| 0.1 + 0.8 * s.next_open01()).collect();
        let jac = fd_jacobian(&c, 1e-3, |v| {
            real_canonical_to_moments(&RealCanonicalMoments::new(v.to_vec()).unwrap())
                .unwrap()
                .into_inner()
        });
        let want = real_canonical_jacobian_logdet(&RealCanonicalMoments::new(c).unwrap()).exp();
        mom_err = mom_err.max(((det_oracle(jac) - want) / want).abs());
    }
    verdict(
        ball_err <= 1e-6 && mom_err <= 1e-6,
        format!("ball rel err {ball_err:.2e}, moment rel err {mom_err:.2e} (tol 1e-6)"),
    )
}

fn uniform_equivalence() -> Verdict {
    let start = Instant::now();
    let r = suite(Suite::UniformEquivalence);
    let t = start.elapsed();
    let mut v = suite_verdict(&[r]);
    v.passed &= t < Duration::from_secs(60);
    v.detail += &format!(", {:.2}s (limit 60s)", t.as_secs_f64());
    v
}

/// Exact rational determinant.
fn rat_det(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k].clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / a[k][k].clone();
            for j in k..n {
                let t = f.clone() * a[k][j].clone();
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Canonical moments by the Hankel-determinant characterization in exact
/// arithmetic: each bound is where a determinant, affine in `m_n`, vanishes.
fn hankel_oracle(m: &[BigRational]) -> Vec<BigRational> {
    let mut mm = vec![BigRational::one()];
    mm.extend_from_slice(m);
    let root = |build: &dyn Fn(&BigRational) -> Vec<Vec<BigRational>>| {
        let d0 = rat_det(build(&BigRational::zero()));
        let d1 = rat_det(build(&BigRational::one()));
        -d0.clone() / (d1 - d0)
    };
    (1..=m.len())
        .map(|n| {
            let at = |x: &BigRational, k: usize| if k == n { x.clone() } else { mm[k].clone() };
            let lower = if n == 1 {
                BigRational::zero()
            } else {
                let (size, off) = (n / 2 + 1, n % 2);
                root(&|x| {
                    (0..size)
                        .map(|i| (0..size).map(|j| at(x, i + j + off)).collect())
                        .collect()
                })
            };
            let upper = if n == 1 {
                BigRational::one()
            } else {
                let (size, off) = (n.div_ceil(2), 1 - n % 2);
                root(&|x| {
                    (0..size)
                        .map(|i| {
                            (0..size)
                                .map(|j| at(x, i + j + off) - at(x, i + j + off + 1))
                                .collect()
                        })
                        .collect()
                })
            };
            (mm[n].clone() - lower.clone()) / (upper - lower)
        })
        .collect()
}

fn moment_roundtrips() -> Verdict {
    let r = suite(Suite::MomentRoundtrips);
    let mut v = suite_verdict(std::slice::from_ref(&r));
    let n = 10;
    let exact: Vec<BigRational> = (1..=n)
        .map(|k| BigRational::new(BigInt::one(), BigInt::from(k + 1)))
        .collect();
    let oracle = hankel_oracle(&exact);
    let closed = (1..=n).all(|j| {
        let want = if j % 2 == 1 {
            BigRational::new(1.into(), 2.into())
        } else {
            BigRational::new(BigInt::from(j / 2), BigInt::from(j + 1))
        };
        oracle[j - 1] == want
    });
    let m = RealMomentVector::new((1..=n).map(|k| 1.0 / (k + 1) as f64).collect()).unwrap();
    let got = real_moments_to_canonical(&m).unwrap();
    let err = got
        .as_slice()
        .iter()
        .zip(&oracle)
        .map(|(g, o)| {
            let diff = BigRational::from_float(*g).unwrap() - o.clone();
            let num = diff.abs();
            num.numer().to_string().parse::<f64>().unwrap()
                / num.denom().to_string().parse::<f64>().unwrap()
        })
        .fold(0.0, f64::max);
    v.passed &= closed && err <= 1e-10;
    v.detail += &format!(" | exact Hankel oracle reproduces Lebesgue closed form: {closed}; implementation vs oracle {err:.2e}");
    v
}

fn determinism() -> Verdict {
    let mut mismatched = Vec::new();
    for s in Suite::ALL {
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| suite(s)).to_json();
        let b = many.install(|| suite(s)).to_json();
        if a != b {
            mismatched.push(s.name());
        }
    }
    verdict(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!(
                "{} suites byte-identical across reruns (1 and 4 threads)",
                Suite::ALL.len()
            )
        } else {
            format!("differing reports: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("transform exactness", Box::new(transform_exactness)),
        ("jacobian correctness", Box::new(jacobians)),
        ("uniform-sampler equivalence", Box::new(uniform_equivalence)),
        (
            "radial law",
            Box::new(|| suite_verdict(&[suite(Suite::RadialLaw)])),
        ),
        (
            "canonical-coordinate law",
            Box::new(|| suite_verdict(&[suite(Suite::PgdCanonical)])),
        ),
        (
            "cone-dirichlet",
            Box::new(|| suite_verdict(&[suite(Suite::ConeDirichlet)])),
        ),
        ("nuod", Box::new(|| suite_verdict(&[suite(Suite::Nuod)]))),
        (
            "poincare-borel",
            Box::new(|| suite_verdict(&[suite(Suite::PoincareBorel), suite(Suite::TpoingLimit)])),
        ),
        (
            "rate identities",
            Box::new(|| suite_verdict(&[suite(Suite::RateIdentities)])),
        ),
        ("moment round-trips", Box::new(moment_roundtrips)),
        (
            "verblunsky round-trips",
            Box::new(|| suite_verdict(&[suite(Suite::VerblunskyRoundtrips)])),
        ),
        (
            "sigma pushforward",
            Box::new(|| suite_verdict(&[suite(Suite::SigmaPushforward)])),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        println!(
            "criterion {:>2} {:<28} {}  [{:.1}s] {}",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.passed {
            failed.push(i + 1);
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
