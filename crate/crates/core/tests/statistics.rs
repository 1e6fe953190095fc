//! Null calibration and power of the statistical checks.

use lpball::ball::{sample, BallDistributionSpec, UniformMethod};
use lpball::sampling::GdParams;
use lpball::stats::{independence_scan, ks_one_sample, ks_two_sample, nuod_check};
use lpball::RandomStream;

fn uniforms(seed: u64, n: usize) -> Vec<f64> {
    let mut s = RandomStream::new(seed);
    (0..n).map(|_| s.next_open01()).collect()
}

#[test]
fn ks_null_rarely_rejects() {
    let rejections = (0..20u64)
        .filter(|&seed| {
            ks_one_sample(&uniforms(seed, 100_000), |x| x.clamp(0.0, 1.0))
                .unwrap()
                .1
                < 0.01
        })
        .count();
    assert!(rejections <= 2, "{rejections} of 20");
    let rejections = (0..20u64)
        .filter(|&seed| {
            ks_two_sample(&uniforms(seed, 100_000), &uniforms(seed + 1000, 100_000))
                .unwrap()
                .1
                < 0.01
        })
        .count();
    assert!(rejections <= 2, "{rejections} of 20");
}

#[test]
fn ks_null_p_values_look_uniform() {
    let ps: Vec<f64> = (0..200u64)
        .map(|seed| {
            ks_one_sample(&uniforms(seed + 50, 2000), |x| x.clamp(0.0, 1.0))
                .unwrap()
                .1
        })
        .collect();
    let (_, meta) = ks_one_sample(&ps, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(meta > 1e-3, "{meta}");
}

#[test]
fn ks_degenerate_examples() {
    let (d, _) = ks_one_sample(&[0.5; 10], |x| x).unwrap();
    assert!((d - 0.5).abs() < 1e-15);
    let a = uniforms(1, 500);
    assert_eq!(ks_two_sample(&a, &a).unwrap(), (0.0, 1.0));
    let b: Vec<f64> = a.iter().map(|x| x + 2.0).collect();
    assert_eq!(ks_two_sample(&a, &b).unwrap().0, 1.0);
}

#[test]
fn canonical_coordinates_of_pgd_draws_scan_as_independent() {
    let params = GdParams::new(vec![0.5, 1.5, 1.0], vec![2.0, 1.0, 3.0]).unwrap();
    let spec = BallDistributionSpec::pgd(params, 1.5).unwrap();
    let batch = sample(&spec, 50_000, 8);
    let scan = independence_scan(&batch.canonical_rows().unwrap(), 0.01).unwrap();
    assert!(scan.passed, "{scan:?}");
}

#[test]
fn raw_l1_ball_coordinates_fail_the_scan() {
    let spec = BallDistributionSpec::uniform(2, 1.0, UniformMethod::GammaExp).unwrap();
    let batch = sample(&spec, 20_000, 8);
    let scan = independence_scan(batch.rows(), 0.01).unwrap();
    assert!(!scan.passed);
}

#[test]
fn perfectly_correlated_pairs_fail_hard() {
    let rows: Vec<Vec<f64>> = uniforms(3, 1000).into_iter().map(|u| vec![u, u]).collect();
    let scan = independence_scan(&rows, 0.01).unwrap();
    assert!(!scan.passed && scan.p_value < 1e-6, "{scan:?}");
}

#[test]
fn nuod_examples() {
    let grid = vec![vec![0.2, 0.4, 0.6]; 3];
    let ball = sample(
        &BallDistributionSpec::uniform(3, 2.0, UniformMethod::Canonical).unwrap(),
        100_000,
        5,
    );
    assert!(nuod_check(&ball, &grid).unwrap().passed);
    let sphere = sample(
        &BallDistributionSpec::cone_sphere(3, 1.0).unwrap(),
        100_000,
        6,
    );
    assert!(nuod_check(&sphere, &grid).unwrap().passed);
}
