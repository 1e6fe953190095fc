//! Command-line front end: sampling, coordinate and moment transforms, rate
//! functions and verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on a usage,
//! parameter or input error.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use lpball::ball::{sample, BallDistributionSpec, UniformMethod};
use lpball::geometry::{from_canonical, to_canonical, BallPoint, CanonicalCoords};
use lpball::moments::{
    real_canonical_to_moments, real_moments_to_canonical, reversed_pi_coordinates,
    sample_uniform_moment_space, sigma_map, trig_moments_from_verblunsky,
    verblunsky_from_trig_moments, RealCanonicalMoments, RealMomentVector, TrigMomentVector,
    VerblunskyCoeffs,
};
use lpball::sampling::{gem_params, GdParams, GemKind};
use lpball::suites::{run_suite, Suite, SuiteConfig};
use lpball::{asymptotics, RandomStream};

pub mod io;

pub use io::{read_batch, write_batch, DataBatch, Format, IoError, Rows};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "LPBALL_THREADS";

const PLOT_BINS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "lpball",
    version,
    about = "Sampling and canonical coordinates on l_p balls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a batch from a law on the l_p ball or sphere.
    Sample(SampleArgs),
    /// Map ball points to canonical coordinates or back.
    Transform(TransformArgs),
    /// Canonical moments, Verblunsky coefficients and moment-space draws.
    Moments(MomentsArgs),
    /// Evaluate a rate function.
    Rate(RateArgs),
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dist {
    Uniform,
    Pgd,
    ConeSphere,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Canonical,
    ScaledCone,
    GammaExp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out, else csv.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    dist: Dist,
    /// Uniform-ball method.
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: f64,
    /// Comma-separated a_j, or a preset: uniform, gem-theta, gem-alpha-theta.
    #[arg(long)]
    a: Option<String>,
    /// Comma-separated b_j (omit with a preset).
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Also write per-coordinate histograms (bin edges and counts) as CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    ToCanonical,
    FromCanonical,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long)]
    p: f64,
    /// Declared dimension; files of another width are rejected.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MomentKind {
    /// Power moments of measures on [0, 1].
    Real,
    /// Trigonometric moments of measures on the unit circle.
    Trig,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MomentOp {
    /// Moments to canonical moments (real) or Verblunsky coefficients (trig).
    ToCanonical,
    FromCanonical,
    /// Real moments to the Euclidean ball; Verblunsky coefficients to the
    /// complex ball of reversed pi coordinates.
    ToBall,
    /// Uniform draws from the real moment space.
    Sample,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[arg(long, value_enum, default_value = "real")]
    kind: MomentKind,
    #[arg(long, value_enum)]
    op: MomentOp,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RateKind {
    /// -(1/p) ln(1 - ||x||_p^p) at ball points.
    Ball,
    /// -(1/p) Σ ln(1 - |c_i|^p) at canonical coordinates.
    Canonical,
    /// -c ln(1 - x) for scalars x.
    Beta,
    /// -(1/2) ln(1 - ||f||_2) at coefficient vectors.
    Functional,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long, value_enum)]
    kind: RateKind,
    #[arg(long)]
    p: Option<f64>,
    /// Parameter of the Beta rate.
    #[arg(long)]
    c: Option<f64>,
    /// One point as a comma-separated list.
    #[arg(long, conflicts_with = "input")]
    x: Option<String>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn fail<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure(msg.into()))
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(Failure(msg)) => {
            eprintln!("lpball: {msg}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("lpball: {msg}");
            2
        }
    }
}

fn thread_pool() -> Res<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => b = b.num_threads(n),
            _ => return fail(format!("{THREADS_ENV}={v:?} is not a positive integer")),
        }
    }
    Ok(b.build()?)
}

fn dispatch(cmd: Command) -> Res<i32> {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Rate(a) => cmd_rate(a),
        Command::Verify(a) => cmd_verify(a),
    }
    .map(|()| 0)
    .or_else(|f| if f.0 == VERIFY_FAILED { Ok(1) } else { Err(f) })
}

const VERIFY_FAILED: &str = "\0verification failed";

fn parse_list(s: &str, what: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Failure(format!("--{what}: '{t}': {e}")))
        })
        .collect()
}

fn gd_params(args: &SampleArgs) -> Res<GdParams> {
    let preset = |n: Option<usize>| {
        n.ok_or_else(|| Failure("--n is required with a parameter preset".into()))
    };
    let no_b = || {
        if args.b.is_some() {
            fail("--b must be omitted with a parameter preset")
        } else {
            Ok(())
        }
    };
    match args.a.as_deref() {
        Some("uniform") => {
            no_b()?;
            Ok(GdParams::uniform_ball(preset(args.n)?, args.p)?)
        }
        Some("gem-theta") => {
            no_b()?;
            let theta = args
                .theta
                .ok_or_else(|| Failure("gem-theta needs --theta".into()))?;
            if args.alpha.is_some() {
                return fail("gem-theta takes no --alpha");
            }
            Ok(gem_params(GemKind::Theta, theta, 0.0, preset(args.n)?)?)
        }
        Some("gem-alpha-theta") => {
            no_b()?;
            let theta = args
                .theta
                .ok_or_else(|| Failure("gem-alpha-theta needs --theta".into()))?;
            let alpha = args
                .alpha
                .ok_or_else(|| Failure("gem-alpha-theta needs --alpha".into()))?;
            Ok(gem_params(
                GemKind::AlphaTheta,
                theta,
                alpha,
                preset(args.n)?,
            )?)
        }
        Some(list) => {
            if args.theta.is_some() || args.alpha.is_some() {
                return fail("--theta and --alpha only apply to the gem presets");
            }
            let a = parse_list(list, "a")?;
            let b = parse_list(
                args.b
                    .as_deref()
                    .ok_or_else(|| Failure("--b is required with a list for --a".into()))?,
                "b",
            )?;
            let params = GdParams::new(a, b)?;
            if let Some(n) = args.n.filter(|&n| n != params.len()) {
                return fail(format!(
                    "--n {n} disagrees with {} parameter pairs",
                    params.len()
                ));
            }
            Ok(params)
        }
        None => fail("--dist pgd needs --a (a list or a preset)"),
    }
}

fn sample_spec(args: &SampleArgs) -> Res<BallDistributionSpec> {
    let pgd_only =
        args.a.is_some() || args.b.is_some() || args.theta.is_some() || args.alpha.is_some();
    if pgd_only && !matches!(args.dist, Dist::Pgd) {
        return fail("--a, --b, --theta and --alpha only apply to --dist pgd");
    }
    if args.method.is_some() && !matches!(args.dist, Dist::Uniform) {
        return fail("--method only applies to --dist uniform");
    }
    let need_n = || args.n.ok_or_else(|| Failure("--n is required".into()));
    Ok(match args.dist {
        Dist::Uniform => {
            let method = match args.method.unwrap_or(Method::GammaExp) {
                Method::Canonical => UniformMethod::Canonical,
                Method::ScaledCone => UniformMethod::ScaledCone,
                Method::GammaExp => UniformMethod::GammaExp,
            };
            BallDistributionSpec::uniform(need_n()?, args.p, method)?
        }
        Dist::ConeSphere => BallDistributionSpec::cone_sphere(need_n()?, args.p)?,
        Dist::Pgd => BallDistributionSpec::pgd(gd_params(args)?, args.p)?,
    })
}

fn resolve_format(o: &Output) -> Format {
    match (o.format, &o.out) {
        (Some(FormatArg::Csv), _) => Format::Csv,
        (Some(FormatArg::Json), _) => Format::Json,
        (None, Some(path)) => Format::from_path(path),
        (None, None) => Format::Csv,
    }
}

fn emit(batch: &DataBatch, o: &Output) -> Res<()> {
    let format = resolve_format(o);
    match &o.out {
        Some(path) => write_batch(batch, path, format)?,
        None => {
            let text = match format {
                Format::Csv => io::to_csv(batch),
                Format::Json => io::to_json(batch),
            };
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn write_plot(
    path: &Path,
    rows: &[Vec<f64>],
    dim: usize,
    radial: Option<(f64, Vec<f64>)>,
) -> Res<()> {
    let mut cols: Vec<(String, Vec<f64>, f64, f64)> = (0..dim)
        .map(|j| {
            (
                format!("x{}", j + 1),
                rows.iter().map(|r| r[j]).collect(),
                -1.0,
                1.0,
            )
        })
        .collect();
    if let Some((_, r)) = radial {
        cols.push(("radial".into(), r, 0.0, 1.0));
    }
    std::fs::write(path, io::histogram_csv(&cols, PLOT_BINS))
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn cmd_sample(args: SampleArgs) -> Res<()> {
    let spec = sample_spec(&args)?;
    let batch = sample(&spec, args.count, args.seed);
    if let Some(path) = &args.plot {
        let radial = batch.radial_powers();
        write_plot(path, batch.rows(), spec.dim(), Some((spec.p(), radial)))?;
    }
    let out = DataBatch::real(
        serde_json::to_value(&spec)?,
        Some(args.seed),
        spec.dim(),
        batch.rows().to_vec(),
    );
    emit(&out, &args.output)
}

fn transform_rows<T: lpball::geometry::Coordinate>(
    rows: &[Vec<T>],
    p: f64,
    dir: Direction,
) -> Res<Vec<Vec<T>>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let res = match dir {
                Direction::ToCanonical => BallPoint::new(r.clone(), p)
                    .and_then(|x| to_canonical(&x))
                    .map(|c| c.into_coords()),
                Direction::FromCanonical => CanonicalCoords::new(r.clone(), p)
                    .and_then(|c| from_canonical(&c))
                    .map(|x| x.into_coords()),
            };
            res.map_err(|e| Failure(format!("row {}: {e}", i + 1)))
        })
        .collect()
}

fn cmd_transform(args: TransformArgs) -> Res<()> {
    let input = read_batch(&args.input, args.n)?;
    let kind = match args.direction {
        Direction::ToCanonical => "canonical-coordinates",
        Direction::FromCanonical => "ball-points",
    };
    let spec = json!({ "kind": kind, "p": args.p });
    let out = match &input.rows {
        Rows::Real(rows) => {
            let t = transform_rows(rows, args.p, args.direction)?;
            if let Some(path) = &args.plot {
                write_plot(path, &t, input.dim, None)?;
            }
            DataBatch::real(spec, input.seed, input.dim, t)
        }
        Rows::Complex(rows) => {
            if args.plot.is_some() {
                return fail("--plot supports real data only");
            }
            DataBatch::complex(
                spec,
                input.seed,
                input.dim,
                transform_rows(rows, args.p, args.direction)?,
            )
        }
    };
    emit(&out, &args.output)
}

fn cmd_moments(args: MomentsArgs) -> Res<()> {
    if let MomentOp::Sample = args.op {
        if args.input.is_some() {
            return fail("--op sample takes no --in");
        }
        if let MomentKind::Trig = args.kind {
            return fail("uniform sampling is only available for real moments");
        }
        let n = args.n.ok_or_else(|| Failure("--n is required".into()))?;
        let count = args
            .count
            .ok_or_else(|| Failure("--count is required".into()))?;
        let seed = args
            .seed
            .ok_or_else(|| Failure("--seed is required".into()))?;
        let draws = sample_uniform_moment_space(n, count, &mut RandomStream::new(seed))?;
        let rows = draws.into_iter().map(|m| m.into_inner()).collect();
        let spec = json!({ "kind": "uniform-moment-space", "n": n });
        return emit(&DataBatch::real(spec, Some(seed), n, rows), &args.output);
    }
    if args.count.is_some() || args.seed.is_some() {
        return fail("--count and --seed only apply to --op sample");
    }
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| Failure("--in is required".into()))?;
    let input = read_batch(path, args.n)?;
    let row_err = |i: usize| move |e: lpball::Error| Failure(format!("row {}: {e}", i + 1));
    let out = match (args.kind, &input.rows) {
        (MomentKind::Real, Rows::Real(rows)) => {
            let (kind, t): (&str, Vec<Vec<f64>>) = match args.op {
                MomentOp::ToCanonical => (
                    "canonical-moments",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            RealMomentVector::new(r.clone())
                                .and_then(|m| real_moments_to_canonical(&m))
                                .map(|c| c.into_inner())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::FromCanonical => (
                    "moments",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            RealCanonicalMoments::new(r.clone())
                                .and_then(|c| real_canonical_to_moments(&c))
                                .map(|m| m.into_inner())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::ToBall => (
                    "ball-points",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            RealMomentVector::new(r.clone())
                                .and_then(|m| sigma_map(&m))
                                .map(|x| x.into_coords())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::Sample => unreachable!("handled above"),
            };
            DataBatch::real(json!({ "kind": kind }), input.seed, input.dim, t)
        }
        (MomentKind::Trig, Rows::Complex(rows)) => {
            let (kind, t): (&str, Vec<Vec<Complex64>>) = match args.op {
                MomentOp::ToCanonical => (
                    "verblunsky-coefficients",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            TrigMomentVector::new(r.clone())
                                .and_then(|t| verblunsky_from_trig_moments(&t))
                                .map(|c| c.into_inner())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::FromCanonical => (
                    "trigonometric-moments",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            VerblunskyCoeffs::new(r.clone())
                                .and_then(|c| trig_moments_from_verblunsky(&c))
                                .map(|t| t.into_inner())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::ToBall => (
                    "pi-coordinates",
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            VerblunskyCoeffs::new(r.clone())
                                .and_then(|c| reversed_pi_coordinates(&c).ball_point())
                                .map(|x| x.into_coords())
                                .map_err(row_err(i))
                        })
                        .collect::<Res<_>>()?,
                ),
                MomentOp::Sample => unreachable!("handled above"),
            };
            DataBatch::complex(json!({ "kind": kind }), input.seed, input.dim, t)
        }
        (MomentKind::Real, Rows::Complex(_)) => {
            return fail("--kind real expects real columns x1,...,xN")
        }
        (MomentKind::Trig, Rows::Real(_)) => {
            return fail("--kind trig expects complex columns re1,im1,...")
        }
    };
    emit(&out, &args.output)
}

fn cmd_rate(args: RateArgs) -> Res<()> {
    let points: Rows = match (&args.x, &args.input) {
        (Some(x), None) => Rows::Real(vec![parse_list(x, "x")?]),
        (None, Some(path)) => read_batch(path, None)?.rows,
        _ => return fail("one of --x or --in is required"),
    };
    let need_p = || {
        args.p
            .ok_or_else(|| Failure("--p is required for this rate".into()))
    };
    match args.kind {
        RateKind::Beta => {
            if args.p.is_some() {
                return fail("--p does not apply to the Beta rate");
            }
        }
        _ if args.c.is_some() => return fail("--c only applies to the Beta rate"),
        RateKind::Functional if args.p.is_some() => {
            return fail("--p does not apply to the functional rate")
        }
        _ => {}
    }
    let rate = |i: usize, r: lpball::Result<asymptotics::RateValue>| {
        r.map(|v| v.value())
            .map_err(|e| Failure(format!("row {}: {e}", i + 1)))
    };
    let values: Vec<f64> = match (&points, args.kind) {
        (Rows::Real(rows), RateKind::Ball) => {
            let p = need_p()?;
            rows.iter()
                .enumerate()
                .map(|(i, r)| rate(i, asymptotics::ldp_rate_ball(r, p)))
                .collect::<Res<_>>()?
        }
        (Rows::Complex(rows), RateKind::Ball) => {
            let p = need_p()?;
            rows.iter()
                .enumerate()
                .map(|(i, r)| rate(i, asymptotics::ldp_rate_ball(r, p)))
                .collect::<Res<_>>()?
        }
        (Rows::Real(rows), RateKind::Canonical) => {
            let p = need_p()?;
            rows.iter()
                .enumerate()
                .map(|(i, r)| rate(i, asymptotics::ldp_rate_canonical(r, p)))
                .collect::<Res<_>>()?
        }
        (Rows::Complex(rows), RateKind::Canonical) => {
            let p = need_p()?;
            rows.iter()
                .enumerate()
                .map(|(i, r)| rate(i, asymptotics::ldp_rate_canonical(r, p)))
                .collect::<Res<_>>()?
        }
        (Rows::Real(rows), RateKind::Beta) => {
            let c = args
                .c
                .ok_or_else(|| Failure("--c is required for the Beta rate".into()))?;
            let mut out = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                for &x in r {
                    out.push(rate(i, asymptotics::ldp_rate_beta(x, c))?);
                }
            }
            out
        }
        (Rows::Real(rows), RateKind::Functional) => rows
            .iter()
            .map(|r| asymptotics::ldp_rate_functional(r).value())
            .collect(),
        (Rows::Complex(_), _) => return fail("this rate takes real input"),
    };
    let spec = json!({ "kind": "rate", "rate": format!("{:?}", args.kind).to_lowercase(), "p": args.p, "c": args.c });
    let rows = values.into_iter().map(|v| vec![v]).collect();
    emit(&DataBatch::real(spec, None, 1, rows), &args.output)
}

fn cmd_verify(args: VerifyArgs) -> Res<()> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>()?]
    };
    let config = SuiteConfig {
        n: args.n,
        p: args.p,
        count: args.count,
        alpha: args.alpha,
    };
    let reports = suites
        .iter()
        .map(|&s| run_suite(s, &config, args.seed))
        .collect::<lpball::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let json = if reports.len() == 1 {
        reports[0].to_json()
    } else {
        serde_json::to_string_pretty(&reports)?
    } + "\n";
    if let Some(path) = &args.out {
        std::fs::write(path, &json).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    let mut stdout = std::io::stdout().lock();
    match args.format {
        ReportFormat::Json if args.out.is_none() => stdout.write_all(json.as_bytes())?,
        ReportFormat::Json => {}
        ReportFormat::Table => {
            for r in &reports {
                stdout.write_all(r.to_table().as_bytes())?;
            }
        }
    }
    for r in reports.iter().filter(|r| !r.passed) {
        let failed: Vec<&str> = r
            .outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name.as_str())
            .collect();
        eprintln!("lpball: suite {} failed: {}", r.suite, failed.join(", "));
    }
    if passed {
        Ok(())
    } else {
        fail(VERIFY_FAILED)
    }
}
