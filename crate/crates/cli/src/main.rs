//! `bragg`: command-line front end for bragg-core.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive or hypothesis unmet, 3 error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bragg_core::cases::{self, Case};
use bragg_core::diffraction::{
    autocorrelation, candidate_frequencies, estimate_diffraction, theorem1_check, CandidateOptions, Theorem1Options,
};
use bragg_core::dualsets::{eps_dual, theorem2_verify, DualGrids, Theorem2Options};
use bragg_core::geometry::{compose, meyer_check, Compose, Cuboid, Generator, MeyerOptions, Point, PointSet, VanHoveFamily};
use bragg_core::io::{peaks_csv, points_csv, to_json};
use bragg_core::measure::{unit_comb, AtomicMeasure};
use bragg_core::posdef::{krein_check, rigidity_check, sparseness_verify, PairSampler};
use bragg_core::Verdict;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bragg", version, about = "Diffraction and positive-definiteness checks for point sets")]
struct Cli {
    /// seed for every sampler
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a point set (or, for zpz, a measure) as JSON
    Generate(GenerateArgs),
    /// Estimate Bragg intensities; with --a also check the Meyer property of I(a)
    Diffract(DiffractArgs),
    /// Finite autocorrelation ω|A ∗ (ω|A)~ / |A| of a set or measure
    Autocorr(AutocorrArgs),
    /// Relative denseness and weak uniform discreteness across window scales
    Meyer(MeyerArgs),
    /// Krein's inequality on the support function of a measure
    Krein(KreinArgs),
    /// Sparseness of the high-intensity set of a positive measure
    Sparse(SparseArgs),
    /// Positive definiteness of δ_Λ against the subgroup test
    Rigidity(RigidityArgs),
    /// ε-dual region of a 1D set; with --verify the full double-dual intensity check
    Epsdual(EpsdualArgs),
    /// Write the evidence bundle of a worked example
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Zpz,
    Union2d,
    Fibonacci,
}

#[derive(Args)]
struct GenerateArgs {
    /// integer lattice ℤᵈ of this dimension
    #[arg(long, value_name = "DIM", group = "source")]
    lattice: Option<usize>,
    /// Fibonacci chain (1D model set)
    #[arg(long, group = "source")]
    fibonacci: bool,
    /// one of the worked examples
    #[arg(long, value_enum, group = "source", alias = "paper-example")]
    example: Option<Example>,
    /// scale the lattice by this factor
    #[arg(long, default_value_t = 1.0, requires = "lattice")]
    scale: f64,
    /// window [LO, HI] on every axis
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    window: Option<Vec<f64>>,
    /// range of the zpz example: window [−πN, πN]
    #[arg(long, default_value_t = 24)]
    n: usize,
    /// JSON output (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// also write the points as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// point set or measure JSON
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct DiffractArgs {
    #[command(flatten)]
    input: InputArgs,
    /// geometric:COUNT[:S0] or list:S1,S2,...
    #[arg(long, default_value = "geometric:5")]
    family: String,
    /// half-width of the dual window
    #[arg(long, default_value_t = 3.0)]
    dual_window: f64,
    /// grid spacing of the generic frequency scan
    #[arg(long, default_value_t = 0.01)]
    grid: f64,
    /// peaks below FLOOR·γ̂({0}) are not searched for
    #[arg(long, default_value_t = 0.05)]
    floor: f64,
    #[arg(long, default_value_t = 0.02)]
    eps_atom: f64,
    #[arg(long, default_value = "peaks.csv")]
    out: PathBuf,
    /// intensity level; runs the I(a) Meyer check on dual half-widths W/4, W/2, W
    #[arg(long)]
    a: Option<f64>,
    /// JSON report for --a (stdout when absent)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AutocorrArgs {
    #[command(flatten)]
    input: InputArgs,
    /// half-side of the averaging box A
    #[arg(long)]
    half: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeyerArgs {
    #[command(flatten)]
    input: InputArgs,
    /// window half-widths about the input window's centre (default: quarter, half and full)
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    /// side of the box K used for the difference-set count
    #[arg(long, default_value_t = 1.0)]
    k_side: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KreinArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    pairs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SparseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    k_side: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RigidityArgs {
    #[command(flatten)]
    input: InputArgs,
    /// how many atoms near the origin enter the exhaustive Gram configurations
    #[arg(long, default_value_t = 24)]
    candidates: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EpsdualArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// half-width of the dual and physical domains
    #[arg(long, default_value_t = 10.0)]
    domain: f64,
    #[arg(long, default_value_t = 1e-3)]
    spacing: f64,
    /// run the double-dual chain and the intensity check with ε
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_parser = parse_case)]
    case: Case,
    #[arg(long)]
    out: PathBuf,
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse::<Case>().map_err(|e| e.to_string())
}

enum Input {
    Set(PointSet),
    Measure(AtomicMeasure),
}

impl Input {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if v.get("atoms").is_some() {
            Ok(Input::Measure(serde_json::from_value(v).context("invalid measure JSON")?))
        } else if v.get("points").is_some() {
            Ok(Input::Set(serde_json::from_value(v).context("invalid point set JSON")?))
        } else {
            bail!("{} holds neither a point set nor a measure", path.display())
        }
    }

    fn measure(&self) -> AtomicMeasure {
        match self {
            Input::Set(ps) => unit_comb(ps),
            Input::Measure(m) => m.clone(),
        }
    }

    fn set(&self) -> anyhow::Result<PointSet> {
        match self {
            Input::Set(ps) => Ok(ps.clone()),
            Input::Measure(m) => {
                let window = m.extent().context("empty measure")?;
                let pts = m.atoms().iter().filter(|a| a.w.norm() > 0.0).map(|a| a.x);
                Ok(PointSet::clipped(window, pts, Generator::Explicit)?)
            }
        }
    }

    fn generator(&self) -> Generator {
        match self {
            Input::Set(ps) => ps.generator().clone(),
            Input::Measure(_) => Generator::Explicit,
        }
    }

    fn window(&self) -> anyhow::Result<Cuboid> {
        match self {
            Input::Set(ps) => Ok(*ps.window()),
            Input::Measure(m) => m.extent().context("empty measure"),
        }
    }
}

/// Half-side of the largest origin-centred box inside `w`.
fn centred_half(w: &Cuboid) -> anyhow::Result<f64> {
    let h = (0..w.dim()).map(|i| (-w.lo().get(i)).min(w.hi().get(i))).fold(f64::INFINITY, f64::min);
    if h.is_nan() || h <= 0.0 {
        bail!("the window must contain the origin in its interior");
    }
    Ok(h)
}

fn parse_family(spec: &str, dim: usize, window: &Cuboid) -> anyhow::Result<VanHoveFamily> {
    let (kind, rest) = spec.split_once(':').context("family must look like geometric:5 or list:10,20,40")?;
    let fam = match kind {
        "geometric" => {
            let mut it = rest.split(':');
            let count: usize = it.next().unwrap_or("").parse().context("geometric family count")?;
            if count == 0 {
                bail!("family needs at least one box");
            }
            let s0 = match it.next() {
                Some(s) => s.parse().context("geometric family s0")?,
                None => centred_half(window)? / 2f64.powi(count as i32 - 1),
            };
            VanHoveFamily::geometric(dim, s0, count)?
        }
        "list" => {
            let halves = rest.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>()?;
            VanHoveFamily::new(dim, halves)?
        }
        other => bail!("unknown family kind {other}"),
    };
    Ok(fam)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let text = to_json(value)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Human-readable summary on stderr, keeping stdout for JSON.
fn table(title: &str, rows: &[(&str, String)], verdict: Option<Verdict>) {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    eprintln!("{title}");
    for (k, v) in rows {
        eprintln!("  {k:<width$}  {v}");
    }
    if let Some(v) = verdict {
        eprintln!("  {:<width$}  {}", "verdict", verdict_label(v));
    }
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

fn generate(args: GenerateArgs) -> anyhow::Result<u8> {
    let window_for = |dim: usize, default: f64| -> anyhow::Result<Cuboid> {
        Ok(match &args.window {
            Some(w) => Cuboid::cube(dim, w[0], w[1])?,
            None => Cuboid::centered(dim, default)?,
        })
    };
    let ps = if let Some(dim) = args.lattice {
        let g = if args.scale == 1.0 {
            Generator::integer_lattice(dim)
        } else {
            Generator::Scale { factor: args.scale, inner: Box::new(Generator::integer_lattice(dim)) }
        };
        PointSet::from_generator(g, window_for(dim, 10.0)?)?
    } else if args.fibonacci {
        PointSet::from_generator(Generator::fibonacci(), window_for(1, 50.0)?)?
    } else {
        match args.example {
            Some(Example::Zpz) => {
                let m = cases::zpz_measure(args.n)?;
                table("zpz measure", &[("atoms", m.len().to_string()), ("N", args.n.to_string())], None);
                emit(&m, args.out.as_deref())?;
                return Ok(0);
            }
            Some(Example::Union2d) => PointSet::from_generator(cases::union2d_generator(), window_for(2, 16.0)?)?,
            Some(Example::Fibonacci) => PointSet::from_generator(Generator::fibonacci(), window_for(1, 50.0)?)?,
            None => bail!("choose one of --lattice, --fibonacci, --example"),
        }
    };
    table("point set", &[("dim", ps.dim().to_string()), ("points", ps.len().to_string())], None);
    emit(&ps, args.out.as_deref())?;
    if let Some(p) = &args.csv {
        fs::write(p, points_csv(&ps))?;
    }
    Ok(0)
}

fn diffract(args: DiffractArgs) -> anyhow::Result<u8> {
    let input = Input::load(&args.input.input)?;
    let omega = input.measure();
    let dim = omega.dim();
    let family = parse_family(&args.family, dim, &input.window()?)?;
    let dual = Cuboid::centered(dim, args.dual_window)?;
    let opts = CandidateOptions { grid_res: args.grid, floor: args.floor, ..Default::default() };
    let cands = candidate_frequencies(&omega, &input.generator(), &family, &dual, &opts)?;
    let est = estimate_diffraction(&omega, &cands, &family, &dual)?;
    fs::write(&args.out, peaks_csv(&est, args.eps_atom)).with_context(|| format!("writing {}", args.out.display()))?;
    let Some(a) = args.a else {
        table(
            "diffraction",
            &[("candidates", est.peaks.len().to_string()), ("γ̂({0})", format!("{:.6}", est.gamma0()))],
            None,
        );
        return Ok(0);
    };
    let windows: Vec<Cuboid> =
        [0.25, 0.5, 1.0].iter().map(|f| Cuboid::centered(dim, f * args.dual_window)).collect::<Result<_, _>>()?;
    let t1opts = Theorem1Options { candidates: opts, ..Default::default() };
    let k_box = Cuboid::cube(dim, 0.0, 1.0)?;
    let r = theorem1_check(&omega, &input.generator(), a, &family, &windows, &k_box, &t1opts)?;
    table(
        "visible Bragg set",
        &[
            ("a", a.to_string()),
            ("γ̂({0})", format!("{:.6}", r.gamma0)),
            ("threshold", format!("{:.6}", r.threshold)),
            ("hypothesis", format!("{:?}", r.hypothesis)),
            ("|I(a)|", r.visible_count.to_string()),
            ("covering trend", format!("{:?}", r.meyer.covering_trend)),
            ("count trend", format!("{:?}", r.meyer.count_trend)),
        ],
        Some(r.verdict),
    );
    emit(&r, args.report.as_deref())?;
    Ok(code(r.verdict))
}

fn autocorr(args: AutocorrArgs) -> anyhow::Result<u8> {
    let omega = Input::load(&args.input.input)?.measure();
    let gamma = autocorrelation(&omega, &Cuboid::centered(omega.dim(), args.half)?)?;
    table("autocorrelation", &[("atoms", gamma.len().to_string())], None);
    emit(&gamma, args.out.as_deref())?;
    Ok(0)
}

fn meyer(args: MeyerArgs) -> anyhow::Result<u8> {
    let ps = Input::load(&args.input.input)?.set()?;
    let dim = ps.dim();
    // recentre at the origin: Λ − Λ and covering radii do not see translations
    let centre = ps.window().center();
    let ps = compose(&Compose::Translate(Point::zero(dim) - centre), &[&ps])?;
    let w = ps.window();
    let halves = if args.scales.is_empty() {
        let h = (0..dim).map(|i| w.side(i) / 2.0).fold(f64::INFINITY, f64::min);
        vec![h / 4.0, h / 2.0, h]
    } else {
        args.scales.clone()
    };
    let scales: Vec<Cuboid> =
        halves.iter().map(|&h| Cuboid::centered(dim, h)).collect::<Result<_, _>>()?;
    let k_box = Cuboid::cube(dim, 0.0, args.k_side)?;
    let r = meyer_check(|w| ps.on_window(w), &scales, &k_box, &MeyerOptions::default())?;
    let radii: Vec<String> = r.scales.iter().map(|s| format!("{:.4}", s.covering_radius)).collect();
    let counts: Vec<String> = r.scales.iter().map(|s| s.diff_set_count.to_string()).collect();
    table(
        "Meyer check",
        &[("covering radii", radii.join(", ")), ("difference counts", counts.join(", "))],
        Some(r.verdict),
    );
    emit(&r, args.out.as_deref())?;
    Ok(code(r.verdict))
}

fn krein(args: KreinArgs, seed: u64) -> anyhow::Result<u8> {
    let input = Input::load(&args.input.input)?;
    let mu = input.measure();
    let region = Cuboid::centered(mu.dim(), centred_half(&input.window()?)? / 2.0)?;
    let mut sampler = PairSampler::new(region, seed);
    sampler.count = args.pairs;
    let r = krein_check(&mu, &sampler, args.tol)?;
    table(
        "Krein inequality",
        &[
            ("pairs", r.pairs_tested.to_string()),
            ("status", format!("{:?}", r.status)),
            ("max violation", format!("{:e}", r.max_violation)),
            ("allowed", format!("{:e}", r.allowed)),
        ],
        Some(r.verdict),
    );
    emit(&r, args.out.as_deref())?;
    Ok(code(r.verdict))
}

fn sparse(args: SparseArgs) -> anyhow::Result<u8> {
    let mu = Input::load(&args.input.input)?.measure();
    let k_box = Cuboid::cube(mu.dim(), 0.0, args.k_side)?;
    let r = sparseness_verify(&mu, args.a, &k_box)?;
    table(
        "sparseness",
        &[
            ("a", r.a.to_string()),
            ("μ({0})", r.mu0.to_string()),
            ("threshold", format!("{:.6}", r.threshold)),
            ("hypothesis met", r.hypothesis_met.to_string()),
            ("b", format!("{:.6}", r.b)),
            ("|I|", r.i_set.len().to_string()),
            ("max count", r.measured_max_count.to_string()),
            ("bound C/b", r.count_bound.map_or("none".into(), |c| format!("{c:.4}"))),
        ],
        Some(r.verdict),
    );
    emit(&r, args.out.as_deref())?;
    Ok(code(r.verdict))
}

fn rigidity(args: RigidityArgs, seed: u64) -> anyhow::Result<u8> {
    let ps = Input::load(&args.input.input)?.set()?;
    let r = rigidity_check(&ps, seed, args.candidates)?;
    let mut rows = vec![
        ("subgroup", r.subgroup.is_subgroup.to_string()),
        ("Gram", format!("{:?}", r.gram.verdict)),
        ("agree", r.agree.to_string()),
    ];
    if r.gram.min_relative_eigenvalue.is_finite() {
        rows.push(("min relative eigenvalue", format!("{:e}", r.gram.min_relative_eigenvalue)));
    }
    if let Some(h) = &r.gram.hermitian_violation {
        rows.push(("Hermitian witness", format!("f({:?}) = {:?}, f(−x) = {:?}", h.x.coords(), h.f_x, h.f_neg_x)));
    }
    if let Some((x, y)) = &r.subgroup.witness {
        rows.push(("difference witness", format!("{:?} − {:?}", x.coords(), y.coords())));
    }
    if let Some(w) = &r.gram.witness {
        let pts: Vec<&[f64]> = w.points.iter().map(|p| p.coords()).collect();
        rows.push(("Gram witness", format!("{pts:?}")));
    }
    table("rigidity", &rows, Some(r.verdict));
    emit(&r, args.out.as_deref())?;
    Ok(code(r.verdict))
}

fn epsdual(args: EpsdualArgs) -> anyhow::Result<u8> {
    let ps = Input::load(&args.input.input)?.set()?;
    if ps.dim() != 1 {
        bail!("ε-dual regions are supported in dimension 1 only");
    }
    let domain = Cuboid::centered(1, args.domain)?;
    if !args.verify {
        let region = eps_dual(&ps, args.eps, &domain, args.spacing)?;
        table(
            "ε-dual region",
            &[
                ("true nodes", region.true_count().to_string()),
                ("components", region.component_count().to_string()),
                ("truncated", region.truncated_count().to_string()),
            ],
            None,
        );
        emit(&region.export()?, args.out.as_deref())?;
        return Ok(0);
    }
    let h = args.domain;
    let scales: Vec<Cuboid> = [h / 4.0, h / 2.0, h].iter().map(|&s| Cuboid::centered(1, s)).collect::<Result<_, _>>()?;
    let k_box = Cuboid::interval(0.0, 1.0)?;
    let meyer_ok = meyer_check(|w| ps.on_window(w), &scales, &k_box, &MeyerOptions::default())
        .map(|r| r.verdict == Verdict::Pass)
        .unwrap_or(false);
    let opts = Theorem2Options {
        grids: DualGrids { dual_domain: domain, dual_spacing: args.spacing, phys_domain: domain, phys_spacing: args.spacing },
        family: VanHoveFamily::new(1, vec![h / 4.0, h / 2.0, h])?,
        check_window: domain,
    };
    let r = theorem2_verify(&ps, args.eps, &opts, meyer_ok)?;
    let min = r.checks.iter().map(|c| c.intensity).fold(f64::INFINITY, f64::min);
    table(
        "ε-dual chain",
        &[
            ("ε", r.eps.to_string()),
            ("|Λ′|", r.lambda_prime.len().to_string()),
            ("|Γ|", r.gamma.len().to_string()),
            ("γ̂_Γ(0)", format!("{:.6}", r.gamma0.intensity)),
            ("min γ̂_Γ(y)", format!("{min:.6}")),
            ("points checked", r.checks.len().to_string()),
            ("Meyer checked", meyer_ok.to_string()),
        ],
        Some(r.verdict),
    );
    emit(&r, args.out.as_deref())?;
    Ok(code(r.verdict))
}

fn reproduce(args: ReproduceArgs, seed: u64) -> anyhow::Result<u8> {
    let bundle = cases::reproduce(args.case, seed)?;
    bundle.write_to(&args.out)?;
    let rows: Vec<(&str, String)> = bundle
        .expectations
        .iter()
        .map(|e| (e.claim.as_str(), format!("{} ({})", if e.ok { "ok" } else { "MISMATCH" }, e.observed)))
        .collect();
    let verdict = if bundle.all_ok() { Verdict::Pass } else { Verdict::Fail };
    table(&format!("reproduce {}", args.case), &rows, Some(verdict));
    Ok(code(verdict))
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("BRAGG_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("BRAGG_THREADS={v} is not a thread count"))?;
        if n == 0 {
            bail!("BRAGG_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    init_threads()?;
    match cli.cmd {
        Cmd::Generate(a) => generate(a),
        Cmd::Diffract(a) => diffract(a),
        Cmd::Autocorr(a) => autocorr(a),
        Cmd::Meyer(a) => meyer(a),
        Cmd::Krein(a) => krein(a, cli.seed),
        Cmd::Sparse(a) => sparse(a),
        Cmd::Rigidity(a) => rigidity(a, cli.seed),
        Cmd::Epsdual(a) => epsdual(a),
        Cmd::Reproduce(a) => reproduce(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
