use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use conewalk::delaunay::io::{format_sites, read_sites};
use conewalk::experiment::{run_walks, run_walks_serial, summarize, Instance};
use conewalk::export::export;
use conewalk::geom::theory_constants;
use conewalk::path::{competitive_bound, competitive_path, path_audit, simple_path, DEFAULT_LAMBDA};
use conewalk::walk::{check_step_lemmata, oracle_walk, OracleStep, TraceDocument};
use conewalk::{
    cone_walk, sample_sites, Baseline, ExperimentConfig, PathKinds, Point2, SamplingMode, SiteSet, StatsTable,
    Triangulation,
};

#[derive(Parser)]
#[command(name = "conewalk", version, about = "Cone walks on random Delaunay triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form constants of the step laws.
    Constants,
    /// Write a random site file.
    Generate {
        #[command(flatten)]
        sites: SiteArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one walk and print its trace.
    Walk(WalkArgs),
    /// Run a batch of walks and export statistics.
    Bench(BenchArgs),
    /// Check the walk against the full-scan oracle and the step lemmata.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct SiteArgs {
    /// Domain area, also the expected number of sites.
    #[arg(long, default_value_t = 10_000.0)]
    n: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::FixedN)]
    mode: Mode,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Poisson,
    #[value(name = "fixed_n")]
    FixedN,
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Poisson => SamplingMode::Poisson,
            Mode::FixedN => SamplingMode::FixedN,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Cone,
    Straight,
    Greedy,
    Compass,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Simple,
    Competitive,
    None,
}

fn path_kinds(p: &[PathArg]) -> PathKinds {
    PathKinds {
        simple: p.contains(&PathArg::Simple),
        competitive: p.contains(&PathArg::Competitive),
    }
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    sites: SiteArgs,
    /// Read sites from this file instead of sampling them.
    #[arg(long)]
    sites_file: Option<PathBuf>,
    /// Start site index; defaults to the site nearest the centroid.
    #[arg(long)]
    start: Option<usize>,
    /// Aim as `x,y`; defaults to the site farthest from the start, pulled
    /// slightly toward the start.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    aim: Option<Point2>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "none")]
    paths: Vec<PathArg>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    sites: SiteArgs,
    #[arg(long, default_value_t = 1000)]
    walks: usize,
    /// Algorithms to run; the cone walk always runs.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cone")]
    algos: Vec<Algo>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "simple,competitive")]
    paths: Vec<PathArg>,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    /// Steps closer than this to the domain boundary or to the aim are left
    /// out of the statistics. Defaults to 2 sqrt(ln n).
    #[arg(long)]
    boundary_guard: Option<f64>,
    /// Draw aims from the start region too.
    #[arg(long)]
    restrict_aim: bool,
    /// Boundary samples per disc for the lemma checks.
    #[arg(long, default_value_t = 0)]
    lemma_samples: usize,
    #[arg(long, default_value_t = 0.25)]
    start_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Run walks on one thread even when built with rayon.
    #[arg(long)]
    serial: bool,
    /// Skip the per-walk and sample files.
    #[arg(long)]
    stats_only: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 10)]
    min_n: usize,
    #[arg(long, default_value_t = 200)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    lemma_samples: usize,
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{x}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{y}: {e}"))?;
    Point2::try_new(x, y).map_err(|e| e.to_string())
}

fn sample_config(s: &SiteArgs) -> ExperimentConfig {
    ExperimentConfig {
        n: s.n,
        seed: s.seed,
        mode: s.mode.into(),
        ..Default::default()
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn constants() -> Result<()> {
    let c = theory_constants();
    println!("cone_area_a {}", c.cone_area_a);
    println!("expected_radius {}", c.expected_radius);
    println!("expected_intermediates {}", c.expected_intermediates);
    println!("path_length_const {}", c.path_length_const);
    println!("competitiveness_bound {}", c.competitiveness_bound);
    println!("competitive_bound_lambda_1.998 {}", competitive_bound(DEFAULT_LAMBDA));
    println!("mean_progress {}", c.mean_progress);
    Ok(())
}

fn walk(a: &WalkArgs) -> Result<()> {
    let sites = match &a.sites_file {
        Some(p) => SiteSet::from_points(read_sites(p)?)?,
        None => sample_sites(&sample_config(&a.sites))?,
    };
    let t = Triangulation::build(sites)?;
    let pts = t.points();
    let centroid = pts.iter().fold(Point2::default(), |s, &p| s + p * (1.0 / pts.len() as f64));
    let nearest = |c: Point2| (0..pts.len()).min_by(|&i, &j| pts[i].dist2(c).total_cmp(&pts[j].dist2(c)));
    let z = match a.start {
        Some(z) => z,
        None => nearest(centroid).context("no sites")?,
    };
    let pz = t.point(t.check_index(z)?);
    let q = match a.aim {
        Some(q) => q,
        None => {
            let far = (0..pts.len())
                .max_by(|&i, &j| pts[i].dist2(pz).total_cmp(&pts[j].dist2(pz)))
                .context("no sites")?;
            pts[far] * 0.95 + pz * 0.05
        }
    };
    let trace = cone_walk(&t, z, q)?;
    let mut text = TraceDocument::from(&trace).to_string();
    let kinds = path_kinds(&a.paths);
    if kinds.simple {
        text.push_str("# simple path\n");
        text.push_str(&simple_path(&t, &trace)?.to_string());
    }
    if kinds.competitive {
        text.push_str("# competitive path\n");
        text.push_str(&competitive_path(&t, &trace, DEFAULT_LAMBDA)?.to_string());
    }
    emit(a.out.as_ref(), &text)
}

fn print_table(t: &StatsTable) {
    println!("sites {}  walks {}  seed {}  guard {:.4}", t.sites, t.walks, t.seed, t.guard);
    for (name, value, theory) in t.rows() {
        match theory {
            Some(th) => println!("{name:<30} {value:>14.6}   theory {th:.6}"),
            None => println!("{name:<30} {value:>14.6}"),
        }
    }
}

fn bench(a: &BenchArgs) -> Result<()> {
    let baselines = a
        .algos
        .iter()
        .filter_map(|x| match x {
            Algo::Cone => None,
            Algo::Straight => Some(Baseline::Straight),
            Algo::Greedy => Some(Baseline::Greedy),
            Algo::Compass => Some(Baseline::Compass),
        })
        .collect();
    let cfg = ExperimentConfig {
        walks: a.walks,
        start_region_fraction: a.start_fraction,
        baselines,
        paths: path_kinds(&a.paths),
        boundary_guard: a.boundary_guard,
        restrict_aim: a.restrict_aim,
        lemma_samples: a.lemma_samples,
        lambda: a.lambda,
        ..sample_config(&a.sites)
    };
    let inst = Instance::prepare(&cfg)?;
    let walks = if a.serial { run_walks_serial(&inst)? } else { run_walks(&inst)? };
    let table = summarize(&inst, &walks);
    print_table(&table);
    let files = export(&a.out_dir, &table, if a.stats_only { &[] } else { &walks })?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

/// Returns the number of failed instances.
fn validate(a: &ValidateArgs) -> Result<usize> {
    if a.min_n < 3 || a.max_n < a.min_n {
        bail!("need 3 <= min-n <= max-n");
    }
    let mut failures = 0;
    for k in 0..a.instances {
        let n = a.min_n + (k * 7919) % (a.max_n - a.min_n + 1);
        let cfg = ExperimentConfig {
            n: n.max(10) as f64,
            walks: 1,
            seed: a.seed.wrapping_add(k as u64),
            ..Default::default()
        };
        let mut sites = sample_sites(&cfg)?.points().to_vec();
        sites.truncate(n);
        let t = Triangulation::build(SiteSet::from_points(sites)?)?;
        let inst = Instance::from_triangulation(
            &ExperimentConfig {
                start_region_fraction: 1.0,
                n: (t.len() as f64).max(10.0),
                ..cfg
            },
            t,
        )?;
        let t = &inst.triangulation;
        let (z, q) = inst.endpoints(0)?;
        let trace = cone_walk(t, z as usize, q)?;
        let mut problems = Vec::new();
        if !t.validate() {
            problems.push("triangulation is not Delaunay".to_string());
        }
        let oracle = oracle_walk(t, z, q)?;
        let stoppers: Vec<u32> = oracle
            .iter()
            .filter_map(|s| match s {
                OracleStep::Stopper { stopper, .. } => Some(*stopper),
                OracleStep::Terminal { .. } => None,
            })
            .collect();
        if stoppers != trace.stoppers()[1..] {
            problems.push(format!("stoppers {:?} vs oracle {:?}", &trace.stoppers()[1..], stoppers));
        }
        for v in check_step_lemmata(t, &trace, a.lemma_samples) {
            problems.push(v.to_string());
        }
        if !t.neighbors_of_query(q)?.contains(&trace.terminal) {
            problems.push(format!("terminal {} is not a neighbour of the aim", trace.terminal));
        }
        let p = competitive_path(t, &trace, DEFAULT_LAMBDA)?;
        if !path_audit(t, &p, &trace, Some(competitive_bound(DEFAULT_LAMBDA))).passed() {
            problems.push("competitive path audit failed".into());
        }
        if !problems.is_empty() {
            failures += 1;
            eprintln!("instance {k} (n = {n}): {}", problems.join("; "));
        }
    }
    println!("{} instances, {} failed", a.instances, failures);
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Constants => constants(),
        Command::Generate { sites, out } => sample_sites(&sample_config(sites))
            .map_err(Into::into)
            .and_then(|s| emit(out.as_ref(), &format_sites(s.points()))),
        Command::Walk(a) => walk(a),
        Command::Bench(a) => bench(a),
        Command::Validate(a) => match validate(a) {
            Ok(0) => Ok(()),
            Ok(_) => return ExitCode::from(2),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
