use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hutchinf::cantor;
use hutchinf::config::{ExperimentConfig, SystemSpec, SCHEMA_VERSION};
use hutchinf::engine::{self, default_seed, AttractorOptions};
use hutchinf::io::{self, Viewport};
use hutchinf::metric::{hausdorff, FiniteSet, TailSeq};
use hutchinf::systems;
use hutchinf::verify;
use hutchinf::{Error, Result};

#[derive(Parser)]
#[command(name = "hutchinf", version, about = "Attractors of infinite-order iterated function systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the k-th generalized iterate to a binary PPM.
    Render(RunArgs),
    /// Tabulate iterate step distances against the analytic bound (CSV).
    Converge(RunArgs),
    /// Approximate the attractor to a tolerance and write its points (CSV).
    Attractor(RunArgs),
    /// Run invariant suites and print a JSON report.
    Verify {
        /// metrics, hausdorff, shifts, tiles, conjugacy, cantor or all
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the planar Cantor construction and its certificate.
    Cantor(CantorArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in system: ex5 (planar), sup-pair, sup-single, sup-interval, cantor
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    prune: Option<f64>,
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Allow systems that only satisfy the weaker contraction condition.
    #[arg(long)]
    allow_s2: bool,
}

#[derive(Args)]
struct CantorArgs {
    #[arg(long = "K", default_value_t = 0.5)]
    k: f64,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Comma-separated nondecreasing positive integers.
    #[arg(long, value_delimiter = ',', conflicts_with = "auto_ms")]
    ms: Option<Vec<u32>>,
    /// Use the least greedy sequence valid up to this k.
    #[arg(long)]
    auto_ms: Option<usize>,
    /// Depth of the rendered square family.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    /// Output directory.
    #[arg(long, default_value = "cantor-out")]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig {
                schema: SCHEMA_VERSION,
                system: SystemSpec::Builtin(self.system.clone().unwrap_or_else(|| "ex5".into())),
                metric: None,
                run: Default::default(),
                output: Default::default(),
            },
        };
        if self.config.is_some() {
            if let Some(s) = &self.system {
                cfg.system = SystemSpec::Builtin(s.clone());
            }
        }
        let r = &mut cfg.run;
        r.depth = self.depth.unwrap_or(r.depth);
        r.prune_eps = self.prune.unwrap_or(r.prune_eps);
        r.prefix = self.prefix.unwrap_or(r.prefix);
        r.tol = self.tol.unwrap_or(r.tol);
        r.seed = self.seed.unwrap_or(r.seed);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_path(flag: &Option<PathBuf>, cfg: Option<&PathBuf>, fallback: &str) -> PathBuf {
    flag.clone().or_else(|| cfg.cloned()).unwrap_or_else(|| PathBuf::from(fallback))
}

fn cmd_render(a: &RunArgs) -> Result<bool> {
    let cfg = a.config()?;
    let sys = cfg.build_system()?;
    let seed = TailSeq::constant(FiniteSet::singleton(&default_seed(&sys)));
    let it = engine::gen_iterate_sets(&sys, &seed, cfg.run.depth, cfg.run.prune_eps, cfg.run.prefix)?;
    let vp = cfg.output.viewport.clone().unwrap_or_else(|| Viewport::unit(512));
    let raster = io::rasterize_points(it.sets.last().expect("depth >= 1"), &vp)?;
    let path = out_path(&a.out, cfg.output.image.as_ref(), "render.ppm");
    io::write_atomic(&path, &raster.to_ppm())?;
    eprintln!("wrote {} ({} set pixels)", path.display(), raster.count());
    Ok(true)
}

#[derive(Serialize)]
struct WeakRow {
    k: usize,
    size: usize,
    step: Option<f64>,
    /// Distance to the known attractor, when one is known.
    to_attractor: Option<f64>,
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(&p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_converge(a: &RunArgs) -> Result<bool> {
    let cfg = a.config()?;
    let sys = cfg.build_system()?;
    let path = a.out.clone().or_else(|| cfg.output.table.clone());
    if sys.is_strongly_contractive() {
        let rows = engine::convergence_table(&sys, cfg.run.depth, cfg.run.prune_eps, cfg.run.prefix)?;
        emit(&io::csv_string(&rows)?, path)?;
        return Ok(rows.iter().all(|r| r.within));
    }
    if !a.allow_s2 {
        return Err(Error::NotContractive(format!(
            "system satisfies only {:?}; pass --allow-s2 to tabulate anyway",
            sys.classify()
        )));
    }
    let known = match &cfg.system {
        SystemSpec::Builtin(n) if n == "sup-pair" => Some(systems::sup_pair_attractor(64)?),
        SystemSpec::Builtin(n) if n == "sup-single" => Some(FiniteSet::from_values(&[0.0])?),
        _ => None,
    };
    // without the strong condition the iterates start from the whole space
    let start = sys.domain.clone().unwrap_or_else(|| FiniteSet::singleton(&default_seed(&sys)));
    let it = engine::gen_iterate_sets(&sys, &TailSeq::constant(start), cfg.run.depth, cfg.run.prune_eps, cfg.run.prefix)?;
    let mut rows = Vec::new();
    for (j, s) in it.sets.iter().enumerate() {
        let step = if j == 0 { None } else { Some(hausdorff(s, &it.sets[j - 1], sys.metric)?) };
        let to_attractor = known.as_ref().map(|k| hausdorff(s, k, sys.metric)).transpose()?;
        rows.push(WeakRow { k: j + 1, size: s.len(), step, to_attractor });
    }
    emit(&io::csv_string(&rows)?, path)?;
    Ok(true)
}

#[derive(Serialize)]
struct AttractorSummary {
    points: usize,
    err: f64,
    bound: f64,
    slack: f64,
    iterations: usize,
    prune_eps: f64,
    invariance_residual: f64,
}

fn cmd_attractor(a: &RunArgs) -> Result<bool> {
    let cfg = a.config()?;
    let sys = cfg.build_system()?;
    let opts = AttractorOptions { prune_eps: a.prune.or(Some(cfg.run.prune_eps)), prefix: cfg.run.prefix, ..Default::default() };
    let approx = engine::attractor_with(&sys, cfg.run.tol, &opts)?;
    let path = out_path(&a.out, cfg.output.table.as_ref(), "attractor.csv");
    io::write_atomic(&path, io::points_csv(&approx.cloud)?.as_bytes())?;
    let summary = AttractorSummary {
        points: approx.cloud.len(),
        err: approx.err,
        bound: approx.bound,
        slack: approx.slack,
        iterations: approx.iterations,
        prune_eps: approx.prune_eps,
        invariance_residual: engine::invariance_residual(&sys, &approx)?,
    };
    let json = serde_json::to_string_pretty(&summary).expect("serializable");
    if let Some(p) = &cfg.output.report {
        io::write_atomic(p, json.as_bytes())?;
    }
    println!("{json}");
    Ok(true)
}

fn cmd_verify(suite: &str, out: &Option<PathBuf>) -> Result<bool> {
    let reports = verify::run(suite)?;
    let passed = reports.iter().all(|r| r.passed);
    let json = serde_json::to_string_pretty(&serde_json::json!({ "passed": passed, "reports": reports }))
        .expect("serializable");
    match out {
        Some(p) => io::write_atomic(p, json.as_bytes())?,
        None => println!("{json}"),
    }
    Ok(passed)
}

#[derive(Serialize)]
struct SquareRow {
    address: String,
    x: f64,
    y: f64,
    side: f64,
}

#[derive(Serialize)]
struct CantorReport {
    #[serde(rename = "K")]
    k: f64,
    q: f64,
    ms: Vec<u32>,
    /// Growth inequality for k = 1..=ms.len()-1.
    growth: Vec<bool>,
    /// Certificates checked for 1 <= m <= k <= k_max.
    k_max: usize,
    certificates: Vec<cantor::MeasureCertificate>,
    failing_k: Vec<usize>,
    ok: bool,
}

fn cmd_cantor(a: &CantorArgs) -> Result<bool> {
    let ms = match (&a.ms, a.auto_ms) {
        (Some(ms), _) => ms.clone(),
        (None, Some(k)) => cantor::minimal_growth_sequence(k),
        (None, None) => return Err(Error::InvalidParams("pass --ms or --auto-ms".into())),
    };
    let params = cantor::derive_params(a.k, a.q, &ms)?;
    let k_max = ms.len() - 1;
    let growth = if k_max >= 1 { cantor::check_growth(&ms, k_max)? } else { Vec::new() };
    let mut certificates = Vec::new();
    let mut failing_k = Vec::new();
    for k in 1..=k_max {
        let mut all = growth[k - 1];
        for m in 1..=k {
            let c = cantor::measure_certificate(&ms, m, k)?;
            all &= c.ok;
            certificates.push(c);
        }
        if !all {
            failing_k.push(k);
        }
    }
    let ok = failing_k.is_empty() && k_max >= 1;
    let report = CantorReport { k: a.k, q: a.q, ms: ms.clone(), growth, k_max, certificates, failing_k, ok };

    let squares = params.squares(a.depth.min(params.max_level()))?;
    let rows: Vec<SquareRow> = squares
        .iter()
        .map(|(code, s)| SquareRow {
            address: code.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("."),
            x: s.origin.0,
            y: s.origin.1,
            side: s.side,
        })
        .collect();
    let out = Path::new(&a.out);
    io::write_atomic(&out.join("squares.csv"), io::csv_string(&rows)?.as_bytes())?;
    let sq: Vec<_> = squares.into_iter().map(|s| s.1).collect();
    let raster = io::rasterize_squares(&sq, &Viewport::unit(a.resolution))?;
    io::write_atomic(&out.join("squares.ppm"), &raster.to_ppm())?;
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    io::write_atomic(&out.join("certificate.json"), json.as_bytes())?;
    println!("{json}");
    Ok(ok)
}

fn init_threads() {
    if let Some(n) = std::env::var("HUTCHINF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // fails only if a pool already exists, which cannot happen this early
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Command::Render(a) => cmd_render(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Attractor(a) => cmd_attractor(a),
        Command::Verify { suite, out } => cmd_verify(suite, out),
        Command::Cantor(a) => cmd_cantor(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
