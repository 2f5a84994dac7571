use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Arg, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};

use qcbp_core::bench::{
    exact_reference_coloring, generate_dataset, load_dataset, parse_pricing, parse_records,
    pricing_to_csv, records_to_csv, run_benchmark, summarize, timing_to_csv, DatasetSpec, Mode,
    PricingRecord, RunConfig,
};
use qcbp_core::bnp::{solve_qcbp, SolveResult, SolveStats};
use qcbp_core::graph::read_dimacs;
use qcbp_core::pricing::PricingLogRow;

#[derive(Parser)]
#[command(
    name = "qcbp",
    version,
    about = "Branch-and-price graph coloring with an emulated Rydberg pricer"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a benchmark dataset.
    Gen(GenArgs),
    /// Solve one DIMACS instance.
    Solve(SolveArgs),
    /// Solve every instance of a dataset.
    Bench(BenchArgs),
    /// Summarize benchmark CSVs.
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 10)]
    per_n: usize,
    #[arg(long, default_value_t = 0.55)]
    ud_fraction: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Unit-disk radius, um.
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    #[arg(long, default_value_t = 8.5)]
    side_factor: f64,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// DIMACS graph file.
    graph: PathBuf,
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the coloring as `vertex,color` CSV.
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Write the pricing log CSV.
    #[arg(long)]
    pricing_log: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Dataset directory written by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Output directory for bench.csv, timing.csv, pricing.csv and summary.txt.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Benchmark CSV.
    records: PathBuf,
    /// Pricing log CSV from the same run.
    #[arg(long)]
    pricing: Option<PathBuf>,
}

/// One optional flag per config key, in `--kebab-case`.
#[derive(Default)]
struct Overrides(Vec<(String, String)>);

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

impl FromArgMatches for Overrides {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let mut out = Overrides::default();
        for key in RunConfig::KEYS {
            if let Some(v) = m.get_one::<String>(key) {
                out.0.push((key.to_string(), v.clone()));
            }
        }
        Ok(out)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        *self = Self::from_arg_matches(m)?;
        Ok(())
    }
}

impl Args for Overrides {
    fn augment_args(mut cmd: Command) -> Command {
        for key in RunConfig::KEYS {
            cmd = cmd.arg(
                Arg::new(*key)
                    .long(&*Box::leak(flag(key).into_boxed_str()))
                    .value_name("VALUE")
                    .help_heading("Solver settings"),
            );
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

fn load_config(file: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_text(&text)
            .with_context(|| format!("in {}", path.display()))?;
    }
    for (k, v) in &overrides.0 {
        cfg.set(k, v).with_context(|| format!("--{}", flag(k)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn gen(a: GenArgs) -> Result<()> {
    if a.n_min > a.n_max {
        bail!("--n-min {} exceeds --n-max {}", a.n_min, a.n_max);
    }
    let spec = DatasetSpec {
        counts: (a.n_min..=a.n_max).map(|n| (n, a.per_n)).collect(),
        ud_fraction: a.ud_fraction,
        seed: a.seed,
        radius: a.radius,
        side_factor: a.side_factor,
    };
    let inst = generate_dataset(&a.out, &spec)?;
    let ud = inst.iter().filter(|i| i.is_ud).count();
    eprintln!(
        "wrote {} instances ({ud} unit-disk) to {}",
        inst.len(),
        a.out.display()
    );
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref(), &a.overrides)?;
    let file =
        fs::File::open(&a.graph).with_context(|| format!("opening {}", a.graph.display()))?;
    let g = read_dimacs(BufReader::new(file))?;
    let mut solve = cfg.solve.clone();
    let r: SolveResult = match cfg.mode {
        Mode::Exact => {
            let c = exact_reference_coloring(&g)?;
            SolveResult {
                chi_hat: c.colors_used(),
                proven_optimal: true,
                coloring: c,
                stats: SolveStats::default(),
            }
        }
        mode => {
            solve.root_only = mode == Mode::HcgOnly;
            solve_qcbp(&g, &solve)?
        }
    };
    println!("{}", SolveStats::HEADER);
    println!("{}", r.stats_csv());
    if let Some(path) = a.coloring {
        let mut s = String::from("vertex,color\n");
        for (v, c) in r.coloring.color_of(g.n()).into_iter().enumerate() {
            s.push_str(&format!(
                "{v},{}\n",
                c.expect("coloring covers every vertex")
            ));
        }
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = a.pricing_log {
        let mut s = format!("node,{}\n", PricingLogRow::HEADER);
        for (node, row) in &r.stats.pricing_log {
            s.push_str(&format!("{node},{}\n", row.to_csv()));
        }
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref(), &a.overrides)?;
    let data =
        load_dataset(&a.data).with_context(|| format!("loading dataset {}", a.data.display()))?;
    if data.is_empty() {
        bail!("dataset {} has no instances", a.data.display());
    }
    let out = run_benchmark(&cfg, &data)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("bench.csv"), records_to_csv(&out.records))?;
    fs::write(a.out.join("timing.csv"), timing_to_csv(&out.records))?;
    fs::write(a.out.join("pricing.csv"), pricing_to_csv(&out.pricing))?;
    let summary = summarize(&out.records, &out.pricing);
    fs::write(a.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&a.records)
        .with_context(|| format!("reading {}", a.records.display()))?;
    let records = parse_records(&text)?;
    let pricing: Vec<PricingRecord> = match &a.pricing {
        Some(p) => parse_pricing(
            &fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => Vec::new(),
    };
    print!("{}", summarize(&records, &pricing));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Solve(a) => solve(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Report(a) => report(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
