//! Datasets, the exact reference oracle, benchmark runs and summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bnp::{solve_qcbp, Coloring, SolveConfig, SolveResult};
use crate::emulator::RabiConvention;
use crate::error::{Error, Result};
use crate::graph::{
    perturb, random_ud_graph, read_dimacs, read_positions, write_positions, Graph, Point, VertexSet,
};
use crate::pricing::PricingLogRow;

/// Largest graph the reference oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 20;

/// Exact chromatic number by DSATUR-ordered backtracking.
pub fn exact_reference_chromatic(g: &Graph) -> Result<usize> {
    Ok(exact_reference_coloring(g)?.colors_used())
}

/// An optimal coloring, found by DSATUR-ordered backtracking seeded with
/// a greedy upper bound and a greedy clique lower bound.
pub fn exact_reference_coloring(g: &Graph) -> Result<Coloring> {
    let n = g.n();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::VertexCount(n));
    }
    let lb = greedy_clique(g).len();
    let mut best = dsatur_greedy(g);
    if best.len() > lb {
        let mut colors = vec![usize::MAX; n];
        let mut classes: Vec<VertexSet> = Vec::new();
        backtrack(g, &mut colors, &mut classes, &mut best, lb);
    }
    Ok(Coloring { classes: best })
}

fn greedy_clique(g: &Graph) -> VertexSet {
    let mut best = VertexSet::EMPTY;
    for start in 0..g.n() {
        let mut clique = VertexSet::singleton(start);
        let mut cand = g.neighbors(start);
        while let Some(v) = cand.iter().max_by(|&a, &b| {
            g.neighbors(a)
                .intersection(cand)
                .len()
                .cmp(&g.neighbors(b).intersection(cand).len())
                .then(b.cmp(&a))
        }) {
            clique.insert(v);
            cand = cand.intersection(g.neighbors(v));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Vertex with the most distinct neighbour colors, then highest degree
/// among uncolored, then lowest index.
fn dsatur_pick(g: &Graph, colors: &[usize], classes: &[VertexSet]) -> Option<usize> {
    let uncolored: VertexSet = (0..g.n()).filter(|&v| colors[v] == usize::MAX).collect();
    uncolored.iter().max_by(|&a, &b| {
        let sat = |v: usize| {
            classes
                .iter()
                .filter(|c| !c.is_disjoint(g.neighbors(v)))
                .count()
        };
        let deg = |v: usize| g.neighbors(v).intersection(uncolored).len();
        sat(a)
            .cmp(&sat(b))
            .then(deg(a).cmp(&deg(b)))
            .then(b.cmp(&a))
    })
}

fn dsatur_greedy(g: &Graph) -> Vec<VertexSet> {
    let mut colors = vec![usize::MAX; g.n()];
    let mut classes: Vec<VertexSet> = Vec::new();
    while let Some(v) = dsatur_pick(g, &colors, &classes) {
        let k = classes
            .iter()
            .position(|c| c.is_disjoint(g.neighbors(v)))
            .unwrap_or_else(|| {
                classes.push(VertexSet::EMPTY);
                classes.len() - 1
            });
        classes[k].insert(v);
        colors[v] = k;
    }
    classes
}

fn backtrack(
    g: &Graph,
    colors: &mut Vec<usize>,
    classes: &mut Vec<VertexSet>,
    best: &mut Vec<VertexSet>,
    lb: usize,
) {
    if best.len() <= lb {
        return;
    }
    let Some(v) = dsatur_pick(g, colors, classes) else {
        if classes.len() < best.len() {
            *best = classes.clone();
        }
        return;
    };
    for k in 0..classes.len() {
        if classes[k].is_disjoint(g.neighbors(v)) {
            classes[k].insert(v);
            colors[v] = k;
            backtrack(g, colors, classes, best, lb);
            classes[k].remove(v);
            colors[v] = usize::MAX;
        }
    }
    if classes.len() + 1 < best.len() {
        classes.push(VertexSet::singleton(v));
        colors[v] = classes.len() - 1;
        backtrack(g, colors, classes, best, lb);
        classes.pop();
        colors[v] = usize::MAX;
    }
}

/// How many instances to build per vertex count.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub counts: Vec<(usize, usize)>,
    /// Share of unit-disk instances per `n`; the rest are perturbed.
    pub ud_fraction: f64,
    pub seed: u64,
    /// Unit-disk radius, um.
    pub radius: f64,
    /// Placement box side is `side_factor * sqrt(n)` um.
    pub side_factor: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            counts: (8..=12).map(|n| (n, 10)).collect(),
            ud_fraction: 0.55,
            seed: 1,
            radius: 10.0,
            side_factor: 8.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    pub n: usize,
    pub is_ud: bool,
    pub seed: u64,
    pub graph: Graph,
    pub positions: Vec<Point>,
    /// Vertex pairs toggled away from the unit-disk graph of `positions`.
    pub flipped: Vec<(usize, usize)>,
}

impl Instance {
    /// Rebuilds an instance from its manifest seed.
    pub fn generate(
        id: String,
        n: usize,
        is_ud: bool,
        seed: u64,
        spec: &DatasetSpec,
    ) -> Result<Self> {
        let side = spec.side_factor * (n as f64).sqrt();
        let (ud, positions) = random_ud_graph(n, seed, spec.radius, side)?;
        let (graph, flipped) = if is_ud {
            (ud, Vec::new())
        } else {
            perturb(&ud, seed ^ 0x5EED_F11B)
        };
        Ok(Instance {
            id,
            n,
            is_ud,
            seed,
            graph,
            positions,
            flipped,
        })
    }
}

pub fn build_dataset(spec: &DatasetSpec) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    for &(n, count) in &spec.counts {
        let ud = (count as f64 * spec.ud_fraction).round() as usize;
        for i in 0..count {
            let seed = rng.next_u64();
            out.push(Instance::generate(
                format!("n{n:02}_{i:03}"),
                n,
                i < ud,
                seed,
                spec,
            )?);
        }
    }
    Ok(out)
}

pub const MANIFEST_HEADER: &str = "id,n,is_ud,seed,graph,positions,flipped";

/// Writes `<id>.col`, `<id>.pos.csv` and `manifest.csv` into `dir`.
pub fn write_dataset(dir: &Path, instances: &[Instance]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for inst in instances {
        let col = format!("{}.col", inst.id);
        let pos = format!("{}.pos.csv", inst.id);
        fs::write(dir.join(&col), inst.graph.to_dimacs())?;
        let mut buf = Vec::new();
        write_positions(&mut buf, &inst.positions)?;
        fs::write(dir.join(&pos), buf)?;
        let flipped: Vec<String> = inst
            .flipped
            .iter()
            .map(|(u, v)| format!("{u}-{v}"))
            .collect();
        writeln!(
            manifest,
            "{},{},{},{},{col},{pos},{}",
            inst.id,
            inst.n,
            inst.is_ud,
            inst.seed,
            flipped.join(" ")
        )
        .expect("string write");
    }
    fs::write(dir.join("manifest.csv"), manifest)?;
    Ok(())
}

pub fn generate_dataset(dir: &Path, spec: &DatasetSpec) -> Result<Vec<Instance>> {
    let instances = build_dataset(spec)?;
    write_dataset(dir, &instances)?;
    Ok(instances)
}

/// Reads a dataset written by [`write_dataset`].
pub fn load_dataset(dir: &Path) -> Result<Vec<Instance>> {
    let mut rdr = csv::Reader::from_path(dir.join("manifest.csv")).map_err(csv_err)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let field = |i: usize| {
            row.get(i)
                .ok_or_else(|| Error::Csv(format!("short manifest row {row:?}")))
        };
        let graph = read_dimacs(BufReader::new(fs::File::open(dir.join(field(4)?))?))?;
        let positions = read_positions(BufReader::new(fs::File::open(dir.join(field(5)?))?))?;
        let flipped = field(6)?
            .split_whitespace()
            .map(|p| {
                let (u, v) = p
                    .split_once('-')
                    .ok_or_else(|| Error::Csv(format!("bad pair `{p}`")))?;
                Ok((parse(u)?, parse(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let n: usize = parse(field(1)?)?;
        if graph.n() != n {
            return Err(Error::Csv(format!(
                "{}: manifest says n={n}, file has {}",
                field(0)?,
                graph.n()
            )));
        }
        out.push(Instance {
            id: field(0)?.to_string(),
            n,
            is_ud: parse(field(2)?)?,
            seed: parse(field(3)?)?,
            graph,
            positions,
            flipped,
        });
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn parse<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Csv(format!("cannot parse `{s}`")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Qcbp,
    /// Root column generation and heuristic only.
    HcgOnly,
    /// The reference oracle.
    Exact,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Qcbp => "qcbp",
            Mode::HcgOnly => "hcg_only",
            Mode::Exact => "exact",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qcbp" => Ok(Mode::Qcbp),
            "hcg_only" | "hcg" => Ok(Mode::HcgOnly),
            "exact" => Ok(Mode::Exact),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Solver settings for a run. Every field is reachable by a flat key.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub solve: SolveConfig,
    /// Worker threads for benchmark sweeps; 0 uses rayon's default.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Qcbp,
            solve: SolveConfig::default(),
            workers: 1,
        }
    }
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "mode",
        "sampler",
        "shots",
        "seed",
        "node_budget",
        "max_iterations",
        "complete_branching",
        "extend_to_maximal",
        "workers",
        "duration",
        "rise_fraction",
        "fall_fraction",
        "delta_start",
        "delta_end",
        "omega_max",
        "dt",
        "c6",
        "max_atoms",
        "convention",
        "ud_radius",
        "margin",
        "w_edge",
        "w_non_edge",
        "w_spacing",
        "w_boundary",
        "embed_iterations",
        "embed_step",
        "restarts",
    ];

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.solve;
        let sm = &mut s.sampler;
        let p = &mut sm.emulator.pulse;
        match key {
            "mode" => self.mode = value.parse()?,
            "sampler" => sm.kind = value.parse()?,
            "shots" => {
                sm.shots = parse(value)?;
                sm.emulator.shots = sm.shots;
            }
            "seed" => {
                sm.seed = parse(value)?;
                sm.emulator.seed = sm.seed;
            }
            "node_budget" => s.node_budget = parse(value)?,
            "max_iterations" => s.hcg.max_iterations = parse(value)?,
            "complete_branching" => s.complete_branching = parse(value)?,
            "extend_to_maximal" => sm.extend_to_maximal = parse(value)?,
            "workers" => self.workers = parse(value)?,
            "duration" => p.duration = parse(value)?,
            "rise_fraction" => p.rise_fraction = parse(value)?,
            "fall_fraction" => p.fall_fraction = parse(value)?,
            "delta_start" => p.delta_start = parse(value)?,
            "delta_end" => p.delta_end = parse(value)?,
            "omega_max" => p.omega_max = parse(value)?,
            "dt" => sm.emulator.dt = parse(value)?,
            "c6" => sm.emulator.c6 = parse(value)?,
            "max_atoms" => sm.emulator.max_atoms = parse(value)?,
            "convention" => {
                sm.emulator.convention = match value {
                    "full" => RabiConvention::Full,
                    "half" => RabiConvention::Half,
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "unknown convention `{other}`"
                        )))
                    }
                }
            }
            "ud_radius" => sm.embed.ud_radius = parse(value)?,
            "margin" => sm.embed.margin = parse(value)?,
            "w_edge" => sm.embed.w_edge = parse(value)?,
            "w_non_edge" => sm.embed.w_non_edge = parse(value)?,
            "w_spacing" => sm.embed.w_spacing = parse(value)?,
            "w_boundary" => sm.embed.w_boundary = parse(value)?,
            "embed_iterations" => sm.embed.iterations = parse(value)?,
            "embed_step" => sm.embed.step = parse(value)?,
            "restarts" => sm.embed.restarts = parse(value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        self.solve.root_only = self.mode == Mode::HcgOnly;
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", i + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.solve.sampler.emulator.validate()?;
        if self.solve.sampler.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if self.solve.sampler.embed.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// One solved instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub id: String,
    pub mode: Mode,
    pub n: usize,
    pub is_ud: bool,
    pub chi_exact: usize,
    pub chi_hat: usize,
    pub gap: f64,
    pub proven: bool,
    pub shots: u64,
    pub sampler_calls: usize,
    pub nodes_generated: usize,
    pub nodes_explored: usize,
    pub nodes_pruned: usize,
    pub ilp_calls: usize,
    pub wall_ms: u128,
}

impl BenchRecord {
    /// Columns of the benchmark CSV. Wall time lives in a separate timing
    /// file so the main CSV is reproducible.
    pub const HEADER: &'static str = "id,mode,n,is_ud,chi_exact,chi_hat,gap,proven,shots,sampler_calls,nodes_generated,nodes_explored,nodes_pruned,ilp_calls";
    pub const TIMING_HEADER: &'static str = "id,mode,wall_ms";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{},{},{},{},{},{}",
            self.id,
            self.mode.name(),
            self.n,
            self.is_ud,
            self.chi_exact,
            self.chi_hat,
            self.gap,
            self.proven,
            self.shots,
            self.sampler_calls,
            self.nodes_generated,
            self.nodes_explored,
            self.nodes_pruned,
            self.ilp_calls
        )
    }

    pub fn timing_csv(&self) -> String {
        format!("{},{},{}", self.id, self.mode.name(), self.wall_ms)
    }
}

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(BenchRecord::HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

pub fn timing_to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(BenchRecord::TIMING_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.timing_csv());
        s.push('\n');
    }
    s
}

/// Parses a benchmark CSV; wall times come back as zero.
pub fn parse_records(text: &str) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    if header.join(",") != BenchRecord::HEADER {
        return Err(Error::Csv(format!(
            "unexpected header `{}`",
            header.join(",")
        )));
    }
    rdr.records()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            if row.len() != header.len() {
                return Err(Error::Csv(format!("row has {} fields", row.len())));
            }
            Ok(BenchRecord {
                id: row[0].to_string(),
                mode: row[1].parse()?,
                n: parse(&row[2])?,
                is_ud: parse(&row[3])?,
                chi_exact: parse(&row[4])?,
                chi_hat: parse(&row[5])?,
                gap: parse(&row[6])?,
                proven: parse(&row[7])?,
                shots: parse(&row[8])?,
                sampler_calls: parse(&row[9])?,
                nodes_generated: parse(&row[10])?,
                nodes_explored: parse(&row[11])?,
                nodes_pruned: parse(&row[12])?,
                ilp_calls: parse(&row[13])?,
                wall_ms: 0,
            })
        })
        .collect()
}

/// A pricing log row tagged with its instance and search node.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingRecord {
    pub id: String,
    pub node: usize,
    pub row: PricingLogRow,
}

impl PricingRecord {
    pub const HEADER: &'static str =
        "id,node,iteration,n_sub,shots,distinct_bitstrings,improving,maximal";

    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.id, self.node, self.row.to_csv())
    }
}

pub fn pricing_to_csv(rows: &[PricingRecord]) -> String {
    let mut s = String::from(PricingRecord::HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

pub fn parse_pricing(text: &str) -> Result<Vec<PricingRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.records()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            if row.len() != 8 {
                return Err(Error::Csv(format!("pricing row has {} fields", row.len())));
            }
            Ok(PricingRecord {
                id: row[0].to_string(),
                node: parse(&row[1])?,
                row: PricingLogRow {
                    iteration: parse(&row[2])?,
                    n_sub: parse(&row[3])?,
                    shots: parse(&row[4])?,
                    distinct_bitstrings: parse(&row[5])?,
                    improving: parse(&row[6])?,
                    maximal: parse(&row[7])?,
                },
            })
        })
        .collect()
}

/// Everything a single instance run produced.
#[derive(Clone, Debug)]
pub struct InstanceRun {
    pub record: BenchRecord,
    pub coloring: Coloring,
    pub pricing: Vec<PricingRecord>,
}

/// Solves one instance in the configured mode and checks the result
/// against the oracle.
pub fn run_instance(inst: &Instance, config: &RunConfig) -> Result<InstanceRun> {
    let start = Instant::now();
    let exact = exact_reference_coloring(&inst.graph)?;
    let chi_exact = exact.colors_used();
    let (coloring, res) = match config.mode {
        Mode::Exact => (exact, None),
        Mode::Qcbp | Mode::HcgOnly => {
            let mut solve = config.solve.clone();
            solve.root_only = config.mode == Mode::HcgOnly;
            let r: SolveResult = solve_qcbp(&inst.graph, &solve)?;
            (r.coloring.clone(), Some(r))
        }
    };
    if !coloring.is_valid_for(&inst.graph) {
        return Err(Error::Numerical(format!(
            "{}: solver returned an invalid coloring",
            inst.id
        )));
    }
    let chi_hat = coloring.colors_used();
    if chi_hat < chi_exact {
        return Err(Error::Numerical(format!(
            "{}: coloring with {chi_hat} colors beats the oracle's {chi_exact}",
            inst.id
        )));
    }
    let mut record = BenchRecord {
        id: inst.id.clone(),
        mode: config.mode,
        n: inst.n,
        is_ud: inst.is_ud,
        chi_exact,
        chi_hat,
        gap: (chi_hat - chi_exact) as f64 / chi_exact as f64,
        proven: true,
        shots: 0,
        sampler_calls: 0,
        nodes_generated: 0,
        nodes_explored: 0,
        nodes_pruned: 0,
        ilp_calls: 0,
        wall_ms: 0,
    };
    let mut pricing = Vec::new();
    if let Some(r) = res {
        let s = &r.stats;
        record.proven = r.proven_optimal;
        record.shots = s.shots_total;
        record.sampler_calls = s.sampler_calls;
        record.nodes_generated = s.nodes_generated;
        record.nodes_explored = s.nodes_explored;
        record.nodes_pruned = s.nodes_pruned;
        record.ilp_calls = s.ilp_calls;
        pricing = s
            .pricing_log
            .iter()
            .map(|(node, row)| PricingRecord {
                id: inst.id.clone(),
                node: *node,
                row: row.clone(),
            })
            .collect();
    }
    record.wall_ms = start.elapsed().as_millis();
    Ok(InstanceRun {
        record,
        coloring,
        pricing,
    })
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub pricing: Vec<PricingRecord>,
}

/// Solves every instance, one solver per instance, and returns results in
/// dataset order.
pub fn run_benchmark(config: &RunConfig, dataset: &[Instance]) -> Result<BenchOutput> {
    config.validate()?;
    let work = || -> Result<Vec<InstanceRun>> {
        dataset
            .par_iter()
            .map(|inst| run_instance(inst, config))
            .collect()
    };
    let runs = if config.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work)?
    };
    let mut out = BenchOutput::default();
    for run in runs {
        out.records.push(run.record);
        out.pricing.extend(run.pricing);
    }
    Ok(out)
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

pub fn optimality_rate(records: &[BenchRecord]) -> f64 {
    records.iter().filter(|r| r.chi_hat == r.chi_exact).count() as f64 / records.len().max(1) as f64
}

/// Mean gap per `n`.
pub fn mean_gap_by_n(records: &[BenchRecord]) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry(r.n).or_default();
        e.0 += r.gap;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(n, (s, c))| (n, s / c as f64))
        .collect()
}

pub fn median_explored(records: &[BenchRecord]) -> f64 {
    median(records.iter().map(|r| r.nodes_explored as f64).collect())
}

/// Summary tables as plain CSV blocks, each preceded by a `# title` line.
pub fn summarize(records: &[BenchRecord], pricing: &[PricingRecord]) -> String {
    let mut out = String::new();
    let mut by_mode: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_mode.entry(r.mode.name()).or_default().push(r);
    }
    let owned = |v: &[&BenchRecord]| v.iter().map(|r| (*r).clone()).collect::<Vec<_>>();

    out.push_str("# optimality rate\nmode,group,instances,optimal,proven,rate\n");
    for (mode, rs) in &by_mode {
        for (group, filter) in [("ud", Some(true)), ("non_ud", Some(false)), ("total", None)] {
            let sel: Vec<BenchRecord> = owned(rs)
                .into_iter()
                .filter(|r| filter.is_none_or(|u| r.is_ud == u))
                .collect();
            if sel.is_empty() {
                continue;
            }
            let opt = sel.iter().filter(|r| r.chi_hat == r.chi_exact).count();
            let proven = sel.iter().filter(|r| r.proven).count();
            writeln!(
                out,
                "{mode},{group},{},{opt},{proven},{:.3}",
                sel.len(),
                optimality_rate(&sel)
            )
            .unwrap();
        }
    }

    out.push_str("\n# gap by n\nmode,n,instances,mean_gap,max_gap\n");
    for (mode, rs) in &by_mode {
        let mut ns: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in rs {
            ns.entry(r.n).or_default().push(r.gap);
        }
        for (n, gaps) in ns {
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            let max = gaps.iter().copied().fold(0.0, f64::max);
            writeln!(out, "{mode},{n},{},{mean:.4},{max:.4}", gaps.len()).unwrap();
        }
    }

    out.push_str("\n# shots by n\nmode,n,min,median,max,total\n");
    for (mode, rs) in &by_mode {
        let mut ns: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in rs {
            ns.entry(r.n).or_default().push(r.shots as f64);
        }
        for (n, s) in ns {
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            let max = s.iter().copied().fold(0.0, f64::max);
            let total: f64 = s.iter().sum();
            writeln!(out, "{mode},{n},{min},{},{max},{total}", median(s)).unwrap();
        }
    }

    out.push_str(
        "\n# nodes by n\nmode,n,median_generated,median_explored,max_explored,median_pruned\n",
    );
    for (mode, rs) in &by_mode {
        let mut ns: BTreeMap<usize, Vec<&BenchRecord>> = BTreeMap::new();
        for r in rs {
            ns.entry(r.n).or_default().push(r);
        }
        for (n, v) in ns {
            let f = |g: fn(&BenchRecord) -> usize| median(v.iter().map(|r| g(r) as f64).collect());
            let max = v.iter().map(|r| r.nodes_explored).max().unwrap_or(0);
            writeln!(
                out,
                "{mode},{n},{},{},{max},{}",
                f(|r| r.nodes_generated),
                f(|r| r.nodes_explored),
                f(|r| r.nodes_pruned)
            )
            .unwrap();
        }
    }

    out.push_str("\n# exact pricer calls\nmode,n,is_ud,median_calls\n");
    for (mode, rs) in &by_mode {
        let mut ns: BTreeMap<(usize, bool), Vec<f64>> = BTreeMap::new();
        for r in rs {
            ns.entry((r.n, r.is_ud))
                .or_default()
                .push(r.ilp_calls as f64);
        }
        for ((n, ud), calls) in ns {
            writeln!(out, "{mode},{n},{ud},{}", median(calls)).unwrap();
        }
    }

    out.push_str("\n# sampling by subproblem size\nn_sub,calls,shots,distinct,improving,maximal,improving_fraction,mis_fraction\n");
    let mut by_sub: BTreeMap<usize, [u64; 5]> = BTreeMap::new();
    for p in pricing.iter().filter(|p| p.row.shots > 0) {
        let e = by_sub.entry(p.row.n_sub).or_default();
        e[0] += 1;
        e[1] += p.row.shots;
        e[2] += p.row.distinct_bitstrings as u64;
        e[3] += p.row.improving as u64;
        e[4] += p.row.maximal as u64;
    }
    for (n_sub, [calls, shots, distinct, improving, maximal]) in by_sub {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        writeln!(
            out,
            "{n_sub},{calls},{shots},{distinct},{improving},{maximal},{:.3},{:.3}",
            ratio(improving, distinct),
            ratio(maximal, improving)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::SamplerKind;

    #[test]
    fn oracle_examples() {
        assert_eq!(
            exact_reference_chromatic(&Graph::complete(4).unwrap()).unwrap(),
            4
        );
        assert_eq!(
            exact_reference_chromatic(&Graph::cycle(5).unwrap()).unwrap(),
            3
        );
        assert_eq!(
            exact_reference_chromatic(&Graph::cycle(6).unwrap()).unwrap(),
            2
        );
        assert_eq!(exact_reference_chromatic(&Graph::petersen()).unwrap(), 3);
        assert_eq!(
            exact_reference_chromatic(&Graph::empty(3).unwrap()).unwrap(),
            1
        );
        let c = exact_reference_coloring(&Graph::petersen()).unwrap();
        assert!(c.is_valid_for(&Graph::petersen()));
    }

    #[test]
    fn oracle_rejects_large_graphs() {
        assert!(exact_reference_chromatic(&Graph::empty(21).unwrap()).is_err());
    }

    #[test]
    fn manifest_accounting() {
        let spec = DatasetSpec {
            counts: vec![(10, 4)],
            ud_fraction: 0.5,
            ..Default::default()
        };
        let inst = build_dataset(&spec).unwrap();
        assert_eq!(inst.len(), 4);
        assert_eq!(inst.iter().filter(|i| i.is_ud).count(), 2);
        for i in &inst {
            let ud = Graph::unit_disk(&i.positions, spec.radius).unwrap();
            assert_eq!(i.is_ud, ud == i.graph, "{}", i.id);
            assert_eq!(i.flipped.is_empty(), i.is_ud);
        }
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = DatasetSpec {
            counts: vec![(8, 2), (9, 1)],
            ..Default::default()
        };
        let a = generate_dataset(dir.path(), &spec).unwrap();
        let b = load_dataset(dir.path()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(
                (&x.id, x.n, x.is_ud, x.seed, &x.graph, &x.flipped),
                (&y.id, y.n, y.is_ud, y.seed, &y.graph, &y.flipped)
            );
            for (p, q) in x.positions.iter().zip(&y.positions) {
                assert!((p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9);
            }
        }
        let first = fs::read(dir.path().join("manifest.csv")).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        generate_dataset(dir2.path(), &spec).unwrap();
        assert_eq!(first, fs::read(dir2.path().join("manifest.csv")).unwrap());
    }

    #[test]
    fn config_keys() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\nmode = hcg_only\nsampler = exact_pricer\nshots=50\nduration = 2.5 # us\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::HcgOnly);
        assert!(c.solve.root_only);
        assert_eq!(c.solve.sampler.kind, SamplerKind::ExactPricer);
        assert_eq!(c.solve.sampler.shots, 50);
        assert_eq!(c.solve.sampler.emulator.pulse.duration, 2.5);
        c.set("shots", "0").unwrap();
        assert!(c.validate().is_err());
        assert!(c.set("nonsense", "1").is_err());
        assert!(c.apply_text("shots 3").is_err());
        let mut d = RunConfig::default();
        for k in RunConfig::KEYS {
            let v = match *k {
                "mode" => "qcbp",
                "sampler" => "exact_pricer",
                "convention" => "half",
                "complete_branching" | "extend_to_maximal" => "true",
                _ => "3",
            };
            d.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn record_round_trip() {
        let r = BenchRecord {
            id: "n08_000".into(),
            mode: Mode::Qcbp,
            n: 8,
            is_ud: true,
            chi_exact: 3,
            chi_hat: 4,
            gap: 1.0 / 3.0,
            proven: false,
            shots: 600,
            sampler_calls: 3,
            nodes_generated: 5,
            nodes_explored: 2,
            nodes_pruned: 3,
            ilp_calls: 4,
            wall_ms: 17,
        };
        let text = records_to_csv(&[r.clone()]);
        let back = parse_records(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert!((back[0].gap - r.gap).abs() < 1e-6);
        assert_eq!(records_to_csv(&back), text);
        assert!(parse_records("id,n\nx,1\n").is_err());
    }

    #[test]
    fn exact_mode_has_zero_gap() {
        let spec = DatasetSpec {
            counts: vec![(8, 3)],
            ..Default::default()
        };
        let data = build_dataset(&spec).unwrap();
        let cfg = RunConfig {
            mode: Mode::Exact,
            ..Default::default()
        };
        let out = run_benchmark(&cfg, &data).unwrap();
        assert!(out.records.iter().all(|r| r.gap == 0.0 && r.proven));
        let s = summarize(&out.records, &out.pricing);
        assert!(s.contains("exact,total,3,3,3,1.000"), "{s}");
    }
}
