//! Pricing: find independent sets whose dual weight exceeds one.
//!
//! The main path samples the emulated Rydberg register and filters the
//! measured bitstrings by reduced cost; [`exact_mwis`] is the classical
//! fallback that certifies when no improving column is left.

use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{audit, embed, EmbedParams, Register};
use crate::emulator::{build_adiabatic_pulse, evolve, sample, EmulatorConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lp::ColumnOrigin;

/// Threshold for dual positivity and for calling a column improving.
pub const PRICING_EPS: f64 = 1e-6;

/// Unit-disk radius used when laying out pricing subgraphs. Tighter than
/// the embedding default so the blockade radius sits well clear of the
/// nearest non-edge pairs.
pub const SAMPLER_UD_RADIUS_UM: f64 = 6.5;

const TIE_TOL: f64 = 1e-12;

/// Dual values, one per vertex of the current subproblem.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector(pub Vec<f64>);

impl DualVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self, s: VertexSet) -> f64 {
        s.iter().map(|v| self.0[v]).sum()
    }

    /// Vertices with dual strictly above [`PRICING_EPS`].
    pub fn positive_support(&self) -> VertexSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > PRICING_EPS)
            .map(|(v, _)| v)
            .collect()
    }
}

/// `1 − Σ_{i∈s} π_i`.
pub fn reduced_cost(s: VertexSet, duals: &DualVector) -> f64 {
    1.0 - duals.weight(s)
}

pub fn is_improving(rc: f64) -> bool {
    rc < -PRICING_EPS
}

/// Maximum-weight independent set of `g` under `weights`.
///
/// Branch and bound over the positive-weight vertices in descending weight
/// order, bounded by the remaining weight sum. Among optimal sets the
/// lexicographically smallest one is returned.
pub fn exact_mwis(g: &Graph, weights: &[f64]) -> (VertexSet, f64) {
    assert_eq!(weights.len(), g.n(), "one weight per vertex");
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| weights[v] > 0.0).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    struct Search<'a> {
        g: &'a Graph,
        w: &'a [f64],
        order: Vec<usize>,
        best: VertexSet,
        best_w: f64,
    }

    impl Search<'_> {
        fn go(&mut self, pos: usize, cand: VertexSet, cur: VertexSet, cur_w: f64, rest: f64) {
            if cur_w > self.best_w + TIE_TOL
                || ((cur_w - self.best_w).abs() <= TIE_TOL && cur.lex_cmp(self.best).is_lt())
            {
                self.best = cur;
                self.best_w = cur_w;
            }
            if cur_w + rest < self.best_w - TIE_TOL {
                return;
            }
            let Some(k) = (pos..self.order.len()).find(|&k| cand.contains(self.order[k])) else {
                return;
            };
            let v = self.order[k];
            let wv = self.w[v];
            // include v
            let inc_cand = cand
                .difference(self.g.neighbors(v))
                .difference(VertexSet::singleton(v));
            let inc_rest: f64 = inc_cand.iter().map(|u| self.w[u]).sum();
            self.go(k + 1, inc_cand, cur.with(v), cur_w + wv, inc_rest);
            // exclude v
            let exc_cand = cand.difference(VertexSet::singleton(v));
            self.go(k + 1, exc_cand, cur, cur_w, rest - wv);
        }
    }

    let cand: VertexSet = order.iter().copied().collect();
    let rest = order.iter().map(|&v| weights[v]).sum();
    let mut s = Search {
        g,
        w: weights,
        order,
        best: VertexSet::EMPTY,
        best_w: 0.0,
    };
    s.go(0, cand, VertexSet::EMPTY, 0.0, rest);
    let w = s.best.iter().map(|v| weights[v]).sum();
    (s.best, w)
}

/// Induced subgraph together with the map back to root-graph vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pub graph: Graph,
    pub to_root: Vec<usize>,
}

impl Subgraph {
    pub fn root(g: &Graph) -> Self {
        Subgraph {
            graph: g.clone(),
            to_root: (0..g.n()).collect(),
        }
    }

    /// Subgraph of `root` induced on `keep` (root indexing).
    pub fn of(root: &Graph, keep: VertexSet) -> Result<Self> {
        let (graph, to_root) = root.induced_subgraph(keep)?;
        Ok(Subgraph { graph, to_root })
    }

    /// Restriction to a subset of this subgraph's own vertices.
    pub fn restrict(&self, keep: VertexSet) -> Result<Self> {
        let (graph, map) = self.graph.induced_subgraph(keep)?;
        Ok(Subgraph {
            graph,
            to_root: map.into_iter().map(|v| self.to_root[v]).collect(),
        })
    }

    pub fn root_set(&self) -> VertexSet {
        self.to_root.iter().copied().collect()
    }

    pub fn lift(&self, local: VertexSet) -> VertexSet {
        local.iter().map(|v| self.to_root[v]).collect()
    }

    /// Root set restricted to this subgraph, in local indexing.
    pub fn project(&self, root: VertexSet) -> VertexSet {
        self.to_root
            .iter()
            .enumerate()
            .filter(|(_, &r)| root.contains(r))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SamplerKind {
    /// Adiabatic sweep on the emulated register.
    #[default]
    EmulatedQaa,
    /// Randomized greedy maximal independent sets, dual-weighted.
    ClassicalStochastic,
    /// Exact MWIS only.
    ExactPricer,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::EmulatedQaa => "emulated_qaa",
            SamplerKind::ClassicalStochastic => "classical_stochastic",
            SamplerKind::ExactPricer => "exact_pricer",
        }
    }

    pub fn origin(self) -> ColumnOrigin {
        match self {
            SamplerKind::EmulatedQaa => ColumnOrigin::Quantum,
            SamplerKind::ClassicalStochastic => ColumnOrigin::Stochastic,
            SamplerKind::ExactPricer => ColumnOrigin::ExactPricer,
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "emulated_qaa" | "qaa" => Ok(SamplerKind::EmulatedQaa),
            "classical_stochastic" | "stochastic" => Ok(SamplerKind::ClassicalStochastic),
            "exact_pricer" | "exact" => Ok(SamplerKind::ExactPricer),
            other => Err(Error::InvalidConfig(format!("unknown sampler `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub shots: usize,
    pub seed: u64,
    pub embed: EmbedParams,
    pub emulator: EmulatorConfig,
    /// Greedily extend sampled sets to maximal ones before filtering.
    pub extend_to_maximal: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: SamplerKind::EmulatedQaa,
            shots: 200,
            seed: 0,
            embed: EmbedParams {
                ud_radius: SAMPLER_UD_RADIUS_UM,
                ..EmbedParams::default()
            },
            emulator: EmulatorConfig::default(),
            extend_to_maximal: false,
        }
    }
}

/// A sampled improving column.
#[derive(Clone, Debug, PartialEq)]
pub struct PricedColumn {
    /// Root-graph indexing.
    pub set: VertexSet,
    /// Indexing of the subgraph that was priced.
    pub local: VertexSet,
    pub reduced_cost: f64,
    pub maximal_in_subgraph: bool,
}

/// Result of one pricing call.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PricingOutcome {
    pub columns: Vec<PricedColumn>,
    /// Vertices in the dual-positive subgraph that was sampled.
    pub n_sub: usize,
    pub shots: u64,
    pub distinct: usize,
    /// Distinct samples that are independent and improving (new or not).
    pub improving: usize,
    /// Emitted columns that are maximal in the sampled subgraph.
    pub maximal: usize,
    /// Shots landing on independent improving sets.
    pub improving_shots: u64,
    /// Whether the call ran the exact solver.
    pub exact: bool,
}

/// One row of the per-iteration pricing log.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingLogRow {
    pub iteration: usize,
    pub n_sub: usize,
    pub shots: u64,
    pub distinct_bitstrings: usize,
    pub improving: usize,
    pub maximal: usize,
}

impl PricingLogRow {
    pub const HEADER: &'static str = "iteration,n_sub,shots,distinct_bitstrings,improving,maximal";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.iteration,
            self.n_sub,
            self.shots,
            self.distinct_bitstrings,
            self.improving,
            self.maximal
        )
    }
}

/// Sampling-based pricer with a per-subgraph embedding cache.
#[derive(Debug)]
pub struct Pricer {
    config: SamplerConfig,
    cache: RwLock<HashMap<VertexSet, Register>>,
}

impl Pricer {
    pub fn new(config: SamplerConfig) -> Self {
        Pricer {
            config,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn cached_embeddings(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// Layout for `sub`, embedded once per root vertex set.
    pub fn register_for(&self, sub: &Subgraph) -> Result<Register> {
        let key = sub.root_set();
        if let Some(r) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(r.clone());
        }
        let seed = self.config.seed ^ key.bits().wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let reg = embed(&sub.graph, &self.config.embed, seed)?;
        let mut w = self.cache.write().expect("cache lock");
        Ok(w.entry(key).or_insert(reg).clone())
    }

    /// Prices `sub` under `duals` (local indexing). `known` holds the local
    /// sets already in the model; `call_seed` varies the sample draw.
    pub fn price(
        &self,
        sub: &Subgraph,
        duals: &DualVector,
        known: &HashSet<VertexSet>,
        call_seed: u64,
    ) -> Result<PricingOutcome> {
        assert_eq!(duals.len(), sub.graph.n(), "one dual per subgraph vertex");
        let support = duals.positive_support();
        if support.is_empty() {
            return Ok(PricingOutcome::default());
        }
        let psub = sub.restrict(support)?;
        let pduals: Vec<f64> = support.iter().map(|v| duals.0[v]).collect();

        let mut out = PricingOutcome {
            n_sub: psub.graph.n(),
            ..Default::default()
        };
        // sampled sets in psub indexing, with their shot counts
        let draws: Vec<(VertexSet, u64)> = match self.config.kind {
            SamplerKind::EmulatedQaa => {
                let reg = self.register_for(&psub)?;
                let report = audit(&psub.graph, &reg, self.config.embed.ud_radius)?;
                let pulse = build_adiabatic_pulse(&report, &self.config.emulator)?;
                let psi = evolve(&reg, &pulse, &self.config.emulator)?;
                let samples = sample(&psi, self.config.shots, call_seed);
                out.shots = samples.total();
                samples
                    .counts()
                    .iter()
                    .map(|(&b, &c)| (VertexSet::from_bits(b), c))
                    .collect()
            }
            SamplerKind::ClassicalStochastic => {
                out.shots = self.config.shots as u64;
                stochastic_samples(&psub.graph, &pduals, self.config.shots, call_seed)
            }
            SamplerKind::ExactPricer => {
                out.exact = true;
                let (s, _) = exact_mwis(&psub.graph, &pduals);
                vec![(s, 1)]
            }
        };
        out.distinct = draws.len();

        let mut emitted = HashSet::new();
        for (mut s, count) in draws {
            if !psub.graph.is_independent(s) {
                continue;
            }
            if self.config.extend_to_maximal {
                s = extend_greedy(&psub.graph, &pduals, s);
            }
            let local = sub_local(&psub, sub, s);
            let rc = 1.0 - s.iter().map(|v| pduals[v]).sum::<f64>();
            if !is_improving(rc) {
                continue;
            }
            out.improving += 1;
            out.improving_shots += count;
            if known.contains(&local) || !emitted.insert(local) {
                continue;
            }
            let maximal = psub.graph.is_maximal_independent(s);
            out.maximal += maximal as usize;
            out.columns.push(PricedColumn {
                set: psub.lift(s),
                local,
                reduced_cost: rc,
                maximal_in_subgraph: maximal,
            });
        }
        Ok(out)
    }
}

/// Maps a set from `psub` indexing to `sub` indexing (psub ⊆ sub).
fn sub_local(psub: &Subgraph, sub: &Subgraph, s: VertexSet) -> VertexSet {
    sub.project(psub.lift(s))
}

/// Adds addable vertices by descending weight until maximal.
fn extend_greedy(g: &Graph, w: &[f64], mut s: VertexSet) -> VertexSet {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    for v in order {
        if !s.contains(v) && g.neighbors(v).is_disjoint(s) {
            s.insert(v);
        }
    }
    s
}

/// Dual-weighted random greedy maximal independent sets.
fn stochastic_samples(g: &Graph, w: &[f64], shots: usize, seed: u64) -> Vec<(VertexSet, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<VertexSet, u64> = HashMap::new();
    for _ in 0..shots {
        let mut s = VertexSet::EMPTY;
        let mut cand = g.vertices();
        while !cand.is_empty() {
            let total: f64 = cand.iter().map(|v| w[v].max(1e-9)).sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = cand.first().expect("non-empty");
            for v in cand {
                u -= w[v].max(1e-9);
                if u <= 0.0 {
                    pick = v;
                    break;
                }
            }
            s.insert(pick);
            cand = cand
                .difference(g.neighbors(pick))
                .difference(VertexSet::singleton(pick));
        }
        *counts.entry(s).or_insert(0) += 1;
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_by(|a, b| a.0.lex_cmp(b.0));
    v
}
