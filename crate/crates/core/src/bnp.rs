//! Branch-and-bound over maximal independent sets, with column generation
//! at every node.
//!
//! A node fixes some color classes and leaves a residual vertex set to
//! color. Branching picks a maximal independent set of the residual as the
//! next class. Node bounds combine the depth with the column generation LP
//! value and the spectral bounds of the residual; the incumbent comes from
//! a greedy heuristic over the pooled columns.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use crate::bounds::{spectral_lb, SpectralBounds};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::hcg::{run_hcg, HcgCaps};
use crate::pricing::{Pricer, PricingLogRow, SamplerConfig, Subgraph};

/// Color classes, each an independent set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coloring {
    pub classes: Vec<VertexSet>,
}

impl Coloring {
    pub fn colors_used(&self) -> usize {
        self.classes.len()
    }

    pub fn covered(&self) -> VertexSet {
        self.classes
            .iter()
            .fold(VertexSet::EMPTY, |a, &c| a.union(c))
    }

    /// Classes are non-empty, pairwise disjoint, independent, and cover
    /// every vertex of `g`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut seen = VertexSet::EMPTY;
        for &c in &self.classes {
            if c.is_empty() || !c.is_disjoint(seen) || !g.is_independent(c) {
                return false;
            }
            seen = seen.union(c);
        }
        seen == g.vertices()
    }

    /// Color index per vertex.
    pub fn color_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (k, c) in self.classes.iter().enumerate() {
            for v in *c {
                out[v] = Some(k);
            }
        }
        out
    }
}

/// Greedy coloring from pooled columns: repeatedly take the uncolored
/// vertex of highest degree and commit the pool set covering it with the
/// most uncolored vertices.
///
/// `pool` is in the indexing of `g`; sets are intersected with the
/// uncolored vertices before comparison. A vertex no pool set contains is
/// colored alone.
pub fn primal_heuristic(g: &Graph, pool: &[VertexSet]) -> Coloring {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut uncolored = g.vertices();
    let mut classes = Vec::new();
    for &v in &order {
        if !uncolored.contains(v) {
            continue;
        }
        let mut best = VertexSet::singleton(v);
        for &s in pool {
            if !s.contains(v) {
                continue;
            }
            let surviving = s.intersection(uncolored);
            if !g.is_independent(surviving) {
                continue;
            }
            match surviving.len().cmp(&best.len()) {
                Ordering::Greater => best = surviving,
                Ordering::Equal if surviving.lex_cmp(best).is_lt() => best = surviving,
                _ => {}
            }
        }
        uncolored = uncolored.difference(best);
        classes.push(best);
    }
    Coloring { classes }
}

/// `d + max(⌈lp⌉, spectral)`, the LP value rounded up with a small slack.
pub fn node_lb(depth: usize, lp_bound: f64, spectral: &SpectralBounds) -> usize {
    let lp = (lp_bound - 1e-6).ceil().max(0.0) as usize;
    depth + lp.max(spectral.combined_lb)
}

/// A search node; sets are in root-graph indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct BBNode {
    pub residual: VertexSet,
    pub depth: usize,
    pub fixed_classes: Vec<VertexSet>,
    pub lb: usize,
    pub local_ub: usize,
    pub score: f64,
    /// Generation order; earlier wins score ties.
    pub id: usize,
}

/// `local_ub × |E(residual)|`.
pub fn node_score(local_ub: usize, residual_edges: usize) -> f64 {
    (local_ub * residual_edges) as f64
}

struct ByScore(BBNode);

impl PartialEq for ByScore {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ByScore {}

impl PartialOrd for ByScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ByScore {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .score
            .total_cmp(&other.0.score)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// Every maximal independent set of `g` that contains `v`, in local
/// indexing, up to `cap` sets.
pub fn maximal_sets_containing(g: &Graph, v: usize, cap: usize) -> Vec<VertexSet> {
    // v ∪ T for every maximal independent T of g − N[v]
    let start = VertexSet::singleton(v);
    let cand = g.vertices().difference(g.neighbors(v)).difference(start);
    let mut out = Vec::new();
    enumerate_maximal(g, start, cand, VertexSet::EMPTY, cap, &mut out);
    out
}

/// Bron–Kerbosch on the complement: `cur` independent, `cand` may extend
/// it, `excl` were already tried.
fn enumerate_maximal(
    g: &Graph,
    cur: VertexSet,
    cand: VertexSet,
    excl: VertexSet,
    cap: usize,
    out: &mut Vec<VertexSet>,
) {
    if out.len() >= cap {
        return;
    }
    if cand.is_empty() {
        if excl.is_empty() {
            out.push(cur);
        }
        return;
    }
    // pivot: vertex of cand ∪ excl with the most non-neighbours in cand;
    // only the pivot and its neighbours need to be tried
    let closed = |u: usize| g.neighbors(u).with(u);
    let pivot = cand
        .union(excl)
        .iter()
        .max_by_key(|&u| cand.difference(closed(u)).len())
        .expect("non-empty");
    let mut cand = cand;
    let mut excl = excl;
    for u in cand.intersection(closed(pivot)) {
        let keep = closed(u);
        enumerate_maximal(
            g,
            cur.with(u),
            cand.difference(keep),
            excl.difference(keep),
            cap,
            out,
        );
        cand.remove(u);
        excl.insert(u);
    }
}

/// Branching candidates for `residual`: pool sets restricted to the
/// residual that are maximal there, plus (when `complete`) every maximal
/// set through the highest-degree residual vertex. Root indexing, sorted.
pub fn branching_sets(
    root: &Graph,
    residual: VertexSet,
    pool: &[VertexSet],
    complete: bool,
) -> Result<Vec<VertexSet>> {
    let sub = Subgraph::of(root, residual)?;
    let mut sets: Vec<VertexSet> = pool
        .iter()
        .map(|&s| sub.project(s))
        .filter(|&s| {
            !s.is_empty() && sub.graph.is_independent(s) && sub.graph.is_maximal_independent(s)
        })
        .collect();
    if complete {
        let v = (0..sub.graph.n())
            .max_by(|&a, &b| {
                sub.graph
                    .degree(a)
                    .cmp(&sub.graph.degree(b))
                    .then(b.cmp(&a))
            })
            .expect("non-empty residual");
        sets.extend(maximal_sets_containing(&sub.graph, v, MAX_BRANCH_SETS));
    }
    let mut sets: Vec<VertexSet> = sets.into_iter().map(|s| sub.lift(s)).collect();
    sets.sort_by(|a, b| a.lex_cmp(*b));
    sets.dedup();
    Ok(sets)
}

const MAX_BRANCH_SETS: usize = 100_000;

/// Children of `node`, one per branching set, with duplicate residuals
/// (within this expansion) removed.
pub fn branch(
    root: &Graph,
    node: &BBNode,
    pool: &[VertexSet],
    complete: bool,
) -> Result<Vec<BBNode>> {
    if node.residual.is_empty() {
        return Ok(Vec::new());
    }
    let mut seen = HashSet::new();
    let mut children = Vec::new();
    for s in branching_sets(root, node.residual, pool, complete)? {
        let residual = node.residual.difference(s);
        if !seen.insert(residual) {
            continue;
        }
        let mut fixed = node.fixed_classes.clone();
        fixed.push(s);
        children.push(BBNode {
            residual,
            depth: node.depth + 1,
            fixed_classes: fixed,
            lb: node.lb,
            local_ub: 0,
            score: 0.0,
            id: 0,
        });
    }
    Ok(children)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub sampler: SamplerConfig,
    pub hcg: HcgCaps,
    pub node_budget: usize,
    /// Also branch on every maximal set through one vertex, which makes
    /// exhausting the tree a proof of optimality.
    pub complete_branching: bool,
    /// Stop after the root node (column generation plus heuristic).
    pub root_only: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            sampler: SamplerConfig::default(),
            hcg: HcgCaps::default(),
            node_budget: 1000,
            complete_branching: true,
            root_only: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub nodes_generated: usize,
    pub nodes_explored: usize,
    pub nodes_pruned: usize,
    pub nodes_open: usize,
    pub shots_total: u64,
    pub sampler_calls: usize,
    pub ilp_calls: usize,
    pub hcg_iterations: usize,
    pub root_lp: f64,
    pub root_lb: usize,
    pub global_lb: usize,
    pub root_certified: bool,
    pub wall_ms: u128,
    /// `(node id, row)` for every pricing call.
    pub pricing_log: Vec<(usize, PricingLogRow)>,
    /// Incumbent value after every improvement, root first.
    pub ub_trace: Vec<usize>,
    pub lb_trace: Vec<usize>,
    /// Residual keys of explored nodes, in exploration order.
    pub explored_keys: Vec<VertexSet>,
}

impl SolveStats {
    pub const HEADER: &'static str =
        "nodes_generated,nodes_explored,nodes_pruned,shots_total,ilp_calls,chi_hat,proven,wall_time";
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub coloring: Coloring,
    pub chi_hat: usize,
    pub proven_optimal: bool,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn stats_csv(&self) -> String {
        let s = &self.stats;
        format!(
            "{},{},{},{},{},{},{},{}",
            s.nodes_generated,
            s.nodes_explored,
            s.nodes_pruned,
            s.shots_total,
            s.ilp_calls,
            self.chi_hat,
            self.proven_optimal,
            s.wall_ms
        )
    }
}

/// Incumbent, open list and node bookkeeping of one search.
pub struct SearchState {
    pub ub: usize,
    pub incumbent: Coloring,
    open: BinaryHeap<ByScore>,
    /// Smallest depth at which each residual was generated.
    pub visited_keys: HashMap<VertexSet, usize>,
    pub stats: SolveStats,
    next_id: usize,
}

impl SearchState {
    fn offer(&mut self, g: &Graph, coloring: Coloring) -> Result<()> {
        if coloring.colors_used() < self.ub {
            if !coloring.is_valid_for(g) {
                return Err(Error::Numerical(format!(
                    "heuristic produced an invalid coloring {coloring:?}"
                )));
            }
            self.ub = coloring.colors_used();
            self.incumbent = coloring;
            self.stats.ub_trace.push(self.ub);
        }
        Ok(())
    }

    fn open_lb(&self) -> Option<usize> {
        self.open.iter().map(|n| n.0.lb).min()
    }
}

/// Colors `residual` with the pool heuristic; root indexing in and out.
fn residual_coloring(root: &Graph, residual: VertexSet, pool: &[VertexSet]) -> Result<Coloring> {
    if residual.is_empty() {
        return Ok(Coloring::default());
    }
    let sub = Subgraph::of(root, residual)?;
    let local: Vec<VertexSet> = pool
        .iter()
        .map(|&s| sub.project(s))
        .filter(|s| !s.is_empty())
        .collect();
    let c = primal_heuristic(&sub.graph, &local);
    Ok(Coloring {
        classes: c.classes.into_iter().map(|s| sub.lift(s)).collect(),
    })
}

#[derive(Default)]
struct Pool {
    sets: Vec<VertexSet>,
    index: HashSet<VertexSet>,
}

impl Pool {
    fn merge(&mut self, sets: impl IntoIterator<Item = VertexSet>) {
        for s in sets {
            if self.index.insert(s) {
                self.sets.push(s);
            }
        }
    }
}

/// Runs the full branch-and-price search on `g`.
pub fn solve_qcbp(g: &Graph, config: &SolveConfig) -> Result<SolveResult> {
    let pricer = Pricer::new(config.sampler.clone());
    solve_with_pricer(g, config, &pricer)
}

pub fn solve_with_pricer(g: &Graph, config: &SolveConfig, pricer: &Pricer) -> Result<SolveResult> {
    let start = Instant::now();
    let mut pool = Pool::default();
    let mut st = SearchState {
        ub: usize::MAX,
        incumbent: Coloring::default(),
        open: BinaryHeap::new(),
        visited_keys: HashMap::new(),
        stats: SolveStats::default(),
        next_id: 1,
    };

    // root
    let root_sub = Subgraph::root(g);
    let hcg = run_hcg(&root_sub, &[], pricer, &config.hcg)?;
    pool.merge(hcg.pool.iter().map(|c| c.set));
    st.stats.root_lp = hcg.lp_bound;
    st.stats.root_certified = hcg.certified;
    account(&mut st.stats, 0, &hcg);
    let spectral = spectral_lb(g);
    let root_lb = if hcg.certified {
        node_lb(0, hcg.lp_bound, &spectral)
    } else {
        spectral.combined_lb
    };
    st.stats.root_lb = root_lb;
    st.stats.nodes_generated = 1;
    st.stats.nodes_explored = 1;
    st.stats.explored_keys.push(g.vertices());
    st.visited_keys.insert(g.vertices(), 0);
    let mut global_lb = root_lb;
    st.stats.lb_trace.push(global_lb);
    let c = residual_coloring(g, g.vertices(), &pool.sets)?;
    st.offer(g, c)?;

    let root = BBNode {
        residual: g.vertices(),
        depth: 0,
        fixed_classes: Vec::new(),
        lb: root_lb,
        local_ub: st.ub,
        score: node_score(st.ub, g.edge_count()),
        id: 0,
    };

    if st.ub > global_lb && !config.root_only {
        expand(g, &root, &pool, &mut st, config.complete_branching)?;
        loop {
            if config.complete_branching {
                let frontier = st.open_lb().unwrap_or(st.ub).min(st.ub);
                if frontier > global_lb {
                    global_lb = frontier;
                    st.stats.lb_trace.push(global_lb);
                }
            }
            if st.ub <= global_lb || st.stats.nodes_explored >= config.node_budget {
                break;
            }
            let Some(ByScore(node)) = st.open.pop() else {
                break;
            };
            if node.lb >= st.ub
                || st
                    .visited_keys
                    .get(&node.residual)
                    .is_some_and(|&d| d < node.depth)
            {
                st.stats.nodes_pruned += 1;
                continue;
            }
            st.stats.nodes_explored += 1;
            st.stats.explored_keys.push(node.residual);
            if node.residual.is_empty() {
                st.offer(
                    g,
                    Coloring {
                        classes: node.fixed_classes.clone(),
                    },
                )?;
                continue;
            }
            let sub = Subgraph::of(g, node.residual)?;
            let hcg = run_hcg(&sub, &pool.sets, pricer, &config.hcg)?;
            pool.merge(hcg.pool.iter().map(|c| c.set));
            account(&mut st.stats, node.id, &hcg);
            let spectral = spectral_lb(&sub.graph);
            let lb = if hcg.certified {
                node_lb(node.depth, hcg.lp_bound, &spectral)
            } else {
                node.depth + spectral.combined_lb
            };
            let node = BBNode {
                lb: node.lb.max(lb),
                ..node
            };
            let mut c = residual_coloring(g, node.residual, &pool.sets)?;
            let mut classes = node.fixed_classes.clone();
            classes.append(&mut c.classes);
            st.offer(g, Coloring { classes })?;
            if node.lb < st.ub {
                expand(g, &node, &pool, &mut st, config.complete_branching)?;
            }
        }
    }

    st.stats.nodes_open = st.open.len();
    if config.complete_branching && !config.root_only && st.open.is_empty() && st.ub > global_lb {
        // search space exhausted
        global_lb = st.ub;
        st.stats.lb_trace.push(global_lb);
    }
    st.stats.global_lb = global_lb;
    st.stats.wall_ms = start.elapsed().as_millis();
    debug_assert_eq!(
        st.stats.nodes_generated,
        st.stats.nodes_explored + st.stats.nodes_pruned + st.stats.nodes_open
    );
    Ok(SolveResult {
        chi_hat: st.ub,
        proven_optimal: st.ub <= global_lb,
        coloring: st.incumbent,
        stats: st.stats,
    })
}

fn account(stats: &mut SolveStats, node: usize, hcg: &crate::hcg::HcgResult) {
    stats.shots_total += hcg.shots_used;
    stats.sampler_calls += hcg.sampler_calls;
    stats.ilp_calls += hcg.exact_pricer_calls;
    stats.hcg_iterations += hcg.iterations;
    stats
        .pricing_log
        .extend(hcg.log.iter().cloned().map(|r| (node, r)));
}

/// Branches `node`, scores the children and queues the survivors.
fn expand(
    g: &Graph,
    node: &BBNode,
    pool: &Pool,
    st: &mut SearchState,
    complete: bool,
) -> Result<()> {
    for mut child in branch(g, node, &pool.sets, complete)? {
        st.stats.nodes_generated += 1;
        child.id = st.next_id;
        st.next_id += 1;
        if st
            .visited_keys
            .get(&child.residual)
            .is_some_and(|&d| d <= child.depth)
        {
            st.stats.nodes_pruned += 1;
            continue;
        }
        if child.residual.is_empty() {
            child.lb = child.depth;
            child.local_ub = child.depth;
        } else {
            let sub = Subgraph::of(g, child.residual)?;
            child.lb = child
                .lb
                .max(child.depth + spectral_lb(&sub.graph).combined_lb);
            let c = residual_coloring(g, child.residual, &pool.sets)?;
            child.local_ub = c.colors_used();
            child.score = node_score(child.local_ub, sub.graph.edge_count());
        }
        if child.lb >= st.ub {
            st.stats.nodes_pruned += 1;
            continue;
        }
        st.visited_keys.insert(child.residual, child.depth);
        st.open.push(ByScore(child));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::SamplerKind;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    fn exact_config() -> SolveConfig {
        SolveConfig {
            sampler: SamplerConfig {
                kind: SamplerKind::ExactPricer,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn heuristic_examples() {
        let k3 = Graph::complete(3).unwrap();
        let singles: Vec<_> = (0..3).map(VertexSet::singleton).collect();
        assert_eq!(primal_heuristic(&k3, &singles).colors_used(), 3);

        let p3 = Graph::path(3).unwrap();
        let pool = vec![set(&[0]), set(&[1]), set(&[2]), set(&[0, 2])];
        let c = primal_heuristic(&p3, &pool);
        assert_eq!(c.classes, vec![set(&[1]), set(&[0, 2])]);
        assert!(c.is_valid_for(&p3));

        let e4 = Graph::empty(4).unwrap();
        assert_eq!(primal_heuristic(&e4, &[e4.vertices()]).colors_used(), 1);
    }

    #[test]
    fn heuristic_without_pool_uses_singletons() {
        let g = Graph::cycle(5).unwrap();
        let c = primal_heuristic(&g, &[]);
        assert_eq!(c.colors_used(), 5);
        assert!(c.is_valid_for(&g));
    }

    #[test]
    fn branch_examples() {
        let k3 = Graph::complete(3).unwrap();
        let root = BBNode {
            residual: k3.vertices(),
            depth: 0,
            fixed_classes: vec![],
            lb: 3,
            local_ub: 3,
            score: 9.0,
            id: 0,
        };
        let singles: Vec<_> = (0..3).map(VertexSet::singleton).collect();
        let kids = branch(&k3, &root, &singles, false).unwrap();
        assert_eq!(kids.len(), 3);
        assert!(kids.iter().all(|k| k.residual.len() == 2 && k.depth == 1));

        let p3 = Graph::path(3).unwrap();
        let root = BBNode {
            residual: p3.vertices(),
            ..root
        };
        let pool = vec![set(&[0, 2]), set(&[1]), set(&[0]), set(&[2])];
        let kids = branch(&p3, &root, &pool, false).unwrap();
        let residuals: Vec<_> = kids.iter().map(|k| k.residual).collect();
        assert_eq!(residuals, vec![set(&[1]), set(&[0, 2])]);

        let empty = BBNode {
            residual: VertexSet::EMPTY,
            ..root
        };
        assert!(branch(&p3, &empty, &pool, true).unwrap().is_empty());
    }

    #[test]
    fn maximal_enumeration() {
        let c5 = Graph::cycle(5).unwrap();
        let sets = maximal_sets_containing(&c5, 0, 100);
        let mut sets: Vec<_> = sets;
        sets.sort_by(|a, b| a.lex_cmp(*b));
        assert_eq!(sets, vec![set(&[0, 2]), set(&[0, 3])]);
        let e3 = Graph::empty(3).unwrap();
        assert_eq!(maximal_sets_containing(&e3, 1, 10), vec![e3.vertices()]);
    }

    #[test]
    fn bounds_and_scores() {
        let p3 = Graph::path(3).unwrap();
        assert_eq!(node_lb(0, 2.0, &spectral_lb(&p3)), 2);
        assert_eq!(node_lb(1, 1.0, &spectral_lb(&Graph::empty(3).unwrap())), 2);
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(node_lb(0, 4.0, &spectral_lb(&k4)), 4);
        assert_eq!(node_lb(0, 2.0000000001, &spectral_lb(&p3)), 2);
        assert_eq!(node_score(3, 5), 15.0);
        assert_eq!(node_score(4, 0), 0.0);
    }

    #[test]
    fn heap_order() {
        let mk = |score: f64, id: usize| {
            ByScore(BBNode {
                residual: VertexSet::EMPTY,
                depth: 0,
                fixed_classes: vec![],
                lb: 0,
                local_ub: 0,
                score,
                id,
            })
        };
        let mut h = BinaryHeap::new();
        h.push(mk(8.0, 1));
        h.push(mk(15.0, 2));
        h.push(mk(15.0, 3));
        assert_eq!(h.pop().unwrap().0.id, 2);
        assert_eq!(h.pop().unwrap().0.id, 3);
        assert_eq!(h.pop().unwrap().0.id, 1);
    }

    #[test]
    fn solve_small_graphs() {
        let cfg = exact_config();
        let r = solve_qcbp(&Graph::complete(4).unwrap(), &cfg).unwrap();
        assert_eq!(
            (r.chi_hat, r.proven_optimal, r.stats.nodes_explored),
            (4, true, 1)
        );
        let r = solve_qcbp(&Graph::empty(5).unwrap(), &cfg).unwrap();
        assert_eq!((r.chi_hat, r.proven_optimal), (1, true));
        let r = solve_qcbp(&Graph::cycle(5).unwrap(), &cfg).unwrap();
        assert_eq!((r.chi_hat, r.proven_optimal), (3, true));
        assert!(r.coloring.is_valid_for(&Graph::cycle(5).unwrap()));
        let r = solve_qcbp(&Graph::petersen(), &cfg).unwrap();
        assert_eq!((r.chi_hat, r.proven_optimal), (3, true));
    }

    #[test]
    fn solve_single_vertex() {
        let r = solve_qcbp(&Graph::empty(1).unwrap(), &SolveConfig::default()).unwrap();
        assert_eq!((r.chi_hat, r.proven_optimal), (1, true));
    }

    #[test]
    fn counters_balance() {
        // odd wheel-free graph needing branching: C7 plus a chord pattern
        let g = Graph::from_edges(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 0),
                (0, 3),
            ],
        )
        .unwrap();
        let r = solve_qcbp(&g, &exact_config()).unwrap();
        let s = &r.stats;
        assert_eq!(
            s.nodes_generated,
            s.nodes_explored + s.nodes_pruned + s.nodes_open
        );
        assert!(r.coloring.is_valid_for(&g));
        assert!(s.ub_trace.windows(2).all(|w| w[1] < w[0]));
        assert!(s.lb_trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
