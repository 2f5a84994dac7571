//! Hybrid column generation: alternate the master LP with sampled pricing,
//! and close every run with an exact pricing certificate.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::lp::{init_rmp, Column, ColumnOrigin, RmpSolution};
use crate::pricing::{exact_mwis, DualVector, Pricer, PricingLogRow, Subgraph, PRICING_EPS};

#[derive(Clone, Debug, PartialEq)]
pub struct HcgCaps {
    pub max_iterations: usize,
}

impl Default for HcgCaps {
    fn default() -> Self {
        HcgCaps { max_iterations: 50 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HcgResult {
    /// Final model columns, in root indexing.
    pub pool: Vec<Column>,
    pub rmp: RmpSolution,
    pub lp_bound: f64,
    pub iterations: usize,
    pub shots_used: u64,
    /// Calls to the configured sampler (quantum or classical).
    pub sampler_calls: usize,
    pub exact_pricer_calls: usize,
    pub new_sets_per_iteration: Vec<usize>,
    /// Terminated by the exact certificate rather than the iteration cap.
    pub certified: bool,
    pub log: Vec<PricingLogRow>,
    /// LP objective after each solve.
    pub objective_trace: Vec<f64>,
}

/// Runs column generation on `sub`. `seed_pool` holds root-indexed sets;
/// their restrictions to `sub` join the singletons in the initial model.
pub fn run_hcg(
    sub: &Subgraph,
    seed_pool: &[VertexSet],
    pricer: &Pricer,
    caps: &HcgCaps,
) -> Result<HcgResult> {
    let g = &sub.graph;
    let mut model = init_rmp(g);
    let mut inherited: Vec<VertexSet> = seed_pool
        .iter()
        .map(|&s| sub.project(s))
        .filter(|s| s.len() > 1)
        .collect();
    inherited.sort_by(|a, b| a.lex_cmp(*b));
    inherited.dedup();
    model.add_priced(
        inherited
            .into_iter()
            .map(|s| Column::new(s, ColumnOrigin::Inherited))
            .collect(),
    )?;

    let uses_sampler = pricer.config().kind != crate::pricing::SamplerKind::ExactPricer;
    let base_seed = pricer.config().seed ^ sub.root_set().bits().rotate_left(17);

    let mut shots_used = 0;
    let mut sampler_calls = 0;
    let mut exact_calls = 0;
    let mut new_sets = Vec::new();
    let mut log = Vec::new();
    let mut trace: Vec<f64> = Vec::new();
    let mut certified = false;
    let mut iterations = 0;

    let rmp = loop {
        let sol = model.solve()?;
        if let Some(&prev) = trace.last() {
            if sol.objective > prev + 1e-7 {
                return Err(Error::Numerical(format!(
                    "LP objective rose from {prev} to {} after adding columns",
                    sol.objective
                )));
            }
        }
        trace.push(sol.objective);
        iterations += 1;
        let duals = DualVector(sol.duals.clone());
        let known: HashSet<VertexSet> = model.columns().iter().map(|c| c.set).collect();

        if iterations > caps.max_iterations {
            break sol;
        }

        let mut found: Vec<Column> = Vec::new();
        if uses_sampler {
            let out = pricer.price(
                sub,
                &duals,
                &known,
                base_seed.wrapping_add(iterations as u64),
            )?;
            if out.n_sub > 0 {
                sampler_calls += 1;
                shots_used += out.shots;
            }
            log.push(PricingLogRow {
                iteration: iterations,
                n_sub: out.n_sub,
                shots: out.shots,
                distinct_bitstrings: out.distinct,
                improving: out.improving,
                maximal: out.maximal,
            });
            let origin = pricer.config().kind.origin();
            found.extend(out.columns.into_iter().map(|c| Column {
                set: c.local,
                discovered_reduced_cost: c.reduced_cost,
                is_maximal: false,
                origin,
            }));
        }

        if found.is_empty() {
            // exact certificate on the dual-positive subgraph
            exact_calls += 1;
            let support = duals.positive_support();
            if !support.is_empty() {
                let psub = sub.restrict(support)?;
                let w: Vec<f64> = support.iter().map(|v| duals.0[v]).collect();
                let (s, weight) = exact_mwis(&psub.graph, &w);
                if weight > 1.0 + PRICING_EPS {
                    let local = sub.project(psub.lift(s));
                    if !known.contains(&local) {
                        found.push(Column {
                            set: local,
                            discovered_reduced_cost: 1.0 - weight,
                            is_maximal: false,
                            origin: ColumnOrigin::ExactPricer,
                        });
                    }
                }
            }
            if !uses_sampler {
                log.push(PricingLogRow {
                    iteration: iterations,
                    n_sub: support.len(),
                    shots: 0,
                    distinct_bitstrings: 1,
                    improving: found.len(),
                    maximal: found
                        .iter()
                        .filter(|c| g.is_maximal_independent(c.set))
                        .count(),
                });
            }
            if found.is_empty() {
                certified = true;
                break sol;
            }
        }
        let added = model.add_priced(found)?;
        new_sets.push(added);
        if added == 0 {
            // every candidate was already present: duals are stale
            return Err(Error::Numerical(
                "pricing returned only known columns".into(),
            ));
        }
    };

    let pool = model
        .columns()
        .iter()
        .map(|c| Column {
            set: sub.lift(c.set),
            ..c.clone()
        })
        .collect();
    Ok(HcgResult {
        pool,
        lp_bound: rmp.objective,
        rmp,
        iterations,
        shots_used,
        sampler_calls,
        exact_pricer_calls: exact_calls,
        new_sets_per_iteration: new_sets,
        certified,
        log,
        objective_trace: trace,
    })
}
