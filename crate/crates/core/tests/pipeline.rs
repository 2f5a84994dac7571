mod common;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcbp_core::bench::{
    build_dataset, records_to_csv, run_benchmark, DatasetSpec, Mode, RunConfig,
};
use qcbp_core::graph::{Graph, VertexSet};
use qcbp_core::hcg::{run_hcg, HcgCaps};
use qcbp_core::lp::init_rmp;
use qcbp_core::pricing::{
    is_improving, DualVector, Pricer, SamplerConfig, SamplerKind, Subgraph, PRICING_EPS,
};

use common::gnp;

/// LP optimum over every independent set of `g`.
fn full_lp(g: &Graph) -> f64 {
    let mut m = init_rmp(g);
    let sets: Vec<VertexSet> = (0u64..1 << g.n())
        .map(VertexSet::from_bits)
        .filter(|&s| s.len() > 1 && g.is_independent(s))
        .collect();
    m.add_columns(&sets).unwrap();
    m.solve().unwrap().objective
}

#[test]
fn column_generation_reaches_full_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (i, kind) in [
        SamplerKind::EmulatedQaa,
        SamplerKind::ClassicalStochastic,
        SamplerKind::ExactPricer,
    ]
    .into_iter()
    .cycle()
    .take(24)
    .enumerate()
    {
        let n = rng.gen_range(3..=10);
        let p = rng.gen_range(0.2..0.7);
        let g = gnp(&mut rng, n, p);
        let pricer = Pricer::new(SamplerConfig {
            kind,
            seed: i as u64,
            ..Default::default()
        });
        let r = run_hcg(&Subgraph::root(&g), &[], &pricer, &HcgCaps::default()).unwrap();
        assert!(r.certified);
        let want = full_lp(&g);
        assert!(
            (r.lp_bound - want).abs() < 1e-6,
            "{kind:?} n={n}: {} vs {want}",
            r.lp_bound
        );
        assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        for c in &r.pool {
            assert!(g.is_independent(c.set));
        }
    }
}

#[test]
fn sampled_columns_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..300u64 {
        let n = rng.gen_range(2..=9);
        let g = gnp(&mut rng, n, 0.4);
        let kind = if case % 2 == 0 {
            SamplerKind::EmulatedQaa
        } else {
            SamplerKind::ClassicalStochastic
        };
        let pricer = Pricer::new(SamplerConfig {
            kind,
            seed: case,
            ..Default::default()
        });
        let duals: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.0..0.8)
                }
            })
            .collect();
        let known: HashSet<VertexSet> = (0..n).map(VertexSet::singleton).collect();
        let out = pricer
            .price(
                &Subgraph::root(&g),
                &DualVector(duals.clone()),
                &known,
                case,
            )
            .unwrap();
        let mut emitted = HashSet::new();
        for c in &out.columns {
            assert!(g.is_independent(c.set));
            let rc = 1.0 - c.set.iter().map(|v| duals[v]).sum::<f64>();
            assert!(rc < -PRICING_EPS && is_improving(rc));
            assert!((rc - c.reduced_cost).abs() < 1e-12);
            assert!(!known.contains(&c.local));
            assert!(emitted.insert(c.local));
        }
    }
}

#[test]
fn benchmark_is_reproducible() {
    let spec = DatasetSpec {
        counts: vec![(8, 3), (9, 3)],
        seed: 3,
        ..Default::default()
    };
    let data = build_dataset(&spec).unwrap();
    assert_eq!(data, build_dataset(&spec).unwrap());
    let cfg = RunConfig::default();
    let a = records_to_csv(&run_benchmark(&cfg, &data).unwrap().records);
    let b = records_to_csv(&run_benchmark(&cfg, &data).unwrap().records);
    assert_eq!(a, b);

    let hcg = RunConfig {
        mode: Mode::HcgOnly,
        ..Default::default()
    };
    let out = run_benchmark(&hcg, &data).unwrap();
    for r in &out.records {
        assert_eq!(r.nodes_explored, 1);
        assert!(r.chi_hat >= r.chi_exact);
    }
}
