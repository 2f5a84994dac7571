mod common;

use qcbp_core::embedding::{audit, embed, EmbedParams, Register};
use qcbp_core::emulator::{build_adiabatic_pulse, evolve, sample, EmulatorConfig, StateVector};
use qcbp_core::graph::{random_ud_graph, Graph};

use common::rk4_reference;

#[test]
fn strang_split_tracks_rk4() {
    let cfg = EmulatorConfig::default();
    for seed in 0..12u64 {
        let n = 2 + (seed % 3) as usize;
        let (g, pts) = random_ud_graph(n, seed, 6.5, 10.0).unwrap();
        let reg = Register::new(pts);
        let pulse = build_adiabatic_pulse(&audit(&g, &reg, 6.5).unwrap(), &cfg).unwrap();
        let psi = evolve(&reg, &pulse, &cfg).unwrap();
        let reference =
            StateVector::from_amplitudes(rk4_reference(&reg, &pulse, cfg.c6, cfg.dt / 10.0))
                .unwrap();
        let f = psi.fidelity(&reference);
        assert!(f >= 1.0 - 1e-4, "seed {seed}: fidelity {f}");
        assert!((psi.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn halving_the_step_changes_little() {
    let cfg = EmulatorConfig::default();
    let (g, pts) = random_ud_graph(4, 9, 6.5, 10.0).unwrap();
    let reg = Register::new(pts);
    let pulse = build_adiabatic_pulse(&audit(&g, &reg, 6.5).unwrap(), &cfg).unwrap();
    let a = evolve(&reg, &pulse, &cfg).unwrap();
    let fine = EmulatorConfig {
        dt: cfg.dt / 2.0,
        ..cfg.clone()
    };
    let b = evolve(&reg, &pulse, &fine).unwrap();
    assert!(a.fidelity(&b) > 1.0 - 1e-5);
}

#[test]
fn close_pair_is_blockaded() {
    let cfg = EmulatorConfig::default();
    // a reference P3 layout fixes the pulse and so the blockade radius
    let p3 = Graph::path(3).unwrap();
    let reg = Register::new(vec![(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]);
    let report = audit(&p3, &reg, 6.5).unwrap();
    let pulse = build_adiabatic_pulse(&report, &cfg).unwrap();
    let r_b = (cfg.c6 / pulse.peak_omega()).powf(1.0 / 6.0);
    for frac in [0.4, 0.55, 0.7] {
        let pair = Register::new(vec![(0.0, 0.0), (frac * r_b, 0.0)]);
        let psi = evolve(&pair, &pulse, &cfg).unwrap();
        assert!(
            psi.probability(0b11) < 0.05,
            "{frac} r_b: {}",
            psi.probability(0b11)
        );
    }
}

#[test]
fn path_ground_state_is_recovered() {
    let cfg = EmulatorConfig::default();
    let p3 = Graph::path(3).unwrap();
    let params = EmbedParams {
        ud_radius: 6.5,
        ..Default::default()
    };
    let reg = embed(&p3, &params, 4).unwrap();
    let report = audit(&p3, &reg, 6.5).unwrap();
    assert!(report.is_exact_ud);
    let psi = evolve(&reg, &build_adiabatic_pulse(&report, &cfg).unwrap(), &cfg).unwrap();
    // the two endpoints form the unique maximum independent set
    assert_eq!(psi.most_probable(), 0b101);
    assert!(psi.probability(0b101) > 0.5);
    let s = sample(&psi, 500, 11);
    let top = s.counts().iter().max_by_key(|(_, &c)| c).unwrap();
    assert_eq!(s.bitstring(*top.0), "101");
}

#[test]
fn long_pulse_keeps_norm_on_twelve_atoms() {
    let cfg = EmulatorConfig::default();
    let (g, pts) = random_ud_graph(12, 3, 6.5, 20.0).unwrap();
    let reg = Register::new(pts);
    let pulse = build_adiabatic_pulse(&audit(&g, &reg, 6.5).unwrap(), &cfg).unwrap();
    let psi = evolve(&reg, &pulse, &cfg).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-6);
}
