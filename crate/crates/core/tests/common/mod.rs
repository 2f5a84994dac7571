//! Independent oracles shared by the integration targets.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use qcbp_core::embedding::Register;
use qcbp_core::emulator::PulseSchedule;
use qcbp_core::graph::{Graph, VertexSet};

/// Classical fourth-order Runge-Kutta on the full Rydberg Hamiltonian
/// `Ω Σ X − δ Σ n + Σ C6/r⁶ n n`, built pair by pair from the positions.
pub fn rk4_reference(reg: &Register, pulse: &PulseSchedule, c6: f64, h: f64) -> Vec<Complex64> {
    let n = reg.len();
    let dim = 1usize << n;
    let mut diag = vec![0.0; dim];
    for (z, d) in diag.iter_mut().enumerate() {
        for i in 0..n {
            for j in i + 1..n {
                if z >> i & 1 == 1 && z >> j & 1 == 1 {
                    *d += c6 / reg.distance(i, j).powi(6);
                }
            }
        }
    }
    let deriv = |t: f64, psi: &[Complex64]| -> Vec<Complex64> {
        let om = pulse.omega().at(t);
        let de = pulse.delta().at(t);
        (0..dim)
            .map(|z| {
                let mut h = psi[z] * (diag[z] - de * z.count_ones() as f64);
                for q in 0..n {
                    h += psi[z ^ (1 << q)] * om;
                }
                h * Complex64::new(0.0, -1.0)
            })
            .collect()
    };
    let steps = (pulse.duration() / h).round() as usize;
    let h = pulse.duration() / steps as f64;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let axpy = |y: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(y, k)| y + k * a).collect()
    };
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = deriv(t, &psi);
        let k2 = deriv(t + h / 2.0, &axpy(&psi, &k1, h / 2.0));
        let k3 = deriv(t + h / 2.0, &axpy(&psi, &k2, h / 2.0));
        let k4 = deriv(t + h, &axpy(&psi, &k3, h));
        for z in 0..dim {
            psi[z] += (k1[z] + k2[z] * 2.0 + k3[z] * 2.0 + k4[z]) * (h / 6.0);
        }
    }
    psi
}

/// Chromatic number by trying k = 1, 2, ... with plain assignment search.
pub fn brute_chi(g: &Graph) -> usize {
    fn fits(g: &Graph, colors: &mut Vec<usize>, v: usize, k: usize) -> bool {
        if v == g.n() {
            return true;
        }
        for c in 0..k {
            if (0..v).all(|u| !g.has_edge(u, v) || colors[u] != c) {
                colors[v] = c;
                if fits(g, colors, v + 1, k) {
                    return true;
                }
            }
        }
        false
    }
    (1..=g.n())
        .find(|&k| fits(g, &mut vec![0; g.n()], 0, k))
        .unwrap()
}

/// Best independent-set weight by enumerating all subsets.
pub fn brute_mwis(g: &Graph, w: &[f64]) -> f64 {
    (0u64..1 << g.n())
        .map(VertexSet::from_bits)
        .filter(|&s| g.is_independent(s))
        .map(|s| s.iter().map(|v| w[v]).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
