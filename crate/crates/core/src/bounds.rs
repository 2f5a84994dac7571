//! Spectral lower bounds on the chromatic number.

use crate::graph::Graph;

const OFF_DIAGONAL_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric row-major `n x n` matrix, ascending, by
/// cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off < OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Adjacency eigenvalues, ascending.
pub fn adjacency_spectrum(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut a = vec![0.0; n * n];
    for (u, v) in g.edges() {
        a[u * n + v] = 1.0;
        a[v * n + u] = 1.0;
    }
    symmetric_eigenvalues(a, n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBounds {
    pub hoffman: f64,
    pub elphick_wocjan: f64,
    pub edwards_elphick: f64,
    pub combined_lb: usize,
}

/// Ceiling that forgives float noise just above an integer.
fn robust_ceil(x: f64) -> usize {
    (x - 1e-9).ceil().max(1.0) as usize
}

/// Hoffman `1 + λ_max/|λ_min|`, the inertia bound `1 + max(n⁺/n⁻, n⁻/n⁺)`
/// and `n / (n − λ_max)`; each is 1 on an edgeless graph.
pub fn spectral_lb(g: &Graph) -> SpectralBounds {
    let ev = adjacency_spectrum(g);
    let n = g.n() as f64;
    let lmax = *ev.last().expect("n >= 1");
    let lmin = ev[0];

    let hoffman = if lmin >= -ZERO_TOL {
        1.0
    } else {
        1.0 + lmax / lmin.abs()
    };

    let pos = ev.iter().filter(|&&x| x > ZERO_TOL).count() as f64;
    let neg = ev.iter().filter(|&&x| x < -ZERO_TOL).count() as f64;
    let elphick_wocjan = if pos == 0.0 || neg == 0.0 {
        1.0
    } else {
        1.0 + (pos / neg).max(neg / pos)
    };

    let edwards_elphick = if lmax <= ZERO_TOL {
        1.0
    } else if n - lmax <= 1e-12 {
        n
    } else {
        n / (n - lmax)
    };

    let combined_lb = robust_ceil(hoffman)
        .max(robust_ceil(elphick_wocjan))
        .max(robust_ceil(edwards_elphick));
    SpectralBounds {
        hoffman,
        elphick_wocjan,
        edwards_elphick,
        combined_lb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_spectrum(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn small_spectra() {
        assert_spectrum(
            &adjacency_spectrum(&Graph::complete(2).unwrap()),
            &[-1.0, 1.0],
            1e-12,
        );
        assert_spectrum(
            &adjacency_spectrum(&Graph::empty(3).unwrap()),
            &[0.0; 3],
            1e-15,
        );
    }

    #[test]
    fn c5_spectrum_closed_form() {
        let mut want: Vec<f64> = (0..5)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        assert_spectrum(&adjacency_spectrum(&Graph::cycle(5).unwrap()), &want, 1e-9);
    }

    #[test]
    fn k4_bounds() {
        let b = spectral_lb(&Graph::complete(4).unwrap());
        assert!((b.hoffman - 4.0).abs() < 1e-9);
        assert!((b.elphick_wocjan - 4.0).abs() < 1e-9);
        assert!((b.edwards_elphick - 4.0).abs() < 1e-9);
        assert_eq!(b.combined_lb, 4);
    }

    #[test]
    fn edgeless_bounds() {
        let b = spectral_lb(&Graph::empty(5).unwrap());
        assert_eq!(
            (
                b.hoffman,
                b.elphick_wocjan,
                b.edwards_elphick,
                b.combined_lb
            ),
            (1.0, 1.0, 1.0, 1)
        );
        let b = spectral_lb(&Graph::empty(1).unwrap());
        assert_eq!(b.combined_lb, 1);
    }

    #[test]
    fn c5_hoffman() {
        let b = spectral_lb(&Graph::cycle(5).unwrap());
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.hoffman - (1.0 + 2.0 / golden)).abs() < 1e-9);
        assert_eq!(b.combined_lb, 3);
    }

    #[test]
    fn hoffman_on_cliques() {
        for n in 2..=8 {
            let b = spectral_lb(&Graph::complete(n).unwrap());
            assert!((b.hoffman - n as f64).abs() < 1e-9, "K{n}: {}", b.hoffman);
            assert_eq!(b.combined_lb, n);
        }
    }
}
