//! Noiseless state-vector emulation of a Rydberg atom register driven by a
//! global pulse.
//!
//! The Hamiltonian is
//!
//! ```text
//! H(t) = Ω(t) Σ_i X_i − δ(t) Σ_i n_i + Σ_{i<j} C6 / r_ij^6 n_i n_j
//! ```
//!
//! with basis index bit `i` holding the occupation `n_i` of atom `i`. Time
//! stepping is second-order Strang splitting: half a diagonal step, the
//! transverse field as one rotation per atom, then another half diagonal
//! step, with the pulse sampled at each step midpoint.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{EmbeddingReport, Register};
use crate::error::{Error, Result};

/// Interaction coefficient (rad·um^6/us) giving Ω_b = 10.66 rad/us at
/// r_b = sqrt(5.0 · 8.7) um.
pub const DEFAULT_C6: f64 = 877_455.0;

/// Rabi frequency ceiling, rad/us.
pub const OMEGA_MAX: f64 = 4.0 * PI;

/// Prefactor applied to Ω(t) on the transverse term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RabiConvention {
    /// `Ω Σ X_i`
    #[default]
    Full,
    /// `Ω/2 Σ X_i`
    Half,
}

impl RabiConvention {
    fn factor(self) -> f64 {
        match self {
            RabiConvention::Full => 1.0,
            RabiConvention::Half => 0.5,
        }
    }
}

/// Shape of the adiabatic sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseShape {
    pub duration: f64,
    pub rise_fraction: f64,
    pub fall_fraction: f64,
    pub delta_start: f64,
    pub delta_end: f64,
    pub omega_max: f64,
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape {
            duration: 3.0,
            rise_fraction: 0.15,
            fall_fraction: 0.15,
            delta_start: -15.0,
            delta_end: 15.0,
            omega_max: OMEGA_MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmulatorConfig {
    pub c6: f64,
    /// Time step, us.
    pub dt: f64,
    pub shots: usize,
    pub seed: u64,
    pub max_atoms: usize,
    pub convention: RabiConvention,
    pub pulse: PulseShape,
}

impl Default for EmulatorConfig {
    fn default() -> Self {
        EmulatorConfig {
            c6: DEFAULT_C6,
            dt: 1e-3,
            shots: 200,
            seed: 0,
            max_atoms: 20,
            convention: RabiConvention::Full,
            pulse: PulseShape::default(),
        }
    }
}

impl EmulatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if !(self.c6 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c6 must be positive, got {}",
                self.c6
            )));
        }
        let p = &self.pulse;
        if !(p.duration > 0.0)
            || p.rise_fraction < 0.0
            || p.fall_fraction < 0.0
            || p.rise_fraction + p.fall_fraction > 1.0
            || !(p.omega_max > 0.0)
        {
            return Err(Error::InvalidConfig(format!("pulse shape {p:?}")));
        }
        Ok(())
    }
}

/// Piecewise-linear breakpoints `(t, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform(Vec<(f64, f64)>);

impl Waveform {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPulse(
                "waveform needs at least two breakpoints".into(),
            ));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidPulse(
                "breakpoint times must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidPulse("non-finite breakpoint".into()));
        }
        Ok(Waveform(points))
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.0
    }

    /// Linear interpolation, clamped to the end values outside the range.
    pub fn at(&self, t: f64) -> f64 {
        let pts = &self.0;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        if k >= pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, v0) = pts[k - 1];
        let (t1, v1) = pts[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// Global drive `Ω(t)`, `δ(t)` over `[0, duration]`, in rad/us.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    duration: f64,
    omega: Waveform,
    delta: Waveform,
}

impl PulseSchedule {
    pub fn new(duration: f64, omega: Waveform, delta: Waveform) -> Result<Self> {
        let covers = |w: &Waveform| {
            let b = w.breakpoints();
            b[0].0.abs() < 1e-12 && (b[b.len() - 1].0 - duration).abs() < 1e-12
        };
        if !(duration > 0.0) || !covers(&omega) || !covers(&delta) {
            return Err(Error::InvalidPulse(format!(
                "waveforms must span exactly [0, {duration}]"
            )));
        }
        if omega.at(0.0) != 0.0 || omega.at(duration) != 0.0 {
            return Err(Error::InvalidPulse("omega must vanish at both ends".into()));
        }
        Ok(PulseSchedule {
            duration,
            omega,
            delta,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn omega(&self) -> &Waveform {
        &self.omega
    }

    pub fn delta(&self) -> &Waveform {
        &self.delta
    }

    pub fn peak_omega(&self) -> f64 {
        self.omega
            .breakpoints()
            .iter()
            .map(|p| p.1)
            .fold(0.0, f64::max)
    }

    /// CSV `t_us,omega,delta` over the union of both breakpoint lists.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut ts: Vec<f64> = self
            .omega
            .breakpoints()
            .iter()
            .chain(self.delta.breakpoints())
            .map(|p| p.0)
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        writeln!(w, "t_us,omega,delta")?;
        for t in ts {
            writeln!(w, "{},{},{}", t, self.omega.at(t), self.delta.at(t))?;
        }
        Ok(())
    }
}

/// `sqrt(R_min · r_max)`, falling back to whichever distance exists when
/// the graph is complete or edgeless. `None` for a single atom.
pub fn blockade_radius(report: &EmbeddingReport) -> Option<f64> {
    match (report.r_max, report.r_min) {
        (Some(a), Some(b)) => Some((a * b).sqrt()),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// Peak Rabi frequency `min(C6 / r_b^6, Ω_max)`; `Ω_max` when there is no
/// pair to set a blockade scale.
pub fn peak_rabi(report: &EmbeddingReport, cfg: &EmulatorConfig) -> f64 {
    match blockade_radius(report) {
        Some(rb) => (cfg.c6 / rb.powi(6)).min(cfg.pulse.omega_max),
        None => cfg.pulse.omega_max,
    }
}

/// Trapezoidal Rabi envelope at the blockade-limited peak, with a linear
/// detuning sweep across the whole duration.
pub fn build_adiabatic_pulse(
    report: &EmbeddingReport,
    cfg: &EmulatorConfig,
) -> Result<PulseSchedule> {
    cfg.validate()?;
    let shape = &cfg.pulse;
    let t = shape.duration;
    let peak = peak_rabi(report, cfg);
    let t_up = shape.rise_fraction * t;
    let t_down = (1.0 - shape.fall_fraction) * t;
    let mut omega = vec![(0.0, 0.0)];
    if t_up > 0.0 {
        omega.push((t_up, peak));
    }
    if t_down > t_up && t_down < t {
        omega.push((t_down, peak));
    }
    omega.push((t, 0.0));
    PulseSchedule::new(
        t,
        Waveform::new(omega)?,
        Waveform::new(vec![(0.0, shape.delta_start), (t, shape.delta_end)])?,
    )
}

/// Amplitudes over the 2^n occupation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn ground(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "{len} amplitudes is not a power of two"
            )));
        }
        Ok(StateVector {
            n: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability(&self, basis: u64) -> f64 {
        self.amplitudes[basis as usize].norm_sqr()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Basis state with the largest probability (lowest index on ties).
    pub fn most_probable(&self) -> u64 {
        let mut best = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > self.amplitudes[best].norm_sqr() {
                best = i;
            }
        }
        best as u64
    }
}

/// Interaction energy `Σ_{i<j} C6/r_ij^6 n_i n_j` of every basis state.
pub fn interaction_energies(reg: &Register, c6: f64) -> Vec<f64> {
    let n = reg.len();
    let mut coupling = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let u = c6 / reg.distance(i, j).powi(6);
            coupling[i * n + j] = u;
            coupling[j * n + i] = u;
        }
    }
    let mut energy = vec![0.0; 1 << n];
    // energy(z) = energy(z without its top atom) + couplings of the top atom
    for z in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - z.leading_zeros() as usize;
        let rest = z & !(1 << top);
        let mut e = energy[rest];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            e += coupling[top * n + j];
            r &= r - 1;
        }
        energy[z] = e;
    }
    energy
}

/// Evolves `|0...0>` under the pulse and returns the final state.
pub fn evolve(reg: &Register, pulse: &PulseSchedule, cfg: &EmulatorConfig) -> Result<StateVector> {
    cfg.validate()?;
    let n = reg.len();
    if n > cfg.max_atoms {
        return Err(Error::TooManyAtoms {
            n,
            cap: cfg.max_atoms,
        });
    }
    if n == 0 {
        return Err(Error::EmptyVertexSet);
    }
    let steps = ((pulse.duration() / cfg.dt).round() as usize).max(1);
    let dt = pulse.duration() / steps as f64;
    let dim = 1usize << n;

    let half_interaction: Vec<Complex64> = interaction_energies(reg, cfg.c6)
        .into_iter()
        .map(|u| Complex64::from_polar(1.0, -u * dt / 2.0))
        .collect();
    let popcount: Vec<u8> = (0..dim).map(|z| z.count_ones() as u8).collect();
    let rabi = cfg.convention.factor();

    let mut psi = StateVector::ground(n);
    let amps = &mut psi.amplitudes;
    let mut detuning_phase = vec![Complex64::new(1.0, 0.0); n + 1];

    let mut apply_diagonal = |amps: &mut [Complex64], delta: f64| {
        // exp(-i(-δ k) dt/2) for k excited atoms
        for (k, ph) in detuning_phase.iter_mut().enumerate() {
            *ph = Complex64::from_polar(1.0, delta * k as f64 * dt / 2.0);
        }
        for z in 0..dim {
            amps[z] *= half_interaction[z] * detuning_phase[popcount[z] as usize];
        }
    };

    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let omega = rabi * pulse.omega().at(t_mid);
        let delta = pulse.delta().at(t_mid);
        apply_diagonal(amps, delta);
        if omega != 0.0 {
            // exp(-i ω dt X) = cos(ω dt) I - i sin(ω dt) X
            let (s, c) = (omega * dt).sin_cos();
            let mis = Complex64::new(0.0, -s);
            for q in 0..n {
                let bit = 1usize << q;
                for z in 0..dim {
                    if z & bit == 0 {
                        let a = amps[z];
                        let b = amps[z | bit];
                        amps[z] = a * c + b * mis;
                        amps[z | bit] = b * c + a * mis;
                    }
                }
            }
        }
        apply_diagonal(amps, delta);
    }
    Ok(psi)
}

/// Measurement outcomes keyed by basis index (bit `i` = atom `i` excited).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    n_atoms: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl SampleSet {
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Atom 0 first: basis 0b011 on 3 atoms prints as `110`.
    pub fn bitstring(&self, basis: u64) -> String {
        (0..self.n_atoms)
            .map(|i| if basis >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bitstring,count")?;
        for (&b, &c) in &self.counts {
            writeln!(w, "{},{}", self.bitstring(b), c)?;
        }
        Ok(())
    }
}

/// Draws `shots` basis states from `|amplitude|^2`.
pub fn sample(psi: &StateVector, shots: usize, seed: u64) -> SampleSet {
    let mut cumulative = Vec::with_capacity(psi.amplitudes.len());
    let mut acc = 0.0;
    for a in &psi.amplitudes {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let last = cumulative.len() - 1;
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let mut idx = cumulative.partition_point(|&c| c <= u).min(last);
        // never land on a zero-probability state through rounding
        while idx > 0 && psi.amplitudes[idx].norm_sqr() == 0.0 {
            idx -= 1;
        }
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    SampleSet {
        n_atoms: psi.n,
        counts,
        total: shots as u64,
    }
}
