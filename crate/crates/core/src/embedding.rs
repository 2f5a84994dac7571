//! Atom layouts for graphs.
//!
//! [`embed`] places one atom per vertex by minimizing a hinge loss over the
//! 2n coordinates directly, then projects the result onto the hardware
//! constraints (minimum spacing, bounded register). [`audit`] measures how
//! closely the unit-disk graph of a layout matches its target graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{distance, Graph, Point, MIN_SPACING_UM};

/// Maximum distance of any atom from the register centroid (100 um diameter).
pub const MAX_RADIUS_UM: f64 = 50.0;

/// Atom positions in micrometers, one per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Register {
    positions: Vec<Point>,
}

impl Register {
    pub fn new(positions: Vec<Point>) -> Self {
        Register { positions }
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(self.positions[i], self.positions[j])
    }

    pub fn centroid(&self) -> Point {
        let k = self.positions.len().max(1) as f64;
        let (sx, sy) = self
            .positions
            .iter()
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        (sx / k, sy / k)
    }

    pub fn min_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(self.distance(i, j));
            }
        }
        best
    }

    /// Largest distance of an atom from the centroid.
    pub fn extent(&self) -> f64 {
        let c = self.centroid();
        self.positions
            .iter()
            .map(|&p| distance(p, c))
            .fold(0.0, f64::max)
    }

    /// Both hard constraints, measured directly (with a small float slack).
    pub fn is_hardware_feasible(&self) -> bool {
        self.min_spacing() >= MIN_SPACING_UM - 1e-9 && self.extent() <= MAX_RADIUS_UM + 1e-9
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingReport {
    pub is_exact_ud: bool,
    /// Target edges that the layout does not realize.
    pub missing_edges: Vec<(usize, usize)>,
    /// Layout edges absent from the target.
    pub extra_edges: Vec<(usize, usize)>,
    /// Largest distance between target-adjacent atoms.
    pub r_max: Option<f64>,
    /// Smallest distance between target-non-adjacent atoms.
    pub r_min: Option<f64>,
    pub effective_graph: Graph,
}

impl EmbeddingReport {
    pub fn mismatches(&self) -> usize {
        self.missing_edges.len() + self.extra_edges.len()
    }
}

pub fn audit(g: &Graph, reg: &Register, ud_radius: f64) -> Result<EmbeddingReport> {
    if reg.len() != g.n() {
        return Err(Error::RegisterSize {
            expected: g.n(),
            got: reg.len(),
        });
    }
    let effective_graph = Graph::unit_disk(reg.positions(), ud_radius)?;
    let mut missing_edges = Vec::new();
    let mut extra_edges = Vec::new();
    let mut r_max: Option<f64> = None;
    let mut r_min: Option<f64> = None;
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let d = reg.distance(i, j);
            match (g.has_edge(i, j), effective_graph.has_edge(i, j)) {
                (true, false) => missing_edges.push((i, j)),
                (false, true) => extra_edges.push((i, j)),
                _ => {}
            }
            if g.has_edge(i, j) {
                r_max = Some(r_max.map_or(d, |m| m.max(d)));
            } else {
                r_min = Some(r_min.map_or(d, |m| m.min(d)));
            }
        }
    }
    Ok(EmbeddingReport {
        is_exact_ud: missing_edges.is_empty() && extra_edges.is_empty(),
        missing_edges,
        extra_edges,
        r_max,
        r_min,
        effective_graph,
    })
}

/// Loss weights and optimizer settings for [`embed`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmbedParams {
    pub ud_radius: f64,
    /// Relative margin around `ud_radius` targeted by the edge terms.
    pub margin: f64,
    pub w_edge: f64,
    pub w_non_edge: f64,
    pub w_spacing: f64,
    pub w_boundary: f64,
    pub iterations: usize,
    pub step: f64,
    pub decay: f64,
    pub momentum: f64,
    pub restarts: usize,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            ud_radius: 10.0,
            margin: 0.05,
            w_edge: 1.0,
            w_non_edge: 1.0,
            w_spacing: 4.0,
            w_boundary: 4.0,
            iterations: 3000,
            step: 0.5,
            decay: 0.999,
            momentum: 0.9,
            restarts: 5,
        }
    }
}

impl EmbedParams {
    fn validate(&self) -> Result<()> {
        let ok = self.ud_radius > 0.0
            && (0.0..1.0).contains(&self.margin)
            && self.step > 0.0
            && self.decay > 0.0
            && self.decay <= 1.0
            && (0.0..1.0).contains(&self.momentum)
            && self.restarts >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "embedding parameters {self:?}"
            )))
        }
    }
}

/// Loss value and gradient of the four hinge terms at `pos`.
fn loss_and_grad(g: &Graph, pos: &[Point], p: &EmbedParams, grad: &mut [Point]) -> f64 {
    grad.iter_mut().for_each(|v| *v = (0.0, 0.0));
    let n = pos.len();
    let edge_target = p.ud_radius * (1.0 - p.margin);
    let non_edge_target = p.ud_radius * (1.0 + p.margin);
    let spacing_target = MIN_SPACING_UM * (1.0 + p.margin);
    let mut loss = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = pos[i].0 - pos[j].0;
            let dy = pos[i].1 - pos[j].1;
            let d = dx.hypot(dy).max(1e-9);
            // d(loss)/d(d), accumulated over the active hinges
            let mut slope = 0.0;
            if g.has_edge(i, j) {
                if d > edge_target {
                    let v = d - edge_target;
                    loss += p.w_edge * v * v;
                    slope += 2.0 * p.w_edge * v;
                }
            } else if d < non_edge_target {
                let v = non_edge_target - d;
                loss += p.w_non_edge * v * v;
                slope -= 2.0 * p.w_non_edge * v;
            }
            if d < spacing_target {
                let v = spacing_target - d;
                loss += p.w_spacing * v * v;
                slope -= 2.0 * p.w_spacing * v;
            }
            if slope != 0.0 {
                let (ux, uy) = (dx / d, dy / d);
                grad[i].0 += slope * ux;
                grad[i].1 += slope * uy;
                grad[j].0 -= slope * ux;
                grad[j].1 -= slope * uy;
            }
        }
    }
    let k = n as f64;
    let (cx, cy) = pos
        .iter()
        .fold((0.0, 0.0), |a, q| (a.0 + q.0 / k, a.1 + q.1 / k));
    let limit = MAX_RADIUS_UM * (1.0 - p.margin);
    for i in 0..n {
        let (dx, dy) = (pos[i].0 - cx, pos[i].1 - cy);
        let r = dx.hypot(dy);
        if r > limit {
            let v = r - limit;
            loss += p.w_boundary * v * v;
            // centroid coupling is O(1/n); ignored in the gradient
            let s = 2.0 * p.w_boundary * v / r;
            grad[i].0 += s * dx;
            grad[i].1 += s * dy;
        }
    }
    loss
}

/// Pushes apart pairs closer than the minimum spacing and pulls stray atoms
/// back inside the register disk. Returns whether the result is feasible.
fn project(pos: &mut [Point]) -> bool {
    let n = pos.len();
    for _ in 0..500 {
        let mut moved = false;
        for i in 0..n {
            for j in i + 1..n {
                let d = distance(pos[i], pos[j]);
                let target = MIN_SPACING_UM * (1.0 + 1e-6);
                if d < target {
                    let (ux, uy) = if d > 1e-12 {
                        ((pos[i].0 - pos[j].0) / d, (pos[i].1 - pos[j].1) / d)
                    } else {
                        let a = (i * 7 + j * 13) as f64;
                        (a.cos(), a.sin())
                    };
                    let push = (target - d) / 2.0 + 1e-9;
                    pos[i].0 += ux * push;
                    pos[i].1 += uy * push;
                    pos[j].0 -= ux * push;
                    pos[j].1 -= uy * push;
                    moved = true;
                }
            }
        }
        let reg = Register::new(pos.to_vec());
        let c = reg.centroid();
        if reg.extent() > MAX_RADIUS_UM {
            let scale = MAX_RADIUS_UM / reg.extent();
            for q in pos.iter_mut() {
                let (dx, dy) = (q.0 - c.0, q.1 - c.1);
                let r = dx.hypot(dy);
                if r * scale > MAX_RADIUS_UM * (1.0 - 1e-9) || r > MAX_RADIUS_UM {
                    let f = MAX_RADIUS_UM * (1.0 - 1e-6) / r;
                    q.0 = c.0 + dx * f;
                    q.1 = c.1 + dy * f;
                }
            }
            moved = true;
        }
        if !moved {
            return true;
        }
    }
    Register::new(pos.to_vec()).is_hardware_feasible()
}

struct Candidate {
    register: Register,
    missing: usize,
    extra: usize,
    loss: f64,
}

fn run_restart(g: &Graph, p: &EmbedParams, seed: u64) -> Result<Candidate> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Initial box sized for a UD-like density, clipped to the register.
    let side = (p.ud_radius * (n as f64).sqrt()).min(MAX_RADIUS_UM);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| {
            (
                (rng.gen::<f64>() - 0.5) * side,
                (rng.gen::<f64>() - 0.5) * side,
            )
        })
        .collect();
    let mut vel = vec![(0.0, 0.0); n];
    let mut grad = vec![(0.0, 0.0); n];
    let mut lr = p.step;
    let max_move = 2.0;
    for _ in 0..p.iterations {
        let loss = loss_and_grad(g, &pos, p, &mut grad);
        if loss == 0.0 {
            break;
        }
        for i in 0..n {
            vel[i].0 = p.momentum * vel[i].0 - lr * grad[i].0;
            vel[i].1 = p.momentum * vel[i].1 - lr * grad[i].1;
            let m = vel[i].0.hypot(vel[i].1);
            if m > max_move {
                vel[i].0 *= max_move / m;
                vel[i].1 *= max_move / m;
            }
            pos[i].0 += vel[i].0;
            pos[i].1 += vel[i].1;
        }
        lr *= p.decay;
    }
    if !project(&mut pos) {
        return Err(Error::EmbeddingInfeasible(format!(
            "restart seed {seed}: spacing/extent constraints unresolved"
        )));
    }
    let loss = loss_and_grad(g, &pos, p, &mut grad);
    let register = Register::new(pos);
    let report = audit(g, &register, p.ud_radius)?;
    Ok(Candidate {
        register,
        missing: report.missing_edges.len(),
        extra: report.extra_edges.len(),
        loss,
    })
}

/// Finds a hardware-feasible layout whose unit-disk graph approximates `g`.
///
/// Runs `params.restarts` independent descents and keeps the layout with the
/// fewest mismatched pairs, preferring fewer extra edges on ties. Output is
/// deterministic for a fixed `(g, params, seed)`.
pub fn embed(g: &Graph, params: &EmbedParams, seed: u64) -> Result<Register> {
    params.validate()?;
    if g.n() == 1 {
        return Ok(Register::new(vec![(0.0, 0.0)]));
    }
    let candidates: Vec<Result<Candidate>> = (0..params.restarts)
        .into_par_iter()
        .map(|k| {
            run_restart(
                g,
                params,
                seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(k as u64),
            )
        })
        .collect();
    let mut best: Option<Candidate> = None;
    let mut last_err = None;
    for c in candidates {
        match c {
            Ok(c) => {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (c.missing + c.extra, c.extra, c.loss)
                            < (b.missing + b.extra, b.extra, b.loss)
                    }
                };
                if better {
                    best = Some(c);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(b) => {
            // recentre on the origin; translation preserves every constraint
            let c = b.register.centroid();
            let pos = b
                .register
                .positions()
                .iter()
                .map(|p| (p.0 - c.0, p.1 - c.1))
                .collect();
            Ok(Register::new(pos))
        }
        None => Err(last_err.unwrap_or_else(|| Error::EmbeddingInfeasible("no restarts".into()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_ud_graph;

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1).unwrap();
        let reg = embed(&g, &EmbedParams::default(), 0).unwrap();
        assert_eq!(reg.len(), 1);
        assert!(reg.is_hardware_feasible());
    }

    #[test]
    fn k2_distance_window() {
        let g = Graph::complete(2).unwrap();
        for seed in 0..5 {
            let reg = embed(&g, &EmbedParams::default(), seed).unwrap();
            let d = reg.distance(0, 1);
            assert!((4.0..=10.0).contains(&d), "seed {seed}: {d}");
        }
    }

    #[test]
    fn k5_audit_matches_distances() {
        let g = Graph::complete(5).unwrap();
        let reg = embed(&g, &EmbedParams::default(), 11).unwrap();
        assert!(reg.is_hardware_feasible());
        let report = audit(&g, &reg, 10.0).unwrap();
        let all_close = (0..5).all(|i| (i + 1..5).all(|j| reg.distance(i, j) <= 10.0));
        assert_eq!(report.is_exact_ud, all_close);
        assert!(report.extra_edges.is_empty());
    }

    #[test]
    fn audit_known_positions() {
        for seed in 0..20 {
            let (g, pts) = random_ud_graph(6, seed, 10.0, 20.0).unwrap();
            assert!(audit(&g, &Register::new(pts), 10.0).unwrap().is_exact_ud);
        }

        let p3 = Graph::path(3).unwrap();
        let reg = Register::new(vec![(0.0, 0.0), (7.0, 0.0), (14.0, 0.0)]);
        let r = audit(&p3, &reg, 10.0).unwrap();
        assert!(r.is_exact_ud && r.missing_edges.is_empty() && r.extra_edges.is_empty());
        assert_eq!(r.r_max, Some(7.0));
        assert_eq!(r.r_min, Some(14.0));
    }

    #[test]
    fn audit_missing_edge() {
        let k2 = Graph::complete(2).unwrap();
        let reg = Register::new(vec![(0.0, 0.0), (12.0, 0.0)]);
        let r = audit(&k2, &reg, 10.0).unwrap();
        assert_eq!(r.missing_edges, vec![(0, 1)]);
        assert!(!r.is_exact_ud);
        assert_eq!(r.r_min, None);
    }

    #[test]
    fn audit_size_mismatch() {
        let g = Graph::path(3).unwrap();
        assert!(matches!(
            audit(&g, &Register::new(vec![(0.0, 0.0)]), 10.0),
            Err(Error::RegisterSize { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let (g, _) = random_ud_graph(8, 4, 10.0, 25.0).unwrap();
        let p = EmbedParams::default();
        assert_eq!(embed(&g, &p, 9).unwrap(), embed(&g, &p, 9).unwrap());
    }

    #[test]
    fn recovers_ud_graphs() {
        let p = EmbedParams::default();
        let mut exact = 0;
        for seed in 0..10 {
            let (g, _) = random_ud_graph(8, seed, 10.0, 25.0).unwrap();
            let reg = embed(&g, &p, seed).unwrap();
            assert!(reg.is_hardware_feasible());
            if audit(&g, &reg, 10.0).unwrap().is_exact_ud {
                exact += 1;
            }
        }
        assert!(exact >= 7, "only {exact}/10 UD graphs re-embedded exactly");
    }
}
