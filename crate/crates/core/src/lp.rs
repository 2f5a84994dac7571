//! Restricted master problem: the set-partitioning LP relaxation over the
//! current column pool,
//!
//! ```text
//! min Σ_S λ_S   s.t.  Σ_{S ∋ i} λ_S = 1  for every vertex i,   λ ≥ 0,
//! ```
//!
//! solved with a dense revised simplex started from the singleton identity
//! basis.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const OPTIMALITY_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-11;
const RATIO_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 500;
const REFACTOR_EVERY: usize = 64;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnOrigin {
    Singleton,
    Quantum,
    Stochastic,
    ExactPricer,
    /// Carried over from another search node.
    Inherited,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub set: VertexSet,
    pub discovered_reduced_cost: f64,
    pub is_maximal: bool,
    pub origin: ColumnOrigin,
}

impl Column {
    pub fn new(set: VertexSet, origin: ColumnOrigin) -> Self {
        Column {
            set,
            discovered_reduced_cost: f64::NAN,
            is_maximal: false,
            origin,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RmpModel {
    graph: Graph,
    columns: Vec<Column>,
    index: HashSet<VertexSet>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RmpSolution {
    /// One value per model column, in pool order.
    pub lambda: Vec<f64>,
    /// One dual per vertex.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl RmpSolution {
    pub fn dual_objective(&self) -> f64 {
        self.duals.iter().sum()
    }
}

/// Model over `g` seeded with its `n` singleton columns.
pub fn init_rmp(g: &Graph) -> RmpModel {
    let mut m = RmpModel {
        graph: g.clone(),
        columns: Vec::with_capacity(g.n()),
        index: HashSet::new(),
    };
    for v in 0..g.n() {
        let mut c = Column::new(VertexSet::singleton(v), ColumnOrigin::Singleton);
        c.is_maximal = g.is_maximal_independent(c.set);
        m.index.insert(c.set);
        m.columns.push(c);
    }
    m
}

impl RmpModel {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, s: VertexSet) -> bool {
        self.index.contains(&s)
    }

    /// Adds the sets not already present. Fails, without adding anything,
    /// if a set is empty or not independent in the model graph.
    pub fn add_columns(&mut self, sets: &[VertexSet]) -> Result<usize> {
        let cols: Vec<Column> = sets
            .iter()
            .map(|&s| Column::new(s, ColumnOrigin::Inherited))
            .collect();
        self.add_priced(cols)
    }

    /// Like [`add_columns`](Self::add_columns) but keeps the caller's
    /// bookkeeping (origin, reduced cost at discovery).
    pub fn add_priced(&mut self, cols: Vec<Column>) -> Result<usize> {
        for c in &cols {
            if c.set.is_empty() {
                return Err(Error::EmptyVertexSet);
            }
            if !c.set.is_subset(self.graph.vertices()) || !self.graph.is_independent(c.set) {
                return Err(Error::DependentColumn(c.set.iter().collect()));
            }
        }
        let mut added = 0;
        for mut c in cols {
            if self.index.insert(c.set) {
                c.is_maximal = self.graph.is_maximal_independent(c.set);
                self.columns.push(c);
                added += 1;
            }
        }
        Ok(added)
    }

    /// CPLEX LP text, for cross-checking with external solvers.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::from("\\ restricted master problem\nMinimize\n obj:");
        for j in 0..self.columns.len() {
            let _ = write!(out, " + x{j}");
        }
        out.push_str("\nSubject To\n");
        for v in 0..self.graph.n() {
            let _ = write!(out, " v{v}:");
            for (j, c) in self.columns.iter().enumerate() {
                if c.set.contains(v) {
                    let _ = write!(out, " + x{j}");
                }
            }
            out.push_str(" = 1\n");
        }
        out.push_str("Bounds\n");
        for j in 0..self.columns.len() {
            let _ = writeln!(out, " x{j} >= 0");
        }
        out.push_str("End\n");
        out
    }

    pub fn solve(&self) -> Result<RmpSolution> {
        solve_rmp(self)
    }
}

struct Simplex<'a> {
    m: usize,
    cols: &'a [Column],
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `m x m` basis inverse.
    binv: Vec<f64>,
    x: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        // Gauss-Jordan on [B | I] with partial pivoting
        let mut a: Vec<f64> = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for v in self.cols[j].set {
                a[v * m + k] = 1.0;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&r, &s| a[r * m + c].abs().total_cmp(&a[s * m + c].abs()))
                .expect("non-empty range");
            if a[p * m + c].abs() < PIVOT_TOL {
                return Err(Error::Numerical(format!("singular basis at column {c}")));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = a[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        // x_B = B^-1 · 1
        for i in 0..m {
            self.x[i] = self.binv[i * m..(i + 1) * m].iter().sum();
        }
        Ok(())
    }

    /// y = c_B^T B^-1 with unit costs.
    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            for (v, yv) in y.iter_mut().enumerate() {
                *yv += self.binv[i * m + v];
            }
        }
        y
    }

    fn reduced_cost(&self, y: &[f64], j: usize) -> f64 {
        1.0 - self.cols[j].set.iter().map(|v| y[v]).sum::<f64>()
    }

    fn run(&mut self) -> Result<usize> {
        let m = self.m;
        let mut pivots = 0;
        let mut degenerate_run = 0;
        let mut since_refactor = 0;
        loop {
            let y = self.duals();
            let bland = degenerate_run >= BLAND_AFTER;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols.len() {
                if self.in_basis[j] {
                    continue;
                }
                let d = self.reduced_cost(&y, j);
                if d < -OPTIMALITY_TOL {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((j, _)) = entering else {
                return Ok(pivots);
            };

            let mut u = vec![0.0; m];
            for (i, ui) in u.iter_mut().enumerate() {
                *ui = self.cols[j].set.iter().map(|v| self.binv[i * m + v]).sum();
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if u[i] > RATIO_TOL {
                    let theta = self.x[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((r, t)) => {
                            if theta < t - 1e-12 {
                                true
                            } else if theta <= t + 1e-12 {
                                if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    u[i] > u[r]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((i, theta));
                    }
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Numerical(format!("column {j} has an unbounded ray")));
            };
            if u[r].abs() < PIVOT_TOL {
                return Err(Error::Numerical(format!("pivot {} below tolerance", u[r])));
            }

            for i in 0..m {
                self.x[i] -= theta * u[i];
            }
            self.x[r] = theta;
            let pr = u[r];
            for k in 0..m {
                self.binv[r * m + k] /= pr;
            }
            for i in 0..m {
                if i != r && u[i] != 0.0 {
                    let f = u[i];
                    for k in 0..m {
                        self.binv[i * m + k] -= f * self.binv[r * m + k];
                    }
                }
            }
            self.in_basis[self.basis[r]] = false;
            self.in_basis[j] = true;
            self.basis[r] = j;

            pivots += 1;
            degenerate_run = if theta < 1e-12 { degenerate_run + 1 } else { 0 };
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            if pivots >= MAX_PIVOTS {
                return Err(Error::Numerical(format!(
                    "no convergence after {pivots} pivots"
                )));
            }
        }
    }
}

/// Optimal basic solution and duals of the model's LP.
pub fn solve_rmp(model: &RmpModel) -> Result<RmpSolution> {
    let m = model.graph.n();
    let cols = &model.columns;
    let mut basis = Vec::with_capacity(m);
    for v in 0..m {
        let s = VertexSet::singleton(v);
        let j = cols
            .iter()
            .position(|c| c.set == s)
            .ok_or(Error::UncoveredVertex(v))?;
        basis.push(j);
    }
    let mut in_basis = vec![false; cols.len()];
    for &j in &basis {
        in_basis[j] = true;
    }
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let mut sx = Simplex {
        m,
        cols,
        basis,
        in_basis,
        binv,
        x: vec![1.0; m],
    };
    let pivots = sx.run()?;
    sx.refactor()?;

    let mut lambda = vec![0.0; cols.len()];
    for (i, &j) in sx.basis.iter().enumerate() {
        let v = sx.x[i];
        if v < -FEASIBILITY_TOL {
            return Err(Error::Numerical(format!("negative basic value {v}")));
        }
        lambda[j] = v.max(0.0);
    }
    let duals = sx.duals();
    for v in 0..m {
        let cover: f64 = cols
            .iter()
            .zip(&lambda)
            .filter(|(c, _)| c.set.contains(v))
            .map(|(_, l)| l)
            .sum();
        if (cover - 1.0).abs() > FEASIBILITY_TOL {
            return Err(Error::Numerical(format!(
                "row {v} residual {}",
                cover - 1.0
            )));
        }
    }
    Ok(RmpSolution {
        objective: lambda.iter().sum(),
        lambda,
        duals,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn init_has_singletons() {
        let p3 = Graph::path(3).unwrap();
        let m = init_rmp(&p3);
        assert_eq!(
            m.columns().iter().map(|c| c.set).collect::<Vec<_>>(),
            vec![set(&[0]), set(&[1]), set(&[2])]
        );
        assert_eq!(init_rmp(&Graph::empty(1).unwrap()).len(), 1);
    }

    #[test]
    fn singleton_solution() {
        let g = Graph::cycle(5).unwrap();
        let s = solve_rmp(&init_rmp(&g)).unwrap();
        assert!((s.objective - 5.0).abs() < 1e-12);
        assert!(s.duals.iter().all(|&d| (d - 1.0).abs() < 1e-12));
    }

    #[test]
    fn add_dedup_and_reject() {
        let p3 = Graph::path(3).unwrap();
        let mut m = init_rmp(&p3);
        assert_eq!(m.add_columns(&[set(&[0, 2])]).unwrap(), 1);
        assert_eq!(m.len(), 4);
        assert_eq!(m.add_columns(&[set(&[0, 2])]).unwrap(), 0);
        assert!(matches!(
            m.add_columns(&[set(&[0, 1])]),
            Err(Error::DependentColumn(_))
        ));
        assert!(matches!(
            m.add_columns(&[set(&[5])]),
            Err(Error::DependentColumn(_))
        ));
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn p3_lp() {
        let p3 = Graph::path(3).unwrap();
        let mut m = init_rmp(&p3);
        m.add_columns(&[set(&[0, 2])]).unwrap();
        let s = solve_rmp(&m).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!((s.lambda[3] - 1.0).abs() < 1e-12);
        assert!((s.lambda[1] - 1.0).abs() < 1e-12);
        assert!((s.dual_objective() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn edgeless_full_column() {
        let g = Graph::empty(4).unwrap();
        let mut m = init_rmp(&g);
        m.add_columns(&[g.vertices()]).unwrap();
        assert!(m.columns()[4].is_maximal);
        let s = solve_rmp(&m).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_text() {
        let mut m = init_rmp(&Graph::path(3).unwrap());
        m.add_columns(&[set(&[0, 2])]).unwrap();
        let lp = m.to_lp_string();
        assert!(lp.contains(" v0: + x0 + x3 = 1"));
        assert!(lp.contains(" v1: + x1 = 1"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn missing_singleton_is_reported() {
        let m = RmpModel {
            graph: Graph::path(2).unwrap(),
            columns: vec![Column::new(set(&[0]), ColumnOrigin::Singleton)],
            index: HashSet::new(),
        };
        assert!(matches!(solve_rmp(&m), Err(Error::UncoveredVertex(1))));
    }
}
