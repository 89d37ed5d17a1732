//! Bounded-variable two-phase primal revised simplex.
//!
//! Rows are scaled to unit infinity norm, then columns. `<=` rows receive a
//! slack in `[0, inf)`, every row an artificial whose sign matches the initial
//! residual. The basis inverse is kept explicitly, updated by elementary row
//! operations and rebuilt from an LU factorization at a fixed interval.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::model::{LpModel, Sense};
use super::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic, held at zero.
    Zero,
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
    Singular,
}

pub(crate) struct Simplex {
    m: usize,
    n_struct: usize,
    /// Compressed columns: structurals, then slacks, then artificials.
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    /// Row-major `m x m` basis inverse.
    binv: Vec<f64>,
    pub(crate) row_scale: Vec<f64>,
    pub(crate) col_scale: Vec<f64>,
    first_art: usize,
    since_refactor: usize,
    pub(crate) iterations: usize,
    max_iterations: usize,
    opts: SolverOptions,
}

const PRIMAL_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;

impl Simplex {
    pub(crate) fn new(model: &LpModel, opts: &SolverOptions) -> Self {
        let m = model.num_constraints();
        let n = model.num_vars();
        let rows = model.constraints();

        let row_scale: Vec<f64> = rows
            .iter()
            .map(|c| {
                let s = c.max_abs_coeff();
                if s > 0.0 {
                    1.0 / s
                } else {
                    1.0
                }
            })
            .collect();
        let mut col_max = vec![0.0f64; n];
        for (i, c) in rows.iter().enumerate() {
            for &(j, v) in &c.coeffs {
                col_max[j] = col_max[j].max((v * row_scale[i]).abs());
            }
        }
        let col_scale: Vec<f64> = col_max
            .iter()
            .map(|&s| if s > 0.0 { 1.0 / s } else { 1.0 })
            .collect();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, c) in rows.iter().enumerate() {
            for &(j, v) in &c.coeffs {
                cols[j].push((i, v * row_scale[i] * col_scale[j]));
            }
        }
        let b: Vec<f64> = rows.iter().zip(&row_scale).map(|(c, s)| c.rhs * s).collect();

        let mut lo: Vec<f64> = (0..n).map(|j| model.lower()[j] / col_scale[j]).collect();
        let mut up: Vec<f64> = (0..n).map(|j| model.upper()[j] / col_scale[j]).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                if lo[j].is_finite() {
                    lo[j]
                } else if up[j].is_finite() {
                    up[j]
                } else {
                    0.0
                }
            })
            .collect();
        let mut state: Vec<VarState> = (0..n)
            .map(|j| {
                if lo[j].is_finite() {
                    VarState::Lower
                } else if up[j].is_finite() {
                    VarState::Upper
                } else {
                    VarState::Zero
                }
            })
            .collect();

        let mut resid = b.clone();
        for (j, col) in cols.iter().enumerate() {
            if x[j] != 0.0 {
                for &(i, v) in col {
                    resid[i] -= v * x[j];
                }
            }
        }

        let mut head = vec![0; m];
        let mut binv = vec![0.0; m * m];
        let slack_of: Vec<Option<usize>> = {
            let mut next = n;
            rows.iter()
                .map(|c| {
                    if c.sense == Sense::Le {
                        next += 1;
                        Some(next - 1)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let n_slack = slack_of.iter().flatten().count();
        let first_art = n + n_slack;
        for (i, s) in slack_of.iter().enumerate() {
            if s.is_some() {
                cols.push(vec![(i, 1.0)]);
            }
        }
        for _ in 0..n_slack {
            lo.push(0.0);
            up.push(f64::INFINITY);
            x.push(0.0);
            state.push(VarState::Lower);
        }
        for i in 0..m {
            let art = first_art + i;
            let use_slack = matches!(slack_of[i], Some(_)) && resid[i] >= 0.0;
            let sign = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
            cols.push(vec![(i, sign)]);
            lo.push(0.0);
            if use_slack {
                let s = slack_of[i].expect("slack exists");
                up.push(0.0);
                x.push(0.0);
                state.push(VarState::Lower);
                head[i] = s;
                x[s] = resid[i];
                state[s] = VarState::Basic;
                binv[i * m + i] = 1.0;
            } else {
                up.push(f64::INFINITY);
                x.push(resid[i].abs());
                state.push(VarState::Basic);
                head[i] = art;
                binv[i * m + i] = sign;
            }
        }

        let mut col_start = Vec::with_capacity(cols.len() + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_start.push(0);
        for col in &cols {
            for &(i, v) in col {
                row_idx.push(i);
                vals.push(v);
            }
            col_start.push(row_idx.len());
        }
        let total = cols.len();
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        let max_iterations = if opts.max_iterations > 0 {
            opts.max_iterations
        } else {
            20_000 + 20 * (m + total)
        };
        Self {
            m,
            n_struct: n,
            col_start,
            row_idx,
            vals,
            lo,
            up,
            cost,
            b,
            x,
            state,
            head,
            binv,
            row_scale,
            col_scale,
            first_art,
            since_refactor: 0,
            iterations: 0,
            max_iterations,
            opts: opts.clone(),
        }
    }

    fn ncols(&self) -> usize {
        self.col_start.len() - 1
    }

    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        self.row_idx[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &h) in self.head.iter().enumerate() {
            let c = self.cost[h];
            if c != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yi, bi) in y.iter_mut().zip(row) {
                    *yi += c * bi;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        self.cost[j] - self.column(j).map(|(i, v)| y[i] * v).sum::<f64>()
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for (i, v) in self.column(j) {
            for (k, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[k * m + i] * v;
            }
        }
        alpha
    }

    /// Rebuilds the basis inverse and recomputes basic values.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return true;
        }
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (k, &h) in self.head.iter().enumerate() {
            let (s, e) = (self.col_start[h], self.col_start[h + 1]);
            for t in s..e {
                bmat[(self.row_idx[t], k)] = self.vals[t];
            }
        }
        let Some(inv) = bmat.lu().try_inverse() else {
            return false;
        };
        for k in 0..m {
            for i in 0..m {
                self.binv[k * m + i] = inv[(k, i)];
            }
        }
        let mut rhs = self.b.clone();
        for j in 0..self.ncols() {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                let (s, e) = (self.col_start[j], self.col_start[j + 1]);
                for t in s..e {
                    rhs[self.row_idx[t]] -= self.vals[t] * xj;
                }
            }
        }
        for k in 0..m {
            let v: f64 = (0..m).map(|i| self.binv[k * m + i] * rhs[i]).sum();
            self.x[self.head[k]] = v;
        }
        true
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Entering candidate `(column, direction)`.
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let tol = self.opts.optimality_tol;
        let scored: Vec<Option<(usize, f64, f64)>> = (0..self.ncols())
            .into_par_iter()
            .map(|j| {
                let st = self.state[j];
                if st == VarState::Basic || self.lo[j] == self.up[j] {
                    return None;
                }
                let d = self.reduced_cost(j, y);
                let dir = match st {
                    VarState::Lower if d < -tol => 1.0,
                    VarState::Upper if d > tol => -1.0,
                    VarState::Zero if d.abs() > tol => -d.signum(),
                    _ => return None,
                };
                Some((j, dir, d.abs()))
            })
            .collect();
        let mut best: Option<(usize, f64, f64)> = None;
        for c in scored.into_iter().flatten() {
            if bland {
                return Some((c.0, c.1));
            }
            if best.map_or(true, |b| c.2 > b.2) {
                best = Some(c);
            }
        }
        best.map(|b| (b.0, b.1))
    }

    /// Runs the simplex on the current cost vector.
    pub(crate) fn run(&mut self) -> PhaseEnd {
        let m = self.m;
        let mut degenerate = 0usize;
        let mut bland = self.opts.bland_after == 0;
        loop {
            if self.iterations >= self.max_iterations {
                return PhaseEnd::IterationLimit;
            }
            if self.since_refactor >= self.opts.refactor_every && !self.refactor() {
                return PhaseEnd::Singular;
            }
            let y = self.duals();
            let Some((q, dir)) = self.price(&y, bland) else {
                return PhaseEnd::Optimal;
            };
            self.iterations += 1;
            let alpha = self.ftran(q);

            let flip = self.up[q] - self.lo[q];
            let mut leave: Option<(usize, f64)> = None;
            if bland {
                for k in 0..m {
                    if let Some(r) = self.ratio(k, alpha[k] * dir, 0.0) {
                        let better = match leave {
                            None => true,
                            Some((kk, t)) => {
                                r < t || (r == t && self.head[k] < self.head[kk])
                            }
                        };
                        if better {
                            leave = Some((k, r));
                        }
                    }
                }
            } else {
                let mut tmax = f64::INFINITY;
                for k in 0..m {
                    if let Some(r) = self.ratio(k, alpha[k] * dir, PRIMAL_TOL) {
                        tmax = tmax.min(r);
                    }
                }
                if tmax.is_finite() {
                    let mut best_piv = 0.0;
                    for k in 0..m {
                        if let Some(r) = self.ratio(k, alpha[k] * dir, 0.0) {
                            if r <= tmax && alpha[k].abs() > best_piv {
                                best_piv = alpha[k].abs();
                                leave = Some((k, r.max(0.0)));
                            }
                        }
                    }
                }
            }

            let step = match leave {
                Some((_, t)) if t < flip => t,
                _ if flip.is_finite() => {
                    // bound flip, basis unchanged
                    for k in 0..m {
                        self.x[self.head[k]] -= dir * flip * alpha[k];
                    }
                    if dir > 0.0 {
                        self.x[q] = self.up[q];
                        self.state[q] = VarState::Upper;
                    } else {
                        self.x[q] = self.lo[q];
                        self.state[q] = VarState::Lower;
                    }
                    degenerate = 0;
                    continue;
                }
                Some((_, t)) => t,
                None => return PhaseEnd::Unbounded,
            };
            let (r, _) = leave.expect("leaving row chosen");

            if step <= DEGENERATE_STEP {
                degenerate += 1;
                if degenerate >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }

            for k in 0..m {
                self.x[self.head[k]] -= dir * step * alpha[k];
            }
            self.x[q] += dir * step;
            let out = self.head[r];
            let rate = -dir * alpha[r];
            if rate < 0.0 {
                self.x[out] = self.lo[out];
                self.state[out] = VarState::Lower;
            } else {
                self.x[out] = self.up[out];
                self.state[out] = VarState::Upper;
            }
            self.state[q] = VarState::Basic;
            self.head[r] = q;

            let piv = alpha[r];
            let (before, rest) = self.binv.split_at_mut(r * m);
            let (prow, after) = rest.split_at_mut(m);
            prow.iter_mut().for_each(|v| *v /= piv);
            for (k, chunk) in before.chunks_mut(m).chain(after.chunks_mut(m)).enumerate() {
                let kk = if k < r { k } else { k + 1 };
                let a = alpha[kk];
                if a != 0.0 {
                    for (v, p) in chunk.iter_mut().zip(prow.iter()) {
                        *v -= a * p;
                    }
                }
            }
            self.since_refactor += 1;
        }
    }

    /// Step length at which basic `k` hits a bound when it moves at rate
    /// `-dir_alpha`, with bounds relaxed by `relax`.
    fn ratio(&self, k: usize, dir_alpha: f64, relax: f64) -> Option<f64> {
        if dir_alpha.abs() <= self.opts.pivot_tol {
            return None;
        }
        let h = self.head[k];
        let xk = self.x[h];
        if dir_alpha > 0.0 {
            let lo = self.lo[h];
            lo.is_finite().then(|| (xk - lo + relax) / dir_alpha)
        } else {
            let up = self.up[h];
            up.is_finite().then(|| (up - xk + relax) / -dir_alpha)
        }
    }

    /// Phase 1: minimize the sum of artificials. Returns the end state and
    /// the remaining infeasibility.
    pub(crate) fn phase_one(&mut self) -> (PhaseEnd, f64) {
        let end = self.run();
        if end == PhaseEnd::Optimal && !self.refactor() {
            return (PhaseEnd::Singular, f64::INFINITY);
        }
        let z = self.objective();
        (end, z)
    }

    /// Fixes artificials at zero and installs the phase-2 cost
    /// (minimization, in model units).
    pub(crate) fn start_phase_two(&mut self, objective: &[f64]) {
        for j in self.first_art..self.ncols() {
            self.up[j] = 0.0;
            self.cost[j] = 0.0;
            if self.state[j] != VarState::Basic {
                self.x[j] = 0.0;
                self.state[j] = VarState::Lower;
            }
        }
        for j in 0..self.ncols() {
            self.cost[j] = if j < self.n_struct {
                objective[j] * self.col_scale[j]
            } else {
                0.0
            };
        }
    }

    pub(crate) fn finish(&mut self) -> bool {
        self.refactor()
    }

    /// Row duals `y = c_B B^-1` expressed for the unscaled rows.
    pub(crate) fn model_duals(&self) -> Vec<f64> {
        self.duals()
            .iter()
            .zip(&self.row_scale)
            .map(|(y, r)| y * r)
            .collect()
    }

    /// Structural values in model units.
    pub(crate) fn model_point(&self, model: &LpModel) -> Vec<f64> {
        (0..self.n_struct)
            .map(|j| {
                (self.x[j] * self.col_scale[j]).clamp(model.lower()[j], model.upper()[j])
            })
            .collect()
    }
}
