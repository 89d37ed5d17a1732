//! Feasibility programs built from enumerator identities: the general
//! program for any partitioned Kraus set, the multi-gamma amplitude-damping
//! program, and the permutation-invariant program over orbit classes.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{amplitude_damping_set, KrausSet};
use crate::code::{beta, QuantumCode};
use crate::combinatorics::binomial;
use crate::connection::{build_connection, compressed_connection, krawtchouk, reduced_aux, ConnectionMatrices};
use crate::enumerator::{aux_vector, compute_enumerators, compute_sl_enumerators, pi_phi};
use crate::error::{out_of_range, Error, Result};
use crate::lp::{maximize, solve_feasibility, LpModel, SolverOptions, Status};
use crate::pauli::{group_size, OrbitClass, PauliString};
use crate::TOLERANCES;

const INF: f64 = f64::INFINITY;

fn aux_names(n: usize) -> impl FnMut(usize) -> String {
    let g = group_size(n);
    let labels: Vec<String> = (0..g)
        .map(|i| PauliString::from_index(n, i).expect("index in range").to_string())
        .collect();
    let mut pairs = Vec::with_capacity(g * (g + 1) / 2);
    for hi in 0..g {
        for lo in 0..=hi {
            pairs.push(format!("aux_{}_{}", labels[lo], labels[hi]));
        }
    }
    move |k| pairs[k].clone()
}

fn row_with(fixed: Vec<(usize, f64)>, aux: &Range<usize>, row: &[(usize, f64)], scale: f64) -> Vec<(usize, f64)> {
    let mut out = fixed;
    out.extend(row.iter().map(|&(c, v)| (aux.start + c, -v * scale)));
    out
}

/// Largest eigenvalue of `sum_W W^dag W`, which bounds `sum_i B_i`.
fn completeness_bound(ks: &KrausSet) -> f64 {
    let dim = 1usize << ks.num_qubits();
    let mut acc = nalgebra::DMatrix::<num_complex::Complex64>::zeros(dim, dim);
    for op in ks.classes().iter().flat_map(|c| &c.operators) {
        let d = op.to_dense();
        acc += d.adjoint() * &d;
    }
    acc.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max)
}

/// General program for a partitioned Kraus set.
#[derive(Clone, Debug)]
pub struct GeneralProgram {
    pub model: LpModel,
    pub n: usize,
    pub a: Range<usize>,
    pub b: Range<usize>,
    pub aux: Range<usize>,
}

/// Variables `A`, `B` (one per class) and swap-reduced `AUX`; rows
/// `trP^2 A = M_A AUX`, `trP B = M_B AUX`, `0 <= B_i - A_i <= eps_i`,
/// `sum B <= ||sum W^dag W||` (which is 1 for a channel) and `A >= 0`.
pub fn build_general_program(ks: &KrausSet, eps: &[f64], trace_p: f64) -> Result<GeneralProgram> {
    let w = ks.num_classes();
    if eps.len() != w {
        return Err(Error::Dimension(format!("{} tolerances for {w} classes", eps.len())));
    }
    if let Some(e) = eps.iter().find(|e| !(**e >= 0.0)) {
        return Err(out_of_range("epsilon", format!("{e} is negative")));
    }
    if !(trace_p > 0.0) {
        return Err(out_of_range("tr(P)", format!("{trace_p}")));
    }
    let n = ks.num_qubits();
    let cm = build_connection(ks)?;
    let mut model = LpModel::new();
    let a = model.add_vars(w, 0.0, INF, |i| format!("A_{i}"));
    let b = model.add_vars(w, -INF, INF, |i| format!("B_{i}"));
    let box_ = trace_p * trace_p;
    let aux = model.add_vars(cm.num_cols(), -box_, box_, aux_names(n));
    for i in 0..w {
        model.add_eq(format!("ma_{i}"), row_with(vec![(a.start + i, box_)], &aux, cm.m_a.row(i), 1.0), 0.0)?;
        model.add_eq(format!("mb_{i}"), row_with(vec![(b.start + i, trace_p)], &aux, cm.m_b.row(i), 1.0), 0.0)?;
        model.add_ge(format!("ba_{i}"), vec![(b.start + i, 1.0), (a.start + i, -1.0)], 0.0)?;
        model.add_le(format!("eps_{i}"), vec![(b.start + i, 1.0), (a.start + i, -1.0)], eps[i])?;
    }
    model.add_le("sum_b", b.clone().map(|j| (j, 1.0)).collect(), completeness_bound(ks))?;
    Ok(GeneralProgram { model, n, a, b, aux })
}

impl GeneralProgram {
    /// The point given by a code's true enumerators and auxiliary vector.
    pub fn witness(&self, code: &QuantumCode, ks: &KrausSet) -> Result<Vec<f64>> {
        let e = compute_enumerators(code, ks)?;
        let mut x = vec![0.0; self.model.num_vars()];
        x[self.a.clone()].copy_from_slice(&e.a);
        x[self.b.clone()].copy_from_slice(&e.b);
        x[self.aux.clone()].copy_from_slice(&reduced_aux(aux_vector(code)?.values()));
        Ok(x)
    }
}

/// Multi-gamma amplitude-damping program for `(t, c)`-approximate codes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdProgramSpec {
    pub n: usize,
    /// Code dimension `tr(P)`.
    #[serde(rename = "M")]
    pub m: usize,
    pub t: usize,
    pub c: f64,
    pub gammas: Vec<f64>,
    /// `A_0 >= (1 - gamma)^n`.
    #[serde(default)]
    pub strengthen_a0_floor: bool,
    /// `AUX_(I,I) = trP^2`.
    #[serde(default)]
    pub strengthen_aux_identity: bool,
    /// `AUX_(sigma,sigma) >= 0`.
    #[serde(default)]
    pub strengthen_aux_diag: bool,
}

impl AdProgramSpec {
    pub fn new(n: usize, m: usize, t: usize, c: f64, gammas: Vec<f64>) -> Self {
        Self {
            n,
            m,
            t,
            c,
            gammas,
            strengthen_a0_floor: false,
            strengthen_aux_identity: false,
            strengthen_aux_diag: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::InvalidSpec("no gamma values".into()));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g > 0.0 && **g <= 1.0)) {
            return Err(Error::InvalidSpec(format!("gamma {g} not in (0, 1]")));
        }
        if self.t > self.n {
            return Err(Error::InvalidSpec(format!("t = {} > n = {}", self.t, self.n)));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidSpec(format!("c = {} must be positive", self.c)));
        }
        if self.m == 0 || self.m > 1 << self.n {
            return Err(Error::InvalidSpec(format!("M = {} out of range", self.m)));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct AdProgram {
    pub spec: AdProgramSpec,
    pub model: LpModel,
    /// `a_i = A_i / gamma^i` per gamma.
    pub a: Vec<Range<usize>>,
    /// `b_i = B_i / gamma^i` per gamma.
    pub b: Vec<Range<usize>>,
    pub aux: Range<usize>,
}

/// Per gamma, in variables scaled by `gamma^-i`:
/// `M^2 a_i = gamma^-i M_A[i] AUX`, `M b_i = gamma^-i M_B[i] AUX`,
/// `b_i - a_i <= c gamma^(t+1-i)` for `i <= t`, `b_i - a_i >= 0`,
/// `b_i <= min(C(n,i), C(n,i) 2^(n-i) / M)`, `sum_i gamma^i b_i <= 1` and
/// `a >= 0`. All gammas share one `AUX` block boxed by `[-M^2, M^2]`.
pub fn build_ad_program(spec: &AdProgramSpec) -> Result<AdProgram> {
    spec.validate()?;
    let n = spec.n;
    let mf = spec.m as f64;
    let conns: Vec<ConnectionMatrices> = spec
        .gammas
        .par_iter()
        .map(|&g| build_connection(&amplitude_damping_set(n, g)?))
        .collect::<Result<_>>()?;
    let mut model = LpModel::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, &g) in spec.gammas.iter().enumerate() {
        a.push(model.add_vars(n + 1, 0.0, INF, |i| format!("a_g{k}_{i}")));
        let br = model.add_vars(n + 1, 0.0, INF, |i| format!("b_g{k}_{i}"));
        for i in 0..=n {
            let c = binomial(n as u64, i as u64)? as f64;
            model.set_bounds(br.start + i, 0.0, c.min(c * 2f64.powi((n - i) as i32) / mf));
        }
        b.push(br);
        if spec.strengthen_a0_floor {
            let j = a[k].start;
            model.set_bounds(j, (1.0 - g).powi(n as i32), INF);
        }
    }
    let box_ = mf * mf;
    let aux = model.add_vars(conns[0].num_cols(), -box_, box_, aux_names(n));
    if spec.strengthen_aux_identity {
        model.set_bounds(aux.start, box_, box_);
    }
    if spec.strengthen_aux_diag {
        for h in 0..group_size(n) {
            let j = aux.start + h * (h + 1) / 2 + h;
            if !(spec.strengthen_aux_identity && h == 0) {
                model.set_bounds(j, 0.0, box_);
            }
        }
    }
    for (k, (&g, cm)) in spec.gammas.iter().zip(&conns).enumerate() {
        let (ak, bk) = (a[k].start, b[k].start);
        for i in 0..=n {
            let s = g.powi(-(i as i32));
            model.add_eq(format!("ma_g{k}_{i}"), row_with(vec![(ak + i, box_)], &aux, cm.m_a.row(i), s), 0.0)?;
            model.add_eq(format!("mb_g{k}_{i}"), row_with(vec![(bk + i, mf)], &aux, cm.m_b.row(i), s), 0.0)?;
            if i <= spec.t {
                model.add_le(
                    format!("tc_g{k}_{i}"),
                    vec![(bk + i, 1.0), (ak + i, -1.0)],
                    spec.c * g.powi((spec.t + 1 - i) as i32),
                )?;
            }
            model.add_ge(format!("ba_g{k}_{i}"), vec![(bk + i, 1.0), (ak + i, -1.0)], 0.0)?;
        }
        model.add_le(
            format!("sum_b_g{k}"),
            (0..=n).map(|i| (bk + i, g.powi(i as i32))).collect(),
            1.0,
        )?;
    }
    Ok(AdProgram {
        spec: spec.clone(),
        model,
        a,
        b,
        aux,
    })
}

impl AdProgram {
    pub fn witness(&self, code: &QuantumCode) -> Result<Vec<f64>> {
        if code.num_qubits() != self.spec.n {
            return Err(Error::QubitMismatch(self.spec.n, code.num_qubits()));
        }
        let mut x = vec![0.0; self.model.num_vars()];
        for (k, &g) in self.spec.gammas.iter().enumerate() {
            let e = compute_enumerators(code, &amplitude_damping_set(self.spec.n, g)?)?;
            for i in 0..=self.spec.n {
                let s = g.powi(-(i as i32));
                x[self.a[k].start + i] = e.a[i] * s;
                x[self.b[k].start + i] = e.b[i] * s;
            }
        }
        x[self.aux.clone()].copy_from_slice(&reduced_aux(aux_vector(code)?.values()));
        Ok(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    /// Orbit-compressed program for codes with nonnegative Dicke coefficients.
    PiNonneg,
    /// Only the MacWilliams identities on Shor-Laflamme enumerators.
    #[serde(rename = "macwilliams_only")]
    MacWilliamsOnly,
}

impl std::str::FromStr for PiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi_nonneg" | "pi" => Ok(PiMode::PiNonneg),
            "macwilliams_only" | "macwilliams" | "mw" => Ok(PiMode::MacWilliamsOnly),
            _ => Err(Error::InvalidSpec(format!("unknown mode {s}"))),
        }
    }
}

impl std::fmt::Display for PiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PiMode::PiNonneg => "pi_nonneg",
            PiMode::MacWilliamsOnly => "macwilliams_only",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiProgramSpec {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    #[serde(default = "default_strict")]
    pub epsilon_strict: f64,
    #[serde(default = "default_mode")]
    pub mode: PiMode,
}

fn default_strict() -> f64 {
    TOLERANCES.strict
}

fn default_mode() -> PiMode {
    PiMode::PiNonneg
}

impl PiProgramSpec {
    pub fn new(n: usize, m: usize, d: usize) -> Self {
        Self {
            n,
            m,
            d,
            epsilon_strict: TOLERANCES.strict,
            mode: PiMode::PiNonneg,
        }
    }

    pub fn with_mode(mut self, mode: PiMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > self.n {
            return Err(Error::InvalidSpec(format!("d = {} not in [1, n = {}]", self.d, self.n)));
        }
        if self.m == 0 || self.m > self.n + 1 {
            return Err(Error::InvalidSpec(format!("M = {} not in [1, n + 1]", self.m)));
        }
        if self.n > crate::pauli::MAX_ORBIT_QUBITS {
            return Err(Error::TooManyQubits {
                what: "permutation-invariant program",
                n: self.n,
                limit: crate::pauli::MAX_ORBIT_QUBITS,
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct PiProgram {
    pub spec: PiProgramSpec,
    pub model: LpModel,
    pub a: Range<usize>,
    pub b: Range<usize>,
    /// Orbit-class variables in canonical order; absent in MacWilliams-only mode.
    pub pi: Option<Range<usize>>,
}

/// Lower bound `tau` on `pi_{x,0,0}` for even `x`:
/// `beta_{n,x}^2 max(M - x, 0)^2`.
pub fn tau_bound(n: usize, m: usize, x: usize) -> Result<f64> {
    let slack = m.saturating_sub(x) as f64;
    Ok(beta(n, x)?.powi(2) * slack * slack)
}

/// Shor-Laflamme enumerators `A`, `B` of length `n + 1` with `A_0 = 1`,
/// `B = M_MacW A`, `A_i = B_i` for `i < d`, `B_i >= A_i` for `i >= d` and
/// `A, B >= 0`. In [`PiMode::PiNonneg`] mode also `pi` with
/// `0 <= pi <= M^2`, `pi_(0,0,0) = M^2`, `M^2 A = H_A pi`, `M B = H_B pi`
/// and `pi_{x,0,0} >= tau` for even `x`. The objective is `A_2`.
pub fn build_pi_program(spec: &PiProgramSpec) -> Result<PiProgram> {
    spec.validate()?;
    let n = spec.n;
    let mf = spec.m as f64;
    let mut model = LpModel::new();
    let a = model.add_vars(n + 1, 0.0, INF, |i| format!("A_{i}"));
    let b = model.add_vars(n + 1, 0.0, INF, |i| format!("B_{i}"));
    model.add_eq("a0", vec![(a.start, 1.0)], 1.0)?;
    let scale = mf / 2f64.powi(n as i32);
    for i in 0..=n {
        let mut row: Vec<(usize, f64)> = (0..=n)
            .map(|j| Ok((a.start + j, scale * krawtchouk(i as u64, j as u64, n as u64)? as f64)))
            .collect::<Result<_>>()?;
        row.push((b.start + i, -1.0));
        model.add_eq(format!("macw_{i}"), row, 0.0)?;
    }
    for i in 0..=n {
        let row = vec![(a.start + i, 1.0), (b.start + i, -1.0)];
        if i < spec.d {
            model.add_eq(format!("det_{i}"), row, 0.0)?;
        } else {
            model.add_le(format!("ba_{i}"), row, 0.0)?;
        }
    }
    let pi = if spec.mode == PiMode::PiNonneg {
        let cc = compressed_connection(n)?;
        let box_ = mf * mf;
        let pi = model.add_vars(cc.classes.len(), 0.0, box_, |k| {
            let c = cc.classes[k];
            format!("pi_{}_{}_{}", c.x, c.y, c.z)
        });
        model.add_eq("pi_id", vec![(pi.start, 1.0)], box_)?;
        for i in 0..=n {
            let mut ra = vec![(a.start + i, box_)];
            let mut rb = vec![(b.start + i, mf)];
            for k in 0..cc.classes.len() {
                ra.push((pi.start + k, -cc.h_a[(i, k)]));
                rb.push((pi.start + k, -cc.h_b[(i, k)]));
            }
            model.add_eq(format!("ha_{i}"), ra, 0.0)?;
            model.add_eq(format!("hb_{i}"), rb, 0.0)?;
        }
        for x in (0..=n).step_by(2) {
            let k = OrbitClass::new(n, x, 0, 0)?.index();
            model.add_ge(format!("tau_{x}"), vec![(pi.start + k, 1.0)], tau_bound(n, spec.m, x)?)?;
        }
        Some(pi)
    } else {
        None
    };
    if n >= 2 {
        model.set_objective_coeff(a.start + 2, 1.0);
    }
    Ok(PiProgram {
        spec: spec.clone(),
        model,
        a,
        b,
        pi,
    })
}

impl PiProgram {
    pub fn witness(&self, code: &QuantumCode) -> Result<Vec<f64>> {
        if code.num_qubits() != self.spec.n {
            return Err(Error::QubitMismatch(self.spec.n, code.num_qubits()));
        }
        let sl = compute_sl_enumerators(code)?;
        let mut x = vec![0.0; self.model.num_vars()];
        x[self.a.clone()].copy_from_slice(&sl.a);
        x[self.b.clone()].copy_from_slice(&sl.b);
        if let Some(pi) = &self.pi {
            let phi = pi_phi(code)?;
            for (k, v) in phi.iter().enumerate() {
                x[pi.start + k] = v * v;
            }
        }
        Ok(x)
    }
}

/// Outcome of one dimension `M` during a [`max_dimension`] scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionProbe {
    #[serde(rename = "M")]
    pub m: usize,
    pub status: Status,
    /// Maximized `A_2` when the strictness test applied.
    pub max_a2: Option<f64>,
    pub admitted: bool,
}

/// Whether the program for `spec` admits a code. Numerical outcomes are
/// treated as admitting one.
pub fn probe_dimension(spec: &PiProgramSpec, opts: &SolverOptions) -> Result<DimensionProbe> {
    let prog = build_pi_program(spec)?;
    let strict = spec.mode == PiMode::PiNonneg && spec.m == 2 && spec.d >= 2;
    if strict {
        let r = maximize(&prog.model, opts)?;
        let value = r.value();
        let admitted = match r.verdict.status {
            Status::Infeasible => false,
            Status::Numerical => true,
            Status::Feasible => value.map_or(true, |v| v > spec.epsilon_strict),
        };
        Ok(DimensionProbe {
            m: spec.m,
            status: r.verdict.status,
            max_a2: value,
            admitted,
        })
    } else {
        let v = solve_feasibility(&prog.model, opts)?;
        Ok(DimensionProbe {
            m: spec.m,
            status: v.status,
            max_a2: None,
            admitted: v.status != Status::Infeasible,
        })
    }
}

/// Largest `M <= n + 1` admitted by the program, scanning downward; zero
/// when none is.
pub fn max_dimension(n: usize, d: usize, mode: PiMode, opts: &SolverOptions) -> Result<usize> {
    Ok(max_dimension_trace(n, d, mode, opts)?.0)
}

/// As [`max_dimension`], also returning every probe made.
pub fn max_dimension_trace(
    n: usize,
    d: usize,
    mode: PiMode,
    opts: &SolverOptions,
) -> Result<(usize, Vec<DimensionProbe>)> {
    let mut probes = Vec::new();
    for m in (1..=n + 1).rev() {
        let p = probe_dimension(&PiProgramSpec::new(n, m, d).with_mode(mode), opts)?;
        let ok = p.admitted;
        probes.push(p);
        if ok {
            return Ok((m, probes));
        }
    }
    Ok((0, probes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub n: usize,
    pub d: usize,
    pub mode: PiMode,
    #[serde(rename = "M")]
    pub bound: usize,
}

/// Upper bounds for every `(n, d)` pair, computed in parallel.
pub fn table_sweep(cells: &[(usize, usize)], mode: PiMode, opts: &SolverOptions) -> Result<Vec<TableCell>> {
    cells
        .par_iter()
        .map(|&(n, d)| {
            Ok(TableCell {
                n,
                d,
                mode,
                bound: max_dimension(n, d, mode, opts)?,
            })
        })
        .collect()
}

/// Markdown grid with one row per `d` and one column per `n`; missing
/// cells are blank.
pub fn render_markdown(cells: &[TableCell]) -> String {
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    let mut ds: Vec<usize> = cells.iter().map(|c| c.d).collect();
    ns.sort_unstable();
    ns.dedup();
    ds.sort_unstable();
    ds.dedup();
    let mut out = String::from("| |");
    for n in &ns {
        out.push_str(&format!(" n={n} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(ns.len()));
    out.push('\n');
    for d in &ds {
        out.push_str(&format!("| d={d} |"));
        for n in &ns {
            match cells.iter().find(|c| c.n == *n && c.d == *d) {
                Some(c) => out.push_str(&format!(" {} |", c.bound)),
                None => out.push_str("  |"),
            }
        }
        out.push('\n');
    }
    out
}
