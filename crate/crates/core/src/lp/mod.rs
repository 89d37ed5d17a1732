//! Linear programs: data model, a primal simplex solver with Farkas
//! certificates, and LP-format export.

mod export;
mod model;
mod simplex;

pub use export::{parse_lp, write_lp};
pub use model::{Constraint, LpModel, Sense};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::TOLERANCES;
use simplex::{PhaseEnd, Simplex};

/// Solver tolerances and limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest row-normalized violation accepted for a witness.
    pub feasibility_tol: f64,
    /// Smallest margin accepted for a Farkas certificate.
    pub certificate_tol: f64,
    /// Reduced-cost threshold in the scaled problem.
    pub optimality_tol: f64,
    /// Smallest pivot magnitude.
    pub pivot_tol: f64,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Zero picks a limit from the problem size.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: TOLERANCES.feasibility,
            certificate_tol: TOLERANCES.certificate,
            optimality_tol: 1e-9,
            pivot_tol: 1e-7,
            refactor_every: 50,
            bland_after: 100,
            max_iterations: 0,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            feasibility_tol: tol,
            ..Self::default()
        }
    }

    /// Progressively more conservative settings tried after a numerical
    /// breakdown.
    fn fallbacks(&self) -> [SolverOptions; 3] {
        [
            self.clone(),
            SolverOptions {
                pivot_tol: self.pivot_tol * 100.0,
                refactor_every: 10,
                ..self.clone()
            },
            SolverOptions {
                pivot_tol: self.pivot_tol * 100.0,
                refactor_every: 5,
                bland_after: 0,
                ..self.clone()
            },
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Feasible,
    Infeasible,
    /// Primal and dual evidence disagree or the solver broke down.
    Numerical,
}

/// Row multipliers `y` with `y_i <= 0` on `<=` rows such that
/// `y.b > sup { (A^T y).x : x in box }`; `margin` is the gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub multipliers: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub status: Status,
    pub witness: Option<Vec<f64>>,
    pub certificate: Option<FarkasCertificate>,
    /// Row-normalized violation of the witness, or the remaining phase-one
    /// infeasibility when there is none.
    pub primal_residual: f64,
    pub iterations: usize,
    pub message: Option<String>,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == Status::Infeasible
    }

    /// `{"status", "certificate", "objective"}`.
    pub fn to_json(&self, objective: Option<f64>) -> String {
        serde_json::json!({
            "status": self.status,
            "certificate": self.certificate.as_ref().map(|c| &c.multipliers),
            "margin": self.certificate.as_ref().map(|c| c.margin),
            "objective": objective,
            "primal_residual": self.primal_residual,
            "iterations": self.iterations,
        })
        .to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Optimum {
    Finite(f64),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizeResult {
    pub verdict: FeasibilityVerdict,
    /// Present when the program is feasible and phase two ended cleanly.
    pub optimum: Option<Optimum>,
    /// Row multipliers for the maximization, `>= 0` on `<=` rows.
    pub duals: Option<Vec<f64>>,
}

impl MaximizeResult {
    pub fn value(&self) -> Option<f64> {
        match self.optimum {
            Some(Optimum::Finite(v)) => Some(v),
            _ => None,
        }
    }
}

/// Checks a certificate against the model; returns its margin.
pub fn verify_certificate(model: &LpModel, y: &[f64], tol: f64) -> Result<f64> {
    use crate::error::Error;
    if y.len() != model.num_constraints() {
        return Err(Error::Dimension(format!(
            "{} multipliers for {} rows",
            y.len(),
            model.num_constraints()
        )));
    }
    let mut g = vec![0.0; model.num_vars()];
    let mut yb = 0.0;
    for (c, &yi) in model.constraints().iter().zip(y) {
        if c.sense == Sense::Le && yi > 0.0 {
            return Err(Error::InvalidModel(format!(
                "positive multiplier {yi} on inequality {}",
                c.name
            )));
        }
        yb += yi * c.rhs;
        for &(j, v) in &c.coeffs {
            g[j] += yi * v;
        }
    }
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut sup = 0.0;
    for (j, &gj) in g.iter().enumerate() {
        let bound = if gj > 0.0 {
            model.upper()[j]
        } else {
            model.lower()[j]
        };
        if bound.is_finite() {
            sup += gj * bound;
        } else if gj.abs() > tol * scale {
            return Err(Error::InvalidModel(format!(
                "multipliers leave variable {} unbounded",
                model.names()[j]
            )));
        }
    }
    Ok((yb - sup) / scale)
}

fn infeasible_verdict(model: &LpModel, s: &Simplex, z: f64, opts: &SolverOptions) -> FeasibilityVerdict {
    let mut y = s.model_duals();
    for (yi, c) in y.iter_mut().zip(model.constraints()) {
        if c.sense == Sense::Le {
            *yi = yi.min(0.0);
        }
    }
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        y.iter_mut().for_each(|v| *v /= scale);
    }
    match verify_certificate(model, &y, opts.certificate_tol) {
        Ok(margin) if margin > opts.certificate_tol => FeasibilityVerdict {
            status: Status::Infeasible,
            witness: None,
            certificate: Some(FarkasCertificate {
                multipliers: y,
                margin,
            }),
            primal_residual: z,
            iterations: s.iterations,
            message: None,
        },
        other => FeasibilityVerdict {
            status: Status::Numerical,
            witness: None,
            certificate: None,
            primal_residual: z,
            iterations: s.iterations,
            message: Some(match other {
                Ok(margin) => format!("phase one left {z:e} but the certificate margin is only {margin:e}"),
                Err(e) => format!("phase one left {z:e} but the certificate failed: {e}"),
            }),
        },
    }
}

fn numerical(s: &Simplex, msg: String) -> FeasibilityVerdict {
    FeasibilityVerdict {
        status: Status::Numerical,
        witness: None,
        certificate: None,
        primal_residual: f64::INFINITY,
        iterations: s.iterations,
        message: Some(msg),
    }
}

fn phase_one(model: &LpModel, opts: &SolverOptions) -> Result<(Simplex, FeasibilityVerdict)> {
    model.validate()?;
    let mut s = Simplex::new(model, opts);
    let (end, z) = s.phase_one();
    let verdict = match end {
        PhaseEnd::Optimal if z > opts.feasibility_tol => infeasible_verdict(model, &s, z, opts),
        PhaseEnd::Optimal => witness_verdict(model, &s, opts),
        PhaseEnd::Unbounded => numerical(&s, "phase one reported an unbounded ray".into()),
        PhaseEnd::IterationLimit => numerical(&s, "iteration limit reached in phase one".into()),
        PhaseEnd::Singular => numerical(&s, "singular basis in phase one".into()),
    };
    Ok((s, verdict))
}

fn witness_verdict(model: &LpModel, s: &Simplex, opts: &SolverOptions) -> FeasibilityVerdict {
    let x = s.model_point(model);
    let resid = model.max_scaled_violation(&x);
    if resid <= opts.feasibility_tol {
        FeasibilityVerdict {
            status: Status::Feasible,
            witness: Some(x),
            certificate: None,
            primal_residual: resid,
            iterations: s.iterations,
            message: None,
        }
    } else {
        FeasibilityVerdict {
            status: Status::Numerical,
            witness: Some(x),
            certificate: None,
            primal_residual: resid,
            iterations: s.iterations,
            message: Some(format!("witness violates a row by {resid:e}")),
        }
    }
}

/// Decides feasibility of the constraints, ignoring the objective.
pub fn solve_feasibility(model: &LpModel, opts: &SolverOptions) -> Result<FeasibilityVerdict> {
    let mut iterations = 0;
    let mut last = None;
    for o in opts.fallbacks() {
        let mut v = phase_one(model, &o)?.1;
        iterations += v.iterations;
        v.iterations = iterations;
        if v.status != Status::Numerical {
            return Ok(v);
        }
        last = Some(v);
    }
    Ok(last.expect("at least one attempt"))
}

/// Maximizes the model objective.
pub fn maximize(model: &LpModel, opts: &SolverOptions) -> Result<MaximizeResult> {
    let mut last = None;
    for o in opts.fallbacks() {
        let r = maximize_once(model, &o)?;
        if r.verdict.status != Status::Numerical {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("at least one attempt"))
}

fn maximize_once(model: &LpModel, opts: &SolverOptions) -> Result<MaximizeResult> {
    let (mut s, verdict) = phase_one(model, opts)?;
    if verdict.status != Status::Feasible {
        return Ok(MaximizeResult {
            verdict,
            optimum: None,
            duals: None,
        });
    }
    let neg: Vec<f64> = model.objective().iter().map(|c| -c).collect();
    s.start_phase_two(&neg);
    let end = s.run();
    match end {
        PhaseEnd::Optimal => {
            if !s.finish() {
                return Ok(MaximizeResult {
                    verdict: numerical(&s, "singular basis at the optimum".into()),
                    optimum: None,
                    duals: None,
                });
            }
            let verdict = witness_verdict(model, &s, opts);
            let optimum = verdict
                .witness
                .as_ref()
                .filter(|_| verdict.is_feasible())
                .map(|x| Optimum::Finite(model.objective_value(x)));
            let duals = optimum.map(|_| s.model_duals().iter().map(|y| -y).collect());
            Ok(MaximizeResult {
                verdict,
                optimum,
                duals,
            })
        }
        PhaseEnd::Unbounded => Ok(MaximizeResult {
            verdict,
            optimum: Some(Optimum::Unbounded),
            duals: None,
        }),
        PhaseEnd::IterationLimit | PhaseEnd::Singular => Ok(MaximizeResult {
            verdict: numerical(&s, format!("phase two ended with {end:?}")),
            optimum: None,
            duals: None,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn trivial_feasibility() {
        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        m.add_le("c", vec![(x, 1.0)], -1.0).unwrap();
        let v = solve_feasibility(&m, &SolverOptions::default()).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        let cert = v.certificate.unwrap();
        assert!(verify_certificate(&m, &cert.multipliers, 1e-7).unwrap() > 1e-7);

        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        m.add_le("c", vec![(x, 1.0)], 1.0).unwrap();
        let v = solve_feasibility(&m, &SolverOptions::default()).unwrap();
        assert_eq!(v.status, Status::Feasible);
        assert!(m.max_violation(v.witness.as_ref().unwrap()) <= 1e-8);
    }

    #[test]
    fn small_maximizations() {
        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        m.add_le("c", vec![(x, 1.0)], 3.0).unwrap();
        m.set_objective_coeff(x, 1.0);
        let r = maximize(&m, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 3.0).abs() < 1e-12);

        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        let y = m.add_var("y", 0.0, INF);
        m.add_le("c", vec![(x, 1.0), (y, 1.0)], 1.0).unwrap();
        m.set_objective_coeff(x, 1.0);
        m.set_objective_coeff(y, 1.0);
        let r = maximize(&m, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 1.0).abs() < 1e-12);

        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        let y = m.add_var("y", f64::NEG_INFINITY, INF);
        m.add_eq("c", vec![(x, 1.0), (y, -1.0)], 0.0).unwrap();
        m.set_objective_coeff(y, 1.0);
        let r = maximize(&m, &SolverOptions::default()).unwrap();
        assert_eq!(r.optimum, Some(Optimum::Unbounded));
    }

    #[test]
    fn equality_and_bounds() {
        let mut m = LpModel::new();
        let a = m.add_var("a", -2.0, 2.0);
        let b = m.add_var("b", f64::NEG_INFINITY, INF);
        m.add_eq("e", vec![(a, 1.0), (b, 1.0)], 5.0).unwrap();
        m.add_ge("g", vec![(b, 1.0)], 4.0).unwrap();
        m.add_le("l", vec![(b, 1.0)], 6.5).unwrap();
        m.set_objective_coeff(a, -1.0);
        let r = maximize(&m, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 1.5).abs() < 1e-10, "{r:?}");

        m.add_le("tight", vec![(b, 1.0)], 2.5).unwrap();
        let v = solve_feasibility(&m, &SolverOptions::default()).unwrap();
        assert_eq!(v.status, Status::Infeasible);
    }

    #[test]
    fn empty_model() {
        let v = solve_feasibility(&LpModel::new(), &SolverOptions::default()).unwrap();
        assert_eq!(v.status, Status::Feasible);
        let mut m = LpModel::new();
        m.add_var("x", 1.0, 1.0);
        let v = solve_feasibility(&m, &SolverOptions::default()).unwrap();
        assert_eq!(v.witness, Some(vec![1.0]));
    }

    #[test]
    fn bad_certificates_are_rejected() {
        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, INF);
        m.add_le("c", vec![(x, 1.0)], -1.0).unwrap();
        assert!(verify_certificate(&m, &[1.0], 1e-9).is_err());
        assert!(verify_certificate(&m, &[-1.0], 1e-9).unwrap() > 0.0);
        let mut m2 = LpModel::new();
        let x = m2.add_var("x", f64::NEG_INFINITY, INF);
        m2.add_le("c", vec![(x, 1.0)], -1.0).unwrap();
        assert!(verify_certificate(&m2, &[-1.0], 1e-9).is_err());
    }

    #[test]
    fn verdict_json() {
        let v = solve_feasibility(&LpModel::new(), &SolverOptions::default()).unwrap();
        let j: serde_json::Value = serde_json::from_str(&v.to_json(Some(1.0))).unwrap();
        assert_eq!(j["status"], "Feasible");
        assert_eq!(j["objective"], 1.0);
    }
}
