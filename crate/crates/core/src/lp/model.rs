//! Linear-program data model.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constraint sense; `a.x >= b` rows are stored negated as `Le`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Eq,
    Le,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// Sorted by variable, no duplicates, no zeros.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// Amount by which `x` violates this row.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let r = self.activity(x) - self.rhs;
        match self.sense {
            Sense::Eq => r.abs(),
            Sense::Le => r.max(0.0),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|e| e.1.abs()).fold(0.0, f64::max)
    }
}

/// Variables with box bounds, sparse equality and `<=` rows, and a linear
/// objective.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    names: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[lower, upper]`, either may be infinite.
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(0.0);
        self.names.len() - 1
    }

    pub fn add_vars(
        &mut self,
        count: usize,
        lower: f64,
        upper: f64,
        mut name: impl FnMut(usize) -> String,
    ) -> Range<usize> {
        let start = self.num_vars();
        for k in 0..count {
            self.add_var(name(k), lower, upper);
        }
        start..start + count
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_objective_coeff(&mut self, var: usize, value: f64) {
        self.objective[var] = value;
    }

    fn push(&mut self, name: String, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Result<usize> {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, v) in coeffs {
            if j >= self.num_vars() {
                return Err(Error::InvalidModel(format!(
                    "row {name} references variable {j} of {}",
                    self.num_vars()
                )));
            }
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => merged.push((j, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        self.constraints.push(Constraint {
            name,
            coeffs: merged,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn add_eq(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<usize> {
        self.push(name.into(), coeffs, Sense::Eq, rhs)
    }

    pub fn add_le(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<usize> {
        self.push(name.into(), coeffs, Sense::Le, rhs)
    }

    /// Stored as `-a.x <= -b`.
    pub fn add_ge(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<usize> {
        let neg = coeffs.into_iter().map(|(j, v)| (j, -v)).collect();
        self.push(name.into(), neg, Sense::Le, -rhs)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_eq(&self) -> usize {
        self.constraints.iter().filter(|c| c.sense == Sense::Eq).count()
    }

    pub fn num_ub(&self) -> usize {
        self.constraints.iter().filter(|c| c.sense == Sense::Le).count()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraints_mut(&mut self) -> &mut [Constraint] {
        &mut self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn has_objective(&self) -> bool {
        self.objective.iter().any(|&c| c != 0.0)
    }

    pub fn nnz(&self) -> usize {
        self.constraints.iter().map(|c| c.coeffs.len()).sum()
    }

    /// Rejects NaN or infinite coefficients and inverted bounds.
    pub fn validate(&self) -> Result<()> {
        for (j, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidModel(format!(
                    "variable {} has bounds [{l}, {u}]",
                    self.names[j]
                )));
            }
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() || c.coeffs.iter().any(|e| !e.1.is_finite()) {
                return Err(Error::InvalidModel(format!("row {} has non-finite data", c.name)));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite objective".into()));
        }
        Ok(())
    }

    /// Largest absolute violation of any bound or row.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.violations(x, false)
    }

    /// As [`LpModel::max_violation`] with each row divided by its largest
    /// coefficient.
    pub fn max_scaled_violation(&self, x: &[f64]) -> f64 {
        self.violations(x, true)
    }

    fn violations(&self, x: &[f64], scaled: bool) -> f64 {
        assert_eq!(x.len(), self.num_vars(), "point has the wrong dimension");
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
            if !v.is_finite() {
                return f64::INFINITY;
            }
        }
        for c in &self.constraints {
            let mut v = c.violation(x);
            if scaled {
                let s = c.max_abs_coeff();
                if s > 0.0 {
                    v /= s;
                }
            }
            worst = worst.max(v);
        }
        worst
    }

    /// Names and violations of rows and bounds broken by more than `tol`.
    pub fn violated(&self, x: &[f64], tol: f64) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (j, &v) in x.iter().enumerate() {
            let d = (self.lower[j] - v).max(v - self.upper[j]);
            if d > tol {
                out.push((format!("bound {}", self.names[j]), d));
            }
        }
        for c in &self.constraints {
            let d = c.violation(x);
            if d > tol {
                out.push((c.name.clone(), d));
            }
        }
        out
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_and_violation() {
        let mut m = LpModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY);
        let ys = m.add_vars(2, -1.0, 1.0, |k| format!("y{k}"));
        m.add_le("c0", vec![(x, 1.0), (ys.start, 2.0), (x, 1.0)], 4.0).unwrap();
        m.add_ge("c1", vec![(ys.start + 1, 1.0)], 0.5).unwrap();
        m.add_eq("c2", vec![(x, 1.0)], 1.0).unwrap();
        assert_eq!(m.constraints()[0].coeffs, vec![(0, 2.0), (1, 2.0)]);
        assert_eq!((m.num_eq(), m.num_ub(), m.nnz()), (1, 2, 4));
        assert_eq!(m.max_violation(&[1.0, 0.0, 0.5]), 0.0);
        assert_eq!(m.max_violation(&[1.0, 2.0, 0.5]), 2.0);
        assert_eq!(m.max_scaled_violation(&[1.0, 1.0, 0.5]), 0.0);
        assert_eq!(m.violated(&[2.0, 0.0, 0.0], 1e-9).len(), 2);
        assert!(m.add_le("bad", vec![(7, 1.0)], 0.0).is_err());
        m.validate().unwrap();
        m.set_bounds(x, 1.0, 0.0);
        assert!(m.validate().is_err());
    }
}
