//! A- and B-type enumerators of a code under a partitioned Kraus set, the
//! Shor-Laflamme enumerators, auxiliary vectors and approximate-correction
//! residuals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{KrausOperator, KrausSet};
use crate::code::{inner, QuantumCode};
use crate::error::{Error, Result};
use crate::pauli::{group_size, OrbitClass, PauliString, MAX_FULL_QUBITS, MAX_ORBIT_QUBITS};
use crate::TOLERANCES;

type C64 = Complex64;

/// Enumerator vectors `A` and `B`, one entry per Kraus class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumeratorPair {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
}

impl EnumeratorPair {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    /// `B_i - A_i`.
    pub fn differences(&self) -> Vec<f64> {
        self.b.iter().zip(&self.a).map(|(b, a)| b - a).collect()
    }
}

/// Per-operator sums needed by both enumerators and residuals.
#[derive(Clone, Copy, Default)]
struct OperatorTerms {
    /// `|tr(EP)|^2`
    a: f64,
    /// `tr(E P E^dag P)`
    b: f64,
}

/// `G_kj = <L_k| E |L_j>` reduced to the two trace quantities.
fn operator_terms(code: &QuantumCode, images: &[Vec<C64>]) -> OperatorTerms {
    let words = code.codewords();
    let mut tr = C64::new(0.0, 0.0);
    let mut b = 0.0;
    for (k, lk) in words.iter().enumerate() {
        for (j, img) in images.iter().enumerate() {
            let g = inner(lk, img);
            if k == j {
                tr += g;
            }
            b += g.norm_sqr();
        }
    }
    OperatorTerms {
        a: tr.norm_sqr(),
        b,
    }
}

fn kraus_terms(code: &QuantumCode, e: &KrausOperator) -> Result<OperatorTerms> {
    let images = code
        .codewords()
        .iter()
        .map(|w| e.apply(w))
        .collect::<Result<Vec<_>>>()?;
    Ok(operator_terms(code, &images))
}

fn class_terms(code: &QuantumCode, ks: &KrausSet) -> Result<Vec<Vec<OperatorTerms>>> {
    if ks.num_qubits() != code.num_qubits() {
        return Err(Error::QubitMismatch(code.num_qubits(), ks.num_qubits()));
    }
    ks.classes()
        .iter()
        .map(|class| {
            class
                .operators
                .par_iter()
                .map(|e| kraus_terms(code, e))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// `A_i = M^-2 sum_{E in Omega_i} tr(EP) tr(E^dag P)` and
/// `B_i = M^-1 sum_{E in Omega_i} tr(E P E^dag P)` with `M = tr(P)`.
pub fn compute_enumerators(code: &QuantumCode, ks: &KrausSet) -> Result<EnumeratorPair> {
    let m = code.dimension() as f64;
    let terms = class_terms(code, ks)?;
    Ok(EnumeratorPair {
        a: terms
            .iter()
            .map(|t| t.iter().map(|x| x.a).sum::<f64>() / (m * m))
            .collect(),
        b: terms
            .iter()
            .map(|t| t.iter().map(|x| x.b).sum::<f64>() / m)
            .collect(),
        gamma: None,
    })
}

/// `r_i = M^-1 sum_{E in Omega_i} ||PEP - <P/sqrt M, PEP> P/sqrt M||_F^2`.
pub fn aqec_residuals(code: &QuantumCode, ks: &KrausSet) -> Result<Vec<f64>> {
    let m = code.dimension() as f64;
    Ok(class_terms(code, ks)?
        .iter()
        .map(|t| t.iter().map(|x| (x.b - x.a / m).max(0.0)).sum::<f64>() / m)
        .collect())
}

/// Shor-Laflamme enumerators over Pauli weight classes, length `n + 1`.
pub fn compute_sl_enumerators(code: &QuantumCode) -> Result<EnumeratorPair> {
    let n = code.num_qubits();
    if n > MAX_ORBIT_QUBITS {
        return Err(Error::TooManyQubits {
            what: "Shor-Laflamme enumeration",
            n,
            limit: MAX_ORBIT_QUBITS,
        });
    }
    let m = code.dimension() as f64;
    let words = code.codewords();
    let dim = 1usize << n;
    // For a fixed X part, <L_k| sigma |L_j> over every Z part is, up to a
    // phase, the Walsh-Hadamard transform of conj(L_k[b ^ x]) L_j[b].
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..dim)
        .into_par_iter()
        .map(|xs| {
            let mut a = vec![0.0; n + 1];
            let mut b = vec![0.0; n + 1];
            let mut trace = vec![C64::new(0.0, 0.0); dim];
            let mut buf = vec![C64::new(0.0, 0.0); dim];
            for (k, lk) in words.iter().enumerate() {
                for (j, lj) in words.iter().enumerate() {
                    for (i, v) in buf.iter_mut().enumerate() {
                        *v = lk[i ^ xs].conj() * lj[i];
                    }
                    walsh_hadamard(&mut buf);
                    for (zs, g) in buf.iter().enumerate() {
                        b[(xs | zs).count_ones() as usize] += g.norm_sqr();
                    }
                    if k == j {
                        trace.iter_mut().zip(&buf).for_each(|(t, g)| *t += g);
                    }
                }
            }
            for (zs, t) in trace.iter().enumerate() {
                a[(xs | zs).count_ones() as usize] += t.norm_sqr();
            }
            (a, b)
        })
        .collect();
    let mut a = vec![0.0; n + 1];
    let mut b = vec![0.0; n + 1];
    for (pa, pb) in partial {
        for i in 0..=n {
            a[i] += pa[i];
            b[i] += pb[i];
        }
    }
    Ok(EnumeratorPair {
        a: a.iter().map(|v| v / (m * m)).collect(),
        b: b.iter().map(|v| v / m).collect(),
        gamma: None,
    })
}

/// In-place unnormalized Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [C64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Auxiliary data of a code, either over the whole Pauli group or over
/// permutation orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum AuxVector {
    /// `phi_sigma = tr(sigma P)` indexed by group index.
    Full { n: usize, phi: Vec<f64> },
    /// `pi_{x,y,z} = tr(sigma_{x,y,z,n} P)^2` in canonical class order.
    Compressed { n: usize, pi: Vec<f64> },
}

impl AuxVector {
    pub fn num_qubits(&self) -> usize {
        match self {
            AuxVector::Full { n, .. } | AuxVector::Compressed { n, .. } => *n,
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            AuxVector::Full { phi, .. } => phi,
            AuxVector::Compressed { pi, .. } => pi,
        }
    }
}

/// `phi_sigma = tr(sigma P)` for every Pauli, `n <= 6`.
pub fn aux_vector(code: &QuantumCode) -> Result<AuxVector> {
    let n = code.num_qubits();
    if n > MAX_FULL_QUBITS {
        return Err(Error::TooManyQubits {
            what: "full auxiliary vector",
            n,
            limit: MAX_FULL_QUBITS,
        });
    }
    let phi = (0..group_size(n))
        .into_par_iter()
        .map(|idx| {
            let s = PauliString::from_index(n, idx).expect("index in range");
            code.trace_of_pauli_unchecked(&s)
        })
        .collect();
    Ok(AuxVector::Full { n, phi })
}

/// `tr(sigma_{x,y,z,n} P)` on canonical representatives, after checking the
/// code is permutation invariant.
pub fn pi_phi(code: &QuantumCode) -> Result<Vec<f64>> {
    let n = code.num_qubits();
    if n > MAX_ORBIT_QUBITS {
        return Err(Error::TooManyQubits {
            what: "orbit compression",
            n,
            limit: MAX_ORBIT_QUBITS,
        });
    }
    let tol = TOLERANCES.identity;
    let defect = code.permutation_defect();
    if defect > tol {
        return Err(Error::NotPermutationInvariant(
            violating_orbit(code, tol).unwrap_or_else(|| {
                format!("subspace moved by a transposition, defect {defect:.3e}")
            }),
        ));
    }
    Ok(OrbitClass::all(n)
        .par_iter()
        .map(|c| code.trace_of_pauli_unchecked(&c.representative()))
        .collect())
}

fn violating_orbit(code: &QuantumCode, tol: f64) -> Option<String> {
    for class in OrbitClass::all(code.num_qubits()) {
        let rep = code.trace_of_pauli_unchecked(&class.representative());
        for s in class.members().ok()? {
            let v = code.trace_of_pauli_unchecked(&s);
            if (v - rep).abs() > tol {
                return Some(format!(
                    "orbit (x={}, y={}, z={}): tr({}P) = {v} but tr({}P) = {rep}",
                    class.x,
                    class.y,
                    class.z,
                    s,
                    class.representative()
                ));
            }
        }
    }
    None
}

/// Squared representative traces `pi_{x,y,z}`.
pub fn pi_vector(code: &QuantumCode) -> Result<AuxVector> {
    Ok(AuxVector::Compressed {
        n: code.num_qubits(),
        pi: pi_phi(code)?.into_iter().map(|v| v * v).collect(),
    })
}
