//! Kraus-operator sets partitioned into severity classes.
//!
//! Tensor-product operators take a per-qubit fast path for every trace; dense
//! operators are supported for arbitrary channels on few qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::pauli::{enumerate_by_weight, PauliString, MAX_STATE_QUBITS};

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitOperator(pub [[C64; 2]; 2]);

impl SingleQubitOperator {
    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn zero() -> Self {
        Self([[ZERO; 2]; 2])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Self([
            [C64::new(m[0][0], 0.0), C64::new(m[0][1], 0.0)],
            [C64::new(m[1][0], 0.0), C64::new(m[1][1], 0.0)],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self(out)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A Kraus operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum KrausOperator {
    /// Factor `j` acts on qubit `j`.
    TensorProduct(Vec<SingleQubitOperator>),
    Dense(DMatrix<C64>),
}

impl KrausOperator {
    pub fn num_qubits(&self) -> usize {
        match self {
            KrausOperator::TensorProduct(f) => f.len(),
            KrausOperator::Dense(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            KrausOperator::Dense(m) => m.clone(),
            KrausOperator::TensorProduct(factors) => {
                let mut acc = DMatrix::from_element(1, 1, ONE);
                for f in factors {
                    let m = DMatrix::from_fn(2, 2, |r, c| f.0[r][c]);
                    acc = acc.kronecker(&m);
                }
                acc
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            KrausOperator::TensorProduct(f) => {
                KrausOperator::TensorProduct(f.iter().map(|m| m.adjoint()).collect())
            }
            KrausOperator::Dense(m) => KrausOperator::Dense(m.adjoint()),
        }
    }

    /// `E |psi>`.
    pub fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let n = self.num_qubits();
        if psi.len() != 1usize << n {
            return Err(Error::Dimension(format!(
                "state of length {} for a {n}-qubit operator",
                psi.len()
            )));
        }
        Ok(match self {
            KrausOperator::Dense(m) => {
                let v = nalgebra::DVector::from_column_slice(psi);
                (m * v).as_slice().to_vec()
            }
            KrausOperator::TensorProduct(factors) => {
                let mut out = psi.to_vec();
                for (q, f) in factors.iter().enumerate() {
                    let bit = 1usize << (n - 1 - q);
                    for b in 0..out.len() {
                        if b & bit == 0 {
                            let (a0, a1) = (out[b], out[b | bit]);
                            out[b] = f.0[0][0] * a0 + f.0[0][1] * a1;
                            out[b | bit] = f.0[1][0] * a0 + f.0[1][1] * a1;
                        }
                    }
                }
                out
            }
        })
    }

    fn is_finite(&self) -> bool {
        match self {
            KrausOperator::TensorProduct(f) => f.iter().all(|m| m.is_finite()),
            KrausOperator::Dense(m) => m.iter().all(|v| v.re.is_finite() && v.im.is_finite()),
        }
    }
}

/// One severity class `Omega_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausClass {
    pub label: String,
    pub operators: Vec<KrausOperator>,
}

/// Kraus operators partitioned into classes `Omega_0, ..., Omega_{w-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    n: usize,
    classes: Vec<KrausClass>,
}

impl KrausSet {
    pub fn new(n: usize, classes: Vec<KrausClass>) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "KrausSet",
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        for class in &classes {
            for op in &class.operators {
                if let KrausOperator::Dense(m) = op {
                    if m.nrows() != 1 << n || m.ncols() != 1 << n {
                        return Err(Error::Dimension(format!(
                            "dense Kraus operator of shape {}x{} on {n} qubits",
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                }
                if op.num_qubits() != n {
                    return Err(Error::QubitMismatch(n, op.num_qubits()));
                }
                if !op.is_finite() {
                    return Err(Error::Dimension("non-finite Kraus entry".into()));
                }
            }
        }
        Ok(Self { n, classes })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of classes `w`.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[KrausClass] {
        &self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.operators.len()).collect()
    }

    /// Largest entry of `|sum_W W^dag W - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = 1usize << self.n;
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for op in self.classes.iter().flat_map(|c| &c.operators) {
            let d = op.to_dense();
            acc += d.adjoint() * &d;
        }
        acc -= DMatrix::identity(dim, dim);
        acc.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&KrausSetFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KrausSetFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// Amplitude-damping Kraus operators `K_0 = diag(1, sqrt(1-gamma))` and
/// `K_1 = sqrt(gamma) |0><1|`.
pub fn amplitude_damping_kraus(gamma: f64) -> Result<[SingleQubitOperator; 2]> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(out_of_range("gamma", format!("{gamma} not in [0, 1]")));
    }
    Ok([
        SingleQubitOperator::real([[1.0, 0.0], [0.0, (1.0 - gamma).sqrt()]]),
        SingleQubitOperator::real([[0.0, gamma.sqrt()], [0.0, 0.0]]),
    ])
}

/// All `2^n` products `K_x`, with class `i` holding the `C(n, i)` products
/// whose damping pattern `x` has weight `i`.
pub fn amplitude_damping_set(n: usize, gamma: f64) -> Result<KrausSet> {
    let k = amplitude_damping_kraus(gamma)?;
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "amplitude damping set",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let mut classes: Vec<KrausClass> = (0..=n)
        .map(|i| KrausClass {
            label: format!("K{i}"),
            operators: Vec::new(),
        })
        .collect();
    for pattern in 0u32..(1u32 << n) {
        // qubit j damped iff bit (n-1-j) is set, so patterns read left to right
        let factors = (0..n)
            .map(|j| k[((pattern >> (n - 1 - j)) & 1) as usize])
            .collect();
        classes[pattern.count_ones() as usize]
            .operators
            .push(KrausOperator::TensorProduct(factors));
    }
    KrausSet::new(n, classes)
}

/// Weight classes `Omega_0 .. Omega_max_weight` of Pauli operators.
pub fn pauli_kraus_set(n: usize, max_weight: usize) -> Result<KrausSet> {
    if max_weight > n {
        return Err(out_of_range(
            "max_weight",
            format!("{max_weight} > n = {n}"),
        ));
    }
    let classes = (0..=max_weight)
        .map(|i| {
            Ok(KrausClass {
                label: format!("wt{i}"),
                operators: enumerate_by_weight(n, i)?
                    .map(|p| KrausOperator::TensorProduct(pauli_factors(&p)))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(n, classes)
}

fn pauli_factors(p: &PauliString) -> Vec<SingleQubitOperator> {
    p.factors().map(|f| SingleQubitOperator(f.matrix())).collect()
}

fn check_dims(e: &KrausOperator, p: &PauliString) -> Result<()> {
    if e.num_qubits() != p.num_qubits() {
        return Err(Error::QubitMismatch(e.num_qubits(), p.num_qubits()));
    }
    Ok(())
}

/// `tr(E sigma)`.
pub fn trace_with_pauli(e: &KrausOperator, sigma: &PauliString) -> Result<C64> {
    check_dims(e, sigma)?;
    Ok(match e {
        KrausOperator::TensorProduct(factors) => factors
            .iter()
            .zip(sigma.factors())
            .map(|(f, p)| f.mul(&SingleQubitOperator(p.matrix())).trace())
            .product(),
        KrausOperator::Dense(m) => dense_trace_with_pauli(m, sigma),
    })
}

/// `tr(M sigma)` for a dense matrix, O(2^n).
pub(crate) fn dense_trace_with_pauli(m: &DMatrix<C64>, sigma: &PauliString) -> C64 {
    let (xs, zs) = sigma.state_masks();
    let mut acc = ZERO;
    for b in 0..m.nrows() {
        // (M sigma)[b][b] = M[b][b ^ x] * sigma[b ^ x][b]
        let v = m[(b, b ^ xs)];
        if (zs & b).count_ones() % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc * sigma.y_phase()
}

/// `tr(E sigma E^dag tau)`.
pub fn sandwich_trace(e: &KrausOperator, sigma: &PauliString, tau: &PauliString) -> Result<C64> {
    check_dims(e, sigma)?;
    check_dims(e, tau)?;
    Ok(match e {
        KrausOperator::TensorProduct(factors) => factors
            .iter()
            .zip(sigma.factors().zip(tau.factors()))
            .map(|(f, (s, t))| single_sandwich(f, s.matrix(), t.matrix()))
            .product(),
        KrausOperator::Dense(m) => {
            let s = m * sigma.to_dense() * m.adjoint();
            dense_trace_with_pauli(&s, tau)
        }
    })
}

pub(crate) fn single_sandwich(e: &SingleQubitOperator, s: [[C64; 2]; 2], t: [[C64; 2]; 2]) -> C64 {
    e.mul(&SingleQubitOperator(s))
        .mul(&e.adjoint())
        .mul(&SingleQubitOperator(t))
        .trace()
}

// ---- JSON ----

type JsonComplex = [f64; 2];
type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OperatorFile {
    Factors { factors: Vec<JsonMatrix> },
    Dense { dense: JsonMatrix },
}

#[derive(Serialize, Deserialize)]
struct KrausSetFile {
    n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
    classes: Vec<Vec<OperatorFile>>,
}

fn to_json_matrix(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> JsonMatrix {
    (0..rows)
        .map(|r| (0..cols).map(|c| f(r, c)).map(|v| [v.re, v.im]).collect())
        .collect()
}

impl From<&KrausSet> for KrausSetFile {
    fn from(ks: &KrausSet) -> Self {
        Self {
            n: ks.n,
            labels: ks.classes.iter().map(|c| c.label.clone()).collect(),
            classes: ks
                .classes
                .iter()
                .map(|c| {
                    c.operators
                        .iter()
                        .map(|op| match op {
                            KrausOperator::TensorProduct(f) => OperatorFile::Factors {
                                factors: f
                                    .iter()
                                    .map(|m| to_json_matrix(2, 2, |r, c| m.0[r][c]))
                                    .collect(),
                            },
                            KrausOperator::Dense(m) => OperatorFile::Dense {
                                dense: to_json_matrix(m.nrows(), m.ncols(), |r, c| m[(r, c)]),
                            },
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<KrausSetFile> for KrausSet {
    type Error = Error;

    fn try_from(file: KrausSetFile) -> Result<Self> {
        let mut classes = Vec::with_capacity(file.classes.len());
        for (i, ops) in file.classes.into_iter().enumerate() {
            let operators = ops
                .into_iter()
                .map(|op| match op {
                    OperatorFile::Factors { factors } => factors
                        .into_iter()
                        .map(|m| {
                            if m.len() != 2 || m.iter().any(|r| r.len() != 2) {
                                return Err(Error::Dimension("factor is not 2x2".into()));
                            }
                            Ok(SingleQubitOperator([
                                [C64::new(m[0][0][0], m[0][0][1]), C64::new(m[0][1][0], m[0][1][1])],
                                [C64::new(m[1][0][0], m[1][0][1]), C64::new(m[1][1][0], m[1][1][1])],
                            ]))
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(KrausOperator::TensorProduct),
                    OperatorFile::Dense { dense } => {
                        let rows = dense.len();
                        if dense.iter().any(|r| r.len() != rows) {
                            return Err(Error::Dimension("dense operator is not square".into()));
                        }
                        Ok(KrausOperator::Dense(DMatrix::from_fn(rows, rows, |r, c| {
                            C64::new(dense[r][c][0], dense[r][c][1])
                        })))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            classes.push(KrausClass {
                label: file.labels.get(i).cloned().unwrap_or_else(|| format!("class{i}")),
                operators,
            });
        }
        KrausSet::new(file.n, classes)
    }
}
