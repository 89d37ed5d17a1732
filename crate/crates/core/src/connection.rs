//! Connection matrices relating the auxiliary enumerator to A- and B-type
//! enumerators, their permutation-compressed forms and the MacWilliams
//! transform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{dense_trace_with_pauli, KrausOperator, KrausSet, SingleQubitOperator};
use crate::combinatorics::multinomial;
pub use crate::combinatorics::krawtchouk;
use crate::error::{out_of_range, Error, Result};
use crate::pauli::{group_size, pair_count, pair_index_raw, OrbitClass, Pauli1, PauliString, MAX_FULL_QUBITS, MAX_ORBIT_QUBITS};
use crate::sparse::SparseMatrix;

type C64 = Complex64;

/// Largest qubit count for full connection matrices (`16^n` pair columns).
pub const MAX_CONNECTION_QUBITS: usize = 4;
/// Entries smaller than this fraction of their row's largest entry are dropped.
pub const RELATIVE_DROP: f64 = 1e-14;

/// `M_A` and `M_B` over the swap-reduced pair space: column
/// [`pair_index_raw`]`(a, b)` multiplies `phi_a phi_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionMatrices {
    pub n: usize,
    pub m_a: SparseMatrix,
    pub m_b: SparseMatrix,
}

impl ConnectionMatrices {
    pub fn num_rows(&self) -> usize {
        self.m_a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.m_a.ncols()
    }
}

/// Group-index order of single-qubit factors: bit 1 is X, bit 0 is Z.
const FACTOR_ORDER: [Pauli1; 4] = [Pauli1::I, Pauli1::Z, Pauli1::X, Pauli1::Y];

fn factor_code(n: usize, idx: usize, q: usize) -> usize {
    let x = (idx >> (n + q)) & 1;
    let z = (idx >> q) & 1;
    2 * x + z
}

/// `tr(E sigma)` for every sigma and `tr(E sigma E^dag tau)` for every
/// ordered pair, unscaled.
fn operator_tables(n: usize, e: &KrausOperator) -> (Vec<C64>, Vec<C64>) {
    let g = group_size(n);
    match e {
        KrausOperator::TensorProduct(factors) => {
            let mats = FACTOR_ORDER.map(|p| SingleQubitOperator(p.matrix()));
            let single: Vec<[C64; 4]> = factors
                .iter()
                .map(|f| mats.map(|p| f.mul(&p).trace()))
                .collect();
            let sandwich: Vec<[[C64; 4]; 4]> = factors
                .iter()
                .map(|f| {
                    let fd = f.adjoint();
                    mats.map(|s| {
                        let left = f.mul(&s).mul(&fd);
                        mats.map(|t| left.mul(&t).trace())
                    })
                })
                .collect();
            let codes: Vec<Vec<usize>> = (0..g)
                .map(|idx| (0..n).map(|q| factor_code(n, idx, q)).collect())
                .collect();
            let t = codes
                .iter()
                .map(|c| (0..n).map(|q| single[q][c[q]]).product())
                .collect();
            let mut s = vec![C64::new(0.0, 0.0); g * g];
            for (a, ca) in codes.iter().enumerate() {
                for (b, cb) in codes.iter().enumerate() {
                    s[a * g + b] = (0..n).map(|q| sandwich[q][ca[q]][cb[q]]).product();
                }
            }
            (t, s)
        }
        KrausOperator::Dense(m) => {
            let paulis: Vec<PauliString> = (0..g)
                .map(|idx| PauliString::from_index(n, idx).expect("index in range"))
                .collect();
            let t = paulis.iter().map(|p| dense_trace_with_pauli(m, p)).collect();
            let md = m.adjoint();
            let mut s = vec![C64::new(0.0, 0.0); g * g];
            for (a, p) in paulis.iter().enumerate() {
                let left = m * p.to_dense() * &md;
                for (b, q) in paulis.iter().enumerate() {
                    s[a * g + b] = dense_trace_with_pauli(&left, q);
                }
            }
            (t, s)
        }
    }
}

fn reduce_row(g: usize, val: impl Fn(usize, usize) -> f64) -> Vec<(usize, f64)> {
    let mut row = Vec::new();
    for hi in 0..g {
        for lo in 0..=hi {
            let v = if lo == hi {
                val(hi, hi)
            } else {
                val(lo, hi) + val(hi, lo)
            };
            if v != 0.0 {
                row.push((pair_index_raw(hi, lo), v));
            }
        }
    }
    let max = row.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
    row.retain(|e| e.1.abs() > RELATIVE_DROP * max);
    row
}

/// `M_A[i, (sigma,tau)] = 4^-n sum_{E in Omega_i} tr(E sigma) tr(E^dag tau)` and
/// `M_B[i, (sigma,tau)] = 4^-n sum_{E in Omega_i} tr(E sigma E^dag tau)`, folded
/// onto unordered pairs.
pub fn build_connection(ks: &KrausSet) -> Result<ConnectionMatrices> {
    let n = ks.num_qubits();
    if n > MAX_CONNECTION_QUBITS {
        return Err(Error::TooManyQubits {
            what: "connection matrices",
            n,
            limit: MAX_CONNECTION_QUBITS,
        });
    }
    let g = group_size(n);
    let scale = 1.0 / g as f64;
    let rows: Vec<(Vec<(usize, f64)>, Vec<(usize, f64)>)> = ks
        .classes()
        .par_iter()
        .map(|class| {
            let mut va = vec![C64::new(0.0, 0.0); g * g];
            let mut vb = vec![0.0; g * g];
            for e in &class.operators {
                let (t, s) = operator_tables(n, e);
                for a in 0..g {
                    for b in 0..g {
                        va[a * g + b] += t[a] * t[b].conj();
                        vb[a * g + b] += s[a * g + b].re;
                    }
                }
            }
            (
                reduce_row(g, |a, b| scale * va[a * g + b].re),
                reduce_row(g, |a, b| scale * vb[a * g + b]),
            )
        })
        .collect();
    let mut m_a = SparseMatrix::new(pair_count(n));
    let mut m_b = SparseMatrix::new(pair_count(n));
    for (ra, rb) in rows {
        m_a.push_row(ra)?;
        m_b.push_row(rb)?;
    }
    Ok(ConnectionMatrices { n, m_a, m_b })
}

/// `phi_a phi_b` at column [`pair_index_raw`]`(a, b)`.
pub fn reduced_aux(phi: &[f64]) -> Vec<f64> {
    let g = phi.len();
    let mut out = vec![0.0; g * (g + 1) / 2];
    for hi in 0..g {
        for lo in 0..=hi {
            out[pair_index_raw(hi, lo)] = phi[hi] * phi[lo];
        }
    }
    out
}

/// `W_n`: row `tau` holds a single 1 in the column of the orbit containing `tau`.
pub fn compression_matrix(n: usize) -> Result<SparseMatrix> {
    if n > MAX_FULL_QUBITS {
        return Err(Error::TooManyQubits {
            what: "compression matrix",
            n,
            limit: MAX_FULL_QUBITS,
        });
    }
    let mut w = SparseMatrix::new(OrbitClass::count(n));
    for idx in 0..group_size(n) {
        let class = PauliString::from_index(n, idx)?.classify();
        w.push_row(vec![(class.index(), 1.0)])?;
    }
    Ok(w)
}

/// `F(i,x,y,z,n) = 2^-n sum_{a+b+c=i} C(n;a,b,c) sum_{sigma in C_{x,y,z,n}}
/// beta(sigma_{a,b,c,n}, sigma)`, evaluated as `2^-n C(n;x,y,z) K_i(x+y+z; n)`.
pub fn f_kernel(i: usize, x: usize, y: usize, z: usize, n: usize) -> Result<f64> {
    if i > n {
        return Err(out_of_range("F row", format!("i = {i} > n = {n}")));
    }
    if x + y + z > n {
        return Err(out_of_range("F class", format!("x + y + z > n = {n}")));
    }
    let size = multinomial(n as u64, x as u64, y as u64, z as u64)?;
    let k = krawtchouk(i as u64, (x + y + z) as u64, n as u64)?;
    let prod = (size as i128)
        .checked_mul(k)
        .ok_or(Error::Overflow("F kernel"))?;
    Ok(prod as f64 / 2f64.powi(n as i32))
}

/// `H_A` and `H_B` acting on orbit-compressed squared traces.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedConnection {
    pub n: usize,
    pub classes: Vec<OrbitClass>,
    /// `(n+1) x C(n+3,3)`; `C(n;x,y,z)` at row `x+y+z`.
    pub h_a: DMatrix<f64>,
    /// `(n+1) x C(n+3,3)`; `F(i,x,y,z,n)`.
    pub h_b: DMatrix<f64>,
}

pub fn compressed_connection(n: usize) -> Result<CompressedConnection> {
    if n > MAX_ORBIT_QUBITS {
        return Err(Error::TooManyQubits {
            what: "compressed connection",
            n,
            limit: MAX_ORBIT_QUBITS,
        });
    }
    let classes = OrbitClass::all(n);
    let mut h_a = DMatrix::zeros(n + 1, classes.len());
    let mut h_b = DMatrix::zeros(n + 1, classes.len());
    for (col, c) in classes.iter().enumerate() {
        h_a[(c.weight(), col)] = multinomial(n as u64, c.x as u64, c.y as u64, c.z as u64)? as f64;
        for i in 0..=n {
            h_b[(i, col)] = f_kernel(i, c.x, c.y, c.z, n)?;
        }
    }
    Ok(CompressedConnection {
        n,
        classes,
        h_a,
        h_b,
    })
}

/// `(trP / 2^n) K_i(j; n)` at `(i, j)`.
pub fn macwilliams_matrix(n: usize, trace_p: f64) -> Result<DMatrix<f64>> {
    let scale = trace_p / 2f64.powi(n as i32);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            m[(i, j)] = scale * krawtchouk(i as u64, j as u64, n as u64)? as f64;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::amplitude_damping_set;
    use crate::code::{leung4, repetition, DickeBasisCode, QuantumCode};
    use crate::enumerator::{aux_vector, compute_enumerators, compute_sl_enumerators, pi_phi};

    fn connection_residual(code: &QuantumCode, gamma: f64) -> f64 {
        let n = code.num_qubits();
        let ks = amplitude_damping_set(n, gamma).unwrap();
        let cm = build_connection(&ks).unwrap();
        let aux = reduced_aux(aux_vector(code).unwrap().values());
        let e = compute_enumerators(code, &ks).unwrap();
        let m = code.dimension() as f64;
        let lhs_a = cm.m_a.mul_vec(&aux).unwrap();
        let lhs_b = cm.m_b.mul_vec(&aux).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..e.len() {
            worst = worst.max((lhs_a[i] - m * m * e.a[i]).abs());
            worst = worst.max((lhs_b[i] - m * e.b[i]).abs());
        }
        worst
    }

    #[test]
    fn connection_reproduces_examples() {
        assert!(connection_residual(&leung4(), 0.1) < 1e-8);
        assert!(connection_residual(&repetition(2).unwrap(), 0.3) < 1e-8);
    }

    #[test]
    fn identity_channel_row() {
        let full = QuantumCode::from_real(1, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cm = build_connection(&amplitude_damping_set(1, 0.0).unwrap()).unwrap();
        let aux = reduced_aux(aux_vector(&full).unwrap().values());
        let b = cm.m_b.mul_vec(&aux).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-14 && b[1].abs() < 1e-14);
        assert_eq!(cm.num_cols(), 10);
        assert!(build_connection(&amplitude_damping_set(5, 0.1).unwrap()).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_kernel(1, 1, 0, 0, 1).unwrap(), -0.5);
        for n in 1..=6 {
            for c in OrbitClass::all(n) {
                let size = multinomial(n as u64, c.x as u64, c.y as u64, c.z as u64).unwrap();
                let f0 = f_kernel(0, c.x, c.y, c.z, n).unwrap();
                assert!((f0 - size as f64 / 2f64.powi(n as i32)).abs() < 1e-12);
            }
            for i in 0..=n {
                let expect = crate::combinatorics::binomial(n as u64, i as u64).unwrap() as f64
                    * 3f64.powi(i as i32)
                    / 2f64.powi(n as i32);
                assert!((f_kernel(i, 0, 0, 0, n).unwrap() - expect).abs() < 1e-12);
            }
        }
        assert!(f_kernel(3, 0, 0, 0, 2).is_err());
    }

    #[test]
    fn compression_examples() {
        let w = compression_matrix(1).unwrap();
        let classes = OrbitClass::all(1);
        for (r, p) in ["I", "Z", "X", "Y"].iter().enumerate() {
            let c = p.parse::<PauliString>().unwrap().classify();
            assert_eq!(w.row(r), &[(classes.iter().position(|k| *k == c).unwrap(), 1.0)]);
        }
        let w = compression_matrix(2).unwrap();
        let col = OrbitClass::new(2, 1, 0, 0).unwrap().index();
        assert_eq!(w.rows().filter(|r| r[0].0 == col).count(), 2);
        assert_eq!(compression_matrix(3).unwrap().nnz(), 64);
    }

    #[test]
    fn compressed_examples() {
        let cc = compressed_connection(4).unwrap();
        let row0: Vec<f64> = cc.h_a.row(0).iter().copied().collect();
        assert_eq!(row0[0], 1.0);
        assert_eq!(row0.iter().sum::<f64>(), 1.0);
        let codes = [
            repetition(3).unwrap(),
            DickeBasisCode::new(4, vec![vec![0.0, 0.0, 1.0, 0.0, 0.0]]).unwrap().to_code().unwrap(),
        ];
        for code in codes {
            let n = code.num_qubits();
            let cc = compressed_connection(n).unwrap();
            let pi: Vec<f64> = pi_phi(&code).unwrap().iter().map(|v| v * v).collect();
            let pi = nalgebra::DVector::from_vec(pi);
            let sl = compute_sl_enumerators(&code).unwrap();
            let m = code.dimension() as f64;
            let a = &cc.h_a * &pi;
            let b = &cc.h_b * &pi;
            for i in 0..=n {
                assert!((a[i] - m * m * sl.a[i]).abs() < 1e-8);
                assert!((b[i] - m * sl.b[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn macwilliams_examples() {
        let m = macwilliams_matrix(1, 2.0).unwrap();
        assert_eq!((m[(0, 0)], m[(0, 1)]), (1.0, 1.0));
        for code in [crate::code::perfect5(), crate::code::shor9()] {
            let sl = compute_sl_enumerators(&code).unwrap();
            let m = macwilliams_matrix(code.num_qubits(), code.dimension() as f64).unwrap();
            let b = m * nalgebra::DVector::from_vec(sl.a.clone());
            for (x, y) in b.iter().zip(&sl.b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
