//! Quantum codes given by orthonormal logical codewords, a few named codes,
//! and Dicke-basis utilities for permutation-invariant codes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{out_of_range, Error, Result};
use crate::pauli::{PauliString, MAX_STATE_QUBITS};
use crate::TOLERANCES;

type C64 = Complex64;

/// Largest qubit count for which a dense projector is built.
pub const MAX_PROJECTOR_QUBITS: usize = 10;

/// A code subspace spanned by `M` orthonormal codewords on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCode {
    n: usize,
    codewords: Vec<Vec<C64>>,
}

impl QuantumCode {
    /// Checks orthonormality to the default tolerance.
    pub fn new(n: usize, codewords: Vec<Vec<C64>>) -> Result<Self> {
        Self::with_tolerance(n, codewords, TOLERANCES.orthonormality)
    }

    pub fn with_tolerance(n: usize, codewords: Vec<Vec<C64>>, tol: f64) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "QuantumCode",
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        if codewords.is_empty() {
            return Err(Error::Dimension("a code needs at least one codeword".into()));
        }
        let dim = 1usize << n;
        for (j, w) in codewords.iter().enumerate() {
            if w.len() != dim {
                return Err(Error::Dimension(format!(
                    "codeword {j} has length {}, expected {dim}",
                    w.len()
                )));
            }
            if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Dimension(format!("codeword {j} has non-finite entries")));
            }
        }
        for i in 0..codewords.len() {
            for j in i..codewords.len() {
                let ip = inner(&codewords[i], &codewords[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                let deviation = (ip - target).norm();
                if deviation > tol {
                    return Err(Error::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Self { n, codewords })
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(n: usize, codewords: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            n,
            codewords
                .into_iter()
                .map(|w| w.into_iter().map(|v| C64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Code dimension `M = tr(P)`.
    pub fn dimension(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[Vec<C64>] {
        &self.codewords
    }

    /// `P = sum_j |L_j><L_j|`.
    pub fn projector(&self) -> Result<DMatrix<C64>> {
        if self.n > MAX_PROJECTOR_QUBITS {
            return Err(Error::TooManyQubits {
                what: "dense projector",
                n: self.n,
                limit: MAX_PROJECTOR_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let mut p = DMatrix::zeros(dim, dim);
        for w in &self.codewords {
            for r in 0..dim {
                if w[r] == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..dim {
                    p[(r, c)] += w[r] * w[c].conj();
                }
            }
        }
        Ok(p)
    }

    /// `tr(sigma P)`, real because both factors are Hermitian.
    pub fn trace_of_pauli(&self, sigma: &PauliString) -> Result<f64> {
        if sigma.num_qubits() != self.n {
            return Err(Error::QubitMismatch(self.n, sigma.num_qubits()));
        }
        Ok(self.trace_of_pauli_unchecked(sigma))
    }

    pub(crate) fn trace_of_pauli_unchecked(&self, sigma: &PauliString) -> f64 {
        self.codewords
            .iter()
            .map(|w| sigma.matrix_element(w, w).re)
            .sum()
    }

    /// True when every qubit permutation maps the code space to itself.
    pub fn is_permutation_invariant(&self, tol: f64) -> bool {
        self.permutation_defect() <= tol
    }

    /// Largest `1 - ||P pi L_j||^2` over adjacent transpositions `pi`.
    pub fn permutation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.n.saturating_sub(1) {
            for w in &self.codewords {
                let moved = swap_qubits(w, self.n, k, k + 1);
                let kept: f64 = self
                    .codewords
                    .iter()
                    .map(|l| inner(l, &moved).norm_sqr())
                    .sum();
                worst = worst.max((1.0 - kept).abs());
            }
        }
        worst
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodeFile::Explicit {
            n: self.n,
            codewords: self
                .codewords
                .iter()
                .map(|w| w.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Accepts `{"n", "codewords"}` or `{"dicke": {"n", "coeffs"}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<CodeFile>(text)? {
            CodeFile::Explicit { n, codewords } => Self::new(
                n,
                codewords
                    .into_iter()
                    .map(|w| w.into_iter().map(|[re, im]| C64::new(re, im)).collect())
                    .collect(),
            ),
            CodeFile::Dicke { dicke } => DickeBasisCode::new(dicke.n, dicke.coeffs)?.to_code(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CodeFile {
    Explicit { n: usize, codewords: Vec<Vec<[f64; 2]>> },
    Dicke { dicke: DickeFile },
}

#[derive(Serialize, Deserialize)]
struct DickeFile {
    n: usize,
    coeffs: Vec<Vec<f64>>,
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn swap_qubits(psi: &[C64], n: usize, a: usize, b: usize) -> Vec<C64> {
    let (ba, bb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
    let mut out = psi.to_vec();
    for (s, v) in psi.iter().enumerate() {
        let (ha, hb) = (s & ba != 0, s & bb != 0);
        let t = if ha == hb { s } else { s ^ ba ^ bb };
        out[t] = *v;
    }
    out
}

fn basis_state(n: usize, bits: &str) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[usize::from_str_radix(bits, 2).expect("binary literal")] = C64::new(1.0, 0.0);
    v
}

fn superpose(n: usize, terms: &[(&str, f64)]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    for (bits, amp) in terms {
        let b = basis_state(n, bits);
        for (x, y) in v.iter_mut().zip(b) {
            *x += y * amp;
        }
    }
    v
}

/// Four-qubit code with `|0_L> = (|0000> + |1111>)/sqrt 2` and
/// `|1_L> = (|0011> + |1100>)/sqrt 2`.
pub fn leung4() -> QuantumCode {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    QuantumCode::new(
        4,
        vec![
            superpose(4, &[("0000", h), ("1111", h)]),
            superpose(4, &[("0011", h), ("1100", h)]),
        ],
    )
    .expect("orthonormal")
}

/// Nine-qubit Shor code.
pub fn shor9() -> QuantumCode {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let block = |s: f64| [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0),
        C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s * h, 0.0)];
    let word = |s: f64| {
        let b = block(s);
        let mut out = vec![C64::new(0.0, 0.0); 512];
        for (i, a) in b.iter().enumerate() {
            for (j, c) in b.iter().enumerate() {
                for (k, e) in b.iter().enumerate() {
                    out[(i << 6) | (j << 3) | k] = a * c * e;
                }
            }
        }
        out
    };
    QuantumCode::new(9, vec![word(1.0), word(-1.0)]).expect("orthonormal")
}

/// The five-qubit perfect code with stabilizers generated by cyclic shifts of
/// `XZZXI`, logical `|1_L> = X^5 |0_L>`.
pub fn perfect5() -> QuantumCode {
    let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];
    let mut v = basis_state(5, "00000");
    for g in gens {
        let p: PauliString = g.parse().expect("valid Pauli");
        let gv = p.apply(&v).expect("dimension");
        v = v.iter().zip(gv).map(|(a, b)| (a + b) * 0.5).collect();
    }
    let norm = inner(&v, &v).re.sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    let xs: PauliString = "XXXXX".parse().expect("valid Pauli");
    let one = xs.apply(&v).expect("dimension");
    QuantumCode::new(5, vec![v, one]).expect("orthonormal")
}

/// `{|0...0>, |1...1>}`.
pub fn repetition(n: usize) -> Result<QuantumCode> {
    if n == 0 || n > MAX_STATE_QUBITS {
        return Err(out_of_range("repetition length", format!("{n}")));
    }
    let dim = 1usize << n;
    let mut zero = vec![C64::new(0.0, 0.0); dim];
    let mut one = zero.clone();
    zero[0] = C64::new(1.0, 0.0);
    one[dim - 1] = C64::new(1.0, 0.0);
    QuantumCode::new(n, vec![zero, one])
}

/// Looks up `leung4`, `shor9`, `perfect5` or `repetition(n)` (also `repetitionN`).
pub fn builtin(name: &str) -> Result<QuantumCode> {
    let name = name.trim();
    match name {
        "leung4" => return Ok(leung4()),
        "shor9" => return Ok(shor9()),
        "perfect5" => return Ok(perfect5()),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("repetition") {
        let digits = rest.trim_start_matches('(').trim_end_matches(')');
        if let Ok(n) = digits.parse::<usize>() {
            return repetition(n);
        }
    }
    Err(Error::UnknownCode(name.to_string()))
}

/// Dicke state `|D^n_w>`: the normalized sum of all weight-`w` basis states.
pub fn dicke_state(n: usize, w: usize) -> Result<Vec<C64>> {
    if w > n {
        return Err(out_of_range("Dicke weight", format!("{w} > n = {n}")));
    }
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "Dicke state",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    let count = binomial(n as u64, w as u64)? as f64;
    let amp = C64::new(1.0 / count.sqrt(), 0.0);
    Ok((0..1usize << n)
        .map(|b| {
            if b.count_ones() as usize == w {
                amp
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// `beta_{n,x}` as the exact fraction `(numerator, C(n,x))`.
pub fn beta_fraction(n: usize, x: usize) -> Result<(u128, u128)> {
    if x % 2 != 0 {
        return Err(out_of_range("beta", format!("x = {x} is odd")));
    }
    if x > n {
        return Err(out_of_range("beta", format!("x = {x} > n = {n}")));
    }
    let h = (x / 2) as u64;
    let n64 = n as u64;
    let mut best = u128::MAX;
    for w in h..=n64 - h {
        best = best.min(binomial(w, h)? * binomial(n64 - w, h)?);
    }
    Ok((best, binomial(n64, x as u64)?))
}

/// `beta_{n,x} = min_{x/2 <= w <= n-x/2} C(w,x/2) C(n-w,x/2) / C(n,x)` for even `x`.
pub fn beta(n: usize, x: usize) -> Result<f64> {
    let (num, den) = beta_fraction(n, x)?;
    Ok(num as f64 / den as f64)
}

/// Codewords `|L_j> = sum_w a_{j,w} |D^n_w>` with real coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DickeBasisCode {
    n: usize,
    coeffs: Vec<Vec<f64>>,
}

impl DickeBasisCode {
    pub fn new(n: usize, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("a code needs at least one codeword".into()));
        }
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "DickeBasisCode",
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        for (j, row) in coeffs.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::Dimension(format!(
                    "coefficient row {j} has length {}, expected {}",
                    row.len(),
                    n + 1
                )));
            }
        }
        let tol = TOLERANCES.orthonormality;
        for i in 0..coeffs.len() {
            for j in i..coeffs.len() {
                let ip: f64 = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                let deviation = (ip - target).abs();
                if !(deviation <= tol) {
                    return Err(Error::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Self { n, coeffs })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().flatten().all(|&a| a >= 0.0)
    }

    pub fn to_code(&self) -> Result<QuantumCode> {
        let dicke = (0..=self.n)
            .map(|w| dicke_state(self.n, w))
            .collect::<Result<Vec<_>>>()?;
        let words = self
            .coeffs
            .iter()
            .map(|row| {
                let mut v = vec![C64::new(0.0, 0.0); 1 << self.n];
                for (a, d) in row.iter().zip(&dicke) {
                    if *a != 0.0 {
                        for (x, y) in v.iter_mut().zip(d) {
                            *x += y * a;
                        }
                    }
                }
                v
            })
            .collect();
        QuantumCode::new(self.n, words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::OrbitClass;

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn projector_examples() {
        let single = QuantumCode::from_real(2, vec![vec![1.0, 0.0, 0.0, 0.0]]).unwrap();
        let p = single.projector().unwrap();
        let mut expect = DMatrix::zeros(4, 4);
        expect[(0, 0)] = C64::new(1.0, 0.0);
        assert_eq!(p, expect);

        let full = QuantumCode::from_real(
            2,
            (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
        )
        .unwrap();
        assert_eq!(full.projector().unwrap(), DMatrix::identity(4, 4));

        let p = leung4().projector().unwrap();
        assert!((p.trace() - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(p.rank(1e-9), 2);
    }

    #[test]
    fn builtin_projectors_are_idempotent() {
        for name in ["leung4", "perfect5", "repetition(3)", "repetition5", "shor9"] {
            let code = builtin(name).unwrap();
            let p = code.projector().unwrap();
            assert!(max_abs(&(&p * &p - &p)) < 1e-10, "{name}");
            assert!(max_abs(&(p.adjoint() - &p)) < 1e-12, "{name}");
            assert!((p.trace().re - code.dimension() as f64).abs() < 1e-10);
        }
        assert!(matches!(builtin("steane7"), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn repetition_projector() {
        let p = repetition(3).unwrap().projector().unwrap();
        let mut expect = DMatrix::zeros(8, 8);
        expect[(0, 0)] = C64::new(1.0, 0.0);
        expect[(7, 7)] = C64::new(1.0, 0.0);
        assert_eq!(p, expect);
    }

    #[test]
    fn named_code_parameters() {
        assert_eq!((leung4().num_qubits(), leung4().dimension()), (4, 2));
        assert_eq!((shor9().num_qubits(), shor9().dimension()), (9, 2));
        assert_eq!((perfect5().num_qubits(), perfect5().dimension()), (5, 2));
    }

    #[test]
    fn perfect5_is_stabilized() {
        let code = perfect5();
        for g in ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"] {
            let p: PauliString = g.parse().unwrap();
            assert!((code.trace_of_pauli(&p).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let r = QuantumCode::from_real(1, vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(r, Err(Error::NotOrthonormal { i: 0, j: 1, .. })));
        assert!(QuantumCode::from_real(1, vec![vec![0.9, 0.0]]).is_err());
        assert!(QuantumCode::from_real(2, vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn dicke_states() {
        let d = dicke_state(3, 0).unwrap();
        assert_eq!(d[0], C64::new(1.0, 0.0));
        let d = dicke_state(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d[1].re - h).abs() < 1e-15 && (d[2].re - h).abs() < 1e-15);
        assert_eq!(d[0].re + d[3].re, 0.0);
        assert!(dicke_state(2, 3).is_err());
    }

    #[test]
    fn dicke_expectation_spot_check() {
        let d = dicke_state(4, 2).unwrap();
        let sigma = OrbitClass::new(4, 2, 0, 0).unwrap().representative();
        let v = sigma.matrix_element(&d, &d).re;
        assert!((v - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(7, 0).unwrap(), 1.0);
        assert_eq!(beta_fraction(4, 2).unwrap(), (3, 6));
        assert!((beta(5, 2).unwrap() - 0.4).abs() < 1e-15);
        assert!(beta(5, 3).is_err());
        assert!(beta(3, 4).is_err());
    }

    #[test]
    fn permutation_invariance() {
        assert!(leung4().permutation_defect() > 0.1);
        assert!(repetition(4).unwrap().is_permutation_invariant(1e-12));
        let dc = DickeBasisCode::new(4, vec![vec![0.0, 0.0, 1.0, 0.0, 0.0]]).unwrap();
        assert!(dc.to_code().unwrap().is_permutation_invariant(1e-12));
    }

    #[test]
    fn json_round_trips() {
        let code = leung4();
        assert_eq!(QuantumCode::from_json(&code.to_json().unwrap()).unwrap(), code);
        let dc = QuantumCode::from_json(r#"{"dicke":{"n":2,"coeffs":[[1,0,0],[0,0,1]]}}"#).unwrap();
        assert_eq!(dc, repetition(2).unwrap());
        assert!(QuantumCode::from_json(r#"{"n":1,"codewords":[[[1,0],[0,0]],[[1,0],[0,0]]]}"#).is_err());
        assert!(DickeBasisCode::new(2, vec![vec![1.0, 1.0, 0.0]]).is_err());
    }
}
