//! n-qubit Pauli operators in symplectic bit form, their weight classes and
//! permutation orbits.
//!
//! Qubit `j` of a [`PauliString`] is stored in bit `j` of the X and Z masks.
//! State vectors use the big-endian convention: qubit 0 is the most
//! significant bit of the basis index, so `|0011>` has index 3.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::combinatorics::multinomial;
use crate::error::{out_of_range, Error, Result};

/// Largest qubit count for which whole orbit classes are enumerated.
pub const MAX_ORBIT_QUBITS: usize = 12;
/// Largest qubit count for materialized vectors indexed by all of the Pauli group.
pub const MAX_FULL_QUBITS: usize = 6;
/// Largest qubit count for state-vector operations.
pub const MAX_STATE_QUBITS: usize = 16;

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const ALL: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (false, true) => Pauli1::Z,
            (true, true) => Pauli1::Y,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Z => (false, true),
            Pauli1::Y => (true, true),
        }
    }

    /// The 2x2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli1::I => [[one, o], [o, one]],
            Pauli1::X => [[o, one], [one, o]],
            Pauli1::Y => [[o, -i], [i, o]],
            Pauli1::Z => [[one, o], [o, -one]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator without phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u32,
    z: u32,
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "PauliString",
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

#[inline]
fn mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

#[inline]
fn reverse_bits(v: u32, n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (32 - n)
    }
}

impl PauliString {
    pub fn new(n: usize, x_bits: u32, z_bits: u32) -> Result<Self> {
        check_n(n)?;
        if (x_bits | z_bits) & !mask(n) != 0 {
            return Err(out_of_range(
                "Pauli mask",
                format!("bits set beyond qubit {n}"),
            ));
        }
        Ok(Self {
            n,
            x: x_bits,
            z: z_bits,
        })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_STATE_QUBITS);
        Self { n, x: 0, z: 0 }
    }

    pub fn from_factors(factors: &[Pauli1]) -> Result<Self> {
        check_n(factors.len())?;
        let (mut x, mut z) = (0u32, 0u32);
        for (j, p) in factors.iter().enumerate() {
            let (xb, zb) = p.bits();
            x |= (xb as u32) << j;
            z |= (zb as u32) << j;
        }
        Ok(Self {
            n: factors.len(),
            x,
            z,
        })
    }

    /// Position in the fixed total order of the Pauli group, lexicographic on
    /// `(x_bits, z_bits)`.
    pub fn index(&self) -> usize {
        ((self.x as usize) << self.n) | self.z as usize
    }

    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        check_n(n)?;
        if index >> (2 * n) != 0 {
            return Err(out_of_range("Pauli index", format!("{index} >= 4^{n}")));
        }
        Ok(Self {
            n,
            x: (index >> n) as u32,
            z: (index as u32) & mask(n),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u32 {
        self.x
    }

    pub fn z_bits(&self) -> u32 {
        self.z
    }

    pub fn factor(&self, qubit: usize) -> Pauli1 {
        Pauli1::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn factors(&self) -> impl Iterator<Item = Pauli1> + '_ {
        (0..self.n).map(move |j| self.factor(j))
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// `+1` when the two operators commute, `-1` otherwise.
    pub fn commutation_sign(&self, other: &PauliString) -> Result<i8> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        Ok(self.commutation_sign_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutation_sign_unchecked(&self, other: &PauliString) -> i8 {
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        if s % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Counts of X, Y and Z factors.
    pub fn classify(&self) -> OrbitClass {
        let y = (self.x & self.z).count_ones() as usize;
        OrbitClass {
            n: self.n,
            x: (self.x & !self.z).count_ones() as usize,
            y,
            z: (self.z & !self.x).count_ones() as usize,
        }
    }

    /// Applies a permutation of qubits: qubit `j` moves to `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::QubitMismatch(self.n, perm.len()));
        }
        let (mut x, mut z) = (0u32, 0u32);
        for (j, &target) in perm.iter().enumerate() {
            if target >= self.n {
                return Err(out_of_range("permutation target", target.to_string()));
            }
            x |= ((self.x >> j) & 1) << target;
            z |= ((self.z >> j) & 1) << target;
        }
        Ok(Self { n: self.n, x, z })
    }

    /// X and Z masks expressed in state-index bit positions.
    #[inline]
    pub(crate) fn state_masks(&self) -> (usize, usize) {
        (
            reverse_bits(self.x, self.n) as usize,
            reverse_bits(self.z, self.n) as usize,
        )
    }

    /// `i^(number of Y factors)`.
    #[inline]
    pub(crate) fn y_phase(&self) -> Complex64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `sigma |psi>`.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != 1usize << self.n {
            return Err(Error::Dimension(format!(
                "state of length {} for {} qubits",
                psi.len(),
                self.n
            )));
        }
        let (xs, zs) = self.state_masks();
        let ph = self.y_phase();
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (b, amp) in psi.iter().enumerate() {
            let sign = if (zs & b).count_ones() % 2 == 0 { ph } else { -ph };
            out[b ^ xs] = sign * amp;
        }
        Ok(out)
    }

    /// `<phi| sigma |psi>` without allocating.
    pub(crate) fn matrix_element(&self, phi: &[Complex64], psi: &[Complex64]) -> Complex64 {
        let (xs, zs) = self.state_masks();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in psi.iter().enumerate() {
            let t = phi[b ^ xs].conj() * amp;
            if (zs & b).count_ones() % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc * self.y_phase()
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let (xs, zs) = self.state_masks();
        let ph = self.y_phase();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let sign = if (zs & b).count_ones() % 2 == 0 { ph } else { -ph };
            m[(b ^ xs, b)] = sign;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.factors() {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli1::I),
                'X' => Ok(Pauli1::X),
                'Y' => Ok(Pauli1::Y),
                'Z' => Ok(Pauli1::Z),
                _ => Err(Error::ParsePauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_factors(&factors)
    }
}

/// Number of Paulis on `n` qubits, `4^n`.
pub fn group_size(n: usize) -> usize {
    1usize << (2 * n)
}

/// Number of unordered pairs `{sigma, tau}` (with repetition) on `n` qubits.
pub fn pair_count(n: usize) -> usize {
    let g = group_size(n);
    g * (g + 1) / 2
}

/// Index of an unordered pair of group indices `a`, `b`.
#[inline]
pub fn pair_index_raw(a: usize, b: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    hi * (hi + 1) / 2 + lo
}

/// Index of the unordered pair `{sigma, tau}` in the swap-reduced pair space.
pub fn pair_index(sigma: &PauliString, tau: &PauliString) -> Result<usize> {
    if sigma.n != tau.n {
        return Err(Error::QubitMismatch(sigma.n, tau.n));
    }
    Ok(pair_index_raw(sigma.index(), tau.index()))
}

/// Iterator over all Paulis of a fixed weight.
#[derive(Clone, Debug)]
pub struct WeightIter {
    n: usize,
    weight: usize,
    support: Option<u32>,
    // base-3 counter over the non-identity factors of `support`
    digits: Vec<u8>,
}

/// All `C(n, i) 3^i` Paulis of weight `i`.
pub fn enumerate_by_weight(n: usize, i: usize) -> Result<WeightIter> {
    check_n(n)?;
    if i > n {
        return Err(out_of_range("weight", format!("{i} > n = {n}")));
    }
    let support = if i == 0 { 0 } else { (1u32 << i) - 1 };
    Ok(WeightIter {
        n,
        weight: i,
        support: Some(support),
        digits: vec![0; i],
    })
}

fn next_same_popcount(v: u32) -> u32 {
    // Gosper's hack
    let c = v & v.wrapping_neg();
    let r = v + c;
    (((r ^ v) >> 2) / c) | r
}

impl Iterator for WeightIter {
    type Item = PauliString;

    fn next(&mut self) -> Option<PauliString> {
        let support = self.support?;
        let (mut x, mut z) = (0u32, 0u32);
        let mut k = 0;
        for j in 0..self.n {
            if (support >> j) & 1 == 1 {
                let (xb, zb) = [Pauli1::X, Pauli1::Y, Pauli1::Z][self.digits[k] as usize].bits();
                x |= (xb as u32) << j;
                z |= (zb as u32) << j;
                k += 1;
            }
        }
        let item = PauliString { n: self.n, x, z };

        // advance the digit counter, then the support
        let mut carry = true;
        for d in self.digits.iter_mut() {
            if *d == 2 {
                *d = 0;
            } else {
                *d += 1;
                carry = false;
                break;
            }
        }
        if carry {
            if self.weight == 0 || self.weight == self.n {
                self.support = None;
            } else {
                let next = next_same_popcount(support);
                self.support = if next >> self.n != 0 { None } else { Some(next) };
            }
        }
        Some(item)
    }
}

/// Permutation orbit `C_{x,y,z,n}` of the Pauli group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct OrbitClass {
    pub n: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl OrbitClass {
    pub fn new(n: usize, x: usize, y: usize, z: usize) -> Result<Self> {
        if x + y + z > n {
            return Err(out_of_range(
                "orbit class",
                format!("x + y + z = {} > n = {n}", x + y + z),
            ));
        }
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "OrbitClass",
                n,
                limit: MAX_STATE_QUBITS,
            });
        }
        Ok(Self { n, x, y, z })
    }

    pub fn weight(&self) -> usize {
        self.x + self.y + self.z
    }

    /// `|C_{x,y,z,n}| = n! / (x! y! z! (n-x-y-z)!)`.
    pub fn size(&self) -> u64 {
        multinomial(self.n as u64, self.x as u64, self.y as u64, self.z as u64)
            .expect("multinomial fits for n <= 16") as u64
    }

    /// `X^x Y^y Z^z I^(n-x-y-z)`, qubit 0 first.
    pub fn representative(&self) -> PauliString {
        let mut factors = Vec::with_capacity(self.n);
        factors.extend(std::iter::repeat(Pauli1::X).take(self.x));
        factors.extend(std::iter::repeat(Pauli1::Y).take(self.y));
        factors.extend(std::iter::repeat(Pauli1::Z).take(self.z));
        factors.extend(std::iter::repeat(Pauli1::I).take(self.n - self.weight()));
        PauliString::from_factors(&factors).expect("n checked at construction")
    }

    /// Number of classes on `n` qubits, `C(n+3, 3)`.
    pub fn count(n: usize) -> usize {
        (n + 1) * (n + 2) * (n + 3) / 6
    }

    /// All classes in canonical order: lexicographic in `(x, y, z)`.
    pub fn all(n: usize) -> Vec<OrbitClass> {
        let mut out = Vec::with_capacity(Self::count(n));
        for x in 0..=n {
            for y in 0..=n - x {
                for z in 0..=n - x - y {
                    out.push(OrbitClass { n, x, y, z });
                }
            }
        }
        out
    }

    /// Position of this class in [`OrbitClass::all`].
    pub fn index(&self) -> usize {
        let n = self.n;
        let mut idx = 0;
        for x in 0..self.x {
            let r = n - x;
            idx += (r + 1) * (r + 2) / 2;
        }
        let r = n - self.x;
        for y in 0..self.y {
            idx += r - y + 1;
        }
        idx + self.z
    }

    /// Every member of the orbit, in increasing group-index order.
    pub fn members(&self) -> Result<Vec<PauliString>> {
        if self.n > MAX_ORBIT_QUBITS {
            return Err(Error::TooManyQubits {
                what: "orbit enumeration",
                n: self.n,
                limit: MAX_ORBIT_QUBITS,
            });
        }
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut factors = vec![Pauli1::I; self.n];
        fill_orbit(
            &mut factors,
            0,
            [self.n - self.weight(), self.x, self.y, self.z],
            &mut out,
        );
        out.sort_by_key(|p| p.index());
        Ok(out)
    }
}

fn fill_orbit(factors: &mut [Pauli1], pos: usize, left: [usize; 4], out: &mut Vec<PauliString>) {
    if pos == factors.len() {
        out.push(PauliString::from_factors(factors).expect("bounded n"));
        return;
    }
    for (k, p) in [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z].into_iter().enumerate() {
        if left[k] > 0 {
            let mut l = left;
            l[k] -= 1;
            factors[pos] = p;
            fill_orbit(factors, pos + 1, l, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(p("III").weight(), 0);
        assert_eq!(p("XIY").weight(), 2);
        assert_eq!(OrbitClass::new(5, 2, 1, 1).unwrap().representative().weight(), 4);
    }

    #[test]
    fn commutation() {
        assert_eq!(p("I").commutation_sign(&p("X")).unwrap(), 1);
        assert_eq!(p("X").commutation_sign(&p("Z")).unwrap(), -1);
        assert_eq!(p("XX").commutation_sign(&p("ZZ")).unwrap(), 1);
        assert_eq!(p("XY").commutation_sign(&p("ZZ")).unwrap(), 1);
        assert_eq!(p("XI").commutation_sign(&p("YZ")).unwrap(), -1);
        assert!(p("X").commutation_sign(&p("XX")).is_err());
    }

    #[test]
    fn weight_class_sizes() {
        assert_eq!(enumerate_by_weight(2, 0).unwrap().count(), 1);
        assert_eq!(enumerate_by_weight(2, 1).unwrap().count(), 6);
        assert_eq!(enumerate_by_weight(3, 3).unwrap().count(), 27);
        assert!(enumerate_by_weight(3, 4).is_err());
        for n in 0..=6 {
            let mut seen = std::collections::HashSet::new();
            for i in 0..=n {
                for q in enumerate_by_weight(n, i).unwrap() {
                    assert_eq!(q.weight(), i);
                    assert!(seen.insert(q.index()));
                }
            }
            assert_eq!(seen.len(), group_size(n));
        }
    }

    #[test]
    fn classify_examples() {
        let c = p("YXI").classify();
        assert_eq!((c.x, c.y, c.z), (1, 1, 0));
        let c = p("III").classify();
        assert_eq!((c.x, c.y, c.z), (0, 0, 0));
        let c = p("ZZZZ").classify();
        assert_eq!((c.x, c.y, c.z), (0, 0, 4));
    }

    #[test]
    fn pair_indexing() {
        assert_eq!(pair_index(&p("I"), &p("I")).unwrap(), 0);
        assert_eq!(pair_count(1), 10);
        assert_eq!(pair_count(3), 2080);
        let mut seen = vec![false; pair_count(2)];
        for a in 0..16 {
            for b in 0..16 {
                let (s, t) = (
                    PauliString::from_index(2, a).unwrap(),
                    PauliString::from_index(2, b).unwrap(),
                );
                let k = pair_index(&s, &t).unwrap();
                assert_eq!(k, pair_index(&t, &s).unwrap());
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn orbit_classes_partition_group() {
        for n in 0..=6 {
            let total: u64 = OrbitClass::all(n).iter().map(|c| c.size()).sum();
            assert_eq!(total as usize, group_size(n));
            for (k, c) in OrbitClass::all(n).iter().enumerate() {
                assert_eq!(c.index(), k);
                let members = c.members().unwrap();
                assert_eq!(members.len() as u64, c.size());
                assert!(members.iter().all(|m| m.classify() == *c));
            }
        }
    }

    #[test]
    fn string_round_trip_and_action() {
        let s = p("XIY");
        assert_eq!(s.to_string(), "XIY");
        assert!("XQ".parse::<PauliString>().is_err());
        // X on qubit 0 maps |00> (index 0) to |10> (index 2)
        let mut psi = vec![Complex64::new(0.0, 0.0); 4];
        psi[0] = Complex64::new(1.0, 0.0);
        let out = p("XI").apply(&psi).unwrap();
        assert_eq!(out[2], Complex64::new(1.0, 0.0));
        // dense form agrees with the single-qubit matrices
        let y = p("Y").to_dense();
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
    }

    proptest! {
        #[test]
        fn commutation_symmetric(n in 1usize..7, a in any::<u32>(), b in any::<u32>()) {
            let s = PauliString::from_index(n, a as usize % group_size(n)).unwrap();
            let t = PauliString::from_index(n, b as usize % group_size(n)).unwrap();
            prop_assert_eq!(s.commutation_sign(&t).unwrap(), t.commutation_sign(&s).unwrap());
            prop_assert_eq!(s.commutation_sign(&s).unwrap(), 1);
        }

        #[test]
        fn classify_is_permutation_invariant(
            (a, perm) in (1usize..9).prop_flat_map(|n| {
                (any::<u32>(), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
            })
        ) {
            let n = perm.len();
            let s = PauliString::from_index(n, a as usize % group_size(n)).unwrap();
            prop_assert_eq!(s.permuted(&perm).unwrap().classify(), s.classify());
        }

        #[test]
        fn dense_matches_apply(n in 1usize..4, a in any::<u32>()) {
            let s = PauliString::from_index(n, a as usize % group_size(n)).unwrap();
            let dense = s.to_dense();
            for b in 0..(1usize << n) {
                let mut e = vec![Complex64::new(0.0, 0.0); 1 << n];
                e[b] = Complex64::new(1.0, 0.0);
                let col = s.apply(&e).unwrap();
                for r in 0..(1usize << n) {
                    prop_assert!((dense[(r, b)] - col[r]).norm() < 1e-15);
                }
            }
        }
    }
}
