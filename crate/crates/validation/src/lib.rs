//! Published reference values and random code generators used by the
//! acceptance checks.

use aqec_core::code::DickeBasisCode;
use aqec_core::{Complex64, QuantumCode};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn orthonormalize<T: Copy>(
    mut rows: Vec<Vec<T>>,
    dot: impl Fn(&[T], &[T]) -> T,
    norm: impl Fn(&[T]) -> f64,
    axpy: impl Fn(&mut [T], T, &[T]),
    scale: impl Fn(&mut [T], f64),
) -> Vec<Vec<T>> {
    for i in 0..rows.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (done, rest) = rows.split_at_mut(i);
                let c = dot(&done[j], &rest[0]);
                axpy(&mut rest[0], c, &done[j]);
            }
        }
        let nv = norm(&rows[i]);
        scale(&mut rows[i], 1.0 / nv);
    }
    rows
}

/// Haar-ish random `m`-dimensional subspace of `n` qubits.
pub fn random_code(rng: &mut ChaCha8Rng, n: usize, m: usize) -> QuantumCode {
    let dim = 1 << n;
    let rows: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let words = orthonormalize(
        rows,
        |a, b| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum(),
        |a| a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        |v, c, u| v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y),
        |v, s| v.iter_mut().for_each(|x| *x *= s),
    );
    QuantumCode::new(n, words).expect("orthonormal")
}

/// Random real span of Dicke states. With `nonneg` the codewords get
/// disjoint supports so the coefficients stay nonnegative.
pub fn random_dicke(rng: &mut ChaCha8Rng, n: usize, m: usize, nonneg: bool) -> DickeBasisCode {
    assert!(m <= n + 1);
    if nonneg {
        let mut weights: Vec<usize> = (0..=n).collect();
        weights.shuffle(rng);
        let mut coeffs = vec![vec![0.0; n + 1]; m];
        for (k, &w) in weights.iter().enumerate() {
            if k < m {
                coeffs[k][w] = rng.gen_range(0.05..1.0);
            } else if rng.gen_bool(0.8) {
                coeffs[rng.gen_range(0..m)][w] = rng.gen_range(0.05..1.0);
            }
        }
        for row in &mut coeffs {
            let nv = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            row.iter_mut().for_each(|x| *x /= nv);
        }
        return DickeBasisCode::new(n, coeffs).expect("orthonormal");
    }
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let coeffs = orthonormalize(
        rows,
        |a, b| a.iter().zip(b).map(|(x, y)| x * y).sum(),
        |a| a.iter().map(|x| x * x).sum::<f64>().sqrt(),
        |v, c, u| v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y),
        |v, s| v.iter_mut().for_each(|x| *x *= s),
    );
    DickeBasisCode::new(n, coeffs).expect("orthonormal")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Upper bounds on `M` for permutation-invariant codes with nonnegative
/// Dicke coefficients. Rows `d = 2..=6`, columns `n = 3..=12`.
pub const PI_BOUNDS: [[Option<usize>; 10]; 5] = table([
    [1, 3, 5, 7, 8, 9, 10, 11, 12, 13],
    [0, 0, 1, 2, 4, 6, 10, 11, 12, 13],
    [0, 0, 0, 0, 1, 2, 4, 6, 9, 13],
    [0, 0, 0, 0, 0, 1, 1, 1, 2, 4],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
]);

/// Upper bounds on `M` from the MacWilliams identities alone, same layout.
pub const MACW_BOUNDS: [[Option<usize>; 10]; 5] = table([
    [2, 4, 6, 7, 8, 9, 10, 11, 12, 13],
    [0, 0, 2, 2, 4, 9, 10, 11, 12, 13],
    [0, 0, 0, 0, 1, 2, 4, 9, 12, 13],
    [0, 0, 0, 0, 0, 0, 1, 2, 3, 5],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
]);

const fn table(raw: [[usize; 10]; 5]) -> [[Option<usize>; 10]; 5] {
    let mut out = [[None; 10]; 5];
    let mut r = 0;
    while r < 5 {
        let mut c = 0;
        while c < 10 {
            if raw[r][c] > 0 {
                out[r][c] = Some(raw[r][c]);
            }
            c += 1;
        }
        r += 1;
    }
    out
}

/// Populated `(n, d)` cells of a reference table.
pub fn populated(t: &[[Option<usize>; 10]; 5]) -> Vec<(usize, usize)> {
    (0..5)
        .flat_map(|r| (0..10).filter(move |&c| t[r][c].is_some()).map(move |c| (c + 3, r + 2)))
        .collect()
}

/// Reference value at `(n, d)`, if the cell is populated.
pub fn reference(t: &[[Option<usize>; 10]; 5], n: usize, d: usize) -> Option<usize> {
    t.get(d.checked_sub(2)?)?.get(n.checked_sub(3)?).copied().flatten()
}
