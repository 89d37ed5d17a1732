//! Exact integer combinatorics used by the compressed connection matrices.
//!
//! Everything is computed in `u128`/`i128` with checked arithmetic and only
//! converted to floating point at matrix assembly.

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) / (j + 1) stays integral at every step
        acc = acc
            .checked_mul((n - j) as u128)
            .ok_or(Error::Overflow("binomial"))?
            / (j as u128 + 1);
    }
    Ok(acc)
}

/// Multinomial `n! / (x! y! z! (n-x-y-z)!)`; zero when `x + y + z > n`.
pub fn multinomial(n: u64, x: u64, y: u64, z: u64) -> Result<u128> {
    if x + y + z > n {
        return Ok(0);
    }
    let a = binomial(n, x)?;
    let b = binomial(n - x, y)?;
    let c = binomial(n - x - y, z)?;
    a.checked_mul(b)
        .and_then(|v| v.checked_mul(c))
        .ok_or(Error::Overflow("multinomial"))
}

/// Quaternary Krawtchouk polynomial
/// `K_i(x; n) = sum_j (-1)^j 3^(i-j) C(x, j) C(n-x, i-j)`.
pub fn krawtchouk(i: u64, x: u64, n: u64) -> Result<i128> {
    if i > n {
        return Err(crate::error::out_of_range(
            "Krawtchouk degree",
            format!("i = {i} exceeds n = {n}"),
        ));
    }
    if x > n {
        return Err(crate::error::out_of_range(
            "Krawtchouk argument",
            format!("x = {x} exceeds n = {n}"),
        ));
    }
    let mut total: i128 = 0;
    for j in 0..=i {
        let term = 3i128
            .checked_pow((i - j) as u32)
            .and_then(|p| p.checked_mul(binomial(x, j).ok()? as i128))
            .and_then(|p| p.checked_mul(binomial(n - x, i - j).ok()? as i128))
            .ok_or(Error::Overflow("krawtchouk"))?;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(12, 6).unwrap(), 924);
        assert_eq!(binomial(3, 4).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
    }

    #[test]
    fn multinomial_sums_to_four_to_the_n() {
        for n in 0..=12u64 {
            let mut total = 0u128;
            for x in 0..=n {
                for y in 0..=n - x {
                    for z in 0..=n - x - y {
                        total += multinomial(n, x, y, z).unwrap();
                    }
                }
            }
            // counts (x,y,z,rest) assignments = 4^n
            assert_eq!(total, 4u128.pow(n as u32));
        }
    }

    #[test]
    fn krawtchouk_basics() {
        for n in 1..=8 {
            for x in 0..=n {
                assert_eq!(krawtchouk(0, x, n).unwrap(), 1);
            }
            assert_eq!(krawtchouk(1, 0, n).unwrap(), 3 * n as i128);
        }
        let s: i128 = (0..=3).map(|i| krawtchouk(i, 0, 3).unwrap()).sum();
        assert_eq!(s, 64);
        assert!(krawtchouk(4, 0, 3).is_err());
    }

    #[test]
    fn binomial_overflow_is_reported() {
        assert!(binomial(200, 100).is_err());
    }
}
