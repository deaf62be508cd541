//! Binomial coefficients and k-subset enumeration.

use alloc::vec::Vec;

use crate::{Error, Result};

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact `C(n, k)` in 128-bit arithmetic.
pub fn binom(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Err(Error::argument(alloc::format!(
            "binomial needs k <= n, got k = {k}, n = {n}"
        )));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) / i is an integer; split the division so the
        // product only overflows when the result itself is out of range.
        let num = (n - k) as u128 + i;
        let g = gcd(acc, i);
        let (a, d) = (acc / g, i / g);
        acc = a
            .checked_mul(num / d)
            .ok_or(Error::Overflow { n, k })?;
    }
    Ok(acc)
}

/// `ln C(n, k)`; exact through [`binom`] when it fits, log-gamma otherwise.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    match binom(n, k) {
        Ok(c) if c < (1u128 << 53) => libm::log(c as f64),
        _ => {
            let (n, k) = (n as f64, k as f64);
            libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
        }
    }
}

/// Calls `visit` on every k-subset of `0..n` in colexicographic order.
///
/// Subsets are passed as strictly increasing index slices. Colex order sorts
/// subsets by their largest element first, then by the next largest, and so
/// on; for `n = 4, k = 2` this is `01 02 12 03 13 23`.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    if k > n {
        return;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        visit(&c);
        // smallest j whose element can move up without touching c[j+1]
        let mut j = 0;
        while j < k {
            let limit = if j + 1 < k { c[j + 1] } else { n };
            if c[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        if j == k {
            return;
        }
        c[j] += 1;
        for (i, slot) in c.iter_mut().enumerate().take(j) {
            *slot = i;
        }
    }
}

/// All k-subsets of `0..n` in colex order.
pub fn subsets_colex(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, k, |s| out.push(s.to_vec()));
    out
}

/// Calls `visit(counts)` for every multiset of size `k` over `m` symbols,
/// where `counts[i]` is the multiplicity of symbol `i`.
pub fn for_each_multiset<F: FnMut(&[usize])>(m: usize, k: usize, mut visit: F) {
    if m == 0 {
        return;
    }
    let mut counts = alloc::vec![0usize; m];
    counts[m - 1] = k;
    fn rec<F: FnMut(&[usize])>(counts: &mut [usize], pos: usize, left: usize, visit: &mut F) {
        let m = counts.len();
        if pos == m - 1 {
            counts[pos] = left;
            visit(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(counts, pos + 1, left - c, visit);
        }
        counts[pos] = 0;
    }
    rec(&mut counts, 0, k, &mut visit);
}

/// `ln(k! / prod counts[i]!)`.
pub fn ln_multinomial(counts: &[usize]) -> f64 {
    let k: usize = counts.iter().sum();
    let mut acc = libm::lgamma(k as f64 + 1.0);
    for &c in counts {
        acc -= libm::lgamma(c as f64 + 1.0);
    }
    acc
}

/// Exact multinomial coefficient `k! / prod counts[i]!` for small `k`.
pub fn multinomial(counts: &[usize]) -> Result<u128> {
    let mut left: u64 = counts.iter().map(|&c| c as u64).sum();
    let mut acc: u128 = 1;
    for &c in counts {
        let b = binom(left, c as u64)?;
        acc = acc.checked_mul(b).ok_or(Error::Overflow {
            n: left,
            k: c as u64,
        })?;
        left -= c as u64;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pascal(n: usize) -> Vec<Vec<u128>> {
        let mut rows: Vec<Vec<u128>> = vec![vec![1]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1u128; i + 1];
            for j in 1..i {
                row[j] = prev[j - 1] + prev[j];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2).unwrap(), 10);
        assert_eq!(binom(7, 0).unwrap(), 1);
        assert_eq!(binom(0, 0).unwrap(), 1);
        assert_eq!(binom(10, 5).unwrap(), 252);
    }

    #[test]
    fn matches_pascal_triangle() {
        let tri = pascal(120);
        for n in 0..=120u64 {
            for k in 0..=n {
                assert_eq!(binom(n, k).unwrap(), tri[n as usize][k as usize], "C({n},{k})");
            }
        }
    }

    #[test]
    fn k_above_n_is_an_argument_error() {
        assert!(matches!(binom(3, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn overflow_detected() {
        // C(130, 65) ~ 9.5e37 < 2^128 ~ 3.4e38, C(132, 66) ~ 3.8e38 does not fit
        assert!(binom(130, 65).is_ok());
        assert!(matches!(binom(132, 66), Err(Error::Overflow { .. })));
    }

    #[test]
    fn ln_binom_consistent_across_regimes() {
        let exact = libm::log(binom(60, 30).unwrap() as f64);
        let via_gamma = libm::lgamma(61.0) - 2.0 * libm::lgamma(31.0);
        assert!((exact - via_gamma).abs() < 1e-10);
        // beyond 128 bits only the log-gamma route is available
        let big = ln_binom(1000, 500);
        assert!(big.is_finite() && big > 600.0);
    }

    #[test]
    fn colex_order() {
        let s = subsets_colex(4, 2);
        assert_eq!(
            s,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn subset_counts_match_binomial() {
        for n in 0..=10 {
            for k in 0..=n {
                let mut count = 0u128;
                for_each_subset(n, k, |s| {
                    assert_eq!(s.len(), k);
                    assert!(s.windows(2).all(|w| w[0] < w[1]));
                    count += 1;
                });
                assert_eq!(count, binom(n as u64, k as u64).unwrap());
            }
        }
    }

    #[test]
    fn multisets_and_weights() {
        for m in 1..=5 {
            for k in 0..=4 {
                let mut count = 0u128;
                let mut weight = 0u128;
                for_each_multiset(m, k, |c| {
                    assert_eq!(c.iter().sum::<usize>(), k);
                    count += 1;
                    weight += multinomial(c).unwrap();
                });
                assert_eq!(count, binom((m + k - 1) as u64, k as u64).unwrap());
                assert_eq!(weight, (m as u128).pow(k as u32));
            }
        }
        assert!((ln_multinomial(&[2, 1, 1]) - libm::log(12.0)).abs() < 1e-12);
    }
}
