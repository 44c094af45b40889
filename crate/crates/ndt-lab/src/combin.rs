//! Binomial coefficients and ordered subset enumeration.
//!
//! Placement and scheduling walk over fixed-size subsets of relays and
//! users in lexicographic order, so subsets are materialized as sorted
//! `Vec<usize>` lists over `1..=n`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// C(n, k) with the out-of-range convention C(n, k) = 0 for k < 0 or k > n.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::from(1u64);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// C(n, k) as u64; panics on overflow (counts in this crate stay tiny).
pub fn binomial_u64(n: u64, k: i64) -> u64 {
    binomial(n, k).to_u64().expect("binomial fits u64")
}

/// All k-element subsets of `{1, ..., n}`, sorted members, lexicographic
/// order over the member lists. `k = 0` yields the single empty subset.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination in lex order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - 1 - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sorted set difference `a \ b` for sorted member lists.
pub fn set_minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

/// True if sorted list `sub` is a subset of sorted list `sup`.
pub fn is_subset(sub: &[usize], sup: &[usize]) -> bool {
    sub.iter().all(|x| sup.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial_u64(4, 2), 6);
        assert_eq!(binomial_u64(3, 0), 1);
        assert_eq!(binomial_u64(2, 3), 0);
        assert_eq!(binomial_u64(2, -1), 0);
    }

    #[test]
    fn pascals_rule_exhaustive() {
        for n in 1..=30u64 {
            for k in 1..n as i64 {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k),
                    "pascal failed at ({n},{k})"
                );
            }
        }
    }

    #[test]
    fn subsets_are_lexicographic_and_complete() {
        let s = k_subsets(4, 2);
        assert_eq!(
            s,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        for n in 0..=8usize {
            for k in 0..=n {
                assert_eq!(
                    k_subsets(n, k).len() as u64,
                    binomial_u64(n as u64, k as i64)
                );
            }
        }
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn set_helpers() {
        assert_eq!(set_minus(&[1, 2, 4], &[2]), vec![1, 4]);
        assert!(is_subset(&[2, 4], &[1, 2, 4]));
        assert!(!is_subset(&[3], &[1, 2, 4]));
        assert!(is_subset(&[], &[1]));
    }
}
