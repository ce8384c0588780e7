/// Monomials `t^a` of weighted degree `Σ a_j k_j = i` and total degree
/// `Σ a_j ≤ cap`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistSections {
    pub monomials: Vec<Vec<u32>>,
    /// True when the cap cannot have cut anything off: all `k_j > 0` and
    /// `cap ≥ i / min k_j`.
    pub complete: bool,
}

/// Sections of the twist `O(i)` on the weighted projective space with
/// weights `k`.
///
/// Enumeration is an explicit-stack depth-first search over the exponents;
/// when all weights are positive the partial weighted degree prunes branches
/// that already exceed `i`.
pub fn sections_of_twist(exponents: &[i64], i: i64, cap: u32) -> TwistSections {
    let n = exponents.len();
    let all_positive = exponents.iter().all(|&k| k > 0);
    let complete = all_positive
        && exponents
            .iter()
            .min()
            .is_none_or(|&kmin| i < 0 || (cap as i64) * kmin >= i);
    let mut monomials = Vec::new();
    if n == 0 {
        if i == 0 {
            monomials.push(Vec::new());
        }
        return TwistSections {
            monomials,
            complete,
        };
    }
    if all_positive && i < 0 {
        return TwistSections {
            monomials,
            complete,
        };
    }
    let mut a = vec![0u32; n];
    let mut depth = 0usize;
    let mut weighted = 0i64;
    let mut total = 0u32;
    // `started[d]`: the exponent at position `d` has been initialized on the
    // current branch and the next visit should increment it.
    let mut started = vec![false; n];
    loop {
        if depth == n {
            if weighted == i {
                monomials.push(a.clone());
            }
            depth -= 1;
            continue;
        }
        if !started[depth] {
            started[depth] = true;
            a[depth] = 0;
        } else {
            let next = a[depth] + 1;
            let over_cap = total + 1 > cap;
            let over_degree = all_positive && weighted + exponents[depth] > i;
            if over_cap || over_degree {
                weighted -= exponents[depth] * a[depth] as i64;
                total -= a[depth];
                a[depth] = 0;
                started[depth] = false;
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            a[depth] = next;
            weighted += exponents[depth];
            total += 1;
        }
        depth += 1;
    }
    monomials.sort();
    TwistSections {
        monomials,
        complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle(k: &[i64], i: i64, cap: u32) -> Vec<Vec<u32>> {
        fn rec(k: &[i64], i: i64, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == k.len() {
                let w: i64 = prefix.iter().zip(k).map(|(&a, &b)| a as i64 * b).sum();
                if w == i {
                    out.push(prefix.clone());
                }
                return;
            }
            let used: u32 = prefix.iter().sum();
            for e in 0..=(cap - used) {
                prefix.push(e);
                rec(k, i, cap, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, i, cap, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    #[test]
    fn spot_values() {
        let s = sections_of_twist(&[1, 1, 1], 2, 2);
        assert_eq!(s.monomials.len(), 6);
        assert!(s.complete);
        let s = sections_of_twist(&[1, 2, 3], 6, 6);
        assert_eq!(s.monomials.len(), 7);
        assert!(s.complete);
        assert!(sections_of_twist(&[1, 2], -1, 5).monomials.is_empty());
    }

    #[test]
    fn truncation_flag() {
        assert!(!sections_of_twist(&[1, 1], 5, 2).complete);
        assert!(!sections_of_twist(&[1, -1], 0, 3).complete);
        // Mixed signs: a_1 = a_2 up to the cap.
        assert_eq!(sections_of_twist(&[1, -1], 0, 4).monomials.len(), 3);
    }

    #[test]
    fn zero_degree() {
        assert_eq!(sections_of_twist(&[2, 3], 0, 0).monomials, vec![vec![0, 0]]);
    }

    proptest! {
        #[test]
        fn matches_recursive_oracle(
            k in prop::collection::vec(prop_oneof![-4i64..=-1, 1i64..=4], 1..=4),
            i in -4i64..=12,
            cap in 0u32..=6,
        ) {
            prop_assert_eq!(sections_of_twist(&k, i, cap).monomials, oracle(&k, i, cap));
        }
    }
}
