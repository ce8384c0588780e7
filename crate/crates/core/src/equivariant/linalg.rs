use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Exact rank of an integer matrix given by rows.
///
/// Fraction-free (Bareiss) elimination over `BigInt`: every division is
/// exact, so entries stay integers and bounded by minors of the input.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let ncols = first.len();
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in (rank + 1)..m {
            for j in (col + 1)..ncols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                let (q, r) = v.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = q;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}
