use std::f64::consts::TAU;

use num_complex::Complex64;

/// Tolerance on `|Σ m_i log α_i|` modulo `2π√−1`.
pub const RELATION_TOL: f64 = 1e-9;

/// Multiplicative relations among the eigenvalues found by bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureRank {
    /// `n` minus the rank of the relation lattice.
    pub rank: usize,
    /// Hermite normal form basis of the lattice spanned by the relations found.
    pub relations: Vec<Vec<i64>>,
    /// Number of relation vectors found (first nonzero entry positive).
    pub found: usize,
}

fn is_relation(logs: &[Complex64], m: &[i64]) -> bool {
    let s: Complex64 = logs.iter().zip(m).map(|(a, &k)| a * k as f64).sum();
    let winding = (s.im / TAU).round();
    s.re.abs() <= RELATION_TOL && (s.im - winding * TAU).abs() <= RELATION_TOL
}

/// Odometer over `[−bound, bound]^n`, yielding vectors whose first nonzero
/// entry is positive.
fn for_each_half_box(n: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    let mut m = vec![-bound; n];
    loop {
        if let Some(first) = m.iter().find(|&&x| x != 0) {
            if *first > 0 {
                f(&m);
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if m[k] < bound {
                m[k] += 1;
                break;
            }
            m[k] = -bound;
            k += 1;
        }
    }
}

/// Integer vectors `m` with `|m_i| ≤ bound` and `Σ m_i log α_i ∈ 2π√−1 ℤ`
/// (principal logarithms), reduced to a lattice basis.
///
/// The answer is exact only up to the bound: relations whose shortest
/// witnesses have larger entries are not seen.
pub fn closure_rank(alphas: &[Complex64], bound: i64) -> ClosureRank {
    let logs: Vec<Complex64> = alphas.iter().map(|a| a.ln()).collect();
    let mut found = Vec::new();
    for_each_half_box(alphas.len(), bound.max(0), |m| {
        if is_relation(&logs, m) {
            found.push(m.to_vec());
        }
    });
    let relations = hermite_normal_form(&found);
    ClosureRank {
        rank: alphas.len() - relations.len(),
        relations,
        found: found.len(),
    }
}

/// Row-style Hermite normal form: nonzero rows, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let ncols = first.len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let m = a.len();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m)
                .filter(|&i| a[i][col] != 0)
                .min_by_key(|&i| a[i][col].abs());
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in (r + 1)..m {
                let q = a[i][col] / a[r][col];
                if q != 0 {
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= q * y;
                    }
                }
                if a[i][col] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][col] == 0 {
            continue;
        }
        if a[r][col] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        let pivot_row = a[r].clone();
        for row in a.iter_mut().take(r) {
            let q = row[col].div_euclid(pivot_row[col]);
            if q != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.into_iter()
        .map(|row| row.into_iter().map(|x| x as i64).collect())
        .collect()
}
