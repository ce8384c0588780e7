use std::collections::HashMap;

use super::linalg::integer_rank;
use super::module::{cstar_embedding, EquivariantError, Filtration, MonomialModule};
use super::twist::sections_of_twist;

/// Dimension of one graded piece of a subquotient and the dimension of the
/// same piece of a free cyclic module on the new generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreePiece {
    pub degree: i64,
    pub dimension: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCheck {
    /// Generator added at this step.
    pub generator: usize,
    pub pieces: Vec<DegreePiece>,
    /// Every piece within its bound.
    pub passed: bool,
    /// No nonzero piece appeared up to the cap.
    pub cap_too_small: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubquotientReport {
    /// The grading direction `k` and coordinate degrees `⟨k, w_j⟩ > 0`.
    pub direction: Vec<i64>,
    pub exponents: Vec<i64>,
    pub steps: Vec<StepCheck>,
}

impl SubquotientReport {
    pub fn passed(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.passed).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }
}

fn monomials(exponents: &[i64], degree: i64) -> Vec<Vec<u32>> {
    if degree < 0 {
        return Vec::new();
    }
    // Every exponent is at least 1, so the total degree is at most `degree`.
    sections_of_twist(exponents, degree, degree as u32).monomials
}

/// Graded linear algebra on `M_d = (⊕_g ℂ[t] e_g)_d / N_d`.
struct GradedPiece {
    /// Generator of each basis monomial `t^a e_g`.
    basis_generator: Vec<usize>,
    /// Rows spanning the relations in degree `d`.
    relations: Vec<Vec<i64>>,
    relation_rank: usize,
}

impl GradedPiece {
    fn new(m: &MonomialModule, k: &[i64], exps: &[i64], gen_deg: &[i64], d: i64) -> Self {
        let mut index: HashMap<(usize, Vec<u32>), usize> = HashMap::new();
        let mut basis_generator = Vec::new();
        for (g, &gd) in gen_deg.iter().enumerate() {
            for a in monomials(exps, d - gd) {
                index.insert((g, a), basis_generator.len());
                basis_generator.push(g);
            }
        }
        let mut relations = Vec::new();
        for (row, terms) in m.relations().iter().enumerate() {
            let rd = m.relation_weight(row).pair(k);
            for b in monomials(exps, d - rd) {
                let mut v = vec![0i64; basis_generator.len()];
                for t in terms {
                    let a: Vec<u32> = t.exponents.iter().zip(&b).map(|(x, y)| x + y).collect();
                    v[index[&(t.generator, a)]] += t.coefficient;
                }
                relations.push(v);
            }
        }
        let relation_rank = integer_rank(&relations);
        Self {
            basis_generator,
            relations,
            relation_rank,
        }
    }

    /// `dim (F_S)_d` for the submodule generated by `S`:
    /// `rank [N; E_S] − rank N`, where `E_S` are the unit rows of basis
    /// monomials on generators in `S`. Those unit rows clear their columns,
    /// so `rank [N; E_S] = |E_S| + rank N|_{other columns}`.
    fn submodule_dim(&self, in_s: &[bool]) -> usize {
        let keep: Vec<usize> = (0..self.basis_generator.len())
            .filter(|&c| !in_s[self.basis_generator[c]])
            .collect();
        let units = self.basis_generator.len() - keep.len();
        let restricted: Vec<Vec<i64>> = self
            .relations
            .iter()
            .map(|r| keep.iter().map(|&c| r[c]).collect())
            .collect();
        units + integer_rank(&restricted) - self.relation_rank
    }
}

/// Checks each step of the filtration against the growth of a cyclic module.
///
/// The module is graded by `deg(t^a e_g) = ⟨k, w_g⟩ + Σ a_j ⟨k, w_j⟩` for the
/// direction `k` of [`cstar_embedding`], which must give every coordinate a
/// positive degree. For degrees `d` from the smallest generator degree up to
/// the largest plus `degree_cap`, the piece `(F_i / F_{i−1})_d` is computed
/// exactly and must not exceed the number of monomials of degree
/// `d − deg g_i`.
pub fn subquotient_rank_check(
    m: &MonomialModule,
    f: &Filtration,
    degree_cap: u32,
) -> Result<SubquotientReport, EquivariantError> {
    let emb = cstar_embedding(m.action())?;
    if !emb.is_positive() {
        return Err(EquivariantError::NoPositiveGrading {
            direction: emb.direction,
        });
    }
    let k = &emb.direction;
    let exps = &emb.exponents;
    let gen_deg: Vec<i64> = m.generators().iter().map(|g| g.weight.pair(k)).collect();
    let dmin = *gen_deg.iter().min().expect("module has generators");
    let dmax = *gen_deg.iter().max().expect("module has generators") + degree_cap as i64;

    let pieces: Vec<(i64, GradedPiece)> = (dmin..=dmax)
        .map(|d| (d, GradedPiece::new(m, k, exps, &gen_deg, d)))
        .collect();

    let ngen = m.generators().len();
    let mut prev_dims = vec![0usize; pieces.len()];
    let mut steps = Vec::with_capacity(f.len());
    for (step, s) in f.chain().iter().enumerate() {
        let generator = f.order()[step];
        let mut in_s = vec![false; ngen];
        for &g in s {
            in_s[g] = true;
        }
        let mut step_pieces = Vec::with_capacity(pieces.len());
        for (slot, (d, piece)) in pieces.iter().enumerate() {
            let dim = piece.submodule_dim(&in_s);
            step_pieces.push(DegreePiece {
                degree: *d,
                dimension: dim - prev_dims[slot],
                bound: monomials(exps, d - gen_deg[generator]).len(),
            });
            prev_dims[slot] = dim;
        }
        steps.push(StepCheck {
            generator,
            passed: step_pieces.iter().all(|p| p.dimension <= p.bound),
            cap_too_small: step_pieces.iter().all(|p| p.dimension == 0),
            pieces: step_pieces,
        });
    }
    Ok(SubquotientReport {
        direction: emb.direction,
        exponents: emb.exponents,
        steps,
    })
}
