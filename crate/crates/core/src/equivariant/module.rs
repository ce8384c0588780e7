use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivariantError {
    #[error("torus rank must be at least 1")]
    RankZero,
    #[error("weight has {got} entries, torus rank is {expected}")]
    WeightRankMismatch { expected: usize, got: usize },
    #[error("coordinate {index} has zero weight")]
    ZeroCoordWeight { index: usize },
    #[error("module has no generators")]
    NoGenerators,
    #[error("relation {row} refers to unknown generator {generator}")]
    UnknownGenerator { row: usize, generator: usize },
    #[error("relation {row} has a monomial with the wrong number of exponents")]
    ExponentLengthMismatch { row: usize },
    #[error("relation {row} has a zero coefficient")]
    ZeroCoefficient { row: usize },
    #[error("relation {row} is empty")]
    EmptyRelation { row: usize },
    #[error("relation {row} is not weight-homogeneous")]
    NonHomogeneousRelation { row: usize },
    #[error("no one-parameter subgroup acts with all coordinate weights nonzero")]
    NoEmbedding,
    #[error("direction {direction:?} does not give every coordinate a positive degree")]
    NoPositiveGrading { direction: Vec<i64> },
}

/// A character of `(ℂ*)^l`, as an integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `⟨k, w⟩`.
    pub fn pair(&self, k: &[i64]) -> i64 {
        self.0.iter().zip(k).map(|(a, b)| a * b).sum()
    }

    pub fn add_scaled(&mut self, other: &Weight, factor: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }
}

/// A diagonal action of `(ℂ*)^l` on `ℂⁿ`: coordinate `t_j` has weight `w_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusAction {
    rank: usize,
    coord_weights: Vec<Weight>,
}

impl TorusAction {
    pub fn new(rank: usize, coord_weights: Vec<Weight>) -> Result<Self, EquivariantError> {
        if rank == 0 {
            return Err(EquivariantError::RankZero);
        }
        for (index, w) in coord_weights.iter().enumerate() {
            if w.rank() != rank {
                return Err(EquivariantError::WeightRankMismatch {
                    expected: rank,
                    got: w.rank(),
                });
            }
            if w.is_zero() {
                return Err(EquivariantError::ZeroCoordWeight { index });
            }
        }
        Ok(Self {
            rank,
            coord_weights,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.coord_weights.len()
    }

    pub fn coord_weights(&self) -> &[Weight] {
        &self.coord_weights
    }

    /// Weight of the monomial `t^a`.
    pub fn monomial_weight(&self, a: &[u32]) -> Weight {
        let mut w = Weight::zero(self.rank);
        for (wj, &aj) in self.coord_weights.iter().zip(a) {
            w.add_scaled(wj, aj as i64);
        }
        w
    }
}

/// A one-parameter subgroup `t ↦ (t^{k_1}, …)` of the torus and the
/// resulting exponents `⟨k, w_j⟩` on the coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CstarEmbedding {
    pub direction: Vec<i64>,
    pub exponents: Vec<i64>,
}

impl CstarEmbedding {
    pub fn is_positive(&self) -> bool {
        self.exponents.iter().all(|&k| k > 0)
    }
}

/// Shells searched for an all-positive direction before settling for one
/// with nonzero exponents.
const POSITIVE_SEARCH_SHELLS: i64 = 16;

/// Component order inside a shell: `0, 1, −1, 2, −2, …`.
fn from_key(key: i64) -> i64 {
    if key % 2 == 1 {
        key.div_euclid(2) + 1
    } else {
        -(key / 2)
    }
}

/// Calls `f` on each vector of max-norm exactly `s`, in lexicographic order
/// of component keys, until it returns true.
fn find_in_shell(l: usize, s: i64, mut f: impl FnMut(&[i64]) -> bool) -> Option<Vec<i64>> {
    let mut keys = vec![0i64; l];
    let mut v = vec![0i64; l];
    loop {
        for (x, &k) in v.iter_mut().zip(&keys) {
            *x = from_key(k);
        }
        if v.iter().map(|x| x.abs()).max() == Some(s) && f(&v) {
            return Some(v);
        }
        let mut pos = l;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if keys[pos] < 2 * s {
                keys[pos] += 1;
                break;
            }
            keys[pos] = 0;
        }
    }
}

/// The first direction `k`, by max-norm shell and then key order, whose
/// exponents `⟨k, w_j⟩` are all positive (searching the first
/// [`POSITIVE_SEARCH_SHELLS`] shells), or failing that all nonzero.
pub fn cstar_embedding(action: &TorusAction) -> Result<CstarEmbedding, EquivariantError> {
    let l = action.rank;
    let exponents =
        |k: &[i64]| -> Vec<i64> { action.coord_weights.iter().map(|w| w.pair(k)).collect() };
    for s in 1..=POSITIVE_SEARCH_SHELLS {
        if let Some(k) = find_in_shell(l, s, |k| exponents(k).iter().all(|&e| e > 0)) {
            return Ok(CstarEmbedding {
                exponents: exponents(&k),
                direction: k,
            });
        }
    }
    // Each coordinate excludes a hyperplane; finitely many hyperplanes miss
    // some lattice point in every large enough shell.
    for s in 1.. {
        if let Some(k) = find_in_shell(l, s, |k| exponents(k).iter().all(|&e| e != 0)) {
            return Ok(CstarEmbedding {
                exponents: exponents(&k),
                direction: k,
            });
        }
    }
    Err(EquivariantError::NoEmbedding)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: Weight,
}

/// `coefficient · t^exponents · e_generator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTerm {
    pub generator: usize,
    pub coefficient: i64,
    pub exponents: Vec<u32>,
}

/// The graded module `⊕_g ℂ[t] e_g / (relations)` with weight-homogeneous
/// relations `Σ c t^a e_g = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialModule {
    action: TorusAction,
    generators: Vec<Generator>,
    relations: Vec<Vec<RelationTerm>>,
}

impl MonomialModule {
    pub fn new(
        action: TorusAction,
        generators: Vec<Generator>,
        relations: Vec<Vec<RelationTerm>>,
    ) -> Result<Self, EquivariantError> {
        if generators.is_empty() {
            return Err(EquivariantError::NoGenerators);
        }
        for g in &generators {
            if g.weight.rank() != action.rank {
                return Err(EquivariantError::WeightRankMismatch {
                    expected: action.rank,
                    got: g.weight.rank(),
                });
            }
        }
        let module = Self {
            action,
            generators,
            relations,
        };
        for (row, terms) in module.relations.iter().enumerate() {
            if terms.is_empty() {
                return Err(EquivariantError::EmptyRelation { row });
            }
            for t in terms {
                if t.generator >= module.generators.len() {
                    return Err(EquivariantError::UnknownGenerator {
                        row,
                        generator: t.generator,
                    });
                }
                if t.exponents.len() != module.action.nvars() {
                    return Err(EquivariantError::ExponentLengthMismatch { row });
                }
                if t.coefficient == 0 {
                    return Err(EquivariantError::ZeroCoefficient { row });
                }
            }
            let w0 = module.term_weight(&terms[0]);
            if terms.iter().any(|t| module.term_weight(t) != w0) {
                return Err(EquivariantError::NonHomogeneousRelation { row });
            }
        }
        Ok(module)
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<RelationTerm>] {
        &self.relations
    }

    pub fn term_weight(&self, t: &RelationTerm) -> Weight {
        let mut w = self.action.monomial_weight(&t.exponents);
        w.add_scaled(&self.generators[t.generator].weight, 1);
        w
    }

    /// Weight of a (homogeneous) relation row.
    pub fn relation_weight(&self, row: usize) -> Weight {
        self.term_weight(&self.relations[row][0])
    }
}

/// Generators grouped by `⟨k, weight⟩`.
pub fn weight_decomposition(m: &MonomialModule, k: &[i64]) -> BTreeMap<i64, Vec<usize>> {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in m.generators.iter().enumerate() {
        groups.entry(g.weight.pair(k)).or_default().push(i);
    }
    groups
}

/// `F_1 ⊂ F_2 ⊂ … ⊂ F_m`, `F_i` generated by the first `i` generators of `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    order: Vec<usize>,
    chain: Vec<Vec<usize>>,
}

impl Filtration {
    /// Generator indices in the order they enter the chain.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `S_1, …, S_m`, each sorted.
    pub fn chain(&self) -> &[Vec<usize>] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Strictly increasing, one generator per step, ending at all generators.
    pub fn is_valid(&self, m: &MonomialModule) -> bool {
        let total = m.generators.len();
        let mut prev: Vec<usize> = Vec::new();
        for s in &self.chain {
            if s.len() != prev.len() + 1 || !prev.iter().all(|g| s.contains(g)) {
                return false;
            }
            if s.iter().any(|&g| g >= total) {
                return false;
            }
            prev = s.clone();
        }
        prev.len() == total
    }
}

/// Orders generators by (weight, input index) and returns the prefix chain.
pub fn build_filtration(m: &MonomialModule) -> Filtration {
    let mut order: Vec<usize> = (0..m.generators.len()).collect();
    order.sort_by(|&a, &b| {
        m.generators[a]
            .weight
            .cmp(&m.generators[b].weight)
            .then(a.cmp(&b))
    });
    let chain = (1..=order.len())
        .map(|i| {
            let mut s = order[..i].to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    Filtration { order, chain }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    fn gen(name: &str, v: &[i64]) -> Generator {
        Generator {
            name: name.into(),
            weight: w(v),
        }
    }

    fn term(generator: usize, coefficient: i64, exponents: &[u32]) -> RelationTerm {
        RelationTerm {
            generator,
            coefficient,
            exponents: exponents.to_vec(),
        }
    }

    #[test]
    fn key_order() {
        let keys: Vec<i64> = (0..5).map(from_key).collect();
        assert_eq!(keys, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn embedding_examples() {
        let a = TorusAction::new(1, vec![w(&[2]), w(&[3]), w(&[5])]).unwrap();
        let e = cstar_embedding(&a).unwrap();
        assert_eq!(e.direction, vec![1]);
        assert_eq!(e.exponents, vec![2, 3, 5]);
        let b = TorusAction::new(2, vec![w(&[1, 0]), w(&[0, 1]), w(&[1, -1])]).unwrap();
        let e = cstar_embedding(&b).unwrap();
        assert_eq!(e.direction, vec![2, 1]);
        assert!(e.is_positive());
        // No positive direction exists here; the fallback keeps exponents nonzero.
        let c = TorusAction::new(1, vec![w(&[1]), w(&[-2])]).unwrap();
        let e = cstar_embedding(&c).unwrap();
        assert_eq!(e.direction, vec![1]);
        assert_eq!(e.exponents, vec![1, -2]);
    }

    #[test]
    fn action_validation() {
        assert_eq!(
            TorusAction::new(1, vec![w(&[0])]),
            Err(EquivariantError::ZeroCoordWeight { index: 0 })
        );
        assert!(matches!(
            TorusAction::new(2, vec![w(&[1])]),
            Err(EquivariantError::WeightRankMismatch { .. })
        ));
    }

    #[test]
    fn homogeneity_enforced() {
        let a = TorusAction::new(1, vec![w(&[1])]).unwrap();
        let ok = MonomialModule::new(
            a.clone(),
            vec![gen("e1", &[0]), gen("e2", &[1])],
            vec![vec![term(0, 1, &[1]), term(1, -1, &[0])]],
        );
        assert!(ok.is_ok());
        let bad = MonomialModule::new(
            a,
            vec![gen("e1", &[0]), gen("e2", &[1])],
            vec![vec![term(0, 1, &[2]), term(1, -1, &[0])]],
        );
        assert_eq!(
            bad,
            Err(EquivariantError::NonHomogeneousRelation { row: 0 })
        );
    }

    #[test]
    fn filtration_order_and_validity() {
        let a = TorusAction::new(2, vec![w(&[1, 0]), w(&[0, 1])]).unwrap();
        let m = MonomialModule::new(
            a,
            vec![
                gen("a", &[1, 0]),
                gen("b", &[0, 2]),
                gen("c", &[0, 2]),
                gen("d", &[-1, 5]),
            ],
            vec![],
        )
        .unwrap();
        let f = build_filtration(&m);
        assert_eq!(f.order(), &[3, 1, 2, 0]);
        assert!(f.is_valid(&m));
        assert_eq!(f.chain()[1], vec![1, 3]);
    }

    #[test]
    fn decomposition_groups() {
        let a = TorusAction::new(1, vec![w(&[1])]).unwrap();
        let same =
            MonomialModule::new(a.clone(), vec![gen("a", &[2]), gen("b", &[2])], vec![]).unwrap();
        assert_eq!(weight_decomposition(&same, &[1]).len(), 1);
        let distinct = MonomialModule::new(
            a,
            vec![gen("a", &[3]), gen("b", &[1]), gen("c", &[2])],
            vec![],
        )
        .unwrap();
        let groups: Vec<Vec<usize>> = weight_decomposition(&distinct, &[1])
            .into_values()
            .collect();
        assert_eq!(groups, vec![vec![1], vec![2], vec![0]]);
    }
}
