//! Binary relations on a finite universe as dense bit matrices, the
//! relation algebra (compose, converse, meet, join, transitive closure),
//! compatibility with an algebra, generated relations of each kind, and
//! relation enumeration.

use crate::algebra::FiniteAlgebra;
use crate::closure::{close_subuniverse, Caps, TupleSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelError {
    #[error("pair ({0}, {1}) out of range for universe size {2}")]
    PairOutOfRange(usize, usize, usize),
    #[error("malformed relation literal: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("computation exceeded its caps and is inconclusive")]
    Capped,
}

/// A binary relation on `{0, …, n-1}`. Row `a`, bit `b` set means
/// `(a, b)` is in the relation. Extensional equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinRel {
    n: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl BinRel {
    pub fn empty(n: usize) -> Self {
        assert!(n > 0);
        let wpr = n.div_ceil(64);
        BinRel {
            n,
            wpr,
            bits: vec![0; n * wpr],
        }
    }

    /// The diagonal (identity) relation.
    pub fn diagonal(n: usize) -> Self {
        let mut r = BinRel::empty(n);
        for a in 0..n {
            r.insert(a, a);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = BinRel::empty(n);
        for w in r.bits.iter_mut() {
            *w = u64::MAX;
        }
        r.clear_slack();
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, RelError> {
        let mut r = BinRel::empty(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(RelError::PairOutOfRange(a, b, n));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    fn clear_slack(&mut self) {
        let extra = self.wpr * 64 - self.n;
        if extra > 0 {
            let mask = u64::MAX >> extra;
            for a in 0..self.n {
                self.bits[a * self.wpr + self.wpr - 1] &= mask;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        debug_assert!(a < self.n && b < self.n);
        self.bits[a * self.wpr + b / 64] |= 1 << (b % 64);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        debug_assert!(a < self.n && b < self.n);
        self.bits[a * self.wpr + b / 64] & (1 << (b % 64)) != 0
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.wpr..(a + 1) * self.wpr]
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.contains(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn count_pairs(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `(a, c)` iff `a r b` and `b s c` for some `b` ("r then s").
    pub fn compose(&self, s: &BinRel) -> BinRel {
        assert_eq!(self.n, s.n, "universe mismatch");
        let mut out = BinRel::empty(self.n);
        for a in 0..self.n {
            let dst_start = a * out.wpr;
            for b in 0..self.n {
                if self.contains(a, b) {
                    let src = s.row(b);
                    for (w, &v) in src.iter().enumerate() {
                        out.bits[dst_start + w] |= v;
                    }
                }
            }
        }
        out
    }

    pub fn converse(&self) -> BinRel {
        let mut out = BinRel::empty(self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                if self.contains(a, b) {
                    out.insert(b, a);
                }
            }
        }
        out
    }

    pub fn intersect(&self, other: &BinRel) -> BinRel {
        assert_eq!(self.n, other.n, "universe mismatch");
        let mut out = self.clone();
        for (w, v) in out.bits.iter_mut().zip(&other.bits) {
            *w &= v;
        }
        out
    }

    pub fn union(&self, other: &BinRel) -> BinRel {
        assert_eq!(self.n, other.n, "universe mismatch");
        let mut out = self.clone();
        for (w, v) in out.bits.iter_mut().zip(&other.bits) {
            *w |= v;
        }
        out
    }

    /// Transitive closure (Warshall). Does not force reflexivity.
    pub fn star(&self) -> BinRel {
        let mut out = self.clone();
        for k in 0..self.n {
            let krow = out.row(k).to_vec();
            for a in 0..self.n {
                if out.contains(a, k) {
                    let dst = a * out.wpr;
                    for (w, &v) in krow.iter().enumerate() {
                        out.bits[dst + w] |= v;
                    }
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BinRel) -> bool {
        assert_eq!(self.n, other.n, "universe mismatch");
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(w, v)| w & !v == 0)
    }

    /// Lexicographically least pair of `self \ other`, if any.
    pub fn first_pair_not_in(&self, other: &BinRel) -> Option<(usize, usize)> {
        assert_eq!(self.n, other.n, "universe mismatch");
        for a in 0..self.n {
            for b in 0..self.n {
                if self.contains(a, b) && !other.contains(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.contains(a, b) == self.contains(b, a)))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    /// Compatible = a subuniverse of `A × A`: preserved by every basic
    /// operation applied coordinatewise.
    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        assert_eq!(self.n, alg.size(), "universe mismatch");
        let pairs = self.pairs();
        for (op_idx, op) in alg.operations().iter().enumerate() {
            let k = op.arity;
            if k == 0 {
                let c = alg.apply(op_idx, &[]);
                if !self.contains(c, c) {
                    return false;
                }
                continue;
            }
            if pairs.is_empty() {
                continue;
            }
            let mut choice = vec![0usize; k];
            let mut lhs = vec![0usize; k];
            let mut rhs = vec![0usize; k];
            loop {
                for (i, &c) in choice.iter().enumerate() {
                    lhs[i] = pairs[c].0;
                    rhs[i] = pairs[c].1;
                }
                if !self.contains(alg.apply(op_idx, &lhs), alg.apply(op_idx, &rhs)) {
                    return false;
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < pairs.len() {
                        break;
                    }
                    choice[pos] = 0;
                }
                if choice.iter().all(|&c| c == 0) {
                    break;
                }
            }
        }
        true
    }
}

/// Closure mode for [`generated_relation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenMode {
    ReflexiveCompatible,
    Tolerance,
    Congruence,
    Preorder,
}

/// The relation kinds that quantifier prefixes range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelKind {
    ReflexiveCompatible,
    Tolerance,
    Congruence,
}

impl RelKind {
    pub fn gen_mode(self) -> GenMode {
        match self {
            RelKind::ReflexiveCompatible => GenMode::ReflexiveCompatible,
            RelKind::Tolerance => GenMode::Tolerance,
            RelKind::Congruence => GenMode::Congruence,
        }
    }

    pub fn satisfied_by(self, alg: &FiniteAlgebra, r: &BinRel) -> bool {
        if !r.is_reflexive() || !r.is_compatible(alg) {
            return false;
        }
        match self {
            RelKind::ReflexiveCompatible => true,
            RelKind::Tolerance => r.is_symmetric(),
            RelKind::Congruence => r.is_symmetric() && r.is_transitive(),
        }
    }
}

impl std::fmt::Display for RelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RelKind::ReflexiveCompatible => "reflexive-compatible",
            RelKind::Tolerance => "tolerance",
            RelKind::Congruence => "congruence",
        })
    }
}

/// Least relation containing `seed ∪ Δ` that is compatible and satisfies
/// the extra closure rules of `mode`.
///
/// The compatible closure of a symmetric reflexive set is symmetric, and
/// the transitive closure of a reflexive compatible relation stays
/// compatible, so each mode reduces to one subuniverse closure on `A²`
/// followed by at most one transitive closure.
pub fn generated_relation(alg: &FiniteAlgebra, seed: &[(usize, usize)], mode: GenMode) -> BinRel {
    generated_relation_with_caps(alg, seed, mode, &Caps::default())
        .expect("uncapped generated_relation")
}

pub fn generated_relation_with_caps(
    alg: &FiniteAlgebra,
    seed: &[(usize, usize)],
    mode: GenMode,
    caps: &Caps,
) -> Result<BinRel, RelError> {
    let n = alg.size();
    let symmetric = matches!(mode, GenMode::Tolerance | GenMode::Congruence);
    let mut gens: Vec<Vec<u32>> = Vec::new();
    for &(a, b) in seed {
        assert!(a < n && b < n, "seed pair out of universe");
        gens.push(vec![a as u32, b as u32]);
        if symmetric {
            gens.push(vec![b as u32, a as u32]);
        }
    }
    for a in 0..n {
        gens.push(vec![a as u32, a as u32]);
    }
    let space = TupleSpace::new(alg, 2);
    let closure = close_subuniverse(&space, &gens, false, caps);
    if closure.capped {
        return Err(RelError::Capped);
    }
    let mut rel = BinRel::empty(n);
    for e in &closure.elements {
        rel.insert(e[0] as usize, e[1] as usize);
    }
    Ok(match mode {
        GenMode::ReflexiveCompatible | GenMode::Tolerance => rel,
        GenMode::Congruence | GenMode::Preorder => rel.star(),
    })
}

/// Budget controlling [`enumerate_relations`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnumBudget {
    /// Enumerate all `2^(n(n-1))` reflexive candidates when `n(n-1)` is at
    /// most this many bits.
    pub exhaustive_bits: u32,
    /// Number of pseudorandom seed sets in sampling mode.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            exhaustive_bits: 20,
            samples: 200,
            seed: 0,
        }
    }
}

/// All (or sampled) relations of a kind on `alg`, deterministically ordered.
///
/// Exhaustive mode filters every reflexive candidate by the kind predicate;
/// sampling mode closes pseudorandom seed sets and deduplicates.
pub fn enumerate_relations(alg: &FiniteAlgebra, kind: RelKind, budget: &EnumBudget) -> Vec<BinRel> {
    let n = alg.size();
    let bits = n * (n - 1);
    if (bits as u32) <= budget.exhaustive_bits {
        let off_diag: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b)
            .collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << bits) {
            let mut r = BinRel::diagonal(n);
            for (i, &(a, b)) in off_diag.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    r.insert(a, b);
                }
            }
            if kind.satisfied_by(alg, &r) {
                out.push(r);
            }
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for _ in 0..budget.samples {
            let k = rng.random_range(1..=3usize);
            let seed: Vec<(usize, usize)> = (0..k)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect();
            let r = generated_relation(alg, &seed, kind.gen_mode());
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
        out
    }
}

/// Close mode of a relation literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CloseSpec {
    #[default]
    None,
    ReflexiveCompatible,
    Tolerance,
    Congruence,
}

/// The relation literal wire format:
/// `{"pairs": [[a,b],...], "close": "none" | "reflexive-compatible" | "tolerance" | "congruence"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationLiteral {
    pub pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub close: CloseSpec,
}

impl RelationLiteral {
    pub fn parse(text: &str) -> Result<Self, RelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn realize(&self, alg: &FiniteAlgebra) -> Result<BinRel, RelError> {
        let n = alg.size();
        for &(a, b) in &self.pairs {
            if a >= n || b >= n {
                return Err(RelError::PairOutOfRange(a, b, n));
            }
        }
        Ok(match self.close {
            CloseSpec::None => BinRel::from_pairs(n, &self.pairs)?,
            CloseSpec::ReflexiveCompatible => {
                generated_relation(alg, &self.pairs, GenMode::ReflexiveCompatible)
            }
            CloseSpec::Tolerance => generated_relation(alg, &self.pairs, GenMode::Tolerance),
            CloseSpec::Congruence => generated_relation(alg, &self.pairs, GenMode::Congruence),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> BinRel {
        let mut r = BinRel::diagonal(n);
        for &(a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    #[test]
    fn compose_with_diagonal_is_identity() {
        let r = rel(3, &[(0, 1), (2, 0)]);
        let d = BinRel::diagonal(3);
        assert_eq!(d.compose(&r), r);
        assert_eq!(r.compose(&d), r);
    }

    #[test]
    fn compose_chases_definitions() {
        let r = rel(3, &[(0, 1)]);
        let s = rel(3, &[(1, 2)]);
        assert_eq!(r.compose(&s), rel(3, &[(0, 1), (1, 2), (0, 2)]));
    }

    #[test]
    fn compose_matches_boolean_matrix_product() {
        // 2x2 boolean product oracle for r = Δ ∪ {(0,1)}: r·r = r.
        let r = rel(2, &[(0, 1)]);
        let mut oracle = BinRel::empty(2);
        for a in 0..2 {
            for c in 0..2 {
                if (0..2).any(|b| r.contains(a, b) && r.contains(b, c)) {
                    oracle.insert(a, c);
                }
            }
        }
        assert_eq!(r.compose(&r), oracle);
        assert_eq!(r.compose(&r), r);
    }

    #[test]
    fn converse_examples() {
        assert_eq!(BinRel::diagonal(3).converse(), BinRel::diagonal(3));
        assert_eq!(rel(3, &[(0, 1)]).converse(), rel(3, &[(1, 0)]));
        let r = rel(4, &[(0, 3), (2, 1), (1, 3)]);
        assert_eq!(r.converse().converse(), r);
    }

    #[test]
    fn set_union_intersection() {
        let r = rel(2, &[(0, 1)]);
        let s = rel(2, &[(1, 0)]);
        assert_eq!(r.intersect(&BinRel::full(2)), r);
        assert_eq!(r.intersect(&s), BinRel::diagonal(2));
        assert!(r.union(&s).is_symmetric());
    }

    #[test]
    fn star_examples() {
        assert_eq!(BinRel::diagonal(3).star(), BinRel::diagonal(3));
        let chain = rel(3, &[(0, 1), (1, 2)]);
        assert!(chain.star().contains(0, 2));
        assert_eq!(rel(2, &[(0, 1), (1, 0)]).star(), BinRel::full(2));
    }

    #[test]
    fn star_is_idempotent_extensive_monotone() {
        let r = rel(5, &[(0, 1), (1, 2), (3, 4)]);
        let s = r.star();
        assert_eq!(s.star(), s);
        assert!(r.is_subset(&s));
        let bigger = r.union(&rel(5, &[(2, 3)]));
        assert!(r.star().is_subset(&bigger.star()));
    }

    #[test]
    fn compatibility_examples() {
        let set2 = presets::set_algebra(2);
        assert!(rel(2, &[(0, 1)]).is_compatible(&set2));
        assert!(BinRel::full(2).is_compatible(&set2));

        let s2 = presets::two_semilattice();
        assert!(rel(2, &[(0, 1)]).is_compatible(&s2));

        let z2 = presets::z2();
        // (0,1)+(1,1) = (1,0) would be forced but is absent
        assert!(!rel(2, &[(0, 1)]).is_compatible(&z2));
        assert!(BinRel::full(2).is_compatible(&z2));
    }

    #[test]
    fn generated_congruence_on_z2_is_full() {
        let z2 = presets::z2();
        let c = generated_relation(&z2, &[(0, 1)], GenMode::Congruence);
        assert_eq!(c, BinRel::full(2));
    }

    #[test]
    fn generated_reflexive_compatible_on_s2() {
        let s2 = presets::two_semilattice();
        let r = generated_relation(&s2, &[(0, 1)], GenMode::ReflexiveCompatible);
        assert_eq!(r, rel(2, &[(0, 1)]));
    }

    #[test]
    fn generated_tolerance_on_s2_is_full() {
        let s2 = presets::two_semilattice();
        let t = generated_relation(&s2, &[(0, 1)], GenMode::Tolerance);
        assert_eq!(t, BinRel::full(2));
    }

    #[test]
    fn generated_relation_satisfies_its_mode() {
        for alg in presets::all() {
            if alg.size() > 3 {
                continue;
            }
            let seed = [(0usize, alg.size() - 1)];
            for (mode, kind) in [
                (GenMode::ReflexiveCompatible, RelKind::ReflexiveCompatible),
                (GenMode::Tolerance, RelKind::Tolerance),
                (GenMode::Congruence, RelKind::Congruence),
            ] {
                let r = generated_relation(&alg, &seed, mode);
                assert!(
                    kind.satisfied_by(&alg, &r),
                    "{} violates {kind} for mode {mode:?}",
                    alg.name()
                );
            }
        }
    }

    /// Oracle: the generated relation must equal the intersection of all
    /// kind-relations containing the seed (exhaustively enumerated).
    #[test]
    fn generated_relation_is_minimal_on_small_algebras() {
        for alg in presets::all() {
            let n = alg.size();
            if n > 3 {
                continue;
            }
            let seed = [(0usize, n - 1)];
            for kind in [
                RelKind::ReflexiveCompatible,
                RelKind::Tolerance,
                RelKind::Congruence,
            ] {
                let generated = generated_relation(&alg, &seed, kind.gen_mode());
                let mut meet = BinRel::full(n);
                let mut found = false;
                for r in enumerate_relations(&alg, kind, &EnumBudget::default()) {
                    if seed.iter().all(|&(a, b)| r.contains(a, b)) {
                        meet = meet.intersect(&r);
                        found = true;
                    }
                }
                assert!(found);
                assert_eq!(
                    generated, meet,
                    "minimality fails for {kind} on {}",
                    alg.name()
                );
            }
        }
    }

    #[test]
    fn enumerate_counts_on_two_element_algebras() {
        let budget = EnumBudget::default();
        let set2 = presets::set_algebra(2);
        assert_eq!(
            enumerate_relations(&set2, RelKind::ReflexiveCompatible, &budget).len(),
            4
        );
        let s2 = presets::two_semilattice();
        assert_eq!(
            enumerate_relations(&s2, RelKind::ReflexiveCompatible, &budget).len(),
            4
        );
        let z2 = presets::z2();
        let congs = enumerate_relations(&z2, RelKind::Congruence, &budget);
        assert_eq!(congs, vec![BinRel::diagonal(2), BinRel::full(2)]);
    }

    #[test]
    fn enumerated_relations_satisfy_their_kind() {
        for alg in presets::all() {
            if alg.size() > 3 {
                continue;
            }
            for kind in [
                RelKind::ReflexiveCompatible,
                RelKind::Tolerance,
                RelKind::Congruence,
            ] {
                for r in enumerate_relations(&alg, kind, &EnumBudget::default()) {
                    assert!(kind.satisfied_by(&alg, &r));
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_kind_sound() {
        let alg = presets::maj2();
        let budget = EnumBudget {
            exhaustive_bits: 0,
            samples: 50,
            seed: 7,
        };
        let a = enumerate_relations(&alg, RelKind::ReflexiveCompatible, &budget);
        let b = enumerate_relations(&alg, RelKind::ReflexiveCompatible, &budget);
        assert_eq!(a, b);
        assert!(!a.is_empty());
        for r in &a {
            assert!(RelKind::ReflexiveCompatible.satisfied_by(&alg, r));
        }
    }

    #[test]
    fn relation_literal_round_trip() {
        let alg = presets::two_semilattice();
        let lit = RelationLiteral::parse(r#"{"pairs":[[0,1]],"close":"tolerance"}"#).unwrap();
        assert_eq!(lit.realize(&alg).unwrap(), BinRel::full(2));
        let lit = RelationLiteral::parse(r#"{"pairs":[[0,1]]}"#).unwrap();
        assert_eq!(lit.realize(&alg).unwrap(), BinRel::from_pairs(2, &[(0, 1)]).unwrap());
        assert!(RelationLiteral::parse(r#"{"pairs":[[0,9]]}"#)
            .unwrap()
            .realize(&alg)
            .is_err());
    }
}
