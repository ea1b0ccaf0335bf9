//! The matrix set `M(R,S)` as a generated subuniverse of `A^4`, the
//! relational commutator `[R,S|1]`, its congruence-generated variant, and
//! the relativized operator `K(R,S;T)`.
//!
//! A quadruple `(m11, m12, m21, m22)` is read as the 2×2 matrix with rows
//! `(m11, m12)` and `(m21, m22)`. The first relation argument controls the
//! vertical direction (columns are R-related downward), the second the
//! horizontal (rows are S-related rightward).

use crate::algebra::FiniteAlgebra;
use crate::closure::{close_subuniverse, Caps, TupleSpace};
use crate::rel::{generated_relation_with_caps, BinRel, GenMode, RelError};
use serde::{Deserialize, Serialize};

/// A subset of `A^4` closed under the basic operations, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSet {
    n: usize,
    bits: Vec<u64>,
    len: usize,
}

impl QuadSet {
    fn new(n: usize) -> Self {
        let total = n * n * n * n;
        QuadSet {
            n,
            bits: vec![0; total.div_ceil(64)],
            len: 0,
        }
    }

    fn code(&self, q: [usize; 4]) -> usize {
        ((q[0] * self.n + q[1]) * self.n + q[2]) * self.n + q[3]
    }

    fn insert(&mut self, q: [usize; 4]) {
        let c = self.code(q);
        let (w, b) = (c / 64, c % 64);
        if self.bits[w] & (1 << b) == 0 {
            self.bits[w] |= 1 << b;
            self.len += 1;
        }
    }

    pub fn contains(&self, q: [usize; 4]) -> bool {
        let c = self.code(q);
        self.bits[c / 64] & (1 << (c % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        let n = self.n;
        (0..n * n * n * n)
            .filter(|&c| self.bits[c / 64] & (1 << (c % 64)) != 0)
            .map(move |c| {
                [
                    c / (n * n * n),
                    (c / (n * n)) % n,
                    (c / n) % n,
                    c % n,
                ]
            })
    }
}

/// `M(R,S)`: the subuniverse of `A^4` generated by the constant-row
/// quadruples of R-pairs and the constant-column quadruples of S-pairs.
pub fn matrices(
    alg: &FiniteAlgebra,
    r: &BinRel,
    s: &BinRel,
    caps: &Caps,
) -> Result<QuadSet, RelError> {
    let n = alg.size();
    assert_eq!(r.universe(), n, "universe mismatch");
    assert_eq!(s.universe(), n, "universe mismatch");
    let mut gens: Vec<Vec<u32>> = Vec::new();
    for (a, b) in r.pairs() {
        gens.push(vec![a as u32, a as u32, b as u32, b as u32]);
    }
    for (u, v) in s.pairs() {
        gens.push(vec![u as u32, v as u32, u as u32, v as u32]);
    }
    let space = TupleSpace::new(alg, 4);
    let closure = close_subuniverse(&space, &gens, false, caps);
    if closure.capped {
        return Err(RelError::Capped);
    }
    let mut qs = QuadSet::new(n);
    for e in &closure.elements {
        qs.insert([e[0] as usize, e[1] as usize, e[2] as usize, e[3] as usize]);
    }
    Ok(qs)
}

/// Bottom rows of `M(R,S)` matrices whose top row is constant. Reflexive
/// and compatible; the commutators and `K` are its transitive closures
/// under various seeds.
pub fn equal_top_row_pairs(m: &QuadSet) -> BinRel {
    let n = m.universe();
    let mut pre = BinRel::empty(n);
    for q in m.iter() {
        if q[0] == q[1] {
            pre.insert(q[2], q[3]);
        }
    }
    pre
}

/// `[R,S|1]`: transitive closure of the equal-top-row bottom pairs.
pub fn commutator_one(
    alg: &FiniteAlgebra,
    r: &BinRel,
    s: &BinRel,
    caps: &Caps,
) -> Result<BinRel, RelError> {
    let m = matrices(alg, r, s, caps)?;
    Ok(equal_top_row_pairs(&m).star())
}

/// The congruence-generated commutator: the least congruence containing
/// the equal-top-row bottom pairs.
pub fn commutator_cg(
    alg: &FiniteAlgebra,
    r: &BinRel,
    s: &BinRel,
    caps: &Caps,
) -> Result<BinRel, RelError> {
    let m = matrices(alg, r, s, caps)?;
    let pre = equal_top_row_pairs(&m);
    generated_relation_with_caps(alg, &pre.pairs(), GenMode::Congruence, caps)
}

/// Which reconstruction of `K(R,S;T)` to use.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "kebab-case")]
pub enum KVariant {
    /// star of the bottom rows selected by T-related top rows
    #[default]
    Pure,
    /// star of T together with those bottom rows
    Seeded,
}

impl std::fmt::Display for KVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KVariant::Pure => "pure",
            KVariant::Seeded => "seeded",
        })
    }
}

/// `K(R,S;T)`: like the commutator, but the top row ranges over T instead
/// of the diagonal. `K(R,S;Δ)` coincides with `[R,S|1]` in both variants.
pub fn k_operator(
    alg: &FiniteAlgebra,
    r: &BinRel,
    s: &BinRel,
    t: &BinRel,
    variant: KVariant,
    caps: &Caps,
) -> Result<BinRel, RelError> {
    let n = alg.size();
    assert_eq!(t.universe(), n, "universe mismatch");
    let m = matrices(alg, r, s, caps)?;
    let mut pre = BinRel::empty(n);
    for q in m.iter() {
        if t.contains(q[0], q[1]) {
            pre.insert(q[2], q[3]);
        }
    }
    match variant {
        KVariant::Pure => Ok(pre.star()),
        KVariant::Seeded => Ok(t.union(&pre).star()),
    }
}
