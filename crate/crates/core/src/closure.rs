//! The subpower closure engine: least subsets of `A^m` closed under all
//! basic operations applied coordinatewise, computed as a breadth-first
//! worklist fixed point with optional term provenance.
//!
//! Determinism contract: elements are discovered in rounds (term depth);
//! within a round, operations fire in declaration order and argument tuples
//! in lexicographic order of element indices. The resulting element order
//! and provenance are reproducible.

use crate::algebra::FiniteAlgebra;
use crate::term::TermExpr;
use std::collections::HashMap;

/// Resource caps for closure computations. A capped result is explicitly
/// flagged and must be treated as inconclusive by callers.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_elements: usize,
    pub max_rounds: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_elements: 5_000_000,
            max_rounds: None,
        }
    }
}

impl Caps {
    pub fn with_max_elements(max_elements: usize) -> Self {
        Caps {
            max_elements,
            ..Caps::default()
        }
    }
}

/// The power `A^m`, with tuples encoded as `u32` element vectors.
#[derive(Debug, Clone, Copy)]
pub struct TupleSpace<'a> {
    pub algebra: &'a FiniteAlgebra,
    pub exponent: usize,
}

impl<'a> TupleSpace<'a> {
    pub fn new(algebra: &'a FiniteAlgebra, exponent: usize) -> Self {
        TupleSpace { algebra, exponent }
    }

    /// Arithmetic code of a tuple (first coordinate most significant), when
    /// `n^m` fits in `u128`.
    pub fn encode(&self, tuple: &[u32]) -> Option<u128> {
        assert_eq!(tuple.len(), self.exponent);
        let n = self.algebra.size() as u128;
        let mut code: u128 = 0;
        for &t in tuple {
            code = code.checked_mul(n)?.checked_add(t as u128)?;
        }
        Some(code)
    }

    pub fn decode(&self, mut code: u128) -> Vec<u32> {
        let n = self.algebra.size() as u128;
        let mut out = vec![0u32; self.exponent];
        for slot in out.iter_mut().rev() {
            *slot = (code % n) as u32;
            code /= n;
        }
        out
    }
}

/// How an element of a closure was first obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Generator(usize),
    App { op: usize, args: Vec<u32> },
}

/// Result of a closure run. `elements` is in discovery order; index 0..g are
/// the (deduplicated) generators.
#[derive(Debug, Clone)]
pub struct Closure {
    pub elements: Vec<Box<[u32]>>,
    index: HashMap<Box<[u32]>, u32>,
    pub derivations: Option<Vec<Derivation>>,
    pub capped: bool,
    pub rounds: usize,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        self.index.contains_key(tuple)
    }

    pub fn index_of(&self, tuple: &[u32]) -> Option<usize> {
        self.index.get(tuple).map(|&i| i as usize)
    }

    /// Materialize a witnessing term for element `idx`. `generator_term`
    /// maps a generator's position in the generator list to its base term;
    /// applications compose. Shared sub-derivations are materialized once
    /// and cloned.
    pub fn term_for(
        &self,
        idx: usize,
        generator_term: &dyn Fn(usize) -> TermExpr,
        alg: &FiniteAlgebra,
    ) -> TermExpr {
        let derivs = self
            .derivations
            .as_ref()
            .expect("closure was run without provenance");
        let mut memo: HashMap<usize, TermExpr> = HashMap::new();
        self.term_rec(idx, derivs, generator_term, alg, &mut memo)
    }

    fn term_rec(
        &self,
        idx: usize,
        derivs: &[Derivation],
        generator_term: &dyn Fn(usize) -> TermExpr,
        alg: &FiniteAlgebra,
        memo: &mut HashMap<usize, TermExpr>,
    ) -> TermExpr {
        if let Some(t) = memo.get(&idx) {
            return t.clone();
        }
        let term = match &derivs[idx] {
            Derivation::Generator(g) => generator_term(*g),
            Derivation::App { op, args } => {
                let name = alg.operations()[*op].name.clone();
                let sub = args
                    .iter()
                    .map(|&a| self.term_rec(a as usize, derivs, generator_term, alg, memo))
                    .collect();
                TermExpr::App { op: name, args: sub }
            }
        };
        memo.insert(idx, term.clone());
        term
    }
}

/// Close `generators` under all operations of the space's algebra applied
/// coordinatewise. Generators must be tuples of the space; duplicates are
/// dropped keeping the first occurrence.
pub fn close_subuniverse(
    space: &TupleSpace,
    generators: &[Vec<u32>],
    provenance: bool,
    caps: &Caps,
) -> Closure {
    let alg = space.algebra;
    let n = alg.size() as u32;
    let m = space.exponent;

    let mut elements: Vec<Box<[u32]>> = Vec::new();
    let mut index: HashMap<Box<[u32]>, u32> = HashMap::new();
    let mut derivations: Vec<Derivation> = Vec::new();
    let mut capped = false;

    for (g, tuple) in generators.iter().enumerate() {
        assert_eq!(tuple.len(), m, "generator has wrong exponent");
        assert!(tuple.iter().all(|&t| t < n), "generator out of universe");
        if index.contains_key(tuple.as_slice()) {
            continue;
        }
        if elements.len() >= caps.max_elements {
            capped = true;
            break;
        }
        let boxed: Box<[u32]> = tuple.clone().into_boxed_slice();
        index.insert(boxed.clone(), elements.len() as u32);
        elements.push(boxed);
        if provenance {
            derivations.push(Derivation::Generator(g));
        }
    }

    let mut frontier_start = 0usize;
    let mut rounds = 0usize;
    let mut scratch = vec![0u32; m];

    'outer: while !capped {
        if let Some(max) = caps.max_rounds {
            if rounds >= max {
                capped = true;
                break;
            }
        }
        rounds += 1;
        let len_at_start = elements.len();
        let mut grew = false;

        for (op_idx, op) in alg.operations().iter().enumerate() {
            let k = op.arity;
            if k == 0 {
                if rounds == 1 {
                    let c = op.table[0] as u32;
                    scratch.iter_mut().for_each(|s| *s = c);
                    if !index.contains_key(scratch.as_slice()) {
                        if elements.len() >= caps.max_elements {
                            capped = true;
                            break 'outer;
                        }
                        let boxed: Box<[u32]> = scratch.clone().into_boxed_slice();
                        index.insert(boxed.clone(), elements.len() as u32);
                        elements.push(boxed);
                        if provenance {
                            derivations.push(Derivation::App {
                                op: op_idx,
                                args: vec![],
                            });
                        }
                        grew = true;
                    }
                }
                continue;
            }
            if len_at_start == 0 {
                continue;
            }
            // Lexicographic odometer over argument index tuples drawn from
            // the elements known at round start; past round one, at least
            // one argument must come from the previous round's frontier.
            let mut args = vec![0usize; k];
            loop {
                let fresh = frontier_start == 0 || args.iter().any(|&a| a >= frontier_start);
                if fresh {
                    for p in 0..m {
                        let mut idx_code = 0usize;
                        for &a in &args {
                            idx_code = idx_code * n as usize + elements[a][p] as usize;
                        }
                        scratch[p] = op.table[idx_code] as u32;
                    }
                    if !index.contains_key(scratch.as_slice()) {
                        if elements.len() >= caps.max_elements {
                            capped = true;
                            break 'outer;
                        }
                        let boxed: Box<[u32]> = scratch.clone().into_boxed_slice();
                        index.insert(boxed.clone(), elements.len() as u32);
                        elements.push(boxed);
                        if provenance {
                            derivations.push(Derivation::App {
                                op: op_idx,
                                args: args.iter().map(|&a| a as u32).collect(),
                            });
                        }
                        grew = true;
                    }
                }
                // advance odometer
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < len_at_start {
                        break;
                    }
                    args[pos] = 0;
                }
                if args.iter().all(|&a| a == 0) {
                    break;
                }
            }
        }

        frontier_start = len_at_start;
        if !grew {
            break;
        }
    }

    Closure {
        elements,
        index,
        derivations: provenance.then_some(derivations),
        capped,
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::term::eval_term;

    fn tuples(v: &[&[u32]]) -> Vec<Vec<u32>> {
        v.iter().map(|t| t.to_vec()).collect()
    }

    #[test]
    fn no_operations_means_no_growth() {
        let alg = presets::set_algebra(2);
        let space = TupleSpace::new(&alg, 3);
        let gens = tuples(&[&[1, 1, 0], &[0, 1, 1]]);
        let c = close_subuniverse(&space, &gens, false, &Caps::default());
        assert_eq!(c.len(), 2);
        assert!(!c.capped);
    }

    #[test]
    fn z2_span_matches_linear_oracle() {
        let alg = presets::z2();
        let space = TupleSpace::new(&alg, 3);
        let gens = tuples(&[&[1, 1, 0], &[0, 1, 1]]);
        let c = close_subuniverse(&space, &gens, false, &Caps::default());
        // oracle: the linear span of the generators over GF(2)
        let mut span = vec![[0u32, 0, 0]];
        for g in &gens {
            let mut next = span.clone();
            for v in &span {
                next.push([v[0] ^ g[0], v[1] ^ g[1], v[2] ^ g[2]]);
            }
            next.sort();
            next.dedup();
            span = next;
        }
        assert_eq!(c.len(), span.len());
        for v in &span {
            assert!(c.contains(v.as_slice()), "{v:?} missing from closure");
        }
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn single_exponent_closure_is_subuniverse() {
        let alg = presets::two_semilattice();
        let space = TupleSpace::new(&alg, 1);
        let c = close_subuniverse(&space, &tuples(&[&[0], &[1]]), false, &Caps::default());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn closure_is_idempotent() {
        let alg = presets::maj2();
        let space = TupleSpace::new(&alg, 4);
        let gens = tuples(&[&[0, 0, 1, 1], &[0, 1, 0, 1]]);
        let c1 = close_subuniverse(&space, &gens, false, &Caps::default());
        let regen: Vec<Vec<u32>> = c1.elements.iter().map(|e| e.to_vec()).collect();
        let c2 = close_subuniverse(&space, &regen, false, &Caps::default());
        assert_eq!(c1.len(), c2.len());
        for e in &c2.elements {
            assert!(c1.contains(e));
        }
    }

    #[test]
    fn closure_is_monotone_in_generators() {
        let alg = presets::z2();
        let space = TupleSpace::new(&alg, 3);
        let small = tuples(&[&[1, 0, 0]]);
        let large = tuples(&[&[1, 0, 0], &[0, 1, 0]]);
        let cs = close_subuniverse(&space, &small, false, &Caps::default());
        let cl = close_subuniverse(&space, &large, false, &Caps::default());
        for e in &cs.elements {
            assert!(cl.contains(e));
        }
    }

    #[test]
    fn provenance_terms_reproduce_elements() {
        let alg = presets::maj2();
        let space = TupleSpace::new(&alg, 4);
        let gens = tuples(&[&[0, 0, 1, 1], &[0, 1, 0, 1], &[0, 0, 0, 0], &[1, 1, 1, 1]]);
        let c = close_subuniverse(&space, &gens, true, &Caps::default());
        assert!(!c.capped);
        for (i, elem) in c.elements.iter().enumerate() {
            let term = c.term_for(i, &|g| TermExpr::Var(g), &alg);
            for p in 0..4 {
                let env: Vec<usize> = gens.iter().map(|g| g[p] as usize).collect();
                assert_eq!(
                    eval_term(&alg, &term, &env).unwrap(),
                    elem[p] as usize,
                    "element {i} coordinate {p}"
                );
            }
        }
    }

    #[test]
    fn cap_produces_flagged_partial_result() {
        let alg = presets::z2();
        let space = TupleSpace::new(&alg, 3);
        let gens = tuples(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = close_subuniverse(&space, &gens, false, &Caps::with_max_elements(4));
        assert!(c.capped);
        assert!(c.len() <= 4);
    }

    #[test]
    fn nullary_operations_seed_constants() {
        let alg = crate::algebra::FiniteAlgebra::new(
            Some("const1".into()),
            2,
            vec![crate::algebra::Operation {
                name: "one".into(),
                arity: 0,
                table: vec![1],
            }],
        )
        .unwrap();
        let space = TupleSpace::new(&alg, 2);
        let c = close_subuniverse(&space, &tuples(&[&[0, 0]]), false, &Caps::default());
        assert!(c.contains(&[1, 1]));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn encode_decode_round_trip() {
        let alg = presets::set_algebra(3);
        let space = TupleSpace::new(&alg, 4);
        for code in 0..81u128 {
            let t = space.decode(code);
            assert_eq!(space.encode(&t), Some(code));
        }
    }
}
