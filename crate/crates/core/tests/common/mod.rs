//! Shared oracles for the integration suites. These deliberately take the
//! dumbest correct route — whole-set saturation over hash sets, repeated
//! joins for transitive closure — so they share no code path with the
//! engine they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcomm_core::{BinRel, FiniteAlgebra, Operation};
use std::collections::HashSet;

/// Subuniverse of `A^4` generated by the commutator generators of (r, s),
/// by full-pass saturation.
pub fn naive_matrices(
    alg: &FiniteAlgebra,
    r: &BinRel,
    s: &BinRel,
) -> HashSet<[usize; 4]> {
    let mut set: HashSet<[usize; 4]> = HashSet::new();
    for (a, b) in r.pairs() {
        set.insert([a, a, b, b]);
    }
    for (u, v) in s.pairs() {
        set.insert([u, v, u, v]);
    }
    loop {
        let snapshot: Vec<[usize; 4]> = set.iter().copied().collect();
        let before = set.len();
        for (op_idx, op) in alg.operations().iter().enumerate() {
            let m = op.arity;
            if m == 0 {
                let c = alg.apply(op_idx, &[]);
                set.insert([c, c, c, c]);
                continue;
            }
            let mut choice = vec![0usize; m];
            'combos: loop {
                let mut out = [0usize; 4];
                for (p, o) in out.iter_mut().enumerate() {
                    let args: Vec<usize> = choice.iter().map(|&c| snapshot[c][p]).collect();
                    *o = alg.apply(op_idx, &args);
                }
                set.insert(out);
                let mut pos = m;
                loop {
                    if pos == 0 {
                        break 'combos;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < snapshot.len() {
                        break;
                    }
                    choice[pos] = 0;
                }
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Transitive closure by repeated joining over pair sets.
pub fn naive_star(n: usize, pairs: &HashSet<(usize, usize)>) -> HashSet<(usize, usize)> {
    let _ = n;
    let mut closed = pairs.clone();
    loop {
        let mut next = closed.clone();
        for &(a, b) in &closed {
            for &(c, d) in &closed {
                if b == c {
                    next.insert((a, d));
                }
            }
        }
        if next.len() == closed.len() {
            return closed;
        }
        closed = next;
    }
}

/// `[R,S|1]` along the oracle route.
pub fn brute_commutator_one(alg: &FiniteAlgebra, r: &BinRel, s: &BinRel) -> BinRel {
    let quads = naive_matrices(alg, r, s);
    let mut pre: HashSet<(usize, usize)> = HashSet::new();
    for q in &quads {
        if q[0] == q[1] {
            pre.insert((q[2], q[3]));
        }
    }
    let closed = naive_star(alg.size(), &pre);
    let mut rel = BinRel::empty(alg.size());
    for (a, b) in closed {
        rel.insert(a, b);
    }
    rel
}

/// Count the k-ary term functions by whole-set depth saturation.
pub fn free_count_oracle(alg: &FiniteAlgebra, k: usize) -> usize {
    let n = alg.size();
    let len = n.pow(k as u32);
    let mut funcs: HashSet<Vec<usize>> = HashSet::new();
    for j in 0..k {
        let stride = n.pow((k - 1 - j) as u32);
        funcs.insert((0..len).map(|c| (c / stride) % n).collect());
    }
    loop {
        let snapshot: Vec<Vec<usize>> = funcs.iter().cloned().collect();
        let before = funcs.len();
        for (op_idx, op) in alg.operations().iter().enumerate() {
            let m = op.arity;
            if m == 0 {
                funcs.insert(vec![alg.apply(op_idx, &[]); len]);
                continue;
            }
            let mut choice = vec![0usize; m];
            'combos: loop {
                let mut out = vec![0usize; len];
                for (p, o) in out.iter_mut().enumerate() {
                    let args: Vec<usize> = choice.iter().map(|&c| snapshot[c][p]).collect();
                    *o = alg.apply(op_idx, &args);
                }
                funcs.insert(out);
                let mut pos = m;
                loop {
                    if pos == 0 {
                        break 'combos;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < snapshot.len() {
                        break;
                    }
                    choice[pos] = 0;
                }
            }
        }
        if funcs.len() == before {
            return funcs.len();
        }
    }
}

/// A pseudorandom algebra with one binary operation.
pub fn random_algebra(size: usize, seed: u64) -> FiniteAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<usize> = (0..size * size).map(|_| rng.random_range(0..size)).collect();
    FiniteAlgebra::new(
        Some(format!("rand{size}-{seed}")),
        size,
        vec![Operation {
            name: "f".into(),
            arity: 2,
            table,
        }],
    )
    .unwrap()
}

/// A pseudorandom relation on `n` elements (each off-diagonal bit fair,
/// diagonal optional).
pub fn random_relation(n: usize, rng: &mut ChaCha8Rng, reflexive: bool) -> BinRel {
    let mut rel = if reflexive {
        BinRel::diagonal(n)
    } else {
        BinRel::empty(n)
    };
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(0.4) {
                rel.insert(a, b);
            }
        }
    }
    rel
}
