//! Ready-made small algebras. These are the standard desk-scale examples
//! used throughout the tests, the CLI documentation, and the browser demo.

use crate::algebra::{FiniteAlgebra, Operation};

fn build(name: &str, size: usize, operations: Vec<Operation>) -> FiniteAlgebra {
    FiniteAlgebra::new(Some(name.to_string()), size, operations).expect("preset is valid")
}

/// `n` elements, no operations (every relation is compatible).
pub fn set_algebra(n: usize) -> FiniteAlgebra {
    build(&format!("set{n}"), n, vec![])
}

/// The 1-element algebra with one binary operation.
pub fn singleton() -> FiniteAlgebra {
    build(
        "singleton",
        1,
        vec![Operation {
            name: "f".into(),
            arity: 2,
            table: vec![0],
        }],
    )
}

/// Two-element meet semilattice.
pub fn two_semilattice() -> FiniteAlgebra {
    build(
        "s2",
        2,
        vec![Operation {
            name: "meet".into(),
            arity: 2,
            table: vec![0, 0, 0, 1],
        }],
    )
}

/// Two-element group (addition mod 2).
pub fn z2() -> FiniteAlgebra {
    build(
        "z2",
        2,
        vec![Operation {
            name: "plus".into(),
            arity: 2,
            table: vec![0, 1, 1, 0],
        }],
    )
}

/// Two-element majority algebra: `maj(a,b,c) = (a∧b)∨(b∧c)∨(a∧c)`.
pub fn maj2() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(8);
    for a in 0..2u32 {
        for b in 0..2u32 {
            for c in 0..2u32 {
                table.push(((a & b) | (b & c) | (a & c)) as usize);
            }
        }
    }
    build(
        "maj2",
        2,
        vec![Operation {
            name: "maj".into(),
            arity: 3,
            table,
        }],
    )
}

/// Two-element lattice (meet and join).
pub fn two_lattice() -> FiniteAlgebra {
    build(
        "d2",
        2,
        vec![
            Operation {
                name: "meet".into(),
                arity: 2,
                table: vec![0, 0, 0, 1],
            },
            Operation {
                name: "join".into(),
                arity: 2,
                table: vec![0, 1, 1, 1],
            },
        ],
    )
}

/// Three-element group (addition mod 3).
pub fn z3() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            table.push((a + b) % 3);
        }
    }
    build(
        "z3",
        3,
        vec![Operation {
            name: "plus".into(),
            arity: 2,
            table,
        }],
    )
}

/// Meet semilattice on the chain `0 < 1 < 2`.
pub fn chain_meet3() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(9);
    for a in 0..3usize {
        for b in 0..3usize {
            table.push(a.min(b));
        }
    }
    build(
        "chain3",
        3,
        vec![Operation {
            name: "meet".into(),
            arity: 2,
            table,
        }],
    )
}

/// All presets, smallest first.
pub fn all() -> Vec<FiniteAlgebra> {
    vec![
        singleton(),
        set_algebra(2),
        two_semilattice(),
        z2(),
        maj2(),
        two_lattice(),
        set_algebra(3),
        z3(),
        chain_meet3(),
    ]
}

/// Look a preset up by name.
pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    all().into_iter().find(|a| a.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_named_uniquely() {
        let algs = all();
        let mut names: Vec<&str> = algs.iter().map(|a| a.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), algs.len());
    }

    #[test]
    fn maj2_table_is_majority() {
        let alg = maj2();
        assert_eq!(alg.apply(0, &[0, 1, 1]), 1);
        assert_eq!(alg.apply(0, &[0, 1, 0]), 0);
        assert_eq!(alg.apply(0, &[1, 0, 1]), 1);
    }
}
