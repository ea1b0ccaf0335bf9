//! Finite algebras: a universe `{0, …, n-1}` together with a list of named
//! finitary operations given by full tables.
//!
//! Operation tables are row-major over argument tuples with the *first*
//! argument most significant: the entry for `(a_0, …, a_{k-1})` sits at
//! index `a_0·n^(k-1) + a_1·n^(k-2) + … + a_{k-1}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("malformed algebra document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("universe size must be positive")]
    EmptyUniverse,
    #[error("operation `{name}`: table length {got}, expected {want} (= size^arity)")]
    TableLength { name: String, got: usize, want: usize },
    #[error("operation `{name}`: table entry {value} out of range for universe size {size}")]
    EntryOutOfRange {
        name: String,
        value: usize,
        size: usize,
    },
    #[error("duplicate operation name `{0}`")]
    DuplicateOperation(String),
    #[error("operation `{name}`: arity {arity} with size {size} overflows the table index range")]
    TableTooLarge {
        name: String,
        arity: usize,
        size: usize,
    },
}

/// A named finitary operation on `{0, …, n-1}`, stored as a full table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// A finite algebra. Immutable after construction; construction validates
/// table shapes, entry ranges, and name uniqueness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra", into = "RawAlgebra")]
pub struct FiniteAlgebra {
    name: Option<String>,
    size: usize,
    operations: Vec<Operation>,
}

#[derive(Serialize, Deserialize)]
struct RawAlgebra {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    size: usize,
    operations: Vec<Operation>,
}

impl TryFrom<RawAlgebra> for FiniteAlgebra {
    type Error = AlgebraError;
    fn try_from(raw: RawAlgebra) -> Result<Self, AlgebraError> {
        FiniteAlgebra::new(raw.name, raw.size, raw.operations)
    }
}

impl From<FiniteAlgebra> for RawAlgebra {
    fn from(alg: FiniteAlgebra) -> Self {
        RawAlgebra {
            name: alg.name,
            size: alg.size,
            operations: alg.operations,
        }
    }
}

impl FiniteAlgebra {
    pub fn new(
        name: Option<String>,
        size: usize,
        operations: Vec<Operation>,
    ) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyUniverse);
        }
        let mut seen = std::collections::HashSet::new();
        for op in &operations {
            if !seen.insert(op.name.clone()) {
                return Err(AlgebraError::DuplicateOperation(op.name.clone()));
            }
            let want = size.checked_pow(op.arity as u32).ok_or_else(|| {
                AlgebraError::TableTooLarge {
                    name: op.name.clone(),
                    arity: op.arity,
                    size,
                }
            })?;
            if op.table.len() != want {
                return Err(AlgebraError::TableLength {
                    name: op.name.clone(),
                    got: op.table.len(),
                    want,
                });
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v >= size) {
                return Err(AlgebraError::EntryOutOfRange {
                    name: op.name.clone(),
                    value: bad,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name,
            size,
            operations,
        })
    }

    /// Parse the JSON algebra document format.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let raw: RawAlgebra = serde_json::from_str(text)?;
        FiniteAlgebra::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serializes")
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|op| op.name == name)
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.operations.iter().position(|op| op.name == name)
    }

    /// Apply operation `op_idx` to `args` (length must equal the arity).
    pub fn apply(&self, op_idx: usize, args: &[usize]) -> usize {
        let op = &self.operations[op_idx];
        debug_assert_eq!(args.len(), op.arity);
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < self.size);
            idx = idx * self.size + a;
        }
        op.table[idx]
    }

    /// Iterate all elements of the universe.
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}
