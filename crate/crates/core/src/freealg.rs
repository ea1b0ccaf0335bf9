//! Free algebras with term provenance, constructive extraction of the
//! alternating term chains behind schemes `x32.vii` / `x22.vii`, direct
//! scheme verification, and an independent bounded search.
//!
//! The free algebra on `k` generators is realized as the subuniverse of
//! `A^(A^k)` generated by the projections; equality of term functions there
//! is exactly identity satisfaction across the whole generated class, which
//! is what makes extracted chains certificates rather than observations.

use crate::algebra::{FiniteAlgebra, Operation};
use crate::closure::{close_subuniverse, Caps, Closure, TupleSpace};
use crate::rel::{generated_relation_with_caps, BinRel, GenMode, RelError};
use crate::relexpr::{eval_relexpr, parse_relexpr, EvalCtx};
use crate::term::{check_identity, IdentityVerdict, TermError, TermExpr};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FreeAlgError {
    #[error("power tuples of length {len} exceed the feasibility gate {gate}; raise max_tuple_len to proceed")]
    TupleLenGate { len: usize, gate: usize },
    #[error("free algebra computation exceeded its caps and is inconclusive")]
    Capped,
    #[error("operation tables on the free algebra would need {0} cells; raise caps to proceed")]
    TablesTooLarge(u128),
    #[error(transparent)]
    Term(#[from] TermError),
}

impl From<RelError> for FreeAlgError {
    fn from(e: RelError) -> Self {
        match e {
            RelError::Capped => FreeAlgError::Capped,
            other => panic!("unexpected relation error in free algebra: {other}"),
        }
    }
}

/// Caps for free-algebra work: the closure caps plus the feasibility gate
/// on power tuple length (`n^k`).
#[derive(Debug, Clone, Copy)]
pub struct FreeCaps {
    pub closure: Caps,
    pub max_tuple_len: usize,
}

impl Default for FreeCaps {
    fn default() -> Self {
        FreeCaps {
            closure: Caps::default(),
            max_tuple_len: 32,
        }
    }
}

/// The free algebra of the class generated by `base` on `k` generators.
/// Elements are the k-ary term functions, each with a witnessing term.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub base: FiniteAlgebra,
    pub k: usize,
    /// the same algebra abstractly, universe `{0, …, size-1}`
    pub algebra: FiniteAlgebra,
    pub generators: Vec<usize>,
    closure: Closure,
}

impl FreeAlgebra {
    pub fn size(&self) -> usize {
        self.closure.len()
    }

    /// The k-ary witnessing term of element `idx`, over variables `x0..`.
    pub fn term_for(&self, idx: usize) -> TermExpr {
        self.closure.term_for(idx, &TermExpr::Var, &self.base)
    }

    /// The underlying function table of element `idx` (length `n^k`).
    pub fn function(&self, idx: usize) -> &[u32] {
        &self.closure.elements[idx]
    }
}

/// Build the free algebra on `k` generators: close the projection tuples
/// in `A^(n^k)` with provenance, then tabulate the operations on it.
pub fn free_algebra(
    base: &FiniteAlgebra,
    k: usize,
    caps: &FreeCaps,
) -> Result<FreeAlgebra, FreeAlgError> {
    assert!(k >= 1);
    let n = base.size();
    let len = n
        .checked_pow(k as u32)
        .ok_or(FreeAlgError::TupleLenGate {
            len: usize::MAX,
            gate: caps.max_tuple_len,
        })?;
    if len > caps.max_tuple_len {
        return Err(FreeAlgError::TupleLenGate {
            len,
            gate: caps.max_tuple_len,
        });
    }

    // projection j maps the argument tuple with code c to its j-th digit
    let mut gens: Vec<Vec<u32>> = Vec::with_capacity(k);
    for j in 0..k {
        let stride = n.pow((k - 1 - j) as u32);
        gens.push((0..len).map(|c| ((c / stride) % n) as u32).collect());
    }

    let space = TupleSpace::new(base, len);
    let closure = close_subuniverse(&space, &gens, true, &caps.closure);
    if closure.capped {
        return Err(FreeAlgError::Capped);
    }

    let size = closure.len();
    let mut operations = Vec::with_capacity(base.operations().len());
    for (op_idx, op) in base.operations().iter().enumerate() {
        let m = op.arity;
        let cells = (size as u128)
            .checked_pow(m as u32)
            .ok_or(FreeAlgError::TablesTooLarge(u128::MAX))?;
        if cells > caps.closure.max_elements.max(1_000_000) as u128 {
            return Err(FreeAlgError::TablesTooLarge(cells));
        }
        let mut table = Vec::with_capacity(cells as usize);
        if m == 0 {
            let c = op.table[0] as u32;
            let tuple = vec![c; len];
            table.push(closure.index_of(&tuple).expect("closed under constants"));
        } else {
            let mut args = vec![0usize; m];
            let mut scratch = vec![0u32; len];
            loop {
                for (p, s) in scratch.iter_mut().enumerate() {
                    let mut code = 0usize;
                    for &a in &args {
                        code = code * n + closure.elements[a][p] as usize;
                    }
                    *s = op.table[code] as u32;
                }
                table.push(closure.index_of(&scratch).expect("closed under operations"));
                let mut pos = m;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < size {
                        break;
                    }
                    args[pos] = 0;
                }
                if args.iter().all(|&a| a == 0) {
                    break;
                }
            }
        }
        let _ = op_idx;
        operations.push(Operation {
            name: op.name.clone(),
            arity: m,
            table,
        });
    }

    let algebra = FiniteAlgebra::new(
        Some(format!("free({}, {k})", base.name())),
        size,
        operations,
    )
    .expect("free algebra tables are valid");

    let generators = (0..k)
        .map(|j| {
            let stride = n.pow((k - 1 - j) as u32);
            let tuple: Vec<u32> = (0..len).map(|c| ((c / stride) % n) as u32).collect();
            closure.index_of(&tuple).expect("projections are generators")
        })
        .collect();

    Ok(FreeAlgebra {
        base: base.clone(),
        k,
        algebra,
        generators,
        closure,
    })
}

// ---------------------------------------------------------------------------
// schemes

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeId {
    #[serde(rename = "x32.vii")]
    X32Vii,
    #[serde(rename = "x22.vii")]
    X22Vii,
    #[serde(rename = "x32var.vii'")]
    X32VarViiPrime,
}

impl SchemeId {
    pub fn arity(self) -> usize {
        match self {
            SchemeId::X32Vii | SchemeId::X32VarViiPrime => 4,
            SchemeId::X22Vii => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::X32Vii => "x32.vii",
            SchemeId::X22Vii => "x22.vii",
            SchemeId::X32VarViiPrime => "x32var.vii'",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeId> {
        match s {
            "x32.vii" | "x32" => Some(SchemeId::X32Vii),
            "x22.vii" | "x22" => Some(SchemeId::X22Vii),
            "x32var.vii'" | "x32var" => Some(SchemeId::X32VarViiPrime),
            _ => None,
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLabel {
    #[serde(rename = "start")]
    Start,
    #[serde(rename = "T&beta")]
    TBeta,
    #[serde(rename = "gamma")]
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub term: TermExpr,
    pub label: StepLabel,
}

/// An extracted or searched term system, with the underlying element chain
/// when one exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TermChainDoc", into = "TermChainDoc")]
pub struct TermChain {
    pub scheme: SchemeId,
    pub n: usize,
    pub terms: Vec<TermExpr>,
    pub verified: bool,
    pub chain: Vec<ChainStep>,
}

#[derive(Serialize, Deserialize)]
struct ChainStepDoc {
    term: String,
    step: StepLabel,
}

#[derive(Serialize, Deserialize)]
struct TermChainDoc {
    scheme: SchemeId,
    n: usize,
    terms: Vec<String>,
    verified: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chain: Vec<ChainStepDoc>,
}

impl From<TermChain> for TermChainDoc {
    fn from(c: TermChain) -> Self {
        TermChainDoc {
            scheme: c.scheme,
            n: c.n,
            terms: c.terms.iter().map(|t| t.to_sexpr()).collect(),
            verified: c.verified,
            chain: c
                .chain
                .iter()
                .map(|s| ChainStepDoc {
                    term: s.term.to_sexpr(),
                    step: s.label,
                })
                .collect(),
        }
    }
}

impl TryFrom<TermChainDoc> for TermChain {
    type Error = TermError;
    fn try_from(d: TermChainDoc) -> Result<Self, TermError> {
        Ok(TermChain {
            scheme: d.scheme,
            n: d.n,
            terms: d
                .terms
                .iter()
                .map(|s| TermExpr::parse_sexpr(s))
                .collect::<Result<_, _>>()?,
            verified: d.verified,
            chain: d
                .chain
                .iter()
                .map(|s| {
                    Ok(ChainStep {
                        term: TermExpr::parse_sexpr(&s.term)?,
                        label: s.step,
                    })
                })
                .collect::<Result<_, TermError>>()?,
        })
    }
}

/// Why extraction could not produce a chain: the free-algebra instance of
/// the target inclusion fails, which refutes the whole family for every
/// algebra generating the same class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Refutation {
    pub scheme: SchemeId,
    pub refuted: bool,
    /// the condition instance that fails in the free algebra
    pub condition: String,
    pub free_size: usize,
    /// indices of the three generators in the free algebra
    pub generators: (usize, usize, usize),
    /// the pair of the target inclusion that is in the left side only
    pub witness: (usize, usize),
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtractOutcome {
    Chain(TermChain),
    Refutation(Refutation),
}

impl ExtractOutcome {
    pub fn chain(&self) -> Option<&TermChain> {
        match self {
            ExtractOutcome::Chain(c) => Some(c),
            ExtractOutcome::Refutation(_) => None,
        }
    }

    pub fn refutation(&self) -> Option<&Refutation> {
        match self {
            ExtractOutcome::Chain(_) => None,
            ExtractOutcome::Refutation(r) => Some(r),
        }
    }
}

// ---------------------------------------------------------------------------
// extraction

struct ExtractSetup {
    condition: &'static str,
    seed_terms: Vec<TermExpr>,
    t_mode_symmetric: bool,
}

fn setup_for(scheme: SchemeId) -> ExtractSetup {
    match scheme {
        SchemeId::X32Vii => ExtractSetup {
            condition: "x32.vi",
            seed_terms: vec![TermExpr::Var(3)],
            t_mode_symmetric: false,
        },
        SchemeId::X22Vii => ExtractSetup {
            condition: "x22.vi",
            seed_terms: vec![TermExpr::Var(3), TermExpr::Var(4)],
            t_mode_symmetric: true,
        },
        SchemeId::X32VarViiPrime => unreachable!("no extraction for the even-n scheme"),
    }
}

/// Extract a scheme `x32.vii` system by chasing the alternating chain in
/// the free algebra on three generators, or refute the target inclusion.
pub fn extract_terms_x32(
    alg: &FiniteAlgebra,
    caps: &FreeCaps,
) -> Result<ExtractOutcome, FreeAlgError> {
    extract_terms(alg, SchemeId::X32Vii, caps)
}

/// The 5-ary analogue: the relation T is the generated tolerance and the
/// witnessing terms carry the symmetric slot pair.
pub fn extract_terms_x22(
    alg: &FiniteAlgebra,
    caps: &FreeCaps,
) -> Result<ExtractOutcome, FreeAlgError> {
    extract_terms(alg, SchemeId::X22Vii, caps)
}

/// The witnessing relation T on the free algebra, with a term for every
/// pair. Pairs are pairs of F-elements; the term substitutes the seed
/// pair through the marked variable slot(s) and F-provenance through the
/// constant slots.
struct TWithProvenance {
    closure: Closure,
    rel: BinRel,
    seed_terms: Vec<TermExpr>,
}

impl TWithProvenance {
    fn pair_term(&self, free: &FreeAlgebra, p: usize, q: usize) -> TermExpr {
        let seed_count = self.seed_terms.len();
        let idx = self
            .closure
            .index_of(&[p as u32, q as u32])
            .expect("pair is in T");
        self.closure.term_for(
            idx,
            &|g| {
                if g < seed_count {
                    self.seed_terms[g].clone()
                } else {
                    free.term_for(g - seed_count)
                }
            },
            &free.algebra,
        )
    }
}

/// Close the seed pair (and its converse, for the tolerance scheme)
/// together with the diagonal under the operations of F, keeping
/// derivations. Seeds come first so their provenance wins ties.
fn t_with_provenance(
    free: &FreeAlgebra,
    setup: &ExtractSetup,
    caps: &Caps,
) -> Result<TWithProvenance, FreeAlgError> {
    let size = free.size();
    let (gx, gy) = (free.generators[0], free.generators[1]);
    let mut t_gens: Vec<Vec<u32>> = vec![vec![gx as u32, gy as u32]];
    if setup.t_mode_symmetric {
        t_gens.push(vec![gy as u32, gx as u32]);
    }
    for e in 0..size {
        t_gens.push(vec![e as u32, e as u32]);
    }
    let pair_space = TupleSpace::new(&free.algebra, 2);
    let closure = close_subuniverse(&pair_space, &t_gens, true, caps);
    if closure.capped {
        return Err(FreeAlgError::Capped);
    }
    let mut rel = BinRel::empty(size);
    for e in &closure.elements {
        rel.insert(e[0] as usize, e[1] as usize);
    }
    Ok(TWithProvenance {
        closure,
        rel,
        seed_terms: setup.seed_terms.clone(),
    })
}

fn extract_terms(
    alg: &FiniteAlgebra,
    scheme: SchemeId,
    caps: &FreeCaps,
) -> Result<ExtractOutcome, FreeAlgError> {
    let setup = setup_for(scheme);
    let free = free_algebra(alg, 3, caps)?;
    let f_alg = &free.algebra;
    let size = free.size();
    let (gx, gy, gz) = (
        free.generators[0],
        free.generators[1],
        free.generators[2],
    );

    let t = t_with_provenance(&free, &setup, &caps.closure)?;
    let t_rel = t.rel.clone();

    let beta = generated_relation_with_caps(f_alg, &[(gx, gz)], GenMode::Congruence, &caps.closure)?;
    let gamma =
        generated_relation_with_caps(f_alg, &[(gy, gz)], GenMode::Congruence, &caps.closure)?;
    let tb = t_rel.intersect(&beta);

    // alternating breadth-first search: states (element, next-step kind),
    // kind 0 expects a T∩β step, kind 1 expects a γ step
    let state = |e: usize, parity: usize| e * 2 + parity;
    let mut parent: Vec<Option<usize>> = vec![None; size * 2];
    let mut seen = vec![false; size * 2];
    let start = state(gx, 0);
    let goal = state(gz, 1);
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = false;
    'bfs: while let Some(s) = queue.pop_front() {
        let (e, parity) = (s / 2, s % 2);
        let step_rel = if parity == 0 { &tb } else { &gamma };
        for e2 in 0..size {
            if !step_rel.contains(e, e2) {
                continue;
            }
            let s2 = state(e2, 1 - parity);
            if !seen[s2] {
                seen[s2] = true;
                parent[s2] = Some(s);
                if s2 == goal {
                    reached = true;
                    break 'bfs;
                }
                queue.push_back(s2);
            }
        }
    }

    if !reached {
        let refutation = Refutation {
            scheme,
            refuted: true,
            condition: setup.condition.to_string(),
            free_size: size,
            generators: (gx, gy, gz),
            witness: (gx, gz),
            detail: format!(
                "pair (x, z) = ({gx}, {gz}) lies in beta & (T ; gamma) but not in the \
                 alternating closure of T&beta and gamma steps in the free algebra on \
                 three generators (size {size})"
            ),
        };
        return Ok(ExtractOutcome::Refutation(refutation));
    }

    // walk back from the goal state
    let mut path = vec![goal];
    while let Some(p) = parent[*path.last().unwrap()] {
        path.push(p);
    }
    path.reverse();
    let elems: Vec<usize> = path.iter().map(|s| s / 2).collect();
    debug_assert_eq!(elems.len() % 2, 0);
    let n = (elems.len() - 2) / 2;

    let mut terms = Vec::with_capacity(n + 1);
    for i in 0..=n {
        terms.push(t.pair_term(&free, elems[2 * i], elems[2 * i + 1]));
    }

    let mut chain = Vec::with_capacity(elems.len());
    for (j, &e) in elems.iter().enumerate() {
        let label = if j == 0 {
            StepLabel::Start
        } else if j % 2 == 1 {
            StepLabel::TBeta
        } else {
            StepLabel::Gamma
        };
        chain.push(ChainStep {
            term: free.term_for(e),
            label,
        });
    }

    let report = verify_scheme(alg, scheme, &terms).map_err(|e| match e {
        SchemeError::Term(t) => FreeAlgError::Term(t),
        other => panic!("extracted chain must be well-formed: {other}"),
    })?;

    Ok(ExtractOutcome::Chain(TermChain {
        scheme,
        n,
        terms,
        verified: report.all_hold,
        chain,
    }))
}

/// Re-establish a refutation along an independent route: rebuild the free
/// algebra and its three relations, then evaluate the failing condition
/// instance through the generic expression evaluator.
pub fn verify_refutation(
    alg: &FiniteAlgebra,
    refutation: &Refutation,
    caps: &FreeCaps,
) -> Result<bool, FreeAlgError> {
    let setup = setup_for(refutation.scheme);
    let free = free_algebra(alg, 3, caps)?;
    let f_alg = &free.algebra;
    let (gx, gy, gz) = (
        free.generators[0],
        free.generators[1],
        free.generators[2],
    );
    if refutation.free_size != free.size()
        || refutation.generators != (gx, gy, gz)
        || refutation.witness != (gx, gz)
    {
        return Ok(false);
    }
    let t_mode = if setup.t_mode_symmetric {
        GenMode::Tolerance
    } else {
        GenMode::ReflexiveCompatible
    };
    let t_rel = generated_relation_with_caps(f_alg, &[(gx, gy)], t_mode, &caps.closure)?;
    let beta = generated_relation_with_caps(f_alg, &[(gx, gz)], GenMode::Congruence, &caps.closure)?;
    let gamma =
        generated_relation_with_caps(f_alg, &[(gy, gz)], GenMode::Congruence, &caps.closure)?;

    let (lhs_src, rhs_src) = match refutation.scheme {
        SchemeId::X32Vii => ("beta & (T ; gamma)", "(gamma ; (T & beta))*"),
        SchemeId::X22Vii => ("beta & (T ; gamma)", "gamma v (T & beta)*"),
        SchemeId::X32VarViiPrime => unreachable!(),
    };
    let ctx = EvalCtx::new(f_alg);
    let mut bindings = BTreeMap::new();
    bindings.insert("T".to_string(), t_rel);
    bindings.insert("beta".to_string(), beta);
    bindings.insert("gamma".to_string(), gamma);
    let lhs = eval_relexpr(&ctx, &parse_relexpr(lhs_src).unwrap(), &bindings)
        .map_err(|_| FreeAlgError::Capped)?;
    let rhs = eval_relexpr(&ctx, &parse_relexpr(rhs_src).unwrap(), &bindings)
        .map_err(|_| FreeAlgError::Capped)?;
    let (a, b) = refutation.witness;
    Ok(lhs.contains(a, b) && !rhs.contains(a, b))
}

// ---------------------------------------------------------------------------
// scheme verification

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("scheme {scheme} takes {max}-ary terms, but term {index} uses variable index {var}")]
    ArityExceeded {
        scheme: &'static str,
        index: usize,
        var: usize,
        max: usize,
    },
    #[error("the even-n scheme requires even n, got n = {0}")]
    OddN(usize),
    #[error("a scheme needs at least one term")]
    Empty,
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeReport {
    pub scheme: SchemeId,
    pub n: usize,
    pub lines: Vec<IdentityReport>,
    pub all_hold: bool,
}

fn subst(f: &TermExpr, slots: &[usize]) -> TermExpr {
    let args: Vec<TermExpr> = slots.iter().map(|&s| TermExpr::Var(s)).collect();
    f.substitute(&args)
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// The identity lines of a scheme instance, as (name, lhs, rhs) over the
/// three variables x, y, z.
fn scheme_lines(scheme: SchemeId, terms: &[TermExpr]) -> Vec<(String, TermExpr, TermExpr)> {
    let n = terms.len() - 1;
    let f = |i: usize| &terms[i];
    let mut lines = Vec::new();
    match scheme {
        SchemeId::X32Vii => {
            lines.push((
                "x = f0(x,y,z,x)".to_string(),
                TermExpr::Var(X),
                subst(f(0), &[X, Y, Z, X]),
            ));
            lines.push((
                format!("f{n}(x,y,z,y) = z"),
                subst(f(n), &[X, Y, Z, Y]),
                TermExpr::Var(Z),
            ));
            for i in 0..=n {
                lines.push((
                    format!("f{i}(x,y,x,x) = f{i}(x,y,x,y)"),
                    subst(f(i), &[X, Y, X, X]),
                    subst(f(i), &[X, Y, X, Y]),
                ));
            }
            for i in 1..=n {
                lines.push((
                    format!("f{}(x,y,y,y) = f{i}(x,y,y,x)", i - 1),
                    subst(f(i - 1), &[X, Y, Y, Y]),
                    subst(f(i), &[X, Y, Y, X]),
                ));
            }
        }
        SchemeId::X22Vii => {
            lines.push((
                "x = f0(x,y,z,x,y)".to_string(),
                TermExpr::Var(X),
                subst(f(0), &[X, Y, Z, X, Y]),
            ));
            lines.push((
                format!("f{n}(x,y,z,y,x) = z"),
                subst(f(n), &[X, Y, Z, Y, X]),
                TermExpr::Var(Z),
            ));
            for i in 0..=n {
                lines.push((
                    format!("f{i}(x,y,x,x,y) = f{i}(x,y,x,y,x)"),
                    subst(f(i), &[X, Y, X, X, Y]),
                    subst(f(i), &[X, Y, X, Y, X]),
                ));
            }
            for i in 1..=n {
                lines.push((
                    format!("f{}(x,y,y,y,x) = f{i}(x,y,y,x,y)", i - 1),
                    subst(f(i - 1), &[X, Y, Y, Y, X]),
                    subst(f(i), &[X, Y, Y, X, Y]),
                ));
            }
        }
        SchemeId::X32VarViiPrime => {
            lines.push((
                "x = f0(x,y,z,x)".to_string(),
                TermExpr::Var(X),
                subst(f(0), &[X, Y, Z, X]),
            ));
            lines.push((
                format!("f{n}(x,y,z,y) = z"),
                subst(f(n), &[X, Y, Z, Y]),
                TermExpr::Var(Z),
            ));
            // four index families, transcribed as written
            for i in (0..=n).step_by(2) {
                lines.push((
                    format!("f{i}(x,y,x,x) = f{i}(x,y,x,y)  [i even]"),
                    subst(f(i), &[X, Y, X, X]),
                    subst(f(i), &[X, Y, X, Y]),
                ));
            }
            for i in (1..=n).step_by(2) {
                lines.push((
                    format!("f{}(x,y,y,y) = f{i}(x,y,y,y)  [i odd]", i - 1),
                    subst(f(i - 1), &[X, Y, Y, Y]),
                    subst(f(i), &[X, Y, Y, Y]),
                ));
            }
            for i in (1..=n).step_by(2) {
                lines.push((
                    format!("f{i}(x,y,x,y) = f{i}(x,y,x,x)  [i odd]"),
                    subst(f(i), &[X, Y, X, Y]),
                    subst(f(i), &[X, Y, X, X]),
                ));
            }
            for i in (2..=n).step_by(2) {
                lines.push((
                    format!("f{}(x,y,y,x) = f{i}(x,y,y,x)  [i even]", i - 1),
                    subst(f(i - 1), &[X, Y, Y, X]),
                    subst(f(i), &[X, Y, Y, X]),
                ));
            }
        }
    }
    lines
}

/// Check every identity line of a scheme on `alg`, over the three
/// variables x, y, z.
pub fn verify_scheme(
    alg: &FiniteAlgebra,
    scheme: SchemeId,
    terms: &[TermExpr],
) -> Result<SchemeReport, SchemeError> {
    if terms.is_empty() {
        return Err(SchemeError::Empty);
    }
    let n = terms.len() - 1;
    let max = scheme.arity();
    for (index, t) in terms.iter().enumerate() {
        if let Some(var) = t.max_var() {
            if var >= max {
                return Err(SchemeError::ArityExceeded {
                    scheme: scheme.as_str(),
                    index,
                    var,
                    max,
                });
            }
        }
    }
    if scheme == SchemeId::X32VarViiPrime && n % 2 != 0 {
        return Err(SchemeError::OddN(n));
    }

    let mut lines = Vec::new();
    let mut all_hold = true;
    for (name, lhs, rhs) in scheme_lines(scheme, terms) {
        let verdict = check_identity(alg, &lhs, &rhs, 3)?;
        let (holds, counterexample) = match verdict {
            IdentityVerdict::Holds => (true, None),
            IdentityVerdict::Fails { assignment } => (false, Some(assignment)),
        };
        all_hold &= holds;
        lines.push(IdentityReport {
            name,
            holds,
            counterexample,
        });
    }
    Ok(SchemeReport {
        scheme,
        n,
        lines,
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// bounded search

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SearchOutcome {
    Found(TermChain),
    Exhausted { exhausted: bool },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&TermChain> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Complete search within bounds: saturate the term functions of the
/// scheme's arity to `max_depth`, then look for the shortest admissible
/// chain with at most `max_n + 1` terms. Independent of extraction.
pub fn search_terms(
    alg: &FiniteAlgebra,
    scheme: SchemeId,
    max_n: usize,
    max_depth: usize,
    caps: &FreeCaps,
) -> Result<SearchOutcome, FreeAlgError> {
    let arity = scheme.arity();
    let n = alg.size();
    let len = n
        .checked_pow(arity as u32)
        .ok_or(FreeAlgError::TupleLenGate {
            len: usize::MAX,
            gate: caps.max_tuple_len,
        })?;

    // depth-saturate the term functions, keeping first-found terms
    let mut gens: Vec<Vec<u32>> = Vec::with_capacity(arity);
    for j in 0..arity {
        let stride = n.pow((arity - 1 - j) as u32);
        gens.push((0..len).map(|c| ((c / stride) % n) as u32).collect());
    }
    let space = TupleSpace::new(alg, len);
    let depth_caps = Caps {
        max_elements: caps.closure.max_elements,
        max_rounds: Some(max_depth),
    };
    let closure = close_subuniverse(&space, &gens, true, &depth_caps);
    if closure.capped && closure.len() >= depth_caps.max_elements {
        return Err(FreeAlgError::Capped);
    }
    let funcs = &closure.elements;
    let size = funcs.len();

    let code = |args: &[usize]| -> usize {
        let mut c = 0;
        for &a in args {
            c = c * n + a;
        }
        c
    };

    // table equality of two argument patterns over the free variables x,y(,z)
    let pattern_eq = |f: &[u32], g: &[u32], fp: &dyn Fn(&[usize]) -> Vec<usize>, gp: &dyn Fn(&[usize]) -> Vec<usize>, vars: usize| -> bool {
        let mut env = vec![0usize; vars];
        loop {
            if f[code(&fp(&env))] != g[code(&gp(&env))] {
                return false;
            }
            let mut pos = vars;
            loop {
                if pos == 0 {
                    return true;
                }
                pos -= 1;
                env[pos] += 1;
                if env[pos] < n {
                    break;
                }
                env[pos] = 0;
            }
        }
    };

    let is5 = scheme == SchemeId::X22Vii;
    // start: x = f(x,y,z,x[,y]); goal: f(x,y,z,y[,x]) = z
    let start_ok = |f: &[u32]| -> bool {
        let mut env = [0usize; 3];
        loop {
            let args: Vec<usize> = if is5 {
                vec![env[0], env[1], env[2], env[0], env[1]]
            } else {
                vec![env[0], env[1], env[2], env[0]]
            };
            if f[code(&args)] as usize != env[0] {
                return false;
            }
            if !advance(&mut env, n) {
                return true;
            }
        }
    };
    let goal_ok = |f: &[u32]| -> bool {
        let mut env = [0usize; 3];
        loop {
            let args: Vec<usize> = if is5 {
                vec![env[0], env[1], env[2], env[1], env[0]]
            } else {
                vec![env[0], env[1], env[2], env[1]]
            };
            if f[code(&args)] as usize != env[2] {
                return false;
            }
            if !advance(&mut env, n) {
                return true;
            }
        }
    };
    // per-term side identity: f(x,y,x,x[,y]) = f(x,y,x,y[,x])
    let cand_ok = |f: &[u32]| -> bool {
        if is5 {
            pattern_eq(
                f,
                f,
                &|e| vec![e[0], e[1], e[0], e[0], e[1]],
                &|e| vec![e[0], e[1], e[0], e[1], e[0]],
                2,
            )
        } else {
            pattern_eq(
                f,
                f,
                &|e| vec![e[0], e[1], e[0], e[0]],
                &|e| vec![e[0], e[1], e[0], e[1]],
                2,
            )
        }
    };
    // chain link: f(x,y,y,y[,x]) = g(x,y,y,x[,y])
    let link_ok = |f: &[u32], g: &[u32]| -> bool {
        if is5 {
            pattern_eq(
                f,
                g,
                &|e| vec![e[0], e[1], e[1], e[1], e[0]],
                &|e| vec![e[0], e[1], e[1], e[0], e[1]],
                2,
            )
        } else {
            pattern_eq(
                f,
                g,
                &|e| vec![e[0], e[1], e[1], e[1]],
                &|e| vec![e[0], e[1], e[1], e[0]],
                2,
            )
        }
    };
    // the even-n scheme's two alternating link families
    let link_yyy = |f: &[u32], g: &[u32]| -> bool {
        pattern_eq(
            f,
            g,
            &|e| vec![e[0], e[1], e[1], e[1]],
            &|e| vec![e[0], e[1], e[1], e[1]],
            2,
        )
    };
    let link_yyx = |f: &[u32], g: &[u32]| -> bool {
        pattern_eq(
            f,
            g,
            &|e| vec![e[0], e[1], e[1], e[0]],
            &|e| vec![e[0], e[1], e[1], e[0]],
            2,
        )
    };

    let cand: Vec<bool> = funcs.iter().map(|f| cand_ok(f)).collect();

    let found = if scheme == SchemeId::X32VarViiPrime {
        // positions alternate; n must stay even, so goal states sit at
        // even positions only
        let mut parent: Vec<Option<usize>> = vec![None; size * 2];
        let mut seen = vec![false; size * 2];
        let mut queue = VecDeque::new();
        let mut goal_state = None;
        'seed: for (i, f) in funcs.iter().enumerate() {
            if cand[i] && start_ok(f) {
                let s = i * 2;
                seen[s] = true;
                if goal_ok(f) {
                    goal_state = Some(s);
                    break 'seed;
                }
                queue.push_back((s, 0usize));
            }
        }
        let mut best: Option<(usize, Vec<usize>)> = goal_state.map(|s| (0, vec![s / 2]));
        while best.is_none() {
            let Some((s, steps)) = queue.pop_front() else {
                break;
            };
            if steps >= max_n {
                continue;
            }
            let (i, pos_parity) = (s / 2, s % 2);
            let next_parity = 1 - pos_parity;
            for (j, g) in funcs.iter().enumerate() {
                if !cand[j] {
                    continue;
                }
                let linked = if next_parity == 1 {
                    link_yyy(&funcs[i], g)
                } else {
                    link_yyx(&funcs[i], g)
                };
                if !linked {
                    continue;
                }
                let s2 = j * 2 + next_parity;
                if seen[s2] {
                    continue;
                }
                seen[s2] = true;
                parent[s2] = Some(s);
                if next_parity == 0 && goal_ok(g) {
                    let mut path = vec![s2];
                    while let Some(p) = parent[*path.last().unwrap()] {
                        path.push(p);
                    }
                    path.reverse();
                    best = Some((steps + 1, path.iter().map(|t| t / 2).collect()));
                    break;
                }
                queue.push_back((s2, steps + 1));
            }
        }
        best.map(|(_, path)| path)
    } else {
        let mut parent: Vec<Option<usize>> = vec![None; size];
        let mut seen = vec![false; size];
        let mut queue = VecDeque::new();
        let mut result = None;
        'seed2: for (i, f) in funcs.iter().enumerate() {
            if cand[i] && start_ok(f) {
                seen[i] = true;
                if goal_ok(f) {
                    result = Some(vec![i]);
                    break 'seed2;
                }
                queue.push_back((i, 0usize));
            }
        }
        while result.is_none() {
            let Some((i, steps)) = queue.pop_front() else {
                break;
            };
            if steps >= max_n {
                continue;
            }
            for j in 0..size {
                if seen[j] || !cand[j] || !link_ok(&funcs[i], &funcs[j]) {
                    continue;
                }
                seen[j] = true;
                parent[j] = Some(i);
                if goal_ok(&funcs[j]) {
                    let mut path = vec![j];
                    while let Some(p) = parent[*path.last().unwrap()] {
                        path.push(p);
                    }
                    path.reverse();
                    result = Some(path);
                    break;
                }
                queue.push_back((j, steps + 1));
            }
        }
        result
    };

    match found {
        Some(path) => {
            let terms: Vec<TermExpr> = path
                .iter()
                .map(|&i| closure.term_for(i, &TermExpr::Var, alg))
                .collect();
            let report = verify_scheme(alg, scheme, &terms).map_err(|e| match e {
                SchemeError::Term(t) => FreeAlgError::Term(t),
                other => panic!("searched chain must be well-formed: {other}"),
            })?;
            Ok(SearchOutcome::Found(TermChain {
                scheme,
                n: path.len() - 1,
                terms,
                verified: report.all_hold,
                chain: Vec::new(),
            }))
        }
        None => Ok(SearchOutcome::Exhausted { exhausted: true }),
    }
}

fn advance(env: &mut [usize], n: usize) -> bool {
    let mut pos = env.len();
    loop {
        if pos == 0 {
            return false;
        }
        pos -= 1;
        env[pos] += 1;
        if env[pos] < n {
            return true;
        }
        env[pos] = 0;
    }
}
