//! Term trees over an algebra's signature, bottom-up evaluation, identity
//! checking by exhaustive assignment, and the s-expression wire format
//! `(opname arg …)` with variables `x y z w u`.

use crate::algebra::FiniteAlgebra;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TermError {
    #[error("unresolved operation name `{0}`")]
    UnknownOperation(String),
    #[error("operation `{op}` applied to {got} arguments, arity is {want}")]
    ArityMismatch { op: String, want: usize, got: usize },
    #[error("variable {0} has no binding")]
    MissingVariable(usize),
    #[error("term uses variable {var}, but only {varcount} variables are declared")]
    VariableOutOfRange { var: usize, varcount: usize },
    #[error("term syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// A finitary term: a variable or an operation application.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermExpr {
    Var(usize),
    App { op: String, args: Vec<TermExpr> },
}

impl TermExpr {
    pub fn var(i: usize) -> Self {
        TermExpr::Var(i)
    }

    pub fn app(op: &str, args: Vec<TermExpr>) -> Self {
        TermExpr::App {
            op: op.to_string(),
            args,
        }
    }

    /// Largest variable index occurring in the term, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            TermExpr::Var(i) => Some(*i),
            TermExpr::App { args, .. } => args.iter().filter_map(|t| t.max_var()).max(),
        }
    }

    /// Replace `Var(i)` by `subs[i]` throughout.
    pub fn substitute(&self, subs: &[TermExpr]) -> TermExpr {
        match self {
            TermExpr::Var(i) => subs[*i].clone(),
            TermExpr::App { op, args } => TermExpr::App {
                op: op.clone(),
                args: args.iter().map(|t| t.substitute(subs)).collect(),
            },
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TermExpr::Var(_) => 1,
            TermExpr::App { args, .. } => 1 + args.iter().map(|t| t.node_count()).sum::<usize>(),
        }
    }

    /// Nesting depth; a bare variable has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            TermExpr::Var(_) => 0,
            TermExpr::App { args, .. } => {
                1 + args.iter().map(|t| t.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Render as an s-expression; variables 0..=4 print as `x y z w u`,
    /// higher indices as `v5`, `v6`, ….
    pub fn to_sexpr(&self) -> String {
        fn var_name(i: usize) -> String {
            match i {
                0 => "x".into(),
                1 => "y".into(),
                2 => "z".into(),
                3 => "w".into(),
                4 => "u".into(),
                _ => format!("v{i}"),
            }
        }
        match self {
            TermExpr::Var(i) => var_name(*i),
            TermExpr::App { op, args } => {
                let mut s = format!("({op}");
                for a in args {
                    s.push(' ');
                    s.push_str(&a.to_sexpr());
                }
                s.push(')');
                s
            }
        }
    }

    /// Parse the s-expression format produced by [`TermExpr::to_sexpr`].
    pub fn parse_sexpr(text: &str) -> Result<TermExpr, TermError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let term = parse_at(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TermError::Syntax {
                pos,
                msg: "trailing input".into(),
            });
        }
        Ok(term)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_atom(bytes: &[u8], pos: &mut usize) -> Result<String, TermError> {
    let start = *pos;
    while *pos < bytes.len() {
        let b = bytes[*pos];
        if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' {
            *pos += 1;
        } else {
            break;
        }
    }
    if start == *pos {
        return Err(TermError::Syntax {
            pos: start,
            msg: "expected an atom".into(),
        });
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn atom_to_var(atom: &str) -> Option<usize> {
    match atom {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "w" => Some(3),
        "u" => Some(4),
        _ => atom.strip_prefix('v').and_then(|d| d.parse().ok()),
    }
}

fn parse_at(bytes: &[u8], pos: &mut usize) -> Result<TermExpr, TermError> {
    skip_ws(bytes, pos);
    if *pos >= bytes.len() {
        return Err(TermError::Syntax {
            pos: *pos,
            msg: "unexpected end of input".into(),
        });
    }
    if bytes[*pos] == b'(' {
        *pos += 1;
        skip_ws(bytes, pos);
        let op = parse_atom(bytes, pos)?;
        let mut args = Vec::new();
        loop {
            skip_ws(bytes, pos);
            if *pos >= bytes.len() {
                return Err(TermError::Syntax {
                    pos: *pos,
                    msg: "unclosed `(`".into(),
                });
            }
            if bytes[*pos] == b')' {
                *pos += 1;
                return Ok(TermExpr::App { op, args });
            }
            args.push(parse_at(bytes, pos)?);
        }
    }
    let at = *pos;
    let atom = parse_atom(bytes, pos)?;
    match atom_to_var(&atom) {
        Some(i) => Ok(TermExpr::Var(i)),
        None => Err(TermError::Syntax {
            pos: at,
            msg: format!("`{atom}` is not a variable; applications need parentheses"),
        }),
    }
}

/// Evaluate `t` in `alg` under `env` (indexed by variable).
pub fn eval_term(alg: &FiniteAlgebra, t: &TermExpr, env: &[usize]) -> Result<usize, TermError> {
    match t {
        TermExpr::Var(i) => env.get(*i).copied().ok_or(TermError::MissingVariable(*i)),
        TermExpr::App { op, args } => {
            let idx = alg
                .op_index(op)
                .ok_or_else(|| TermError::UnknownOperation(op.clone()))?;
            let want = alg.operations()[idx].arity;
            if args.len() != want {
                return Err(TermError::ArityMismatch {
                    op: op.clone(),
                    want,
                    got: args.len(),
                });
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(alg, a, env)?);
            }
            Ok(alg.apply(idx, &vals))
        }
    }
}

/// Outcome of an identity check: either it holds under every assignment or
/// the lexicographically least failing assignment is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityVerdict {
    Holds,
    Fails { assignment: Vec<usize> },
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityVerdict::Holds)
    }
}

/// Decide whether `lhs ≈ rhs` holds in `alg` under all `varcount`-variable
/// assignments, in lexicographic order.
pub fn check_identity(
    alg: &FiniteAlgebra,
    lhs: &TermExpr,
    rhs: &TermExpr,
    varcount: usize,
) -> Result<IdentityVerdict, TermError> {
    for t in [lhs, rhs] {
        if let Some(v) = t.max_var() {
            if v >= varcount {
                return Err(TermError::VariableOutOfRange { var: v, varcount });
            }
        }
    }
    let n = alg.size();
    let mut env = vec![0usize; varcount];
    loop {
        if eval_term(alg, lhs, &env)? != eval_term(alg, rhs, &env)? {
            return Ok(IdentityVerdict::Fails {
                assignment: env.clone(),
            });
        }
        // advance lexicographically, most significant digit first
        let mut i = varcount;
        loop {
            if i == 0 {
                return Ok(IdentityVerdict::Holds);
            }
            i -= 1;
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
        }
    }
}
