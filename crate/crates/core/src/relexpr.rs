//! A small expression language over binary relations.
//!
//! Postfix operators `-` (converse), `*` (transitive closure), `°`
//! (tolerance closure); binary `;` (compose), `&` (intersect), `|` (union),
//! `v` (congruence join); constants `id`, `full`; named forms `Cg(e)`,
//! `K(e1,e2;e3)`, `C1(e1,e2)` and `CgC1(e1,e2)` for the two commutators.
//!
//! Precedence: postfix > `;` > `&` > `|`/`v`. Inside `K(…)` the second
//! argument ends at the `;` separator, so a composition there needs
//! explicit parentheses.

use crate::algebra::FiniteAlgebra;
use crate::closure::Caps;
use crate::commutator::{commutator_cg, commutator_one, k_operator, KVariant};
use crate::rel::{generated_relation_with_caps, BinRel, GenMode, RelError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound relation variable `{0}`")]
    Unbound(String),
    #[error("relation bound to `{0}` lives on a different universe")]
    UniverseMismatch(String),
    #[error("evaluation exceeded its caps and is inconclusive")]
    Capped,
}

impl From<RelError> for ExprError {
    fn from(e: RelError) -> Self {
        match e {
            RelError::Capped => ExprError::Capped,
            other => ExprError::Syntax {
                pos: 0,
                msg: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelExpr {
    Var(String),
    Id,
    Full,
    Converse(Box<RelExpr>),
    Star(Box<RelExpr>),
    Circ(Box<RelExpr>),
    Compose(Box<RelExpr>, Box<RelExpr>),
    Intersect(Box<RelExpr>, Box<RelExpr>),
    Union(Box<RelExpr>, Box<RelExpr>),
    Join(Box<RelExpr>, Box<RelExpr>),
    Cg(Box<RelExpr>),
    C1(Box<RelExpr>, Box<RelExpr>),
    CgC1(Box<RelExpr>, Box<RelExpr>),
    K(Box<RelExpr>, Box<RelExpr>, Box<RelExpr>),
}

impl RelExpr {
    pub fn var(name: &str) -> Self {
        RelExpr::Var(name.to_string())
    }

    /// Free relation variables, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            RelExpr::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            RelExpr::Id | RelExpr::Full => {}
            RelExpr::Converse(e) | RelExpr::Star(e) | RelExpr::Circ(e) | RelExpr::Cg(e) => {
                e.collect_vars(out)
            }
            RelExpr::Compose(a, b)
            | RelExpr::Intersect(a, b)
            | RelExpr::Union(a, b)
            | RelExpr::Join(a, b)
            | RelExpr::C1(a, b)
            | RelExpr::CgC1(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            RelExpr::K(a, b, c) => {
                a.collect_vars(out);
                b.collect_vars(out);
                c.collect_vars(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            RelExpr::Union(..) | RelExpr::Join(..) => 0,
            RelExpr::Intersect(..) => 1,
            RelExpr::Compose(..) => 2,
            RelExpr::Converse(_) | RelExpr::Star(_) | RelExpr::Circ(_) => 3,
            _ => 4,
        }
    }

    fn print(&self, parent: u8, out: &mut String) {
        let me = self.prec();
        if me < parent {
            out.push('(');
        }
        match self {
            RelExpr::Var(v) => out.push_str(v),
            RelExpr::Id => out.push_str("id"),
            RelExpr::Full => out.push_str("full"),
            RelExpr::Converse(e) => {
                e.print(3, out);
                out.push('-');
            }
            RelExpr::Star(e) => {
                e.print(3, out);
                out.push('*');
            }
            RelExpr::Circ(e) => {
                e.print(3, out);
                out.push('°');
            }
            RelExpr::Compose(a, b) => {
                a.print(2, out);
                out.push_str(" ; ");
                b.print(3, out);
            }
            RelExpr::Intersect(a, b) => {
                a.print(1, out);
                out.push_str(" & ");
                b.print(2, out);
            }
            RelExpr::Union(a, b) => {
                a.print(0, out);
                out.push_str(" | ");
                b.print(1, out);
            }
            RelExpr::Join(a, b) => {
                a.print(0, out);
                out.push_str(" v ");
                b.print(1, out);
            }
            RelExpr::Cg(e) => {
                out.push_str("Cg(");
                e.print(0, out);
                out.push(')');
            }
            RelExpr::C1(a, b) => {
                out.push_str("C1(");
                a.print(0, out);
                out.push_str(", ");
                b.print(0, out);
                out.push(')');
            }
            RelExpr::CgC1(a, b) => {
                out.push_str("CgC1(");
                a.print(0, out);
                out.push_str(", ");
                b.print(0, out);
                out.push(')');
            }
            RelExpr::K(a, b, c) => {
                out.push_str("K(");
                a.print(0, out);
                out.push_str(", ");
                // the second argument terminates at `;`, so anything
                // containing a bare composition gets parenthesized
                b.print(3, out);
                out.push_str("; ");
                c.print(0, out);
                out.push(')');
            }
        }
        if me < parent {
            out.push(')');
        }
    }
}

impl std::fmt::Display for RelExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        self.print(0, &mut s);
        f.write_str(&s)
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Amp,
    Pipe,
    JoinV,
    Dash,
    Star,
    Circ,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' => {
                it.next();
                out.push((pos, Tok::LParen));
            }
            ')' => {
                it.next();
                out.push((pos, Tok::RParen));
            }
            ',' => {
                it.next();
                out.push((pos, Tok::Comma));
            }
            ';' => {
                it.next();
                out.push((pos, Tok::Semi));
            }
            '&' => {
                it.next();
                out.push((pos, Tok::Amp));
            }
            '|' => {
                it.next();
                out.push((pos, Tok::Pipe));
            }
            '-' => {
                it.next();
                out.push((pos, Tok::Dash));
            }
            '*' => {
                it.next();
                out.push((pos, Tok::Star));
            }
            '°' => {
                it.next();
                out.push((pos, Tok::Circ));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c2)) = it.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        name.push(c2);
                        it.next();
                    } else {
                        break;
                    }
                }
                if name == "v" {
                    out.push((pos, Tok::JoinV));
                } else {
                    out.push((pos, Tok::Ident(name)));
                }
            }
            other => {
                return Err(ExprError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, name: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(ExprError::Syntax {
                pos: self.pos(),
                msg: format!("expected {name}"),
            })
        }
    }

    fn expr(&mut self) -> Result<RelExpr, ExprError> {
        self.union_level(true)
    }

    fn union_level(&mut self, allow_compose: bool) -> Result<RelExpr, ExprError> {
        let mut lhs = self.inter_level(allow_compose)?;
        loop {
            match self.peek() {
                Some(Tok::Pipe) => {
                    self.bump();
                    let rhs = self.inter_level(allow_compose)?;
                    lhs = RelExpr::Union(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::JoinV) => {
                    self.bump();
                    let rhs = self.inter_level(allow_compose)?;
                    lhs = RelExpr::Join(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn inter_level(&mut self, allow_compose: bool) -> Result<RelExpr, ExprError> {
        let mut lhs = self.compose_level(allow_compose)?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.compose_level(allow_compose)?;
            lhs = RelExpr::Intersect(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn compose_level(&mut self, allow_compose: bool) -> Result<RelExpr, ExprError> {
        let mut lhs = self.postfix_level()?;
        if !allow_compose {
            return Ok(lhs);
        }
        while self.peek() == Some(&Tok::Semi) {
            self.bump();
            let rhs = self.postfix_level()?;
            lhs = RelExpr::Compose(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn postfix_level(&mut self) -> Result<RelExpr, ExprError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Some(Tok::Dash) => {
                    self.bump();
                    e = RelExpr::Converse(Box::new(e));
                }
                Some(Tok::Star) => {
                    self.bump();
                    e = RelExpr::Star(Box::new(e));
                }
                Some(Tok::Circ) => {
                    self.bump();
                    e = RelExpr::Circ(Box::new(e));
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> Result<RelExpr, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "id" => Ok(RelExpr::Id),
                "full" => Ok(RelExpr::Full),
                "Cg" => {
                    self.expect(Tok::LParen, "`(` after Cg")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(RelExpr::Cg(Box::new(e)))
                }
                "C1" | "CgC1" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if name == "C1" {
                        RelExpr::C1(Box::new(a), Box::new(b))
                    } else {
                        RelExpr::CgC1(Box::new(a), Box::new(b))
                    })
                }
                "K" => {
                    self.expect(Tok::LParen, "`(` after K")?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.union_level(false)?;
                    self.expect(Tok::Semi, "`;` separating K's third argument")?;
                    let c = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(RelExpr::K(Box::new(a), Box::new(b), Box::new(c)))
                }
                _ => Ok(RelExpr::Var(name)),
            },
            Some(tok) => Err(ExprError::Syntax {
                pos,
                msg: format!("unexpected token {tok:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse the relation expression grammar. Round-trips with `Display`.
pub fn parse_relexpr(text: &str) -> Result<RelExpr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ExprError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// evaluation

/// How `°` is realized; the tolerance reading is the default, the
/// star-of-symmetric-closure reading can be swapped in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircRealization {
    #[default]
    ToleranceGenerated,
    StarOfSymmetric,
}

/// Evaluation context: the ambient algebra plus the configuration points.
#[derive(Debug, Clone, Copy)]
pub struct EvalCtx<'a> {
    pub algebra: &'a FiniteAlgebra,
    pub k_variant: KVariant,
    pub circ: CircRealization,
    pub caps: Caps,
}

impl<'a> EvalCtx<'a> {
    pub fn new(algebra: &'a FiniteAlgebra) -> Self {
        EvalCtx {
            algebra,
            k_variant: KVariant::default(),
            circ: CircRealization::default(),
            caps: Caps::default(),
        }
    }
}

/// Compositional evaluation under `bindings`.
pub fn eval_relexpr(
    ctx: &EvalCtx,
    expr: &RelExpr,
    bindings: &BTreeMap<String, BinRel>,
) -> Result<BinRel, ExprError> {
    let n = ctx.algebra.size();
    for (name, rel) in bindings {
        if rel.universe() != n {
            return Err(ExprError::UniverseMismatch(name.clone()));
        }
    }
    eval_inner(ctx, expr, bindings)
}

fn eval_inner(
    ctx: &EvalCtx,
    expr: &RelExpr,
    bindings: &BTreeMap<String, BinRel>,
) -> Result<BinRel, ExprError> {
    let alg = ctx.algebra;
    let n = alg.size();
    Ok(match expr {
        RelExpr::Var(name) => bindings
            .get(name)
            .cloned()
            .ok_or_else(|| ExprError::Unbound(name.clone()))?,
        RelExpr::Id => BinRel::diagonal(n),
        RelExpr::Full => BinRel::full(n),
        RelExpr::Converse(e) => eval_inner(ctx, e, bindings)?.converse(),
        RelExpr::Star(e) => eval_inner(ctx, e, bindings)?.star(),
        RelExpr::Circ(e) => {
            let r = eval_inner(ctx, e, bindings)?;
            match ctx.circ {
                CircRealization::ToleranceGenerated => {
                    generated_relation_with_caps(alg, &r.pairs(), GenMode::Tolerance, &ctx.caps)?
                }
                CircRealization::StarOfSymmetric => r.union(&r.converse()).star(),
            }
        }
        RelExpr::Compose(a, b) => {
            eval_inner(ctx, a, bindings)?.compose(&eval_inner(ctx, b, bindings)?)
        }
        RelExpr::Intersect(a, b) => {
            eval_inner(ctx, a, bindings)?.intersect(&eval_inner(ctx, b, bindings)?)
        }
        RelExpr::Union(a, b) => {
            eval_inner(ctx, a, bindings)?.union(&eval_inner(ctx, b, bindings)?)
        }
        RelExpr::Join(a, b) => {
            // congruence join: transitive closure of the composite
            eval_inner(ctx, a, bindings)?
                .compose(&eval_inner(ctx, b, bindings)?)
                .star()
        }
        RelExpr::Cg(e) => {
            let r = eval_inner(ctx, e, bindings)?;
            generated_relation_with_caps(alg, &r.pairs(), GenMode::Congruence, &ctx.caps)?
        }
        RelExpr::C1(a, b) => {
            let ra = eval_inner(ctx, a, bindings)?;
            let rb = eval_inner(ctx, b, bindings)?;
            commutator_one(alg, &ra, &rb, &ctx.caps)?
        }
        RelExpr::CgC1(a, b) => {
            let ra = eval_inner(ctx, a, bindings)?;
            let rb = eval_inner(ctx, b, bindings)?;
            commutator_cg(alg, &ra, &rb, &ctx.caps)?
        }
        RelExpr::K(a, b, c) => {
            let ra = eval_inner(ctx, a, bindings)?;
            let rb = eval_inner(ctx, b, bindings)?;
            let rc = eval_inner(ctx, c, bindings)?;
            k_operator(alg, &ra, &rb, &rc, ctx.k_variant, &ctx.caps)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rel::{enumerate_relations, EnumBudget, RelKind};
    use proptest::prelude::*;

    fn parse(s: &str) -> RelExpr {
        parse_relexpr(s).unwrap()
    }

    #[test]
    fn parses_intersection_of_composition() {
        let e = parse("(R1 ; R2) & T");
        assert_eq!(
            e,
            RelExpr::Intersect(
                Box::new(RelExpr::Compose(
                    Box::new(RelExpr::var("R1")),
                    Box::new(RelExpr::var("R2"))
                )),
                Box::new(RelExpr::var("T"))
            )
        );
    }

    #[test]
    fn parses_join_with_postfix_star() {
        let e = parse("gamma v (T & beta)*");
        assert_eq!(
            e,
            RelExpr::Join(
                Box::new(RelExpr::var("gamma")),
                Box::new(RelExpr::Star(Box::new(RelExpr::Intersect(
                    Box::new(RelExpr::var("T")),
                    Box::new(RelExpr::var("beta"))
                ))))
            )
        );
    }

    #[test]
    fn precedence_compose_binds_tighter_than_intersect() {
        assert_eq!(parse("R1 ; R2 & T"), parse("(R1 ; R2) & T"));
        assert_eq!(parse("R- ; S"), parse("(R-) ; S"));
    }

    #[test]
    fn double_semicolon_is_a_syntax_error() {
        let err = parse_relexpr("R ;; S").unwrap_err();
        match err {
            ExprError::Syntax { pos, .. } => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn k_arguments_parse_with_nested_k() {
        let e = parse("K(R1 ; R2, T; K(R1, T; S))");
        match e {
            RelExpr::K(a, b, c) => {
                assert_eq!(*a, parse("R1 ; R2"));
                assert_eq!(*b, RelExpr::var("T"));
                assert!(matches!(*c, RelExpr::K(..)));
            }
            other => panic!("expected K, got {other}"),
        }
    }

    #[test]
    fn unbound_variable_is_reported_at_eval() {
        let alg = presets::z2();
        let ctx = EvalCtx::new(&alg);
        let err = eval_relexpr(&ctx, &parse("R & T"), &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, ExprError::Unbound(_)));
    }

    #[test]
    fn eval_constant_examples() {
        let alg = presets::z2();
        let ctx = EvalCtx::new(&alg);
        let mut b = BTreeMap::new();
        b.insert("R".to_string(), BinRel::diagonal(2));
        b.insert("T".to_string(), BinRel::diagonal(2));
        assert_eq!(
            eval_relexpr(&ctx, &parse("R & T"), &b).unwrap(),
            BinRel::diagonal(2)
        );
        assert_eq!(
            eval_relexpr(&ctx, &parse("id | full"), &b).unwrap(),
            BinRel::full(2)
        );
    }

    #[test]
    fn commutator_through_the_evaluator() {
        let alg = presets::z2();
        let ctx = EvalCtx::new(&alg);
        let mut b = BTreeMap::new();
        b.insert("R".to_string(), BinRel::full(2));
        assert_eq!(
            eval_relexpr(&ctx, &parse("C1(R,R)"), &b).unwrap(),
            BinRel::diagonal(2)
        );
    }

    #[test]
    fn k_with_id_matches_commutator_on_enumerated_bindings() {
        for alg in [presets::two_semilattice(), presets::maj2()] {
            let ctx = EvalCtx::new(&alg);
            let rels = enumerate_relations(&alg, RelKind::ReflexiveCompatible, &EnumBudget::default());
            for r in &rels {
                for s in &rels {
                    let mut b = BTreeMap::new();
                    b.insert("R".to_string(), r.clone());
                    b.insert("S".to_string(), s.clone());
                    let via_k = eval_relexpr(&ctx, &parse("K(R, S; id)"), &b).unwrap();
                    let via_c1 = eval_relexpr(&ctx, &parse("C1(R, S)"), &b).unwrap();
                    assert_eq!(via_k, via_c1);
                }
            }
        }
    }

    #[test]
    fn circ_realizations_agree_on_compatible_input_for_s2() {
        let alg = presets::two_semilattice();
        let mut b = BTreeMap::new();
        b.insert("R".to_string(), {
            let mut r = BinRel::diagonal(2);
            r.insert(0, 1);
            r
        });
        let mut ctx = EvalCtx::new(&alg);
        let tol = eval_relexpr(&ctx, &parse("R°"), &b).unwrap();
        ctx.circ = CircRealization::StarOfSymmetric;
        let star_sym = eval_relexpr(&ctx, &parse("R°"), &b).unwrap();
        assert_eq!(tol, BinRel::full(2));
        assert_eq!(star_sym, BinRel::full(2));
    }

    fn arb_relexpr() -> impl Strategy<Value = RelExpr> {
        let leaf = prop_oneof![
            Just(RelExpr::Id),
            Just(RelExpr::Full),
            prop_oneof![Just("R"), Just("S"), Just("T"), Just("beta"), Just("gamma"), Just("R1")]
                .prop_map(|s: &str| RelExpr::var(s)),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| RelExpr::Converse(Box::new(e))),
                inner.clone().prop_map(|e| RelExpr::Star(Box::new(e))),
                inner.clone().prop_map(|e| RelExpr::Circ(Box::new(e))),
                inner.clone().prop_map(|e| RelExpr::Cg(Box::new(e))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::Compose(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::Intersect(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::Union(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::Join(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::C1(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| RelExpr::CgC1(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone(), inner)
                    .prop_map(|(a, b, c)| RelExpr::K(Box::new(a), Box::new(b), Box::new(c))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(e in arb_relexpr()) {
            let printed = e.to_string();
            let reparsed = parse_relexpr(&printed).unwrap();
            prop_assert_eq!(reparsed, e);
        }
    }
}
