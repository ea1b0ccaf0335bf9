//! Browser bindings for the interactive demo page. Every entry point is
//! string-in/string-out JSON so the same functions are testable on the
//! host and trivially callable from the page's JavaScript.

use relcomm_core::{
    commutator, conditions,
    conditions::CheckStrategy,
    freealg,
    freealg::{FreeCaps, SchemeId},
    rel::{EnumBudget, RelationLiteral},
    Caps, FiniteAlgebra, KVariant, TheoremId,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(msg: impl std::fmt::Display) -> String {
    json!({"ok": false, "error": msg.to_string()}).to_string()
}

fn ok(mut value: Value) -> String {
    value["ok"] = Value::Bool(true);
    value.to_string()
}

/// Demo caps: small enough that a misconfigured browser call cannot hang
/// the tab.
fn demo_caps() -> Caps {
    Caps::with_max_elements(200_000)
}

/// The bundled example algebras, as `[{"id", "algebra"}]`.
#[wasm_bindgen]
pub fn preset_algebras() -> String {
    let list: Vec<Value> = relcomm_core::presets::all()
        .iter()
        .map(|alg| {
            json!({
                "id": alg.name(),
                "algebra": serde_json::from_str::<Value>(&alg.to_json()).unwrap(),
            })
        })
        .collect();
    json!(list).to_string()
}

fn parse_algebra(algebra_json: &str) -> Result<FiniteAlgebra, String> {
    FiniteAlgebra::parse(algebra_json).map_err(|e| e.to_string())
}

fn parse_rel(
    alg: &FiniteAlgebra,
    pairs_json: &str,
    close: &str,
) -> Result<relcomm_core::BinRel, String> {
    let pairs: Vec<(usize, usize)> =
        serde_json::from_str(pairs_json).map_err(|e| e.to_string())?;
    let literal = RelationLiteral {
        pairs,
        close: serde_json::from_value(Value::String(close.to_string()))
            .map_err(|e| e.to_string())?,
    };
    literal.realize(alg).map_err(|e| e.to_string())
}

/// Compute `M(R,S)` and both commutators of two relations given as pair
/// lists plus a closure mode (`none`, `reflexive-compatible`, `tolerance`,
/// `congruence`).
#[wasm_bindgen]
pub fn commutator_info(algebra_json: &str, r_pairs: &str, s_pairs: &str, close: &str) -> String {
    let inner = || -> Result<Value, String> {
        let alg = parse_algebra(algebra_json)?;
        let r = parse_rel(&alg, r_pairs, close)?;
        let s = parse_rel(&alg, s_pairs, close)?;
        for (name, rel) in [("R", &r), ("S", &s)] {
            if !rel.is_reflexive() || !rel.is_compatible(&alg) {
                return Err(format!(
                    "{name} is not reflexive compatible; pick a closure mode"
                ));
            }
        }
        let caps = demo_caps();
        let m = commutator::matrices(&alg, &r, &s, &caps).map_err(|e| e.to_string())?;
        let one = commutator::commutator_one(&alg, &r, &s, &caps).map_err(|e| e.to_string())?;
        let cg = commutator::commutator_cg(&alg, &r, &s, &caps).map_err(|e| e.to_string())?;
        Ok(json!({
            "r": r.pairs(),
            "s": s.pairs(),
            "m_size": m.len(),
            "one": one.pairs(),
            "cg": cg.pairs(),
        }))
    };
    match inner() {
        Ok(v) => ok(v),
        Err(e) => err(e),
    }
}

/// Run one condition (by id) or a whole family (by name) and return the
/// reports plus suite notes.
#[wasm_bindgen]
pub fn check_conditions(algebra_json: &str, target: &str, seed: u64, k_variant: &str) -> String {
    let inner = || -> Result<Value, String> {
        let alg = parse_algebra(algebra_json)?;
        let strategy = CheckStrategy {
            budget: EnumBudget {
                seed,
                samples: 60,
                ..EnumBudget::default()
            },
            n_list: vec![2],
            k_variant: match k_variant {
                "seeded" => KVariant::Seeded,
                _ => KVariant::Pure,
            },
            caps: demo_caps(),
            max_instances: 20_000,
            ..CheckStrategy::default()
        };
        if let Some(theorem) = TheoremId::parse(target) {
            let suite = conditions::run_suite(&alg, theorem, &strategy);
            return Ok(json!({
                "reports": suite.reports,
                "reductions": suite.reductions,
                "notes": suite.notes,
            }));
        }
        let conds = conditions::find_conditions(target, &strategy.n_list);
        if conds.is_empty() {
            return Err(format!("unknown condition or family `{target}`"));
        }
        let reports: Vec<_> = conds
            .iter()
            .map(|c| conditions::check_condition(&alg, c, &strategy))
            .collect();
        Ok(json!({"reports": reports, "reductions": [], "notes": []}))
    };
    match inner() {
        Ok(v) => ok(v),
        Err(e) => err(e),
    }
}

/// Extract a term chain (scheme `x32` or `x22`) or return the refutation.
#[wasm_bindgen]
pub fn extract_chain(algebra_json: &str, scheme: &str) -> String {
    let inner = || -> Result<Value, String> {
        let alg = parse_algebra(algebra_json)?;
        let caps = FreeCaps {
            closure: demo_caps(),
            max_tuple_len: 32,
        };
        let outcome = match SchemeId::parse(scheme) {
            Some(SchemeId::X32Vii) => freealg::extract_terms_x32(&alg, &caps),
            Some(SchemeId::X22Vii) => freealg::extract_terms_x22(&alg, &caps),
            _ => return Err(format!("extraction supports x32 and x22, got `{scheme}`")),
        }
        .map_err(|e| e.to_string())?;
        Ok(match outcome {
            freealg::ExtractOutcome::Chain(chain) => {
                json!({"kind": "chain", "chain": chain})
            }
            freealg::ExtractOutcome::Refutation(r) => {
                json!({"kind": "refutation", "refutation": r})
            }
        })
    };
    match inner() {
        Ok(v) => ok(v),
        Err(e) => err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj2_json() -> String {
        relcomm_core::presets::maj2().to_json()
    }

    #[test]
    fn presets_round_trip() {
        let v: Value = serde_json::from_str(&preset_algebras()).unwrap();
        assert!(v.as_array().unwrap().len() >= 5);
    }

    #[test]
    fn commutator_info_on_maj2_full_full() {
        let out = commutator_info(
            &maj2_json(),
            "[[0,0],[0,1],[1,0],[1,1]]",
            "[[0,0],[0,1],[1,0],[1,1]]",
            "none",
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ok"], true, "{out}");
        assert_eq!(v["one"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn commutator_info_rejects_incompatible_relation() {
        let z2 = relcomm_core::presets::z2().to_json();
        let out = commutator_info(&z2, "[[0,1]]", "[]", "none");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ok"], false);
    }

    #[test]
    fn check_conditions_suite_and_single() {
        let z2 = relcomm_core::presets::z2().to_json();
        let out = check_conditions(&z2, "x32", 0, "pure");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ok"], true);
        assert!(!v["reports"].as_array().unwrap().is_empty());

        let out = check_conditions(&z2, "x32.i", 0, "pure");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["reports"][0]["verdict"], "fails");

        let out = check_conditions(&z2, "nope.unknown", 0, "pure");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ok"], false);
    }

    #[test]
    fn extract_chain_kinds() {
        let out = extract_chain(&maj2_json(), "x32");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["kind"], "chain", "{out}");
        assert_eq!(v["chain"]["verified"], true);

        let z2 = relcomm_core::presets::z2().to_json();
        let out = extract_chain(&z2, "x32");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["kind"], "refutation");
    }
}
