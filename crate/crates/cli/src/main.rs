//! Command-line front end: load algebras, run condition suites, compute
//! commutators, and extract/verify/search term schemes.
//!
//! Exit codes: 0 = clean, 1 = a condition failed (or a refutation /
//! exhausted search), 2 = usage or input error, 3 = some instance hit its
//! caps and nothing failed.

use clap::{Args, Parser, Subcommand, ValueEnum};
use relcomm_core::{
    conditions::{self, CheckStrategy, ConditionReport, SuiteReport},
    freealg::{self, ExtractOutcome, FreeCaps, SchemeId, SearchOutcome},
    rel::{EnumBudget, RelationLiteral},
    BinRel, Caps, CircRealization, FiniteAlgebra, KVariant, TermExpr, TheoremId,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "relcomm", version, about = "Relational commutators on finite algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KVariantArg {
    Pure,
    Seeded,
}

impl From<KVariantArg> for KVariant {
    fn from(v: KVariantArg) -> KVariant {
        match v {
            KVariantArg::Pure => KVariant::Pure,
            KVariantArg::Seeded => KVariant::Seeded,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommutatorVariant {
    One,
    Cg,
}

#[derive(Args)]
struct StrategyArgs {
    /// items for the n-indexed condition families, e.g. `--n 2,3`
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    n: Vec<usize>,
    /// sample count when the universe is too large to enumerate
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// enumerate exhaustively while n(n-1) stays within this many bits
    #[arg(long, default_value_t = 20)]
    exhaustive_bits: u32,
    #[arg(long = "k-variant", value_enum, default_value = "pure")]
    k_variant: KVariantArg,
    /// closure element cap; capped computations are reported inconclusive
    #[arg(long, default_value_t = 5_000_000)]
    max_elements: usize,
    #[arg(long, default_value_t = 10)]
    max_counterexamples: usize,
}

impl StrategyArgs {
    fn strategy(&self) -> CheckStrategy {
        CheckStrategy {
            budget: EnumBudget {
                exhaustive_bits: self.exhaustive_bits,
                samples: self.samples,
                seed: self.seed,
            },
            n_list: self.n.clone(),
            k_variant: self.k_variant.into(),
            circ: CircRealization::ToleranceGenerated,
            caps: Caps::with_max_elements(self.max_elements),
            max_counterexamples: self.max_counterexamples,
            max_instances: 1_000_000,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Show an algebra's signature and its relation counts
    Info {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check one condition or a whole family over enumerated relations
    Check {
        #[arg(long)]
        algebra: PathBuf,
        /// condition family: x32 | x22 | x32var | x1c
        #[arg(long, conflicts_with = "cond")]
        suite: Option<String>,
        /// a single condition id such as x32.iii or x1c.ii
        #[arg(long)]
        cond: Option<String>,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compute M(R,S) and a commutator of two relation literals
    Commutator {
        #[arg(long)]
        algebra: PathBuf,
        /// relation literal JSON, given twice (R, then S)
        #[arg(long = "rel", required = true, num_args = 1)]
        rels: Vec<String>,
        #[arg(long, value_enum, default_value = "one")]
        variant: CommutatorVariant,
        #[arg(long, default_value_t = 5_000_000)]
        max_elements: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Extract a witnessing term chain from the free algebra, or refute
    Extract {
        #[arg(long)]
        algebra: PathBuf,
        /// x32 (4-ary scheme) or x22 (5-ary scheme)
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 5_000_000)]
        max_elements: usize,
        #[arg(long, default_value_t = 32)]
        max_tuple_len: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Verify a term system against a scheme's identities
    Verify {
        #[arg(long)]
        algebra: PathBuf,
        /// x32 | x22 | x32var
        #[arg(long)]
        scheme: String,
        /// chain JSON produced by `extract`, or a JSON array of s-expressions
        #[arg(long)]
        terms: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Bounded complete search for a term system
    Search {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_elements: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

struct UsageError(String);

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load_algebra(path: &PathBuf) -> Result<FiniteAlgebra, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(FiniteAlgebra::parse(&text)?)
}

fn format_pairs(rel: &BinRel) -> String {
    let pairs: Vec<String> = rel
        .pairs()
        .iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    format!("{{{}}}", pairs.join(", "))
}

fn print_report(report: &ConditionReport, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(report).unwrap()),
        Format::Text => {
            let verdict = match report.verdict {
                relcomm_core::Verdict::HoldsOnTested => "holds-on-tested",
                relcomm_core::Verdict::Fails => "FAILS",
            };
            let n = report.n.map(|n| format!(" [n={n}]")).unwrap_or_default();
            println!(
                "{}{n}  {verdict}  ({} tested, {} capped; {})",
                report.condition, report.tested, report.capped, report.strategy
            );
            for cex in &report.counterexamples {
                let bindings: Vec<String> = cex
                    .bindings
                    .iter()
                    .map(|(name, pairs)| {
                        let p: Vec<String> =
                            pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
                        format!("{name} = {{{}}}", p.join(", "))
                    })
                    .collect();
                println!(
                    "    counterexample: {}; witness ({},{})",
                    bindings.join(", "),
                    cex.witness.0,
                    cex.witness.1
                );
            }
        }
    }
}

fn print_suite(suite: &SuiteReport, format: Format) {
    match format {
        Format::Json => {
            for report in &suite.reports {
                println!("{}", serde_json::to_string(report).unwrap());
            }
            let summary = serde_json::json!({
                "summary": {
                    "theorem": suite.theorem,
                    "algebra": suite.algebra,
                    "reductions": suite.reductions,
                    "notes": suite.notes,
                }
            });
            println!("{summary}");
        }
        Format::Text => {
            for report in &suite.reports {
                print_report(report, Format::Text);
            }
            for red in &suite.reductions {
                println!(
                    "reduction: {}  {}  ({} instances)",
                    red.name,
                    if red.passed { "ok" } else { "FAILS" },
                    red.instances
                );
            }
            for note in &suite.notes {
                println!("note: {note}");
            }
        }
    }
}

fn cmd_info(path: &PathBuf, format: Format) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    let n = alg.size();
    let counts = if n <= 4 {
        let budget = EnumBudget::default();
        Some((
            relcomm_core::enumerate_relations(
                &alg,
                relcomm_core::RelKind::ReflexiveCompatible,
                &budget,
            )
            .len(),
            relcomm_core::enumerate_relations(&alg, relcomm_core::RelKind::Tolerance, &budget)
                .len(),
            relcomm_core::enumerate_relations(&alg, relcomm_core::RelKind::Congruence, &budget)
                .len(),
        ))
    } else {
        None
    };
    match format {
        Format::Json => {
            let ops: Vec<_> = alg
                .operations()
                .iter()
                .map(|op| serde_json::json!({"name": op.name, "arity": op.arity}))
                .collect();
            let mut doc = serde_json::json!({
                "name": alg.name(),
                "size": n,
                "operations": ops,
            });
            if let Some((rc, tol, cong)) = counts {
                doc["relations"] = serde_json::json!({
                    "reflexive-compatible": rc,
                    "tolerance": tol,
                    "congruence": cong,
                });
            }
            println!("{doc}");
        }
        Format::Text => {
            println!("algebra {} on {{0, …, {}}}", alg.name(), n - 1);
            for op in alg.operations() {
                println!("  {}/{}", op.name, op.arity);
            }
            if let Some((rc, tol, cong)) = counts {
                println!("reflexive compatible relations: {rc}");
                println!("tolerances: {tol}");
                println!("congruences: {cong}");
            }
        }
    }
    Ok(0)
}

fn cmd_check(
    path: &PathBuf,
    suite: &Option<String>,
    cond: &Option<String>,
    strategy_args: &StrategyArgs,
    format: Format,
) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    let strategy = strategy_args.strategy();
    let mut any_failed = false;
    let mut any_capped = false;
    match (suite, cond) {
        (Some(theorem), None) => {
            let theorem = TheoremId::parse(theorem)
                .ok_or_else(|| UsageError(format!("unknown suite `{theorem}`")))?;
            let suite = conditions::run_suite(&alg, theorem, &strategy);
            any_failed = suite.any_failed();
            any_capped = suite.any_capped();
            print_suite(&suite, format);
        }
        (None, Some(id)) => {
            let conds = conditions::find_conditions(id, &strategy.n_list);
            if conds.is_empty() {
                return Err(UsageError(format!("unknown condition id `{id}`")));
            }
            for cond in &conds {
                let report = conditions::check_condition(&alg, cond, &strategy);
                any_failed |= report.failed();
                any_capped |= report.capped > 0;
                print_report(&report, format);
            }
        }
        _ => return Err(UsageError("pass exactly one of --suite or --cond".into())),
    }
    Ok(if any_failed {
        1
    } else if any_capped {
        3
    } else {
        0
    })
}

fn cmd_commutator(
    path: &PathBuf,
    rels: &[String],
    variant: CommutatorVariant,
    max_elements: usize,
    format: Format,
) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    if rels.len() != 2 {
        return Err(UsageError(format!(
            "expected exactly two --rel literals, got {}",
            rels.len()
        )));
    }
    let r = RelationLiteral::parse(&rels[0])?.realize(&alg)?;
    let s = RelationLiteral::parse(&rels[1])?.realize(&alg)?;
    for (name, rel) in [("R", &r), ("S", &s)] {
        if !rel.is_reflexive() || !rel.is_compatible(&alg) {
            return Err(UsageError(format!(
                "{name} must be reflexive and compatible; close it with \
                 \"close\": \"reflexive-compatible\" or larger"
            )));
        }
    }
    let caps = Caps::with_max_elements(max_elements);
    let m = match relcomm_core::matrices(&alg, &r, &s, &caps) {
        Ok(m) => m,
        Err(_) => return Ok(3),
    };
    let commutator = match variant {
        CommutatorVariant::One => relcomm_core::commutator_one(&alg, &r, &s, &caps),
        CommutatorVariant::Cg => relcomm_core::commutator_cg(&alg, &r, &s, &caps),
    };
    let commutator = match commutator {
        Ok(c) => c,
        Err(_) => return Ok(3),
    };
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "m_size": m.len(),
                "variant": match variant { CommutatorVariant::One => "one", CommutatorVariant::Cg => "cg" },
                "commutator": commutator.pairs(),
            });
            println!("{doc}");
        }
        Format::Text => {
            println!("|M(R,S)| = {}", m.len());
            println!(
                "{} = {}",
                match variant {
                    CommutatorVariant::One => "[R,S|1]",
                    CommutatorVariant::Cg => "Cg([R,S|1])",
                },
                format_pairs(&commutator)
            );
        }
    }
    Ok(0)
}

fn scheme_of(s: &str) -> Result<SchemeId, UsageError> {
    SchemeId::parse(s).ok_or_else(|| UsageError(format!("unknown scheme `{s}`")))
}

fn cmd_extract(
    path: &PathBuf,
    scheme: &str,
    max_elements: usize,
    max_tuple_len: usize,
    format: Format,
) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    let scheme = scheme_of(scheme)?;
    let caps = FreeCaps {
        closure: Caps::with_max_elements(max_elements),
        max_tuple_len,
    };
    let outcome = match scheme {
        SchemeId::X32Vii => freealg::extract_terms_x32(&alg, &caps),
        SchemeId::X22Vii => freealg::extract_terms_x22(&alg, &caps),
        SchemeId::X32VarViiPrime => {
            return Err(UsageError(
                "extraction covers x32 and x22; use `search` for x32var".into(),
            ))
        }
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(freealg::FreeAlgError::Capped) => {
            eprintln!("inconclusive: free-algebra computation hit its caps");
            return Ok(3);
        }
        Err(e) => return Err(UsageError(e.to_string())),
    };
    match &outcome {
        ExtractOutcome::Chain(chain) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string(chain).unwrap()),
                Format::Text => println!("{}", serde_json::to_string_pretty(chain).unwrap()),
            }
            Ok(0)
        }
        ExtractOutcome::Refutation(r) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string(r).unwrap()),
                Format::Text => println!("{}", serde_json::to_string_pretty(r).unwrap()),
            }
            Ok(1)
        }
    }
}

fn load_terms(path: &PathBuf) -> Result<Vec<TermExpr>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let list = match &value {
        serde_json::Value::Array(items) => items.clone(),
        serde_json::Value::Object(map) => map
            .get("terms")
            .and_then(|t| t.as_array())
            .cloned()
            .ok_or_else(|| UsageError("terms file needs a `terms` array".into()))?,
        _ => return Err(UsageError("terms file must be an array or a chain".into())),
    };
    list.iter()
        .map(|item| {
            let s = item
                .as_str()
                .ok_or_else(|| UsageError("terms must be s-expression strings".into()))?;
            Ok(TermExpr::parse_sexpr(s)?)
        })
        .collect()
}

fn cmd_verify(
    path: &PathBuf,
    scheme: &str,
    terms_path: &PathBuf,
    format: Format,
) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    let scheme = scheme_of(scheme)?;
    let terms = load_terms(terms_path)?;
    let report =
        freealg::verify_scheme(&alg, scheme, &terms).map_err(|e| UsageError(e.to_string()))?;
    match format {
        Format::Json => println!("{}", serde_json::to_string(&report).unwrap()),
        Format::Text => {
            for line in &report.lines {
                match &line.counterexample {
                    None => println!("ok    {}", line.name),
                    Some(a) => println!("FAIL  {}  at (x,y,z) = {:?}", line.name, a),
                }
            }
            println!(
                "{}: {}",
                report.scheme,
                if report.all_hold {
                    "all identities hold"
                } else {
                    "some identities fail"
                }
            );
        }
    }
    Ok(if report.all_hold { 0 } else { 1 })
}

fn cmd_search(
    path: &PathBuf,
    scheme: &str,
    max_n: usize,
    max_depth: usize,
    max_elements: usize,
    format: Format,
) -> Result<u8, UsageError> {
    let alg = load_algebra(path)?;
    let scheme = scheme_of(scheme)?;
    let caps = FreeCaps {
        closure: Caps::with_max_elements(max_elements),
        ..FreeCaps::default()
    };
    match freealg::search_terms(&alg, scheme, max_n, max_depth, &caps) {
        Ok(SearchOutcome::Found(chain)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string(&chain).unwrap()),
                Format::Text => println!("{}", serde_json::to_string_pretty(&chain).unwrap()),
            }
            Ok(0)
        }
        Ok(SearchOutcome::Exhausted { .. }) => {
            match format {
                Format::Json => println!("{}", serde_json::json!({"exhausted": true})),
                Format::Text => {
                    println!("exhausted: no system with n ≤ {max_n} at depth ≤ {max_depth}")
                }
            }
            Ok(1)
        }
        Err(freealg::FreeAlgError::Capped) => {
            eprintln!("inconclusive: search hit its caps");
            Ok(3)
        }
        Err(e) => Err(UsageError(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Info { algebra, format } => cmd_info(algebra, *format),
        Command::Check {
            algebra,
            suite,
            cond,
            strategy,
            format,
        } => cmd_check(algebra, suite, cond, strategy, *format),
        Command::Commutator {
            algebra,
            rels,
            variant,
            max_elements,
            format,
        } => cmd_commutator(algebra, rels, *variant, *max_elements, *format),
        Command::Extract {
            algebra,
            scheme,
            max_elements,
            max_tuple_len,
            format,
        } => cmd_extract(algebra, scheme, *max_elements, *max_tuple_len, *format),
        Command::Verify {
            algebra,
            scheme,
            terms,
            format,
        } => cmd_verify(algebra, scheme, terms, *format),
        Command::Search {
            algebra,
            scheme,
            max_n,
            max_depth,
            max_elements,
            format,
        } => cmd_search(algebra, scheme, *max_n, *max_depth, *max_elements, *format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
