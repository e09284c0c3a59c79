use std::cmp::Ordering;

use serde_json::json;
use wpo_core::exp2::{compare_exponents, exp2_make};
use wpo_core::fixpoint::{check_fixed_point_axiom, embed_alpha_times_n, embed_exp2};
use wpo_core::orders::{check_poset_axioms, product_cmp};
use wpo_core::{Builtin, Code, CodedOrder, Exp2Term, FixedPoint, Order, Term};

use super::budgets;
use crate::report::Check;
use crate::{Globals, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Embedding {
    /// `α × n` into the fixed point of `V_α`.
    AlphaTimesN,
    /// `2^α` into the fixed point of `W_α`.
    Exp2,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dilator spec, as for `laws`.
    #[arg(long, default_value = "tree2")]
    pub dilator: Builtin,
    /// Largest node count of enumerated terms.
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    /// Labels of enumerated traces stay below this code.
    #[arg(long, default_value_t = 3)]
    pub base_budget: u64,
    /// Check an embedding into a fixed point instead of the defining equation.
    #[arg(long, value_enum)]
    pub embed: Option<Embedding>,
    /// The order α of the embedding.
    #[arg(long, default_value = "omega")]
    pub alpha: CodedOrder,
    /// The factor `n` of `α × n`.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Codes of α used by the embedding.
    #[arg(long, default_value_t = 16)]
    pub codes: usize,
}

/// The term order of one fixed point, as an [`Order`].
struct TermOrder<'a>(&'a FixedPoint<'a>);

impl Order for TermOrder<'_> {
    type Elem = Term;

    fn compare(&self, a: &Term, b: &Term) -> Option<Ordering> {
        let le = self.0.leq(a, b).ok()?;
        let ge = self.0.leq(b, a).ok()?;
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

pub fn run(a: &Args, _g: &Globals) -> Outcome {
    let checks = match a.embed {
        None => axiom_checks(a)?,
        Some(Embedding::AlphaTimesN) => vec![alpha_times_n_check(a)?],
        Some(Embedding::Exp2) => vec![exp2_check(a)?],
    };
    Ok((
        budgets([
            ("term_size", a.size as u64),
            ("base_budget", a.base_budget),
            ("codes", a.codes as u64),
        ]),
        checks,
    ))
}

fn axiom_checks(a: &Args) -> Result<Vec<Check>, String> {
    let fp = FixedPoint::new(&a.dilator);
    let terms = fp
        .enumerate(a.size, a.base_budget)
        .map_err(|e| e.to_string())?;
    let mut per_size = vec![0usize; a.size + 1];
    for t in &terms {
        per_size[t.size()] += 1;
    }
    let axiom = check_fixed_point_axiom(&a.dilator, &terms).map_err(|e| e.to_string())?;
    let mut axiom_check =
        Check::new("fixed_point_axiom", axiom.is_pass()).detail(json!({"pairs": axiom.pairs}));
    if let Some(w) = &axiom.witness {
        axiom_check = axiom_check.witness(w);
    }
    let poset = check_poset_axioms(&TermOrder(&fp), &terms);
    let mut poset_check =
        Check::new("term_order_poset", poset.is_ok()).detail(json!({"terms": terms.len()}));
    if let Err(e) = poset {
        poset_check = poset_check.witness(e);
    }
    let listing: Vec<String> = terms.iter().take(200).map(|t| t.to_string()).collect();
    Ok(vec![
        axiom_check,
        poset_check,
        Check::new("terms", true).detail(json!({"per_size": &per_size[1..], "terms": listing})),
    ])
}

/// Pairs checked, violations, and the first violating pair.
type Violations = (usize, usize, Option<(String, String)>);

/// Reflection failures among images, against `domain_leq` on the sources.
fn reflection_violations<T: std::fmt::Display>(
    fp: &FixedPoint,
    pairs: &[(T, Term)],
    domain_leq: impl Fn(&T, &T) -> bool,
) -> Result<Violations, String> {
    let (mut checked, mut violations, mut first) = (0, 0, None);
    for (x, tx) in pairs {
        for (y, ty) in pairs {
            checked += 1;
            if fp.leq(tx, ty).map_err(|e| e.to_string())? && !domain_leq(x, y) {
                violations += 1;
                first.get_or_insert((x.to_string(), y.to_string()));
            }
        }
    }
    Ok((checked, violations, first))
}

fn embedding_check(name: &str, (checked, violations, first): Violations) -> Check {
    let c = Check::new(name, violations == 0)
        .detail(json!({"pairs": checked, "violations": violations}));
    match first {
        Some((x, y)) => c.witness(json!({"left": x, "right": y})),
        None => c,
    }
}

struct Pair(Code, usize);

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

fn alpha_times_n_check(a: &Args) -> Result<Check, String> {
    let codes = a.alpha.enumerate(a.codes);
    let images = embed_alpha_times_n(&a.alpha, a.n, &codes).map_err(|e| e.to_string())?;
    let v = Builtin::V(a.alpha.clone());
    let fp = FixedPoint::new(&v);
    let pairs: Vec<(Pair, Term)> = images
        .into_iter()
        .map(|((b, i), t)| (Pair(b, i), t))
        .collect();
    let leq = |x: &Pair, y: &Pair| {
        product_cmp(a.alpha.compare(&x.0, &y.0), Some(x.1.cmp(&y.1)))
            .is_some_and(|o| o != Ordering::Greater)
    };
    Ok(embedding_check(
        "embed_alpha_times_n",
        reflection_violations(&fp, &pairs, leq)?,
    ))
}

/// Every finite subset of the first `codes` codes, as a term of `2^α`.
fn all_exp2_terms(alpha: &CodedOrder, codes: usize) -> Result<Vec<Exp2Term>, String> {
    let mut codes = alpha.enumerate(codes);
    if codes.len() > 12 {
        return Err(format!(
            "--codes {}: at most 12 codes for exp2 (2^k terms)",
            codes.len()
        ));
    }
    codes.sort_by(|x, y| alpha.compare(y, x).unwrap_or(Ordering::Equal));
    (0u32..1 << codes.len())
        .map(|mask| {
            let exps = codes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c);
            exp2_make(exps.collect(), alpha).map_err(|e| format!("--alpha {alpha}: {e}"))
        })
        .collect()
}

fn exp2_check(a: &Args) -> Result<Check, String> {
    let domain = all_exp2_terms(&a.alpha, a.codes)?;
    let images = match embed_exp2(&a.alpha, &domain) {
        Ok(images) => images,
        Err(e) => return Ok(Check::new("embed_exp2", false).witness(e.to_string())),
    };
    let w = Builtin::W(a.alpha.clone());
    let fp = FixedPoint::new(&w);
    let pairs: Vec<(Exp2Term, Term)> = domain.into_iter().zip(images).collect();
    let leq = |x: &Exp2Term, y: &Exp2Term| {
        compare_exponents(x.exponents(), y.exponents(), &a.alpha)
            .is_ok_and(|o| o != Ordering::Greater)
    };
    Ok(embedding_check(
        "embed_exp2",
        reflection_violations(&fp, &pairs, leq)?,
    ))
}
