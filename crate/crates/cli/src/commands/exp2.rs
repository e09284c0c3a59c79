use std::cmp::Ordering;

use rand::Rng;
use serde_json::json;
use wpo_core::exp2::{exp2_between, exp2_compare, exp2_make};
use wpo_core::orders::check_linear;
use wpo_core::{Code, CodedOrder, Exp2Order, Exp2Term, Order};

use super::{budgets, rng};
use crate::report::Check;
use crate::{Globals, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Base order, e.g. omega, omega_rev, finite:5, lex(omega,finite:2).
    #[arg(long)]
    pub base: CodedOrder,
    /// Sampled pairs `a < b` for the density check.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Exponents are drawn from the first N codes of the base.
    #[arg(long, default_value_t = 16)]
    pub codes: usize,
    /// Codes of the base searched for a term in between.
    #[arg(long, default_value_t = 64)]
    pub search: usize,
}

fn random_term(base: &CodedOrder, codes: &[Code], rng: &mut impl Rng) -> Result<Exp2Term, String> {
    let mut exps: Vec<Code> = codes
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    exps.sort_by(|x, y| base.compare(y, x).unwrap_or(Ordering::Equal));
    exp2_make(exps, base).map_err(|e| format!("--base {base}: {e}"))
}

pub fn run(a: &Args, g: &Globals) -> Outcome {
    let codes = a.base.enumerate(a.codes);
    if codes.is_empty() {
        return Err(format!(
            "--base {}: no codes to draw exponents from",
            a.base
        ));
    }
    let mut rng = rng(g.seed);
    let mut terms = vec![];
    for _ in 0..2 * a.samples {
        terms.push(random_term(&a.base, &codes, &mut rng)?);
    }

    let (mut checked, mut skipped, mut failure) = (0, 0, None);
    for pair in terms.chunks(2) {
        let (lo, hi) = match exp2_compare(&pair[0], &pair[1], &a.base).map_err(|e| e.to_string())? {
            Ordering::Less => (&pair[0], &pair[1]),
            Ordering::Greater => (&pair[1], &pair[0]),
            Ordering::Equal => {
                skipped += 1;
                continue;
            }
        };
        checked += 1;
        let verdict = exp2_between(lo, hi, &a.base, a.search).map(|c| {
            let ok = exp2_compare(lo, &c, &a.base) == Ok(Ordering::Less)
                && exp2_compare(&c, hi, &a.base) == Ok(Ordering::Less);
            (c, ok)
        });
        match verdict {
            Ok((_, true)) => {}
            Ok((c, false)) => {
                failure =
                    Some(json!({"a": lo.to_string(), "b": hi.to_string(), "c": c.to_string()}));
                break;
            }
            Err(e) => {
                failure =
                    Some(json!({"a": lo.to_string(), "b": hi.to_string(), "error": e.to_string()}));
                break;
            }
        }
    }
    let mut between = Check::new("between", failure.is_none())
        .detail(json!({"pairs": checked, "equal_pairs_skipped": skipped}));
    if let Some(w) = failure {
        between = between.witness(w);
    }

    let linear = check_linear(&Exp2Order(a.base.clone()), &terms[..terms.len().min(200)]);
    let mut linear_check = Check::new("linear_on_samples", linear.is_ok() || !a.base.is_linear());
    if let Err((i, j)) = linear {
        linear_check =
            linear_check.witness(json!({"a": terms[i].to_string(), "b": terms[j].to_string()}));
    }
    Ok((
        budgets([
            ("samples", a.samples as u64),
            ("codes", a.codes as u64),
            ("search", a.search as u64),
        ]),
        vec![between, linear_check],
    ))
}
