use std::cmp::Ordering;

use rand::Rng;
use serde_json::json;
use wpo_core::tftree::{
    descending_in_exp2, direct_range, enumerate_tf, extract_perfect_sequence, tf_canonical,
    tf_compare, tf_member, DichotomyOutcome, ExtractBudget, TfError,
};
use wpo_core::{FinSeq, InjectiveMap};

use super::{budgets, rng};
use crate::report::Check;
use crate::{Globals, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Injective map: affine:<a>,<b>, table:<j:v,...> or compose(<outer>;<inner>).
    #[arg(long)]
    pub f: InjectiveMap,
    /// Canonical members of length 1..=N are checked.
    #[arg(long, default_value_t = 12)]
    pub canonical: usize,
    /// Enumerated members added to the comparison pool.
    #[arg(long, default_value_t = 100)]
    pub members: usize,
    /// Sampled member pairs for the positive-entry agreement check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Run the staged extraction and report its dichotomy outcome.
    #[arg(long)]
    pub extract: bool,
    /// Build this many strictly descending terms of 2^{T_f}.
    #[arg(long)]
    pub descend: Option<usize>,
    /// Members the extraction may read.
    #[arg(long, default_value_t = ExtractBudget::default().max_members)]
    pub max_members: usize,
    /// Length of the ascending output the extraction aims for.
    #[arg(long, default_value_t = ExtractBudget::default().target)]
    pub target: usize,
    /// Consecutive proper extensions that select the range branch.
    #[arg(long, default_value_t = ExtractBudget::default().run_threshold)]
    pub run_threshold: usize,
}

pub fn run(a: &Args, g: &Globals) -> Outcome {
    let budget = ExtractBudget {
        max_members: a.max_members,
        target: a.target,
        run_threshold: a.run_threshold,
    };
    let canonical: Vec<FinSeq> = (1..=a.canonical).map(|n| tf_canonical(&a.f, n)).collect();
    let mut pool = canonical.clone();
    pool.extend(enumerate_tf(&a.f).take(a.members));
    pool.sort();
    pool.dedup();

    let mut checks = vec![
        canonical_check(&a.f, &canonical),
        linear_check(&a.f, &pool)?,
    ];
    checks.push(agreement_check(&pool, a.samples, g.seed));
    if a.extract {
        checks.push(extraction_check(&a.f, &budget)?);
    }
    if let Some(length) = a.descend {
        checks.push(descent_check(&a.f, length, &budget)?);
    }
    Ok((
        budgets([
            ("canonical", a.canonical as u64),
            ("members", a.members as u64),
            ("samples", a.samples as u64),
            ("max_members", a.max_members as u64),
            ("target", a.target as u64),
            ("run_threshold", a.run_threshold as u64),
        ]),
        checks,
    ))
}

fn canonical_check(f: &InjectiveMap, canonical: &[FinSeq]) -> Check {
    let bad: Vec<String> = canonical
        .iter()
        .filter(|s| !tf_member(f, s))
        .map(|s| s.to_string())
        .collect();
    let chain = canonical.windows(2).all(|w| w[1].properly_extends(&w[0]));
    let c = Check::new("canonical_members", bad.is_empty()).detail(json!({
        "checked": canonical.len(),
        "extension_chain": chain,
        "longest": canonical.last().map(|s| s.to_string()),
    }));
    if bad.is_empty() {
        c
    } else {
        c.witness(json!({"not_members": bad}))
    }
}

/// Trichotomy, antisymmetry and transitivity of `tf_compare` on the pool.
fn linear_check(f: &InjectiveMap, pool: &[FinSeq]) -> Result<Check, String> {
    let n = pool.len();
    let mut cmp = vec![Ordering::Equal; n * n];
    for i in 0..n {
        for j in 0..n {
            cmp[i * n + j] = tf_compare(f, &pool[i], &pool[j]).map_err(|e| e.to_string())?;
        }
    }
    let show = |i: usize| pool[i].to_string();
    let mut failure = None;
    'scan: for i in 0..n {
        for j in 0..n {
            if cmp[i * n + j] != cmp[j * n + i].reverse()
                || (cmp[i * n + j] == Ordering::Equal) != (i == j)
            {
                failure = Some(json!({"kind": "antisymmetry", "s": show(i), "t": show(j)}));
                break 'scan;
            }
            if cmp[i * n + j] != Ordering::Less {
                continue;
            }
            for k in 0..n {
                if cmp[j * n + k] == Ordering::Less && cmp[i * n + k] != Ordering::Less {
                    failure = Some(
                        json!({"kind": "transitivity", "s": show(i), "t": show(j), "u": show(k)}),
                    );
                    break 'scan;
                }
            }
        }
    }
    let c = Check::new("linear_order", failure.is_none())
        .detail(json!({"members": n, "triples": n * n * n}));
    Ok(match failure {
        Some(w) => c.witness(w),
        None => c,
    })
}

/// Two members never carry different positive entries at the same index.
fn agreement_check(pool: &[FinSeq], samples: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut failure = None;
    for _ in 0..samples {
        let (s, t) = (
            &pool[rng.gen_range(0..pool.len())],
            &pool[rng.gen_range(0..pool.len())],
        );
        if let Some(i) = (0..s.len().min(t.len())).find(|&i| s[i] > 0 && t[i] > 0 && s[i] != t[i]) {
            failure = Some(json!({"s": s.to_string(), "t": t.to_string(), "index": i}));
            break;
        }
    }
    let c =
        Check::new("positive_entries_agree", failure.is_none()).detail(json!({"pairs": samples}));
    match failure {
        Some(w) => c.witness(w),
        None => c,
    }
}

fn extraction_check(f: &InjectiveMap, budget: &ExtractBudget) -> Result<Check, String> {
    let ex = match extract_perfect_sequence(f, enumerate_tf(f), budget) {
        Ok(ex) => ex,
        Err(e @ TfError::BudgetExhausted { .. }) => {
            return Ok(Check::new("extraction", false).witness(e.to_string()))
        }
        Err(e) => return Err(e.to_string()),
    };
    let outcome = ex
        .outcome
        .as_ref()
        .ok_or("extraction returned no outcome")?;
    let pass = match outcome {
        DichotomyOutcome::Ascent { ascending, .. } => ascending.iter().enumerate().all(|(i, s)| {
            ascending[i + 1..]
                .iter()
                .all(|t| tf_compare(f, s, t) == Ok(Ordering::Less))
        }),
        DichotomyOutcome::RangeCandidate {
            range,
            bound,
            agrees,
            ..
        } => *agrees && *range == direct_range(f, *bound),
    };
    Ok(Check::new("extraction", pass)
        .detail(json!({
            "members_read": ex.members_read,
            "stage_a": ex.stage_a.len(),
            "stage_b": ex.stage_b.len(),
        }))
        .witness(outcome))
}

fn descent_check(f: &InjectiveMap, length: usize, budget: &ExtractBudget) -> Result<Check, String> {
    match descending_in_exp2(f, length, budget) {
        Ok(d) => {
            let pass = d.terms.len() == length && d.verified.iter().all(|&v| v);
            let terms: Vec<String> = d.terms.iter().map(|t| t.to_string()).collect();
            Ok(Check::new("descent", pass).witness(json!({
                "via": d.via,
                "terms": terms,
                "verified": d.verified,
            })))
        }
        Err(e @ (TfError::BudgetExhausted { .. } | TfError::NotDescending(..))) => {
            Ok(Check::new("descent", false).witness(e.to_string()))
        }
        Err(e) => Err(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(f: &str) -> Args {
        Args {
            f: f.parse().unwrap(),
            canonical: 12,
            members: 40,
            samples: 500,
            extract: true,
            descend: Some(8),
            max_members: 20_000,
            target: 8,
            run_threshold: 16,
        }
    }

    #[test]
    fn affine_pipeline_passes() {
        let g = crate::Globals {
            seed: 1,
            budget_size: 3,
            budget_elems: 64,
        };
        for f in ["affine:2,0", "affine:1,-1"] {
            let (_, checks) = run(&args(f), &g).unwrap();
            for c in &checks {
                assert!(c.is_pass(), "{f}: {c:?}");
            }
            let descent = checks.iter().find(|c| c.name == "descent").unwrap();
            assert_eq!(
                descent.witness.as_ref().unwrap()["terms"]
                    .as_array()
                    .unwrap()
                    .len(),
                8
            );
        }
    }

    #[test]
    fn tiny_budget_fails_the_extraction() {
        let f: InjectiveMap = "affine:2,0".parse().unwrap();
        let budget = ExtractBudget {
            max_members: 3,
            target: 8,
            run_threshold: 64,
        };
        assert!(!extraction_check(&f, &budget).unwrap().is_pass());
    }
}
