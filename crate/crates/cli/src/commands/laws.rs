use std::str::FromStr;

use serde_json::json;
use wpo_core::dilators::check_dilator_laws;
use wpo_core::{Builtin, Dilator, Law, LawBudget, Witness};

use super::budgets;
use crate::report::Check;
use crate::{Globals, Outcome};

/// A comma-separated list of laws, or `all`.
#[derive(Debug, Clone)]
pub struct LawSet(pub Vec<Law>);

impl FromStr for LawSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(LawSet(Law::ALL.to_vec()));
        }
        let mut laws = s
            .split(',')
            .map(|l| l.trim().parse::<Law>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        laws.sort_by_key(|l| l.as_str());
        laws.dedup();
        Ok(LawSet(laws))
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dilator spec: V:<order>, W:<order>, cons:<order> or tree2.
    #[arg(long)]
    pub dilator: Builtin,
    /// Laws to check: `all` or a comma-separated subset of
    /// functor, naturality, support_condition, normal, unary, monotone.
    #[arg(long, default_value = "all")]
    pub check: LawSet,
    /// Morphisms between posets of at most this size are checked exhaustively.
    #[arg(long, default_value_t = LawBudget::default().exhaustive_morphism_size)]
    pub exhaustive_morphisms: usize,
    /// Random morphisms sampled beyond the exhaustive range.
    #[arg(long, default_value_t = LawBudget::default().sampled_morphisms)]
    pub sampled_morphisms: usize,
}

/// The witness as JSON, with the support of each element it mentions and
/// whether replaying it through the library reproduces the failure.
pub fn witness_json(w: &dyn Dilator, wit: &Witness) -> serde_json::Value {
    let mut v = serde_json::to_value(wit).expect("witness serializes");
    if let Witness::Unary { sigma, .. } = wit {
        v["support"] = json!(w.supp(sigma));
    }
    v["replays"] = json!(wit.replay(w));
    v
}

pub fn run(a: &Args, g: &Globals) -> Outcome {
    let budget = LawBudget {
        max_poset_size: g.budget_size,
        max_elements: g.budget_elems,
        exhaustive_morphism_size: a.exhaustive_morphisms,
        sampled_morphisms: a.sampled_morphisms,
        seed: g.seed,
    };
    let checks = check_dilator_laws(&a.dilator, &a.check.0, &budget)
        .into_iter()
        .map(|v| {
            let mut c = Check::new(v.law.as_str(), v.is_pass())
                .detail(json!({"exhaustive": v.exhaustive, "instances": v.instances}));
            if let Some(wit) = &v.witness {
                c = c.witness(witness_json(&a.dilator, wit));
            }
            c
        })
        .collect();
    Ok((
        budgets([
            ("exhaustive_morphisms", a.exhaustive_morphisms as u64),
            ("sampled_morphisms", a.sampled_morphisms as u64),
        ]),
        checks,
    ))
}
