//! Shared fixtures for the benchmarks.

use wpo_core::exp2::exp2_make;
use wpo_core::tftree::enumerate_tf;
use wpo_core::{Builtin, Code, CodedOrder, Exp2Term, FinSeq, InjectiveMap, LawBudget};

pub fn tree2() -> Builtin {
    Builtin::Tree2
}

pub fn small_budget() -> LawBudget {
    LawBudget {
        max_poset_size: 2,
        sampled_morphisms: 32,
        ..LawBudget::default()
    }
}

pub fn double() -> InjectiveMap {
    InjectiveMap::affine(2, 0).expect("valid affine map")
}

pub fn tf_members(n: usize) -> Vec<FinSeq> {
    enumerate_tf(&double()).take(n).collect()
}

/// Terms of `2^ω` whose exponents are the set bits of `0..n`.
pub fn exp2_terms(n: u64) -> Vec<Exp2Term> {
    (0..n)
        .map(|m| {
            let exps: Vec<Code> = (0..64).rev().filter(|b| m >> b & 1 == 1).collect();
            exp2_make(exps, &CodedOrder::Omega).expect("descending exponents")
        })
        .collect()
}
