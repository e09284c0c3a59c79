use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wpo_bench::{double, exp2_terms, small_budget, tf_members, tree2};
use wpo_core::dilators::check_dilator_laws;
use wpo_core::exp2::exp2_compare;
use wpo_core::fixpoint::{enumerate_terms, FixedPoint};
use wpo_core::tftree::{descending_in_exp2, tf_compare, ExtractBudget};
use wpo_core::{CodedOrder, Law};

fn laws(c: &mut Criterion) {
    let w = tree2();
    let budget = small_budget();
    c.bench_function("laws/tree2", |b| {
        b.iter(|| check_dilator_laws(&w, &Law::ALL, black_box(&budget)))
    });
}

fn fixpoint(c: &mut Criterion) {
    let w = tree2();
    c.bench_function("fixpoint/enumerate_tree2_5", |b| {
        b.iter(|| enumerate_terms(&w, black_box(5), 1))
    });
    let terms = enumerate_terms(&w, 5, 1).expect("enumerates");
    c.bench_function("fixpoint/all_pairs_tree2_5", |b| {
        b.iter(|| {
            let fp = FixedPoint::new(&w);
            terms
                .iter()
                .flat_map(|t| terms.iter().map(move |u| (t, u)))
                .filter(|(t, u)| fp.leq(t, u).expect("valid terms"))
                .count()
        })
    });
}

fn tf(c: &mut Criterion) {
    let f = double();
    let members = tf_members(200);
    c.bench_function("tf/compare_200", |b| {
        b.iter(|| {
            members
                .windows(2)
                .filter(|w| tf_compare(&f, &w[0], &w[1]).is_ok())
                .count()
        })
    });
    c.bench_function("tf/descend_16", |b| {
        b.iter(|| descending_in_exp2(&f, black_box(16), &ExtractBudget::default()))
    });
}

fn exp2(c: &mut Criterion) {
    let terms = exp2_terms(256);
    c.bench_function("exp2/compare_256", |b| {
        b.iter(|| {
            terms
                .windows(2)
                .filter(|w| exp2_compare(&w[0], &w[1], &CodedOrder::Omega).is_ok())
                .count()
        })
    });
}

criterion_group!(benches, laws, fixpoint, tf, exp2);
criterion_main!(benches);
