use std::cmp::Ordering;

use proptest::prelude::*;
use wpo_core::exp2::{exp2_between, exp2_compare, exp2_make};
use wpo_core::orders::{check_poset_axioms, find_good_pair, kb_compare, leq_fin, Product};
use wpo_core::tftree::{
    enumerate_tf, gp_map, tf_canonical, tf_compare, tf_member, weak_extension, InjectiveMap,
};
use wpo_core::witnesses::{coloring_good_pair, random_poset, ColoringOrder};
use wpo_core::{Code, CodedOrder, Exp2Term, FinPoset, FinSeq, Order};

fn exp2_term(max_code: Code) -> impl Strategy<Value = Exp2Term> {
    prop::collection::btree_set(0..max_code, 0..6).prop_map(|s| {
        let mut v: Vec<Code> = s.into_iter().collect();
        v.reverse();
        exp2_make(v, &CodedOrder::Omega).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_posets_satisfy_axioms(n in 0usize..7, density in 0.0f64..1.0, seed in any::<u64>()) {
        let p = random_poset(n, density, seed);
        prop_assert!(check_poset_axioms(&p, &p.points()).is_ok());
        let (ext, fresh) = p.with_point_above(&p.points());
        prop_assert!(check_poset_axioms(&ext, &ext.points()).is_ok());
        for z in p.points() {
            prop_assert!(ext.lt(&z, &fresh));
        }
    }

    #[test]
    fn product_of_chains_is_componentwise(a in 0u64..5, b in 0u64..5, c in 0u64..5, d in 0u64..5) {
        let p = Product(CodedOrder::Finite(5), CodedOrder::Finite(5));
        prop_assert_eq!(p.leq(&(a, b), &(c, d)), a <= c && b <= d);
    }

    #[test]
    fn exp2_over_omega_matches_binary_numerals(a in exp2_term(12), b in exp2_term(12)) {
        let value = |t: &Exp2Term| t.exponents().iter().map(|&e| 1u64 << e).sum::<u64>();
        prop_assert_eq!(exp2_compare(&a, &b, &CodedOrder::Omega).unwrap(), value(&a).cmp(&value(&b)));
    }

    #[test]
    fn exp2_between_is_strictly_between(a in exp2_term(10), b in exp2_term(10)) {
        let base = CodedOrder::OmegaRev;
        let (a, b) = (
            exp2_make(a.into_exponents().into_iter().rev().collect(), &base).unwrap(),
            exp2_make(b.into_exponents().into_iter().rev().collect(), &base).unwrap(),
        );
        let (lo, hi) = match exp2_compare(&a, &b, &base).unwrap() {
            Ordering::Less => (a, b),
            Ordering::Greater => (b, a),
            Ordering::Equal => return Ok(()),
        };
        let c = exp2_between(&lo, &hi, &base, 64).unwrap();
        prop_assert_eq!(exp2_compare(&lo, &c, &base).unwrap(), Ordering::Less);
        prop_assert_eq!(exp2_compare(&c, &hi, &base).unwrap(), Ordering::Less);
    }

    #[test]
    fn kb_is_a_linear_order(s in prop::collection::vec(0u64..3, 0..4),
                            t in prop::collection::vec(0u64..3, 0..4),
                            u in prop::collection::vec(0u64..3, 0..4)) {
        let ab = kb_compare(&s, &t);
        prop_assert_eq!(ab.reverse(), kb_compare(&t, &s));
        if ab != Ordering::Greater && kb_compare(&t, &u) != Ordering::Greater {
            prop_assert_ne!(kb_compare(&s, &u), Ordering::Greater);
        }
        prop_assert_eq!(ab == Ordering::Equal, s == t);
    }

    #[test]
    fn weak_extension_is_a_preorder(s in prop::collection::vec(0u64..3, 0..4),
                                    t in prop::collection::vec(0u64..3, 0..5),
                                    u in prop::collection::vec(0u64..3, 0..6)) {
        prop_assert!(weak_extension(&s, &s));
        if weak_extension(&s, &t) && weak_extension(&t, &u) {
            prop_assert!(weak_extension(&s, &u));
        }
    }

    #[test]
    fn leq_fin_is_monotone_in_the_right_argument(f in prop::collection::btree_set(0u64..6, 0..4),
                                                 g in prop::collection::btree_set(0u64..6, 0..4),
                                                 extra in 0u64..6) {
        let ord = CodedOrder::Finite(6);
        if leq_fin(&f, &g, &ord) {
            let mut g2 = g.clone();
            g2.insert(extra);
            prop_assert!(leq_fin(&f, &g2, &ord));
        }
    }

    #[test]
    fn coloring_prefixes_are_bad(n in 1u64..5, len in 0usize..60) {
        prop_assert_eq!(coloring_good_pair(&ColoringOrder::modulo(n), len), None);
    }
}

#[test]
fn members_of_affine_maps_agree_on_positive_entries() {
    for f in [
        InjectiveMap::affine(2, 0).unwrap(),
        InjectiveMap::affine(1, -1).unwrap(),
    ] {
        let members: Vec<FinSeq> = enumerate_tf(&f).take(120).collect();
        for s in &members {
            assert!(tf_member(&f, s));
            for t in &members {
                for i in 0..s.len().min(t.len()) {
                    if s[i] > 0 && t[i] > 0 {
                        assert_eq!(s[i], t[i], "{s} vs {t}");
                    }
                }
                let st = tf_compare(&f, s, t).unwrap();
                assert_eq!(st.reverse(), tf_compare(&f, t, s).unwrap());
            }
        }
    }
}

#[test]
fn canonical_members_form_a_proper_extension_chain() {
    let f = InjectiveMap::affine(3, 1).unwrap();
    let chain: Vec<FinSeq> = (0..15).map(|n| tf_canonical(&f, n)).collect();
    for w in chain.windows(2) {
        assert!(tf_member(&f, &w[1]));
        assert!(w[1].properly_extends(&w[0]));
        assert_eq!(tf_compare(&f, &w[1], &w[0]).unwrap(), Ordering::Less);
    }
}

// For affine(2,0) the members form one proper-extension chain, so the
// hypotheses never hold there; affine(1,-1) has shorter members below longer ones.
#[test]
fn gp_map_reverses_the_order_under_its_hypotheses() {
    let mut checked = 0;
    for f in [
        InjectiveMap::affine(2, 0).unwrap(),
        InjectiveMap::affine(1, -1).unwrap(),
    ] {
        let members: Vec<FinSeq> = enumerate_tf(&f).take(40).collect();
        let tf = wpo_core::TfOrder::new(f.clone());
        for p in members.iter().filter(|p| p.len() <= 3) {
            let tails: Vec<FinSeq> = members
                .iter()
                .filter(|m| m.len() >= p.len() && m[..p.len()] == p[..])
                .map(|m| FinSeq(m[p.len()..].to_vec()))
                .collect();
            for s in &tails {
                let gs = gp_map(&f, p, s).unwrap();
                for e in gs.exponents() {
                    assert!(tf.leq(e, p));
                }
                for t in &tails {
                    let (ps, pt) = (p.concat(s), p.concat(t));
                    if tf_compare(&f, &ps, &pt).unwrap() == Ordering::Less && s.len() < t.len() {
                        let gt = gp_map(&f, p, t).unwrap();
                        assert_eq!(exp2_compare(&gs, &gt, &tf).unwrap(), Ordering::Greater);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 50, "only {checked} pairs met the hypotheses");
}

#[test]
fn antichain_sequences_of_length_two_are_bad() {
    let p = FinPoset::antichain(2);
    assert_eq!(find_good_pair(&[0, 1], &p), None);
    assert_eq!(find_good_pair(&[0, 1, 1], &p), Some((1, 2)));
}
