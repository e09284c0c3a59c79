//! Explicit witness constructions: the coloring order whose diagonal is bad
//! in `α × n`, the amalgamation gadgets around a non-unary dilator, and the
//! decomposition of a unary dilator through `(W(0) + W(1)) × X`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dilators::{find_good_pair_in_application, Applied, Dilator, ElementCode, LawBudget};
use crate::orders::{
    all_posets, check_morphism, find_good_pair, sum_code, Code, CodedOrder, CustomOrder, FinPoset,
    MorphismMode, MorphismVerdict, Order, OrderError, Product, Sum, SumElem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("element {sigma} has support {support:?} of size > 1")]
    NotUnary {
        sigma: ElementCode,
        support: Vec<Code>,
    },
    #[error("no preimage of {sigma} found in W(0) or W(1); the support condition fails")]
    DecompositionFailure { sigma: ElementCode },
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("coloring takes value {value} ≥ {colors} at {at}")]
    ColorOutOfRange { at: Code, value: Code, colors: Code },
    #[error(transparent)]
    Order(#[from] OrderError),
}

type ColorFn = dyn Fn(Code) -> Code + Send + Sync;

/// A coloring `c: ℕ → {0, …, n−1}`.
#[derive(Clone)]
pub struct ColoringOrder {
    pub colors: Code,
    pub name: String,
    coloring: Arc<ColorFn>,
}

impl fmt::Debug for ColoringOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoringOrder({}, {} colors)", self.name, self.colors)
    }
}

impl ColoringOrder {
    pub fn new(
        name: impl Into<String>,
        colors: Code,
        coloring: impl Fn(Code) -> Code + Send + Sync + 'static,
    ) -> Self {
        ColoringOrder {
            colors,
            name: name.into(),
            coloring: Arc::new(coloring),
        }
    }

    /// `c(i) = i mod n`
    pub fn modulo(n: Code) -> Self {
        ColoringOrder::new(format!("mod{n}"), n, move |i| i % n)
    }

    pub fn constant() -> Self {
        ColoringOrder::new("constant", 1, |_| 0)
    }

    pub fn color(&self, i: Code) -> Code {
        (self.coloring)(i)
    }

    pub fn validate(&self, window: Code) -> Result<(), WitnessError> {
        match (0..window).find(|&i| self.color(i) >= self.colors) {
            Some(at) => Err(WitnessError::ColorOutOfRange {
                at,
                value: self.color(at),
                colors: self.colors,
            }),
            None => Ok(()),
        }
    }

    /// `i <_α j` iff `c(i) > c(j)`, or `c(i) = c(j)` and `i > j`.
    pub fn compare(&self, i: Code, j: Code) -> Ordering {
        self.color(j).cmp(&self.color(i)).then_with(|| j.cmp(&i))
    }

    pub fn alpha(&self) -> CodedOrder {
        let me = self.clone();
        CodedOrder::Custom(CustomOrder::new(
            format!("coloring:{}", self.name),
            true,
            move |a, b| Some(me.compare(a, b)),
        ))
    }

    /// `α` with a least element `⊥` at code 0; code `k + 1` is the old `k`.
    pub fn alpha_with_bottom(&self) -> CodedOrder {
        let me = self.clone();
        CodedOrder::Custom(CustomOrder::new(
            format!("coloring:{}+bottom", self.name),
            true,
            move |a, b| match (a, b) {
                (0, 0) => Some(Ordering::Equal),
                (0, _) => Some(Ordering::Less),
                (_, 0) => Some(Ordering::Greater),
                _ => Some(me.compare(a - 1, b - 1)),
            },
        ))
    }

    /// The diagonal `(i, c(i))`.
    pub fn sequence(&self) -> impl Iterator<Item = (Code, Code)> + '_ {
        (0..).map(|i| (i, self.color(i)))
    }
}

/// `α` and the diagonal sequence, bad in `α × n`.
pub fn coloring_order(c: &ColoringOrder) -> (CodedOrder, impl Iterator<Item = (Code, Code)> + '_) {
    (c.alpha(), c.sequence())
}

/// First good pair of the `len`-term prefix of the diagonal in `α × n`, if any.
pub fn coloring_good_pair(c: &ColoringOrder, len: usize) -> Option<(usize, usize)> {
    let (alpha, seq) = coloring_order(c);
    let prefix: Vec<(Code, Code)> = seq.take(len).collect();
    find_good_pair(&prefix, &Product(alpha, CodedOrder::Finite(c.colors)))
}

/// `X' = X ∪ {x', y'}` with `z < x'` iff `z ≤ x` and `z < y'` iff `z ≤ y`,
/// and `f_x`, `f_y` replacing `x` resp. `y` by the fresh point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationGadget {
    pub base: FinPoset,
    pub x: Code,
    pub y: Code,
    pub extended: FinPoset,
    pub x_prime: Code,
    pub y_prime: Code,
    pub f_x: Vec<Code>,
    pub f_y: Vec<Code>,
}

impl AmalgamationGadget {
    pub fn new(base: FinPoset, x: Code, y: Code) -> Self {
        let (with_x, x_prime) = base.with_point_above(&[x]);
        let (extended, y_prime) = with_x.with_point_above(&[y]);
        let replace = |from: Code, to: Code| -> Vec<Code> {
            base.points()
                .into_iter()
                .map(|z| if z == from { to } else { z })
                .collect()
        };
        let (f_x, f_y) = (replace(x, x_prime), replace(y, y_prime));
        AmalgamationGadget {
            base,
            x,
            y,
            extended,
            x_prime,
            y_prime,
            f_x,
            f_y,
        }
    }

    pub fn swapped(&self) -> Self {
        AmalgamationGadget::new(self.base.clone(), self.y, self.x)
    }

    /// Both maps are quasi embeddings `X → X'`.
    pub fn maps_are_quasi(&self) -> bool {
        [&self.f_x, &self.f_y].into_iter().all(|f| {
            let image: Vec<Option<Code>> = f.iter().copied().map(Some).collect();
            check_morphism(
                &self.base,
                &self.base.points(),
                &self.extended,
                &image,
                MorphismMode::Quasi,
            )
            .is_ok_and(|v| v.is_pass())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonUnaryWitness {
    /// Where the element was found, before restriction to its support.
    pub found_in: FinPoset,
    pub found: ElementCode,
    /// `supp(σ)` as a poset, with `σ` transported onto it.
    pub x: FinPoset,
    pub sigma: ElementCode,
    pub gadget: AmalgamationGadget,
    /// `W(f_x)(σ)`, oriented so that `σ_x ≰ σ_y`.
    pub sigma_x: ElementCode,
    pub sigma_y: ElementCode,
}

/// Searches posets within `budget` for an element with at least two support
/// points and builds the amalgamation gadget around it.
pub fn nonunary_witness(w: &dyn Dilator, budget: &LawBudget) -> Option<NonUnaryWitness> {
    for p in all_posets(budget.max_poset_size) {
        for found in w.elements(&p, &p.points(), budget.max_elements) {
            let supp = w.supp(&found);
            if supp.len() < 2 {
                continue;
            }
            let x = p.induced(&supp);
            let sigma = w.act(
                &|c| {
                    supp.iter()
                        .position(|&s| s == c)
                        .map_or(Code::MAX, |i| i as Code)
                },
                &found,
            );
            if !w.is_element(&x, &sigma) || w.act(&|i| supp[i as usize], &sigma) != found {
                // the support condition fails here; keep searching
                continue;
            }
            let mut gadget = AmalgamationGadget::new(x.clone(), 0, 1);
            let orient = |g: &AmalgamationGadget| {
                let sx = w.act(&|c| g.f_x[c as usize], &sigma);
                let sy = w.act(&|c| g.f_y[c as usize], &sigma);
                (sx, sy)
            };
            let (mut sigma_x, mut sigma_y) = orient(&gadget);
            if Applied::new(w, &gadget.extended).leq(&sigma_x, &sigma_y) {
                gadget = gadget.swapped();
                (sigma_x, sigma_y) = orient(&gadget);
            }
            return Some(NonUnaryWitness {
                found_in: p,
                found,
                x,
                sigma,
                gadget,
                sigma_x,
                sigma_y,
            });
        }
    }
    None
}

/// Checks on the finite window of the gadget construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationReport {
    pub window: usize,
    pub gadget_maps_quasi: bool,
    pub sigma_x_not_below_sigma_y: bool,
    pub supports_differ: bool,
    /// Every `g_i` and `g'_i` is a quasi embedding `X → Y`.
    pub g_maps_quasi: bool,
    /// Every `h` for `i < j` with `n_i ≠ n_j` is a quasi embedding `X' → Y`.
    pub h_maps_quasi: bool,
    /// `g'_i = h ∘ f_x` and `g_j = h ∘ f_y` for all such pairs.
    pub identities_hold: bool,
    pub pairs_checked: usize,
    /// First good pair of `W(g_i)(σ)` in `W(Y)`, if any.
    pub image_good_pair: Option<(usize, usize)>,
    /// Inference steps of the argument that a finite window cannot carry out.
    pub not_implemented: Vec<String>,
}

impl AmalgamationReport {
    pub fn is_pass(&self) -> bool {
        self.gadget_maps_quasi
            && self.sigma_x_not_below_sigma_y
            && self.supports_differ
            && self.g_maps_quasi
            && self.h_maps_quasi
            && self.identities_hold
            && self.image_good_pair.is_none()
    }
}

/// Materializes `Y = N + α_⊥ + X∖{x,y}` and the maps `g_i`, `g'_i`, `h` for the
/// first `window` terms of the coloring's diagonal, and checks them.
pub fn amalgamation_report(
    w: &dyn Dilator,
    wit: &NonUnaryWitness,
    coloring: &ColoringOrder,
    window: usize,
) -> AmalgamationReport {
    let g = &wit.gadget;
    let rest: Vec<Code> = g
        .base
        .points()
        .into_iter()
        .filter(|&z| z != g.x && z != g.y)
        .collect();
    let rest_poset = g.base.induced(&rest);
    let y_order = CodedOrder::sum(
        CodedOrder::sum(
            CodedOrder::antichain(coloring.colors as usize),
            coloring.alpha_with_bottom(),
        ),
        CodedOrder::poset(rest_poset),
    );
    let n_code = |k: Code| sum_code(0, sum_code(0, k));
    let a_code = |b: Code| sum_code(0, sum_code(1, b));
    let r_code = |z: Code| {
        sum_code(
            1,
            rest.iter().position(|&r| r == z).expect("rest point") as Code,
        )
    };
    const BOTTOM: Code = 0;

    // bad sequence (β_i, n_i) in α_⊥ × N, avoiding ⊥
    let seq: Vec<(Code, Code)> = coloring
        .sequence()
        .take(window)
        .map(|(i, c)| (i + 1, c))
        .collect();

    let g_map = |i: usize, bottom: bool| -> Vec<Code> {
        g.base
            .points()
            .into_iter()
            .map(|z| {
                if z == g.x {
                    n_code(seq[i].1)
                } else if z == g.y {
                    a_code(if bottom { BOTTOM } else { seq[i].0 })
                } else {
                    r_code(z)
                }
            })
            .collect()
    };
    let h_map = |i: usize, j: usize| -> Vec<Code> {
        g.extended
            .points()
            .into_iter()
            .map(|z| {
                if z == g.x {
                    n_code(seq[j].1)
                } else if z == g.x_prime {
                    n_code(seq[i].1)
                } else if z == g.y {
                    a_code(BOTTOM)
                } else if z == g.y_prime {
                    a_code(seq[j].0)
                } else {
                    r_code(z)
                }
            })
            .collect()
    };
    let quasi = |dom: &FinPoset, f: &[Code]| {
        let image: Vec<Option<Code>> = f.iter().copied().map(Some).collect();
        check_morphism(dom, &dom.points(), &y_order, &image, MorphismMode::Quasi)
            .is_ok_and(|v| v.is_pass())
    };

    let g_maps_quasi =
        (0..window).all(|i| quasi(&g.base, &g_map(i, false)) && quasi(&g.base, &g_map(i, true)));
    let mut h_maps_quasi = true;
    let mut identities_hold = true;
    let mut pairs_checked = 0;
    for i in 0..window {
        for j in i + 1..window {
            if seq[i].1 == seq[j].1 {
                continue;
            }
            pairs_checked += 1;
            let h = h_map(i, j);
            h_maps_quasi &= quasi(&g.extended, &h);
            let compose = |f: &[Code]| f.iter().map(|&c| h[c as usize]).collect::<Vec<_>>();
            identities_hold &=
                compose(&g.f_x) == g_map(i, true) && compose(&g.f_y) == g_map(j, false);
        }
    }
    let images: Vec<ElementCode> = (0..window)
        .map(|i| {
            let gi = g_map(i, false);
            w.act(&|c| gi[c as usize], &wit.sigma)
        })
        .collect();
    AmalgamationReport {
        window,
        gadget_maps_quasi: g.maps_are_quasi(),
        sigma_x_not_below_sigma_y: !Applied::new(w, &g.extended).leq(&wit.sigma_x, &wit.sigma_y),
        supports_differ: w.supp(&wit.sigma_x) != w.supp(&wit.sigma_y),
        g_maps_quasi,
        h_maps_quasi,
        identities_hold,
        pairs_checked,
        image_good_pair: find_good_pair_in_application(w, &y_order, &images),
        not_implemented: vec![
            "infinite pigeonhole: Y is a wpo for infinite alpha via three-colour homogeneity"
                .into(),
        ],
    }
}

/// Image of `σ` in `(W(0) + W(1)) × X`: summand, trace `σ₀`, and point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryImage {
    pub sigma: ElementCode,
    pub summand: u8,
    pub sigma0: ElementCode,
    pub point: Code,
}

impl UnaryImage {
    pub fn target(&self) -> (SumElem<ElementCode, ElementCode>, Code) {
        let s = if self.summand == 0 {
            SumElem::Left(self.sigma0.clone())
        } else {
            SumElem::Right(self.sigma0.clone())
        };
        (s, self.point)
    }
}

impl fmt::Display for UnaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ((", self.sigma)?;
        write!(f, "{},{}),{})", self.summand, self.sigma0, self.point)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryEmbedding {
    pub images: Vec<UnaryImage>,
    pub verdict: MorphismVerdict,
}

/// Decomposes each enumerated `σ ∈ W(X)` as `W(ι)(σ₀)` (empty support, sent to
/// `((0, σ₀), z)`) or `W(g_x)(σ₀)` (support `{x}`, sent to `((1, σ₀), x)`),
/// then checks that the map reflects the order.
pub fn unary_quasi_embedding(
    w: &dyn Dilator,
    x: &FinPoset,
    z: Code,
    budget: &LawBudget,
) -> Result<UnaryEmbedding, WitnessError> {
    if x.is_empty() {
        return Err(WitnessError::EmptyCarrier);
    }
    if !x.contains(&z) {
        return Err(OrderError::CodeOutOfRange {
            code: z,
            size: x.size(),
        }
        .into());
    }
    let zero = FinPoset::antichain(0);
    let one = FinPoset::chain(1);
    let w0 = w.elements(&zero, &[], budget.max_elements);
    let w1 = w.elements(&one, &[0], budget.max_elements);
    let elems = w.elements(x, &x.points(), budget.max_elements);
    let mut images = vec![];
    for sigma in &elems {
        let supp = w.supp(sigma);
        let image = match supp.as_slice() {
            [] => w0
                .iter()
                .find(|s0| w.act(&|c| c, s0) == *sigma)
                .map(|s0| UnaryImage {
                    sigma: sigma.clone(),
                    summand: 0,
                    sigma0: s0.clone(),
                    point: z,
                }),
            &[p] => w1
                .iter()
                .find(|s0| w.act(&|_| p, s0) == *sigma)
                .map(|s0| UnaryImage {
                    sigma: sigma.clone(),
                    summand: 1,
                    sigma0: s0.clone(),
                    point: p,
                }),
            _ => {
                return Err(WitnessError::NotUnary {
                    sigma: sigma.clone(),
                    support: supp,
                })
            }
        };
        images.push(image.ok_or_else(|| WitnessError::DecompositionFailure {
            sigma: sigma.clone(),
        })?);
    }
    let target = Product(Sum(Applied::new(w, &zero), Applied::new(w, &one)), x);
    let mapped: Vec<Option<_>> = images.iter().map(|im| Some(im.target())).collect();
    let verdict = check_morphism(
        &Applied::new(w, x),
        &elems,
        &target,
        &mapped,
        MorphismMode::Quasi,
    )?;
    Ok(UnaryEmbedding { images, verdict })
}

/// A random poset on `0..n`: each pair `i < j` is related with probability `density`.
pub fn random_poset(n: usize, density: f64, seed: u64) -> FinPoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Code, Code)> = (0..n as Code)
        .flat_map(|i| (i + 1..n as Code).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    FinPoset::new(n, &pairs).expect("pairs follow the natural order, so no cycles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilators::Builtin;
    use crate::orders::{check_linear, check_poset_axioms};

    /// Pair scan written out directly from the product order definition.
    fn bad_by_brute_force(c: &ColoringOrder, len: Code) -> bool {
        let lt_alpha =
            |i: Code, j: Code| c.color(i) > c.color(j) || (c.color(i) == c.color(j) && i > j);
        (0..len).all(|i| {
            (i + 1..len).all(|j| {
                let alpha_le = i == j || lt_alpha(i, j);
                !(alpha_le && c.color(i) <= c.color(j))
            })
        })
    }

    #[test]
    fn constant_coloring_reverses_naturals() {
        let c = ColoringOrder::constant();
        let alpha = c.alpha();
        assert_eq!(alpha.compare(&3, &5), Some(Ordering::Greater));
        assert_eq!(coloring_good_pair(&c, 50), None);
        assert!(bad_by_brute_force(&c, 50));
    }

    #[test]
    fn mod_three_prefix_is_bad() {
        let c = ColoringOrder::modulo(3);
        c.validate(1000).unwrap();
        assert_eq!(coloring_good_pair(&c, 200), None);
        assert!(bad_by_brute_force(&c, 200));
        let codes: Vec<Code> = (0..100).collect();
        assert!(check_linear(&c.alpha(), &codes).is_ok());
        assert!(check_poset_axioms(&c.alpha(), &codes[..40]).is_ok());
    }

    #[test]
    fn bottom_is_least_and_out_of_range_colors_are_caught() {
        let c = ColoringOrder::modulo(2);
        let a = c.alpha_with_bottom();
        for k in 1..20 {
            assert_eq!(a.compare(&0, &k), Some(Ordering::Less));
            assert_eq!(a.compare(&k, &(k + 1)), c.alpha().compare(&(k - 1), &k));
        }
        let bad = ColoringOrder::new("bad", 2, |i| if i == 7 { 5 } else { 0 });
        assert!(matches!(
            bad.validate(10),
            Err(WitnessError::ColorOutOfRange { at: 7, .. })
        ));
    }

    #[test]
    fn tree2_nonunary_witness() {
        let t = Builtin::Tree2;
        let wit = nonunary_witness(&t, &LawBudget::default()).unwrap();
        assert_eq!(wit.x, FinPoset::antichain(2));
        assert_eq!(wit.sigma.to_string(), "1(0,1)");
        assert!(wit.gadget.maps_are_quasi());
        assert!(check_poset_axioms(&wit.gadget.extended, &wit.gadget.extended.points()).is_ok());
        assert_ne!(wit.sigma_x, wit.sigma_y);
        assert_ne!(t.supp(&wit.sigma_x), t.supp(&wit.sigma_y));
        assert!(!Applied::new(&t, &wit.gadget.extended).leq(&wit.sigma_x, &wit.sigma_y));
        let ext = &wit.gadget.extended;
        for z in wit.x.points() {
            assert_eq!(ext.lt(&z, &wit.gadget.x_prime), wit.x.le(z, wit.gadget.x));
            assert_eq!(ext.lt(&z, &wit.gadget.y_prime), wit.x.le(z, wit.gadget.y));
        }
    }

    #[test]
    fn unary_dilators_have_no_nonunary_witness() {
        assert!(
            nonunary_witness(&Builtin::V(CodedOrder::Finite(3)), &LawBudget::default()).is_none()
        );
        assert!(
            nonunary_witness(&Builtin::W(CodedOrder::Finite(3)), &LawBudget::default()).is_none()
        );
    }

    #[test]
    fn gadget_report_for_tree2() {
        let t = Builtin::Tree2;
        let wit = nonunary_witness(&t, &LawBudget::default()).unwrap();
        let report = amalgamation_report(&t, &wit, &ColoringOrder::modulo(3), 30);
        assert!(report.is_pass(), "{report:?}");
        assert!(report.pairs_checked > 0);
        assert_eq!(report.not_implemented.len(), 1);
    }

    #[test]
    fn gadget_on_a_chain() {
        let g = AmalgamationGadget::new(FinPoset::chain(3), 0, 2);
        assert!(g.maps_are_quasi());
        assert_eq!(g.f_x, vec![3, 1, 2]);
        assert_eq!(g.f_y, vec![0, 1, 4]);
        assert!(g.extended.le(0, 4) && g.extended.le(2, 4) && !g.extended.le(1, 3));
    }

    #[test]
    fn v_decomposes_through_w0_plus_w1() {
        let v = Builtin::V(CodedOrder::Finite(2));
        let x = FinPoset::chain(2);
        let emb = unary_quasi_embedding(&v, &x, 0, &LawBudget::default()).unwrap();
        assert!(emb.verdict.is_pass());
        let shown: Vec<String> = emb.images.iter().map(|i| i.to_string()).collect();
        assert!(shown.contains(&"0:1 -> ((0,0:1),0)".to_string()));
        assert!(shown.contains(&"1(1) -> ((1,1(0)),1)".to_string()));
        assert_eq!(emb.images.len(), 4);
    }

    #[test]
    fn random_carriers_embed() {
        for seed in 0..10 {
            let x = random_poset(5, 0.4, seed);
            assert!(check_poset_axioms(&x, &x.points()).is_ok());
            for w in [
                Builtin::V(CodedOrder::Finite(2)),
                Builtin::W(CodedOrder::Finite(2)),
            ] {
                let emb = unary_quasi_embedding(&w, &x, 0, &LawBudget::default()).unwrap();
                assert!(emb.verdict.is_pass(), "{w} seed {seed}");
            }
        }
        assert_eq!(random_poset(5, 0.4, 7), random_poset(5, 0.4, 7));
    }

    #[test]
    fn tree2_is_rejected_as_non_unary() {
        let err = unary_quasi_embedding(
            &Builtin::Tree2,
            &FinPoset::antichain(2),
            0,
            &LawBudget::default(),
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::NotUnary { .. }));
        assert_eq!(
            unary_quasi_embedding(
                &Builtin::Tree2,
                &FinPoset::antichain(0),
                0,
                &LawBudget::default()
            ),
            Err(WitnessError::EmptyCarrier)
        );
    }
}
