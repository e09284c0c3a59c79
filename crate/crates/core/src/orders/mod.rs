//! Partial orders: finite posets, coded countable orders, sums and products,
//! finite-set domination, morphism checks, and the two sequence orders
//! (Kleene-Brouwer and Higman) used throughout the crate.
//!
//! Every order implements [`Order`], whose comparator returns
//! `Option<Ordering>`; `None` means the two elements are incomparable.
//! Linear orders are the special case in which `None` never occurs.

mod coded;
mod finite;
mod seq;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coded::{cantor_pair, cantor_unpair, sum_code, sum_decode, CodedOrder, CustomOrder};
pub use finite::{all_maps, all_posets, FinPoset};
pub use seq::{higman_leq, kb_compare, FinSeq, KleeneBrouwer};

/// A natural-number code naming an element of a countable order.
pub type Code = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("code {code} is out of range for a poset of size {size}")]
    CodeOutOfRange { code: Code, size: usize },
    #[error("closure relates distinct elements both ways along cycle {cycle:?}")]
    AntisymmetryViolation { cycle: Vec<Code> },
    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("morphism is undefined on domain element {0}")]
    NonTotal(usize),
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

impl OrderError {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        OrderError::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

/// A (partial) order relation with a decidable comparator.
pub trait Order {
    type Elem;

    /// `Some(ordering)` when the elements are comparable, `None` otherwise.
    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering>;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        matches!(self.compare(a, b), Some(Ordering::Less | Ordering::Equal))
    }

    fn lt(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.compare(a, b) == Some(Ordering::Less)
    }

    /// Whether the element belongs to the carrier of this order.
    fn contains(&self, _a: &Self::Elem) -> bool {
        true
    }
}

impl<O: Order + ?Sized> Order for &O {
    type Elem = O::Elem;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        (**self).compare(a, b)
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        (**self).contains(a)
    }
}

impl<O: Order + ?Sized> Order for std::sync::Arc<O> {
    type Elem = O::Elem;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        (**self).compare(a, b)
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        (**self).contains(a)
    }
}

/// Combines two component comparisons into the componentwise (product) comparison.
pub fn product_cmp(left: Option<Ordering>, right: Option<Ordering>) -> Option<Ordering> {
    use Ordering::*;
    match (left?, right?) {
        (Equal, Equal) => Some(Equal),
        (Less | Equal, Less | Equal) => Some(Less),
        (Greater | Equal, Greater | Equal) => Some(Greater),
        _ => None,
    }
}

/// Element of a sum `X + Y`: `(0, x)` or `(1, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SumElem<L, R> {
    Left(L),
    Right(R),
}

impl<L: fmt::Display, R: fmt::Display> fmt::Display for SumElem<L, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumElem::Left(x) => write!(f, "(0,{x})"),
            SumElem::Right(y) => write!(f, "(1,{y})"),
        }
    }
}

/// The sum `X + Y`: summands ordered internally, no cross relations.
#[derive(Debug, Clone)]
pub struct Sum<A, B>(pub A, pub B);

/// The product `X × Y`, ordered componentwise.
#[derive(Debug, Clone)]
pub struct Product<A, B>(pub A, pub B);

pub fn po_sum<A: Order, B: Order>(x: A, y: B) -> Sum<A, B> {
    Sum(x, y)
}

pub fn po_product<A: Order, B: Order>(x: A, y: B) -> Product<A, B> {
    Product(x, y)
}

impl<A: Order, B: Order> Order for Sum<A, B> {
    type Elem = SumElem<A::Elem, B::Elem>;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        match (a, b) {
            (SumElem::Left(x), SumElem::Left(y)) => self.0.compare(x, y),
            (SumElem::Right(x), SumElem::Right(y)) => self.1.compare(x, y),
            _ => None,
        }
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        match a {
            SumElem::Left(x) => self.0.contains(x),
            SumElem::Right(y) => self.1.contains(y),
        }
    }
}

impl<A: Order, B: Order> Order for Product<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        product_cmp(self.0.compare(&a.0, &b.0), self.1.compare(&a.1, &b.1))
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        self.0.contains(&a.0) && self.1.contains(&a.1)
    }
}

/// `F ≤_fin G`: every element of `F` lies below some element of `G`.
pub fn leq_fin<'a, O, F, G>(f: F, g: G, ord: &O) -> bool
where
    O: Order + ?Sized,
    O::Elem: 'a,
    F: IntoIterator<Item = &'a O::Elem>,
    G: IntoIterator<Item = &'a O::Elem> + Clone,
{
    f.into_iter()
        .all(|x| g.clone().into_iter().any(|y| ord.leq(x, y)))
}

/// Least index pair `(i, j)` in lexicographic order with `i < j` and
/// `seq[i] ≤ seq[j]`; `None` means the prefix is bad.
pub fn find_good_pair<O: Order + ?Sized>(seq: &[O::Elem], ord: &O) -> Option<(usize, usize)> {
    (0..seq.len()).find_map(|i| {
        (i + 1..seq.len())
            .find(|&j| ord.leq(&seq[i], &seq[j]))
            .map(|j| (i, j))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismMode {
    /// Order-reflecting maps.
    Quasi,
    /// Order-reflecting and order-preserving maps.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum MorphismVerdict {
    Pass,
    /// Domain indices `(a, b)` violating reflection (`f(a) ≤ f(b)`, `a ≰ b`)
    /// or, in full mode, preservation (`a ≤ b`, `f(a) ≰ f(b)`).
    Fail {
        witness: (usize, usize),
        reflection: bool,
    },
}

impl MorphismVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, MorphismVerdict::Pass)
    }
}

/// A finite function from the elements of a finite domain into some codomain.
/// `map[i]` is the image of domain element `i`; `None` marks an undefined point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism<E = Code> {
    pub map: Vec<Option<E>>,
}

impl<E: Clone> Morphism<E> {
    pub fn total(map: Vec<E>) -> Self {
        Morphism {
            map: map.into_iter().map(Some).collect(),
        }
    }

    pub fn check<C>(
        &self,
        domain: &FinPoset,
        codomain: &C,
        mode: MorphismMode,
    ) -> Result<MorphismVerdict, OrderError>
    where
        C: Order<Elem = E> + ?Sized,
    {
        check_morphism(domain, &domain.points(), codomain, &self.map, mode)
    }
}

/// Checks a finite map `elems[i] ↦ image[i]` for order reflection (and, in
/// full mode, preservation). Reports the first violating index pair.
pub fn check_morphism<D, C>(
    domain: &D,
    elems: &[D::Elem],
    codomain: &C,
    image: &[Option<C::Elem>],
    mode: MorphismMode,
) -> Result<MorphismVerdict, OrderError>
where
    D: Order + ?Sized,
    C: Order + ?Sized,
{
    if let Some(i) = (0..elems.len()).find(|&i| image.get(i).is_none_or(|v| v.is_none())) {
        return Err(OrderError::NonTotal(i));
    }
    let img = |i: usize| image[i].as_ref().expect("checked total");
    for a in 0..elems.len() {
        for b in 0..elems.len() {
            let src = domain.leq(&elems[a], &elems[b]);
            let dst = codomain.leq(img(a), img(b));
            if dst && !src {
                return Ok(MorphismVerdict::Fail {
                    witness: (a, b),
                    reflection: true,
                });
            }
            if mode == MorphismMode::Full && src && !dst {
                return Ok(MorphismVerdict::Fail {
                    witness: (a, b),
                    reflection: false,
                });
            }
        }
    }
    Ok(MorphismVerdict::Pass)
}

/// Checks reflexivity, antisymmetry and transitivity on a finite sample.
/// Antisymmetry is judged against `==` on the element representation.
pub fn check_poset_axioms<O>(ord: &O, elems: &[O::Elem]) -> Result<(), String>
where
    O: Order + ?Sized,
    O::Elem: PartialEq + fmt::Debug,
{
    let n = elems.len();
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| ord.leq(&elems[i], &elems[j])).collect())
        .collect();
    for i in 0..n {
        if !leq[i][i] {
            return Err(format!("not reflexive at {:?}", elems[i]));
        }
        for j in 0..n {
            if leq[i][j] && leq[j][i] && elems[i] != elems[j] {
                return Err(format!(
                    "not antisymmetric: {:?} and {:?}",
                    elems[i], elems[j]
                ));
            }
            if !leq[i][j] {
                continue;
            }
            for k in 0..n {
                if leq[j][k] && !leq[i][k] {
                    return Err(format!(
                        "not transitive: {:?} ≤ {:?} ≤ {:?}",
                        elems[i], elems[j], elems[k]
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Checks that the comparator never reports incomparability on the sample.
pub fn check_linear<O: Order + ?Sized>(ord: &O, elems: &[O::Elem]) -> Result<(), (usize, usize)> {
    for i in 0..elems.len() {
        for j in 0..elems.len() {
            if ord.compare(&elems[i], &elems[j]).is_none() {
                return Err((i, j));
            }
        }
    }
    Ok(())
}
