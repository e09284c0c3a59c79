//! The exponential order `2^α`: formal sums `2^β₀ + … + 2^βₙ₋₁` with
//! strictly descending exponents, compared by proper extension or first
//! difference.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orders::{Code, CodedOrder, Order};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Exp2Error {
    #[error("exponents at positions {position} and {} are not strictly descending", position + 1)]
    NotDescending { position: usize },
    #[error("base order cannot compare exponents at position {position}")]
    IncomparableExponents { position: usize },
    #[error("exponent at position {position} is not an element of the base order")]
    InvalidExponent { position: usize },
    #[error("expected a strictly increasing pair of terms")]
    NotIncreasing,
    #[error("no term strictly between the bounds within a budget of {budget} base codes")]
    NoWitnessWithinBudget { budget: usize },
    #[error("cannot parse term {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// An element of `2^α`. Exponents are strictly descending in the base order;
/// the empty term is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exp2Term<T = Code> {
    exponents: Vec<T>,
}

impl<T> Exp2Term<T> {
    pub fn zero() -> Self {
        Exp2Term { exponents: vec![] }
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn into_exponents(self) -> Vec<T> {
        self.exponents
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

impl Exp2Term<Code> {
    /// Bitset code `Σ 2^β` used by [`CodedOrder::Exp2`]; `None` if an exponent exceeds 63.
    pub fn to_code(&self) -> Option<Code> {
        self.exponents
            .iter()
            .try_fold(0u64, |acc, &e| (e < 64).then(|| acc | (1u64 << e)))
    }

    pub fn from_code(code: Code, base: &CodedOrder) -> Option<Self> {
        CodedOrder::exp2_exponents(base, code).map(|exponents| Exp2Term { exponents })
    }
}

/// Validates strict descent and builds the term.
pub fn exp2_make<O>(exps: Vec<O::Elem>, base: &O) -> Result<Exp2Term<O::Elem>, Exp2Error>
where
    O: Order + ?Sized,
{
    if let Some(position) = exps.iter().position(|e| !base.contains(e)) {
        return Err(Exp2Error::InvalidExponent { position });
    }
    for (position, w) in exps.windows(2).enumerate() {
        match base.compare(&w[0], &w[1]) {
            Some(Ordering::Greater) => {}
            Some(_) => return Err(Exp2Error::NotDescending { position }),
            None => return Err(Exp2Error::IncomparableExponents { position }),
        }
    }
    Ok(Exp2Term { exponents: exps })
}

/// Compares two exponent lists: a proper extension is larger, otherwise the
/// first differing exponent decides.
pub fn compare_exponents<O>(a: &[O::Elem], b: &[O::Elem], base: &O) -> Result<Ordering, Exp2Error>
where
    O: Order + ?Sized,
{
    for (position, (x, y)) in a.iter().zip(b).enumerate() {
        match base.compare(x, y) {
            Some(Ordering::Equal) => continue,
            Some(o) => return Ok(o),
            None => return Err(Exp2Error::IncomparableExponents { position }),
        }
    }
    Ok(a.len().cmp(&b.len()))
}

pub fn exp2_compare<O>(
    sigma: &Exp2Term<O::Elem>,
    tau: &Exp2Term<O::Elem>,
    base: &O,
) -> Result<Ordering, Exp2Error>
where
    O: Order + ?Sized,
{
    compare_exponents(&sigma.exponents, &tau.exponents, base)
}

/// Bounded search for a term strictly between `a` and `b`.
///
/// Candidates are tried in a fixed order: one-step extensions of `a`, then
/// prefixes of `b` with a smaller final exponent, then two-step extensions
/// of `a`. Only the first `budget` codes of `base` are used as exponents.
pub fn exp2_between(
    a: &Exp2Term<Code>,
    b: &Exp2Term<Code>,
    base: &CodedOrder,
    budget: usize,
) -> Result<Exp2Term<Code>, Exp2Error> {
    if exp2_compare(a, b, base)? != Ordering::Less {
        return Err(Exp2Error::NotIncreasing);
    }
    let codes = base.enumerate(budget);
    let strictly_between = |c: &Exp2Term<Code>| -> Result<bool, Exp2Error> {
        Ok(exp2_compare(a, c, base)? == Ordering::Less
            && exp2_compare(c, b, base)? == Ordering::Less)
    };
    let below = |x: Option<&Code>, y: &Code| x.is_none_or(|x| base.lt(y, x));
    let extend = |prefix: &[Code], e: Code| -> Option<Exp2Term<Code>> {
        let mut v = prefix.to_vec();
        v.push(e);
        exp2_make(v, base).ok()
    };

    for &e in &codes {
        if below(a.exponents.last(), &e) {
            if let Some(c) = extend(&a.exponents, e) {
                if strictly_between(&c)? {
                    return Ok(c);
                }
            }
        }
    }
    for k in 0..b.exponents.len() {
        let prefix = &b.exponents[..k];
        for &e in &codes {
            if base.lt(&e, &b.exponents[k]) && below(prefix.last(), &e) {
                if let Some(c) = extend(prefix, e) {
                    if strictly_between(&c)? {
                        return Ok(c);
                    }
                }
            }
        }
    }
    for &e in &codes {
        if !below(a.exponents.last(), &e) {
            continue;
        }
        for &f in &codes {
            if !base.lt(&f, &e) {
                continue;
            }
            if let Some(c) = extend(&a.exponents, e).and_then(|c| extend(&c.exponents, f)) {
                if strictly_between(&c)? {
                    return Ok(c);
                }
            }
        }
    }
    Err(Exp2Error::NoWitnessWithinBudget { budget })
}

/// `height`-fold tower `2^2^…^base` as a coded order. Height 0 is `base`.
pub fn exp2_iterate(base: CodedOrder, height: usize) -> CodedOrder {
    (0..height).fold(base, |acc, _| CodedOrder::exp2(acc))
}

/// `2^base` for an arbitrary base order, as an [`Order`] on terms.
/// Comparisons over a partial base that hit incomparable exponents yield `None`.
#[derive(Debug, Clone)]
pub struct Exp2Order<O>(pub O);

impl<O: Order> Order for Exp2Order<O>
where
    O::Elem: Clone,
{
    type Elem = Exp2Term<O::Elem>;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        exp2_compare(a, b, &self.0).ok()
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        exp2_make::<O>(a.exponents.to_vec(), &self.0).is_ok()
    }
}

impl<T: Clone> Exp2Term<T> {
    /// Appends `2^e` without validation; callers re-check with [`exp2_make`].
    pub fn with_summand(&self, e: T) -> Self {
        let mut exponents = self.exponents.clone();
        exponents.push(e);
        Exp2Term { exponents }
    }
}

/// Literal syntax: `0` for zero, otherwise `2^b0+2^b1+…`.
impl<T: fmt::Display> fmt::Display for Exp2Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "2^{e}")?;
        }
        Ok(())
    }
}

/// Parses the literal syntax without validating descent.
impl<T: FromStr> FromStr for Exp2Term<T> {
    type Err = Exp2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |reason: &str| Exp2Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s == "0" {
            return Ok(Exp2Term::zero());
        }
        s.split('+')
            .map(|part| {
                let e = part
                    .trim()
                    .strip_prefix("2^")
                    .ok_or_else(|| err("summand must start with 2^"))?;
                e.parse().map_err(|_| err("bad exponent"))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(|exponents| Exp2Term { exponents })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::check_poset_axioms;

    /// Both comparison clauses evaluated literally over ω.
    fn less_oracle(a: &[Code], b: &[Code]) -> bool {
        let ext = a.len() < b.len() && (0..a.len()).all(|i| a[i] == b[i]);
        let diff = (0..a.len().min(b.len())).any(|i| a[i] < b[i] && (0..i).all(|j| a[j] == b[j]));
        ext || diff
    }

    #[test]
    fn make_examples() {
        let omega = CodedOrder::Omega;
        assert!(exp2_make(vec![], &omega).unwrap().is_zero());
        let t = exp2_make(vec![1, 0], &omega).unwrap();
        assert_eq!(t.to_string(), "2^1+2^0");
        assert_eq!(
            exp2_make(vec![0, 1], &omega),
            Err(Exp2Error::NotDescending { position: 0 })
        );
        let anti = CodedOrder::antichain(2);
        assert_eq!(
            exp2_make(vec![1, 0], &anti),
            Err(Exp2Error::IncomparableExponents { position: 0 })
        );
        assert_eq!(
            exp2_make(vec![5], &CodedOrder::Finite(3)),
            Err(Exp2Error::InvalidExponent { position: 0 })
        );
    }

    #[test]
    fn compare_examples() {
        let omega = CodedOrder::Omega;
        let zero = Exp2Term::zero();
        let one = exp2_make(vec![1], &omega).unwrap();
        let low = exp2_make(vec![0], &omega).unwrap();
        assert_eq!(exp2_compare(&zero, &one, &omega), Ok(Ordering::Less));
        assert_eq!(exp2_compare(&low, &one, &omega), Ok(Ordering::Less));
        assert!(less_oracle(&[0], &[1]));
        assert_eq!(exp2_compare(&one, &one, &omega), Ok(Ordering::Equal));
    }

    #[test]
    fn compare_matches_oracle_over_finite_base() {
        let base = CodedOrder::Finite(4);
        let terms: Vec<Exp2Term> = (0..16u64)
            .map(|c| Exp2Term::from_code(c, &base).unwrap())
            .collect();
        for a in &terms {
            for b in &terms {
                let expected = if a == b {
                    Ordering::Equal
                } else if less_oracle(a.exponents(), b.exponents()) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
                assert_eq!(exp2_compare(a, b, &base), Ok(expected));
            }
        }
    }

    #[test]
    fn incomparable_base_is_rejected_at_comparison() {
        let anti = CodedOrder::antichain(2);
        let a = Exp2Term { exponents: vec![0] };
        let b = Exp2Term { exponents: vec![1] };
        assert_eq!(
            exp2_compare(&a, &b, &anti),
            Err(Exp2Error::IncomparableExponents { position: 0 })
        );
    }

    #[test]
    fn finite_bases_give_chains_of_size_two_to_the_n() {
        for n in 0..=4u64 {
            let base = CodedOrder::Finite(n);
            let order = exp2_iterate(base.clone(), 1);
            let codes = order.enumerate(1000);
            assert_eq!(codes.len(), 1 << n);
            assert!(crate::orders::check_linear(&order, &codes).is_ok());
            assert!(check_poset_axioms(&order, &codes).is_ok());
        }
    }

    #[test]
    fn iterate_examples() {
        let base = CodedOrder::Finite(2);
        assert_eq!(exp2_iterate(base.clone(), 0).to_string(), "finite:2");
        let one = exp2_iterate(base, 1);
        let codes = one.enumerate(100);
        assert_eq!(codes, vec![0, 1, 2, 3]);
        let labels: Vec<String> = codes
            .iter()
            .map(|&c| {
                Exp2Term::from_code(c, &CodedOrder::Finite(2))
                    .unwrap()
                    .to_string()
            })
            .collect();
        assert_eq!(labels, vec!["0", "2^0", "2^1", "2^1+2^0"]);
        for w in codes.windows(2) {
            assert_eq!(one.compare(&w[0], &w[1]), Some(Ordering::Less));
        }
        // height 2 over a single point: descending lists over the two-element stage
        let two = exp2_iterate(CodedOrder::Finite(1), 2);
        assert_eq!(two.enumerate(100).len(), 4);
        assert_eq!(two.cardinality(), Some(4));
    }

    #[test]
    fn between_over_reversed_omega() {
        let base = CodedOrder::OmegaRev;
        let zero = Exp2Term::zero();
        let b = exp2_make(vec![1], &base).unwrap();
        let c = exp2_between(&zero, &b, &base, 16).unwrap();
        assert_eq!(exp2_compare(&zero, &c, &base), Ok(Ordering::Less));
        assert_eq!(exp2_compare(&c, &b, &base), Ok(Ordering::Less));
        assert_eq!(c.exponents()[0], 2);
    }

    #[test]
    fn between_rejects_non_increasing_pairs() {
        let base = CodedOrder::OmegaRev;
        let a = exp2_make(vec![1], &base).unwrap();
        assert_eq!(
            exp2_between(&a, &a, &base, 8),
            Err(Exp2Error::NotIncreasing)
        );
    }

    #[test]
    fn between_fails_in_gaps_of_finite_bases() {
        let base = CodedOrder::Finite(2);
        let a = Exp2Term::zero();
        let b = exp2_make(vec![0], &base).unwrap();
        assert_eq!(
            exp2_between(&a, &b, &base, 8),
            Err(Exp2Error::NoWitnessWithinBudget { budget: 8 })
        );
    }

    #[test]
    fn literal_round_trip() {
        let t: Exp2Term<Code> = "2^3+2^1".parse().unwrap();
        assert_eq!(t.exponents(), &[3, 1]);
        assert_eq!(t.to_string(), "2^3+2^1");
        assert!("3".parse::<Exp2Term<Code>>().is_err());
        assert_eq!("0".parse::<Exp2Term<Code>>().unwrap(), Exp2Term::zero());
        assert_eq!(t.to_code(), Some(0b1010));
    }
}
