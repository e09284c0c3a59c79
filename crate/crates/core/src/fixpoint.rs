//! Kruskal fixed points of normal coded dilators: terms `κ(σ)`, their
//! recursive comparison, an independent check of the fixed-point axiom, and
//! the quasi-embeddings of `α × n` and `2^α` into fixed points.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dilators::{Builtin, Dilator, ElementCode};
use crate::exp2::{exp2_compare, Exp2Term};
use crate::orders::{Code, CodedOrder, FinPoset, Order};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixError {
    #[error("child {child} is not in the support of the trace")]
    SupportNotFull { child: usize },
    #[error("trace {trace} is not an element over the induced child order")]
    NotAnElement { trace: ElementCode },
    #[error("distinct terms {left} and {right} compare both ways; the dilator is not normal")]
    AntisymmetryBreak { left: String, right: String },
    #[error("image of {left} lies below image of {right}, but {left} ≰ {right}")]
    ReflectionFailure { left: String, right: String },
    #[error("cannot parse term {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermNode {
    size: usize,
    trace: ElementCode,
    children: Vec<Term>,
}

/// A fixed-point element `κ(σ)` in normal form: the trace lives over the
/// sorted, duplicate-free child list and uses every child.
///
/// Terms order first by node count, so children sort before parents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Arc<TermNode>);

impl Term {
    fn raw(trace: ElementCode, children: Vec<Term>) -> Term {
        let size = 1 + children.iter().map(Term::size).sum::<usize>();
        Term(Arc::new(TermNode {
            size,
            trace,
            children,
        }))
    }

    pub fn trace(&self) -> &ElementCode {
        &self.0.trace
    }

    pub fn children(&self) -> &[Term] {
        &self.0.children
    }

    /// Node count of the term with shared children counted once per parent.
    pub fn size(&self) -> usize {
        self.0.size
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k({}", self.trace())?;
        for (i, c) in self.children().iter().enumerate() {
            write!(f, "{}{c}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the display syntax structurally. Normal form is checked only up to
/// child order; use [`FixedPoint::validate`] to check against a dilator.
impl FromStr for Term {
    type Err = FixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |r: &str| FixError::Parse {
            input: s.to_string(),
            reason: r.to_string(),
        };
        let (t, rest) = parse_term(s.trim()).map_err(&err)?;
        if !rest.trim().is_empty() {
            return Err(err("trailing input"));
        }
        Ok(t)
    }
}

fn parse_term(s: &str) -> Result<(Term, &str), &'static str> {
    let body = s.strip_prefix("k(").ok_or("expected k(")?;
    let mut depth = 0usize;
    let end = body
        .char_indices()
        .find(|&(_, c)| match c {
            '(' => {
                depth += 1;
                false
            }
            ')' if depth == 0 => true,
            ')' => {
                depth -= 1;
                false
            }
            ';' => depth == 0,
            _ => false,
        })
        .map(|(i, _)| i)
        .ok_or("unterminated term")?;
    let trace: ElementCode = body[..end].parse().map_err(|_| "bad trace")?;
    let mut rest = &body[end..];
    let mut children = vec![];
    if let Some(r) = rest.strip_prefix(';') {
        rest = r;
        loop {
            let (c, r) = parse_term(rest.trim_start())?;
            children.push(c);
            rest = r.trim_start();
            match rest.strip_prefix(',') {
                Some(r) => rest = r,
                None => break,
            }
        }
    }
    let rest = rest.strip_prefix(')').ok_or("expected )")?;
    if children.windows(2).any(|w| w[0] >= w[1]) {
        return Err("children not in canonical order");
    }
    Ok((Term::raw(trace, children), rest))
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Evaluation context for one dilator, with an optional comparison memo.
pub struct FixedPoint<'a> {
    w: &'a dyn Dilator,
    memo: Option<RefCell<HashMap<(Term, Term), bool>>>,
}

impl<'a> FixedPoint<'a> {
    pub fn new(w: &'a dyn Dilator) -> Self {
        FixedPoint {
            w,
            memo: Some(RefCell::default()),
        }
    }

    pub fn without_memo(w: &'a dyn Dilator) -> Self {
        FixedPoint { w, memo: None }
    }

    pub fn dilator(&self) -> &'a dyn Dilator {
        self.w
    }

    /// `κ(trace)` where `trace` is an element over `children` in the given
    /// order (codes are child indices). Duplicates are merged and children
    /// sorted; the trace is transported accordingly.
    pub fn kappa(&self, trace: ElementCode, children: Vec<Term>) -> Result<Term, FixError> {
        let sorted: Vec<Term> = children
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: Vec<Code> = children
            .iter()
            .map(|c| sorted.binary_search(c).expect("present") as Code)
            .collect();
        let trace = self.w.act(
            &|i| index.get(i as usize).copied().unwrap_or(Code::MAX),
            &trace,
        );
        let poset = self.induced(&sorted)?;
        if !self.w.is_element(&poset, &trace) {
            return Err(FixError::NotAnElement { trace });
        }
        let supp = self.w.supp(&trace);
        if let Some(child) = (0..sorted.len()).find(|&i| !supp.contains(&(i as Code))) {
            return Err(FixError::SupportNotFull { child });
        }
        Ok(Term::raw(trace, sorted))
    }

    /// The order `term_leq` induces on distinct sorted terms.
    fn induced(&self, terms: &[Term]) -> Result<FinPoset, FixError> {
        let n = terms.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                leq[i * n + j] = i == j || self.leq(&terms[i], &terms[j])?;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(FixError::AntisymmetryBreak {
                        left: terms[i].to_string(),
                        right: terms[j].to_string(),
                    });
                }
            }
        }
        FinPoset::from_matrix(n, leq).map_err(|e| FixError::AntisymmetryBreak {
            left: e.to_string(),
            right: String::new(),
        })
    }

    /// `t ≤ u`: either `t ≤` some child of `u`, or the traces compare in
    /// `W(R)` where `R` amalgamates both child lists.
    pub fn leq(&self, t: &Term, u: &Term) -> Result<bool, FixError> {
        if t == u {
            return Ok(true);
        }
        if let Some(memo) = &self.memo {
            if let Some(&v) = memo.borrow().get(&(t.clone(), u.clone())) {
                return Ok(v);
            }
        }
        let mut result = false;
        for c in u.children() {
            if self.leq(t, c)? {
                result = true;
                break;
            }
        }
        if !result {
            let (r, st, su) = amalgamate(self.w, t, u);
            let poset = self.induced(&r)?;
            result = self
                .w
                .compare(&poset, &st, &su)
                .is_some_and(|o| o != Ordering::Greater);
        }
        if let Some(memo) = &self.memo {
            memo.borrow_mut().insert((t.clone(), u.clone()), result);
        }
        Ok(result)
    }

    /// Re-derives `t` through [`FixedPoint::kappa`] bottom-up.
    pub fn validate(&self, t: &Term) -> Result<(), FixError> {
        for c in t.children() {
            self.validate(c)?;
        }
        let rebuilt = self.kappa(t.trace().clone(), t.children().to_vec())?;
        if rebuilt != *t {
            return Err(FixError::NotAnElement {
                trace: t.trace().clone(),
            });
        }
        Ok(())
    }

    /// All normal-form terms with at most `size_budget` nodes whose labels
    /// are below `base_budget`, ordered by size, then structurally.
    pub fn enumerate(&self, size_budget: usize, base_budget: u64) -> Result<Vec<Term>, FixError> {
        let mut by_size: Vec<Vec<Term>> = vec![vec![]; size_budget + 1];
        for s in 1..=size_budget {
            let pool: Vec<Term> = by_size[..s].iter().flatten().cloned().collect();
            let mut found = BTreeSet::new();
            let mut chosen = vec![];
            self.child_sets(&pool, 0, s - 1, &mut chosen, &mut |children| {
                let poset = self.induced(children)?;
                let k = children.len();
                let cap = (base_budget as usize + k + 1).pow(2) + 1;
                for e in self.w.elements(&poset, &poset.points(), cap) {
                    if e.label.is_some_and(|l| l >= base_budget) || self.w.supp(&e).len() != k {
                        continue;
                    }
                    found.insert(Term::raw(e, children.to_vec()));
                }
                Ok(())
            })?;
            by_size[s] = found.into_iter().collect();
        }
        Ok(by_size.into_iter().flatten().collect())
    }

    /// Calls `emit` on every increasing list from `pool[start..]` whose sizes sum to `rest`.
    fn child_sets(
        &self,
        pool: &[Term],
        start: usize,
        rest: usize,
        chosen: &mut Vec<Term>,
        emit: &mut dyn FnMut(&[Term]) -> Result<(), FixError>,
    ) -> Result<(), FixError> {
        if rest == 0 {
            return emit(chosen);
        }
        for i in start..pool.len() {
            if pool[i].size() > rest {
                continue;
            }
            chosen.push(pool[i].clone());
            self.child_sets(pool, i + 1, rest - pool[i].size(), chosen, emit)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Sorted union of both child lists, with both traces transported into it.
fn amalgamate(w: &dyn Dilator, t: &Term, u: &Term) -> (Vec<Term>, ElementCode, ElementCode) {
    let r: Vec<Term> = t
        .children()
        .iter()
        .chain(u.children())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let transport = |x: &Term| {
        let idx: Vec<Code> = x
            .children()
            .iter()
            .map(|c| r.binary_search(c).expect("present") as Code)
            .collect();
        w.act(&|i| idx[i as usize], x.trace())
    };
    let (st, su) = (transport(t), transport(u));
    (r, st, su)
}

pub fn kappa(w: &dyn Dilator, trace: ElementCode, children: Vec<Term>) -> Result<Term, FixError> {
    FixedPoint::new(w).kappa(trace, children)
}

pub fn term_leq(w: &dyn Dilator, t: &Term, u: &Term) -> Result<bool, FixError> {
    FixedPoint::new(w).leq(t, u)
}

pub fn enumerate_terms(
    w: &dyn Dilator,
    size_budget: usize,
    base_budget: u64,
) -> Result<Vec<Term>, FixError> {
    FixedPoint::new(w).enumerate(size_budget, base_budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub left: Term,
    pub right: Term,
    /// Value of the comparator under test.
    pub lhs: bool,
    /// Value of the right-hand side of the fixed-point equation.
    pub rhs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<AxiomWitness>,
}

impl AxiomVerdict {
    pub fn is_pass(&self) -> bool {
        self.witness.is_none()
    }
}

/// An unchecked relation matrix on `0..n`.
struct Matrix {
    n: usize,
    leq: Vec<bool>,
}

impl Order for Matrix {
    type Elem = Code;

    fn compare(&self, a: &Code, b: &Code) -> Option<Ordering> {
        let (a, b) = (*a as usize, *b as usize);
        match (self.leq[a * self.n + b], self.leq[b * self.n + a]) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    fn contains(&self, a: &Code) -> bool {
        (*a as usize) < self.n
    }
}

/// Checks `t ≤ u ⟺ σ ≤_{W(R)} τ ∨ {t} ≤_fin children(u)` for every ordered
/// pair, with `R` ordered by `leq` itself.
pub fn check_fixed_point_axiom_with(
    w: &dyn Dilator,
    terms: &[Term],
    leq: &dyn Fn(&Term, &Term) -> bool,
) -> AxiomVerdict {
    let mut pairs = 0;
    for t in terms {
        for u in terms {
            pairs += 1;
            let lhs = leq(t, u);
            let rhs = u.children().iter().any(|c| leq(t, c)) || {
                let (r, st, su) = amalgamate(w, t, u);
                let n = r.len();
                let m = Matrix {
                    n,
                    leq: (0..n * n).map(|k| leq(&r[k / n], &r[k % n])).collect(),
                };
                w.compare(&m, &st, &su)
                    .is_some_and(|o| o != Ordering::Greater)
            };
            if lhs != rhs {
                return AxiomVerdict {
                    pairs,
                    witness: Some(AxiomWitness {
                        left: t.clone(),
                        right: u.clone(),
                        lhs,
                        rhs,
                    }),
                };
            }
        }
    }
    AxiomVerdict {
        pairs,
        witness: None,
    }
}

pub fn check_fixed_point_axiom(w: &dyn Dilator, terms: &[Term]) -> Result<AxiomVerdict, FixError> {
    let fp = FixedPoint::new(w);
    // surface comparison errors before handing out an infallible comparator
    for t in terms {
        for u in terms {
            fp.leq(t, u)?;
        }
    }
    Ok(check_fixed_point_axiom_with(w, terms, &|t, u| {
        fp.leq(t, u).expect("checked above")
    }))
}

/// `f(β, 0) = κ(0:β)`, `f(β, i) = κ(1(f(β, i−1)))` in the fixed point of `V_α`.
pub fn embed_alpha_times_n(
    alpha: &CodedOrder,
    n: usize,
    codes: &[Code],
) -> Result<Vec<((Code, usize), Term)>, FixError> {
    let v = Builtin::V(alpha.clone());
    let fp = FixedPoint::new(&v);
    let mut out = vec![];
    for &b in codes {
        let mut t = fp.kappa(ElementCode::new(0, Some(b), vec![]), vec![])?;
        for i in 0..n {
            if i > 0 {
                t = fp.kappa(ElementCode::new(1, None, vec![0]), vec![t])?;
            }
            out.push(((b, i), t.clone()));
        }
    }
    Ok(out)
}

/// `⟨⟩ ↦ κ(0)`, `⟨β⟩*s ↦ κ(1:β(image of s))` in the fixed point of `W_α`,
/// applied to the exponent list of each term. Fails if the images do not
/// reflect the order of `2^α` on `domain`.
pub fn embed_exp2(alpha: &CodedOrder, domain: &[Exp2Term]) -> Result<Vec<Term>, FixError> {
    let w = Builtin::W(alpha.clone());
    let fp = FixedPoint::new(&w);
    let images = domain
        .iter()
        .map(|d| {
            d.exponents()
                .iter()
                .rev()
                .try_fold(fp.kappa(ElementCode::atom(0), vec![])?, |acc, &b| {
                    fp.kappa(ElementCode::new(1, Some(b), vec![0]), vec![acc])
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (a, ia) in domain.iter().zip(&images) {
        for (b, ib) in domain.iter().zip(&images) {
            let src = exp2_compare(a, b, alpha).is_ok_and(|o| o != Ordering::Greater);
            if fp.leq(ia, ib)? && !src {
                return Err(FixError::ReflectionFailure {
                    left: a.to_string(),
                    right: b.to_string(),
                });
            }
        }
    }
    Ok(images)
}
