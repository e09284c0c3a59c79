//! Coded PO-dilators: functors on partial orders with a support
//! transformation, the builtin families `V_α`, `W_α`, `cons` and `tree2`,
//! and budgeted checkers for the dilator laws.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orders::{
    all_maps, all_posets, check_morphism, check_poset_axioms, find_good_pair, leq_fin, product_cmp,
    Code, CodedOrder, FinPoset, MorphismMode, Order,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DilatorError {
    #[error("dilator {0} needs an order parameter")]
    MissingParameter(&'static str),
    #[error("dilator {0} takes no parameter")]
    UnexpectedParameter(&'static str),
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

fn parse_err(what: &'static str, input: &str, reason: impl Into<String>) -> DilatorError {
    DilatorError::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Canonical encoding of an element of `W(X)`: a summand tag, an optional
/// label from the parameter order, and the carrier codes it mentions.
///
/// Literal form: `tag[:label][(a,b,…)]`, e.g. `0:3`, `1(2)`, `1:0(4)`, `1(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementCode {
    pub tag: u8,
    pub label: Option<Code>,
    pub args: Vec<Code>,
}

impl ElementCode {
    pub fn new(tag: u8, label: Option<Code>, args: Vec<Code>) -> Self {
        ElementCode { tag, label, args }
    }

    pub fn atom(tag: u8) -> Self {
        ElementCode::new(tag, None, vec![])
    }
}

impl fmt::Display for ElementCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        if let Some(l) = self.label {
            write!(f, ":{l}")?;
        }
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for ElementCode {
    type Err = DilatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |r: &str| parse_err("element", s, r);
        let (head, args) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| err("missing ')'"))?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse().map_err(|_| err("bad argument")))
                    .collect::<Result<Vec<Code>, _>>()?;
                (&s[..i], args)
            }
            None => (s, vec![]),
        };
        let (tag, label) = match head.split_once(':') {
            Some((t, l)) => (t, Some(l.parse().map_err(|_| err("bad label"))?)),
            None => (head, None),
        };
        let tag = tag.parse().map_err(|_| err("bad tag"))?;
        Ok(ElementCode { tag, label, args })
    }
}

impl Serialize for ElementCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A coded PO-dilator. Implementations must be pure.
///
/// The carrier `x` is any order on codes; `points` lists the carrier codes
/// available for enumeration.
pub trait Dilator: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    /// Deterministic enumeration of `W(x)`, at most `budget` elements.
    fn elements(
        &self,
        x: &dyn Order<Elem = Code>,
        points: &[Code],
        budget: usize,
    ) -> Vec<ElementCode>;

    fn compare(
        &self,
        x: &dyn Order<Elem = Code>,
        a: &ElementCode,
        b: &ElementCode,
    ) -> Option<Ordering>;

    fn is_element(&self, x: &dyn Order<Elem = Code>, a: &ElementCode) -> bool;

    /// `W(f)(a)`.
    fn act(&self, f: &dyn Fn(Code) -> Code, a: &ElementCode) -> ElementCode {
        ElementCode {
            args: a.args.iter().map(|&c| f(c)).collect(),
            ..a.clone()
        }
    }

    /// `supp(a)`, sorted and duplicate-free.
    fn supp(&self, a: &ElementCode) -> Vec<Code> {
        a.args
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

/// `W(X)` as an order on element codes.
#[derive(Clone, Copy)]
pub struct Applied<'a> {
    pub dilator: &'a dyn Dilator,
    pub carrier: &'a dyn Order<Elem = Code>,
}

impl<'a> Applied<'a> {
    pub fn new(dilator: &'a dyn Dilator, carrier: &'a dyn Order<Elem = Code>) -> Self {
        Applied { dilator, carrier }
    }
}

impl fmt::Debug for Applied<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Applied({})", self.dilator.name())
    }
}

impl Order for Applied<'_> {
    type Elem = ElementCode;

    fn compare(&self, a: &ElementCode, b: &ElementCode) -> Option<Ordering> {
        self.dilator.compare(self.carrier, a, b)
    }

    fn contains(&self, a: &ElementCode) -> bool {
        self.dilator.is_element(self.carrier, a)
    }
}

pub fn find_good_pair_in_application(
    w: &dyn Dilator,
    x: &dyn Order<Elem = Code>,
    seq: &[ElementCode],
) -> Option<(usize, usize)> {
    find_good_pair(seq, &Applied::new(w, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinKind {
    V,
    W,
    Cons,
    Tree2,
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuiltinKind::V => "V",
            BuiltinKind::W => "W",
            BuiltinKind::Cons => "cons",
            BuiltinKind::Tree2 => "tree2",
        })
    }
}

/// The builtin dilators.
///
/// * `V(α)`: `α + X`; `0:β` has empty support, `1(x)` has support `{x}`.
/// * `W(α)`, `Cons(L)`: `1 + label × X`; `0` is incomparable to every `1:β(x)`.
/// * `Tree2`: `1 + X × X` with componentwise order.
#[derive(Debug, Clone)]
pub enum Builtin {
    V(CodedOrder),
    W(CodedOrder),
    Cons(CodedOrder),
    Tree2,
}

pub fn make_builtin_dilator(
    kind: BuiltinKind,
    param: Option<CodedOrder>,
) -> Result<Builtin, DilatorError> {
    match (kind, param) {
        (BuiltinKind::V, Some(p)) => Ok(Builtin::V(p)),
        (BuiltinKind::W, Some(p)) => Ok(Builtin::W(p)),
        (BuiltinKind::Cons, Some(p)) => Ok(Builtin::Cons(p)),
        (BuiltinKind::Tree2, None) => Ok(Builtin::Tree2),
        (BuiltinKind::V, None) => Err(DilatorError::MissingParameter("V")),
        (BuiltinKind::W, None) => Err(DilatorError::MissingParameter("W")),
        (BuiltinKind::Cons, None) => Err(DilatorError::MissingParameter("cons")),
        (BuiltinKind::Tree2, Some(_)) => Err(DilatorError::UnexpectedParameter("tree2")),
    }
}

impl Builtin {
    pub fn kind(&self) -> BuiltinKind {
        match self {
            Builtin::V(_) => BuiltinKind::V,
            Builtin::W(_) => BuiltinKind::W,
            Builtin::Cons(_) => BuiltinKind::Cons,
            Builtin::Tree2 => BuiltinKind::Tree2,
        }
    }

    pub fn param(&self) -> Option<&CodedOrder> {
        match self {
            Builtin::V(p) | Builtin::W(p) | Builtin::Cons(p) => Some(p),
            Builtin::Tree2 => None,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(p) => write!(f, "{}:{p}", self.kind()),
            None => write!(f, "{}", self.kind()),
        }
    }
}

impl FromStr for Builtin {
    type Err = DilatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (s, None),
        };
        let kind = match kind {
            "V" => BuiltinKind::V,
            "W" => BuiltinKind::W,
            "cons" => BuiltinKind::Cons,
            "tree2" => BuiltinKind::Tree2,
            _ => return Err(parse_err("dilator", s, "expected V, W, cons or tree2")),
        };
        let param = rest
            .map(|r| r.parse::<CodedOrder>())
            .transpose()
            .map_err(|e| parse_err("dilator", s, e.to_string()))?;
        make_builtin_dilator(kind, param)
    }
}

/// Pairs `(i, j)` ordered by `i + j`, then `i`; at most `limit` of them.
fn diagonal(n: usize, m: usize, limit: usize) -> Vec<(usize, usize)> {
    let mut out = vec![];
    if n == 0 || m == 0 {
        return out;
    }
    for d in 0..n + m - 1 {
        for i in d.saturating_sub(m - 1)..=d.min(n - 1) {
            if out.len() == limit {
                return out;
            }
            out.push((i, d - i));
        }
    }
    out
}

impl Dilator for Builtin {
    fn name(&self) -> String {
        self.to_string()
    }

    fn elements(
        &self,
        _x: &dyn Order<Elem = Code>,
        points: &[Code],
        budget: usize,
    ) -> Vec<ElementCode> {
        match self {
            Builtin::V(alpha) => {
                let labels = alpha.enumerate(budget);
                let (mut i, mut j) = (0, 0);
                let mut out = vec![];
                while out.len() < budget && (i < labels.len() || j < points.len()) {
                    if i < labels.len() {
                        out.push(ElementCode::new(0, Some(labels[i]), vec![]));
                        i += 1;
                    }
                    if j < points.len() && out.len() < budget {
                        out.push(ElementCode::new(1, None, vec![points[j]]));
                        j += 1;
                    }
                }
                out
            }
            Builtin::W(labels) | Builtin::Cons(labels) => {
                if budget == 0 {
                    return vec![];
                }
                let labels = labels.enumerate(budget);
                let mut out = vec![ElementCode::atom(0)];
                out.extend(
                    diagonal(labels.len(), points.len(), budget - 1)
                        .into_iter()
                        .map(|(i, j)| ElementCode::new(1, Some(labels[i]), vec![points[j]])),
                );
                out
            }
            Builtin::Tree2 => {
                if budget == 0 {
                    return vec![];
                }
                let mut out = vec![ElementCode::atom(0)];
                out.extend(
                    diagonal(points.len(), points.len(), budget - 1)
                        .into_iter()
                        .map(|(i, j)| ElementCode::new(1, None, vec![points[i], points[j]])),
                );
                out
            }
        }
    }

    fn compare(
        &self,
        x: &dyn Order<Elem = Code>,
        a: &ElementCode,
        b: &ElementCode,
    ) -> Option<Ordering> {
        if !self.is_element(x, a) || !self.is_element(x, b) {
            return None;
        }
        match self {
            Builtin::V(alpha) => match (a.tag, b.tag) {
                (0, 0) => alpha.compare(&a.label?, &b.label?),
                (1, 1) => x.compare(&a.args[0], &b.args[0]),
                _ => None,
            },
            Builtin::W(labels) | Builtin::Cons(labels) => match (a.tag, b.tag) {
                (0, 0) => Some(Ordering::Equal),
                (1, 1) => product_cmp(
                    labels.compare(&a.label?, &b.label?),
                    x.compare(&a.args[0], &b.args[0]),
                ),
                _ => None,
            },
            Builtin::Tree2 => match (a.tag, b.tag) {
                (0, 0) => Some(Ordering::Equal),
                (1, 1) => product_cmp(
                    x.compare(&a.args[0], &b.args[0]),
                    x.compare(&a.args[1], &b.args[1]),
                ),
                _ => None,
            },
        }
    }

    fn is_element(&self, x: &dyn Order<Elem = Code>, a: &ElementCode) -> bool {
        let args_ok = a.args.iter().all(|c| x.contains(c));
        match (self, a.tag) {
            (Builtin::V(alpha), 0) => {
                a.args.is_empty() && a.label.is_some_and(|l| alpha.contains(&l))
            }
            (Builtin::V(_), 1) => a.label.is_none() && a.args.len() == 1 && args_ok,
            (Builtin::W(_) | Builtin::Cons(_) | Builtin::Tree2, 0) => {
                a.label.is_none() && a.args.is_empty()
            }
            (Builtin::W(l) | Builtin::Cons(l), 1) => {
                a.label.is_some_and(|b| l.contains(&b)) && a.args.len() == 1 && args_ok
            }
            (Builtin::Tree2, 1) => a.label.is_none() && a.args.len() == 2 && args_ok,
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Law checking

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Functor,
    Naturality,
    SupportCondition,
    Normal,
    Unary,
    Monotone,
}

impl Law {
    pub const ALL: [Law; 6] = [
        Law::Functor,
        Law::Naturality,
        Law::SupportCondition,
        Law::Normal,
        Law::Unary,
        Law::Monotone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Law::Functor => "functor",
            Law::Naturality => "naturality",
            Law::SupportCondition => "support_condition",
            Law::Normal => "normal",
            Law::Unary => "unary",
            Law::Monotone => "monotone",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Law {
    type Err = DilatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Law::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| parse_err("law", s, "unknown law"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawBudget {
    pub max_poset_size: usize,
    pub max_elements: usize,
    /// Morphisms between posets up to this size are checked exhaustively.
    pub exhaustive_morphism_size: usize,
    pub sampled_morphisms: usize,
    pub seed: u64,
}

impl Default for LawBudget {
    fn default() -> Self {
        LawBudget {
            max_poset_size: 3,
            max_elements: 64,
            exhaustive_morphism_size: 2,
            sampled_morphisms: 256,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawStatus {
    Pass,
    Fail,
}

/// A concrete counterexample; [`Witness::replay`] re-checks it from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `W(id)(σ) ≠ σ`.
    Identity { x: FinPoset, sigma: ElementCode },
    /// `W(g∘f)(σ) ≠ W(g)(W(f)(σ))`.
    Composition {
        f: Vec<Code>,
        g: Vec<Code>,
        sigma: ElementCode,
    },
    /// `W(f)(σ)` is not an element of `W(Y)`.
    LeavesCodomain {
        y: FinPoset,
        f: Vec<Code>,
        sigma: ElementCode,
    },
    /// `f` is a quasi embedding (or embedding, if `full`) but `W(f)` fails
    /// to reflect (`reflection`) or preserve the order at `(σ, τ)`.
    Morphism {
        x: FinPoset,
        y: FinPoset,
        f: Vec<Code>,
        full: bool,
        reflection: bool,
        sigma: ElementCode,
        tau: ElementCode,
    },
    /// `W(X)` violates a partial-order axiom on these elements.
    NotAPoset {
        x: FinPoset,
        elements: Vec<ElementCode>,
    },
    /// `supp(W(f)(σ)) ≠ f[supp(σ)]`.
    Naturality { f: Vec<Code>, sigma: ElementCode },
    /// `f` is an embedding and `supp(τ) ⊆ rng(f)`, yet `τ ∉ rng(W(f))`
    /// (or `τ = W(f)(σ)` with support outside `rng(f)`, if `sigma` is set).
    SupportCondition {
        x: FinPoset,
        y: FinPoset,
        f: Vec<Code>,
        tau: ElementCode,
        sigma: Option<ElementCode>,
    },
    /// `σ ≤ τ` in `W(X)` but `supp(σ) ≰_fin supp(τ)`.
    Normal {
        x: FinPoset,
        sigma: ElementCode,
        tau: ElementCode,
    },
    /// `|supp(σ)| > 1`.
    Unary { x: FinPoset, sigma: ElementCode },
    /// `f ≤ g` pointwise, both quasi embeddings, but `W(f)(σ) ≰ W(g)(σ)`.
    Monotone {
        x: FinPoset,
        y: FinPoset,
        f: Vec<Code>,
        g: Vec<Code>,
        sigma: ElementCode,
    },
}

fn as_fn(f: &[Code]) -> impl Fn(Code) -> Code + '_ {
    move |c| f[c as usize]
}

fn is_morphism(x: &FinPoset, y: &FinPoset, f: &[Code], mode: MorphismMode) -> bool {
    f.len() == x.size()
        && f.iter().all(|c| y.contains(c))
        && check_morphism(
            x,
            &x.points(),
            y,
            &f.iter().map(|&c| Some(c)).collect::<Vec<_>>(),
            mode,
        )
        .is_ok_and(|v| v.is_pass())
}

impl Witness {
    /// `true` iff the recorded violation still occurs for `w`.
    pub fn replay(&self, w: &dyn Dilator) -> bool {
        match self {
            Witness::Identity { x, sigma } => {
                w.is_element(x, sigma) && w.act(&|c| c, sigma) != *sigma
            }
            Witness::Composition { f, g, sigma } => {
                let valid = sigma.args.iter().all(|&c| (c as usize) < f.len())
                    && f.iter().all(|&c| (c as usize) < g.len());
                valid && {
                    let gf: Vec<Code> = f.iter().map(|&c| g[c as usize]).collect();
                    let direct = w.act(&as_fn(&gf), sigma);
                    direct != w.act(&as_fn(g), &w.act(&as_fn(f), sigma))
                }
            }
            Witness::LeavesCodomain { y, f, sigma } => !w.is_element(y, &w.act(&as_fn(f), sigma)),
            Witness::Morphism {
                x,
                y,
                f,
                full,
                reflection,
                sigma,
                tau,
            } => {
                let mode = if *full {
                    MorphismMode::Full
                } else {
                    MorphismMode::Quasi
                };
                if !is_morphism(x, y, f, mode) || !w.is_element(x, sigma) || !w.is_element(x, tau) {
                    return false;
                }
                let src = Applied::new(w, x).leq(sigma, tau);
                let dst = Applied::new(w, y).leq(&w.act(&as_fn(f), sigma), &w.act(&as_fn(f), tau));
                if *reflection {
                    dst && !src
                } else {
                    src && !dst
                }
            }
            Witness::NotAPoset { x, elements } => {
                check_poset_axioms(&Applied::new(w, x), elements).is_err()
            }
            Witness::Naturality { f, sigma } => {
                let image: BTreeSet<Code> = w.supp(sigma).iter().map(|&c| f[c as usize]).collect();
                let supp: BTreeSet<Code> = w.supp(&w.act(&as_fn(f), sigma)).into_iter().collect();
                image != supp
            }
            Witness::SupportCondition {
                x,
                y,
                f,
                tau,
                sigma,
            } => {
                if !is_morphism(x, y, f, MorphismMode::Full) {
                    return false;
                }
                match sigma {
                    Some(s) => {
                        w.is_element(x, s)
                            && w.act(&as_fn(f), s) == *tau
                            && !w.supp(tau).iter().all(|c| f.contains(c))
                    }
                    None => {
                        w.is_element(y, tau)
                            && w.supp(tau).iter().all(|c| f.contains(c))
                            && pullback(w, x, f, tau).is_none()
                    }
                }
            }
            Witness::Normal { x, sigma, tau } => {
                let a = Applied::new(w, x);
                a.contains(sigma)
                    && a.contains(tau)
                    && a.leq(sigma, tau)
                    && !leq_fin(&w.supp(sigma), &w.supp(tau), x)
            }
            Witness::Unary { x, sigma } => w.is_element(x, sigma) && w.supp(sigma).len() > 1,
            Witness::Monotone { x, y, f, g, sigma } => {
                is_morphism(x, y, f, MorphismMode::Quasi)
                    && is_morphism(x, y, g, MorphismMode::Quasi)
                    && f.iter().zip(g).all(|(a, b)| y.le(*a, *b))
                    && w.is_element(x, sigma)
                    && !Applied::new(w, y).leq(&w.act(&as_fn(f), sigma), &w.act(&as_fn(g), sigma))
            }
        }
    }
}

/// Searches `W(X)` for a preimage of `tau` under `W(f)`, first among the
/// enumerated elements, then by pulling the support of `tau` back along `f`.
fn pullback(w: &dyn Dilator, x: &FinPoset, f: &[Code], tau: &ElementCode) -> Option<ElementCode> {
    let found = w
        .elements(x, &x.points(), usize::MAX)
        .into_iter()
        .find(|s| w.act(&as_fn(f), s) == *tau);
    found.or_else(|| {
        let args = tau
            .args
            .iter()
            .map(|c| f.iter().position(|d| d == c).map(|i| i as Code))
            .collect::<Option<Vec<_>>>()?;
        let s = ElementCode {
            args,
            ..tau.clone()
        };
        (w.is_element(x, &s) && w.act(&as_fn(f), &s) == *tau).then_some(s)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawVerdict {
    pub law: Law,
    pub status: LawStatus,
    /// `false` when the budget truncated an enumeration or morphisms were sampled.
    pub exhaustive: bool,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl LawVerdict {
    pub fn is_pass(&self) -> bool {
        self.status == LawStatus::Pass
    }
}

struct Carrier {
    poset: FinPoset,
    elems: Vec<ElementCode>,
    truncated: bool,
}

/// Posets, their applications, and the morphisms the budget allows.
struct Instances {
    carriers: Vec<Carrier>,
    /// `(domain index, codomain index, map)`
    maps: Vec<(usize, usize, Vec<Code>)>,
    sampled: bool,
}

impl Instances {
    fn new(w: &dyn Dilator, budget: &LawBudget) -> Self {
        let carriers: Vec<Carrier> = all_posets(budget.max_poset_size)
            .into_iter()
            .map(|poset| {
                let mut elems = w.elements(&poset, &poset.points(), budget.max_elements + 1);
                let truncated = elems.len() > budget.max_elements;
                elems.truncate(budget.max_elements);
                Carrier {
                    poset,
                    elems,
                    truncated,
                }
            })
            .collect();
        let small: Vec<usize> = (0..carriers.len())
            .filter(|&i| carriers[i].poset.size() <= budget.exhaustive_morphism_size)
            .collect();
        let mut maps = vec![];
        for &i in &small {
            for &j in &small {
                for f in all_maps(carriers[i].poset.size(), carriers[j].poset.size()) {
                    maps.push((i, j, f));
                }
            }
        }
        let sampled = small.len() < carriers.len();
        if sampled {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            let large: Vec<usize> = (0..carriers.len()).filter(|i| !small.contains(i)).collect();
            for _ in 0..budget.sampled_morphisms {
                // at least one side beyond the exhaustive range
                let (i, j) = if rng.gen_bool(0.5) {
                    (
                        *large.choose(&mut rng).unwrap(),
                        rng.gen_range(0..carriers.len()),
                    )
                } else {
                    (
                        rng.gen_range(0..carriers.len()),
                        *large.choose(&mut rng).unwrap(),
                    )
                };
                let (n, m) = (carriers[i].poset.size(), carriers[j].poset.size());
                if n > 0 && m == 0 {
                    continue;
                }
                let f = (0..n).map(|_| rng.gen_range(0..m as Code)).collect();
                maps.push((i, j, f));
            }
        }
        Instances {
            carriers,
            maps,
            sampled,
        }
    }

    fn truncated(&self) -> bool {
        self.carriers.iter().any(|c| c.truncated)
    }
}

struct Outcome {
    instances: usize,
    witness: Option<Witness>,
    complete: bool,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            instances: 0,
            witness: None,
            complete: true,
        }
    }
}

/// Runs the requested law checks. Verdicts come back in the order of `laws`.
pub fn check_dilator_laws(w: &dyn Dilator, laws: &[Law], budget: &LawBudget) -> Vec<LawVerdict> {
    let inst = Instances::new(w, budget);
    laws.iter()
        .map(|&law| {
            let out = match law {
                Law::Functor => check_functor(w, &inst),
                Law::Naturality => check_naturality(w, &inst),
                Law::SupportCondition => check_support_condition(w, &inst),
                Law::Normal => check_normal(w, &inst),
                Law::Unary => check_unary(w, &inst),
                Law::Monotone => check_monotone(w, &inst),
            };
            LawVerdict {
                law,
                status: if out.witness.is_some() {
                    LawStatus::Fail
                } else {
                    LawStatus::Pass
                },
                exhaustive: out.complete && !inst.truncated() && !inst.sampled,
                instances: out.instances,
                witness: out.witness,
            }
        })
        .collect()
}

fn check_functor(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    for c in &inst.carriers {
        for s in &c.elems {
            out.instances += 1;
            if w.act(&|x| x, s) != *s {
                out.witness = Some(Witness::Identity {
                    x: c.poset.clone(),
                    sigma: s.clone(),
                });
                return out;
            }
        }
        out.instances += 1;
        if let Err(_e) = check_poset_axioms(&Applied::new(w, &c.poset), &c.elems) {
            out.witness = Some(Witness::NotAPoset {
                x: c.poset.clone(),
                elements: c.elems.clone(),
            });
            return out;
        }
    }
    for (i, j, f) in &inst.maps {
        let (x, y) = (&inst.carriers[*i], &inst.carriers[*j]);
        let fx = as_fn(f);
        let image: Vec<ElementCode> = x.elems.iter().map(|s| w.act(&fx, s)).collect();
        for (s, t) in x.elems.iter().zip(&image) {
            out.instances += 1;
            if !w.is_element(&y.poset, t) {
                out.witness = Some(Witness::LeavesCodomain {
                    y: y.poset.clone(),
                    f: f.clone(),
                    sigma: s.clone(),
                });
                return out;
            }
        }
        for (mode, full) in [(MorphismMode::Quasi, false), (MorphismMode::Full, true)] {
            if !is_morphism(&x.poset, &y.poset, f, mode) {
                continue;
            }
            out.instances += 1;
            let image: Vec<Option<ElementCode>> = image.iter().cloned().map(Some).collect();
            let verdict = check_morphism(
                &Applied::new(w, &x.poset),
                &x.elems,
                &Applied::new(w, &y.poset),
                &image,
                mode,
            );
            if let Ok(crate::orders::MorphismVerdict::Fail {
                witness: (a, b),
                reflection,
            }) = verdict
            {
                out.witness = Some(Witness::Morphism {
                    x: x.poset.clone(),
                    y: y.poset.clone(),
                    f: f.clone(),
                    full,
                    reflection,
                    sigma: x.elems[a].clone(),
                    tau: x.elems[b].clone(),
                });
                return out;
            }
        }
    }
    // composition over every composable pair of enumerated maps
    for (i, j, f) in &inst.maps {
        for (j2, _k, g) in &inst.maps {
            if j != j2 {
                continue;
            }
            let gf: Vec<Code> = f.iter().map(|&c| g[c as usize]).collect();
            for s in &inst.carriers[*i].elems {
                out.instances += 1;
                if w.act(&as_fn(&gf), s) != w.act(&as_fn(g), &w.act(&as_fn(f), s)) {
                    out.witness = Some(Witness::Composition {
                        f: f.clone(),
                        g: g.clone(),
                        sigma: s.clone(),
                    });
                    return out;
                }
            }
        }
    }
    out
}

fn check_naturality(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    for (i, _j, f) in &inst.maps {
        for s in &inst.carriers[*i].elems {
            out.instances += 1;
            let witness = Witness::Naturality {
                f: f.clone(),
                sigma: s.clone(),
            };
            if witness.replay(w) {
                out.witness = Some(witness);
                return out;
            }
        }
    }
    out
}

fn check_support_condition(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    for (i, j, f) in &inst.maps {
        let (x, y) = (&inst.carriers[*i], &inst.carriers[*j]);
        if !is_morphism(&x.poset, &y.poset, f, MorphismMode::Full) {
            continue;
        }
        for s in &x.elems {
            out.instances += 1;
            let t = w.act(&as_fn(f), s);
            if !w.supp(&t).iter().all(|c| f.contains(c)) {
                out.witness = Some(Witness::SupportCondition {
                    x: x.poset.clone(),
                    y: y.poset.clone(),
                    f: f.clone(),
                    tau: t,
                    sigma: Some(s.clone()),
                });
                return out;
            }
        }
        for t in &y.elems {
            if !w.supp(t).iter().all(|c| f.contains(c)) {
                continue;
            }
            out.instances += 1;
            if x.elems.iter().any(|s| w.act(&as_fn(f), s) == *t) {
                continue;
            }
            if pullback(w, &x.poset, f, t).is_none() {
                out.witness = Some(Witness::SupportCondition {
                    x: x.poset.clone(),
                    y: y.poset.clone(),
                    f: f.clone(),
                    tau: t.clone(),
                    sigma: None,
                });
                return out;
            }
        }
        if y.truncated {
            out.complete = false;
        }
    }
    out
}

fn check_normal(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    for c in &inst.carriers {
        let a = Applied::new(w, &c.poset);
        for s in &c.elems {
            for t in &c.elems {
                out.instances += 1;
                if a.leq(s, t) && !leq_fin(&w.supp(s), &w.supp(t), &c.poset) {
                    out.witness = Some(Witness::Normal {
                        x: c.poset.clone(),
                        sigma: s.clone(),
                        tau: t.clone(),
                    });
                    return out;
                }
            }
        }
    }
    out
}

fn check_unary(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    for c in &inst.carriers {
        for s in &c.elems {
            out.instances += 1;
            if w.supp(s).len() > 1 {
                out.witness = Some(Witness::Unary {
                    x: c.poset.clone(),
                    sigma: s.clone(),
                });
                return out;
            }
        }
    }
    out
}

fn check_monotone(w: &dyn Dilator, inst: &Instances) -> Outcome {
    let mut out = Outcome::new();
    let quasi: Vec<&(usize, usize, Vec<Code>)> = inst
        .maps
        .iter()
        .filter(|(i, j, f)| {
            is_morphism(
                &inst.carriers[*i].poset,
                &inst.carriers[*j].poset,
                f,
                MorphismMode::Quasi,
            )
        })
        .collect();
    for (i, j, f) in &quasi {
        for (i2, j2, g) in &quasi {
            if i != i2 || j != j2 {
                continue;
            }
            let (x, y) = (&inst.carriers[*i], &inst.carriers[*j]);
            if !f.iter().zip(g).all(|(a, b)| y.poset.le(*a, *b)) {
                continue;
            }
            let ay = Applied::new(w, &y.poset);
            for s in &x.elems {
                out.instances += 1;
                if !ay.leq(&w.act(&as_fn(f), s), &w.act(&as_fn(g), s)) {
                    out.witness = Some(Witness::Monotone {
                        x: x.poset.clone(),
                        y: y.poset.clone(),
                        f: f.clone(),
                        g: g.clone(),
                        sigma: s.clone(),
                    });
                    return out;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pass(w: &dyn Dilator) -> Vec<LawVerdict> {
        check_dilator_laws(w, &Law::ALL, &LawBudget::default())
    }

    #[test]
    fn element_literals_round_trip() {
        for s in ["0", "0:3", "1(2)", "1:0(4)", "1(0,1)"] {
            let e: ElementCode = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert!("1(".parse::<ElementCode>().is_err());
        assert!("x".parse::<ElementCode>().is_err());
    }

    #[test]
    fn spec_strings() {
        let w: Builtin = "W:finite:2".parse().unwrap();
        assert_eq!(w.kind(), BuiltinKind::W);
        assert_eq!(w.to_string(), "W:finite:2");
        assert!(matches!("tree2".parse::<Builtin>(), Ok(Builtin::Tree2)));
        assert_eq!(
            "V".parse::<Builtin>().unwrap_err(),
            DilatorError::MissingParameter("V")
        );
        assert!("tree3".parse::<Builtin>().is_err());
        assert!(matches!(
            make_builtin_dilator(BuiltinKind::Tree2, Some(CodedOrder::Omega)),
            Err(DilatorError::UnexpectedParameter(_))
        ));
    }

    #[test]
    fn v_over_omega_on_empty_poset() {
        let v = Builtin::V(CodedOrder::Omega);
        let empty = FinPoset::antichain(0);
        let els = v.elements(&empty, &[], 10);
        assert_eq!(els.len(), 10);
        for (b, e) in els.iter().enumerate() {
            assert_eq!(*e, ElementCode::new(0, Some(b as Code), vec![]));
            assert!(v.supp(e).is_empty());
        }
    }

    #[test]
    fn w_over_one_point() {
        let w = Builtin::W(CodedOrder::Finite(1));
        let p = FinPoset::chain(1);
        let els = w.elements(&p, &p.points(), 64);
        assert_eq!(els.len(), 2);
        assert_eq!(els[0].to_string(), "0");
        assert_eq!(els[1].to_string(), "1:0(0)");
        assert_eq!(w.compare(&p, &els[0], &els[1]), None);
    }

    #[test]
    fn tree2_pair_has_two_point_support() {
        let t = Builtin::Tree2;
        let p = FinPoset::antichain(2);
        let e = ElementCode::new(1, None, vec![0, 1]);
        assert!(t.is_element(&p, &e));
        assert_eq!(t.supp(&e), vec![0, 1]);
        assert_eq!(t.elements(&p, &p.points(), 64).len(), 5);
    }

    #[test]
    fn diagonal_covers_rectangle_once() {
        let d = diagonal(3, 2, usize::MAX);
        assert_eq!(d.len(), 6);
        assert_eq!(d.iter().collect::<BTreeSet<_>>().len(), 6);
        assert_eq!(d[..3], [(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn v_finite_two_satisfies_all_laws() {
        let v = Builtin::V(CodedOrder::Finite(2));
        for verdict in all_pass(&v) {
            assert!(verdict.is_pass(), "{verdict:?}");
            assert!(verdict.instances > 0);
        }
    }

    #[test]
    fn builtins_pass_everything_but_tree2_unary() {
        for w in [
            Builtin::W(CodedOrder::Finite(2)),
            Builtin::Cons(CodedOrder::antichain(2)),
            Builtin::Tree2,
            Builtin::V(CodedOrder::Omega),
        ] {
            for verdict in all_pass(&w) {
                let expect_fail = matches!(w, Builtin::Tree2) && verdict.law == Law::Unary;
                assert_eq!(verdict.is_pass(), !expect_fail, "{w}: {verdict:?}");
            }
        }
    }

    #[test]
    fn tree2_unary_witness_replays() {
        let v = check_dilator_laws(&Builtin::Tree2, &[Law::Unary], &LawBudget::default());
        let witness = v[0].witness.clone().unwrap();
        match &witness {
            Witness::Unary { sigma, .. } => assert_eq!(Builtin::Tree2.supp(sigma).len(), 2),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(witness.replay(&Builtin::Tree2));
        let json = serde_json::to_string(&witness).unwrap();
        let back: Witness = serde_json::from_str(&json).unwrap();
        assert_eq!(back, witness);
    }

    #[test]
    fn truncation_is_reported() {
        let v = check_dilator_laws(
            &Builtin::V(CodedOrder::Omega),
            &[Law::Unary],
            &LawBudget::default(),
        );
        assert!(v[0].is_pass());
        assert!(!v[0].exhaustive);
        let budget = LawBudget {
            max_poset_size: 2,
            ..LawBudget::default()
        };
        let v = check_dilator_laws(&Builtin::W(CodedOrder::Finite(2)), &[Law::Normal], &budget);
        assert!(v[0].exhaustive);
    }

    #[test]
    fn applied_orders_are_posets_on_small_carriers() {
        for w in [
            Builtin::V(CodedOrder::Finite(2)),
            Builtin::W(CodedOrder::Finite(2)),
            Builtin::Cons(CodedOrder::antichain(2)),
            Builtin::Tree2,
        ] {
            for p in all_posets(3) {
                let els = w.elements(&p, &p.points(), 256);
                assert!(check_poset_axioms(&Applied::new(&w, &p), &els).is_ok());
            }
        }
    }

    #[test]
    fn good_pairs_in_applications() {
        let w = Builtin::W(CodedOrder::Omega);
        let rev = CodedOrder::OmegaRev;
        let seq: Vec<ElementCode> = (0..100)
            .map(|n| ElementCode::new(1, Some(n), vec![n]))
            .collect();
        assert_eq!(find_good_pair_in_application(&w, &rev, &seq), None);
        let e = ElementCode::new(1, Some(3), vec![3]);
        assert_eq!(
            find_good_pair_in_application(&w, &rev, &[e.clone(), e]),
            Some((0, 1))
        );

        let v = Builtin::V(CodedOrder::Finite(2));
        let one = FinPoset::chain(1);
        let els = v.elements(&one, &one.points(), 64);
        assert_eq!(els.len(), 3);
        for code in 0..81u32 {
            let seq: Vec<ElementCode> = (0..4)
                .map(|k| els[(code / 3u32.pow(k) % 3) as usize].clone())
                .collect();
            assert!(find_good_pair_in_application(&v, &one, &seq).is_some());
        }
    }

    // -- fault injection ------------------------------------------------------

    #[derive(Debug)]
    enum Buggy {
        /// act ignores the morphism on the first argument
        StaleAct,
        /// 0 sits above every pair: not normal
        ZeroOnTop,
        /// supp forgets the second argument
        ShortSupport,
        /// tree2 order reversed on the second coordinate: not monotone
        Twisted,
    }

    impl Dilator for Buggy {
        fn name(&self) -> String {
            format!("{self:?}")
        }

        fn elements(&self, x: &dyn Order<Elem = Code>, p: &[Code], b: usize) -> Vec<ElementCode> {
            Builtin::Tree2.elements(x, p, b)
        }

        fn compare(
            &self,
            x: &dyn Order<Elem = Code>,
            a: &ElementCode,
            b: &ElementCode,
        ) -> Option<Ordering> {
            match self {
                Buggy::ZeroOnTop => match (a.tag, b.tag) {
                    (0, 1) => Some(Ordering::Greater),
                    (1, 0) => Some(Ordering::Less),
                    _ => Builtin::Tree2.compare(x, a, b),
                },
                Buggy::Twisted => match (a.tag, b.tag) {
                    (1, 1) => product_cmp(
                        x.compare(&a.args[0], &b.args[0]),
                        x.compare(&b.args[1], &a.args[1]),
                    ),
                    _ => Builtin::Tree2.compare(x, a, b),
                },
                _ => Builtin::Tree2.compare(x, a, b),
            }
        }

        fn is_element(&self, x: &dyn Order<Elem = Code>, a: &ElementCode) -> bool {
            Builtin::Tree2.is_element(x, a)
        }

        fn act(&self, f: &dyn Fn(Code) -> Code, a: &ElementCode) -> ElementCode {
            match self {
                Buggy::StaleAct if a.args.len() == 2 => {
                    ElementCode::new(a.tag, a.label, vec![a.args[0], f(a.args[1])])
                }
                _ => Builtin::Tree2.act(f, a),
            }
        }

        fn supp(&self, a: &ElementCode) -> Vec<Code> {
            match self {
                Buggy::ShortSupport => a.args.first().copied().into_iter().collect(),
                _ => Builtin::Tree2.supp(a),
            }
        }
    }

    fn failing(w: &Buggy) -> Vec<Law> {
        let verdicts = all_pass(w);
        for v in &verdicts {
            if let Some(wit) = &v.witness {
                assert!(wit.replay(w), "{w:?} {:?} does not replay", v.law);
                assert!(!wit.replay(&Builtin::Tree2) || v.law == Law::Unary);
            }
        }
        verdicts
            .iter()
            .filter(|v| !v.is_pass())
            .map(|v| v.law)
            .collect()
    }

    #[test]
    fn faulty_dilators_are_caught() {
        let stale = failing(&Buggy::StaleAct);
        assert!(stale.contains(&Law::Functor) && stale.contains(&Law::Naturality));
        let top = failing(&Buggy::ZeroOnTop);
        assert!(top.contains(&Law::Normal));
        let short = failing(&Buggy::ShortSupport);
        // dropping an argument commutes with every map, so only the support condition notices
        assert!(!short.contains(&Law::Naturality) && short.contains(&Law::SupportCondition));
        assert!(!short.contains(&Law::Unary));
        let twisted = failing(&Buggy::Twisted);
        assert!(twisted.contains(&Law::Monotone));
    }
}
