//! The tree `T_f` of an injective `f: ℕ∖{0} → ℕ` under the Kleene-Brouwer
//! order, weak extensions, the staged extraction of ascending sequences,
//! and the maps `g_p` into `2^{T_f}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exp2::{exp2_compare, exp2_make, Exp2Term};
use crate::orders::{kb_compare, FinSeq, Order};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TfError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("map is not injective: f({0}) = f({1}) = {2}")]
    NotInjective(u64, u64, u64),
    #[error("{seq} is not a member of the tree")]
    NotAMember { seq: FinSeq },
    #[error("no longer member within {scanned} members after index {index}; members repeat")]
    CountingBound { index: usize, scanned: usize },
    #[error("{next} is not a weak extension of {prev}")]
    NotWeakExtension { prev: FinSeq, next: FinSeq },
    #[error("budget exhausted during {stage}")]
    BudgetExhausted {
        stage: &'static str,
        partial: Box<Extraction>,
    },
    #[error("descent check failed at positions {0} and {1}")]
    NotDescending(usize, usize),
    #[error("cannot parse map {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// An injective `f` on `ℕ∖{0}`. Table maps are undefined off their table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InjectiveMap {
    /// `f(n) = a·n + b`
    Affine {
        a: u64,
        b: i64,
    },
    Table(BTreeMap<u64, u64>),
    /// `outer ∘ inner`; undefined where `inner` hits 0
    Composed(Box<InjectiveMap>, Box<InjectiveMap>),
}

impl InjectiveMap {
    pub fn affine(a: u64, b: i64) -> Result<Self, TfError> {
        if a == 0 {
            return Err(TfError::InvalidMap("affine map needs a ≥ 1".into()));
        }
        if (a as i128) + (b as i128) < 0 {
            return Err(TfError::InvalidMap(format!("f(1) = {a} + {b} is negative")));
        }
        Ok(InjectiveMap::Affine { a, b })
    }

    pub fn table(entries: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, TfError> {
        let mut map = BTreeMap::new();
        let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
        for (j, v) in entries {
            if j == 0 {
                return Err(TfError::InvalidMap("0 is not in the domain".into()));
            }
            if map.insert(j, v).is_some() {
                return Err(TfError::InvalidMap(format!("duplicate argument {j}")));
            }
            if let Some(k) = seen.insert(v, j) {
                return Err(TfError::NotInjective(k, j, v));
            }
        }
        Ok(InjectiveMap::Table(map))
    }

    /// `outer ∘ inner`, with injectivity checked on `1..=window`.
    pub fn compose(outer: InjectiveMap, inner: InjectiveMap, window: u64) -> Result<Self, TfError> {
        let f = InjectiveMap::Composed(Box::new(outer), Box::new(inner));
        f.check_injective(window)?;
        Ok(f)
    }

    pub fn check_injective(&self, window: u64) -> Result<(), TfError> {
        let mut seen = BTreeMap::new();
        for j in 1..=window {
            if let Some(v) = self.eval(j) {
                if let Some(k) = seen.insert(v, j) {
                    return Err(TfError::NotInjective(k, j, v));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        match self {
            InjectiveMap::Affine { a, b } => {
                let v = (*a as i128) * (n as i128) + (*b as i128);
                u64::try_from(v).ok()
            }
            InjectiveMap::Table(t) => t.get(&n).copied(),
            InjectiveMap::Composed(outer, inner) => outer.eval(inner.eval(n)?),
        }
    }

    /// The unique `j ≥ 1` with `f(j) = i`, if any.
    pub fn preimage(&self, i: u64) -> Option<u64> {
        match self {
            InjectiveMap::Affine { a, b } => {
                let d = i as i128 - *b as i128;
                (d > 0 && d % *a as i128 == 0).then(|| (d / *a as i128) as u64)
            }
            InjectiveMap::Table(t) => t.iter().find(|(_, &v)| v == i).map(|(&j, _)| j),
            InjectiveMap::Composed(outer, inner) => inner.preimage(outer.preimage(i)?),
        }
    }
}

impl fmt::Display for InjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectiveMap::Affine { a, b } => write!(f, "affine:{a},{b}"),
            InjectiveMap::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(j, v)| format!("{j}:{v}")).collect();
                write!(f, "table:{}", parts.join(","))
            }
            InjectiveMap::Composed(o, i) => write!(f, "compose({o};{i})"),
        }
    }
}

/// Default window for checking injectivity of parsed compositions.
pub const COMPOSE_WINDOW: u64 = 4096;

impl FromStr for InjectiveMap {
    type Err = TfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |r: &str| TfError::Parse {
            input: s.to_string(),
            reason: r.to_string(),
        };
        if let Some(rest) = s.strip_prefix("affine:") {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| err("expected affine:a,b"))?;
            let a = a.trim().parse().map_err(|_| err("bad slope"))?;
            let b = b.trim().parse().map_err(|_| err("bad offset"))?;
            return InjectiveMap::affine(a, b);
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let rest = rest.trim_start_matches('<').trim_end_matches('>');
            let entries = rest
                .split(',')
                .filter(|e| !e.trim().is_empty())
                .map(|e| {
                    let (j, v) = e.split_once(':').ok_or_else(|| err("expected j:v"))?;
                    Ok((
                        j.trim().parse().map_err(|_| err("bad argument"))?,
                        v.trim().parse().map_err(|_| err("bad value"))?,
                    ))
                })
                .collect::<Result<Vec<_>, TfError>>()?;
            return InjectiveMap::table(entries);
        }
        if let Some(rest) = s.strip_prefix("compose(").and_then(|r| r.strip_suffix(')')) {
            // split at the top-level ';'
            let mut depth = 0i32;
            let cut = rest
                .char_indices()
                .find(|&(_, c)| {
                    match c {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        _ => {}
                    }
                    c == ';' && depth == 0
                })
                .map(|(i, _)| i)
                .ok_or_else(|| err("expected compose(outer;inner)"))?;
            return InjectiveMap::compose(
                rest[..cut].parse()?,
                rest[cut + 1..].parse()?,
                COMPOSE_WINDOW,
            );
        }
        Err(err("expected affine:, table: or compose("))
    }
}

impl Serialize for InjectiveMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InjectiveMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub fn tf_member(f: &InjectiveMap, s: &[u64]) -> bool {
    let n = s.len() as u64;
    let values_ok = s
        .iter()
        .enumerate()
        .all(|(i, &x)| x == 0 || f.eval(x) == Some(i as u64));
    // every j < |s| with f(j) < |s| forces a positive entry at f(j)
    values_ok
        && (1..n).all(|j| match f.eval(j) {
            Some(i) if i < n => s[i as usize] > 0,
            _ => true,
        })
}

pub fn tf_compare(f: &InjectiveMap, s: &FinSeq, t: &FinSeq) -> Result<Ordering, TfError> {
    for x in [s, t] {
        if !tf_member(f, x) {
            return Err(TfError::NotAMember { seq: x.clone() });
        }
    }
    Ok(kb_compare(s, t))
}

/// `T_f` under the Kleene-Brouwer order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfOrder {
    pub f: InjectiveMap,
}

impl TfOrder {
    pub fn new(f: InjectiveMap) -> Self {
        TfOrder { f }
    }
}

impl Order for TfOrder {
    type Elem = FinSeq;

    fn compare(&self, a: &FinSeq, b: &FinSeq) -> Option<Ordering> {
        tf_compare(&self.f, a, b).ok()
    }

    fn contains(&self, a: &FinSeq) -> bool {
        tf_member(&self.f, a)
    }
}

/// The length-`n` member whose entry `i` is the witness `j < n` of `f(j) = i`, or 0.
pub fn tf_canonical(f: &InjectiveMap, n: usize) -> FinSeq {
    let mut s = vec![0; n];
    for j in 1..n as u64 {
        if let Some(i) = f.eval(j) {
            if i < n as u64 {
                s[i as usize] = j;
            }
        }
    }
    FinSeq(s)
}

/// `|s| ≤ |t|` and `t` keeps every positive entry of `s`.
pub fn weak_extension(s: &[u64], t: &[u64]) -> bool {
    s.len() <= t.len() && s.iter().zip(t).all(|(&a, &b)| a == 0 || a == b)
}

/// All members of `T_f`, by length and then lexicographically.
pub fn enumerate_tf(f: &InjectiveMap) -> TfMembers {
    TfMembers {
        f: f.clone(),
        len: 0,
        buffer: Vec::new().into_iter(),
    }
}

pub struct TfMembers {
    f: InjectiveMap,
    len: usize,
    buffer: std::vec::IntoIter<FinSeq>,
}

impl TfMembers {
    /// Members of one length: forced entries from the canonical member, plus
    /// each optional entry `i` whose witness is `≥ n`, tried as 0 first.
    fn of_length(f: &InjectiveMap, n: usize) -> Vec<FinSeq> {
        let canon = tf_canonical(f, n);
        let optional: Vec<(usize, u64)> = (0..n)
            .filter(|&i| canon[i] == 0)
            .filter_map(|i| f.preimage(i as u64).map(|j| (i, j)))
            .collect();
        let mut out = vec![];
        for mask in 0..1u64 << optional.len() {
            let mut s = canon.0.clone();
            for (k, &(i, j)) in optional.iter().enumerate() {
                if mask >> (optional.len() - 1 - k) & 1 == 1 {
                    s[i] = j;
                }
            }
            out.push(FinSeq(s));
        }
        out.sort();
        out
    }
}

impl Iterator for TfMembers {
    type Item = FinSeq;

    fn next(&mut self) -> Option<FinSeq> {
        loop {
            if let Some(s) = self.buffer.next() {
                return Some(s);
            }
            self.buffer = TfMembers::of_length(&self.f, self.len).into_iter();
            self.len += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractBudget {
    /// Members consumed from the input stream.
    pub max_members: usize,
    /// Length of the ascending output wanted.
    pub target: usize,
    /// Consecutive proper extensions that trigger the range branch.
    pub run_threshold: usize,
}

impl Default for ExtractBudget {
    fn default() -> Self {
        ExtractBudget {
            max_members: 20_000,
            target: 32,
            run_threshold: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DichotomyOutcome {
    /// Strictly ascending output and the stage-B indices `n` with `s^n < s^{n+1}`.
    Ascent {
        indices: Vec<usize>,
        ascending: Vec<FinSeq>,
    },
    /// A run of proper extensions starting at stage-B index `run_start`;
    /// `range` is the candidate for `rng(f) ∩ [0, bound)`.
    RangeCandidate {
        range: Vec<u64>,
        bound: u64,
        run_start: usize,
        /// Agreement with the range computed directly from `f`.
        agrees: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub stage_a: Vec<FinSeq>,
    pub stage_b: Vec<FinSeq>,
    pub outcome: Option<DichotomyOutcome>,
    pub members_read: usize,
}

pub fn direct_range(f: &InjectiveMap, bound: u64) -> Vec<u64> {
    (0..bound).filter(|&i| f.preimage(i).is_some()).collect()
}

/// Runs the staged extraction on a stream of distinct members of `T_f`.
pub fn extract_perfect_sequence(
    f: &InjectiveMap,
    members: impl IntoIterator<Item = FinSeq>,
    budget: &ExtractBudget,
) -> Result<Extraction, TfError> {
    let mut input = members.into_iter();
    let mut ex = Extraction {
        stage_a: vec![],
        stage_b: vec![],
        outcome: None,
        members_read: 0,
    };
    let exhausted = |stage, ex: &Extraction| TfError::BudgetExhausted {
        stage,
        partial: Box::new(ex.clone()),
    };

    let mut pull = |ex: &mut Extraction| -> Result<Option<FinSeq>, TfError> {
        if ex.members_read >= budget.max_members {
            return Ok(None);
        }
        match input.next() {
            Some(s) => {
                ex.members_read += 1;
                if !tf_member(f, &s) {
                    return Err(TfError::NotAMember { seq: s });
                }
                Ok(Some(s))
            }
            None => Ok(None),
        }
    };

    // stage A: extend until stage_a[k] exists, scanning forward for longer members
    let mut scanned_since = 0usize;
    let mut grow_a = |ex: &mut Extraction, k: usize| -> Result<bool, TfError> {
        while ex.stage_a.len() <= k {
            let Some(s) = pull(ex)? else {
                return Ok(false);
            };
            match ex.stage_a.last() {
                None => ex.stage_a.push(s),
                Some(last) if s.len() > last.len() => {
                    ex.stage_a.push(s);
                    scanned_since = 0;
                }
                Some(last) => {
                    scanned_since += 1;
                    // at most 2^{|s|+1} − 1 members have length ≤ |s|
                    let cap = 1usize
                        .checked_shl(last.len() as u32 + 1)
                        .unwrap_or(usize::MAX);
                    if scanned_since >= cap {
                        return Err(TfError::CountingBound {
                            index: ex.stage_a.len() - 1,
                            scanned: scanned_since,
                        });
                    }
                }
            }
        }
        Ok(true)
    };

    // stage B: g(0) = 0, g(n) = 1 + max({g(n−1)} ∪ entries of s^{g(n−1)})
    let mut g = 0usize;
    let mut run = 0usize;
    let mut run_start = 0usize;
    let mut indices = vec![];
    loop {
        if !grow_a(&mut ex, g)? {
            return Err(exhausted("stage A", &ex));
        }
        let s = ex.stage_a[g].clone();
        if let Some(prev) = ex.stage_b.last() {
            if !weak_extension(prev, &s) {
                return Err(TfError::NotWeakExtension {
                    prev: prev.clone(),
                    next: s,
                });
            }
        }
        let m = ex.stage_b.len();
        ex.stage_b.push(s.clone());
        g = 1 + s.iter().copied().max().unwrap_or(0).max(g as u64) as usize;

        // stages C/D on the pair (s^{m−1}, s^m)
        if m == 0 {
            continue;
        }
        let prev = &ex.stage_b[m - 1];
        match tf_compare(f, prev, &s)? {
            Ordering::Less => {
                indices.push(m - 1);
                run = 0;
                run_start = m;
                if indices.len() >= budget.target {
                    let ascending = indices.iter().map(|&i| ex.stage_b[i].clone()).collect();
                    ex.outcome = Some(DichotomyOutcome::Ascent { indices, ascending });
                    return Ok(ex);
                }
            }
            _ => {
                debug_assert!(s.properly_extends(prev));
                run += 1;
                if run >= budget.run_threshold {
                    ex.outcome = Some(range_candidate(f, &ex.stage_b, run_start));
                    return Ok(ex);
                }
            }
        }
    }
}

/// `X = {i : entry i of s^{max(n,i)+1} is positive}` below the last length.
fn range_candidate(f: &InjectiveMap, b: &[FinSeq], n: usize) -> DichotomyOutcome {
    let last = b.len() - 1;
    let bound = b[last].len() as u64;
    let range: Vec<u64> = (0..bound)
        .filter(|&i| {
            let k = (n.max(i as usize) + 1).min(last);
            b[k].get(i as usize).is_some_and(|&x| x > 0)
        })
        .collect();
    let agrees = range == direct_range(f, bound);
    DichotomyOutcome::RangeCandidate {
        range,
        bound,
        run_start: n,
        agrees,
    }
}

/// `g_p(s)`: each 0 in `s` contributes `2^{prefix before it}`.
pub fn gp_map(f: &InjectiveMap, p: &FinSeq, s: &FinSeq) -> Result<Exp2Term<FinSeq>, TfError> {
    let full = p.concat(s);
    if !tf_member(f, &full) {
        return Err(TfError::NotAMember { seq: full });
    }
    let mut prefix = p.clone();
    let mut exps = vec![];
    for &x in s.iter() {
        if x == 0 {
            exps.push(prefix.clone());
        }
        prefix = prefix.push(x);
    }
    // exponents of g_p(s) are strictly descending by construction
    Ok(exp2_make(exps, &TfOrder::new(f.clone())).expect("g_p yields descending exponents"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descent {
    /// `ascent` or `range`, naming the branch of the extraction used.
    pub via: String,
    pub terms: Vec<Exp2Term<FinSeq>>,
    /// `verified[i]`: `terms[i] > terms[i+1]`; all pairs are checked.
    pub verified: Vec<bool>,
}

/// A strictly descending sequence of `length` terms in `2^{T_f}`.
pub fn descending_in_exp2(
    f: &InjectiveMap,
    length: usize,
    budget: &ExtractBudget,
) -> Result<Descent, TfError> {
    let budget = ExtractBudget {
        target: length,
        run_threshold: budget.run_threshold.max(length),
        ..*budget
    };
    let ex = extract_perfect_sequence(f, enumerate_tf(f), &budget)?;
    let (via, terms) = match ex.outcome.expect("extraction finished") {
        DichotomyOutcome::Ascent { ascending, .. } => (
            "ascent",
            ascending
                .iter()
                .map(|s| gp_map(f, &FinSeq::empty(), s))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        DichotomyOutcome::RangeCandidate { range, .. } => {
            // s^n has length n and carries the witness of i exactly when i ∈ X
            let x: BTreeSet<u64> = range.into_iter().collect();
            let order = TfOrder::new(f.clone());
            let terms = (0..length)
                .map(|n| {
                    let s = FinSeq(
                        (0..n as u64)
                            .map(|i| {
                                if x.contains(&i) {
                                    f.preimage(i).unwrap_or(0)
                                } else {
                                    0
                                }
                            })
                            .collect(),
                    );
                    exp2_make(vec![s.clone()], &order).map_err(|_| TfError::NotAMember { seq: s })
                })
                .collect::<Result<Vec<_>, _>>()?;
            ("range", terms)
        }
    };
    let order = TfOrder::new(f.clone());
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if exp2_compare(&terms[i], &terms[j], &order) != Ok(Ordering::Greater) {
                return Err(TfError::NotDescending(i, j));
            }
        }
    }
    let verified = terms
        .windows(2)
        .map(|w| exp2_compare(&w[0], &w[1], &order) == Ok(Ordering::Greater))
        .collect();
    Ok(Descent {
        via: via.to_string(),
        terms,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> FinSeq {
        s.parse().unwrap()
    }

    fn double() -> InjectiveMap {
        InjectiveMap::affine(2, 0).unwrap()
    }

    fn shift() -> InjectiveMap {
        InjectiveMap::affine(1, -1).unwrap()
    }

    /// Membership by brute force over both conditions as stated.
    fn member_oracle(f: &InjectiveMap, s: &[u64]) -> bool {
        let n = s.len();
        let i_ok = (0..n).all(|i| s[i] == 0 || f.eval(s[i]) == Some(i as u64));
        let ii_ok = (0..n).all(|i| {
            let forced = (1..n as u64).any(|j| f.eval(j) == Some(i as u64));
            !forced || s[i] > 0
        });
        i_ok && ii_ok
    }

    #[test]
    fn membership_examples() {
        let f = double();
        assert!(tf_member(&f, &[]));
        assert!(tf_member(&f, &seq("0")));
        assert!(!tf_member(&f, &seq("0.3")));
    }

    #[test]
    fn membership_matches_oracle() {
        let maps = [
            double(),
            shift(),
            InjectiveMap::table([(1, 3), (2, 0), (5, 1)]).unwrap(),
        ];
        for f in &maps {
            for len in 0..=4u32 {
                for code in 0..6u64.pow(len) {
                    let s: Vec<u64> = (0..len).map(|k| code / 6u64.pow(k) % 6).collect();
                    assert_eq!(tf_member(f, &s), member_oracle(f, &s), "{f} {s:?}");
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let f = double();
        assert_eq!(tf_canonical(&f, 0), FinSeq::empty());
        assert_eq!(tf_canonical(&f, 3), seq("0.0.1"));
        assert_eq!(tf_canonical(&f, 5), seq("0.0.1.0.2"));
        for n in 0..64 {
            let c = tf_canonical(&f, n);
            assert!(tf_member(&f, &c));
            if n > 0 {
                assert!(c.properly_extends(&tf_canonical(&f, n - 1)));
            }
        }
        assert_eq!(
            tf_compare(&f, &tf_canonical(&f, 3), &tf_canonical(&f, 2)),
            Ok(Ordering::Less)
        );
    }

    #[test]
    fn compare_examples() {
        let f = double();
        let s = seq("0.0.1");
        assert_eq!(tf_compare(&f, &s, &s), Ok(Ordering::Equal));
        assert_eq!(
            tf_compare(&f, &seq("0"), &FinSeq::empty()),
            Ok(Ordering::Less)
        );
        assert_eq!(
            tf_compare(&f, &seq("0.3"), &s),
            Err(TfError::NotAMember { seq: seq("0.3") })
        );
    }

    #[test]
    fn weak_extension_examples() {
        let s = seq("0.0.1");
        assert!(weak_extension(&s, &s));
        assert!(weak_extension(&s, &seq("0.5.1.0")));
        assert!(!weak_extension(&seq("2"), &seq("3.0")));
        assert!(!weak_extension(&seq("0.0"), &seq("0")));
    }

    #[test]
    fn map_specs() {
        assert_eq!("affine:2,0".parse::<InjectiveMap>().unwrap(), double());
        assert_eq!(shift().to_string(), "affine:1,-1");
        let t: InjectiveMap = "table:1:0,2:5".parse().unwrap();
        assert_eq!(t.eval(2), Some(5));
        assert_eq!(t.eval(3), None);
        assert_eq!("table:<1:0,2:5>".parse::<InjectiveMap>().unwrap(), t);
        assert_eq!(t.to_string().parse::<InjectiveMap>().unwrap(), t);
        assert!(matches!(
            "table:1:0,2:0".parse::<InjectiveMap>(),
            Err(TfError::NotInjective(1, 2, 0))
        ));
        assert!("affine:0,1".parse::<InjectiveMap>().is_err());
        assert!("affine:1,-2".parse::<InjectiveMap>().is_err());
        let c: InjectiveMap = "compose(affine:2,0;affine:1,1)".parse().unwrap();
        assert_eq!(c.eval(3), Some(8));
        assert_eq!(c.preimage(8), Some(3));
        assert_eq!(c.preimage(4), Some(1));
        assert_eq!(c.preimage(2), None);
        assert_eq!(c.to_string().parse::<InjectiveMap>().unwrap(), c);
        assert_eq!(shift().preimage(0), Some(1));
        assert_eq!(double().preimage(3), None);
    }

    #[test]
    fn enumeration_is_sorted_and_complete() {
        for f in [
            double(),
            shift(),
            InjectiveMap::table([(4, 1), (1, 2)]).unwrap(),
        ] {
            let listed: Vec<FinSeq> = enumerate_tf(&f).take_while(|s| s.len() <= 4).collect();
            for w in listed.windows(2) {
                assert!((w[0].len(), &w[0]) < (w[1].len(), &w[1]));
            }
            let mut brute = vec![];
            for len in 0..=4u32 {
                for code in 0..6u64.pow(len) {
                    let s: Vec<u64> = (0..len).map(|k| code / 6u64.pow(k) % 6).collect();
                    if member_oracle(&f, &s) {
                        brute.push(FinSeq(s));
                    }
                }
            }
            brute.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            assert_eq!(listed, brute, "{f}");
        }
        let firsts: Vec<String> = enumerate_tf(&shift())
            .take(5)
            .map(|s| s.to_string())
            .collect();
        assert_eq!(firsts, ["<>", "0", "1", "1.0", "1.2"]);
    }

    #[test]
    fn doubling_yields_a_range_candidate() {
        // one member per length, each a proper extension of the last: no ascent exists
        let f = double();
        let ex = extract_perfect_sequence(&f, enumerate_tf(&f), &ExtractBudget::default()).unwrap();
        match ex.outcome.unwrap() {
            DichotomyOutcome::RangeCandidate {
                range,
                bound,
                agrees,
                ..
            } => {
                assert!(agrees);
                let evens: Vec<u64> = (2..bound).filter(|i| i % 2 == 0).collect();
                assert_eq!(range, evens);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shift_yields_ascents() {
        let f = shift();
        let budget = ExtractBudget {
            target: 32,
            ..ExtractBudget::default()
        };
        let ex = extract_perfect_sequence(&f, enumerate_tf(&f), &budget).unwrap();
        let Some(DichotomyOutcome::Ascent { indices, ascending }) = ex.outcome else {
            panic!("expected ascent");
        };
        assert_eq!(ascending.len(), 32);
        for &i in &indices {
            assert_eq!(
                tf_compare(&f, &ex.stage_b[i], &ex.stage_b[i + 1]),
                Ok(Ordering::Less)
            );
        }
        for i in 0..ascending.len() {
            for j in i + 1..ascending.len() {
                assert_eq!(
                    tf_compare(&f, &ascending[i], &ascending[j]),
                    Ok(Ordering::Less)
                );
            }
        }
        for w in ex.stage_a.windows(2) {
            assert!(w[0].len() < w[1].len());
        }
        for w in ex.stage_b.windows(2) {
            assert!(weak_extension(&w[0], &w[1]));
        }
    }

    #[test]
    fn finite_table_bijection_gives_its_range() {
        // f(j) = j − 1 on 1..=10, undefined beyond
        let f = InjectiveMap::table((1..=10).map(|j| (j, j - 1))).unwrap();
        let budget = ExtractBudget {
            run_threshold: 40,
            ..ExtractBudget::default()
        };
        let ex = extract_perfect_sequence(&f, enumerate_tf(&f), &budget).unwrap();
        match ex.outcome.unwrap() {
            DichotomyOutcome::RangeCandidate { range, agrees, .. } => {
                assert!(agrees);
                assert_eq!(range, (0..10).collect::<Vec<_>>());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stages_are_identity_on_perfect_input() {
        let f = double();
        let chain: Vec<FinSeq> = (0..80).map(|n| tf_canonical(&f, n)).collect();
        let ex = extract_perfect_sequence(&f, chain.clone(), &ExtractBudget::default()).unwrap();
        assert_eq!(ex.stage_a, chain[..ex.stage_a.len()]);
        assert_eq!(ex.stage_b, ex.stage_a[..ex.stage_b.len()]);
    }

    #[test]
    fn extraction_errors() {
        let f = double();
        let tiny = ExtractBudget {
            max_members: 5,
            ..ExtractBudget::default()
        };
        match extract_perfect_sequence(&f, enumerate_tf(&f), &tiny) {
            Err(TfError::BudgetExhausted { partial, .. }) => assert_eq!(partial.members_read, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            extract_perfect_sequence(&f, vec![seq("0.3")], &tiny),
            Err(TfError::NotAMember { .. })
        ));
        let repeats = std::iter::repeat_n(seq("0"), 100);
        assert!(matches!(
            extract_perfect_sequence(&f, repeats, &ExtractBudget::default()),
            Err(TfError::CountingBound { .. })
        ));
    }

    #[test]
    fn gp_examples() {
        let f = double();
        let e = FinSeq::empty();
        assert!(gp_map(&f, &e, &e).unwrap().is_zero());
        assert_eq!(gp_map(&f, &e, &seq("0")).unwrap().to_string(), "2^<>");
        let t = gp_map(&f, &e, &seq("0.0")).unwrap();
        assert_eq!(t.exponents(), &[e.clone(), seq("0")]);
        assert_eq!(t.to_string(), "2^<>+2^0");
        assert!(matches!(
            gp_map(&f, &e, &seq("0.3")),
            Err(TfError::NotAMember { .. })
        ));
    }

    #[test]
    fn descents() {
        let f = double();
        for length in [1, 8, 64] {
            let d = descending_in_exp2(&f, length, &ExtractBudget::default()).unwrap();
            assert_eq!(d.terms.len(), length);
            assert_eq!(d.via, "range");
            assert!(d.verified.iter().all(|&b| b));
        }
        let d = descending_in_exp2(&shift(), 16, &ExtractBudget::default()).unwrap();
        assert_eq!(d.via, "ascent");
        assert_eq!(d.terms.len(), 16);
    }

    fn members(f: &InjectiveMap, n: usize) -> Vec<FinSeq> {
        enumerate_tf(f).take(n).collect()
    }

    #[test]
    fn tree_invariants() {
        for f in [
            double(),
            shift(),
            InjectiveMap::table([(3, 1), (1, 4), (2, 2)]).unwrap(),
        ] {
            let ms = members(&f, 40);
            for s in &ms {
                for t in &ms {
                    // positive entries agree at common indices
                    for i in 0..s.len().min(t.len()) {
                        if s[i] > 0 && t[i] > 0 {
                            assert_eq!(s[i], t[i]);
                        }
                    }
                    assert!(tf_compare(&f, s, t).is_ok());
                    for u in ms.iter().step_by(3) {
                        if kb_compare(s, t).is_le() && kb_compare(t, u).is_le() {
                            assert!(kb_compare(s, u).is_le());
                        }
                        if weak_extension(s, t) && weak_extension(t, u) {
                            assert!(weak_extension(s, u));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gp_reverses_order_and_bounds_exponents() {
        let f = shift();
        let ms = members(&f, 60);
        let order = TfOrder::new(f.clone());
        for p in ms.iter().take(10) {
            let tails: Vec<FinSeq> = ms
                .iter()
                .filter(|m| m.starts_with(p))
                .map(|m| FinSeq(m[p.len()..].to_vec()))
                .collect();
            for s in &tails {
                let gs = gp_map(&f, p, s).unwrap();
                for e in gs.exponents() {
                    assert!(order.leq(e, p));
                }
                for t in &tails {
                    if kb_compare(&p.concat(s), &p.concat(t)).is_lt() && s.len() < t.len() {
                        let gt = gp_map(&f, p, t).unwrap();
                        assert_eq!(exp2_compare(&gs, &gt, &order), Ok(Ordering::Greater));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_members_for_random_affine(a in 1u64..5, b in 0i64..6, n in 0usize..40) {
            let f = InjectiveMap::affine(a, b).unwrap();
            let c = tf_canonical(&f, n);
            prop_assert!(tf_member(&f, &c));
            prop_assert!(member_oracle(&f, &c));
        }

        #[test]
        fn weak_extension_is_reflexive(v in proptest::collection::vec(0u64..5, 0..8)) {
            prop_assert!(weak_extension(&v, &v));
        }
    }
}
