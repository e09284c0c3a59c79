use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Order, OrderError};

/// A finite sequence of naturals. Literal form is dot-separated (`0.0.1`);
/// the empty sequence prints as `<>`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSeq(pub Vec<u64>);

impl FinSeq {
    pub fn empty() -> Self {
        FinSeq(vec![])
    }

    pub fn concat(&self, tail: &[u64]) -> FinSeq {
        let mut v = self.0.clone();
        v.extend_from_slice(tail);
        FinSeq(v)
    }

    pub fn push(&self, entry: u64) -> FinSeq {
        self.concat(&[entry])
    }

    /// `self` is a proper extension of `other`.
    pub fn properly_extends(&self, other: &FinSeq) -> bool {
        self.len() > other.len() && self.starts_with(other)
    }
}

impl Deref for FinSeq {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for FinSeq {
    fn from(v: Vec<u64>) -> Self {
        FinSeq(v)
    }
}

impl fmt::Display for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "<>");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for FinSeq {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "<>" {
            return Ok(FinSeq::empty());
        }
        s.split('.')
            .map(|p| {
                p.parse()
                    .map_err(|_| OrderError::parse("sequence", s, format!("bad entry {p:?}")))
            })
            .collect::<Result<_, _>>()
            .map(FinSeq)
    }
}

impl Serialize for FinSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FinSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Kleene-Brouwer comparison on ℕ*: proper extensions are smaller, otherwise
/// the first difference decides.
pub fn kb_compare(s: &[u64], t: &[u64]) -> Ordering {
    match s.iter().zip(t).find(|(a, b)| a != b) {
        Some((a, b)) => a.cmp(b),
        None => t.len().cmp(&s.len()),
    }
}

/// The Kleene-Brouwer order on all of ℕ* as an [`Order`].
#[derive(Debug, Clone, Copy, Default)]
pub struct KleeneBrouwer;

impl Order for KleeneBrouwer {
    type Elem = FinSeq;

    fn compare(&self, a: &FinSeq, b: &FinSeq) -> Option<Ordering> {
        Some(kb_compare(a, b))
    }
}

/// Higman embedding: is there a strictly increasing `h` with
/// `s[i] ≤ t[h(i)]` for every `i`?
pub fn higman_leq<O: Order + ?Sized>(s: &[O::Elem], t: &[O::Elem], labels: &O) -> bool {
    // row[j]: s[..i] embeds into t[..j]
    let mut row = vec![true; t.len() + 1];
    for x in s {
        let mut next = vec![false; t.len() + 1];
        for j in 1..=t.len() {
            next[j] = next[j - 1] || (row[j - 1] && labels.leq(x, &t[j - 1]));
        }
        row = next;
    }
    row[t.len()]
}
