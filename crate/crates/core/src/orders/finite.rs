use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Code, Order, OrderError};

/// A finite partial order on `{0, …, size − 1}` stored as a full relation matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PosetRepr", into = "PosetRepr")]
pub struct FinPoset {
    size: usize,
    // leq[i * size + j] iff i ≤ j
    leq: Vec<bool>,
}

/// Serialized form: the size and every strict relation `i < j`.
#[derive(Serialize, Deserialize)]
struct PosetRepr {
    n: usize,
    lt: Vec<(Code, Code)>,
}

impl TryFrom<PosetRepr> for FinPoset {
    type Error = OrderError;

    fn try_from(r: PosetRepr) -> Result<Self, Self::Error> {
        FinPoset::new(r.n, &r.lt)
    }
}

impl From<FinPoset> for PosetRepr {
    fn from(p: FinPoset) -> Self {
        PosetRepr {
            n: p.size,
            lt: p.strict_pairs(),
        }
    }
}

impl FinPoset {
    /// Reflexive-transitive closure of `pairs` on `n` points.
    pub fn new(n: usize, pairs: &[(Code, Code)]) -> Result<Self, OrderError> {
        for &(a, b) in pairs {
            for c in [a, b] {
                if c as usize >= n {
                    return Err(OrderError::CodeOutOfRange { code: c, size: n });
                }
            }
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in pairs {
            leq[a as usize * n + b as usize] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    let cycle = witness_cycle(n, pairs, i, j);
                    return Err(OrderError::AntisymmetryViolation { cycle });
                }
            }
        }
        Ok(FinPoset { size: n, leq })
    }

    /// Takes a relation matrix as given and validates the poset axioms.
    pub fn from_matrix(size: usize, leq: Vec<bool>) -> Result<Self, OrderError> {
        if leq.len() != size * size {
            return Err(OrderError::NotAPartialOrder(format!(
                "matrix has {} entries, expected {}",
                leq.len(),
                size * size
            )));
        }
        let p = FinPoset { size, leq };
        super::check_poset_axioms(&p, &p.points()).map_err(OrderError::NotAPartialOrder)?;
        Ok(p)
    }

    pub fn antichain(n: usize) -> Self {
        FinPoset::new(n, &[]).expect("antichain is a poset")
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n as Code).map(|i| (i - 1, i)).collect();
        FinPoset::new(n, &pairs).expect("chain is a poset")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn points(&self) -> Vec<Code> {
        (0..self.size as Code).collect()
    }

    pub fn le(&self, a: Code, b: Code) -> bool {
        let (a, b) = (a as usize, b as usize);
        a < self.size && b < self.size && self.leq[a * self.size + b]
    }

    /// All strict relations `i < j`, in row-major order.
    pub fn strict_pairs(&self) -> Vec<(Code, Code)> {
        let mut out = vec![];
        for i in 0..self.size {
            for j in 0..self.size {
                if i != j && self.leq[i * self.size + j] {
                    out.push((i as Code, j as Code));
                }
            }
        }
        out
    }

    /// Suborder induced on `points`, relabelled `0..points.len()` in the given order.
    pub fn induced(&self, points: &[Code]) -> FinPoset {
        let n = points.len();
        let mut leq = vec![false; n * n];
        for (i, &a) in points.iter().enumerate() {
            for (j, &b) in points.iter().enumerate() {
                leq[i * n + j] = self.le(a, b);
            }
        }
        FinPoset { size: n, leq }
    }

    /// `X + Y` with `(0, x) ↦ x` and `(1, y) ↦ |X| + y`.
    pub fn sum(&self, other: &FinPoset) -> FinPoset {
        let n = self.size + other.size;
        let mut leq = vec![false; n * n];
        for i in 0..self.size {
            for j in 0..self.size {
                leq[i * n + j] = self.leq[i * self.size + j];
            }
        }
        for i in 0..other.size {
            for j in 0..other.size {
                leq[(self.size + i) * n + self.size + j] = other.leq[i * other.size + j];
            }
        }
        FinPoset { size: n, leq }
    }

    /// `X × Y` with `(x, y) ↦ x · |Y| + y`.
    pub fn product(&self, other: &FinPoset) -> FinPoset {
        let m = other.size;
        let n = self.size * m;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] =
                    self.leq[(a / m) * self.size + b / m] && other.leq[(a % m) * m + b % m];
            }
        }
        FinPoset { size: n, leq }
    }

    /// Extends the poset by one fresh point lying strictly above exactly the
    /// points `below` (and their down-closure). Returns the new point's code.
    pub fn with_point_above(&self, below: &[Code]) -> (FinPoset, Code) {
        let n = self.size + 1;
        let mut leq = vec![false; n * n];
        for i in 0..self.size {
            for j in 0..self.size {
                leq[i * n + j] = self.leq[i * self.size + j];
            }
        }
        let fresh = self.size;
        leq[fresh * n + fresh] = true;
        for z in 0..self.size {
            leq[z * n + fresh] = below.iter().any(|&b| self.le(z as Code, b));
        }
        (FinPoset { size: n, leq }, fresh as Code)
    }
}

/// Shortest path `i → … → j → … → i` through the input pairs.
fn witness_cycle(n: usize, pairs: &[(Code, Code)], i: usize, j: usize) -> Vec<Code> {
    let path = |from: usize, to: usize| -> Vec<Code> {
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(a, b) in pairs {
                let (a, b) = (a as usize, b as usize);
                if a == v && !seen[b] {
                    seen[b] = true;
                    prev[b] = v;
                    queue.push_back(b);
                }
            }
        }
        let mut out = vec![to as Code];
        let mut v = to;
        while v != from {
            v = prev[v];
            out.push(v as Code);
        }
        out.reverse();
        out
    };
    let mut cycle = path(i, j);
    cycle.extend(path(j, i).into_iter().skip(1));
    cycle
}

impl Order for FinPoset {
    type Elem = Code;

    fn compare(&self, a: &Code, b: &Code) -> Option<Ordering> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        match (self.le(*a, *b), self.le(*b, *a)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    fn leq(&self, a: &Code, b: &Code) -> bool {
        self.le(*a, *b)
    }

    fn contains(&self, a: &Code) -> bool {
        (*a as usize) < self.size
    }
}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinPoset(n={}, lt={:?})", self.size, self.strict_pairs())
    }
}

/// Text format: `n=<count>` on the first line, then one `i<j` pair per line.
/// Only covering pairs are emitted.
impl fmt::Display for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.size)?;
        for (a, b) in self.strict_pairs() {
            let covered =
                (0..self.size as Code).any(|c| c != a && c != b && self.le(a, c) && self.le(c, b));
            if !covered {
                writeln!(f, "{a}<{b}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FinPoset {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| OrderError::parse("poset", s, "missing n=<count> header"))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| OrderError::parse("poset", header, "expected n=<count>"))?;
        let mut pairs = vec![];
        for line in lines {
            let (a, b) = line
                .split_once('<')
                .ok_or_else(|| OrderError::parse("poset", line, "expected i<j"))?;
            let a: Code = a
                .trim()
                .parse()
                .map_err(|_| OrderError::parse("poset", line, "bad left code"))?;
            let b: Code = b
                .trim()
                .parse()
                .map_err(|_| OrderError::parse("poset", line, "bad right code"))?;
            pairs.push((a, b));
        }
        FinPoset::new(n, &pairs)
    }
}

/// Every partial order on `{0, …, k − 1}` for `k ≤ max_size`, smallest first.
/// Labelled posets: isomorphic copies are listed separately.
pub fn all_posets(max_size: usize) -> Vec<FinPoset> {
    let mut out = vec![];
    for n in 0..=max_size {
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        for mask in 0u64..(1u64 << slots.len()) {
            let mut leq = vec![false; n * n];
            for i in 0..n {
                leq[i * n + i] = true;
            }
            for (bit, &(i, j)) in slots.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    leq[i * n + j] = true;
                }
            }
            if let Ok(p) = FinPoset::from_matrix(n, leq) {
                out.push(p);
            }
        }
    }
    out
}

/// All total functions `{0..n} → {0..m}`, in lexicographic order.
pub fn all_maps(n: usize, m: usize) -> impl Iterator<Item = Vec<Code>> {
    let total = if n == 0 {
        1
    } else if m == 0 {
        0
    } else {
        (m as u64).pow(n as u32)
    };
    (0..total).map(move |mut k| {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = k % m as u64;
            k /= m as u64;
        }
        v
    })
}
