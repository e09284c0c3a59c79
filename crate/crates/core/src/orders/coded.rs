use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{product_cmp, Code, FinPoset, Order, OrderError};

/// Cantor pairing `(x, y) ↦ (x + y)(x + y + 1)/2 + y`; `None` on overflow.
pub fn cantor_pair(x: Code, y: Code) -> Option<Code> {
    let w = x.checked_add(y)?;
    let tri = if w % 2 == 0 {
        (w / 2).checked_mul(w.checked_add(1)?)?
    } else {
        w.checked_mul(w.div_ceil(2))?
    };
    tri.checked_add(y)
}

pub fn cantor_unpair(z: Code) -> (Code, Code) {
    let mut w = ((((8.0 * z as f64) + 1.0).sqrt() - 1.0) / 2.0) as Code;
    let tri = |w: Code| w as u128 * (w as u128 + 1) / 2;
    while tri(w) > z as u128 {
        w -= 1;
    }
    while tri(w + 1) <= z as u128 {
        w += 1;
    }
    let y = (z as u128 - tri(w)) as Code;
    (w - y, y)
}

/// Sum coding: `(0, x) ↦ 2x`, `(1, y) ↦ 2y + 1`.
pub fn sum_code(tag: u8, x: Code) -> Code {
    2 * x + tag as Code
}

pub fn sum_decode(code: Code) -> (u8, Code) {
    ((code % 2) as u8, code / 2)
}

type CompareFn = dyn Fn(Code, Code) -> Option<Ordering> + Send + Sync;
type ContainsFn = dyn Fn(Code) -> bool + Send + Sync;
type EnumerateFn = dyn Fn(usize) -> Vec<Code> + Send + Sync;

/// A programmatically supplied comparator on codes.
#[derive(Clone)]
pub struct CustomOrder {
    pub name: String,
    pub linear: bool,
    pub cardinality: Option<u64>,
    compare: Arc<CompareFn>,
    contains: Option<Arc<ContainsFn>>,
    enumerate: Option<Arc<EnumerateFn>>,
}

impl CustomOrder {
    pub fn new(
        name: impl Into<String>,
        linear: bool,
        compare: impl Fn(Code, Code) -> Option<Ordering> + Send + Sync + 'static,
    ) -> Self {
        CustomOrder {
            name: name.into(),
            linear,
            cardinality: None,
            compare: Arc::new(compare),
            contains: None,
            enumerate: None,
        }
    }

    pub fn with_contains(mut self, f: impl Fn(Code) -> bool + Send + Sync + 'static) -> Self {
        self.contains = Some(Arc::new(f));
        self
    }

    pub fn with_enumerator(
        mut self,
        f: impl Fn(usize) -> Vec<Code> + Send + Sync + 'static,
    ) -> Self {
        self.enumerate = Some(Arc::new(f));
        self
    }

    pub fn with_cardinality(mut self, n: u64) -> Self {
        self.cardinality = Some(n);
        self
    }
}

impl fmt::Debug for CustomOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomOrder")
            .field("name", &self.name)
            .field("linear", &self.linear)
            .finish_non_exhaustive()
    }
}

/// A countable order on natural-number codes.
///
/// Composite orders code their elements with [`sum_code`] (sums) and
/// [`cantor_pair`] (products and lexicographic products). `Exp2` codes a
/// finite set of base codes as the bitset `Σ 2^c`, so its exponents must be
/// base codes below 64.
#[derive(Debug, Clone)]
pub enum CodedOrder {
    /// The chain `0 < 1 < … < n − 1`.
    Finite(u64),
    /// ℕ in its natural order.
    Omega,
    /// Code `n` stands for `−n`; the order of non-positive integers.
    OmegaRev,
    /// An explicit finite poset on codes `0..n`.
    Poset(Arc<FinPoset>),
    Sum(Box<CodedOrder>, Box<CodedOrder>),
    Prod(Box<CodedOrder>, Box<CodedOrder>),
    /// Lexicographic product: first component decides, second breaks ties.
    Lex(Box<CodedOrder>, Box<CodedOrder>),
    /// The exponential order `2^base`.
    Exp2(Box<CodedOrder>),
    Custom(CustomOrder),
}

impl CodedOrder {
    pub fn sum(a: CodedOrder, b: CodedOrder) -> Self {
        CodedOrder::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: CodedOrder, b: CodedOrder) -> Self {
        CodedOrder::Prod(Box::new(a), Box::new(b))
    }

    pub fn lex(a: CodedOrder, b: CodedOrder) -> Self {
        CodedOrder::Lex(Box::new(a), Box::new(b))
    }

    pub fn exp2(base: CodedOrder) -> Self {
        CodedOrder::Exp2(Box::new(base))
    }

    pub fn antichain(n: usize) -> Self {
        CodedOrder::Poset(Arc::new(FinPoset::antichain(n)))
    }

    pub fn poset(p: FinPoset) -> Self {
        CodedOrder::Poset(Arc::new(p))
    }

    /// Number of elements, when finite and known.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            CodedOrder::Finite(n) => Some(*n),
            CodedOrder::Omega | CodedOrder::OmegaRev => None,
            CodedOrder::Poset(p) => Some(p.size() as u64),
            CodedOrder::Sum(a, b) => match (a.cardinality(), b.cardinality()) {
                (Some(x), Some(y)) => x.checked_add(y),
                _ => None,
            },
            CodedOrder::Prod(a, b) | CodedOrder::Lex(a, b) => {
                match (a.cardinality(), b.cardinality()) {
                    (Some(0), _) | (_, Some(0)) => Some(0),
                    (Some(x), Some(y)) => x.checked_mul(y),
                    _ => None,
                }
            }
            CodedOrder::Exp2(base) => match base.cardinality() {
                Some(k) if k < 64 => Some(1u64 << k),
                _ => None,
            },
            CodedOrder::Custom(c) => c.cardinality,
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            CodedOrder::Finite(_) | CodedOrder::Omega | CodedOrder::OmegaRev => true,
            CodedOrder::Poset(p) => super::check_linear(p.as_ref(), &p.points()).is_ok(),
            CodedOrder::Sum(a, b) => {
                (a.cardinality() == Some(0) && b.is_linear())
                    || (b.cardinality() == Some(0) && a.is_linear())
            }
            CodedOrder::Prod(a, b) => {
                a.is_linear()
                    && b.is_linear()
                    && (a.cardinality().is_some_and(|c| c <= 1)
                        || b.cardinality().is_some_and(|c| c <= 1))
            }
            CodedOrder::Lex(a, b) => a.is_linear() && b.is_linear(),
            CodedOrder::Exp2(base) => base.is_linear(),
            CodedOrder::Custom(c) => c.linear,
        }
    }

    /// Up to `budget` element codes in a fixed deterministic order.
    pub fn enumerate(&self, budget: usize) -> Vec<Code> {
        match self {
            CodedOrder::Finite(n) => (0..(*n).min(budget as u64)).collect(),
            CodedOrder::Omega | CodedOrder::OmegaRev => (0..budget as Code).collect(),
            CodedOrder::Poset(p) => (0..p.size().min(budget) as Code).collect(),
            CodedOrder::Sum(a, b) => {
                let (xs, ys) = (a.enumerate(budget), b.enumerate(budget));
                let mut out = Vec::with_capacity(budget);
                for k in 0..xs.len().max(ys.len()) {
                    if let Some(&x) = xs.get(k) {
                        out.push(sum_code(0, x));
                    }
                    if let Some(&y) = ys.get(k) {
                        out.push(sum_code(1, y));
                    }
                }
                out.truncate(budget);
                out
            }
            CodedOrder::Prod(a, b) | CodedOrder::Lex(a, b) => {
                let (xs, ys) = (a.enumerate(budget), b.enumerate(budget));
                let mut out = Vec::with_capacity(budget);
                if xs.is_empty() || ys.is_empty() {
                    return out;
                }
                'diag: for d in 0..xs.len() + ys.len() - 1 {
                    for i in 0..=d {
                        let j = d - i;
                        if i >= xs.len() || j >= ys.len() {
                            continue;
                        }
                        if let Some(c) = cantor_pair(xs[i], ys[j]) {
                            out.push(c);
                        }
                        if out.len() == budget {
                            break 'diag;
                        }
                    }
                }
                out
            }
            CodedOrder::Exp2(base) => {
                let exps: Vec<Code> = base
                    .enumerate(budget.min(63))
                    .into_iter()
                    .filter(|&c| c < 64)
                    .collect();
                let subsets = 1u64 << exps.len().min(63);
                (0..subsets)
                    .take(budget)
                    .map(|mask| {
                        exps.iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .fold(0u64, |acc, (_, &c)| acc | (1u64 << c))
                    })
                    .collect()
            }
            CodedOrder::Custom(c) => match &c.enumerate {
                Some(e) => e(budget),
                None => {
                    let limit = c.cardinality.unwrap_or(u64::MAX);
                    let mut out = vec![];
                    let mut code = 0;
                    while out.len() < budget
                        && (out.len() as u64) < limit
                        && code < (budget as u64).saturating_mul(64).max(64)
                    {
                        if self.contains(&code) {
                            out.push(code);
                        }
                        code += 1;
                    }
                    out
                }
            },
        }
    }

    /// Exponents of the `Exp2` element `code`, strictly descending in `base`.
    /// `None` if a set bit is not a base code or two exponents are incomparable.
    pub fn exp2_exponents(base: &CodedOrder, code: Code) -> Option<Vec<Code>> {
        let mut exps: Vec<Code> = (0..64).filter(|i| code >> i & 1 == 1).collect();
        if !exps.iter().all(|e| base.contains(e)) {
            return None;
        }
        let mut ok = true;
        exps.sort_by(|a, b| match base.compare(a, b) {
            Some(o) => o.reverse(),
            None => {
                ok = false;
                Ordering::Equal
            }
        });
        let descending = exps
            .windows(2)
            .all(|w| base.compare(&w[0], &w[1]) == Some(Ordering::Greater));
        (ok && descending).then_some(exps)
    }
}

impl Order for CodedOrder {
    type Elem = Code;

    fn compare(&self, a: &Code, b: &Code) -> Option<Ordering> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        match self {
            CodedOrder::Finite(_) | CodedOrder::Omega => Some(a.cmp(b)),
            CodedOrder::OmegaRev => Some(b.cmp(a)),
            CodedOrder::Poset(p) => p.compare(a, b),
            CodedOrder::Sum(x, y) => {
                let ((ta, va), (tb, vb)) = (sum_decode(*a), sum_decode(*b));
                match (ta, tb) {
                    (0, 0) => x.compare(&va, &vb),
                    (1, 1) => y.compare(&va, &vb),
                    _ => None,
                }
            }
            CodedOrder::Prod(x, y) => {
                let ((a0, a1), (b0, b1)) = (cantor_unpair(*a), cantor_unpair(*b));
                product_cmp(x.compare(&a0, &b0), y.compare(&a1, &b1))
            }
            CodedOrder::Lex(x, y) => {
                let ((a0, a1), (b0, b1)) = (cantor_unpair(*a), cantor_unpair(*b));
                match x.compare(&a0, &b0)? {
                    Ordering::Equal => y.compare(&a1, &b1),
                    o => Some(o),
                }
            }
            CodedOrder::Exp2(base) => {
                let ea = CodedOrder::exp2_exponents(base, *a)?;
                let eb = CodedOrder::exp2_exponents(base, *b)?;
                crate::exp2::compare_exponents(&ea, &eb, base.as_ref()).ok()
            }
            CodedOrder::Custom(c) => (c.compare)(*a, *b),
        }
    }

    fn contains(&self, a: &Code) -> bool {
        match self {
            CodedOrder::Finite(n) => a < n,
            CodedOrder::Omega | CodedOrder::OmegaRev => true,
            CodedOrder::Poset(p) => p.contains(a),
            CodedOrder::Sum(x, y) => match sum_decode(*a) {
                (0, v) => x.contains(&v),
                (_, v) => y.contains(&v),
            },
            CodedOrder::Prod(x, y) | CodedOrder::Lex(x, y) => {
                let (a0, a1) = cantor_unpair(*a);
                x.contains(&a0) && y.contains(&a1)
            }
            CodedOrder::Exp2(base) => (0..64)
                .filter(|i| a >> i & 1 == 1)
                .all(|i| base.contains(&i)),
            CodedOrder::Custom(c) => c.contains.as_ref().is_none_or(|f| f(*a)),
        }
    }
}

impl fmt::Display for CodedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodedOrder::Finite(n) => write!(f, "finite:{n}"),
            CodedOrder::Omega => write!(f, "omega"),
            CodedOrder::OmegaRev => write!(f, "omega_rev"),
            CodedOrder::Poset(p) if p.strict_pairs().is_empty() => {
                write!(f, "antichain:{}", p.size())
            }
            CodedOrder::Poset(p) => {
                write!(f, "poset(n={}", p.size())?;
                for (a, b) in p.strict_pairs() {
                    write!(f, ";{a}<{b}")?;
                }
                write!(f, ")")
            }
            CodedOrder::Sum(a, b) => write!(f, "sum({a},{b})"),
            CodedOrder::Prod(a, b) => write!(f, "prod({a},{b})"),
            CodedOrder::Lex(a, b) => write!(f, "lex({a},{b})"),
            CodedOrder::Exp2(a) => write!(f, "exp2({a})"),
            CodedOrder::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl FromStr for CodedOrder {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (order, rest) = parse_order(s.trim(), s)?;
        if !rest.trim().is_empty() {
            return Err(OrderError::parse(
                "order spec",
                s,
                format!("trailing input {rest:?}"),
            ));
        }
        Ok(order)
    }
}

fn parse_order<'a>(s: &'a str, full: &str) -> Result<(CodedOrder, &'a str), OrderError> {
    let err = |reason: &str| OrderError::parse("order spec", full, reason);
    let number = |s: &'a str| -> Result<(u64, &'a str), OrderError> {
        let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
        let n = s[..end].parse().map_err(|_| err("expected a number"))?;
        Ok((n, &s[end..]))
    };
    if let Some(rest) = s.strip_prefix("finite:") {
        let (n, rest) = number(rest)?;
        return Ok((CodedOrder::Finite(n), rest));
    }
    if let Some(rest) = s.strip_prefix("antichain:") {
        let (n, rest) = number(rest)?;
        return Ok((CodedOrder::antichain(n as usize), rest));
    }
    if let Some(rest) = s.strip_prefix("omega_rev") {
        return Ok((CodedOrder::OmegaRev, rest));
    }
    if let Some(rest) = s.strip_prefix("omega") {
        return Ok((CodedOrder::Omega, rest));
    }
    if let Some(rest) = s.strip_prefix("poset(") {
        let end = rest.find(')').ok_or_else(|| err("unclosed poset("))?;
        let body = rest[..end].replace(';', "\n");
        let p: FinPoset = body.parse()?;
        return Ok((CodedOrder::poset(p), &rest[end + 1..]));
    }
    if let Some(rest) = s.strip_prefix("exp2(") {
        let (inner, rest) = parse_order(rest, full)?;
        let rest = rest.strip_prefix(')').ok_or_else(|| err("expected )"))?;
        return Ok((CodedOrder::exp2(inner), rest));
    }
    for (name, make) in [
        ("sum(", CodedOrder::sum as fn(_, _) -> _),
        ("prod(", CodedOrder::prod),
        ("lex(", CodedOrder::lex),
    ] {
        if let Some(rest) = s.strip_prefix(name) {
            let (a, rest) = parse_order(rest, full)?;
            let rest = rest.strip_prefix(',').ok_or_else(|| err("expected ,"))?;
            let (b, rest) = parse_order(rest, full)?;
            let rest = rest.strip_prefix(')').ok_or_else(|| err("expected )"))?;
            return Ok((make(a, b), rest));
        }
    }
    Err(err("unknown order"))
}
