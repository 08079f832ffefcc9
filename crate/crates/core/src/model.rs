//! Domain types: validated parameters, moment queries, equality patterns.
//!
//! Category indices are 1-based at every public boundary.

use std::fmt;

use crate::error::{MomentError, Result};
use crate::scalar::Scalar;

/// Largest tuple length handled by the closed forms.
pub const MAX_ORDER: usize = 4;

/// Trial count `m` and probabilities `x` of the first `d` categories.
///
/// The remainder category has probability `1 − Σx` and is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialParams<S> {
    m: u64,
    x: Vec<S>,
}

impl<S: Scalar> MultinomialParams<S> {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn x(&self) -> &[S] {
        &self.x
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    /// Probability of the category at a 1-based index. Panics when out of range.
    pub fn prob(&self, index: usize) -> &S {
        &self.x[index - 1]
    }

    /// `1 − Σx`.
    pub fn remainder(&self) -> S {
        self.x.iter().fold(S::one(), |acc, xi| acc - xi.clone())
    }

    /// Mean `m·x_i` of a 1-based category.
    pub fn mean(&self, index: usize) -> S {
        S::from_u64(self.m) * self.prob(index).clone()
    }

    /// Stable opaque identifier of this parameter set (FNV-1a over its rendering).
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let text = format!(
            "{}|{}|{}",
            S::MODE.as_str(),
            self.m,
            self.x.iter().map(Scalar::render).collect::<Vec<_>>().join(",")
        );
        for b in text.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Same parameters in double precision.
    pub fn to_f64(&self) -> MultinomialParams<f64> {
        MultinomialParams {
            m: self.m,
            x: self.x.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Same probabilities with a different trial count.
    pub fn with_m(&self, m: u64) -> Result<Self> {
        validate_params(m, self.x.clone())
    }

    /// Checks that every 1-based index lies in `1..=d`.
    pub fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let d = self.d();
        match indices.iter().find(|&&i| i == 0 || i > d) {
            Some(&index) => Err(MomentError::IndexOutOfRange { index, d }),
            None => Ok(()),
        }
    }

    /// Like [`check_indices`](Self::check_indices), also requiring a tuple length in `1..=4`.
    pub fn check_query(&self, indices: &[usize]) -> Result<()> {
        if indices.is_empty() || indices.len() > MAX_ORDER {
            return Err(MomentError::BadOrder(indices.len()));
        }
        self.check_indices(indices)
    }
}

/// Validation gate for `(m, x)`; never clamps.
pub fn validate_params<S: Scalar>(m: u64, x: Vec<S>) -> Result<MultinomialParams<S>> {
    if m < 1 {
        return Err(MomentError::BadTrialCount(m));
    }
    if x.is_empty() {
        return Err(MomentError::EmptyDimension);
    }
    let slack = S::simplex_slack();
    let upper = S::one() + slack.clone();
    for (pos, xi) in x.iter().enumerate() {
        // Written so that NaN fails both comparisons.
        let inside = *xi >= S::zero() && *xi <= upper;
        if !inside {
            return Err(MomentError::SimplexViolation(format!(
                "x{} = {} is not in [0, 1]",
                pos + 1,
                xi.render()
            )));
        }
    }
    let total = x.iter().fold(S::zero(), |acc, xi| acc + xi.clone());
    // Written negated so a NaN sum is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(total <= upper) {
        return Err(MomentError::SimplexViolation(format!(
            "sum of probabilities {} exceeds 1",
            total.render()
        )));
    }
    Ok(MultinomialParams { m, x })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MomentKind {
    Raw,
    Central,
}

impl MomentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentKind::Raw => "raw",
            MomentKind::Central => "central",
        }
    }
}

/// A 1-based index tuple of length 1–4 together with the moment kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentQuery {
    pub indices: Vec<usize>,
    pub kind: MomentKind,
}

impl MomentQuery {
    pub fn new(indices: Vec<usize>, kind: MomentKind) -> Result<Self> {
        if indices.is_empty() || indices.len() > MAX_ORDER {
            return Err(MomentError::BadOrder(indices.len()));
        }
        if indices.contains(&0) {
            return Err(MomentError::IndexOutOfRange { index: 0, d: 0 });
        }
        Ok(Self { indices, kind })
    }

    pub fn pattern(&self) -> EqualityPattern {
        canonical_pattern(&self.indices)
    }
}

/// Set partition of tuple positions, stored as a restricted-growth string.
///
/// Position `t` carries the label of its block; labels appear in order of
/// first occurrence, so `(2, 5, 2)` becomes `010`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqualityPattern {
    labels: [u8; MAX_ORDER],
    len: u8,
}

impl EqualityPattern {
    /// Builds a pattern from a restricted-growth string; `None` if the string is not one.
    pub fn from_labels(labels: &[u8]) -> Option<Self> {
        if labels.len() > MAX_ORDER {
            return None;
        }
        let mut next = 0u8;
        for &l in labels {
            if l > next {
                return None;
            }
            if l == next {
                next += 1;
            }
        }
        let mut out = [0u8; MAX_ORDER];
        out[..labels.len()].copy_from_slice(labels);
        Some(Self {
            labels: out,
            len: labels.len() as u8,
        })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels[..self.len as usize]
    }

    pub fn order(&self) -> usize {
        self.len as usize
    }

    pub fn block_count(&self) -> usize {
        self.labels().iter().max().map_or(0, |&b| b as usize + 1)
    }

    /// Every pattern of the given order, in lexicographic order of the labels.
    pub fn all(order: usize) -> Vec<EqualityPattern> {
        fn extend(prefix: &mut Vec<u8>, order: usize, out: &mut Vec<EqualityPattern>) {
            if prefix.len() == order {
                out.extend(EqualityPattern::from_labels(prefix));
                return;
            }
            let next = prefix.iter().max().map_or(0, |&b| b + 1);
            for label in 0..=next {
                prefix.push(label);
                extend(prefix, order, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if order <= MAX_ORDER {
            extend(&mut Vec::with_capacity(order), order, &mut out);
        }
        out
    }
}

impl fmt::Display for EqualityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.labels() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for EqualityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EqualityPattern({self})")
    }
}

/// Restricted-growth encoding of which tuple positions hold equal indices.
pub fn canonical_pattern(indices: &[usize]) -> EqualityPattern {
    assert!(indices.len() <= MAX_ORDER, "tuple longer than {MAX_ORDER}");
    let mut labels = [0u8; MAX_ORDER];
    let mut seen: Vec<usize> = Vec::with_capacity(MAX_ORDER);
    for (pos, idx) in indices.iter().enumerate() {
        labels[pos] = match seen.iter().position(|s| s == idx) {
            Some(b) => b as u8,
            None => {
                seen.push(*idx);
                (seen.len() - 1) as u8
            }
        };
    }
    EqualityPattern {
        labels,
        len: indices.len() as u8,
    }
}

/// Per-category falling-factorial orders `r` for a joint factorial moment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorialOrders {
    r: Vec<u32>,
}

impl FactorialOrders {
    pub fn new(r: Vec<u32>) -> Self {
        Self { r }
    }

    pub fn orders(&self) -> &[u32] {
        &self.r
    }

    pub fn total(&self) -> u64 {
        self.r.iter().map(|&r| u64::from(r)).sum()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Every 1-based tuple of the given length over `1..=d`, last position varying fastest.
pub fn index_tuples(order: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(order)];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=d).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}
