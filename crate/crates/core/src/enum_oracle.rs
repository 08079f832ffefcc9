//! Ground-truth moments by summing over the whole lattice support.
//!
//! The support `{k ∈ ℕ₀^d : Σk ≤ m}` is walked in colexicographic order
//! (first coordinate fastest). Multinomial coefficients are carried along the
//! walk by exact integer multiply/divide steps.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{MomentError, Result};
use crate::model::{FactorialOrders, MomentKind, MultinomialParams};
use crate::scalar::Scalar;

/// Largest support an enumeration will sum over unless told otherwise.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A count vector `k` with `Σk ≤ m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub k: Vec<u64>,
}

impl LatticePoint {
    pub fn total(&self) -> u64 {
        self.k.iter().sum()
    }
}

/// `C(m + d, d)`, saturating at `u128::MAX`.
pub fn support_size(m: u64, d: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        // C(m+i, i) = C(m+i-1, i-1) · (m+i) / i stays integral at every step.
        match acc.checked_mul(u128::from(m) + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Colexicographic walk over the support, carrying the multinomial coefficient.
#[derive(Debug, Clone)]
struct Walker {
    m: u64,
    k: Vec<u64>,
    sum: u64,
    coef: BigUint,
    done: bool,
}

impl Walker {
    fn new(m: u64, d: usize) -> Self {
        Self {
            m,
            k: vec![0; d],
            sum: 0,
            coef: BigUint::one(),
            done: d == 0,
        }
    }

    fn increment(&mut self, pos: usize) {
        self.coef *= self.m - self.sum;
        self.k[pos] += 1;
        self.coef /= self.k[pos];
        self.sum += 1;
    }

    fn clear(&mut self, pos: usize) {
        while self.k[pos] > 0 {
            self.coef *= self.k[pos];
            self.coef /= self.m - self.sum + 1;
            self.k[pos] -= 1;
            self.sum -= 1;
        }
    }

    fn advance(&mut self) {
        if self.sum < self.m {
            self.increment(0);
            return;
        }
        // Σk = m: zero a prefix and carry into the next coordinate.
        for pos in 0..self.k.len() {
            let freed = self.k[pos];
            self.clear(pos);
            if freed > 0 && pos + 1 < self.k.len() {
                self.increment(pos + 1);
                return;
            }
            if freed > 0 {
                break;
            }
        }
        self.done = true;
    }
}

impl Iterator for Walker {
    type Item = (Vec<u64>, BigUint);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = (self.k.clone(), self.coef.clone());
        self.advance();
        Some(item)
    }
}

/// Iterator over every lattice point of the support, colexicographic order.
#[derive(Debug, Clone)]
pub struct Support {
    walker: Walker,
}

impl Iterator for Support {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        self.walker.next().map(|(k, _)| LatticePoint { k })
    }
}

pub fn support<S: Scalar>(params: &MultinomialParams<S>) -> Support {
    Support {
        walker: Walker::new(params.m(), params.d()),
    }
}

/// `x^n` for `n = 0..=m`, with `0⁰ = 1`.
fn power_table<S: Scalar>(x: &S, m: u64) -> Vec<S> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut acc = S::one();
    for _ in 0..=m {
        out.push(acc.clone());
        acc = acc * x.clone();
    }
    out
}

/// Exact probability of a count vector (signed so out-of-support input can be rejected).
pub fn pmf<S: Scalar>(params: &MultinomialParams<S>, k: &[i64]) -> Result<S> {
    if k.len() != params.d() {
        return Err(MomentError::LengthMismatch {
            expected: params.d(),
            got: k.len(),
        });
    }
    let total: i128 = k.iter().map(|&v| i128::from(v)).sum();
    if k.iter().any(|&v| v < 0) || total > i128::from(params.m()) {
        return Err(MomentError::SupportViolation(k.to_vec()));
    }
    let m = params.m();
    // m! / ((m − Σk)! ∏k!) as a product of binomials.
    let mut coef = BigUint::one();
    let mut placed = 0u64;
    for &ki in k {
        for step in 1..=ki as u64 {
            coef *= m - placed;
            coef /= step;
            placed += 1;
        }
    }
    let mut p = S::from_biguint(&coef);
    for (xi, &ki) in params.x().iter().zip(k) {
        p = p * xi.powu(ki as u32);
    }
    let rest = (m - placed) as u32;
    Ok(p * params.remainder().powu(rest))
}

/// Support points with non-zero probability, ready for repeated expectations.
#[derive(Debug, Clone)]
pub struct SupportTable<S> {
    params: MultinomialParams<S>,
    /// Row-major counts, `d` per point.
    counts: Vec<u32>,
    weights: Vec<S>,
    /// Points visited, including zero-probability ones.
    visited: u64,
}

impl<S: Scalar> SupportTable<S> {
    pub fn build(params: &MultinomialParams<S>, budget: u64) -> Result<Self> {
        let size = support_size(params.m(), params.d());
        if size > u128::from(budget) {
            return Err(MomentError::BudgetExceeded {
                points: size,
                budget,
            });
        }
        let m = params.m();
        let powers: Vec<Vec<S>> = params.x().iter().map(|xi| power_table(xi, m)).collect();
        let rest = power_table(&params.remainder(), m);
        let mut counts = Vec::new();
        let mut weights = Vec::new();
        let mut visited = 0;
        for (k, coef) in Walker::new(m, params.d()) {
            visited += 1;
            let mut w = rest[(m - k.iter().sum::<u64>()) as usize].clone();
            for (table, &ki) in powers.iter().zip(&k) {
                if w.is_zero() {
                    break;
                }
                w = w * table[ki as usize].clone();
            }
            if w.is_zero() {
                continue;
            }
            weights.push(S::from_biguint(&coef) * w);
            counts.extend(k.iter().map(|&v| v as u32));
        }
        Ok(Self {
            params: params.clone(),
            counts,
            weights,
            visited,
        })
    }

    pub fn params(&self) -> &MultinomialParams<S> {
        &self.params
    }

    pub fn points_visited(&self) -> u64 {
        self.visited
    }

    /// `(counts, probability)` of every point with non-zero probability.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], &S)> {
        self.counts.chunks(self.params.d().max(1)).zip(&self.weights)
    }

    pub fn total_probability(&self) -> S {
        self.weights.iter().fold(S::zero(), |a, w| a + w.clone())
    }

    /// `E[f(ξ)]` where `f` is a product over the tuple of per-category factor tables.
    fn expect(&self, factors: &[Vec<S>], indices: &[usize]) -> S {
        let d = self.params.d();
        let mut total = S::zero();
        for (row, w) in self.counts.chunks(d).zip(&self.weights) {
            let mut term = w.clone();
            for (t, &i) in indices.iter().enumerate() {
                let f = &factors[t][row[i - 1] as usize];
                if f.is_zero() {
                    term = S::zero();
                    break;
                }
                term = term * f.clone();
            }
            total = total + term;
        }
        total
    }

    /// Raw or central moment over a 1-based tuple of any positive length.
    pub fn moment(&self, indices: &[usize], kind: MomentKind) -> Result<S> {
        self.params.check_indices(indices)?;
        let m = self.params.m();
        let factors: Vec<Vec<S>> = indices
            .iter()
            .map(|&i| {
                let shift = match kind {
                    MomentKind::Raw => S::zero(),
                    MomentKind::Central => self.params.mean(i),
                };
                (0..=m).map(|k| S::from_u64(k) - shift.clone()).collect()
            })
            .collect();
        Ok(self.expect(&factors, indices))
    }

    /// `E[∏ᵢ ξᵢ⁽ʳⁱ⁾]` by direct summation.
    pub fn factorial_moment(&self, orders: &FactorialOrders) -> Result<S> {
        let d = self.params.d();
        if orders.len() != d {
            return Err(MomentError::LengthMismatch {
                expected: d,
                got: orders.len(),
            });
        }
        let m = self.params.m();
        let mut indices = Vec::new();
        let mut factors = Vec::new();
        for (c, &r) in orders.orders().iter().enumerate() {
            if r == 0 {
                continue;
            }
            indices.push(c + 1);
            factors.push(
                (0..=m)
                    .map(|k| crate::scalar::falling_factorial::<S>(k, r))
                    .collect(),
            );
        }
        Ok(self.expect(&factors, &indices))
    }
}

/// Definitional expectation of the tuple product over the full support.
pub fn moment_via_enumeration<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
    kind: MomentKind,
    budget: u64,
) -> Result<S> {
    params.check_indices(indices)?;
    SupportTable::build(params, budget)?.moment(indices, kind)
}

pub fn factorial_moment_via_enumeration<S: Scalar>(
    params: &MultinomialParams<S>,
    orders: &FactorialOrders,
    budget: u64,
) -> Result<S> {
    SupportTable::build(params, budget)?.factorial_moment(orders)
}
