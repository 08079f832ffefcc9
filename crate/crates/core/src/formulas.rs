//! Closed-form joint moments of the multinomial distribution.
//!
//! Raw and central moments up to order four are evaluated by dispatching on
//! the [`EqualityPattern`] of the index tuple. Each arm is a polynomial in the
//! falling factorials `m⁽ᵏ⁾` (raw) or in `m` (central), with the `x` factors
//! read from the tuple positions named `i, j, l, p`.
//!
//! Indicator chains such as `ℓ ≠ i = j ≠ p` constrain adjacent pairs only;
//! every arm below lists the chain condition(s) it realizes.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{MomentError, Result};
use crate::model::{
    canonical_pattern, EqualityPattern, FactorialOrders, MomentKind, MomentQuery,
    MultinomialParams,
};
use crate::scalar::{falling_factorial, Mode, Scalar};

/// `m⁽ᵏ⁾ = m(m−1)…(m−k+1)` over the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FallingFactorial {
    pub base: u64,
    pub depth: u32,
}

impl FallingFactorial {
    pub fn new(base: u64, depth: u32) -> Self {
        Self { base, depth }
    }

    /// Exact integer value; `None` on `u128` overflow.
    pub fn value(&self) -> Option<u128> {
        if u64::from(self.depth) > self.base {
            return Some(0);
        }
        (0..u64::from(self.depth)).try_fold(1u128, |acc, i| {
            acc.checked_mul(u128::from(self.base - i))
        })
    }

    pub fn to_scalar<S: Scalar>(&self) -> S {
        falling_factorial(self.base, self.depth)
    }
}

/// The dispatch arm that produced a closed-form value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arm {
    pub kind: MomentKind,
    pub pattern: EqualityPattern,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.pattern)
    }
}

/// Closed-form value together with the query and parameter identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult<S> {
    pub value: S,
    pub query: MomentQuery,
    pub params_digest: String,
    pub mode: Mode,
}

/// Evaluates a [`MomentQuery`] through the closed forms.
pub fn evaluate<S: Scalar>(
    params: &MultinomialParams<S>,
    query: &MomentQuery,
) -> Result<MomentResult<S>> {
    let value = match query.kind {
        MomentKind::Raw => raw_moment(params, &query.indices)?,
        MomentKind::Central => central_moment(params, &query.indices)?,
    };
    Ok(MomentResult {
        value,
        query: query.clone(),
        params_digest: params.digest(),
        mode: S::MODE,
    })
}

/// `E[ξ_i ξ_j …]` over a 1-based tuple of length 1–4.
pub fn raw_moment<S: Scalar>(params: &MultinomialParams<S>, indices: &[usize]) -> Result<S> {
    raw_moment_with_arm(params, indices).map(|(v, _)| v)
}

/// `E[∏(ξ − E[ξ])]` over a 1-based tuple of length 1–4.
pub fn central_moment<S: Scalar>(params: &MultinomialParams<S>, indices: &[usize]) -> Result<S> {
    central_moment_with_arm(params, indices).map(|(v, _)| v)
}

/// Positional `x` factors and falling factorials of one query.
struct Terms<S> {
    x: Vec<S>,
    m: u64,
}

impl<S: Scalar> Terms<S> {
    fn new(params: &MultinomialParams<S>, indices: &[usize]) -> Self {
        Self {
            x: indices.iter().map(|&i| params.prob(i).clone()).collect(),
            m: params.m(),
        }
    }

    /// Product of the `x` factors at the given positions.
    fn x(&self, positions: &[usize]) -> S {
        positions
            .iter()
            .fold(S::one(), |acc, &t| acc * self.x[t].clone())
    }

    fn ff(&self, k: u32) -> S {
        falling_factorial(self.m, k)
    }

    fn m(&self) -> S {
        S::from_u64(self.m)
    }

    fn int(v: i64) -> S {
        S::from_i64(v)
    }
}

// Tuple positions.
const I: usize = 0;
const J: usize = 1;
const L: usize = 2;
const P: usize = 3;

pub fn raw_moment_with_arm<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
) -> Result<(S, Arm)> {
    params.check_query(indices)?;
    let pattern = canonical_pattern(indices);
    let t = Terms::new(params, indices);
    let c = Terms::<S>::int;
    let value = match pattern.labels() {
        [0] => t.m() * t.x(&[I]),

        [0, 1] => t.ff(2) * t.x(&[I, J]),
        // i = j
        [0, 0] => t.ff(2) * t.x(&[I, J]) + t.m() * t.x(&[I]),

        [0, 1, 2] => t.ff(3) * t.x(&[I, J, L]),
        // i = j ≠ ℓ ≠ i
        [0, 0, 1] => t.ff(3) * t.x(&[I, J, L]) + t.ff(2) * t.x(&[I, L]),
        // i ≠ j = ℓ ≠ i
        [0, 1, 1] => t.ff(3) * t.x(&[I, J, L]) + t.ff(2) * t.x(&[I, J]),
        // i ≠ j ≠ ℓ = i
        [0, 1, 0] => t.ff(3) * t.x(&[I, J, L]) + t.ff(2) * t.x(&[J, L]),
        // i = j = ℓ
        [0, 0, 0] => {
            t.ff(3) * t.x(&[I, J, L]) + c(3) * t.ff(2) * t.x(&[I, I]) + t.m() * t.x(&[I])
        }

        _ => {
            let all = t.ff(4) * t.x(&[I, J, L, P]);
            let extra = match pattern.labels() {
                [0, 1, 2, 3] => S::zero(),
                // {i = j ≠ ℓ ≠ i} ∩ {i ≠ p ≠ ℓ}
                [0, 0, 1, 2] => t.ff(3) * t.x(&[I, L, P]),
                // {i ≠ j = ℓ ≠ i} ∩ {i ≠ p ≠ j}
                [0, 1, 1, 2] => t.ff(3) * t.x(&[I, J, P]),
                // {i ≠ j ≠ ℓ = i} ∩ {j ≠ p ≠ ℓ}
                [0, 1, 0, 2] => t.ff(3) * t.x(&[J, L, P]),
                // {p = i} ∩ {j ≠ ℓ ≠ p ≠ j}
                [0, 1, 2, 0] => t.ff(3) * t.x(&[I, J, L]),
                // {p = j} ∩ {i ≠ ℓ ≠ p ≠ i}
                [0, 1, 2, 1] => t.ff(3) * t.x(&[I, J, L]),
                // {p = ℓ} ∩ {i ≠ j ≠ p ≠ i}
                [0, 1, 2, 2] => t.ff(3) * t.x(&[I, J, L]),
                // {i = j ≠ ℓ ≠ i} ∩ {i = p ≠ ℓ}
                [0, 0, 1, 0] => c(3) * t.ff(3) * t.x(&[I, I, L]) + t.ff(2) * t.x(&[I, L]),
                // {i ≠ j = ℓ ≠ i} ∩ {i ≠ p = j}
                [0, 1, 1, 1] => c(3) * t.ff(3) * t.x(&[I, J, J]) + t.ff(2) * t.x(&[I, J]),
                // {i ≠ j ≠ ℓ = i} ∩ {j ≠ p = ℓ}
                [0, 1, 0, 0] => c(3) * t.ff(3) * t.x(&[J, L, L]) + t.ff(2) * t.x(&[J, L]),
                // {i = j = ℓ ≠ p}
                [0, 0, 0, 1] => c(3) * t.ff(3) * t.x(&[I, I, P]) + t.ff(2) * t.x(&[I, P]),
                // {i = j ≠ ℓ ≠ i} ∩ {i ≠ p = ℓ}
                [0, 0, 1, 1] => {
                    t.ff(3) * t.x(&[I, I, L])
                        + t.ff(3) * t.x(&[I, L, L])
                        + t.ff(2) * t.x(&[I, L])
                }
                // {i ≠ j = ℓ ≠ i} ∩ {i = p ≠ j}
                [0, 1, 1, 0] => {
                    t.ff(3) * t.x(&[I, J, J])
                        + t.ff(3) * t.x(&[I, I, J])
                        + t.ff(2) * t.x(&[I, J])
                }
                // {i ≠ j ≠ ℓ = i} ∩ {j = p ≠ ℓ}
                [0, 1, 0, 1] => {
                    t.ff(3) * t.x(&[J, L, L])
                        + t.ff(3) * t.x(&[J, J, L])
                        + t.ff(2) * t.x(&[J, L])
                }
                // i = j = ℓ = p; the m⁽⁴⁾x_i⁴ term is `all`.
                [0, 0, 0, 0] => {
                    c(6) * t.ff(3) * t.x(&[I, I, I])
                        + c(7) * t.ff(2) * t.x(&[I, I])
                        + t.m() * t.x(&[I])
                }
                _ => unreachable!("order-4 pattern {pattern}"),
            };
            all + extra
        }
    };
    Ok((
        value,
        Arm {
            kind: MomentKind::Raw,
            pattern,
        },
    ))
}

pub fn central_moment_with_arm<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
) -> Result<(S, Arm)> {
    params.check_query(indices)?;
    let pattern = canonical_pattern(indices);
    let t = Terms::new(params, indices);
    let c = Terms::<S>::int;
    let m = t.m();
    let m2 = m.clone() * m.clone();
    let value = match pattern.labels() {
        [0] => S::zero(),

        // m(x_i 1{i=j} − x_i x_j)
        [0, 1] => -(m * t.x(&[I, J])),
        [0, 0] => m * (t.x(&[I]) - t.x(&[I, J])),

        // m(2x_i x_j x_ℓ − 1{i=j}x_i x_ℓ − 1{j=ℓ}x_i x_j − 1{i=ℓ}x_j x_ℓ + 1{i=j=ℓ}x_i)
        [0, 1, 2] => m * c(2) * t.x(&[I, J, L]),
        [0, 0, 1] => m * (c(2) * t.x(&[I, J, L]) - t.x(&[I, L])),
        [0, 1, 1] => m * (c(2) * t.x(&[I, J, L]) - t.x(&[I, J])),
        [0, 1, 0] => m * (c(2) * t.x(&[I, J, L]) - t.x(&[J, L])),
        [0, 0, 0] => m * (c(2) * t.x(&[I, J, L]) - c(3) * t.x(&[I, J]) + t.x(&[I])),

        _ => {
            // (3m² − 6m) x_i x_j x_ℓ x_p is common to every order-4 arm.
            let base = (c(3) * m2.clone() - c(6) * m.clone()) * t.x(&[I, J, L, P]);
            // One coincident pair: the m² brace term minus the matching (2m² − 2m) term.
            let one_pair = |distinct: [usize; 3]| -> S {
                -(m2.clone() - c(2) * m.clone()) * t.x(&distinct)
            };
            // Coincident triple {a,a,a,b}: three m² brace terms, the (6m² − 6m) term, and −m x_a x_b.
            let triple = |a: usize, b: usize| -> S {
                -(c(3) * m2.clone() - c(6) * m.clone()) * t.x(&[a, a, b]) - m.clone() * t.x(&[a, b])
            };
            // Two coincident pairs {a,a,b,b}: two m² terms, two (2m² − 2m) terms, and (m² − m) x_a x_b.
            let two_pairs = |a: usize, b: usize| -> S {
                -(m2.clone() - c(2) * m.clone()) * (t.x(&[a, a, b]) + t.x(&[a, b, b]))
                    + (m2.clone() - m.clone()) * t.x(&[a, b])
            };
            let extra = match pattern.labels() {
                [0, 1, 2, 3] => S::zero(),
                // 1{i=j}, ℓ ≠ i = j ≠ p
                [0, 0, 1, 2] => one_pair([I, L, P]),
                // 1{i=ℓ}, j ≠ i = ℓ ≠ p
                [0, 1, 0, 2] => one_pair([J, L, P]),
                // 1{i=p}, j ≠ i = p ≠ ℓ
                [0, 1, 2, 0] => one_pair([I, J, L]),
                // 1{j=ℓ}, i ≠ j = ℓ ≠ p
                [0, 1, 1, 2] => one_pair([I, J, P]),
                // 1{j=p}, i ≠ j = p ≠ ℓ
                [0, 1, 2, 1] => one_pair([I, J, L]),
                // 1{ℓ=p}, i ≠ ℓ = p ≠ j
                [0, 1, 2, 2] => one_pair([I, J, L]),
                // i = j = ℓ ≠ p
                [0, 0, 0, 1] => triple(I, P),
                // i = j = p ≠ ℓ
                [0, 0, 1, 0] => triple(I, L),
                // i = ℓ = p ≠ j
                [0, 1, 0, 0] => triple(L, J),
                // j = ℓ = p ≠ i
                [0, 1, 1, 1] => triple(J, I),
                // i = j ≠ ℓ = p
                [0, 0, 1, 1] => two_pairs(I, L),
                // i = p ≠ j = ℓ
                [0, 1, 1, 0] => two_pairs(I, J),
                // i = ℓ ≠ j = p
                [0, 1, 0, 1] => two_pairs(L, J),
                // i = j = ℓ = p
                [0, 0, 0, 0] => {
                    let xi = t.x(&[I]);
                    -(c(12) * m2.clone() - c(12) * m.clone()) * xi.powu(3)
                        + c(6) * m2.clone() * xi.powu(3)
                        + (c(3) * m2.clone() - c(7) * m.clone()) * xi.powu(2)
                        + m.clone() * xi
                }
                _ => unreachable!("order-4 pattern {pattern}"),
            };
            base + extra
        }
    };
    Ok((
        value,
        Arm {
            kind: MomentKind::Central,
            pattern,
        },
    ))
}

/// `E[∏ᵢ ξᵢ⁽ʳⁱ⁾] = m⁽Σr⁾ ∏ᵢ xᵢ^{rᵢ}`; zero when `Σr > m`.
pub fn factorial_moment<S: Scalar>(
    params: &MultinomialParams<S>,
    orders: &FactorialOrders,
) -> Result<S> {
    if orders.len() != params.d() {
        return Err(MomentError::LengthMismatch {
            expected: params.d(),
            got: orders.len(),
        });
    }
    let total = orders.total();
    if total > params.m() {
        return Ok(S::zero());
    }
    let powers = orders
        .orders()
        .iter()
        .zip(params.x())
        .fold(S::one(), |acc, (&r, xi)| acc * xi.powu(r));
    Ok(falling_factorial::<S>(params.m(), total as u32) * powers)
}

/// Counts how often each dispatch arm was taken.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArmCoverage {
    hits: BTreeMap<Arm, u64>,
}

impl ArmCoverage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, arm: Arm) {
        *self.hits.entry(arm).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &ArmCoverage) {
        for (arm, n) in &other.hits {
            *self.hits.entry(*arm).or_insert(0) += n;
        }
    }

    pub fn hits(&self, arm: &Arm) -> u64 {
        self.hits.get(arm).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arm, &u64)> {
        self.hits.iter()
    }

    /// Every arm of both kinds: 1 + 2 + 5 + 15 patterns each.
    pub fn all_arms() -> Vec<Arm> {
        [MomentKind::Raw, MomentKind::Central]
            .into_iter()
            .flat_map(|kind| {
                (1..=4).flat_map(move |order| {
                    EqualityPattern::all(order)
                        .into_iter()
                        .map(move |pattern| Arm { kind, pattern })
                })
            })
            .collect()
    }

    pub fn missing(&self) -> Vec<Arm> {
        Self::all_arms()
            .into_iter()
            .filter(|a| self.hits(a) == 0)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use crate::scalar::Exact;

    fn q(p: i64, r: i64) -> Exact {
        Exact::from_ratio(p, r)
    }

    fn params(m: u64, x: &[(i64, i64)]) -> MultinomialParams<Exact> {
        validate_params(m, x.iter().map(|&(p, r)| q(p, r)).collect()).unwrap()
    }

    #[test]
    fn raw_examples() {
        assert_eq!(raw_moment(&params(3, &[(1, 2), (1, 5)]), &[1]).unwrap(), q(3, 2));
        assert_eq!(raw_moment(&params(2, &[(1, 2), (1, 4)]), &[1, 1]).unwrap(), q(3, 2));
        assert_eq!(raw_moment(&params(3, &[(1, 2)]), &[1, 1, 1]).unwrap(), q(27, 4));
    }

    #[test]
    fn central_examples() {
        assert_eq!(central_moment(&params(7, &[(1, 3), (1, 3)]), &[2]).unwrap(), q(0, 1));
        assert_eq!(
            central_moment(&params(2, &[(1, 2), (1, 4)]), &[1, 2]).unwrap(),
            q(-1, 4)
        );
        assert_eq!(
            central_moment(&params(2, &[(1, 3), (1, 3)]), &[1, 1, 2]).unwrap(),
            q(-2, 27)
        );
        assert_eq!(
            central_moment(&params(2, &[(1, 2), (1, 4)]), &[1, 1, 2, 2]).unwrap(),
            q(1, 4)
        );
        assert_eq!(
            central_moment(&params(2, &[(1, 2)]), &[1, 1, 1, 1]).unwrap(),
            q(1, 2)
        );
    }

    #[test]
    fn factorial_examples() {
        let p = params(2, &[(1, 2), (1, 4)]);
        let f = |r: Vec<u32>| factorial_moment(&p, &FactorialOrders::new(r));
        assert_eq!(f(vec![1, 1]).unwrap(), q(1, 4));
        assert_eq!(f(vec![2, 0]).unwrap(), q(1, 2));
        assert_eq!(f(vec![0, 0]).unwrap(), q(1, 1));
        assert_eq!(f(vec![3, 0]).unwrap(), q(0, 1));
        assert_eq!(
            f(vec![1]),
            Err(MomentError::LengthMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn errors() {
        let p = params(2, &[(1, 2), (1, 4)]);
        assert_eq!(
            raw_moment(&p, &[1, 3]),
            Err(MomentError::IndexOutOfRange { index: 3, d: 2 })
        );
        assert_eq!(central_moment(&p, &[]), Err(MomentError::BadOrder(0)));
    }

    #[test]
    fn falling_factorial_type() {
        assert_eq!(FallingFactorial::new(5, 0).value(), Some(1));
        assert_eq!(FallingFactorial::new(5, 2).value(), Some(20));
        assert_eq!(FallingFactorial::new(2, 3).value(), Some(0));
        assert_eq!(FallingFactorial::new(u64::MAX, 4).value(), None);
        assert_eq!(FallingFactorial::new(6, 3).to_scalar::<Exact>(), q(120, 1));
    }

    #[test]
    fn arm_catalogue_has_23_per_kind() {
        let arms = ArmCoverage::all_arms();
        assert_eq!(arms.len(), 46);
        let mut cov = ArmCoverage::new();
        let p = params(3, &[(1, 5), (1, 5), (1, 5), (1, 5)]);
        for order in 1..=4 {
            for tuple in crate::model::index_tuples(order, 4) {
                cov.record(raw_moment_with_arm(&p, &tuple).unwrap().1);
                cov.record(central_moment_with_arm(&p, &tuple).unwrap().1);
            }
        }
        assert!(cov.missing().is_empty());
    }

    #[test]
    fn float_mode_agrees() {
        let pf = validate_params(5, vec![0.2, 0.3, 0.1]).unwrap();
        let pe = params(5, &[(1, 5), (3, 10), (1, 10)]);
        for tuple in crate::model::index_tuples(4, 3) {
            let a = central_moment(&pf, &tuple).unwrap();
            let b = central_moment(&pe, &tuple).unwrap().to_f64();
            assert!((a - b).abs() < 1e-12, "{tuple:?}: {a} vs {b}");
        }
    }
}
