//! Raw moments from the moment generating function, by truncated Taylor
//! arithmetic.
//!
//! `M(t) = (1 − Σx + Σ x_i e^{t_i})^m` is expanded as a multivariate
//! polynomial in at most four formal variables, truncated at a total degree
//! of at most four. The coefficient of `∏ t^a` times `∏ a!` is the mixed
//! partial derivative at `t = 0`, i.e. the raw moment. Only ring operations
//! are used, so exact rationals stay exact.

use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock};

use crate::error::{MomentError, Result};
use crate::model::{MultinomialParams, MAX_ORDER};
use crate::scalar::Scalar;

pub const MAX_VARS: usize = 4;
pub const MAX_DEGREE: usize = 4;

type Exponents = [u8; MAX_VARS];

/// Dense monomial layout for a given variable count and degree bound.
#[derive(Debug)]
struct Layout {
    vars: usize,
    degree: usize,
    /// Exponent vector of each slot, graded by total degree.
    exps: Vec<Exponents>,
    /// Mixed-radix code (base `degree + 1`) to slot, `u16::MAX` when over the bound.
    slot_of: Vec<u16>,
    /// `(a, b, dest)` for every pair of slots whose product stays within the bound.
    products: Vec<(u16, u16, u16)>,
}

impl Layout {
    fn build(vars: usize, degree: usize) -> Layout {
        let radix = degree + 1;
        let cells = radix.pow(vars as u32);
        let decode = |mut code: usize| {
            let mut e = [0u8; MAX_VARS];
            for slot in e.iter_mut().take(vars) {
                *slot = (code % radix) as u8;
                code /= radix;
            }
            e
        };
        let total = |e: &Exponents| e.iter().map(|&v| v as usize).sum::<usize>();
        let mut exps: Vec<Exponents> = (0..cells)
            .map(decode)
            .filter(|e| total(e) <= degree)
            .collect();
        exps.sort_by_key(|e| (total(e), std::cmp::Reverse(*e)));
        let mut slot_of = vec![u16::MAX; cells];
        for (s, e) in exps.iter().enumerate() {
            slot_of[Self::code(e, vars, radix)] = s as u16;
        }
        let mut products = Vec::new();
        for (a, ea) in exps.iter().enumerate() {
            for (b, eb) in exps.iter().enumerate() {
                if total(ea) + total(eb) > degree {
                    continue;
                }
                let mut sum = [0u8; MAX_VARS];
                for v in 0..vars {
                    sum[v] = ea[v] + eb[v];
                }
                let dest = slot_of[Self::code(&sum, vars, radix)];
                products.push((a as u16, b as u16, dest));
            }
        }
        Layout {
            vars,
            degree,
            exps,
            slot_of,
            products,
        }
    }

    fn code(e: &Exponents, vars: usize, radix: usize) -> usize {
        (0..vars).rev().fold(0, |acc, v| acc * radix + e[v] as usize)
    }

    fn slot(&self, e: &Exponents) -> Option<usize> {
        if e[..self.vars].iter().map(|&v| v as usize).sum::<usize>() > self.degree {
            return None;
        }
        if e[self.vars..].iter().any(|&v| v != 0) {
            return None;
        }
        let s = self.slot_of[Self::code(e, self.vars, self.degree + 1)];
        (s != u16::MAX).then_some(s as usize)
    }

    fn get(vars: usize, degree: usize) -> Arc<Layout> {
        static LAYOUTS: OnceLock<Vec<Arc<Layout>>> = OnceLock::new();
        let all = LAYOUTS.get_or_init(|| {
            (0..=MAX_VARS)
                .flat_map(|v| (0..=MAX_DEGREE).map(move |d| Arc::new(Layout::build(v, d))))
                .collect()
        });
        assert!(vars <= MAX_VARS && degree <= MAX_DEGREE, "jet too large");
        all[vars * (MAX_DEGREE + 1) + degree].clone()
    }
}

/// Multivariate polynomial truncated at a total degree.
#[derive(Debug, Clone)]
pub struct TruncatedSeries<S> {
    layout: Arc<Layout>,
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn zero(vars: usize, degree: usize) -> Self {
        let layout = Layout::get(vars, degree);
        let coeffs = vec![S::zero(); layout.exps.len()];
        Self { layout, coeffs }
    }

    pub fn constant(value: S, vars: usize, degree: usize) -> Self {
        let mut s = Self::zero(vars, degree);
        s.coeffs[0] = value;
        s
    }

    /// The formal variable `t_var` (0-based slot).
    pub fn variable(var: usize, vars: usize, degree: usize) -> Self {
        assert!(var < vars, "variable slot {var} out of {vars}");
        let mut s = Self::zero(vars, degree);
        let mut e = [0u8; MAX_VARS];
        e[var] = 1;
        if let Some(slot) = s.layout.slot(&e) {
            s.coeffs[slot] = S::one();
        }
        s
    }

    /// Builds a series from explicit `(exponents, coefficient)` terms; terms above the bound are dropped.
    pub fn from_terms(vars: usize, degree: usize, terms: &[(Vec<u8>, S)]) -> Self {
        let mut s = Self::zero(vars, degree);
        for (exps, c) in terms {
            if let Some(slot) = exps_array(exps).and_then(|e| s.layout.slot(&e)) {
                s.coeffs[slot] = s.coeffs[slot].clone() + c.clone();
            }
        }
        s
    }

    pub fn vars(&self) -> usize {
        self.layout.vars
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `∏ t^exps`; zero for monomials above the bound.
    pub fn coeff(&self, exps: &[u8]) -> S {
        exps_array(exps)
            .and_then(|e| self.layout.slot(&e))
            .map_or_else(S::zero, |s| self.coeffs[s].clone())
    }

    /// Non-zero terms as `(exponents, coefficient)`, graded order.
    pub fn terms(&self) -> Vec<(Vec<u8>, S)> {
        self.layout
            .exps
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e[..self.layout.vars].to_vec(), c.clone()))
            .collect()
    }

    pub fn scale(&self, k: &S) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect(),
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.layout, &other.layout),
            "series over different layouts"
        );
    }

    /// Truncated product.
    pub fn mul_truncated(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = vec![S::zero(); self.coeffs.len()];
        let mut skip = None;
        for &(a, b, dest) in &self.layout.products {
            if skip == Some(a) {
                continue;
            }
            let ca = &self.coeffs[a as usize];
            if ca.is_zero() {
                skip = Some(a);
                continue;
            }
            let cb = &other.coeffs[b as usize];
            if cb.is_zero() {
                continue;
            }
            let d = dest as usize;
            out[d] = std::mem::replace(&mut out[d], S::zero()) + ca.clone() * cb.clone();
        }
        Self {
            layout: self.layout.clone(),
            coeffs: out,
        }
    }

    /// `self^n` by repeated squaring, truncating after every product.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = Self::constant(S::one(), self.vars(), self.degree());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_truncated(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_truncated(&base);
            }
        }
        result
    }

    /// `self^n` by `n` successive products.
    pub fn pow_naive(&self, n: u64) -> Self {
        (0..n).fold(
            Self::constant(S::one(), self.vars(), self.degree()),
            |acc, _| acc.mul_truncated(self),
        )
    }
}

fn exps_array(exps: &[u8]) -> Option<Exponents> {
    if exps.len() > MAX_VARS {
        return None;
    }
    let mut e = [0u8; MAX_VARS];
    e[..exps.len()].copy_from_slice(exps);
    Some(e)
}

impl<S: Scalar> PartialEq for TruncatedSeries<S> {
    fn eq(&self, other: &Self) -> bool {
        self.layout.vars == other.layout.vars
            && self.layout.degree == other.layout.degree
            && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> Add for &TruncatedSeries<S> {
    type Output = TruncatedSeries<S>;

    fn add(self, rhs: Self) -> TruncatedSeries<S> {
        self.check_compatible(rhs);
        TruncatedSeries {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &TruncatedSeries<S> {
    type Output = TruncatedSeries<S>;

    fn sub(self, rhs: Self) -> TruncatedSeries<S> {
        self.check_compatible(rhs);
        TruncatedSeries {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &TruncatedSeries<S> {
    type Output = TruncatedSeries<S>;

    fn mul(self, rhs: Self) -> TruncatedSeries<S> {
        self.mul_truncated(rhs)
    }
}

/// `Σ_{k≤D} t_var^k / k!`.
pub fn exp_jet<S: Scalar>(var: usize, vars: usize, degree: usize) -> TruncatedSeries<S> {
    let mut s = TruncatedSeries::zero(vars, degree);
    let mut e = [0u8; MAX_VARS];
    let mut factorial = 1i64;
    for k in 0..=degree {
        if k > 0 {
            factorial *= k as i64;
        }
        e[var] = k as u8;
        let slot = s.layout.slot(&e).expect("within bound");
        s.coeffs[slot] = S::from_ratio(1, factorial);
    }
    s
}

/// Truncated MGF with one formal variable per listed category.
#[derive(Debug, Clone)]
pub struct MgfJet<S> {
    /// 1-based category carried by each variable slot.
    categories: Vec<usize>,
    series: TruncatedSeries<S>,
}

impl<S: Scalar> MgfJet<S> {
    /// Expands `M(t)` in the given (distinct, 1-based) categories up to total degree `degree`.
    ///
    /// Categories not listed sit at `t = 0` and contribute `x_i` to the constant.
    pub fn build(
        params: &MultinomialParams<S>,
        categories: &[usize],
        degree: usize,
    ) -> Result<Self> {
        params.check_indices(categories)?;
        if categories.len() > MAX_VARS || degree > MAX_DEGREE {
            return Err(MomentError::BadOrder(categories.len().max(degree)));
        }
        let vars = categories.len();
        let mut constant = params.remainder();
        for i in 1..=params.d() {
            if !categories.contains(&i) {
                constant = constant + params.prob(i).clone();
            }
        }
        let mut base = TruncatedSeries::constant(constant, vars, degree);
        for (slot, &c) in categories.iter().enumerate() {
            let term = exp_jet::<S>(slot, vars, degree).scale(params.prob(c));
            base = &base + &term;
        }
        Ok(Self {
            categories: categories.to_vec(),
            series: base.pow(params.m()),
        })
    }

    pub fn series(&self) -> &TruncatedSeries<S> {
        &self.series
    }

    pub fn categories(&self) -> &[usize] {
        &self.categories
    }

    /// Raw moment of a tuple whose categories all carry a variable and whose length fits the degree.
    pub fn moment(&self, indices: &[usize]) -> Result<S> {
        if indices.len() > self.series.degree() {
            return Err(MomentError::BadOrder(indices.len()));
        }
        let mut exps = vec![0u8; self.categories.len()];
        for &i in indices {
            let slot = self
                .categories
                .iter()
                .position(|&c| c == i)
                .ok_or(MomentError::IndexOutOfRange {
                    index: i,
                    d: self.categories.len(),
                })?;
            exps[slot] += 1;
        }
        let multiplier = exps
            .iter()
            .flat_map(|&a| 1..=i64::from(a))
            .product::<i64>();
        Ok(self.series.coeff(&exps) * S::from_i64(multiplier))
    }
}

/// Distinct categories of a tuple, in order of first appearance.
fn distinct(indices: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(indices.len());
    for &i in indices {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// MGF jet over the distinct categories of a query, truncated at the tuple length.
pub fn mgf_jet<S: Scalar>(
    params: &MultinomialParams<S>,
    query_indices: &[usize],
) -> Result<TruncatedSeries<S>> {
    params.check_query(query_indices)?;
    MgfJet::build(params, &distinct(query_indices), query_indices.len()).map(|j| j.series)
}

/// Mixed partial derivative of the MGF at zero for a tuple of length 1–4.
pub fn raw_moment_via_mgf<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
) -> Result<S> {
    params.check_query(indices)?;
    debug_assert!(indices.len() <= MAX_ORDER);
    MgfJet::build(params, &distinct(indices), indices.len())?.moment(indices)
}
