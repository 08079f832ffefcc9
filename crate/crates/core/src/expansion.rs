//! Central moments rebuilt from raw moments by expanding `∏(ξ − mx)`.
//!
//! The expansion runs over subsets of tuple *positions*, so repeated
//! indices need no special handling and nothing is simplified by hand.

use crate::error::Result;
use crate::formulas::raw_moment;
use crate::model::MultinomialParams;
use crate::scalar::Scalar;

/// `Σ_{S ⊆ positions} (−1)^{k−|S|} E[∏_{t∈S} ξ_t] ∏_{t∉S} m x_t`.
pub fn central_from_raw<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
) -> Result<S> {
    central_from_raw_counted(params, indices).map(|(v, _)| v)
}

/// Same as [`central_from_raw`], also returning the number of signed terms summed.
pub fn central_from_raw_counted<S: Scalar>(
    params: &MultinomialParams<S>,
    indices: &[usize],
) -> Result<(S, usize)> {
    params.check_query(indices)?;
    let k = indices.len();
    let means: Vec<S> = indices.iter().map(|&i| params.mean(i)).collect();
    let mut total = S::zero();
    let mut terms = 0;
    let mut subset = Vec::with_capacity(k);
    for mask in 0u32..(1 << k) {
        subset.clear();
        let mut complement = S::one();
        for (t, &idx) in indices.iter().enumerate() {
            if mask & (1 << t) != 0 {
                subset.push(idx);
            } else {
                complement = complement * means[t].clone();
            }
        }
        let raw = if subset.is_empty() {
            S::one()
        } else {
            raw_moment(params, &subset)?
        };
        let term = raw * complement;
        if (k - subset.len()).is_multiple_of(2) {
            total = total + term;
        } else {
            total = total - term;
        }
        terms += 1;
    }
    Ok((total, terms))
}
