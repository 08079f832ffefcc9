//! Joint moments of the multinomial distribution.
//!
//! Closed forms for raw and central moments of orders one to four (and for
//! joint factorial moments of any order), together with independent oracles
//! used to certify them:
//!
//! * [`enum_oracle`] sums over the full lattice support,
//! * [`mgf_oracle`] differentiates the moment generating function with
//!   truncated Taylor arithmetic,
//! * [`expansion`] rebuilds central moments from raw ones,
//! * [`mc_oracle`] estimates moments by simulation.
//!
//! Every formula and oracle is generic over [`Scalar`], realized by exact
//! rationals ([`Exact`]) and `f64`.
//!
//! ```
//! use multimoments::{central_moment, validate_params, Exact, Scalar};
//!
//! let params = validate_params(2, vec![Exact::from_ratio(1, 2), Exact::from_ratio(1, 4)]).unwrap();
//! let v: Exact = central_moment(&params, &[1, 1, 2, 2]).unwrap();
//! assert_eq!(v.render(), "1/4");
//! ```

pub mod enum_oracle;
pub mod error;
pub mod expansion;
pub mod formulas;
pub mod mc_oracle;
pub mod mgf_oracle;
pub mod model;
pub mod scalar;

pub use enum_oracle::{moment_via_enumeration, pmf, support, LatticePoint, SupportTable};
pub use error::{MomentError, Result};
pub use expansion::central_from_raw;
pub use formulas::{central_moment, factorial_moment, raw_moment, Arm, ArmCoverage, MomentResult};
pub use mc_oracle::{moment_via_mc, McEstimate, McSampleSet};
pub use mgf_oracle::{exp_jet, mgf_jet, raw_moment_via_mgf, MgfJet, TruncatedSeries};
pub use model::{
    canonical_pattern, index_tuples, validate_params, EqualityPattern, FactorialOrders,
    MomentKind, MomentQuery, MultinomialParams,
};
pub use scalar::{Exact, Mode, Scalar};
