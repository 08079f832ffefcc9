//! Parsing of list and range flag values.

use std::ops::RangeInclusive;
use std::str::FromStr;

use multimoments::{MomentError, Scalar};

/// Comma-separated numbers, e.g. `1,1,2,2`.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, MomentError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| MomentError::Parse(format!("invalid {what} entry {part:?} in {s:?}")))
        })
        .collect()
}

/// Comma-separated rationals or decimals.
pub fn parse_probabilities<S: Scalar>(s: &str) -> Result<Vec<S>, MomentError> {
    s.split(',').map(S::parse_literal).collect()
}

/// `a..b` (inclusive) or a single value `a`.
pub fn parse_range<T>(s: &str, what: &str) -> Result<RangeInclusive<T>, MomentError>
where
    T: FromStr + PartialOrd + Copy,
{
    let bad = || MomentError::Parse(format!("invalid {what} range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            )
        }
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use multimoments::Exact;

    #[test]
    fn ranges() {
        assert_eq!(parse_range::<u64>("1..5", "m").unwrap(), 1..=5);
        assert_eq!(parse_range::<u64>("1..=5", "m").unwrap(), 1..=5);
        assert_eq!(parse_range::<usize>("3", "d").unwrap(), 3..=3);
        assert!(parse_range::<u64>("5..1", "m").is_err());
        assert!(parse_range::<u64>("a..b", "m").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<usize>("1, 1,2", "index").unwrap(), vec![1, 1, 2]);
        assert!(parse_list::<usize>("1,,2", "index").is_err());
        assert_eq!(
            parse_probabilities::<Exact>("1/2,0.25").unwrap(),
            vec![Exact::from_ratio(1, 2), Exact::from_ratio(1, 4)]
        );
    }
}
