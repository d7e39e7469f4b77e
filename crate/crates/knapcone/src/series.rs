//! Truncated univariate power series with exact rational coefficients.
//!
//! These back the numeric specialization step: after substituting
//! `y_i = exp(c_i t)` along a generic integer direction, every denominator
//! binomial contributes one Todd factor `B t / (exp(B t) - 1)` and the limit
//! at all-variables-one becomes a single coefficient extraction in `t`.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A power series truncated at a fixed order: exactly `order + 1` rational
/// coefficients for `t^0 ..= t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = BigRational::one();
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Exact truncated product; both operands must share the same order.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.order(), other.order(), "order mismatch");
        let n = self.order();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn invert(&self) -> TruncatedSeries {
        assert!(!self.coeffs[0].is_zero(), "constant term must be nonzero");
        let n = self.order();
        let inv0 = self.coeffs[0].recip();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[0] = inv0.clone();
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += &self.coeffs[j] * &coeffs[k - j];
            }
            coeffs[k] = -acc * &inv0;
        }
        TruncatedSeries { coeffs }
    }
}

/// The exact truncated series of `exp(C t)`.
pub fn series_exp(c: &BigRational, order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = BigRational::one();
    coeffs.push(term.clone());
    for k in 1..=order {
        term = term * c / BigRational::from(BigInt::from(k as u64));
        coeffs.push(term.clone());
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// The Todd factor `(B t) / (exp(B t) - 1)` truncated at the given order,
/// computed by exact inversion of the truncated series of `(exp(x) - 1)/x`
/// at `x = B t`.
pub fn todd_factor_series(b: &BigRational, order: usize) -> Result<TruncatedSeries> {
    if b.is_zero() {
        return Err(Error::ZeroDirection);
    }
    // (exp(Bt) - 1) / (Bt) has coefficient B^k / (k+1)! at t^k
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = BigRational::one();
    coeffs.push(term.clone());
    for k in 1..=order {
        term = term * b / BigRational::from(BigInt::from((k + 1) as u64));
        coeffs.push(term.clone());
    }
    Ok(TruncatedSeries::from_coeffs(coeffs).invert())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exp_small_orders() {
        assert_eq!(
            series_exp(&rat(0, 1), 3),
            TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)])
        );
        assert_eq!(
            series_exp(&rat(1, 1), 2),
            TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(1, 1), rat(1, 2)])
        );
    }

    #[test]
    fn product_of_conjugates() {
        let a = TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
        let b = TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(-1, 1), rat(0, 1)]);
        assert_eq!(
            a.mul(&b),
            TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(0, 1), rat(-1, 1)])
        );
    }

    #[test]
    fn todd_reference_values() {
        // 1 - t/2 + t^2/12, by inverting 1 + x/2 + x^2/6
        assert_eq!(
            todd_factor_series(&rat(1, 1), 2).unwrap(),
            TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(-1, 2), rat(1, 12)])
        );
        assert_eq!(
            todd_factor_series(&rat(1, 1), 0).unwrap(),
            TruncatedSeries::from_coeffs(vec![rat(1, 1)])
        );
        // substituting 2t into the B=1 series
        assert_eq!(
            todd_factor_series(&rat(2, 1), 1).unwrap(),
            TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(-1, 1)])
        );
        assert_eq!(
            todd_factor_series(&rat(0, 1), 3),
            Err(Error::ZeroDirection)
        );
    }

    #[test]
    fn todd_times_conjugate_is_one() {
        for b in [rat(1, 1), rat(3, 1), rat(-5, 2), rat(7, 3)] {
            let order = 6;
            let todd = todd_factor_series(&b, order).unwrap();
            // (exp(Bt)-1)/(Bt)
            let mut coeffs = Vec::with_capacity(order + 1);
            let mut term = BigRational::one();
            coeffs.push(term.clone());
            for k in 1..=order {
                term = term * &b / BigRational::from(BigInt::from((k + 1) as u64));
                coeffs.push(term.clone());
            }
            let g = TruncatedSeries::from_coeffs(coeffs);
            assert_eq!(todd.mul(&g), TruncatedSeries::one(order));
        }
    }
}
