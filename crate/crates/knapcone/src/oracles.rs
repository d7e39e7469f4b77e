//! Independent ground-truth engines for the test and acceptance suites:
//! dynamic-programming denumerant counting and truncated iterated-Laurent
//! expansion of Elliott term sums.
//!
//! The expansion engine enumerates the geometric series of every (Small)
//! denominator factor inside a box region. Caps follow from the lex structure
//! of the field: a Small monomial has a positive leading exponent, so factors
//! grouped by leading coordinate are bounded by that coordinate's radius plus
//! whatever earlier groups can cancel. The resulting table is complete for
//! the requested box, which is what makes coefficient-wise comparison sound.

use crate::elliott::{CTTerm, Magnitude};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Classic coin-counting table: the number of ways to write `a0` as a
/// nonnegative combination of the entries of `a`, with exact big integers.
pub fn dp_count(a0: u64, a: &[u64]) -> BigUint {
    let n = a0 as usize;
    let mut table = vec![BigUint::zero(); n + 1];
    table[0] = BigUint::from(1u32);
    for &coin in a {
        let c = coin as usize;
        if c == 0 {
            continue;
        }
        for i in c..=n {
            let add = table[i - c].clone();
            table[i] += add;
        }
    }
    table.pop().unwrap_or_else(|| BigUint::from(1u32))
}

/// Reachability-only variant of [`dp_count`]: a bitset of representable
/// values up to `a0`. Suitable for Frobenius checks at sizes where exact
/// counts would not fit in memory.
pub fn dp_reachable(a0: u64, a: &[u64]) -> Vec<bool> {
    let n = a0 as usize;
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &coin in a {
        let c = coin as usize;
        if c == 0 || c > n {
            continue;
        }
        for i in c..=n {
            if reach[i - c] {
                reach[i] = true;
            }
        }
    }
    reach
}

/// A table of exact series coefficients keyed by full exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    pub entries: BTreeMap<Vec<BigRational>, BigRational>,
}

impl SeriesTable {
    pub fn coeff(&self, key: &[BigRational]) -> BigRational {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeff_i64(&self, key: &[i64]) -> BigRational {
        let k: Vec<BigRational> = key
            .iter()
            .map(|&e| BigRational::from(BigInt::from(e)))
            .collect();
        self.coeff(&k)
    }

    /// Restrict to entries whose total absolute degree over `coords` is at
    /// most `t`.
    pub fn truncate_total(&self, coords: &[usize], t: u64) -> SeriesTable {
        let bound = BigRational::from(BigInt::from(t));
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| {
                let total: BigRational = coords.iter().map(|&c| k[c].abs()).sum();
                total <= bound
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        SeriesTable { entries }
    }
}

/// Expand a sum of Elliott terms inside a per-coordinate box.
///
/// `radii[c] = Some(r)` bounds the total exponent of coordinate `c` to
/// `[-r, r]`; `None` leaves it unbounded. Every factor must be Small; every
/// factor's leading coordinate must be bounded, otherwise the region cannot
/// cap its geometric series.
pub fn expand_in_region(terms: &[CTTerm], radii: &[Option<u64>]) -> Result<SeriesTable> {
    let mut entries: BTreeMap<Vec<BigRational>, BigRational> = BTreeMap::new();
    let radii_rat: Vec<Option<BigRational>> = radii
        .iter()
        .map(|r| r.map(|x| BigRational::from(BigInt::from(x))))
        .collect();
    for term in terms {
        for (coeff, num) in term.numerator.terms() {
            expand_one(term, num.exps(), coeff, &radii_rat, &mut entries)?;
        }
    }
    entries.retain(|_, v| !v.is_zero());
    Ok(SeriesTable { entries })
}

fn expand_one(
    term: &CTTerm,
    gamma: &[BigRational],
    coeff: &BigRational,
    radii: &[Option<BigRational>],
    entries: &mut BTreeMap<Vec<BigRational>, BigRational>,
) -> Result<()> {
    let width = gamma.len();
    let factors: Vec<&[BigRational]> = term
        .denominator
        .iter()
        .map(|f| {
            if f.u.compare_to_one() != Magnitude::Small {
                return Err(Error::NonProperFactor);
            }
            Ok(f.u.exps())
        })
        .collect::<Result<_>>()?;

    // leading coordinate of each factor
    let leads: Vec<usize> = factors
        .iter()
        .map(|v| v.iter().position(|e| !e.is_zero()).unwrap())
        .collect();

    // process factors grouped by leading coordinate, ascending
    let mut order: Vec<usize> = (0..factors.len()).collect();
    order.sort_by_key(|&f| leads[f]);

    // caps per factor, derived coordinate class by coordinate class
    let mut caps = vec![0u64; factors.len()];
    {
        // running most-negative contribution of already-capped factors
        let mut lo = vec![BigRational::zero(); width];
        let mut i = 0;
        while i < order.len() {
            let c = leads[order[i]];
            let mut j = i;
            while j < order.len() && leads[order[j]] == c {
                j += 1;
            }
            let radius = radii[c].as_ref().ok_or_else(|| {
                Error::UnboundedExpansion(format!("factor leads at unbounded coordinate {c}"))
            })?;
            let budget = radius - &gamma[c] - &lo[c];
            for &f in &order[i..j] {
                let v = &factors[f][c];
                debug_assert!(v.is_positive());
                caps[f] = if budget.is_negative() {
                    0
                } else {
                    (&budget / v)
                        .floor()
                        .to_integer()
                        .to_u64()
                        .ok_or_else(|| Error::UnboundedExpansion("cap overflows u64".into()))?
                };
            }
            // fold the new group's most-negative reach into `lo`
            for &f in &order[i..j] {
                let cap = BigRational::from(BigInt::from(caps[f]));
                for (x, l) in factors[f].iter().zip(lo.iter_mut()) {
                    if x.is_negative() {
                        *l += x * &cap;
                    }
                }
            }
            i = j;
        }
    }

    // suffix reach intervals for pruning
    let nf = factors.len();
    let mut suffix_lo = vec![vec![BigRational::zero(); width]; nf + 1];
    let mut suffix_hi = vec![vec![BigRational::zero(); width]; nf + 1];
    for i in (0..nf).rev() {
        let f = order[i];
        let cap = BigRational::from(BigInt::from(caps[f]));
        for c in 0..width {
            let reach = &factors[f][c] * &cap;
            if reach.is_negative() {
                suffix_lo[i][c] = &suffix_lo[i + 1][c] + &reach;
                suffix_hi[i][c] = suffix_hi[i + 1][c].clone();
            } else {
                suffix_lo[i][c] = suffix_lo[i + 1][c].clone();
                suffix_hi[i][c] = &suffix_hi[i + 1][c] + &reach;
            }
        }
    }

    // depth-first enumeration with interval pruning on bounded coordinates
    let mut point: Vec<BigRational> = gamma.to_vec();
    dfs(
        0,
        &order,
        &factors,
        &caps,
        &suffix_lo,
        &suffix_hi,
        radii,
        coeff,
        &mut point,
        entries,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    i: usize,
    order: &[usize],
    factors: &[&[BigRational]],
    caps: &[u64],
    suffix_lo: &[Vec<BigRational>],
    suffix_hi: &[Vec<BigRational>],
    radii: &[Option<BigRational>],
    coeff: &BigRational,
    point: &mut Vec<BigRational>,
    entries: &mut BTreeMap<Vec<BigRational>, BigRational>,
) {
    // prune when some bounded coordinate cannot return to its box
    for (c, radius) in radii.iter().enumerate() {
        if let Some(r) = radius {
            if &point[c] + &suffix_hi[i][c] < -r.clone() || &point[c] + &suffix_lo[i][c] > *r {
                return;
            }
        }
    }
    if i == order.len() {
        let entry = entries
            .entry(point.clone())
            .or_insert_with(BigRational::zero);
        *entry += coeff;
        return;
    }
    let f = order[i];
    for k in 0..=caps[f] {
        if k > 0 {
            for (p, v) in point.iter_mut().zip(factors[f]) {
                *p += v;
            }
        }
        dfs(
            i + 1, order, factors, caps, suffix_lo, suffix_hi, radii, coeff, point, entries,
        );
    }
    // undo the k additions
    let kmax = BigRational::from(BigInt::from(caps[f]));
    for (p, v) in point.iter_mut().zip(factors[f]) {
        *p -= v * &kmax;
    }
}

/// Truncated constant-term oracle: expands every factor geometrically,
/// keeps monomials whose exponents vanish on `elim`, and reports
/// coefficients with every slack-variable degree bounded by `t` in absolute
/// value.
pub fn series_ct_oracle(
    terms: &[CTTerm],
    elim: &[usize],
    slack: &[usize],
    t: u64,
    width: usize,
) -> Result<SeriesTable> {
    let mut radii: Vec<Option<u64>> = vec![None; width];
    for &c in slack {
        radii[c] = Some(t);
    }
    for &c in elim {
        radii[c] = Some(0);
    }
    expand_in_region(terms, &radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliott::{BinomialFactor, LaurentPoly, Monomial};
    use num_traits::One;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn term(num_exps: &[i64], dens: &[&[i64]]) -> CTTerm {
        CTTerm::new(
            LaurentPoly::monomial(BigRational::one(), Monomial::from_i64(num_exps)),
            dens.iter()
                .map(|d| BinomialFactor::new(Monomial::from_i64(d)).unwrap())
                .collect(),
        )
    }

    #[test]
    fn dp_reference_values() {
        assert_eq!(dp_count(0, &[3, 5, 7]), BigUint::from(1u32));
        assert_eq!(dp_count(15, &[7, 2, 3]), BigUint::from(5u32));
        assert_eq!(dp_count(1, &[2, 3]), BigUint::zero());
        // symmetric in the coin order
        assert_eq!(dp_count(100, &[3, 5, 7]), dp_count(100, &[7, 3, 5]));
        // monotone when 1 is a coin
        let mut prev = BigUint::zero();
        for a0 in 0..50 {
            let d = dp_count(a0, &[1, 4, 9]);
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn reachability_matches_count() {
        let a = [4u64, 7, 9];
        let reach = dp_reachable(60, &a);
        for a0 in 0..=60u64 {
            assert_eq!(reach[a0 as usize], !dp_count(a0, &a).is_zero(), "a0={a0}");
        }
    }

    #[test]
    fn single_slacked_geometric_series() {
        // 1/(1 - z l y), eliminating l, truncation 3: only the constant 1
        let e = term(&[0, 0, 0], &[&[1, 1, 1]]);
        let t = series_ct_oracle(&[e], &[1], &[0], 3, 3).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.coeff_i64(&[0, 0, 0]), rat(1));
    }

    #[test]
    fn two_factor_cancellation() {
        // 1/((1 - z1 l)(1 - z2 l^-1 y)) with order (z1, z2, l, y):
        // coefficient of z1 z2 is y, of z1^2 z2^2 is y^2
        let e = term(&[0, 0, 0, 0], &[&[1, 0, 1, 0], &[0, 1, -1, 1]]);
        let t = series_ct_oracle(&[e], &[2], &[0, 1], 2, 4).unwrap();
        assert_eq!(t.coeff_i64(&[1, 1, 0, 1]), rat(1));
        assert_eq!(t.coeff_i64(&[2, 2, 0, 2]), rat(1));
        assert_eq!(t.coeff_i64(&[1, 1, 0, 0]), rat(0));
        assert_eq!(t.coeff_i64(&[0, 0, 0, 0]), rat(1));
    }

    #[test]
    fn denumerant_ct_matches_dp() {
        // CT_l of l^-a0 / prod (1 - y_i l^{a_i}) counts solutions; compare
        // table mass against the dp oracle
        for (a0, a) in [(10u64, vec![2u64, 3]), (15, vec![7, 2, 3]), (8, vec![1, 4])] {
            let n = a.len();
            let width = 1 + n;
            let mut dens: Vec<Vec<i64>> = Vec::new();
            for (i, &ai) in a.iter().enumerate() {
                let mut d = vec![0i64; width];
                d[0] = ai as i64;
                d[1 + i] = 1;
                dens.push(d);
            }
            let mut num = vec![0i64; width];
            num[0] = -(a0 as i64);
            let e = term(&num, &dens.iter().map(|d| d.as_slice()).collect::<Vec<_>>());
            let table = series_ct_oracle(&[e], &[0], &[], 0, width).unwrap();
            let mass: BigRational = table.entries.values().cloned().sum();
            assert_eq!(
                mass,
                BigRational::from(BigInt::from(dp_count(a0, &a).to_u64().unwrap())),
                "a0={a0} a={:?}",
                a
            );
            // every coefficient is 1 (each lattice point appears once)
            for v in table.entries.values() {
                assert!(v.is_one());
            }
        }
    }

    #[test]
    fn ct_operators_commute() {
        // two elimination variables, both orders give the same table
        let e = term(
            &[-2, -1, 0, 0],
            &[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 1, 0, 0], &[2, 1, 1, 1]],
        );
        let t_xy = series_ct_oracle(&[e.clone()], &[0, 1], &[], 0, 4).unwrap();
        let t_yx = series_ct_oracle(&[e], &[1, 0], &[], 0, 4).unwrap();
        assert_eq!(t_xy, t_yx);
    }

    #[test]
    fn improper_factor_rejected() {
        let e = term(&[0, 0], &[&[-1, 1]]);
        assert_eq!(
            series_ct_oracle(&[e], &[0], &[], 0, 2).unwrap_err(),
            Error::NonProperFactor
        );
        // unbounded leading coordinate
        let e2 = term(&[0, 0], &[&[0, 1]]);
        assert!(matches!(
            series_ct_oracle(&[e2], &[0], &[], 0, 2).unwrap_err(),
            Error::UnboundedExpansion(_)
        ));
    }
}
