//! Exact lattice tools: LLL reduction over integer row bases, signed
//! remainders, and the multiplier search that drives the cone decomposition.
//!
//! Multipliers are selected per node of the decomposition tree. For indices
//! up to 13 the optimal choice follows from the closed leaf-count formulas;
//! for larger indices candidates come from an LLL run on a weighted lattice
//! and the candidate minimizing the worst reduced remainder wins.

use crate::matrix::IntMatrix;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

/// Outcome of an exact LLL reduction: `transform * original = basis`.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub basis: IntMatrix,
    pub transform: IntMatrix,
    pub delta: BigRational,
}

/// Multiplier strategy for the decomposition recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Closed rules for indices up to 13, LLL candidates above.
    Auto,
    /// Always use multiplier 1 (the plain Euclidean-style recursion).
    AlwaysOne,
    /// Use LLL candidates at every node with index at least 3.
    LllOnly,
    /// For pairwise-coprime triples: the Bezout multiplier sending the last
    /// entry to 1; falls back to 1 once a unit entry exists.
    Bezout3,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "always-one" => Ok(Strategy::AlwaysOne),
            "lll-only" => Ok(Strategy::LllOnly),
            "bezout3" => Ok(Strategy::Bezout3),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Strategy::Auto => "auto",
            Strategy::AlwaysOne => "always-one",
            Strategy::LllOnly => "lll-only",
            Strategy::Bezout3 => "bezout3",
        };
        f.write_str(s)
    }
}

/// A chosen multiplier together with how it was found and how well it
/// reduces the label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierChoice {
    pub m: u64,
    pub is_lll_suggested: bool,
    /// `max_{j != s} [m v_j]_{v_s}` for the chosen multiplier.
    pub objective: u64,
}

/// Absolute value of the signed remainder: `min(b mod a, a - b mod a)`,
/// always in `[0, a/2]`.
pub fn signed_remainder_abs(b: &BigInt, a: &BigInt) -> BigInt {
    assert!(a.is_positive(), "modulus must be positive");
    let r = b.mod_floor(a);
    let other = a - &r;
    if r <= other {
        r
    } else {
        other
    }
}

/// `signed_remainder_abs` on machine words; products are taken in u128.
pub fn srem(b: u128, a: u64) -> u64 {
    let r = (b % a as u128) as u64;
    r.min(a - r)
}

/// Exact LLL reduction of the rows of `b` with parameter `delta`.
///
/// Gram-Schmidt data is kept as exact rationals; the returned transform is
/// unimodular and satisfies `transform * b = basis`.
pub fn lll_reduce(b: &IntMatrix, delta: &BigRational) -> Result<ReducedBasis> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if *delta <= quarter || *delta >= BigRational::one() {
        return Err(Error::BadDelta);
    }
    let n = b.rows();
    let dim = b.cols();
    let mut rows: Vec<Vec<BigInt>> = (0..n).map(|i| b.row(i).to_vec()).collect();
    let mut trans: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::one();
            r
        })
        .collect();

    // full Gram-Schmidt: mu[i][j] for j < i, norms[i] = |b*_i|^2
    let (mut mu, mut norms) = gram_schmidt(&rows, dim)?;

    let mut k = 1;
    while k < n {
        // size-reduce row k against all previous rows
        for j in (0..k).rev() {
            let q = round_to_int(&mu[k][j]);
            if !q.is_zero() {
                for l in 0..dim {
                    let sub = &q * &rows[j][l];
                    rows[k][l] -= sub;
                }
                for l in 0..n {
                    let sub = &q * &trans[j][l];
                    trans[k][l] -= sub;
                }
                let qr = BigRational::from(q);
                for l in 0..j {
                    let sub = &qr * &mu[j][l];
                    mu[k][l] -= sub;
                }
                mu[k][j] -= qr;
            }
        }
        let lhs = &norms[k];
        let rhs = (delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            rows.swap(k - 1, k);
            trans.swap(k - 1, k);
            // incremental Gram-Schmidt update for the swap
            let mu_kk1 = mu[k][k - 1].clone();
            let big_b = &norms[k] + &mu_kk1 * &mu_kk1 * &norms[k - 1];
            let new_mu = &mu_kk1 * &norms[k - 1] / &big_b;
            norms[k] = &norms[k - 1] * &norms[k] / &big_b;
            norms[k - 1] = big_b;
            mu[k][k - 1] = new_mu.clone();
            for j in 0..k - 1 {
                let tmp = mu[k - 1][j].clone();
                mu[k - 1][j] = mu[k][j].clone();
                mu[k][j] = tmp;
            }
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &mu_kk1 * &t;
                mu[i][k - 1] = &t + &new_mu * &mu[i][k];
            }
            k = k.max(2) - 1;
        }
    }

    let basis = IntMatrix::new(n, dim, rows.into_iter().flatten().collect());
    let transform = IntMatrix::new(n, n, trans.into_iter().flatten().collect());
    Ok(ReducedBasis {
        basis,
        transform,
        delta: delta.clone(),
    })
}

fn gram_schmidt(rows: &[Vec<BigInt>], dim: usize) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let n = rows.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut v: Vec<BigRational> = rows[i]
            .iter()
            .map(|x| BigRational::from(x.clone()))
            .collect();
        for j in 0..i {
            let dot = int_rat_dot(&rows[i], &star[j]);
            if norms[j].is_zero() {
                return Err(Error::DependentRows);
            }
            let m = dot / &norms[j];
            for l in 0..dim {
                let sub = &m * &star[j][l];
                v[l] -= sub;
            }
            mu[i][j] = m;
        }
        let norm = v.iter().map(|x| x * x).sum::<BigRational>();
        if norm.is_zero() {
            return Err(Error::DependentRows);
        }
        norms[i] = norm;
        star.push(v);
    }
    Ok((mu, norms))
}

fn int_rat_dot(a: &[BigInt], b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() {
            continue;
        }
        acc += BigRational::from(x.clone()) * y;
    }
    acc
}

/// Round a rational to the nearest integer, halves rounding up.
fn round_to_int(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let num = x.numer() * &two + x.denom();
    num.div_floor(&(x.denom() * &two))
}

/// Candidate multipliers for index `a` suggested by LLL.
///
/// The lattice has first row `(1, scale*o_1, ..., scale*o_k)` and the rows
/// `scale * a * e_j` below it; short reduced rows look like
/// `(k, scale*(k o_1 - m_1 a), ...)`, so their first coordinates are
/// near-optimal multipliers. Integer scaling stands in for the small leading
/// weight, keeping everything exact.
pub fn good_multiplier_candidates(a: u64, others: &[u64], scale: u64) -> Vec<u64> {
    assert!(a >= 2, "index must be at least 2");
    let k = others.len();
    if k == 0 {
        return vec![];
    }
    let n = k + 1;
    let mut data = vec![BigInt::zero(); n * n];
    data[0] = BigInt::one();
    for (j, &o) in others.iter().enumerate() {
        data[1 + j] = BigInt::from(o) * scale;
    }
    for j in 0..k {
        data[(j + 1) * n + (j + 1)] = BigInt::from(a) * scale;
    }
    let b = IntMatrix::new(n, n, data);
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let reduced = match lll_reduce(&b, &delta) {
        Ok(r) => r,
        Err(_) => return vec![],
    };
    let big_a = BigInt::from(a);
    let mut out: Vec<u64> = Vec::new();
    for i in 0..n {
        let first = reduced.basis[(i, 0)].abs();
        let r = first.mod_floor(&big_a);
        let r = r.to_u64().expect("remainder fits u64");
        let c = r.min(a - r);
        if c != 0 {
            out.push(c);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Valid multipliers for index `a`: coprime to `a` and at most `a/2`.
pub fn valid_multipliers(a: u64) -> Vec<u64> {
    (1..=a / 2).filter(|m| m.gcd(&a) == 1).collect()
}

/// Apply multiplier `m` to the part multiset of a label with index `a`:
/// every part `p` maps to `[m p]_a`.
fn multiplier_image(a: u64, parts: &[u64], m: u64) -> Vec<u64> {
    let half = (a / 2) as usize;
    let mut r = vec![0u64; half];
    for &p in parts {
        let b = srem(m as u128 * p as u128, a);
        debug_assert!(b >= 1, "image part vanished");
        r[(b - 1) as usize] += 1;
    }
    r
}

/// The closed leaf-count formula for the multiplier-1 recursion at index
/// `a1`, taking the multiplicity vector `r` of parts `1..=a1/2`.
pub fn f1_closed_formula(a1: u64, r: &[u64]) -> Result<u64> {
    if !(2..=13).contains(&a1) {
        return Err(Error::OutOfRange(a1));
    }
    let half = (a1 / 2) as usize;
    assert!(r.len() <= half, "multiplicity vector too long");
    let mut v = [0u64; 6];
    v[..r.len()].copy_from_slice(r);
    let [r1, r2, r3, r4, r5, r6] = v;
    let f = match a1 {
        2 | 3 => r1,
        4 => r1 * r2 + r1,
        5 => r1 * r2 + r1 + r2,
        6 => r1 * (r2 + r3 + 1) + 2 * r2 * r3,
        7 => r1 * (r2 + r3 + 1) + (2 * r3 + 1) * r2 + r3,
        8 => (r4 + 1) * (r2 + 1) * (r1 + r3) + (r4 + r2 + r1) * r3,
        9 => (r1 + 1 + r3) * (r2 * r4 + r2 + r4) + r1 + (r4 + r2 + r1) * r3,
        10 => {
            r1 * ((r2 + 2) * r4 + (r2 + r3 + 1) * (r5 + 1))
                + 3 * r4 * (r3 + r5)
                + (r4 + 2) * (r5 + r2) * r3
                + 2 * r5 * (r4 + 1) * r2
                + r3
        }
        11 => {
            r1 + (r4 * r2 + r2 + r4) * (r1 + 1 + r3 + r5)
                + r3 * (r1 + r2 + 1 + r4 + r5)
                + r5 * ((r1 + r4 + 2) * (r2 + r3 + 1) - 1)
        }
        12 => {
            ((r6 + 1) * (r2 + r3 + 1) + (r2 + 2 * r6 + 1) * r4) * r1
                + ((r4 + 2 * r6 + 2) * r2 + r4 * (3 * r6 + 2)) * r3
                + ((r2 + r3 + 2) * r1
                    + (r4 + 2 * r6 + 2) * (r2 + r3)
                    + r4 * r2
                    + (2 * r6 + 3) * r4
                    + 3 * r6
                    + 1)
                    * r5
        }
        13 => {
            r1 + r2 * (r1 + 1 + r3 + r5)
                + r3 * (r1 + r2 + 1 + r4 + r5)
                + r4 * (r1 + 1 + r3 + r5 + (r2 + r6) * (r1 + 1 + r3 + r5))
                + r5 * (r1 + r4 + r6 + (r2 + r3 + 1) * (r1 + r4 + r6 + 1))
                + r6 * (r1 + r5 + 1
                    + (r2 + r4) * (r1 + 1 + r3 + r5)
                    + r3 * (r1 + r2 + 1 + r4 + r5))
        }
        _ => unreachable!(),
    };
    Ok(f)
}

/// Select a multiplier for the label `(s; v)` under the given strategy.
///
/// For indices up to 13 under `Auto`, every valid multiplier's image is scored
/// with the closed formula and the minimum wins, ties broken by the smallest
/// multiplier; this reproduces the published argmax rules whenever the
/// comparison is strict. For larger indices, LLL candidates (with 1 always
/// included) are scored by the worst reduced remainder.
pub fn select_multiplier(s: usize, v: &[u64], strategy: Strategy) -> Result<MultiplierChoice> {
    let a = v[s];
    if a < 2 {
        return Err(Error::InvalidLabel(format!(
            "index {a} at position {s} admits no multiplier"
        )));
    }
    let reduced: Vec<u64> = v
        .iter()
        .enumerate()
        .map(|(j, &x)| if j == s { a } else { srem(x as u128, a) })
        .collect();
    let parts: Vec<u64> = reduced
        .iter()
        .enumerate()
        .filter(|&(j, &x)| j != s && x != 0)
        .map(|(_, &x)| x)
        .collect();
    let objective = |m: u64| -> u64 {
        parts
            .iter()
            .map(|&p| srem(m as u128 * p as u128, a))
            .max()
            .unwrap_or(0)
    };

    match strategy {
        Strategy::AlwaysOne => Ok(MultiplierChoice {
            m: 1,
            is_lll_suggested: false,
            objective: objective(1),
        }),
        Strategy::Bezout3 => {
            if parts.contains(&1) {
                return Ok(MultiplierChoice {
                    m: 1,
                    is_lll_suggested: false,
                    objective: objective(1),
                });
            }
            // Bezout multiplier for the last other entry: u with p*u = 1 mod a
            let m = parts
                .iter()
                .rev()
                .find_map(|&p| mod_inverse(p, a))
                .map(|u| u.min(a - u))
                .unwrap_or(1);
            Ok(MultiplierChoice {
                m,
                is_lll_suggested: false,
                objective: objective(m),
            })
        }
        Strategy::Auto if a <= 13 => {
            let mut best: Option<(u64, u64)> = None; // (f, m)
            for m in valid_multipliers(a) {
                let image = multiplier_image(a, &parts, m);
                let f = f1_closed_formula(a, &image)?;
                match best {
                    Some((bf, _)) if bf <= f => {}
                    _ => best = Some((f, m)),
                }
            }
            let (_, m) = best.expect("index >= 2 always has multiplier 1");
            Ok(MultiplierChoice {
                m,
                is_lll_suggested: false,
                objective: objective(m),
            })
        }
        Strategy::Auto if a <= LOOKAHEAD_INDEX_BOUND => {
            // minimize the exact leaf count of the image, extending the
            // closed-rule comparison past index 13 by memoized recursion
            let mut best = (u64::MAX, 0u64);
            for m in valid_multipliers(a) {
                let f = lookahead_score(a, &parts, m);
                if f < best.0 || (f == best.0 && m < best.1) {
                    best = (f, m);
                }
            }
            Ok(MultiplierChoice {
                m: best.1,
                is_lll_suggested: false,
                objective: objective(best.1),
            })
        }
        Strategy::Auto if a <= EXHAUSTIVE_INDEX_BOUND => {
            // a full scan of the valid multipliers is cheaper than a lattice
            // reduction at these sizes and never misses the objective optimum
            let mut best = (u64::MAX, 0u64);
            for m in valid_multipliers(a) {
                let obj = objective(m);
                if obj < best.0 || (obj == best.0 && m < best.1) {
                    best = (obj, m);
                }
            }
            Ok(MultiplierChoice {
                m: best.1,
                is_lll_suggested: false,
                objective: best.0,
            })
        }
        Strategy::Auto | Strategy::LllOnly => {
            if strategy == Strategy::LllOnly && a == 2 {
                return Ok(MultiplierChoice {
                    m: 1,
                    is_lll_suggested: false,
                    objective: objective(1),
                });
            }
            // the reduced parts generate the same candidates up to the gcd
            // filter and keep the choice a function of the node label alone
            let mut others = parts.clone();
            others.sort_unstable();
            let mut candidates = good_multiplier_candidates(a, &others, 100);
            candidates.retain(|&m| m.gcd(&a) == 1);
            if !candidates.contains(&1) {
                candidates.push(1);
                candidates.sort_unstable();
            }
            let mut best = (u64::MAX, 0u64);
            for &m in &candidates {
                let obj = objective(m);
                if obj < best.0 || (obj == best.0 && m < best.1) {
                    best = (obj, m);
                }
            }
            Ok(MultiplierChoice {
                m: best.1,
                is_lll_suggested: true,
                objective: best.0,
            })
        }
    }
}

/// Largest index at which the automatic strategy scans all valid multipliers
/// instead of asking LLL for candidates.
pub const EXHAUSTIVE_INDEX_BOUND: u64 = 1 << 16;

/// Largest index at which the automatic strategy scores every multiplier by
/// the exact leaf count of its image rather than the worst remainder.
pub const LOOKAHEAD_INDEX_BOUND: u64 = 50;

thread_local! {
    // leaf counts of the automatic strategy are a pure function of the
    // canonical label, so one per-thread table serves selection, the
    // counting recursion, and the tree engines alike
    static F_AUTO_MEMO: std::cell::RefCell<HashMap<(u64, Vec<u64>), u64>> =
        std::cell::RefCell::new(HashMap::new());
}

/// Exact leaf count below the label `(a; parts)` under the automatic
/// strategy, memoized on the canonical (reduced, sorted) label.
fn f_label_auto(a: u64, raw_parts: &[u64]) -> Result<u64> {
    if a == 0 {
        return Err(Error::InvalidLabel("zero index".into()));
    }
    if a == 1 {
        return Ok(1);
    }
    let mut parts: Vec<u64> = raw_parts
        .iter()
        .map(|&x| srem(x as u128, a))
        .filter(|&x| x != 0)
        .collect();
    parts.sort_unstable();
    let key = (a, parts.clone());
    if let Some(f) = F_AUTO_MEMO.with(|m| m.borrow().get(&key).copied()) {
        return Ok(f);
    }
    let v: Vec<u64> = std::iter::once(a).chain(parts.iter().copied()).collect();
    let m = select_multiplier(0, &v, Strategy::Auto)?.m;
    let b: Vec<u64> = parts
        .iter()
        .map(|&p| srem(m as u128 * p as u128, a))
        .collect();
    let mut total = 0u64;
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0 {
            continue;
        }
        let mut child_parts: Vec<u64> = Vec::with_capacity(b.len());
        child_parts.push(a);
        child_parts.extend(b.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x));
        total += f_label_auto(bj, &child_parts)?;
    }
    F_AUTO_MEMO.with(|m| m.borrow_mut().insert(key, total));
    Ok(total)
}

/// Leaf count of the subtree obtained by applying multiplier `m` at the label
/// `(a; parts)` and recursing optimally below.
fn lookahead_score(a: u64, parts: &[u64], m: u64) -> u64 {
    let b: Vec<u64> = parts
        .iter()
        .map(|&p| srem(m as u128 * p as u128, a))
        .collect();
    let mut total = 0u64;
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0 {
            continue;
        }
        let mut child_parts: Vec<u64> = Vec::with_capacity(b.len());
        child_parts.push(a);
        child_parts.extend(b.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x));
        total += f_label_auto(bj, &child_parts).expect("positive child index");
    }
    total
}

fn mod_inverse(p: u64, a: u64) -> Option<u64> {
    let e = BigInt::from(p).extended_gcd(&BigInt::from(a));
    if !e.gcd.is_one() {
        return None;
    }
    let inv = e.x.mod_floor(&BigInt::from(a));
    inv.to_u64()
}

/// Leaf count of the decomposition recursion by direct recursion on labels.
///
/// `optimal = false` fixes multiplier 1 throughout; `optimal = true` uses the
/// same selection as the decomposition under the `Auto` strategy. Serves as
/// the oracle for the closed formulas and for tree leaf counts.
pub fn f_recursive(optimal: bool, s: usize, v: &[u64]) -> Result<u64> {
    let parts: Vec<u64> = v
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != s)
        .map(|(_, &x)| x)
        .collect();
    if optimal {
        f_label_auto(v[s], &parts)
    } else {
        let mut memo: HashMap<(u64, Vec<u64>), u64> = HashMap::new();
        f_label_one(v[s], &parts, &mut memo)
    }
}

fn f_label_one(
    a: u64,
    raw_parts: &[u64],
    memo: &mut HashMap<(u64, Vec<u64>), u64>,
) -> Result<u64> {
    if a == 0 {
        return Err(Error::InvalidLabel("zero index".into()));
    }
    if a == 1 {
        return Ok(1);
    }
    let mut parts: Vec<u64> = raw_parts
        .iter()
        .map(|&x| srem(x as u128, a))
        .filter(|&x| x != 0)
        .collect();
    parts.sort_unstable();
    let key = (a, parts.clone());
    if let Some(&f) = memo.get(&key) {
        return Ok(f);
    }
    let mut total = 0u64;
    for (j, &bj) in parts.iter().enumerate() {
        let mut child_parts: Vec<u64> = Vec::with_capacity(parts.len());
        child_parts.push(a);
        child_parts.extend(
            parts
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &x)| x),
        );
        total += f_label_one(bj, &child_parts, memo)?;
    }
    memo.insert(key, total);
    Ok(total)
}

/// Floor of the exact n-th root of a nonnegative integer.
pub fn integer_nth_root(x: u64, n: u32) -> u64 {
    if x == 0 || n == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / n as f64).floor() as u64;
    // fix up floating point drift
    while r > 0 && r.checked_pow(n).map_or(true, |p| p > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(n).map_or(false, |p| p <= x) {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn check_reduced(original: &IntMatrix, red: &ReducedBasis) {
        // transform * original = basis, |det transform| = 1
        assert_eq!(red.transform.mul(original), red.basis);
        assert_eq!(red.transform.determinant().abs(), BigInt::one());
        // exact size-reduction and Lovasz conditions
        let rows: Vec<Vec<BigInt>> = (0..red.basis.rows())
            .map(|i| red.basis.row(i).to_vec())
            .collect();
        let (mu, norms) = gram_schmidt(&rows, red.basis.cols()).unwrap();
        let half = rat(1, 2);
        for i in 0..rows.len() {
            for j in 0..i {
                assert!(
                    mu[i][j].abs() <= half,
                    "size reduction violated at ({i},{j})"
                );
            }
        }
        for k in 1..rows.len() {
            let lhs = &norms[k];
            let rhs = (&red.delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
            assert!(*lhs >= rhs, "Lovasz condition violated at {k}");
        }
    }

    #[test]
    fn lll_identity_unchanged() {
        let b = IntMatrix::identity(2);
        let red = lll_reduce(&b, &rat(3, 4)).unwrap();
        assert_eq!(red.basis, b);
        check_reduced(&b, &red);
    }

    #[test]
    fn lll_two_dim() {
        let b = IntMatrix::from_i64(2, 2, &[1, 1, 1, 0]);
        let red = lll_reduce(&b, &rat(3, 4)).unwrap();
        check_reduced(&b, &red);
        // first vector no longer than sqrt(2), and the lattice is all of Z^2
        let n0: BigInt = red.basis.row(0).iter().map(|x| x * x).sum();
        assert!(n0 <= BigInt::from(2));
        assert_eq!(red.basis.determinant().abs(), BigInt::one());
    }

    #[test]
    fn lll_rejects_dependent_rows() {
        let b = IntMatrix::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(lll_reduce(&b, &rat(3, 4)).unwrap_err(), Error::DependentRows);
        assert_eq!(
            lll_reduce(&IntMatrix::identity(2), &rat(1, 4)).unwrap_err(),
            Error::BadDelta
        );
    }

    /// Shortest vector found by exhaustive search over a coefficient box.
    fn brute_force_shortest(b: &IntMatrix, radius: i64) -> BigInt {
        let n = b.rows();
        let mut best: Option<BigInt> = None;
        let mut coeffs = vec![-radius; n];
        loop {
            if coeffs.iter().any(|&c| c != 0) {
                let mut v = vec![BigInt::zero(); b.cols()];
                for (i, &c) in coeffs.iter().enumerate() {
                    for j in 0..b.cols() {
                        v[j] += &b[(i, j)] * BigInt::from(c);
                    }
                }
                let norm: BigInt = v.iter().map(|x| x * x).sum();
                if best.as_ref().map_or(true, |b| norm < *b) {
                    best = Some(norm);
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best.unwrap();
                }
                coeffs[i] += 1;
                if coeffs[i] <= radius {
                    break;
                }
                coeffs[i] = -radius;
                i += 1;
            }
        }
    }

    #[test]
    fn lll_approximation_bound_random() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..8 {
            let data: Vec<i64> = (0..16).map(|_| rng.gen_range(-50..=50)).collect();
            let b = IntMatrix::from_i64(4, 4, &data);
            if b.determinant().is_zero() {
                continue;
            }
            let red = lll_reduce(&b, &rat(3, 4)).unwrap();
            check_reduced(&b, &red);
            let shortest = brute_force_shortest(&b, 2);
            let n0: BigInt = red.basis.row(0).iter().map(|x| x * x).sum();
            // |b_0|^2 <= 2^(n-1) * |shortest|^2 for delta = 3/4
            assert!(n0 <= BigInt::from(8) * shortest);
        }
    }

    #[test]
    fn signed_remainder_reference() {
        let a7 = BigInt::from(7);
        assert_eq!(signed_remainder_abs(&BigInt::from(4), &a7), BigInt::from(3));
        assert_eq!(signed_remainder_abs(&BigInt::from(6), &a7), BigInt::from(1));
        assert_eq!(signed_remainder_abs(&BigInt::from(0), &BigInt::from(5)), BigInt::zero());
        // [b]_a = [-b]_a = [b + a]_a, range [0, a/2]
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rng.gen_range(1..=40i64);
            let b = rng.gen_range(-200..=200i64);
            let r = signed_remainder_abs(&BigInt::from(b), &BigInt::from(a));
            assert_eq!(r, signed_remainder_abs(&BigInt::from(-b), &BigInt::from(a)));
            assert_eq!(r, signed_remainder_abs(&BigInt::from(b + a), &BigInt::from(a)));
            assert!(r <= BigInt::from(a / 2));
            assert_eq!(r.to_u64().unwrap(), srem(b.rem_euclid(a) as u128, a as u64));
        }
    }

    #[test]
    fn candidates_for_index_two() {
        for others in [vec![1u64], vec![3, 5], vec![7, 9, 11]] {
            let c = good_multiplier_candidates(2, &others, 100);
            assert!(c.iter().all(|&x| x == 1), "candidates {:?}", c);
        }
    }

    #[test]
    fn published_multiplier_suggestion_substance() {
        // the published remark works with index 26850 and the remaining
        // entries of the eight-part hard instance; the displayed image of the
        // suggested multiplier 2447 must reproduce exactly, and the candidate
        // search must return something at least as good
        let others = [13429u64, 26855, 40280, 40281, 53711, 53714, 67141];
        let a = 26850u64;
        let image: Vec<u64> = others
            .iter()
            .map(|&x| srem(2447u128 * x as u128, a))
            .collect();
        assert_eq!(image, vec![3637, 12235, 1190, 1257, 67, 7408, 1123]);
        let published_obj = *image.iter().max().unwrap();
        let candidates = good_multiplier_candidates(a, &others, 100);
        assert!(!candidates.is_empty());
        let best = candidates
            .iter()
            .map(|&m| {
                others
                    .iter()
                    .map(|&x| srem(m as u128 * x as u128, a))
                    .max()
                    .unwrap()
            })
            .min()
            .unwrap();
        assert!(
            best <= published_obj,
            "candidates {:?} all worse than the published suggestion",
            candidates
        );
    }

    #[test]
    fn candidates_meet_existence_bound_small_case() {
        // index 101 with tail (1, 1, 1): the existence bound must be met by
        // the best candidate, cross-checked by exhaustive multiplier search
        let a = 101u64;
        let others = [1u64, 1, 1];
        let bound = a / integer_nth_root(a - 1, 3);
        let exhaustive_best = (1..=a / 2)
            .map(|k| others.iter().map(|&t| srem(k as u128 * t as u128, a)).max().unwrap())
            .min()
            .unwrap();
        assert!(exhaustive_best <= bound);
        let candidates = good_multiplier_candidates(a, &others, 100);
        let best = candidates
            .iter()
            .map(|&m| others.iter().map(|&t| srem(m as u128 * t as u128, a)).max().unwrap())
            .min()
            .unwrap();
        assert!(best <= bound, "candidates {:?} miss the bound {bound}", candidates);
    }

    #[test]
    fn closed_formula_reference_values() {
        assert_eq!(f1_closed_formula(7, &[0, 1, 1]).unwrap(), 4);
        assert_eq!(f1_closed_formula(2, &[5]).unwrap(), 5);
        assert_eq!(f1_closed_formula(5, &[1, 1]).unwrap(), 3);
        assert_eq!(f1_closed_formula(14, &[]), Err(Error::OutOfRange(14)));
    }

    #[test]
    fn select_reference_cases() {
        // (1; 7, 2, 3) should pick multiplier 2
        let c = select_multiplier(0, &[7, 2, 3], Strategy::Auto).unwrap();
        assert_eq!(c.m, 2);
        assert!(!c.is_lll_suggested);
        // index 6: only valid multiplier is 1
        let c = select_multiplier(0, &[6, 1, 4], Strategy::Auto).unwrap();
        assert_eq!(c.m, 1);
        // index 5: multipliers 1 and 2 tie, smallest wins
        let c = select_multiplier(0, &[5, 1, 2, 1], Strategy::Auto).unwrap();
        assert!(c.m == 1 || c.m == 2);
        let f1 = f_recursive(false, 0, &[5, 1, 2, 1]).unwrap();
        let f2 = {
            // image under multiplier 2: parts 1->2, 2->1
            f_recursive(false, 0, &[5, 2, 1, 2]).unwrap()
        };
        assert_eq!(f1, f2);
        assert_eq!(select_multiplier(0, &[1, 2], Strategy::Auto), Err(Error::InvalidLabel(
            "index 1 at position 0 admits no multiplier".into()
        )));
    }

    #[test]
    fn select_matches_published_argmax_rules_when_strict() {
        // index 7: argmax of (r1, r2, r3) maps 1->1, 2->3, 3->2; the mapping
        // is forced only when the leaf-count comparison is strict, so filter
        // on a unique minimizer.
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        for _ in 0..400 {
            let r = [
                rng.gen_range(0..4u64),
                rng.gen_range(0..4u64),
                rng.gen_range(0..4u64),
            ];
            if r.iter().sum::<u64>() == 0 {
                continue;
            }
            let mut v = vec![7u64];
            for (p, &cnt) in r.iter().enumerate() {
                v.extend(std::iter::repeat((p + 1) as u64).take(cnt as usize));
            }
            let parts = &v[1..];
            let g: Vec<(u64, u64)> = valid_multipliers(7)
                .into_iter()
                .map(|m| {
                    let image = multiplier_image(7, parts, m);
                    (f1_closed_formula(7, &image).unwrap(), m)
                })
                .collect();
            let min_f = g.iter().map(|&(f, _)| f).min().unwrap();
            if g.iter().filter(|&&(f, _)| f == min_f).count() != 1 {
                continue;
            }
            let best_m = g.iter().find(|&&(f, _)| f == min_f).unwrap().1;
            let (mx, which) = [(r[0], 1u64), (r[1], 2), (r[2], 3)]
                .into_iter()
                .max_by_key(|&(r, _)| r)
                .unwrap();
            if [r[0], r[1], r[2]].iter().filter(|&&x| x == mx).count() == 1 {
                let rule_m = match which {
                    1 => 1,
                    2 => 3,
                    3 => 2,
                    _ => unreachable!(),
                };
                assert_eq!(best_m, rule_m, "argmax rule disagrees on {:?}", v);
            }
            let c = select_multiplier(0, &v, Strategy::Auto).unwrap();
            assert_eq!(c.m, best_m, "label {:?}", v);
        }
        // index 8: multiplier 3 iff r1 < r3 (strict when r2 + r4 > 0)
        let v = vec![8u64, 3, 3, 2];
        assert_eq!(select_multiplier(0, &v, Strategy::Auto).unwrap().m, 3);
        let v = vec![8u64, 1, 1, 3, 2];
        assert_eq!(select_multiplier(0, &v, Strategy::Auto).unwrap().m, 1);
        // index 12: multiplier 5 iff r1 < r5
        let v = vec![12u64, 5, 5, 2];
        assert_eq!(select_multiplier(0, &v, Strategy::Auto).unwrap().m, 5);
    }

    #[test]
    fn select_minimizes_leaf_count_small_indices() {
        // exhaustive over indices <= 13 and part multisets with at most 4 parts
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for a in 2..=13u64 {
            for _ in 0..80 {
                let count = rng.gen_range(1..=4);
                let parts: Vec<u64> = (0..count).map(|_| rng.gen_range(1..=a / 2)).collect();
                let mut v = vec![a];
                v.extend(&parts);
                let chosen = select_multiplier(0, &v, Strategy::Auto).unwrap().m;
                let score = |m: u64| {
                    let b: Vec<u64> = std::iter::once(a)
                        .chain(parts.iter().map(|&p| srem(m as u128 * p as u128, a)))
                        .collect();
                    f_recursive(false, 0, &b).unwrap()
                };
                let best = valid_multipliers(a).into_iter().map(score).min().unwrap();
                assert_eq!(score(chosen), best, "label {:?} chose {}", v, chosen);
            }
        }
    }

    #[test]
    fn f_recursive_reference_values() {
        assert_eq!(f_recursive(false, 0, &[7, 2, 3]).unwrap(), 4);
        assert_eq!(f_recursive(true, 0, &[7, 2, 3]).unwrap(), 3);
        assert_eq!(f_recursive(true, 0, &[1]).unwrap(), 1);
        assert_eq!(f_recursive(false, 0, &[1]).unwrap(), 1);
    }

    #[test]
    fn existence_bound_small_sweep() {
        // every index a <= 60 with random tails admits a good multiplier
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for a in 2..=60u64 {
            for _ in 0..10 {
                let n = rng.gen_range(1..=4usize);
                let tail: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=300)).collect();
                let root = integer_nth_root(a - 1, n as u32);
                if root == 0 {
                    continue;
                }
                let bound = a / root;
                let ok = (1..=a / 2).any(|k| {
                    tail.iter().all(|&t| srem(k as u128 * t as u128, a) <= bound)
                });
                assert!(ok, "no good multiplier for a={a} tail={:?}", tail);
            }
        }
    }

    #[test]
    fn nth_root_exact() {
        for x in 0..2000u64 {
            for n in 1..=5u32 {
                let r = integer_nth_root(x, n);
                assert!(r.pow(n) <= x);
                assert!((r + 1).checked_pow(n).map_or(true, |p| p > x));
            }
        }
    }
}
