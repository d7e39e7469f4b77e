//! Dense arbitrary-precision integer matrices, Smith normal form, and the
//! maximal-minor gcd used to certify unimodular cones.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Exact determinant by cofactor expansion on the sparsest column.
    /// Intended for the small square matrices that arise in tests and
    /// transform bookkeeping.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return self[(0, 0)].clone();
        }
        if n == 2 {
            return &self[(0, 0)] * &self[(1, 1)] - &self[(0, 1)] * &self[(1, 0)];
        }
        let mut det = BigInt::zero();
        for i in 0..n {
            if self[(i, 0)].is_zero() {
                continue;
            }
            let minor = self.minor_matrix(i, 0);
            let term = &self[(i, 0)] * minor.determinant();
            if i % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    fn minor_matrix(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            for j in 0..self.cols {
                if j == skip_col {
                    continue;
                }
                data.push(self[(i, j)].clone());
            }
        }
        IntMatrix::new(self.rows - 1, self.cols - 1, data)
    }

    /// All `k x k` minors obtained by choosing `k` rows and `k` columns.
    /// Used by property tests; exponential in `k`.
    pub fn minors(&self, k: usize) -> Vec<BigInt> {
        let row_sets = combinations(self.rows, k);
        let col_sets = combinations(self.cols, k);
        let mut out = Vec::new();
        for rs in &row_sets {
            for cs in &col_sets {
                out.push(self.submatrix(rs, cs).determinant());
            }
        }
        out
    }

    /// Minors of order `k` whose row set contains the first row.
    pub fn minors_including_first_row(&self, k: usize) -> Vec<BigInt> {
        let mut out = Vec::new();
        if k == 0 || k > self.rows {
            return out;
        }
        for mut rs in combinations(self.rows - 1, k - 1) {
            for r in rs.iter_mut() {
                *r += 1;
            }
            rs.insert(0, 0);
            for cs in combinations(self.cols, k) {
                out.push(self.submatrix(&rs, &cs).determinant());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self[(i, j)].clone());
            }
        }
        IntMatrix::new(rows.len(), cols.len(), data)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance to the next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Result of a Smith normal form computation: `u * a * v = s` with `u`, `v`
/// unimodular and `s` diagonal-rectangular with nonnegative invariant factors
/// forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// The nonzero invariant factors d1 | d2 | ... in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        let n = self.s.rows().min(self.s.cols());
        for i in 0..n {
            if self.s[(i, i)].is_zero() {
                break;
            }
            out.push(self.s[(i, i)].clone());
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form over the integers.
///
/// Pivots are chosen as the nonzero entry of minimal absolute value, ties
/// broken by lowest (row, col), which keeps intermediate growth modest and the
/// output deterministic. Invariant factors are normalized to be nonnegative.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let rows = a.rows();
    let cols = a.cols();
    assert!(rows > 0 && cols > 0, "SNF of an empty matrix");
    let mut s = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        let Some((pi, pj)) = pivot_at_least(&s, t) else {
            break;
        };
        swap_rows(&mut s, &mut u, t, pi);
        swap_cols(&mut s, &mut v, t, pj);

        loop {
            // clear column t below the pivot, then row t right of the pivot
            let mut dirty = false;
            for i in t + 1..rows {
                if !s[(i, t)].is_zero() {
                    let q = rounded_quotient(&s[(i, t)], &s[(t, t)]);
                    if !q.is_zero() {
                        row_addmul(&mut s, &mut u, i, t, &-q);
                    }
                    if !s[(i, t)].is_zero() {
                        // remainder strictly smaller in absolute value: swap up
                        swap_rows(&mut s, &mut u, t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !s[(t, j)].is_zero() {
                    let q = rounded_quotient(&s[(t, j)], &s[(t, t)]);
                    if !q.is_zero() {
                        col_addmul(&mut s, &mut v, j, t, &-q);
                    }
                    if !s[(t, j)].is_zero() {
                        swap_cols(&mut s, &mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if !dirty && column_clear(&s, t) && row_clear(&s, t) {
                break;
            }
        }

        // enforce divisibility of the remaining block by the pivot
        let mut fixed = false;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                    // fold row i into row t and redo this pivot position
                    row_addmul(&mut s, &mut u, t, i, &BigInt::one());
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue;
        }
        if s[(t, t)].is_negative() {
            negate_row(&mut s, &mut u, t);
        }
        t += 1;
    }
    Snf { u, s, v }
}

/// The gcd of all `r x r` minors of a full-row-rank matrix with `r` rows,
/// computed as the product of the invariant factors.
pub fn maximal_minor_gcd(a: &IntMatrix) -> Result<BigInt> {
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    if factors.len() < a.rows() {
        return Err(Error::RankDeficient);
    }
    Ok(factors.iter().product())
}

fn pivot_at_least(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let e = &s[(i, j)];
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((b, _, _)) if *b <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn column_clear(s: &IntMatrix, t: usize) -> bool {
    (t + 1..s.rows()).all(|i| s[(i, t)].is_zero())
}

fn row_clear(s: &IntMatrix, t: usize) -> bool {
    (t + 1..s.cols()).all(|j| s[(t, j)].is_zero())
}

/// Quotient rounding toward the nearest integer, so the remainder has at most
/// half the pivot's absolute value.
fn rounded_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = a.div_rem(b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn swap_rows(s: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..s.cols() {
        let tmp = s[(a, j)].clone();
        s[(a, j)] = s[(b, j)].clone();
        s[(b, j)] = tmp;
    }
    for j in 0..u.cols() {
        let tmp = u[(a, j)].clone();
        u[(a, j)] = u[(b, j)].clone();
        u[(b, j)] = tmp;
    }
}

fn swap_cols(s: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..s.rows() {
        let tmp = s[(i, a)].clone();
        s[(i, a)] = s[(i, b)].clone();
        s[(i, b)] = tmp;
    }
    for i in 0..v.rows() {
        let tmp = v[(i, a)].clone();
        v[(i, a)] = v[(i, b)].clone();
        v[(i, b)] = tmp;
    }
}

/// row[i] += q * row[t], mirrored on the row transform.
fn row_addmul(s: &mut IntMatrix, u: &mut IntMatrix, i: usize, t: usize, q: &BigInt) {
    for j in 0..s.cols() {
        let add = q * &s[(t, j)];
        s[(i, j)] += add;
    }
    for j in 0..u.cols() {
        let add = q * &u[(t, j)];
        u[(i, j)] += add;
    }
}

/// col[j] += q * col[t], mirrored on the column transform.
fn col_addmul(s: &mut IntMatrix, v: &mut IntMatrix, j: usize, t: usize, q: &BigInt) {
    for i in 0..s.rows() {
        let add = q * &s[(i, t)];
        s[(i, j)] += add;
    }
    for i in 0..v.rows() {
        let add = q * &v[(i, t)];
        v[(i, j)] += add;
    }
}

fn negate_row(s: &mut IntMatrix, u: &mut IntMatrix, t: usize) {
    for j in 0..s.cols() {
        let x = -s[(t, j)].clone();
        s[(t, j)] = x;
    }
    for j in 0..u.cols() {
        let x = -u[(t, j)].clone();
        u[(t, j)] = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn check_snf(a: &IntMatrix) {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s, "U*A*V != S");
        assert_eq!(snf.u.determinant().abs(), BigInt::one());
        assert_eq!(snf.v.determinant().abs(), BigInt::one());
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
        // off-diagonal entries are zero
        for i in 0..snf.s.rows() {
            for j in 0..snf.s.cols() {
                if i != j {
                    assert!(snf.s[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(3);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.s, IntMatrix::identity(3));
        check_snf(&a);
    }

    #[test]
    fn snf_paper_type_matrix() {
        // the 4x5 type matrix of the worked elimination example
        let a = IntMatrix::from_i64(
            4,
            5,
            &[
                19, -8, -1, -10, 0, //
                165, -30, -7, -72, 28, //
                -99, 36, 5, 50, -4, //
                57, -24, -3, -30, 0,
            ],
        );
        let snf = smith_normal_form(&a);
        check_snf(&a);
        assert_eq!(
            snf.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(4)]
        );
        for j in 0..5 {
            assert!(snf.s[(3, j)].is_zero(), "fourth row of S must vanish");
        }
    }

    #[test]
    fn snf_random_properties() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=5);
            let data: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-9..=9)).collect();
            let a = IntMatrix::from_i64(rows, cols, &data);
            check_snf(&a);
        }
    }

    #[test]
    fn minor_gcd_basics() {
        let a = IntMatrix::from_i64(1, 3, &[2, 4, 6]);
        assert_eq!(maximal_minor_gcd(&a).unwrap(), BigInt::from(2));
        let b = IntMatrix::from_i64(2, 3, &[1, 0, 0, 0, 1, 0]);
        assert_eq!(maximal_minor_gcd(&b).unwrap(), BigInt::from(1));
        let c = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(maximal_minor_gcd(&c).unwrap(), BigInt::from(6));
        let d = IntMatrix::from_i64(2, 2, &[1, 1, 2, 2]);
        assert_eq!(maximal_minor_gcd(&d), Err(Error::RankDeficient));
    }

    #[test]
    fn minor_gcd_divides_every_maximal_minor() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(rows..=6);
            let data: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-6..=6)).collect();
            let a = IntMatrix::from_i64(rows, cols, &data);
            match maximal_minor_gcd(&a) {
                Ok(g) => {
                    for m in a.minors(rows) {
                        assert!((&m % &g).is_zero(), "{} does not divide minor {}", g, m);
                    }
                }
                Err(Error::RankDeficient) => {
                    // every maximal minor must then vanish
                    for m in a.minors(rows) {
                        assert!(m.is_zero());
                    }
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}
