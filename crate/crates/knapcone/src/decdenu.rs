//! The recursive decomposition of knapsack cones into unimodular-cone
//! generating functions.
//!
//! One step works modulo the underlined denominator factor `1 - u_s l^{a_s}`:
//! a multiplier `m` coprime to `a_s` rescales the working variable, every
//! other factor's `l`-exponent drops to the absolute signed remainder
//! `[m c_j]_{a_s} <= a_s/2`, and the partial-fraction identity turns the term
//! into a signed sum over the factors that still carry `l`. Indices at least
//! halve along every edge, so the recursion tree has logarithmic depth.
//!
//! Three engines share the label arithmetic:
//! - [`decompose_stats`]: label-only walk, no monomial bookkeeping; used for
//!   cone-count benchmarks.
//! - [`a_operator`] / [`decompose_knapsack`]: full walk producing the output
//!   terms.
//! - [`build_shape`] / [`EvalShape`]: one walk capturing per-node scalars
//!   against a fixed direction, after which evaluating a new right-hand side
//!   `a0` only replays cheap integer updates.

use crate::elliott::{canonical_sort_terms, BinomialFactor, CTTerm, LaurentPoly, Monomial};
use crate::lattice::{f_recursive, select_multiplier, srem, MultiplierChoice, Strategy};
use crate::matrix::maximal_minor_gcd;
use crate::series::todd_factor_series;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// One node of the decomposition tree: the reduced label `(s; v)`, the
/// multiplier used there, and whether LLL was invoked to find it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecNode {
    pub s: usize,
    pub label: Vec<u64>,
    pub multiplier: Option<MultiplierChoice>,
    pub is_lll_node: bool,
    pub children: Vec<DecNode>,
}

impl DecNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn index(&self) -> u64 {
        self.label[self.s]
    }
}

/// Aggregate tree statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TreeStats {
    pub nl: u64,
    pub depth: u32,
    pub internal_nodes: u64,
    pub lll_nodes: u64,
}

/// A decomposition result: the leaf terms (free of the working variable) and
/// the instrumented tree.
#[derive(Clone, Debug)]
pub struct DecompOutput {
    pub terms: Vec<CTTerm>,
    pub root: DecNode,
    pub stats: TreeStats,
}

/// Exact counts for a decomposition tree; depth is the maximal edge count
/// from the root to a leaf.
pub fn tree_stats(root: &DecNode) -> TreeStats {
    fn walk(node: &DecNode, depth: u32, acc: &mut TreeStats) {
        if node.is_leaf() {
            acc.nl += 1;
            acc.depth = acc.depth.max(depth);
        } else {
            acc.internal_nodes += 1;
            if node.is_lll_node {
                acc.lll_nodes += 1;
            }
            for c in &node.children {
                walk(c, depth + 1, acc);
            }
        }
    }
    let mut acc = TreeStats::default();
    walk(root, 0, &mut acc);
    acc
}

fn label_gcd(entries: &[u64]) -> u64 {
    entries.iter().fold(0u64, |g, &x| g.gcd(&x))
}

/// Label-only decomposition walk: builds the tree and statistics without any
/// monomial arithmetic. Labels evolve exactly as in the term-level engines.
pub fn decompose_stats(a: &[u64], s: usize, strategy: Strategy) -> Result<(DecNode, TreeStats)> {
    validate_knapsack(a, s)?;
    let root = stats_rec(s, a, strategy)?;
    let stats = tree_stats(&root);
    if matches!(strategy, Strategy::Auto | Strategy::AlwaysOne) {
        let f = f_recursive(strategy == Strategy::Auto, s, a)?;
        debug_assert_eq!(
            stats.nl, f,
            "tree leaf count disagrees with the counting recursion"
        );
    }
    Ok((root, stats))
}

fn stats_rec(s: usize, entry: &[u64], strategy: Strategy) -> Result<DecNode> {
    let a = entry[s];
    if a == 0 {
        return Err(Error::InvalidLabel("zero index".into()));
    }
    let mut reduced: Vec<u64> = entry
        .iter()
        .enumerate()
        .map(|(j, &x)| if j == s { a } else { srem(x as u128, a) })
        .collect();
    if a == 1 {
        for (j, r) in reduced.iter_mut().enumerate() {
            if j != s {
                *r = 0;
            }
        }
        return Ok(DecNode {
            s,
            label: reduced,
            multiplier: None,
            is_lll_node: false,
            children: vec![],
        });
    }
    if label_gcd(&reduced) != 1 {
        return Err(Error::GcdNotOne);
    }
    let choice = select_multiplier(s, entry, strategy)?;
    let m = choice.m;
    let b: Vec<u64> = entry
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            if j == s {
                a
            } else {
                srem(m as u128 * x as u128, a)
            }
        })
        .collect();
    let mut children = Vec::new();
    for j in 0..b.len() {
        if j != s && b[j] > 0 {
            debug_assert!(b[j] <= a / 2, "child index exceeds half the parent index");
            children.push(stats_rec(j, &b, strategy)?);
        }
    }
    debug_assert!(!children.is_empty(), "internal node without children");
    Ok(DecNode {
        s,
        label: reduced,
        multiplier: Some(choice.clone()),
        is_lll_node: choice.is_lll_suggested,
        children,
    })
}

/// Per-factor outcome of one modular reduction step.
struct ReduceOutcome {
    /// reduced `l`-exponents of all factors (underlined one keeps `a_s`)
    b: Vec<u64>,
    /// numerator correction from the flipped factors
    sign: i8,
    delta_e: BigInt,
    delta_mon: Monomial,
}

/// Reduce all non-underlined factors modulo `1 - u_s l^{a_s}` in place.
///
/// Positive signed remainders rewrite the factor directly; negative ones flip
/// it to keep a positive `l`-exponent, pushing sign and monomial corrections
/// into the returned outcome. A zero remainder leaves an `l`-free factor that
/// never spawns a child.
fn reduce_factors(
    factors: &mut [Monomial],
    lam: usize,
    s: usize,
    a_s: u64,
) -> Result<ReduceOutcome> {
    let width = factors[s].width();
    let mut sub = factors[s].clone();
    sub.set_exp(lam, BigRational::zero());
    let a_big = BigInt::from(a_s);
    let mut b = vec![0u64; factors.len()];
    b[s] = a_s;
    let mut sign = 1i8;
    let mut delta_e = BigInt::zero();
    let mut delta_mon = Monomial::one(width);
    for j in 0..factors.len() {
        if j == s {
            continue;
        }
        let cj_exp = factors[j].exp(lam).clone();
        if !cj_exp.is_integer() {
            return Err(Error::NonIntegerExponent);
        }
        let cj = cj_exp.to_integer();
        if cj.is_zero() {
            continue;
        }
        if cj.is_negative() {
            return Err(Error::InvalidLabel("negative factor exponent".into()));
        }
        let r = cj.mod_floor(&a_big);
        let neg = &a_big - &r;
        if r <= neg {
            // positive remainder: l^{c} = l^{r} (l^{a_s})^{q} = l^{r} u_s^{-q}
            let q = BigRational::from((&cj - &r) / &a_big);
            let mut u = factors[j].mul_pow(&sub, &-q);
            u.set_exp(lam, BigRational::from(r.clone()));
            b[j] = r.to_u64().expect("reduced exponent fits u64");
            if b[j] == 0 && u.is_one() {
                return Err(Error::CoincidentFactors);
            }
            factors[j] = u;
        } else {
            // negative remainder: reduce to l^{-b}, then flip using
            // 1/(1 - w l^{-b}) = -w^{-1} l^{b} / (1 - w^{-1} l^{b})
            let q = BigRational::from((&cj + &neg) / &a_big);
            let mut w = factors[j].mul_pow(&sub, &-q);
            w.set_exp(lam, BigRational::zero());
            let winv = w.inverse();
            sign = -sign;
            delta_e += &neg;
            delta_mon = delta_mon.mul(&winv);
            let mut u = winv;
            u.set_exp(lam, BigRational::from(neg.clone()));
            b[j] = neg.to_u64().expect("reduced exponent fits u64");
            factors[j] = u;
        }
    }
    // coprimality guard: factors must stay pairwise distinct
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if factors[i] == factors[j] {
                return Err(Error::CoincidentFactors);
            }
        }
    }
    Ok(ReduceOutcome {
        b,
        sign,
        delta_e,
        delta_mon,
    })
}

/// Reduce the numerator exponent of `lam` into `[1, a_s]`, multiplying by the
/// matching power of the underlined factor's `l`-free part.
fn reduce_numerator_monomial(
    mon: &Monomial,
    lam: usize,
    sub: &Monomial,
    a_s: u64,
) -> Result<Monomial> {
    let e_exp = mon.exp(lam).clone();
    if !e_exp.is_integer() {
        return Err(Error::NonIntegerExponent);
    }
    let e = e_exp.to_integer();
    let a_big = BigInt::from(a_s);
    let q = (&e - BigInt::one()).div_floor(&a_big);
    if q.is_zero() {
        return Ok(mon.clone());
    }
    let mut out = mon.mul_pow(sub, &-BigRational::from(q.clone()));
    out.set_exp(lam, BigRational::from(&e - &q * &a_big));
    Ok(out)
}

/// Apply the key transformation in place: `l`-exponents scale by `m`, the
/// underlined factor's other exponents divide by `m`.
fn gamma_in_place(
    factors: &mut [Monomial],
    numerator: &mut LaurentPoly,
    lam: usize,
    s: usize,
    m: u64,
) {
    if m == 1 {
        return;
    }
    let mb = BigRational::from(BigInt::from(m));
    for (j, f) in factors.iter_mut().enumerate() {
        if j == s {
            for i in 0..f.width() {
                if i != lam {
                    let e = f.exp(i) / &mb;
                    f.set_exp(i, e);
                }
            }
        } else {
            let e = f.exp(lam) * &mb;
            f.set_exp(lam, e);
        }
    }
    *numerator = LaurentPoly::new(
        numerator
            .terms()
            .iter()
            .map(|(c, mm)| {
                let mut mm = mm.clone();
                let e = mm.exp(lam) * &mb;
                mm.set_exp(lam, e);
                (c.clone(), mm)
            })
            .collect(),
    );
}

fn factor_entry_label(factors: &[Monomial], lam: usize) -> Result<Vec<u64>> {
    factors
        .iter()
        .map(|f| {
            let e = f.exp(lam);
            if !e.is_integer() {
                return Err(Error::NonIntegerExponent);
            }
            let v = e.to_integer();
            if v.is_negative() {
                return Err(Error::InvalidLabel("negative factor exponent".into()));
            }
            v.to_u64()
                .ok_or_else(|| Error::InvalidLabel("factor exponent exceeds u64".into()))
        })
        .collect()
}

/// One application of the partial-fraction operator attached to the
/// underlined factor: returns the leaf terms (free of `lam`) and the
/// instrumented recursion tree.
pub fn a_operator(term: &CTTerm, lam: usize, strategy: Strategy) -> Result<DecompOutput> {
    let s = term
        .underline
        .ok_or_else(|| Error::InvalidLabel("term has no underlined factor".into()))?;
    let factors: Vec<Monomial> = term.denominator.iter().map(|f| f.u.clone()).collect();
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if factors[i] == factors[j] {
                return Err(Error::CoincidentFactors);
            }
        }
    }
    let mut terms = Vec::new();
    let root = a_op_rec(factors, term.numerator.clone(), s, lam, strategy, &mut terms)?;
    let stats = tree_stats(&root);
    debug_assert_eq!(stats.nl as usize, terms.len());
    Ok(DecompOutput { terms, root, stats })
}

fn a_op_rec(
    mut factors: Vec<Monomial>,
    mut numerator: LaurentPoly,
    s: usize,
    lam: usize,
    strategy: Strategy,
    leaves: &mut Vec<CTTerm>,
) -> Result<DecNode> {
    let a_exp = factors[s].exp(lam).clone();
    if !a_exp.is_integer() {
        return Err(Error::NonIntegerExponent);
    }
    let a_int = a_exp.to_integer();
    if !a_int.is_positive() {
        return Err(Error::InvalidLabel(
            "underlined factor needs a positive exponent".into(),
        ));
    }
    let a_s = a_int
        .to_u64()
        .ok_or_else(|| Error::InvalidLabel("index exceeds u64".into()))?;

    if a_s == 1 {
        // base case: substitute l = u_s^{-1} into numerator and cofactors
        let mut sub = factors[s].clone();
        sub.set_exp(lam, BigRational::zero());
        let mut den = Vec::with_capacity(factors.len() - 1);
        for (j, f) in factors.iter().enumerate() {
            if j == s {
                continue;
            }
            let c = f.exp(lam).clone();
            let mut u = f.mul_pow(&sub, &-c);
            u.set_exp(lam, BigRational::zero());
            if u.is_one() {
                return Err(Error::CoincidentFactors);
            }
            den.push(BinomialFactor { u });
        }
        let num = LaurentPoly::new(
            numerator
                .terms()
                .iter()
                .map(|(c, mon)| {
                    let e = mon.exp(lam).clone();
                    let mut out = mon.mul_pow(&sub, &-e);
                    out.set_exp(lam, BigRational::zero());
                    (c.clone(), out)
                })
                .collect(),
        );
        let mut label = vec![0u64; factors.len()];
        label[s] = 1;
        leaves.push(CTTerm::new(num, den));
        return Ok(DecNode {
            s,
            label,
            multiplier: None,
            is_lll_node: false,
            children: vec![],
        });
    }

    let entry = factor_entry_label(&factors, lam)?;
    let reduced: Vec<u64> = entry
        .iter()
        .enumerate()
        .map(|(j, &x)| if j == s { a_s } else { srem(x as u128, a_s) })
        .collect();
    if label_gcd(&reduced) != 1 {
        return Err(Error::GcdNotOne);
    }
    let choice = select_multiplier(s, &entry, strategy)?;
    gamma_in_place(&mut factors, &mut numerator, lam, s, choice.m);
    let outcome = reduce_factors(&mut factors, lam, s, a_s)?;
    let mut sub = factors[s].clone();
    sub.set_exp(lam, BigRational::zero());
    let correction = BigRational::from(BigInt::from(outcome.sign));
    let mut reduced_mons = Vec::with_capacity(numerator.terms().len());
    for (c, mon) in numerator.terms() {
        let mut m2 = mon.mul(&outcome.delta_mon);
        m2.set_exp(lam, mon.exp(lam) + BigRational::from(outcome.delta_e.clone()));
        reduced_mons.push((c * &correction, reduce_numerator_monomial(&m2, lam, &sub, a_s)?));
    }
    let numerator = LaurentPoly::new(reduced_mons);

    let mut children = Vec::new();
    for j in 0..factors.len() {
        if j == s || outcome.b[j] == 0 {
            continue;
        }
        let child_num = numerator.scale(&-BigRational::one(), &Monomial::one(factors[s].width()));
        children.push(a_op_rec(factors.clone(), child_num, j, lam, strategy, leaves)?);
    }
    if children.is_empty() {
        return Err(Error::GcdNotOne);
    }
    Ok(DecNode {
        s,
        label: reduced,
        multiplier: Some(choice.clone()),
        is_lll_node: choice.is_lll_suggested,
        children,
    })
}

/// Public modular-reduction step on a term with an underlined factor: applies
/// the factor rewrites and numerator normalization of one recursion level
/// without recursing.
pub fn reduce_mod(term: &CTTerm, lam: usize) -> Result<CTTerm> {
    let s = term
        .underline
        .ok_or_else(|| Error::InvalidLabel("term has no underlined factor".into()))?;
    let mut factors: Vec<Monomial> = term.denominator.iter().map(|f| f.u.clone()).collect();
    let a_exp = factors[s].exp(lam).clone();
    if !a_exp.is_integer() || !a_exp.is_positive() {
        return Err(Error::InvalidLabel(
            "underlined factor needs a positive integer exponent".into(),
        ));
    }
    let a_s = a_exp
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidLabel("index exceeds u64".into()))?;
    let outcome = reduce_factors(&mut factors, lam, s, a_s)?;
    let mut sub = factors[s].clone();
    sub.set_exp(lam, BigRational::zero());
    let correction = BigRational::from(BigInt::from(outcome.sign));
    let mut mons = Vec::with_capacity(term.numerator.terms().len());
    for (c, mon) in term.numerator.terms() {
        let mut m2 = mon.mul(&outcome.delta_mon);
        m2.set_exp(lam, mon.exp(lam) + BigRational::from(outcome.delta_e.clone()));
        mons.push((c * &correction, reduce_numerator_monomial(&m2, lam, &sub, a_s)?));
    }
    Ok(CTTerm {
        numerator: LaurentPoly::new(mons),
        denominator: factors.into_iter().map(|u| BinomialFactor { u }).collect(),
        underline: Some(s),
    })
}

fn validate_knapsack(a: &[u64], s: usize) -> Result<()> {
    if a.is_empty() || s >= a.len() {
        return Err(Error::InvalidInput("index out of range".into()));
    }
    if a.iter().any(|&x| x == 0) {
        return Err(Error::InvalidInput(
            "knapsack entries must be positive".into(),
        ));
    }
    if label_gcd(a) != 1 {
        return Err(Error::GcdNotOne);
    }
    Ok(())
}

/// Build the knapsack term `l^{-a0} / prod_j (1 - y_j l^{a_j})` over the
/// order `(l, y_1, ..., y_n)`.
pub fn knapsack_term(a0: u64, a: &[u64]) -> CTTerm {
    let n = a.len();
    let width = n + 1;
    let mut num = Monomial::one(width);
    num.set_exp(0, -BigRational::from(BigInt::from(a0)));
    let denominator = a
        .iter()
        .enumerate()
        .map(|(j, &aj)| {
            let mut u = Monomial::one(width);
            u.set_exp(0, BigRational::from(BigInt::from(aj)));
            u.set_exp(1 + j, BigRational::one());
            BinomialFactor { u }
        })
        .collect();
    CTTerm::new(LaurentPoly::monomial(BigRational::one(), num), denominator)
}

/// Decompose the denumerant term with factor `s` underlined. Output terms are
/// free of the working variable with all-integer exponents, canonically
/// sorted.
pub fn decompose_knapsack(
    a0: u64,
    a: &[u64],
    s: usize,
    strategy: Strategy,
) -> Result<DecompOutput> {
    validate_knapsack(a, s)?;
    let term = knapsack_term(a0, a).with_underline(s);
    let mut out = a_operator(&term, 0, strategy)?;
    for t in &out.terms {
        if !t.is_integral() {
            return Err(Error::NonIntegerLeaf);
        }
        for (_, mon) in t.numerator.terms() {
            if !mon.exp(0).is_zero() {
                return Err(Error::NonIntegerLeaf);
            }
        }
    }
    canonical_sort_terms(&mut out.terms);
    if matches!(strategy, Strategy::Auto | Strategy::AlwaysOne) {
        let f = f_recursive(strategy == Strategy::Auto, s, a)?;
        if out.stats.nl != f {
            return Err(Error::InvalidLabel(
                "leaf count disagrees with the counting recursion".into(),
            ));
        }
    }
    Ok(out)
}

/// Structural checks on a decomposition tree: child indices at most half the
/// parent index, gcd-1 labels, depth logarithmic in the root index.
pub fn check_tree_invariants(root: &DecNode) -> Result<()> {
    fn walk(node: &DecNode) -> Result<()> {
        let idx = node.index();
        if !node.is_leaf() {
            if label_gcd(&node.label) != 1 {
                return Err(Error::GcdNotOne);
            }
            for c in &node.children {
                if c.index() > idx / 2 {
                    return Err(Error::InvalidLabel(format!(
                        "child index {} exceeds half of {}",
                        c.index(),
                        idx
                    )));
                }
                walk(c)?;
            }
        }
        Ok(())
    }
    walk(root)?;
    let stats = tree_stats(root);
    let idx = root.index();
    if idx >= 2 {
        let log2 = 63 - idx.leading_zeros();
        if stats.depth > log2 {
            return Err(Error::InvalidLabel(format!(
                "depth {} exceeds log2 of root index {}",
                stats.depth, idx
            )));
        }
    }
    Ok(())
}

/// Leaf-level checks: every output term has integer exponents and a
/// unimodular denominator exponent matrix.
pub fn check_output_invariants(out: &DecompOutput) -> Result<()> {
    for t in &out.terms {
        if !t.is_integral() {
            return Err(Error::NonIntegerLeaf);
        }
        let m = t.den_exponent_matrix()?;
        if m.rows() > 0 {
            let g = maximal_minor_gcd(&m)?;
            if !g.is_one() {
                return Err(Error::InvalidLabel(format!(
                    "leaf cone has index {g}, expected unimodular"
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar shape: one expensive walk per (a, s, strategy, direction), then each
// right-hand side a0 replays cheap integer updates along the same tree.
// ---------------------------------------------------------------------------

struct ShapeNode {
    a_s: u64,
    m: u64,
    sigma: i8,
    delta_e: BigInt,
    /// direction dot the flip-correction monomial, as an unreduced fraction
    d_delta: (BigInt, BigInt),
    /// direction dot the underlined factor's l-free part (post-gamma); at
    /// leaves this is the substitution monomial
    d_alpha: (BigInt, BigInt),
    children: Vec<u32>,
    leaf: Option<u32>,
}

struct LeafData {
    /// (-1)^D / prod_k (c . alpha_k)
    scale: BigRational,
    /// T_j / (D - j)! for the cached Todd product, j = 0..=D
    todd_over_fact: Vec<BigRational>,
    order: usize,
}

/// A reusable evaluation shape for one cone `(a, s)`: the tree, the per-node
/// numerator recipe as scalars against a fixed generic direction, and
/// per-leaf Todd data.
pub struct EvalShape {
    nodes: Vec<ShapeNode>,
    leaves: Vec<LeafData>,
    pub stats: TreeStats,
    pub root: DecNode,
}

fn dot_direction(c: &[BigInt], mon: &Monomial) -> (BigInt, BigInt) {
    // exact rational dot product kept as an unreduced fraction
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (ci, e) in c.iter().zip(mon.exps()) {
        if e.is_zero() || ci.is_zero() {
            continue;
        }
        num = num * e.denom() + ci * e.numer() * &den;
        den *= e.denom();
    }
    (num, den)
}

/// Build the evaluation shape for the cone `(a, s)` against `direction`
/// (indexed like the working order `(l, y_1, ..., y_n)`, entry 0 unused).
/// Fails with [`Error::NonGenericDirection`] when some leaf denominator is
/// orthogonal to the direction; callers redraw and retry.
pub fn build_shape(
    a: &[u64],
    s: usize,
    strategy: Strategy,
    direction: &[BigInt],
    check_leaves: bool,
) -> Result<EvalShape> {
    validate_knapsack(a, s)?;
    let term = knapsack_term(0, a);
    let factors: Vec<Monomial> = term.denominator.iter().map(|f| f.u.clone()).collect();
    let mut shape = EvalShape {
        nodes: Vec::new(),
        leaves: Vec::new(),
        stats: TreeStats::default(),
        root: DecNode {
            s,
            label: vec![],
            multiplier: None,
            is_lll_node: false,
            children: vec![],
        },
    };
    let root = shape_rec(factors, s, strategy, direction, check_leaves, &mut shape)?;
    shape.stats = tree_stats(&root);
    shape.root = root;
    Ok(shape)
}

fn shape_rec(
    mut factors: Vec<Monomial>,
    s: usize,
    strategy: Strategy,
    direction: &[BigInt],
    check_leaves: bool,
    shape: &mut EvalShape,
) -> Result<DecNode> {
    let lam = 0usize;
    let a_exp = factors[s].exp(lam).clone();
    if !a_exp.is_integer() || !a_exp.is_positive() {
        return Err(Error::InvalidLabel("bad underlined exponent".into()));
    }
    let a_s = a_exp
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidLabel("index exceeds u64".into()))?;

    if a_s == 1 {
        let mut sub = factors[s].clone();
        sub.set_exp(lam, BigRational::zero());
        let order = factors.len() - 1;
        let mut dots: Vec<BigInt> = Vec::with_capacity(order);
        let mut den_rows: Vec<Monomial> = Vec::with_capacity(order);
        for (j, f) in factors.iter().enumerate() {
            if j == s {
                continue;
            }
            let c = f.exp(lam).clone();
            let mut u = f.mul_pow(&sub, &-c);
            u.set_exp(lam, BigRational::zero());
            if u.is_one() {
                return Err(Error::CoincidentFactors);
            }
            if !u.is_integral() {
                return Err(Error::NonIntegerLeaf);
            }
            let (num, den) = dot_direction(direction, &u);
            debug_assert!(den.is_one());
            if num.is_zero() {
                return Err(Error::NonGenericDirection);
            }
            dots.push(num);
            den_rows.push(u);
        }
        if check_leaves && !den_rows.is_empty() {
            let cols = den_rows[0].width();
            let mut data = Vec::with_capacity(den_rows.len() * cols);
            for r in &den_rows {
                for e in r.exps() {
                    data.push(e.to_integer());
                }
            }
            let m = crate::matrix::IntMatrix::new(den_rows.len(), cols, data);
            let g = maximal_minor_gcd(&m)?;
            if !g.is_one() {
                return Err(Error::InvalidLabel(format!(
                    "leaf cone has index {g}, expected unimodular"
                )));
            }
        }
        // cached Todd product and scale
        let mut todd = crate::series::TruncatedSeries::one(order);
        let mut scale = BigRational::one();
        for d in &dots {
            let b = BigRational::from(d.clone());
            todd = todd.mul(&todd_factor_series(&b, order)?);
            scale /= b;
        }
        if order % 2 == 1 {
            scale = -scale;
        }
        let mut facts = vec![BigRational::one(); order + 1];
        let mut fact = BigRational::one();
        for (k, slot) in facts.iter_mut().enumerate().skip(1) {
            fact *= BigRational::from(BigInt::from(k as u64));
            *slot = fact.clone();
        }
        let todd_over_fact: Vec<BigRational> = todd
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| c / &facts[order - j])
            .collect();
        let leaf_id = shape.leaves.len() as u32;
        shape.leaves.push(LeafData {
            scale,
            todd_over_fact,
            order,
        });
        let d_alpha = dot_direction(direction, &sub);
        shape.nodes.push(ShapeNode {
            a_s: 1,
            m: 1,
            sigma: 1,
            delta_e: BigInt::zero(),
            d_delta: (BigInt::zero(), BigInt::one()),
            d_alpha,
            children: vec![],
            leaf: Some(leaf_id),
        });
        let mut label = vec![0u64; factors.len()];
        label[s] = 1;
        return Ok(DecNode {
            s,
            label,
            multiplier: None,
            is_lll_node: false,
            children: vec![],
        });
    }

    let entry = factor_entry_label(&factors, lam)?;
    let reduced: Vec<u64> = entry
        .iter()
        .enumerate()
        .map(|(j, &x)| if j == s { a_s } else { srem(x as u128, a_s) })
        .collect();
    if label_gcd(&reduced) != 1 {
        return Err(Error::GcdNotOne);
    }
    let choice = select_multiplier(s, &entry, strategy)?;
    let mut dummy = LaurentPoly::zero();
    gamma_in_place(&mut factors, &mut dummy, lam, s, choice.m);
    let outcome = reduce_factors(&mut factors, lam, s, a_s)?;
    let mut sub = factors[s].clone();
    sub.set_exp(lam, BigRational::zero());
    let d_delta = dot_direction(direction, &outcome.delta_mon);
    let d_alpha = dot_direction(direction, &sub);

    let node_id = shape.nodes.len();
    shape.nodes.push(ShapeNode {
        a_s,
        m: choice.m,
        sigma: outcome.sign,
        delta_e: outcome.delta_e.clone(),
        d_delta,
        d_alpha,
        children: vec![],
        leaf: None,
    });
    let mut children_nodes = Vec::new();
    let mut child_ids = Vec::new();
    for j in 0..factors.len() {
        if j == s || outcome.b[j] == 0 {
            continue;
        }
        let child_id = shape.nodes.len() as u32;
        let child = shape_rec(factors.clone(), j, strategy, direction, check_leaves, shape)?;
        child_ids.push(child_id);
        children_nodes.push(child);
    }
    if children_nodes.is_empty() {
        return Err(Error::GcdNotOne);
    }
    shape.nodes[node_id].children = child_ids;
    Ok(DecNode {
        s,
        label: reduced,
        multiplier: Some(choice.clone()),
        is_lll_node: choice.is_lll_suggested,
        children: children_nodes,
    })
}

impl EvalShape {
    /// Exact value of this cone's contribution at the given right-hand side,
    /// with all variables specialized to one through the cached direction.
    pub fn evaluate_at(&self, a0: &BigInt) -> Result<BigRational> {
        let mut total = BigRational::zero();
        // stack of (node, sign, e, g_num, g_den)
        let mut stack: Vec<(u32, i8, BigInt, BigInt, BigInt)> =
            vec![(0, 1, -a0.clone(), BigInt::zero(), BigInt::one())];
        while let Some((id, sign, e, gp, gq)) = stack.pop() {
            let node = &self.nodes[id as usize];
            if let Some(leaf_id) = node.leaf {
                // substitution: g_leaf = g - e * d_alpha, must be an integer
                let (pa, qa) = &node.d_alpha;
                let num = &gp * qa - &e * pa * &gq;
                let den = &gq * qa;
                let (g, r) = num.div_rem(&den);
                if !r.is_zero() {
                    return Err(Error::NonIntegerResult(
                        "leaf exponent dot product is fractional".into(),
                    ));
                }
                let leaf = &self.leaves[leaf_id as usize];
                // sum_j T_j/(D-j)! g^{D-j} by Horner
                let g_rat = BigRational::from(g);
                let mut acc = BigRational::zero();
                for j in 0..=leaf.order {
                    acc = acc * &g_rat + &leaf.todd_over_fact[j];
                }
                let contrib = &leaf.scale * acc;
                if sign > 0 {
                    total += contrib;
                } else {
                    total -= contrib;
                }
                continue;
            }
            let e1 = BigInt::from(node.m) * &e + &node.delta_e;
            let (dp, dq) = &node.d_delta;
            let mut gp1 = &gp * dq + dp * &gq;
            let mut gq1 = &gq * dq;
            let a_big = BigInt::from(node.a_s);
            let q = (&e1 - BigInt::one()).div_floor(&a_big);
            let e2 = &e1 - &q * &a_big;
            let (pa, qa) = &node.d_alpha;
            gp1 = &gp1 * qa - &q * pa * &gq1;
            gq1 = &gq1 * qa;
            let sign2 = sign * node.sigma;
            for &c in &node.children {
                stack.push((c, -sign2, e2.clone(), gp1.clone(), gq1.clone()));
            }
        }
        Ok(total)
    }
}
