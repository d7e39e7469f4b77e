//! Multivariate constant-term extraction for Elliott rational functions:
//! slack-variable injection, type-matrix optimization through Smith normal
//! form and LLL, and iterated single-variable elimination driven by the cone
//! decomposition.
//!
//! The working field orders slack variables first (they are the most
//! significant), so freshly slacked factors are Small no matter what their
//! elimination-variable exponents look like. Per summand, the constant term
//! in one variable is the polynomial part of the partial fraction
//! decomposition at zero plus the operator values of the factors whose
//! monomial stays Small in the working order.

use crate::decdenu::{a_operator, tree_stats, TreeStats};
use crate::elliott::{
    normalize_lambda_positive, BinomialFactor, CTTerm, LaurentPoly, Magnitude, Monomial, VarOrder,
};
use crate::lattice::{lll_reduce, Strategy};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An Elliott constant-term problem: one term (possibly with a Laurent
/// polynomial numerator), the working order, and the designated elimination
/// and slack coordinates.
#[derive(Clone, Debug)]
pub struct CoreProblem {
    pub term: CTTerm,
    pub order: VarOrder,
    /// coordinates of the elimination variables
    pub lambda: Vec<usize>,
    /// coordinates of the slack variables (empty before slack attachment)
    pub slack: Vec<usize>,
    pub slacked: bool,
}

impl CoreProblem {
    /// Wrap a parsed input; factors must be proper (Small) in the given
    /// order, which is the field the constant term is taken in.
    pub fn from_input(term: CTTerm, order: VarOrder, lambda: Vec<usize>) -> Result<Self> {
        for f in &term.denominator {
            match f.u.compare_to_one() {
                Magnitude::One => return Err(Error::DegenerateFactor),
                Magnitude::Large => return Err(Error::NonProperFactor),
                Magnitude::Small => {}
            }
        }
        Ok(CoreProblem {
            term,
            order,
            lambda,
            slack: vec![],
            slacked: false,
        })
    }

    /// Wrap a problem whose factors already carry distinct slack variables
    /// (each factor Small through its slack tag in the given order).
    pub fn from_slacked_input(
        term: CTTerm,
        order: VarOrder,
        lambda: Vec<usize>,
        slack: Vec<usize>,
    ) -> Result<Self> {
        if slack.len() < term.denominator.len() {
            return Err(Error::InvalidInput(
                "need one slack variable per denominator factor".into(),
            ));
        }
        for f in &term.denominator {
            if f.u.compare_to_one() != Magnitude::Small {
                return Err(Error::NonProperFactor);
            }
        }
        Ok(CoreProblem {
            term,
            order,
            lambda,
            slack,
            slacked: true,
        })
    }

    /// The type matrix: column `j` holds factor `j`'s elimination-variable
    /// exponents.
    pub fn type_matrix(&self) -> Result<IntMatrix> {
        let rows = self.lambda.len();
        let cols = self.term.denominator.len();
        let mut data = Vec::with_capacity(rows * cols);
        for &c in &self.lambda {
            for f in &self.term.denominator {
                let e = f.u.exp(c);
                if !e.is_integer() {
                    return Err(Error::NonIntegerExponent);
                }
                data.push(e.to_integer());
            }
        }
        Ok(IntMatrix::new(rows, cols, data))
    }
}

/// Step 1.1: prepend one slack variable per denominator factor. The new
/// working order is `(z_1, ..., z_n, original variables)` and factor `j`
/// gains `z_j` with exponent one.
pub fn attach_slack(p: &CoreProblem) -> Result<CoreProblem> {
    if p.slacked {
        return Err(Error::AlreadySlacked);
    }
    let n = p.term.denominator.len();
    let widen = |m: &Monomial, slot: Option<usize>| -> Monomial {
        let mut exps = vec![BigRational::zero(); n];
        if let Some(j) = slot {
            exps[j] = BigRational::one();
        }
        exps.extend(m.exps().iter().cloned());
        Monomial::from_exps(exps)
    };
    let numerator = LaurentPoly::new(
        p.term
            .numerator
            .terms()
            .iter()
            .map(|(c, m)| (c.clone(), widen(m, None)))
            .collect(),
    );
    let denominator = p
        .term
        .denominator
        .iter()
        .enumerate()
        .map(|(j, f)| BinomialFactor {
            u: widen(&f.u, Some(j)),
        })
        .collect();
    let mut names: Vec<String> = (1..=n).map(|j| format!("z{j}")).collect();
    names.extend(p.order.names().iter().cloned());
    Ok(CoreProblem {
        term: CTTerm {
            numerator,
            denominator,
            underline: None,
        },
        order: VarOrder::new(names),
        lambda: p.lambda.iter().map(|&c| c + n).collect(),
        slack: (0..n).collect(),
        slacked: true,
    })
}

/// Apply a nonsingular rational matrix to the designated coordinates of every
/// exponent vector in the term: the exponent sub-vector `alpha` over `coords`
/// becomes `w * alpha`.
pub fn apply_matrix_action_on(
    w: &[Vec<BigRational>],
    coords: &[usize],
    t: &CTTerm,
) -> Result<CTTerm> {
    let r = coords.len();
    assert_eq!(w.len(), r);
    if crate::elliott::rational_det(w).is_zero() {
        return Err(Error::SingularMatrix);
    }
    let act = |m: &Monomial| -> Monomial {
        let mut out = m.clone();
        for (i, &ci) in coords.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (j, &cj) in coords.iter().enumerate() {
                if w[i][j].is_zero() {
                    continue;
                }
                acc += &w[i][j] * m.exp(cj);
            }
            out.set_exp(ci, acc);
        }
        out
    };
    Ok(CTTerm {
        numerator: LaurentPoly::new(
            t.numerator
                .terms()
                .iter()
                .map(|(c, m)| (c.clone(), act(m)))
                .collect(),
        ),
        denominator: t
            .denominator
            .iter()
            .map(|f| BinomialFactor { u: act(&f.u) })
            .collect(),
        underline: t.underline,
    })
}

/// Step 1.2: optimize the type matrix.
///
/// Smith normal form scales the elimination block so the type becomes
/// integral with unit determinant factors; numerator monomials that cannot
/// meet the integer denominator lattice (fractional exponents, or support on
/// the rank-deficient directions) are dropped; an LLL pass leaves the type
/// rows as a reduced basis.
pub fn optimize_type(p: &CoreProblem) -> Result<CoreProblem> {
    let a = p.type_matrix()?;
    let all_zero = (0..a.rows()).all(|i| a.row(i).iter().all(|x| x.is_zero()));
    if all_zero {
        return Err(Error::ZeroType);
    }
    let snf = smith_normal_form(&a);
    let rank = snf.rank();
    let r = p.lambda.len();
    // w1 = diag(1/d_1, ..., 1/d_rank, 1, ...) * U
    let mut w1 = vec![vec![BigRational::zero(); r]; r];
    let factors = snf.invariant_factors();
    for i in 0..r {
        for j in 0..r {
            let u = BigRational::from(snf.u[(i, j)].clone());
            w1[i][j] = if i < rank {
                u / BigRational::from(factors[i].clone())
            } else {
                u
            };
        }
    }
    let t1 = apply_matrix_action_on(&w1, &p.lambda, &p.term)?;
    // drop numerator monomials that cannot contribute: nonzero exponent on a
    // dropped elimination coordinate or a fractional exponent on a kept one
    let kept_coords: Vec<usize> = p.lambda[..rank].to_vec();
    let dropped_coords: Vec<usize> = p.lambda[rank..].to_vec();
    let numerator = LaurentPoly::new(
        t1.numerator
            .terms()
            .iter()
            .filter(|(_, m)| {
                dropped_coords.iter().all(|&c| m.exp(c).is_zero())
                    && kept_coords.iter().all(|&c| m.exp(c).is_integer())
            })
            .map(|(c, m)| (c.clone(), m.clone()))
            .collect(),
    );
    let t1 = CTTerm {
        numerator,
        denominator: t1.denominator,
        underline: None,
    };
    // the surviving type block is integral; reduce its rows with LLL
    let reduced_problem = CoreProblem {
        term: t1,
        order: p.order.clone(),
        lambda: kept_coords.clone(),
        slack: p.slack.clone(),
        slacked: p.slacked,
    };
    let a2 = reduced_problem.type_matrix()?;
    let red = lll_reduce(&a2, &BigRational::new(BigInt::from(3), BigInt::from(4)))?;
    let w2: Vec<Vec<BigRational>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| BigRational::from(red.transform[(i, j)].clone()))
                .collect()
        })
        .collect();
    let t2 = apply_matrix_action_on(&w2, &kept_coords, &reduced_problem.term)?;
    Ok(CoreProblem {
        term: t2,
        order: p.order.clone(),
        lambda: kept_coords,
        slack: p.slack.clone(),
        slacked: p.slacked,
    })
}

/// Elimination trace: per-variable term counts and aggregated tree
/// statistics.
#[derive(Clone, Debug, Default)]
pub struct EliminationReport {
    pub rounds: Vec<RoundReport>,
    pub final_terms: usize,
}

#[derive(Clone, Debug)]
pub struct RoundReport {
    pub var: String,
    pub terms_after: usize,
    pub stats: TreeStats,
}

/// The constant term of one summand in one variable.
///
/// After flipping factors to a positive `lam`-exponent, the summand's partial
/// fraction decomposition in `lam` contributes the polynomial part at zero
/// plus the operator value of every factor whose monomial remains Small in
/// the working order; Large factors expand with strictly negative powers and
/// contribute nothing.
pub fn ct_lambda(term: &CTTerm, lam: usize, strategy: Strategy) -> Result<(Vec<CTTerm>, TreeStats)> {
    let mut stats = TreeStats::default();
    if term.numerator.is_zero() {
        return Ok((vec![], stats));
    }
    let mut t = normalize_lambda_positive(term, lam)?;
    // divisibility pre-step: if every factor exponent shares a divisor g,
    // only numerator monomials with lam-exponent divisible by g can meet the
    // constant term; substitute lam^g for lam
    let mut g = BigInt::zero();
    for f in &t.denominator {
        let e = f.u.exp(lam);
        if !e.is_integer() {
            return Err(Error::NonIntegerExponent);
        }
        g = g.gcd(&e.to_integer());
    }
    if g > BigInt::one() {
        let gr = BigRational::from(g.clone());
        let numerator = LaurentPoly::new(
            t.numerator
                .terms()
                .iter()
                .filter(|(_, m)| {
                    m.exp(lam).is_integer() && m.exp(lam).to_integer().is_multiple_of(&g)
                })
                .map(|(c, m)| {
                    let mut m = m.clone();
                    let e = m.exp(lam) / &gr;
                    m.set_exp(lam, e);
                    (c.clone(), m)
                })
                .collect(),
        );
        let denominator = t
            .denominator
            .iter()
            .map(|f| {
                let mut u = f.u.clone();
                let e = u.exp(lam) / &gr;
                u.set_exp(lam, e);
                BinomialFactor { u }
            })
            .collect();
        t = CTTerm {
            numerator,
            denominator,
            underline: None,
        };
    }
    if t.numerator.is_zero() {
        return Ok((vec![], stats));
    }

    let mut out = Vec::new();
    let lam_factors: Vec<usize> = t
        .denominator
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.u.exp(lam).is_zero())
        .map(|(i, _)| i)
        .collect();
    let free_factors: Vec<BinomialFactor> = t
        .denominator
        .iter()
        .filter(|f| f.u.exp(lam).is_zero())
        .cloned()
        .collect();

    // polynomial part of the partial fraction decomposition at lam = 0
    let p0 = polynomial_part_at_zero(&t, lam, &lam_factors)?;
    if !p0.is_zero() {
        out.push(CTTerm {
            numerator: p0,
            denominator: free_factors,
            underline: None,
        });
    }

    for &i in &lam_factors {
        if t.denominator[i].u.compare_to_one() != Magnitude::Small {
            continue;
        }
        let sub = t.clone().with_underline(i);
        let dec = a_operator(&sub, lam, strategy)?;
        let sub_stats = tree_stats(&dec.root);
        stats.nl += sub_stats.nl;
        stats.depth = stats.depth.max(sub_stats.depth);
        stats.internal_nodes += sub_stats.internal_nodes;
        stats.lll_nodes += sub_stats.lll_nodes;
        out.extend(dec.terms);
    }
    Ok((out, stats))
}

/// The `lam = 0` value of the polynomial part of the partial fraction
/// decomposition: nonzero only for numerator monomials whose `lam`-degree
/// reaches the denominator's total `lam`-degree. Computed by long division of
/// `lam^e` by the expanded denominator.
fn polynomial_part_at_zero(
    t: &CTTerm,
    lam: usize,
    lam_factors: &[usize],
) -> Result<LaurentPoly> {
    let total_deg: BigInt = lam_factors
        .iter()
        .map(|&i| t.denominator[i].u.exp(lam).to_integer())
        .sum();
    let s = total_deg.to_usize().unwrap_or(usize::MAX);
    let mut contributions = LaurentPoly::zero();
    for (coeff, mon) in t.numerator.terms() {
        let e_exp = mon.exp(lam);
        if !e_exp.is_integer() {
            continue;
        }
        let e_int = e_exp.to_integer();
        if e_int.is_negative() {
            continue;
        }
        let e = e_int.to_usize().expect("numerator degree fits usize");
        if e < s {
            continue;
        }
        let mut base = mon.clone();
        base.set_exp(lam, BigRational::zero());
        if s == 0 {
            // no lam-carrying factors: only exponent zero survives
            if e == 0 {
                contributions = contributions.add(&LaurentPoly::monomial(coeff.clone(), base));
            }
            continue;
        }
        // expand the lam-carrying denominator as a polynomial in lam
        let width = mon.width();
        let mut den: Vec<LaurentPoly> = vec![LaurentPoly::zero(); s + 1];
        den[0] = LaurentPoly::monomial(BigRational::one(), Monomial::one(width));
        let mut deg = 0usize;
        for &i in lam_factors {
            let f = &t.denominator[i];
            let fd = f.u.exp(lam).to_integer().to_usize().unwrap();
            let mut fu = f.u.clone();
            fu.set_exp(lam, BigRational::zero());
            let mut next: Vec<LaurentPoly> = vec![LaurentPoly::zero(); s + 1];
            for (d, c) in den.iter().enumerate().take(deg + 1) {
                if c.is_zero() {
                    continue;
                }
                next[d] = next[d].add(c);
                let shifted = c.scale(&-BigRational::one(), &fu);
                next[d + fd] = next[d + fd].add(&shifted);
            }
            den = next;
            deg += fd;
        }
        debug_assert_eq!(deg, s);
        // long division of lam^e by den, tracking only what reaches q_0
        let lead_inv = {
            let lead = &den[s];
            debug_assert_eq!(lead.terms().len(), 1);
            let (c, m) = &lead.terms()[0];
            LaurentPoly::monomial(c.recip(), m.inverse())
        };
        let mut rem: Vec<LaurentPoly> = vec![LaurentPoly::zero(); e + 1];
        rem[e] = LaurentPoly::monomial(BigRational::one(), Monomial::one(width));
        let mut q0 = LaurentPoly::zero();
        for k in (0..=e - s).rev() {
            let top = rem[s + k].clone();
            if top.is_zero() {
                continue;
            }
            let q = top.mul(&lead_inv);
            for (d, c) in den.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let sub = q.mul(c).scale(&-BigRational::one(), &Monomial::one(width));
                rem[d + k] = rem[d + k].add(&sub);
            }
            if k == 0 {
                q0 = q0.add(&q);
            }
        }
        contributions = contributions.add(&q0.scale(coeff, &base));
    }
    Ok(contributions)
}

/// Iterated elimination of every designated variable, slowest-growing
/// variable first (fewest carrying factors, then smallest worst exponent).
pub fn eliminate_all(
    p: &CoreProblem,
    strategy: Strategy,
) -> Result<(Vec<CTTerm>, EliminationReport)> {
    let mut terms = vec![p.term.clone()];
    let mut remaining = p.lambda.clone();
    let mut report = EliminationReport::default();
    while !remaining.is_empty() {
        // heuristic: fewest carrying factors, then smallest max |exponent|
        let mut best: Option<(usize, (usize, BigRational))> = None;
        for &lam in &remaining {
            let mut count = 0usize;
            let mut max_abs = BigRational::zero();
            for t in &terms {
                for f in &t.denominator {
                    let e = f.u.exp(lam);
                    if !e.is_zero() {
                        count += 1;
                        if e.abs() > max_abs {
                            max_abs = e.abs();
                        }
                    }
                }
            }
            let key = (count, max_abs);
            match &best {
                Some((_, bk)) if *bk <= key => {}
                _ => best = Some((lam, key)),
            }
        }
        let lam = best.expect("nonempty remaining").0;
        remaining.retain(|&c| c != lam);

        let mut next = Vec::new();
        let mut stats = TreeStats::default();
        for t in &terms {
            let (sub, st) = ct_lambda(t, lam, strategy)?;
            next.extend(sub);
            stats.nl += st.nl;
            stats.depth = stats.depth.max(st.depth);
            stats.internal_nodes += st.internal_nodes;
            stats.lll_nodes += st.lll_nodes;
        }
        terms = next;
        report.rounds.push(RoundReport {
            var: p.order.name(lam).to_string(),
            terms_after: terms.len(),
            stats,
        });
    }
    for t in &terms {
        for &lam in &p.lambda {
            debug_assert!(t.denominator.iter().all(|f| f.u.exp(lam).is_zero()));
            debug_assert!(t
                .numerator
                .terms()
                .iter()
                .all(|(_, m)| m.exp(lam).is_zero()));
        }
    }
    crate::elliott::canonical_sort_terms(&mut terms);
    report.final_terms = terms.len();
    Ok((terms, report))
}

/// Step 3 in restricted form: set every slack exponent to zero. Fails when a
/// denominator factor would degenerate to `1 - 1`; such sums need the numeric
/// specialization route instead.
pub fn substitute_slack_ones(terms: &[CTTerm], slack: &[usize]) -> Result<Vec<CTTerm>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let numerator = LaurentPoly::new(
            t.numerator
                .terms()
                .iter()
                .map(|(c, m)| {
                    let mut m = m.clone();
                    for &z in slack {
                        m.set_exp(z, BigRational::zero());
                    }
                    (c.clone(), m)
                })
                .collect(),
        );
        let mut denominator = Vec::with_capacity(t.denominator.len());
        for (i, f) in t.denominator.iter().enumerate() {
            let mut u = f.u.clone();
            for &z in slack {
                u.set_exp(z, BigRational::zero());
            }
            if u.is_one() {
                return Err(Error::SlackDegenerate(i));
            }
            denominator.push(BinomialFactor { u });
        }
        out.push(CTTerm {
            numerator,
            denominator,
            underline: None,
        });
    }
    Ok(out)
}

/// The full pipeline on a fresh problem: slack, optimize, eliminate.
pub fn lll_ct_euclid(
    input: &CoreProblem,
    strategy: Strategy,
) -> Result<(Vec<CTTerm>, CoreProblem, EliminationReport)> {
    let slacked = attach_slack(input)?;
    let optimized = optimize_type(&slacked)?;
    let (terms, report) = eliminate_all(&optimized, strategy)?;
    Ok((terms, optimized, report))
}
