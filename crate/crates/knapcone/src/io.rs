//! JSON and CSV formats shared by the command-line tool and the test
//! fixtures. All exact values travel as decimal strings; every document
//! carries `format: 1`.

use crate::cteuclid::{CoreProblem, EliminationReport};
use crate::decdenu::TreeStats;
use crate::elliott::{BinomialFactor, CTTerm, LaurentPoly, Monomial, VarOrder};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

pub const FORMAT_VERSION: u32 = 1;

/// A knapsack instance: right-hand side, coefficient vector, and optionally a
/// claimed Frobenius number.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub a0: u64,
    pub a: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<u64>,
}

impl InstanceFile {
    pub fn validate(&self) -> Result<()> {
        if self.format != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported format {}, expected {}",
                self.format, FORMAT_VERSION
            )));
        }
        if self.a.is_empty() {
            return Err(Error::InvalidInput("field `a` must be nonempty".into()));
        }
        if self.a.iter().any(|&x| x == 0) {
            return Err(Error::InvalidInput(
                "field `a` must contain positive integers".into(),
            ));
        }
        let g = self.a.iter().fold(0u64, |g, &x| num_integer::gcd(g, x));
        if g != 1 {
            return Err(Error::InvalidInput(format!(
                "field `a` must have gcd 1, found {g}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialJson {
    pub coeff: String,
    pub exponents: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub numerator: Vec<MonomialJson>,
    /// one exponent vector per denominator factor `1 - u`
    pub denominator: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatsJson {
    pub nl: u64,
    pub depth: u32,
    pub internal_nodes: u64,
    pub lll_nodes: u64,
}

impl From<TreeStats> for StatsJson {
    fn from(s: TreeStats) -> Self {
        StatsJson {
            nl: s.nl,
            depth: s.depth,
            internal_nodes: s.internal_nodes,
            lll_nodes: s.lll_nodes,
        }
    }
}

/// Output of `knapcone decompose`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposeOutput {
    pub format: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub a0: u64,
    pub a: Vec<u64>,
    /// 1-based underline index
    pub index: usize,
    pub strategy: String,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsJson>,
}

fn rational_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn rational_from_string(s: &str) -> Result<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|e| Error::InvalidInput(format!("bad numerator `{num}`: {e}")))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|e| Error::InvalidInput(format!("bad denominator `{den}`: {e}")))?;
        if d == BigInt::from(0) {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s.trim())
            .map_err(|e| Error::InvalidInput(format!("bad integer `{s}`: {e}")))?;
        Ok(BigRational::from(n))
    }
}

pub fn term_to_json(t: &CTTerm) -> TermJson {
    TermJson {
        numerator: t
            .numerator
            .terms()
            .iter()
            .map(|(c, m)| MonomialJson {
                coeff: rational_to_string(c),
                exponents: m.exps().iter().map(rational_to_string).collect(),
            })
            .collect(),
        denominator: t
            .denominator
            .iter()
            .map(|f| f.u.exps().iter().map(rational_to_string).collect())
            .collect(),
    }
}

pub fn term_from_json(t: &TermJson, width: usize) -> Result<CTTerm> {
    let parse_vec = |v: &[String]| -> Result<Monomial> {
        if v.len() != width {
            return Err(Error::InvalidInput(format!(
                "exponent vector has length {}, expected {width}",
                v.len()
            )));
        }
        Ok(Monomial::from_exps(
            v.iter()
                .map(|s| rational_from_string(s))
                .collect::<Result<_>>()?,
        ))
    };
    let numerator = LaurentPoly::new(
        t.numerator
            .iter()
            .map(|m| Ok((rational_from_string(&m.coeff)?, parse_vec(&m.exponents)?)))
            .collect::<Result<Vec<_>>>()?,
    );
    let denominator = t
        .denominator
        .iter()
        .map(|v| BinomialFactor::new(parse_vec(v)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(CTTerm::new(numerator, denominator))
}

/// Input for `knapcone ct`: an Elliott constant-term problem. When `slack`
/// names are given the factors are taken as already slacked (one distinct
/// slack variable per factor); otherwise slack attachment runs first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtProblemFile {
    pub format: u32,
    pub vars: Vec<String>,
    pub lambda: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<Vec<String>>,
    pub numerator: Vec<MonomialJson>,
    pub factors: Vec<Vec<String>>,
}

impl CtProblemFile {
    pub fn parse(&self) -> Result<CoreProblem> {
        if self.format != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported format {}, expected {}",
                self.format, FORMAT_VERSION
            )));
        }
        let order = VarOrder::new(self.vars.clone());
        let width = order.len();
        let term = term_from_json(
            &TermJson {
                numerator: self.numerator.clone(),
                denominator: self.factors.clone(),
            },
            width,
        )?;
        let coord = |name: &String| -> Result<usize> {
            order
                .index_of(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown variable `{name}`")))
        };
        let lambda: Vec<usize> = self.lambda.iter().map(coord).collect::<Result<_>>()?;
        match &self.slack {
            None => CoreProblem::from_input(term, order, lambda),
            Some(names) => {
                let slack: Vec<usize> = names.iter().map(coord).collect::<Result<_>>()?;
                CoreProblem::from_slacked_input(term, order, lambda, slack)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundJson {
    pub var: String,
    pub terms_after: usize,
    pub stats: StatsJson,
}

/// Output of `knapcone ct`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtOutput {
    pub format: u32,
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
    pub rounds: Vec<RoundJson>,
    pub final_terms: usize,
}

pub fn ct_output(order: &VarOrder, terms: &[CTTerm], report: &EliminationReport) -> CtOutput {
    CtOutput {
        format: FORMAT_VERSION,
        vars: order.names().to_vec(),
        terms: terms.iter().map(term_to_json).collect(),
        rounds: report
            .rounds
            .iter()
            .map(|r| RoundJson {
                var: r.var.clone(),
                terms_after: r.terms_after,
                stats: r.stats.into(),
            })
            .collect(),
        final_terms: report.final_terms,
    }
}

/// One row of the benchmark CSV.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub instance: String,
    pub strategy: String,
    pub nl: u64,
    pub depth: u32,
    pub internal: u64,
    pub lll_nodes: u64,
    pub ms: u128,
}

pub const BENCH_CSV_HEADER: &str = "instance,strategy,nl,depth,internal,lll_nodes,ms";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.instance, self.strategy, self.nl, self.depth, self.internal, self.lll_nodes,
            self.ms
        )
    }
}

/// round-trip convenience used by tests: sum of a term's coefficients must be
/// preserved by serialization
pub fn term_roundtrip_check(t: &CTTerm) -> bool {
    let width = t
        .numerator
        .terms()
        .first()
        .map(|(_, m)| m.width())
        .or_else(|| t.denominator.first().map(|f| f.u.width()))
        .unwrap_or(0);
    match term_from_json(&term_to_json(t), width) {
        Ok(back) => back == t.clone(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn instance_validation() {
        let good = InstanceFile {
            format: 1,
            name: Some("x".into()),
            a0: 10,
            a: vec![3, 5],
            frobenius: None,
        };
        good.validate().unwrap();
        let bad_gcd = InstanceFile {
            a: vec![2, 4],
            ..good.clone()
        };
        assert!(bad_gcd.validate().is_err());
        let bad_fmt = InstanceFile {
            format: 2,
            ..good.clone()
        };
        assert!(bad_fmt.validate().is_err());
        let empty = InstanceFile {
            a: vec![],
            ..good
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn rational_strings() {
        for s in ["0", "-7", "3/2", "-22/7"] {
            let r = rational_from_string(s).unwrap();
            assert_eq!(rational_to_string(&r), s);
        }
        assert!(rational_from_string("x").is_err());
        assert!(rational_from_string("1/0").is_err());
    }

    #[test]
    fn term_json_roundtrip() {
        let t = CTTerm::new(
            LaurentPoly::new(vec![
                (
                    BigRational::new(BigInt::from(-3), BigInt::from(2)),
                    Monomial::from_i64(&[1, -2, 0]),
                ),
                (BigRational::one(), Monomial::from_i64(&[0, 4, -1])),
            ]),
            vec![
                BinomialFactor::new(Monomial::from_i64(&[2, -7, 0])).unwrap(),
                BinomialFactor::new(Monomial::from_i64(&[1, -2, -1])).unwrap(),
            ],
        );
        assert!(term_roundtrip_check(&t));
        let json = serde_json::to_string(&term_to_json(&t)).unwrap();
        let parsed: TermJson = serde_json::from_str(&json).unwrap();
        assert_eq!(term_from_json(&parsed, 3).unwrap(), t);
    }
}
