//! CNF formulas end to end: parse DIMACS, enumerate every model by brute
//! force, encode models as integers and push them through the shift filter.
//!
//! The chi(x + b) = -1 constraint is applied to the enumerated witnesses
//! directly; it is never compiled into clauses.

use std::fmt::Write as _;

use rand::Rng;

use crate::charsum::{exact_odd_probability, ExactParityReport, WitnessSet};
use crate::error::{Error, Result};
use crate::modarith::{FieldElement, FieldPrime};
use crate::reduction::{
    choose_prime_for_n, estimate_odd_probability_with_workers, trial_at_shift, MonteCarloEstimate,
    ReductionParams, TrialOutcome,
};
use crate::stream::{self, tag};

/// Largest formula that [`enumerate_solutions`] will brute-force.
pub const MAX_ENUMERATION_VARS: u32 = 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    /// Signed, 1-based literals. An empty clause is unsatisfiable.
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::usage("formula needs at least one variable"));
        }
        for clause in &clauses {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(Error::usage(format!(
                        "literal {lit} out of range for {num_vars} variables"
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Truth value under the assignment encoded LSB-first (variable 1 = bit 0).
    pub fn evaluate(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let bit = (assignment >> (lit.unsigned_abs() - 1)) & 1 == 1;
                bit == (lit > 0)
            })
        })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF. Clauses may span lines; `c` lines are comments and a
/// `%` line ends the input. A lone `0` is an empty clause.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((v, c)) if v > 0 => header = Some((v, c)),
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!(
                            "malformed problem line {line:?}, expected \"p cnf <vars> <clauses>\""
                        ),
                    ))
                }
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::parse(line_no, "clause before the problem line"));
        };
        for token in line.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid literal {token:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > u64::from(num_vars) {
                return Err(Error::parse(
                    line_no,
                    format!("literal {lit} out of range for {num_vars} variables"),
                ));
            } else {
                current.push(lit as i32);
            }
        }
    }

    let Some((num_vars, expected)) = header else {
        return Err(Error::parse(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != expected {
        return Err(Error::parse(
            last_line,
            format!(
                "header declares {expected} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    Ok(CnfFormula { num_vars, clauses })
}

/// Variable i contributes bit i-1.
pub fn encode_assignment(assignment: &[bool]) -> u64 {
    assert!(assignment.len() <= 64, "assignments wider than 64 bits");
    assignment
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (u64::from(v) << i))
}

pub fn decode_assignment(code: u64, num_vars: u32) -> Vec<bool> {
    (0..num_vars).map(|i| (code >> i) & 1 == 1).collect()
}

/// Encoded models of `formula`, in increasing order.
pub fn enumerate_solution_codes(formula: &CnfFormula) -> Result<Vec<u64>> {
    let n = formula.num_vars;
    if n > MAX_ENUMERATION_VARS {
        return Err(Error::capacity(format!(
            "{n} variables exceeds the enumeration cap of {MAX_ENUMERATION_VARS}"
        )));
    }
    // A clause is satisfied by x iff x hits a positive literal or misses a
    // negated one.
    let masks: Vec<(u64, u64)> = formula
        .clauses
        .iter()
        .map(|clause| {
            clause.iter().fold((0u64, 0u64), |(pos, neg), &lit| {
                let bit = 1u64 << (lit.unsigned_abs() - 1);
                if lit > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    Ok((0..1u64 << n)
        .filter(|&x| {
            masks
                .iter()
                .all(|&(pos, neg)| x & pos != 0 || !x & neg != 0)
        })
        .collect())
}

/// Encoded models as a witness set in F_p; requires p > 2^n.
pub fn enumerate_solutions(formula: &CnfFormula, modulus: FieldPrime) -> Result<WitnessSet> {
    if modulus.bits() <= formula.num_vars {
        return Err(Error::usage(format!(
            "modulus {modulus} is not above 2^{}",
            formula.num_vars
        )));
    }
    let codes = enumerate_solution_codes(formula)?;
    Ok(WitnessSet::from_sorted(
        modulus,
        codes.into_iter().map(u128::from).collect(),
    ))
}

/// phi together with the shift that defines phi'.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedInstance {
    pub formula: CnfFormula,
    pub params: ReductionParams,
    pub shift_b: FieldElement,
}

impl ReducedInstance {
    pub fn new(
        formula: CnfFormula,
        params: ReductionParams,
        shift_b: FieldElement,
    ) -> Result<Self> {
        if params.n != formula.num_vars {
            return Err(Error::usage(format!(
                "params are for n = {}, formula has {} variables",
                params.n, formula.num_vars
            )));
        }
        if shift_b.modulus() != params.p {
            return Err(Error::usage("shift is not in the chosen field"));
        }
        Ok(ReducedInstance {
            formula,
            params,
            shift_b,
        })
    }

    /// Models of phi' : models x of phi with chi(x + b) = -1.
    pub fn count(&self) -> Result<TrialOutcome> {
        reduce_and_count(&self.formula, &self.params, self.shift_b)
    }
}

pub fn reduce_and_count(
    formula: &CnfFormula,
    params: &ReductionParams,
    b: FieldElement,
) -> Result<TrialOutcome> {
    let witnesses = enumerate_solutions(formula, params.p)?;
    trial_at_shift(&witnesses, b)
}

/// Result of an end-to-end run.
#[derive(Clone, Debug, PartialEq)]
pub struct SatReport {
    pub params: ReductionParams,
    pub num_solutions: usize,
    pub estimate: MonteCarloEstimate,
}

/// Chooses p from (n, c), enumerates once, then samples shifts.
pub fn sat_experiment(
    formula: &CnfFormula,
    c: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SatReport> {
    let params = choose_prime_for_n(formula.num_vars, c)?;
    let witnesses = enumerate_solutions(formula, params.p)?;
    let estimate = estimate_odd_probability_with_workers(&witnesses, trials, seed, workers)?;
    Ok(SatReport {
        params,
        num_solutions: witnesses.len(),
        estimate,
    })
}

/// Every shift b in F_p instead of samples; needs p below 2^26.
pub fn sat_exact_scan(
    formula: &CnfFormula,
    c: f64,
) -> Result<(ReductionParams, usize, ExactParityReport)> {
    let params = choose_prime_for_n(formula.num_vars, c)?;
    let p = params.p.value();
    if p >= crate::modarith::TABLE_LIMIT {
        return Err(Error::capacity(format!(
            "exact scan needs p < 2^26, chosen p = {p}"
        )));
    }
    let witnesses = enumerate_solutions(formula, params.p)?;
    let report = if witnesses.is_empty() {
        ExactParityReport {
            odd_count: 0,
            total: p as u64,
            sum: p as i64,
        }
    } else {
        exact_odd_probability(&witnesses)?
    };
    Ok((params, witnesses.len(), report))
}

/// Uniform random k-CNF: each clause has k distinct variables with random
/// signs.
pub fn random_kcnf<R: Rng + ?Sized>(
    num_vars: u32,
    num_clauses: usize,
    k: usize,
    rng: &mut R,
) -> Result<CnfFormula> {
    if k == 0 || k > num_vars as usize {
        return Err(Error::usage(format!(
            "clause width {k} invalid for {num_vars} variables"
        )));
    }
    let clauses = (0..num_clauses)
        .map(|_| {
            let vars = rand::seq::index::sample(rng, num_vars as usize, k);
            vars.iter()
                .map(|v| {
                    let lit = v as i32 + 1;
                    if rng.random::<bool>() {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(num_vars, clauses)
}

/// Draws random 3-CNF instances from `seed` until one is satisfiable.
pub fn random_satisfiable_3cnf(num_vars: u32, num_clauses: usize, seed: u64) -> Result<CnfFormula> {
    for attempt in 0..1000 {
        let mut rng = stream::substream(seed, tag::RANDOM_CNF, attempt);
        let f = random_kcnf(num_vars, num_clauses, 3, &mut rng)?;
        if !enumerate_solution_codes(&f)?.is_empty() {
            return Ok(f);
        }
    }
    Err(Error::usage(
        "no satisfiable instance found; lower the clause density",
    ))
}
