//! Exhaustive character sums over all shifts b of f(b) = prod_{x in S} (x + b).
//!
//! For p below [`TABLE_LIMIT`] every shift is visited once, so the character
//! sum, the Weil comparison and the odd-parity probability come out exact.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::modarith::{
    self, legendre, legendre_table, FieldElement, FieldPrime, Trit, TABLE_LIMIT,
};

/// A set of distinct residues mod p, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSet {
    elements: Vec<u128>,
    modulus: FieldPrime,
}

impl WitnessSet {
    /// Rejects duplicates and values outside `[0, p)`; order does not matter.
    pub fn new(modulus: FieldPrime, values: impl IntoIterator<Item = u128>) -> Result<Self> {
        let mut elements: Vec<u128> = values.into_iter().collect();
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::usage(format!("duplicate witness {}", w[0])));
        }
        if let Some(&x) = elements.last() {
            if x >= modulus.value() {
                return Err(Error::usage(format!(
                    "witness {x} is not below the modulus {modulus}"
                )));
            }
        }
        Ok(WitnessSet { elements, modulus })
    }

    pub fn empty(modulus: FieldPrime) -> Self {
        WitnessSet {
            elements: Vec::new(),
            modulus,
        }
    }

    pub(crate) fn from_sorted(modulus: FieldPrime, elements: Vec<u128>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.last().is_none_or(|&x| x < modulus.value()));
        WitnessSet { elements, modulus }
    }

    pub fn modulus(&self) -> FieldPrime {
        self.modulus
    }

    pub fn elements(&self) -> &[u128] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u128) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.elements.iter().map(|&x| self.modulus.element(x))
    }

    fn check_shift(&self, b: &FieldElement) -> Result<()> {
        if b.modulus() != self.modulus {
            return Err(Error::usage(format!(
                "shift modulus {} does not match set modulus {}",
                b.modulus(),
                self.modulus
            )));
        }
        Ok(())
    }
}

/// Character-sum result for one witness set.
#[derive(Clone, Debug, PartialEq)]
pub struct CharSumReport {
    pub modulus: u128,
    /// W = sum over all b of chi(f(b)).
    pub sum: i64,
    /// Number of distinct roots of f, which is |S|.
    pub degree: usize,
    /// (degree - 1) * sqrt(p), for display. `holds` is decided in integers.
    pub weil_bound: f64,
    pub holds: bool,
    /// Shifts with f(b) = 0.
    pub zero_shift_count: u64,
}

/// Exact odd-parity statistics over every shift b in F_p.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactParityReport {
    pub odd_count: u64,
    /// p
    pub total: u64,
    /// Character sum of f over all shifts, so `t_value() * p == sum`.
    pub sum: i64,
}

impl ExactParityReport {
    pub fn probability(&self) -> Ratio<u64> {
        Ratio::new(self.odd_count, self.total)
    }

    /// T = W / p.
    pub fn t_value(&self) -> Ratio<i64> {
        Ratio::new(self.sum, self.total as i64)
    }

    pub fn probability_f64(&self) -> f64 {
        self.odd_count as f64 / self.total as f64
    }

    /// Whether |Pr[odd] - 1/2| <= ((|S|-1) sqrt(p) + 3|S|) / (2p), decided in
    /// integers.
    ///
    /// Over the p - |S| shifts without a zero hit the odd count is
    /// (p - |S| - W)/2, and each zero-hit shift moves it by at most one, so
    /// |2 odd - p| <= |W| + |S|. The Weil bound on |W| then gives the band.
    pub fn within_parity_band(&self, set_size: usize) -> bool {
        let s = set_size as i128;
        let p = self.total as i128;
        let excess = (2 * self.odd_count as i128 - p).abs() - 3 * s;
        excess <= 0 || excess * excess <= (s - 1) * (s - 1) * p
    }
}

/// Outcome of comparing |S'| parity with chi(f(b)) at one shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityCheck {
    Consistent,
    Inconsistent,
    /// f(b) = 0, so chi(f(b)) carries no parity information.
    ZeroHit,
}

/// prod_{x in S} (x + b) mod p; the empty product is 1.
pub fn poly_eval_shifted(set: &WitnessSet, b: &FieldElement) -> Result<FieldElement> {
    set.check_shift(b)?;
    let p = set.modulus.value();
    let value = set.elements.iter().fold(1 % p, |acc, &x| {
        modarith::mul_mod(acc, modarith::add_mod(x, b.value(), p), p)
    });
    Ok(set.modulus.element(value))
}

fn exhaustive_modulus(set: &WitnessSet) -> Result<u64> {
    let p = set.modulus.value();
    if p >= TABLE_LIMIT {
        return Err(Error::usage(format!(
            "p = {p} is outside the exhaustive range (p < 2^26)"
        )));
    }
    if set.is_empty() {
        return Err(Error::usage("exhaustive scans need a nonempty set"));
    }
    Ok(p as u64)
}

/// Scans every shift once. Calls `visit(chi(f(b)), |S'| is odd)`.
fn scan_shifts(set: &WitnessSet, p: u64, table: &[Trit], mut visit: impl FnMut(Trit, bool)) {
    let xs: Vec<u64> = set.elements.iter().map(|&x| x as u64).collect();
    for b in 0..p {
        let mut f = 1u64;
        let mut odd = false;
        for &x in &xs {
            let shifted = (x + b) % p;
            // p < 2^26 keeps the product below 2^52.
            f = f * shifted % p;
            odd ^= table[shifted as usize] == Trit::Minus;
        }
        visit(table[f as usize], odd);
    }
}

/// Exact W = sum_b chi(f(b)) and the Weil comparison W^2 <= (d-1)^2 p.
pub fn exact_character_sum(set: &WitnessSet) -> Result<CharSumReport> {
    let p = exhaustive_modulus(set)?;
    let table = legendre_table(set.modulus)?;
    let mut sum = 0i64;
    let mut zero_shift_count = 0u64;
    scan_shifts(set, p, &table, |chi, _| {
        sum += i64::from(chi.as_i8());
        zero_shift_count += u64::from(chi == Trit::Zero);
    });
    let degree = set.len();
    let d1 = degree as i128 - 1;
    Ok(CharSumReport {
        modulus: p as u128,
        sum,
        degree,
        weil_bound: d1 as f64 * (p as f64).sqrt(),
        holds: (sum as i128) * (sum as i128) <= d1 * d1 * p as i128,
        zero_shift_count,
    })
}

/// Exact probability over uniform b that S' = {x in S : chi(x+b) = -1} has odd
/// size. Parity is counted by filtering, so zero-hit shifts are handled as
/// they are, not conditioned away.
pub fn exact_odd_probability(set: &WitnessSet) -> Result<ExactParityReport> {
    let p = exhaustive_modulus(set)?;
    let table = legendre_table(set.modulus)?;
    let mut odd_count = 0u64;
    let mut sum = 0i64;
    scan_shifts(set, p, &table, |chi, odd| {
        sum += i64::from(chi.as_i8());
        odd_count += u64::from(odd);
    });
    Ok(ExactParityReport {
        odd_count,
        total: p,
        sum,
    })
}

/// Checks that |S'| is odd exactly when chi(f(b)) = -1, evaluating each
/// factor's symbol and the product's symbol separately by Euler's criterion.
pub fn parity_product_consistency(set: &WitnessSet, b: &FieldElement) -> Result<ParityCheck> {
    let f = poly_eval_shifted(set, b)?;
    if f.is_zero() {
        return Ok(ParityCheck::ZeroHit);
    }
    let mut survivors = 0usize;
    for x in set.iter() {
        if legendre(&x.add(b)?)? == Trit::Minus {
            survivors += 1;
        }
    }
    let odd = survivors % 2 == 1;
    Ok(if odd == (legendre(&f)? == Trit::Minus) {
        ParityCheck::Consistent
    } else {
        ParityCheck::Inconsistent
    })
}
