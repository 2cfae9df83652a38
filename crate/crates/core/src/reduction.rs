//! The shift-and-filter reduction: pick b uniformly in F_p and keep the
//! witnesses x with chi(x + b) = -1. A nonempty set comes out with odd size
//! about half the time; the empty set never does.

use rand::RngCore;

use crate::charsum::WitnessSet;
use crate::error::{Error, Result};
use crate::modarith::{self, next_prime_above, FieldElement, FieldPrime, Trit};
use crate::stream::{self, tag};

/// Default exponent multiplier c in p > 2^(c n).
pub const DEFAULT_C: f64 = 3.0;

/// Largest allowed ceil(c n); keeps the chosen prime below 2^127.
pub const MAX_PRIME_EXPONENT: u32 = 126;

/// One sampled shift and what survived it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub shift_b: FieldElement,
    pub survivor_count: usize,
    pub parity_odd: bool,
    /// Some x in S had x + b = 0. Recorded, not excluded.
    pub zero_hit: bool,
}

/// Frequency of a binary trial outcome. For the shift reduction the counted
/// event is odd parity; the VV experiments reuse it for their own events.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub odd_count: u64,
    pub p_hat: f64,
    /// sqrt(p_hat (1 - p_hat) / trials)
    pub std_err: f64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn from_counts(odd_count: u64, trials: u64, seed: u64) -> Self {
        assert!(trials > 0 && odd_count <= trials);
        let p_hat = odd_count as f64 / trials as f64;
        MonteCarloEstimate {
            trials,
            odd_count,
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            seed,
        }
    }

    /// |p_hat - target| <= k * std_err
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.p_hat - target).abs() <= k * self.std_err
    }
}

/// Witness bit-length n, exponent multiplier c and a prime p > 2^(c n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionParams {
    pub n: u32,
    pub c: f64,
    pub p: FieldPrime,
}

impl ReductionParams {
    /// Checks c > 2 and p > 2^ceil(c n).
    pub fn new(n: u32, c: f64, p: FieldPrime) -> Result<Self> {
        let bits = prime_exponent(n, c)?;
        if p.bits() <= bits {
            return Err(Error::usage(format!(
                "p = {p} is not above 2^{bits} (n = {n}, c = {c})"
            )));
        }
        Ok(ReductionParams { n, c, p })
    }
}

fn prime_exponent(n: u32, c: f64) -> Result<u32> {
    if !(c.is_finite() && c > 2.0) {
        return Err(Error::usage(format!(
            "c must be a finite number above 2, got {c}"
        )));
    }
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    let bits = (c * f64::from(n)).ceil();
    if bits > f64::from(MAX_PRIME_EXPONENT) {
        return Err(Error::capacity(format!(
            "ceil(c n) = {bits} exceeds {MAX_PRIME_EXPONENT}"
        )));
    }
    Ok(bits as u32)
}

/// p = smallest prime above 2^ceil(c n).
pub fn choose_prime_for_n(n: u32, c: f64) -> Result<ReductionParams> {
    let bits = prime_exponent(n, c)?;
    let p = next_prime_above(1u128 << bits)?;
    Ok(ReductionParams { n, c, p })
}

/// S' = {x in S : chi(x + b) = -1}.
pub fn filter_by_character(set: &WitnessSet, b: &FieldElement) -> Result<WitnessSet> {
    check_modulus(set, b)?;
    let p = set.modulus();
    let mut kept = Vec::new();
    for &x in set.elements() {
        if p.chi(modarith::add_mod(x, b.value(), p.value()))? == Trit::Minus {
            kept.push(x);
        }
    }
    Ok(WitnessSet::from_sorted(p, kept))
}

fn check_modulus(set: &WitnessSet, b: &FieldElement) -> Result<()> {
    if set.modulus() != b.modulus() {
        return Err(Error::usage(format!(
            "shift modulus {} does not match set modulus {}",
            b.modulus(),
            set.modulus()
        )));
    }
    Ok(())
}

/// Uniform element of F_p by rejection sampling (see [`stream::uniform_below`]).
pub fn sample_shift<R: RngCore + ?Sized>(p: FieldPrime, rng: &mut R) -> FieldElement {
    p.element(stream::uniform_below(rng, p.value()))
}

/// Applies the filter at a fixed shift without materializing S'.
pub fn trial_at_shift(set: &WitnessSet, b: FieldElement) -> Result<TrialOutcome> {
    check_modulus(set, &b)?;
    let p = set.modulus();
    let shifted: Vec<u128> = set
        .elements()
        .iter()
        .map(|&x| modarith::add_mod(x, b.value(), p.value()))
        .collect();
    let mut symbols = Vec::new();
    p.chi_many(&shifted, &mut symbols)?;
    let survivor_count = symbols.iter().filter(|&&t| t == Trit::Minus).count();
    let zero_hit = symbols.contains(&Trit::Zero);
    Ok(TrialOutcome {
        shift_b: b,
        survivor_count,
        parity_odd: survivor_count % 2 == 1,
        zero_hit,
    })
}

/// Draws b uniformly and filters S.
pub fn sample_trial<R: RngCore + ?Sized>(set: &WitnessSet, rng: &mut R) -> Result<TrialOutcome> {
    let b = sample_shift(set.modulus(), rng);
    trial_at_shift(set, b)
}

pub fn estimate_odd_probability(
    set: &WitnessSet,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    estimate_odd_probability_with_workers(set, trials, seed, 1)
}

/// Trial i draws from the substream keyed by (seed, i), so the estimate is the
/// same for any worker count.
pub fn estimate_odd_probability_with_workers(
    set: &WitnessSet,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    let odd = stream::count_trials(trials, workers, |i| {
        let mut rng = stream::substream(seed, tag::SHIFT_TRIAL, i);
        Ok(sample_trial(set, &mut rng)?.parity_odd)
    })?;
    Ok(MonteCarloEstimate::from_counts(odd, trials, seed))
}
