//! Valiant-Vazirani baseline: a random level k in {1..n}, an affine hash
//! h(x) = A x + c over GF(2) with k output bits, and the survivors h(x) = 0.
//! Parities of m independent trials are combined through 1 + prod(a_i + 1).

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::reduction::MonteCarloEstimate;
use crate::stream::{self, tag};

/// Widest witness supported by the bit-packed representation.
pub const MAX_BITS: u32 = 64;

/// Largest family size (in index bits) that [`Gf2Hash::family`] will list.
pub const MAX_FAMILY_BITS: u32 = 24;

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Distinct n-bit witnesses, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitWitnesses {
    n: u32,
    points: Vec<u64>,
}

impl BitWitnesses {
    pub fn new(n: u32, points: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::usage(format!(
                "witness width must be in 1..=64, got {n}"
            )));
        }
        let mut points: Vec<u64> = points.into_iter().collect();
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::usage(format!("duplicate witness {}", w[0])));
        }
        if let Some(&x) = points.last() {
            if x & !low_mask(n) != 0 {
                return Err(Error::usage(format!(
                    "witness {x} does not fit in {n} bits"
                )));
            }
        }
        Ok(BitWitnesses { n, points })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// h(x) = A x XOR offset with A a k x n bit matrix, one `u64` per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Hash {
    n: u32,
    rows: Vec<u64>,
    offset: u64,
}

impl Gf2Hash {
    pub fn new(n: u32, rows: Vec<u64>, offset: u64) -> Result<Self> {
        let k = rows.len() as u32;
        if n == 0 || n > MAX_BITS {
            return Err(Error::usage(format!(
                "hash input width must be in 1..=64, got {n}"
            )));
        }
        if k == 0 || k > n {
            return Err(Error::usage(format!("level k must be in 1..={n}, got {k}")));
        }
        if rows.iter().any(|&r| r & !low_mask(n) != 0) || offset & !low_mask(k) != 0 {
            return Err(Error::usage("hash row or offset has bits beyond its width"));
        }
        Ok(Gf2Hash { n, rows, offset })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Output bit i is parity(row_i & x) XOR offset_i.
    pub fn evaluate(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(self.offset, |acc, (i, &row)| {
                acc ^ (u64::from((row & x).count_ones() & 1) << i)
            })
    }

    pub fn survives(&self, x: u64) -> bool {
        self.evaluate(x) == 0
    }

    /// Every (A, offset) at level k, each exactly once.
    pub fn family(n: u32, k: u32) -> Result<impl Iterator<Item = Gf2Hash>> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::usage(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let index_bits = k * n + k;
        if index_bits > MAX_FAMILY_BITS {
            return Err(Error::capacity(format!(
                "family at n = {n}, k = {k} has 2^{index_bits} members"
            )));
        }
        let row_mask = low_mask(n);
        Ok((0u64..1 << index_bits).map(move |idx| {
            let rows = (0..k).map(|i| (idx >> (i * n)) & row_mask).collect();
            Gf2Hash {
                n,
                rows,
                offset: idx >> (k * n),
            }
        }))
    }
}

/// True iff every output bit of h(x) is zero.
pub fn survives(h: &Gf2Hash, x: u64) -> bool {
    h.survives(x)
}

/// Every matrix and offset bit independent and uniform.
pub fn sample_hash<R: RngCore + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<Gf2Hash> {
    if n == 0 || n > MAX_BITS || k == 0 || k > n {
        return Err(Error::usage(format!(
            "need 1 <= k <= n <= 64, got k = {k}, n = {n}"
        )));
    }
    let rows = (0..k).map(|_| rng.next_u64() & low_mask(n)).collect();
    let offset = rng.next_u64() & low_mask(k);
    Gf2Hash::new(n, rows, offset)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolationTrial {
    pub level_k: u32,
    pub hash: Gf2Hash,
    pub survivor_count: u64,
    /// survivor_count == 1
    pub isolated: bool,
}

pub fn count_survivors(h: &Gf2Hash, set: &BitWitnesses) -> u64 {
    set.points.iter().filter(|&&x| h.survives(x)).count() as u64
}

/// k uniform on {1..n}, then a fresh hash at that level.
pub fn vv_trial<R: Rng + ?Sized>(set: &BitWitnesses, rng: &mut R) -> Result<IsolationTrial> {
    let level_k = rng.random_range(1..=set.n);
    let hash = sample_hash(set.n, level_k, rng)?;
    let survivor_count = count_survivors(&hash, set);
    Ok(IsolationTrial {
        level_k,
        hash,
        survivor_count,
        isolated: survivor_count == 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplifiedTrial {
    /// a_1..a_m
    pub sub_counts: Vec<u64>,
    pub combined_parity_odd: bool,
}

/// Parity of 1 + prod(a_i + 1), evaluated mod 2.
pub fn amplified_parity(sub_counts: &[u64]) -> Result<bool> {
    if sub_counts.is_empty() {
        return Err(Error::usage("amplification needs at least one sub-count"));
    }
    let product_parity = sub_counts
        .iter()
        .fold(1u64, |acc, &a| acc * (a.wrapping_add(1) & 1));
    Ok((1 + product_parity) & 1 == 1)
}

/// m independent VV trials, each redrawing its own level k.
pub fn amplified_trial<R: Rng + ?Sized>(
    set: &BitWitnesses,
    m: usize,
    rng: &mut R,
) -> Result<AmplifiedTrial> {
    let sub_counts = (0..m)
        .map(|_| vv_trial(set, rng).map(|t| t.survivor_count))
        .collect::<Result<Vec<_>>>()?;
    let combined_parity_odd = amplified_parity(&sub_counts)?;
    Ok(AmplifiedTrial {
        sub_counts,
        combined_parity_odd,
    })
}

/// Frequency of `isolated` over independent trials; reported through the
/// `odd_count` field of [`MonteCarloEstimate`].
pub fn isolation_experiment(
    set: &BitWitnesses,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    let hits = stream::count_trials(trials, workers, |i| {
        let mut rng = stream::substream(seed, tag::VV_ISOLATION, i);
        Ok(vv_trial(set, &mut rng)?.isolated)
    })?;
    Ok(MonteCarloEstimate::from_counts(hits, trials, seed))
}

/// Frequency of odd combined parity over `trials` amplified trials of width m.
pub fn vv_amplified_experiment(
    set: &BitWitnesses,
    m: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    if m == 0 {
        return Err(Error::usage("m must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    let hits = stream::count_trials(trials, workers, |i| {
        let mut rng = stream::substream(seed, tag::VV_AMPLIFIED, i);
        Ok(amplified_trial(set, m, &mut rng)?.combined_parity_odd)
    })?;
    Ok(MonteCarloEstimate::from_counts(hits, trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use rand::SeedableRng;

    type Q = Ratio<u128>;

    fn rng(seed: u64) -> stream::TrialRng {
        stream::TrialRng::seed_from_u64(seed)
    }

    /// Exact Pr[a is odd] for one VV trial, by enumerating every level and
    /// every family member.
    fn exact_odd_rate(set: &BitWitnesses) -> Q {
        let n = set.n();
        let mut total = Q::from_integer(0);
        for k in 1..=n {
            let members: Vec<Gf2Hash> = Gf2Hash::family(n, k).unwrap().collect();
            let odd = members
                .iter()
                .filter(|h| {
                    set.points()
                        .iter()
                        .filter(|&&x| (h.evaluate(x)) == 0)
                        .count()
                        % 2
                        == 1
                })
                .count() as u128;
            total += Q::new(odd, members.len() as u128 * n as u128);
        }
        total
    }

    #[test]
    fn survives_examples() {
        let zero = Gf2Hash::new(2, vec![0], 0).unwrap();
        assert!((0..4).all(|x| survives(&zero, x)));
        let shifted = Gf2Hash::new(2, vec![0], 1).unwrap();
        assert!((0..4).all(|x| !survives(&shifted, x)));
        let parity = Gf2Hash::new(2, vec![0b11], 0).unwrap();
        let kept: Vec<u64> = (0..4).filter(|&x| survives(&parity, x)).collect();
        assert_eq!(kept, vec![0b00, 0b11]);
    }

    #[test]
    fn hash_validation() {
        assert!(Gf2Hash::new(2, vec![], 0).is_err());
        assert!(Gf2Hash::new(2, vec![0, 0, 0], 0).is_err());
        assert!(Gf2Hash::new(2, vec![0b100], 0).is_err());
        assert!(Gf2Hash::new(2, vec![1], 0b10).is_err());
        assert!(sample_hash(4, 0, &mut rng(0)).is_err());
        assert!(sample_hash(4, 5, &mut rng(0)).is_err());
        assert!(Gf2Hash::family(8, 8).is_err());
    }

    #[test]
    fn sample_hash_replays_and_respects_widths() {
        let a = sample_hash(10, 4, &mut rng(3)).unwrap();
        assert_eq!(a, sample_hash(10, 4, &mut rng(3)).unwrap());
        assert_eq!(a.k(), 4);
        assert!(a.rows().iter().all(|&r| r < 1 << 10));
        assert!(a.offset() < 1 << 4);
    }

    #[test]
    fn family_n2_k1_each_point_survives_four_of_eight() {
        let fam: Vec<Gf2Hash> = Gf2Hash::family(2, 1).unwrap().collect();
        assert_eq!(fam.len(), 8);
        for x in 0..4 {
            assert_eq!(fam.iter().filter(|h| h.survives(x)).count(), 4);
        }
    }

    #[test]
    fn full_level_survival_rate() {
        // k = n: each point survives w.p. 2^-n, so E[survivors of 2^j points] = 2^(j-n).
        let n = 6;
        let set = BitWitnesses::new(n, 0..16).unwrap();
        let trials = 40_000;
        let mut total = 0u64;
        let mut r = rng(11);
        for _ in 0..trials {
            total += count_survivors(&sample_hash(n, n, &mut r).unwrap(), &set);
        }
        let mean = total as f64 / trials as f64;
        // variance per trial <= 16 * 2^-6 (1 + 15 * 2^-6) ~ 0.31
        assert!(
            (mean - 0.25).abs() < 5.0 * (0.31f64 / trials as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn empty_set_never_isolates_or_goes_odd() {
        let set = BitWitnesses::new(5, []).unwrap();
        let t = vv_trial(&set, &mut rng(1)).unwrap();
        assert_eq!(t.survivor_count, 0);
        assert!(!t.isolated);
        assert_eq!(isolation_experiment(&set, 200, 0, 1).unwrap().odd_count, 0);
        assert_eq!(
            vv_amplified_experiment(&set, 4, 200, 0, 1).unwrap().p_hat,
            0.0
        );
    }

    #[test]
    fn singleton_isolation_rate() {
        let n = 4;
        let set = BitWitnesses::new(n, [9]).unwrap();
        let expect: f64 = (1..=n).map(|k| 0.5f64.powi(k as i32)).sum::<f64>() / n as f64;
        let e = isolation_experiment(&set, 40_000, 2, 1).unwrap();
        assert!(e.within_sigmas(expect, 4.0), "{e:?} vs {expect}");
    }

    #[test]
    fn amplified_parity_examples() {
        assert!(!amplified_parity(&[0, 0, 0]).unwrap());
        assert!(amplified_parity(&[0, 1, 0]).unwrap());
        assert!(amplified_parity(&[]).is_err());
        assert!(amplified_parity(&[u64::MAX]).unwrap());
    }

    #[test]
    fn amplified_parity_brute_force() {
        for m in 1..=4u32 {
            for code in 0..4u64.pow(m) {
                let a: Vec<u64> = (0..m).map(|i| (code >> (2 * i)) & 3).collect();
                let direct = 1 + a.iter().map(|&x| x + 1).product::<u64>();
                let got = amplified_parity(&a).unwrap();
                assert_eq!(got, direct % 2 == 1, "{a:?}");
                assert_eq!(got, a.iter().any(|x| x % 2 == 1));
            }
        }
    }

    #[test]
    fn pairwise_independence_exact() {
        for n in 1..=3u32 {
            for k in 1..=n {
                let fam: Vec<Gf2Hash> = Gf2Hash::family(n, k).unwrap().collect();
                let size = fam.len() as u128;
                for x in 0..1u64 << n {
                    let hits = fam.iter().filter(|h| h.survives(x)).count() as u128;
                    assert_eq!(Q::new(hits, size), Q::new(1, 1 << k));
                    for y in 0..1u64 << n {
                        if x == y {
                            continue;
                        }
                        let both = fam
                            .iter()
                            .filter(|h| h.survives(x) && h.survives(y))
                            .count();
                        assert_eq!(Q::new(both as u128, size), Q::new(1, 1 << (2 * k)));
                    }
                }
            }
        }
    }

    #[test]
    fn combined_rate_is_one_minus_product_of_misses() {
        // Exact at n = 2, m = 2: enumerate ordered pairs of (k, h) draws.
        let n = 2;
        let set = BitWitnesses::new(n, [0, 1, 3]).unwrap();
        let set = &set;
        let draws: Vec<(Q, u64)> = (1..=n)
            .flat_map(|k| {
                let fam: Vec<Gf2Hash> = Gf2Hash::family(n, k).unwrap().collect();
                let w = Q::new(1, fam.len() as u128 * n as u128);
                fam.into_iter()
                    .map(move |h| (w, count_survivors(&h, set)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut pair_odd = Q::from_integer(0);
        for (w1, a1) in &draws {
            for (w2, a2) in &draws {
                if amplified_parity(&[*a1, *a2]).unwrap() {
                    pair_odd += w1 * w2;
                }
            }
        }
        let q = exact_odd_rate(set);
        let one = Q::from_integer(1);
        assert_eq!(pair_odd, one - (one - q) * (one - q));
    }

    #[test]
    fn amplified_experiment_matches_exhaustive_family() {
        let set = BitWitnesses::new(3, [1, 2, 4, 7]).unwrap();
        let q = exact_odd_rate(&set);
        let one = Q::from_integer(1);
        let exact = one - (one - q) * (one - q) * (one - q);
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let e = vv_amplified_experiment(&set, 3, 50_000, 4, 1).unwrap();
        assert!(e.within_sigmas(exact, 4.0), "{e:?} vs {exact}");
    }

    #[test]
    fn experiments_are_worker_independent() {
        let set = BitWitnesses::new(6, (0..64).step_by(3)).unwrap();
        let a = vv_amplified_experiment(&set, 3, 999, 8, 1).unwrap();
        let b = isolation_experiment(&set, 999, 8, 1).unwrap();
        for w in [2, 5] {
            assert_eq!(vv_amplified_experiment(&set, 3, 999, 8, w).unwrap(), a);
            assert_eq!(isolation_experiment(&set, 999, 8, w).unwrap(), b);
        }
    }

    #[test]
    fn witness_validation() {
        assert!(BitWitnesses::new(0, []).is_err());
        assert!(BitWitnesses::new(3, [8]).is_err());
        assert!(BitWitnesses::new(3, [7, 1, 7]).is_err());
        assert_eq!(BitWitnesses::new(3, [7, 1]).unwrap().points(), &[1, 7]);
        assert!(BitWitnesses::new(64, [u64::MAX]).is_ok());
    }
}
