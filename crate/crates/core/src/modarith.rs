//! Arithmetic in prime fields F_p with p < 2^127.
//!
//! Moduli below 2^64 go through Montgomery multiplication; wider moduli use a
//! double-and-add product that never leaves `u128` (operands are < 2^127, so a
//! doubling cannot overflow).

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Widest supported modulus, in bits.
pub const MAX_MODULUS_BITS: u32 = 127;

/// Largest modulus for which a full residue table is built.
pub const TABLE_LIMIT: u128 = 1 << 26;

/// Value of the Legendre symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Trit {
    Minus = -1,
    Zero = 0,
    Plus = 1,
}

impl Trit {
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn from_sign(sign: i64) -> Self {
        match sign.signum() {
            -1 => Trit::Minus,
            0 => Trit::Zero,
            _ => Trit::Plus,
        }
    }
}

impl std::ops::Mul for Trit {
    type Output = Trit;

    fn mul(self, rhs: Trit) -> Trit {
        Trit::from_sign(i64::from(self.as_i8()) * i64::from(rhs.as_i8()))
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trit::Minus => "-1",
            Trit::Zero => "0",
            Trit::Plus => "+1",
        })
    }
}

/// Montgomery context for an odd modulus below 2^64, with R = 2^64.
#[derive(Clone, Copy, Debug)]
struct Montgomery {
    p: u64,
    /// -p^{-1} mod 2^64
    neg_inv: u64,
    /// R^2 mod p
    r2: u64,
    /// R mod p, i.e. Montgomery form of 1
    one: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p & 1 == 1 && p > 2);
        // Newton iteration doubles the number of correct low bits; p*p == 1 mod 8.
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Montgomery {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
            one: r,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let (sum, carry) = t.overflowing_add(m as u128 * self.p as u128);
        let hi = (sum >> 64) as u64;
        if carry || hi >= self.p {
            hi.wrapping_sub(self.p)
        } else {
            hi
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    fn enter(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    #[inline]
    fn leave(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// Square-and-multiply on a Montgomery-form base; result in Montgomery form.
    #[inline]
    fn pow(&self, base: u64, mut e: u128) -> u64 {
        let mut acc = self.one;
        let mut sq = base;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            e >>= 1;
            if e != 0 {
                sq = self.mul(sq, sq);
            }
        }
        acc
    }

    /// [`Montgomery::pow`] on `L` bases at once with a shared exponent. The
    /// lanes are independent, so their multiplications overlap in the pipeline.
    #[inline]
    fn pow_lanes<const L: usize>(&self, bases: [u64; L], mut e: u128) -> [u64; L] {
        let mut acc = [self.one; L];
        let mut sq = bases;
        while e != 0 {
            if e & 1 == 1 {
                for i in 0..L {
                    acc[i] = self.mul(acc[i], sq[i]);
                }
            }
            e >>= 1;
            if e != 0 {
                for s in sq.iter_mut() {
                    *s = self.mul(*s, *s);
                }
            }
        }
        acc
    }
}

const LANES: usize = 8;

/// An odd prime modulus below 2^127.
#[derive(Clone, Copy, Debug)]
pub struct FieldPrime {
    value: u128,
    mont: Option<Montgomery>,
}

impl PartialEq for FieldPrime {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for FieldPrime {}

impl std::hash::Hash for FieldPrime {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.hash(state)
    }
}

impl fmt::Display for FieldPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl FieldPrime {
    /// Certifies `value` with [`is_prime`]; 2 and anything at or above 2^127
    /// are rejected.
    pub fn new(value: u128) -> Result<Self> {
        if value >> MAX_MODULUS_BITS != 0 {
            return Err(Error::capacity(format!(
                "modulus {value} is wider than {MAX_MODULUS_BITS} bits"
            )));
        }
        if value < 3 || !is_prime(value) {
            return Err(Error::usage(format!("{value} is not an odd prime")));
        }
        Ok(Self::certified(value))
    }

    fn certified(value: u128) -> Self {
        let mont = u64::try_from(value).ok().map(Montgomery::new);
        FieldPrime { value, mont }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        128 - self.value.leading_zeros()
    }

    /// (p - 1) / 2, the Euler-criterion exponent.
    pub fn half_order(&self) -> u128 {
        (self.value - 1) / 2
    }

    pub fn element(&self, value: u128) -> FieldElement {
        FieldElement::new(value, *self)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            modulus: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            modulus: *self,
        }
    }

    /// Legendre symbol of a raw residue `a` (reduced mod p first).
    pub fn chi(&self, a: u128) -> Result<Trit> {
        let a = if a >= self.value { a % self.value } else { a };
        let t = self.pow_raw(a, self.half_order());
        decode_euler(t, self.value)
    }

    /// Legendre symbols of many residues, each already reduced below p.
    /// Equivalent to calling [`FieldPrime::chi`] on every element.
    pub fn chi_many(&self, values: &[u128], out: &mut Vec<Trit>) -> Result<()> {
        out.clear();
        out.reserve(values.len());
        let Some(m) = &self.mont else {
            for &v in values {
                out.push(self.chi(v)?);
            }
            return Ok(());
        };
        let e = self.half_order();
        let mut chunks = values.chunks_exact(LANES);
        for chunk in &mut chunks {
            let mut bases = [0u64; LANES];
            for (b, &v) in bases.iter_mut().zip(chunk) {
                debug_assert!(v < self.value);
                *b = m.enter(v as u64);
            }
            for t in m.pow_lanes(bases, e) {
                out.push(decode_euler(m.leave(t) as u128, self.value)?);
            }
        }
        for &v in chunks.remainder() {
            out.push(self.chi(v)?);
        }
        Ok(())
    }

    fn mul_raw(&self, a: u128, b: u128) -> u128 {
        match &self.mont {
            // (a*b) fits u128 when both are below 2^64.
            Some(_) => (a * b) % self.value,
            None => mul_mod(a, b, self.value),
        }
    }

    fn pow_raw(&self, a: u128, e: u128) -> u128 {
        match &self.mont {
            Some(m) => {
                let base = m.enter(a as u64);
                m.leave(m.pow(base, e)) as u128
            }
            None => pow_mod(a, e, self.value),
        }
    }
}

/// A residue in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u128,
    modulus: FieldPrime,
}

impl FieldElement {
    /// Reduces `value` into `[0, p)`.
    pub fn new(value: u128, modulus: FieldPrime) -> Self {
        FieldElement {
            value: value % modulus.value,
            modulus,
        }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn modulus(&self) -> FieldPrime {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        same_modulus(self, other)?;
        Ok(FieldElement {
            value: add_mod(self.value, other.value, self.modulus.value),
            modulus: self.modulus,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let value = if self.value == 0 {
            0
        } else {
            self.modulus.value - self.value
        };
        FieldElement {
            value,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

fn same_modulus(a: &FieldElement, b: &FieldElement) -> Result<()> {
    if a.modulus != b.modulus {
        return Err(Error::usage(format!(
            "modulus mismatch: {} vs {}",
            a.modulus, b.modulus
        )));
    }
    Ok(())
}

/// `(a * b) mod p`, exact for every p < 2^127.
pub fn mulmod(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    same_modulus(a, b)?;
    Ok(FieldElement {
        value: a.modulus.mul_raw(a.value, b.value),
        modulus: a.modulus,
    })
}

/// `a^e mod p` by square-and-multiply. `0^0` is 1.
pub fn powmod(a: &FieldElement, e: u128) -> FieldElement {
    FieldElement {
        value: a.modulus.pow_raw(a.value, e),
        modulus: a.modulus,
    }
}

/// Legendre symbol via Euler's criterion: t = a^((p-1)/2) mod p is 0, 1 or p-1.
pub fn legendre(a: &FieldElement) -> Result<Trit> {
    a.modulus.chi(a.value)
}

/// Euler's criterion against an arbitrary odd modulus `m >= 3`. For composite
/// `m` the power usually lands outside {0, 1, m-1}, which is reported as an
/// integrity error.
pub fn euler_criterion(a: u128, m: u128) -> Result<Trit> {
    if m < 3 || m & 1 == 0 || m >> MAX_MODULUS_BITS != 0 {
        return Err(Error::usage(format!(
            "{m} is not an odd modulus below 2^127"
        )));
    }
    decode_euler(pow_mod(a % m, (m - 1) / 2, m), m)
}

fn decode_euler(t: u128, p: u128) -> Result<Trit> {
    match t {
        0 => Ok(Trit::Zero),
        1 => Ok(Trit::Plus),
        t if t == p - 1 => Ok(Trit::Minus),
        t => Err(Error::Integrity(format!(
            "Euler criterion gave {t} mod {p}; modulus is not prime"
        ))),
    }
}

/// Quadratic-character table indexed by residue, built by squaring every
/// nonzero element.
pub fn legendre_table(p: FieldPrime) -> Result<Vec<Trit>> {
    if p.value >= TABLE_LIMIT {
        return Err(Error::usage(format!(
            "p = {p} is too large to tabulate (limit 2^26)"
        )));
    }
    let p = p.value as u64;
    let mut table = vec![Trit::Minus; p as usize];
    table[0] = Trit::Zero;
    for b in 1..=(p - 1) / 2 {
        table[(b * b % p) as usize] = Trit::Plus;
    }
    Ok(table)
}

#[inline]
pub fn add_mod(a: u128, b: u128, p: u128) -> u128 {
    // a, b < p < 2^127 so the sum fits.
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// `(a * b) mod p` for any `p < 2^127` and `a, b < p`.
pub fn mul_mod(a: u128, b: u128, p: u128) -> u128 {
    if p <= u64::MAX as u128 {
        return (a * b) % p;
    }
    let mut acc = 0u128;
    for i in (0..128 - b.leading_zeros()).rev() {
        acc = add_mod(acc, acc, p);
        if (b >> i) & 1 == 1 {
            acc = add_mod(acc, a, p);
        }
    }
    acc
}

pub fn pow_mod(mut base: u128, mut e: u128, p: u128) -> u128 {
    let mut acc = 1 % p;
    base %= p;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        e >>= 1;
        if e != 0 {
            base = mul_mod(base, base, p);
        }
    }
    acc
}

const SMALL_PRIMES: [u128; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Bases that make Miller-Rabin deterministic for every n < 2^64.
const DETERMINISTIC_BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra rounds above 2^64, each with a base from a generator seeded by `n`.
pub const RANDOM_ROUNDS: usize = 64;

/// Miller-Rabin. Exact below 2^64; above, the deterministic bases plus
/// [`RANDOM_ROUNDS`] pseudo-random bases (error at most 4^-64).
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &SMALL_PRIMES {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    if n < 97 * 97 {
        return true;
    }
    let d_shift = (n - 1).trailing_zeros();
    let d = (n - 1) >> d_shift;
    let strong_probable = |a: u128| -> bool {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..d_shift {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    };
    if !DETERMINISTIC_BASES.iter().all(|&a| strong_probable(a)) {
        return false;
    }
    if n <= u64::MAX as u128 {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64((n as u64) ^ ((n >> 64) as u64));
    (0..RANDOM_ROUNDS).all(|_| {
        let raw = (u128::from(rng.next_u64()) << 64) | u128::from(rng.next_u64());
        strong_probable(2 + raw % (n - 3))
    })
}

/// Smallest prime strictly greater than `threshold`.
pub fn next_prime_above(threshold: u128) -> Result<FieldPrime> {
    if threshold < 2 {
        return Err(Error::usage("threshold must be at least 2"));
    }
    let limit = 1u128 << MAX_MODULUS_BITS;
    let mut candidate = threshold + 1;
    if candidate & 1 == 0 {
        candidate += 1;
    }
    while candidate < limit {
        if is_prime(candidate) {
            return Ok(FieldPrime::certified(candidate));
        }
        candidate += 2;
    }
    Err(Error::capacity(format!(
        "no prime above {threshold} fits in {MAX_MODULUS_BITS} bits"
    )))
}
