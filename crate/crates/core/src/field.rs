//! Arithmetic over prime fields `F_p` with a modulus chosen at runtime.
//!
//! Elements carry their modulus so that values from different fields cannot
//! be combined silently. Operator impls (`+`, `-`, `*`, unary `-`) panic on a
//! modulus mismatch; the `try_*` methods report it as [`FieldError`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`]. Keeps `a + b` inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^63)")]
    ModulusOutOfRange(u64),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
    #[error("no element of order {order} exists in F_{modulus} ({order} does not divide p - 1)")]
    NoRootOfUnity { order: u64, modulus: u64 },
}

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if !(2..MAX_MODULUS).contains(&modulus) {
            return Err(FieldError::ModulusOutOfRange(modulus));
        }
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduces `value` modulo p.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.modulus,
            modulus: self.modulus,
        }
    }

    /// Maps a signed integer to its residue class.
    pub fn from_i64(&self, value: i64) -> FieldElement {
        let m = self.modulus as i128;
        let v = (value as i128).rem_euclid(m) as u64;
        FieldElement {
            value: v,
            modulus: self.modulus,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element(rng.gen_range(0..self.modulus))
    }

    /// Uniform draw from `F_p \ {0}`.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element(rng.gen_range(1..self.modulus))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.modulus).map(move |v| self.element(v))
    }

    /// Returns an element of exact multiplicative order `order`.
    ///
    /// Among all elements of that order the numerically smallest one is
    /// returned, so the choice does not depend on how the search is seeded.
    /// The candidates are the powers `w0^k` with `gcd(k, order) = 1` of any
    /// single element `w0` of order `order`, which costs `O(order)` products.
    pub fn find_root_of_unity(&self, order: u64) -> Result<FieldElement, FieldError> {
        let p = self.modulus;
        if order == 0 || !(p - 1).is_multiple_of(order) {
            return Err(FieldError::NoRootOfUnity { order, modulus: p });
        }
        if order == 1 {
            return Ok(self.one());
        }
        let factors = prime_factors(order);
        let cofactor = (p - 1) / order;
        let base = (2..p)
            .map(|h| self.element(h).pow(cofactor))
            .find(|w| has_exact_order(*w, order, &factors))
            .expect("F_p^* is cyclic, so an element of every order dividing p - 1 exists");
        let mut best = base;
        let mut power = base;
        for k in 2..order {
            power = power * base;
            if gcd(k, order) == 1 && power.value < best.value {
                best = power;
            }
        }
        Ok(best)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.modulus)
    }
}

/// A residue modulo a public prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

/// Selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the left operand; the right operand is ignored.
    Inv,
    /// Left operand raised to the canonical representative of the right one.
    Pow,
}

/// Single entry point over the basic operations.
pub fn field_arith(
    x: FieldElement,
    y: FieldElement,
    op: FieldOp,
) -> Result<FieldElement, FieldError> {
    match op {
        FieldOp::Add => x.try_add(y),
        FieldOp::Sub => x.try_sub(y),
        FieldOp::Mul => x.try_mul(y),
        FieldOp::Inv => x.inv(),
        FieldOp::Pow => {
            x.check_modulus(&y)?;
            Ok(x.pow(y.value))
        }
    }
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField {
            modulus: self.modulus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check_modulus(&self, other: &Self) -> Result<(), FieldError> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }

    fn with_value(&self, value: u64) -> Self {
        Self {
            value,
            modulus: self.modulus,
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self, FieldError> {
        self.check_modulus(&rhs)?;
        let s = self.value + rhs.value;
        Ok(self.with_value(if s >= self.modulus { s - self.modulus } else { s }))
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self, FieldError> {
        self.check_modulus(&rhs)?;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.modulus - rhs.value
        };
        Ok(self.with_value(v))
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self, FieldError> {
        self.check_modulus(&rhs)?;
        Ok(self.with_value(mul_mod(self.value, rhs.value, self.modulus)))
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, FieldError> {
        self.check_modulus(&rhs)?;
        Ok(self * rhs.inv()?)
    }

    pub fn pow(self, exp: u64) -> Self {
        self.with_value(pow_mod(self.value, exp, self.modulus))
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::NotInvertible(self.value, self.modulus));
        }
        let (mut r0, mut r1) = (self.modulus as i128, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.with_value(t0.rem_euclid(self.modulus as i128) as u64))
    }

    /// Legendre symbol: 1 for a nonzero square, -1 for a non-square, 0 for zero.
    pub fn legendre(self) -> i8 {
        if self.value == 0 {
            return 0;
        }
        if self.modulus == 2 {
            return 1;
        }
        if self.pow((self.modulus - 1) / 2).value == 1 {
            1
        } else {
            -1
        }
    }

    /// Square root by Tonelli–Shanks.
    ///
    /// Returns the canonical root `min(r, p - r)`, or `None` for a non-residue.
    /// The auxiliary non-residue is the smallest integer `z >= 2` with
    /// Legendre symbol -1, so results are reproducible.
    pub fn sqrt(self) -> Option<Self> {
        let p = self.modulus;
        if self.value == 0 || p == 2 {
            return Some(self);
        }
        if self.legendre() != 1 {
            return None;
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let root = if s == 1 {
            self.pow((p + 1) / 4)
        } else {
            let z = (2..p)
                .map(|z| self.with_value(z))
                .find(|z| z.legendre() == -1)
                .expect("odd prime fields contain a non-residue");
            let mut m = s;
            let mut c = z.pow(q);
            let mut t = self.pow(q);
            let mut r = self.pow(q.div_ceil(2));
            while t.value != 1 {
                let mut i = 0u32;
                let mut t2 = t;
                while t2.value != 1 {
                    t2 = t2 * t2;
                    i += 1;
                }
                let b = c.pow(1u64 << (m - i - 1));
                m = i;
                c = b * b;
                t = t * c;
                r = r * b;
            }
            r
        };
        debug_assert_eq!(root * root, self);
        let other = -root;
        Some(if other.value < root.value { other } else { root })
    }

    /// Exact multiplicative order of a nonzero element.
    pub fn multiplicative_order(self) -> Option<u64> {
        if self.value == 0 {
            return None;
        }
        let mut order = self.modulus - 1;
        for q in prime_factors(order) {
            while order.is_multiple_of(q) && self.pow(order / q).value == 1 {
                order /= q;
            }
        }
        Some(order)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Field elements serialize as decimal strings of their canonical representative.
impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("field elements from different fields")
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("field elements from different fields")
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("field elements from different fields")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        if self.value == 0 {
            self
        } else {
            self.with_value(self.modulus - self.value)
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn has_exact_order(w: FieldElement, order: u64, factors: &[u64]) -> bool {
    w.pow(order).value == 1 && factors.iter().all(|q| w.pow(order / q).value != 1)
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic Miller–Rabin; the witness set is exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
