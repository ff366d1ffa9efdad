//! Discrete Fourier transforms over `F_p`.
//!
//! A transform of length `N` needs an element `ω` of exact order `N`, which
//! exists iff `N | p - 1`. Conventions:
//!
//! * forward: `g(κ) = Σ_n f(n) ω^(-κn)`
//! * inverse: `f(n) = N^-1 Σ_κ g(κ) ω^(κn)`
//! * conjugate transform: the forward transform taken with `ω^-1`, i.e.
//!   `Σ_n f(n) ω^(κn)`. This plays the role of the complex conjugate in the
//!   discrete Parseval identity, which then holds exactly.
//!
//! The definitional `O(N²)` sums are always available (`*_naive`); lengths
//! that are powers of two take an iterative radix-2 path by default.

use std::ops::Index;

use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DftError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sequences use different roots of unity or fields")]
    RootMismatch,
    #[error("root {root} does not have exact order {length}")]
    BadRoot { root: u64, length: usize },
    #[error("empty sequence")]
    Empty,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A length-`N` sequence over `F_p` paired with an order-`N` root of unity.
///
/// Indexing with [`DftSequence::at`] is periodic: any integer index is reduced
/// modulo `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DftSequence {
    values: Vec<FieldElement>,
    root: FieldElement,
}

impl DftSequence {
    pub fn new(values: Vec<FieldElement>, root: FieldElement) -> Result<Self, DftError> {
        if values.is_empty() {
            return Err(DftError::Empty);
        }
        let n = values.len();
        if root.multiplicative_order() != Some(n as u64) {
            return Err(DftError::BadRoot {
                root: root.value(),
                length: n,
            });
        }
        if values.iter().any(|v| v.modulus() != root.modulus()) {
            return Err(DftError::RootMismatch);
        }
        Ok(Self { values, root })
    }

    /// Builds a sequence using the canonical root of unity of the right order.
    pub fn from_values(field: PrimeField, values: Vec<FieldElement>) -> Result<Self, DftError> {
        if values.is_empty() {
            return Err(DftError::Empty);
        }
        let root = field.find_root_of_unity(values.len() as u64)?;
        Self::new(values, root)
    }

    pub fn from_u64(field: PrimeField, values: &[u64]) -> Result<Self, DftError> {
        Self::from_values(field, values.iter().map(|&v| field.element(v)).collect())
    }

    /// Same root and length, new values. Callers guarantee the length.
    fn with_values(&self, values: Vec<FieldElement>) -> Self {
        debug_assert_eq!(values.len(), self.len());
        Self {
            values,
            root: self.root,
        }
    }

    pub fn zeros_like(&self) -> Self {
        self.with_values(vec![self.field().zero(); self.len()])
    }

    /// Delta at index `k` (mod N).
    pub fn delta_like(&self, k: i64) -> Self {
        let mut v = vec![self.field().zero(); self.len()];
        v[self.wrap(k)] = self.field().one();
        self.with_values(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn root(&self) -> FieldElement {
        self.root
    }

    pub fn field(&self) -> PrimeField {
        self.root.field()
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.len() as i64) as usize
    }

    pub fn at(&self, k: i64) -> FieldElement {
        self.values[self.wrap(k)]
    }

    /// `n ↦ f(-n mod N)`.
    pub fn reversed(&self) -> Self {
        let n = self.len() as i64;
        self.with_values((0..n).map(|k| self.at(-k)).collect())
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self, DftError> {
        self.check_compatible(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a * *b)
                .collect(),
        ))
    }

    pub fn scale(&self, k: FieldElement) -> Self {
        self.with_values(self.values.iter().map(|v| *v * k).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self, DftError> {
        self.check_compatible(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a + *b)
                .collect(),
        ))
    }

    pub fn check_compatible(&self, other: &Self) -> Result<(), DftError> {
        if self.len() != other.len() {
            return Err(DftError::LengthMismatch(self.len(), other.len()));
        }
        if self.root != other.root {
            return Err(DftError::RootMismatch);
        }
        Ok(())
    }

    fn n_inv(&self) -> FieldElement {
        self.field()
            .element(self.len() as u64)
            .inv()
            .expect("N divides p - 1, so N is a unit")
    }
}

impl Index<usize> for DftSequence {
    type Output = FieldElement;
    fn index(&self, i: usize) -> &FieldElement {
        &self.values[i % self.values.len()]
    }
}

/// `out(κ) = Σ_n f(n) w^(κn)`, by direct summation.
fn transform_naive(values: &[FieldElement], w: FieldElement) -> Vec<FieldElement> {
    let n = values.len();
    let zero = w.field().zero();
    let one = w.field().one();
    let mut out = Vec::with_capacity(n);
    let mut w_k = one;
    for _ in 0..n {
        let mut acc = zero;
        let mut w_kn = one;
        for v in values {
            acc = acc + *v * w_kn;
            w_kn = w_kn * w_k;
        }
        out.push(acc);
        w_k = w_k * w;
    }
    out
}

/// Iterative Cooley–Tukey for power-of-two lengths, same output as
/// [`transform_naive`].
fn transform_radix2(values: &[FieldElement], w: FieldElement) -> Vec<FieldElement> {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    let mut a: Vec<FieldElement> = (0..n)
        .map(|i| {
            let j = if bits == 0 {
                0
            } else {
                i.reverse_bits() >> (usize::BITS - bits)
            };
            values[j]
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let w_len = w.pow((n / len) as u64);
        for start in (0..n).step_by(len) {
            let mut twiddle = w.field().one();
            for j in 0..len / 2 {
                let u = a[start + j];
                let v = a[start + j + len / 2] * twiddle;
                a[start + j] = u + v;
                a[start + j + len / 2] = u - v;
                twiddle = twiddle * w_len;
            }
        }
        len <<= 1;
    }
    a
}

fn transform(values: &[FieldElement], w: FieldElement) -> Vec<FieldElement> {
    if values.len().is_power_of_two() {
        transform_radix2(values, w)
    } else {
        transform_naive(values, w)
    }
}

fn inv_root(f: &DftSequence) -> FieldElement {
    f.root.inv().expect("roots of unity are units")
}

/// Forward transform `g(κ) = Σ f(n) ω^(-κn)`.
pub fn dft_forward(f: &DftSequence) -> DftSequence {
    f.with_values(transform(&f.values, inv_root(f)))
}

/// Forward transform by the definitional sum.
pub fn dft_forward_naive(f: &DftSequence) -> DftSequence {
    f.with_values(transform_naive(&f.values, inv_root(f)))
}

/// Inverse transform `f(n) = N^-1 Σ g(κ) ω^(κn)`.
pub fn dft_inverse(g: &DftSequence) -> DftSequence {
    let n_inv = g.n_inv();
    g.with_values(
        transform(&g.values, g.root)
            .into_iter()
            .map(|v| v * n_inv)
            .collect(),
    )
}

pub fn dft_inverse_naive(g: &DftSequence) -> DftSequence {
    let n_inv = g.n_inv();
    g.with_values(
        transform_naive(&g.values, g.root)
            .into_iter()
            .map(|v| v * n_inv)
            .collect(),
    )
}

/// Transform with the inverted root: `B̄(κ) = Σ f(n) ω^(κn)`.
pub fn conjugate_transform(f: &DftSequence) -> DftSequence {
    f.with_values(transform(&f.values, f.root))
}

/// Both sides of the discrete Parseval identity
/// `Σ_κ A_κ B̄_κ = N Σ_n φ_n ψ_n`.
pub fn parseval_discrete(
    phi: &DftSequence,
    psi: &DftSequence,
) -> Result<(FieldElement, FieldElement), DftError> {
    phi.check_compatible(psi)?;
    let a = dft_forward(phi);
    let b_bar = conjugate_transform(psi);
    let zero = phi.field().zero();
    let lhs = a
        .values
        .iter()
        .zip(&b_bar.values)
        .fold(zero, |acc, (x, y)| acc + *x * *y);
    let dot = phi
        .values
        .iter()
        .zip(&psi.values)
        .fold(zero, |acc, (x, y)| acc + *x * *y);
    Ok((lhs, dot * phi.field().element(phi.len() as u64)))
}

/// Cyclic convolution `(φ ⋆ ψ)_n = Σ_ι φ_ι ψ_(n-ι mod N)`.
pub fn cyclic_convolve(phi: &DftSequence, psi: &DftSequence) -> Result<DftSequence, DftError> {
    if phi.len() != psi.len() {
        return Err(DftError::LengthMismatch(phi.len(), psi.len()));
    }
    if phi.field() != psi.field() {
        return Err(DftError::RootMismatch);
    }
    let n = phi.len() as i64;
    let zero = phi.field().zero();
    let out = (0..n)
        .map(|k| (0..n).fold(zero, |acc, i| acc + phi.at(i) * psi.at(k - i)))
        .collect();
    Ok(phi.with_values(out))
}

/// Checks `F[φ ⋆ ψ] = A·B` and `F[φ·ψ] = N^-1 (A ⋆ B)` elementwise.
pub fn convolution_theorem_check(phi: &DftSequence, psi: &DftSequence) -> bool {
    let Ok(conv) = cyclic_convolve(phi, psi) else {
        return false;
    };
    if phi.check_compatible(psi).is_err() {
        return false;
    }
    let a = dft_forward(phi);
    let b = dft_forward(psi);
    let direct = dft_forward(&conv) == a.pointwise_mul(&b).expect("compatible");
    let product = phi.pointwise_mul(psi).expect("compatible");
    let dual = dft_forward(&product)
        == cyclic_convolve(&a, &b)
            .expect("compatible")
            .scale(phi.n_inv());
    direct && dual
}

/// `Σ_κ Π_i U_i(κ)` over any number of compatible sequences.
pub fn product_sum(seqs: &[&DftSequence]) -> Result<FieldElement, DftError> {
    let first = seqs.first().ok_or(DftError::Empty)?;
    for s in &seqs[1..] {
        first.check_compatible(s)?;
    }
    let field = first.field();
    Ok((0..first.len()).fold(field.zero(), |acc, k| {
        acc + seqs.iter().fold(field.one(), |p, s| p * s.values[k])
    }))
}

/// `Σ_κ U_κ V_κ W_κ`. For `U, V, W` the forward transforms of `u, v, w` this
/// equals `N Σ_{n+m+ℓ ≡ 0} u_n v_m w_ℓ`.
pub fn triple_product_sum(
    u: &DftSequence,
    v: &DftSequence,
    w: &DftSequence,
) -> Result<FieldElement, DftError> {
    product_sum(&[u, v, w])
}

/// `N^-1 Σ_n ω^((κ-κ')n) = [κ = κ']` for every pair, by direct summation.
pub fn orthogonality_holds(root: FieldElement, length: usize) -> bool {
    let field = root.field();
    let n = length as u64;
    let Ok(n_inv) = field.element(n).inv() else {
        return false;
    };
    for k in 0..n {
        for k2 in 0..n {
            let diff = (k + n - k2) % n;
            let step = root.pow(diff);
            let mut acc = field.zero();
            let mut term = field.one();
            for _ in 0..n {
                acc = acc + term;
                term = term * step;
            }
            let expected = if k == k2 { field.one() } else { field.zero() };
            if acc * n_inv != expected {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p17() -> PrimeField {
        PrimeField::new(17).unwrap()
    }

    fn seq(vals: &[u64]) -> DftSequence {
        DftSequence::from_u64(p17(), vals).unwrap()
    }

    fn random_seq(field: PrimeField, n: usize, rng: &mut impl Rng) -> DftSequence {
        DftSequence::from_values(field, (0..n).map(|_| field.random(rng)).collect()).unwrap()
    }

    #[test]
    fn delta_and_constant() {
        let delta = seq(&[1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(dft_forward(&delta), seq(&[1; 8]));
        assert_eq!(dft_forward(&seq(&[1; 8])), seq(&[8, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(dft_inverse(&dft_forward(&delta)), delta);
        assert_eq!(conjugate_transform(&delta), seq(&[1; 8]));
    }

    #[test]
    fn root_defaults_to_two_for_p17_n8() {
        assert_eq!(seq(&[0; 8]).root().value(), 2);
    }

    #[test]
    fn rejects_wrong_root_and_length() {
        let fp = p17();
        let vals = vec![fp.one(); 8];
        assert!(matches!(
            DftSequence::new(vals.clone(), fp.element(4)),
            Err(DftError::BadRoot { .. })
        ));
        assert!(DftSequence::from_values(fp, vec![fp.one(); 5]).is_err());
        let a = seq(&[1; 8]);
        let b = DftSequence::from_u64(p17(), &[1; 4]).unwrap();
        assert_eq!(
            parseval_discrete(&a, &b),
            Err(DftError::LengthMismatch(8, 4))
        );
        assert!(cyclic_convolve(&a, &b).is_err());
        assert!(!convolution_theorem_check(&a, &b));
    }

    #[test]
    fn periodic_indexing() {
        let s = seq(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(s.at(9).value(), 1);
        assert_eq!(s.at(-1).value(), 7);
        assert_eq!(s[10].value(), 2);
    }

    #[test]
    fn worked_convolution() {
        let phi = seq(&[1, 1, 0, 0, 0, 0, 0, 0]);
        let psi = seq(&[1, 2, 0, 0, 0, 0, 0, 0]);
        assert_eq!(
            cyclic_convolve(&phi, &psi).unwrap(),
            seq(&[1, 3, 2, 0, 0, 0, 0, 0])
        );
        assert!(convolution_theorem_check(&phi, &psi));
    }

    #[test]
    fn convolution_with_deltas_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_seq(p17(), 8, &mut rng);
        assert_eq!(cyclic_convolve(&f, &f.delta_like(0)).unwrap(), f);
        for k in 0..8i64 {
            let shifted = cyclic_convolve(&f, &f.delta_like(k)).unwrap();
            for n in 0..8i64 {
                assert_eq!(shifted.at(n), f.at(n - k));
            }
        }
    }

    #[test]
    fn parseval_trivial_cases() {
        let delta = seq(&[1, 0, 0, 0, 0, 0, 0, 0]);
        let (l, r) = parseval_discrete(&delta, &delta).unwrap();
        assert_eq!((l.value(), r.value()), (8, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_seq(p17(), 8, &mut rng);
        let (l, r) = parseval_discrete(&f, &f.zeros_like()).unwrap();
        assert!(l.is_zero() && r.is_zero());
    }

    #[test]
    fn conjugate_is_reversed_forward_and_involutive_up_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random_seq(p17(), 8, &mut rng);
            assert_eq!(conjugate_transform(&f), dft_forward(&f).reversed());
            let twice = conjugate_transform(&conjugate_transform(&f));
            assert_eq!(twice, f.reversed().scale(p17().element(8)));
        }
    }

    #[test]
    fn fast_path_matches_definition() {
        let fp = PrimeField::new(65_537).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [1usize, 2, 4, 32, 256] {
            let f = random_seq(fp, n, &mut rng);
            assert_eq!(dft_forward(&f), dft_forward_naive(&f));
            assert_eq!(dft_inverse(&f), dft_inverse_naive(&f));
        }
        // Non power-of-two lengths use the definitional sum.
        let f = random_seq(PrimeField::new(97).unwrap(), 12, &mut rng);
        assert_eq!(dft_inverse(&dft_forward(&f)), f);
    }

    #[test]
    fn triple_product_trivial() {
        let delta = seq(&[1, 0, 0, 0, 0, 0, 0, 0]);
        let d = dft_forward(&delta);
        assert_eq!(triple_product_sum(&d, &d, &d).unwrap().value(), 8);
        let z = delta.zeros_like();
        assert!(triple_product_sum(&d, &z, &d).unwrap().is_zero());
        assert!(product_sum(&[]).is_err());
    }

    #[test]
    fn orthogonality_small() {
        let fp = p17();
        for n in [1usize, 2, 4, 8, 16] {
            assert!(orthogonality_holds(fp.find_root_of_unity(n as u64).unwrap(), n));
        }
        // An element of the wrong order fails.
        assert!(!orthogonality_holds(fp.element(4), 8));
    }
}
