//! Field values carrying formal powers of π and √2.
//!
//! The two-party protocol is written in terms of the real constants π and √2,
//! which have no image in `F_p`. A [`TaggedScalar`] keeps them symbolic: the
//! core is an honest field element and the exponents record how many factors
//! of `π^(1/2)` and `√2` are attached to it. Only values whose exponents have
//! cancelled may leave the protocol.
//!
//! `√2·√2 = 2` is rational, so the √2 exponent is kept reduced to `{0, 1}` by
//! folding pairs into the core. π is transcendental and never folded.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaggedError {
    #[error("incommensurable scalars: (π^{}/2, √2^{}) + (π^{}/2, √2^{})", .left.0, .left.1, .right.0, .right.1)]
    Incommensurable { left: (i32, i32), right: (i32, i32) },
    #[error("modulus mismatch between tagged scalars")]
    ModulusMismatch,
    #[error("value is not pure (π^{pi_halves}/2, √2^{sqrt2}) and cannot be revealed")]
    Impure { pi_halves: i32, sqrt2: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TaggedScalar {
    core: FieldElement,
    /// Twice the exponent of π, so that `η^(1/2)` stays integral.
    pi_halves: i32,
    /// Exponent of √2, always 0 or 1 after normalization.
    sqrt2: i32,
}

impl TaggedScalar {
    pub fn new(core: FieldElement, pi_halves: i32, sqrt2: i32) -> Self {
        let two = core.field().element(2);
        let mut core = core;
        let mut sqrt2 = sqrt2;
        // Fold (√2)^2k into the core as 2^k.
        let pairs = sqrt2.div_euclid(2);
        sqrt2 = sqrt2.rem_euclid(2);
        if pairs > 0 {
            core = core * two.pow(pairs as u64);
        } else if pairs < 0 {
            let half = two.inv().expect("√2 folding needs p > 2");
            core = core * half.pow(pairs.unsigned_abs() as u64);
        }
        Self {
            core,
            pi_halves,
            sqrt2,
        }
    }

    /// A value with no formal constants attached.
    pub fn pure(core: FieldElement) -> Self {
        Self {
            core,
            pi_halves: 0,
            sqrt2: 0,
        }
    }

    pub fn core(&self) -> FieldElement {
        self.core
    }

    pub fn pi_halves(&self) -> i32 {
        self.pi_halves
    }

    pub fn sqrt2_exponent(&self) -> i32 {
        self.sqrt2
    }

    pub fn exponents(&self) -> (i32, i32) {
        (self.pi_halves, self.sqrt2)
    }

    pub fn is_pure(&self) -> bool {
        self.pi_halves == 0 && self.sqrt2 == 0
    }

    /// The field value, provided every formal constant has cancelled.
    pub fn reveal(&self) -> Result<FieldElement, TaggedError> {
        if self.is_pure() {
            Ok(self.core)
        } else {
            Err(TaggedError::Impure {
                pi_halves: self.pi_halves,
                sqrt2: self.sqrt2,
            })
        }
    }

    pub fn tagged_mul(&self, other: &Self) -> Result<Self, TaggedError> {
        let core = self
            .core
            .try_mul(other.core)
            .map_err(|_| TaggedError::ModulusMismatch)?;
        Ok(Self::new(
            core,
            self.pi_halves + other.pi_halves,
            self.sqrt2 + other.sqrt2,
        ))
    }

    pub fn tagged_add(&self, other: &Self) -> Result<Self, TaggedError> {
        if self.exponents() != other.exponents() {
            return Err(TaggedError::Incommensurable {
                left: self.exponents(),
                right: other.exponents(),
            });
        }
        let core = self
            .core
            .try_add(other.core)
            .map_err(|_| TaggedError::ModulusMismatch)?;
        Ok(Self { core, ..*self })
    }

    /// Multiplies the core by a plain field element, leaving the tags alone.
    pub fn scale(&self, k: FieldElement) -> Self {
        Self {
            core: self.core * k,
            ..*self
        }
    }
}

impl fmt::Display for TaggedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.core)?;
        if self.pi_halves != 0 {
            write!(f, "·π^({}/2)", self.pi_halves)?;
        }
        if self.sqrt2 != 0 {
            write!(f, "·√2")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use proptest::prelude::*;

    fn fp() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn exponents_cancel_under_mul() {
        let x = TaggedScalar::new(fp().element(5), 2, 0);
        let y = TaggedScalar::new(fp().element(7), -2, 0);
        let z = x.tagged_mul(&y).unwrap();
        assert_eq!(z, TaggedScalar::pure(fp().element(35)));
        assert!(z.is_pure());
    }

    #[test]
    fn add_requires_equal_exponents() {
        let x = TaggedScalar::new(fp().element(5), 2, 0);
        let y = TaggedScalar::pure(fp().element(7));
        assert!(matches!(
            x.tagged_add(&y),
            Err(TaggedError::Incommensurable { .. })
        ));
        let w = TaggedScalar::new(fp().element(7), 2, 0);
        assert_eq!(x.tagged_add(&w).unwrap().core(), fp().element(12));
    }

    #[test]
    fn identity_is_neutral() {
        let x = TaggedScalar::pure(fp().element(9));
        let one = TaggedScalar::pure(fp().one());
        assert_eq!(x.tagged_mul(&one).unwrap(), x);
    }

    #[test]
    fn sqrt2_pairs_fold_into_core() {
        let r2 = TaggedScalar::new(fp().one(), 0, 1);
        let two = r2.tagged_mul(&r2).unwrap();
        assert_eq!(two, TaggedScalar::pure(fp().element(2)));
        let inv = TaggedScalar::new(fp().one(), 0, -1);
        // √2^-1 = √2 / 2.
        assert_eq!(inv.exponents(), (0, 1));
        assert_eq!(inv.core(), fp().element(2).inv().unwrap());
        assert!(r2.tagged_mul(&inv).unwrap().is_pure());
    }

    #[test]
    fn impure_values_cannot_be_revealed() {
        let x = TaggedScalar::new(fp().element(3), 1, 0);
        assert!(matches!(x.reveal(), Err(TaggedError::Impure { .. })));
        assert_eq!(TaggedScalar::pure(fp().element(3)).reveal().unwrap().value(), 3);
    }

    fn arb_tagged() -> impl Strategy<Value = TaggedScalar> {
        (0u64..101, -6i32..6, -3i32..3)
            .prop_map(|(c, e, s)| TaggedScalar::new(fp().element(c), e, s))
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(x in arb_tagged(), y in arb_tagged(), z in arb_tagged()) {
            prop_assert_eq!(x.tagged_mul(&y).unwrap(), y.tagged_mul(&x).unwrap());
            let l = x.tagged_mul(&y).unwrap().tagged_mul(&z).unwrap();
            let r = x.tagged_mul(&y.tagged_mul(&z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
