use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the fiber group `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    pub fn zero(m: usize) -> Self {
        Self { coords: vec![0; m] }
    }

    /// The `i`-th standard basis vector `u_i`.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut coords = vec![0; m];
        coords[i] = 1;
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn sup_norm(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self + other)
    }

    /// `<self, psi>` for a real homomorphism given by its values on the basis.
    pub fn pair(&self, psi: &[f64]) -> f64 {
        self.coords
            .iter()
            .zip(psi)
            .map(|(&a, &p)| a as f64 * p)
            .sum()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;

    fn add(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Add for GroupElement {
    type Output = GroupElement;

    fn add(self, rhs: GroupElement) -> GroupElement {
        &self + &rhs
    }
}

impl AddAssign<&GroupElement> for GroupElement {
    fn add_assign(&mut self, rhs: &GroupElement) {
        debug_assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.coords.iter_mut().zip(&rhs.coords) {
            *a += b;
        }
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;

    fn sub(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;

    fn sub(self, rhs: GroupElement) -> GroupElement {
        &self - &rhs
    }
}

impl SubAssign<&GroupElement> for GroupElement {
    fn sub_assign(&mut self, rhs: &GroupElement) {
        for (a, b) in self.coords.iter_mut().zip(&rhs.coords) {
            *a -= b;
        }
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;

    fn neg(self) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;

    fn neg(self) -> GroupElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn componentwise_addition() {
        let a = GroupElement::new(vec![1, -2]);
        let b = GroupElement::new(vec![3, 5]);
        assert_eq!(&a + &b, GroupElement::new(vec![4, 3]));
        assert_eq!(&a - &a, GroupElement::zero(2));
        assert_eq!(-a.clone() + a, GroupElement::zero(2));
    }

    #[test]
    fn checked_add_rejects_mismatch() {
        let a = GroupElement::zero(2);
        let b = GroupElement::zero(3);
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn display() {
        assert_eq!(GroupElement::new(vec![1, -1]).to_string(), "(1,-1)");
    }
}
