use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::group::GroupElement;
use super::matrix::IntegerMatrix;
use crate::error::{Error, Result};

/// Sparse Laurent polynomial in `m` variables with integer coefficients.
///
/// Terms are keyed by exponent vector; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    dim: usize,
    terms: BTreeMap<GroupElement, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(GroupElement::zero(dim), BigInt::one())
    }

    /// `coeff * t^exponent`.
    pub fn monomial(exponent: GroupElement, coeff: BigInt) -> Self {
        let dim = exponent.dim();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { dim, terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, BigInt)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of `t^exponent` (zero when absent).
    pub fn coeff(&self, exponent: &GroupElement) -> BigInt {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    /// Sum of all coefficients, i.e. the value at `t = (1, ..., 1)`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn add_term(&mut self, exponent: GroupElement, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Product by convolution of the term maps.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `sum coeff * lambda^a` for a strictly positive evaluation point.
    pub fn eval(&self, lambda: &[f64]) -> Result<f64> {
        if lambda.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: lambda.len(),
            });
        }
        if let Some((index, &value)) = lambda.iter().enumerate().find(|(_, &x)| x.is_nan() || x <= 0.0) {
            return Err(Error::NonPositiveEvaluation { index, value });
        }
        Ok(self.eval_unchecked(lambda))
    }

    pub(crate) fn eval_unchecked(&self, lambda: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e
                    .coords()
                    .iter()
                    .zip(lambda)
                    .map(|(&a, &l)| l.powi(a as i32))
                    .product();
                c.to_f64().unwrap_or(f64::INFINITY) * mono
            })
            .sum()
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, a) in e.coords().iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, a)?,
                }
            }
        }
        Ok(())
    }
}

/// Square matrix of Laurent polynomials sharing one exponent dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    size: usize,
    dim: usize,
    entries: Vec<LaurentPolynomial>,
}

impl LaurentMatrix {
    pub fn zeros(size: usize, dim: usize) -> Self {
        Self {
            size,
            dim,
            entries: vec![LaurentPolynomial::zero(dim); size * size],
        }
    }

    pub fn identity(size: usize, dim: usize) -> Self {
        let mut m = Self::zeros(size, dim);
        for i in 0..size {
            m.entries[i * size + i] = LaurentPolynomial::one(dim);
        }
        m
    }

    pub fn from_entries(size: usize, dim: usize, entries: Vec<LaurentPolynomial>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        if let Some(p) = entries.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Self {
            size,
            dim,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.entries[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut LaurentPolynomial {
        &mut self.entries[i * self.size + j]
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.size != rhs.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: rhs.size,
            });
        }
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.size;
        let mut out = Self::zeros(n, self.dim);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPolynomial::zero(self.dim);
                for r in 0..n {
                    let a = self.get(i, r);
                    let b = rhs.get(r, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for (e1, c1) in a.terms() {
                        for (e2, c2) in b.terms() {
                            acc.add_term(e1 + e2, c1 * c2);
                        }
                    }
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// `M^k` by repeated multiplication; `k = 0` is the identity.
    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::identity(self.size, self.dim);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Entrywise evaluation at a strictly positive point.
    pub fn eval(&self, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
        if lambda.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: lambda.len(),
            });
        }
        if let Some((index, &value)) = lambda.iter().enumerate().find(|(_, &x)| x.is_nan() || x <= 0.0) {
            return Err(Error::NonPositiveEvaluation { index, value });
        }
        Ok((0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|j| self.get(i, j).eval_unchecked(lambda))
                    .collect()
            })
            .collect())
    }

    /// Exact value at `t = (1, ..., 1)`.
    pub fn eval_at_ones(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out[(i, j)] = self.get(i, j).coefficient_sum();
            }
        }
        out
    }
}
