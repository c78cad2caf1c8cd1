use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::IntegerMatrix;
use crate::error::{Error, Result};

const FRAC_BITS: u32 = 120;
/// Iterates are truncated to about this many bits between multiplications.
const KEEP_BITS: u64 = 320;
const MAX_ITERATIONS: usize = 20_000;

/// Fixed-point real in `[-64, 64)` with 120 fractional bits (about 36 digits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(i128);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(1 << FRAC_BITS);

    /// `num / den`, truncated toward zero. The quotient must be below 64 in magnitude.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Fixed {
        let q: BigInt = (num << FRAC_BITS) / den;
        Fixed(q.to_i128().expect("ratio fits the fixed-point range"))
    }

    pub fn from_f64(x: f64) -> Fixed {
        Fixed((x * (FRAC_BITS as f64).exp2()) as i128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / (FRAC_BITS as f64).exp2()
    }

    pub fn half(self) -> Fixed {
        Fixed(self.0 / 2)
    }

    pub fn abs(self) -> Fixed {
        Fixed(self.0.abs())
    }

    pub fn raw(self) -> i128 {
        self.0
    }
}

impl Add for Fixed {
    type Output = Fixed;

    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl Sub for Fixed {
    type Output = Fixed;

    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl std::iter::Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, Add::add)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17}", self.to_f64())
    }
}

/// Self-similar length data of a periodic IET: the Perron-Frobenius
/// eigenvector of the loop matrix, normalized to total length 1.
#[derive(Clone, Debug)]
pub struct LengthData {
    lengths: Vec<Fixed>,
    eigenvalue: f64,
    iterate: Vec<BigInt>,
    matrix: IntegerMatrix,
    iterations: usize,
}

impl LengthData {
    pub fn lengths(&self) -> &[Fixed] {
        &self.lengths
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.lengths.iter().map(|x| x.to_f64()).collect()
    }

    /// Perron-Frobenius eigenvalue of the loop matrix.
    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn d(&self) -> usize {
        self.lengths.len()
    }

    /// Lengths of the induced subintervals after `k` loop periods,
    /// i.e. `lengths / eigenvalue^k`, computed from the exact iterate.
    pub fn lengths_at_level(&self, k: u32) -> Vec<Fixed> {
        let mut v = self.iterate.clone();
        for _ in 0..k {
            v = self.matrix.mul_vec(&v).expect("square matrix");
        }
        let total: BigInt = v.iter().sum();
        self.iterate
            .iter()
            .map(|x| Fixed::from_ratio(x, &total))
            .collect()
    }

    /// `||A l - alpha l||_1 / ||alpha l||_1` evaluated in `f64`.
    pub fn relative_residual(&self) -> f64 {
        let l = self.lengths_f64();
        let a = self.matrix.to_f64_rows();
        let mut num = 0.0;
        for (i, row) in a.iter().enumerate() {
            let al: f64 = row.iter().zip(&l).map(|(x, y)| x * y).sum();
            num += (al - self.eigenvalue * l[i]).abs();
        }
        num / (self.eigenvalue * l.iter().sum::<f64>())
    }
}

fn truncate(v: &mut [BigInt]) {
    let bits = v.iter().map(BigInt::bits).max().unwrap_or(0);
    if bits > KEEP_BITS + 64 {
        let shift = (bits - KEEP_BITS) as usize;
        for x in v.iter_mut() {
            *x = &*x >> shift;
        }
    }
}

fn normalized(v: &[BigInt]) -> Vec<Fixed> {
    let total: BigInt = v.iter().sum();
    v.iter().map(|x| Fixed::from_ratio(x, &total)).collect()
}

/// Perron-Frobenius length data of a strictly positive loop matrix by power
/// iteration on exact integer iterates from the uniform start.
pub fn pf_lengths(a: &IntegerMatrix) -> Result<LengthData> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_strictly_positive() {
        return Err(Error::NonPositiveMatrix);
    }
    let d = a.rows();
    let mut v: Vec<BigInt> = vec![BigInt::from(1); d];
    let mut prev = normalized(&v);
    let tol = Fixed(1 << 8);
    let mut stable = 0;
    for it in 1..=MAX_ITERATIONS {
        v = a.mul_vec(&v)?;
        truncate(&mut v);
        let cur = normalized(&v);
        let delta = cur
            .iter()
            .zip(&prev)
            .map(|(x, y)| (*x - *y).abs())
            .max()
            .unwrap_or(Fixed::ZERO);
        prev = cur;
        stable = if delta <= tol { stable + 1 } else { 0 };
        if stable >= 3 {
            let av = a.mul_vec(&v)?;
            let num: BigInt = av.iter().sum();
            let den: BigInt = v.iter().sum();
            let eigenvalue = ratio_f64(&num, &den);
            let data = LengthData {
                lengths: prev,
                eigenvalue,
                iterate: v,
                matrix: a.clone(),
                iterations: it,
            };
            let residual = data.relative_residual();
            if residual > 1e-12 {
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual,
                });
            }
            return Ok(data);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: f64::NAN,
    })
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = den.bits().saturating_sub(60) as usize;
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d.is_zero() {
        f64::INFINITY
    } else {
        n / d
    }
}
