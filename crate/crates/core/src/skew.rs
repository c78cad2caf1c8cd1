//! Skewing cocycles constant on the exchanged intervals, integer
//! eigencocycles of the loop matrix and the Birkhoff-sum identities.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebra::{integer_kernel, invariant_factors, GroupElement, IntegerMatrix};
use crate::error::{Error, Result};
use crate::iet::discover::fixed_cocycle_equation;
use crate::iet::TowerSystem;

/// A cocycle `phi` with value `phi_j` in `Z^m` on the `j`-th interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewCocycle {
    values: Vec<GroupElement>,
}

impl SkewCocycle {
    /// Validated cocycle: the values must have a common dimension and
    /// generate `Z^m`.
    pub fn new(values: Vec<GroupElement>) -> Result<Self> {
        let phi = Self::unchecked(values)?;
        if !phi.generates() {
            return Err(Error::InvalidCocycle(format!(
                "values do not generate Z^{}: invariant factors {:?}",
                phi.m(),
                phi.invariant_factors()
            )));
        }
        Ok(phi)
    }

    /// Cocycle without the generation check (renormalized or perturbed values).
    pub fn unchecked(values: Vec<GroupElement>) -> Result<Self> {
        let Some(first) = values.first() else {
            return Err(Error::InvalidCocycle("no values".into()));
        };
        let m = first.dim();
        if m == 0 {
            return Err(Error::InvalidCocycle("fiber dimension 0".into()));
        }
        if let Some(v) = values.iter().find(|v| v.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: v.dim(),
            });
        }
        Ok(Self { values })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(rows.iter().map(|r| GroupElement::new(r.as_ref().to_vec())).collect())
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.values[0].dim()
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, j: usize) -> &GroupElement {
        &self.values[j]
    }

    /// The `d x m` matrix whose rows are the values.
    pub fn value_matrix(&self) -> IntegerMatrix {
        let rows: Vec<&[i64]> = self.values.iter().map(|v| v.coords()).collect();
        IntegerMatrix::from_rows(&rows).expect("rows share dimension m")
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        invariant_factors(&self.value_matrix())
    }

    /// Whether `{phi_1, ..., phi_d}` generates `Z^m`.
    pub fn generates(&self) -> bool {
        let f = self.invariant_factors();
        f.len() == self.m() && f.iter().all(One::is_one)
    }

    /// Copy with `delta` added to coordinate `coord` of `phi_j`.
    pub fn perturbed(&self, j: usize, coord: usize, delta: i64) -> Self {
        let mut values = self.values.clone();
        let mut c = values[j].coords().to_vec();
        c[coord] += delta;
        values[j] = GroupElement::new(c);
        Self { values }
    }
}

/// Integer solutions of `A^T phi = phi`: `m` basis vectors of length `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigencocycles {
    pub m: usize,
    pub basis: Vec<Vec<i64>>,
}

impl Eigencocycles {
    /// The cocycle using the full basis, `phi_j = (b_1[j], ..., b_m[j])`.
    pub fn cocycle(&self) -> Option<SkewCocycle> {
        self.cocycle_from(self.m)
    }

    /// The cocycle built from the first `count` basis vectors.
    pub fn cocycle_from(&self, count: usize) -> Option<SkewCocycle> {
        if count == 0 || count > self.m {
            return None;
        }
        let d = self.basis[0].len();
        let values = (0..d)
            .map(|j| GroupElement::new(self.basis[..count].iter().map(|b| b[j]).collect()))
            .collect();
        SkewCocycle::new(values).ok()
    }
}

/// Integer basis of `ker(A^T - I)`.
///
/// The basis is saturated and in Hermite normal form, so the `d x m` value
/// matrix has all invariant factors 1 and the values generate `Z^m`; this is
/// re-checked before returning.
pub fn eigencocycles(a: &IntegerMatrix) -> Result<Eigencocycles> {
    let kernel = integer_kernel(&fixed_cocycle_equation(a));
    let basis = kernel
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.to_i64().ok_or(Error::Overflow("eigencocycle entry")))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let e = Eigencocycles {
        m: basis.len(),
        basis,
    };
    if e.m > 0 && e.cocycle().is_none() {
        return Err(Error::InvalidCocycle(
            "kernel basis does not generate its lattice".into(),
        ));
    }
    Ok(e)
}

fn transpose_apply(a: &IntegerMatrix, phi: &SkewCocycle) -> Result<Vec<GroupElement>> {
    let d = phi.d();
    if a.rows() != d || a.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.rows(),
        });
    }
    (0..d)
        .map(|j| {
            let coords = (0..phi.m())
                .map(|c| {
                    let s: BigInt = (0..d)
                        .map(|i| &a[(i, j)] * BigInt::from(phi.value(i).coords()[c]))
                        .sum();
                    s.to_i64().ok_or(Error::Overflow("renormalized cocycle"))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok(GroupElement::new(coords))
        })
        .collect()
}

/// Whether `A^T phi = phi` exactly.
pub fn check_periodic_type(a: &IntegerMatrix, phi: &SkewCocycle) -> bool {
    transpose_apply(a, phi).is_ok_and(|v| v == phi.values)
}

/// `(A^T)^n phi`.
pub fn renormalized_phi(a: &IntegerMatrix, phi: &SkewCocycle, n: u32) -> Result<SkewCocycle> {
    let mut cur = phi.clone();
    for _ in 0..n {
        cur = SkewCocycle::unchecked(transpose_apply(a, &cur)?)?;
    }
    Ok(cur)
}

/// `sum_{l < q_j} phi_{w_j[l]}`: the cocycle summed up tower `j`.
pub fn birkhoff_sum_at_return(tower: &TowerSystem, phi: &SkewCocycle, j: usize) -> Result<GroupElement> {
    if j >= tower.d() {
        return Err(Error::InvalidTower(format!("no tower {}", j + 1)));
    }
    if phi.d() != tower.d() {
        return Err(Error::DimensionMismatch {
            expected: tower.d(),
            found: phi.d(),
        });
    }
    tower.word(j).iter().try_fold(GroupElement::zero(phi.m()), |acc, &i| {
        acc.checked_add(phi.value(i))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iet::{compose_loop, IetCombinatorics, Move, RauzyLoop};

    fn d3_loop() -> RauzyLoop {
        let c = IetCombinatorics::new(vec![0, 1, 2], vec![2, 1, 0]).unwrap();
        let steps = "tbtbtb".chars().map(|x| Move::from_letter(x).unwrap()).collect();
        RauzyLoop::new(c, steps).unwrap()
    }

    #[test]
    fn identity_has_full_kernel() {
        let e = eigencocycles(&IntegerMatrix::identity(3)).unwrap();
        assert_eq!(e.m, 3);
        assert_eq!(e.basis, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn no_unit_eigenvalue() {
        // det(A - I) = (2-1)(1-1) - 1 = -1 != 0
        let a = IntegerMatrix::from_rows(&[[2, 1], [1, 1]]).unwrap();
        assert_eq!(eigencocycles(&a).unwrap().m, 0);
    }

    #[test]
    fn loop_eigencocycle_is_fixed() {
        let a = d3_loop().matrix();
        let e = eigencocycles(&a).unwrap();
        assert_eq!(e.m, 1);
        let phi = e.cocycle().unwrap();
        assert!(phi.generates());
        assert!(check_periodic_type(&a, &phi));
        assert!(!check_periodic_type(&a, &phi.perturbed(0, 0, 1)));
        for n in 0..4 {
            assert_eq!(renormalized_phi(&a, &phi, n).unwrap(), phi);
        }
    }

    #[test]
    fn zero_cocycle_is_rejected_but_fixed() {
        let zero = SkewCocycle::unchecked(vec![GroupElement::zero(1); 3]).unwrap();
        assert!(check_periodic_type(&d3_loop().matrix(), &zero));
        assert!(SkewCocycle::new(vec![GroupElement::zero(1); 3]).is_err());
    }

    #[test]
    fn birkhoff_sums_are_renormalized_values() {
        let lp = d3_loop();
        let towers = compose_loop(&lp, 1).unwrap();
        let phi = SkewCocycle::from_rows(&[[1, 0], [0, 1], [2, -3]]).unwrap();
        let next = renormalized_phi(&lp.matrix(), &phi, 1).unwrap();
        for j in 0..3 {
            // independent oracle: occurrence counts times values
            let mut expect = vec![0i64; 2];
            for i in 0..3 {
                let count = towers.word(j).iter().filter(|&&x| x == i).count() as i64;
                for c in 0..2 {
                    expect[c] += count * phi.value(i).coords()[c];
                }
            }
            let s = birkhoff_sum_at_return(&towers, &phi, j).unwrap();
            assert_eq!(s.coords(), expect.as_slice());
            assert_eq!(&s, next.value(j));
        }
        let one = TowerSystem::identity(3);
        assert_eq!(birkhoff_sum_at_return(&one, &phi, 2).unwrap(), phi.value(2).clone());
    }

    #[test]
    fn renormalization_composes() {
        let a = d3_loop().matrix();
        let phi = SkewCocycle::from_rows(&[[1], [0], [0]]).unwrap();
        let two = renormalized_phi(&a, &phi, 2).unwrap();
        let one = renormalized_phi(&a, &phi, 1).unwrap();
        assert_eq!(renormalized_phi(&a, &one, 1).unwrap(), two);
    }
}
