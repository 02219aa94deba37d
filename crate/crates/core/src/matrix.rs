//! Small dense matrices over a cyclotomic field.

#![allow(clippy::needless_range_loop)]

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycElt;
use crate::error::{Error, Result};

/// A 3×3 matrix over `Q(ζ_N)`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat3 {
    pub rows: [[CycElt; 3]; 3],
}

impl Mat3 {
    pub fn from_fn(f: impl Fn(usize, usize) -> CycElt) -> Self {
        Mat3 { rows: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn zero(modulus: u32) -> Self {
        Self::from_fn(|_, _| CycElt::zero(modulus))
    }

    pub fn identity(modulus: u32) -> Self {
        Self::from_fn(|i, j| if i == j { CycElt::one(modulus) } else { CycElt::zero(modulus) })
    }

    pub fn diag(d: [CycElt; 3]) -> Self {
        let m = d[0].modulus();
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { CycElt::zero(m) })
    }

    pub fn modulus(&self) -> u32 {
        self.rows[0][0].modulus()
    }

    pub fn get(&self, i: usize, j: usize) -> &CycElt {
        &self.rows[i][j]
    }

    pub fn map(&self, f: impl Fn(&CycElt) -> CycElt) -> Self {
        Self::from_fn(|i, j| f(&self.rows[i][j]))
    }

    pub fn scale(&self, c: &CycElt) -> Self {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.rows[j][i].clone())
    }

    /// Entry-wise complex conjugation followed by transposition.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(|i, j| self.rows[j][i].conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.conj_transpose() == *self
    }

    pub fn trace(&self) -> CycElt {
        &(&self.rows[0][0] + &self.rows[1][1]) + &self.rows[2][2]
    }

    fn minor2(&self, r: [usize; 2], c: [usize; 2]) -> CycElt {
        &(&self.rows[r[0]][c[0]] * &self.rows[r[1]][c[1]]) - &(&self.rows[r[0]][c[1]] * &self.rows[r[1]][c[0]])
    }

    pub fn det(&self) -> CycElt {
        let m = &self.rows;
        let a = &m[0][0] * &self.minor2([1, 2], [1, 2]);
        let b = &m[0][1] * &self.minor2([1, 2], [0, 2]);
        let c = &m[0][2] * &self.minor2([1, 2], [0, 1]);
        &(&a - &b) + &c
    }

    /// Sum of the three principal 2×2 minors.
    pub fn principal_minor_sum(&self) -> CycElt {
        &(&self.minor2([0, 1], [0, 1]) + &self.minor2([0, 2], [0, 2])) + &self.minor2([1, 2], [1, 2])
    }

    pub fn leading_minors(&self) -> [CycElt; 3] {
        [self.rows[0][0].clone(), self.minor2([0, 1], [0, 1]), self.det()]
    }

    pub fn adjugate(&self) -> Self {
        let others = |k: usize| -> [usize; 2] {
            match k {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            }
        };
        Self::from_fn(|i, j| {
            let cof = self.minor2(others(j), others(i));
            if (i + j) % 2 == 0 {
                cof
            } else {
                -&cof
            }
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(self.adjugate().scale(&d.inv()?))
    }

    pub fn apply(&self, v: &[CycElt; 3]) -> [CycElt; 3] {
        std::array::from_fn(|i| &(&(&self.rows[i][0] * &v[0]) + &(&self.rows[i][1] * &v[1])) + &(&self.rows[i][2] * &v[2]))
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.rows {
            writeln!(f, "  [{}, {}, {}]", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

impl Mul for &Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            &(&(&self.rows[i][0] * &rhs.rows[0][j]) + &(&self.rows[i][1] * &rhs.rows[1][j])) + &(&self.rows[i][2] * &rhs.rows[2][j])
        })
    }
}

impl Add for &Mat3 {
    type Output = Mat3;
    fn add(self, rhs: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| &self.rows[i][j] + &rhs.rows[i][j])
    }
}

impl Sub for &Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| &self.rows[i][j] - &rhs.rows[i][j])
    }
}

/// Determinant of a square matrix by Gaussian elimination
/// over the field (pivots are inverted exactly).
pub fn det(mut m: Vec<Vec<CycElt>>) -> CycElt {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    let modulus = m[0][0].modulus();
    let mut acc = CycElt::one(modulus);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return CycElt::zero(modulus);
        };
        if piv != col {
            m.swap(piv, col);
            acc = -&acc;
        }
        let p = m[col][col].clone();
        acc = &acc * &p;
        let pinv = p.inv().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &pinv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] = &m[r][c] - &t;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{lambda, zeta};

    fn z(k: i64) -> CycElt {
        CycElt::zeta_pow(7, k)
    }

    #[test]
    fn det_agrees_with_elimination() {
        let m = Mat3::from_fn(|i, j| &z((i * 3 + j) as i64) + &CycElt::from_int(7, (i as i64 - j as i64) * 2));
        let rows: Vec<Vec<CycElt>> = m.rows.iter().map(|r| r.to_vec()).collect();
        assert_eq!(m.det(), det(rows));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat3::from_fn(|i, j| if i == j { lambda() } else { z((i + 2 * j) as i64) });
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat3::identity(7));
        assert_eq!(Mat3::zero(7).inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn trace_and_minors() {
        let m = Mat3::diag([zeta(), z(2), z(4)]);
        assert_eq!(m.trace(), lambda());
        assert!(m.det().is_one());
        assert_eq!(m.leading_minors()[1], z(3));
    }
}
