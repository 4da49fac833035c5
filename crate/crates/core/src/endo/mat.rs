use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{HeError, Result};

pub type C64 = Complex64;

/// Largest supported bundle rank.
pub const MAX_RANK: usize = 4;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex `r × r` matrix with `r ≤ 4`, stored inline.
///
/// Endomorphisms of the bundle are written in the fixed frame, which is
/// unitary for the background metric `K`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat {
    r: usize,
    a: [[C64; MAX_RANK]; MAX_RANK],
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.r).map(|i| self.a[i][..self.r].to_vec()).collect();
        f.debug_struct("Mat").field("r", &self.r).field("rows", &rows).finish()
    }
}

impl Mat {
    pub fn zeros(r: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&r), "rank {r} outside 1..={MAX_RANK}");
        Self {
            r,
            a: [[ZERO; MAX_RANK]; MAX_RANK],
        }
    }

    pub fn identity(r: usize) -> Self {
        let mut m = Self::zeros(r);
        for i in 0..r {
            m.a[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i][i] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let mut m = Self::zeros(r);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), r, "ragged matrix rows");
            m.a[i][..r].copy_from_slice(row);
        }
        m
    }

    /// Elementary matrix with a single 1 at `(i, j)`.
    pub fn unit(r: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(r);
        m.a[i][j] = ONE;
        m
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn trace(&self) -> C64 {
        (0..self.r).map(|i| self.a[i][i]).sum()
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.r);
        for i in 0..self.r {
            for j in 0..self.r {
                m.a[i][j] = self.a[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for i in 0..self.r {
            for j in 0..self.r {
                m.a[i][j] *= s;
            }
        }
        m
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.r {
            for j in 0..self.r {
                s += self.a[i][j].norm_sqr();
            }
        }
        s
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.r {
            for j in 0..self.r {
                m = m.max(self.a[i][j].norm());
            }
        }
        m
    }

    #[inline]
    pub fn commutator(&self, other: &Mat) -> Mat {
        *self * *other - *other * *self
    }

    /// `(A + A*)/2`.
    #[inline]
    pub fn hermitian_part(&self) -> Mat {
        (*self + self.adjoint()) * 0.5
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        (0..self.r).all(|i| (0..self.r).all(|j| self.a[i][j].re.is_finite() && self.a[i][j].im.is_finite()))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let r = self.r;
        let mut a = self.a;
        let mut det = ONE;
        for k in 0..r {
            let p = (k..r)
                .max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap())
                .unwrap();
            if a[p][k] == ZERO {
                return ZERO;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in k + 1..r {
                let f = a[i][k] / a[k][k];
                for j in k..r {
                    let t = a[k][j];
                    a[i][j] -= f * t;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Mat> {
        let r = self.r;
        let mut a = self.a;
        let mut inv = Mat::identity(r).a;
        let scale = self.max_abs();
        for k in 0..r {
            let p = (k..r)
                .max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap())
                .unwrap();
            if a[p][k].norm() <= f64::MIN_POSITIVE.max(1e-60 * scale) {
                return Err(HeError::Conditioning {
                    min_eigenvalue: a[p][k].norm(),
                    max_eigenvalue: scale,
                });
            }
            a.swap(p, k);
            inv.swap(p, k);
            let d = ONE / a[k][k];
            for j in 0..r {
                a[k][j] *= d;
                inv[k][j] *= d;
            }
            for i in 0..r {
                if i != k {
                    let f = a[i][k];
                    if f != ZERO {
                        for j in 0..r {
                            let (akj, ikj) = (a[k][j], inv[k][j]);
                            a[i][j] -= f * akj;
                            inv[i][j] -= f * ikj;
                        }
                    }
                }
            }
        }
        Ok(Mat { r, a: inv })
    }

    /// Rotate the frame: `U A U*`.
    pub fn conjugate_by(&self, u: &Mat) -> Mat {
        *u * *self * u.adjoint()
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.r && j < self.r);
        &self.a[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.r && j < self.r);
        &mut self.a[i][j]
    }
}

impl Add for Mat {
    type Output = Mat;
    #[inline]
    fn add(mut self, rhs: Mat) -> Mat {
        self += rhs;
        self
    }
}

impl AddAssign for Mat {
    #[inline]
    fn add_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.r, rhs.r);
        for i in 0..self.r {
            for j in 0..self.r {
                self.a[i][j] += rhs.a[i][j];
            }
        }
    }
}

impl Sub for Mat {
    type Output = Mat;
    #[inline]
    fn sub(mut self, rhs: Mat) -> Mat {
        self -= rhs;
        self
    }
}

impl SubAssign for Mat {
    #[inline]
    fn sub_assign(&mut self, rhs: Mat) {
        debug_assert_eq!(self.r, rhs.r);
        for i in 0..self.r {
            for j in 0..self.r {
                self.a[i][j] -= rhs.a[i][j];
            }
        }
    }
}

impl Neg for Mat {
    type Output = Mat;
    #[inline]
    fn neg(self) -> Mat {
        self * -1.0
    }
}

impl Mul for Mat {
    type Output = Mat;
    #[inline]
    fn mul(self, rhs: Mat) -> Mat {
        debug_assert_eq!(self.r, rhs.r);
        let r = self.r;
        let mut m = Mat::zeros(r);
        if r == 2 {
            let (a, b) = (&self.a, &rhs.a);
            m.a[0][0] = a[0][0] * b[0][0] + a[0][1] * b[1][0];
            m.a[0][1] = a[0][0] * b[0][1] + a[0][1] * b[1][1];
            m.a[1][0] = a[1][0] * b[0][0] + a[1][1] * b[1][0];
            m.a[1][1] = a[1][0] * b[0][1] + a[1][1] * b[1][1];
            return m;
        }
        for i in 0..r {
            for k in 0..r {
                let aik = self.a[i][k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..r {
                    m.a[i][j] += aik * rhs.a[k][j];
                }
            }
        }
        m
    }
}

impl Mul<f64> for Mat {
    type Output = Mat;
    #[inline]
    fn mul(mut self, s: f64) -> Mat {
        for i in 0..self.r {
            for j in 0..self.r {
                self.a[i][j] *= s;
            }
        }
        self
    }
}

impl Mul<C64> for Mat {
    type Output = Mat;
    #[inline]
    fn mul(self, s: C64) -> Mat {
        self.scale(s)
    }
}
