//! Pointwise algebra of Hermitian endomorphisms.
//!
//! Conventions: a Hermitian metric `H` is the Gram matrix of the fixed frame,
//! `H(u, v) = v* H u`. The `H`-adjoint of an endomorphism is
//! `A^{*H} = H⁻¹ A* H`, and the pairing on `End(E)` is the `H`-weighted
//! Frobenius product
//!
//! ```text
//! ⟨A, B⟩_H = tr(A · H⁻¹ B* H),     |A|_H = ‖H^{1/2} A H^{-1/2}‖_F.
//! ```
//!
//! With `H = Id` both collapse to the plain Frobenius product and norm.

mod eigen;
mod mat;

pub use eigen::{eigh, HermEigen};
pub use mat::{Mat, C64, MAX_RANK};

use crate::error::{HeError, Result};

/// Smallest admissible ratio `λ_min / λ_max` for logarithms and inverses.
/// Deliberately loose: solutions at small ε legitimately reach
/// `|log h| ≈ 40`, and the link-log scheme never inverts `h` directly.
pub const CONDITION_FLOOR: f64 = 1e-100;

/// Below this eigenvalue gap `Θ` switches to its Taylor series.
pub const THETA_SERIES_GAP: f64 = 1e-6;

fn check_pd(e: &HermEigen) -> Result<()> {
    let (lo, hi) = (e.min(), e.max());
    if !(lo > 0.0) || lo < CONDITION_FLOOR * hi || !hi.is_finite() {
        return Err(HeError::Conditioning {
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        });
    }
    Ok(())
}

/// Hermitian logarithm of a positive-definite matrix.
pub fn herm_log(p: &Mat) -> Result<Mat> {
    let e = eigh(p);
    check_pd(&e)?;
    Ok(e.map(f64::ln))
}

/// Exponential of a Hermitian matrix.
pub fn herm_exp(a: &Mat) -> Mat {
    eigh(a).map(f64::exp)
}

pub fn herm_sqrt(p: &Mat) -> Result<Mat> {
    let e = eigh(p);
    check_pd(&e)?;
    Ok(e.map(f64::sqrt))
}

/// `P^s` for positive-definite `P`.
pub fn herm_pow(p: &Mat, s: f64) -> Result<Mat> {
    let e = eigh(p);
    check_pd(&e)?;
    Ok(e.map(|x| x.powf(s)))
}

/// Everything the flow needs from one eigendecomposition of a
/// positive-definite matrix.
#[derive(Debug, Clone, Copy)]
pub struct PdFactors {
    pub sqrt: Mat,
    pub inv_sqrt: Mat,
    pub inv: Mat,
    pub log: Mat,
    pub det: f64,
}

impl PdFactors {
    pub fn new(p: &Mat) -> Result<Self> {
        let e = eigh(p);
        check_pd(&e)?;
        Ok(Self {
            sqrt: e.map(f64::sqrt),
            inv_sqrt: e.map(|x| 1.0 / x.sqrt()),
            inv: e.map(|x| 1.0 / x),
            log: e.map(f64::ln),
            det: e.values().iter().product(),
        })
    }
}

/// `Θ(x, y) = (e^{y−x} − 1)/(y − x)`, with `Θ(x, x) = 1`.
#[inline]
pub fn theta(x: f64, y: f64) -> f64 {
    let t = y - x;
    if t.abs() < THETA_SERIES_GAP {
        1.0 + t * (0.5 + t * (1.0 / 6.0 + t / 24.0))
    } else {
        t.exp_m1() / t
    }
}

/// Scale the `(a, b)` entry of `a` in the eigenbasis of `logh` by
/// `Θ(λ_a, λ_b)`.
///
/// This is the derivative of the exponential map in disguise:
/// `h⁻¹ d(h) = Θ[log h](d log h)` for `h = exp(log h)`.
pub fn theta_transform(logh: &Mat, a: &Mat) -> Mat {
    let e = eigh(logh);
    let mut t = e.to_eigenbasis(a);
    let r = a.rank();
    for i in 0..r {
        for j in 0..r {
            t[(i, j)] *= theta(e.values[i], e.values[j]);
        }
    }
    e.from_eigenbasis(&t)
}

/// Donaldson distance `tr(h̃ + h̃⁻¹) − 2r` with `h̃ = H⁻¹ H̃`, evaluated as
/// `Σ (√μ − 1/√μ)²` over the eigenvalues `μ` of `h̃`.
pub fn sigma(h: &Mat, ht: &Mat) -> Result<f64> {
    if h.rank() != ht.rank() {
        return Err(HeError::Shape(format!("ranks {} and {}", h.rank(), ht.rank())));
    }
    let f = PdFactors::new(h)?;
    let e = eigh(&(f.inv_sqrt * *ht * f.inv_sqrt));
    check_pd(&e)?;
    Ok(e.values()
        .iter()
        .map(|&m| {
            let s = m.sqrt();
            (s - 1.0 / s).powi(2)
        })
        .sum())
}

/// `A − (tr A / r) Id`.
pub fn traceless_part(a: &Mat) -> Mat {
    let r = a.rank();
    let mut out = *a;
    let shift = a.trace() / r as f64;
    for i in 0..r {
        out[(i, i)] -= shift;
    }
    out
}

/// `H`-adjoint `H⁻¹ A* H`.
pub fn h_adjoint(a: &Mat, h: &Mat) -> Result<Mat> {
    Ok(h.inverse()? * a.adjoint() * *h)
}

/// Project onto `H`-self-adjoint endomorphisms: `(A + A^{*H})/2`.
pub fn h_hermitize(a: &Mat, h: &Mat, h_inv: &Mat) -> Mat {
    (*a + *h_inv * a.adjoint() * *h) * 0.5
}

/// `⟨A, B⟩_H = tr(A H⁻¹ B* H)`.
pub fn inner(a: &Mat, b: &Mat, h: &Mat) -> Result<C64> {
    Ok((*a * h.inverse()? * b.adjoint() * *h).trace())
}

/// `|A|_H = ‖H^{1/2} A H^{-1/2}‖_F`.
pub fn norm(a: &Mat, h: &Mat) -> Result<f64> {
    let f = PdFactors::new(h)?;
    Ok(norm_with(a, &f))
}

#[inline]
pub fn norm_with(a: &Mat, f: &PdFactors) -> f64 {
    (f.sqrt * *a * f.inv_sqrt).frobenius()
}

/// Matrix-valued field on the nodes of a lattice (row-major node order).
#[derive(Debug, Clone, PartialEq)]
pub struct EndoField {
    rank: usize,
    values: Vec<Mat>,
}

impl EndoField {
    pub fn new(rank: usize, values: Vec<Mat>) -> Result<Self> {
        if !(1..=MAX_RANK).contains(&rank) {
            return Err(HeError::InvalidParameter(format!("rank {rank} outside 1..={MAX_RANK}")));
        }
        if let Some(m) = values.iter().find(|m| m.rank() != rank) {
            return Err(HeError::Shape(format!("entry of rank {} in a rank-{rank} field", m.rank())));
        }
        Ok(Self { rank, values })
    }

    pub fn constant(len: usize, value: Mat) -> Self {
        Self {
            rank: value.rank(),
            values: vec![value; len],
        }
    }

    pub fn identity(len: usize, rank: usize) -> Self {
        Self::constant(len, Mat::identity(rank))
    }

    pub fn zeros(len: usize, rank: usize) -> Self {
        Self::constant(len, Mat::zeros(rank))
    }

    pub fn from_fn<F: FnMut(usize) -> Mat>(len: usize, rank: usize, f: F) -> Result<Self> {
        Self::new(rank, (0..len).map(f).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Mat] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Mat] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Mat> {
        self.values
    }

    pub fn get(&self, idx: usize) -> &Mat {
        &self.values[idx]
    }

    pub fn map<F: Fn(&Mat) -> Mat>(&self, f: F) -> Self {
        Self {
            rank: self.rank,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn trace_field(&self) -> Vec<f64> {
        self.values.iter().map(|m| m.trace().re).collect()
    }

    /// Conjugate every value by a constant unitary.
    pub fn conjugated(&self, u: &Mat) -> Self {
        self.map(|m| m.conjugate_by(u))
    }
}

impl std::ops::Index<usize> for EndoField {
    type Output = Mat;
    fn index(&self, idx: usize) -> &Mat {
        &self.values[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn log_of_identity_is_zero() {
        let l = herm_log(&Mat::identity(3)).unwrap();
        assert!(l.max_abs() < 1e-15);
    }

    #[test]
    fn log_of_diagonal() {
        let l = herm_log(&Mat::from_real_diag(&[E * E, 1.0])).unwrap();
        assert!((l - Mat::from_real_diag(&[2.0, 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn log_rejects_singular() {
        let err = herm_log(&Mat::from_real_diag(&[1.0, 1e-120])).unwrap_err();
        match err {
            HeError::Conditioning { min_eigenvalue, .. } => assert_eq!(min_eigenvalue, 1e-120),
            e => panic!("unexpected {e:?}"),
        }
        assert!(herm_log(&Mat::from_real_diag(&[1.0, -1.0])).is_err());
        assert!(herm_log(&Mat::from_real_diag(&[1.0, 0.0])).is_err());
        assert!(herm_log(&Mat::from_real_diag(&[(-30f64).exp(), 30f64.exp()])).is_ok());
    }

    #[test]
    fn theta_at_zero_is_identity() {
        let a = Mat::from_rows(&[&[C64::new(1.0, 0.0), C64::new(2.0, 1.0)], &[C64::new(0.5, 0.0), C64::new(0.0, 3.0)]]);
        let t = theta_transform(&Mat::zeros(2), &a);
        assert!((t - a).max_abs() < 1e-14);
    }

    #[test]
    fn theta_scales_upper_slot() {
        let logh = Mat::from_real_diag(&[0.0, 1.0]);
        let a = Mat::unit(2, 0, 1);
        let t = theta_transform(&logh, &a);
        assert!((t[(0, 1)].re - (E - 1.0)).abs() < 1e-12);
        assert!(t[(1, 0)].norm() < 1e-15);
        let t = theta_transform(&logh, &Mat::unit(2, 1, 0));
        assert!((t[(1, 0)].re - (1.0 - 1.0 / E)).abs() < 1e-12);
    }

    #[test]
    fn theta_series_matches_closed_form_at_the_switch() {
        let below = THETA_SERIES_GAP * 0.9999;
        let above = THETA_SERIES_GAP * 1.0001;
        assert!((theta(0.0, below) - below.exp_m1() / below).abs() < 1e-14);
        let jump = theta(0.0, above) - theta(0.0, below);
        assert!((jump - 0.5 * (above - below)).abs() < 1e-14);
        assert_eq!(theta(0.3, 0.3), 1.0);
    }

    #[test]
    fn sigma_examples() {
        let h = Mat::identity(2);
        assert_eq!(sigma(&h, &h).unwrap(), 0.0);
        let ht = Mat::from_real_diag(&[E, 1.0 / E]);
        let s = sigma(&h, &ht).unwrap();
        assert!((s - (2.0 * (E + 1.0 / E) - 4.0)).abs() < 1e-12);
        assert!((s - 2.1724).abs() < 1e-4);
    }

    #[test]
    fn traceless_examples() {
        assert!(traceless_part(&Mat::identity(3)).max_abs() < 1e-16);
        let d = Mat::from_real_diag(&[1.0, -1.0]);
        assert_eq!(traceless_part(&d), d);
    }

    #[test]
    fn norm_with_identity_is_frobenius() {
        let a = Mat::from_rows(&[&[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], &[C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]]);
        assert!((norm(&a, &Mat::identity(2)).unwrap() - a.frobenius()).abs() < 1e-14);
        assert!((inner(&a, &a, &Mat::identity(2)).unwrap().re - a.frobenius_sq()).abs() < 1e-13);
    }

    #[test]
    fn weighted_norm_matches_inner() {
        let h = Mat::from_rows(&[&[C64::new(2.0, 0.0), C64::new(0.3, 0.4)], &[C64::new(0.3, -0.4), C64::new(1.0, 0.0)]]);
        let a = Mat::from_rows(&[&[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], &[C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]]);
        let n = norm(&a, &h).unwrap();
        let ip = inner(&a, &a, &h).unwrap();
        assert!(ip.im.abs() < 1e-12);
        assert!((n * n - ip.re).abs() < 1e-12);
    }
}
