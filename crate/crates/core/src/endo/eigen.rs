//! Hermitian eigendecomposition for small matrices (cyclic complex Jacobi).

use super::mat::{Mat, C64, MAX_RANK};

const MAX_SWEEPS: usize = 50;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors in
/// the columns of `vectors`.
#[derive(Debug, Clone, Copy)]
pub struct HermEigen {
    pub values: [f64; MAX_RANK],
    pub vectors: Mat,
}

impl HermEigen {
    pub fn rank(&self) -> usize {
        self.vectors.rank()
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.rank()]
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.rank() - 1]
    }

    /// `V · diag(f(λ)) · V*`, re-symmetrized.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Mat {
        let r = self.rank();
        let v = &self.vectors;
        let mut out = Mat::zeros(r);
        for k in 0..r {
            let fk = f(self.values[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..r {
                let vik = v[(i, k)] * fk;
                for j in 0..r {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out.hermitian_part()
    }

    /// Express `a` in the eigenbasis: `V* a V`.
    pub fn to_eigenbasis(&self, a: &Mat) -> Mat {
        self.vectors.adjoint() * *a * self.vectors
    }

    /// Inverse of [`to_eigenbasis`](Self::to_eigenbasis).
    pub fn from_eigenbasis(&self, a: &Mat) -> Mat {
        self.vectors * *a * self.vectors.adjoint()
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
pub fn eigh(a: &Mat) -> HermEigen {
    let r = a.rank();
    let mut m = a.hermitian_part();
    let mut v = Mat::identity(r);
    if r == 1 {
        let mut values = [0.0; MAX_RANK];
        values[0] = m[(0, 0)].re;
        return HermEigen { values, vectors: v };
    }

    if r == 2 {
        return eigh2(&m);
    }

    let scale = m.frobenius_sq();
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..r {
            for q in p + 1..r {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off <= 1e-34 * scale || off == 0.0 {
            break;
        }
        for p in 0..r {
            for q in p + 1..r {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order[..r].sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let mut values = [0.0; MAX_RANK];
    let mut vectors = Mat::zeros(r);
    for (k, &src) in order[..r].iter().enumerate() {
        values[k] = m[(src, src)].re;
        for i in 0..r {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    HermEigen { values, vectors }
}

/// Closed form for `2 × 2`. The eigenvalue of larger modulus comes from the
/// trace, the other from the determinant, so diagonal input is exact.
fn eigh2(m: &Mat) -> HermEigen {
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let bn = b.norm();
    let mut values = [0.0; MAX_RANK];
    let mut vectors = Mat::zeros(2);
    if bn == 0.0 {
        let (lo, hi) = if a <= d { (0, 1) } else { (1, 0) };
        values[0] = a.min(d);
        values[1] = a.max(d);
        vectors[(lo, 0)] = C64::new(1.0, 0.0);
        vectors[(hi, 1)] = C64::new(1.0, 0.0);
        return HermEigen { values, vectors };
    }
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let delta = half.hypot(bn);
    let det = a * d - bn * bn;
    let (lo, hi) = if mean > 0.0 {
        let hi = mean + delta;
        (det / hi, hi)
    } else if mean < 0.0 {
        let lo = mean - delta;
        (lo, det / lo)
    } else {
        (-delta, delta)
    };
    // Eigenvector of `hi`, from whichever row avoids cancellation.
    let (v0, v1) = if half >= 0.0 {
        (C64::new(delta + half, 0.0), b.conj())
    } else {
        (b, C64::new(delta - half, 0.0))
    };
    let nrm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    let (v0, v1) = (v0 / nrm, v1 / nrm);
    values[0] = lo;
    values[1] = hi;
    vectors[(0, 1)] = v0;
    vectors[(1, 1)] = v1;
    vectors[(0, 0)] = -v1.conj();
    vectors[(1, 0)] = v0.conj();
    HermEigen { values, vectors }
}

/// One Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
#[inline]
fn rotate(m: &mut Mat, v: &mut Mat, p: usize, q: usize) {
    let b = m[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let r = m.rank();
    let phase = b / mag;
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let tau = (beta - alpha) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J restricted to (p, q) is [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
    let pc = phase.conj();
    let jqp = pc * (-s);
    let jqq = pc * c;

    // m ← m J
    for k in 0..r {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * jqp;
        m[(k, q)] = mkp * s + mkq * jqq;
    }
    // m ← J* m
    for k in 0..r {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * jqp.conj();
        m[(q, k)] = mpk * s + mqk * jqq.conj();
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(alpha - t * mag, 0.0);
    m[(q, q)] = C64::new(beta + t * mag, 0.0);

    for k in 0..r {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * s + vkq * jqq;
    }
}
