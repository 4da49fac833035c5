//! Discretized base domains.
//!
//! Every domain is a doubly periodic `n × n` lattice with spacing `side / n`
//! carrying a conformally flat Kähler form `ω = λ · (i/2) dz ∧ dz̄`. The
//! contraction `Λ` is then pointwise division by `λ` and the volume form is
//! `λ dx dy`. Punctured domains are the same lattice with a disk of nodes
//! switched off; nodes next to the hole become Dirichlet boundary nodes.

use std::ops::{Add, Mul, Sub};

use crate::error::{HeError, Result};

/// Smallest supported lattice size; the 5-point and centered stencils need
/// at least this many points per side to be meaningful.
pub const MIN_POINTS: usize = 8;

/// A lattice node index together with its four nearest neighbours.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub center: usize,
    pub xp: usize,
    pub xm: usize,
    pub yp: usize,
    pub ym: usize,
}

/// Discretized base manifold.
#[derive(Debug, Clone)]
pub struct GridDomain {
    n: usize,
    side: f64,
    spacing: f64,
    lambda: Vec<f64>,
    active: Vec<bool>,
    interior: Vec<bool>,
    boundary: Vec<bool>,
    quad: Vec<f64>,
}

/// Flat torus `[0, side)²` with `n` nodes per side, `λ ≡ 1` and no boundary.
pub fn build_flat_torus(n: usize, side_length: f64) -> Result<GridDomain> {
    if n < MIN_POINTS {
        return Err(HeError::InvalidDomain(format!(
            "need at least {MIN_POINTS} points per side, got {n}"
        )));
    }
    if !(side_length > 0.0 && side_length.is_finite()) {
        return Err(HeError::InvalidDomain(format!(
            "side length must be positive, got {side_length}"
        )));
    }
    let len = n * n;
    let spacing = side_length / n as f64;
    Ok(GridDomain {
        n,
        side: side_length,
        spacing,
        lambda: vec![1.0; len],
        active: vec![true; len],
        interior: vec![true; len],
        boundary: vec![false; len],
        quad: vec![spacing * spacing; len],
    })
}

impl GridDomain {
    /// Replace the conformal factor by `f(x, y)`; quadrature weights follow.
    pub fn with_conformal_factor<F: Fn(f64, f64) -> f64>(mut self, f: F) -> Result<Self> {
        let h2 = self.spacing * self.spacing;
        for idx in 0..self.len() {
            let (x, y) = self.position(idx);
            let l = f(x, y);
            if !(l > 0.0 && l.is_finite()) {
                return Err(HeError::InvalidDomain(format!(
                    "conformal factor must be positive, got {l} at ({x}, {y})"
                )));
            }
            self.lambda[idx] = l;
            self.quad[idx] = if self.active[idx] { l * h2 } else { 0.0 };
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of lattice nodes, active or not.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    /// Physical position `(x, y)` of a node.
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(idx);
        (ix as f64 * self.spacing, iy as f64 * self.spacing)
    }

    #[inline]
    pub fn stencil(&self, idx: usize) -> Stencil {
        let n = self.n;
        let (ix, iy) = self.coords(idx);
        Stencil {
            center: idx,
            xp: self.index((ix + 1) % n, iy),
            xm: self.index((ix + n - 1) % n, iy),
            yp: self.index(ix, (iy + 1) % n),
            ym: self.index(ix, (iy + n - 1) % n),
        }
    }

    #[inline]
    pub fn lambda(&self, idx: usize) -> f64 {
        self.lambda[idx]
    }

    pub fn conformal_factor(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_min(&self) -> f64 {
        self.active_indices()
            .map(|i| self.lambda[i])
            .fold(f64::INFINITY, f64::min)
    }

    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    #[inline]
    pub fn is_interior(&self, idx: usize) -> bool {
        self.interior[idx]
    }

    #[inline]
    pub fn is_boundary(&self, idx: usize) -> bool {
        self.boundary[idx]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.active[i])
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.interior[i])
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    /// Total volume `Σ λ · spacing²` over active nodes.
    pub fn volume(&self) -> f64 {
        self.quad.iter().sum()
    }

    /// `Σ f · w` over active nodes, summed in index order.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.len(), "field length does not match domain");
        self.active_indices().map(|i| f[i] * self.quad[i]).sum()
    }

    /// Metric Laplacian `Δ_g = λ⁻¹ (∂²ₓ + ∂²ᵧ)` with the 5-point stencil.
    ///
    /// Acts entrywise on matrix fields. Only interior nodes carry a value;
    /// boundary and excised nodes are set to `0 · f`.
    pub fn laplacian<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        assert_eq!(f.len(), self.len(), "field length does not match domain");
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        (0..self.len())
            .map(|i| {
                if !self.interior[i] {
                    return f[i] * 0.0;
                }
                let s = self.stencil(i);
                let c = f[i];
                let sum = (f[s.xp] - c) + (f[s.xm] - c) + (f[s.yp] - c) + (f[s.ym] - c);
                sum * (inv_h2 / self.lambda[i])
            })
            .collect()
    }

    /// Centered first derivatives `(∂ₓf, ∂ᵧf)` at an interior node.
    #[inline]
    pub fn centered<T>(&self, f: &[T], idx: usize) -> (T, T)
    where
        T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let s = self.stencil(idx);
        let k = 0.5 / self.spacing;
        ((f[s.xp] - f[s.xm]) * k, (f[s.yp] - f[s.ym]) * k)
    }

    /// Minimum-image distance between two nodes on the periodic lattice.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let wrap = |d: usize| -> f64 {
            let d = d.min(self.n - d);
            d as f64 * self.spacing
        };
        let dx = wrap(ax.abs_diff(bx));
        let dy = wrap(ay.abs_diff(by));
        (dx * dx + dy * dy).sqrt()
    }

    /// Copy of this domain with the nodes in `excised` switched off. Active
    /// nodes with an excised neighbour become boundary nodes.
    fn excise(&self, excised: &[bool]) -> GridDomain {
        let mut out = self.clone();
        for i in 0..self.len() {
            out.active[i] = self.active[i] && !excised[i];
        }
        for i in 0..self.len() {
            if !out.active[i] {
                out.interior[i] = false;
                out.boundary[i] = false;
                out.quad[i] = 0.0;
                continue;
            }
            let s = self.stencil(i);
            let rim = [s.xp, s.xm, s.yp, s.ym].iter().any(|&j| !out.active[j]);
            out.boundary[i] = rim || self.boundary[i];
            out.interior[i] = !out.boundary[i];
        }
        out
    }
}

/// Nested domains `M₀ ⊂ M₁ ⊂ …` obtained by removing shrinking disks around
/// one lattice node.
#[derive(Debug, Clone)]
pub struct ExhaustionSequence {
    base: GridDomain,
    center: (usize, usize),
    radii: Vec<f64>,
    stages: Vec<GridDomain>,
}

/// Periodic square with a single puncture at the centre node, exhausted by
/// the complements of disks of the given radii.
pub fn build_punctured_square(n: usize, side_length: f64, radii: &[f64]) -> Result<ExhaustionSequence> {
    let base = build_flat_torus(n, side_length)?;
    ExhaustionSequence::new(base, (n / 2, n / 2), radii)
}

impl ExhaustionSequence {
    pub fn new(base: GridDomain, center: (usize, usize), radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(HeError::InvalidDomain("need at least one radius".into()));
        }
        let h = base.spacing();
        for w in radii.windows(2) {
            if !(w[1] < w[0]) {
                return Err(HeError::InvalidDomain(format!(
                    "radii must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
            if w[0] - w[1] < h {
                return Err(HeError::InvalidDomain(format!(
                    "radii {} and {} are less than one lattice ring ({h}) apart",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&r) = radii.iter().find(|&&r| !(r <= base.side() / 4.0 * (1.0 + 1e-12))) {
            return Err(HeError::InvalidDomain(format!(
                "radius {r} must not exceed side/4 = {}",
                base.side() / 4.0
            )));
        }
        let smallest = *radii.last().unwrap();
        if smallest < 2.0 * h {
            return Err(HeError::InvalidDomain(format!(
                "smallest radius {smallest} is below two lattice spacings ({})",
                2.0 * h
            )));
        }
        if center.0 >= base.n() || center.1 >= base.n() {
            return Err(HeError::InvalidDomain("excision centre outside the lattice".into()));
        }
        let c = base.index(center.0, center.1);
        let stages: Vec<GridDomain> = radii
            .iter()
            .map(|&r| {
                let excised: Vec<bool> = (0..base.len()).map(|i| base.distance(i, c) < r).collect();
                base.excise(&excised)
            })
            .collect();
        for (j, w) in stages.windows(2).enumerate() {
            if w[0].active_count() >= w[1].active_count() {
                return Err(HeError::InvalidDomain(format!(
                    "stages {j} and {} activate the same nodes",
                    j + 1
                )));
            }
        }
        Ok(Self {
            base,
            center,
            radii: radii.to_vec(),
            stages,
        })
    }

    /// Single-stage sequence on a closed domain.
    pub fn trivial(base: GridDomain) -> Self {
        Self {
            stages: vec![base.clone()],
            base,
            center: (0, 0),
            radii: Vec::new(),
        }
    }

    pub fn base(&self) -> &GridDomain {
        &self.base
    }

    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Domain `M_j`.
    pub fn stage(&self, j: usize) -> &GridDomain {
        &self.stages[j]
    }

    pub fn stages(&self) -> &[GridDomain] {
        &self.stages
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torus_volume() {
        let d = build_flat_torus(64, 1.0).unwrap();
        assert!((d.volume() - 1.0).abs() < 1e-12);
        let d = build_flat_torus(8, 2.0).unwrap();
        assert!((d.volume() - 4.0).abs() < 1e-12);
        assert!(!d.has_boundary());
        assert!(d.interior_mask().iter().all(|&b| b));
    }

    #[test]
    fn torus_rejects_small_lattice() {
        assert!(matches!(build_flat_torus(7, 1.0), Err(HeError::InvalidDomain(_))));
        assert!(build_flat_torus(16, 0.0).is_err());
    }

    #[test]
    fn laplacian_annihilates_constants() {
        let d = build_flat_torus(16, 1.0).unwrap();
        let f = vec![3.5; d.len()];
        assert!(d.laplacian(&f).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn plane_wave_integrates_to_zero() {
        let d = build_flat_torus(32, 1.0).unwrap();
        let f: Vec<f64> = (0..d.len()).map(|i| (2.0 * PI * d.position(i).0).cos()).collect();
        assert!(d.integrate(&f).abs() < 1e-12);
    }

    #[test]
    fn punctured_masks_nest() {
        let ex = build_punctured_square(64, 1.0, &[0.25, 0.125, 0.0625]).unwrap();
        assert_eq!(ex.len(), 3);
        let counts: Vec<usize> = ex.stages().iter().map(|s| s.active_count()).collect();
        assert!(counts[0] < counts[1] && counts[1] < counts[2]);
        for w in ex.stages().windows(2) {
            for i in 0..w[0].len() {
                if w[0].is_active(i) {
                    assert!(w[1].is_active(i));
                }
            }
        }
    }

    #[test]
    fn punctured_rejects_bad_radii() {
        assert!(build_punctured_square(64, 1.0, &[0.1, 0.2]).is_err());
        assert!(build_punctured_square(64, 1.0, &[0.3]).is_err());
        assert!(build_punctured_square(64, 1.0, &[0.02]).is_err());
        assert!(build_punctured_square(64, 1.0, &[0.1, 0.095]).is_err());
    }

    #[test]
    fn rim_is_exactly_the_neighbours_of_the_hole() {
        let ex = build_punctured_square(32, 1.0, &[0.2]).unwrap();
        let d = ex.stage(0);
        for i in 0..d.len() {
            if !d.is_active(i) {
                assert!(!d.is_boundary(i) && !d.is_interior(i));
                continue;
            }
            let s = d.stencil(i);
            let touches = [s.xp, s.xm, s.yp, s.ym].iter().any(|&j| !d.is_active(j));
            assert_eq!(d.is_boundary(i), touches);
            assert_eq!(d.is_interior(i), !touches);
        }
    }

    #[test]
    fn conformal_factor_scales_volume() {
        let d = build_flat_torus(16, 1.0)
            .unwrap()
            .with_conformal_factor(|_, _| 2.5)
            .unwrap();
        assert!((d.volume() - 2.5).abs() < 1e-12);
        assert!(build_flat_torus(16, 1.0).unwrap().with_conformal_factor(|_, _| -1.0).is_err());
    }
}
