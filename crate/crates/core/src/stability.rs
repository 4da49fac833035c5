//! Chern-Weil degrees of sub-bundles, slope verdicts, restriction algebra and
//! the uniqueness diagnostics.
//!
//! A sub-bundle `S` of rank `s` is given by a frame field `B` whose first `s`
//! columns span `S` (remaining columns zero). With `G = B* H B` the Gram
//! matrix, the `H`-orthogonal projection is `π_H = B G⁻¹ B* H`.
//!
//! Norms of `(0,1)`-forms: `|dz̄|² = 2/λ`, so `|∂̄_E π|² = (2/λ) |c|²_H` for
//! `∂̄_E π = c dz̄`.

use crate::bundle::{dbar_e, lambda_f, partial_h, HolomorphicModel, MetricField};
use crate::endo::{eigh, norm_with, EndoField, Mat, PdFactors, C64};
use crate::error::{HeError, Result};
use crate::grid::GridDomain;

/// Projection invariants are enforced to this pointwise tolerance.
pub const PROJECTION_TOL: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which metric a projection is orthogonal for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclaredMetric {
    Background,
    Evolved,
}

/// Frame of a sub-bundle: the first `s` columns of each value.
#[derive(Debug, Clone)]
pub struct SubbundleFrame {
    s: usize,
    cols: EndoField,
}

fn block(m: &Mat, s: usize) -> Mat {
    let mut b = Mat::zeros(s);
    for i in 0..s {
        for j in 0..s {
            b[(i, j)] = m[(i, j)];
        }
    }
    b
}

fn embed(m: &Mat, r: usize) -> Mat {
    let mut b = Mat::zeros(r);
    for i in 0..m.rank() {
        for j in 0..m.rank() {
            b[(i, j)] = m[(i, j)];
        }
    }
    b
}

impl SubbundleFrame {
    /// Keep the first `s` columns of `cols`; the rest are zeroed.
    pub fn new(s: usize, cols: EndoField) -> Result<Self> {
        let r = cols.rank();
        if s == 0 || s > r {
            return Err(HeError::InvalidParameter(format!("sub-bundle rank {s} outside 1..={r}")));
        }
        let cols = cols.map(|m| {
            let mut out = *m;
            for i in 0..r {
                for j in s..r {
                    out[(i, j)] = C64::new(0.0, 0.0);
                }
            }
            out
        });
        Ok(Self { s, cols })
    }

    /// Constant frame spanned by the first `s` standard basis vectors.
    pub fn coordinate(len: usize, r: usize, s: usize) -> Result<Self> {
        Self::new(s, EndoField::identity(len, r))
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn total_rank(&self) -> usize {
        self.cols.rank()
    }

    pub fn cols(&self) -> &EndoField {
        &self.cols
    }

    /// Gram block `B* H B` at node `i`.
    pub fn gram(&self, h: &Mat, i: usize) -> Mat {
        let b = self.cols[i];
        block(&(b.adjoint() * *h * b), self.s)
    }

    /// `H`-orthogonal projection onto the span at node `i`.
    pub fn projection_at(&self, h: &Mat, i: usize) -> Result<Mat> {
        let b = self.cols[i];
        let ginv = self.gram(h, i).inverse()?;
        Ok(b * embed(&ginv, self.total_rank()) * b.adjoint() * *h)
    }

    /// Embed an endomorphism of `S` (frame coordinates) into `End(E)`:
    /// `B X G⁻¹ B* H`.
    pub fn embed_endo(&self, x: &Mat, h: &Mat, i: usize) -> Result<Mat> {
        let b = self.cols[i];
        let ginv = self.gram(h, i).inverse()?;
        Ok(b * embed(&(*x * ginv), self.total_rank()) * b.adjoint() * *h)
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionField {
    pi: EndoField,
    target_rank: usize,
    declared: DeclaredMetric,
}

impl ProjectionField {
    /// Validate `π² = π`, `π^{*H} = π` and `tr π = s` on active nodes.
    pub fn new(dom: &GridDomain, pi: EndoField, h: &MetricField, declared: DeclaredMetric) -> Result<Self> {
        let r = pi.rank();
        if pi.len() != dom.len() || h.rank() != r {
            return Err(HeError::Shape("projection does not match domain/metric".into()));
        }
        let mut target = None;
        for i in dom.active_indices() {
            let p = pi[i];
            let idem = (p * p - p).max_abs();
            let hm = h.get(i);
            let adj = (*hm * p - p.adjoint() * *hm).max_abs() / hm.max_abs();
            let tr = p.trace();
            let s = tr.re.round();
            if idem > PROJECTION_TOL || adj > PROJECTION_TOL || (tr.re - s).abs() > PROJECTION_TOL || tr.im.abs() > PROJECTION_TOL {
                let (ix, iy) = dom.coords(i);
                return Err(HeError::NotProjection(format!(
                    "at ({ix}, {iy}): |π²−π| = {idem:.3e}, |π−π*| = {adj:.3e}, tr π = {tr}"
                )));
            }
            let s = s as usize;
            match target {
                None => target = Some(s),
                Some(t) if t != s => {
                    return Err(HeError::NotProjection(format!("rank jumps from {t} to {s}")));
                }
                _ => {}
            }
        }
        let target_rank = target.ok_or_else(|| HeError::InvalidDomain("no active nodes".into()))?;
        if target_rank == 0 {
            return Err(HeError::NotProjection("projection onto the zero sub-bundle".into()));
        }
        Ok(Self {
            pi,
            target_rank,
            declared,
        })
    }

    /// `H`-orthogonal projection onto the span of `frame`.
    pub fn from_frame(dom: &GridDomain, frame: &SubbundleFrame, h: &MetricField, declared: DeclaredMetric) -> Result<Self> {
        let r = frame.total_rank();
        let vals = (0..dom.len())
            .map(|i| {
                if dom.is_active(i) {
                    frame.projection_at(h.get(i), i)
                } else {
                    Ok(Mat::zeros(r))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dom, EndoField::new(r, vals)?, h, declared)
    }

    /// Re-orthogonalize any idempotent-ish field `p` with respect to `h`:
    /// its image (top `s` eigenvectors of `p p*`) becomes the frame.
    pub fn orthogonalize(dom: &GridDomain, p: &EndoField, s: usize, h: &MetricField, declared: DeclaredMetric) -> Result<Self> {
        let r = p.rank();
        let cols = EndoField::from_fn(dom.len(), r, |i| {
            let e = eigh(&(p[i] * p[i].adjoint()));
            let mut b = Mat::zeros(r);
            for k in 0..s.min(r) {
                for row in 0..r {
                    b[(row, k)] = e.vectors[(row, r - 1 - k)];
                }
            }
            b
        })?;
        Self::from_frame(dom, &SubbundleFrame::new(s, cols)?, h, declared)
    }

    pub fn pi(&self) -> &EndoField {
        &self.pi
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn declared(&self) -> DeclaredMetric {
        self.declared
    }

    pub fn conjugated(&self, u: &Mat) -> Self {
        Self {
            pi: self.pi.conjugated(u),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeReport {
    pub degree: f64,
    pub rank: usize,
    pub slope: f64,
    /// `∫ tr(π √−1ΛF_H)`.
    pub curvature_term: f64,
    /// `∫ |∂̄_E π|²_H`.
    pub dbar_pi_l2: f64,
    /// `√s ∫ |√−1ΛF_H|_H`, an upper bound for `curvature_term`.
    pub curvature_bound: f64,
    /// `|I − I_coarse|` with `I_coarse` the same integral on every other node.
    pub quadrature_error: f64,
}

/// Every-other-node quadrature, used to estimate integration error.
fn coarse_integrate(dom: &GridDomain, f: &[f64]) -> f64 {
    dom.active_indices()
        .filter(|&i| {
            let (ix, iy) = dom.coords(i);
            ix % 2 == 0 && iy % 2 == 0
        })
        .map(|i| 4.0 * f[i] * dom.quad_weights()[i])
        .sum()
}

/// Chern-Weil degree `∫ tr(π √−1ΛF_H) − ∫ |∂̄_E π|²_H`.
pub fn degree_chern_weil(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField, pi: &ProjectionField) -> Result<DegreeReport> {
    let lf = lambda_f(model, dom, h)?;
    degree_with_curvature(model, dom, h, pi, &lf)
}

fn degree_with_curvature(
    model: &HolomorphicModel,
    dom: &GridDomain,
    h: &MetricField,
    pi: &ProjectionField,
    lf: &EndoField,
) -> Result<DegreeReport> {
    let dbar = dbar_e(model, dom, pi.pi());
    let n = dom.len();
    let mut curv = vec![0.0; n];
    let mut dpi = vec![0.0; n];
    let mut lfn = vec![0.0; n];
    for i in dom.active_indices() {
        let f = PdFactors::new(h.get(i))?;
        curv[i] = (pi.pi()[i] * lf[i]).trace().re;
        dpi[i] = 2.0 / dom.lambda(i) * norm_with(&dbar[i], &f).powi(2);
        lfn[i] = norm_with(&lf[i], &f);
    }
    let integrand: Vec<f64> = curv.iter().zip(&dpi).map(|(a, b)| a - b).collect();
    let curvature_term = dom.integrate(&curv);
    let dbar_pi_l2 = dom.integrate(&dpi);
    let degree = curvature_term - dbar_pi_l2;
    let s = pi.target_rank();
    Ok(DegreeReport {
        degree,
        rank: s,
        slope: degree / s as f64,
        curvature_term,
        dbar_pi_l2,
        curvature_bound: (s as f64).sqrt() * dom.integrate(&lfn),
        quadrature_error: (degree - coarse_integrate(dom, &integrand)).abs(),
    })
}

/// Degree report for `E` itself (`π = Id`).
pub fn total_degree(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField) -> Result<DegreeReport> {
    let id = ProjectionField::new(dom, EndoField::identity(dom.len(), model.rank()), h, DeclaredMetric::Evolved)?;
    degree_chern_weil(model, dom, h, &id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeVerdict {
    StableWitnessPassed,
    SemistableBorderline,
    Destabilizing,
}

impl SlopeVerdict {
    pub fn name(self) -> &'static str {
        match self {
            SlopeVerdict::StableWitnessPassed => "STABLE_WITNESS_PASSED",
            SlopeVerdict::SemistableBorderline => "SEMISTABLE_BORDERLINE",
            SlopeVerdict::Destabilizing => "DESTABILIZING",
        }
    }
}

impl std::fmt::Display for SlopeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeComparison {
    pub verdict: SlopeVerdict,
    pub sub_slope: f64,
    pub total_slope: f64,
    pub tol_slope: f64,
}

/// Smallest slope tolerance used when the quadrature error estimate is zero.
pub const SLOPE_TOL_FLOOR: f64 = 1e-10;

/// Default slope tolerance: ten times the quadrature error of both slopes.
pub fn default_tol_slope(sub: &DegreeReport, total: &DegreeReport) -> f64 {
    (10.0 * (sub.quadrature_error / sub.rank as f64 + total.quadrature_error / total.rank as f64)).max(SLOPE_TOL_FLOOR)
}

/// Compare the slope of one witness against the total slope. Applies only to
/// proper sub-bundles.
pub fn slope_compare(sub: &DegreeReport, total: &DegreeReport, tol_slope: Option<f64>) -> Result<SlopeComparison> {
    if sub.rank >= total.rank {
        return Err(HeError::Misuse(format!(
            "rank {} is not a proper sub-bundle of rank {}",
            sub.rank, total.rank
        )));
    }
    let tol = tol_slope.unwrap_or_else(|| default_tol_slope(sub, total));
    let d = sub.slope - total.slope;
    let verdict = if d > tol {
        SlopeVerdict::Destabilizing
    } else if d.abs() <= tol {
        SlopeVerdict::SemistableBorderline
    } else {
        SlopeVerdict::StableWitnessPassed
    };
    Ok(SlopeComparison {
        verdict,
        sub_slope: sub.slope,
        total_slope: total.slope,
        tol_slope: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionReport {
    /// `max |B G₁⁻¹G₂G₁⁻¹ B* H₁ − π h π|` (identity (1)).
    pub identity1: f64,
    /// Max discrepancy of the `∂̄` identity (2) over interior nodes.
    pub identity2: f64,
    /// Largest value of either side of (2), for scale.
    pub identity2_scale: f64,
}

/// Check the restriction identities for `h = H₁⁻¹H₂` and the
/// `H₁`-orthogonal projection onto the span of `frame`:
///
/// 1. `H₁|_S⁻¹ H₂|_S = π h π`,
/// 2. `∂̄_S(H₁|_S⁻¹ H₂|_S) = π ∂̄_E(h) π + ∂̄_E π (Id − π) h π`.
///
/// The left sides are computed intrinsically from Gram matrices in the
/// frame and embedded into `End(E)`. (2) needs `S` to be `∂̄_E`-invariant.
pub fn restriction_algebra_check(
    model: &HolomorphicModel,
    dom: &GridDomain,
    h1: &MetricField,
    h2: &MetricField,
    frame: &SubbundleFrame,
) -> Result<RestrictionReport> {
    let r = model.rank();
    let s = frame.rank();
    let pi = ProjectionField::from_frame(dom, frame, h1, DeclaredMetric::Evolved)?;
    let n = dom.len();
    let mut h12 = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let inv1 = PdFactors::new(h1.get(i))?.inv;
        h12.push(inv1 * *h2.get(i));
        let g1 = frame.gram(h1.get(i), i);
        let g2 = frame.gram(h2.get(i), i);
        x.push(g1.inverse()? * g2);
    }
    let h12 = EndoField::new(r, h12)?;
    let mut identity1: f64 = 0.0;
    for i in dom.active_indices() {
        let p = pi.pi()[i];
        let lhs = frame.embed_endo(&x[i], h1.get(i), i)?;
        identity1 = identity1.max((lhs - p * h12[i] * p).max_abs());
    }

    let dbar_h = dbar_e(model, dom, &h12);
    let dbar_pi = dbar_e(model, dom, pi.pi());
    let cols = frame.cols().values();
    let mut identity2: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let id = Mat::identity(r);
    for i in dom.interior_indices() {
        let hm = h1.get(i);
        let b = cols[i];
        let g1inv = frame.gram(hm, i).inverse()?;
        let (bx, by) = dom.centered(cols, i);
        let dbar_b = (bx + by * I) * 0.5 + model.a_field()[i] * b;
        let a_s = g1inv * block(&(b.adjoint() * *hm * dbar_b), s);
        let (xx, xy) = dom.centered(&x, i);
        let dbar_x = (xx + xy * I) * 0.5 + a_s.commutator(&x[i]);
        let lhs = frame.embed_endo(&dbar_x, hm, i)?;
        let p = pi.pi()[i];
        let rhs = p * dbar_h[i] * p + dbar_pi[i] * (id - p) * h12[i] * p;
        identity2 = identity2.max((lhs - rhs).max_abs());
        scale = scale.max(lhs.max_abs()).max(rhs.max_abs());
    }
    Ok(RestrictionReport {
        identity1,
        identity2,
        identity2_scale: scale,
    })
}

/// Pointwise `tr √−1ΛF_{H|S}` by two routes for a `∂̄_E`-invariant `S`.
#[derive(Debug, Clone)]
pub struct SubbundleCurvature {
    /// Gauss-Codazzi: `tr(π_H √−1ΛF_H) − |∂̄_E π_H|²_H`.
    pub extrinsic: Vec<f64>,
    /// `[K-route integrand] − (1/2λ) Δ₅ log det(G_K⁻¹ G_H)`.
    pub intrinsic: Vec<f64>,
}

fn gauss_codazzi_integrand(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField, frame: &SubbundleFrame) -> Result<Vec<f64>> {
    let pi = ProjectionField::from_frame(dom, frame, h, DeclaredMetric::Evolved)?;
    let lf = lambda_f(model, dom, h)?;
    let dbar = dbar_e(model, dom, pi.pi());
    let mut out = vec![0.0; dom.len()];
    for i in dom.active_indices() {
        let f = PdFactors::new(h.get(i))?;
        out[i] = (pi.pi()[i] * lf[i]).trace().re - 2.0 / dom.lambda(i) * norm_with(&dbar[i], &f).powi(2);
    }
    Ok(out)
}

pub fn subbundle_curvature(
    model: &HolomorphicModel,
    dom: &GridDomain,
    h: &MetricField,
    frame: &SubbundleFrame,
) -> Result<SubbundleCurvature> {
    let extrinsic = gauss_codazzi_integrand(model, dom, h, frame)?;
    let base = gauss_codazzi_integrand(model, dom, &model.background_metric(dom), frame)?;
    let k = Mat::identity(model.rank());
    let logdet: Vec<f64> = (0..dom.len())
        .map(|i| {
            let gk = frame.gram(&k, i);
            let gh = frame.gram(h.get(i), i);
            Ok((gh.det().re / gk.det().re).ln())
        })
        .collect::<Result<_>>()?;
    let lap = dom.laplacian(&logdet);
    let intrinsic = (0..dom.len()).map(|i| base[i] - 0.5 * lap[i]).collect();
    Ok(SubbundleCurvature { extrinsic, intrinsic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    /// All eigenvalues of `H₁⁻¹H₂` equal 1 within tolerance.
    Identical,
    /// Spatially constant, distinct eigenvalues: a holomorphic splitting.
    Decomposition,
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// `Δ_g tr h − 2 tr((√−1ΛF₁ − √−1ΛF₂) h) − (4/λ)|h^{-1/2} ∂_{H₁} h|²_{H₁}`, sup over interior.
    pub identity_defect: f64,
    /// Largest term of the identity, for scale.
    pub identity_scale: f64,
    /// `min Δ_g tr h` over the interior.
    pub min_laplacian: f64,
    /// Per eigenvalue index: (min, max, spatial variance).
    pub eigenvalue_stats: Vec<(f64, f64, f64)>,
    /// `max |μ − 1|` over nodes and eigenvalues.
    pub max_deviation_from_one: f64,
    pub verdict: UniquenessVerdict,
}

/// Tolerance for treating eigenvalues of `H₁⁻¹H₂` as 1.
pub const IDENTICAL_TOL: f64 = 1e-5;

/// Evaluate the trace identity
/// `Δ_g tr h = 2 tr((√−1ΛF_{H₁} − √−1ΛF_{H₂}) h) + (4/λ)|h^{-1/2} ∂_{H₁} h|²_{H₁}`
/// with `h = H₁⁻¹H₂` and classify the eigenvalues of `h`.
///
/// Both metrics must be compatible with `K` (`det(K⁻¹H) = 1` to `1e-8`) and,
/// when `residual_tol` is given, solve the `ε`-equation to that tolerance.
pub fn uniqueness_probe(
    model: &HolomorphicModel,
    dom: &GridDomain,
    h1: &MetricField,
    h2: &MetricField,
    epsilon: f64,
    residual_tol: Option<f64>,
) -> Result<UniquenessReport> {
    for (name, h) in [("H₁", h1), ("H₂", h2)] {
        let drift = h.det_drift(dom);
        if drift > 1e-8 {
            return Err(HeError::Precondition(format!("det(K⁻¹{name}) ≠ 1 (drift {drift:.3e})")));
        }
        if let Some(tol) = residual_tol {
            let res = crate::bundle::residual(model, dom, h, epsilon)?;
            if res.sup > tol {
                return Err(HeError::Precondition(format!(
                    "{name} does not solve the ε-equation (residual {:.3e} > {tol:.1e})",
                    res.sup
                )));
            }
        }
    }
    let r = model.rank();
    let n = dom.len();
    let f1: Vec<PdFactors> = (0..n).map(|i| PdFactors::new(h1.get(i))).collect::<Result<_>>()?;
    let h12 = EndoField::from_fn(n, r, |i| f1[i].inv * *h2.get(i))?;
    let tr: Vec<f64> = h12.trace_field();
    let lap = dom.laplacian(&tr);
    let lf1 = lambda_f(model, dom, h1)?;
    let lf2 = lambda_f(model, dom, h2)?;
    let d = partial_h(model, dom, h1, &h12)?;
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut min_lap = f64::INFINITY;
    for i in dom.interior_indices() {
        // h^{-1/2} through the Hermitian form H₁^{1/2} h H₁^{-1/2}.
        let f = &f1[i];
        let sym = f.sqrt * h12[i] * f.inv_sqrt;
        let sym_is = PdFactors::new(&sym.hermitian_part())?.inv_sqrt;
        let h_inv_sqrt = f.inv_sqrt * sym_is * f.sqrt;
        let sq = 4.0 / dom.lambda(i) * norm_with(&(h_inv_sqrt * d[i]), f).powi(2);
        let curv = 2.0 * ((lf1[i] - lf2[i]) * h12[i]).trace().re;
        defect = defect.max((lap[i] - curv - sq).abs());
        scale = scale.max(lap[i].abs()).max(curv.abs()).max(sq);
        min_lap = min_lap.min(lap[i]);
    }
    let mut eig = vec![Vec::new(); r];
    for i in dom.active_indices() {
        let f = &f1[i];
        let e = eigh(&(f.inv_sqrt * *h2.get(i) * f.inv_sqrt));
        for k in 0..r {
            eig[k].push(e.values()[k]);
        }
    }
    let stats: Vec<(f64, f64, f64)> = eig
        .iter()
        .map(|v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
            (
                v.iter().cloned().fold(f64::INFINITY, f64::min),
                v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                var,
            )
        })
        .collect();
    let max_dev = stats.iter().map(|&(lo, hi, _)| (lo - 1.0).abs().max((hi - 1.0).abs())).fold(0.0, f64::max);
    let verdict = if max_dev <= IDENTICAL_TOL {
        UniquenessVerdict::Identical
    } else if stats.iter().all(|s| s.2 < 1e-10) && stats.windows(2).any(|w| w[1].0 - w[0].1 > IDENTICAL_TOL) {
        UniquenessVerdict::Decomposition
    } else {
        UniquenessVerdict::Undetermined
    };
    Ok(UniquenessReport {
        identity_defect: defect,
        identity_scale: scale,
        min_laplacian: if min_lap.is_finite() { min_lap } else { 0.0 },
        eigenvalue_stats: stats,
        max_deviation_from_one: max_dev,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedGap {
    /// `λ_k deg E − Σ (λ_{i+1} − λ_i) deg S_i`.
    pub degree_form: f64,
    /// `Σ (λ_{i+1} − λ_i) rank S_i (μ(E) − μ(S_i))`.
    pub slope_form: f64,
}

impl WeightedGap {
    pub fn agree(&self, tol: f64) -> bool {
        (self.degree_form - self.slope_form).abs() <= tol * (1.0 + self.degree_form.abs())
    }
}

/// Weighted degree gap for levels `λ₁ < … < λ_k` and the filtration
/// `S₁ ⊂ … ⊂ S_{k−1}`.
///
/// The two forms coincide exactly when the weighting is traceless,
/// `Σ λ_i m_i = 0` with multiplicities `m_i = rank S_i − rank S_{i−1}`; this
/// is a precondition (it holds for the eigenvalues of a traceless `u`).
pub fn weighted_degree_gap(levels: &[f64], subs: &[DegreeReport], total: &DegreeReport) -> Result<WeightedGap> {
    let k = levels.len();
    if k < 2 || subs.len() != k - 1 {
        return Err(HeError::InvalidParameter(format!(
            "{k} levels need {} sub-bundle reports, got {}",
            k.saturating_sub(1),
            subs.len()
        )));
    }
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(HeError::Precondition("levels must be strictly increasing".into()));
    }
    let mut prev = 0;
    let mut weight = 0.0;
    for (i, s) in subs.iter().enumerate() {
        if s.rank <= prev || s.rank >= total.rank {
            return Err(HeError::Precondition("sub-bundle ranks must increase strictly below rank E".into()));
        }
        weight += levels[i] * (s.rank - prev) as f64;
        prev = s.rank;
    }
    weight += levels[k - 1] * (total.rank - prev) as f64;
    let scale = levels.iter().map(|l| l.abs()).fold(0.0, f64::max) * total.rank as f64;
    if weight.abs() > 1e-12 * scale.max(1.0) {
        return Err(HeError::Precondition(format!(
            "levels weighted by multiplicity must sum to zero, got {weight:.3e}"
        )));
    }
    let mut degree_form = levels[k - 1] * total.degree;
    let mut slope_form = 0.0;
    for (i, s) in subs.iter().enumerate() {
        let gap = levels[i + 1] - levels[i];
        degree_form -= gap * s.degree;
        slope_form += gap * s.rank as f64 * (total.slope - s.slope);
    }
    Ok(WeightedGap { degree_form, slope_form })
}
