//! Holomorphic bundle background and curvature of arbitrary metrics.
//!
//! The frame is unitary for the background metric `K`, so `K ≡ Id` and every
//! metric `H` coincides with `h = K⁻¹H` as a matrix field. The holomorphic
//! structure is `∂̄_E = ∂̄ + a dz̄`, the Chern connection of `K` has `(1,0)`
//! part `−a* dz`, and curvature of any other metric follows from the
//! relative formula
//!
//! ```text
//! √−1ΛF_H = √−1ΛF_K − (2/λ) (∂_z̄ B + [a, B]),   B = h⁻¹ ∂_K h = h⁻¹(∂_z h − [a*, h]).
//! ```
//!
//! Discretization. The derivative part `h⁻¹∂h` is built from link
//! logarithms `L(i→j) = log(h_i⁻¹ h_j)`: their sum around a node gives a
//! flux-form divergence, their difference a centered derivative, and the
//! remaining `i/4 [h⁻¹hₓ, h⁻¹hᵧ]` piece of `∂_z̄(h⁻¹∂_z h)` is a product of
//! the centered pieces. `tr L(i→j) = log det h_j − log det h_i`, so the trace
//! of the curvature correction is exactly `−(1/2λ) Δ₅ log det h`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::endo::{herm_exp, herm_log, traceless_part, EndoField, Mat, PdFactors, C64, MAX_RANK};
use crate::error::{HeError, Result};
use crate::grid::GridDomain;

/// Node count above which per-node passes run on the rayon pool.
pub(crate) const PAR_THRESHOLD: usize = 2048;

const I: C64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn node_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

pub(crate) fn try_node_map<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

/// Field of positive-definite Hermitian matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    field: EndoField,
}

impl MetricField {
    /// Wrap a field after checking positivity and Hermiticity on the active
    /// nodes of `dom`.
    pub fn new(dom: &GridDomain, field: EndoField) -> Result<Self> {
        if field.len() != dom.len() {
            return Err(HeError::Shape(format!("field has {} nodes, domain {}", field.len(), dom.len())));
        }
        for idx in dom.active_indices() {
            let m = field.get(idx);
            if m.hermiticity_defect() > 1e-10 * m.max_abs().max(1.0) {
                let (ix, iy) = dom.coords(idx);
                return Err(HeError::Precondition(format!("metric not Hermitian at ({ix}, {iy})")));
            }
            PdFactors::new(m)?;
        }
        Ok(Self { field })
    }

    pub(crate) fn new_unchecked(field: EndoField) -> Self {
        Self { field }
    }

    /// The background metric `K`.
    pub fn identity(dom: &GridDomain, rank: usize) -> Self {
        Self {
            field: EndoField::identity(dom.len(), rank),
        }
    }

    /// `H = exp(X)` node by node.
    pub fn from_log(dom: &GridDomain, log: &EndoField) -> Result<Self> {
        Self::new(dom, log.map(herm_exp))
    }

    pub fn rank(&self) -> usize {
        self.field.rank()
    }

    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    pub fn field(&self) -> &EndoField {
        &self.field
    }

    pub fn into_field(self) -> EndoField {
        self.field
    }

    pub fn values(&self) -> &[Mat] {
        self.field.values()
    }

    pub fn get(&self, idx: usize) -> &Mat {
        self.field.get(idx)
    }

    /// `log h` on active nodes, zero elsewhere.
    pub fn log_field(&self, dom: &GridDomain) -> Result<EndoField> {
        let r = self.rank();
        let vals = try_node_map(dom.len(), |i| {
            if dom.is_active(i) {
                Ok(PdFactors::new(self.get(i))?.log)
            } else {
                Ok(Mat::zeros(r))
            }
        })?;
        EndoField::new(r, vals)
    }

    /// `max |det h − 1|` over active nodes.
    pub fn det_drift(&self, dom: &GridDomain) -> f64 {
        dom.active_indices()
            .map(|i| (self.get(i).det().re - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Rescale `h ← h · det(h)^{-1/r}` on active nodes.
    pub fn normalize_det(&mut self, dom: &GridDomain) {
        let r = self.rank() as f64;
        for i in 0..dom.len() {
            if dom.is_active(i) {
                let d = self.field.values()[i].det().re;
                let m = &mut self.field.values_mut()[i];
                *m = *m * d.powf(-1.0 / r);
            }
        }
    }

    /// Reset inactive and boundary nodes to `K`.
    pub fn pin_to_background(&mut self, dom: &GridDomain) {
        let r = self.rank();
        for i in 0..dom.len() {
            if !dom.is_interior(i) {
                self.field.values_mut()[i] = Mat::identity(r);
            }
        }
    }

    pub fn conjugated(&self, u: &Mat) -> Self {
        Self {
            field: self.field.conjugated(u),
        }
    }

    /// Smooth metric compatible with `K`: `exp(X)` with `X` a random
    /// traceless Hermitian combination of the lowest Fourier modes, scaled so
    /// that `sup |X| ≤ amplitude`, and pinned to `K` off the interior.
    pub fn smooth_random_compatible(dom: &GridDomain, rank: usize, amplitude: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_traceless = |rng: &mut ChaCha8Rng| {
            let mut m = Mat::zeros(rank);
            for i in 0..rank {
                m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
                for j in i + 1..rank {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            traceless_part(&m)
        };
        let modes: Vec<(f64, f64, f64, Mat)> = (0..4)
            .map(|_| {
                let kx = rng.gen_range(0..2) as f64 + 1.0;
                let ky = rng.gen_range(0..2) as f64;
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                (kx, ky, phase, random_traceless(&mut rng))
            })
            .collect();
        let w = std::f64::consts::TAU / dom.side();
        let mut xs: Vec<Mat> = (0..dom.len())
            .map(|i| {
                let (x, y) = dom.position(i);
                let mut m = Mat::zeros(rank);
                for (kx, ky, ph, c) in &modes {
                    m += *c * (w * (kx * x + ky * y) + ph).cos();
                }
                if dom.is_interior(i) {
                    m
                } else {
                    Mat::zeros(rank)
                }
            })
            .collect();
        let sup = xs.iter().map(|m| m.frobenius()).fold(0.0, f64::max);
        if sup > 0.0 {
            for m in xs.iter_mut() {
                *m = *m * (amplitude / sup);
            }
        }
        Self::from_log(dom, &EndoField::new(rank, xs)?)
    }
}

/// Built-in background families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Line bundle, `a ≡ 0`, constant curvature `c`.
    RankOneFlat,
    /// `L₁ ⊕ L₂`, `a ≡ 0`, curvature `diag(c₁, c₂)`.
    DirectSum,
    /// Rank 2 with constant nilpotent `a = ν e₁⊗e²`: a nonsplit extension of
    /// two flat line bundles.
    Extension,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::RankOneFlat => "rank1_flat",
            ScenarioKind::DirectSum => "direct_sum",
            ScenarioKind::Extension => "extension",
        }
    }

    pub fn rank(self) -> usize {
        match self {
            ScenarioKind::RankOneFlat => 1,
            ScenarioKind::DirectSum | ScenarioKind::Extension => 2,
        }
    }

    pub fn all() -> [ScenarioKind; 3] {
        [ScenarioKind::RankOneFlat, ScenarioKind::DirectSum, ScenarioKind::Extension]
    }
}

/// Parsed scenario tag: base family plus `bumped_` / `punctured_` prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioTag {
    pub kind: ScenarioKind,
    pub bumped: bool,
    pub punctured: bool,
}

impl std::str::FromStr for ScenarioTag {
    type Err = HeError;

    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut punctured = false;
        let mut bumped = false;
        loop {
            if let Some(r) = rest.strip_prefix("punctured_") {
                punctured = true;
                rest = r;
            } else if let Some(r) = rest.strip_prefix("bumped_") {
                bumped = true;
                rest = r;
            } else {
                break;
            }
        }
        let kind = match rest {
            "rank1_flat" | "s1" => ScenarioKind::RankOneFlat,
            "direct_sum" | "s2" => ScenarioKind::DirectSum,
            "extension" | "s3" => ScenarioKind::Extension,
            _ => return Err(HeError::UnknownScenario(s.to_string())),
        };
        Ok(Self { kind, bumped, punctured })
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.punctured {
            write!(f, "punctured_")?;
        }
        if self.bumped {
            write!(f, "bumped_")?;
        }
        write!(f, "{}", self.kind.name())
    }
}

/// Numeric parameters of the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Curvature of the line bundle (rank one).
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    /// Extension strength.
    pub nu: f64,
    /// Amplitude of the zero-mean bump added to the curvature.
    pub bump: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            c: 0.0,
            c1: 1.0,
            c2: -1.0,
            nu: 1.0,
            bump: 0.0,
        }
    }
}

/// Default bump amplitude for `bumped_` tags given without one.
pub const DEFAULT_BUMP: f64 = 0.5;

/// Background data `(E, ∂̄_E, K)` on a lattice.
#[derive(Debug, Clone)]
pub struct HolomorphicModel {
    tag: ScenarioTag,
    params: ScenarioParams,
    rank: usize,
    a: EndoField,
    a_is_zero: bool,
    lambda_fk: EndoField,
    degree: f64,
    sup_fk_perp: f64,
}

/// Zero-mean bump `cos(2πx/L) cos(2πy/L)`.
pub fn bump_profile(dom: &GridDomain, idx: usize) -> f64 {
    let (x, y) = dom.position(idx);
    let w = std::f64::consts::TAU / dom.side();
    (w * x).cos() * (w * y).cos()
}

/// Build a scenario on `dom`. `dom` fixes the lattice and the quadrature used
/// for the declared degree; for punctured scenarios pass the base domain.
pub fn make_scenario(tag: &str, params: ScenarioParams, dom: &GridDomain) -> Result<HolomorphicModel> {
    let tag: ScenarioTag = tag.parse()?;
    let mut params = params;
    if tag.bumped && params.bump == 0.0 {
        params.bump = DEFAULT_BUMP;
    }
    for (name, v) in [("c", params.c), ("c1", params.c1), ("c2", params.c2), ("nu", params.nu), ("bump", params.bump)] {
        if !v.is_finite() || v.abs() > 100.0 {
            return Err(HeError::InvalidParameter(format!("{name} = {v} outside [-100, 100]")));
        }
    }
    let r = tag.kind.rank();
    let len = dom.len();
    let (a, base_fk): (Mat, Box<dyn Fn(usize) -> Mat>) = match tag.kind {
        ScenarioKind::RankOneFlat => (Mat::zeros(1), Box::new(move |_| Mat::from_real_diag(&[params.c]))),
        ScenarioKind::DirectSum => (
            Mat::zeros(2),
            Box::new(move |_| Mat::from_real_diag(&[params.c1, params.c2])),
        ),
        ScenarioKind::Extension => {
            let a = Mat::unit(2, 0, 1) * params.nu;
            // Chern curvature of the unitary frame: √−1ΛF_K = (2/λ)[a, a*].
            let fk = a.commutator(&a.adjoint()) * 2.0;
            (a, Box::new(move |i| fk * (1.0 / dom.lambda(i))))
        }
    };
    let direction = if r == 1 {
        Mat::identity(1)
    } else {
        let mut d = vec![0.0; r];
        d[0] = 1.0;
        d[1] = -1.0;
        Mat::from_real_diag(&d)
    };
    let lambda_fk = EndoField::from_fn(len, r, |i| base_fk(i) + direction * (params.bump * bump_profile(dom, i)))?;
    let a_field = EndoField::constant(len, a);
    HolomorphicModel::from_parts(tag, params, a_field, lambda_fk, dom)
}

impl HolomorphicModel {
    /// Assemble a model from raw fields. `lambda_fk` must be Hermitian.
    pub fn from_parts(
        tag: ScenarioTag,
        params: ScenarioParams,
        a: EndoField,
        lambda_fk: EndoField,
        dom: &GridDomain,
    ) -> Result<Self> {
        if a.len() != dom.len() || lambda_fk.len() != dom.len() || a.rank() != lambda_fk.rank() {
            return Err(HeError::Shape("model fields do not match the domain".into()));
        }
        if let Some(i) = (0..dom.len()).find(|&i| lambda_fk[i].hermiticity_defect() > 1e-12 * lambda_fk[i].max_abs().max(1.0)) {
            let (ix, iy) = dom.coords(i);
            return Err(HeError::Precondition(format!("√−1ΛF_K not Hermitian at ({ix}, {iy})")));
        }
        let rank = a.rank();
        let a_is_zero = a.values().iter().all(|m| m.max_abs() == 0.0);
        let degree = dom.integrate(&lambda_fk.trace_field());
        let sup_fk_perp = dom
            .active_indices()
            .map(|i| traceless_part(&lambda_fk[i]).frobenius())
            .fold(0.0, f64::max);
        Ok(Self {
            tag,
            params,
            rank,
            a,
            a_is_zero,
            lambda_fk,
            degree,
            sup_fk_perp,
        })
    }

    pub fn tag(&self) -> ScenarioTag {
        self.tag
    }

    pub fn params(&self) -> ScenarioParams {
        self.params
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `(0,1)` connection coefficients of `∂̄_E` in the frame.
    pub fn a_field(&self) -> &EndoField {
        &self.a
    }

    /// `√−1ΛF_K`.
    pub fn lambda_fk(&self) -> &EndoField {
        &self.lambda_fk
    }

    /// `deg(E, K) = ∫ tr √−1ΛF_K`, on the domain the model was built on.
    pub fn degree(&self) -> f64 {
        self.degree
    }

    /// `sup |ΛF_K^⊥|` (Frobenius).
    pub fn sup_fk_perp(&self) -> f64 {
        self.sup_fk_perp
    }

    /// `sup |ΛF_K^⊥|` restricted to the active nodes of `dom`.
    pub fn sup_fk_perp_on(&self, dom: &GridDomain) -> f64 {
        dom.active_indices()
            .map(|i| traceless_part(&self.lambda_fk[i]).frobenius())
            .fold(0.0, f64::max)
    }

    pub fn background_metric(&self, dom: &GridDomain) -> MetricField {
        MetricField::identity(dom, self.rank)
    }

    /// Same bundle written in the frame rotated by the constant unitary `u`.
    pub fn conjugated(&self, u: &Mat) -> Self {
        let mut out = self.clone();
        out.a = self.a.conjugated(u);
        out.lambda_fk = self.lambda_fk.conjugated(u);
        out
    }

    /// Copy with `√−1ΛF_K` replaced, e.g. for frame relabelling in tests.
    pub fn with_lambda_fk(&self, dom: &GridDomain, lambda_fk: EndoField) -> Result<Self> {
        Self::from_parts(self.tag, self.params, self.a.clone(), lambda_fk, dom)
    }
}

/// `∂̄_E f = ∂_z̄ f + [a, f]` (coefficient of `dz̄`), centered differences.
/// Interior nodes only; the rest is zero.
pub fn dbar_e(model: &HolomorphicModel, dom: &GridDomain, f: &EndoField) -> EndoField {
    let r = f.rank();
    let vals = node_map(dom.len(), |i| {
        if !dom.is_interior(i) {
            return Mat::zeros(r);
        }
        let (dx, dy) = dom.centered(f.values(), i);
        (dx + dy * I) * 0.5 + model.a[i].commutator(&f[i])
    });
    EndoField::new(r, vals).expect("rank preserved")
}

/// `∂_H f = ∂_z f + [A_H, f]` with `A_H = H⁻¹∂_z H − H⁻¹ a* H`, the `(1,0)`
/// part of the Chern connection of `H` in the frame. Interior nodes only.
pub fn partial_h(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField, f: &EndoField) -> Result<EndoField> {
    let r = f.rank();
    let vals = try_node_map(dom.len(), |i| {
        if !dom.is_interior(i) {
            return Ok(Mat::zeros(r));
        }
        let hi = h.get(i);
        let hinv = PdFactors::new(hi)?.inv;
        let (hx, hy) = dom.centered(h.values(), i);
        let conn = hinv * ((hx - hy * I) * 0.5) - hinv * model.a[i].adjoint() * *hi;
        let (dx, dy) = dom.centered(f.values(), i);
        Ok((dx - dy * I) * 0.5 + conn.commutator(&f[i]))
    })?;
    EndoField::new(r, vals)
}

/// Per-node factorizations of `h` plus the curvature `√−1ΛF_H`.
///
/// `lambda_f_hat[i]` is the curvature in the `H`-unitary frame at node `i`,
/// `h_i^{1/2} √−1ΛF_H h_i^{-1/2}` (Hermitian); `lambda_f` is the same
/// endomorphism in the `K`-frame.
pub(crate) struct CurvaturePass {
    pub factors: Vec<PdFactors>,
    pub lambda_f_hat: Vec<Mat>,
    pub lambda_f: Vec<Mat>,
}

pub(crate) fn curvature_pass(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField) -> Result<CurvaturePass> {
    let r = model.rank();
    if h.rank() != r || h.len() != dom.len() {
        return Err(HeError::Shape("metric does not match model/domain".into()));
    }
    let id = Mat::identity(r);
    let identity_factors = PdFactors::new(&id)?;
    let factors = try_node_map(dom.len(), |i| {
        if dom.is_active(i) {
            PdFactors::new(h.get(i)).map_err(|e| match e {
                HeError::Conditioning { .. } => {
                    let (ix, iy) = dom.coords(i);
                    HeError::Precondition(format!("metric degenerate at ({ix}, {iy}): {e}"))
                }
                e => e,
            })
        } else {
            Ok(identity_factors)
        }
    })?;

    let b1: Option<Vec<Mat>> = if model.a_is_zero || r == 1 {
        None
    } else {
        Some(node_map(dom.len(), |i| {
            let ad = model.a[i].adjoint();
            ad - factors[i].inv * ad * *h.get(i)
        }))
    };

    // Link logarithms log(h_i⁻¹ h_j) seen from the H-unitary frame at i:
    // log(h_i^{-1/2} h_j h_i^{-1/2}). All four are taken at i, using
    // log(h_j⁻¹ h_i) = −log(h_i⁻¹ h_j), so no frame change between nodes.
    let zero = Mat::zeros(r);
    let link = |fi: &PdFactors, j: usize| -> Result<Mat> {
        if !dom.is_active(j) {
            return Ok(zero);
        }
        herm_log(&(fi.inv_sqrt * *h.get(j) * fi.inv_sqrt).hermitian_part())
    };
    let inv_h2 = 1.0 / (dom.spacing() * dom.spacing());
    let inv_2h = 0.5 / dom.spacing();
    let lambda_f_hat = try_node_map(dom.len(), |i| {
        let f = &factors[i];
        if !dom.is_interior(i) {
            return Ok((f.sqrt * model.lambda_fk[i] * f.inv_sqrt).hermitian_part());
        }
        let s = dom.stencil(i);
        let lxp = link(f, s.xp)?;
        let lxm = link(f, s.xm)?;
        let lyp = link(f, s.yp)?;
        let lym = link(f, s.ym)?;
        let div = (lxp + lxm + lyp + lym) * inv_h2;
        let px = (lxp - lxm) * inv_2h;
        let py = (lyp - lym) * inv_2h;
        let mut q = div * 0.25 + px.commutator(&py) * (I * 0.25);
        if let Some(b1) = &b1 {
            let a = f.sqrt * model.a[i] * f.inv_sqrt;
            let b0 = (px - py * I) * 0.5;
            let (dx, dy) = dom.centered(b1, i);
            let b1i = f.sqrt * b1[i] * f.inv_sqrt;
            q += f.sqrt * ((dx + dy * I) * 0.5) * f.inv_sqrt + a.commutator(&b0) + a.commutator(&b1i);
        }
        let lf = f.sqrt * model.lambda_fk[i] * f.inv_sqrt + q * (-2.0 / dom.lambda(i));
        Ok(lf.hermitian_part())
    })?;
    let lambda_f = node_map(dom.len(), |i| {
        if !dom.is_interior(i) {
            return model.lambda_fk[i];
        }
        factors[i].inv_sqrt * lambda_f_hat[i] * factors[i].sqrt
    });
    Ok(CurvaturePass {
        factors,
        lambda_f_hat,
        lambda_f,
    })
}

/// `√−1ΛF_H` by the relative formula. Non-interior nodes carry `√−1ΛF_K`.
pub fn lambda_f(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField) -> Result<EndoField> {
    let pass = curvature_pass(model, dom, h)?;
    EndoField::new(model.rank(), pass.lambda_f)
}

/// Residual `√−1ΛF_H^⊥ + ε log h` with its norms over interior nodes.
#[derive(Debug, Clone)]
pub struct Residual {
    pub field: EndoField,
    /// `sup |·|_H` over interior nodes.
    pub sup: f64,
    /// `(∫ |·|²_H)^{1/2}` over interior nodes.
    pub l2: f64,
}

pub(crate) fn residual_from_pass(dom: &GridDomain, pass: &CurvaturePass, eps: f64, r: usize) -> (Vec<Mat>, Vec<f64>) {
    let vals: Vec<Mat> = (0..dom.len())
        .map(|i| {
            if dom.is_active(i) {
                traceless_part(&pass.lambda_f[i]) + pass.factors[i].log * eps
            } else {
                Mat::zeros(r)
            }
        })
        .collect();
    let norms: Vec<f64> = (0..dom.len())
        .map(|i| {
            if dom.is_interior(i) {
                (traceless_part(&pass.lambda_f_hat[i]) + pass.factors[i].log * eps).frobenius()
            } else {
                0.0
            }
        })
        .collect();
    (vals, norms)
}

pub fn residual(model: &HolomorphicModel, dom: &GridDomain, h: &MetricField, eps: f64) -> Result<Residual> {
    if !(eps >= 0.0) {
        return Err(HeError::InvalidParameter(format!("epsilon must be ≥ 0, got {eps}")));
    }
    let pass = curvature_pass(model, dom, h)?;
    let (vals, norms) = residual_from_pass(dom, &pass, eps, model.rank());
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    let sq: Vec<f64> = norms.iter().map(|n| n * n).collect();
    let l2 = dom.integrate(&sq).sqrt();
    Ok(Residual {
        field: EndoField::new(model.rank(), vals)?,
        sup,
        l2,
    })
}

/// Largest rank accepted by models.
pub const fn max_rank() -> usize {
    MAX_RANK
}
