//! Perturbed heat flow
//!
//! ```text
//! H⁻¹ ∂H/∂t = −2 (√−1(ΛF_H − (tr ΛF_K / r) Id) + ε log(K⁻¹H)),   H = K on the boundary,
//! ```
//!
//! integrated by the multiplicative update `h ← h^{1/2} exp(−2 dt Ĝ) h^{1/2}`
//! with `Ĝ = h^{1/2} G h^{-1/2}` (Hermitian because `G` is `H`-self-adjoint).
//! Positivity is preserved by construction; `det h` is preserved up to
//! roundoff because `tr G = −(1/2λ) Δ₅ log det h + ε log det h` exactly.

use crate::bundle::{curvature_pass, node_map, residual_from_pass, CurvaturePass, HolomorphicModel, MetricField};
use crate::endo::{herm_exp, sigma, traceless_part, EndoField, Mat};
use crate::error::{HeError, Result};
use crate::grid::GridDomain;

/// Explicit-scheme stability bound `spacing² · λ_min / 8`.
pub fn stable_dt(dom: &GridDomain) -> f64 {
    dom.spacing() * dom.spacing() * dom.lambda_min() / 8.0
}

/// Driving term of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowKind {
    /// `G = √−1(ΛF_H − (tr ΛF_K / r) Id) + ε log h`.
    #[default]
    Perturbed,
    /// `G = √−1ΛF_H^⊥ + ε log h`, the variant with the trace-free part of
    /// `ΛF_H` itself.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub epsilon: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Stop once the sup norm of the residual falls below this.
    pub tol_residual: f64,
    pub det_renorm: bool,
    /// Record monitors every this many steps (the final state is always recorded).
    pub monitor_stride: usize,
    pub kind: FlowKind,
}

impl FlowConfig {
    /// Defaults with `dt` at the stability bound of `dom`.
    pub fn for_domain(dom: &GridDomain, epsilon: f64) -> Self {
        Self {
            epsilon,
            dt: stable_dt(dom),
            t_max: 400.0,
            tol_residual: 1e-9,
            det_renorm: true,
            monitor_stride: 1,
            kind: FlowKind::Perturbed,
        }
    }

    pub fn validate(&self, dom: &GridDomain) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(HeError::InvalidParameter(format!("epsilon must be ≥ 0, got {}", self.epsilon)));
        }
        if !(self.dt > 0.0) {
            return Err(HeError::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        let dt_stable = stable_dt(dom);
        if self.dt > dt_stable * (1.0 + 1e-12) {
            return Err(HeError::Cfl { dt: self.dt, dt_stable });
        }
        if !(self.tol_residual > 0.0) {
            return Err(HeError::InvalidParameter(format!("tol_residual must be > 0, got {}", self.tol_residual)));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(HeError::InvalidParameter(format!("t_max must be finite and ≥ 0, got {}", self.t_max)));
        }
        if self.monitor_stride == 0 {
            return Err(HeError::InvalidParameter("monitor_stride must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// One row of the monitor series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRecord {
    pub step: usize,
    pub t: f64,
    pub sup_residual: f64,
    pub sup_log_h: f64,
    pub det_drift: f64,
    /// `∫ |residual|²_H dvol`.
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub h: MetricField,
    pub t: f64,
    pub steps: usize,
    pub monitors: Vec<MonitorRecord>,
    pub converged: bool,
}

impl FlowState {
    /// Start from `h0`, which must equal `K` off the interior.
    pub fn new(dom: &GridDomain, h0: MetricField) -> Result<Self> {
        if h0.len() != dom.len() {
            return Err(HeError::Shape(format!("metric has {} nodes, domain {}", h0.len(), dom.len())));
        }
        let id = Mat::identity(h0.rank());
        for i in 0..dom.len() {
            if !dom.is_interior(i) && (*h0.get(i) - id).max_abs() > 1e-12 {
                let (ix, iy) = dom.coords(i);
                return Err(HeError::Precondition(format!("boundary node ({ix}, {iy}) does not carry H = K")));
            }
        }
        let mut h0 = h0;
        h0.pin_to_background(dom);
        Ok(Self {
            h: h0,
            t: 0.0,
            steps: 0,
            monitors: Vec::new(),
            converged: false,
        })
    }

    pub fn last_monitor(&self) -> Option<&MonitorRecord> {
        self.monitors.last()
    }

    /// Turn a non-converged state into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(HeError::NotConverged {
                t: self.t,
                sup_residual: self.monitors.last().map_or(f64::NAN, |m| m.sup_residual),
            })
        }
    }
}

struct Evaluation {
    pass: CurvaturePass,
    record: MonitorRecord,
}

fn evaluate(model: &HolomorphicModel, dom: &GridDomain, state: &FlowState, eps: f64) -> Result<Evaluation> {
    let pass = curvature_pass(model, dom, &state.h)?;
    let (_, norms) = residual_from_pass(dom, &pass, eps, model.rank());
    let sup_residual = norms.iter().cloned().fold(0.0, f64::max);
    let sq: Vec<f64> = norms.iter().map(|n| n * n).collect();
    let sup_log_h = dom
        .active_indices()
        .map(|i| pass.factors[i].log.frobenius())
        .fold(0.0, f64::max);
    let det_drift = dom
        .active_indices()
        .map(|i| (pass.factors[i].det - 1.0).abs())
        .fold(0.0, f64::max);
    let record = MonitorRecord {
        step: state.steps,
        t: state.t,
        sup_residual,
        sup_log_h,
        det_drift,
        energy: dom.integrate(&sq),
    };
    Ok(Evaluation { pass, record })
}

/// Driving term `Ĝ` in the `H`-unitary frame at node `i`.
fn driving_term(model: &HolomorphicModel, pass: &CurvaturePass, cfg: &FlowConfig, i: usize) -> Mat {
    let lf = pass.lambda_f_hat[i];
    let r = model.rank();
    let base = match cfg.kind {
        FlowKind::Perturbed => lf - Mat::identity(r) * (model.lambda_fk()[i].trace().re / r as f64),
        FlowKind::Naive => traceless_part(&lf),
    };
    base + pass.factors[i].log * cfg.epsilon
}

fn apply_update(
    model: &HolomorphicModel,
    dom: &GridDomain,
    state: &mut FlowState,
    pass: &CurvaturePass,
    cfg: &FlowConfig,
) -> Result<()> {
    let r = model.rank();
    let step = state.steps;
    let h_old = &state.h;
    let new_vals = node_map(dom.len(), |i| {
        if !dom.is_interior(i) {
            return Mat::identity(r);
        }
        let f = &pass.factors[i];
        let g = driving_term(model, pass, cfg, i);
        let ghat = g.hermitian_part();
        let mut hn = (f.sqrt * herm_exp(&(ghat * (-2.0 * cfg.dt))) * f.sqrt).hermitian_part();
        if !hn.is_finite() {
            hn = *h_old.get(i) * f64::NAN;
        }
        hn
    });
    if let Some(i) = new_vals.iter().position(|m| !m.is_finite()) {
        let (ix, iy) = dom.coords(i);
        return Err(HeError::NonFinite { ix, iy, step });
    }
    let mut h = MetricField::new_unchecked(EndoField::new(r, new_vals)?);
    if cfg.det_renorm {
        h.normalize_det(dom);
    }
    state.h = h;
    state.t += cfg.dt;
    state.steps += 1;
    Ok(())
}

/// Advance one step. Returns the monitor record of the state before the step.
pub fn flow_step(model: &HolomorphicModel, dom: &GridDomain, state: &mut FlowState, cfg: &FlowConfig) -> Result<MonitorRecord> {
    cfg.validate(dom)?;
    let ev = evaluate(model, dom, state, cfg.epsilon)?;
    apply_update(model, dom, state, &ev.pass, cfg)?;
    Ok(ev.record)
}

/// Flow `h0` until the residual sup norm drops below `cfg.tol_residual` or
/// `t ≥ cfg.t_max`. A run that hits `t_max` comes back with
/// `converged = false` and its full monitor history.
pub fn run_to_stationary(model: &HolomorphicModel, dom: &GridDomain, cfg: &FlowConfig, h0: MetricField) -> Result<FlowState> {
    let state = FlowState::new(dom, h0)?;
    continue_flow(model, dom, cfg, state)
}

/// Same as [`run_to_stationary`] but resumes an existing state.
pub fn continue_flow(model: &HolomorphicModel, dom: &GridDomain, cfg: &FlowConfig, mut state: FlowState) -> Result<FlowState> {
    cfg.validate(dom)?;
    state.converged = false;
    let start = state.steps;
    loop {
        let ev = evaluate(model, dom, &state, cfg.epsilon)?;
        let done = ev.record.sup_residual < cfg.tol_residual;
        let out_of_time = state.t >= cfg.t_max * (1.0 - 1e-12);
        if done || out_of_time || (state.steps - start) % cfg.monitor_stride == 0 {
            state.monitors.push(ev.record);
        }
        if done {
            state.converged = true;
            return Ok(state);
        }
        if out_of_time {
            return Ok(state);
        }
        apply_update(model, dom, &mut state, &ev.pass, cfg)?;
    }
}

/// Run a fixed number of steps, recording monitors every `monitor_stride`.
pub fn run_steps(
    model: &HolomorphicModel,
    dom: &GridDomain,
    cfg: &FlowConfig,
    mut state: FlowState,
    steps: usize,
) -> Result<FlowState> {
    cfg.validate(dom)?;
    for k in 0..=steps {
        let ev = evaluate(model, dom, &state, cfg.epsilon)?;
        if k == steps || k % cfg.monitor_stride == 0 {
            state.monitors.push(ev.record);
        }
        if k == steps {
            state.converged = ev.record.sup_residual < cfg.tol_residual;
            break;
        }
        apply_update(model, dom, &mut state, &ev.pass, cfg)?;
    }
    Ok(state)
}

/// Outcome of checking a monitor series against the decay inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// Sup residual non-increasing (after the first record) within `10·dt`
    /// relative defect per step.
    pub residual_monotone: bool,
    pub first_residual_violation: Option<f64>,
    /// Largest relative increase of the residual between records, per step.
    pub max_residual_increase: f64,
    /// `sup |log h|` below the discrete ODE majorant.
    pub log_bound_holds: bool,
    pub first_bound_violation: Option<f64>,
    /// Largest `sup |log h| − majorant` seen (≤ 0 when the bound holds).
    pub max_bound_excess: f64,
    /// Energy non-increasing within the same defect.
    pub energy_monotone: bool,
}

/// Allowed growth of a monitored quantity across `steps` steps.
pub fn monotone_allowance(prev: f64, dt: f64, steps: usize) -> f64 {
    10.0 * dt * steps as f64 * prev + 1e-13
}

/// Discrete majorant of `sup |log h|` after `steps` steps, from
/// `φ' ≤ 2A − 2εφ` integrated with the scheme's own Euler factor.
pub fn log_h_majorant(b0: f64, a: f64, eps: f64, dt: f64, steps: usize) -> f64 {
    if eps == 0.0 {
        b0 + 2.0 * a * dt * steps as f64
    } else {
        let fixed = a / eps;
        fixed + (b0 - fixed) * (1.0 - 2.0 * eps * dt).powi(steps as i32)
    }
}

/// Check a monitor series for the residual and `|log h|` decay properties.
/// `sup_fk_perp` is `sup |ΛF_K^⊥|` on the domain of the run.
pub fn monitor_decay(monitors: &[MonitorRecord], cfg: &FlowConfig, sup_fk_perp: f64) -> DecayReport {
    let mut rep = DecayReport {
        residual_monotone: true,
        first_residual_violation: None,
        max_residual_increase: 0.0,
        log_bound_holds: true,
        first_bound_violation: None,
        max_bound_excess: f64::NEG_INFINITY,
        energy_monotone: true,
    };
    let Some(first) = monitors.first() else {
        rep.max_bound_excess = 0.0;
        return rep;
    };
    for w in monitors.windows(2).skip(1) {
        let (p, q) = (&w[0], &w[1]);
        let steps = q.step.saturating_sub(p.step).max(1);
        let inc = q.sup_residual - p.sup_residual;
        if p.sup_residual > 0.0 {
            rep.max_residual_increase = rep.max_residual_increase.max(inc / (p.sup_residual * steps as f64));
        }
        if inc > monotone_allowance(p.sup_residual, cfg.dt, steps) && rep.residual_monotone {
            rep.residual_monotone = false;
            rep.first_residual_violation = Some(q.t);
        }
        if q.energy - p.energy > monotone_allowance(p.energy, cfg.dt, steps) {
            rep.energy_monotone = false;
        }
    }
    for m in monitors {
        let b = log_h_majorant(first.sup_log_h, sup_fk_perp, cfg.epsilon, cfg.dt, m.step - first.step);
        let excess = m.sup_log_h - b;
        rep.max_bound_excess = rep.max_bound_excess.max(excess);
        if excess > 1e-9 * (1.0 + b) && rep.log_bound_holds {
            rep.log_bound_holds = false;
            rep.first_bound_violation = Some(m.t);
        }
    }
    rep
}

/// Sup σ-distance between two flows run in lockstep.
#[derive(Debug, Clone)]
pub struct DistanceSeries {
    pub t: Vec<f64>,
    pub sup_sigma: Vec<f64>,
    pub a: FlowState,
    pub b: FlowState,
}

impl DistanceSeries {
    /// First time `sup σ` increased by more than `monotone_allowance`.
    pub fn first_increase(&self, dt: f64, stride: usize) -> Option<f64> {
        self.sup_sigma
            .windows(2)
            .zip(self.t.iter().skip(1))
            .find(|(w, _)| w[1] - w[0] > monotone_allowance(w[0], dt, stride))
            .map(|(_, &t)| t)
    }

    pub fn final_sigma(&self) -> f64 {
        self.sup_sigma.last().copied().unwrap_or(0.0)
    }
}

/// `sup σ(H_a, H_b)` over active nodes.
pub fn sup_sigma(dom: &GridDomain, a: &MetricField, b: &MetricField) -> Result<f64> {
    let mut s: f64 = 0.0;
    for i in dom.active_indices() {
        s = s.max(sigma(a.get(i), b.get(i))?);
    }
    Ok(s)
}

/// Run two flows in lockstep and record `sup σ` every `monitor_stride`
/// steps until both reach `tol_residual` or `t_max`.
pub fn two_flow_distance(
    model: &HolomorphicModel,
    dom: &GridDomain,
    cfg: &FlowConfig,
    h0a: MetricField,
    h0b: MetricField,
) -> Result<DistanceSeries> {
    cfg.validate(dom)?;
    let mut a = FlowState::new(dom, h0a)?;
    let mut b = FlowState::new(dom, h0b)?;
    let mut t = Vec::new();
    let mut sup = Vec::new();
    loop {
        let ea = evaluate(model, dom, &a, cfg.epsilon)?;
        let eb = evaluate(model, dom, &b, cfg.epsilon)?;
        let done = ea.record.sup_residual < cfg.tol_residual && eb.record.sup_residual < cfg.tol_residual;
        let out_of_time = a.t >= cfg.t_max * (1.0 - 1e-12);
        if done || out_of_time || a.steps % cfg.monitor_stride == 0 {
            t.push(a.t);
            sup.push(sup_sigma(dom, &a.h, &b.h)?);
            a.monitors.push(ea.record);
            b.monitors.push(eb.record);
        }
        if done || out_of_time {
            a.converged = ea.record.sup_residual < cfg.tol_residual;
            b.converged = eb.record.sup_residual < cfg.tol_residual;
            break;
        }
        apply_update(model, dom, &mut a, &ea.pass, cfg)?;
        apply_update(model, dom, &mut b, &eb.pass, cfg)?;
    }
    Ok(DistanceSeries { t, sup_sigma: sup, a, b })
}
