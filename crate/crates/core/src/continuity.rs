//! Continuity driver: Dirichlet solves on an exhaustion, then `ε → 0`.

use crate::bundle::{HolomorphicModel, MetricField};
use crate::endo::{eigh, herm_log, EndoField, PdFactors};
use crate::error::{HeError, Result};
use crate::flow::{continue_flow, FlowConfig, FlowState, MonitorRecord};
use crate::grid::{ExhaustionSequence, GridDomain};

/// Values at or below this count as exactly zero in sweep series.
pub const EXACT_ZERO: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: usize,
    pub radius: Option<f64>,
    pub steps: usize,
    pub t: f64,
    pub converged: bool,
    pub sup_residual: f64,
    pub sup_log_h: f64,
    /// `sup |log(h_{j−1}⁻¹ h_j)|` over the interior of the previous stage.
    pub diff_to_previous: Option<f64>,
    pub monitors: Vec<MonitorRecord>,
}

#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub stages: Vec<StageReport>,
    /// Solution on every stage that was solved, in order.
    pub solutions: Vec<MetricField>,
    /// Stopped because consecutive stages agreed to `tol_j`.
    pub stopped_early: bool,
}

impl ExhaustionReport {
    /// Solution on the deepest solved stage.
    pub fn solution(&self) -> &MetricField {
        self.solutions.last().expect("at least one stage is solved")
    }

    pub fn deepest_stage(&self) -> usize {
        self.solutions.len() - 1
    }

    pub fn converged(&self) -> bool {
        !self.stages.is_empty() && self.stages.iter().all(|s| s.converged)
    }

    pub fn differences(&self) -> Vec<f64> {
        self.stages.iter().filter_map(|s| s.diff_to_previous).collect()
    }
}

/// `sup |log(a⁻¹ b)|` (Frobenius) over the interior nodes of `dom`.
pub fn sup_log_ratio(dom: &GridDomain, a: &MetricField, b: &MetricField) -> Result<f64> {
    let mut s: f64 = 0.0;
    for i in dom.interior_indices() {
        let f = PdFactors::new(a.get(i))?;
        let m = f.inv_sqrt * *b.get(i) * f.inv_sqrt;
        s = s.max(herm_log(&m)?.frobenius());
    }
    Ok(s)
}

/// Solve every stage (or up to `j_max`), each seeded from the previous
/// stage's solution extended by `K`, or from `seeds[j]` when given.
/// Stops once two consecutive stages agree to `tol_j` on the interior of
/// the smaller one. A stage that fails to converge is an error carrying the
/// stage index unless `allow_unconverged` is set.
pub(crate) fn solve_exhaustion_seeded(
    model: &HolomorphicModel,
    ex: &ExhaustionSequence,
    cfg: &FlowConfig,
    j_max: Option<usize>,
    tol_j: f64,
    seeds: Option<&[MetricField]>,
    allow_unconverged: bool,
) -> Result<ExhaustionReport> {
    if !(cfg.epsilon > 0.0) {
        return Err(HeError::Precondition(format!("exhaustion solve needs ε > 0, got {}", cfg.epsilon)));
    }
    let last = j_max.unwrap_or(ex.len() - 1).min(ex.len() - 1);
    let mut stages = Vec::new();
    let mut solutions: Vec<MetricField> = Vec::new();
    let mut stopped_early = false;
    for j in 0..=last {
        let dom = ex.stage(j);
        let wrap = |e: HeError| HeError::Stage {
            stage: j,
            source: Box::new(e),
        };
        let seed = match (seeds.and_then(|s| s.get(j)), solutions.last()) {
            (Some(s), _) => s.clone(),
            (None, Some(prev)) => prev.clone(),
            (None, None) => model.background_metric(dom),
        };
        let mut seed = seed;
        seed.pin_to_background(dom);
        let state = FlowState::new(dom, seed).map_err(wrap)?;
        let state = continue_flow(model, dom, cfg, state).map_err(wrap)?;
        let last_rec = *state.monitors.last().expect("flow records its final state");
        if !state.converged && !allow_unconverged {
            return Err(wrap(HeError::NotConverged {
                t: state.t,
                sup_residual: last_rec.sup_residual,
            }));
        }
        let diff = match solutions.last() {
            Some(prev) => Some(sup_log_ratio(ex.stage(j - 1), prev, &state.h).map_err(wrap)?),
            None => None,
        };
        stages.push(StageReport {
            stage: j,
            radius: ex.radii().get(j).copied(),
            steps: state.steps,
            t: state.t,
            converged: state.converged,
            sup_residual: last_rec.sup_residual,
            sup_log_h: last_rec.sup_log_h,
            diff_to_previous: diff,
            monitors: state.monitors,
        });
        solutions.push(state.h);
        if diff.is_some_and(|d| d < tol_j) && j < last {
            stopped_early = true;
            break;
        }
    }
    Ok(ExhaustionReport {
        stages,
        solutions,
        stopped_early,
    })
}

/// Dirichlet solves on the stages of `ex` with the stage-difference stopping
/// rule. On a trivial exhaustion this is a single `run_to_stationary`.
pub fn solve_exhaustion(
    model: &HolomorphicModel,
    ex: &ExhaustionSequence,
    cfg: &FlowConfig,
    j_max: Option<usize>,
    tol_j: f64,
) -> Result<ExhaustionReport> {
    solve_exhaustion_seeded(model, ex, cfg, j_max, tol_j, None, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepClass {
    Ahe,
    Divergent,
    Inconclusive,
}

impl SweepClass {
    pub fn name(self) -> &'static str {
        match self {
            SweepClass::Ahe => "AHE",
            SweepClass::Divergent => "DIVERGENT",
            SweepClass::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for SweepClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// `epsilon` is overwritten per entry.
    pub flow: FlowConfig,
    pub ahe_threshold: f64,
    /// Stage-difference tolerance for exhaustions.
    pub tol_j: f64,
    pub j_max: Option<usize>,
}

impl SweepConfig {
    pub fn new(flow: FlowConfig) -> Self {
        Self {
            flow,
            ahe_threshold: 0.05,
            tol_j: 1e-3,
            j_max: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub epsilon: f64,
    /// `sup |ε log h_ε|`.
    pub sup_eps_logh: f64,
    pub sup_logh: f64,
    /// `∫ |log h_ε| dvol`.
    pub l1_logh: f64,
    pub converged: bool,
    pub steps: usize,
    pub sup_residual: f64,
    /// Hard failure of this entry's solve (non-finite field, degenerate
    /// metric). The exhaustion then holds the seed it started from.
    pub failure: Option<String>,
    pub exhaustion: ExhaustionReport,
}

impl SweepEntry {
    pub fn solution(&self) -> &MetricField {
        self.exhaustion.solution()
    }
}

#[derive(Debug, Clone)]
pub struct EpsilonSweepReport {
    pub entries: Vec<SweepEntry>,
    pub class: SweepClass,
    /// Least-squares slope of `ln sup|ε log h|` against `ln(1/ε)`;
    /// `−∞` when the series is identically zero.
    pub decay_slope: Option<f64>,
    /// Same fit for `ln sup|log h|`.
    pub growth_slope: Option<f64>,
    pub ahe_threshold: f64,
}

impl EpsilonSweepReport {
    pub fn epsilons(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.epsilon).collect()
    }
}

fn lsq_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Log-log slope of `values` against `1/ε` over the strictly positive points.
fn loglog_slope(eps: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > EXACT_ZERO)
        .map(|(&e, &v)| ((1.0 / e).ln(), v.ln()))
        .collect();
    lsq_slope(&pts)
}

/// Decision rule on the converged part of a sweep.
///
/// * AHE: the series `sup|ε log h|` is identically zero, or its last value is
///   below `threshold` and its log-log decay slope is ≤ −0.8.
/// * DIVERGENT: `sup|log h|` grows with log-log slope ≥ 0.8 while
///   `sup|ε log h|` stays above `threshold` with slope ≥ −0.2 (a plateau).
/// * otherwise INCONCLUSIVE.
pub fn classify(eps: &[f64], sup_eps_logh: &[f64], sup_logh: &[f64], threshold: f64) -> (SweepClass, Option<f64>, Option<f64>) {
    if eps.len() < 2 {
        return (SweepClass::Inconclusive, None, None);
    }
    if sup_eps_logh.iter().all(|&v| v <= EXACT_ZERO) {
        return (SweepClass::Ahe, Some(f64::NEG_INFINITY), None);
    }
    let decay = loglog_slope(eps, sup_eps_logh);
    let growth = loglog_slope(eps, sup_logh);
    let last = *sup_eps_logh.last().unwrap();
    let min = sup_eps_logh.iter().cloned().fold(f64::INFINITY, f64::min);
    let class = match (decay, growth) {
        (Some(d), _) if last < threshold && d <= -0.8 => SweepClass::Ahe,
        (Some(d), Some(g)) if g >= 0.8 && min > threshold && d >= -0.2 => SweepClass::Divergent,
        _ => SweepClass::Inconclusive,
    };
    (class, decay, growth)
}

fn log_norm_stats(dom: &GridDomain, h: &MetricField, eps: f64) -> Result<(f64, f64, f64)> {
    let log = h.log_field(dom)?;
    let norms: Vec<f64> = (0..dom.len())
        .map(|i| if dom.is_active(i) { log[i].frobenius() } else { 0.0 })
        .collect();
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    Ok((eps * sup, sup, dom.integrate(&norms)))
}

/// Solve the ε-equation down a decreasing ladder of `epsilons`, each solve
/// warm-started from the previous one, and classify the outcome.
pub fn epsilon_sweep(
    model: &HolomorphicModel,
    ex: &ExhaustionSequence,
    cfg: &SweepConfig,
    epsilons: &[f64],
) -> Result<EpsilonSweepReport> {
    if epsilons.is_empty() {
        return Err(HeError::InvalidParameter("empty epsilon list".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(HeError::Precondition("epsilons must all be > 0".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(HeError::Precondition("epsilons must be strictly decreasing".into()));
    }
    let mut entries: Vec<SweepEntry> = Vec::new();
    for &eps in epsilons {
        let mut fc = cfg.flow;
        fc.epsilon = eps;
        let seeds = entries.last().map(|e| e.exhaustion.solutions.clone());
        let exh = match solve_exhaustion_seeded(model, ex, &fc, cfg.j_max, cfg.tol_j, seeds.as_deref(), true) {
            Ok(exh) => exh,
            Err(e) => {
                let solutions = match entries.last() {
                    Some(prev) => prev.exhaustion.solutions.clone(),
                    None => vec![model.background_metric(ex.stage(0))],
                };
                entries.push(SweepEntry {
                    epsilon: eps,
                    sup_eps_logh: f64::NAN,
                    sup_logh: f64::NAN,
                    l1_logh: f64::NAN,
                    converged: false,
                    steps: 0,
                    sup_residual: f64::NAN,
                    failure: Some(e.to_string()),
                    exhaustion: ExhaustionReport {
                        stages: Vec::new(),
                        solutions,
                        stopped_early: false,
                    },
                });
                continue;
            }
        };
        let deepest = ex.stage(exh.deepest_stage());
        let (sup_eps_logh, sup_logh, l1_logh) = log_norm_stats(deepest, exh.solution(), eps)?;
        let last = exh.stages.last().unwrap();
        entries.push(SweepEntry {
            epsilon: eps,
            sup_eps_logh,
            sup_logh,
            l1_logh,
            converged: exh.converged(),
            steps: exh.stages.iter().map(|s| s.steps).sum(),
            sup_residual: last.sup_residual,
            failure: None,
            exhaustion: exh,
        });
    }
    let ok: Vec<&SweepEntry> = entries.iter().filter(|e| e.converged).collect();
    let eps: Vec<f64> = ok.iter().map(|e| e.epsilon).collect();
    let a: Vec<f64> = ok.iter().map(|e| e.sup_eps_logh).collect();
    let b: Vec<f64> = ok.iter().map(|e| e.sup_logh).collect();
    let (class, decay_slope, growth_slope) = classify(&eps, &a, &b, cfg.ahe_threshold);
    Ok(EpsilonSweepReport {
        entries,
        class,
        decay_slope,
        growth_slope,
        ahe_threshold: cfg.ahe_threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueReport {
    /// `sup|log h| / ∫|log h| dvol` per field; `None` for a zero field.
    pub ratios: Vec<Option<f64>>,
    /// Smallest constant bounding every defined ratio.
    pub a_fit: Option<f64>,
    /// Largest over smallest defined ratio.
    pub growth: Option<f64>,
    /// `growth ≤ MEAN_VALUE_GROWTH_LIMIT`.
    pub bounded: bool,
}

/// Allowed spread of the mean-value ratio across a sweep.
pub const MEAN_VALUE_GROWTH_LIMIT: f64 = 4.0;

/// Empirical mean-value inequality `sup|log h| ≤ A ∫|log h|`.
pub fn mean_value_check(dom: &GridDomain, fields: &[&MetricField]) -> Result<MeanValueReport> {
    let mut ratios = Vec::with_capacity(fields.len());
    for h in fields {
        let (_, sup, l1) = log_norm_stats(dom, h, 1.0)?;
        ratios.push(if l1 > 0.0 && sup > EXACT_ZERO { Some(sup / l1) } else { None });
    }
    let defined: Vec<f64> = ratios.iter().flatten().copied().collect();
    let a_fit = defined.iter().cloned().reduce(f64::max);
    let growth = a_fit.map(|mx| mx / defined.iter().cloned().fold(f64::INFINITY, f64::min));
    Ok(MeanValueReport {
        ratios,
        a_fit,
        growth,
        bounded: growth.is_some_and(|g| g <= MEAN_VALUE_GROWTH_LIMIT),
    })
}

#[derive(Debug, Clone)]
pub struct NormalizedLimit {
    pub epsilon: f64,
    /// `log h_ε / ‖log h_ε‖_{L¹}`.
    pub u: EndoField,
    /// Ascending eigenvalues of `u`, one field per index (zero off the domain).
    pub eigenvalue_fields: Vec<Vec<f64>>,
    /// Largest spatial standard deviation of an eigenvalue field.
    pub spread: f64,
    pub l1_norm: f64,
    /// `sup |tr u|`.
    pub max_trace: f64,
}

/// Normalized `log h_ε` for one converged sweep entry.
pub fn normalized_limit_of(dom: &GridDomain, entry: &SweepEntry) -> Result<NormalizedLimit> {
    let h = entry.solution();
    let log = h.log_field(dom)?;
    let norms: Vec<f64> = (0..dom.len())
        .map(|i| if dom.is_active(i) { log[i].frobenius() } else { 0.0 })
        .collect();
    let l1 = dom.integrate(&norms);
    if !(l1 > 0.0) {
        return Err(HeError::Misuse("log h_ε vanishes; nothing to normalize".into()));
    }
    let r = h.rank();
    let u = log.map(|m| *m * (1.0 / l1));
    let mut eigenvalue_fields = vec![vec![0.0; dom.len()]; r];
    for i in dom.active_indices() {
        let e = eigh(&u[i]);
        for (k, f) in eigenvalue_fields.iter_mut().enumerate() {
            f[i] = e.values()[k];
        }
    }
    let active: Vec<usize> = dom.active_indices().collect();
    let cnt = active.len() as f64;
    let spread = eigenvalue_fields
        .iter()
        .map(|f| {
            let mean = active.iter().map(|&i| f[i]).sum::<f64>() / cnt;
            (active.iter().map(|&i| (f[i] - mean).powi(2)).sum::<f64>() / cnt).sqrt()
        })
        .fold(0.0, f64::max);
    let unorms: Vec<f64> = (0..dom.len())
        .map(|i| if dom.is_active(i) { u[i].frobenius() } else { 0.0 })
        .collect();
    let max_trace = active.iter().map(|&i| u[i].trace().norm()).fold(0.0, f64::max);
    Ok(NormalizedLimit {
        epsilon: entry.epsilon,
        u,
        eigenvalue_fields,
        spread,
        l1_norm: dom.integrate(&unorms),
        max_trace,
    })
}

/// Normalized limit at the smallest converged ε of a DIVERGENT sweep.
pub fn normalized_limit(ex: &ExhaustionSequence, report: &EpsilonSweepReport) -> Result<NormalizedLimit> {
    if report.class != SweepClass::Divergent {
        return Err(HeError::Misuse(format!(
            "normalized limit needs a DIVERGENT sweep, this one is {}",
            report.class
        )));
    }
    let entry = report
        .entries
        .iter()
        .rev()
        .find(|e| e.converged)
        .ok_or_else(|| HeError::Misuse("no converged entry".into()))?;
    normalized_limit_of(ex.stage(entry.exhaustion.deepest_stage()), entry)
}
