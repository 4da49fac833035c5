//! Pipelines behind `heflow run`.

use crate::artifacts::{line_plot, to_csv, ArtifactDir, MonitorRow, Series, SweepRow};
use crate::config::{FlowKindSpec, Pipeline, ScenarioConfig};
use crate::error::{core, Result};
use crate::hegf::GridFields;
use crate::manifest::{FieldKind, FieldRecord, Manifest, RunRecord, FORMAT_VERSION, MANIFEST};
use heflow_core::bundle::{HolomorphicModel, MetricField};
use heflow_core::continuity::{
    epsilon_sweep, mean_value_check, normalized_limit, solve_exhaustion, SweepClass, SweepConfig,
};
use heflow_core::endo::{EndoField, Mat, C64};
use heflow_core::flow::{monitor_decay, run_to_stationary, FlowConfig, FlowState, MonitorRecord};
use heflow_core::grid::{ExhaustionSequence, GridDomain};
use heflow_core::stability::{
    degree_chern_weil, slope_compare, total_degree, uniqueness_probe, weighted_degree_gap, DeclaredMetric,
    ProjectionField, SlopeVerdict, SubbundleFrame,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl RunSummary {
    /// Process exit status: 0, or 2 when a mandatory solve did not converge.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.all_converged {
            0
        } else {
            2
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    out: ArtifactDir,
    verdicts: BTreeMap<String, String>,
    runs: Vec<RunRecord>,
    fields: Vec<FieldRecord>,
}

impl Ctx<'_> {
    fn verdict(&mut self, key: &str, value: impl ToString) {
        self.verdicts.insert(key.to_string(), value.to_string());
    }

    fn monitors(&mut self, label: &str, mons: &[MonitorRecord], fc: &FlowConfig, converged: bool, mandatory: bool) -> Result<()> {
        let rel = format!("monitors/{label}.csv");
        if self.cfg.outputs.csv {
            let rows: Vec<MonitorRow> = mons.iter().map(MonitorRow::from).collect();
            self.out.write(&rel, &to_csv(&rows))?;
        }
        if self.cfg.outputs.svg {
            let pts = |f: fn(&MonitorRecord) -> f64| mons.iter().map(|m| (m.t, f(m))).collect();
            let svg = line_plot(
                &format!("{label}: residual"),
                "t",
                "sup norm",
                false,
                true,
                &[
                    Series { name: "sup |residual|", points: pts(|m| m.sup_residual) },
                    Series { name: "energy", points: pts(|m| m.energy) },
                ],
            );
            self.out.write(&format!("plots/{label}.svg"), svg.as_bytes())?;
        }
        self.runs.push(RunRecord {
            label: label.to_string(),
            monitors: if self.cfg.outputs.csv { rel } else { String::new() },
            epsilon: fc.epsilon,
            dt: fc.dt,
            det_renorm: fc.det_renorm,
            kind: match self.cfg.flow.kind {
                FlowKindSpec::Perturbed => "perturbed",
                FlowKindSpec::Naive => "naive",
            }
            .into(),
            converged,
            mandatory,
        });
        Ok(())
    }

    fn field(&mut self, name: &str, kind: FieldKind, n: usize, rank: usize, values: &[&[Mat]]) -> Result<()> {
        if !self.cfg.outputs.fields {
            return Ok(());
        }
        let mut g = GridFields::new(n, rank);
        for v in values {
            g.push(v);
        }
        let rel = format!("fields/{name}.hegf");
        self.out.write(&rel, &g.to_bytes())?;
        self.fields.push(FieldRecord {
            path: rel,
            kind,
            count: values.len(),
        });
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        if self.cfg.outputs.csv {
            self.out.write(name, &to_csv(rows))?;
        }
        Ok(())
    }
}

/// Run the pipeline declared in `cfg`, writing into `out_dir` (or the
/// configured directory).
pub fn run(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.outputs.dir.clone());
    let mut ctx = Ctx {
        cfg,
        out: ArtifactDir::create(&dir)?,
        verdicts: BTreeMap::new(),
        runs: Vec::new(),
        fields: Vec::new(),
    };
    let config_text = cfg.emit();
    ctx.out.write("config.toml", config_text.as_bytes())?;

    let ex = cfg.exhaustion_sequence()?;
    let model = cfg.model(&ex)?;
    let n = ex.base().n();
    ctx.field("lambda_fk", FieldKind::Curvature, n, model.rank(), &[model.lambda_fk().values()])?;
    ctx.verdict("sup_fk_perp", model.sup_fk_perp());

    match cfg.pipeline {
        Pipeline::Single => single(&mut ctx, &model, &ex)?,
        Pipeline::Exhaustion => exhaustion(&mut ctx, &model, &ex)?,
        Pipeline::Sweep => sweep(&mut ctx, &model, &ex)?,
        Pipeline::Uniqueness => uniqueness(&mut ctx, &model, &ex)?,
        Pipeline::Stability => stability(&mut ctx, &model, &ex)?,
    }

    let all_converged = ctx.runs.iter().all(|r| r.converged || !r.mandatory);
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        pipeline: cfg.pipeline.name().into(),
        scenario: cfg.model.scenario.clone(),
        seed: cfg.seed,
        config_sha256: crate::artifacts::sha256_hex(config_text.as_bytes()),
        verdicts: ctx.verdicts,
        runs: ctx.runs,
        fields: ctx.fields,
        all_converged,
        files: ctx.out.files().to_vec(),
    };
    let path = dir.join(MANIFEST);
    std::fs::write(&path, manifest.to_json()).map_err(crate::error::io(&path))?;
    Ok(RunSummary { dir, manifest })
}

fn initial_metric(cfg: &ScenarioConfig, model: &HolomorphicModel, dom: &GridDomain, amplitude: f64) -> Result<MetricField> {
    if amplitude == 0.0 {
        return Ok(model.background_metric(dom));
    }
    let mut h = MetricField::smooth_random_compatible(dom, model.rank(), amplitude, cfg.seed)
        .map_err(core("random initial metric"))?;
    h.pin_to_background(dom);
    Ok(h)
}

fn solve(
    ctx: &mut Ctx,
    model: &HolomorphicModel,
    dom: &GridDomain,
    label: &str,
    amplitude: f64,
) -> Result<FlowState> {
    let fc = ctx.cfg.flow_config(dom, ctx.cfg.flow.epsilon[0]);
    let h0 = initial_metric(ctx.cfg, model, dom, amplitude)?;
    let st = run_to_stationary(model, dom, &fc, h0).map_err(core(format!("flow `{label}`")))?;
    ctx.monitors(label, &st.monitors, &fc, st.converged, true)?;
    let rep = monitor_decay(&st.monitors, &fc, model.sup_fk_perp_on(dom));
    ctx.verdict(&format!("{label}.converged"), st.converged);
    ctx.verdict(&format!("{label}.residual_monotone"), rep.residual_monotone);
    ctx.verdict(&format!("{label}.log_bound_holds"), rep.log_bound_holds);
    if let Some(last) = st.last_monitor() {
        ctx.verdict(&format!("{label}.sup_residual"), last.sup_residual);
        ctx.verdict(&format!("{label}.sup_log_h"), last.sup_log_h);
    }
    Ok(st)
}

fn single(ctx: &mut Ctx, model: &HolomorphicModel, ex: &ExhaustionSequence) -> Result<()> {
    let dom = ex.base();
    let st = solve(ctx, model, dom, "single", ctx.cfg.flow.init_amplitude)?;
    let eps = ctx.cfg.flow.epsilon[0];
    if eps > 0.0 {
        let bound = model.sup_fk_perp() / eps;
        let sup = st.last_monitor().map_or(0.0, |m| m.sup_log_h);
        ctx.verdict("single.sup_log_h_within_bound", sup <= bound + 1e-6);
    }
    ctx.field("metric", FieldKind::Metric, dom.n(), model.rank(), &[st.h.values()])
}

#[derive(Serialize)]
struct StageRow {
    stage: usize,
    radius: f64,
    steps: usize,
    t: f64,
    converged: bool,
    sup_residual: f64,
    sup_log_h: f64,
    diff_to_previous: f64,
}

fn exhaustion(ctx: &mut Ctx, model: &HolomorphicModel, ex: &ExhaustionSequence) -> Result<()> {
    let fc = ctx.cfg.flow_config(ex.base(), ctx.cfg.flow.epsilon[0]);
    let e = &ctx.cfg.exhaustion;
    let rep = solve_exhaustion(model, ex, &fc, e.j_max, e.tol_j).map_err(core("exhaustion"))?;
    let mut rows = Vec::new();
    for st in &rep.stages {
        ctx.monitors(&format!("stage_{}", st.stage), &st.monitors, &fc, st.converged, true)?;
        rows.push(StageRow {
            stage: st.stage,
            radius: st.radius.unwrap_or(0.0),
            steps: st.steps,
            t: st.t,
            converged: st.converged,
            sup_residual: st.sup_residual,
            sup_log_h: st.sup_log_h,
            diff_to_previous: st.diff_to_previous.unwrap_or(f64::NAN),
        });
    }
    ctx.csv("stages.csv", &rows)?;
    let d = rep.differences();
    ctx.verdict("exhaustion.stages_solved", rep.stages.len());
    ctx.verdict("exhaustion.stopped_early", rep.stopped_early);
    ctx.verdict("exhaustion.differences_decrease", d.windows(2).all(|w| w[1] < w[0]));
    ctx.verdict("exhaustion.converged", rep.converged());
    let vals: Vec<&[Mat]> = rep.solutions.iter().map(|h| h.values()).collect();
    ctx.field("metric", FieldKind::Metric, ex.base().n(), model.rank(), &vals)
}

fn sweep(ctx: &mut Ctx, model: &HolomorphicModel, ex: &ExhaustionSequence) -> Result<()> {
    let eps = ctx.cfg.flow.epsilon.clone();
    let mut sc = SweepConfig::new(ctx.cfg.flow_config(ex.base(), eps[0]));
    sc.ahe_threshold = ctx.cfg.sweep.ahe_threshold;
    sc.tol_j = ctx.cfg.exhaustion.tol_j;
    sc.j_max = ctx.cfg.exhaustion.j_max;
    let rep = epsilon_sweep(model, ex, &sc, &eps).map_err(core("epsilon sweep"))?;
    for (k, e) in rep.entries.iter().enumerate() {
        let mut fc = sc.flow;
        fc.epsilon = e.epsilon;
        for st in &e.exhaustion.stages {
            ctx.monitors(&format!("eps{k}_stage{}", st.stage), &st.monitors, &fc, st.converged, true)?;
        }
        if e.failure.is_some() {
            ctx.runs.push(RunRecord {
                label: format!("eps{k}"),
                monitors: String::new(),
                epsilon: e.epsilon,
                dt: fc.dt,
                det_renorm: fc.det_renorm,
                kind: "perturbed".into(),
                converged: false,
                mandatory: true,
            });
        }
        let vals: Vec<&[Mat]> = e.exhaustion.solutions.iter().map(|h| h.values()).collect();
        ctx.field(&format!("metric_eps{k}"), FieldKind::Metric, ex.base().n(), model.rank(), &vals)?;
    }
    let rows: Vec<SweepRow> = rep.entries.iter().map(SweepRow::from).collect();
    ctx.csv("sweep.csv", &rows)?;
    if ctx.cfg.outputs.svg {
        let pts = |f: fn(&SweepRow) -> f64| rows.iter().filter(|r| r.converged).map(|r| (1.0 / r.epsilon, f(r))).collect();
        let svg = line_plot(
            "epsilon sweep",
            "1/ε",
            "sup norm",
            true,
            true,
            &[
                Series { name: "sup |ε log h|", points: pts(|r| r.sup_eps_logh) },
                Series { name: "sup |log h|", points: pts(|r| r.sup_logh) },
            ],
        );
        ctx.out.write("plots/sweep.svg", svg.as_bytes())?;
    }
    ctx.verdict("sweep.class", rep.class);
    ctx.verdict("sweep.decay_slope", fmt_opt(rep.decay_slope));
    ctx.verdict("sweep.growth_slope", fmt_opt(rep.growth_slope));
    let deepest = ex.stage(ex.len() - 1);
    let fields: Vec<&MetricField> = rep
        .entries
        .iter()
        .filter(|e| e.converged && e.exhaustion.solutions.len() == ex.len())
        .map(|e| e.solution())
        .collect();
    if !fields.is_empty() {
        let mv = mean_value_check(deepest, &fields).map_err(core("mean value check"))?;
        ctx.verdict("sweep.mean_value_bounded", mv.bounded);
        ctx.verdict("sweep.mean_value_growth", fmt_opt(mv.growth));
    }
    if rep.class == SweepClass::Divergent {
        let nl = normalized_limit(ex, &rep).map_err(core("normalized limit"))?;
        ctx.verdict("limit.epsilon", nl.epsilon);
        ctx.verdict("limit.eigenvalue_spread", nl.spread);
        ctx.verdict("limit.l1_norm", nl.l1_norm);
        let levels: Vec<String> = nl
            .eigenvalue_fields
            .iter()
            .map(|f| {
                let act: Vec<f64> = deepest.active_indices().map(|i| f[i]).collect();
                (act.iter().sum::<f64>() / act.len() as f64).to_string()
            })
            .collect();
        ctx.verdict("limit.mean_eigenvalues", levels.join(" "));
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn uniqueness(ctx: &mut Ctx, model: &HolomorphicModel, ex: &ExhaustionSequence) -> Result<()> {
    let dom = ex.base();
    let amp = if ctx.cfg.flow.init_amplitude > 0.0 { ctx.cfg.flow.init_amplitude } else { 1.0 };
    let a = solve(ctx, model, dom, "from_background", 0.0)?;
    let b = solve(ctx, model, dom, "from_random", amp)?;
    ctx.field("metric", FieldKind::Metric, dom.n(), model.rank(), &[a.h.values(), b.h.values()])?;
    if !(a.converged && b.converged) {
        ctx.verdict("uniqueness.verdict", "not run: a flow did not converge");
        return Ok(());
    }
    let eps = ctx.cfg.flow.epsilon[0];
    let rep = uniqueness_probe(model, dom, &a.h, &b.h, eps, Some(ctx.cfg.flow.tol_residual))
        .map_err(core("uniqueness probe"))?;
    ctx.verdict("uniqueness.verdict", format!("{:?}", rep.verdict).to_uppercase());
    ctx.verdict("uniqueness.max_deviation_from_one", rep.max_deviation_from_one);
    ctx.verdict("uniqueness.identity_defect", rep.identity_defect);
    ctx.verdict("uniqueness.identity_scale", rep.identity_scale);
    Ok(())
}

#[derive(Serialize)]
struct StabilityRow {
    subbundle: String,
    metric: &'static str,
    rank: usize,
    degree: f64,
    slope: f64,
    dbar_pi_l2: f64,
    verdict: String,
}

/// Coordinate lines `e_k` preserved by `∂̄_E`: column `k` of `a` vanishes off
/// the diagonal everywhere.
fn invariant_lines(model: &HolomorphicModel) -> Vec<usize> {
    let r = model.rank();
    (0..r)
        .filter(|&k| model.a_field().values().iter().all(|a| (0..r).all(|j| j == k || a[(j, k)] == C64::new(0.0, 0.0))))
        .collect()
}

fn line_frame(len: usize, r: usize, k: usize) -> Result<SubbundleFrame> {
    let mut b = Mat::zeros(r);
    b[(k, 0)] = C64::new(1.0, 0.0);
    SubbundleFrame::new(1, EndoField::constant(len, b)).map_err(core("sub-bundle frame"))
}

fn stability(ctx: &mut Ctx, model: &HolomorphicModel, ex: &ExhaustionSequence) -> Result<()> {
    let dom = ex.base();
    let st = solve(ctx, model, dom, "solve", ctx.cfg.flow.init_amplitude)?;
    ctx.field("metric", FieldKind::Metric, dom.n(), model.rank(), &[st.h.values()])?;
    let r = model.rank();
    let k = model.background_metric(dom);
    let mut rows = Vec::new();
    let mut worst: Option<SlopeVerdict> = None;
    for (mname, h, declared) in [("K", &k, DeclaredMetric::Background), ("H", &st.h, DeclaredMetric::Evolved)] {
        let tot = total_degree(model, dom, h).map_err(core("total degree"))?;
        rows.push(StabilityRow {
            subbundle: "E".into(),
            metric: mname,
            rank: r,
            degree: tot.degree,
            slope: tot.slope,
            dbar_pi_l2: tot.dbar_pi_l2,
            verdict: String::new(),
        });
        for line in invariant_lines(model) {
            if r < 2 {
                break;
            }
            let frame = line_frame(dom.len(), r, line)?;
            let pi = ProjectionField::from_frame(dom, &frame, h, declared).map_err(core("projection"))?;
            let d = degree_chern_weil(model, dom, h, &pi).map_err(core("sub-bundle degree"))?;
            let cmp = slope_compare(&d, &tot, None).map_err(core("slope comparison"))?;
            if mname == "K" {
                worst = Some(match (worst, cmp.verdict) {
                    (Some(SlopeVerdict::Destabilizing), _) | (_, SlopeVerdict::Destabilizing) => SlopeVerdict::Destabilizing,
                    (Some(SlopeVerdict::SemistableBorderline), _) | (_, SlopeVerdict::SemistableBorderline) => {
                        SlopeVerdict::SemistableBorderline
                    }
                    _ => SlopeVerdict::StableWitnessPassed,
                });
                if r == 2 {
                    let w = weighted_degree_gap(&[-1.0, 1.0], &[d], &tot).map_err(core("weighted gap"))?;
                    ctx.verdict(&format!("stability.w_e{}", line + 1), w.degree_form);
                }
            }
            rows.push(StabilityRow {
                subbundle: format!("e{}", line + 1),
                metric: mname,
                rank: 1,
                degree: d.degree,
                slope: d.slope,
                dbar_pi_l2: d.dbar_pi_l2,
                verdict: cmp.verdict.to_string(),
            });
        }
    }
    ctx.csv("stability.csv", &rows)?;
    ctx.verdict(
        "stability.verdict",
        worst.map_or("NO_PROPER_SUBBUNDLE_WITNESS", SlopeVerdict::name),
    );
    Ok(())
}
