//! Offline re-check of an artifact directory.

use crate::artifacts::{read_csv, sha256_hex, MonitorRow};
use crate::hegf::GridFields;
use crate::manifest::{FieldKind, Manifest, MANIFEST};
use heflow_core::endo::herm_log;
use heflow_core::flow::{monitor_decay, FlowConfig, FlowKind, MonitorRecord};
use std::path::Path;

/// Allowed `|tr log h|` in stored metric fields.
pub const TRACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<String>,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn ok(&mut self, msg: String) {
        self.checks.push(msg);
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }
}

/// Re-check the recorded invariants. Read-only.
pub fn verify(dir: &Path) -> VerifyReport {
    let mut rep = VerifyReport::default();
    if !dir.join(MANIFEST).is_file() {
        rep.fail(format!("missing {MANIFEST} in {}", dir.display()));
        return rep;
    }
    let manifest = match Manifest::read(dir) {
        Ok(m) => m,
        Err(e) => {
            rep.fail(format!("corrupt manifest: {e}"));
            return rep;
        }
    };

    for f in &manifest.files {
        let path = dir.join(&f.path);
        match std::fs::read(&path) {
            Err(_) => rep.fail(format!("missing file {}", f.path)),
            Ok(bytes) if sha256_hex(&bytes) != f.sha256 => rep.fail(format!("content hash mismatch for {}", f.path)),
            Ok(_) => {}
        }
    }
    match std::fs::read(dir.join("config.toml")) {
        Ok(bytes) if sha256_hex(&bytes) != manifest.config_sha256 => rep.fail("config hash mismatch".into()),
        Ok(_) => {}
        Err(_) => rep.fail("missing file config.toml".into()),
    }
    if rep.failures.is_empty() {
        rep.ok(format!("{} files match their hashes", manifest.files.len()));
    }

    for run in manifest.runs.iter().filter(|r| !r.monitors.is_empty()) {
        let path = dir.join(&run.monitors);
        if !path.is_file() {
            continue;
        }
        let rows: Vec<MonitorRow> = match read_csv(&path) {
            Ok(r) => r,
            Err(e) => {
                rep.fail(format!("unreadable monitors for {}: {e}", run.label));
                continue;
            }
        };
        let mons: Vec<MonitorRecord> = rows.iter().map(MonitorRecord::from).collect();
        let drift = mons.iter().map(|m| m.det_drift).fold(0.0, f64::max);
        let drift_bound = if run.det_renorm { 1e-10 } else { 5.0 * run.dt };
        if drift > drift_bound || drift.is_nan() {
            rep.fail(format!("{}: det drift {drift:.3e} exceeds {drift_bound:.1e}", run.label));
        }
        let cfg = FlowConfig {
            epsilon: run.epsilon,
            dt: run.dt,
            t_max: f64::INFINITY,
            tol_residual: 0.0,
            det_renorm: run.det_renorm,
            monitor_stride: 1,
            kind: if run.kind == "naive" { FlowKind::Naive } else { FlowKind::Perturbed },
        };
        let decay = monitor_decay(&mons, &cfg, 0.0);
        if !decay.residual_monotone {
            rep.fail(format!(
                "{}: monotone residual violated at t = {}",
                run.label,
                decay.first_residual_violation.unwrap_or(f64::NAN)
            ));
        }
        if run.converged && mons.last().is_some_and(|m| m.sup_residual.is_nan()) {
            rep.fail(format!("{}: marked converged with a NaN residual", run.label));
        }
    }
    rep.ok(format!("{} monitor series checked (det drift, monotone residual)", manifest.runs.len()));

    for field in manifest.fields.iter().filter(|f| f.kind == FieldKind::Metric) {
        let path = dir.join(&field.path);
        if !path.is_file() {
            continue;
        }
        let g = match GridFields::read(&path) {
            Ok(g) => g,
            Err(e) => {
                rep.fail(format!("{e}"));
                continue;
            }
        };
        if g.fields.len() != field.count {
            rep.fail(format!("{}: {} fields, manifest says {}", field.path, g.fields.len(), field.count));
        }
        let mut worst: f64 = 0.0;
        for m in g.fields.iter().flatten() {
            match herm_log(&m.hermitian_part()) {
                Ok(l) => worst = worst.max(l.trace().norm()),
                Err(_) => worst = f64::INFINITY,
            }
        }
        if worst > TRACE_TOL || worst.is_nan() {
            rep.fail(format!("{}: tr log h = 0 violated (max |tr log h| = {worst:.3e})", field.path));
        }
    }
    rep.ok(format!(
        "{} metric files checked (tr log h = 0)",
        manifest.fields.iter().filter(|f| f.kind == FieldKind::Metric).count()
    ));
    rep
}
