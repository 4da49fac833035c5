//! Output directory, CSV schemas and SVG plots.

use crate::error::{io, CliError, Result};
use heflow_core::continuity::SweepEntry;
use heflow_core::flow::MonitorRecord;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the artifact directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Every file of a run is written through this so the manifest lists it.
#[derive(Debug)]
pub struct ArtifactDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(io(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io(dir))?;
        }
        std::fs::write(&path, bytes).map_err(io(&path))?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub step: usize,
    pub t: f64,
    pub sup_residual: f64,
    pub sup_log_h: f64,
    pub det_drift: f64,
    pub energy: f64,
}

impl From<&MonitorRecord> for MonitorRow {
    fn from(m: &MonitorRecord) -> Self {
        Self {
            step: m.step,
            t: m.t,
            sup_residual: m.sup_residual,
            sup_log_h: m.sup_log_h,
            det_drift: m.det_drift,
            energy: m.energy,
        }
    }
}

impl From<&MonitorRow> for MonitorRecord {
    fn from(m: &MonitorRow) -> Self {
        Self {
            step: m.step,
            t: m.t,
            sup_residual: m.sup_residual,
            sup_log_h: m.sup_log_h,
            det_drift: m.det_drift,
            energy: m.energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sup_eps_logh: f64,
    pub sup_logh: f64,
    pub l1_logh: f64,
    pub converged: bool,
    pub steps: usize,
    pub sup_residual: f64,
    pub failure: String,
}

impl From<&SweepEntry> for SweepRow {
    fn from(e: &SweepEntry) -> Self {
        Self {
            epsilon: e.epsilon,
            sup_eps_logh: e.sup_eps_logh,
            sup_logh: e.sup_logh,
            l1_logh: e.l1_logh,
            converged: e.converged,
            steps: e.steps,
            sup_residual: e.sup_residual,
            failure: e.failure.clone().unwrap_or_default(),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    w.into_inner().expect("in-memory csv flush")
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::Csv {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Minimal line plot. Non-positive values are dropped on log axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, log_x: bool, log_y: bool, series: &[Series]) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().filter(|p| keep(p)).map(|&(x, y)| (tx(x), ty(y))).collect())
        .collect();
    let all: Vec<&(f64, f64)> = pts.iter().flatten().collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(|p| f(p)).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|p| f(p)).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let axis = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.3}") };

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    s += &format!("<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n");
    s += &format!("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", w / 2.0, esc(title));
    s += &format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * m,
        h - 2.0 * m
    );
    for (v, anchor, x, y) in [
        (axis(x0, log_x), "start", m, h - m + 16.0),
        (axis(x1, log_x), "end", w - m, h - m + 16.0),
    ] {
        s += &format!("<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\">{v}</text>\n");
    }
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", m - 4.0, h - m, axis(y0, log_y));
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", m - 4.0, m + 10.0, axis(y1, log_y));
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", w / 2.0, h - 16.0, esc(x_label));
    s += &format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        h / 2.0,
        h / 2.0,
        esc(y_label)
    );
    for (k, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let c = COLORS[k % COLORS.len()];
        if !p.is_empty() {
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            s += &format!("<polyline fill=\"none\" stroke=\"{c}\" stroke-width=\"1.5\" points=\"{}\"/>\n", path.join(" "));
            for &(x, y) in p {
                s += &format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{c}\"/>\n", sx(x), sy(y));
            }
        }
        s += &format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{c}\">{}</text>\n",
            m + 8.0,
            m + 16.0 + 14.0 * k as f64,
            esc(ser.name)
        );
    }
    s += "</svg>\n";
    s
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
