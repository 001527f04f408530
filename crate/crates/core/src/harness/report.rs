use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{aggregate_repeats, Aggregate, ExperimentConfig, RunReport};
use crate::error::{Error, Result};

pub const CURVES_HEADER: &str = "epoch,rl_cum_reward,base_cum_reward,rolling_ratio";

/// A finished run: its configuration and one report per repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub config: ExperimentConfig,
    pub reports: Vec<RunReport>,
}

impl RunFile {
    pub fn aggregate(&self) -> Result<Aggregate> {
        aggregate_repeats(&self.reports)
    }
}

pub fn save_run(run: &RunFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(run).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_run(path: impl AsRef<Path>) -> Result<RunFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let run: RunFile = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    run.config.validate()?;
    Ok(run)
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    /// Effective schedule after the desk-scale preset.
    pub epochs: usize,
    pub interactions: usize,
    /// Repeat index, or `None` for the mean over repeats.
    pub repeat: Option<usize>,
    pub repeats: usize,
    pub best_epoch: Option<usize>,
    pub simulated_ratio: f64,
    pub validated_ratio: Option<f64>,
}

/// Writes `epoch,rl_cum_reward,base_cum_reward,rolling_ratio` rows; the
/// ratio column is empty before the first full window.
pub fn write_curves(
    rl: &[f64],
    base: &[f64],
    ratio: &[Option<f64>],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::with_capacity(64 * rl.len());
    text.push_str(CURVES_HEADER);
    text.push('\n');
    for (e, ((r, b), q)) in rl.iter().zip(base).zip(ratio).enumerate() {
        let q = q.map(|q| q.to_string()).unwrap_or_default();
        let _ = writeln!(text, "{e},{r},{b},{q}");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `dir/repeat-<i>/{summary.json,curves.csv}` for every repeat and
/// the mean over repeats as `dir/{summary.json,curves.csv}`.
pub fn emit_report(run: &RunFile, dir: impl AsRef<Path>) -> Result<Aggregate> {
    let dir = dir.as_ref();
    let (epochs, interactions) = run.config.schedule();
    let agg = run.aggregate()?;
    let summary = |repeat: Option<usize>, best: Option<usize>, sim: f64, val: Option<f64>| Summary {
        config: run.config.clone(),
        epochs,
        interactions,
        repeat,
        repeats: run.reports.len(),
        best_epoch: best,
        simulated_ratio: sim,
        validated_ratio: val,
    };
    for r in &run.reports {
        let sub = dir.join(format!("repeat-{}", r.repeat));
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        write_summary(
            &summary(Some(r.repeat), Some(r.best_epoch), r.simulated_ratio, r.validated_ratio),
            &sub.join("summary.json"),
        )?;
        write_curves(&r.rl_cum_reward, &r.base_cum_reward, &r.rolling_ratio, sub.join("curves.csv"))?;
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_summary(
        &summary(None, None, agg.simulated_ratio, agg.validated_ratio),
        &dir.join("summary.json"),
    )?;
    write_curves(&agg.rl_cum_reward, &agg.base_cum_reward, &agg.rolling_ratio, dir.join("curves.csv"))?;
    Ok(agg)
}
