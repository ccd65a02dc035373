//! CSV writers. Every file has a header row, fixed column order and
//! numbers printed with Rust's locale-free shortest round-trip formatting.

use std::io::Write;

use crate::harness::{EvalReport, TrainReport};

fn writer<W: Write>(out: W, header: &[&str]) -> crate::Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

pub const TRAIN_HEADER: [&str; 6] = ["round", "episode", "mvno_id", "mean_reward", "noise_scale", "seed"];
pub const EVAL_HEADER: [&str; 6] = ["model_id", "mvno_id", "user_type", "violations", "n_obs", "seed"];
pub const ORACLE_HEADER: [&str; 4] = ["state_id", "best_reward", "best_fractions", "wall_clock"];

/// One row per (seed, round, episode, MVNO or global).
pub fn write_train_report<W: Write>(out: W, reports: &[TrainReport]) -> crate::Result<()> {
    let mut w = writer(out, &TRAIN_HEADER)?;
    for report in reports {
        for row in &report.rows {
            let mvno = row.mvno_id.map_or_else(|| "global".to_string(), |id| id.to_string());
            w.write_record([
                row.round.to_string(),
                row.episode.to_string(),
                mvno,
                row.mean_reward.to_string(),
                row.noise_scale.to_string(),
                report.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per (seed, model, MVNO, user type).
pub fn write_eval_report<W: Write>(out: W, reports: &[EvalReport]) -> crate::Result<()> {
    let mut w = writer(out, &EVAL_HEADER)?;
    for report in reports {
        for cell in &report.cells {
            w.write_record([
                cell.model_id.clone(),
                cell.mvno_id.to_string(),
                cell.user_type.as_str().to_string(),
                cell.violations.to_string(),
                report.n_obs.to_string(),
                report.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub state_id: usize,
    pub best_reward: f64,
    pub best_fractions: Vec<f64>,
    /// Search time in seconds, when recorded.
    pub wall_clock: Option<f64>,
}

/// Fractions are `;`-separated inside one field.
pub fn write_oracle_report<W: Write>(out: W, rows: &[OracleRow]) -> crate::Result<()> {
    let mut w = writer(out, &ORACLE_HEADER)?;
    for row in rows {
        let fractions = row
            .best_fractions
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            row.state_id.to_string(),
            row.best_reward.to_string(),
            fractions,
            row.wall_clock.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
