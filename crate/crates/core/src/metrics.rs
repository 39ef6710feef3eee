//! Metrics files: the per-trial CSV, its JSON-lines twin, and run summaries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inspag::{InspagRun, InspagSetup, TrialLog};

/// Column order of the round CSV.
pub const ROUND_COLUMNS: [&str; 12] = [
    "round",
    "trial",
    "k",
    "A_k",
    "M_k",
    "alpha_k",
    "f_value",
    "grad_norm",
    "inner_iters",
    "delta_k_tol",
    "bytes",
    "wall_ms",
];

/// One `M` trial of the outer loop. `round` is the cumulative number of
/// aggregation rounds once the trial has been evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub trial: usize,
    /// Index of the iterate the trial proposes.
    pub k: usize,
    #[serde(rename = "A_k")]
    pub a_k: f64,
    #[serde(rename = "M_k")]
    pub m_k: f64,
    pub alpha_k: f64,
    /// `F` at the proposed point.
    pub f_value: f64,
    /// `‖∇F(y)‖` at the extrapolation point.
    pub grad_norm: f64,
    pub inner_iters: usize,
    pub delta_k_tol: f64,
    pub bytes: u64,
    pub wall_ms: f64,
}

impl RoundRecord {
    pub fn from_trials(trials: &[TrialLog]) -> Vec<Self> {
        trials
            .iter()
            .enumerate()
            .map(|(i, t)| Self {
                round: t.rounds,
                trial: i + 1,
                k: t.k + 1,
                a_k: t.a_next,
                m_k: t.m_next,
                alpha_k: t.alpha,
                f_value: t.f_x,
                grad_norm: t.grad_norm_y,
                inner_iters: t.inner_iters,
                delta_k_tol: t.delta_k_tol,
                bytes: t.bytes,
                wall_ms: t.wall_ms,
            })
            .collect()
    }
}

/// Writes the header even when `records` is empty.
pub fn write_round_csv<W: Write>(out: W, records: &[RoundRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(ROUND_COLUMNS).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_round_jsonl<W: Write>(mut out: W, records: &[RoundRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(json_err)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a round CSV, naming the first missing column if the header is incomplete.
pub fn read_round_csv<R: Read>(input: R) -> Result<Vec<RoundRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    if let Some(missing) = ROUND_COLUMNS.iter().find(|c| !headers.iter().any(|h| h == **c)) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("missing column `{missing}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        rows.push(rec.map_err(|e: csv::Error| Error::Parse {
            line: i + 2,
            msg: e.to_string(),
        })?);
    }
    Ok(rows)
}

/// JSON summary of an InSPAG run. The key set is fixed; unknown values are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub dim: usize,
    pub workers: usize,
    pub n_precond: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma: f64,
    pub radius: f64,
    pub r_phi_sq: f64,
    pub l_phi: f64,
    pub mu_phi: f64,
    pub mu_rel: f64,
    pub iterations: usize,
    pub trials: usize,
    pub rounds: usize,
    pub bytes: u64,
    pub total_inner_iters: usize,
    pub final_value: Option<f64>,
    pub final_certificate: Option<f64>,
    pub certificate_met: bool,
    pub reference_value: Option<f64>,
    pub final_gap: Option<f64>,
    pub wall_seconds: f64,
}

/// Problem-level facts the run itself does not carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryContext {
    pub seed: u64,
    pub samples: usize,
    pub dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma: f64,
    pub reference_value: Option<f64>,
    pub wall_seconds: f64,
}

impl RunSummary {
    pub fn from_run(run: &InspagRun, ctx: &SummaryContext) -> Self {
        let InspagSetup {
            radius,
            r_phi_sq,
            l_phi,
            mu_phi,
            mu_rel,
            n_precond,
            workers,
            ..
        } = run.setup;
        let final_value = run.steps.last().map(|s| s.f_x);
        Self {
            command: "run-inspag".into(),
            seed: ctx.seed,
            samples: ctx.samples,
            dim: ctx.dim,
            workers,
            n_precond,
            lambda1: ctx.lambda1,
            lambda2: ctx.lambda2,
            sigma: ctx.sigma,
            radius,
            r_phi_sq,
            l_phi,
            mu_phi,
            mu_rel,
            iterations: run.steps.len(),
            trials: run.trials.len(),
            rounds: run.rounds(),
            bytes: run.ledger.total_bytes(),
            total_inner_iters: run.total_inner_iters(),
            final_value,
            final_certificate: run.certificates.last().copied(),
            certificate_met: run.certificate_met,
            reference_value: ctx.reference_value,
            final_gap: final_value.zip(ctx.reference_value).map(|(f, r)| f - r),
            wall_seconds: ctx.wall_seconds,
        }
    }
}

/// One restart of the standalone Hyperfast runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRow {
    pub t: usize,
    /// `R_t` for the strongly convex schedule, `Δ_k` for the uniformly convex one.
    pub scale: f64,
    pub steps: usize,
    pub certified_gap: f64,
    pub measured_gap: Option<f64>,
    pub certificate_holds: Option<bool>,
}

pub fn write_restart_csv<W: Write>(out: W, rows: &[RestartRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["t", "scale", "steps", "certified_gap", "measured_gap", "certificate_holds"])
        .map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        msg: e.to_string(),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RoundRecord {
        RoundRecord {
            round: 2,
            trial: 1,
            k: 1,
            a_k: 0.5,
            m_k: 2.0,
            alpha_k: 0.5,
            f_value: 0.6,
            grad_norm: 0.1,
            inner_iters: 12,
            delta_k_tol: 1e-9,
            bytes: 1280,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn header_matches_schema() {
        let mut buf = Vec::new();
        write_round_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), ROUND_COLUMNS.join(","));
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![sample(), RoundRecord { round: 4, trial: 2, ..sample() }];
        let mut buf = Vec::new();
        write_round_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_round_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn missing_column_is_named() {
        let text = "round,trial,k,A_k,M_k,alpha_k,grad_norm,inner_iters,delta_k_tol,bytes,wall_ms\n";
        let msg = read_round_csv(text.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("f_value"), "{msg}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let mut buf = Vec::new();
        write_round_csv(&mut buf, &[sample()]).unwrap();
        buf.extend_from_slice(b"x,1,1,1,1,1,1,1,1,1,1,1\n");
        match read_round_csv(buf.as_slice()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn jsonl_lines_parse_back() {
        let mut buf = Vec::new();
        write_round_jsonl(&mut buf, &[sample(), sample()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            let r: RoundRecord = serde_json::from_str(line).unwrap();
            assert_eq!(r, sample());
        }
        assert!(text.contains("\"A_k\""));
    }
}
