//! Line-by-line streaming test with JSONL decisions.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::eprocess::log_threshold;
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::prob::SeededStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnError {
    Abort,
    Skip,
}

/// One output line. `log_wealth` is `null` when it is infinite. Once the
/// threshold is crossed both flags stay `true`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub n: u64,
    pub log_wealth: Option<f64>,
    pub stopped: bool,
    pub e_value_threshold_crossed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamSummary {
    pub observations: u64,
    pub skipped: Vec<(usize, String)>,
    pub crossed_at: Option<u64>,
}

/// Reads observations from `input`, one per line, and writes one JSON
/// object per accepted observation to `output`. Blank lines are ignored.
/// `alpha` defaults to the smallest value of the configured grid.
pub fn run_stream(
    config: &ExperimentConfig,
    alpha: Option<f64>,
    input: impl BufRead,
    mut output: impl Write,
    on_error: OnError,
    mut diagnostics: impl Write,
) -> Result<StreamSummary> {
    let alpha = alpha.unwrap_or_else(|| config.alpha_min());
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let threshold = log_threshold(alpha);
    let mut process = config.build_process(SeededStream::new(config.master_seed, 0))?;
    let mut summary = StreamSummary::default();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let stepped = config
            .parse_observation(&line)
            .map_err(|message| Error::Parse { line: line_no, message })
            .and_then(|x| {
                process.step(x).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })
            });
        let lw = match stepped {
            Ok(lw) => lw,
            Err(e) => match on_error {
                OnError::Abort => return Err(e),
                OnError::Skip => {
                    writeln!(diagnostics, "{e}")?;
                    summary.skipped.push((line_no, e.to_string()));
                    continue;
                }
            },
        };
        let n = process.steps();
        summary.observations = n;
        if summary.crossed_at.is_none() && lw >= threshold {
            summary.crossed_at = Some(n);
        }
        let crossed = summary.crossed_at.is_some();
        let decision = Decision {
            n,
            log_wealth: lw.is_finite().then_some(lw),
            stopped: crossed,
            e_value_threshold_crossed: crossed,
        };
        serde_json::to_writer(&mut output, &decision)?;
        output.write_all(b"\n")?;
    }
    output.flush()?;
    Ok(summary)
}
