use std::fs;
use std::io::Write;

use serde::Serialize;

use crate::{CliError, OutArgs};

/// Writes `text` to `--out` or stdout.
pub fn emit(out: &OutArgs, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    emit(out, &text)
}

/// `precision` significant digits in scientific form; 0 gives the shortest
/// string that parses back to the same double.
pub fn format_value(v: f64, precision: usize) -> String {
    if precision == 0 {
        format!("{v:?}")
    } else {
        format!("{:.*e}", precision - 1, v)
    }
}

pub fn trajectory_csv(
    labels: &[String],
    rows: impl Iterator<Item = (f64, Vec<f64>)>,
    precision: usize,
) -> String {
    let mut s = String::from("t");
    for l in labels {
        s.push(',');
        s.push_str(l);
    }
    s.push('\n');
    for (t, x) in rows {
        s.push_str(&format_value(t, precision));
        for v in x {
            s.push(',');
            s.push_str(&format_value(v, precision));
        }
        s.push('\n');
    }
    s
}
