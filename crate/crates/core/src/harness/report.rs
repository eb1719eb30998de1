use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use super::sweep::SweepResultRow;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "snr_db,g,scheme,noise_model,receiver,trials,ber_mean,ber_stderr,\
mean_abs_sync_error,sync_error_std,miss_rate,cfo_rmse_hz,wall_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// Nine significant digits; `NaN` for missing statistics.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.8e}")
    }
}

fn rounded(x: f64) -> Value {
    if x.is_finite() {
        Value::from(format_float(x).parse::<f64>().expect("round trip"))
    } else {
        Value::Null
    }
}

fn csv_line(r: &SweepResultRow) -> String {
    [
        format_float(r.snr_db),
        r.g.to_string(),
        r.scheme.to_string(),
        r.noise_model.to_string(),
        r.receiver.to_string(),
        r.trials.to_string(),
        format_float(r.ber_mean),
        format_float(r.ber_stderr),
        format_float(r.mean_abs_sync_error),
        format_float(r.sync_error_std),
        format_float(r.miss_rate),
        format_float(r.cfo_rmse_hz),
        format_float(r.wall_time_s),
    ]
    .join(",")
}

fn json_row(r: &SweepResultRow) -> Value {
    serde_json::json!({
        "snr_db": rounded(r.snr_db),
        "g": r.g,
        "scheme": r.scheme,
        "noise_model": r.noise_model,
        "receiver": r.receiver,
        "trials": r.trials,
        "ber_mean": rounded(r.ber_mean),
        "ber_stderr": rounded(r.ber_stderr),
        "mean_abs_sync_error": rounded(r.mean_abs_sync_error),
        "sync_error_std": rounded(r.sync_error_std),
        "miss_rate": rounded(r.miss_rate),
        "cfo_rmse_hz": rounded(r.cfo_rmse_hz),
        "wall_time_s": rounded(r.wall_time_s),
    })
}

/// Writes the table to `out` in `format`.
pub fn render_results(rows: &[SweepResultRow], format: OutputFormat, out: &mut impl Write) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidSweep("no rows to write".into()));
    }
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(out, "{}", csv_line(r))?;
            }
        }
        OutputFormat::Json => {
            let arr = Value::Array(rows.iter().map(json_row).collect());
            serde_json::to_writer_pretty(&mut *out, &arr)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn emit_results(rows: &[SweepResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    render_results(rows, format, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Parses the JSON form back; `null` statistics come back as NaN.
pub fn read_json_results(path: &Path) -> Result<Vec<SweepResultRow>> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let Value::Array(rows) = v else {
        return Err(Error::InvalidSweep("expected a JSON array".into()));
    };
    rows.into_iter()
        .map(|row| {
            let num = |k: &str| row.get(k).and_then(Value::as_f64).unwrap_or(f64::NAN);
            let int = |k: &str| {
                row.get(k)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidSweep(format!("missing field {k}")))
            };
            let tag = |k: &str| {
                row.get(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidSweep(format!("missing field {k}")))
            };
            Ok(SweepResultRow {
                snr_db: num("snr_db"),
                g: int("g")? as usize,
                scheme: serde_json::from_value(tag("scheme")?)?,
                noise_model: serde_json::from_value(tag("noise_model")?)?,
                receiver: serde_json::from_value(tag("receiver")?)?,
                trials: int("trials")? as usize,
                ber_mean: num("ber_mean"),
                ber_stderr: num("ber_stderr"),
                mean_abs_sync_error: num("mean_abs_sync_error"),
                sync_error_std: num("sync_error_std"),
                miss_rate: num("miss_rate"),
                cfo_rmse_hz: num("cfo_rmse_hz"),
                wall_time_s: num("wall_time_s"),
            })
        })
        .collect()
}
