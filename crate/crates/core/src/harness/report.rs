//! CSV and JSON reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::experiment::ResultRecord;

pub const CSV_HEADER: [&str; 10] = [
    "trial",
    "seed",
    "n",
    "D",
    "candidates",
    "debates",
    "survivors_per_debate",
    "rounds",
    "success",
    "reason",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Argument(format!("unknown format {s:?}"))),
        }
    }
}

/// Survivor counts are joined with `;` in one column; `reason` is empty on
/// success.
pub fn to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        let survivors: Vec<String> = r.survivors_per_debate.iter().map(usize::to_string).collect();
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.diameter.to_string(),
            r.candidates.to_string(),
            r.debates.to_string(),
            survivors.join(";"),
            r.rounds.to_string(),
            r.success.to_string(),
            r.reason.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json(records: &[ResultRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Io(e.to_string()))
}

pub fn render(records: &[ResultRecord], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
    }
}

pub fn emit_report(records: &[ResultRecord], format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, render(records, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRecord {
        ResultRecord {
            trial: 0,
            seed: 42,
            n: 16,
            diameter: 15,
            candidates: 9,
            debates: 30,
            survivors_per_debate: vec![4, 2, 1],
            rounds: 1234,
            success: false,
            reason: Some("2 candidates left, \"odd\"".into()),
        }
    }

    #[test]
    fn csv_layout() {
        let text = to_csv(&[sample()]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "trial,seed,n,D,candidates,debates,survivors_per_debate,rounds,success,reason"
        );
        assert!(lines[1].starts_with("0,42,16,15,9,30,4;2;1,1234,false,"));
    }

    #[test]
    fn json_roundtrip() {
        assert_eq!(to_json(&[]).unwrap(), "[]");
        let recs = vec![
            sample(),
            ResultRecord {
                success: true,
                reason: None,
                ..sample()
            },
        ];
        let back: Vec<ResultRecord> = serde_json::from_str(&to_json(&recs).unwrap()).unwrap();
        assert_eq!(back, recs);
        assert!(to_json(&recs).unwrap().contains("\"D\": 15"));
    }
}
