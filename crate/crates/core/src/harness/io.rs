//! CSV helpers. Floats are written in Rust's shortest round-trip form so
//! artifacts reload exactly and are byte-stable across runs.

use std::path::Path;

use super::HarnessError;
use crate::cgan::IterationStats;
use crate::district::{DecisionVector, ObjectiveTriple, FIELD_COUNT, FIELD_NAMES};

pub(crate) fn num(v: f64) -> String {
    v.to_string()
}

pub(crate) fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

pub(crate) fn write_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<String>]) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

pub(crate) fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

pub(crate) fn parse<T: std::str::FromStr>(path: &Path, field: &str, text: &str) -> Result<T, HarnessError> {
    text.parse().map_err(|_| HarnessError::Format {
        path: path.display().to_string(),
        message: format!("bad {field} value {text:?}"),
    })
}

pub(crate) fn decision_header() -> Vec<String> {
    FIELD_NAMES.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn decision_cells(d: &DecisionVector) -> Vec<String> {
    d.to_array().iter().map(|v| v.to_string()).collect()
}

pub(crate) fn objective_cells(o: &ObjectiveTriple) -> Vec<String> {
    vec![num(o.lcc), num(o.ghg), num(o.walkscore)]
}

/// Writes `10 decision columns, lcc, ghg, walkscore`.
pub fn write_objective_rows(path: &Path, rows: &[(DecisionVector, ObjectiveTriple)]) -> Result<(), HarnessError> {
    let mut header = decision_header();
    header.extend(["lcc", "ghg", "walkscore"].map(String::from));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(d, o)| {
            let mut r = decision_cells(d);
            r.extend(objective_cells(o));
            r
        })
        .collect();
    write_csv(path, &header, &body)
}

/// Reads the leading decision and `lcc, ghg, walkscore` columns of a CSV
/// written by [`write_objective_rows`] or the vetted-solution writer.
pub fn read_objective_rows(path: &Path) -> Result<Vec<(DecisionVector, ObjectiveTriple)>, HarnessError> {
    let (header, rows) = read_csv(path)?;
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| HarnessError::Format {
            path: path.display().to_string(),
            message: format!("missing column {name}"),
        })
    };
    let (l, g, w) = (col("lcc")?, col("ghg")?, col("walkscore")?);
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let mut v = [0i32; FIELD_COUNT];
        for f in 0..FIELD_COUNT {
            v[f] = parse(path, FIELD_NAMES[f], &r[f])?;
        }
        let o = ObjectiveTriple::new(
            parse(path, "lcc", &r[l])?,
            parse(path, "ghg", &r[g])?,
            parse(path, "walkscore", &r[w])?,
        );
        out.push((DecisionVector::from_array(v), o));
    }
    Ok(out)
}

pub(crate) const STATS_HEADER: [&str; 7] =
    ["iteration", "d_loss", "d_loss_real", "d_loss_fake", "g_loss", "acc_real", "acc_fake"];

pub(crate) fn stats_cells(s: &IterationStats) -> Vec<String> {
    vec![
        s.iteration.to_string(),
        num(s.d_loss),
        num(s.d_loss_real),
        num(s.d_loss_fake),
        num(s.g_loss),
        num(s.acc_real),
        num(s.acc_fake),
    ]
}

pub(crate) fn parse_stats(path: &Path, r: &[String]) -> Result<IterationStats, HarnessError> {
    Ok(IterationStats {
        iteration: parse(path, "iteration", &r[0])?,
        d_loss: parse(path, "d_loss", &r[1])?,
        d_loss_real: parse(path, "d_loss_real", &r[2])?,
        d_loss_fake: parse(path, "d_loss_fake", &r[3])?,
        g_loss: parse(path, "g_loss", &r[4])?,
        acc_real: parse(path, "acc_real", &r[5])?,
        acc_fake: parse(path, "acc_fake", &r[6])?,
    })
}

pub(crate) fn create_dir(path: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
