use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::district::{DecisionVector, ObjectiveTriple, FIELD_COUNT, FIELD_NAMES};

/// Header of the archive CSV.
pub const ARCHIVE_COLUMNS: [&str; 15] = [
    "node_0",
    "node_1",
    "node_2",
    "node_3",
    "chp_type",
    "chiller_type",
    "hot_water_temp",
    "hot_water_summer_reset",
    "cold_water_temp",
    "cold_water_winter_reset",
    "lcc",
    "ghg",
    "walkscore",
    "feasible",
    "generation",
];

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("archive i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("archive csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("archive row {row}: {message}")]
    Format { row: usize, message: String },
}

/// One evaluation as recorded by the GA.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchivedSolution {
    pub generation: usize,
    pub decision: DecisionVector,
    pub objectives: Option<ObjectiveTriple>,
}

/// Append-only record of every evaluation, in evaluation order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionArchive {
    entries: Vec<ArchivedSolution>,
}

impl SolutionArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: ArchivedSolution) {
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchivedSolution] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &ArchivedSolution> {
        self.entries.iter()
    }

    /// Feasible entries with their objectives.
    pub fn feasible(&self) -> impl Iterator<Item = (&DecisionVector, ObjectiveTriple)> {
        self.entries.iter().filter_map(|e| e.objectives.map(|o| (&e.decision, o)))
    }

    pub fn decisions(&self) -> Vec<DecisionVector> {
        self.entries.iter().map(|e| e.decision).collect()
    }

    /// Highest generation index present, if any.
    pub fn last_generation(&self) -> Option<usize> {
        self.entries.iter().map(|e| e.generation).max()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ArchiveError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(ARCHIVE_COLUMNS)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.decision.to_array().iter().map(|v| v.to_string()).collect();
            match e.objectives {
                Some(o) => {
                    row.extend([o.lcc.to_string(), o.ghg.to_string(), o.walkscore.to_string()]);
                    row.push("1".into());
                }
                None => {
                    row.extend([String::new(), String::new(), String::new()]);
                    row.push("0".into());
                }
            }
            row.push(e.generation.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, ArchiveError> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != ARCHIVE_COLUMNS {
            return Err(ArchiveError::Format { row: 0, message: format!("unexpected header {header:?}") });
        }
        let mut archive = Self::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let bad = |message: String| ArchiveError::Format { row, message };
            let mut v = [0i32; FIELD_COUNT];
            for f in 0..FIELD_COUNT {
                v[f] = record[f]
                    .parse()
                    .map_err(|_| bad(format!("{} is not an integer: {:?}", FIELD_NAMES[f], &record[f])))?;
            }
            let feasible = match &record[13] {
                "1" => true,
                "0" => false,
                other => return Err(bad(format!("feasible flag {other:?}"))),
            };
            let objectives = if feasible {
                let mut o = [0.0; 3];
                for k in 0..3 {
                    o[k] = record[10 + k].parse().map_err(|_| bad(format!("objective {:?}", &record[10 + k])))?;
                }
                Some(ObjectiveTriple::from_array(o))
            } else {
                None
            };
            let generation = record[14].parse().map_err(|_| bad(format!("generation {:?}", &record[14])))?;
            archive.push(ArchivedSolution { generation, decision: DecisionVector::from_array(v), objectives });
        }
        Ok(archive)
    }

    pub fn save(&self, path: &Path) -> Result<(), ArchiveError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self, ArchiveError> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_lossless() {
        let mut a = SolutionArchive::new();
        a.push(ArchivedSolution {
            generation: 0,
            decision: DecisionVector::from_array([1, 5, 0, 0, 2, 3, 77, 4, 6, 1]),
            objectives: Some(ObjectiveTriple::new(-123.456789012345, 0.1 + 0.2, 5.0)),
        });
        a.push(ArchivedSolution {
            generation: 3,
            decision: DecisionVector::from_array([0, 0, 0, 0, 2, 3, 77, 4, 6, 1]),
            objectives: None,
        });
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_0,node_1"));
        assert!(text.lines().nth(2).unwrap().ends_with(",,,,0,3"));
        assert_eq!(SolutionArchive::read_csv(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "a,b\n1,2\n";
        assert!(matches!(SolutionArchive::read_csv(text.as_bytes()), Err(ArchiveError::Format { row: 0, .. })));
    }
}
