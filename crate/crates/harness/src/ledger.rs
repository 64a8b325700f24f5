//! Append-only JSONL record of cell progress.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{io_err, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pending,
    Cached,
    Fetched,
    ParseFailed,
    Scored,
}

impl CellStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, CellStatus::ParseFailed | CellStatus::Scored)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub cell: String,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug)]
pub struct RunLedger {
    path: PathBuf,
    file: File,
    /// Latest status per cell.
    latest: BTreeMap<String, CellStatus>,
}

impl RunLedger {
    /// Opens (creating if needed) and replays an existing ledger.
    pub fn open(path: &Path) -> Result<Self, HarnessError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let mut latest = BTreeMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<LedgerRecord>(&line) {
                    Ok(r) => {
                        latest.insert(r.cell, r.status);
                    }
                    // a torn final line from an interrupted write
                    Err(e) => log::warn!("{}: line {}: {e}; ignored", path.display(), i + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
        Ok(RunLedger { path: path.to_path_buf(), file, latest })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn status(&self, cell: &str) -> Option<CellStatus> {
        self.latest.get(cell).copied()
    }

    pub fn is_terminal(&self, cell: &str) -> bool {
        self.status(cell).is_some_and(CellStatus::is_terminal)
    }

    /// Appends a record unless the cell already reached a terminal status.
    pub fn append(&mut self, record: LedgerRecord) -> Result<bool, HarnessError> {
        if self.is_terminal(&record.cell) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(&record).expect("record serializes");
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(io_err(&self.path))?;
        self.latest.insert(record.cell, record.status);
        Ok(true)
    }

    pub fn flush(&mut self) -> Result<(), HarnessError> {
        self.file.flush().map_err(io_err(&self.path))
    }

    /// Number of cells whose latest status is `status`.
    pub fn count(&self, status: CellStatus) -> usize {
        self.latest.values().filter(|s| **s == status).count()
    }

    /// Records per status over the whole file, including superseded ones.
    pub fn record_counts(&self) -> Result<BTreeMap<CellStatus, usize>, HarnessError> {
        let text = std::fs::read_to_string(&self.path).map_err(io_err(&self.path))?;
        let mut out = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            if let Ok(r) = serde_json::from_str::<LedgerRecord>(line) {
                *out.entry(r.status).or_insert(0) += 1;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(cell: &str, status: CellStatus) -> LedgerRecord {
        LedgerRecord { cell: cell.into(), status, cache_key: None, elapsed_ms: None }
    }

    #[test]
    fn terminal_cells_are_never_reopened() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        let mut l = RunLedger::open(&path).unwrap();
        assert!(l.append(rec("a", CellStatus::Pending)).unwrap());
        assert!(l.append(rec("a", CellStatus::Fetched)).unwrap());
        assert!(l.append(rec("a", CellStatus::Scored)).unwrap());
        assert!(!l.append(rec("a", CellStatus::Cached)).unwrap());
        l.append(rec("b", CellStatus::Pending)).unwrap();
        l.flush().unwrap();
        drop(l);

        std::fs::OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"cell\":\"c\",\"sta").unwrap();
        let l = RunLedger::open(&path).unwrap();
        assert_eq!(l.status("a"), Some(CellStatus::Scored));
        assert_eq!(l.status("b"), Some(CellStatus::Pending));
        assert_eq!(l.count(CellStatus::Scored), 1);
        assert_eq!(l.record_counts().unwrap()[&CellStatus::Pending], 2);
    }
}
