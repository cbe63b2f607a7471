//! File-backed persistence: `gallery.jsonl`, `procedures.jsonl` (the
//! dataset record format), `reports.jsonl` and an append-only
//! `events.log`. Without a directory everything stays in memory.

use crate::gallery::ImageTask;
use hexagons_core::dataset::{self, DatasetError, DrawingProcedure};
use serde_json::Value;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Default)]
pub struct Store {
    dir: Option<PathBuf>,
    pub gallery: Vec<ImageTask>,
    pub procedures: Vec<DrawingProcedure>,
    pub reports: Vec<Value>,
    events: u64,
}

fn read_json_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| StoreError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Replaces `path` atomically.
fn write_atomic(path: &Path, contents: &str) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn append_line(path: &Path, line: &str) -> Result<(), StoreError> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err(path))?;
    writeln!(file, "{line}").map_err(io_err(path))
}

impl Store {
    pub fn in_memory() -> Store {
        Store::default()
    }

    pub fn open(dir: &Path) -> Result<Store, StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let procedures_path = dir.join("procedures.jsonl");
        let procedures = if procedures_path.exists() {
            dataset::load(&procedures_path)?
        } else {
            Vec::new()
        };
        let events_path = dir.join("events.log");
        let events = if events_path.exists() {
            fs::read_to_string(&events_path)
                .map_err(io_err(&events_path))?
                .lines()
                .count() as u64
        } else {
            0
        };
        Ok(Store {
            dir: Some(dir.to_path_buf()),
            gallery: read_json_lines(&dir.join("gallery.jsonl"))?,
            procedures,
            reports: read_json_lines(&dir.join("reports.jsonl"))?,
            events,
        })
    }

    /// Events logged so far, including earlier runs.
    pub fn event_count(&self) -> u64 {
        self.events
    }

    pub fn image(&self, image_id: &str) -> Option<&ImageTask> {
        self.gallery.iter().find(|t| t.image_id == image_id)
    }

    pub fn procedure(&self, id: &str) -> Option<&DrawingProcedure> {
        self.procedures.iter().find(|p| p.id == id)
    }

    pub fn add_image(&mut self, task: ImageTask) -> Result<(), StoreError> {
        self.gallery.push(task);
        self.flush_gallery()
    }

    fn flush_gallery(&self) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let text: String = self
            .gallery
            .iter()
            .map(|t| serde_json::to_string(t).expect("image serializes") + "\n")
            .collect();
        write_atomic(&dir.join("gallery.jsonl"), &text)
    }

    /// Inserts or replaces a procedure by id.
    pub fn put_procedure(&mut self, procedure: DrawingProcedure) -> Result<(), StoreError> {
        match self.procedures.iter_mut().find(|p| p.id == procedure.id) {
            Some(slot) => *slot = procedure,
            None => self.procedures.push(procedure),
        }
        let Some(dir) = &self.dir else { return Ok(()) };
        write_atomic(
            &dir.join("procedures.jsonl"),
            &dataset::to_jsonl(&self.procedures, true),
        )
    }

    pub fn add_report(&mut self, report: Value) -> Result<(), StoreError> {
        if let Some(dir) = &self.dir {
            append_line(&dir.join("reports.jsonl"), &report.to_string())?;
        }
        self.reports.push(report);
        Ok(())
    }

    /// Appends to the event log; returns the event's sequence number.
    pub fn log_event(&mut self, kind: &str, payload: Value) -> Result<u64, StoreError> {
        self.events += 1;
        if let Some(dir) = &self.dir {
            let millis = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0);
            let line = serde_json::json!({
                "seq": self.events,
                "unix_ms": millis,
                "event": kind,
                "data": payload,
            });
            append_line(&dir.join("events.log"), &line.to_string())?;
        }
        Ok(self.events)
    }
}
