//! Append-only event log.
//!
//! ## Line format
//!
//! One record per line:
//!
//! ```text
//! <crc32 of JSON, 8 lowercase hex digits> <SP> {"seq":N,"kind":"...","payload":{...}} <LF>
//! ```
//!
//! Sequence numbers increase by exactly one from the first record of the
//! file. A freshly created log starts at 1; a compacted log starts one past
//! the last sequence of the log it replaced. A damaged final record is
//! dropped (and the file truncated) with a warning; damage anywhere else is
//! a [`Error::CorruptLog`].

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Classification, Decision, IncidentNumber, Report, ReportId, Submission, SubmissionId,
    SubmissionState, TaxonomyNamespace,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "payload",
    rename_all = "kebab-case",
    rename_all_fields = "camelCase"
)]
pub enum Event {
    /// New incident together with its first report.
    IncidentCreated {
        number: IncidentNumber,
        first_submitter: String,
        report: Report,
    },
    ReportAdded {
        report: Report,
    },
    ReportRemoved {
        report_id: ReportId,
        retire_incident: bool,
    },
    ReportReassigned {
        report_id: ReportId,
        target: IncidentNumber,
        retire_source: bool,
    },
    /// Burned number without a live incident; written by compaction.
    IncidentRetired {
        number: IncidentNumber,
    },
    NamespaceRegistered {
        namespace: TaxonomyNamespace,
    },
    ClassificationAdded {
        classification: Classification,
    },
    ClassificationRemoved {
        incident_number: IncidentNumber,
        namespace: String,
        tag: String,
    },
    SubmissionCreated {
        submission: Submission,
    },
    /// Reviewer decision. An acceptance carries the report it produced so
    /// that storing the report and closing the submission is one record.
    SubmissionDecided {
        submission_id: SubmissionId,
        state: SubmissionState,
        decision: Decision,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        report: Option<Report>,
        #[serde(default)]
        new_incident: bool,
    },
    /// Allocation counters; first record of a compacted log.
    Checkpoint {
        next_incident: IncidentNumber,
        next_report: ReportId,
        next_submission: SubmissionId,
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::IncidentCreated { .. } => "incident-created",
            Event::ReportAdded { .. } => "report-added",
            Event::ReportRemoved { .. } => "report-removed",
            Event::ReportReassigned { .. } => "report-reassigned",
            Event::IncidentRetired { .. } => "incident-retired",
            Event::NamespaceRegistered { .. } => "namespace-registered",
            Event::ClassificationAdded { .. } => "classification-added",
            Event::ClassificationRemoved { .. } => "classification-removed",
            Event::SubmissionCreated { .. } => "submission-created",
            Event::SubmissionDecided { .. } => "submission-decided",
            Event::Checkpoint { .. } => "checkpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

pub fn encode_record(record: &LogRecord) -> Vec<u8> {
    let json = serde_json::to_vec(record).expect("log records serialize");
    let crc = crc32fast::hash(&json);
    let mut line = format!("{crc:08x} ").into_bytes();
    line.extend_from_slice(&json);
    line.push(b'\n');
    line
}

fn decode_line(line: &[u8]) -> std::result::Result<LogRecord, String> {
    if line.len() < 10 || line[8] != b' ' {
        return Err("missing checksum prefix".into());
    }
    let crc_hex = std::str::from_utf8(&line[..8]).map_err(|_| "checksum is not ascii")?;
    let expected = u32::from_str_radix(crc_hex, 16).map_err(|_| "checksum is not hex")?;
    let json = &line[9..];
    if crc32fast::hash(json) != expected {
        return Err("checksum mismatch".into());
    }
    serde_json::from_slice(json).map_err(|e| format!("undecodable record: {e}"))
}

/// Result of reading a log: the valid records plus recovery notes.
#[derive(Debug, Clone, Default)]
pub struct Replay {
    pub records: Vec<LogRecord>,
    pub warnings: Vec<String>,
    /// Byte length of the valid prefix.
    pub valid_len: u64,
}

impl Replay {
    pub fn last_seq(&self) -> Option<u64> {
        self.records.last().map(|r| r.seq)
    }
}

/// Parses log bytes. Pure: equal bytes give equal results.
pub fn read_records(bytes: &[u8]) -> Result<Replay> {
    let mut replay = Replay::default();
    let mut offset = 0usize;
    let mut line_no = 0usize;
    while offset < bytes.len() {
        line_no += 1;
        let (line, terminated, next) = match bytes[offset..].iter().position(|&b| b == b'\n') {
            Some(i) => (&bytes[offset..offset + i], true, offset + i + 1),
            None => (&bytes[offset..], false, bytes.len()),
        };
        let is_last = next >= bytes.len();
        let decoded = decode_line(line).and_then(|record| {
            match replay.records.last() {
                Some(prev) if record.seq != prev.seq + 1 => Err(format!(
                    "sequence {} follows {}",
                    record.seq, prev.seq
                )),
                None if record.seq == 0 => Err("sequence numbers start at 1".into()),
                _ => Ok(record),
            }
        });
        match decoded {
            Ok(record) if terminated => {
                replay.records.push(record);
                replay.valid_len = next as u64;
            }
            Ok(_) => {
                replay
                    .warnings
                    .push(format!("record {line_no} is missing its line terminator; dropped"));
                break;
            }
            Err(reason) if is_last => {
                replay
                    .warnings
                    .push(format!("torn trailing record {line_no} dropped: {reason}"));
                break;
            }
            Err(reason) => return Err(Error::CorruptLog { line: line_no, reason }),
        }
        offset = next;
    }
    Ok(replay)
}

/// Single-writer handle on the log file.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    next_seq: u64,
}

impl EventLog {
    /// Opens (creating if needed) and reads the log, truncating a torn tail.
    pub fn open(path: impl AsRef<Path>) -> Result<(EventLog, Replay)> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let replay = read_records(&bytes)?;
        if replay.valid_len < bytes.len() as u64 {
            file.set_len(replay.valid_len)?;
            file.sync_all()?;
        }
        file.seek(SeekFrom::End(0))?;
        let next_seq = replay.last_seq().map_or(1, |s| s + 1);
        Ok((EventLog { path, file, next_seq }, replay))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Sequence number the next append will receive.
    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    pub fn last_seq(&self) -> u64 {
        self.next_seq - 1
    }

    /// Writes and flushes one record, returning its sequence number.
    pub fn append(&mut self, event: &Event) -> Result<u64> {
        let seqs = self.append_batch(std::slice::from_ref(event))?;
        Ok(seqs[0])
    }

    /// Writes several records with a single flush.
    pub fn append_batch(&mut self, events: &[Event]) -> Result<Vec<u64>> {
        let mut buf = Vec::new();
        let mut seqs = Vec::with_capacity(events.len());
        let mut seq = self.next_seq;
        for event in events {
            buf.extend(encode_record(&LogRecord {
                seq,
                event: event.clone(),
            }));
            seqs.push(seq);
            seq += 1;
        }
        self.file.write_all(&buf)?;
        self.file.sync_data()?;
        self.next_seq = seq;
        Ok(seqs)
    }

    /// Replaces the log with `events`, numbered from the current next
    /// sequence. The new file is written aside and renamed into place.
    pub fn rewrite(&mut self, events: &[Event]) -> Result<()> {
        let tmp = self.path.with_extension("compact.tmp");
        let mut seq = self.next_seq;
        {
            let mut out = File::create(&tmp)?;
            let mut buf = Vec::new();
            for event in events {
                buf.extend(encode_record(&LogRecord {
                    seq,
                    event: event.clone(),
                }));
                seq += 1;
            }
            out.write_all(&buf)?;
            out.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        if let Some(dir) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if let Ok(d) = File::open(dir) {
                let _ = d.sync_all();
            }
        }
        self.file = OpenOptions::new().read(true).append(true).open(&self.path)?;
        self.next_seq = seq;
        Ok(())
    }
}
