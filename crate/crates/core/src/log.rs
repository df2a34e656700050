//! Line-delimited JSON session logs.
//!
//! A log is one `header` line, one `tick` line per engine tick, and an `end`
//! line written when the session closes. Each line is written with a single
//! call and flushed, so a crashed session leaves a readable prefix. Field
//! names are frozen in `docs/SCHEMA.md`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DisplayConfig, MapConfig, Stage, ViewportState};
use crate::task::{Session, TaskParams, TrialEvent, TrialPlan};
use crate::techniques::{make_technique, InputSample, TechniqueKind, TechniqueParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to rebuild the engine that produced a log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema_version: u32,
    pub session_id: String,
    pub technique: TechniqueKind,
    pub map: MapConfig,
    pub display: DisplayConfig,
    pub seed: u64,
    pub tick_rate: f64,
    pub params: TechniqueParams,
    pub task: TaskParams,
    pub plan: TrialPlan,
    /// Who produced the inputs, e.g. `agent:greedy3d` or `live`.
    #[serde(default)]
    pub source: String,
}

impl LogHeader {
    pub fn stage(&self) -> Result<Stage> {
        Stage::new(self.map.clone(), self.display)
    }

    /// A fresh engine in the state the logged session started from.
    pub fn build_session(&self) -> Result<Session> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let stepper = make_technique(self.technique, &self.params, self.tick_rate)?;
        Session::new(self.stage()?, stepper, self.plan.clone(), self.task.clone(), self.tick_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    /// Engine time at the end of this tick.
    pub t: f64,
    pub input: InputSample,
    pub viewport: ViewportState,
    #[serde(default)]
    pub events: Vec<TrialEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFooter {
    pub ticks: u64,
    /// All targets were selected.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Header(Box<LogHeader>),
    Tick(TickRecord),
    End(LogFooter),
}

/// A parsed log. `truncated` is set when the end line is missing or the
/// last line was cut off mid-write.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: LogHeader,
    pub records: Vec<TickRecord>,
    pub footer: Option<LogFooter>,
    pub truncated: bool,
}

impl SessionLog {
    pub fn new(header: LogHeader) -> Self {
        Self {
            header,
            records: Vec::new(),
            footer: None,
            truncated: false,
        }
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(File::open(path)?)
    }

    pub fn read(reader: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines().enumerate().peekable();
        let header = match lines.next() {
            Some((_, line)) => match serde_json::from_str::<LogLine>(&line?) {
                Ok(LogLine::Header(h)) => *h,
                Ok(_) => return Err(malformed(1, "first line is not a header")),
                Err(e) => return Err(malformed(1, &e.to_string())),
            },
            None => return Err(malformed(1, "empty log")),
        };
        if header.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                found: header.schema_version,
                expected: SCHEMA_VERSION,
            });
        }

        let mut log = Self::new(header);
        while let Some((index, line)) = lines.next() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let is_last = lines.peek().is_none();
            match serde_json::from_str::<LogLine>(&line) {
                Ok(LogLine::Tick(record)) if log.footer.is_none() => {
                    if record.tick != log.records.len() as u64 {
                        return Err(malformed(index + 1, "tick index out of sequence"));
                    }
                    log.records.push(record);
                }
                Ok(LogLine::End(footer)) if log.footer.is_none() => log.footer = Some(footer),
                Ok(_) => return Err(malformed(index + 1, "unexpected line")),
                // a partially written final line is what a crash leaves behind
                Err(_) if is_last => log.truncated = true,
                Err(e) => return Err(malformed(index + 1, &e.to_string())),
            }
        }
        if log.footer.is_none() {
            log.truncated = true;
        }
        Ok(log)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &InputSample> {
        self.records.iter().map(|r| &r.input)
    }

    /// Serializes the log exactly as [`LogWriter`] would have written it.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut writer = LogWriter::new(Vec::new(), &self.header)?;
        for record in &self.records {
            writer.append(record)?;
        }
        if let Some(footer) = &self.footer {
            writer.finish(footer.clone())?;
        }
        Ok(writer.into_inner())
    }
}

fn malformed(line: usize, message: &str) -> Error {
    Error::MalformedLog {
        line,
        message: message.to_owned(),
    }
}

/// Appends log lines; one `write_all` plus flush per line.
pub struct LogWriter<W: Write> {
    out: W,
    buf: Vec<u8>,
}

impl<W: Write> LogWriter<W> {
    pub fn new(out: W, header: &LogHeader) -> Result<Self> {
        let mut writer = Self { out, buf: Vec::new() };
        writer.write_line(&LogLine::Header(Box::new(header.clone())))?;
        Ok(writer)
    }

    pub fn append(&mut self, record: &TickRecord) -> Result<()> {
        // Serialize through a borrowed wrapper to avoid cloning the record.
        #[derive(Serialize)]
        #[serde(tag = "type", rename = "tick")]
        struct Borrowed<'a> {
            #[serde(flatten)]
            record: &'a TickRecord,
        }
        self.buf.clear();
        serde_json::to_writer(&mut self.buf, &Borrowed { record })?;
        self.flush_line()
    }

    pub fn finish(&mut self, footer: LogFooter) -> Result<()> {
        self.write_line(&LogLine::End(footer))
    }

    fn write_line(&mut self, line: &LogLine) -> Result<()> {
        self.buf.clear();
        serde_json::to_writer(&mut self.buf, line)?;
        self.flush_line()
    }

    fn flush_line(&mut self) -> Result<()> {
        self.buf.push(b'\n');
        self.out.write_all(&self.buf)?;
        self.out.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl LogWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, header: &LogHeader) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?), header)
    }
}
