use std::io::Write;

use crate::agents::{run_agent, Absolute3dAgent, Agent, AgentConfig, AgentKind, Greedy2dAgent, Greedy3dAgent};
use crate::error::{Error, Result};
use crate::log::{LogFooter, LogHeader, LogWriter, SessionLog, TickRecord};
use crate::task::{compute_metrics, MetricsReport, Session};
use crate::techniques::InputSample;

/// Owns one session, the held input sample, and the session's log.
///
/// Inputs arrive whenever the client sends them; the engine ticks on its own
/// clock and reuses the most recent sample until a new one arrives.
pub struct SessionRunner {
    session: Session,
    held: InputSample,
    log: SessionLog,
    writer: Option<LogWriter<Box<dyn Write + Send>>>,
}

impl SessionRunner {
    pub fn new(header: LogHeader) -> Result<Self> {
        let session = header.build_session()?;
        let held = session.stepper().neutral_input();
        Ok(Self {
            session,
            held,
            log: SessionLog::new(header),
            writer: None,
        })
    }

    /// Mirrors every line to `out` as it happens.
    pub fn with_writer(mut self, out: Box<dyn Write + Send>) -> Result<Self> {
        let mut writer = LogWriter::new(out, &self.log.header)?;
        for record in &self.log.records {
            writer.append(record)?;
        }
        self.writer = Some(writer);
        Ok(self)
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn header(&self) -> &LogHeader {
        &self.log.header
    }

    pub fn held(&self) -> &InputSample {
        &self.held
    }

    pub fn is_finished(&self) -> bool {
        self.session.is_finished()
    }

    /// Replaces the held sample. An invalid sample is rejected and the
    /// previous one stays in effect.
    pub fn submit(&mut self, input: InputSample) -> Result<()> {
        input.validate(self.session.stage())?;
        self.held = input;
        Ok(())
    }

    pub fn tick(&mut self) -> Result<&TickRecord> {
        let record = self.session.advance(&self.held)?;
        if let Some(writer) = self.writer.as_mut() {
            writer.append(&record)?;
        }
        self.log.records.push(record);
        Ok(self.log.records.last().expect("just pushed"))
    }

    /// Closes the log and computes the session's metrics.
    pub fn finish(mut self) -> Result<(SessionLog, MetricsReport)> {
        let footer = LogFooter {
            ticks: self.session.ticks(),
            complete: self.session.is_finished(),
        };
        if let Some(writer) = self.writer.as_mut() {
            writer.finish(footer.clone())?;
        }
        self.log.footer = Some(footer);
        self.log.truncated = false;
        let metrics = compute_metrics(&self.log)?;
        Ok((self.log, metrics))
    }

    pub fn metrics(&self) -> Result<MetricsReport> {
        compute_metrics(&self.log)
    }
}

/// Runs a session over a stream of optional client updates, one per tick.
/// `None` (or an invalid sample) keeps the held sample. Stops when every
/// target is selected or the stream ends.
pub fn run_session(header: LogHeader, inputs: impl IntoIterator<Item = Option<InputSample>>) -> Result<(SessionLog, MetricsReport)> {
    let mut runner = SessionRunner::new(header)?;
    for update in inputs {
        if runner.is_finished() {
            break;
        }
        if let Some(sample) = update {
            // malformed samples are dropped; the previous one is held
            let _ = runner.submit(sample);
        }
        runner.tick()?;
    }
    runner.finish()
}

fn agent_for(header: &LogHeader, config: &AgentConfig) -> Result<Box<dyn Agent>> {
    config.validate()?;
    if config.kind.technique() != header.technique {
        return Err(Error::Config(format!(
            "agent `{}` drives `{}`, not `{}`",
            config.kind,
            config.kind.technique(),
            header.technique
        )));
    }
    Ok(match config.kind {
        AgentKind::Greedy3d => Box::new(Greedy3dAgent::with_params(config.clone(), header.params.rate3d.clone())),
        AgentKind::Greedy2d => Box::new(Greedy2dAgent::new(config.clone())),
        AgentKind::Absolute3d => Box::new(Absolute3dAgent::with_params(config.clone(), &header.params.absolute3d)),
    })
}

/// Runs an agent through the session described by `header` and returns the
/// complete log. `limit_s` bounds engine time.
pub fn simulate(header: LogHeader, agent: &AgentConfig, limit_s: f64) -> Result<SessionLog> {
    let mut policy = agent_for(&header, agent)?;
    let mut session = header.build_session()?;
    let run = run_agent(&mut session, policy.as_mut(), limit_s)?;
    let footer = LogFooter {
        ticks: session.ticks(),
        complete: run.completed,
    };
    Ok(SessionLog {
        header,
        records: run.records,
        footer: Some(footer),
        truncated: false,
    })
}
