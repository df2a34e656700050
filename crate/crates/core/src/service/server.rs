use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use super::protocol::{ClientMessage, ServerMessage, Snapshot, PROTOCOL_VERSION};
use super::runner::SessionRunner;
use super::{EngineConfig, SessionDescriptor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ServerConfig {
    /// Where `<session_id>.jsonl` logs go; no logs are written when unset.
    pub log_dir: Option<PathBuf>,
    pub engine: EngineConfig,
}

/// Accepts clients on a TCP socket. Each connection runs at most one session
/// at a time, ticking in real time at the session's tick rate.
pub struct Server {
    listener: TcpListener,
    shared: Arc<Shared>,
}

struct Shared {
    config: ServerConfig,
    ids: Mutex<HashSet<String>>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, config: ServerConfig) -> Result<Self> {
        config.engine.validate()?;
        if let Some(dir) = &config.log_dir {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            shared: Arc::new(Shared {
                config,
                ids: Mutex::new(HashSet::new()),
            }),
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Serves connections until the listener fails.
    pub fn serve(self) -> Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            let shared = Arc::clone(&self.shared);
            thread::spawn(move || {
                // a broken connection only ends that client
                let _ = Connection::open(stream, shared).and_then(Connection::run);
            });
        }
        Ok(())
    }
}

pub fn serve(addr: impl ToSocketAddrs, config: ServerConfig) -> Result<()> {
    Server::bind(addr, config)?.serve()
}

enum Incoming {
    Message(Box<ClientMessage>),
    Malformed(String),
}

struct Live {
    runner: SessionRunner,
    last_client_tick: Option<u64>,
    paused: bool,
    dt: Duration,
    next_tick: Instant,
}

struct Connection {
    out: BufWriter<TcpStream>,
    inbox: Receiver<Incoming>,
    shared: Arc<Shared>,
    live: Option<Live>,
}

impl Connection {
    fn open(stream: TcpStream, shared: Arc<Shared>) -> Result<Self> {
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        let (tx, inbox) = mpsc::channel();
        thread::spawn(move || {
            for line in reader.lines() {
                let Ok(line) = line else { break };
                if line.trim().is_empty() {
                    continue;
                }
                let item = match ClientMessage::parse(&line) {
                    Ok(msg) => Incoming::Message(Box::new(msg)),
                    Err(e) => Incoming::Malformed(e.to_string()),
                };
                if tx.send(item).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            out: BufWriter::new(stream),
            inbox,
            shared,
            live: None,
        })
    }

    fn send(&mut self, msg: &ServerMessage) -> Result<()> {
        self.out.write_all(msg.to_line().as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }

    fn run(mut self) -> Result<()> {
        let result = self.event_loop();
        // close the log even when the client vanished mid-session
        if let Some(live) = self.live.take() {
            let _ = live.runner.finish();
        }
        result
    }

    fn event_loop(&mut self) -> Result<()> {
        loop {
            let ticking = self.live.as_ref().filter(|l| !l.paused).map(|l| l.next_tick);
            let incoming = match ticking {
                Some(deadline) => {
                    let wait = deadline.saturating_duration_since(Instant::now());
                    match self.inbox.recv_timeout(wait) {
                        Ok(item) => Some(item),
                        Err(RecvTimeoutError::Timeout) => None,
                        Err(RecvTimeoutError::Disconnected) => return Ok(()),
                    }
                }
                None => match self.inbox.recv() {
                    Ok(item) => Some(item),
                    Err(_) => return Ok(()),
                },
            };
            match incoming {
                Some(Incoming::Message(msg)) => self.handle(*msg)?,
                Some(Incoming::Malformed(message)) => self.send(&ServerMessage::error(message))?,
                None => self.tick()?,
            }
        }
    }

    fn handle(&mut self, msg: ClientMessage) -> Result<()> {
        match msg {
            ClientMessage::Hello { schema_version } => {
                if schema_version != PROTOCOL_VERSION {
                    self.send(&ServerMessage::error(format!(
                        "protocol version {schema_version} unsupported, expected {PROTOCOL_VERSION}"
                    )))?;
                }
                self.send(&ServerMessage::Hello {
                    schema_version: PROTOCOL_VERSION,
                })
            }
            ClientMessage::Start { descriptor } => match self.start(&descriptor) {
                Ok(started) => self.send(&started),
                Err(e) => self.send(&ServerMessage::error(e.to_string())),
            },
            ClientMessage::Input { client_tick, sample } => {
                let Some(live) = self.live.as_mut() else {
                    return self.send(&ServerMessage::error("no session running"));
                };
                if live.last_client_tick.is_some_and(|last| client_tick <= last) {
                    return self.send(&ServerMessage::error(format!("client_tick {client_tick} is out of order")));
                }
                live.last_client_tick = Some(client_tick);
                match live.runner.submit(sample) {
                    Ok(()) => Ok(()),
                    Err(e) => self.send(&ServerMessage::error(format!("input rejected: {e}"))),
                }
            }
            ClientMessage::Pause | ClientMessage::Resume => {
                let pause = matches!(msg, ClientMessage::Pause);
                let Some(live) = self.live.as_mut() else {
                    return self.send(&ServerMessage::error("no session running"));
                };
                if live.paused && !pause {
                    live.next_tick = Instant::now() + live.dt;
                }
                live.paused = pause;
                let snapshot = Snapshot::from_view(&live.runner.session().view(), live.paused);
                self.send(&ServerMessage::State(snapshot))
            }
            ClientMessage::End => match self.live.take() {
                Some(live) => self.complete(live),
                None => self.send(&ServerMessage::error("no session running")),
            },
        }
    }

    fn start(&mut self, descriptor: &SessionDescriptor) -> Result<ServerMessage> {
        if self.live.is_some() {
            return Err(Error::Protocol("a session is already running on this connection".into()));
        }
        let header = descriptor.resolve(&self.shared.config.engine, "socket")?;
        if !self.shared.ids.lock().expect("id set poisoned").insert(header.session_id.clone()) {
            return Err(Error::Protocol(format!("session id `{}` already used", header.session_id)));
        }
        let mut runner = SessionRunner::new(header.clone())?;
        if let Some(dir) = &self.shared.config.log_dir {
            let file = File::create(dir.join(format!("{}.jsonl", header.session_id)))?;
            runner = runner.with_writer(Box::new(file))?;
        }
        let dt = Duration::from_secs_f64(1.0 / header.tick_rate);
        let started = ServerMessage::Started {
            session_id: header.session_id.clone(),
            technique: header.technique,
            min_scale: runner.session().stage().min_scale(),
            map: header.map,
            display: header.display,
            tick_rate: header.tick_rate,
        };
        self.live = Some(Live {
            runner,
            last_client_tick: None,
            paused: false,
            dt,
            next_tick: Instant::now() + dt,
        });
        Ok(started)
    }

    fn tick(&mut self) -> Result<()> {
        let Some(live) = self.live.as_mut() else {
            return Ok(());
        };
        live.next_tick += live.dt;
        let record = live.runner.tick()?;
        let (tick, events) = (record.tick, record.events.clone());
        let snapshot = Snapshot::from_view(&live.runner.session().view(), false);
        let finished = live.runner.is_finished();
        self.send(&ServerMessage::State(snapshot))?;
        for event in events {
            self.send(&ServerMessage::Event { tick, event })?;
        }
        if finished {
            let live = self.live.take().expect("checked above");
            self.complete(live)?;
        }
        Ok(())
    }

    fn complete(&mut self, live: Live) -> Result<()> {
        let session_id = live.runner.header().session_id.clone();
        let (_, metrics) = live.runner.finish()?;
        self.send(&ServerMessage::SessionComplete { session_id, metrics })
    }
}
