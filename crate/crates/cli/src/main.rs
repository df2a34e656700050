use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use hovernav::agents::{AgentConfig, AgentKind, WATCHDOG_S};
use hovernav::service::{analyze_paths, replay_path, serve, simulate, write_csv, EngineConfig, MapChoice, ServerConfig, SessionDescriptor};
use hovernav::task::{compute_metrics, generate_trial_plan_with};
use hovernav::techniques::TechniqueKind;

#[derive(Parser)]
#[command(name = "hovernav", version, about = "Multiscale navigation engine, agents and session tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scripted agent through one session and write its log.
    Simulate {
        #[arg(long)]
        technique: TechniqueKind,
        /// `small`, `large`, or a map named in the config file.
        #[arg(long)]
        map: String,
        /// Defaults to the agent that drives `--technique`.
        #[arg(long)]
        agent: Option<AgentKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "ticks-rate", default_value_t = 60.0)]
        tick_rate: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Session id recorded in the log; defaults to the output file stem.
        #[arg(long)]
        id: Option<String>,
        /// Override the agent's reaction delay, seconds.
        #[arg(long)]
        reaction_delay: Option<f64>,
        /// Override the agent's pointing jitter sd, meters.
        #[arg(long)]
        jitter: Option<f64>,
    },
    /// Re-execute a log and verify every recorded tick bit for bit.
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Per-target and aggregate acquisition measures as CSV.
    Analyze {
        /// Glob of log files, e.g. `runs/*.jsonl`.
        #[arg(long = "in")]
        input: String,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve live sessions over line-delimited JSON on TCP.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        log_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the trial plan for a map and seed as JSON.
    Plan {
        #[arg(long)]
        map: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<EngineConfig> {
    match path {
        Some(p) => EngineConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(EngineConfig::default()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            technique,
            map,
            agent,
            seed,
            tick_rate,
            out,
            config,
            id,
            reaction_delay,
            jitter,
        } => {
            let engine = load_config(config.as_deref())?;
            let id = id.unwrap_or_else(|| out.file_stem().map_or("session".into(), |s| s.to_string_lossy().into_owned()));
            let kind = agent.unwrap_or_else(|| AgentKind::for_technique(technique));
            let mut agent = AgentConfig::new(kind, seed);
            if let Some(d) = reaction_delay {
                agent.reaction_delay = d;
            }
            if let Some(j) = jitter {
                agent.pointing_jitter_sd = j;
            }
            let descriptor = SessionDescriptor {
                tick_rate,
                ..SessionDescriptor::new(id, technique, MapChoice::Named(map), seed)
            };
            let header = descriptor.resolve(&engine, &format!("agent:{kind}"))?;
            let log = simulate(header, &agent, WATCHDOG_S)?;
            std::fs::write(&out, log.to_bytes()?).with_context(|| format!("writing {}", out.display()))?;
            let metrics = compute_metrics(&log)?;
            let footer = log.footer.as_ref().expect("simulate closes the log");
            println!(
                "{}: {} ticks, {} of {} targets, mean {:.3} s, first-miss {}, wrong-target {}",
                out.display(),
                footer.ticks,
                metrics.targets.len(),
                log.header.plan.targets.len(),
                metrics.overall.mean_s,
                metrics.first_miss,
                metrics.wrong_target
            );
            if !footer.complete {
                eprintln!("warning: watchdog expired before the plan was complete");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { input } => {
            let report = replay_path(&input).with_context(|| format!("replaying {}", input.display()))?;
            let truncated = if report.truncated { " (log truncated; prefix only)" } else { "" };
            match report.divergence {
                None => {
                    println!("{}: {} ticks verified{truncated}", input.display(), report.verified_ticks);
                    Ok(ExitCode::SUCCESS)
                }
                Some(d) => {
                    println!(
                        "{}: diverged at tick {} in {}: recorded {}, recomputed {}",
                        input.display(),
                        d.tick,
                        d.field,
                        d.recorded,
                        d.recomputed
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Analyze { input, out } => {
            let mut paths = Vec::new();
            for entry in glob::glob(&input).with_context(|| format!("bad pattern {input}"))? {
                paths.push(entry?);
            }
            if paths.is_empty() {
                bail!("no log files match {input}");
            }
            paths.sort();
            let rows = analyze_paths(&paths)?;
            match out {
                Some(path) => {
                    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&rows, BufWriter::new(file))?;
                }
                None => write_csv(&rows, io::stdout().lock())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { port, host, log_dir, config } => {
            let engine = load_config(config.as_deref())?;
            eprintln!("listening on {host}:{port}");
            serve((host.as_str(), port), ServerConfig { log_dir, engine })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { map, seed, config } => {
            let engine = load_config(config.as_deref())?;
            let map = MapChoice::Named(map).resolve(&engine.maps)?;
            let plan = generate_trial_plan_with(&map, seed, &engine.task)?;
            let mut stdout = io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &plan)?;
            writeln!(stdout)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
