use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use attnstudy::attention::LambdaFloorPolicy;
use attnstudy::identity::NoEmbeddingPolicy;
use attnstudy::io::read_text;
use attnstudy::pipeline::{EventStudySummary, Pipeline, RunConfig};
use attnstudy::synth::{write_fixture, SuiteSpec, SynthInput};
use attnstudy::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "attnstudy", version, about = "Speaker attention and intraday event-study regressions")]
struct Cli {
    /// Run configuration (JSON). For `synth`, the scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed override (synth only).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overwrite outputs written under a different configuration.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct IdentifyArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    min_votes: Option<usize>,
    #[arg(long)]
    target_label: Option<String>,
    /// drop | assume_target
    #[arg(long)]
    no_embedding_policy: Option<NoEmbeddingPolicy>,
}

#[derive(Args, Debug, Default)]
struct AttentionArgs {
    /// EAR threshold below which the speaker counts as reading.
    #[arg(long)]
    threshold_c: Option<f64>,
    /// Sample spacing, in frame intervals, that counts as a gap.
    #[arg(long)]
    gap_factor: Option<f64>,
    /// Replace a zero attention level by this value instead of excluding it.
    #[arg(long)]
    lambda_floor: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct EventStudyArgs {
    /// Default end of the trading day, HH:MM.
    #[arg(long)]
    trading_close: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Keep the frames showing the target speaker.
    Identify(IdentifyArgs),
    /// Eye aspect ratio series of the filtered streams.
    Ear,
    /// Attention table with benchmark variables.
    Attention(AttentionArgs),
    /// Event windows and regression tables.
    Eventstudy(EventStudyArgs),
    /// All stages in order.
    Run {
        #[command(flatten)]
        identify: IdentifyArgs,
        #[command(flatten)]
        attention: AttentionArgs,
        #[command(flatten)]
        eventstudy: EventStudyArgs,
    },
    /// Write a synthetic fixture directory.
    Synth {
        /// Override the number of conferences of a suite.
        #[arg(long)]
        conferences: Option<usize>,
    },
}

fn apply_identify(cfg: &mut RunConfig, a: &IdentifyArgs) {
    if let Some(v) = a.epsilon {
        cfg.identity.epsilon = v;
    }
    if let Some(v) = a.min_votes {
        cfg.identity.min_votes = v;
    }
    if let Some(v) = &a.target_label {
        cfg.target_label = v.clone();
    }
    if let Some(v) = a.no_embedding_policy {
        cfg.identity.no_embedding_policy = v;
    }
}

fn apply_attention(cfg: &mut RunConfig, a: &AttentionArgs) {
    if let Some(v) = a.threshold_c {
        cfg.attention.threshold_c = v;
    }
    if let Some(v) = a.gap_factor {
        cfg.attention.gap_factor = v;
    }
    if let Some(v) = a.lambda_floor {
        cfg.attention.lambda_floor = LambdaFloorPolicy::EpsilonFloor { value: v };
    }
}

fn apply_eventstudy(cfg: &mut RunConfig, a: &EventStudyArgs) {
    if let Some(v) = &a.trading_close {
        cfg.market.trading_close = v.clone();
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let path = path.ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    RunConfig::load(path)
}

fn print_tables(summary: &EventStudySummary) {
    for t in &summary.tables {
        println!("{}", t.table.text);
        for s in &t.skipped {
            println!("skipped {}: {}", s.covariate, s.reason);
        }
    }
    for e in &summary.exclusions {
        println!("excluded {} ({}): {}", e.conference_id, e.stage, e.reason);
    }
}

fn synth(cli: &Cli, conferences: Option<usize>) -> Result<()> {
    let input = match &cli.config {
        Some(p) => serde_json::from_str::<SynthInput>(&read_text(p)?)
            .map_err(|e| Error::Scenario(format!("{}: {e}", p.display())))?,
        None => SynthInput::Suite { suite: SuiteSpec::default() },
    };
    let input = match (input, conferences) {
        (SynthInput::Suite { mut suite }, Some(n)) => {
            suite.n_conferences = n;
            SynthInput::Suite { suite }
        }
        (SynthInput::Plan(_), Some(_)) => {
            return Err(Error::Scenario("--conferences applies to suite scenarios only".into()))
        }
        (i, None) => i,
    };
    let plan = input.into_plan(cli.seed)?;
    let manifest = write_fixture(&plan, &cli.out)?;
    println!(
        "wrote {} conferences to {} (config {})",
        manifest.truth.len(),
        manifest.dir.display(),
        manifest.config.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Command::Synth { conferences } = &cli.command {
        return synth(&cli, *conferences);
    }
    if cli.seed.is_some() {
        return Err(Error::Config("--seed applies to synth only".into()));
    }
    let mut cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Identify(a) => apply_identify(&mut cfg, a),
        Command::Attention(a) => apply_attention(&mut cfg, a),
        Command::Eventstudy(a) => apply_eventstudy(&mut cfg, a),
        Command::Run { identify, attention, eventstudy } => {
            apply_identify(&mut cfg, identify);
            apply_attention(&mut cfg, attention);
            apply_eventstudy(&mut cfg, eventstudy);
        }
        Command::Ear | Command::Synth { .. } => {}
    }
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pipeline = Pipeline::new(cfg, &cli.out, jobs, cli.force)?;
    match &cli.command {
        Command::Identify(_) => {
            let s = pipeline.identify()?;
            for c in &s.conferences {
                let d = &c.diagnostics;
                println!(
                    "{}: kept {} of {} (rejected {}, unknown {}, no embedding {})",
                    c.conference_id, d.kept, d.frames, d.rejected, d.unknown, d.no_embedding
                );
            }
        }
        Command::Ear => {
            let s = pipeline.ear()?;
            for c in &s.conferences {
                let d = &c.diagnostics;
                println!(
                    "{}: {} valid of {} frames (degenerate {}, malformed {})",
                    c.conference_id, d.valid, d.frames, d.degenerate, d.malformed
                );
            }
        }
        Command::Attention(_) => {
            let s = pipeline.attention()?;
            println!("{} conferences, {} excluded", s.rows.len(), s.exclusions.len());
            for e in s.exclusions.iter().chain(&s.notes) {
                println!("{} ({}): {}", e.conference_id, e.stage, e.reason);
            }
        }
        Command::Eventstudy(_) => print_tables(&pipeline.eventstudy()?),
        Command::Run { .. } => print_tables(&pipeline.run_all()?),
        Command::Synth { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
