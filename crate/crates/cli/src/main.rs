use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use sheafnet::TimeWindow;
use sheafnet_cli::{parse_window, run, Command, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "sheafnet",
    version,
    about = "Sheaf analysis of single-channel wireless networks"
)]
struct Args {
    #[arg(value_enum)]
    command: Verb,
    /// Network file (TOML).
    #[arg(long)]
    network: PathBuf,
    /// Schedule file (TOML) for `simulate` and `bound`.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Time window as START..END; overrides the network file.
    #[arg(long, value_parser = parse_window)]
    window: Option<TimeWindow>,
    /// Decode threshold; overrides the network file.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    /// Receive queue protocol: fn, fe, fwqm, ffo, ffop or a full name.
    #[arg(long, default_value = "forward-everything")]
    protocol: String,
    #[arg(long, default_value_t = 1)]
    packet_dim: usize,
    #[arg(long, default_value_t = 3)]
    queue_len: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Seed for `[random_disk]` networks that do not set one.
    #[arg(long, env = "SHEAFNET_SEED")]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verb {
    Complex,
    Sections,
    Cohomology,
    Simulate,
    Bound,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Dot,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let command = match args.command {
        Verb::Complex => Command::Complex,
        Verb::Sections => Command::Sections,
        Verb::Cohomology => Command::Cohomology,
        Verb::Simulate => Command::Simulate,
        Verb::Bound => Command::Bound,
    };
    let cfg = RunConfig {
        command,
        network: args.network,
        schedule: args.schedule,
        window: args.window,
        threshold: args.threshold,
        protocol: args.protocol,
        packet_dim: args.packet_dim,
        queue_len: args.queue_len,
        format: match args.format {
            OutputFormat::Json => Format::Json,
            OutputFormat::Dot => Format::Dot,
        },
        seed: args.seed,
    };
    match run(&cfg) {
        Ok(out) => {
            print!("{}", out.report);
            if out.consistent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
