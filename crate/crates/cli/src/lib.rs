//! The `painleve-ds` command line.

pub mod config;
mod commands;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Exit;
pub use config::{load_config, parse_config, Format, Number, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "painleve-ds", version, about = "Exact Lax-pair, Weyl-group and flow checks for fourth-order Painleve systems")]
struct Cli {
    /// `key = value` file; command-line flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heisenberg subalgebra, grade operator and checks for a partition
    Heisenberg(HeisenbergArgs),
    /// Exact zero-curvature check of a Lax pair at random rational points
    VerifyLax(VerifyArgs),
    /// Apply a word in the generators r0..r5 to a point of the cp6 system
    Weyl(WeylArgs),
    /// Group relations, equivariance and the gauge bridge at random points
    WeylCheck(SampleArgs),
    /// Integrate a system and monitor the Lax residual
    Integrate(IntegrateArgs),
    /// Run every suite and write one JSON report
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    /// Shorthand for --format json
    #[arg(long)]
    json: bool,
    /// json, csv or text
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct HeisenbergArgs {
    /// e.g. 2,2,1
    #[arg(long)]
    partition: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of 2,2 3,1 4,1 2,2,1 3,3; all five when omitted
    #[arg(long)]
    partition: Option<String>,
    #[command(flatten)]
    sampling: SampleArgs,
}

#[derive(Args, Debug)]
struct WeylArgs {
    /// Comma-separated generator indices, applied left to right
    #[arg(long, allow_hyphen_values = true)]
    word: Option<String>,
    /// q1,p1,q2,p2 as exact rationals
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// a0,...,a5
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// a4, a5, d6, cp6 or p6
    #[arg(long)]
    system: Option<String>,
    /// Carry the gauge variables of this reduction and monitor its Lax residual
    #[arg(long)]
    partition: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Reduction parameters instead of --alphas/--eta
    #[arg(long, allow_hyphen_values = true)]
    kappas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rhos: Option<String>,
    /// q1,p1[,q2,p2]; decimals allowed
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Start time
    #[arg(long = "t0", alias = "t", allow_hyphen_values = true)]
    t: Option<String>,
    /// End time
    #[arg(long = "t1", alias = "t-end", allow_hyphen_values = true)]
    t_end: Option<String>,
    /// Initial gauge values (default 1 each)
    #[arg(long, allow_hyphen_values = true)]
    gauge: Option<String>,
    #[arg(long)]
    rtol: Option<String>,
    #[arg(long)]
    atol: Option<String>,
    /// Largest acceptable Lax residual along the trajectory
    #[arg(long)]
    residual_tol: Option<String>,
    /// Resample to this many evenly spaced times
    #[arg(long)]
    grid: Option<String>,
    /// CSV path; the JSON sidecar goes next to it
    #[arg(long)]
    output: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    sampling: SampleArgs,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    output: Option<String>,
}

type Pairs<'a> = Vec<(&'static str, &'a Option<String>)>;

impl OutputArgs {
    fn pairs(&self) -> Pairs<'_> {
        vec![("format", &self.format)]
    }
}

impl SampleArgs {
    fn pairs(&self) -> Pairs<'_> {
        let mut v = vec![("samples", &self.samples), ("seed", &self.seed)];
        v.extend(self.out.pairs());
        v
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Heisenberg(_) => "heisenberg",
            Command::VerifyLax(_) => "verify-lax",
            Command::Weyl(_) => "weyl",
            Command::WeylCheck(_) => "weyl-check",
            Command::Integrate(_) => "integrate",
            Command::Report(_) => "report",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Heisenberg(a) => &a.out,
            Command::VerifyLax(a) => &a.sampling.out,
            Command::Weyl(a) => &a.out,
            Command::WeylCheck(a) => &a.out,
            Command::Integrate(a) => &a.out,
            Command::Report(a) => &a.sampling.out,
        }
    }

    fn pairs(&self) -> Pairs<'_> {
        match self {
            Command::Heisenberg(a) => {
                let mut v = vec![("partition", &a.partition)];
                v.extend(a.out.pairs());
                v
            }
            Command::VerifyLax(a) => {
                let mut v = vec![("partition", &a.partition)];
                v.extend(a.sampling.pairs());
                v
            }
            Command::Weyl(a) => {
                let mut v =
                    vec![("word", &a.word), ("point", &a.point), ("t", &a.t), ("alphas", &a.alphas), ("eta", &a.eta)];
                v.extend(a.out.pairs());
                v
            }
            Command::WeylCheck(a) => a.pairs(),
            Command::Integrate(a) => {
                let mut v = vec![
                    ("system", &a.system),
                    ("partition", &a.partition),
                    ("alphas", &a.alphas),
                    ("eta", &a.eta),
                    ("kappas", &a.kappas),
                    ("rhos", &a.rhos),
                    ("point", &a.point),
                    ("t", &a.t),
                    ("t_end", &a.t_end),
                    ("gauge", &a.gauge),
                    ("rtol", &a.rtol),
                    ("atol", &a.atol),
                    ("residual_tol", &a.residual_tol),
                    ("grid", &a.grid),
                    ("output", &a.output),
                ];
                v.extend(a.out.pairs());
                v
            }
            Command::Report(a) => {
                let mut v = a.sampling.pairs();
                v.push(("output", &a.output));
                v
            }
        }
    }

    fn to_config(&self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig { command: Some(self.name().to_string()), ..Default::default() };
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
            }
        }
        if self.output().json {
            cfg.format = Some(Format::Json);
        }
        Ok(cfg)
    }
}

/// Parse `argv` (program name first), run the command, return the exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        match load_config(path) {
            Ok((c, warnings)) => {
                for w in warnings {
                    let _ = writeln!(err, "warning: {}: {w}", path.display());
                }
                cfg = c;
            }
            Err(e) => {
                let _ = writeln!(err, "error: config {e}");
                return EXIT_USAGE;
            }
        }
    }
    if let Some(cmd) = &cli.command {
        match cmd.to_config() {
            Ok(c) => cfg = cfg.overlay(c),
            Err(e) => return usage(err, &e),
        }
    }
    let mut io = commands::Io { out, err };
    let result = match cfg.command.as_deref() {
        Some("heisenberg") => commands::heisenberg(&cfg, &mut io),
        Some("verify-lax") => commands::verify_lax(&cfg, &mut io),
        Some("weyl") => commands::weyl(&cfg, &mut io),
        Some("weyl-check") => commands::weyl_check(&cfg, &mut io),
        Some("integrate") => commands::integrate(&cfg, &mut io),
        Some("report") => commands::report(&cfg, &mut io),
        Some(other) => Err(Exit::Usage(format!("unknown command `{other}`"))),
        None => Err(Exit::Usage("no command given".into())),
    };
    match result {
        Ok(code) => code,
        Err(Exit::Usage(m)) => usage(io.err, &m),
        Err(Exit::Io(m)) => {
            let _ = writeln!(io.err, "error: {m}");
            EXIT_FAIL
        }
    }
}

fn usage(err: &mut dyn Write, message: &str) -> i32 {
    let _ = writeln!(err, "error: {message}\n\nUsage: painleve-ds [--config PATH] <COMMAND> [OPTIONS]\n\nCommands: heisenberg, verify-lax, weyl, weyl-check, integrate, report\nRun `painleve-ds --help` for details.");
    EXIT_USAGE
}
