//! Command-line front end: file formats, job configuration and subcommands.

pub mod commands;
pub mod format;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{JobConfig, Outcome, ReportFormat};
use format::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Lines,
}

#[derive(Debug, Parser)]
#[command(name = "dtflop", version, about = "Check flop identities for DT, BPS and GW generating functions")]
pub struct Cli {
    /// Degree bound D of the Novikov truncation.
    #[arg(long, global = true, default_value_t = 4)]
    pub degree: u32,
    /// Lowest q-exponent of the working window.
    #[arg(long, global = true, default_value_t = -8, allow_hyphen_values = true)]
    pub qmin: i64,
    /// Truncation order in q.
    #[arg(long, global = true, default_value_t = 20, allow_hyphen_values = true)]
    pub qmax: i64,
    /// Truncation order in u.
    #[arg(long, global = true, default_value_t = 12)]
    pub umax: i64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// DT series of a BPS table.
    BpsForward {
        table: PathBuf,
        /// Write exact kernel forms instead of expanded series.
        #[arg(long)]
        forms: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// BPS table of a DT series file.
    BpsExtract {
        series: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ratio identity across a flop.
    FlopCheck { x: PathBuf, xp: PathBuf, flop: PathBuf },
    /// Center identity across a flop.
    CenterCheck { x: PathBuf, xp: PathBuf, flop: PathBuf },
    /// BPS invariants across a flop.
    BpsCorollary { x: PathBuf, xp: PathBuf, flop: PathBuf },
    /// Evaluate a degeneration-formula job.
    Degenerate { job: PathBuf },
    /// Blow-up tower and effectivity lemmas for the given widths.
    Reid {
        #[arg(long, value_delimiter = ',', required = true)]
        widths: Vec<u32>,
        /// Largest center coordinate tested.
        #[arg(long, default_value_t = 5)]
        bound: i64,
        /// Search budget of each effectivity test.
        #[arg(long, default_value_t = 100_000)]
        nodes: usize,
    },
    /// GW/DT correspondence on one side.
    GwdtCheck {
        gw: PathBuf,
        dt: PathBuf,
        /// Allow point-class descendants.
        #[arg(long)]
        descendants: bool,
    },
    /// Carry the correspondence across a flop.
    CorollaryPipeline { gw: PathBuf, dt: PathBuf, dtp: PathBuf, flop: PathBuf },
    /// Run every pipeline on built-in models.
    DemoConifold,
}

impl Cli {
    pub fn config(&self) -> JobConfig {
        JobConfig {
            degree: self.degree,
            qmin: self.qmin,
            qmax: self.qmax,
            umax: self.umax,
            format: match self.format {
                FormatArg::Text => ReportFormat::Text,
                FormatArg::Lines => ReportFormat::Lines,
            },
        }
    }
}

/// Run a parsed command. Files named by `--output` are written here;
/// everything else is returned for printing.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let cfg = cli.config();
    let (outcome, target) = match &cli.command {
        Command::BpsForward { table, forms, output } => (commands::cmd_bps_forward(table, *forms, &cfg)?, output),
        Command::BpsExtract { series, output } => (commands::cmd_bps_extract(series, &cfg)?, output),
        Command::FlopCheck { x, xp, flop } => (commands::cmd_flop_check(x, xp, flop, &cfg)?, &None),
        Command::CenterCheck { x, xp, flop } => (commands::cmd_center_check(x, xp, flop, &cfg)?, &None),
        Command::BpsCorollary { x, xp, flop } => (commands::cmd_bps_corollary(x, xp, flop, &cfg)?, &None),
        Command::Degenerate { job } => (commands::cmd_degenerate(job, &cfg)?, &None),
        Command::Reid { widths, bound, nodes } => (commands::cmd_reid(widths, *bound, *nodes, &cfg)?, &None),
        Command::GwdtCheck { gw, dt, descendants } => (commands::cmd_gwdt_check(gw, dt, *descendants, &cfg)?, &None),
        Command::CorollaryPipeline { gw, dt, dtp, flop } => {
            (commands::cmd_corollary_pipeline(gw, dt, dtp, flop, &cfg)?, &None)
        }
        Command::DemoConifold => (commands::cmd_demo_conifold(&cfg)?, &None),
    };
    if let Some(path) = target {
        std::fs::write(path, &outcome.output)
            .map_err(|e| format::CliError::in_file(&path.display().to_string(), e.to_string()))?;
        return Ok(Outcome { output: String::new(), passed: outcome.passed });
    }
    Ok(outcome)
}
