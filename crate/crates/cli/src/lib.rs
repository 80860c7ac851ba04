//! `qratio` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
//! computation fails or a checked regime condition does not hold. Outputs are
//! written under `--out` when given; otherwise the primary output of the
//! command goes to stdout.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use quantum_ratio::catalog::Catalog;
use quantum_ratio::export::{csv_string, json_string, Provenance};
use quantum_ratio::Error;

pub mod commands;
pub mod config;

use config::{
    DiffusionArgs, Format, Merge, QratioArgs, RegimeArgs, ScenarioConfig, SgArgs, SpinSpikeArgs, TalbotArgs,
    TalbotLauArgs, TunnelArgs, DEFAULT_SEED,
};

#[derive(Parser, Debug)]
#[command(
    name = "qratio",
    version,
    about = "Quantum ratio and desk-scale quantum/classical simulations"
)]
pub struct Cli {
    /// TOML scenario file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files; without it the primary output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of tabular output [default: csv].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Random seed, at most 2^63 - 1 [default: 1729].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Particle catalog replacing the built-in one.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quantum ratio Q = R_q / L0 for a particle, or for every catalog experiment.
    Qratio(QratioArgs),
    /// Free-packet doubling times.
    Diffusion(DiffusionArgs),
    /// Stern-Gerlach run with the silver preset: pure, mixed or classical.
    Sg(SgArgs),
    /// S_z distributions of a large spin.
    SpinSpike(SpinSpikeArgs),
    /// Talbot self-imaging check and carpet for a point source.
    Talbot(TalbotArgs),
    /// Talbot-Lau transmission scan and fringe visibility.
    TalbotLau(TalbotLauArgs),
    /// Barrier transmission scan, semiclassical against exact.
    Tunnel(TunnelArgs),
    /// Decoherence regime report.
    Regime(RegimeArgs),
    /// Diffusion and quantum-ratio tables plus the large-spin figure data.
    PaperTables,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Qratio(_) => "qratio",
            Command::Diffusion(_) => "diffusion",
            Command::Sg(_) => "sg",
            Command::SpinSpike(_) => "spin-spike",
            Command::Talbot(_) => "talbot",
            Command::TalbotLau(_) => "talbot-lau",
            Command::Tunnel(_) => "tunnel",
            Command::Regime(_) => "regime",
            Command::PaperTables => "paper-tables",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit status 1.
    Config(String),
    /// Exit status 2.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Regime(_) | Error::Integration { .. } | Error::Aliasing(_) | Error::AboveBarrier(_) => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Checks that ran but did not pass; they turn the exit status into 2 after
/// every output has been written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

pub struct Ctx {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub prov: Provenance,
    pub catalog: Catalog,
}

/// Column-named rows, rendered as CSV or as a JSON array of objects.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self::with_columns(columns.iter().map(|c| c.to_string()).collect())
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn csv(&self, prov: &Provenance) -> CliResult<String> {
        let cols: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        csv_string(prov, &cols, &self.rows).map_err(CliError::from)
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Vec<serde_json::Map<String, serde_json::Value>> {
        self.rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| {
                        let value = if v.is_empty() {
                            serde_json::Value::Null
                        } else if let Some(n) = v.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                            serde_json::Value::Number(n)
                        } else {
                            serde_json::Value::String(v.clone())
                        };
                        (c.clone(), value)
                    })
                    .collect()
            })
            .collect()
    }
}

impl Ctx {
    fn write(&self, file: &str, body: &str, primary: bool) -> CliResult<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
                let path = dir.join(file);
                fs::write(&path, body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
            }
            None if primary => print!("{body}"),
            None => {}
        }
        Ok(())
    }

    /// `stem.csv` or `stem.json` depending on `--format`.
    pub fn emit_table(&self, stem: &str, table: &Table, primary: bool) -> CliResult<()> {
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &table.csv(&self.prov)?, primary),
            Format::Json => self.emit_json(stem, &table.json_rows(), primary),
        }
    }

    /// Always CSV, whatever `--format` says.
    pub fn emit_csv(&self, stem: &str, table: &Table, primary: bool) -> CliResult<()> {
        self.write(&format!("{stem}.csv"), &table.csv(&self.prov)?, primary)
    }

    pub fn emit_json<S: Serialize>(&self, stem: &str, report: &S, primary: bool) -> CliResult<()> {
        let body = json_string(&self.prov, report).map_err(CliError::from)?;
        self.write(&format!("{stem}.json"), &body, primary)
    }
}

fn read_config(path: &Path) -> CliResult<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ScenarioConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merge flags over the file and fold the active command's section back into
/// one config, which is what the provenance hash covers.
fn effective(cli: Cli) -> CliResult<(ScenarioConfig, Command)> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => ScenarioConfig::default(),
    };
    let mut eff = ScenarioConfig {
        seed: Some(cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED)),
        format: Some(cli.format.or(file.format).unwrap_or_default()),
        out: cli.out.or(file.out.clone()),
        threads: cli.threads.or(file.threads),
        catalog: cli.catalog.or(file.catalog.clone()),
        command: Some(cli.command.name().to_string()),
        ..ScenarioConfig::default()
    };
    let command = match cli.command {
        Command::Qratio(a) => {
            eff.qratio = a.merge(file.qratio);
            Command::Qratio(eff.qratio.clone())
        }
        Command::Diffusion(a) => {
            eff.diffusion = a.merge(file.diffusion);
            Command::Diffusion(eff.diffusion.clone())
        }
        Command::Sg(a) => {
            eff.sg = a.merge(file.sg);
            Command::Sg(eff.sg.clone())
        }
        Command::SpinSpike(a) => {
            eff.spin_spike = a.merge(file.spin_spike);
            Command::SpinSpike(eff.spin_spike.clone())
        }
        Command::Talbot(a) => {
            eff.talbot = a.merge(file.talbot);
            Command::Talbot(eff.talbot.clone())
        }
        Command::TalbotLau(a) => {
            eff.talbot_lau = a.merge(file.talbot_lau);
            Command::TalbotLau(eff.talbot_lau.clone())
        }
        Command::Tunnel(a) => {
            eff.tunnel = a.merge(file.tunnel);
            Command::Tunnel(eff.tunnel.clone())
        }
        Command::Regime(a) => {
            eff.regime = a.merge(file.regime);
            Command::Regime(eff.regime.clone())
        }
        Command::PaperTables => Command::PaperTables,
    };
    Ok((eff, command))
}

fn execute(cli: Cli) -> CliResult<Outcome> {
    let (eff, command) = effective(cli)?;
    let catalog = match &eff.catalog {
        Some(p) => Catalog::load(p)?,
        None => Catalog::builtin(),
    };
    let mut out = eff.out.clone();
    if out.is_none() && matches!(command, Command::PaperTables) {
        out = Some(PathBuf::from("paper-tables"));
    }
    let ctx = Ctx {
        format: eff.format.unwrap_or_default(),
        out,
        seed: eff.seed.unwrap_or(DEFAULT_SEED),
        prov: Provenance::new(&eff.for_hashing().to_toml()),
        catalog,
    };
    let work = || commands::dispatch(&ctx, &command);
    match eff.threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Run with the given argument list (program name first) and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(o) if o.failures.is_empty() => 0,
        Ok(o) => {
            for f in &o.failures {
                eprintln!("check failed: {f}");
            }
            2
        }
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}
