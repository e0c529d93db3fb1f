//! Command-line front end.
//!
//! Exit codes: 0 accepted / success, 1 failed check, 2 usage or validation
//! error, 3 rejected, 4 batch finished with failed rows.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tsuka_core::dsl::{format_rule, parse_ruleset, ParseError};
use tsuka_core::loan::{assess, default_config, sweep_value, Applicant, Assessment, Decision, FisConfig};

use crate::service::{self, AppState};
use crate::store::{self, config_to_toml, ApplicantStore, StoreError};

pub const EXIT_ACCEPTED: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REJECTED: u8 = 3;
pub const EXIT_BATCH_FAILURES: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "tsuka", version, about = "Tsukamoto fuzzy loan-eligibility scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Model config (TOML). Defaults to the built-in model.
    #[arg(long, env = "TSUKA_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one applicant. Exits 0 when accepted and 3 when rejected.
    Assess {
        #[arg(long)]
        income: f64,
        #[arg(long)]
        loan: f64,
        #[arg(long)]
        collateral: f64,
        #[arg(long, default_value = "cli")]
        id: String,
        #[arg(long, default_value = "")]
        name: String,
        #[command(flatten)]
        config: ConfigArg,
        /// Print the assessment as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Score a CSV of applicants and write `id,score,decision`.
    Batch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Rule-base maintenance.
    Rules {
        #[command(subcommand)]
        command: RulesCommand,
    },
    /// Sample every term of a variable across its universe to CSV.
    Plot {
        #[arg(long)]
        variable: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Config file utilities.
    Config {
        #[command(subcommand)]
        command: ConfigCommand,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "TSUKA_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory holding `applicants.json` and the active `config.toml`.
        #[arg(long, default_value = "tsuka-data")]
        data_dir: PathBuf,
        /// Seed config; when absent, `<data-dir>/config.toml` or the built-in model is used.
        #[arg(long, env = "TSUKA_CONFIG")]
        config: Option<PathBuf>,
        /// Serve static files from this directory under `/`.
        #[arg(long = "static")]
        assets: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RulesCommand {
    /// Validate a config and its rules; `--rules` checks a rule file against the config's variables.
    Check {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConfigCommand {
    /// Print the built-in model as TOML.
    Default,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let code = run(cli, &mut out);
    let _ = out.flush();
    ExitCode::from(code)
}

fn fail(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn load(config: &ConfigArg) -> Result<FisConfig, StoreError> {
    match &config.config {
        Some(path) => store::load_config(path),
        None => Ok(default_config()),
    }
}

fn report_config_error(path: Option<&Path>, e: &StoreError) {
    let origin = path.map_or_else(|| "<default>".to_owned(), |p| p.display().to_string());
    match e {
        StoreError::Rules { errors, rules } => {
            for err in errors {
                let index = err.span.line - 1;
                eprintln!("{origin}: rules[{index}]:{}: {:?}: {}", err.span.column, err.kind, err.message);
                if let Some(text) = rules.get(index) {
                    let single = ParseError { span: tsuka_core::dsl::SourceSpan { line: 1, ..err.span }, ..err.clone() };
                    eprintln!("{}", indent(&single.excerpt(text)));
                }
            }
        }
        other => eprintln!("{origin}: {other}"),
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Assess { income, loan, collateral, id, name, config, json } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => {
                    report_config_error(config.config.as_deref(), &e);
                    return EXIT_USAGE;
                }
            };
            let a = Applicant { id, name, income, loan_amount: loan, collateral_value: collateral };
            match assess(&a, &cfg) {
                Ok(r) => {
                    let written = if json {
                        serde_json::to_writer(&mut *out, &r).map_err(std::io::Error::from).and_then(|_| writeln!(out))
                    } else {
                        print_assessment(out, &r, &cfg)
                    };
                    written.map(|_| match r.decision {
                        Decision::Accepted => EXIT_ACCEPTED,
                        Decision::Rejected => EXIT_REJECTED,
                    })
                }
                Err(e) => return fail(e),
            }
        }
        Command::Batch { input, output, config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => {
                    report_config_error(config.config.as_deref(), &e);
                    return EXIT_USAGE;
                }
            };
            let report = match store::ingest_csv(&input, &cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = store::export_csv(&report, &output) {
                return fail(e);
            }
            (|| {
                writeln!(out, "{} rows: {} ok, {} failed", report.rows_total, report.rows_ok, report.rows_failed)?;
                for f in &report.failures {
                    writeln!(out, "row {}: {}", f.row, f.reason)?;
                }
                Ok(if report.rows_failed == 0 { EXIT_ACCEPTED } else { EXIT_BATCH_FAILURES })
            })()
        }
        Command::Rules { command: RulesCommand::Check { config, rules } } => check_rules(out, &config, rules.as_deref()),
        Command::Plot { variable, out: path, points, config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => {
                    report_config_error(config.config.as_deref(), &e);
                    return EXIT_USAGE;
                }
            };
            match plot_csv(&cfg, &variable, points) {
                Ok(text) => match std::fs::write(&path, text) {
                    Ok(()) => writeln!(out, "wrote {points} points for `{variable}` to {}", path.display()).map(|_| 0),
                    Err(e) => return fail(format!("{}: {e}", path.display())),
                },
                Err(e) => return fail(e),
            }
        }
        Command::Config { command: ConfigCommand::Default } => {
            out.write_all(config_to_toml(&default_config()).as_bytes()).map(|_| 0)
        }
        Command::Serve { addr, data_dir, config, assets } => return serve(addr, &data_dir, config.as_deref(), assets.as_deref()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_CHECK_FAILED
    })
}

fn print_assessment(out: &mut dyn Write, r: &Assessment, cfg: &FisConfig) -> std::io::Result<()> {
    let verdict = match r.decision {
        Decision::Accepted => "ACCEPTED",
        Decision::Rejected => "REJECTED",
    };
    writeln!(out, "score {:.2} {verdict}", r.score)?;
    writeln!(out, "threshold {:.2}", cfg.threshold())?;
    if !r.clamped_inputs.is_empty() {
        writeln!(out, "clamped to universe: {}", r.clamped_inputs.join(", "))?;
    }
    writeln!(out, "{:>4}  {:>6}  {:>10}  rule", "#", "alpha", "z_i")?;
    for f in &r.trace.firings {
        let text = format_rule(&cfg.rules()[f.rule_index]);
        writeln!(out, "{:>4}  {:>6.3}  {:>10.4}  {text}", f.rule_index + 1, f.alpha.value(), f.consequent_value)?;
    }
    Ok(())
}

fn check_rules(out: &mut dyn Write, config: &ConfigArg, rules_file: Option<&Path>) -> std::io::Result<u8> {
    let cfg = match load(config) {
        Ok(c) => c,
        Err(e) => {
            report_config_error(config.config.as_deref(), &e);
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let Some(path) = rules_file else {
        writeln!(out, "OK, {} rules", cfg.rules().len())?;
        return Ok(EXIT_ACCEPTED);
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Ok(EXIT_USAGE);
        }
    };
    match parse_ruleset(&text, cfg.schema()) {
        Ok(rules) => {
            writeln!(out, "OK, {} rules", rules.len())?;
            Ok(EXIT_ACCEPTED)
        }
        Err(errors) => {
            for e in &errors {
                eprintln!("{}:{}:{}: {:?}: {}", path.display(), e.span.line, e.span.column, e.kind, e.message);
                eprintln!("{}", indent(&e.excerpt(&text)));
            }
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

/// `x,<term>,...` sampled at `points` evenly spaced values over the universe.
pub fn plot_csv(cfg: &FisConfig, variable: &str, points: usize) -> Result<String, String> {
    let v = cfg.schema().variable(variable).ok_or_else(|| format!("unknown variable `{variable}`"))?;
    if points < 2 {
        return Err("--points must be at least 2".into());
    }
    let (lo, hi) = v.universe();
    let mut text = String::from("x");
    for t in v.terms() {
        text.push(',');
        text.push_str(&t.name);
    }
    text.push('\n');
    for i in 0..points {
        let x = sweep_value(lo, hi, i, points);
        text.push_str(&x.to_string());
        for t in v.terms() {
            let d = t.function.evaluate(x).map_err(|e| e.to_string())?;
            text.push(',');
            text.push_str(&d.value().to_string());
        }
        text.push('\n');
    }
    Ok(text)
}

fn serve(addr: SocketAddr, data_dir: &Path, config: Option<&Path>, assets: Option<&Path>) -> u8 {
    if let Err(e) = std::fs::create_dir_all(data_dir) {
        return fail(format!("{}: {e}", data_dir.display()));
    }
    let active = data_dir.join("config.toml");
    let cfg = match (config, active.exists()) {
        (Some(path), _) => store::load_config(path),
        (None, true) => store::load_config(&active),
        (None, false) => Ok(default_config()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            report_config_error(config.or(Some(&active)), &e);
            return EXIT_USAGE;
        }
    };
    let store = match ApplicantStore::open(data_dir.join("applicants.json")) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let state = AppState::new(cfg, store, Some(active));
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match runtime.block_on(service::serve(addr, state, assets)) {
        Ok(()) => EXIT_ACCEPTED,
        Err(e) => fail(e),
    }
}
