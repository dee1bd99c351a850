//! The `sitecoord` command: import projects, query remarks, export reports
//! and run the HTTP service.
//!
//! Exit codes: 0 success, 2 unreadable input or bad flags, 3 refused by a
//! domain rule, 4 environment (paths, ports, damaged logs).

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use sitecoord_api::{ErrorBody, SearchParams, ServeConfig, ServeError};
use sitecoord_core::model::Project;
use sitecoord_core::report::RemarkStatus;
use sitecoord_core::store::SystemClock;
use sitecoord_core::{EntityId, Error, ErrorClass, Platform};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_ENVIRONMENT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sitecoord", version, about = "Construction site coordination platform")]
pub struct Cli {
    /// Directory holding the project logs.
    #[arg(long, global = true, default_value = "sitecoord-data")]
    pub data_dir: PathBuf,
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Actor recorded as author of commands that write.
    #[arg(long, global = true, default_value = "operator")]
    pub actor: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Import a project file (JSON interchange format).
    Import {
        /// Project file to read.
        file: PathBuf,
    },
    /// Search remarks at portfolio, project or report scope.
    Query {
        #[arg(long, value_parser = ["portfolio", "project", "report"], default_value = "portfolio")]
        scope: String,
        #[arg(long)]
        project: Option<String>,
        #[arg(long)]
        report: Option<String>,
        #[arg(long)]
        responsible: Option<String>,
        #[arg(long)]
        lot: Option<String>,
        #[arg(long)]
        element: Option<String>,
        #[arg(long, value_parser = ["open", "closed"])]
        status: Option<String>,
        /// First meeting date of the range (YYYY-MM-DD); needs --to.
        #[arg(long)]
        from: Option<NaiveDate>,
        /// Last meeting date of the range (YYYY-MM-DD); needs --from.
        #[arg(long)]
        to: Option<NaiveDate>,
    },
    /// Write a meeting report as a single HTML file.
    ExportReport {
        #[arg(long)]
        project: String,
        #[arg(long)]
        report: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// JSON file mapping bearer tokens to actor ids.
        #[arg(long)]
        tokens: PathBuf,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub body: ErrorBody,
}

impl Failure {
    fn new(exit: i32, code: &str, message: impl Into<String>) -> Self {
        Failure {
            exit,
            body: ErrorBody {
                code: code.into(),
                message: message.into(),
                details: None,
            },
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e.class() {
            ErrorClass::Internal => EXIT_ENVIRONMENT,
            _ => EXIT_DOMAIN,
        };
        let details = match &e {
            Error::InvalidProject(v) => serde_json::to_value(v).ok(),
            _ => None,
        };
        Failure {
            exit,
            body: ErrorBody {
                code: e.code().into(),
                message: e.to_string(),
                details,
            },
        }
    }
}

impl From<ServeError> for Failure {
    fn from(e: ServeError) -> Self {
        let code = match &e {
            ServeError::UnreadableDataDir { .. } => "unreadable-data-dir",
            ServeError::Tokens(_) => "unreadable-token-file",
            ServeError::Bind { .. } => "bind-failure",
            ServeError::Io(_) => "io-error",
        };
        Failure::new(EXIT_ENVIRONMENT, code, e.to_string())
    }
}

fn open(data_dir: &Path) -> Result<Platform, Failure> {
    Ok(sitecoord_api::open_platform(data_dir, Arc::new(SystemClock))?)
}

/// Runs one command, printing results on `out`. Errors are returned for the
/// caller to report.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let json = cli.format == Format::Json;
    let io = |e: std::io::Error| Failure::new(EXIT_ENVIRONMENT, "io-error", e.to_string());
    match &cli.command {
        Command::Import { file } => {
            let text = fs::read_to_string(file)
                .map_err(|e| Failure::new(EXIT_INPUT, "unreadable-file", format!("{}: {e}", file.display())))?;
            let project = Project::from_json(&text)
                .map_err(|e| Failure::new(EXIT_INPUT, "parse-error", format!("{}: {e}", file.display())))?;
            fs::create_dir_all(&cli.data_dir).map_err(io)?;
            let platform = open(&cli.data_dir)?;
            let imported = platform.import_project(&EntityId::from(cli.actor.as_str()), project)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&imported).expect("serializable")).map_err(io)?;
            } else {
                writeln!(out, "{}", imported.id).map_err(io)?;
            }
        }
        Command::Query {
            scope,
            project,
            report,
            responsible,
            lot,
            element,
            status,
            from,
            to,
        } => {
            let id = |s: &Option<String>| s.as_deref().map(EntityId::from);
            let params = SearchParams {
                scope: Some(scope.clone()),
                project: id(project),
                report: id(report),
                responsible: id(responsible),
                lot: id(lot),
                element: id(element),
                status: status.as_deref().map(|s| match s {
                    "open" => RemarkStatus::Open,
                    _ => RemarkStatus::Closed,
                }),
                from: *from,
                to: *to,
            };
            let (scope, filter) = params
                .to_request()
                .map_err(|e| Failure::new(EXIT_INPUT, "invalid-flag", e.to_string()))?;
            let platform = open(&cli.data_dir)?;
            let hits = platform.search(&scope, &filter)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&hits).expect("serializable")).map_err(io)?;
            } else {
                for h in &hits {
                    writeln!(out, "{}\t{}\t{}", h.project_id, h.report_id, h.remark_id).map_err(io)?;
                }
                writeln!(out, "{} match(es)", hits.len()).map_err(io)?;
            }
        }
        Command::ExportReport { project, report, output } => {
            let platform = open(&cli.data_dir)?;
            let html = platform.export_report(&EntityId::from(project.as_str()), &EntityId::from(report.as_str()))?;
            fs::write(output, &html).map_err(|e| {
                Failure::new(EXIT_ENVIRONMENT, "unwritable-path", format!("{}: {e}", output.display()))
            })?;
            if json {
                let v = serde_json::json!({ "path": output, "bytes": html.len() });
                writeln!(out, "{v}").map_err(io)?;
            } else {
                writeln!(out, "wrote {} ({} bytes)", output.display(), html.len()).map_err(io)?;
            }
        }
        Command::Serve { addr, tokens } => {
            let config = ServeConfig {
                data_dir: cli.data_dir.clone(),
                addr: *addr,
                token_file: tokens.clone(),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(io)?;
            runtime.block_on(async {
                let bound = sitecoord_api::bind(&config).await?;
                let local = bound.local_addr()?;
                // Scripts wait for this line to know the service is up.
                writeln!(out, "listening on {local}")?;
                out.flush()?;
                let tokens = Arc::clone(&bound.state.tokens);
                bound.run(sitecoord_api::shutdown_signal(tokens)).await
            })?;
        }
    }
    Ok(())
}

/// Reports a failure on stderr in the chosen format.
pub fn report_failure(format: Format, failure: &Failure, err: &mut dyn Write) {
    let _ = match format {
        Format::Json => writeln!(err, "{}", serde_json::to_string(&failure.body).expect("serializable")),
        Format::Human => {
            let mut text = format!("error [{}]: {}", failure.body.code, failure.body.message);
            if let Some(details) = failure.body.details.as_ref().and_then(|d| d.as_array()) {
                for d in details {
                    text.push_str(&format!(
                        "\n  {}: {} ({})",
                        d["entity"].as_str().unwrap_or_default(),
                        d["rule"].as_str().unwrap_or_default(),
                        d["detail"].as_str().unwrap_or_default()
                    ));
                }
            }
            writeln!(err, "{text}")
        }
    };
}
