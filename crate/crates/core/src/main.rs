use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use incidentdb::api::{self, AppState};
use incidentdb::db::{parse_ingest, Database};
use incidentdb::fixture::{self, ClassificationRecord};
use incidentdb::index::Query;
use incidentdb::model::{IncidentNumber, Resolution, SubmissionId, TaxonomyNamespace};
use incidentdb::views;

#[derive(Parser)]
#[command(name = "incidentdb", version, about = "Incident database: ingest, search, review and serve")]
struct Cli {
    /// Directory holding the event log and built views.
    #[arg(long, global = true, default_value = "./data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bulk-load report documents, one JSON object per line.
    Ingest { file: PathBuf },
    /// Start the HTTP API (and the UI bundle, if given).
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static UI assets served at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Render the static views into <data-dir>/views.
    BuildViews {
        #[arg(long, default_value_t = views::DEFAULT_TOP_N)]
        top_n: usize,
    },
    /// Work through the submission queue.
    Review {
        #[command(subcommand)]
        action: ReviewAction,
    },
    /// Manage taxonomy namespaces and classifications.
    Taxonomy {
        #[command(subcommand)]
        action: TaxonomyAction,
    },
    /// Rewrite the log as a snapshot of the current state.
    Compact,
    /// Run a query and print the result document.
    Search {
        #[arg(default_value = "")]
        text: String,
        /// Facet filter as key:value; repeatable.
        #[arg(short = 'f', long = "filter")]
        filters: Vec<String>,
        #[arg(long, default_value_t = 1)]
        page: u32,
        #[arg(long, default_value_t = 10)]
        page_size: u32,
    },
    /// Write the synthetic fixture corpus, taxonomies and classifications.
    Fixture {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
        #[arg(long, default_value_t = fixture::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = fixture::DEFAULT_REPORTS)]
        reports: usize,
        #[arg(long, default_value_t = fixture::DEFAULT_INCIDENTS)]
        incidents: u32,
    },
}

#[derive(Subcommand)]
enum ReviewAction {
    /// List pending submissions, oldest first.
    List {
        #[arg(long, default_value_t = 1)]
        page: usize,
    },
    /// Accept into a new incident ("new") or an existing incident number.
    Accept {
        id: u64,
        resolution: Resolution,
        #[arg(long, default_value = "reviewer")]
        reviewer: String,
    },
    Reject {
        id: u64,
        #[arg(long)]
        reason: String,
        #[arg(long, default_value = "reviewer")]
        reviewer: String,
    },
}

#[derive(Subcommand)]
enum TaxonomyAction {
    /// Register a namespace from a JSON definition.
    Load { file: PathBuf },
    Classify {
        incident: u32,
        namespace: String,
        tag: String,
        #[arg(long, default_value = "cli")]
        classifier: String,
    },
    Declassify {
        incident: u32,
        namespace: String,
        tag: String,
    },
    /// Apply classifications from a JSON-lines file.
    Apply { file: PathBuf },
}

type CliResult = Result<(), String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
        _ => Ok(()),
    }
}

fn open(data_dir: &Path) -> Result<Database, String> {
    Database::open(data_dir).map_err(|e| format!("cannot open {}: {e}", data_dir.display()))
}

fn run(cli: Cli) -> CliResult {
    let dir = cli.data_dir.as_path();
    match cli.command {
        Command::Ingest { file } => {
            let records = parse_ingest(&read(&file)?).map_err(|e| format!("{}: {e}", file.display()))?;
            let summary = open(dir)?
                .ingest(records)
                .map_err(|e| format!("{}: {e}", file.display()))?;
            println!(
                "ingested {} reports ({} new incidents)",
                summary.reports, summary.incidents_created
            );
        }
        Command::Serve { port, host, ui_dir } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| format!("bad address {host}:{port}: {e}"))?;
            let db = Arc::new(open(dir)?);
            let state = AppState::new(db, dir);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime
                .block_on(api::serve(state, addr, ui_dir))
                .map_err(|e| e.to_string())?;
        }
        Command::BuildViews { top_n } => {
            let db = open(dir)?;
            let manifest = views::build_all(&db, dir, top_n).map_err(|e| e.to_string())?;
            println!(
                "built {} views at sequence {}",
                manifest.views.len(),
                manifest.corpus_sequence
            );
        }
        Command::Review { action } => {
            let db = open(dir)?;
            match action {
                ReviewAction::List { page } => print_json(&db.pending_queue(page.max(1)))?,
                ReviewAction::Accept { id, resolution, reviewer } => {
                    let report = db
                        .accept(SubmissionId(id), resolution, &reviewer)
                        .map_err(|e| e.to_string())?;
                    println!("accepted as report {} in incident {}", report.id, report.incident_number);
                }
                ReviewAction::Reject { id, reason, reviewer } => {
                    db.reject(SubmissionId(id), &reason, &reviewer)
                        .map_err(|e| e.to_string())?;
                    println!("rejected submission {id}");
                }
            }
        }
        Command::Taxonomy { action } => {
            let db = open(dir)?;
            match action {
                TaxonomyAction::Load { file } => {
                    let ns: TaxonomyNamespace = serde_json::from_str(&read(&file)?)
                        .map_err(|e| format!("{}: {e}", file.display()))?;
                    let name = ns.name.clone();
                    db.register_namespace(ns).map_err(|e| e.to_string())?;
                    println!("registered namespace {name}");
                }
                TaxonomyAction::Classify { incident, namespace, tag, classifier } => {
                    db.classify(IncidentNumber(incident), &namespace, &tag, &classifier)
                        .map_err(|e| e.to_string())?;
                }
                TaxonomyAction::Declassify { incident, namespace, tag } => {
                    db.declassify(IncidentNumber(incident), &namespace, &tag)
                        .map_err(|e| e.to_string())?;
                }
                TaxonomyAction::Apply { file } => {
                    let text = read(&file)?;
                    let mut applied = 0;
                    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                        let at = |e: String| format!("{}: line {}: {e}", file.display(), i + 1);
                        let c: ClassificationRecord = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
                        db.classify(c.incident_number, &c.namespace, &c.tag, &c.classifier)
                            .map_err(|e| at(e.to_string()))?;
                        applied += 1;
                    }
                    println!("applied {applied} classifications");
                }
            }
        }
        Command::Compact => {
            open(dir)?.compact().map_err(|e| e.to_string())?;
            println!("compacted");
        }
        Command::Search { text, filters, page, page_size } => {
            let mut query = Query::text(text).page(page, page_size);
            for f in &filters {
                query = query.filter_spec(f).map_err(|e| e.to_string())?;
            }
            let result = open(dir)?.search(&query).map_err(|e| e.to_string())?;
            print_json(&result)?;
        }
        Command::Fixture { out, seed, reports, incidents } => write_fixture(&out, seed, reports, incidents)?,
    }
    Ok(())
}

fn write_fixture(out: &Path, seed: u64, reports: usize, incidents: u32) -> CliResult {
    let io = |e: std::io::Error| format!("{}: {e}", out.display());
    let corpus = fixture::generate(seed, reports, incidents);
    fs::create_dir_all(out.join("taxonomies")).map_err(io)?;
    fs::write(out.join("corpus.jsonl"), corpus.to_jsonl()).map_err(io)?;
    for ns in fixture::taxonomies() {
        let text = serde_json::to_string_pretty(&ns).map_err(|e| e.to_string())? + "\n";
        let file = format!("{}.json", ns.name.to_lowercase());
        fs::write(out.join("taxonomies").join(file), text).map_err(io)?;
    }
    let lines: String = fixture::classifications(&corpus)
        .iter()
        .map(|c| serde_json::to_string(c).expect("serializes") + "\n")
        .collect();
    fs::write(out.join("classifications.jsonl"), lines).map_err(io)?;
    println!("wrote {} reports over {} incidents to {}", reports, corpus.incident_count(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
