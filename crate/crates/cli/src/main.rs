//! `share`: resolve SPARQL queries against registered web services, classify
//! individuals, manage the service registry and run mock services.

mod classify;
mod error;
mod mocks;
mod output;
mod query;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use share_core::engine::{Engine, FailurePolicy, ResolveOptions, ResponseCache};
use share_core::rdf::{parse_ntriples, Graph, SharedGraph};
use share_core::reasoner::Ontology;
use share_core::registry::Registry;

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "share",
    version,
    about = "Answer SPARQL queries by invoking annotated web services"
)]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct CliConfig {
    /// Service registry JSON file.
    #[arg(long, global = true, env = "SHARE_REGISTRY")]
    pub registry: Option<PathBuf>,
    /// Ontology JSON file with defined classes.
    #[arg(long, global = true)]
    pub ontology: Option<PathBuf>,
    /// N-Triples file seeding the local store.
    #[arg(long, global = true)]
    pub store: Option<PathBuf>,
    /// Print the plan and the service invocations.
    #[arg(long, global = true)]
    pub explain: bool,
    /// Keep going when a service fails and flag the answer incomplete.
    #[arg(long, global = true)]
    pub best_effort: bool,
    /// Per-request timeout in seconds.
    #[arg(long, global = true, default_value_t = 10.0)]
    pub timeout: f64,
    /// Concurrent requests to distinct services.
    #[arg(long, global = true, default_value_t = 8)]
    pub parallelism: usize,
    /// Cache service answers for this many seconds.
    #[arg(long, global = true)]
    pub cache_ttl: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Ntriples,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a query read from a file, or stdin when absent or `-`.
    Query { file: Option<PathBuf> },
    /// Inspect or edit the registry.
    Registry {
        #[command(subcommand)]
        action: registry::Action,
    },
    /// Infer class memberships for the individuals listed in a file.
    Classify {
        individuals: PathBuf,
        /// Write the inferred triples here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List the instances of a defined class.
    Instances { class: String },
    /// Run mock services until interrupted.
    ServeMocks {
        /// Harness configuration; the built-in fixture when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// First port for the built-in fixture services.
        #[arg(long, default_value_t = 18080)]
        port_base: u16,
    },
}

impl CliConfig {
    pub fn load_registry(&self) -> Result<Registry, CliError> {
        match &self.registry {
            Some(path) => Registry::load(path).map_err(|e| CliError::user(format!("{}: {e}", path.display()))),
            None => Ok(Registry::new()),
        }
    }

    pub fn load_ontology(&self) -> Result<Ontology, CliError> {
        match &self.ontology {
            Some(path) => Ontology::load(path).map_err(|e| CliError::user(format!("{}: {e}", path.display()))),
            None => Ok(Ontology::empty()),
        }
    }

    pub fn load_store(&self) -> Result<SharedGraph, CliError> {
        let graph = match &self.store {
            Some(path) => {
                let text = read_file(path)?;
                parse_ntriples(&text).map_err(|e| CliError::user(format!("{}: {e}", path.display())))?
            }
            None => Graph::new(),
        };
        Ok(SharedGraph::new(graph))
    }

    pub fn engine(&self) -> Result<Engine, CliError> {
        let seconds = |name: &str, v: f64| {
            Duration::try_from_secs_f64(v)
                .ok()
                .filter(|d| !d.is_zero())
                .ok_or_else(|| CliError::user(format!("--{name} must be a positive number of seconds")))
        };
        if self.parallelism == 0 {
            return Err(CliError::user("--parallelism must be at least 1"));
        }
        Ok(Engine::new(ResolveOptions {
            failure_policy: if self.best_effort {
                FailurePolicy::BestEffort
            } else {
                FailurePolicy::FailFast
            },
            timeout: seconds("timeout", self.timeout)?,
            parallelism: self.parallelism,
            cache: match self.cache_ttl {
                Some(ttl) => Some(Arc::new(ResponseCache::new(seconds("cache-ttl", ttl)?))),
                None => None,
            },
            ..ResolveOptions::default()
        }))
    }
}

pub fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are user errors; help and version are not errors.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Query { file } => query::run(&cli.config, file.as_ref()).await,
        Command::Registry { action } => registry::run(&cli.config, action),
        Command::Classify { individuals, output } => {
            classify::classify(&cli.config, &individuals, output.as_ref()).await
        }
        Command::Instances { class } => classify::instances(&cli.config, &class).await,
        Command::ServeMocks { config, port_base } => mocks::run(config.as_ref(), port_base).await,
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
