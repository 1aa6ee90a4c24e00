use std::collections::BTreeSet;

use clap::{Subcommand, ValueEnum};
use url::Url;

use share_core::rdf::Iri;
use share_core::registry::{Direction, Registry, ServiceDescriptor};

use crate::error::CliError;
use crate::CliConfig;

#[derive(Subcommand)]
pub enum Action {
    /// Register a service, creating the registry file when missing.
    Add {
        #[arg(long)]
        id: String,
        #[arg(long)]
        endpoint: Url,
        #[arg(long)]
        input_class: String,
        #[arg(long)]
        output_class: String,
        /// Annotated predicate; repeat for several.
        #[arg(long = "predicate")]
        predicates: Vec<String>,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long)]
        provider: Option<String>,
    },
    /// One line per service: id, predicates, direction, input and output class.
    List,
    /// Print one service descriptor as JSON.
    Show { id: String },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Inverse,
}

fn iri(text: &str) -> Result<Iri, CliError> {
    Iri::new(text).map_err(|e| CliError::user(e.to_string()))
}

pub fn run(config: &CliConfig, action: Action) -> Result<(), CliError> {
    let Some(path) = &config.registry else {
        return Err(CliError::user("no registry: pass --registry or set SHARE_REGISTRY"));
    };
    match action {
        Action::Add {
            id,
            endpoint,
            input_class,
            output_class,
            predicates,
            direction,
            provider,
        } => {
            let mut registry = if path.exists() {
                config.load_registry()?
            } else {
                Registry::new()
            };
            let descriptor = ServiceDescriptor {
                id: iri(&id)?,
                endpoint,
                input_class: iri(&input_class)?,
                output_class: iri(&output_class)?,
                predicates: predicates.iter().map(|p| iri(p)).collect::<Result<BTreeSet<_>, _>>()?,
                direction: match direction {
                    DirectionArg::Forward => Direction::Forward,
                    DirectionArg::Inverse => Direction::Inverse,
                },
                provider,
            };
            registry
                .register(descriptor)
                .map_err(|e| CliError::user(e.to_string()))?;
            registry
                .save(path)
                .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
        }
        Action::List => {
            let registry = config.load_registry()?;
            for d in registry.services() {
                let predicates: Vec<String> = d.predicates.iter().map(ToString::to_string).collect();
                println!(
                    "{}  {}  {}  {} -> {}",
                    d.id,
                    predicates.join(","),
                    d.direction,
                    d.input_class,
                    d.output_class
                );
            }
            Ok(())
        }
        Action::Show { id } => {
            let registry = config.load_registry()?;
            let d = registry
                .get(&iri(&id)?)
                .ok_or_else(|| CliError::user(format!("no service {id} in {}", path.display())))?;
            println!("{}", serde_json::to_string_pretty(d).expect("descriptors serialize"));
            Ok(())
        }
    }
}
