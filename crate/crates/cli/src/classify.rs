use std::collections::BTreeSet;
use std::path::PathBuf;

use serde_json::json;

use share_core::rdf::Iri;
use share_core::reasoner::{self, Ontology};

use crate::error::CliError;
use crate::output;
use crate::{read_file, CliConfig, Format};

/// One IRI per line, optionally in angle brackets. Blank lines and lines
/// starting with `#` are skipped.
fn parse_individuals(text: &str) -> Result<BTreeSet<Iri>, CliError> {
    let mut out = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bare = line.strip_prefix('<').and_then(|l| l.strip_suffix('>')).unwrap_or(line);
        let iri = Iri::new(bare).map_err(|e| CliError::user(format!("line {}: {e}", n + 1)))?;
        out.insert(iri);
    }
    Ok(out)
}

fn require_ontology(config: &CliConfig) -> Result<Ontology, CliError> {
    if config.ontology.is_none() {
        return Err(CliError::user("no ontology: pass --ontology"));
    }
    config.load_ontology()
}

pub async fn classify(config: &CliConfig, individuals: &PathBuf, output: Option<&PathBuf>) -> Result<(), CliError> {
    let ontology = require_ontology(config)?;
    let individuals = parse_individuals(&read_file(individuals)?)?;
    let registry = config.load_registry()?;
    let store = config.load_store()?;
    let engine = config.engine()?;
    let lifting = reasoner::lift(&engine, &ontology, &individuals, &registry, &store).await?;
    for (class, individual) in &lifting.unknown {
        eprintln!("warning: membership of {individual} in {class} is unknown: a service call failed");
    }
    let text = match config.format {
        Format::Json => {
            let unknown: Vec<_> = lifting
                .unknown
                .iter()
                .map(|(c, i)| json!({"class": c.as_str(), "individual": i.as_str()}))
                .collect();
            let doc = json!({
                "types": output::ntriples(&lifting.graph).lines().collect::<Vec<_>>(),
                "unknown": unknown,
                "invocations": output::records_json(&lifting.records),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("JSON values serialize")
            )
        }
        Format::Table | Format::Ntriples => output::ntriples(&lifting.graph),
    };
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub async fn instances(config: &CliConfig, class: &str) -> Result<(), CliError> {
    let ontology = require_ontology(config)?;
    let bare = class
        .strip_prefix('<')
        .and_then(|l| l.strip_suffix('>'))
        .unwrap_or(class);
    let class = Iri::new(bare).map_err(|e| CliError::user(e.to_string()))?;
    if !ontology.is_defined(&class) {
        return Err(CliError::user(format!("{class} is not a defined class")));
    }
    let registry = config.load_registry()?;
    let store = config.load_store()?;
    let engine = config.engine()?;
    let found = reasoner::instances(&engine, &ontology, &class, &registry, &store).await?;
    match config.format {
        Format::Json => {
            let items: Vec<&str> = found.iter().map(Iri::as_str).collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!(items)).expect("JSON values serialize")
            );
        }
        Format::Table | Format::Ntriples => print!("{}", output::iri_lines(&found)),
    }
    Ok(())
}
