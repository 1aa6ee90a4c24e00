use std::io::Read;
use std::path::PathBuf;

use serde_json::{json, Value};

use share_core::engine::ResolveError;
use share_core::planner::{explain, plan};
use share_core::sparql::parse_query;

use crate::error::CliError;
use crate::output;
use crate::{read_file, CliConfig, Format};

fn read_query(file: Option<&PathBuf>) -> Result<String, CliError> {
    match file {
        Some(path) if path.as_os_str() != "-" => read_file(path),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::user(format!("stdin: {e}")))?;
            Ok(text)
        }
    }
}

pub async fn run(config: &CliConfig, file: Option<&PathBuf>) -> Result<(), CliError> {
    let text = read_query(file)?;
    let query = parse_query(&text).map_err(|e| CliError::user(e.to_string()))?;
    let registry = config.load_registry()?;
    let ontology = config.load_ontology()?;
    let store = config.load_store()?;
    let engine = config.engine()?;

    let plan_text = if config.explain {
        let p = plan(&query, &registry, &ontology, &store.snapshot()).map_err(|e| CliError::user(e.to_string()))?;
        Some(explain(&p))
    } else {
        None
    };
    // N-Triples output stays parseable, so its plan goes to stderr.
    match (&plan_text, config.format) {
        (Some(text), Format::Table) => println!("{text}"),
        (Some(text), Format::Ntriples) => eprintln!("{text}"),
        _ => {}
    }

    let resolution = match engine.resolve(&query, &registry, &ontology, &store).await {
        Ok(r) => r,
        Err(e) => {
            if config.format == Format::Json {
                print_failure(&e, plan_text.as_deref());
            }
            return Err(e.into());
        }
    };

    match config.format {
        Format::Table => print!("{}", resolution.table),
        Format::Ntriples => print!("{}", output::ntriples(&output::answer_graph(&query, &resolution.table))),
        Format::Json => {
            let mut doc = output::table_json(&resolution.table);
            doc.insert("incomplete".into(), json!(resolution.incomplete));
            let relaxed: Vec<String> = resolution.relaxed.iter().map(ToString::to_string).collect();
            doc.insert("relaxed".into(), json!(relaxed));
            doc.insert("invocations".into(), output::records_json(&resolution.records));
            if let Some(text) = &plan_text {
                doc.insert("plan".into(), json!(text.lines().collect::<Vec<_>>()));
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize")
            );
        }
    }
    match (config.explain, config.format) {
        (true, Format::Table) => print!("\n{}", output::records_text(&resolution.records)),
        (true, Format::Ntriples) => eprint!("\n{}", output::records_text(&resolution.records)),
        _ => {}
    }
    if resolution.incomplete {
        eprintln!("warning: some service calls failed; the answer may be incomplete");
    }
    Ok(())
}

fn print_failure(e: &ResolveError, plan_text: Option<&str>) {
    let mut doc = json!({
        "error": e.to_string(),
        "invocations": output::records_json(e.records()),
    });
    if let Some(text) = plan_text {
        doc["plan"] = json!(text.lines().collect::<Vec<_>>());
    }
    println!("{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
}
