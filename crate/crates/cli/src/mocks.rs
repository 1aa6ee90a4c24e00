use std::io::Write;
use std::path::PathBuf;

use share_core::registry::Registry;
use share_harness::config::{fixture_configs, load_config};
use share_harness::serve;

use crate::error::CliError;

/// Starts every configured service, prints the matching registry and waits
/// for Ctrl-C.
pub async fn run(config: Option<&PathBuf>, port_base: u16) -> Result<(), CliError> {
    let configs = match config {
        Some(path) => load_config(path).map_err(|e| CliError::user(e.to_string()))?,
        None => fixture_configs(port_base),
    };
    // Listen before announcing readiness so an early interrupt is not lost.
    let interrupted = interrupt()?;
    let mut handles = Vec::with_capacity(configs.len());
    let mut registry = Registry::new();
    for cfg in configs {
        let handle = serve(cfg).await.map_err(|e| CliError::runtime(e.to_string()))?;
        registry
            .register(handle.descriptor().clone())
            .map_err(|e| CliError::user(e.to_string()))?;
        handles.push(handle);
    }
    // A closed stdout must not stop the services.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", registry.to_json()).and_then(|()| out.flush());
    drop(out);
    interrupted.await;
    for handle in handles {
        handle.shutdown().await;
    }
    Ok(())
}

#[cfg(unix)]
fn interrupt() -> Result<impl std::future::Future<Output = ()>, CliError> {
    use tokio::signal::unix::{signal, SignalKind};
    let mut sigint =
        signal(SignalKind::interrupt()).map_err(|e| CliError::runtime(format!("cannot listen for interrupts: {e}")))?;
    Ok(async move {
        sigint.recv().await;
    })
}

#[cfg(not(unix))]
fn interrupt() -> Result<impl std::future::Future<Output = ()>, CliError> {
    Ok(async {
        let _ = tokio::signal::ctrl_c().await;
    })
}
