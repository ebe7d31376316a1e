mod commands;
mod config;
mod error;
mod presets;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use serde_json::json;

use crate::config::{parse_config, RunConfig};
use crate::error::CliError;

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GHOSTDYN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("GHOSTDYN_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("GHOSTDYN_THREADS: {e}")))
}

fn manifest_path(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", cfg.raw("output")))
}

fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let stdout = &mut std::io::stdout();
    write!(stdout, "{}", cfg.echo())?;
    let start = Instant::now();
    let mut outputs = commands::run(cfg, stdout)?;
    let seconds = start.elapsed().as_secs_f64();
    let hashes = outputs.hashes()?;
    let manifest = json!({
        "tool": "ghostdyn",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config": cfg.values,
        "wall_time_seconds": seconds,
        "outputs": hashes.iter().map(|(p, h)| json!({ "path": p, "sha256": h })).collect::<Vec<_>>(),
    });
    let path = manifest_path(cfg);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    outputs.keep();
    for (p, h) in &hashes {
        println!("wrote {p} sha256 {h}");
    }
    println!("wrote {} in {seconds:.3}s", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let result = init_threads()
        .and_then(|()| parse_config(std::env::args_os()))
        .and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ghostdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
