use std::io::Write;
use std::panic;
use std::process::ExitCode;

use ffsieve_cli::{run_experiment, CliError, ExperimentConfig, EXIT_VIOLATION};

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FFSIEVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!("FFSIEVE_THREADS = `{v}` is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run() -> Result<i32, CliError> {
    let cfg = ExperimentConfig::from_args(std::env::args_os().skip(1))?;
    init_threads()?;
    let report = panic::catch_unwind(|| run_experiment(&cfg)).map_err(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        CliError::Internal(msg)
    })??;
    let bytes = report.emit(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(bytes.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(if report.violation_count() > 0 {
        EXIT_VIOLATION
    } else {
        0
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
        Err(e) => {
            if let CliError::Internal(msg) = &e {
                // machine-readable diagnostic record
                let rec = serde_json::json!({ "error": "internal", "message": msg });
                eprintln!("{rec}");
            } else {
                eprintln!("ffsieve: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
