//! Driver for the `viscap` binary: configuration, dispatch, artifacts and
//! exit codes.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 failed compare check.

pub mod commands;
pub mod config;
pub mod json;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{error, info};
use viscap::Error;

pub use config::{Command, RunConfig};
pub use report::{compare_report, CompareReport};

use commands::Outcome;
use json::ErrorJson;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(v) if v.is_validation() => EXIT_VALIDATION,
        Some(_) => EXIT_NUMERICAL,
        // I/O and serialization trouble is not a property of the input.
        None => EXIT_NUMERICAL,
    }
}

fn write_error(out: &Path, code: i32, e: &anyhow::Error) {
    let kind = e.downcast_ref::<Error>().map(|v| v.kind().to_string()).unwrap_or_else(|| "io".into());
    let body = ErrorJson { exit_code: code, kind, message: format!("{e:#}") };
    let _ = fs::create_dir_all(out);
    if let Ok(s) = serde_json::to_string_pretty(&body) {
        let _ = fs::write(out.join("error.json"), s + "\n");
    }
}

fn init_log(out: &Path) {
    let Ok(file) = fs::File::create(out.join("run.log")) else { return };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Pipe(Box::new(file)))
        .format(|buf, rec| writeln!(buf, "[{}] {}", rec.level(), rec.args()))
        .try_init();
}

/// Runs one command; returns the process exit code.
pub fn run(cmd: Command, config_path: &Path, out: Option<&Path>) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            let e = anyhow::Error::new(Error::Config(format!("reading {}: {e}", config_path.display())));
            write_error(out.unwrap_or(Path::new(".")), EXIT_VALIDATION, &e);
            return EXIT_VALIDATION;
        }
    };
    let cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            // Nothing but the error record for unparseable input.
            write_error(out.unwrap_or(Path::new(".")), EXIT_VALIDATION, &e.into());
            return EXIT_VALIDATION;
        }
    };
    let out: PathBuf = out.map(Path::to_path_buf).or_else(|| cfg.output_dir.clone().map(PathBuf::from)).unwrap_or_else(|| ".".into());
    if let Err(e) = fs::create_dir_all(&out) {
        let e = anyhow::Error::new(e).context(format!("creating {}", out.display()));
        write_error(Path::new("."), EXIT_NUMERICAL, &e);
        return EXIT_NUMERICAL;
    }
    init_log(&out);
    info!("command {cmd:?}, config {}", config_path.display());
    info!("resolved config: {}", serde_json::to_string(&cfg).unwrap_or_default());
    let res = cfg.validate(cmd).map_err(anyhow::Error::from).and_then(|()| match cmd {
        Command::Sweep => commands::sweep(&cfg, &out),
        Command::Oracle => commands::oracle(&cfg, &out),
        Command::Davies => commands::davies(&cfg, &out),
        Command::Symbol => commands::symbol_cmd(&cfg, &out),
        Command::Compare => commands::compare(&cfg, &out),
    });
    match res {
        Ok(Outcome::Done) => {
            info!("done");
            EXIT_OK
        }
        Ok(Outcome::CheckFailed) => {
            let e = anyhow::anyhow!("compare check failed; see compare_report.json");
            error!("{e}");
            let body = ErrorJson { exit_code: EXIT_CHECK, kind: "check".into(), message: e.to_string() };
            let _ = commands::write_json(&out, "error.json", &body);
            EXIT_CHECK
        }
        Err(e) => {
            let code = exit_code(&e);
            error!("{e:#}");
            write_error(&out, code, &e);
            code
        }
    }
}
