mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

const EXIT_DOMAIN: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<bbilliard::Error>() {
        Some(bbilliard::Error::Convergence(_)) => EXIT_CONVERGENCE,
        _ => EXIT_DOMAIN,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("BB_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("BB_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let code = |e: bbilliard::Error| exit_code(&anyhow::Error::new(e));
        assert_eq!(code(bbilliard::Error::Convergence("x".into())), EXIT_CONVERGENCE);
        assert_eq!(code(bbilliard::Error::Domain("x".into())), EXIT_DOMAIN);
        assert_eq!(code(bbilliard::Error::Precondition("x".into())), EXIT_DOMAIN);
        assert_eq!(code(bbilliard::Error::Degenerate("x".into())), EXIT_DOMAIN);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), EXIT_DOMAIN);
    }
}
