//! `chaincli`: band, flat-band, probability and validation reports for
//! magnetic ring chains, written as CSV or JSON with optional gnuplot
//! scripts.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command, Format, OutputArgs};
use commands::Report;
use error::CliError;
use output::{gnuplot_script, script_path, write_atomic};

/// Thread count for the parallel computations.
pub const THREADS_ENV: &str = "RINGCHAIN_THREADS";

/// Notes echoed to stderr; the JSON output keeps all of them.
const MAX_NOTES: usize = 5;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // Fails only if the pool already exists, as when run twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn check_output(output: &OutputArgs) -> Result<(), CliError> {
    if output.plot && output.out.is_none() {
        return Err(CliError::Usage("--plot needs --out".into()));
    }
    if output.plot && output.format() == Format::Json {
        return Err(CliError::Usage("--plot needs CSV output".into()));
    }
    Ok(())
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    let (report, output) = match command {
        Command::Bands(a) => (check_output(&a.output).and_then(|_| commands::bands(a))?, a.output.clone()),
        Command::Negbands(a) => (check_output(&a.output).and_then(|_| commands::negbands(a))?, a.output.clone()),
        Command::Flatbands(a) => (check_output(&a.output).and_then(|_| commands::flatbands(a))?, a.output.clone()),
        Command::Prob(a) => (check_output(&a.output).and_then(|_| commands::prob(a))?, a.output.clone()),
        Command::Sweep(a) => (check_output(&a.output).and_then(|_| commands::sweep(a))?, a.output.clone()),
        Command::OracleCheck(a) => {
            let output = OutputArgs {
                out: a.out.clone(),
                format: a.format,
                plot: false,
            };
            (commands::oracle_check(a)?, output)
        }
    };
    emit(report, &output, stdout, stderr)
}

fn emit(report: Report, output: &OutputArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let text = report.table.render(output.format())?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &output.out {
        Some(path) => {
            write_atomic(path, &text)?;
            if output.plot {
                if let Some((title, kind)) = report.plot {
                    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    write_atomic(&script_path(path), &gnuplot_script(&name, &title, kind))?;
                }
            }
        }
        None => stdout.write_all(text.as_bytes()).map_err(io)?,
    }
    let notes = &report.table.notes;
    for line in notes.iter().take(MAX_NOTES) {
        writeln!(stderr, "note: {line}").map_err(io)?;
    }
    if notes.len() > MAX_NOTES {
        writeln!(stderr, "note: {} more notes, listed in the JSON output", notes.len() - MAX_NOTES).map_err(io)?;
    }
    for line in &report.summary {
        writeln!(stderr, "{line}").map_err(io)?;
    }
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
