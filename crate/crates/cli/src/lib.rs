//! Command-line front end for `lipfree`: argument parsing, input files,
//! JSON/text reports and report replay.

pub mod commands;
pub mod input;
pub mod report;

use std::time::Instant;

use clap::Parser;

use commands::{execute, Cli, Format};

/// Runs the command line `argv` (program name first) and returns the exit
/// code and the rendered report, or an error message for standard error.
pub fn run(argv: Vec<String>) -> (u8, String, String) {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (1, String::new(), text) };
        }
    };
    if let Some(jobs) = cli.jobs {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let started = Instant::now();
    let echo = argv.iter().skip(1).cloned().collect();
    match execute(&cli.command, echo) {
        Ok(mut report) => {
            if cli.timing {
                report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                Format::Text => report::render_text(&report),
            };
            (report.verdict.exit_code(), out, String::new())
        }
        Err(e) => (1, String::new(), format!("error: {e:#}\n")),
    }
}
