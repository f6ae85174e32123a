//! `yangc` — validate YANG specifications and translate them to YIN.
//!
//! Exit status: 0 when every file validates without error diagnostics,
//! 1 when any validation error was reported, 2 on usage or I/O errors.

use clap::Parser;
use std::ffi::OsString;
use std::path::PathBuf;
use yangc_core::diag::{render, RenderFormat};
use yangc_core::{resolver, validate_file, yin, DiagCode};

#[derive(Parser)]
#[command(
    name = "yangc",
    disable_version_flag = true,
    about = "Checks YANG specifications (modules or submodules) and optionally translates them",
    override_usage = "yangc [-h] [-f format] [-o outputfile] [-p paths] file [file]*"
)]
struct Cli {
    /// Format for a translated output (`yin`)
    #[arg(short = 'f', value_name = "format")]
    format: Option<String>,

    /// Name of the translated output; standard output if not given.
    /// Ignored if no format is given
    #[arg(short = 'o', value_name = "outputfile")]
    output: Option<PathBuf>,

    /// Where to find other YANG specifications; may repeat, each value is
    /// a list separated by the platform path separator. Entries are tried
    /// before $YANG_PATH and the current directory
    #[arg(short = 'p', value_name = "paths")]
    paths: Vec<OsString>,

    /// Files each containing exactly one YANG specification
    #[arg(value_name = "file", required = true)]
    files: Vec<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();

    if let Some(format) = &cli.format {
        if format != "yin" {
            eprintln!("yangc: unknown format `{}`; supported: yin", format);
            return 2;
        }
    }
    if cli.format.is_some() && cli.output.is_some() && cli.files.len() > 1 {
        eprintln!("yangc: -o names a single file; cannot translate {} inputs into it", cli.files.len());
        return 2;
    }

    let mut explicit: Vec<PathBuf> = Vec::new();
    for value in &cli.paths {
        explicit.extend(std::env::split_paths(value));
    }
    let search_paths = resolver::default_search_paths(&explicit);

    let mut any_error = false;
    let mut unreadable_input = false;
    let mut translated = String::new();

    for file in &cli.files {
        let outcome = validate_file(file, &search_paths);
        eprint!("{}", render(&outcome.diagnostics, RenderFormat::Human));
        if outcome.has_errors() {
            any_error = true;
        }
        if outcome.raw.is_none()
            && outcome
                .diagnostics
                .iter()
                .any(|d| d.code == DiagCode::FileNotReadable)
        {
            unreadable_input = true;
        }
        if cli.format.is_some() {
            if let Some(spec) = &outcome.spec {
                translated.push_str(&yin::emit_yin(spec).text);
            }
        }
    }

    if cli.format.is_some() {
        match &cli.output {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &translated) {
                    eprintln!("yangc: cannot write `{}`: {}", path.display(), e);
                    return 2;
                }
            }
            None => print!("{}", translated),
        }
    }

    if unreadable_input {
        2
    } else if any_error {
        1
    } else {
        0
    }
}
