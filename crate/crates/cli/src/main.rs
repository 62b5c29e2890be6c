//! Command-line driver: prove conjectures from TPTP-style problem files,
//! check and validate proof documents, export them to the text backends,
//! and run batch manifests that carry proved theorems forward.

mod batch;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 1 not proved / check failed, 2 usage or input error.
#[derive(Parser)]
#[command(name = "clv", version, about = "coherent-logic prover and proof-translation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct SearchArgs {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Ceiling for mp applications along one branch of the search.
    #[arg(long, default_value_t = 4096)]
    max_steps: u64,
    /// Ceiling for case-split nesting depth.
    #[arg(long, default_value_t = 8)]
    max_splits: u32,
}

#[derive(clap::Args, Clone)]
struct FrontpageArgs {
    /// Author recorded on the document frontpage.
    #[arg(long, default_value = "clv")]
    author: String,
    /// Prover name recorded on the document frontpage.
    #[arg(long, default_value = concat!("clv ", env!("CARGO_PKG_VERSION")))]
    prover: String,
    /// Frontpage date (ISO 8601); defaults to today. Fix it for
    /// byte-reproducible runs.
    #[arg(long)]
    date: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Prove the conjectures of a problem file and write a proof document.
    Prove {
        /// TPTP-style problem file.
        input: String,
        /// Output document path (default: input stem + .xml).
        #[arg(short, long)]
        output: Option<String>,
        /// Restrict the search to the axioms named in this file, in order
        /// (one name per line, '#' comments).
        #[arg(long)]
        hints: Option<String>,
        /// Do not add the equality-decidability axiom ax_g1.
        #[arg(long)]
        no_equality_decidability: bool,
        /// Theory name recorded in the document (default: input stem).
        #[arg(long)]
        theory_name: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        frontpage: FrontpageArgs,
    },
    /// Re-check every proof of a document with the independent checker.
    Check {
        /// Proof document (XML).
        input: String,
    },
    /// Render a proof document into the requested backends.
    Export {
        /// Proof document (XML).
        input: String,
        /// Comma-separated targets: isar, coq, tex, html, txt, xml.
        #[arg(long, value_delimiter = ',', required = true)]
        to: Vec<String>,
        /// Predicate notation directives for the natural-language backends.
        #[arg(long)]
        layout: Option<String>,
        /// Directory for the rendered files (default: alongside the input).
        #[arg(long)]
        output_dir: Option<String>,
    },
    /// Check a document against the bundled schema.
    Validate {
        /// Proof document (XML).
        input: String,
    },
    /// Prove a manifest of problems in order, carrying proved theorems
    /// forward, and write one combined document plus a summary table.
    Batch {
        /// Manifest: one problem path per line, '#' comments, resolved
        /// against the manifest's directory.
        manifest: String,
        /// Directory for the combined document and summary.
        #[arg(long, default_value = "batch_out")]
        output_dir: String,
        /// Prove up to N consecutive manifest items concurrently; items in
        /// one wave see theorems proved in earlier waves only.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-item wall-clock limit in seconds.
        #[arg(long, default_value_t = 10)]
        timeout: u64,
        #[arg(long, default_value_t = 512)]
        max_steps: u64,
        #[arg(long, default_value_t = 4)]
        max_splits: u32,
        #[command(flatten)]
        frontpage: FrontpageArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prove {
            input,
            output,
            hints,
            no_equality_decidability,
            theory_name,
            search,
            frontpage,
        } => commands::cmd_prove(
            &input,
            output.as_deref(),
            hints.as_deref(),
            no_equality_decidability,
            theory_name.as_deref(),
            &search,
            &frontpage,
        ),
        Command::Check { input } => commands::cmd_check(&input),
        Command::Export {
            input,
            to,
            layout,
            output_dir,
        } => commands::cmd_export(&input, &to, layout.as_deref(), output_dir.as_deref()),
        Command::Validate { input } => commands::cmd_validate(&input),
        Command::Batch {
            manifest,
            output_dir,
            jobs,
            timeout,
            max_steps,
            max_splits,
            frontpage,
        } => batch::cmd_batch(
            &manifest,
            &output_dir,
            jobs.max(1),
            &SearchArgs {
                timeout,
                max_steps,
                max_splits,
            },
            &frontpage,
        ),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
