use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use paction_cli::{run, Command, Format, Options, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "paction", version, about = "Partial actions of finite groups on quivers and path algebras")]
struct Cli {
    #[command(subcommand)]
    command: Verb,
    /// Instance file to read.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Longest path length used by algebra checks (overrides `truncate`).
    #[arg(long, global = true)]
    truncate: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Verb {
    /// Check the axioms of the file's subject.
    Validate,
    /// Build the enveloping action of a partial action.
    Globalize,
    /// Restrict a global action to a subquiver.
    Restrict,
    /// Check the induced action on the path algebra and its globalization.
    AlgebraCheck,
    /// Print the subject's quiver in DOT.
    ExportDot {
        /// Draw the enveloping quiver with the original highlighted.
        #[arg(long)]
        envelope: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, envelope) = match cli.command {
        Verb::Validate => (Command::Validate, false),
        Verb::Globalize => (Command::Globalize, false),
        Verb::Restrict => (Command::Restrict, false),
        Verb::AlgebraCheck => (Command::AlgebraCheck, false),
        Verb::ExportDot { envelope } => (Command::ExportDot, envelope),
    };
    let Some(input) = cli.input else {
        eprintln!("error: --input <file> is required");
        return ExitCode::from(EXIT_INPUT as u8);
    };
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Structured => Format::Structured,
    };
    let outcome = run(command, &text, &Options { truncate: cli.truncate, format, envelope });
    if outcome.code == EXIT_INPUT && format == Format::Text {
        eprint!("{}", outcome.output);
    } else if let Some(path) = cli.output {
        if let Err(e) = std::fs::write(&path, &outcome.output) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    } else {
        print!("{}", outcome.output);
    }
    ExitCode::from(outcome.code as u8)
}
