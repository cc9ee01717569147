use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use veq_cli::commands::{self, CheckSelection, SolveMode, EXIT_PARSE};
use veq_cli::problem::ProblemSpec;
use veq_cli::{exit_code, render, repro};
use veq_core::panel::TheoremId;

#[derive(Parser)]
#[command(name = "veq", version, about = "Weak vector equilibrium problems on grids")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical reports.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the primal, dual or perturbed problem.
    #[command(group(ArgGroup::new("mode").args(["primal", "dual", "both", "perturbed"])))]
    Solve {
        file: PathBuf,
        #[arg(long)]
        primal: bool,
        #[arg(long)]
        dual: bool,
        /// Both problems and their relation (default).
        #[arg(long)]
        both: bool,
        #[arg(long)]
        perturbed: bool,
        /// Exit 3 when a solution set is empty.
        #[arg(long)]
        expect_nonempty: bool,
    },
    /// Run named checkers or a theorem's hypothesis panel.
    #[command(group(ArgGroup::new("what").args(["checker", "panel"]).required(true)))]
    Check {
        file: PathBuf,
        #[arg(long, num_args = 1..)]
        checker: Vec<String>,
        /// One of t3.0, t11, t110, t112, t12, t13, t134, t5.1, t5.2, t5.3.
        #[arg(long)]
        panel: Option<String>,
    },
    /// Reproduce a worked example (ex31 or ex32).
    Repro { name: String },
}

fn run(cli: &Cli) -> serde_json::Value {
    let load = |file: &PathBuf, cmd: &str| {
        ProblemSpec::load(file).map_err(|e| commands::error_report(cmd, e.to_string(), EXIT_PARSE))
    };
    match &cli.command {
        Command::Solve {
            file,
            primal,
            dual,
            perturbed,
            expect_nonempty,
            ..
        } => {
            let mode = if *primal {
                SolveMode::Primal
            } else if *dual {
                SolveMode::Dual
            } else if *perturbed {
                SolveMode::Perturbed
            } else {
                SolveMode::Both
            };
            match load(file, "solve") {
                Ok(spec) => commands::solve(&spec, mode, *expect_nonempty),
                Err(r) => r,
            }
        }
        Command::Check { file, checker, panel } => {
            let selection = match panel {
                Some(p) => match p.parse::<TheoremId>() {
                    Ok(id) => CheckSelection::Panel(id),
                    Err(e) => return commands::error_report("check", e, EXIT_PARSE),
                },
                None => CheckSelection::Checkers(checker.clone()),
            };
            match load(file, "check") {
                Ok(spec) => commands::check(&spec, &selection),
                Err(r) => r,
            }
        }
        Command::Repro { name } => repro::repro(name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("VEQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
    }
    let report = run(&cli);
    let code = exit_code(&report);
    if let Some(msg) = report["error"].as_str() {
        eprintln!("veq: {msg}");
    }
    let text = render(report, cli.deterministic);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("veq: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_PARSE as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
