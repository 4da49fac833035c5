use clap::{Parser, Subcommand};
use heflow_cli::bundled::{bundled_text, BUNDLED};
use heflow_cli::{run, verify, CliError, ScenarioConfig};
use heflow_core::bundle::ScenarioKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "heflow", version, about = "Perturbed Hermitian-Einstein heat flow on lattice tori")]
struct Cli {
    /// Worker threads for the per-node passes.
    #[arg(long, global = true, env = "HEFLOW_THREADS")]
    threads: Option<usize>,
    /// Output directory, overriding `outputs.dir`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the pipeline of a config file, or of a bundled config by name.
    Run { config: String },
    /// Re-check the invariants recorded in an artifact directory.
    Verify { dir: PathBuf },
    /// Built-in scenarios and bundled configs.
    Scenarios {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    List,
    /// Print a bundled config.
    Show { name: String },
}

fn load(config: &str) -> Result<ScenarioConfig, CliError> {
    let path = PathBuf::from(config);
    if path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })?;
        return ScenarioConfig::parse(&text);
    }
    match bundled_text(config) {
        Some(text) => ScenarioConfig::parse(text),
        None => Err(CliError::Io {
            path,
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled config"),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads {n}: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.cmd {
        Cmd::Run { config } => {
            let outcome = load(&config).and_then(|cfg| run(&cfg, cli.output.as_deref()));
            match outcome {
                Ok(summary) => {
                    let m = &summary.manifest;
                    println!("pipeline {} on {} -> {}", m.pipeline, m.scenario, summary.dir.display());
                    for (k, v) in &m.verdicts {
                        println!("  {k} = {v}");
                    }
                    if !m.all_converged {
                        eprintln!("error: a mandatory solve did not converge");
                    }
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Cmd::Verify { dir } => {
            let rep = verify(&dir);
            for c in &rep.checks {
                println!("ok: {c}");
            }
            for f in &rep.failures {
                println!("FAIL: {f}");
            }
            if rep.passed() {
                println!("verify: pass");
                ExitCode::SUCCESS
            } else {
                println!("verify: fail");
                ExitCode::from(1)
            }
        }
        Cmd::Scenarios { cmd: ScenarioCmd::List } => {
            println!("scenario tags (prefix with bumped_ and/or punctured_):");
            for (short, k) in ["s1", "s2", "s3"].iter().zip(ScenarioKind::all()) {
                println!("  {short:<4} {:<12} rank {}", k.name(), k.rank());
            }
            println!("bundled configs:");
            for (name, _) in BUNDLED {
                println!("  {name}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Scenarios { cmd: ScenarioCmd::Show { name } } => match bundled_text(&name) {
            Some(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: {}", CliError::UnknownBundled(name));
                ExitCode::from(1)
            }
        },
    }
}
