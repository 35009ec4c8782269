//! `graphonlab` command-line front end.

mod commands;
mod inputs;
mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};

use commands::Command;
use inputs::{CliError, Inputs};
use output::{parse_format, Target};

#[derive(Debug, Parser)]
#[command(name = "graphonlab", version, about = "Exact and sampled computations on step graphons")]
struct Cli {
    /// `csv`, `json`, `text`, or a file path (format from its extension).
    #[arg(long, global = true)]
    out: Option<Target>,
    /// Write a replayable manifest of this run into the directory.
    #[arg(long, global = true)]
    save: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

const MANIFEST: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    /// Arguments after the program name, without `--out` and `--save`.
    args: Vec<String>,
    seed: Option<u64>,
    format: String,
    output: String,
    /// Contents of every input file, keyed by the path given on the command line.
    inputs: BTreeMap<String, String>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GRAPHONLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("GRAPHONLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Drops `--out`/`--save` and their values so a replay renders afresh.
fn replay_args(args: &[String]) -> Vec<String> {
    let mut kept = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" || a == "--save" {
            it.next();
        } else if !(a.starts_with("--out=") || a.starts_with("--save=")) {
            kept.push(a.clone());
        }
    }
    kept
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn emit(target: &Option<Target>, rendered: &str) -> Result<(), CliError> {
    match target {
        Some(Target::File(path, _)) => write_file(path, rendered),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(rendered.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io("stdout", e))
        }
    }
}

fn run(cli: Cli, args: &[String]) -> Result<ExitCode, CliError> {
    if let Command::Replay { manifest } = &cli.command {
        if cli.save.is_some() {
            return Err(CliError::Usage("--save cannot be combined with replay".into()));
        }
        return replay(manifest, &cli.out);
    }
    let inputs = Inputs::default();
    let output = commands::run(&cli.command, &inputs)?;
    let format = match &cli.out {
        Some(Target::Stdout(Some(f)) | Target::File(_, f)) => *f,
        _ => output.default,
    };
    let rendered = output.render(format).map_err(CliError::Usage)?;
    emit(&cli.out, &rendered)?;
    if let Some(dir) = &cli.save {
        let file = format!("output.{}", format.extension());
        write_file(&dir.join(&file), &rendered)?;
        let manifest = Manifest {
            tool: "graphonlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            args: replay_args(args),
            seed: cli.command.seed(),
            format: format.name().into(),
            output: file,
            inputs: inputs.into_files(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        write_file(&dir.join(MANIFEST), &text)?;
    }
    Ok(if output.failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn replay(path: &Path, target: &Option<Target>) -> Result<ExitCode, CliError> {
    let (dir, file) = if path.is_dir() { (path.to_path_buf(), path.join(MANIFEST)) } else {
        (path.parent().map(Path::to_path_buf).unwrap_or_default(), path.to_path_buf())
    };
    let text = std::fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    let format = parse_format(&manifest.format)
        .ok_or_else(|| CliError::Usage(format!("unknown format `{}` in manifest", manifest.format)))?;
    let argv = std::iter::once("graphonlab".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::Usage("a manifest cannot replay another manifest".into()));
    }
    let output = commands::run(&cli.command, &Inputs::replaying(manifest.inputs))?;
    let rendered = output.render(format).map_err(CliError::Usage)?;
    let saved_path = dir.join(&manifest.output);
    let saved = std::fs::read_to_string(&saved_path).map_err(|e| CliError::io(&saved_path, e))?;
    emit(target, &rendered)?;
    if rendered != saved {
        eprintln!("replay differs from {}", saved_path.display());
        return Ok(ExitCode::from(1));
    }
    eprintln!("replay matches {}", saved_path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse_from(std::iter::once("graphonlab".to_string()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = init_threads().and_then(|_| run(cli, &args));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_args_strip_output_flags() {
        let args: Vec<String> =
            ["--out", "csv", "xdist", "--graphon", "constant:0.5", "-k", "3", "--save=run"].map(String::from).into();
        assert_eq!(replay_args(&args), ["xdist", "--graphon", "constant:0.5", "-k", "3"]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
