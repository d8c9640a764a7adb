use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dax_kernel::report::{exit_code, run_scene, Command};
use dax_kernel::scene::{preset_expand, Scene};
use dax_kernel::{Error, Result};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Target,
    Eval,
    Concordance,
    Orbit,
}

/// Dax invariant targets and values for knots in manifolds.
#[derive(Parser)]
#[command(name = "dax-kernel", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Scene file (TOML).
    #[arg(long, conflicts_with = "preset")]
    scene: Option<PathBuf>,
    /// Built-in manifold preset.
    #[arg(long)]
    preset: Option<String>,
    /// Preset parameter `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Generator window radius.
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    json: bool,
}

fn load(cli: &Cli) -> Result<Scene> {
    let mut scene = match (&cli.scene, &cli.preset) {
        (Some(path), _) => {
            if !cli.params.is_empty() {
                return Err(Error::Scene("--param only applies to --preset".into()));
            }
            Scene::load(path)?
        }
        (None, Some(name)) => {
            let mut params = BTreeMap::new();
            for p in &cli.params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::Scene(format!("parameter `{p}` is not key=value")))?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
            preset_expand(name, &params)?
        }
        (None, None) => return Err(Error::Scene("give --scene FILE or --preset NAME".into())),
    };
    if let Some(w) = cli.window {
        scene.window = w;
    }
    Ok(scene)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Target => Command::Target,
        Cmd::Eval => Command::Eval,
        Cmd::Concordance => Command::Concordance,
        Cmd::Orbit => Command::Orbit,
    };
    match load(&cli).and_then(|s| run_scene(&s, command)) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
