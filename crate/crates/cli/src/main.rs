use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use ququart_cli::commands::{self, RECONSTRUCTION_TOLERANCE};
use ququart_cli::config::{RunConfig, KEYS};
use ququart_cli::output::{emit, OutputFormat};

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn cli() -> Command {
    let mut cmd = Command::new("ququart")
        .about("Ramsey simulator and spectral analyzer for a spin-3/2 ground state")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("key = value configuration file"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("output file (stdout when omitted)"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(value_parser!(OutputFormat))
                .default_value("csv"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_parser(value_parser!(usize))
                .help("worker threads for sweeps (default: all cores)"),
        );
    for key in KEYS {
        cmd = cmd.arg(
            Arg::new(key)
                .long(flag_name(key))
                .global(true)
                .allow_hyphen_values(true)
                .value_name("VALUE")
                .help(format!("override `{key}`"))
                .help_heading("Configuration"),
        );
    }
    cmd.subcommand(Command::new("branches").about("Branch table over the detuning range"))
        .subcommand(
            Command::new("simulate").about("Ramsey signal trace").arg(
                Arg::new("spectrum-out")
                    .long("spectrum-out")
                    .value_parser(value_parser!(PathBuf))
                    .help("also write the magnitude spectrum here"),
            ),
        )
        .subcommand(
            Command::new("sweep")
                .about("Detuning map in long format")
                .arg(Arg::new("peaks").long("peaks").action(ArgAction::SetTrue).help("write assigned peaks only")),
        )
        .subcommand(
            Command::new("coefficients")
                .about("Cosine decomposition of the signal")
                .arg(Arg::new("both-models").long("both-models").action(ArgAction::SetTrue))
                .arg(
                    Arg::new("check-reconstruction")
                        .long("check-reconstruction")
                        .action(ArgAction::SetTrue)
                        .help("compare against direct propagation on the tau grid"),
                ),
        )
        .subcommand(
            Command::new("bloch")
                .about("Bloch trajectory of one sublevel pair")
                .arg(Arg::new("pair").long("pair").default_value("+3/2,+1/2").allow_hyphen_values(true))
                .arg(
                    Arg::new("free-ns")
                        .long("free-ns")
                        .value_parser(value_parser!(f64))
                        .default_value("1000")
                        .allow_hyphen_values(true),
                )
                .arg(
                    Arg::new("step-ns")
                        .long("step-ns")
                        .value_parser(value_parser!(f64))
                        .allow_hyphen_values(true)
                        .help("sub-step length (default: pulse length / 50)"),
                ),
        )
}

fn load_config(m: &ArgMatches) -> Result<RunConfig> {
    let mut cfg = match m.get_one::<PathBuf>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    for key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v).with_context(|| format!("--{}", flag_name(key)))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(m: &ArgMatches) -> Result<()> {
    let (name, sub) = m.subcommand().expect("subcommand required");
    let cfg = load_config(sub)?;
    let out = sub.get_one::<PathBuf>("out").map(PathBuf::as_path);
    let format = *sub.get_one::<OutputFormat>("format").expect("has default");
    let threads = sub.get_one::<usize>("threads").copied();
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }

    match name {
        "branches" => emit(out, &commands::branches(&cfg)?.render(format)),
        "simulate" => {
            let res = commands::simulate(&cfg)?;
            let trace = res.trace.render(format);
            let spectrum = res.spectrum.render(format);
            if let Some(p) = sub.get_one::<PathBuf>("spectrum-out") {
                emit(Some(p), &spectrum)?;
            }
            emit(out, &trace)
        }
        "sweep" => {
            let table = if sub.get_flag("peaks") {
                commands::sweep_peaks(&cfg, threads)?
            } else {
                commands::sweep(&cfg, threads)?
            };
            emit(out, &table.render(format))
        }
        "coefficients" => {
            let check = sub.get_flag("check-reconstruction");
            let res = commands::coefficients(&cfg, sub.get_flag("both-models"), check)?;
            let mut worst = 0.0_f64;
            for (model, err) in &res.reconstruction {
                eprintln!("reconstruction max error ({}): {err:e}", model.name());
                worst = worst.max(*err);
            }
            if worst > RECONSTRUCTION_TOLERANCE {
                bail!("reconstruction error {worst:e} exceeds {RECONSTRUCTION_TOLERANCE:e}");
            }
            emit(out, &res.table.render(format))
        }
        "bloch" => {
            let pair = commands::parse_pair(sub.get_one::<String>("pair").expect("has default"))?;
            let free_ns = *sub.get_one::<f64>("free-ns").expect("has default");
            let step_ns = sub.get_one::<f64>("step-ns").copied();
            emit(out, &commands::bloch(&cfg, pair, free_ns, step_ns)?.render(format))
        }
        _ => unreachable!("unknown subcommand {name}"),
    }
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    match run(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
