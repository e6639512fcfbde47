mod args;
mod config;
mod error;
mod output;
mod svg;
mod tasks;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};
use output::Sink;

fn execute(cli: &Cli) -> CliResult<()> {
    let mut sink = Sink::new(cli);
    let mem = usize::try_from(cli.mem_budget).unwrap_or(usize::MAX);
    let res = match &cli.command {
        Command::Info(a) => tasks::info(a, &mut sink),
        Command::Act(a) => tasks::act_cmd(a, &mut sink),
        Command::Orbit(a) => tasks::orbit(a, &mut sink),
        Command::Cf(a) => tasks::cf(a, &mut sink),
        Command::Flow(a) => tasks::flow(a, &mut sink),
        Command::Cutseq(a) => tasks::cutseq(a, &mut sink),
        Command::Verify(v) => tasks::verify(v, &mut sink),
        Command::Cylinders(a) => tasks::cylinders(a, &mut sink),
        Command::Hitting(a) => tasks::hitting(a, &mut sink, mem),
        Command::Exponent(a) => tasks::exponent(a, &mut sink),
        Command::Run(a) => return run_config(cli, &a.config),
    };
    sink.finish();
    res
}

fn run_config(cli: &Cli, path: &std::path::Path) -> CliResult<()> {
    let mut defaults = BTreeMap::new();
    defaults.insert("seed".to_string(), cli.seed.to_string());
    defaults.insert("mem_budget".to_string(), cli.mem_budget.to_string());
    defaults.insert("out_dir".to_string(), cli.out_dir.display().to_string());
    let mut first_err = None;
    for argv in config::task_argvs(path, &defaults)? {
        let task = Cli::try_parse_from(&argv)
            .map_err(|e| CliError::Config { path: path.to_path_buf(), msg: e.to_string() })?;
        eprintln!("== {}", argv[1..].join(" "));
        if let Err(e) = execute(&task) {
            eprintln!("error: {e}");
            first_err.get_or_insert(e);
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
