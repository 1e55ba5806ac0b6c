use std::process::ExitCode;

use clap::Parser;
use decide_qsl::cli::{fmo_table, format_table, prepare, run, write_run, Cli, Command};
use decide_qsl::Error;

fn execute(cli: &Cli) -> Result<(), Error> {
    if let Command::Table { file } = &cli.command {
        print!("{}", format_table(&fmo_table(file.as_deref())?));
        return Ok(());
    }
    let config = prepare(&cli.command)?.expect("run configuration");
    let output = run(&config)?;
    for path in write_run(&config.output.dir, &config, &output)? {
        log::info!("wrote {}", path.display());
    }
    for row in &output.rows {
        let q = &row.report;
        let coordinate = row.coordinate.map(|c| format!("{c}\t")).unwrap_or_default();
        println!(
            "{coordinate}tau={}\ttau2={:.6} +- {:.6}\ttau_qsl={:.6}\tF={:.6}",
            row.tau,
            q.tau2(),
            q.tau2_se,
            q.tau_qsl(),
            q.fidelity
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                ref e if e.is_config_error() => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
