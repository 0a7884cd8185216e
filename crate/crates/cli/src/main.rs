use std::process::ExitCode;

use qtcss_cli::args::Cli;
use qtcss_cli::{emit_report, run_scenario, CliError, Scenario};

fn load(cli: &Cli) -> Result<Scenario, CliError> {
    let mut scenario = match (&cli.scenario, &cli.command) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Scenario::from_toml(&text)?
        }
        (None, Some(command)) => command.to_scenario(0),
        (None, None) => unreachable!("checked by try_parse_args"),
    };
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn main() -> ExitCode {
    let cli = Cli::try_parse_args(std::env::args_os()).unwrap_or_else(|e| e.exit());
    let result = load(&cli).and_then(|scenario| {
        if cli.emit_scenario {
            scenario.validate()?;
            print!("{}", scenario.to_toml());
            return Ok(true);
        }
        let report = run_scenario(&scenario)?;
        print!("{}", emit_report(&report, cli.format));
        Ok(report.all_pass())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
