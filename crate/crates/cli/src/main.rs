use clap::Parser;
use gdecouple_cli::{execute, exit_code, Cli, CliError};

fn main() {
    let cli = Cli::parse();
    let result = execute(&cli);
    match &result {
        Err(CliError::Config(e)) => eprintln!("config error: {e:#}"),
        Err(CliError::Runtime(e)) => eprintln!("error: {e:#}"),
        Ok(o) => {
            if o.errors > 0 {
                eprintln!("{} row(s) reported errors", o.errors);
            }
            if o.hard_fails > 0 {
                eprintln!("{} check(s) failed hard", o.hard_fails);
            }
            if o.statistical_fails > 0 {
                eprintln!("{} check(s) failed statistically", o.statistical_fails);
            }
        }
    }
    std::process::exit(exit_code(&result));
}
