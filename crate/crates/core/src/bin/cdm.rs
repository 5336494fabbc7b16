use std::process::ExitCode;

use cdm::cli;

fn main() -> ExitCode {
    let config = match cli::parse_args(std::env::args_os()) {
        Ok(config) => config,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = cli::run(&config);
    print!("{}", outcome.document);
    if outcome.exit != cli::EXIT_OK {
        let failed: usize = outcome
            .reports
            .iter()
            .map(|r| r.checks.iter().filter(|c| !c.pass).count())
            .sum();
        eprintln!("cdm: {failed} check(s) failed");
    }
    ExitCode::from(outcome.exit)
}
