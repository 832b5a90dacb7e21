use std::process::ExitCode;

fn main() -> ExitCode {
    match dat_core::cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.one_line());
            ExitCode::from(err.exit_code())
        }
    }
}
