use clap::Parser;
use inspag::cli::{run, Cli, EXIT_ERROR, EXIT_OK};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("INSPAG_LOG")).init();
    let code = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_OK
            }
        }
    };
    std::process::exit(code);
}
