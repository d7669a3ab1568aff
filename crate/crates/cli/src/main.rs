use clap::Parser;

use pdsvrp_cli::{run_cli, Cli, Exit};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { Exit::Usage.code() } else { Exit::Ok.code() };
            std::process::exit(code);
        }
    };
    std::process::exit(run_cli(cli).code());
}
