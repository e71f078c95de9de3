use clap::Parser;
use deadcore_cli::{configure_threads, run, Cli, Command, EXIT_CONFIG};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let threads = std::env::var("DEADCORE_THREADS").ok();
    if let Err(e) = configure_threads(threads.as_deref()) {
        eprintln!("deadcore: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(run(&Command::from(cli.verb)));
}
