use clap::Parser;

use ngb::cli::{self, Cli};

fn main() {
    if let Some(n) = std::env::var("NGB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: NGB_THREADS ignored: {e}");
        }
    }
    let code = match cli::run(Cli::parse()) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code(&e)
        }
    };
    std::process::exit(code);
}
