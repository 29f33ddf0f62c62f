use clap::Parser;
use sturm_cli::{run, RunConfig};

fn main() {
    // clap would exit with 2 on bad flags, which is reserved for failed
    // certificates here
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match run(&config) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}
