use clap::Parser;

fn main() {
    let cli = zicr::cli::Cli::parse();
    match zicr::cli::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
