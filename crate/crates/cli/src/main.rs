use clap::Parser;

fn main() {
    let cli = folner_cli::Cli::parse();
    std::process::exit(folner_cli::run(&cli));
}
