use clap::Parser;

fn main() {
    let cli = rvz_cli::args::Cli::parse();
    std::process::exit(rvz_cli::run(&cli));
}
