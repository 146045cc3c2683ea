use clap::Parser;

fn main() {
    std::process::exit(kitemorph_cli::run(kitemorph_cli::Cli::parse()));
}
