use clap::Parser;

fn main() {
    let cli = ana_dof_cli::Cli::parse();
    std::process::exit(ana_dof_cli::run(&cli));
}
