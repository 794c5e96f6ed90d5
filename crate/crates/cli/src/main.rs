use clap::Parser;

fn main() {
    let cli = qcvrp_cli::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = qcvrp_cli::run(&cli, &mut out) {
        eprintln!("error: {e}");
        std::process::exit(qcvrp_cli::exit_code(&e));
    }
}
