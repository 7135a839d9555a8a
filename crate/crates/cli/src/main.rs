use clap::Parser;

fn main() {
    let cli = kcycle_cli::Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = kcycle_cli::run(cli, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
