use std::io::Write;

fn main() {
    msr_prover::cli::init_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = msr_prover::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
