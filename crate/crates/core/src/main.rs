fn main() {
    let mut stdout = std::io::stdout().lock();
    let code = last_success::cli::run(std::env::args_os(), &mut stdout);
    std::process::exit(code);
}
