fn main() {
    env_logger::init();
    let code = dcstring_cli::run(std::env::args_os(), &mut std::io::stderr());
    std::process::exit(code);
}
