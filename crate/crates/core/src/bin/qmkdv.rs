fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("RUST_LOG", "warn")).init();
    std::process::exit(qmkdv::cli::dispatch(std::env::args_os()));
}
