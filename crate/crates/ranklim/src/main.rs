fn main() {
    std::process::exit(ranklim::cli::dispatch(std::env::args_os()));
}
