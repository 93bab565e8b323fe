fn main() {
    std::process::exit(ttsvd::cli::dispatch(std::env::args_os()));
}
