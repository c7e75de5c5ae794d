fn main() {
    std::process::exit(dimdecon::cli::dispatch(std::env::args_os()));
}
