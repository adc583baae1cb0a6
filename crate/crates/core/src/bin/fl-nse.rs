fn main() {
    std::process::exit(fl_nse::io::cli::run(std::env::args_os()));
}
