fn main() {
    std::process::exit(copgame::cli::run(std::env::args_os()));
}
