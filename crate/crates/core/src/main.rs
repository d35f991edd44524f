fn main() {
    std::process::exit(chess_style::cli::run(std::env::args_os()));
}
