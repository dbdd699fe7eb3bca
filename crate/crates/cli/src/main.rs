fn main() {
    std::process::exit(deposit_auction_cli::main_with_args(std::env::args_os()));
}
