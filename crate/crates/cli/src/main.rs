fn main() {
    std::process::exit(rearrangement_cli::main_entry(std::env::args_os()));
}
