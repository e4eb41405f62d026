fn main() {
    std::process::exit(fde_lab::cli::main_entry());
}
