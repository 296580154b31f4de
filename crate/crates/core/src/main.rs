fn main() {
    std::process::exit(groupoid_calc::cli::main_with_args(std::env::args_os()));
}
