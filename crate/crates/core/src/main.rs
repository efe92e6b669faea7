fn main() {
    std::process::exit(fracgeom::cli::main_with_args(std::env::args_os()));
}
