fn main() {
    std::process::exit(treelab::cli::run(std::env::args_os()));
}
