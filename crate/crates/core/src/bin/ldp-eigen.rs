fn main() {
    std::process::exit(ldp_eigen::cli::run(std::env::args_os()));
}
