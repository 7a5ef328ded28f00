fn main() { std::process::exit(htn_core::cli::run()); }
