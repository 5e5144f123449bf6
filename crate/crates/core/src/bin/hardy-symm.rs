use clap::Parser;
use hardy_symm::cli::{main_with, Args};

fn main() {
    std::process::exit(main_with(Args::parse()));
}
