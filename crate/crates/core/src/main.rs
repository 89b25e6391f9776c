use std::process::ExitCode;

use clap::Parser;
use gipsynth::cli::{main_with, Args};

fn main() -> ExitCode {
    ExitCode::from(main_with(Args::parse()))
}
