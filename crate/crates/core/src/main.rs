fn main() -> std::process::ExitCode {
    weatherwise::cli::main_with_args(std::env::args_os())
}
