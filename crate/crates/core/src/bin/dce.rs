fn main() -> std::process::ExitCode {
    dce::cli::main_with_args(std::env::args_os())
}
