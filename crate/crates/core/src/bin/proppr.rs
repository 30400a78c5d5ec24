fn main() -> std::process::ExitCode {
    proppr::cli::main(std::env::args_os())
}
