fn main() {
    std::process::exit(thermoflow_cli::run(std::env::args_os()));
}
