fn main() -> std::process::ExitCode {
    heptatile::cli::main()
}
