fn main() {
    std::process::exit(isac_rdb_cli::run());
}
