fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(egonet_cli::execute(&argv));
}
