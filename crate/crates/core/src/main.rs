fn main() {
    eprintln!("command-line interface under construction");
    std::process::exit(1);
}
