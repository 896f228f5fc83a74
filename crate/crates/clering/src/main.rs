fn main() {
    eprintln!("clering: command-line interface not wired up yet");
    std::process::exit(64);
}
