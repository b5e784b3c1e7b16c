fn main() {
    std::process::exit(bubble_tower::run_cli());
}
