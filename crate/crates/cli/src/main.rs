fn main() {
    std::process::exit(tabsyn::run(std::env::args_os()));
}
