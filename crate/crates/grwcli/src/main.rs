fn main() {
    std::process::exit(grwcli::main_with_args(std::env::args_os()));
}
