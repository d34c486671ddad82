fn main() {
    let cap = std::env::var("FUP_CAP").ok();
    std::process::exit(fup_cli::main_with(std::env::args_os(), cap.as_deref()));
}
