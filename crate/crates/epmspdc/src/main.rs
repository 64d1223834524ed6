use std::process::exit;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match epmspdc::cli::run(&args) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}
