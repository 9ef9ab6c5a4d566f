use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let r = lpt_core::service::dispatch(&argv);
    let _ = std::io::stdout().write_all(r.stdout.as_bytes());
    for d in &r.diagnostics {
        eprintln!("lpt: {d}");
    }
    std::process::exit(r.exit_code);
}
