use std::io::Write;

fn main() {
    let mut out = kwise::commands::stdout();
    let code = kwise::main_with_args(std::env::args_os(), &mut out);
    let _ = out.flush();
    std::process::exit(code);
}
