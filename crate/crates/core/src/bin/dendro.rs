use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = dendro::cli::run(std::env::args_os().skip(1));
    let text = out.output();
    if out.code == dendro::cli::INPUT && !out.json {
        eprint!("{text}");
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    ExitCode::from(out.code as u8)
}
