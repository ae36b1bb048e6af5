use std::io::Write;

fn main() {
    if let Ok(v) = std::env::var("QETLAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("warning: cannot size thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: QETLAB_THREADS must be a positive integer, got '{v}'");
                std::process::exit(qetlab::cli::EXIT_USAGE);
            }
        }
    }
    let out = qetlab::cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
