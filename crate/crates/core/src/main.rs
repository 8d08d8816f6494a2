use std::io::Write;

use tagless_ad::cli;
use tagless_ad::effects::EffectError;

/// Reverse mode through effect handlers nests one handler activation per
/// operation on the calling stack.
const STACK_BYTES: usize = 512 << 20;

fn main() {
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        // Contract violations are reported by the CLI itself.
        if info.payload().downcast_ref::<EffectError>().is_none() {
            default_hook(info);
        }
    }));

    let code = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(|| {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            let code = cli::main_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
            let _ = stdout.lock().flush();
            code
        })
        .expect("spawn worker thread")
        .join()
        .unwrap_or(cli::EXIT_CONTRACT);
    std::process::exit(code);
}
