//! Effect handlers with one-shot continuations: the `ask` demo, and what
//! happens when a continuation is resumed twice.

use tagless_ad::effects::{ask, ask_demo, handle, Ask, Continuation, Handler};

fn main() {
    for line in ask_demo() {
        println!("{line}");
    }

    let greedy: Handler<'_, Ask, i64, i64, i64> = Handler::new(
        |Ask(x), k: Continuation<'_, Ask, i64, i64, i64>| {
            let first = k.resume(x + 1)?;
            match k.resume(x + 1) {
                Ok(_) => println!("resumed twice?!"),
                Err(e) => println!("second resume refused: {e}"),
            }
            Ok(first)
        },
        Ok,
    );
    println!("client result: {:?}", handle(|| ask(41).unwrap(), greedy));
}
