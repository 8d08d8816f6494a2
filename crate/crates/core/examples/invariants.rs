//! Instrumented reverse-mode runs: ghost-context invariants, the operation
//! protocol audit, and the number of effects performed.

use tagless_ad::vertex::Checks;
use tagless_ad::{cube, handler, nat, tape, NatSemiring};

fn main() {
    let e = cube();
    let t = tape::run_instrumented(&e, &NatSemiring, nat(4), Checks::all());
    println!(
        "tape:    derivative {}, {} entries, clean: {}",
        t.derivative,
        t.operations,
        t.is_clean()
    );

    let h = handler::run_instrumented(&e, &NatSemiring, nat(4), Checks::all()).unwrap();
    println!(
        "handler: derivative {}, {} effects, clean: {}",
        h.derivative,
        h.operations,
        h.is_clean()
    );
    for w in &h.witnesses {
        println!(
            "  {} = {} {} {}  stands for {}",
            w.reply_vertex,
            w.operands.0,
            w.op.symbol(),
            w.operands.1,
            w.reply_expr
        );
    }
}
