//! Differentiate `(x+1)³` with every backend, in floats and in exact naturals.

use tagless_ad::{cube, nat, Backend, FloatSemiring, NatSemiring};

fn main() {
    let e = cube();
    let f = FloatSemiring::default();
    println!("(x+1)^3 at 4 = {}", e.evaluate(&f, 4.0));
    for b in Backend::ALL {
        let d = b.diff(&e);
        println!(
            "{:>8}: d/dx at 4 = {} (float), {} (nat)",
            b.name(),
            d.evaluate(&f, 4.0),
            d.evaluate(&NatSemiring, nat(4)),
        );
    }
}
