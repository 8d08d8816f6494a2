//! The `d` fields of every vertex during the backward phase of `x^3` at 5,
//! recorded by both reverse-mode backends.

use tagless_ad::{handler, monomial, nat, tape, NatSemiring};

fn main() {
    let e = monomial(3);
    let t = tape::backward_trace(&e, &NatSemiring, nat(5));
    let h = handler::backward_trace(&e, &NatSemiring, nat(5)).unwrap();
    println!("tape:");
    for s in &t {
        println!("  {s}");
    }
    println!("handler:");
    for s in &h {
        println!("  {s}");
    }
    println!("identical: {}", t == h);
}
