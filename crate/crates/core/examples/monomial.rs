//! `x^k` by square-and-multiply. The loop and accumulators are invisible to
//! the backends; only the multiplications are observed.

use tagless_ad::{monomial, nat, Backend, NatSemiring};

fn main() {
    let r = 3u64;
    println!(" k  ops  d/dx x^k at {r} (forward, tape, handler)");
    for k in 0..=10 {
        let e = monomial(k);
        let ds: Vec<String> = Backend::ALL
            .iter()
            .map(|b| b.diff(&e).evaluate(&NatSemiring, nat(r)).to_string())
            .collect();
        println!("{k:>2}  {:>3}  {}", e.operation_count(), ds.join(", "));
    }
    println!("x^3 reifies to {}", monomial(3).reify());
}
