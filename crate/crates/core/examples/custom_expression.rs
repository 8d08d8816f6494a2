//! Writing an expression of your own: implement `Polymorphic` once and it can
//! be evaluated in any semiring, hence differentiated by any backend.

use tagless_ad::{Backend, Expression, FloatSemiring, Polymorphic, Semiring};

/// `c0 + x·(c1 + x·(c2 + …))`, coefficients given as natural numbers.
struct Horner(Vec<u64>);

impl Polymorphic for Horner {
    fn eval<S: Semiring>(&self, ops: &S, x: S::Elem) -> S::Elem {
        let lit = |n: u64| tagless_ad::semiring::nat_embed(ops, n);
        self.0
            .iter()
            .rev()
            .fold(ops.zero(), |acc, &c| ops.add(&lit(c), &ops.mul(&x, &acc)))
    }
}

fn main() {
    // 1 + 2x + 3x²
    let p = Expression::polymorphic(Horner(vec![1, 2, 3]));
    println!("p = {}", p.reify());
    let f = FloatSemiring::default();
    for b in Backend::ALL {
        println!("{:>8}: p'(2) = {}", b.name(), b.diff(&p).evaluate(&f, 2.0));
    }
    println!(
        "p''(2) = {}",
        Backend::Handler.diff_n(&p, 2).evaluate(&f, 2.0)
    );
}
