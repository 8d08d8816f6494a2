//! Forward mode by hand: evaluate in the dual-number semiring, and nest it
//! for a second derivative.

use tagless_ad::{cube, dual_ops, Dual, FloatSemiring};

fn main() {
    let e = cube();
    let d1 = dual_ops(FloatSemiring::default());
    let y = e.evaluate(&d1, Dual::new(4.0, 1.0));
    println!("(x+1)^3 at 4: value {}, derivative {}", y.v, y.d);

    let d2 = dual_ops(d1);
    let seed = Dual::new(Dual::new(4.0, 1.0), Dual::new(1.0, 0.0));
    let y = e.evaluate(&d2, seed);
    println!("second derivative at 4: {}", y.d.d);
}
