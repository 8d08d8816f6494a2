//! Forward-mode differentiation with dual numbers.

use crate::expr::Expression;
use crate::semiring::Semiring;

/// A value paired with a derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dual<N> {
    pub v: N,
    pub d: N,
}

impl<N> Dual<N> {
    pub fn new(v: N, d: N) -> Self {
        Dual { v, d }
    }
}

/// The semiring of dual numbers over `base`:
/// `(a, ȧ) + (b, ḃ) = (a + b, ȧ + ḃ)` and
/// `(a, ȧ) × (b, ḃ) = (a × b, ȧ × b + a × ḃ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DualSemiring<S>(pub S);

pub fn dual_ops<S: Semiring>(base: S) -> DualSemiring<S> {
    DualSemiring(base)
}

impl<S: Semiring> Semiring for DualSemiring<S> {
    type Elem = Dual<S::Elem>;

    fn zero(&self) -> Self::Elem {
        Dual::new(self.0.zero(), self.0.zero())
    }
    fn one(&self) -> Self::Elem {
        Dual::new(self.0.one(), self.0.zero())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        Dual::new(self.0.add(&a.v, &b.v), self.0.add(&a.d, &b.d))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let s = &self.0;
        Dual::new(
            s.mul(&a.v, &b.v),
            s.add(&s.mul(&a.d, &b.v), &s.mul(&a.v, &b.d)),
        )
    }
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.equiv(&a.v, &b.v) && self.0.equiv(&a.d, &b.d)
    }
}

/// Differentiates `e` by evaluating it at the dual number `(r, 1)` and
/// reading the derivative component.
pub fn diff_forward(e: &Expression) -> Expression {
    let e = e.clone();
    Expression::new(move |ops, r| {
        let seed = Dual::new(r, ops.one());
        e.evaluate(&DualSemiring(ops), seed).d
    })
}
