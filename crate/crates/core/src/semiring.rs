//! Numeric interpretations that expressions are evaluated in.
//!
//! A [`Semiring`] bundles the four operations an expression may use (zero,
//! one, addition, multiplication) with an equivalence relation. All shipped
//! instances are commutative.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::symbolic::VarId;

/// A semiring `(N, 0, +, 1, ×, ≡)`, the dictionary handed to an expression.
pub trait Semiring {
    type Elem: Clone;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
}

impl<S: Semiring + ?Sized> Semiring for &S {
    type Elem = S::Elem;

    fn zero(&self) -> S::Elem {
        (**self).zero()
    }
    fn one(&self) -> S::Elem {
        (**self).one()
    }
    fn add(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        (**self).add(a, b)
    }
    fn mul(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        (**self).mul(a, b)
    }
    fn equiv(&self, a: &S::Elem, b: &S::Elem) -> bool {
        (**self).equiv(a, b)
    }
}

/// Natural numbers with exact, arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NatSemiring;

/// Shorthand for building a natural number.
pub fn nat(n: u64) -> BigUint {
    BigUint::from(n)
}

impl Semiring for NatSemiring {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn equiv(&self, a: &BigUint, b: &BigUint) -> bool {
        a == b
    }
}

/// Default relative tolerance of [`FloatSemiring`].
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

/// Double-precision floats. Equivalence is relative:
/// `|a - b| <= tolerance * max(1, |a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatSemiring {
    pub tolerance: f64,
}

impl FloatSemiring {
    pub fn with_tolerance(tolerance: f64) -> Self {
        FloatSemiring { tolerance }
    }
}

impl Default for FloatSemiring {
    fn default() -> Self {
        FloatSemiring {
            tolerance: DEFAULT_FLOAT_TOLERANCE,
        }
    }
}

impl Semiring for FloatSemiring {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn equiv(&self, a: &f64, b: &f64) -> bool {
        let scale = 1f64.max(a.abs()).max(b.abs());
        (a - b).abs() <= self.tolerance * scale
    }
}

/// A monomial: a multiset of variables, kept as sorted `(variable, exponent)`
/// pairs with positive exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(id: VarId) -> Self {
        Monomial(vec![(id, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut merged: BTreeMap<VarId, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *merged.entry(v).or_insert(0) += e;
        }
        Monomial(merged.into_iter().collect())
    }
}

/// A polynomial with natural-number coefficients in canonical form: a sorted
/// map from monomials to nonzero coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigUint>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigUint) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Poly { terms }
    }

    pub fn var(id: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(id), BigUint::one());
        Poly { terms }
    }

    /// Builds a polynomial from arbitrary `(monomial, coefficient)` pairs,
    /// merging duplicates and dropping zero coefficients.
    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, BigUint)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in pairs {
            p.add_term(m, c);
        }
        p
    }

    /// `Σ coeffs[i] · X^i` in the single variable `id`.
    pub fn univariate(id: VarId, coeffs: &[u64]) -> Self {
        Poly::from_terms(coeffs.iter().enumerate().map(|(i, &c)| {
            let m = if i == 0 {
                Monomial::unit()
            } else {
                Monomial(vec![(id, i as u32)])
            };
            (m, BigUint::from(c))
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigUint)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: BigUint) {
        if c.is_zero() {
            return;
        }
        *self.terms.entry(m).or_insert_with(BigUint::zero) += c;
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn times(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let unit_coeff = c.is_one() && !m.0.is_empty();
            if !unit_coeff {
                write!(f, "{c}")?;
            }
            for (i, (v, e)) in m.0.iter().enumerate() {
                if i > 0 || !unit_coeff {
                    f.write_str("·")?;
                }
                if *e == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Multivariate polynomials over ℕ: the decidable model of the commutative
/// free semiring. Equivalence is equality of normal forms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolySemiring;

impl Semiring for PolySemiring {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }
    fn one(&self) -> Poly {
        Poly::constant(BigUint::one())
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.plus(b)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.times(b)
    }
    fn equiv(&self, a: &Poly, b: &Poly) -> bool {
        a == b
    }
}

/// Embeds the natural number `n` as `1 + 1 + … + 1` using binary
/// double-and-add, so only `O(log n)` operations are performed.
///
/// The most significant bit seeds the accumulator with `one`, so the result
/// never contains a spurious `0 + …` term.
pub fn nat_embed<S: Semiring + ?Sized>(ops: &S, n: u64) -> S::Elem {
    if n == 0 {
        return ops.zero();
    }
    let one = ops.one();
    let top = 63 - n.leading_zeros();
    let mut acc = one.clone();
    for bit in (0..top).rev() {
        acc = ops.add(&acc, &acc);
        if n >> bit & 1 == 1 {
            acc = ops.add(&acc, &one);
        }
    }
    acc
}

/// Checks the semiring axioms over every pair and triple drawn from
/// `samples`, up to `ops.equiv`.
///
/// Commutativity of multiplication is not part of the check; see
/// [`mul_commutes`].
pub fn axioms_hold<S: Semiring + ?Sized>(ops: &S, samples: &[S::Elem]) -> bool {
    first_axiom_failure(ops, samples).is_none()
}

/// Like [`axioms_hold`] but names the first axiom that fails.
pub fn first_axiom_failure<S: Semiring + ?Sized>(
    ops: &S,
    samples: &[S::Elem],
) -> Option<&'static str> {
    let zero = ops.zero();
    let one = ops.one();
    let eq = |a: &S::Elem, b: &S::Elem| ops.equiv(a, b);
    for a in samples {
        if !eq(a, a) {
            return Some("equiv reflexivity");
        }
        if !eq(&ops.add(a, &zero), a) || !eq(&ops.add(&zero, a), a) {
            return Some("additive identity");
        }
        if !eq(&ops.mul(a, &one), a) || !eq(&ops.mul(&one, a), a) {
            return Some("multiplicative identity");
        }
        if !eq(&ops.mul(a, &zero), &zero) || !eq(&ops.mul(&zero, a), &zero) {
            return Some("zero annihilation");
        }
        for b in samples {
            if eq(a, b) != eq(b, a) {
                return Some("equiv symmetry");
            }
            if !eq(&ops.add(a, b), &ops.add(b, a)) {
                return Some("additive commutativity");
            }
            for c in samples {
                if eq(a, b) && eq(b, c) && !eq(a, c) {
                    return Some("equiv transitivity");
                }
                let ab = ops.add(a, b);
                let bc = ops.add(b, c);
                if !eq(&ops.add(&ab, c), &ops.add(a, &bc)) {
                    return Some("additive associativity");
                }
                let ab = ops.mul(a, b);
                let bc = ops.mul(b, c);
                if !eq(&ops.mul(&ab, c), &ops.mul(a, &bc)) {
                    return Some("multiplicative associativity");
                }
                let left = ops.mul(a, &ops.add(b, c));
                let left_expanded = ops.add(&ops.mul(a, b), &ops.mul(a, c));
                if !eq(&left, &left_expanded) {
                    return Some("left distributivity");
                }
                let right = ops.mul(&ops.add(a, b), c);
                let right_expanded = ops.add(&ops.mul(a, c), &ops.mul(b, c));
                if !eq(&right, &right_expanded) {
                    return Some("right distributivity");
                }
            }
        }
    }
    None
}

/// Checks that multiplication commutes over `samples`.
pub fn mul_commutes<S: Semiring + ?Sized>(ops: &S, samples: &[S::Elem]) -> bool {
    samples.iter().all(|a| {
        samples
            .iter()
            .all(|b| ops.equiv(&ops.mul(a, b), &ops.mul(b, a)))
    })
}

/// Checks that `equiv` is a congruence for `add` and `mul` over `samples`.
pub fn equiv_is_congruence<S: Semiring + ?Sized>(ops: &S, samples: &[S::Elem]) -> bool {
    for a in samples {
        for a2 in samples.iter().filter(|a2| ops.equiv(a, a2)) {
            for b in samples {
                if !ops.equiv(&ops.add(a, b), &ops.add(a2, b))
                    || !ops.equiv(&ops.mul(a, b), &ops.mul(a2, b))
                {
                    return false;
                }
            }
        }
    }
    true
}
