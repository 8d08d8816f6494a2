//! Expressions in tagless-final form.
//!
//! An [`Expression`] is a computation that, given any semiring dictionary and
//! a value for the variable `x`, produces a value. It never looks at the
//! values it manipulates: it can only pass them to the dictionary. That is
//! what lets one expression be evaluated with floats, with naturals, with
//! dual numbers, with tape vertices, or with syntax trees.
//!
//! Rust has no rank-2 types, so an expression is stored as a procedure over
//! a type-erased [`Dict`] whose values are opaque [`Value`] handles.
//! [`Expression::evaluate`] bridges any concrete [`Semiring`] to that form.
//! Expressions written against the generic [`Polymorphic`] trait read like
//! ordinary generic code.

use std::any::Any;
use std::cell::Cell;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::semiring::Semiring;
use crate::symbolic::{check_univariate, eval_env, Env, SymExpr, SymbolicError, SyntaxSemiring};

/// An opaque number handed to an expression. Expressions may clone and pass
/// values around but cannot inspect them.
#[derive(Clone)]
pub struct Value(Rc<dyn Any>);

impl Value {
    fn wrap<T: 'static>(v: T) -> Value {
        Value(Rc::new(v))
    }

    fn peek<T: 'static>(&self) -> &T {
        self.0
            .downcast_ref::<T>()
            .expect("value belongs to a different dictionary; the expression is not parametric")
    }

    fn take<T: Clone + 'static>(self) -> T {
        match Rc::downcast::<T>(self.0) {
            Ok(rc) => Rc::try_unwrap(rc).unwrap_or_else(|rc| (*rc).clone()),
            Err(_) => {
                panic!("value belongs to a different dictionary; the expression is not parametric")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Value(..)")
    }
}

trait ErasedSemiring {
    fn zero(&self) -> Value;
    fn one(&self) -> Value;
    fn add(&self, a: &Value, b: &Value) -> Value;
    fn mul(&self, a: &Value, b: &Value) -> Value;
    fn equiv(&self, a: &Value, b: &Value) -> bool;
}

struct Erased<'a, S: ?Sized>(&'a S);

impl<S> ErasedSemiring for Erased<'_, S>
where
    S: Semiring + ?Sized,
    S::Elem: 'static,
{
    fn zero(&self) -> Value {
        Value::wrap(self.0.zero())
    }
    fn one(&self) -> Value {
        Value::wrap(self.0.one())
    }
    fn add(&self, a: &Value, b: &Value) -> Value {
        Value::wrap(self.0.add(a.peek(), b.peek()))
    }
    fn mul(&self, a: &Value, b: &Value) -> Value {
        Value::wrap(self.0.mul(a.peek(), b.peek()))
    }
    fn equiv(&self, a: &Value, b: &Value) -> bool {
        self.0.equiv(a.peek(), b.peek())
    }
}

/// The dictionary an expression receives: a semiring over opaque values.
#[derive(Clone, Copy)]
pub struct Dict<'a> {
    inner: &'a dyn ErasedSemiring,
}

impl Semiring for Dict<'_> {
    type Elem = Value;

    fn zero(&self) -> Value {
        self.inner.zero()
    }
    fn one(&self) -> Value {
        self.inner.one()
    }
    fn add(&self, a: &Value, b: &Value) -> Value {
        self.inner.add(a, b)
    }
    fn mul(&self, a: &Value, b: &Value) -> Value {
        self.inner.mul(a, b)
    }
    fn equiv(&self, a: &Value, b: &Value) -> bool {
        self.inner.equiv(a, b)
    }
}

/// An expression written as a generic function of its dictionary.
pub trait Polymorphic: Send + Sync + 'static {
    fn eval<S: Semiring>(&self, ops: &S, x: S::Elem) -> S::Elem;
}

type Procedure = dyn Fn(&Dict<'_>, Value) -> Value + Send + Sync;

#[derive(Clone)]
enum Plan {
    Tree(Arc<SymExpr>),
    Procedure(Arc<Procedure>),
}

/// A mathematical expression over the single variable `x`, represented as a
/// polymorphic computation.
///
/// Evaluation may be repeated any number of times. Any control effect
/// performed by the dictionary passes straight through to the caller.
#[derive(Clone)]
pub struct Expression {
    plan: Plan,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.plan {
            Plan::Tree(t) => write!(f, "Expression({t})"),
            Plan::Procedure(_) => f.write_str("Expression(<procedure>)"),
        }
    }
}

impl Expression {
    /// Wraps a procedure over the opaque dictionary.
    pub fn new(f: impl Fn(&Dict<'_>, Value) -> Value + Send + Sync + 'static) -> Self {
        Expression {
            plan: Plan::Procedure(Arc::new(f)),
        }
    }

    pub fn polymorphic<P: Polymorphic>(p: P) -> Self {
        Expression::new(move |ops, x| p.eval(ops, x))
    }

    /// Reflects a tree over `x` as an expression.
    pub fn from_ast(tree: SymExpr) -> Result<Self, SymbolicError> {
        check_univariate(&tree)?;
        Ok(Expression {
            plan: Plan::Tree(Arc::new(tree)),
        })
    }

    /// The value of the expression at `x` in the semiring `ops`.
    pub fn evaluate<S>(&self, ops: &S, x: S::Elem) -> S::Elem
    where
        S: Semiring + ?Sized,
        S::Elem: 'static,
    {
        match &self.plan {
            Plan::Tree(tree) => {
                let env = Env::single(x.clone(), x);
                eval_env(tree, ops, &env)
            }
            Plan::Procedure(f) => {
                let erased = Erased(ops);
                let dict = Dict { inner: &erased };
                f(&dict, Value::wrap(x)).take()
            }
        }
    }

    /// Evaluates in the syntax-tree interpretation with `x = Leaf X`.
    pub fn reify(&self) -> SymExpr {
        self.evaluate(&SyntaxSemiring, SymExpr::x())
    }

    /// Number of `add` and `mul` calls one evaluation performs.
    pub fn operation_count(&self) -> usize {
        let counter = Counting::default();
        self.evaluate(&counter, ());
        counter.0.get()
    }
}

#[derive(Default)]
struct Counting(Cell<usize>);

impl Semiring for Counting {
    type Elem = ();

    fn zero(&self) {}
    fn one(&self) {}
    fn add(&self, _: &(), _: &()) {
        self.0.set(self.0.get() + 1);
    }
    fn mul(&self, _: &(), _: &()) {
        self.0.set(self.0.get() + 1);
    }
    fn equiv(&self, _: &(), _: &()) -> bool {
        true
    }
}

/// The identity expression `x`.
pub fn variable() -> Expression {
    Expression::new(|_, x| x)
}

pub fn constant_zero() -> Expression {
    Expression::new(|ops, _| ops.zero())
}

pub fn constant_one() -> Expression {
    Expression::new(|ops, _| ops.one())
}

struct Cube;

impl Polymorphic for Cube {
    fn eval<S: Semiring>(&self, ops: &S, x: S::Elem) -> S::Elem {
        let plus_one = || ops.add(&x, &ops.one());
        let square = ops.mul(&plus_one(), &plus_one());
        ops.mul(&square, &plus_one())
    }
}

/// `(x + 1)³`, evaluated as `((x+1) × (x+1)) × (x+1)`.
pub fn cube() -> Expression {
    Expression::polymorphic(Cube)
}

struct Power(u64);

impl Polymorphic for Power {
    fn eval<S: Semiring>(&self, ops: &S, x: S::Elem) -> S::Elem {
        let mut k = self.0;
        let mut base = x;
        let mut acc = ops.one();
        while k > 0 {
            if k % 2 == 1 {
                acc = ops.mul(&base, &acc);
            }
            base = ops.mul(&base, &base);
            k /= 2;
        }
        acc
    }
}

/// `x^k` by square-and-multiply.
///
/// The loop, the integer arithmetic on `k` and the mutable accumulators are
/// invisible to whoever evaluates the expression; only the resulting
/// sequence of multiplications is observed. For `k = 3` that sequence is
/// `u1 = x×1, u2 = x×x, u3 = u2×u1, u4 = u2×u2`, with `u3` the result.
pub fn monomial(k: u64) -> Expression {
    Expression::polymorphic(Power(k))
}

/// A small named corpus of expressions used by examples and tests.
pub fn corpus() -> Vec<(String, Expression)> {
    let mut out = vec![
        ("x".to_string(), variable()),
        ("0".to_string(), constant_zero()),
        ("1".to_string(), constant_one()),
        ("cube".to_string(), cube()),
    ];
    for k in 0..=16 {
        out.push((format!("monomial {k}"), monomial(k)));
    }
    out
}
