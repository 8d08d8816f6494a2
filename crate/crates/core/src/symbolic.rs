//! Tree-shaped expressions and the symbolic oracle.
//!
//! Everything the AD backends compute can be restated here as plain tree
//! manipulation: evaluation under an environment, syntactic partial
//! derivatives, equivalence in the free (commutative) semiring, and the
//! sequential view of an expression as a context of `let` bindings.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::{Poly, PolySemiring, Semiring};

/// An opaque variable identifier.
///
/// Three identifiers are reserved: [`VarId::X`] for the expression variable,
/// and [`VarId::O`] / [`VarId::I`] for the constant vertices zero and one.
/// Auxiliary identifiers come from [`VarId::aux`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    pub const X: VarId = VarId(0);
    pub const O: VarId = VarId(1);
    pub const I: VarId = VarId(2);

    const AUX_BASE: u32 = 3;

    /// The `n`-th auxiliary identifier, rendered `u{n}`.
    pub const fn aux(n: u32) -> VarId {
        VarId(n + Self::AUX_BASE)
    }

    /// Index of an auxiliary identifier, `None` for the reserved ones.
    pub fn aux_index(self) -> Option<u32> {
        self.0.checked_sub(Self::AUX_BASE)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarId::X => f.write_str("x"),
            VarId::O => f.write_str("O"),
            VarId::I => f.write_str("I"),
            VarId(n) => write!(f, "u{}", n - Self::AUX_BASE),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Mul,
}

impl Op {
    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Mul => '*',
        }
    }

    pub fn apply<S: Semiring + ?Sized>(self, ops: &S, a: &S::Elem, b: &S::Elem) -> S::Elem {
        match self {
            Op::Add => ops.add(a, b),
            Op::Mul => ops.mul(a, b),
        }
    }
}

/// A mathematical expression as a tree. Subtrees are reference counted, so a
/// tree may share structure (it is then really a DAG, but every function here
/// treats it as the tree it unfolds to).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymExpr {
    Leaf(VarId),
    Zero,
    One,
    Node(Op, Arc<SymExpr>, Arc<SymExpr>),
}

impl SymExpr {
    pub fn x() -> SymExpr {
        SymExpr::Leaf(VarId::X)
    }

    pub fn leaf(id: VarId) -> SymExpr {
        SymExpr::Leaf(id)
    }

    pub fn node(op: Op, a: SymExpr, b: SymExpr) -> SymExpr {
        SymExpr::Node(op, Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: SymExpr, b: SymExpr) -> SymExpr {
        SymExpr::node(Op::Add, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: SymExpr, b: SymExpr) -> SymExpr {
        SymExpr::node(Op::Mul, a, b)
    }

    /// Number of internal nodes of the unfolded tree.
    pub fn node_count(&self) -> usize {
        match self {
            SymExpr::Node(_, a, b) => 1 + a.node_count() + b.node_count(),
            _ => 0,
        }
    }

    /// Number of distinct internal nodes once equal subtrees are merged.
    pub fn dag_size(&self) -> usize {
        #[derive(PartialEq, Eq, Hash)]
        enum Key {
            Leaf(VarId),
            Zero,
            One,
            Node(Op, usize, usize),
        }
        struct Interner {
            by_ptr: HashMap<*const SymExpr, usize>,
            by_key: HashMap<Key, usize>,
            nodes: usize,
        }
        impl Interner {
            fn id(&mut self, e: &SymExpr) -> usize {
                let ptr = e as *const SymExpr;
                if let Some(&id) = self.by_ptr.get(&ptr) {
                    return id;
                }
                let key = match e {
                    SymExpr::Leaf(v) => Key::Leaf(*v),
                    SymExpr::Zero => Key::Zero,
                    SymExpr::One => Key::One,
                    SymExpr::Node(op, a, b) => Key::Node(*op, self.id(a), self.id(b)),
                };
                let is_node = matches!(key, Key::Node(..));
                let fresh = self.by_key.len();
                let id = *self.by_key.entry(key).or_insert_with(|| {
                    if is_node {
                        self.nodes += 1;
                    }
                    fresh
                });
                self.by_ptr.insert(ptr, id);
                id
            }
        }
        let mut interner = Interner {
            by_ptr: HashMap::new(),
            by_key: HashMap::new(),
            nodes: 0,
        };
        interner.id(self);
        interner.nodes
    }

    pub fn depth(&self) -> usize {
        match self {
            SymExpr::Node(_, a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymExpr::Leaf(id) => write!(f, "{id}"),
            SymExpr::Zero => f.write_str("0"),
            SymExpr::One => f.write_str("1"),
            SymExpr::Node(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("expression mentions variable `{0}` but only `x` is allowed here")]
    ForeignVariable(VarId),
    #[error("left-end chain rule requires the differentiation variable to differ from the bound name `{0}`")]
    BoundVariable(VarId),
}

/// A total environment: every identifier maps to a value, falling back to a
/// default.
#[derive(Debug, Clone, PartialEq)]
pub struct Env<N> {
    values: HashMap<VarId, N>,
    default: N,
}

impl<N: Clone> Env<N> {
    pub fn new(default: N) -> Self {
        Env {
            values: HashMap::new(),
            default,
        }
    }

    /// The environment `[X ↦ x]`.
    pub fn single(x: N, default: N) -> Self {
        Env::new(default).with(VarId::X, x)
    }

    pub fn with(mut self, id: VarId, value: N) -> Self {
        self.values.insert(id, value);
        self
    }

    pub fn set(&mut self, id: VarId, value: N) {
        self.values.insert(id, value);
    }

    pub fn get(&self, id: VarId) -> &N {
        self.values.get(&id).unwrap_or(&self.default)
    }
}

/// Evaluates `e` in the semiring `ops` under `env`.
pub fn eval_env<S: Semiring + ?Sized>(e: &SymExpr, ops: &S, env: &Env<S::Elem>) -> S::Elem {
    match e {
        SymExpr::Leaf(id) => env.get(*id).clone(),
        SymExpr::Zero => ops.zero(),
        SymExpr::One => ops.one(),
        SymExpr::Node(op, a, b) => {
            let va = eval_env(a, ops, env);
            let vb = eval_env(b, ops, env);
            op.apply(ops, &va, &vb)
        }
    }
}

/// The syntactic partial derivative of `e` with respect to `j`. No
/// simplification is performed.
pub fn partial_derivative(e: &SymExpr, j: VarId) -> SymExpr {
    match e {
        SymExpr::Leaf(i) if *i == j => SymExpr::One,
        SymExpr::Leaf(_) | SymExpr::Zero | SymExpr::One => SymExpr::Zero,
        SymExpr::Node(Op::Add, a, b) => {
            SymExpr::add(partial_derivative(a, j), partial_derivative(b, j))
        }
        SymExpr::Node(Op::Mul, a, b) => SymExpr::add(
            SymExpr::Node(Op::Mul, Arc::new(partial_derivative(a, j)), b.clone()),
            SymExpr::Node(Op::Mul, a.clone(), Arc::new(partial_derivative(b, j))),
        ),
    }
}

/// `E'` for an expression over the single variable `x`.
pub fn derivative(e: &SymExpr) -> Result<SymExpr, SymbolicError> {
    check_univariate(e)?;
    Ok(partial_derivative(e, VarId::X))
}

/// Fails if `e` mentions a variable other than `x`.
pub fn check_univariate(e: &SymExpr) -> Result<(), SymbolicError> {
    match vars(e).into_iter().find(|&v| v != VarId::X) {
        Some(foreign) => Err(SymbolicError::ForeignVariable(foreign)),
        None => Ok(()),
    }
}

/// The set of leaf identifiers occurring in `e`.
pub fn vars(e: &SymExpr) -> BTreeSet<VarId> {
    fn walk(e: &SymExpr, out: &mut BTreeSet<VarId>) {
        match e {
            SymExpr::Leaf(id) => {
                out.insert(*id);
            }
            SymExpr::Node(_, a, b) => {
                walk(a, out);
                walk(b, out);
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(e, &mut out);
    out
}

/// The canonical polynomial of `e`, each leaf `i` read as the monomial `i`.
pub fn to_poly(e: &SymExpr) -> Poly {
    match e {
        SymExpr::Leaf(id) => Poly::var(*id),
        SymExpr::Zero => Poly::zero(),
        SymExpr::One => PolySemiring.one(),
        SymExpr::Node(op, a, b) => op.apply(&PolySemiring, &to_poly(a), &to_poly(b)),
    }
}

/// Equivalence in the commutative free semiring, decided by comparing
/// polynomial normal forms.
pub fn equiv_free(e1: &SymExpr, e2: &SymExpr) -> bool {
    to_poly(e1) == to_poly(e2)
}

/// Replaces each leaf `i` of `e` by `f(i)`.
pub fn substitute(e: &SymExpr, f: &impl Fn(VarId) -> SymExpr) -> SymExpr {
    match e {
        SymExpr::Leaf(id) => f(*id),
        SymExpr::Zero => SymExpr::Zero,
        SymExpr::One => SymExpr::One,
        SymExpr::Node(op, a, b) => SymExpr::node(*op, substitute(a, f), substitute(b, f)),
    }
}

/// Syntax trees as a semiring: `add` and `mul` build nodes. Equivalence is
/// [`equiv_free`], which makes this the free commutative semiring over
/// [`VarId`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SyntaxSemiring;

impl Semiring for SyntaxSemiring {
    type Elem = SymExpr;

    fn zero(&self) -> SymExpr {
        SymExpr::Zero
    }
    fn one(&self) -> SymExpr {
        SymExpr::One
    }
    fn add(&self, a: &SymExpr, b: &SymExpr) -> SymExpr {
        SymExpr::Node(Op::Add, Arc::new(a.clone()), Arc::new(b.clone()))
    }
    fn mul(&self, a: &SymExpr, b: &SymExpr) -> SymExpr {
        SymExpr::Node(Op::Mul, Arc::new(a.clone()), Arc::new(b.clone()))
    }
    fn equiv(&self, a: &SymExpr, b: &SymExpr) -> bool {
        equiv_free(a, b)
    }
}

/// `let u = a op b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Binding {
    pub u: VarId,
    pub op: Op,
    pub a: VarId,
    pub b: VarId,
}

impl Binding {
    pub fn new(u: VarId, op: Op, a: VarId, b: VarId) -> Self {
        Binding { u, op, a, b }
    }

    /// `Node(op, Leaf a, Leaf b)`.
    pub fn rhs(&self) -> SymExpr {
        SymExpr::node(self.op, SymExpr::Leaf(self.a), SymExpr::Leaf(self.b))
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "let {} = {} {} {}",
            self.u,
            self.a,
            self.op.symbol(),
            self.b
        )
    }
}

/// A sequence of bindings; the first element is the leftmost (earliest).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context {
    bindings: Vec<Binding>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn push(&mut self, b: Binding) {
        self.bindings.push(b);
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Names bound by this context, in binding order.
    pub fn defs(&self) -> Vec<VarId> {
        self.bindings.iter().map(|b| b.u).collect()
    }

    /// `self ; other`.
    pub fn concat(&self, other: &Context) -> Context {
        let mut bindings = self.bindings.clone();
        bindings.extend_from_slice(&other.bindings);
        Context { bindings }
    }

    /// `b ; self`.
    pub fn prepend(&self, b: Binding) -> Context {
        let mut bindings = Vec::with_capacity(self.bindings.len() + 1);
        bindings.push(b);
        bindings.extend_from_slice(&self.bindings);
        Context { bindings }
    }

    /// Splits into the first `at` bindings and the rest.
    pub fn split_at(&self, at: usize) -> (Context, Context) {
        let (l, r) = self.bindings.split_at(at);
        (Context::from(l.to_vec()), Context::from(r.to_vec()))
    }
}

impl From<Vec<Binding>> for Context {
    fn from(bindings: Vec<Binding>) -> Self {
        Context { bindings }
    }
}

/// Fills the context `k` with the name `y`: unfolds every binding that `y`
/// (transitively) depends on, scanning right to left.
pub fn fill(k: &Context, y: VarId) -> SymExpr {
    fill_prefix(&k.bindings, y)
}

fn fill_prefix(bindings: &[Binding], y: VarId) -> SymExpr {
    match bindings.split_last() {
        None => SymExpr::Leaf(y),
        Some((last, rest)) if last.u == y => SymExpr::node(
            last.op,
            fill_prefix(rest, last.a),
            fill_prefix(rest, last.b),
        ),
        Some((_, rest)) => fill_prefix(rest, y),
    }
}

/// `env⟨k⟩`: maps every `y` to the value of `k⟨y⟩` under `env`.
///
/// Computed in one left-to-right pass: each binding reads its operands from
/// the environment built so far, which is exactly the scope `fill` gives
/// them.
pub fn extend_env<S: Semiring + ?Sized>(env: &Env<S::Elem>, k: &Context, ops: &S) -> Env<S::Elem> {
    let mut out = env.clone();
    for b in &k.bindings {
        let v = b.op.apply(ops, out.get(b.a), out.get(b.b));
        out.set(b.u, v);
    }
    out
}

/// Both sides of the chain rule for the substitution `f` applied to `e`,
/// differentiated with respect to `j` at `theta`:
///
/// `∂⟦e⟧_f/∂j (θ)` and `Σ_{i ∈ vars(e)} ∂e/∂i (λi.⟦f(i)⟧θ) × ∂f(i)/∂j (θ)`.
pub fn chain_rule_residual<S: Semiring + ?Sized>(
    e: &SymExpr,
    f: &impl Fn(VarId) -> SymExpr,
    theta: &Env<S::Elem>,
    j: VarId,
    ops: &S,
) -> (S::Elem, S::Elem) {
    let composed = substitute(e, f);
    let lhs = eval_env(&partial_derivative(&composed, j), ops, theta);

    let inner = vars(e);
    let mut at_f = theta.clone();
    for &i in &inner {
        at_f.set(i, eval_env(&f(i), ops, theta));
    }
    let rhs = inner.iter().fold(ops.zero(), |acc, &i| {
        let outer = eval_env(&partial_derivative(e, i), ops, &at_f);
        let inner_d = eval_env(&partial_derivative(&f(i), j), ops, theta);
        ops.add(&acc, &ops.mul(&outer, &inner_d))
    });
    (lhs, rhs)
}

/// Both sides of the chain rule for a binding `b` at the left end of
/// `b ; k2`, preceded by `k1`:
///
/// `∂(b;k2)⟨y⟩/∂x` at `env⟨k1⟩`, and
/// `∂k2⟨y⟩/∂x` at `env⟨k1;b⟩ + ∂k2⟨y⟩/∂u` at `env⟨k1;b⟩ × ∂(a op b)/∂x` at `env⟨k1⟩`.
#[allow(clippy::too_many_arguments)]
pub fn left_end_chain_rule_residual<S: Semiring + ?Sized>(
    k1: &Context,
    b: Binding,
    k2: &Context,
    y: VarId,
    x: VarId,
    env: &Env<S::Elem>,
    ops: &S,
) -> Result<(S::Elem, S::Elem), SymbolicError> {
    if x == b.u {
        return Err(SymbolicError::BoundVariable(b.u));
    }
    let env_k1 = extend_env(env, k1, ops);
    let mut k1b = k1.clone();
    k1b.push(b);
    let env_k1b = extend_env(env, &k1b, ops);

    let whole = fill(&k2.prepend(b), y);
    let lhs = eval_env(&partial_derivative(&whole, x), ops, &env_k1);

    let tail = fill(k2, y);
    let direct = eval_env(&partial_derivative(&tail, x), ops, &env_k1b);
    let through_u = eval_env(&partial_derivative(&tail, b.u), ops, &env_k1b);
    let local = eval_env(&partial_derivative(&b.rhs(), x), ops, &env_k1);
    let rhs = ops.add(&direct, &ops.mul(&through_u, &local));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{nat, FloatSemiring, NatSemiring};

    fn x() -> SymExpr {
        SymExpr::x()
    }

    fn cube_tree() -> SymExpr {
        let x1 = SymExpr::add(x(), SymExpr::One);
        SymExpr::mul(SymExpr::mul(x1.clone(), x1.clone()), x1)
    }

    fn u(n: u32) -> VarId {
        VarId::aux(n)
    }

    /// The sequential view of `monomial 3`.
    fn monomial3_context() -> Context {
        Context::from(vec![
            Binding::new(u(1), Op::Mul, VarId::X, VarId::I),
            Binding::new(u(2), Op::Mul, VarId::X, VarId::X),
            Binding::new(u(3), Op::Mul, u(2), u(1)),
            Binding::new(u(4), Op::Mul, u(2), u(2)),
        ])
    }

    #[test]
    fn eval_examples() {
        let f = FloatSemiring::default();
        assert_eq!(eval_env(&cube_tree(), &f, &Env::single(4.0, 0.0)), 125.0);
        assert_eq!(eval_env(&SymExpr::Zero, &f, &Env::single(4.0, 0.0)), 0.0);
        let sq = SymExpr::mul(x(), x());
        assert_eq!(
            eval_env(&sq, &NatSemiring, &Env::single(nat(3), nat(0))),
            nat(9)
        );
    }

    #[test]
    fn partial_derivative_laws() {
        assert_eq!(partial_derivative(&x(), VarId::X), SymExpr::One);
        assert_eq!(partial_derivative(&SymExpr::One, VarId::X), SymExpr::Zero);
        assert_eq!(partial_derivative(&SymExpr::Zero, VarId::X), SymExpr::Zero);
        assert_eq!(
            partial_derivative(&SymExpr::leaf(u(1)), VarId::X),
            SymExpr::Zero
        );
        assert_eq!(
            partial_derivative(&SymExpr::mul(x(), x()), VarId::X),
            SymExpr::add(
                SymExpr::mul(SymExpr::One, x()),
                SymExpr::mul(x(), SymExpr::One)
            )
        );
    }

    #[test]
    fn derivative_of_cube() {
        assert_eq!(derivative(&x()).unwrap(), SymExpr::One);
        assert_eq!(derivative(&SymExpr::Zero).unwrap(), SymExpr::Zero);
        let d = derivative(&cube_tree()).unwrap();
        assert_eq!(to_poly(&d), Poly::univariate(VarId::X, &[3, 6, 3]));
        assert_eq!(
            derivative(&SymExpr::leaf(u(7))),
            Err(SymbolicError::ForeignVariable(u(7)))
        );
    }

    #[test]
    fn free_equivalence_examples() {
        assert!(equiv_free(&SymExpr::add(x(), SymExpr::Zero), &x()));
        let two = SymExpr::add(SymExpr::One, SymExpr::One);
        assert!(equiv_free(&SymExpr::mul(x(), two), &SymExpr::add(x(), x())));
        assert!(!equiv_free(&x(), &SymExpr::mul(x(), x())));
    }

    #[test]
    fn vars_examples() {
        assert_eq!(vars(&x()), BTreeSet::from([VarId::X]));
        assert!(vars(&SymExpr::add(SymExpr::Zero, SymExpr::One)).is_empty());
        let ab = SymExpr::mul(SymExpr::leaf(u(1)), SymExpr::leaf(u(2)));
        assert_eq!(vars(&ab), BTreeSet::from([u(1), u(2)]));
    }

    #[test]
    fn fill_examples() {
        assert_eq!(fill(&Context::new(), u(9)), SymExpr::leaf(u(9)));
        let k = monomial3_context();
        assert_eq!(
            fill(&k, u(3)),
            SymExpr::mul(
                SymExpr::mul(x(), x()),
                SymExpr::mul(x(), SymExpr::leaf(VarId::I))
            )
        );
        let (a, b) = (u(1), u(2));
        let single = Context::from(vec![Binding::new(u(3), Op::Add, a, b)]);
        assert_eq!(fill(&single, a), SymExpr::leaf(a));
    }

    #[test]
    fn extend_env_examples() {
        let env = Env::new(nat(0))
            .with(VarId::X, nat(2))
            .with(VarId::I, nat(1));
        let same = extend_env(&env, &Context::new(), &NatSemiring);
        assert_eq!(same, env);
        let ext = extend_env(&env, &monomial3_context(), &NatSemiring);
        assert_eq!(ext.get(u(2)), &nat(4));
        assert_eq!(ext.get(u(3)), &nat(8));
        assert_eq!(ext.get(u(4)), &nat(16));
    }

    #[test]
    fn chain_rule_examples() {
        let i = u(1);
        let j = u(2);
        let theta = Env::new(nat(0)).with(j, nat(2));

        let (l, r) = chain_rule_residual(
            &SymExpr::leaf(i),
            &|_| SymExpr::leaf(j),
            &theta,
            j,
            &NatSemiring,
        );
        assert_eq!((l, r), (nat(1), nat(1)));

        let sq = SymExpr::mul(SymExpr::leaf(i), SymExpr::leaf(i));
        let succ = |_| SymExpr::add(SymExpr::leaf(j), SymExpr::One);
        let (l, r) = chain_rule_residual(&sq, &succ, &theta, j, &NatSemiring);
        assert_eq!((l, r), (nat(6), nat(6)));

        let (l, r) = chain_rule_residual(&SymExpr::Zero, &succ, &theta, j, &NatSemiring);
        assert_eq!((l, r), (nat(0), nat(0)));
    }

    #[test]
    fn left_end_chain_rule_examples() {
        let (a, b_, bound) = (u(1), u(2), u(3));
        let env = Env::new(nat(0)).with(a, nat(3)).with(b_, nat(5));
        let empty = Context::new();

        let add_ab = Binding::new(bound, Op::Add, a, b_);
        let (l, r) =
            left_end_chain_rule_residual(&empty, add_ab, &empty, bound, a, &env, &NatSemiring)
                .unwrap();
        assert_eq!((l, r), (nat(1), nat(1)));

        let add_aa = Binding::new(bound, Op::Add, a, a);
        let (l, r) =
            left_end_chain_rule_residual(&empty, add_aa, &empty, bound, a, &env, &NatSemiring)
                .unwrap();
        assert_eq!((l, r), (nat(2), nat(2)));

        // x outside {a, b}: the binding contributes nothing through u.
        let other = u(4);
        let env = env.with(other, nat(7));
        let k2 = Context::from(vec![Binding::new(u(5), Op::Mul, other, bound)]);
        let (l, r) =
            left_end_chain_rule_residual(&empty, add_ab, &k2, u(5), other, &env, &NatSemiring)
                .unwrap();
        assert_eq!((l.clone(), r), (nat(8), nat(8)));
        let direct = eval_env(
            &partial_derivative(&fill(&k2, u(5)), other),
            &NatSemiring,
            &extend_env(&env, &Context::from(vec![add_ab]), &NatSemiring),
        );
        assert_eq!(l, direct);

        assert_eq!(
            left_end_chain_rule_residual(&empty, add_ab, &empty, bound, bound, &env, &NatSemiring),
            Err(SymbolicError::BoundVariable(bound))
        );
    }

    #[test]
    fn rendering() {
        let e = SymExpr::add(SymExpr::mul(x(), x()), SymExpr::mul(x(), SymExpr::One));
        assert_eq!(e.to_string(), "((x*x)+(x*1))");
        assert_eq!(SymExpr::Zero.to_string(), "0");
        assert_eq!(SymExpr::leaf(u(3)).to_string(), "u3");
    }

    #[test]
    fn dag_size_counts_shared_nodes_once() {
        let sq = SymExpr::mul(x(), x());
        let shared = Arc::new(sq);
        let e = SymExpr::Node(Op::Mul, shared.clone(), shared);
        assert_eq!(e.node_count(), 3);
        assert_eq!(e.dag_size(), 2);
        assert_eq!(x().dag_size(), 0);
    }
}
