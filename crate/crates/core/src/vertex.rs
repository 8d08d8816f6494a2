//! Vertices of the computation DAG built during reverse-mode evaluation, and
//! the instrumentation shared by the tape and handler backends.
//!
//! A vertex is either one of the constants `O` and `I`, or a heap record
//! holding an immutable value `v` and a mutable derivative accumulator `d`.
//! The record's identity is its name.

use std::cell::{Ref, RefCell};
use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::semiring::Semiring;
use crate::symbolic::{
    eval_env, extend_env, fill, partial_derivative, substitute, Binding, Context, Env, Op, SymExpr,
    VarId,
};

pub struct VarNode<N> {
    id: VarId,
    v: N,
    d: RefCell<N>,
}

impl<N> VarNode<N> {
    pub fn id(&self) -> VarId {
        self.id
    }

    pub fn v(&self) -> &N {
        &self.v
    }

    pub fn d(&self) -> Ref<'_, N> {
        self.d.borrow()
    }
}

pub enum Vertex<N> {
    Zero,
    One,
    Var(Rc<VarNode<N>>),
}

impl<N> Clone for Vertex<N> {
    fn clone(&self) -> Self {
        match self {
            Vertex::Zero => Vertex::Zero,
            Vertex::One => Vertex::One,
            Vertex::Var(n) => Vertex::Var(Rc::clone(n)),
        }
    }
}

impl<N> fmt::Debug for Vertex<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({})", self.id())
    }
}

impl<N> Vertex<N> {
    pub fn var(id: VarId, v: N, d: N) -> Self {
        Vertex::Var(Rc::new(VarNode {
            id,
            v,
            d: RefCell::new(d),
        }))
    }

    /// The vertex's name; the constants are named `O` and `I`.
    pub fn id(&self) -> VarId {
        match self {
            Vertex::Zero => VarId::O,
            Vertex::One => VarId::I,
            Vertex::Var(n) => n.id,
        }
    }

    /// Physical identity.
    pub fn same(&self, other: &Vertex<N>) -> bool {
        match (self, other) {
            (Vertex::Zero, Vertex::Zero) | (Vertex::One, Vertex::One) => true,
            (Vertex::Var(a), Vertex::Var(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }
}

pub fn get_v<S: Semiring + ?Sized>(x: &Vertex<S::Elem>, base: &S) -> S::Elem {
    match x {
        Vertex::Zero => base.zero(),
        Vertex::One => base.one(),
        Vertex::Var(n) => n.v.clone(),
    }
}

/// `d ← d + i`. A no-op on the constants.
pub fn update<S: Semiring + ?Sized>(x: &Vertex<S::Elem>, i: &S::Elem, base: &S) {
    if let Vertex::Var(n) = x {
        let mut d = n.d.borrow_mut();
        let sum = base.add(&d, i);
        *d = sum;
    }
}

/// One recorded operation `let u = a op b`.
pub struct TapeEntry<N> {
    pub u: Rc<VarNode<N>>,
    pub op: Op,
    pub a: Vertex<N>,
    pub b: Vertex<N>,
}

impl<N> Clone for TapeEntry<N> {
    fn clone(&self) -> Self {
        TapeEntry {
            u: Rc::clone(&self.u),
            op: self.op,
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

impl<N> TapeEntry<N> {
    pub fn binding(&self) -> Binding {
        Binding::new(self.u.id, self.op, self.a.id(), self.b.id())
    }
}

/// Allocates `u` with `v = a.v op b.v` and `d = 0`.
pub(crate) fn make_entry<S: Semiring + ?Sized>(
    id: VarId,
    op: Op,
    a: &Vertex<S::Elem>,
    b: &Vertex<S::Elem>,
    base: &S,
) -> TapeEntry<S::Elem> {
    let v = op.apply(base, &get_v(a, base), &get_v(b, base));
    let u = Rc::new(VarNode {
        id,
        v,
        d: RefCell::new(base.zero()),
    });
    TapeEntry {
        u,
        op,
        a: a.clone(),
        b: b.clone(),
    }
}

/// Propagates `u.d` to the operands of one entry: `u.d` is read first, then
/// `a` is updated, then `b`. When `a` and `b` are the same vertex both
/// updates land on it.
pub(crate) fn propagate<S: Semiring + ?Sized>(entry: &TapeEntry<S::Elem>, base: &S) {
    let ud = entry.u.d.borrow().clone();
    match entry.op {
        Op::Add => {
            update(&entry.a, &ud, base);
            update(&entry.b, &ud, base);
        }
        Op::Mul => {
            update(&entry.a, &base.mul(&ud, &get_v(&entry.b, base)), base);
            update(&entry.b, &base.mul(&ud, &get_v(&entry.a, base)), base);
        }
    }
}

/// Observation points of a reverse-mode run.
pub(crate) trait Monitor<S: Semiring> {
    fn created(&mut self, _base: &S, _entry: &TapeEntry<S::Elem>) {}
    fn seeded(&mut self, _base: &S, _root: &Vertex<S::Elem>) {}
    fn processed(&mut self, _base: &S, _entry: &TapeEntry<S::Elem>) {}
}

pub(crate) struct NoMonitor;

impl<S: Semiring> Monitor<S> for NoMonitor {}

/// The `d` fields of all vertices at one point of the backward phase.
/// Processed vertices are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSnapshot<N> {
    pub cells: Vec<(VarId, Option<N>)>,
}

impl<N> TraceSnapshot<N> {
    pub fn get(&self, id: VarId) -> Option<&Option<N>> {
        self.cells.iter().find(|(i, _)| *i == id).map(|(_, d)| d)
    }
}

impl<N: fmt::Display> fmt::Display for TraceSnapshot<N> {
    /// `x=0,u1=0,u2=#`: one `id=value` pair per vertex, `#` once processed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (id, d)) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match d {
                Some(d) => write!(f, "{id}={d}")?,
                None => write!(f, "{id}=#")?,
            }
        }
        Ok(())
    }
}

/// One `Add`/`Mul` request and the vertex sent back, with the expressions
/// over `x` that the operands and the reply stand for.
#[derive(Debug, Clone, PartialEq)]
pub struct OpProtocolWitness {
    pub op: Op,
    pub operands: (VarId, VarId),
    pub request_exprs: (SymExpr, SymExpr),
    pub reply_vertex: VarId,
    pub reply_expr: SymExpr,
    /// The reply vertex was not seen before this request.
    pub fresh: bool,
    /// The reply's `v` field equals the value of `reply_expr`.
    pub value_matches: bool,
}

impl OpProtocolWitness {
    /// The reply stands for `Node(op, left, right)` and carries its value.
    pub fn holds(&self) -> bool {
        let (l, r) = &self.request_exprs;
        self.fresh
            && self.value_matches
            && self.reply_expr == SymExpr::node(self.op, l.clone(), r.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    Forward,
    Backward,
    BackwardOrder,
    FinalRead,
    Protocol,
    Resumption,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind:?} invariant violated at step {step} for {vertex}: {detail}")]
pub struct InvariantViolation {
    pub kind: InvariantKind,
    pub step: usize,
    pub vertex: VarId,
    pub detail: String,
}

/// What an instrumented run should record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Checks {
    /// Check the forward and backward invariants against a ghost context.
    pub ghost: bool,
    /// Record a [`TraceSnapshot`] after seeding and after each processed
    /// vertex.
    pub trace: bool,
    /// Record an [`OpProtocolWitness`] per operation.
    pub audit: bool,
}

impl Checks {
    pub fn all() -> Self {
        Checks {
            ghost: true,
            trace: true,
            audit: true,
        }
    }
}

/// Everything an instrumented reverse-mode run observed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report<N> {
    pub derivative: N,
    /// Number of operations recorded during the forward phase.
    pub operations: usize,
    pub trace: Vec<TraceSnapshot<N>>,
    pub witnesses: Vec<OpProtocolWitness>,
    pub violations: Vec<InvariantViolation>,
}

impl<N> Report<N> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.witnesses.iter().all(OpProtocolWitness::holds)
    }
}

/// Monitor that maintains a ghost context mirroring the recorded operations.
pub(crate) struct Instruments<S: Semiring> {
    checks: Checks,
    x: Vertex<S::Elem>,
    rho0: Env<S::Elem>,
    entries: Vec<TapeEntry<S::Elem>>,
    ghost: Context,
    seen: HashSet<VarId>,
    processed: usize,
    root: Option<Vertex<S::Elem>>,
    step: usize,
    pub(crate) trace: Vec<TraceSnapshot<S::Elem>>,
    pub(crate) witnesses: Vec<OpProtocolWitness>,
    pub(crate) violations: Vec<InvariantViolation>,
}

impl<S: Semiring> Instruments<S> {
    pub(crate) fn new(checks: Checks, x: &Vertex<S::Elem>, base: &S) -> Self {
        let rho0 = Env::new(base.zero())
            .with(VarId::X, get_v(x, base))
            .with(VarId::O, base.zero())
            .with(VarId::I, base.one());
        Instruments {
            checks,
            x: x.clone(),
            rho0,
            entries: Vec::new(),
            ghost: Context::new(),
            seen: HashSet::from([VarId::X, VarId::O, VarId::I]),
            processed: 0,
            root: None,
            step: 0,
            trace: Vec::new(),
            witnesses: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub(crate) fn operations(&self) -> usize {
        self.entries.len()
    }

    fn violation(&mut self, kind: InvariantKind, vertex: VarId, detail: String) {
        self.violations.push(InvariantViolation {
            kind,
            step: self.step,
            vertex,
            detail,
        });
    }

    /// Vertices whose `d` field still matters: `x` and every unprocessed
    /// `u`, in creation order.
    fn pending(&self) -> Vec<Vertex<S::Elem>> {
        let live = self.entries.len() - self.processed;
        std::iter::once(self.x.clone())
            .chain(
                self.entries[..live]
                    .iter()
                    .map(|e| Vertex::Var(Rc::clone(&e.u))),
            )
            .collect()
    }

    fn check_forward(&mut self, base: &S) {
        let names: Vec<Vertex<S::Elem>> = self.pending();
        for vertex in names {
            let id = vertex.id();
            let expected = eval_env(&fill(&self.ghost, id), base, &self.rho0);
            if !base.equiv(&get_v(&vertex, base), &expected) {
                self.violation(
                    InvariantKind::Forward,
                    id,
                    format!(
                        "v field disagrees with the value of {}",
                        fill(&self.ghost, id)
                    ),
                );
            }
        }
    }

    /// Every pending `u` holds `∂K2⟨y⟩/∂u` at `ρ0⟨K1⟩`, where `K1` are the
    /// pending bindings and `K2` the processed ones.
    fn check_backward(&mut self, base: &S) {
        let Some(root) = self.root.clone() else {
            return;
        };
        let live = self.entries.len() - self.processed;
        let (pending_ctx, done_ctx) = self.ghost.split_at(live);
        let env = extend_env(&self.rho0, &pending_ctx, base);
        let tail = fill(&done_ctx, root.id());
        for vertex in self.pending() {
            let Vertex::Var(node) = &vertex else { continue };
            let expected = eval_env(&partial_derivative(&tail, node.id), base, &env);
            let actual = node.d.borrow().clone();
            if !base.equiv(&actual, &expected) {
                self.violation(
                    InvariantKind::Backward,
                    node.id,
                    format!("d field does not hold ∂{tail}/∂{}", node.id),
                );
            }
        }
    }

    fn snapshot(&mut self) {
        let live = self.entries.len() - self.processed;
        let mut cells = vec![(VarId::X, self.x_d())];
        for (i, e) in self.entries.iter().enumerate() {
            let d = (i < live).then(|| e.u.d.borrow().clone());
            cells.push((e.u.id, d));
        }
        self.trace.push(TraceSnapshot { cells });
    }

    fn x_d(&self) -> Option<S::Elem> {
        match &self.x {
            Vertex::Var(n) => Some(n.d.borrow().clone()),
            _ => None,
        }
    }
}

impl<S: Semiring> Monitor<S> for Instruments<S> {
    fn created(&mut self, base: &S, entry: &TapeEntry<S::Elem>) {
        self.step += 1;
        let binding = entry.binding();
        let fresh = self.seen.insert(binding.u);
        let request_exprs = (
            over_x(&fill(&self.ghost, binding.a)),
            over_x(&fill(&self.ghost, binding.b)),
        );
        self.ghost.push(binding);
        self.entries.push(entry.clone());
        if self.checks.audit {
            let reply_expr = over_x(&fill(&self.ghost, binding.u));
            let value_matches = base.equiv(&entry.u.v, &eval_env(&reply_expr, base, &self.rho0));
            self.witnesses.push(OpProtocolWitness {
                op: binding.op,
                operands: (binding.a, binding.b),
                request_exprs,
                reply_vertex: binding.u,
                reply_expr,
                fresh,
                value_matches,
            });
        }
        if self.checks.ghost {
            self.check_forward(base);
        }
    }

    fn seeded(&mut self, base: &S, root: &Vertex<S::Elem>) {
        self.step += 1;
        self.root = Some(root.clone());
        if self.checks.ghost {
            self.check_backward(base);
        }
        if self.checks.trace {
            self.snapshot();
        }
    }

    fn processed(&mut self, base: &S, entry: &TapeEntry<S::Elem>) {
        self.step += 1;
        let live = self.entries.len() - self.processed;
        let expected = live.checked_sub(1).map(|i| self.entries[i].u.id);
        if expected != Some(entry.u.id) {
            self.violation(
                InvariantKind::BackwardOrder,
                entry.u.id,
                format!("processed out of order, expected {expected:?}"),
            );
        }
        self.processed += 1;
        if self.checks.ghost {
            self.check_backward(base);
        }
        if self.checks.trace {
            self.snapshot();
        }
    }
}

/// Reads the constant vertices `O` and `I` as the constants 0 and 1.
fn over_x(e: &SymExpr) -> SymExpr {
    substitute(e, &|id| match id {
        VarId::O => SymExpr::Zero,
        VarId::I => SymExpr::One,
        other => SymExpr::Leaf(other),
    })
}

/// Adds the final-read check: the result equals the oracle derivative.
pub(crate) fn final_read_check<S: Semiring>(
    report: &mut Report<S::Elem>,
    base: &S,
    oracle: &S::Elem,
) {
    if !base.equiv(&report.derivative, oracle) {
        report.violations.push(InvariantViolation {
            kind: InvariantKind::FinalRead,
            step: usize::MAX,
            vertex: VarId::X,
            detail: "x.d differs from the symbolic derivative".to_string(),
        });
    }
}
