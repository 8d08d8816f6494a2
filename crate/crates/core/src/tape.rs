//! Reverse-mode differentiation with an explicit tape (Wengert list).
//!
//! The forward phase evaluates the expression with a dictionary whose
//! operations allocate vertices and push one entry per operation. The
//! backward phase seeds the root with 1 and pops entries, propagating each
//! entry's derivative to its operands.

use std::cell::{Cell, RefCell};

use crate::expr::Expression;
use crate::semiring::Semiring;
use crate::symbolic::{derivative, eval_env, Env, Op, VarId};
use crate::vertex::{
    final_read_check, make_entry, propagate, update, Checks, Instruments, Monitor, NoMonitor,
    Report, TapeEntry, TraceSnapshot, Vertex,
};

/// The vertex dictionary used during the forward phase.
struct Recorder<'a, S: Semiring, M> {
    base: &'a S,
    tape: RefCell<Vec<TapeEntry<S::Elem>>>,
    next_id: Cell<u32>,
    monitor: &'a RefCell<M>,
}

impl<S: Semiring, M: Monitor<S>> Recorder<'_, S, M> {
    fn record(&self, op: Op, a: &Vertex<S::Elem>, b: &Vertex<S::Elem>) -> Vertex<S::Elem> {
        let n = self.next_id.get() + 1;
        self.next_id.set(n);
        let entry = make_entry(VarId::aux(n), op, a, b, self.base);
        self.monitor.borrow_mut().created(self.base, &entry);
        let u = Vertex::Var(entry.u.clone());
        self.tape.borrow_mut().push(entry);
        u
    }
}

impl<S: Semiring, M: Monitor<S>> Semiring for Recorder<'_, S, M> {
    type Elem = Vertex<S::Elem>;

    fn zero(&self) -> Self::Elem {
        Vertex::Zero
    }
    fn one(&self) -> Self::Elem {
        Vertex::One
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.record(Op::Add, a, b)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.record(Op::Mul, a, b)
    }
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a.same(b)
    }
}

fn reverse<S, M>(e: &Expression, base: &S, x: Vertex<S::Elem>, monitor: &RefCell<M>) -> S::Elem
where
    S: Semiring,
    S::Elem: 'static,
    M: Monitor<S>,
{
    let recorder = Recorder {
        base,
        tape: RefCell::new(Vec::new()),
        next_id: Cell::new(0),
        monitor,
    };
    let y = e.evaluate(&recorder, x.clone());

    update(&y, &base.one(), base);
    monitor.borrow_mut().seeded(base, &y);
    let mut tape = recorder.tape.into_inner();
    while let Some(entry) = tape.pop() {
        propagate(&entry, base);
        monitor.borrow_mut().processed(base, &entry);
    }

    match &x {
        Vertex::Var(node) => node.d().clone(),
        _ => unreachable!("the input vertex is always a variable"),
    }
}

/// Reverse-mode derivative of `e`, computed with a tape.
pub fn diff_tape(e: &Expression) -> Expression {
    let e = e.clone();
    Expression::new(move |ops, r| {
        let x = Vertex::var(VarId::X, r, ops.zero());
        reverse(&e, ops, x, &RefCell::new(NoMonitor))
    })
}

/// Differentiates `e` at `r` with the requested instrumentation.
///
/// With `checks.ghost`, the forward invariant is checked after every push,
/// the backward invariant after seeding and after every pop, and the final
/// result against the symbolic derivative.
pub fn run_instrumented<S>(e: &Expression, base: &S, r: S::Elem, checks: Checks) -> Report<S::Elem>
where
    S: Semiring,
    S::Elem: 'static,
{
    let x = Vertex::var(VarId::X, r.clone(), base.zero());
    let monitor = RefCell::new(Instruments::new(checks, &x, base));
    let derivative_value = reverse(e, base, x, &monitor);
    let monitor = monitor.into_inner();
    let mut report = Report {
        derivative: derivative_value,
        operations: monitor.operations(),
        trace: monitor.trace,
        witnesses: monitor.witnesses,
        violations: monitor.violations,
    };
    if checks.ghost {
        let oracle = derivative(&e.reify()).expect("reified expressions only mention x");
        let expected = eval_env(&oracle, base, &Env::single(r.clone(), r));
        final_read_check(&mut report, base, &expected);
    }
    report
}

/// Snapshots of every `d` field: one after seeding, then one per processed
/// vertex.
pub fn backward_trace<S>(e: &Expression, base: &S, r: S::Elem) -> Vec<TraceSnapshot<S::Elem>>
where
    S: Semiring,
    S::Elem: 'static,
{
    let checks = Checks {
        trace: true,
        ..Checks::default()
    };
    run_instrumented(e, base, r, checks).trace
}
