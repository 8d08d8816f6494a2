//! Reverse-mode differentiation with effect handlers.
//!
//! The dictionary's `add` and `mul` perform an effect carrying their two
//! operand vertices. The handler allocates the result vertex, resumes the
//! expression with it, and once the expression has finished (the resume
//! returns) propagates that vertex's derivative to the operands. The control
//! stack of pending handler activations plays the role of the tape, so there
//! is no explicit backward loop.

use std::cell::{Cell, RefCell};

use crate::effects::{handle_with_stats, perform, EffectError, Handler};
use crate::expr::Expression;
use crate::semiring::Semiring;
use crate::symbolic::{derivative, eval_env, Env, Op, VarId};
use crate::vertex::{
    final_read_check, make_entry, propagate, update, Checks, Instruments, InvariantKind,
    InvariantViolation, Monitor, NoMonitor, OpProtocolWitness, Report, Vertex,
};

/// The payload of the arithmetic effect: the two injections of one channel.
#[derive(Debug, Clone)]
pub enum OpRequest<V> {
    Add(V, V),
    Mul(V, V),
}

impl<V> OpRequest<V> {
    pub fn op(&self) -> Op {
        match self {
            OpRequest::Add(..) => Op::Add,
            OpRequest::Mul(..) => Op::Mul,
        }
    }

    fn into_parts(self) -> (Op, V, V) {
        match self {
            OpRequest::Add(a, b) => (Op::Add, a, b),
            OpRequest::Mul(a, b) => (Op::Mul, a, b),
        }
    }
}

/// Dictionary whose arithmetic performs [`OpRequest`] effects.
struct EffectDict<N>(std::marker::PhantomData<N>);

impl<N: 'static> EffectDict<N> {
    fn request(req: OpRequest<Vertex<N>>) -> Vertex<N> {
        match perform::<_, Vertex<N>>(req) {
            Ok(u) => u,
            Err(e) => std::panic::panic_any(e),
        }
    }
}

impl<N: 'static> Semiring for EffectDict<N> {
    type Elem = Vertex<N>;

    fn zero(&self) -> Vertex<N> {
        Vertex::Zero
    }
    fn one(&self) -> Vertex<N> {
        Vertex::One
    }
    fn add(&self, a: &Vertex<N>, b: &Vertex<N>) -> Vertex<N> {
        Self::request(OpRequest::Add(a.clone(), b.clone()))
    }
    fn mul(&self, a: &Vertex<N>, b: &Vertex<N>) -> Vertex<N> {
        Self::request(OpRequest::Mul(a.clone(), b.clone()))
    }
    fn equiv(&self, a: &Vertex<N>, b: &Vertex<N>) -> bool {
        a.same(b)
    }
}

struct Outcome<N> {
    derivative: N,
    effects: usize,
    resumptions: usize,
}

fn reverse<S, M>(
    e: &Expression,
    base: &S,
    x: Vertex<S::Elem>,
    monitor: &RefCell<M>,
) -> Result<Outcome<S::Elem>, EffectError>
where
    S: Semiring,
    S::Elem: 'static,
    M: Monitor<S>,
{
    let next_id = Cell::new(0u32);

    let handler = Handler::new(
        |req: OpRequest<Vertex<S::Elem>>, k| {
            let (op, a, b) = req.into_parts();
            let n = next_id.get() + 1;
            next_id.set(n);
            let entry = make_entry(VarId::aux(n), op, &a, &b, base);
            monitor.borrow_mut().created(base, &entry);
            k.resume(Vertex::Var(entry.u.clone()))?;
            propagate(&entry, base);
            monitor.borrow_mut().processed(base, &entry);
            Ok(())
        },
        |y: Vertex<S::Elem>| {
            update(&y, &base.one(), base);
            monitor.borrow_mut().seeded(base, &y);
            Ok(())
        },
    );

    let computation = {
        let e = e.clone();
        let x = x.clone();
        move || e.evaluate(&EffectDict(std::marker::PhantomData), x)
    };
    let (result, stats) = handle_with_stats(computation, handler);
    result?;

    let Vertex::Var(node) = &x else {
        unreachable!("the input vertex is always a variable")
    };
    let derivative = node.d().clone();
    Ok(Outcome {
        derivative,
        effects: stats.effects,
        resumptions: stats.resumptions,
    })
}

/// Reverse-mode derivative of `e`, computed with effect handlers.
///
/// Evaluating the result panics with an [`EffectError`] payload if `e`
/// performs an effect of its own that reaches the differentiation handler.
pub fn diff_handler(e: &Expression) -> Expression {
    let e = e.clone();
    Expression::new(move |ops, r| {
        let x = Vertex::var(VarId::X, r, ops.zero());
        match reverse(&e, ops, x, &RefCell::new(NoMonitor)) {
            Ok(out) => out.derivative,
            Err(err) => std::panic::panic_any(err),
        }
    })
}

/// Differentiates `e` at `r` with the requested instrumentation. Besides the
/// ghost-context checks shared with the tape backend, the run verifies that
/// every continuation was resumed exactly once.
pub fn run_instrumented<S>(
    e: &Expression,
    base: &S,
    r: S::Elem,
    checks: Checks,
) -> Result<Report<S::Elem>, EffectError>
where
    S: Semiring,
    S::Elem: 'static,
{
    let x = Vertex::var(VarId::X, r.clone(), base.zero());
    let monitor = RefCell::new(Instruments::new(checks, &x, base));
    let outcome = reverse(e, base, x, &monitor)?;
    let monitor = monitor.into_inner();
    let mut report = Report {
        derivative: outcome.derivative,
        operations: monitor.operations(),
        trace: monitor.trace,
        witnesses: monitor.witnesses,
        violations: monitor.violations,
    };
    if outcome.resumptions != outcome.effects {
        report.violations.push(InvariantViolation {
            kind: InvariantKind::Resumption,
            step: usize::MAX,
            vertex: VarId::X,
            detail: format!(
                "{} effects but {} resumptions",
                outcome.effects, outcome.resumptions
            ),
        });
    }
    if checks.ghost {
        let oracle = derivative(&e.reify()).expect("reified expressions only mention x");
        let expected = eval_env(&oracle, base, &Env::single(r.clone(), r));
        final_read_check(&mut report, base, &expected);
    }
    Ok(report)
}

/// One witness per performed effect, recording the request and the reply.
pub fn protocol_audit<S>(
    e: &Expression,
    base: &S,
    r: S::Elem,
) -> Result<Vec<OpProtocolWitness>, EffectError>
where
    S: Semiring,
    S::Elem: 'static,
{
    let checks = Checks {
        audit: true,
        ..Checks::default()
    };
    Ok(run_instrumented(e, base, r, checks)?.witnesses)
}

/// Backward-phase snapshots, taken at the same points as
/// [`crate::tape::backward_trace`].
pub fn backward_trace<S>(
    e: &Expression,
    base: &S,
    r: S::Elem,
) -> Result<Vec<crate::vertex::TraceSnapshot<S::Elem>>, EffectError>
where
    S: Semiring,
    S::Elem: 'static,
{
    let checks = Checks {
        trace: true,
        ..Checks::default()
    };
    Ok(run_instrumented(e, base, r, checks)?.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{constant_one, cube, monomial};
    use crate::semiring::{nat, FloatSemiring, NatSemiring};
    use crate::symbolic::SymExpr;

    #[test]
    fn derivative_examples() {
        let f = FloatSemiring::default();
        assert_eq!(diff_handler(&cube()).evaluate(&f, 4.0), 75.0);
        let zero = Expression::from_ast(SymExpr::Zero).unwrap();
        assert_eq!(diff_handler(&zero).evaluate(&NatSemiring, nat(8)), nat(0));
        assert_eq!(diff_handler(&diff_handler(&cube())).evaluate(&f, 4.0), 30.0);
    }

    #[test]
    fn audit_examples() {
        let x_plus_1 = Expression::from_ast(SymExpr::add(SymExpr::x(), SymExpr::One)).unwrap();
        let w = protocol_audit(&x_plus_1, &NatSemiring, nat(3)).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].op, Op::Add);
        assert_eq!(w[0].request_exprs, (SymExpr::x(), SymExpr::One));
        assert_eq!(w[0].reply_expr, SymExpr::add(SymExpr::x(), SymExpr::One));
        assert!(w[0].holds());

        let w = protocol_audit(&monomial(3), &NatSemiring, nat(2)).unwrap();
        let lets: Vec<_> = w.iter().map(|w| (w.reply_vertex, w.operands)).collect();
        let u = VarId::aux;
        assert_eq!(
            lets,
            vec![
                (u(1), (VarId::X, VarId::I)),
                (u(2), (VarId::X, VarId::X)),
                (u(3), (u(2), u(1))),
                (u(4), (u(2), u(2))),
            ]
        );
        assert!(w.iter().all(OpProtocolWitness::holds));

        assert!(protocol_audit(&constant_one(), &NatSemiring, nat(2))
            .unwrap()
            .is_empty());
    }
}
