//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a non-zero status if any criterion fails.
//!
//! Tolerances: NatSemiring comparisons are exact; FloatSemiring comparisons
//! use relative tolerance 1e-9.

mod common;

use std::cell::{Cell, RefCell};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::rc::Rc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use tagless_ad::effects::{ask, ask_demo, handle, Ask, Continuation, EffectError, Handler};
use tagless_ad::expr::corpus;
use tagless_ad::forward::Dual;
use tagless_ad::semiring::{axioms_hold, Poly};
use tagless_ad::symbolic::{
    chain_rule_residual, derivative, equiv_free, left_end_chain_rule_residual, Binding, Context, Op,
};
use tagless_ad::vertex::{Checks, OpProtocolWitness, TraceSnapshot};
use tagless_ad::{
    cube, diff_handler, dual_ops, handler, monomial, nat, tape, Backend, Expression, FloatSemiring,
    NatSemiring, PolySemiring, Semiring, SymExpr, SyntaxSemiring, VarId,
};

const FLOAT_TOLERANCE: f64 = 1e-9;
const SEED: u64 = 0x005e_edad;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ensure_within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn float() -> FloatSemiring {
    FloatSemiring::with_tolerance(FLOAT_TOLERANCE)
}

fn cube_derivative() -> Outcome {
    let start = Instant::now();
    for b in Backend::ALL {
        let d = b.diff(&cube());
        let n = d.evaluate(&NatSemiring, nat(4));
        ensure(n == nat(75), || format!("{} gives {n} in Nat", b.name()))?;
        let f = d.evaluate(&float(), 4.0);
        ensure(float().equiv(&f, &75.0), || {
            format!("{} gives {f} in Float", b.name())
        })?;
    }
    ensure_within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("75 from all backends in {:.2?}", start.elapsed()))
}

fn monomial_law() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for k in 0..=16u32 {
        for r in 0..=6u64 {
            let expected = if k == 0 {
                nat(0)
            } else {
                BigUint::from(k) * nat(r).pow(k - 1)
            };
            for b in Backend::ALL {
                let got = b.diff(&monomial(k.into())).evaluate(&NatSemiring, nat(r));
                ensure(got == expected, || {
                    format!(
                        "{}: d/dx x^{k} at {r} = {got}, expected {expected}",
                        b.name()
                    )
                })?;
                cases += 1;
            }
        }
    }
    ensure_within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{cases} cases exact in {:.2?}", start.elapsed()))
}

fn iterated_differentiation() -> Outcome {
    for b in Backend::ALL {
        for (order, expected) in [(2u32, 30u64), (3, 6), (4, 0)] {
            let d = b.diff_n(&cube(), order);
            let n = d.evaluate(&NatSemiring, nat(4));
            ensure(n == nat(expected), || {
                format!("{} order {order}: {n} in Nat", b.name())
            })?;
            let f = d.evaluate(&float(), 4.0);
            ensure(float().equiv(&f, &(expected as f64)), || {
                format!("{} order {order}: {f} in Float", b.name())
            })?;
        }
    }
    let corpus = corpus();
    for (name, e) in &corpus {
        let oracle = derivative(&e.reify()).map_err(|err| err.to_string())?;
        for b in Backend::ALL {
            let reified = b.diff(e).reify();
            ensure(equiv_free(&reified, &oracle), || {
                format!(
                    "{}: reify(diff {name}) differs from the symbolic derivative",
                    b.name()
                )
            })?;
        }
    }
    Ok(format!(
        "orders 2/3/4 = 30/6/0; reified derivatives match on {} expressions",
        corpus.len()
    ))
}

fn row<N: Clone>(trace: &[TraceSnapshot<N>], id: VarId) -> Vec<Option<N>> {
    trace.iter().map(|s| s.get(id).cloned().flatten()).collect()
}

fn backward_trace() -> Outcome {
    let u = VarId::aux;
    for n in [2u64, 5] {
        let sq = n * n;
        let some = |v: u64| Some(nat(v));
        let expected = [
            (
                VarId::X,
                vec![some(0), some(0), some(0), some(2 * sq), some(3 * sq)],
            ),
            (u(1), vec![some(0), some(0), some(sq), some(sq), None]),
            (u(2), vec![some(0), some(0), some(n), None, None]),
            (u(3), vec![some(1), some(1), None, None, None]),
            (u(4), vec![some(0), None, None, None, None]),
        ];
        let tape_trace = tape::backward_trace(&monomial(3), &NatSemiring, nat(n));
        let handler_trace = handler::backward_trace(&monomial(3), &NatSemiring, nat(n))
            .map_err(|e| e.to_string())?;
        for (name, trace) in [("tape", &tape_trace), ("handler", &handler_trace)] {
            ensure(trace.len() == 5, || {
                format!("{name}: {} snapshots", trace.len())
            })?;
            for (id, want) in &expected {
                let got = row(trace, *id);
                ensure(&got == want, || {
                    format!("{name} at n={n}: row {id} is {got:?}, expected {want:?}")
                })?;
            }
        }
    }
    Ok("x, u1..u4 rows exact at n = 2 and 5 for tape and handler".into())
}

fn ask_demo_golden() -> Outcome {
    let golden = include_str!("golden/ask_demo.txt");
    let mut text = ask_demo().join("\n");
    text.push('\n');
    ensure(text == golden, || {
        format!("library output differs:\n{text}")
    })?;

    let out = Command::new(env!("CARGO_BIN_EXE_tagless-ad"))
        .arg("--demo-ask")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("CLI exited with {}", out.status)
    })?;
    ensure(out.stdout == golden.as_bytes(), || {
        format!(
            "CLI output differs:\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })?;

    let second = Rc::new(RefCell::new(None));
    let seen = Rc::clone(&second);
    let twice: Handler<'_, Ask, i64, i64, i64> = Handler::new(
        move |Ask(x), k: Continuation<'_, Ask, i64, i64, i64>| {
            let first = k.resume(x + 1);
            *seen.borrow_mut() = Some(k.resume(x + 1));
            first
        },
        Ok,
    );
    let first = handle(|| ask(1).unwrap(), twice);
    ensure(first == Ok(2), || format!("first resume gave {first:?}"))?;
    let second = second.borrow().clone();
    ensure(second == Some(Err(EffectError::OneShotViolation)), || {
        format!("second resume gave {second:?}")
    })?;
    Ok("five lines byte-exact (library and CLI); double resume rejected".into())
}

fn chain_rules() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);

    let inner_ids = [VarId::aux(50), VarId::aux(51), VarId::aux(52)];
    let outer_ids = [VarId::X, VarId::aux(60)];
    for i in 0..1000 {
        let e = common::random_tree(&mut rng, 5, &inner_ids);
        let images: Vec<(VarId, SymExpr)> = inner_ids
            .iter()
            .map(|&id| (id, common::random_tree(&mut rng, 3, &outer_ids)))
            .collect();
        let f = |id: VarId| {
            images
                .iter()
                .find(|(i, _)| *i == id)
                .map(|(_, t)| t.clone())
                .unwrap_or(SymExpr::leaf(id))
        };
        let theta = common::random_env(&mut rng, &outer_ids, 4);
        let j = *outer_ids.choose(&mut rng).unwrap();
        let (lhs, rhs) = chain_rule_residual(&e, &f, &theta, j, &NatSemiring);
        ensure(lhs == rhs, || {
            format!("chain rule instance {i}: {lhs} ≠ {rhs} for {e}")
        })?;
    }

    let inputs = [VarId::X, VarId::aux(100), VarId::aux(101)];
    let mut per_case = [0usize; 3];
    let mut doubled = 0;
    for i in 0..1000 {
        let case = i % 3;
        let mut scope = inputs.to_vec();
        let mut next = 1;
        let k1_len = rng.gen_range(0..=3);
        let k1 = common::random_bindings(&mut rng, k1_len, &mut scope, &mut next);

        let (x, a, b) = match case {
            0 => {
                let a = *scope.choose(&mut rng).unwrap();
                let b = *scope.choose(&mut rng).unwrap();
                let others: Vec<_> = scope
                    .iter()
                    .copied()
                    .filter(|v| *v != a && *v != b)
                    .collect();
                (*others.choose(&mut rng).unwrap(), a, b)
            }
            1 => {
                let mut pick = scope.clone();
                pick.shuffle(&mut rng);
                let (x, other) = (pick[0], pick[1]);
                if rng.gen_bool(0.5) {
                    (x, x, other)
                } else {
                    (x, other, x)
                }
            }
            _ => {
                let x = *scope.choose(&mut rng).unwrap();
                (x, x, x)
            }
        };
        let u = VarId::aux(next);
        next += 1;
        let binding = Binding::new(u, common::random_op(&mut rng), a, b);
        scope.push(u);

        let k2_len = rng.gen_range(0..=(8 - k1_len - 1).min(4));
        let k2 = common::random_bindings(&mut rng, k2_len, &mut scope, &mut next);
        let y = if k2.is_empty() || rng.gen_ratio(1, 5) {
            u
        } else {
            *k2.defs().choose(&mut rng).unwrap()
        };
        let env = common::random_env(&mut rng, &inputs, 4);
        let (lhs, rhs) = left_end_chain_rule_residual(&k1, binding, &k2, y, x, &env, &NatSemiring)
            .map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || {
            format!(
                "left-end instance {i}: {lhs} ≠ {rhs} (x={x}, binding {u} = {a} {:?} {b})",
                binding.op
            )
        })?;
        per_case[case] += 1;

        if case == 2 && binding.op == Op::Add && k2.is_empty() {
            ensure(lhs == nat(2), || {
                format!("x = a = b gave {lhs}, expected 1+1")
            })?;
            doubled += 1;
        }
    }
    let (x_, a, b) = (VarId::X, VarId::X, VarId::X);
    let (lhs, rhs) = left_end_chain_rule_residual(
        &Context::new(),
        Binding::new(VarId::aux(1), Op::Add, a, b),
        &Context::new(),
        VarId::aux(1),
        x_,
        &tagless_ad::symbolic::Env::single(nat(3), nat(0)),
        &NatSemiring,
    )
    .map_err(|e| e.to_string())?;
    ensure(lhs == nat(2) && rhs == nat(2), || {
        format!("x+x gave {lhs}, {rhs}")
    })?;
    ensure(per_case.iter().all(|&n| n >= 100), || {
        format!("strata {per_case:?}")
    })?;
    ensure_within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "1000 chain rule + 1000 left-end instances exact, strata {per_case:?}, {doubled} random x=a=b sums equal 2, {:.2?}",
        start.elapsed()
    ))
}

fn invariant_suites() -> Outcome {
    let nats: Vec<BigUint> = [0u64, 1, 2, 3, 7].map(nat).to_vec();
    ensure(axioms_hold(&NatSemiring, &nats), || "Nat axioms".into())?;
    let floats = [0.0, 1.0, 2.5, 0.125, 3.0];
    ensure(axioms_hold(&float(), &floats), || "Float axioms".into())?;
    let polys = [
        Poly::zero(),
        Poly::constant(nat(1)),
        Poly::var(VarId::X),
        Poly::univariate(VarId::X, &[1, 2, 1]),
        Poly::var(VarId::aux(1)).plus(&Poly::constant(nat(3))),
    ];
    ensure(axioms_hold(&PolySemiring, &polys), || "Poly axioms".into())?;
    let x = SymExpr::x;
    let trees = [
        SymExpr::Zero,
        SymExpr::One,
        x(),
        SymExpr::add(x(), SymExpr::One),
        SymExpr::mul(x(), x()),
    ];
    ensure(axioms_hold(&SyntaxSemiring, &trees), || {
        "free semiring axioms".into()
    })?;
    let dual_nats: Vec<Dual<BigUint>> = [(0, 0), (1, 0), (2, 1), (3, 5)]
        .map(|(v, d)| Dual::new(nat(v), nat(d)))
        .to_vec();
    ensure(axioms_hold(&dual_ops(NatSemiring), &dual_nats), || {
        "Dual(Nat) axioms".into()
    })?;
    let dual_floats =
        [(0.0, 0.0), (1.0, 0.0), (2.5, 1.0), (0.5, -2.0)].map(|(v, d)| Dual::new(v, d));
    ensure(axioms_hold(&dual_ops(float()), &dual_floats), || {
        "Dual(Float) axioms".into()
    })?;

    let corpus = corpus();
    let mut runs = 0;
    for (name, e) in &corpus {
        let ops = e.operation_count();
        for r in 0..=4u64 {
            let t = tape::run_instrumented(e, &NatSemiring, nat(r), Checks::all());
            ensure(t.is_clean(), || {
                format!("tape on {name} at {r}: {:?}", t.violations)
            })?;
            ensure(t.operations == ops, || {
                format!("tape on {name}: {} entries, {ops} ops", t.operations)
            })?;

            let h = handler::run_instrumented(e, &NatSemiring, nat(r), Checks::all())
                .map_err(|err| err.to_string())?;
            ensure(h.is_clean(), || {
                format!("handler on {name} at {r}: {:?}", h.violations)
            })?;
            ensure(h.operations == ops, || {
                format!("handler on {name}: {} effects, {ops} ops", h.operations)
            })?;
            ensure(
                h.witnesses.len() == ops && h.witnesses.iter().all(OpProtocolWitness::holds),
                || format!("protocol audit on {name} at {r}"),
            )?;

            let escaped = probe_escaping_effects(e, r);
            ensure(escaped == 0, || {
                format!("{escaped} effects escaped diff_handler({name})")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "axioms for Nat, Float, Poly, free, Dual(Nat), Dual(Float); {runs} instrumented runs clean; no escaping effects"
    ))
}

/// Evaluates `diff_handler(e)` under an outer handler that intercepts any
/// payload, and counts what reaches it.
fn probe_escaping_effects(e: &Expression, r: u64) -> usize {
    let seen = Rc::new(Cell::new(0));
    let counter = Rc::clone(&seen);
    let probe: Handler<'_, _, (), BigUint, BigUint> = Handler::catch_all(
        move |_, k| {
            counter.set(counter.get() + 1);
            k.resume(())
        },
        Ok,
    );
    let d = diff_handler(e);
    let _ = handle(move || d.evaluate(&NatSemiring, nat(r)), probe);
    seen.get()
}

fn cross_backend_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    let mut exprs = corpus();
    for i in 0..40 {
        let tree = common::random_x_tree(&mut rng, 6);
        exprs.push((format!("random {i}"), Expression::from_ast(tree).unwrap()));
    }
    let mut compared = 0;
    for (name, e) in &exprs {
        for r in 0..=6u64 {
            let t = tape::diff_tape(e).evaluate(&NatSemiring, nat(r));
            let h = diff_handler(e).evaluate(&NatSemiring, nat(r));
            ensure(t == h, || format!("{name} at {r}: tape {t}, handler {h}"))?;
            let tt = tape::backward_trace(e, &NatSemiring, nat(r));
            let ht = handler::backward_trace(e, &NatSemiring, nat(r)).map_err(|e| e.to_string())?;
            ensure(tt == ht, || format!("{name} at {r}: traces differ"))?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} (expression, point) pairs: identical values and traces"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("cube derivative", cube_derivative),
        ("monomial law", monomial_law),
        ("iterated differentiation", iterated_differentiation),
        ("backward-phase trace", backward_trace),
        ("ask demo", ask_demo_golden),
        ("chain rules", chain_rules),
        ("invariant suites", invariant_suites),
        ("cross-backend exactness", cross_backend_exactness),
    ];
    let failures = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let mut failures = 0;
            for (i, (name, check)) in criteria.iter().enumerate() {
                let outcome = panic::catch_unwind(AssertUnwindSafe(check))
                    .unwrap_or_else(|_| Err("panicked".into()));
                match outcome {
                    Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
                    Err(why) => {
                        failures += 1;
                        println!("criterion {} ({name}): FAIL: {why}", i + 1);
                    }
                }
            }
            failures
        })
        .unwrap()
        .join()
        .unwrap();
    if failures > 0 {
        std::process::exit(1);
    }
}
