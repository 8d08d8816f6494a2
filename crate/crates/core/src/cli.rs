//! The `tagless-ad` command line.
//!
//! ```text
//! tagless-ad --backend handler --at 4 "(x+1)*(x+1)*(x+1)"     # 75
//! tagless-ad --backend symbolic --emit-symbolic "x*x"        # ((1*x)+(x*1))
//! tagless-ad --check --at 3 "x^5 + 2*x"
//! tagless-ad --demo-ask
//! ```
//!
//! Exit status: 0 on success, 1 for malformed input (bad expression or
//! flags), 2 when `--check` finds a disagreement, 3 when an internal
//! contract is violated (an effect escapes, a continuation is resumed twice,
//! a ghost invariant fails).

use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};

use clap::{Parser, ValueEnum};
use num_bigint::BigUint;

use crate::effects::{ask_demo, EffectError};
use crate::expr::Expression;
use crate::parse::parse;
use crate::semiring::{FloatSemiring, NatSemiring, Semiring};
use crate::symbolic::{derivative, equiv_free, eval_env, Env, SymExpr};
use crate::vertex::{Checks, Report, TraceSnapshot};
use crate::{handler, tape, Backend};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Forward,
    Tape,
    Handler,
    Symbolic,
}

impl BackendArg {
    fn ad(self) -> Option<Backend> {
        match self {
            BackendArg::Forward => Some(Backend::Forward),
            BackendArg::Tape => Some(Backend::Tape),
            BackendArg::Handler => Some(Backend::Handler),
            BackendArg::Symbolic => None,
        }
    }
}

/// Differentiate an expression in `x` and evaluate the result.
#[derive(Debug, Clone, Parser)]
#[command(name = "tagless-ad", version)]
pub struct Args {
    /// Differentiation backend.
    #[arg(long, value_enum, default_value_t = BackendArg::Handler)]
    pub backend: BackendArg,

    /// Point at which to evaluate the derivative.
    #[arg(long, allow_negative_numbers = true)]
    pub at: Option<f64>,

    /// How many times to differentiate.
    #[arg(long, default_value_t = 1)]
    pub order: u32,

    /// Print the derivative as an expression instead of (or before) a value.
    #[arg(long)]
    pub emit_symbolic: bool,

    /// Cross-check every backend against every other and the symbolic oracle.
    #[arg(long)]
    pub check: bool,

    /// Print the `d` fields after each step of the last backward phase.
    #[arg(long)]
    pub trace: bool,

    /// Run the `ask` effect-handler demo and exit.
    #[arg(long)]
    pub demo_ask: bool,

    /// Expression, e.g. "(x+1)*(x+1)*(x+1)" or "x^3 + 2*x".
    pub source: Option<String>,
}

/// Parses `argv` and runs the command. Help and version requests print to
/// `out` and succeed; malformed flags exit with [`EXIT_INPUT`].
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args, out, err),
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            EXIT_OK
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            EXIT_INPUT
        }
    }
}

/// Runs one request. Panics raised by contract violations are caught and
/// reported with [`EXIT_CONTRACT`].
pub fn run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| execute(args, out)));
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(Failure::Input(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Ok(Err(Failure::Contract(msg))) => {
            let _ = writeln!(err, "contract violation: {msg}");
            EXIT_CONTRACT
        }
        Ok(Err(Failure::Io(e))) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(payload) => {
            let msg = if let Some(e) = payload.downcast_ref::<EffectError>() {
                e.to_string()
            } else if let Some(s) = payload.downcast_ref::<String>() {
                s.clone()
            } else if let Some(s) = payload.downcast_ref::<&str>() {
                s.to_string()
            } else {
                "internal panic".to_string()
            };
            let _ = writeln!(err, "contract violation: {msg}");
            EXIT_CONTRACT
        }
    }
}

enum Failure {
    Input(String),
    Contract(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn execute(args: &Args, out: &mut dyn Write) -> Result<i32, Failure> {
    if args.demo_ask {
        for line in ask_demo() {
            writeln!(out, "{line}")?;
        }
        return Ok(EXIT_OK);
    }

    let source = args
        .source
        .as_deref()
        .ok_or_else(|| Failure::Input("missing expression".into()))?;
    let tree = parse(source).map_err(|e| Failure::Input(e.to_string()))?;
    let e = Expression::from_ast(tree.clone()).expect("parsed trees only mention x");

    if args.emit_symbolic {
        let rendered = match args.backend.ad() {
            None => symbolic_derivative(&tree, args.order),
            Some(b) => b.diff_n(&e, args.order).reify(),
        };
        writeln!(out, "{rendered}")?;
    }

    let needs_point = args.trace || args.check || !args.emit_symbolic;
    let at = match (args.at, needs_point) {
        (Some(at), _) => at,
        (None, false) => return Ok(EXIT_OK),
        (None, true) => return Err(Failure::Input("--at is required".into())),
    };
    if !at.is_finite() {
        return Err(Failure::Input(format!("--at must be finite, got {at}")));
    }

    let mut code = EXIT_OK;
    if args.trace {
        trace(args, &e, at, out)?;
    }
    if args.check {
        code = check(&tree, &e, args.order, at, out)?;
    }
    if !args.trace && !args.check {
        let f = FloatSemiring::default();
        let value = match args.backend.ad() {
            None => evaluate_tree(&symbolic_derivative(&tree, args.order), &f, at),
            Some(b) => b.diff_n(&e, args.order).evaluate(&f, at),
        };
        writeln!(out, "{value}")?;
    }
    Ok(code)
}

/// `at` as a natural number, when it is one.
fn as_nat(at: f64) -> Option<BigUint> {
    (at >= 0.0 && at.fract() == 0.0 && at < 9_007_199_254_740_992.0)
        .then(|| BigUint::from(at as u64))
}

fn symbolic_derivative(tree: &SymExpr, order: u32) -> SymExpr {
    (0..order).fold(tree.clone(), |t, _| {
        derivative(&t).expect("derivatives of trees over x only mention x")
    })
}

fn evaluate_tree<S: Semiring>(tree: &SymExpr, ops: &S, at: S::Elem) -> S::Elem {
    eval_env(tree, ops, &Env::single(at.clone(), at))
}

fn trace(args: &Args, e: &Expression, at: f64, out: &mut dyn Write) -> Result<(), Failure> {
    if args.order == 0 {
        return Err(Failure::Input("--trace needs --order of at least 1".into()));
    }
    let backend = args
        .backend
        .ad()
        .filter(|b| *b != Backend::Forward)
        .ok_or_else(|| Failure::Input("--trace needs the tape or handler backend".into()))?;
    // The last backward phase differentiates the (order - 1)-th derivative.
    let inner = backend.diff_n(e, args.order - 1);
    match as_nat(at) {
        Some(n) => print_trace(&traced(backend, &inner, &NatSemiring, n)?, out),
        None => print_trace(
            &traced(backend, &inner, &FloatSemiring::default(), at)?,
            out,
        ),
    }
}

fn traced<S: Semiring>(
    backend: Backend,
    e: &Expression,
    ops: &S,
    at: S::Elem,
) -> Result<Vec<TraceSnapshot<S::Elem>>, Failure>
where
    S::Elem: 'static,
{
    match backend {
        Backend::Tape => Ok(tape::backward_trace(e, ops, at)),
        _ => handler::backward_trace(e, ops, at).map_err(|e| Failure::Contract(e.to_string())),
    }
}

fn print_trace<N: std::fmt::Display>(
    trace: &[TraceSnapshot<N>],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    for (step, snapshot) in trace.iter().enumerate() {
        writeln!(out, "{step}: {snapshot}")?;
    }
    Ok(())
}

fn check(
    tree: &SymExpr,
    e: &Expression,
    order: u32,
    at: f64,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let oracle = symbolic_derivative(tree, order);
    let mut failed = false;

    failed |= compare_values(
        out,
        "float",
        &FloatSemiring::default(),
        at,
        e,
        &oracle,
        order,
    )?;
    if let Some(n) = as_nat(at) {
        failed |= compare_values(out, "nat", &NatSemiring, n, e, &oracle, order)?;
    }

    for b in Backend::ALL {
        let ok = equiv_free(&b.diff_n(e, order).reify(), &oracle);
        report_line(out, ok, &format!("free {} ≡ symbolic", b.name()))?;
        failed |= !ok;
    }

    if order > 0 {
        for b in [Backend::Tape, Backend::Handler] {
            let inner = b.diff_n(e, order - 1);
            let violations = match as_nat(at) {
                Some(n) => instrumented(b, &inner, &NatSemiring, n)?,
                None => instrumented(b, &inner, &FloatSemiring::default(), at)?,
            };
            if !violations.is_empty() {
                return Err(Failure::Contract(violations.join("; ")));
            }
            writeln!(out, "PASS invariants {}", b.name())?;
        }
    }

    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn compare_values<S>(
    out: &mut dyn Write,
    label: &str,
    ops: &S,
    at: S::Elem,
    e: &Expression,
    oracle: &SymExpr,
    order: u32,
) -> Result<bool, Failure>
where
    S: Semiring,
    S::Elem: std::fmt::Display + 'static,
{
    let mut values: Vec<(&str, S::Elem)> = Backend::ALL
        .iter()
        .map(|b| (b.name(), b.diff_n(e, order).evaluate(ops, at.clone())))
        .collect();
    values.push(("symbolic", evaluate_tree(oracle, ops, at)));

    let mut failed = false;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let (a, va) = &values[i];
            let (b, vb) = &values[j];
            let ok = ops.equiv(va, vb);
            report_line(
                out,
                ok,
                &format!(
                    "{label} {a} vs {b}: {va} {} {vb}",
                    if ok { "=" } else { "≠" }
                ),
            )?;
            failed |= !ok;
        }
    }
    Ok(failed)
}

fn instrumented<S: Semiring>(
    backend: Backend,
    e: &Expression,
    ops: &S,
    at: S::Elem,
) -> Result<Vec<String>, Failure>
where
    S::Elem: 'static,
{
    let report: Report<S::Elem> = match backend {
        Backend::Tape => tape::run_instrumented(e, ops, at, Checks::all()),
        _ => handler::run_instrumented(e, ops, at, Checks::all())
            .map_err(|e| Failure::Contract(e.to_string()))?,
    };
    let mut problems: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    problems.extend(
        report
            .witnesses
            .iter()
            .filter(|w| !w.holds())
            .map(|w| format!("protocol broken at {}", w.reply_vertex)),
    );
    Ok(problems)
}

fn report_line(out: &mut dyn Write, ok: bool, what: &str) -> io::Result<()> {
    writeln!(out, "{} {what}", if ok { "PASS" } else { "FAIL" })
}
