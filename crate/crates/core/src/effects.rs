//! A small deep-effect-handler runtime with one-shot continuations.
//!
//! [`handle`] runs a computation on its own stack (a coroutine). When the
//! computation calls [`perform`], it is suspended and the innermost enclosing
//! handler's effect branch receives the payload together with a
//! [`Continuation`]. Resuming the continuation runs the rest of the
//! computation under the same handler (deep semantics) and returns whatever
//! that handler pipeline eventually produces, so handler code placed after a
//! `resume` runs once the computation has finished, most recent first.
//!
//! Effects are nameless: a `perform` always reaches the innermost handler.
//! A handler that does not understand the payload type answers with
//! [`EffectError::Unhandled`].
//!
//! Handler branches run on the stack that called [`handle`], outside the
//! handled computation, so effects they perform go to the enclosing handler.

use std::any::Any;
use std::cell::{Cell, RefCell};
use std::rc::Rc;

use corosensei::stack::DefaultStack;
use corosensei::{Coroutine, CoroutineResult, Yielder};
use thiserror::Error;

/// Stack reserved for each handled computation. Pages are committed lazily.
const FIBER_STACK_BYTES: usize = 16 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EffectError {
    #[error("unhandled effect: no enclosing handler accepts this payload")]
    Unhandled,
    #[error("one-shot violation: continuation resumed more than once")]
    OneShotViolation,
    #[error("handler replied with a value of the wrong type")]
    ReplyType,
    #[error("could not allocate a stack for the handled computation: {0}")]
    Stack(String),
}

type Payload = Box<dyn Any>;
type Reply = Result<Box<dyn Any>, EffectError>;
type FiberYielder = Yielder<Reply, Payload>;
type Fiber<T> = Coroutine<Reply, Payload, T, DefaultStack>;

thread_local! {
    /// Yielders of the handled computations currently running on this
    /// thread, innermost last.
    static ACTIVE: RefCell<Vec<*const FiberYielder>> = const { RefCell::new(Vec::new()) };
}

fn push_active(y: *const FiberYielder) {
    ACTIVE.with(|a| a.borrow_mut().push(y));
}

fn pop_active(y: *const FiberYielder) {
    ACTIVE.with(|a| {
        let mut a = a.borrow_mut();
        if a.last() == Some(&y) {
            a.pop();
        }
    });
}

/// Pops the computation's entry if it unwinds or returns while running.
struct ActiveGuard(*const FiberYielder);

impl Drop for ActiveGuard {
    fn drop(&mut self) {
        pop_active(self.0);
    }
}

/// Sends `payload` to the innermost handler and waits for its reply.
pub fn perform<P: 'static, Q: 'static>(payload: P) -> Result<Q, EffectError> {
    let top = ACTIVE
        .with(|a| a.borrow().last().copied())
        .ok_or(EffectError::Unhandled)?;
    pop_active(top);
    // SAFETY: `top` was pushed by a computation that is running right now on
    // this thread (we are inside it), so its yielder is alive.
    let reply = unsafe { &*top }.suspend(Box::new(payload));
    push_active(top);
    reply?
        .downcast::<Q>()
        .map(|q| *q)
        .map_err(|_| EffectError::ReplyType)
}

type EffectBranch<'h, P, Q, T, R> =
    dyn Fn(P, Continuation<'h, P, Q, T, R>) -> Result<R, EffectError> + 'h;
type ReturnBranch<'h, T, R> = dyn Fn(T) -> Result<R, EffectError> + 'h;

/// Counters kept by a handler over one [`handle`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HandleStats {
    pub effects: usize,
    pub resumptions: usize,
    pub returns: usize,
}

/// A deep handler: an effect branch for payloads of type `P` (answered with
/// `Q`) and a return branch for the computation's result `T`.
pub struct Handler<'h, P, Q, T, R> {
    decode: fn(Payload) -> Result<P, Payload>,
    effect: Box<EffectBranch<'h, P, Q, T, R>>,
    ret: Box<ReturnBranch<'h, T, R>>,
    effects: Cell<usize>,
    resumptions: Cell<usize>,
    returns: Cell<usize>,
}

impl<'h, P: 'static, Q: 'static, T: 'static, R> Handler<'h, P, Q, T, R> {
    pub fn new(
        effect: impl Fn(P, Continuation<'h, P, Q, T, R>) -> Result<R, EffectError> + 'h,
        ret: impl Fn(T) -> Result<R, EffectError> + 'h,
    ) -> Self {
        Handler {
            decode: |p| p.downcast::<P>().map(|p| *p),
            effect: Box::new(effect),
            ret: Box::new(ret),
            effects: Cell::new(0),
            resumptions: Cell::new(0),
            returns: Cell::new(0),
        }
    }

    fn stats(&self) -> HandleStats {
        HandleStats {
            effects: self.effects.get(),
            resumptions: self.resumptions.get(),
            returns: self.returns.get(),
        }
    }
}

impl<'h, Q: 'static, T: 'static, R> Handler<'h, Box<dyn Any>, Q, T, R> {
    /// A handler whose effect branch sees every payload, whatever its type.
    pub fn catch_all(
        effect: impl Fn(Box<dyn Any>, Continuation<'h, Box<dyn Any>, Q, T, R>) -> Result<R, EffectError>
            + 'h,
        ret: impl Fn(T) -> Result<R, EffectError> + 'h,
    ) -> Self {
        Handler {
            decode: Ok,
            effect: Box::new(effect),
            ret: Box::new(ret),
            effects: Cell::new(0),
            resumptions: Cell::new(0),
            returns: Cell::new(0),
        }
    }
}

/// The suspended rest of a handled computation. May be resumed at most once.
pub struct Continuation<'h, P, Q, T, R> {
    fiber: RefCell<Option<Fiber<T>>>,
    handler: Rc<Handler<'h, P, Q, T, R>>,
}

impl<'h, P: 'static, Q: 'static, T: 'static, R> Continuation<'h, P, Q, T, R> {
    /// Continues the computation as if `perform` had returned `reply`, under
    /// a fresh activation of the same handler.
    pub fn resume(&self, reply: Q) -> Result<R, EffectError> {
        let fiber = self
            .fiber
            .borrow_mut()
            .take()
            .ok_or(EffectError::OneShotViolation)?;
        let h = &self.handler;
        h.resumptions.set(h.resumptions.get() + 1);
        drive(fiber, Ok(Box::new(reply)), Rc::clone(h))
    }

    pub fn is_consumed(&self) -> bool {
        self.fiber.borrow().is_none()
    }
}

fn drive<'h, P: 'static, Q: 'static, T: 'static, R>(
    mut fiber: Fiber<T>,
    mut input: Reply,
    handler: Rc<Handler<'h, P, Q, T, R>>,
) -> Result<R, EffectError> {
    loop {
        match fiber.resume(input) {
            CoroutineResult::Yield(payload) => match (handler.decode)(payload) {
                Ok(p) => {
                    handler.effects.set(handler.effects.get() + 1);
                    let k = Continuation {
                        fiber: RefCell::new(Some(fiber)),
                        handler: Rc::clone(&handler),
                    };
                    return (handler.effect)(p, k);
                }
                Err(_) => input = Err(EffectError::Unhandled),
            },
            CoroutineResult::Return(t) => {
                handler.returns.set(handler.returns.get() + 1);
                return (handler.ret)(t);
            }
        }
    }
}

/// Runs `computation` under `handler`.
pub fn handle<'h, P, Q, T, R>(
    computation: impl FnOnce() -> T + 'static,
    handler: Handler<'h, P, Q, T, R>,
) -> Result<R, EffectError>
where
    P: 'static,
    Q: 'static,
    T: 'static,
{
    handle_with_stats(computation, handler).0
}

/// Like [`handle`], also reporting how many effects, resumptions and returns
/// the handler saw.
pub fn handle_with_stats<'h, P, Q, T, R>(
    computation: impl FnOnce() -> T + 'static,
    handler: Handler<'h, P, Q, T, R>,
) -> (Result<R, EffectError>, HandleStats)
where
    P: 'static,
    Q: 'static,
    T: 'static,
{
    let handler = Rc::new(handler);
    let stack = match DefaultStack::new(FIBER_STACK_BYTES) {
        Ok(s) => s,
        Err(e) => return (Err(EffectError::Stack(e.to_string())), handler.stats()),
    };
    let fiber: Fiber<T> = Coroutine::with_stack(stack, move |yielder: &FiberYielder, _start| {
        let me = yielder as *const FiberYielder;
        push_active(me);
        let _guard = ActiveGuard(me);
        computation()
    });
    let result = drive(fiber, Ok(Box::new(())), Rc::clone(&handler));
    (result, handler.stats())
}

/// The payload of the `Ask` demo effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ask(pub i64);

/// `perform (Ask x)`.
pub fn ask(x: i64) -> Result<i64, EffectError> {
    perform(Ask(x))
}

/// Runs the client `ask 2 + ask 7` under a handler that answers `x + 1`,
/// logging before and after each resumption. The right operand is asked
/// first. Returns the five log lines in order.
pub fn ask_demo() -> Vec<String> {
    let log = RefCell::new(Vec::new());
    let handler = Handler::new(
        |Ask(x), k| {
            log.borrow_mut().push(format!("I am queried at {x}..."));
            k.resume(x + 1)?;
            log.borrow_mut()
                .push(format!("Earlier, I have been queried at {x}..."));
            Ok(())
        },
        |result: i64| {
            log.borrow_mut()
                .push(format!("The client has finished with result {result}"));
            Ok(())
        },
    );
    let client = || {
        let right = ask(7).expect("ask demo runs under its handler");
        let left = ask(2).expect("ask demo runs under its handler");
        left + right
    };
    handle(client, handler).expect("ask demo handler never fails");
    log.into_inner()
}
