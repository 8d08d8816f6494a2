//! Define-by-run automatic differentiation over tagless-final expressions.
//!
//! An [`Expression`] is a computation that is polymorphic in the semiring it
//! is evaluated in. Differentiation maps expressions to expressions, and three
//! interchangeable backends implement it:
//!
//! - [`diff_forward`]: dual numbers,
//! - [`diff_tape`]: reverse mode with an explicit tape,
//! - [`diff_handler`]: reverse mode where effect handlers replace the tape.
//!
//! The [`symbolic`] module is the oracle all three are checked against:
//! tree expressions, syntactic derivatives, free-semiring equivalence, and
//! the sequential (context) view with both chain rules.
//!
//! ```
//! use tagless_ad::{cube, diff_forward, diff_handler, diff_tape, FloatSemiring};
//!
//! let f = FloatSemiring::default();
//! for diff in [diff_forward, diff_tape, diff_handler] {
//!     assert_eq!(diff(&cube()).evaluate(&f, 4.0), 75.0);
//! }
//! ```

pub mod cli;
pub mod effects;
pub mod expr;
pub mod forward;
pub mod handler;
pub mod parse;
pub mod semiring;
pub mod symbolic;
pub mod tape;
pub mod vertex;

pub use expr::{cube, monomial, Dict, Expression, Polymorphic, Value};
pub use forward::{diff_forward, dual_ops, Dual, DualSemiring};
pub use handler::diff_handler;
pub use semiring::{nat, FloatSemiring, NatSemiring, PolySemiring, Semiring};
pub use symbolic::{SymExpr, SyntaxSemiring, VarId};
pub use tape::diff_tape;

/// The differentiation backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Forward,
    Tape,
    Handler,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Forward, Backend::Tape, Backend::Handler];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Forward => "forward",
            Backend::Tape => "tape",
            Backend::Handler => "handler",
        }
    }

    pub fn diff(self, e: &Expression) -> Expression {
        match self {
            Backend::Forward => diff_forward(e),
            Backend::Tape => diff_tape(e),
            Backend::Handler => diff_handler(e),
        }
    }

    /// Applies [`Backend::diff`] `order` times.
    pub fn diff_n(self, e: &Expression, order: u32) -> Expression {
        (0..order).fold(e.clone(), |acc, _| self.diff(&acc))
    }
}
