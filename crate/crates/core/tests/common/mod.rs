//! Random trees, contexts and environments shared by the integration tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use tagless_ad::symbolic::{Binding, Context, Env, Op};
use tagless_ad::{nat, SymExpr, VarId};

use num_bigint::BigUint;

pub fn random_op(rng: &mut StdRng) -> Op {
    if rng.gen_bool(0.5) {
        Op::Add
    } else {
        Op::Mul
    }
}

/// A tree of depth at most `depth` whose leaves are drawn from `leaves`,
/// `Zero` and `One`.
pub fn random_tree(rng: &mut StdRng, depth: u32, leaves: &[VarId]) -> SymExpr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..6) {
            0 => SymExpr::Zero,
            1 => SymExpr::One,
            _ => SymExpr::leaf(*leaves.choose(rng).unwrap()),
        };
    }
    let a = random_tree(rng, depth - 1, leaves);
    let b = random_tree(rng, depth - 1, leaves);
    SymExpr::node(random_op(rng), a, b)
}

/// A univariate tree over `x`.
pub fn random_x_tree(rng: &mut StdRng, depth: u32) -> SymExpr {
    random_tree(rng, depth, &[VarId::X])
}

/// Appends `n` bindings with fresh ids starting at `aux(*next)`, each reading
/// from `scope`, which grows as bindings are added.
pub fn random_bindings(
    rng: &mut StdRng,
    n: usize,
    scope: &mut Vec<VarId>,
    next: &mut u32,
) -> Context {
    let mut k = Context::new();
    for _ in 0..n {
        let u = VarId::aux(*next);
        *next += 1;
        let a = *scope.choose(rng).unwrap();
        let b = *scope.choose(rng).unwrap();
        k.push(Binding::new(u, random_op(rng), a, b));
        scope.push(u);
    }
    k
}

/// An environment giving each of `ids` a value in `0..=max`, and 0 elsewhere.
pub fn random_env(rng: &mut StdRng, ids: &[VarId], max: u64) -> Env<BigUint> {
    let mut env = Env::new(nat(0));
    for &id in ids {
        env.set(id, nat(rng.gen_range(0..=max)));
    }
    env
}
