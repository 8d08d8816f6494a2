//! The sequential view: a context of `let` bindings, filling, environment
//! extension, and the left-end chain rule the reverse-mode proof rests on.

use tagless_ad::symbolic::{
    extend_env, fill, left_end_chain_rule_residual, Binding, Context, Env, Op,
};
use tagless_ad::{nat, NatSemiring, VarId};

fn main() {
    let u = VarId::aux;
    // let u1 = x×I; let u2 = x×x; let u3 = u2×u1; let u4 = u2×u2
    let k = Context::from(vec![
        Binding::new(u(1), Op::Mul, VarId::X, VarId::I),
        Binding::new(u(2), Op::Mul, VarId::X, VarId::X),
        Binding::new(u(3), Op::Mul, u(2), u(1)),
        Binding::new(u(4), Op::Mul, u(2), u(2)),
    ]);
    println!("K<u3> = {}", fill(&k, u(3)));

    let env = Env::new(nat(0))
        .with(VarId::X, nat(2))
        .with(VarId::I, nat(1));
    let ext = extend_env(&env, &k, &NatSemiring);
    for id in [u(1), u(2), u(3), u(4)] {
        println!("env<K>({id}) = {}", ext.get(id));
    }

    // Split K after u1: the binding u2 = x×x sits at the left end of the rest.
    let (k1, rest) = k.split_at(1);
    let (b, k2) = rest.split_at(1);
    let (lhs, rhs) = left_end_chain_rule_residual(
        &k1,
        b.bindings()[0],
        &k2,
        u(3),
        VarId::X,
        &env,
        &NatSemiring,
    )
    .unwrap();
    println!("left-end chain rule for d u3/dx: {lhs} = {rhs}");
}
