//! Reify expressions into trees, take syntactic derivatives and decide
//! equality in the free semiring by polynomial normal form.

use tagless_ad::symbolic::{derivative, equiv_free, to_poly};
use tagless_ad::{cube, diff_handler, diff_tape, monomial};

fn main() {
    let tree = cube().reify();
    println!("cube        = {tree}");
    println!("normal form = {}", to_poly(&tree));

    let oracle = derivative(&tree).unwrap();
    println!("d/dx        = {oracle}");
    println!("            = {}", to_poly(&oracle));

    let by_tape = diff_tape(&cube()).reify();
    let by_handler = diff_handler(&cube()).reify();
    println!("tape agrees:    {}", equiv_free(&by_tape, &oracle));
    println!("handler agrees: {}", equiv_free(&by_handler, &oracle));

    let m = monomial(5).reify();
    println!(
        "x^5 = {m}: {} internal nodes, {} distinct",
        m.node_count(),
        m.dag_size()
    );
}
