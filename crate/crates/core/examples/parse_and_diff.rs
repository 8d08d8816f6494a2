//! Parse concrete syntax, then differentiate the resulting expression.

use tagless_ad::parse::parse;
use tagless_ad::symbolic::derivative;
use tagless_ad::{Backend, Expression, FloatSemiring};

fn main() {
    let source = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "x^4 + 3*x + 2".into());
    let tree = match parse(&source) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("parsed:     {tree}");
    println!("derivative: {}", derivative(&tree).unwrap());
    let e = Expression::from_ast(tree).unwrap();
    let f = FloatSemiring::default();
    for at in [0.0, 1.0, 2.5] {
        println!("f'({at}) = {}", Backend::Tape.diff(&e).evaluate(&f, at));
    }
}
