//! The classical baseline on [N]^k: a monochromatic set and an Erdős–Rado
//! canonization with its certificate.

use r1_ramsey::ellentuck::{er_canonize, finite_ramsey, verify_er, RelationTable};

fn main() {
    let parity = RelationTable::from_fn(2, 5, |x| (x.elems()[0] + x.elems()[1]) as u64 % 2);
    println!("parity coloring on [5]^2: {:?}", finite_ramsey(&parity, 3).unwrap());

    // Pairs are related when they share their smallest element.
    let first = RelationTable::from_fn(2, 6, |x| x.elems()[0] as u64);
    let cert = er_canonize(&first, 4).unwrap().found().cloned().expect("canonical everywhere");
    println!("x_0 equality on [6]^2: M = {:?}, I = {:?}", cert.m, cert.index_set.indices());
    println!("re-verified pairs: {:?}", verify_er(&first, &cert.m, &cert.index_set));
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());
}
