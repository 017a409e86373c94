//! Canonizes relations on shape-2 blocks: each is found to be E_T for some
//! projection tree T on a sub-member.

use r1_ramsey::canonize::{canonize_r1n, R1nRelation};
use r1_ramsey::space::{tree_trunc, Block};

fn main() {
    let universe = tree_trunc(6);
    type Feature = fn(&Block) -> u64;
    let relations: [(&str, Feature); 4] = [
        ("everything", |_| 0),
        ("same stem", |u| u.index() as u64),
        ("same smallest leaf", |u| (u.index() * 10 + u.leaves()[0]) as u64),
        ("smallest leaf only", |u| u.leaves()[0] as u64),
    ];
    for (name, f) in relations {
        let rel = R1nRelation::from_fn(2, universe.clone(), f);
        match canonize_r1n(&rel, 3).unwrap().found() {
            Some(cert) => println!("{name:>20}: T = {} on C = {}", cert.tree, cert.c),
            None => println!("{name:>20}: exhausted"),
        }
    }
}
