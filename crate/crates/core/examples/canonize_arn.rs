//! Recovers a planted canonical relation on AR_2 and tries a random one.

use std::collections::HashMap;

use r1_ramsey::canon::TreeSeq;
use r1_ramsey::canonize::{canonize_arn, verify_arn, ARnRelation, Canonized};
use r1_ramsey::space::{tree_trunc, BlockSeq};

fn main() {
    let planted: TreeSeq = "L{0};S".parse().unwrap();
    let mut ids = HashMap::new();
    let rel = ARnRelation::from_fn(2, tree_trunc(5), |a| {
        let next = ids.len() as u64;
        *ids.entry(planted.key(a).unwrap()).or_insert(next)
    });
    println!("planted {planted}: {} classes", ids.len());
    if let Canonized::Found(cert) = canonize_arn(&rel, 2).unwrap() {
        println!("found {} on D = {} ({} pairs)", cert.seq, cert.d, cert.verified_pairs);
        println!("independent check: {:?}", verify_arn(&rel, &cert));
    }

    // A relation that is canonical only on a thin part of the universe.
    let messy = ARnRelation::from_fn(2, tree_trunc(5), |a| (a.blocks()[1].index() * 7 + a.blocks()[0].leaves()[0]) as u64 % 3);
    match canonize_arn(&messy, 3).unwrap() {
        Canonized::Found(cert) => println!("messy relation: {} on {}", cert.seq, cert.d),
        Canonized::Exhausted => println!("messy relation: exhausted"),
    }
}
