//! The Schreier-like front on five blocks: Nash-Williams, represented by its
//! last block, and canonized by a map that keeps the first block.

use std::collections::HashMap;

use r1_ramsey::fronts::{
    canonize_front, check_inner_ns_sperner, is_nash_williams, phi_map, represents, schreier_front, star_property,
    FrontRelation, PhiMap,
};
use r1_ramsey::space::{tree_trunc, BlockSeq, Node};

fn main() {
    let f = schreier_front(&tree_trunc(5));
    println!("{} elements, Nash-Williams: {}", f.len(), is_nash_williams(&f).is_ok());
    for t in f.elements().iter().take(4) {
        println!("  {t}");
    }

    let mut classes = HashMap::new();
    let rel = FrontRelation::from_fn(&f, |t| {
        let next = classes.len() as u64;
        *classes.entry((t.len(), t.last().cloned())).or_insert(next)
    });
    let last_block: PhiMap = f
        .elements()
        .iter()
        .map(|t| {
            let mut image = t.last().unwrap().nodes();
            image.insert(Node::Root);
            (t.clone(), image)
        })
        .collect();
    println!("last block represents the relation: {:?}", represents(&f, &last_block, &rel).unwrap().is_ok());
    println!("last block fails the star property at {:?}", star_property(&f, &last_block).map(|t| t.to_string()));

    let cert = canonize_front(&f, &rel, 5).unwrap().found().cloned().expect("canonizable");
    let phi = phi_map(&f, &cert.assign).unwrap();
    let keeps_first = f.elements().iter().all(|t| t.blocks()[0].nodes().is_subset(&phi[t]));
    println!("canonical φ keeps t(0) everywhere: {keeps_first}");
    println!("shape report: {:?}", check_inner_ns_sperner(&f, &phi).unwrap().is_canonical_shape());
}
