//! Blocks, approximations and sub-blocks of the first few levels of the tree.

use r1_ramsey::space::{depth_of, enumerate_approx, enumerate_subtrees, le_fin, r_n, tree_trunc, Approximation};

fn main() {
    let universe = tree_trunc(4);
    println!("universe: {universe}");

    let approx = enumerate_approx(&universe, 2);
    println!("AR_2 inside the first 4 blocks: {} approximations", approx.len());
    for a in approx.iter().take(5) {
        println!("  {a}");
    }

    let shape_one = enumerate_subtrees(&universe, 1, &Approximation::empty());
    println!("shape-1 blocks: {}", shape_one.iter().map(ToString::to_string).collect::<Vec<_>>().join("  "));

    let a: Approximation = "1:0|3:1,2".parse().unwrap();
    let r3 = r_n(&universe, 3).unwrap();
    println!("{a} ≤_fin {r3}: {}", le_fin(&a, &r3));
    println!("depth of {a} in the universe: {:?}", depth_of(&universe, &a));
}
