//! Counts canonical equivalence relations on AR_n and checks that the small
//! ones really are different relations.

use r1_ramsey::canon::{all_trees, census, census_distinctness};

fn main() {
    for n in 1..=4 {
        let trees: Vec<String> = all_trees(n).iter().map(ToString::to_string).collect();
        println!("shape {n}: {} projection trees, e.g. {}", trees.len(), trees[..trees.len().min(4)].join(" "));
    }
    for n in 1..=6 {
        println!("census({n}) = {}", census(n));
    }
    for n in 1..=3 {
        let check = census_distinctness(n, n + 2);
        println!(
            "n = {n}: {} sequences, {} distinct relations over {} approximations",
            check.sequences, check.distinct_relations, check.approximations
        );
    }
}
