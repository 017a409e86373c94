#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use r1_ramsey::space::{Approximation, Block, BlockSeq, MemberTrunc};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_subset(rng: &mut ChaCha8Rng, from: &[usize], size: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = sample(rng, from.len(), size).into_iter().map(|i| from[i]).collect();
    picked.sort_unstable();
    picked
}

/// A random member of length `len` using stems below `max_stem`.
pub fn random_approx(rng: &mut ChaCha8Rng, len: usize, max_stem: usize) -> Approximation {
    let stems: Vec<usize> = (0..max_stem).collect();
    let blocks = random_subset(rng, &stems, len)
        .into_iter()
        .enumerate()
        .map(|(j, m)| {
            let leaves: Vec<usize> = (0..=m).collect();
            Block::new(m, random_subset(rng, &leaves, j + 1)).unwrap()
        })
        .collect();
    Approximation::new(blocks).unwrap()
}

/// A random element of `AR_len` lying inside `b`.
pub fn random_sub_approx(rng: &mut ChaCha8Rng, b: &impl BlockSeq, len: usize) -> Approximation {
    let positions: Vec<usize> = (0..b.len()).collect();
    let blocks = random_subset(rng, &positions, len)
        .into_iter()
        .enumerate()
        .map(|(j, p)| {
            let u = &b.blocks()[p];
            Block::new(u.index(), random_subset(rng, u.leaves(), j + 1)).unwrap()
        })
        .collect();
    Approximation::new(blocks).unwrap()
}

pub fn random_member(rng: &mut ChaCha8Rng, depth: usize, max_stem: usize) -> MemberTrunc {
    random_approx(rng, depth, max_stem).to_member()
}

/// Dense labels by first occurrence of a key.
pub fn labeler<K: Hash + Eq>() -> impl FnMut(K) -> u64 {
    let mut ids: HashMap<K, u64> = HashMap::new();
    move |key| {
        let next = ids.len() as u64;
        *ids.entry(key).or_insert(next)
    }
}

/// Equivalence classes of `items` under `label`, as a sorted list of sorted
/// index lists; two labelings induce the same relation iff these agree.
pub fn partition<T>(items: &[T], mut label: impl FnMut(&T) -> u64) -> Vec<Vec<usize>> {
    let mut classes: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, x) in items.iter().enumerate() {
        classes.entry(label(x)).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}

pub fn rng_below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.gen_range(0..n)
}
