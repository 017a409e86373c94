//! Builtin relation and coloring features, so inputs can be named instead of
//! shipped as label tables.
//!
//! A feature maps an item to a small vector of numbers; relations intern
//! those vectors into labels by first occurrence, colorings take the last
//! number mod 2.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::ellentuck::{KSet, Label};
use crate::error::{Error, Result};
use crate::space::{Approximation, Block, BlockSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpec {
    Const,
    StemParity(usize),
    MinLeaf(usize),
    MaxLeaf(usize),
    LeafSumParity(usize),
    Length,
    LastBlock,
    /// `classes` defaults to 3 for relations; colorings always reduce mod 2.
    SeededRandom { seed: u64, classes: u64 },
}

pub const DEFAULT_RANDOM_CLASSES: u64 = 3;

impl FeatureSpec {
    /// Parses a feature name; a bare `seeded_random` takes its seed from
    /// `seed`, which must then be given.
    pub fn parse_with_seed(text: &str, seed: Option<u64>) -> Result<Self> {
        if text.trim() == "seeded_random" {
            let seed = seed.ok_or_else(|| Error::Usage("seeded_random without a seed needs --seed".into()))?;
            return Ok(FeatureSpec::SeededRandom { seed, classes: DEFAULT_RANDOM_CLASSES });
        }
        text.parse()
    }

    fn component<'a, T>(&self, items: &'a [T], i: usize) -> Result<&'a T> {
        items.get(i).ok_or_else(|| Error::Arity { expected: i + 1, found: items.len() })
    }

    fn hashed(&self, seed: u64, classes: u64, text: &str) -> u64 {
        let digest = Sha256::new().chain_update(seed.to_le_bytes()).chain_update(text.as_bytes()).finalize();
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(head) % classes.max(1)
    }

    fn block_value(u: &Block, which: &FeatureSpec) -> Vec<u64> {
        let m = u.index() as u64;
        let leaves = u.leaves();
        match which {
            FeatureSpec::StemParity(_) => vec![m % 2],
            FeatureSpec::MinLeaf(_) => vec![m, leaves[0] as u64],
            FeatureSpec::MaxLeaf(_) => vec![m, leaves[leaves.len() - 1] as u64],
            FeatureSpec::LeafSumParity(_) => vec![leaves.iter().sum::<usize>() as u64 % 2],
            _ => unreachable!("component features only"),
        }
    }

    pub fn on_approximation(&self, a: &Approximation) -> Result<Vec<u64>> {
        Ok(match *self {
            FeatureSpec::Const => vec![0],
            FeatureSpec::StemParity(i)
            | FeatureSpec::MinLeaf(i)
            | FeatureSpec::MaxLeaf(i)
            | FeatureSpec::LeafSumParity(i) => Self::block_value(self.component(a.blocks(), i)?, self),
            FeatureSpec::Length => vec![a.len() as u64],
            FeatureSpec::LastBlock => match a.last() {
                Some(u) => std::iter::once(u.index() as u64).chain(u.leaves().iter().map(|&l| l as u64)).collect(),
                None => Vec::new(),
            },
            FeatureSpec::SeededRandom { seed, classes } => vec![self.hashed(seed, classes, &a.to_string())],
        })
    }

    /// A single block is treated as an approximation with one component.
    pub fn on_block(&self, u: &Block) -> Result<Vec<u64>> {
        Ok(match *self {
            FeatureSpec::Const => vec![0],
            FeatureSpec::StemParity(i)
            | FeatureSpec::MinLeaf(i)
            | FeatureSpec::MaxLeaf(i)
            | FeatureSpec::LeafSumParity(i) => Self::block_value(self.component(std::slice::from_ref(u), i)?, self),
            FeatureSpec::Length => vec![u.shape() as u64],
            FeatureSpec::LastBlock => std::iter::once(u.index() as u64).chain(u.leaves().iter().map(|&l| l as u64)).collect(),
            FeatureSpec::SeededRandom { seed, classes } => vec![self.hashed(seed, classes, &u.to_string())],
        })
    }

    /// On `[N]^k`, coordinate `x_i` plays the role of component `i`.
    pub fn on_kset(&self, x: &KSet) -> Result<Vec<u64>> {
        let elems = x.elems();
        Ok(match *self {
            FeatureSpec::Const => vec![0],
            FeatureSpec::StemParity(i) => vec![*self.component(elems, i)? as u64 % 2],
            FeatureSpec::MinLeaf(i) | FeatureSpec::MaxLeaf(i) => vec![*self.component(elems, i)? as u64],
            FeatureSpec::LeafSumParity(i) => {
                self.component(elems, i)?;
                vec![elems[..=i].iter().sum::<usize>() as u64 % 2]
            }
            FeatureSpec::Length => vec![elems.len() as u64],
            FeatureSpec::LastBlock => elems.last().map(|&x| vec![x as u64]).unwrap_or_default(),
            FeatureSpec::SeededRandom { seed, classes } => vec![self.hashed(seed, classes, &x.to_string())],
        })
    }

    /// Binary coloring of a block: the last feature number mod 2.
    pub fn color_block(&self, u: &Block) -> Result<Label> {
        let value = match *self {
            FeatureSpec::SeededRandom { seed, .. } => vec![self.hashed(seed, 2, &u.to_string())],
            _ => self.on_block(u)?,
        };
        Ok(value.last().copied().unwrap_or(0) % 2)
    }
}

/// Dense labels for feature values, by order of first occurrence.
#[derive(Debug, Default)]
pub struct Interner {
    ids: HashMap<Vec<u64>, Label>,
}

impl Interner {
    pub fn label(&mut self, value: Vec<u64>) -> Label {
        let next = self.ids.len() as Label;
        *self.ids.entry(value).or_insert(next)
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::Const => write!(f, "const"),
            FeatureSpec::StemParity(i) => write!(f, "stem_parity({i})"),
            FeatureSpec::MinLeaf(i) => write!(f, "min_leaf({i})"),
            FeatureSpec::MaxLeaf(i) => write!(f, "max_leaf({i})"),
            FeatureSpec::LeafSumParity(i) => write!(f, "leaf_sum_parity({i})"),
            FeatureSpec::Length => write!(f, "length"),
            FeatureSpec::LastBlock => write!(f, "last_block"),
            FeatureSpec::SeededRandom { seed, classes } if *classes == DEFAULT_RANDOM_CLASSES => {
                write!(f, "seeded_random({seed})")
            }
            FeatureSpec::SeededRandom { seed, classes } => write!(f, "seeded_random({seed},{classes})"),
        }
    }
}

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Usage(format!("unknown feature {text:?}"));
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let args = rest.strip_suffix(')').ok_or_else(bad)?;
                let args = args
                    .split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                (name.trim(), args)
            }
            None => (text, Vec::new()),
        };
        let index = |args: &[u64]| match args {
            [i] => Ok(*i as usize),
            _ => Err(bad()),
        };
        Ok(match name {
            "const" if args.is_empty() => FeatureSpec::Const,
            "length" if args.is_empty() => FeatureSpec::Length,
            "last_block" if args.is_empty() => FeatureSpec::LastBlock,
            "stem_parity" => FeatureSpec::StemParity(index(&args)?),
            "min_leaf" => FeatureSpec::MinLeaf(index(&args)?),
            "max_leaf" => FeatureSpec::MaxLeaf(index(&args)?),
            "leaf_sum_parity" => FeatureSpec::LeafSumParity(index(&args)?),
            "seeded_random" => match args[..] {
                [seed] => FeatureSpec::SeededRandom { seed, classes: DEFAULT_RANDOM_CLASSES },
                [seed, classes] if classes > 0 => FeatureSpec::SeededRandom { seed, classes },
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for text in [
            "const",
            "stem_parity(1)",
            "min_leaf(0)",
            "max_leaf(2)",
            "leaf_sum_parity(0)",
            "length",
            "last_block",
            "seeded_random(42)",
            "seeded_random(7,5)",
        ] {
            assert_eq!(text.parse::<FeatureSpec>().unwrap().to_string(), text);
        }
        assert!("min_leaf".parse::<FeatureSpec>().is_err());
        assert!("wobble(1)".parse::<FeatureSpec>().is_err());
        assert!(FeatureSpec::parse_with_seed("seeded_random", None).is_err());
        assert_eq!(
            FeatureSpec::parse_with_seed("seeded_random", Some(9)).unwrap(),
            FeatureSpec::SeededRandom { seed: 9, classes: 3 }
        );
    }

    #[test]
    fn component_features() {
        let a: Approximation = "0:0|2:1,2".parse().unwrap();
        assert_eq!(FeatureSpec::MinLeaf(1).on_approximation(&a).unwrap(), vec![2, 1]);
        assert_eq!(FeatureSpec::MaxLeaf(1).on_approximation(&a).unwrap(), vec![2, 2]);
        assert_eq!(FeatureSpec::StemParity(0).on_approximation(&a).unwrap(), vec![0]);
        assert_eq!(FeatureSpec::LeafSumParity(1).on_approximation(&a).unwrap(), vec![1]);
        assert!(FeatureSpec::MinLeaf(2).on_approximation(&a).is_err());
        let x = KSet::new(vec![3, 5]).unwrap();
        assert_eq!(FeatureSpec::MinLeaf(0).on_kset(&x).unwrap(), vec![3]);
        assert_eq!(FeatureSpec::LeafSumParity(1).on_kset(&x).unwrap(), vec![0]);
    }

    #[test]
    fn seeded_random_is_deterministic() {
        let f = FeatureSpec::SeededRandom { seed: 42, classes: 3 };
        let g = FeatureSpec::SeededRandom { seed: 43, classes: 3 };
        let items: Vec<Approximation> = ["0:0", "1:0", "1:1", "2:2", "0:0|1:0,1"].iter().map(|s| s.parse().unwrap()).collect();
        let run = |f: &FeatureSpec| items.iter().map(|a| f.on_approximation(a).unwrap()).collect::<Vec<_>>();
        assert_eq!(run(&f), run(&f));
        assert!(run(&f).iter().all(|v| v[0] < 3));
        assert_ne!(run(&f), run(&g));
    }
}
