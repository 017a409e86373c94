//! Projection trees `𝒯(n)`, the projections `π_T`, the relations `E_T`, and
//! canonical equivalence relations on `AR_n` given by tree sequences.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{enumerate_approx, enumerate_subtrees, tree_trunc, Approximation, Block, BlockSeq, Node, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeKind {
    /// `T_⟨⟩`: the root only.
    Empty,
    /// `T_⟨0⟩`: root and stem.
    Stem,
    /// `T_I`: root, stem and the leaves at positions `I`.
    Leaves(Vec<usize>),
}

/// An element of `𝒯(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTree {
    n: usize,
    kind: TreeKind,
}

impl CanonicalTree {
    pub fn empty(n: usize) -> Self {
        Self { n, kind: TreeKind::Empty }
    }

    pub fn stem(n: usize) -> Self {
        Self { n, kind: TreeKind::Stem }
    }

    pub fn leaves(n: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut positions: Vec<usize> = positions.into_iter().collect();
        positions.sort_unstable();
        positions.dedup();
        if positions.is_empty() {
            return Err(Error::InvalidBlock("leaf projection needs a nonempty index set".into()));
        }
        if let Some(&p) = positions.iter().find(|&&p| p > n) {
            return Err(Error::InvalidBlock(format!("position {p} exceeds shape {n}")));
        }
        Ok(Self { n, kind: TreeKind::Leaves(positions) })
    }

    /// `T̃(n)`: every leaf position.
    pub fn full(n: usize) -> Self {
        Self { n, kind: TreeKind::Leaves((0..=n).collect()) }
    }

    pub fn shape(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &TreeKind {
        &self.kind
    }

    /// Node count of the tree.
    pub fn size(&self) -> usize {
        match &self.kind {
            TreeKind::Empty => 1,
            TreeKind::Stem => 2,
            TreeKind::Leaves(positions) => 2 + positions.len(),
        }
    }

    /// Inclusion of subtrees of `T̃(n)`.
    pub fn is_subtree_of(&self, other: &CanonicalTree) -> bool {
        match (&self.kind, &other.kind) {
            (TreeKind::Empty, _) => true,
            (TreeKind::Stem, TreeKind::Empty) => false,
            (TreeKind::Stem, _) => true,
            (TreeKind::Leaves(_), TreeKind::Empty | TreeKind::Stem) => false,
            (TreeKind::Leaves(i), TreeKind::Leaves(j)) => i.iter().all(|p| j.contains(p)),
        }
    }

    /// Parses `E`, `S` or `L{i,j,…}` as an element of `𝒯(n)`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        match text.trim() {
            "E" => Ok(Self::empty(n)),
            "S" => Ok(Self::stem(n)),
            other => {
                let inner = other
                    .strip_prefix("L{")
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| Error::Parse(format!("unknown tree {other:?}")))?;
                let positions = inner
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad leaf position {p:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::leaves(n, positions).map_err(|e| Error::Parse(e.to_string()))
            }
        }
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TreeKind::Empty => f.write_str("E"),
            TreeKind::Stem => f.write_str("S"),
            TreeKind::Leaves(positions) => write!(f, "L{{{}}}", positions.iter().join(",")),
        }
    }
}

/// `𝒯(n)` in search order: `E`, `S`, then `L{I}` by sorted index vector.
pub fn all_trees(n: usize) -> Vec<CanonicalTree> {
    let mut trees = vec![CanonicalTree::empty(n), CanonicalTree::stem(n)];
    let mut subsets: Vec<Vec<usize>> = (1..=n + 1)
        .flat_map(|size| (0..=n).combinations(size))
        .collect();
    subsets.sort();
    trees.extend(subsets.into_iter().map(|positions| CanonicalTree {
        n,
        kind: TreeKind::Leaves(positions),
    }));
    trees
}

/// `π_T(u)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectedBlock {
    pub m: Option<usize>,
    pub has_stem: bool,
    pub leaves: Vec<usize>,
}

impl ProjectedBlock {
    pub fn root() -> Self {
        Self { m: None, has_stem: false, leaves: Vec::new() }
    }

    pub fn is_root_only(&self) -> bool {
        !self.has_stem
    }

    pub fn nodes(&self) -> NodeSet {
        let mut set = NodeSet::root();
        if let (true, Some(m)) = (self.has_stem, self.m) {
            set.insert(Node::Stem(m));
            for &i in &self.leaves {
                set.insert(Node::Leaf(m, i));
            }
        }
        set
    }
}

fn check_shape(tree: &CanonicalTree, u: &Block) -> Result<()> {
    if u.shape() != tree.n {
        return Err(Error::Shape { expected: tree.n, found: u.shape() });
    }
    Ok(())
}

pub fn project(tree: &CanonicalTree, u: &Block) -> Result<ProjectedBlock> {
    check_shape(tree, u)?;
    Ok(project_unchecked(tree, u))
}

pub(crate) fn project_unchecked(tree: &CanonicalTree, u: &Block) -> ProjectedBlock {
    match &tree.kind {
        TreeKind::Empty => ProjectedBlock::root(),
        TreeKind::Stem => ProjectedBlock { m: Some(u.index()), has_stem: true, leaves: Vec::new() },
        TreeKind::Leaves(positions) => ProjectedBlock {
            m: Some(u.index()),
            has_stem: true,
            leaves: positions.iter().map(|&p| u.leaves()[p]).collect(),
        },
    }
}

/// `u E_T v`.
pub fn et_equiv(tree: &CanonicalTree, u: &Block, v: &Block) -> Result<bool> {
    Ok(project(tree, u)? == project(tree, v)?)
}

/// A sequence `⟨T(0), …, T(n−1)⟩` with `T(i) ∈ 𝒯(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeSeq {
    trees: Vec<CanonicalTree>,
}

impl TreeSeq {
    pub fn new(trees: Vec<CanonicalTree>) -> Result<Self> {
        if let Some((i, t)) = trees.iter().enumerate().find(|(i, t)| t.n != *i) {
            return Err(Error::Shape { expected: i, found: t.n });
        }
        Ok(Self { trees })
    }

    pub fn all_empty(n: usize) -> Self {
        Self { trees: (0..n).map(CanonicalTree::empty).collect() }
    }

    pub fn all_full(n: usize) -> Self {
        Self { trees: (0..n).map(CanonicalTree::full).collect() }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[CanonicalTree] {
        &self.trees
    }

    /// The componentwise projection of `a`; two approximations are related
    /// exactly when their keys are equal.
    pub fn key(&self, a: &Approximation) -> Result<Vec<ProjectedBlock>> {
        if a.len() != self.len() {
            return Err(Error::Arity { expected: self.len(), found: a.len() });
        }
        self.trees.iter().zip(a.blocks()).map(|(t, u)| project(t, u)).collect()
    }
}

impl fmt::Display for TreeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.trees.iter().join(";"))
    }
}

impl FromStr for TreeSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self { trees: Vec::new() });
        }
        let trees = s
            .split(';')
            .enumerate()
            .map(|(i, part)| CanonicalTree::parse(part, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { trees })
    }
}

/// `a R_seq b`.
pub fn canonical_equiv(seq: &TreeSeq, a: &Approximation, b: &Approximation) -> Result<bool> {
    if a.len() != seq.len() || b.len() != seq.len() {
        let found = if a.len() != seq.len() { a.len() } else { b.len() };
        return Err(Error::Arity { expected: seq.len(), found });
    }
    for (t, (u, v)) in seq.trees.iter().zip(a.blocks().iter().zip(b.blocks())) {
        if !et_equiv(t, u, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All tree sequences of length `n`, lexicographic in the component order of
/// [`all_trees`].
pub fn enumerate_treeseqs(n: usize) -> Vec<TreeSeq> {
    if n == 0 {
        return vec![TreeSeq { trees: Vec::new() }];
    }
    (0..n)
        .map(all_trees)
        .multi_cartesian_product()
        .map(|trees| TreeSeq { trees })
        .collect()
}

/// `Π_{i=1}^{n} (2^i + 1)`, computed without enumeration.
pub fn census(n: u32) -> u128 {
    (1..=n).map(|i| (1u128 << i) + 1).product()
}

/// Distinct images `π_T(u)` over all shape-`n` sub-blocks of `x`.
pub fn project_member(tree: &CanonicalTree, n: usize, x: &impl BlockSeq) -> Result<Vec<ProjectedBlock>> {
    if tree.n != n {
        return Err(Error::Shape { expected: n, found: tree.n });
    }
    let mut images: Vec<ProjectedBlock> = enumerate_subtrees(x, n, &Approximation::empty())
        .iter()
        .map(|u| project_unchecked(tree, u))
        .collect();
    images.sort();
    images.dedup();
    Ok(images)
}

/// Relabels keys by order of first occurrence, so two labelings of the same
/// list induce the same partition exactly when the results are equal.
pub fn canonical_partition<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Vec<u32> {
    let mut seen: HashMap<K, u32> = HashMap::new();
    keys.into_iter()
        .map(|key| {
            let next = seen.len() as u32;
            *seen.entry(key).or_insert(next)
        })
        .collect()
}

/// Partition of `AR_n | x` induced by `seq`.
pub fn relation_table(seq: &TreeSeq, universe: &[Approximation]) -> Result<Vec<u32>> {
    let keys = universe.iter().map(|a| seq.key(a)).collect::<Result<Vec<_>>>()?;
    Ok(canonical_partition(keys))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusCheck {
    pub n: usize,
    pub universe_depth: usize,
    pub approximations: usize,
    pub sequences: usize,
    pub distinct_relations: usize,
}

impl CensusCheck {
    pub fn all_distinct(&self) -> bool {
        self.sequences == self.distinct_relations
    }
}

/// Counts the distinct relations induced on `AR_n` over the first
/// `universe_depth` blocks of 𝕋 by every tree sequence of length `n`.
pub fn census_distinctness(n: usize, universe_depth: usize) -> CensusCheck {
    let universe = enumerate_approx(&tree_trunc(universe_depth), n);
    let seqs = enumerate_treeseqs(n);
    let tables: HashSet<Vec<u32>> = seqs
        .iter()
        .map(|seq| relation_table(seq, &universe).expect("enumerated sequences match arity"))
        .collect();
    CensusCheck {
        n,
        universe_depth,
        approximations: universe.len(),
        sequences: seqs.len(),
        distinct_relations: tables.len(),
    }
}
