//! Finite data model of the space R₁.
//!
//! The ambient tree 𝕋 has a root, one stem `⟨m⟩` for every block index `m`,
//! and leaves `⟨m, i⟩` for `i ≤ m`. A [`Block`] is a subtree of the `m`-th
//! finite block `𝕋(m)`; its shape is its leaf count minus one. An
//! [`Approximation`] of length `n` is a sequence of blocks with strictly
//! increasing indices whose `j`-th block has shape `j`. A [`MemberTrunc`]
//! satisfies the same invariants and stands for the first `d` blocks of an
//! infinite member.
//!
//! Every infinitary notion is read relative to an explicit finite universe.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node of 𝕋.
///
/// Nodes are ordered depth-first: the root first, then each stem followed by
/// the leaves hanging from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Root,
    Stem(usize),
    Leaf(usize, usize),
}

impl Node {
    fn sort_key(self) -> (Option<usize>, u8, usize) {
        match self {
            Node::Root => (None, 0, 0),
            Node::Stem(m) => (Some(m), 0, 0),
            Node::Leaf(m, i) => (Some(m), 1, i),
        }
    }

    pub fn block_index(self) -> Option<usize> {
        match self {
            Node::Root => None,
            Node::Stem(m) | Node::Leaf(m, _) => Some(m),
        }
    }

    /// Leaves `⟨m, i⟩` only exist in 𝕋 for `i ≤ m`.
    pub fn is_in_tree(self) -> bool {
        match self {
            Node::Leaf(m, i) => i <= m,
            _ => true,
        }
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Root => write!(f, "⟨⟩"),
            Node::Stem(m) => write!(f, "⟨{m}⟩"),
            Node::Leaf(m, i) => write!(f, "⟨{m},{i}⟩"),
        }
    }
}

/// A finite set of nodes of 𝕋.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(BTreeSet<Node>);

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn root() -> Self {
        let mut set = Self::new();
        set.insert(Node::Root);
        set
    }

    pub fn insert(&mut self, node: Node) -> bool {
        self.0.insert(node)
    }

    pub fn extend(&mut self, other: &NodeSet) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn contains(&self, node: Node) -> bool {
        self.0.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Node> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).copied().collect())
    }

    /// Downward closed: every leaf has its stem and every stem has the root.
    pub fn is_subtree(&self) -> bool {
        self.0.iter().all(|node| match *node {
            Node::Root => true,
            Node::Stem(_) => self.contains(Node::Root),
            Node::Leaf(m, _) => self.contains(Node::Stem(m)) && self.contains(Node::Root),
        })
    }

    /// Stem indices present in the set, increasing.
    pub fn stems(&self) -> Vec<usize> {
        self.0
            .iter()
            .filter_map(|node| match node {
                Node::Stem(m) => Some(*m),
                _ => None,
            })
            .collect()
    }

    /// The nodes of `self` hanging from the first `j` stems, plus the root.
    pub fn restrict_to_first_stems(&self, j: usize) -> NodeSet {
        let stems = self.stems();
        let cutoff = stems.get(j).copied();
        NodeSet(
            self.0
                .iter()
                .copied()
                .filter(|node| match (node.block_index(), cutoff) {
                    (None, _) => true,
                    (Some(_), None) => true,
                    (Some(m), Some(c)) => m < c,
                })
                .collect(),
        )
    }

    /// Prefix order on node sets: `self` equals the restriction of `other`
    /// to an initial segment of its blocks.
    pub fn is_prefix_of(&self, other: &NodeSet) -> bool {
        if self.is_empty() {
            return true;
        }
        if !other.contains(Node::Root) {
            return false;
        }
        let j = self.stems().len();
        j <= other.stems().len() && other.restrict_to_first_stems(j) == *self
    }
}

impl FromIterator<Node> for NodeSet {
    fn from_iter<I: IntoIterator<Item = Node>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(", "))
    }
}

/// A subtree of `𝕋(m)` with a nonempty leaf set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Block {
    m: usize,
    leaves: Vec<usize>,
}

impl Block {
    pub fn new(m: usize, leaves: Vec<usize>) -> Result<Self> {
        if leaves.is_empty() {
            return Err(Error::InvalidBlock(format!("block {m} has no leaves")));
        }
        if !leaves.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidBlock(format!(
                "leaves of block {m} are not strictly increasing: {leaves:?}"
            )));
        }
        if let Some(&last) = leaves.last() {
            if last > m {
                return Err(Error::InvalidBlock(format!(
                    "leaf {last} does not exist under stem {m}"
                )));
            }
        }
        Ok(Self { m, leaves })
    }

    /// The full block `𝕋(m)`.
    pub fn full(m: usize) -> Self {
        Self {
            m,
            leaves: (0..=m).collect(),
        }
    }

    pub fn index(&self) -> usize {
        self.m
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn shape(&self) -> usize {
        self.leaves.len() - 1
    }

    /// Same block index and a leaf subset.
    pub fn is_sub_block_of(&self, other: &Block) -> bool {
        self.m == other.m && is_sorted_subset(&self.leaves, &other.leaves)
    }

    /// All sub-blocks of the given shape, in lexicographic order.
    pub fn sub_blocks(&self, shape: usize) -> impl Iterator<Item = Block> + '_ {
        let m = self.m;
        self.leaves
            .iter()
            .copied()
            .combinations(shape + 1)
            .map(move |leaves| Block { m, leaves })
    }

    /// The lexicographically least sub-block of the given shape.
    pub fn thin_to(&self, shape: usize) -> Option<Block> {
        (shape <= self.shape()).then(|| Block {
            m: self.m,
            leaves: self.leaves[..=shape].to_vec(),
        })
    }

    /// The block as a node set (root, stem, leaves).
    pub fn nodes(&self) -> NodeSet {
        let mut set = NodeSet::root();
        set.insert(Node::Stem(self.m));
        for &i in &self.leaves {
            set.insert(Node::Leaf(self.m, i));
        }
        set
    }
}

fn is_sorted_subset(small: &[usize], large: &[usize]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.m, self.leaves.iter().join(","))
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, leaves) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("block {s:?} lacks ':'")))?;
        let m = parse_usize(m)?;
        let leaves = leaves
            .split(',')
            .map(parse_usize)
            .collect::<Result<Vec<_>>>()?;
        Block::new(m, leaves)
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}")))
}

#[derive(Deserialize)]
struct RawBlock {
    m: usize,
    leaves: Vec<usize>,
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawBlock::deserialize(deserializer)?;
        Block::new(raw.m, raw.leaves).map_err(serde::de::Error::custom)
    }
}

/// Read access shared by approximations and truncated members.
pub trait BlockSeq {
    fn blocks(&self) -> &[Block];

    fn len(&self) -> usize {
        self.blocks().len()
    }

    fn is_empty(&self) -> bool {
        self.blocks().is_empty()
    }

    /// Union of the blocks as a node set; empty for the empty sequence.
    fn nodes(&self) -> NodeSet {
        let mut set = NodeSet::new();
        for block in self.blocks() {
            set.extend(&block.nodes());
        }
        set
    }

    /// Largest block index touched, if any.
    fn horizon(&self) -> Option<usize> {
        self.blocks().last().map(Block::index)
    }

    /// Canonical text form: blocks joined by `|`.
    fn serialize_text(&self) -> String {
        self.blocks().iter().join("|")
    }
}

/// Checks the R₁ invariants: strictly increasing indices, block `j` of shape `j`.
pub fn check_blocks(blocks: &[Block]) -> Result<()> {
    for (j, block) in blocks.iter().enumerate() {
        if block.shape() != j {
            return Err(Error::InvalidApproximation(format!(
                "block {j} ({block}) has shape {} instead of {j}",
                block.shape()
            )));
        }
    }
    if let Some(w) = blocks.windows(2).find(|w| w[0].m >= w[1].m) {
        return Err(Error::InvalidApproximation(format!(
            "block indices not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn parse_blocks(s: &str) -> Result<Vec<Block>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split('|').map(str::parse).collect()
}

macro_rules! block_sequence {
    ($name:ident) => {
        impl $name {
            pub fn new(blocks: Vec<Block>) -> Result<Self> {
                check_blocks(&blocks)?;
                Ok(Self { blocks })
            }

            /// Wraps blocks without checking the shape invariants.
            pub fn from_blocks_unchecked(blocks: Vec<Block>) -> Self {
                Self { blocks }
            }

            pub fn empty() -> Self {
                Self { blocks: Vec::new() }
            }

            pub fn into_blocks(self) -> Vec<Block> {
                self.blocks
            }

            pub fn is_well_formed(&self) -> bool {
                check_blocks(&self.blocks).is_ok()
            }
        }

        impl BlockSeq for $name {
            fn blocks(&self) -> &[Block] {
                &self.blocks
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.serialize_text())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Self::new(parse_blocks(s)?)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(
                deserializer: D,
            ) -> Result<Self, D::Error> {
                #[derive(Deserialize)]
                struct Raw {
                    blocks: Vec<Block>,
                }
                let raw = Raw::deserialize(deserializer)?;
                $name::new(raw.blocks).map_err(serde::de::Error::custom)
            }
        }
    };
}

/// An element of `AR_n`: the first `n` blocks of some member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Approximation {
    blocks: Vec<Block>,
}

/// The first `depth` blocks of a member of R₁; used as a search universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MemberTrunc {
    blocks: Vec<Block>,
}

block_sequence!(Approximation);
block_sequence!(MemberTrunc);

impl Approximation {
    /// `self ∪ tail`, checked.
    pub fn extend_with(&self, tail: &[Block]) -> Result<Approximation> {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(tail);
        Approximation::new(blocks)
    }

    pub fn to_member(&self) -> MemberTrunc {
        MemberTrunc {
            blocks: self.blocks.clone(),
        }
    }

    /// `r_i(self)` for every `i < len`, shortest first.
    pub fn proper_prefixes(&self) -> impl Iterator<Item = Approximation> + '_ {
        (0..self.blocks.len()).map(|i| Approximation {
            blocks: self.blocks[..i].to_vec(),
        })
    }

    /// Proper prefix `a ⊏ self`.
    pub fn has_proper_prefix(&self, a: &Approximation) -> bool {
        a.blocks.len() < self.blocks.len() && self.blocks[..a.blocks.len()] == a.blocks[..]
    }

    pub fn last(&self) -> Option<&Block> {
        self.blocks.last()
    }
}

impl MemberTrunc {
    pub fn depth(&self) -> usize {
        self.blocks.len()
    }

    pub fn to_approximation(&self) -> Approximation {
        Approximation {
            blocks: self.blocks.clone(),
        }
    }
}

/// The first `depth` blocks of 𝕋 itself.
pub fn tree_trunc(depth: usize) -> MemberTrunc {
    MemberTrunc {
        blocks: (0..depth).map(Block::full).collect(),
    }
}

/// `r_n(x)`: the first `n` blocks.
pub fn r_n(x: &impl BlockSeq, n: usize) -> Result<Approximation> {
    let blocks = x.blocks();
    if n > blocks.len() {
        return Err(Error::OutOfRange {
            requested: n,
            available: blocks.len(),
        });
    }
    Ok(Approximation {
        blocks: blocks[..n].to_vec(),
    })
}

/// Structural inclusion: each block of `a` sits inside the block of `b` with
/// the same index. Indices are strictly increasing on both sides, so the
/// matching position map is automatically strictly increasing.
fn blocks_included(a: &[Block], b: &[Block]) -> bool {
    let mut rest = b.iter();
    a.iter()
        .all(|block| rest.any(|other| block.is_sub_block_of(other)))
}

/// `a ≤_fin b`. Agrees with [`le_fin_nodes`]; the structural form avoids
/// building node sets.
pub fn le_fin(a: &Approximation, b: &impl BlockSeq) -> bool {
    blocks_included(a.blocks(), b.blocks())
}

/// `a ≤_fin b` computed as node-set inclusion.
pub fn le_fin_nodes(a: &Approximation, b: &impl BlockSeq) -> bool {
    a.nodes().is_subset(&b.nodes())
}

/// `y ≤₁ x` on truncations: `y` must itself be a well-formed member.
pub fn le_member(y: &MemberTrunc, x: &MemberTrunc) -> bool {
    y.is_well_formed() && blocks_included(y.blocks(), x.blocks())
}

/// `depth_b(a)`: the least `n` with `a ≤_fin r_n(b)`, or `None` when no
/// prefix of the truncation contains `a`.
pub fn depth_of(b: &impl BlockSeq, a: &Approximation) -> Option<usize> {
    if a.is_empty() {
        return Some(0);
    }
    let bb = b.blocks();
    (1..=bb.len()).find(|&n| blocks_included(a.blocks(), &bb[..n]))
}

/// All shape-`k` blocks contained in blocks of `x` whose index lies beyond
/// the horizon of `after`, in lexicographic order.
pub fn enumerate_subtrees(x: &impl BlockSeq, k: usize, after: &Approximation) -> Vec<Block> {
    let horizon = after.horizon();
    x.blocks()
        .iter()
        .filter(|block| horizon.is_none_or(|h| block.index() > h))
        .flat_map(|block| block.sub_blocks(k))
        .collect()
}

/// All `a ∈ AR_n` with `a ≤_fin x`, in lexicographic order.
pub fn enumerate_approx(x: &impl BlockSeq, n: usize) -> Vec<Approximation> {
    fn walk(
        blocks: &[Block],
        start: usize,
        current: &mut Vec<Block>,
        n: usize,
        out: &mut Vec<Approximation>,
    ) {
        let j = current.len();
        if j == n {
            out.push(Approximation {
                blocks: current.clone(),
            });
            return;
        }
        // leave room for the remaining n - j - 1 blocks
        let end = blocks.len().saturating_sub(n - j - 1);
        for p in start..end {
            for sub in blocks[p].sub_blocks(j) {
                current.push(sub);
                walk(blocks, p + 1, current, n, out);
                current.pop();
            }
        }
    }

    let mut out = Vec::new();
    walk(x.blocks(), 0, &mut Vec::with_capacity(n), n, &mut out);
    out.sort();
    out
}

/// Sub-members of `x` of exactly the given depth, lexicographic.
pub fn enumerate_submembers(x: &impl BlockSeq, depth: usize) -> Vec<MemberTrunc> {
    enumerate_approx(x, depth)
        .into_iter()
        .map(|a| a.to_member())
        .collect()
}

/// Result of [`glue`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glued {
    pub member: MemberTrunc,
    /// `b` supplied no block beyond `a`; the member is just `a`.
    pub exhausted: bool,
}

/// `a ∪ (b / r_n(b))`, thinning every later block of `b` greedily to the
/// required shape.
pub fn glue(a: &Approximation, b: &MemberTrunc) -> Result<Glued> {
    let n = a.len();
    let depth = depth_of(b, a).ok_or_else(|| {
        Error::IncompatibleGlue(format!("{a} is not contained in {b}"))
    })?;
    let mut blocks = a.blocks().to_vec();
    for (i, block) in b.blocks()[depth..].iter().enumerate() {
        if let Some(h) = a.horizon() {
            if block.index() <= h {
                return Err(Error::IncompatibleGlue(format!(
                    "block {block} does not lie beyond {a}"
                )));
            }
        }
        let thinned = block.thin_to(n + i).ok_or_else(|| {
            Error::IncompatibleGlue(format!("block {block} is smaller than shape {}", n + i))
        })?;
        blocks.push(thinned);
    }
    let exhausted = depth == b.depth();
    Ok(Glued {
        member: MemberTrunc::new(blocks)?,
        exhausted,
    })
}
