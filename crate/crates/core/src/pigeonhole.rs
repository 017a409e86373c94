//! Constructive pigeonhole for one-step extensions.
//!
//! Given `a` with `|a| = k` and a 2-coloring of the shape-`k` blocks beyond
//! `a` inside a universe `B`, [`homogenize`] builds `A ∈ [depth_B(a), B]`
//! on which every one-step extension of `a` has the same color:
//!
//! 1. for successive targets `n, n+1, …` find inside successive blocks of `B`
//!    a sub-block of that shape whose shape-`k` sub-blocks are monochromatic
//!    (a finite Ramsey search on the leaf set, since shape-`k` sub-blocks of
//!    one block are exactly the `(k+1)`-subsets of its leaves);
//! 2. keep the witnesses of one color, the first color to reach the
//!    requested count;
//! 3. thin the `l`-th kept witness to shape `n + l` and append it to `r_n(B)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::ellentuck::{diagonal_ramsey, monochromatic_of_size, Label, RelationTable};
use crate::error::{Error, Result};
use crate::space::{
    depth_of, enumerate_subtrees, r_n, tree_trunc, Approximation, Block, BlockSeq, MemberTrunc,
};

pub const SIZE_TABLE_NOTE: &str = "stage-1 sizes: R(2,2)=2, R(3,3)=6, R(4,4)=18 and 2t+1 for \
single leaves are used only to flag guaranteed steps; every step is found by exhaustive search";

/// A 2-coloring of the shape-`|a|` blocks beyond `a` inside `universe`.
/// Color 0 stands for membership in the target family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionColoring {
    a: Approximation,
    universe: MemberTrunc,
    colors: BTreeMap<Block, u8>,
}

impl ExtensionColoring {
    /// Colors every block of the domain with `f`; colors are reduced mod 2.
    pub fn from_fn(a: Approximation, universe: MemberTrunc, mut f: impl FnMut(&Block) -> Label) -> Self {
        let colors = enumerate_subtrees(&universe, a.len(), &a)
            .into_iter()
            .map(|u| {
                let c = (f(&u) % 2) as u8;
                (u, c)
            })
            .collect();
        Self { a, universe, colors }
    }

    pub fn from_map(a: Approximation, universe: MemberTrunc, colors: BTreeMap<Block, u8>) -> Result<Self> {
        if let Some((u, c)) = colors.iter().find(|(_, &c)| c > 1) {
            return Err(Error::Totality(format!("block {u} has color {c}, expected 0 or 1")));
        }
        let coloring = Self { a, universe, colors };
        coloring.check_total(&coloring.universe)?;
        Ok(coloring)
    }

    pub fn a(&self) -> &Approximation {
        &self.a
    }

    pub fn universe(&self) -> &MemberTrunc {
        &self.universe
    }

    pub fn color(&self, u: &Block) -> Option<u8> {
        self.colors.get(u).copied()
    }

    /// Every shape-`k` block of `b` beyond `a` must carry a color.
    pub fn check_total(&self, b: &MemberTrunc) -> Result<()> {
        match enumerate_subtrees(b, self.a.len(), &self.a)
            .into_iter()
            .find(|u| !self.colors.contains_key(u))
        {
            Some(u) => Err(Error::Totality(format!("block {u} has no color"))),
            None => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawColoring {
    a: Approximation,
    universe_depth: usize,
    colors: BTreeMap<String, u8>,
}

impl Serialize for ExtensionColoring {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawColoring {
            a: self.a.clone(),
            universe_depth: self.universe.depth(),
            colors: self.colors.iter().map(|(u, &c)| (u.to_string(), c)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtensionColoring {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawColoring::deserialize(deserializer)?;
        let colors = raw
            .colors
            .iter()
            .map(|(key, &c)| key.parse::<Block>().map(|u| (u, c)))
            .collect::<Result<BTreeMap<_, _>>>()
            .map_err(D::Error::custom)?;
        ExtensionColoring::from_map(raw.a, tree_trunc(raw.universe_depth), colors).map_err(D::Error::custom)
    }
}

/// One stage-1 step: a monochromatic sub-block found inside a block of `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// position of the scanned block in `B`
    pub position: usize,
    pub target_shape: usize,
    pub witness: Block,
    pub color: u8,
    /// the block was large enough for the size table to guarantee success
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityCertificate {
    pub a: Approximation,
    #[serde(rename = "A")]
    pub member: MemberTrunc,
    pub color: u8,
    pub transcript: Vec<StageRecord>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PigeonholeOutcome {
    Homogeneous(HomogeneityCertificate),
    /// `B` is too shallow to supply the needed Ramsey sizes.
    Exhausted { transcript: Vec<StageRecord> },
}

impl PigeonholeOutcome {
    pub fn certificate(&self) -> Option<&HomogeneityCertificate> {
        match self {
            PigeonholeOutcome::Homogeneous(c) => Some(c),
            PigeonholeOutcome::Exhausted { .. } => None,
        }
    }
}

/// Leaf count above which a monochromatic set of `size` leaves is forced.
fn guaranteed_leaves(k: usize, size: usize) -> Option<usize> {
    match k {
        0 => Some(2 * size.saturating_sub(1) + 1),
        1 => diagonal_ramsey(size),
        _ => None,
    }
}

pub fn homogenize(b: &MemberTrunc, coloring: &ExtensionColoring, new_blocks: usize) -> Result<PigeonholeOutcome> {
    if new_blocks == 0 {
        return Err(Error::Usage("new_blocks must be at least 1".into()));
    }
    let a = coloring.a();
    let k = a.len();
    let n = depth_of(b, a).ok_or_else(|| Error::Structure(format!("{a} has infinite depth in {b}")))?;
    coloring.check_total(b)?;

    let blocks = b.blocks();
    let mut transcript: Vec<StageRecord> = Vec::new();
    let mut counts = [0usize; 2];
    let mut chosen = None;
    let mut target = n;
    for (position, block) in blocks.iter().enumerate().skip(n) {
        if block.shape() < target {
            continue;
        }
        let leaves = block.leaves();
        let table = RelationTable::from_fn(k + 1, leaves.len(), |positions| {
            let sub = Block::new(block.index(), positions.elems().iter().map(|&p| leaves[p]).collect())
                .expect("positions index a sorted leaf list");
            Label::from(coloring.color(&sub).expect("coloring checked total"))
        });
        let Some((set, Some(color))) = monochromatic_of_size(&table, target + 1) else {
            continue;
        };
        let witness = Block::new(block.index(), set.iter().map(|&p| leaves[p]).collect())?;
        let color = color as u8;
        transcript.push(StageRecord {
            position,
            target_shape: target,
            witness,
            color,
            guaranteed: guaranteed_leaves(k, target + 1).is_some_and(|bound| leaves.len() >= bound),
        });
        target += 1;
        counts[color as usize] += 1;
        if counts[color as usize] == new_blocks {
            chosen = Some(color);
            break;
        }
    }

    let Some(color) = chosen else {
        return Ok(PigeonholeOutcome::Exhausted { transcript });
    };
    let mut member = r_n(b, n)?.into_blocks();
    for (l, record) in transcript.iter().filter(|r| r.color == color).enumerate() {
        member.push(record.witness.thin_to(n + l).expect("witness shape is at least n + l"));
    }
    let certificate = HomogeneityCertificate {
        a: a.clone(),
        member: MemberTrunc::new(member)?,
        color,
        transcript,
        note: SIZE_TABLE_NOTE.to_string(),
    };
    Ok(PigeonholeOutcome::Homogeneous(certificate))
}

/// Independent re-check of a homogeneity certificate against `B` and the
/// coloring. Returns the number of extensions checked.
pub fn verify_homogeneity(
    b: &MemberTrunc,
    coloring: &ExtensionColoring,
    cert: &HomogeneityCertificate,
) -> Result<usize> {
    let a = coloring.a();
    if &cert.a != a {
        return Err(Error::Structure("certificate is for a different approximation".into()));
    }
    let n = depth_of(b, a).ok_or_else(|| Error::Structure(format!("{a} has infinite depth in {b}")))?;
    let blocks = cert.member.blocks();
    if !cert.member.is_well_formed() {
        return Err(Error::Structure(format!("{} is not a member truncation", cert.member)));
    }
    if blocks.len() <= n || blocks[..n] != b.blocks()[..n] {
        return Err(Error::Structure("certificate does not start with r_n(B)".into()));
    }
    let mut later = b.blocks()[n..].iter();
    for u in &blocks[n..] {
        if !later.any(|big| u.is_sub_block_of(big)) {
            return Err(Error::Structure(format!("block {u} does not come from B beyond depth {n}")));
        }
    }
    let k = a.len();
    let horizon = a.blocks().last().map(|x| x.index());
    let mut checked = 0;
    for block in blocks.iter().filter(|u| horizon.is_none_or(|h| u.index() > h)) {
        for leaves in block.leaves().iter().copied().combinations(k + 1) {
            let u = Block::new(block.index(), leaves)?;
            match coloring.color(&u) {
                Some(c) if c == cert.color => checked += 1,
                Some(c) => {
                    return Err(Error::Structure(format!(
                        "extension {u} has color {c}, certificate claims {}",
                        cert.color
                    )))
                }
                None => return Err(Error::Totality(format!("block {u} has no color"))),
            }
        }
    }
    Ok(checked)
}
