//! Fronts on a truncated universe, extension sets, separation, and inner
//! maps `φ` built from per-prefix projection trees.
//!
//! Everything here is relative to a finite universe. Mixing is only offered
//! through [`mixes_truncated`], which quantifies over same-depth sub-members
//! of the given universe and says nothing about infinite members.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::canon::{all_trees, canonical_partition, project, project_unchecked, CanonicalTree};
use crate::ellentuck::Label;
use crate::error::{Error, Result};
use crate::space::{
    depth_of, enumerate_submembers, le_fin, le_member, Approximation, Block, BlockSeq, MemberTrunc, Node,
    NodeSet,
};

/// A violating pair, least in lexicographic order.
pub type PairCheck = std::result::Result<(), (Approximation, Approximation)>;

/// A finite family of approximations inside a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Front {
    universe: MemberTrunc,
    elements: Vec<Approximation>,
}

impl Front {
    pub fn new(universe: MemberTrunc, elements: impl IntoIterator<Item = Approximation>) -> Result<Self> {
        let mut elements: Vec<Approximation> = elements.into_iter().collect();
        elements.sort();
        elements.dedup();
        if let Some(a) = elements.iter().find(|a| !le_fin(a, &universe)) {
            return Err(Error::Structure(format!("{a} does not lie inside {universe}")));
        }
        Ok(Self { universe, elements })
    }

    pub fn universe(&self) -> &MemberTrunc {
        &self.universe
    }

    pub fn elements(&self) -> &[Approximation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: &Approximation) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    /// `F|C`: the elements lying inside `c`, with `c` as the new universe.
    pub fn restrict(&self, c: &MemberTrunc) -> Front {
        Front {
            universe: c.clone(),
            elements: self.elements.iter().filter(|a| le_fin(a, c)).cloned().collect(),
        }
    }

    /// `F̂`: all prefixes of elements, the elements included.
    pub fn prefix_closure(&self) -> BTreeSet<Approximation> {
        let mut closure = BTreeSet::new();
        for a in &self.elements {
            closure.extend(a.proper_prefixes());
            closure.insert(a.clone());
        }
        closure
    }

    /// `F̂ ∖ F`, lexicographic.
    pub fn inner_prefixes(&self) -> Vec<Approximation> {
        self.prefix_closure().into_iter().filter(|a| !self.contains(a)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RawFront {
    universe: MemberTrunc,
    elements: Vec<Approximation>,
}

impl Serialize for Front {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawFront { universe: self.universe.clone(), elements: self.elements.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Front {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawFront::deserialize(deserializer)?;
        Front::new(raw.universe, raw.elements).map_err(serde::de::Error::custom)
    }
}

/// No element is a proper prefix of another.
pub fn is_nash_williams(f: &Front) -> PairCheck {
    // Sorted order puts the extensions of `a` directly after it.
    match f.elements.windows(2).find(|w| w[1].has_proper_prefix(&w[0])) {
        Some(w) => Err((w[0].clone(), w[1].clone())),
        None => Ok(()),
    }
}

/// No element lies `≤_fin` another.
pub fn is_sperner(f: &Front) -> PairCheck {
    for a in &f.elements {
        for b in &f.elements {
            if a != b && a.len() <= b.len() && le_fin(a, b) {
                return Err((a.clone(), b.clone()));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coverage {
    Covered,
    /// A member of full universe depth with no prefix in the front.
    Uncovered(MemberTrunc),
    /// Members of the requested depth with no prefix in the front yet; a
    /// deeper truncation might still cover them.
    Indeterminate(Vec<MemberTrunc>),
}

pub fn covers(f: &Front, depth: usize) -> Result<Coverage> {
    fn walk(
        f: &Front,
        blocks: &[Block],
        from: usize,
        depth: usize,
        current: &mut Vec<Block>,
        open: &mut Vec<MemberTrunc>,
    ) {
        let prefix = Approximation::from_blocks_unchecked(current.clone());
        if f.contains(&prefix) {
            return;
        }
        if current.len() == depth {
            open.push(prefix.to_member());
            return;
        }
        let needed = depth - current.len();
        for pos in from..=blocks.len().saturating_sub(needed) {
            for u in blocks[pos].sub_blocks(current.len()) {
                current.push(u);
                walk(f, blocks, pos + 1, depth, current, open);
                current.pop();
            }
        }
    }
    if depth > f.universe.depth() {
        return Err(Error::OutOfRange { requested: depth, available: f.universe.depth() });
    }
    let mut open = Vec::new();
    walk(f, f.universe.blocks(), 0, depth, &mut Vec::new(), &mut open);
    Ok(if open.is_empty() {
        Coverage::Covered
    } else if depth == f.universe.depth() {
        Coverage::Uncovered(open.swap_remove(0))
    } else {
        Coverage::Indeterminate(open)
    })
}

/// All block sequences with shapes `shape, shape+1, …` drawn from
/// `blocks[from..]` at increasing positions, lexicographic (shorter first).
/// With `len` set, only sequences of exactly that length.
fn legal_tails(blocks: &[Block], from: usize, shape: usize, len: Option<usize>) -> Vec<Vec<Block>> {
    fn walk(
        blocks: &[Block],
        from: usize,
        shape: usize,
        remaining: Option<usize>,
        current: &mut Vec<Block>,
        out: &mut Vec<Vec<Block>>,
    ) {
        if remaining.is_none_or(|r| r == 0) {
            out.push(current.clone());
        }
        if remaining == Some(0) {
            return;
        }
        for pos in from..blocks.len() {
            if remaining.is_some_and(|r| blocks.len() - pos < r) {
                break;
            }
            for u in blocks[pos].sub_blocks(shape) {
                current.push(u);
                walk(blocks, pos + 1, shape + 1, remaining.map(|r| r - 1), current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(blocks, from, shape, len, &mut Vec::new(), &mut out);
    out
}

/// Position in the fixed enumeration of shape-0 blocks of 𝕋, by `(m, leaf)`.
pub fn schreier_index(u: &Block) -> Option<usize> {
    (u.shape() == 0).then(|| u.index() * (u.index() + 1) / 2 + u.leaves()[0])
}

/// The Schreier-like front: every `t` inside the universe whose length is
/// one more than the enumeration index of `t(0)`.
pub fn schreier_front(universe: &MemberTrunc) -> Front {
    let blocks = universe.blocks();
    let mut elements = Vec::new();
    for (pos, block) in blocks.iter().enumerate() {
        for first in block.sub_blocks(0) {
            let len = schreier_index(&first).expect("shape 0") + 1;
            for tail in legal_tails(blocks, pos + 1, 1, Some(len - 1)) {
                let mut t = vec![first.clone()];
                t.extend(tail);
                elements.push(Approximation::new(t).expect("legal tail"));
            }
        }
    }
    Front::new(universe.clone(), elements).expect("built inside the universe")
}

/// `Ext(X/s)`, or `Ext(X/(s,t))` when two bases are given: legal tails of
/// `base` drawn from the universe beyond the depth of every base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSet {
    pub base: Approximation,
    pub universe: MemberTrunc,
    /// first universe position a tail may use
    pub start: usize,
    pub items: Vec<Vec<Block>>,
}

impl Serialize for ExtensionSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use itertools::Itertools;
        #[derive(Serialize)]
        struct Raw<'a> {
            base: &'a Approximation,
            universe: &'a MemberTrunc,
            start: usize,
            items: Vec<String>,
        }
        Raw {
            base: &self.base,
            universe: &self.universe,
            start: self.start,
            items: self.items.iter().map(|y| y.iter().join("|")).collect(),
        }
        .serialize(serializer)
    }
}

fn joint_depth(universe: &MemberTrunc, s: &Approximation, t: Option<&Approximation>) -> Result<usize> {
    let depth = |a: &Approximation| {
        depth_of(universe, a).ok_or_else(|| Error::Structure(format!("{a} does not lie inside {universe}")))
    };
    let ds = depth(s)?;
    Ok(match t {
        Some(t) => ds.max(depth(t)?),
        None => ds,
    })
}

pub fn ext(universe: &MemberTrunc, s: &Approximation, t: Option<&Approximation>) -> Result<ExtensionSet> {
    let start = joint_depth(universe, s, t)?;
    Ok(ExtensionSet {
        base: s.clone(),
        universe: universe.clone(),
        start,
        items: legal_tails(universe.blocks(), start, s.len(), None),
    })
}

/// Labels on the elements of a front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontRelation {
    labels: BTreeMap<Approximation, Label>,
}

impl FrontRelation {
    pub fn from_fn(f: &Front, mut label: impl FnMut(&Approximation) -> Label) -> Self {
        Self { labels: f.elements.iter().map(|a| (a.clone(), label(a))).collect() }
    }

    pub fn new(labels: BTreeMap<Approximation, Label>) -> Self {
        Self { labels }
    }

    pub fn label(&self, a: &Approximation) -> Option<Label> {
        self.labels.get(a).copied()
    }

    pub fn labels(&self) -> &BTreeMap<Approximation, Label> {
        &self.labels
    }

    pub fn check_total(&self, f: &Front) -> Result<()> {
        match f.elements.iter().find(|a| !self.labels.contains_key(a)) {
            Some(a) => Err(Error::Totality(format!("front element {a:?} has no label", a = a.to_string()))),
            None => Ok(()),
        }
    }
}

impl Serialize for FrontRelation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            labels: BTreeMap<String, Label>,
        }
        Raw { labels: self.labels.iter().map(|(a, &l)| (a.to_string(), l)).collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FrontRelation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            labels: BTreeMap<String, Label>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let labels = raw
            .labels
            .into_iter()
            .map(|(key, l)| key.parse::<Approximation>().map(|a| (a, l)))
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        Ok(FrontRelation { labels })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Separation {
    Separates,
    /// `s ∪ x` and `t ∪ y` carry the same label.
    Collides(Approximation, Approximation),
    /// One side has no completion inside the universe.
    Vacuous,
}

/// Does the tail of `e` after `base_len` blocks sit in `universe[start..]`?
fn tail_inside(e: &Approximation, base_len: usize, universe: &MemberTrunc, start: usize) -> bool {
    let allowed = &universe.blocks()[start..];
    e.blocks()[base_len..].iter().all(|u| {
        allowed
            .binary_search_by_key(&u.index(), Block::index)
            .is_ok_and(|pos| u.is_sub_block_of(&allowed[pos]))
    })
}

fn completions<'a>(
    f: &'a Front,
    base: &'a Approximation,
    universe: &'a MemberTrunc,
    start: usize,
) -> impl Iterator<Item = &'a Approximation> + 'a {
    f.elements
        .iter()
        .filter(move |e| e.blocks().starts_with(base.blocks()) && tail_inside(e, base.len(), universe, start))
}

pub fn separates(
    universe: &MemberTrunc,
    s: &Approximation,
    t: &Approximation,
    f: &Front,
    rel: &FrontRelation,
) -> Result<Separation> {
    rel.check_total(f)?;
    let start = joint_depth(universe, s, Some(t))?;
    let left: Vec<&Approximation> = completions(f, s, universe, start).collect();
    let mut right: HashMap<Label, &Approximation> = HashMap::new();
    for e in completions(f, t, universe, start) {
        right.entry(rel.label(e).expect("total")).or_insert(e);
    }
    if left.is_empty() || right.is_empty() {
        return Ok(Separation::Vacuous);
    }
    for x in left {
        if let Some(y) = right.get(&rel.label(x).expect("total")) {
            return Ok(Separation::Collides(x.clone(), (*y).clone()));
        }
    }
    Ok(Separation::Separates)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mixing {
    Mixed,
    SeparatedBy(MemberTrunc),
}

/// Truncation-relative mixing: no same-depth sub-member of `universe`
/// separates `s` and `t`. Limited to universes of depth at most 4.
pub fn mixes_truncated(
    universe: &MemberTrunc,
    s: &Approximation,
    t: &Approximation,
    f: &Front,
    rel: &FrontRelation,
) -> Result<Mixing> {
    if universe.depth() > 4 {
        return Err(Error::Usage(format!(
            "truncation-relative mixing is limited to depth 4, got {}",
            universe.depth()
        )));
    }
    for y in enumerate_submembers(universe, universe.depth()) {
        if depth_of(&y, s).is_none() || depth_of(&y, t).is_none() {
            continue;
        }
        if separates(&y, s, t, f, rel)? == Separation::Separates {
            return Ok(Mixing::SeparatedBy(y));
        }
    }
    Ok(Mixing::Mixed)
}

/// The trees `T_s` for `s ∈ F̂ ∖ F`, with `T_s ∈ 𝒯(|s|)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhiAssignment {
    trees: BTreeMap<Approximation, CanonicalTree>,
}

impl PhiAssignment {
    pub fn new(trees: BTreeMap<Approximation, CanonicalTree>) -> Result<Self> {
        if let Some((s, tree)) = trees.iter().find(|(s, tree)| tree.shape() != s.len()) {
            return Err(Error::Shape { expected: s.len(), found: tree.shape() });
        }
        Ok(Self { trees })
    }

    /// The same tree choice for every prefix, by length.
    pub fn uniform(f: &Front, mut tree: impl FnMut(&Approximation) -> CanonicalTree) -> Result<Self> {
        Self::new(f.inner_prefixes().into_iter().map(|s| {
            let t = tree(&s);
            (s, t)
        }).collect())
    }

    pub fn get(&self, s: &Approximation) -> Option<&CanonicalTree> {
        self.trees.get(s)
    }

    pub fn trees(&self) -> &BTreeMap<Approximation, CanonicalTree> {
        &self.trees
    }

    pub fn check_total(&self, f: &Front) -> Result<()> {
        match f.inner_prefixes().into_iter().find(|s| !self.trees.contains_key(s)) {
            Some(s) => Err(Error::Totality(format!("prefix {:?} has no tree", s.to_string()))),
            None => Ok(()),
        }
    }
}

impl Serialize for PhiAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            trees: BTreeMap<String, String>,
        }
        Raw { trees: self.trees.iter().map(|(s, t)| (s.to_string(), t.to_string())).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhiAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            trees: BTreeMap<String, String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let trees = raw
            .trees
            .iter()
            .map(|(key, text)| {
                let s: Approximation = key.parse()?;
                let tree = CanonicalTree::parse(text, s.len())?;
                Ok((s, tree))
            })
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        PhiAssignment::new(trees).map_err(serde::de::Error::custom)
    }
}

/// `φ` as an explicit table on the front.
pub type PhiMap = BTreeMap<Approximation, NodeSet>;

/// `φ(t) = ⋃_{i<|t|} π_{T_{r_i(t)}}(t(i))`.
pub fn build_phi(f: &Front, assign: &PhiAssignment, t: &Approximation) -> Result<NodeSet> {
    if !f.contains(t) {
        return Err(Error::Structure(format!("{:?} is not a front element", t.to_string())));
    }
    let mut image = NodeSet::root();
    for (i, prefix) in t.proper_prefixes().enumerate() {
        let tree = assign
            .get(&prefix)
            .ok_or_else(|| Error::Totality(format!("prefix {:?} has no tree", prefix.to_string())))?;
        image.extend(&project(tree, &t.blocks()[i])?.nodes());
    }
    Ok(image)
}

pub fn phi_map(f: &Front, assign: &PhiAssignment) -> Result<PhiMap> {
    f.elements.iter().map(|t| Ok((t.clone(), build_phi(f, assign, t)?))).collect()
}

/// Outcome of the inner / Nash-Williams / Sperner checks on `φ`.
///
/// The plain fields follow the literal pairwise definitions over distinct
/// elements; since any relation with a nontrivial class gives equal images,
/// the `_on_images` fields compare distinct images only, which is what a
/// canonizing map can satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiReport {
    pub inner: std::result::Result<(), Approximation>,
    pub nash_williams: PairCheck,
    pub sperner: PairCheck,
    pub nash_williams_on_images: PairCheck,
    pub sperner_on_images: PairCheck,
}

impl PhiReport {
    pub fn is_inner(&self) -> bool {
        self.inner.is_ok()
    }

    pub fn is_nash_williams(&self) -> bool {
        self.nash_williams.is_ok()
    }

    pub fn is_sperner(&self) -> bool {
        self.sperner.is_ok()
    }

    /// Inner, and Nash-Williams and Sperner on distinct images.
    pub fn is_canonical_shape(&self) -> bool {
        self.inner.is_ok() && self.nash_williams_on_images.is_ok() && self.sperner_on_images.is_ok()
    }
}

fn is_proper_subset(a: &NodeSet, b: &NodeSet) -> bool {
    a.len() < b.len() && a.is_subset(b)
}

fn first_pair<'a>(
    items: &[(&'a Approximation, &'a NodeSet)],
    bad: impl Fn(&NodeSet, &NodeSet) -> bool,
) -> PairCheck {
    for (a, pa) in items {
        for (b, pb) in items {
            if a != b && bad(pa, pb) {
                return Err(((*a).clone(), (*b).clone()));
            }
        }
    }
    Ok(())
}

/// Least representative of each distinct image.
fn image_representatives(phi: &PhiMap) -> Vec<(&Approximation, &NodeSet)> {
    let mut seen: HashMap<&NodeSet, &Approximation> = HashMap::new();
    for (a, image) in phi {
        seen.entry(image).or_insert(a);
    }
    let mut reps: Vec<(&Approximation, &NodeSet)> = seen.into_iter().map(|(image, a)| (a, image)).collect();
    reps.sort();
    reps
}

fn images_nash_williams(reps: &[(&Approximation, &NodeSet)]) -> PairCheck {
    first_pair(reps, |x, y| x.is_prefix_of(y))
}

fn images_sperner(reps: &[(&Approximation, &NodeSet)]) -> PairCheck {
    first_pair(reps, is_proper_subset)
}

pub fn check_inner_ns_sperner(f: &Front, phi: &PhiMap) -> Result<PhiReport> {
    let items: Vec<(&Approximation, &NodeSet)> = f
        .elements
        .iter()
        .map(|a| {
            phi.get(a)
                .map(|image| (a, image))
                .ok_or_else(|| Error::Totality(format!("φ is undefined at {:?}", a.to_string())))
        })
        .collect::<Result<_>>()?;
    let inner = match items.iter().find(|(a, image)| {
        let mut allowed = a.nodes();
        allowed.insert(Node::Root);
        !image.is_subtree() || !image.is_subset(&allowed)
    }) {
        Some((a, _)) => Err((*a).clone()),
        None => Ok(()),
    };
    let restricted: PhiMap = items.iter().map(|(a, image)| ((*a).clone(), (*image).clone())).collect();
    let reps = image_representatives(&restricted);
    Ok(PhiReport {
        inner,
        nash_williams: first_pair(&items, |x, y| x.is_prefix_of(y)),
        sperner: first_pair(&items, |x, y| x.is_subset(y)),
        nash_williams_on_images: images_nash_williams(&reps),
        sperner_on_images: images_sperner(&reps),
    })
}

/// Labels agree exactly when `φ`-images agree.
pub fn represents(f: &Front, phi: &PhiMap, rel: &FrontRelation) -> Result<PairCheck> {
    rel.check_total(f)?;
    let image = |a: &Approximation| {
        phi.get(a).ok_or_else(|| Error::Totality(format!("φ is undefined at {:?}", a.to_string())))
    };
    let mut by_label: HashMap<Label, &NodeSet> = HashMap::new();
    let mut by_image: HashMap<&NodeSet, Label> = HashMap::new();
    let mut consistent = true;
    for a in &f.elements {
        let (l, im) = (rel.label(a).expect("total"), image(a)?);
        consistent &= *by_label.entry(l).or_insert(im) == im && *by_image.entry(im).or_insert(l) == l;
    }
    if consistent {
        return Ok(Ok(()));
    }
    for (i, a) in f.elements.iter().enumerate() {
        for b in &f.elements[i + 1..] {
            if (rel.label(a) == rel.label(b)) != (image(a)? == image(b)?) {
                return Ok(Err((a.clone(), b.clone())));
            }
        }
    }
    unreachable!("hash check found an inconsistency the pair scan did not")
}

/// Property `(*)`: for each `s` some `t` has `φ(s) = φ(t) = s ∩ t`.
/// Returns the first `s` without such a `t`.
pub fn star_property(f: &Front, phi: &PhiMap) -> Option<Approximation> {
    let with_root = |a: &Approximation| {
        let mut nodes = a.nodes();
        nodes.insert(Node::Root);
        nodes
    };
    f.elements
        .iter()
        .find(|s| {
            let image = &phi[*s];
            let ns = with_root(s);
            !f.elements
                .iter()
                .any(|t| &phi[t] == image && ns.intersection(&with_root(t)) == *image)
        })
        .cloned()
}

/// First `t` with `φ′(t) ⊄ φ(t)`.
pub fn dominated_by(f: &Front, smaller: &PhiMap, larger: &PhiMap) -> Option<Approximation> {
    f.elements.iter().find(|t| !smaller[*t].is_subset(&larger[*t])).cloned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontCertificate {
    #[serde(rename = "C")]
    pub c: MemberTrunc,
    pub assign: PhiAssignment,
    pub verified_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrontOutcome {
    Found(FrontCertificate),
    Exhausted,
}

impl FrontOutcome {
    pub fn found(&self) -> Option<&FrontCertificate> {
        match self {
            FrontOutcome::Found(c) => Some(c),
            FrontOutcome::Exhausted => None,
        }
    }
}

/// Backtracking search for an assignment on one restricted front.
struct AssignSearch<'a> {
    prefixes: Vec<Approximation>,
    options: Vec<Vec<CanonicalTree>>,
    /// elements `p ∪ u` of the front, grouped by parent prefix
    children: Vec<Vec<&'a Approximation>>,
    /// prefix index of `r_i(e)` for every `i < |e|`
    chains: HashMap<&'a Approximation, Vec<usize>>,
    labels: &'a FrontRelation,
}

#[derive(Default)]
struct Tally<'a> {
    by_label: HashMap<Label, (NodeSet, usize)>,
    by_image: HashMap<NodeSet, (Label, usize)>,
    placed: Vec<(&'a Approximation, Label, NodeSet)>,
}

impl<'a> Tally<'a> {
    fn place(&mut self, e: &'a Approximation, label: Label, image: NodeSet) -> bool {
        if self.by_label.get(&label).is_some_and(|(im, _)| *im != image)
            || self.by_image.get(&image).is_some_and(|(l, _)| *l != label)
        {
            return false;
        }
        self.by_label.entry(label).or_insert_with(|| (image.clone(), 0)).1 += 1;
        self.by_image.entry(image.clone()).or_insert((label, 0)).1 += 1;
        self.placed.push((e, label, image));
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.placed.len() > mark {
            let (_, label, image) = self.placed.pop().expect("above mark");
            if let Some(slot) = self.by_label.get_mut(&label) {
                slot.1 -= 1;
                if slot.1 == 0 {
                    self.by_label.remove(&label);
                }
            }
            if let Some(slot) = self.by_image.get_mut(&image) {
                slot.1 -= 1;
                if slot.1 == 0 {
                    self.by_image.remove(&image);
                }
            }
        }
    }
}

impl<'a> AssignSearch<'a> {
    fn new(f: &'a Front, labels: &'a FrontRelation) -> Self {
        let prefixes = f.inner_prefixes();
        let index: HashMap<&Approximation, usize> = prefixes.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut children = vec![Vec::new(); prefixes.len()];
        let mut chains = HashMap::new();
        for e in &f.elements {
            let chain: Vec<usize> = e.proper_prefixes().map(|p| index[&p]).collect();
            if let Some(&parent) = chain.last() {
                children[parent].push(e);
            }
            chains.insert(e, chain);
        }
        let options = prefixes
            .iter()
            .zip(&children)
            .map(|(p, kids)| {
                let mut trees = all_trees(p.len());
                trees.sort_by_key(|t| std::cmp::Reverse(t.size()));
                let wanted = canonical_partition(kids.iter().map(|e| labels.label(e).expect("total")));
                trees.retain(|tree| {
                    canonical_partition(kids.iter().map(|e| project_unchecked(tree, e.last().expect("child"))))
                        == wanted
                });
                trees
            })
            .collect();
        Self { prefixes, options, children, chains, labels }
    }

    fn image(&self, e: &Approximation, choice: &[usize]) -> NodeSet {
        let mut image = NodeSet::root();
        for (i, &p) in self.chains[e].iter().enumerate() {
            let tree = &self.options[p][choice[p]];
            image.extend(&project_unchecked(tree, &e.blocks()[i]).nodes());
        }
        image
    }

    fn run(&self, empty_element: Option<&'a Approximation>) -> Option<Vec<usize>> {
        let mut tally = Tally::default();
        if let Some(e) = empty_element {
            tally.place(e, self.labels.label(e).expect("total"), NodeSet::root());
        }
        let mut choice = vec![0; self.prefixes.len()];
        self.dfs(0, &mut choice, &mut tally).then_some(choice)
    }

    fn dfs(&self, i: usize, choice: &mut Vec<usize>, tally: &mut Tally<'a>) -> bool {
        if i == self.prefixes.len() {
            let reps: Vec<(&Approximation, &NodeSet)> = {
                let mut reps: Vec<_> = tally.by_image.keys().map(|im| {
                    let (e, _, _) = tally.placed.iter().find(|(_, _, x)| x == im).expect("placed");
                    (*e, im)
                }).collect();
                reps.sort();
                reps
            };
            return images_nash_williams(&reps).is_ok() && images_sperner(&reps).is_ok();
        }
        for option in 0..self.options[i].len() {
            choice[i] = option;
            let mark = tally.placed.len();
            let ok = self.children[i].iter().all(|e| {
                let label = self.labels.label(e).expect("total");
                tally.place(e, label, self.image(e, choice))
            });
            if ok && self.dfs(i + 1, choice, tally) {
                return true;
            }
            tally.undo_to(mark);
        }
        false
    }

    fn into_assignment(self, choice: &[usize]) -> PhiAssignment {
        let trees = self
            .prefixes
            .into_iter()
            .zip(self.options)
            .zip(choice)
            .map(|((p, opts), &c)| (p, opts[c].clone()))
            .collect();
        PhiAssignment { trees }
    }
}

/// Searches sub-members `C` of the universe (deepest first, then
/// lexicographic) with at least `min_blocks` blocks, and for each an
/// assignment whose `φ` represents the relation on `F|C` and is inner,
/// Nash-Williams and Sperner on its images. Trees are tried largest first,
/// so the assignment found is maximal in the search order.
pub fn canonize_front(f: &Front, rel: &FrontRelation, min_blocks: usize) -> Result<FrontOutcome> {
    if let Err((a, b)) = is_nash_williams(f) {
        return Err(Error::Structure(format!("front is not Nash-Williams: {a:?} ⊏ {b:?}", a = a.to_string(), b = b.to_string())));
    }
    rel.check_total(f)?;
    let universe = f.universe();
    for depth in (min_blocks.max(1)..=universe.depth()).rev() {
        for c in enumerate_submembers(universe, depth) {
            let restricted = f.restrict(&c);
            if restricted.is_empty() {
                continue;
            }
            let search = AssignSearch::new(&restricted, rel);
            let empty = restricted.elements.iter().find(|e| e.is_empty());
            let Some(choice) = search.run(empty) else { continue };
            let assign = search.into_assignment(&choice);
            let mut cert = FrontCertificate { c, assign, verified_pairs: 0 };
            cert.verified_pairs = verify_front_certificate(f, rel, &cert)?;
            return Ok(FrontOutcome::Found(cert));
        }
    }
    Ok(FrontOutcome::Exhausted)
}

/// Independent re-check: `C` lies in the universe, the assignment is total
/// on `(F|C)^ ∖ F|C`, and the resulting `φ` is inner, Nash-Williams and
/// Sperner on images and agrees with the labels on every pair.
pub fn verify_front_certificate(f: &Front, rel: &FrontRelation, cert: &FrontCertificate) -> Result<usize> {
    if !le_member(&cert.c, f.universe()) {
        return Err(Error::Structure(format!("C = {} is not inside the universe", cert.c)));
    }
    let restricted = f.restrict(&cert.c);
    cert.assign.check_total(&restricted)?;
    let phi = phi_map(&restricted, &cert.assign)?;
    let report = check_inner_ns_sperner(&restricted, &phi)?;
    if !report.is_canonical_shape() {
        return Err(Error::Structure(format!("φ fails inner/Nash-Williams/Sperner: {report:?}")));
    }
    let elements = restricted.elements();
    let mut pairs = 0;
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            let same_label = rel.label(a).expect("checked") == rel.label(b).expect("checked");
            if same_label != (phi[a] == phi[b]) {
                return Err(Error::Structure(format!(
                    "pair {:?}, {:?}: labels equal = {same_label}, images equal = {}",
                    a.to_string(),
                    b.to_string(),
                    !same_label
                )));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}
