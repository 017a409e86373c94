//! Certificate-producing canonization of equivalence relations on `AR_n|A`
//! and on the shape-`n` blocks of `A`.
//!
//! Both searches scan sub-members of the universe from deepest to shallowest
//! (lexicographic within a depth) and, for each, every candidate canonical
//! object. A candidate matches when it induces the same partition as the
//! labels; the returned certificate is re-checked pair by pair with a
//! projection computed independently of [`crate::canon::project`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{all_trees, canonical_partition, enumerate_treeseqs, relation_table, CanonicalTree, TreeKind, TreeSeq};
use crate::ellentuck::Label;
use crate::error::{Error, Result};
use crate::space::{
    enumerate_approx, enumerate_submembers, enumerate_subtrees, le_member, Approximation, Block, BlockSeq,
    MemberTrunc, Node, NodeSet,
};

/// Labels on `AR_n|universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ARnRelation {
    n: usize,
    universe: MemberTrunc,
    labels: BTreeMap<Approximation, Label>,
}

impl ARnRelation {
    pub fn new(n: usize, universe: MemberTrunc, labels: BTreeMap<Approximation, Label>) -> Result<Self> {
        if let Some(a) = enumerate_approx(&universe, n).into_iter().find(|a| !labels.contains_key(a)) {
            return Err(Error::Totality(format!("{:?} has no label", a.to_string())));
        }
        Ok(Self { n, universe, labels })
    }

    pub fn from_fn(n: usize, universe: MemberTrunc, mut f: impl FnMut(&Approximation) -> Label) -> Self {
        let labels = enumerate_approx(&universe, n)
            .into_iter()
            .map(|a| {
                let l = f(&a);
                (a, l)
            })
            .collect();
        Self { n, universe, labels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &MemberTrunc {
        &self.universe
    }

    pub fn label(&self, a: &Approximation) -> Option<Label> {
        self.labels.get(a).copied()
    }

    pub fn labels(&self) -> &BTreeMap<Approximation, Label> {
        &self.labels
    }
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    n: usize,
    universe: MemberTrunc,
    labels: BTreeMap<String, Label>,
}

impl Serialize for ARnRelation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawRelation {
            n: self.n,
            universe: self.universe.clone(),
            labels: self.labels.iter().map(|(a, &l)| (a.to_string(), l)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ARnRelation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawRelation::deserialize(deserializer)?;
        let labels = raw
            .labels
            .iter()
            .map(|(key, &l)| key.parse::<Approximation>().map(|a| (a, l)))
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        ARnRelation::new(raw.n, raw.universe, labels).map_err(serde::de::Error::custom)
    }
}

/// Labels on the shape-`n` blocks of the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R1nRelation {
    n: usize,
    universe: MemberTrunc,
    labels: BTreeMap<Block, Label>,
}

impl R1nRelation {
    pub fn new(n: usize, universe: MemberTrunc, labels: BTreeMap<Block, Label>) -> Result<Self> {
        let domain = enumerate_subtrees(&universe, n, &Approximation::empty());
        if let Some(u) = domain.iter().find(|u| !labels.contains_key(u)) {
            return Err(Error::Totality(format!("block {u} has no label")));
        }
        Ok(Self { n, universe, labels })
    }

    pub fn from_fn(n: usize, universe: MemberTrunc, mut f: impl FnMut(&Block) -> Label) -> Self {
        let labels = enumerate_subtrees(&universe, n, &Approximation::empty())
            .into_iter()
            .map(|u| {
                let l = f(&u);
                (u, l)
            })
            .collect();
        Self { n, universe, labels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &MemberTrunc {
        &self.universe
    }

    pub fn label(&self, u: &Block) -> Option<Label> {
        self.labels.get(u).copied()
    }
}

impl Serialize for R1nRelation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawRelation {
            n: self.n,
            universe: self.universe.clone(),
            labels: self.labels.iter().map(|(u, &l)| (u.to_string(), l)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for R1nRelation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawRelation::deserialize(deserializer)?;
        let labels = raw
            .labels
            .iter()
            .map(|(key, &l)| key.parse::<Block>().map(|u| (u, l)))
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        R1nRelation::new(raw.n, raw.universe, labels).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonCertificate {
    pub d: MemberTrunc,
    pub seq: TreeSeq,
    pub verified_pairs: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCertificate {
    #[serde(rename = "D")]
    d: MemberTrunc,
    seq: String,
    verified_pairs: usize,
    outcome: String,
}

impl Serialize for CanonCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawCertificate {
            d: self.d.clone(),
            seq: self.seq.to_string(),
            verified_pairs: self.verified_pairs,
            outcome: "ok".into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CanonCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawCertificate::deserialize(deserializer)?;
        if raw.outcome != "ok" {
            return Err(D::Error::custom(format!("unexpected outcome {:?}", raw.outcome)));
        }
        Ok(CanonCertificate { d: raw.d, seq: raw.seq.parse().map_err(D::Error::custom)?, verified_pairs: raw.verified_pairs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct R1nCertificate {
    #[serde(rename = "C")]
    pub c: MemberTrunc,
    #[serde(with = "tree_text")]
    pub tree: CanonicalTree,
    pub verified_pairs: usize,
}

mod tree_text {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::canon::CanonicalTree;

    #[derive(Serialize, Deserialize)]
    struct Raw {
        n: usize,
        tree: String,
    }

    pub fn serialize<S: Serializer>(tree: &CanonicalTree, serializer: S) -> Result<S::Ok, S::Error> {
        Raw { n: tree.shape(), tree: tree.to_string() }.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<CanonicalTree, D::Error> {
        let raw = Raw::deserialize(deserializer)?;
        CanonicalTree::parse(&raw.tree, raw.n).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Canonized<C> {
    Found(C),
    Exhausted,
}

impl<C> Canonized<C> {
    pub fn found(&self) -> Option<&C> {
        match self {
            Canonized::Found(c) => Some(c),
            Canonized::Exhausted => None,
        }
    }
}

/// Sub-members of the universe with at least `min_blocks` blocks, deepest
/// first and lexicographic within a depth.
fn candidates(universe: &MemberTrunc, min_blocks: usize) -> Vec<MemberTrunc> {
    (min_blocks..=universe.depth())
        .rev()
        .flat_map(|depth| enumerate_submembers(universe, depth))
        .collect()
}

pub fn canonize_arn(rel: &ARnRelation, min_blocks: usize) -> Result<Canonized<CanonCertificate>> {
    let n = rel.n;
    if n == 0 || min_blocks < n {
        return Err(Error::Usage(format!("need 1 ≤ n ≤ min_blocks, got n = {n}, min_blocks = {min_blocks}")));
    }
    let seqs = enumerate_treeseqs(n);
    let found = candidates(&rel.universe, min_blocks).into_par_iter().find_map_first(|d| {
        let elems = enumerate_approx(&d, n);
        let wanted = canonical_partition(elems.iter().map(|a| rel.label(a).expect("total on the universe")));
        seqs.iter()
            .find(|seq| relation_table(seq, &elems).expect("shapes match") == wanted)
            .map(|seq| (d, seq.clone()))
    });
    let Some((d, seq)) = found else {
        return Ok(Canonized::Exhausted);
    };
    let mut cert = CanonCertificate { d, seq, verified_pairs: 0 };
    cert.verified_pairs = verify_arn(rel, &cert)?;
    Ok(Canonized::Found(cert))
}

pub fn canonize_r1n(rel: &R1nRelation, min_blocks: usize) -> Result<Canonized<R1nCertificate>> {
    let n = rel.n;
    if min_blocks <= n {
        return Err(Error::Usage(format!("shape-{n} blocks need min_blocks > {n}, got {min_blocks}")));
    }
    let trees = all_trees(n);
    let found = candidates(&rel.universe, min_blocks).into_par_iter().find_map_first(|c| {
        let blocks = enumerate_subtrees(&c, n, &Approximation::empty());
        let wanted = canonical_partition(blocks.iter().map(|u| rel.label(u).expect("total on the universe")));
        trees
            .iter()
            .find(|tree| canonical_partition(blocks.iter().map(|u| projected_nodes(tree, u))) == wanted)
            .map(|tree| (c, tree.clone()))
    });
    let Some((c, tree)) = found else {
        return Ok(Canonized::Exhausted);
    };
    let mut cert = R1nCertificate { c, tree, verified_pairs: 0 };
    cert.verified_pairs = verify_r1n(rel, &cert)?;
    Ok(Canonized::Found(cert))
}

/// `π_T(u)` as a node set, read off the tree kind directly.
fn projected_nodes(tree: &CanonicalTree, u: &Block) -> NodeSet {
    let mut nodes = NodeSet::root();
    match tree.kind() {
        TreeKind::Empty => {}
        TreeKind::Stem => {
            nodes.insert(Node::Stem(u.index()));
        }
        TreeKind::Leaves(positions) => {
            nodes.insert(Node::Stem(u.index()));
            for &p in positions {
                nodes.insert(Node::Leaf(u.index(), u.leaves()[p]));
            }
        }
    }
    nodes
}

fn check_inside(d: &MemberTrunc, universe: &MemberTrunc, min: usize) -> Result<()> {
    if !le_member(d, universe) {
        return Err(Error::Structure(format!("{d} is not a sub-member of the universe {universe}")));
    }
    if d.depth() < min {
        return Err(Error::Structure(format!("{d} has fewer than {min} blocks")));
    }
    Ok(())
}

fn pairwise<T>(items: &[T], key: impl Fn(&T) -> NodeSetKey, label: impl Fn(&T) -> Result<Label>, show: impl Fn(&T) -> String) -> Result<usize> {
    let keys: Vec<NodeSetKey> = items.iter().map(&key).collect();
    let labels: Vec<Label> = items.iter().map(&label).collect::<Result<_>>()?;
    let mut pairs = 0;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let same_label = labels[i] == labels[j];
            if same_label != (keys[i] == keys[j]) {
                return Err(Error::Structure(format!(
                    "{} and {}: labels {} but projections {}",
                    show(&items[i]),
                    show(&items[j]),
                    if same_label { "agree" } else { "differ" },
                    if same_label { "differ" } else { "agree" },
                )));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

type NodeSetKey = Vec<NodeSet>;

/// Exhaustive pair check of an `AR_n` certificate; returns the pair count.
pub fn verify_arn(rel: &ARnRelation, cert: &CanonCertificate) -> Result<usize> {
    check_inside(&cert.d, &rel.universe, rel.n)?;
    if cert.seq.len() != rel.n {
        return Err(Error::Arity { expected: rel.n, found: cert.seq.len() });
    }
    let elems = enumerate_approx(&cert.d, rel.n);
    pairwise(
        &elems,
        |a| cert.seq.trees().iter().zip(a.blocks()).map(|(tree, u)| projected_nodes(tree, u)).collect(),
        |a| rel.label(a).ok_or_else(|| Error::Totality(format!("{:?} has no label", a.to_string()))),
        |a| format!("{:?}", a.to_string()),
    )
}

/// Exhaustive pair check of a shape-`n` certificate; returns the pair count.
pub fn verify_r1n(rel: &R1nRelation, cert: &R1nCertificate) -> Result<usize> {
    check_inside(&cert.c, &rel.universe, rel.n + 1)?;
    if cert.tree.shape() != rel.n {
        return Err(Error::Shape { expected: rel.n, found: cert.tree.shape() });
    }
    let blocks = enumerate_subtrees(&cert.c, rel.n, &Approximation::empty());
    pairwise(
        &blocks,
        |u| vec![projected_nodes(&cert.tree, u)],
        |u| rel.label(u).ok_or_else(|| Error::Totality(format!("block {u} has no label"))),
        |u| u.to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_equiv;
    use crate::space::tree_trunc;
    use std::collections::HashMap;

    fn planted(seq: &TreeSeq, universe: &MemberTrunc) -> ARnRelation {
        let mut ids: HashMap<Vec<_>, Label> = HashMap::new();
        ARnRelation::from_fn(seq.len(), universe.clone(), |a| {
            let next = ids.len() as Label;
            *ids.entry(seq.key(a).unwrap()).or_insert(next)
        })
    }

    fn relation_equal(seq: &TreeSeq, other: &TreeSeq, d: &MemberTrunc) -> bool {
        let elems = enumerate_approx(d, seq.len());
        elems.iter().all(|a| {
            elems
                .iter()
                .all(|b| canonical_equiv(seq, a, b).unwrap() == canonical_equiv(other, a, b).unwrap())
        })
    }

    #[test]
    fn planted_seq_is_recovered() {
        let u = tree_trunc(5);
        let seq: TreeSeq = "L{0};S".parse().unwrap();
        let cert = canonize_arn(&planted(&seq, &u), 2).unwrap().found().cloned().unwrap();
        assert_eq!(cert.d, u);
        assert!(relation_equal(&seq, &cert.seq, &u));
    }

    #[test]
    fn extreme_relations() {
        let u = tree_trunc(4);
        let all = ARnRelation::from_fn(2, u.clone(), |_| 0);
        let cert = canonize_arn(&all, 2).unwrap().found().cloned().unwrap();
        assert_eq!((cert.d.clone(), cert.seq.clone()), (u.clone(), TreeSeq::all_empty(2)));
        let mut next = 0;
        let eq = ARnRelation::from_fn(2, u.clone(), |_| {
            next += 1;
            next
        });
        let cert = canonize_arn(&eq, 2).unwrap().found().cloned().unwrap();
        assert_eq!((cert.d, cert.seq), (u, TreeSeq::all_full(2)));
    }

    #[test]
    fn random_relation_result_verifies() {
        let u = tree_trunc(7);
        let mut state = 12345u64;
        let rel = ARnRelation::from_fn(1, u, |_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 62) % 2
        });
        if let Canonized::Found(cert) = canonize_arn(&rel, 3).unwrap() {
            assert!(verify_arn(&rel, &cert).is_ok());
        }
    }

    #[test]
    fn flipped_label_fails_verification() {
        let u = tree_trunc(4);
        let seq: TreeSeq = "L{0};L{1}".parse().unwrap();
        let rel = planted(&seq, &u);
        let cert = canonize_arn(&rel, 2).unwrap().found().cloned().unwrap();
        let mut labels = rel.labels().clone();
        let first = labels.keys().next().cloned().unwrap();
        let other = *labels.values().last().unwrap();
        labels.insert(first, other);
        let tampered = ARnRelation::new(2, u, labels).unwrap();
        assert!(matches!(verify_arn(&tampered, &cert), Err(Error::Structure(_))));
    }

    #[test]
    fn r1n_examples() {
        let u = tree_trunc(5);
        let stem = R1nRelation::from_fn(1, u.clone(), |b| b.index() as Label);
        let cert = canonize_r1n(&stem, 2).unwrap().found().cloned().unwrap();
        assert_eq!((cert.c.clone(), cert.tree.clone()), (u.clone(), CanonicalTree::stem(1)));
        let all = R1nRelation::from_fn(1, u.clone(), |_| 0);
        assert_eq!(canonize_r1n(&all, 2).unwrap().found().unwrap().tree, CanonicalTree::empty(1));
        let min_leaf = R1nRelation::from_fn(2, u.clone(), |b| (b.index() * 100 + b.leaves()[0]) as Label);
        let cert = canonize_r1n(&min_leaf, 3).unwrap().found().cloned().unwrap();
        assert_eq!((cert.c.clone(), cert.tree.clone()), (u, CanonicalTree::leaves(2, [0]).unwrap()));
        assert_eq!(verify_r1n(&min_leaf, &cert).unwrap(), cert.verified_pairs);
    }

    #[test]
    fn certificate_outside_universe_fails() {
        let u = tree_trunc(4);
        let rel = ARnRelation::from_fn(1, u.clone(), |_| 0);
        let cert = CanonCertificate { d: tree_trunc(5), seq: TreeSeq::all_empty(1), verified_pairs: 0 };
        assert!(matches!(verify_arn(&rel, &cert), Err(Error::Structure(_))));
    }

    #[test]
    fn certificate_json() {
        let cert = CanonCertificate { d: tree_trunc(2), seq: "E;L{1}".parse().unwrap(), verified_pairs: 3 };
        let json = serde_json::to_string(&cert).unwrap();
        assert!(json.contains(r#""seq":"E;L{1}""#) && json.contains(r#""outcome":"ok""#) && json.contains(r#""D":"#));
        assert_eq!(serde_json::from_str::<CanonCertificate>(&json).unwrap(), cert);
        let rel = ARnRelation::from_fn(1, tree_trunc(2), |a| a.blocks()[0].index() as Label);
        let back: ARnRelation = serde_json::from_str(&serde_json::to_string(&rel).unwrap()).unwrap();
        assert_eq!(back, rel);
    }
}
