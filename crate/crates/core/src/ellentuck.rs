//! The classical baseline on `[N]^k`: the relations `E_I`, a finite Ramsey
//! search, and a certificate-producing Erdős–Rado canonizer.
//!
//! Both searches are exhaustive and ordered by subset size (descending), then
//! lexicographically, so "exhausted" means no witness exists inside `[N]`.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = u64;

/// A `k`-element subset of `ℕ`, increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KSet(Vec<usize>);

impl KSet {
    pub fn new(mut elems: Vec<usize>) -> Result<Self> {
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("repeated element in {elems:?}")));
        }
        Ok(Self(elems))
    }

    pub fn elems(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join(","))
    }
}

/// `I ⊆ {0, …, k−1}`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(k: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&i) = indices.iter().find(|&&i| i >= k) {
            return Err(Error::Parse(format!("index {i} not below k = {k}")));
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Every `I ⊆ {0..k}` in lexicographic order of the sorted index list.
    pub fn all(k: usize) -> Vec<IndexSet> {
        let mut sets: Vec<Vec<usize>> = (0..=k).flat_map(|s| (0..k).combinations(s)).collect();
        sets.sort();
        sets.into_iter().map(IndexSet).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// `x E_I y`: `x_i = y_i` for every `i ∈ I`.
pub fn e_i_equiv(index_set: &IndexSet, x: &KSet, y: &KSet) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Arity { expected: x.len(), found: y.len() });
    }
    if let Some(&i) = index_set.0.iter().find(|&&i| i >= x.len()) {
        return Err(Error::Arity { expected: x.len(), found: i + 1 });
    }
    Ok(index_set.0.iter().all(|&i| x.0[i] == y.0[i]))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A total labeling of `[N]^k`; equal labels define the equivalence relation
/// (or the coloring, for Ramsey searches).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    k: usize,
    n: usize,
    /// indexed by colex rank
    labels: Vec<Label>,
}

impl RelationTable {
    pub fn from_fn(k: usize, n: usize, mut f: impl FnMut(&KSet) -> Label) -> Self {
        let mut labels = vec![0; binomial(n, k)];
        for elems in (0..n).combinations(k) {
            let set = KSet(elems);
            labels[colex_rank(set.elems())] = f(&set);
        }
        Self { k, n, labels }
    }

    /// Builds a table from an explicit map; every k-set of `[N]` must appear.
    pub fn from_map(k: usize, n: usize, map: &BTreeMap<KSet, Label>) -> Result<Self> {
        let mut missing = None;
        let table = Self::from_fn(k, n, |set| match map.get(set) {
            Some(&label) => label,
            None => {
                missing.get_or_insert_with(|| set.clone());
                0
            }
        });
        if let Some(set) = missing {
            return Err(Error::Totality(format!("no label for k-set {set}")));
        }
        if let Some(extra) = map.keys().find(|s| s.len() != k || s.0.iter().any(|&x| x >= n)) {
            return Err(Error::Totality(format!("k-set {extra} lies outside [{n}]^{k}")));
        }
        Ok(table)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, set: &KSet) -> Label {
        self.label_of(set.elems())
    }

    fn label_of(&self, elems: &[usize]) -> Label {
        self.labels[colex_rank(elems)]
    }

    /// All k-sets in lexicographic order with their labels.
    pub fn entries(&self) -> impl Iterator<Item = (KSet, Label)> + '_ {
        (0..self.n).combinations(self.k).map(move |elems| {
            let label = self.label_of(&elems);
            (KSet(elems), label)
        })
    }

    pub fn to_map(&self) -> BTreeMap<KSet, Label> {
        self.entries().collect()
    }
}

fn colex_rank(elems: &[usize]) -> usize {
    elems.iter().enumerate().map(|(i, &x)| binomial(x, i + 1)).sum()
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    labels: BTreeMap<String, Label>,
}

impl Serialize for RelationTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawTable {
            k: self.k,
            n: self.n,
            labels: self.entries().map(|(set, label)| (set.to_string(), label)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RelationTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawTable::deserialize(deserializer)?;
        let mut map = BTreeMap::new();
        for (key, label) in raw.labels {
            let elems = key
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| D::Error::custom(format!("bad k-set key {key:?}")))?;
            map.insert(KSet::new(elems).map_err(D::Error::custom)?, label);
        }
        RelationTable::from_map(raw.k, raw.n, &map).map_err(D::Error::custom)
    }
}

/// Lexicographically first `size`-subset of `0..n` accepted by a hereditary
/// predicate, built one element at a time. `extend` receives the state of
/// the current partial set, the set itself and the new (largest) element,
/// and returns the new state or `None` to prune.
fn lex_first_subset<S>(
    n: usize,
    size: usize,
    init: S,
    extend: &mut impl FnMut(&S, &[usize], usize) -> Option<S>,
) -> Option<(Vec<usize>, S)> {
    fn go<S>(
        n: usize,
        size: usize,
        start: usize,
        current: &mut Vec<usize>,
        state: S,
        extend: &mut impl FnMut(&S, &[usize], usize) -> Option<S>,
    ) -> Option<(Vec<usize>, S)> {
        if current.len() == size {
            return Some((current.clone(), state));
        }
        let needed = size - current.len();
        for x in start..=n.saturating_sub(needed) {
            if let Some(next) = extend(&state, current, x) {
                current.push(x);
                if let Some(found) = go(n, size, x + 1, current, next, extend) {
                    return Some(found);
                }
                current.pop();
            }
        }
        None
    }
    if size > n {
        return None;
    }
    go(n, size, 0, &mut Vec::with_capacity(size), init, extend)
}

/// The `k`-sets of `current ∪ {x}` that contain `x`.
fn new_ksets(current: &[usize], x: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    current
        .iter()
        .copied()
        .combinations(k - 1)
        .map(|mut s| {
            s.push(x);
            s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyWitness {
    pub set: Vec<usize>,
    pub color: Label,
    /// No monochromatic set of size `|set| + 1` exists in `[N]`.
    pub maximum: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamseyOutcome {
    Found(RamseyWitness),
    Exhausted,
}

impl RamseyOutcome {
    pub fn found(&self) -> Option<&RamseyWitness> {
        match self {
            RamseyOutcome::Found(w) => Some(w),
            RamseyOutcome::Exhausted => None,
        }
    }
}

/// Lexicographically least monochromatic subset of exactly `size` elements.
pub fn monochromatic_of_size(c: &RelationTable, size: usize) -> Option<(Vec<usize>, Option<Label>)> {
    let k = c.k;
    let mut extend = |color: &Option<Label>, current: &[usize], x: usize| {
        let mut color = *color;
        for set in new_ksets(current, x, k) {
            let label = c.label_of(&set);
            match color {
                None => color = Some(label),
                Some(existing) if existing != label => return None,
                Some(_) => {}
            }
        }
        Some(color)
    };
    lex_first_subset(c.n, size, None, &mut extend)
}

/// Largest monochromatic `M ⊆ [N]` with `|M| ≥ target`, lexicographically
/// least among those of maximum size.
pub fn finite_ramsey(c: &RelationTable, target: usize) -> Result<RamseyOutcome> {
    if c.k == 0 || target < c.k {
        return Err(Error::Usage(format!(
            "finite_ramsey needs k ≥ 1 and target ≥ k (k = {}, target = {target})",
            c.k
        )));
    }
    for size in (target..=c.n).rev() {
        if let Some((set, color)) = monochromatic_of_size(c, size) {
            let color = color.expect("size ≥ k gives at least one k-set");
            let witness = RamseyWitness { set, color, maximum: true };
            debug_assert!(verify_monochromatic(c, &witness.set).is_ok());
            return Ok(RamseyOutcome::Found(witness));
        }
    }
    Ok(RamseyOutcome::Exhausted)
}

/// Brute-force check that `c` is constant on `[set]^k`; returns the color or
/// the first pair of k-sets with different colors.
pub fn verify_monochromatic(c: &RelationTable, set: &[usize]) -> std::result::Result<Option<Label>, (KSet, KSet)> {
    let all: Vec<Vec<usize>> = set.iter().copied().combinations(c.k).collect();
    let Some(first) = all.first() else { return Ok(None) };
    let color = c.label_of(first);
    match all.iter().find(|s| c.label_of(s) != color) {
        Some(bad) => Err((KSet(first.clone()), KSet(bad.clone()))),
        None => Ok(Some(color)),
    }
}

/// Brute-force check of maximality: no `(|set|+1)`-subset of `[N]` is
/// monochromatic.
pub fn verify_ramsey_maximum(c: &RelationTable, size: usize) -> bool {
    (0..c.n)
        .combinations(size + 1)
        .all(|s| verify_monochromatic(c, &s).is_err())
}

/// An Erdős–Rado witness: `E` agrees with `E_I` on all of `[M]^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErCertificate {
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    #[serde(rename = "I")]
    pub index_set: IndexSet,
    pub verified_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErOutcome {
    Found(ErCertificate),
    Exhausted,
}

impl ErOutcome {
    pub fn found(&self) -> Option<&ErCertificate> {
        match self {
            ErOutcome::Found(c) => Some(c),
            ErOutcome::Exhausted => None,
        }
    }
}

fn e_i_holds(index_mask: usize, x: &[usize], y: &[usize]) -> bool {
    x.iter()
        .zip(y)
        .enumerate()
        .all(|(i, (a, b))| index_mask & (1 << i) == 0 || a == b)
}

/// Searches pairs `(M, I)` with `|M| ≥ target` and `E↾[M]^k = E_I↾[M]^k`,
/// ordered by `|M|` descending, then `M`, then `I` lexicographically.
pub fn er_canonize(e: &RelationTable, target: usize) -> Result<ErOutcome> {
    let k = e.k;
    if target < k + 1 {
        return Err(Error::Usage(format!("er_canonize needs target ≥ k + 1 = {}", k + 1)));
    }
    // viable index sets are tracked in a u64
    if k > 6 {
        return Err(Error::Usage(format!("k = {k} is too large for the Erdős–Rado search")));
    }
    let index_sets = IndexSet::all(k);
    let masks: Vec<usize> = index_sets
        .iter()
        .map(|s| s.0.iter().fold(0, |m, &i| m | (1 << i)))
        .collect();

    // state: (viable index sets as a bitmask over `masks`, k-sets of the partial M)
    type State = (u64, Vec<Vec<usize>>);
    let all_viable: u64 = if masks.len() == 64 { u64::MAX } else { (1u64 << masks.len()) - 1 };
    let mut extend = |state: &State, current: &[usize], x: usize| -> Option<State> {
        let (mut viable, mut sets) = state.clone();
        let fresh = new_ksets(current, x, k);
        let start = sets.len();
        sets.extend(fresh);
        for (ai, a) in sets.iter().enumerate().skip(start) {
            let la = e.label_of(a);
            for b in &sets[..ai] {
                let same = la == e.label_of(b);
                for (bit, &mask) in masks.iter().enumerate() {
                    if viable & (1 << bit) != 0 && same != e_i_holds(mask, a, b) {
                        viable &= !(1 << bit);
                    }
                }
                if viable == 0 {
                    return None;
                }
            }
        }
        Some((viable, sets))
    };
    for size in (target..=e.n).rev() {
        if let Some((m, (viable, _))) = lex_first_subset(e.n, size, (all_viable, Vec::new()), &mut extend) {
            let bit = viable.trailing_zeros() as usize;
            let index_set = index_sets[bit].clone();
            let verified_pairs = verify_er(e, &m, &index_set).map_err(|(x, y)| {
                Error::Structure(format!("search produced an invalid certificate at {x} / {y}"))
            })?;
            return Ok(ErOutcome::Found(ErCertificate { m, index_set, verified_pairs }));
        }
    }
    Ok(ErOutcome::Exhausted)
}

/// Exhaustive pair check of `E ↔ E_I` on `[M]^k`, written directly from the
/// definition. Returns the number of unordered pairs compared.
pub fn verify_er(e: &RelationTable, m: &[usize], index_set: &IndexSet) -> std::result::Result<usize, (KSet, KSet)> {
    if m.iter().any(|&x| x >= e.n) || m.windows(2).any(|w| w[0] >= w[1]) {
        return Err((KSet(m.to_vec()), KSet(Vec::new())));
    }
    let sets: Vec<KSet> = m.iter().copied().combinations(e.k).map(KSet).collect();
    let mut pairs = 0;
    for (i, x) in sets.iter().enumerate() {
        for y in &sets[i + 1..] {
            let related = e.label(x) == e.label(y);
            let coordinatewise = index_set.0.iter().all(|&j| x.0[j] == y.0[j]);
            if related != coordinatewise {
                return Err((x.clone(), y.clone()));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

/// Two-color diagonal Ramsey numbers `R(s, s)` for graphs.
pub fn diagonal_ramsey(s: usize) -> Option<usize> {
    match s {
        0 => Some(0),
        1 => Some(1),
        2 => Some(2),
        3 => Some(6),
        4 => Some(18),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kset(xs: &[usize]) -> KSet {
        KSet::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn e_i_examples() {
        let i0 = IndexSet::new(2, vec![0]).unwrap();
        assert!(e_i_equiv(&i0, &kset(&[1, 3]), &kset(&[1, 5])).unwrap());
        let none = IndexSet::new(2, vec![]).unwrap();
        assert!(e_i_equiv(&none, &kset(&[0, 4]), &kset(&[2, 3])).unwrap());
        let both = IndexSet::new(2, vec![0, 1]).unwrap();
        assert!(!e_i_equiv(&both, &kset(&[1, 3]), &kset(&[1, 5])).unwrap());
        assert!(e_i_equiv(&both, &kset(&[1]), &kset(&[1, 5])).is_err());
    }

    #[test]
    fn index_sets_in_order() {
        let names: Vec<String> = IndexSet::all(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["{}", "{0}", "{0,1}", "{1}"]);
    }

    #[test]
    fn table_lookup_and_json() {
        let t = RelationTable::from_fn(2, 4, |s| (s.elems()[0] * 10 + s.elems()[1]) as Label);
        assert_eq!(t.label(&kset(&[1, 3])), 13);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#""N":4"#) && json.contains(r#""1,3":13"#));
        let back: RelationTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let partial = r#"{"k":1,"N":2,"labels":{"0":1}}"#;
        assert!(serde_json::from_str::<RelationTable>(partial).is_err());
    }

    #[test]
    fn ramsey_constant_coloring() {
        let c = RelationTable::from_fn(2, 5, |_| 7);
        let w = finite_ramsey(&c, 3).unwrap();
        assert_eq!(w.found().unwrap().set, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ramsey_parity_sum() {
        let c = RelationTable::from_fn(2, 5, |s| (s.elems().iter().sum::<usize>() % 2) as Label);
        let w = finite_ramsey(&c, 3).unwrap();
        let w = w.found().unwrap();
        assert_eq!(w.set, vec![0, 2, 4]);
        assert_eq!(w.color, 0);
        assert!(verify_ramsey_maximum(&c, w.set.len()));
    }

    #[test]
    fn ramsey_pentagon_has_no_triangle() {
        // C5 and its complement: edges of the 5-cycle get color 1
        let c = RelationTable::from_fn(2, 5, |s| {
            let (a, b) = (s.elems()[0], s.elems()[1]);
            Label::from(b - a == 1 || b - a == 4)
        });
        assert_eq!(finite_ramsey(&c, 3).unwrap(), RamseyOutcome::Exhausted);
        // brute force agrees
        assert!((0..5).combinations(3).all(|s| verify_monochromatic(&c, &s).is_err()));
    }

    #[test]
    fn er_global_first_coordinate() {
        let e = RelationTable::from_fn(2, 6, |s| s.elems()[0] as Label);
        let cert = er_canonize(&e, 4).unwrap();
        let cert = cert.found().unwrap();
        assert_eq!(cert.m, (0..6).collect::<Vec<_>>());
        assert_eq!(cert.index_set, IndexSet::new(2, vec![0]).unwrap());
        assert_eq!(cert.verified_pairs, 15 * 14 / 2);
    }

    #[test]
    fn er_parity_sum_collapses() {
        let e = RelationTable::from_fn(2, 8, |s| (s.elems().iter().sum::<usize>() % 2) as Label);
        let cert = er_canonize(&e, 3).unwrap();
        let cert = cert.found().unwrap();
        assert_eq!(cert.index_set, IndexSet::new(2, vec![]).unwrap());
        assert_eq!(cert.m, vec![0, 2, 4, 6]);
    }

    #[test]
    fn er_rejects_small_targets() {
        let e = RelationTable::from_fn(2, 6, |_| 0);
        assert!(er_canonize(&e, 2).is_err());
    }

    #[test]
    fn verify_er_detects_flips() {
        let e = RelationTable::from_fn(2, 6, |s| s.elems()[0] as Label);
        let i0 = IndexSet::new(2, vec![0]).unwrap();
        let all: Vec<usize> = (0..6).collect();
        assert!(verify_er(&e, &all, &i0).is_ok());
        let mut map = e.to_map();
        map.insert(kset(&[2, 5]), 99);
        let flipped = RelationTable::from_map(2, 6, &map).unwrap();
        assert!(verify_er(&flipped, &all, &i0).is_err());
    }
}
