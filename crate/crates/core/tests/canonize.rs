mod common;

use r1_ramsey::canon::{all_trees, enumerate_treeseqs, project, TreeSeq};
use r1_ramsey::canonize::{
    canonize_arn, canonize_r1n, verify_arn, verify_r1n, ARnRelation, CanonCertificate, Canonized, R1nCertificate,
    R1nRelation,
};
use r1_ramsey::space::{enumerate_approx, enumerate_subtrees, tree_trunc, Approximation, MemberTrunc};

use common::{labeler, partition, rng, rng_below};

fn planted_arn(seq: &TreeSeq, depth: usize) -> ARnRelation {
    let mut label = labeler();
    ARnRelation::from_fn(seq.len(), tree_trunc(depth), |a| label(seq.key(a).unwrap()))
}

/// The relation and the tree sequence partition `AR_n ∩ D` the same way.
fn relation_equal(rel: &ARnRelation, seq: &TreeSeq, d: &MemberTrunc) -> bool {
    let items = enumerate_approx(d, rel.n());
    let mut key = labeler();
    partition(&items, |a| rel.label(a).unwrap()) == partition(&items, |a| key(seq.key(a).unwrap()))
}

#[test]
fn planted_sequences_are_recovered_whole() {
    for n in 1..=2 {
        for seq in enumerate_treeseqs(n) {
            // Distinct sequences induce distinct relations here, so the answer is the plant itself.
            let rel = planted_arn(&seq, n + 3);
            let cert = canonize_arn(&rel, n + 1).unwrap().found().cloned().unwrap_or_else(|| panic!("{seq} exhausted"));
            assert_eq!(cert.d, tree_trunc(n + 3), "{seq}");
            assert!(relation_equal(&rel, &cert.seq, &cert.d), "{seq} vs {}", cert.seq);
            assert_eq!(cert.seq, seq);
            // Rerunning gives the same relation table.
            let again = canonize_arn(&rel, n + 1).unwrap().found().cloned().unwrap();
            assert!(relation_equal(&rel, &again.seq, &again.d));
        }
    }
}

#[test]
fn random_relations_are_sound() {
    let mut found = 0;
    for seed in 0..30 {
        let mut r = rng(seed);
        let classes = 1 + seed % 5;
        let rel = ARnRelation::from_fn(2, tree_trunc(4), |_| rng_below(&mut r, classes));
        match canonize_arn(&rel, 3).unwrap() {
            Canonized::Found(cert) => {
                found += 1;
                assert!(cert.d.depth() >= 3);
                assert!(relation_equal(&rel, &cert.seq, &cert.d));
                assert_eq!(verify_arn(&rel, &cert).unwrap(), cert.verified_pairs);
            }
            Canonized::Exhausted => {}
        }
    }
    assert!(found > 0);
}

#[test]
fn tampering_is_caught() {
    let seq: TreeSeq = "L{0};S".parse().unwrap();
    let rel = planted_arn(&seq, 5);
    let cert = canonize_arn(&rel, 2).unwrap().found().cloned().unwrap();

    let mut labels = rel.labels().clone();
    let last = *labels.values().last().unwrap();
    *labels.values_mut().next().unwrap() = last;
    let flipped = ARnRelation::new(2, rel.universe().clone(), labels).unwrap();
    assert!(verify_arn(&flipped, &cert).is_err());

    let wrong_seq = CanonCertificate { seq: "S;S".parse().unwrap(), ..cert.clone() };
    assert!(verify_arn(&rel, &wrong_seq).is_err());

    let outside = CanonCertificate { d: tree_trunc(6), ..cert };
    assert!(verify_arn(&rel, &outside).is_err());
}

#[test]
fn planted_block_relations_are_recovered() {
    for n in 1..=2 {
        let universe = tree_trunc(n + 3);
        for tree in all_trees(n) {
            let mut label = labeler();
            let rel = R1nRelation::from_fn(n, universe.clone(), |u| label(project(&tree, u).unwrap()));
            let cert = canonize_r1n(&rel, n + 1).unwrap().found().cloned().unwrap_or_else(|| panic!("{tree}"));
            let blocks = enumerate_subtrees(&cert.c, n, &Approximation::empty());
            let mut key = labeler();
            assert_eq!(
                partition(&blocks, |u| rel.label(u).unwrap()),
                partition(&blocks, |u| key(project(&cert.tree, u).unwrap())),
                "{tree} vs {}",
                cert.tree
            );
            assert_eq!(verify_r1n(&rel, &cert).unwrap(), cert.verified_pairs);
        }
    }
}

#[test]
fn files_round_trip() {
    let seq: TreeSeq = "S;L{1}".parse().unwrap();
    let rel = planted_arn(&seq, 4);
    let json = serde_json::to_string(&rel).unwrap();
    assert_eq!(serde_json::from_str::<ARnRelation>(&json).unwrap(), rel);
    let cert = canonize_arn(&rel, 2).unwrap().found().cloned().unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    assert_eq!(serde_json::from_str::<CanonCertificate>(&json).unwrap(), cert);

    let r1 = R1nRelation::from_fn(1, tree_trunc(4), |u| u.leaves()[0] as u64);
    assert_eq!(serde_json::from_str::<R1nRelation>(&serde_json::to_string(&r1).unwrap()).unwrap(), r1);
    let cert = canonize_r1n(&r1, 2).unwrap().found().cloned().unwrap();
    assert_eq!(serde_json::from_str::<R1nCertificate>(&serde_json::to_string(&cert).unwrap()).unwrap(), cert);
}
