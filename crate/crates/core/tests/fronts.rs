mod common;

use std::collections::BTreeMap;

use r1_ramsey::canon::{all_trees, CanonicalTree};
use r1_ramsey::fronts::{
    canonize_front, check_inner_ns_sperner, covers, is_nash_williams, is_sperner, phi_map, represents, schreier_front,
    separates, verify_front_certificate, Coverage, Front, FrontOutcome, FrontRelation, PhiAssignment, PhiMap,
    Separation,
};
use r1_ramsey::space::{depth_of, enumerate_approx, enumerate_submembers, tree_trunc, BlockSeq, Node};

use common::{labeler, rng, rng_below};

fn rank_two(depth: usize) -> Front {
    let u = tree_trunc(depth);
    Front::new(u.clone(), enumerate_approx(&u, 2)).unwrap()
}

fn random_assignment(f: &Front, seed: u64) -> PhiAssignment {
    let mut r = rng(seed);
    let trees: BTreeMap<_, _> = f
        .inner_prefixes()
        .into_iter()
        .map(|s| {
            let options = all_trees(s.len());
            let tree = options[rng_below(&mut r, options.len() as u64) as usize].clone();
            (s, tree)
        })
        .collect();
    PhiAssignment::new(trees).unwrap()
}

fn induced(f: &Front, phi: &PhiMap) -> FrontRelation {
    let mut label = labeler();
    FrontRelation::from_fn(f, |t| label(phi[t].clone()))
}

#[test]
fn builtin_fronts_are_nash_williams_and_sperner() {
    for depth in 3..=6 {
        for f in [rank_two(depth), schreier_front(&tree_trunc(depth))] {
            assert!(is_nash_williams(&f).is_ok());
            assert!(is_sperner(&f).is_ok());
        }
    }
    assert_eq!(covers(&rank_two(5), 3).unwrap(), Coverage::Covered);
}

#[test]
fn phi_is_inner_and_represents_its_own_relation() {
    for f in [rank_two(6), schreier_front(&tree_trunc(6))] {
        for seed in 0..5 {
            let phi = phi_map(&f, &random_assignment(&f, seed)).unwrap();
            assert!(check_inner_ns_sperner(&f, &phi).unwrap().is_inner());
        }
    }
    for (i, f) in [rank_two(4), schreier_front(&tree_trunc(5))].iter().enumerate() {
        for seed in 0..50 {
            let assign = random_assignment(f, seed + 100 * i as u64);
            let phi = phi_map(f, &assign).unwrap();
            for t in f.elements() {
                let nodes = t.nodes();
                assert!(phi[t].iter().all(|x| x == Node::Root || nodes.contains(x)), "φ({t}) leaves {t}");
            }
            assert!(check_inner_ns_sperner(f, &phi).unwrap().is_inner());
            let rel = induced(f, &phi);
            assert_eq!(represents(f, &phi, &rel).unwrap(), Ok(()));

            // Merging two image classes breaks representation at a pair that
            // straddles them.
            let labels = rel.labels();
            let Some(max) = labels.values().max().copied().filter(|&m| m > 0) else { continue };
            let merged = FrontRelation::new(labels.iter().map(|(a, &l)| (a.clone(), if l == max { 0 } else { l })).collect());
            let (a, b) = represents(f, &phi, &merged).unwrap().expect_err("classes merged");
            assert_eq!(merged.label(&a), merged.label(&b));
            assert_ne!(phi[&a], phi[&b]);
        }
    }
}

#[test]
fn separation_survives_shrinking() {
    let x = tree_trunc(5);
    let f = rank_two(5);
    let prefixes = f.inner_prefixes();
    let shrinks: Vec<_> = (2..=5).flat_map(|d| enumerate_submembers(&x, d)).collect();
    for seed in 0..2 {
        let mut r = rng(seed);
        let rel = FrontRelation::from_fn(&f, |_| rng_below(&mut r, 60));
        let mut checked = 0;
        for s in &prefixes {
            for t in &prefixes {
                if separates(&x, s, t, &f, &rel).unwrap() != Separation::Separates {
                    continue;
                }
                for y in &shrinks {
                    if depth_of(y, s).is_none() || depth_of(y, t).is_none() {
                        continue;
                    }
                    assert!(
                        !matches!(separates(y, s, t, &f, &rel).unwrap(), Separation::Collides(..)),
                        "{s} / {t} separated on {x} but not on {y}"
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn canonize_front_is_sound_on_random_relations() {
    let f = rank_two(4);
    let mut found = 0;
    for seed in 0..20 {
        let mut r = rng(seed);
        let classes = 1 + seed % 4;
        let rel = FrontRelation::from_fn(&f, |_| rng_below(&mut r, classes));
        if let FrontOutcome::Found(cert) = canonize_front(&f, &rel, 3).unwrap() {
            found += 1;
            assert!(verify_front_certificate(&f, &rel, &cert).is_ok());
            let restricted = f.restrict(&cert.c);
            let phi = phi_map(&restricted, &cert.assign).unwrap();
            assert_eq!(represents(&restricted, &phi, &rel).unwrap(), Ok(()));
        }
    }
    assert!(found > 0);
}

#[test]
fn canonize_front_recovers_planted_maps() {
    // A planted map of canonical shape must be found on the whole universe;
    // any other planted map still canonizes on some smaller sub-member.
    let f = rank_two(4);
    let mut canonical = 0;
    for seed in 0..30 {
        let assign = random_assignment(&f, seed);
        let planted = phi_map(&f, &assign).unwrap();
        let rel = induced(&f, &planted);
        let min_blocks = if check_inner_ns_sperner(&f, &planted).unwrap().is_canonical_shape() {
            canonical += 1;
            4
        } else {
            2
        };
        let cert = canonize_front(&f, &rel, min_blocks).unwrap().found().cloned().expect("planted relation");
        assert!(cert.c.depth() >= min_blocks);
        let restricted = f.restrict(&cert.c);
        let phi = phi_map(&restricted, &cert.assign).unwrap();
        assert_eq!(represents(&restricted, &phi, &rel).unwrap(), Ok(()));
    }
    assert!(canonical > 0);
}

#[test]
fn front_files_round_trip() {
    let f = schreier_front(&tree_trunc(4));
    let json = serde_json::to_string(&f).unwrap();
    assert_eq!(serde_json::from_str::<Front>(&json).unwrap(), f);
    let rel = FrontRelation::from_fn(&f, |t| t.len() as u64);
    assert_eq!(serde_json::from_str::<FrontRelation>(&serde_json::to_string(&rel).unwrap()).unwrap(), rel);
    let assign = random_assignment(&f, 5);
    assert_eq!(serde_json::from_str::<PhiAssignment>(&serde_json::to_string(&assign).unwrap()).unwrap(), assign);
    assert!(PhiAssignment::uniform(&f, |s| CanonicalTree::stem(s.len() + 1)).is_err());
}

