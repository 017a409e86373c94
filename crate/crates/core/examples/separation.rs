//! Separation of initial segments on the rank-2 front under a constant and an
//! injective labeling.

use r1_ramsey::fronts::{ext, separates, Front, FrontRelation, Separation};
use r1_ramsey::space::{enumerate_approx, tree_trunc};

fn main() {
    let universe = tree_trunc(5);
    let f = Front::new(universe.clone(), enumerate_approx(&universe, 2)).unwrap();
    let prefixes = f.inner_prefixes();
    let s = &prefixes[1];
    println!("Ext of {s}: {} tails", ext(&universe, s, None).unwrap().items.len());

    let constant = FrontRelation::from_fn(&f, |_| 0);
    let mut counter = 0;
    let injective = FrontRelation::from_fn(&f, |_| {
        counter += 1;
        counter
    });
    for (name, rel) in [("constant", &constant), ("injective", &injective)] {
        let (mut sep, mut col, mut vac) = (0, 0, 0);
        for s in &prefixes {
            for t in &prefixes {
                if s == t {
                    continue;
                }
                match separates(&universe, s, t, &f, rel).unwrap() {
                    Separation::Separates => sep += 1,
                    Separation::Collides(..) => col += 1,
                    Separation::Vacuous => vac += 1,
                }
            }
        }
        println!("{name:>9}: separates {sep}, collides {col}, vacuous {vac}");
    }
}
