//! Shrinks the first 12 blocks so that every one-step extension of r_1 has the
//! same color.

use r1_ramsey::pigeonhole::{homogenize, verify_homogeneity, ExtensionColoring};
use r1_ramsey::space::{r_n, tree_trunc};

fn main() {
    let b = tree_trunc(12);
    let a = r_n(&b, 1).unwrap();
    let coloring = ExtensionColoring::from_fn(a, b.clone(), |u| u.leaves().iter().sum::<usize>() as u64);
    let outcome = homogenize(&b, &coloring, 2).unwrap();
    let cert = outcome.certificate().expect("leaf-sum parity homogenizes on 12 blocks");
    println!("A = {}", cert.member);
    println!("color {}", cert.color);
    for stage in &cert.transcript {
        println!(
            "  block {} -> {} (shape {}, color {}, forced: {})",
            stage.position, stage.witness, stage.target_shape, stage.color, stage.guaranteed
        );
    }
    println!("checked extensions: {}", verify_homogeneity(&b, &coloring, cert).unwrap());
}
