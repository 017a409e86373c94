//! Drives the command line in-process: write a certificate, verify it, then
//! tamper with a label and watch verification fail.

use r1_ramsey::cli::run;

fn main() {
    let path = std::env::temp_dir().join(format!("r1ramsey-example-{}.json", std::process::id()));
    let path_text = path.to_str().unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["r1ramsey", "canonize", "arn", "--n", "2", "--depth", "5", "--planted", "S;L{0}", "--out", path_text];
    let code = run(args, &mut out, &mut err);
    println!("canonize exit {code}\n{}", String::from_utf8_lossy(&out));

    let verify = |label: &str| {
        let mut out = Vec::new();
        let code = run(["r1ramsey", "verify", "--certificate", path_text], &mut out, &mut std::io::sink());
        println!("{label}: exit {code}, {}", String::from_utf8_lossy(&out).trim());
    };
    verify("as written");

    let mut envelope: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let labels = envelope["relation"]["labels"].as_object_mut().unwrap();
    let last = labels.values().next_back().cloned().unwrap();
    *labels.values_mut().next().unwrap() = last;
    std::fs::write(&path, serde_json::to_string(&envelope).unwrap()).unwrap();
    verify("one label changed");
    let _ = std::fs::remove_file(&path);
}
