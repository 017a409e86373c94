//! The `r1ramsey` command line: listings, the census, canonization runs that
//! write self-contained certificate files, and independent re-verification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 search exhausted.

pub mod features;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{census, census_distinctness, TreeSeq};
use crate::canonize::{
    canonize_arn, canonize_r1n, verify_arn, verify_r1n, ARnRelation, CanonCertificate, Canonized, R1nCertificate,
    R1nRelation,
};
use crate::ellentuck::{er_canonize, verify_er, ErCertificate, ErOutcome, RelationTable};
use crate::error::{Error, Result};
use crate::fronts::{
    canonize_front, is_nash_williams, schreier_front, verify_front_certificate, Front, FrontCertificate, FrontOutcome,
    FrontRelation,
};
use crate::pigeonhole::{homogenize, verify_homogeneity, ExtensionColoring, HomogeneityCertificate, PigeonholeOutcome};
use crate::space::{depth_of, enumerate_approx, enumerate_subtrees, r_n, tree_trunc, Approximation, BlockSeq, MemberTrunc};
use features::{FeatureSpec, Interner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "r1ramsey", version, about = "Finite Ramsey-space searches with checkable certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List blocks, approximations (approx:N) or shape-k blocks (subtrees:K).
    Enumerate {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        what: String,
        /// Universe file (member JSON); defaults to the first DEPTH blocks of the tree.
        #[arg(long)]
        within: Option<PathBuf>,
    },
    /// Number of canonical equivalence relations on AR_n.
    CountCanonical {
        #[arg(long)]
        n: u32,
        /// Check that the relations differ on the first n+2 blocks (n ≤ 3).
        #[arg(long)]
        verify: bool,
    },
    /// Run a canonization search and write a certificate.
    Canonize {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        opts: CanonizeOpts,
    },
    /// Build a member on which all one-step extensions of r_k share a color.
    Homogenize {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2)]
        new_blocks: usize,
        #[arg(long)]
        feature: Option<String>,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file against the inputs it embeds.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Er,
    Arn,
    R1n,
    Front,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CanonizeOpts {
    /// Universe depth (arn, r1n, front).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Approximation length or block shape (arn, r1n); ground set size N (er).
    #[arg(long)]
    pub n: Option<usize>,
    /// Subset size (er).
    #[arg(long)]
    pub k: Option<usize>,
    /// Minimum |M| (er) or minimum number of blocks of the witness member.
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub feature: Option<String>,
    /// Explicit label table (JSON).
    #[arg(long)]
    pub relation: Option<PathBuf>,
    /// Tree sequence inducing the relation, e.g. "L{0};S" (arn).
    #[arg(long)]
    pub planted: Option<String>,
    /// "schreier", "rank:N", or a front JSON file (front).
    #[arg(long)]
    pub front: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A certificate together with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Envelope {
    Er { relation: RelationTable, target: usize, certificate: ErCertificate },
    Arn { relation: ARnRelation, min_blocks: usize, certificate: CanonCertificate },
    R1n { relation: R1nRelation, min_blocks: usize, certificate: R1nCertificate },
    Front { front: Front, relation: FrontRelation, min_blocks: usize, certificate: FrontCertificate },
    Homogenize { coloring: ExtensionColoring, new_blocks: usize, certificate: HomogeneityCertificate },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: String,
    pub outcome: String,
    pub certificate: Option<PathBuf>,
    pub verified_pairs: Option<usize>,
    pub wall_ms: u128,
    /// Inline copy of the certificate when no output file was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Envelope>,
}

/// Re-derives every claim of the envelope; returns the number of checks.
pub fn verify_envelope(envelope: &Envelope) -> Result<usize> {
    match envelope {
        Envelope::Er { relation, target, certificate } => {
            if certificate.m.len() < *target {
                return Err(Error::Structure(format!("|M| = {} is below the target {target}", certificate.m.len())));
            }
            verify_er(relation, &certificate.m, &certificate.index_set)
                .map_err(|(x, y)| Error::Structure(format!("E and E_I disagree on {x} / {y}")))
        }
        Envelope::Arn { relation, min_blocks, certificate } => {
            check_depth(&certificate.d, *min_blocks)?;
            verify_arn(relation, certificate)
        }
        Envelope::R1n { relation, min_blocks, certificate } => {
            check_depth(&certificate.c, *min_blocks)?;
            verify_r1n(relation, certificate)
        }
        Envelope::Front { front, relation, min_blocks, certificate } => {
            if let Err((a, b)) = is_nash_williams(front) {
                return Err(Error::Structure(format!("front is not Nash-Williams: {a} ⊏ {b}")));
            }
            check_depth(&certificate.c, *min_blocks)?;
            verify_front_certificate(front, relation, certificate)
        }
        Envelope::Homogenize { coloring, new_blocks, certificate } => {
            let b = coloring.universe();
            let n = depth_of(b, coloring.a())
                .ok_or_else(|| Error::Structure("a does not lie inside the universe".into()))?;
            if certificate.member.depth() < n + new_blocks {
                return Err(Error::Structure(format!("fewer than {new_blocks} new blocks")));
            }
            verify_homogeneity(b, coloring, certificate)
        }
    }
}

fn check_depth(d: &MemberTrunc, min_blocks: usize) -> Result<()> {
    if d.depth() < min_blocks {
        return Err(Error::Structure(format!("witness {d} has fewer than {min_blocks} blocks")));
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            let _ = writeln!(err, "error: {error}");
            code
        }
    }
}

struct Failure {
    code: i32,
    error: Error,
}

/// Input and usage errors.
fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

/// Errors raised while searching or checking: structural ones mean a
/// certificate failed verification.
fn checked(error: Error) -> Failure {
    let code = match error {
        Error::Structure(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_USAGE,
    };
    Failure { code, error }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    usage(Error::Parse(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<(T, String), Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let value = serde_json::from_str(&text).map_err(|e| io_error(path, e))?;
    Ok((value, text))
}

fn emit(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| usage(Error::Parse(format!("write failed: {e}"))))
}

fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn require<T: Copy>(value: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| usage(Error::Usage(format!("missing --{flag}"))))
}

fn execute(command: &Command, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match command {
        Command::Enumerate { depth, what, within } => cmd_enumerate(*depth, what, within.as_deref(), out),
        Command::CountCanonical { n, verify } => cmd_count_canonical(*n, *verify, out),
        Command::Canonize { kind, opts } => cmd_canonize(*kind, opts, out),
        Command::Homogenize { depth, k, new_blocks, feature, coloring, seed, out: path } => {
            cmd_homogenize(*depth, *k, *new_blocks, feature.as_deref(), coloring.as_deref(), *seed, path.as_deref(), out)
        }
        Command::Verify { certificate } => cmd_verify(certificate, out),
    }
}

fn cmd_enumerate(depth: usize, what: &str, within: Option<&Path>, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let universe = match within {
        Some(path) => {
            let (member, _): (MemberTrunc, _) = read_json(path)?;
            r_n(&member, depth).map_err(usage)?.to_member()
        }
        None => tree_trunc(depth),
    };
    let bad = || usage(Error::Usage(format!("--what must be blocks, approx:N or subtrees:K, got {what:?}")));
    let lines: Vec<String> = match what.split_once(':') {
        None if what == "blocks" => universe.blocks().iter().map(ToString::to_string).collect(),
        Some(("approx", n)) => {
            let n: usize = n.parse().map_err(|_| bad())?;
            enumerate_approx(&universe, n).iter().map(ToString::to_string).collect()
        }
        Some(("subtrees", k)) => {
            let k: usize = k.parse().map_err(|_| bad())?;
            enumerate_subtrees(&universe, k, &Approximation::empty()).iter().map(ToString::to_string).collect()
        }
        _ => return Err(bad()),
    };
    let mut text = String::new();
    for line in &lines {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&format!("count: {}\n", lines.len()));
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_count_canonical(n: u32, verify: bool, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    if !(1..=10).contains(&n) {
        return Err(usage(Error::OutOfRange { requested: n as usize, available: 10 }));
    }
    if verify && n > 3 {
        return Err(usage(Error::Usage("--verify supports n ≤ 3".into())));
    }
    let mut text = format!("{}\n", census(n));
    let mut code = EXIT_OK;
    if verify {
        let check = census_distinctness(n as usize, n as usize + 2);
        text.push_str(&format!(
            "verify: {} of {} tree sequences induce distinct relations on {} approximations over the first {} blocks\n",
            check.distinct_relations, check.sequences, check.approximations, check.universe_depth
        ));
        if !check.all_distinct() {
            code = EXIT_VERIFY_FAILED;
        }
    }
    emit(out, &text)?;
    Ok(code)
}

fn feature(opts_feature: Option<&str>, seed: Option<u64>) -> std::result::Result<Option<FeatureSpec>, Failure> {
    opts_feature.map(|f| FeatureSpec::parse_with_seed(f, seed)).transpose().map_err(usage)
}

fn load_er(opts: &CanonizeOpts) -> std::result::Result<(RelationTable, usize, String), Failure> {
    let (table, text) = match (&opts.relation, feature(opts.feature.as_deref(), opts.seed)?) {
        (Some(path), None) => read_json::<RelationTable>(path)?,
        (None, Some(f)) => {
            let k = require(opts.k, "k")?;
            let n = require(opts.n, "n")?;
            let mut ids = Interner::default();
            let mut failure = None;
            let table = RelationTable::from_fn(k, n, |x| match f.on_kset(x) {
                Ok(v) => ids.label(v),
                Err(e) => {
                    failure.get_or_insert(e);
                    0
                }
            });
            if let Some(e) = failure {
                return Err(usage(e));
            }
            let text = serde_json::to_string(&table).expect("serializable");
            (table, text)
        }
        _ => return Err(usage(Error::Usage("give exactly one of --feature or --relation".into()))),
    };
    let target = opts.min_size.unwrap_or(table.k() + 1);
    Ok((table, target, text))
}

fn load_arn(opts: &CanonizeOpts) -> std::result::Result<(ARnRelation, String), Failure> {
    let given = [opts.relation.is_some(), opts.feature.is_some(), opts.planted.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(usage(Error::Usage("give exactly one of --feature, --relation or --planted".into())));
    }
    if let Some(path) = &opts.relation {
        return read_json(path);
    }
    let n = require(opts.n, "n")?;
    let universe = tree_trunc(require(opts.depth, "depth")?);
    let mut ids = Interner::default();
    let mut failure = None;
    let rel = if let Some(text) = &opts.planted {
        let seq: TreeSeq = text.parse().map_err(usage)?;
        if seq.len() != n {
            return Err(usage(Error::Arity { expected: n, found: seq.len() }));
        }
        ARnRelation::from_fn(n, universe, |a| {
            // flat, prefix-free encoding of the projections
            let key = seq.key(a).expect("shapes match");
            ids.label(
                key.iter()
                    .flat_map(|p| {
                        let head = [p.m.map_or(0, |m| m as u64 + 1), p.has_stem as u64, p.leaves.len() as u64];
                        head.into_iter().chain(p.leaves.iter().map(|&l| l as u64))
                    })
                    .collect(),
            )
        })
    } else {
        let f = feature(opts.feature.as_deref(), opts.seed)?.expect("checked above");
        ARnRelation::from_fn(n, universe, |a| match f.on_approximation(a) {
            Ok(v) => ids.label(v),
            Err(e) => {
                failure.get_or_insert(e);
                0
            }
        })
    };
    if let Some(e) = failure {
        return Err(usage(e));
    }
    let text = serde_json::to_string(&rel).expect("serializable");
    Ok((rel, text))
}

fn load_r1n(opts: &CanonizeOpts) -> std::result::Result<(R1nRelation, String), Failure> {
    match (&opts.relation, feature(opts.feature.as_deref(), opts.seed)?) {
        (Some(path), None) => read_json(path),
        (None, Some(f)) => {
            let n = require(opts.n, "n")?;
            let universe = tree_trunc(require(opts.depth, "depth")?);
            let mut ids = Interner::default();
            let mut failure = None;
            let rel = R1nRelation::from_fn(n, universe, |u| match f.on_block(u) {
                Ok(v) => ids.label(v),
                Err(e) => {
                    failure.get_or_insert(e);
                    0
                }
            });
            if let Some(e) = failure {
                return Err(usage(e));
            }
            let text = serde_json::to_string(&rel).expect("serializable");
            Ok((rel, text))
        }
        _ => Err(usage(Error::Usage("give exactly one of --feature or --relation".into()))),
    }
}

fn load_front(opts: &CanonizeOpts) -> std::result::Result<(Front, FrontRelation, String), Failure> {
    let spec = opts.front.as_deref().unwrap_or("schreier");
    let front = match spec.split_once(':') {
        _ if spec == "schreier" => schreier_front(&tree_trunc(require(opts.depth, "depth")?)),
        Some(("rank", n)) => {
            let n: usize = n.parse().map_err(|_| usage(Error::Usage(format!("bad front spec {spec:?}"))))?;
            let universe = tree_trunc(require(opts.depth, "depth")?);
            Front::new(universe.clone(), enumerate_approx(&universe, n)).map_err(usage)?
        }
        _ => read_json::<Front>(Path::new(spec))?.0,
    };
    let relation = match (&opts.relation, feature(opts.feature.as_deref(), opts.seed)?) {
        (Some(path), None) => read_json::<FrontRelation>(path)?.0,
        (None, Some(f)) => {
            let mut ids = Interner::default();
            let mut failure = None;
            let rel = FrontRelation::from_fn(&front, |a| match f.on_approximation(a) {
                Ok(v) => ids.label(v),
                Err(e) => {
                    failure.get_or_insert(e);
                    0
                }
            });
            if let Some(e) = failure {
                return Err(usage(e));
            }
            rel
        }
        _ => return Err(usage(Error::Usage("give exactly one of --feature or --relation".into()))),
    };
    relation.check_total(&front).map_err(usage)?;
    if let Err((a, b)) = is_nash_williams(&front) {
        return Err(usage(Error::Structure(format!("front is not Nash-Williams: {a} ⊏ {b}"))));
    }
    let text = serde_json::to_string(&(&front, &relation)).expect("serializable");
    Ok((front, relation, text))
}

enum Searched {
    Found(Envelope, usize),
    Exhausted,
}

fn cmd_canonize(kind: Kind, opts: &CanonizeOpts, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let started = Instant::now();
    let (searched, input) = match kind {
        Kind::Er => {
            let (relation, target, text) = load_er(opts)?;
            let searched = match er_canonize(&relation, target).map_err(usage)? {
                ErOutcome::Found(certificate) => {
                    let pairs = certificate.verified_pairs;
                    Searched::Found(Envelope::Er { relation, target, certificate }, pairs)
                }
                ErOutcome::Exhausted => Searched::Exhausted,
            };
            (searched, text)
        }
        Kind::Arn => {
            let (relation, text) = load_arn(opts)?;
            let min_blocks = opts.min_size.unwrap_or(relation.n());
            let searched = match canonize_arn(&relation, min_blocks).map_err(checked)? {
                Canonized::Found(certificate) => {
                    let pairs = certificate.verified_pairs;
                    Searched::Found(Envelope::Arn { relation, min_blocks, certificate }, pairs)
                }
                Canonized::Exhausted => Searched::Exhausted,
            };
            (searched, text)
        }
        Kind::R1n => {
            let (relation, text) = load_r1n(opts)?;
            let min_blocks = opts.min_size.unwrap_or(relation.n() + 1);
            let searched = match canonize_r1n(&relation, min_blocks).map_err(checked)? {
                Canonized::Found(certificate) => {
                    let pairs = certificate.verified_pairs;
                    Searched::Found(Envelope::R1n { relation, min_blocks, certificate }, pairs)
                }
                Canonized::Exhausted => Searched::Exhausted,
            };
            (searched, text)
        }
        Kind::Front => {
            let (front, relation, text) = load_front(opts)?;
            let min_blocks = opts.min_size.unwrap_or(front.universe().depth());
            let searched = match canonize_front(&front, &relation, min_blocks).map_err(checked)? {
                FrontOutcome::Found(certificate) => {
                    let pairs = certificate.verified_pairs;
                    Searched::Found(Envelope::Front { front, relation, min_blocks, certificate }, pairs)
                }
                FrontOutcome::Exhausted => Searched::Exhausted,
            };
            (searched, text)
        }
    };
    let command = format!("canonize {kind:?}").to_lowercase();
    finish(command, &input, searched, opts.out.as_deref(), started, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_homogenize(
    depth: Option<usize>,
    k: Option<usize>,
    new_blocks: usize,
    feature_name: Option<&str>,
    coloring_path: Option<&Path>,
    seed: Option<u64>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let started = Instant::now();
    let (coloring, input) = match (coloring_path, feature(feature_name, seed)?) {
        (Some(path), None) => read_json::<ExtensionColoring>(path)?,
        (None, Some(f)) => {
            let b = tree_trunc(require(depth, "depth")?);
            let a = r_n(&b, require(k, "k")?).map_err(usage)?;
            let mut failure = None;
            let coloring = ExtensionColoring::from_fn(a, b, |u| match f.color_block(u) {
                Ok(c) => c,
                Err(e) => {
                    failure.get_or_insert(e);
                    0
                }
            });
            if let Some(e) = failure {
                return Err(usage(e));
            }
            let text = serde_json::to_string(&coloring).expect("serializable");
            (coloring, text)
        }
        _ => return Err(usage(Error::Usage("give exactly one of --feature or --coloring".into()))),
    };
    let b = coloring.universe().clone();
    let searched = match homogenize(&b, &coloring, new_blocks).map_err(usage)? {
        PigeonholeOutcome::Homogeneous(certificate) => {
            let envelope = Envelope::Homogenize { coloring, new_blocks, certificate };
            let checks = verify_envelope(&envelope).map_err(checked)?;
            Searched::Found(envelope, checks)
        }
        PigeonholeOutcome::Exhausted { .. } => Searched::Exhausted,
    };
    finish("homogenize".into(), &input, searched, out_path, started, out)
}

fn finish(
    command: String,
    input: &str,
    searched: Searched,
    out_path: Option<&Path>,
    started: Instant,
    out: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let (outcome, code, envelope, pairs) = match searched {
        Searched::Found(envelope, pairs) => {
            // The envelope must stand on its own before it is handed out.
            verify_envelope(&envelope).map_err(checked)?;
            ("ok", EXIT_OK, Some(envelope), Some(pairs))
        }
        Searched::Exhausted => ("exhausted", EXIT_EXHAUSTED, None, None),
    };
    let mut certificate = None;
    let mut inline = envelope.clone();
    if let (Some(path), Some(envelope)) = (out_path, &envelope) {
        let json = serde_json::to_string_pretty(envelope).expect("serializable");
        fs::write(path, json + "\n").map_err(|e| io_error(path, e))?;
        certificate = Some(path.to_path_buf());
        inline = None;
    }
    let report = RunReport {
        command,
        input_digest: digest(input),
        outcome: outcome.into(),
        certificate,
        verified_pairs: pairs,
        wall_ms: started.elapsed().as_millis(),
        envelope: inline,
    };
    emit(out, &(serde_json::to_string_pretty(&report).expect("serializable") + "\n"))?;
    Ok(code)
}

fn cmd_verify(path: &Path, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let (envelope, _): (Envelope, _) = read_json(path)?;
    match verify_envelope(&envelope) {
        Ok(checks) => {
            emit(out, &format!("pass: {checks} checks\n"))?;
            Ok(EXIT_OK)
        }
        Err(error) => {
            emit(out, &format!("fail: {error}\n"))?;
            Ok(EXIT_VERIFY_FAILED)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("r1ramsey").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn enumerate_listings() {
        let (code, out, _) = run_args(&["enumerate", "--depth", "3", "--what", "approx:2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 11);
        assert!(out.ends_with("count: 10\n"));
        let (_, out, _) = run_args(&["enumerate", "--depth", "1", "--what", "blocks"]);
        assert_eq!(out, "0:0\ncount: 1\n");
        let (_, out, _) = run_args(&["enumerate", "--depth", "3", "--what", "subtrees:1"]);
        assert!(out.ends_with("count: 4\n"));
        let (code, _, _) = run_args(&["enumerate", "--depth", "3", "--what", "leaves"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn census_counts() {
        for (n, expected) in [("1", "3\n"), ("2", "15\n"), ("4", "2295\n")] {
            let (code, out, _) = run_args(&["count-canonical", "--n", n]);
            assert_eq!((code, out.as_str()), (0, expected));
        }
        assert_eq!(run_args(&["count-canonical", "--n", "11"]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["count-canonical", "--n", "2", "--verify"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify: 15 of 15"));
    }

    #[test]
    fn canonize_er_x0_equality() {
        let (code, out, _) = run_args(&["canonize", "er", "--k", "2", "--n", "6", "--feature", "min_leaf(0)"]);
        assert_eq!(code, 0);
        let report: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(report["envelope"]["certificate"]["I"], serde_json::json!([0]));
        assert_eq!(report["envelope"]["certificate"]["M"], serde_json::json!([0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn canonize_and_verify_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cert = dir.path().join("arn.json");
        let cert_str = cert.to_str().unwrap();
        let (code, _, _) = run_args(&["canonize", "arn", "--n", "2", "--depth", "5", "--planted", "S;L{0}", "--out", cert_str]);
        assert_eq!(code, 0);
        assert_eq!(run_args(&["verify", "--certificate", cert_str]).0, 0);
        assert_eq!(run_args(&["verify", "--certificate", "/nonexistent/cert.json"]).0, EXIT_USAGE);
    }
}
