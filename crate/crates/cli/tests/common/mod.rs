//! Shared fixtures: synthetic corpora whose pairs classify to known
//! perturbation types, including the six canonical example edits.

#![allow(dead_code)] // each test binary uses its own subset

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cadkit_core::classify::PerturbationType;

/// (seed hypothesis, edited hypothesis) exemplifying each type.
pub fn template(ty: PerturbationType) -> (&'static str, &'static str) {
    match ty {
        PerturbationType::Negation => ("A dog is fetching.", "A dog is not fetching anything."),
        PerturbationType::Quantifier => (
            "The lady has many children.",
            "The lady has three children.",
        ),
        PerturbationType::Lexical => ("The boy is swimming.", "The boy is running."),
        PerturbationType::Insert => (
            "The man is digging the ground.",
            "The tall man is digging the ground.",
        ),
        PerturbationType::Delete => ("The lazy person just woke up.", "The person just woke up."),
        PerturbationType::Resemantic => (
            "The actor saw the director.",
            "The actor had just met the director.",
        ),
        PerturbationType::Other => unreachable!("no template for `other`"),
    }
}

pub fn pair_line(id: &str, ty: PerturbationType) -> String {
    let (seed_hyp, edited_hyp) = template(ty);
    format!(
        r#"{{"pair_id":"{id}","task":"nli","seed":{{"label":"entailment","premise":"Someone is outside.","hypothesis":"{seed_hyp}"}},"edited":{{"label":"contradiction","premise":"Someone is outside.","hypothesis":"{edited_hyp}"}}}}"#
    )
}

/// A JSONL corpus with `count` pairs per listed type, ids `<type>-<i>`.
pub fn synth_corpus(counts: &[(PerturbationType, usize)]) -> String {
    let mut lines = Vec::new();
    for &(ty, count) in counts {
        for i in 0..count {
            lines.push(pair_line(&format!("{ty}-{i:05}"), ty));
        }
    }
    lines.join("\n") + "\n"
}

/// One pair per canonical type, in precedence order.
pub fn table1_corpus() -> String {
    let counts: Vec<(PerturbationType, usize)> = PerturbationType::CANONICAL
        .iter()
        .map(|&ty| (ty, 1))
        .collect();
    synth_corpus(&counts)
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

/// Runs the `cadkit` binary with the given arguments.
pub fn cadkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cadkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}
