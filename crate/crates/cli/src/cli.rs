//! Command-line front end: `simulate`, `classify`, `audit`, and `split`.
//!
//! Exit codes are a stable contract: 0 on success, 1 when verification
//! checks fail (or per-pair warnings are promoted by `--fail-on-warn`),
//! 2 on usage, file, or configuration errors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cadkit_core::audit::{negation_report, overlap_report, skew_compare, LabelDistribution};
use cadkit_core::classify::{classify_corpus, ClassifyOptions, PerturbationType};
use cadkit_core::pair::{Example, Label, Task};
use cadkit_core::split::{build_split, incremental_type_series, subsample, BaselineMode, SplitSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::SimulateConfig;
use crate::corpus_io::{load_jsonl, load_tsv_pair, sha256_hex, LoadOutcome};
use crate::manifest::{manifest_path, RunManifest};
use crate::record::PairRecord;
use crate::report::{print_check_table, write_rows, AuditRow};
use crate::simulate::run_battery;
use crate::split_io;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "cadkit",
    version,
    about = "Analysis toolkit for counterfactually-augmented data: \
             a linear Gaussian simulator, perturbation-type classification, \
             bias audits, and reproducible splits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the linear Gaussian verification battery and write a report
    Simulate(SimulateArgs),
    /// Assign a perturbation type to every pair of a CAD corpus
    Classify(ClassifyArgs),
    /// Label-skew reports over seed and CAD groups
    Audit(AuditArgs),
    /// Build reproducible train/test splits from a classified corpus
    Split(SplitArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// JSON model configuration; the bundled default is used when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Monte Carlo sample count (overrides the config)
    #[arg(long)]
    pub samples: Option<usize>,
    /// RNG seed (overrides the config)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; JSON and CSV siblings are written
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    #[value(name = "tsv-pair")]
    TsvPair,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Corpus file (JSONL pair records, or the seed TSV in tsv-pair mode)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: InputFormat,
    /// Edited-side TSV, required with --format tsv-pair
    #[arg(long)]
    pub edited: Option<PathBuf>,
    /// Task for tsv-pair inputs (JSONL records carry their own)
    #[arg(long, default_value = "nli")]
    pub task: String,
    /// Typed corpus output (JSONL with perturbation_type appended)
    #[arg(long)]
    pub out: PathBuf,
    /// Per-type counts CSV
    #[arg(long)]
    pub counts: PathBuf,
    /// Exit 1 when any line or pair was dropped
    #[arg(long)]
    pub fail_on_warn: bool,
    /// Tag tokens without gold annotations as X instead of using the
    /// built-in tagger
    #[arg(long)]
    pub no_fallback_tagger: bool,
}

#[derive(Args)]
pub struct AuditArgs {
    #[command(subcommand)]
    pub kind: AuditKind,
}

#[derive(Subcommand)]
pub enum AuditKind {
    /// Label skew among examples with a negation word (no / not / n't)
    Negation {
        #[arg(long)]
        input: PathBuf,
        /// Field to scan for negation words
        #[arg(long, default_value = "hypothesis")]
        side: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label skew among examples with high premise/hypothesis word overlap
    Overlap {
        #[arg(long)]
        input: PathBuf,
        /// Subgroup includes overlap strictly greater than this
        #[arg(long, default_value_t = cadkit_core::audit::DEFAULT_OVERLAP_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum SplitMode {
    Cad,
    #[value(name = "seed_only")]
    SeedOnly,
    Mixed,
}

#[derive(Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: InputFormat,
    #[arg(long)]
    pub edited: Option<PathBuf>,
    #[arg(long, default_value = "nli")]
    pub task: String,
    /// Perturbation type to train on (with --pairs)
    #[arg(long = "type")]
    pub train_type: Option<String>,
    /// Number of training pairs (CAD count in mixed mode)
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, value_enum, default_value = "cad")]
    pub mode: SplitMode,
    /// Total pool size for --mode mixed
    #[arg(long)]
    pub pool: Option<usize>,
    /// Comma-separated type order for an incremental-diversity series
    #[arg(long)]
    pub series: Option<String>,
    /// Fixed train-set size for --series
    #[arg(long)]
    pub total: Option<usize>,
    /// Draw a pair-complete subsample of this many pairs
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// A usage-level problem: reported and mapped to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> Box<dyn std::error::Error> {
    Box::new(UsageError(msg.into()))
}

type CommandResult = Result<i32, Box<dyn std::error::Error>>;

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Split(args) => cmd_split(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CommandResult {
    let started = Instant::now();
    let mut manifest_inputs = BTreeMap::new();
    let mut config = match &args.config {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            manifest_inputs.insert(path.clone(), sha256_hex(&bytes));
            SimulateConfig::from_path(path)?
        }
        None => SimulateConfig::bundled_default(),
    };
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let rows = run_battery(&config)?;
    write_rows(&args.out, &rows)?;
    print_check_table(std::io::stdout().lock(), &rows)?;

    let mut manifest = RunManifest::new("simulate", serde_json::to_value(&config)?, started)
        .with_seed(config.seed);
    for (path, hash) in manifest_inputs {
        manifest = manifest.with_input(&path, hash);
    }
    manifest.write(&manifest_path(&args.out))?;

    if rows.iter().all(|r| r.pass) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_CHECKS_FAILED)
    }
}

fn load_corpus(
    input: &Path,
    format: InputFormat,
    edited: Option<&PathBuf>,
    task: &str,
) -> Result<LoadOutcome, Box<dyn std::error::Error>> {
    match format {
        InputFormat::Jsonl => Ok(load_jsonl(input)?),
        InputFormat::TsvPair => {
            let edited = edited.ok_or_else(|| usage("--format tsv-pair requires --edited"))?;
            let task = Task::parse(task).ok_or_else(|| usage(format!("unknown task `{task}`")))?;
            Ok(load_tsv_pair(input, edited, task)?)
        }
    }
}

fn report_line_errors(outcome: &LoadOutcome) {
    for err in &outcome.errors {
        eprintln!("warning: {}: {err}", outcome.corpus.provenance.source);
    }
}

fn cmd_classify(args: ClassifyArgs) -> CommandResult {
    let started = Instant::now();
    let outcome = load_corpus(&args.input, args.format, args.edited.as_ref(), &args.task)?;
    report_line_errors(&outcome);
    let corpus = &outcome.corpus;

    let options = ClassifyOptions {
        fallback_tagger: !args.no_fallback_tagger,
        ..ClassifyOptions::default()
    };
    let result = classify_corpus(&corpus.pairs, &options)?;
    for (pair_id, err) in &result.errors {
        eprintln!("warning: pair `{pair_id}` not classified: {err}");
    }
    let types = result.by_pair_id();

    let mut lines = String::new();
    for pair in &corpus.pairs {
        let Some(ty) = types.get(pair.pair_id.as_str()) else {
            continue;
        };
        let mut record = PairRecord::from_pair(pair);
        record.perturbation_type = Some(ty.to_string());
        lines.push_str(&serde_json::to_string(&record)?);
        lines.push('\n');
    }
    std::fs::write(&args.out, lines)?;

    let mut counts_csv = csv::Writer::from_path(&args.counts)?;
    counts_csv.write_record(["type", "count"])?;
    for ty in PerturbationType::CANONICAL {
        counts_csv.write_record([ty.as_str(), &result.counts[&ty].to_string()])?;
    }
    let others = result.counts.get(&PerturbationType::Other).copied().unwrap_or(0);
    if others > 0 {
        counts_csv.write_record(["other", &others.to_string()])?;
    }
    counts_csv.flush()?;

    println!("{:<12} {:>8}", "type", "count");
    for ty in PerturbationType::CANONICAL {
        println!("{:<12} {:>8}", ty.as_str(), result.counts[&ty]);
    }

    RunManifest::new(
        "classify",
        json!({
            "input": args.input.display().to_string(),
            "format": match args.format { InputFormat::Jsonl => "jsonl", InputFormat::TsvPair => "tsv-pair" },
            "out": args.out.display().to_string(),
            "counts": args.counts.display().to_string(),
            "fallback_tagger": !args.no_fallback_tagger,
            "pairs": corpus.len(),
            "dropped_lines": outcome.errors.len(),
            "unclassified_pairs": result.errors.len(),
        }),
        started,
    )
    .with_input(&args.input, corpus.provenance.file_hash.clone())
    .write(&manifest_path(&args.out))?;

    let warned = !outcome.errors.is_empty() || !result.errors.is_empty();
    if warned && args.fail_on_warn {
        Ok(EXIT_CHECKS_FAILED)
    } else {
        Ok(EXIT_OK)
    }
}

/// Rows for one group's label distribution, one row per task label.
fn group_rows(group: &str, task: Task, dist: &LabelDistribution) -> Vec<AuditRow> {
    Label::alphabet(task)
        .iter()
        .map(|&label| AuditRow {
            group: group.to_string(),
            label: label.to_string(),
            fraction: (!dist.is_flagged_empty()).then(|| dist.fraction(label)),
            subgroup_size: Some(dist.subgroup_size()),
        })
        .collect()
}

fn skew_rows(task: Task, seed: &LabelDistribution, cad: &LabelDistribution) -> Vec<AuditRow> {
    Label::alphabet(task)
        .iter()
        .map(|&label| AuditRow {
            group: "skew_cad_minus_seed".to_string(),
            label: label.to_string(),
            fraction: skew_compare(seed, cad, label),
            subgroup_size: None,
        })
        .collect()
}

fn cmd_audit(args: AuditArgs) -> CommandResult {
    let started = Instant::now();
    let (input, out) = match &args.kind {
        AuditKind::Negation { input, out, .. } | AuditKind::Overlap { input, out, .. } => {
            (input.clone(), out.clone())
        }
    };
    let outcome = load_jsonl(&input)?;
    report_line_errors(&outcome);
    let corpus = &outcome.corpus;

    // Group "seed" is the original examples; group "cad" is the augmented
    // set, i.e. seeds plus their edits.
    let seeds: Vec<&Example> = corpus.pairs.iter().map(|p| &p.seed).collect();
    let cad: Vec<&Example> = corpus
        .pairs
        .iter()
        .flat_map(|p| [&p.seed, &p.edited])
        .collect();

    let (config, seed_dist, cad_dist) = match &args.kind {
        AuditKind::Negation { side, .. } => (
            json!({"kind": "negation", "side": side, "input": input.display().to_string()}),
            negation_report(seeds, side)?,
            negation_report(cad, side)?,
        ),
        AuditKind::Overlap { threshold, .. } => (
            json!({"kind": "overlap", "threshold": threshold, "input": input.display().to_string()}),
            overlap_report(seeds, *threshold)?,
            overlap_report(cad, *threshold)?,
        ),
    };

    let mut rows = group_rows("seed", corpus.task, &seed_dist);
    rows.extend(group_rows("cad", corpus.task, &cad_dist));
    rows.extend(skew_rows(corpus.task, &seed_dist, &cad_dist));
    write_rows(&out, &rows)?;

    println!(
        "{:<20} {:<14} {:>10} {:>14}",
        "group", "label", "fraction", "subgroup_size"
    );
    for row in &rows {
        println!(
            "{:<20} {:<14} {:>10} {:>14}",
            row.group,
            row.label,
            row.fraction.map(|f| format!("{f:.4}")).unwrap_or_else(|| "-".into()),
            row.subgroup_size.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
        );
    }

    RunManifest::new("audit", config, started)
        .with_input(&input, corpus.provenance.file_hash.clone())
        .write(&manifest_path(&out))?;
    Ok(EXIT_OK)
}

fn parse_type(s: &str) -> Result<PerturbationType, Box<dyn std::error::Error>> {
    PerturbationType::parse(s).ok_or_else(|| usage(format!("unknown perturbation type `{s}`")))
}

fn cmd_split(args: SplitArgs) -> CommandResult {
    let started = Instant::now();
    let modes = [
        args.train_type.is_some(),
        args.series.is_some(),
        args.subsample.is_some(),
    ];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return Err(usage(
            "choose exactly one of --type (with --pairs), --series (with --total), or --subsample",
        ));
    }

    let outcome = load_corpus(&args.input, args.format, args.edited.as_ref(), &args.task)?;
    report_line_errors(&outcome);
    let corpus = &outcome.corpus;

    let mut sizes = serde_json::Map::new();
    let config;

    if let Some(n) = args.subsample {
        let sampled = subsample(corpus, n, args.seed)?;
        let written = split_io::write_subsample(&args.out_dir, &sampled.pairs)?;
        record_sizes(&mut sizes, &written);
        config = json!({
            "subcommand_mode": "subsample",
            "subsample": n,
            "input": args.input.display().to_string(),
        });
    } else {
        // Both remaining modes need per-pair types.
        let classification = classify_corpus(&corpus.pairs, &ClassifyOptions::default())?;
        for (pair_id, err) in &classification.errors {
            eprintln!("warning: pair `{pair_id}` not classified: {err}");
        }
        let types: BTreeMap<String, PerturbationType> = classification
            .assignments
            .iter()
            .map(|(id, ty)| (id.clone(), *ty))
            .collect();

        if let Some(series) = &args.series {
            let order: Vec<PerturbationType> = series
                .split(',')
                .map(|s| parse_type(s.trim()))
                .collect::<Result<_, _>>()?;
            let total = args
                .total
                .ok_or_else(|| usage("--series requires --total"))?;
            let sets = incremental_type_series(corpus, &types, &order, total, args.seed)?;
            let written = split_io::write_series(&args.out_dir, corpus.task, &sets)?;
            record_sizes(&mut sizes, &written);
            config = json!({
                "subcommand_mode": "series",
                "series": order.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "total": total,
                "input": args.input.display().to_string(),
            });
        } else {
            let train_type = parse_type(args.train_type.as_deref().expect("checked above"))?;
            let pairs = args
                .pairs
                .ok_or_else(|| usage("--type requires --pairs"))?;
            let baseline_mode = match args.mode {
                SplitMode::Cad => BaselineMode::Cad,
                SplitMode::SeedOnly => BaselineMode::SeedOnly,
                SplitMode::Mixed => BaselineMode::Mixed {
                    pool: args.pool.ok_or_else(|| usage("--mode mixed requires --pool"))?,
                    replace: pairs,
                },
            };
            let spec = SplitSpec {
                train_type,
                train_pairs: pairs,
                test_types: PerturbationType::CANONICAL.to_vec(),
                seed: args.seed,
                baseline_mode,
            };
            let split = build_split(corpus, &types, &spec)?;
            let written = split_io::write_split(&args.out_dir, corpus.task, &split)?;
            record_sizes(&mut sizes, &written);
            config = json!({
                "subcommand_mode": "split",
                "type": train_type.to_string(),
                "pairs": pairs,
                "mode": match args.mode {
                    SplitMode::Cad => "cad",
                    SplitMode::SeedOnly => "seed_only",
                    SplitMode::Mixed => "mixed",
                },
                "pool": args.pool,
                "input": args.input.display().to_string(),
            });
        }
    }

    let mut merged = config.as_object().cloned().unwrap_or_default();
    merged.insert("sizes".into(), serde_json::Value::Object(sizes));
    merged.insert("label_balance_enforced".into(), json!(false));
    RunManifest::new("split", serde_json::Value::Object(merged), started)
        .with_seed(args.seed)
        .with_input(&args.input, corpus.provenance.file_hash.clone())
        .write(&args.out_dir.join("manifest.json"))?;

    println!("wrote split to {}", args.out_dir.display());
    Ok(EXIT_OK)
}

fn record_sizes(sizes: &mut serde_json::Map<String, serde_json::Value>, written: &[(PathBuf, usize)]) {
    for (path, count) in written {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        sizes.insert(name, json!(count));
    }
}
