//! `drsmatch`: scoring, statistics, conversion and baselines for clausal-form
//! DRS corpora.

mod input;
mod report;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use drsmatch_core::convert::{
    amr_to_drs, parse_penman_corpus, spar_select, ConversionDictionary, UnmappedPolicy,
};
use drsmatch_core::parallel::map_ordered;
use drsmatch_core::synth::{random_pair, SynthParams};
use drsmatch_core::{
    aggregate, clause_type_stats, match_forms, optimal_match, prepare_for_matching, serialize_corpus, serialize_form,
    sweep_report, validate_form, FormJson, MatchConfig, MatchResult, OracleError, OracleLimits, Severity, SweepOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use input::{check_distinct, pair_documents, read_corpus, read_text};
use report::{pct, RunReport};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Parse(String),
    Pairing(String),
    Limits(String),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Pairing(_) => 3,
            CliError::Limits(_) => 4,
            CliError::Usage(_) | CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Io(m)
            | CliError::Parse(m)
            | CliError::Pairing(m)
            | CliError::Limits(m)
            | CliError::Failed(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "drsmatch", version, about = "Compare and analyse DRSs in clausal form")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Record wall-clock times (makes reports run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MatchArgs {
    /// Hill-climbing restarts per document pair.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Seed for random restarts.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Keep redundant REF clauses when matching.
    #[arg(long)]
    keep_refs: bool,
    /// Evaluate up to K document pairs concurrently.
    #[arg(long, value_name = "K")]
    parallel: Option<usize>,
}

impl MatchArgs {
    fn config(&self) -> MatchConfig {
        MatchConfig::default()
            .with_restarts(self.restarts)
            .with_seed(self.seed)
            .with_keep_refs(self.keep_refs)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score system DRSs against gold DRSs.
    Score {
        system: String,
        gold: String,
        #[command(flatten)]
        matching: MatchArgs,
        /// Print the best variable mapping per document.
        #[arg(long)]
        print_mapping: bool,
        /// Use the exact matcher (small inputs only).
        #[arg(long)]
        oracle: bool,
    },
    /// Compare two translations of the same documents, paired by id.
    Translations {
        lang_a: String,
        lang_b: String,
        #[command(flatten)]
        matching: MatchArgs,
        /// List the ids of pairs scoring below 1.0.
        #[arg(long)]
        list: bool,
    },
    /// Clause-type counts of a corpus.
    Stats { path: String },
    /// Corpus F1 for increasing restart counts.
    Sweep {
        system: String,
        gold: String,
        #[command(flatten)]
        matching: MatchArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,20")]
        restart_list: Vec<usize>,
        /// Add an exact-matching row.
        #[arg(long)]
        oracle: bool,
        /// Break F1 down by gold clause count.
        #[arg(long)]
        by_length: bool,
    },
    /// Select the most central document of a corpus (SPAR baseline).
    Spar {
        corpus: String,
        #[command(flatten)]
        matching: MatchArgs,
        /// Print the selected DRS.
        #[arg(long, conflicts_with = "apply")]
        emit: bool,
        /// Print the selected DRS N times, as baseline output for N inputs.
        #[arg(long, value_name = "N")]
        apply: Option<usize>,
    },
    /// Convert PENMAN AMR graphs to clausal forms.
    Amr2drs {
        penman: String,
        /// Extra rules: `rel|concept<TAB>source<TAB>target` lines.
        #[arg(long)]
        dict: Option<String>,
        /// Fail on relations without a role instead of skipping them.
        #[arg(long)]
        strict: bool,
    },
    /// Check well-formedness of every document.
    Validate { path: String },
    /// Print a corpus as JSON.
    Json { path: String },
    /// Write random system/gold corpora for experiments.
    Synth {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        system_out: String,
        #[arg(long)]
        gold_out: String,
        /// Larger forms (up to 40 clauses) instead of brute-force sized ones.
        #[arg(long)]
        large: bool,
    },
}

struct Ctx {
    json: bool,
    timings: bool,
    start: Instant,
    argv: Vec<String>,
}

impl Ctx {
    fn report<T: Serialize>(&self, config: serde_json::Value, result: T) -> RunReport<T> {
        RunReport {
            command: self.argv.clone(),
            config,
            result,
            elapsed: self.timings.then(|| self.start.elapsed().as_secs_f64()),
        }
    }

    fn emit<T: Serialize>(&self, config: serde_json::Value, result: T, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", self.report(config, result).to_json());
        } else {
            print!("{}", text());
            if let Some(secs) = self.timings.then(|| self.start.elapsed().as_secs_f64()) {
                println!("elapsed: {secs:.3}s");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        json: cli.json,
        timings: cli.timings,
        start: Instant::now(),
        argv: std::env::args().skip(1).collect(),
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<(), CliError> {
    match command {
        Command::Score {
            system,
            gold,
            matching,
            print_mapping,
            oracle,
        } => cmd_score(ctx, &system, &gold, &matching, print_mapping, oracle),
        Command::Translations {
            lang_a,
            lang_b,
            matching,
            list,
        } => cmd_translations(ctx, &lang_a, &lang_b, &matching, list),
        Command::Stats { path } => cmd_stats(ctx, &path),
        Command::Sweep {
            system,
            gold,
            matching,
            restart_list,
            oracle,
            by_length,
        } => cmd_sweep(ctx, &system, &gold, &matching, restart_list, oracle, by_length),
        Command::Spar {
            corpus,
            matching,
            emit: _,
            apply,
        } => cmd_spar(ctx, &corpus, &matching, apply),
        Command::Amr2drs { penman, dict, strict } => cmd_amr2drs(ctx, &penman, dict.as_deref(), strict),
        Command::Validate { path } => cmd_validate(ctx, &path),
        Command::Json { path } => cmd_json(&path),
        Command::Synth {
            pairs,
            seed,
            system_out,
            gold_out,
            large,
        } => cmd_synth(pairs, seed, &system_out, &gold_out, large),
    }
}

fn exact(sys: &drsmatch_core::ClausalForm, gold: &drsmatch_core::ClausalForm, keep_refs: bool) -> Result<MatchResult, CliError> {
    let a = prepare_for_matching(sys, keep_refs);
    let b = prepare_for_matching(gold, keep_refs);
    optimal_match(&a, &b, &OracleLimits::default()).map_err(|e| match e {
        OracleError::BudgetExceeded { .. } | OracleError::TooLarge { .. } => CliError::Limits(e.to_string()),
    })
}

fn cmd_score(
    ctx: &Ctx,
    system: &str,
    gold: &str,
    matching: &MatchArgs,
    print_mapping: bool,
    oracle: bool,
) -> Result<(), CliError> {
    check_distinct(system, gold)?;
    let pairing = pair_documents(read_corpus(system)?, read_corpus(gold)?, true)?;
    let config = matching.config();
    let outcomes = map_ordered(&pairing.pairs, matching.parallel, |(id, s, g)| {
        let result = if oracle {
            exact(s, g, config.keep_refs)
        } else {
            Ok(match_forms(s, g, &config))
        };
        result.map(|r| (id.clone(), r)).map_err(|e| match e {
            CliError::Limits(m) => CliError::Limits(format!("document {id}: {m}")),
            other => other,
        })
    });
    let results = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let score = aggregate(results);
    let config_json = json!({
        "match": config,
        "oracle": oracle,
        "paired_by": if pairing.by_id { "id" } else { "position" },
        "parallel": matching.parallel,
    });
    ctx.emit(config_json, &score, || {
        let mut out = String::new();
        if print_mapping {
            for (id, r) in &score.per_doc {
                let pairs: Vec<String> = r.best_mapping.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                let _ = writeln!(out, "mapping {id}: {}", pairs.join(" "));
            }
        }
        out + &report::score_text(&score)
    });
    Ok(())
}

#[derive(Serialize)]
struct TranslationSummary {
    documents: usize,
    mean_f1: f64,
    below_one: usize,
    below_one_percent: f64,
    unpaired: Vec<String>,
    below_one_ids: Vec<String>,
    per_doc: Vec<(String, f64)>,
}

fn cmd_translations(ctx: &Ctx, a: &str, b: &str, matching: &MatchArgs, list: bool) -> Result<(), CliError> {
    check_distinct(a, b)?;
    let pairing = pair_documents(read_corpus(a)?, read_corpus(b)?, false)?;
    for id in &pairing.unpaired {
        eprintln!("warning: document {id} has no translation; skipped");
    }
    let config = matching.config();
    let results = map_ordered(&pairing.pairs, matching.parallel, |(id, s, g)| {
        (id.clone(), match_forms(s, g, &config))
    });
    let score = aggregate(results);
    let below: Vec<String> = score
        .per_doc
        .iter()
        .filter(|(_, r)| r.f1 < 1.0)
        .map(|(id, _)| id.clone())
        .collect();
    let documents = score.per_doc.len();
    let summary = TranslationSummary {
        documents,
        mean_f1: score.macro_f1,
        below_one: below.len(),
        below_one_percent: if documents == 0 {
            0.0
        } else {
            100.0 * below.len() as f64 / documents as f64
        },
        unpaired: pairing.unpaired,
        below_one_ids: below,
        per_doc: score.per_doc.iter().map(|(id, r)| (id.clone(), r.f1)).collect(),
    };
    ctx.emit(json!({ "match": config, "parallel": matching.parallel }), &summary, || {
        let mut out = format!(
            "documents: {}\nmean F1: {}\nF<1.0: {} ({:.1}%)\n",
            summary.documents,
            pct(summary.mean_f1),
            summary.below_one,
            summary.below_one_percent
        );
        if !summary.unpaired.is_empty() {
            let _ = writeln!(out, "unpaired: {}", summary.unpaired.len());
        }
        if list {
            for id in &summary.below_one_ids {
                let _ = writeln!(out, "{id}");
            }
        }
        out
    });
    Ok(())
}

fn cmd_stats(ctx: &Ctx, path: &str) -> Result<(), CliError> {
    let docs = read_corpus(path)?;
    let stats = clause_type_stats(docs.iter().map(|d| &d.form));
    let result = json!({ "documents": docs.len(), "counts": stats, "total": stats.total() });
    ctx.emit(json!({}), result, || {
        let mut out = format!("documents: {}\n", docs.len());
        for (label, n) in stats.rows() {
            let _ = writeln!(out, "{label:<8} {n:>8}");
        }
        let _ = writeln!(out, "{:<8} {:>8}", "total", stats.total());
        out
    });
    Ok(())
}

fn cmd_sweep(
    ctx: &Ctx,
    system: &str,
    gold: &str,
    matching: &MatchArgs,
    mut restart_list: Vec<usize>,
    oracle: bool,
    by_length: bool,
) -> Result<(), CliError> {
    check_distinct(system, gold)?;
    if restart_list.is_empty() {
        return Err(CliError::Usage("empty restart list".into()));
    }
    restart_list.sort_unstable();
    restart_list.dedup();
    let pairing = pair_documents(read_corpus(system)?, read_corpus(gold)?, true)?;
    let pairs: Vec<_> = pairing.pairs.into_iter().map(|(_, s, g)| (s, g)).collect();
    let options = SweepOptions {
        threads: matching.parallel,
        timings: ctx.timings,
        lengths: by_length.then(|| pairs.iter().map(|(_, g)| g.len()).collect()),
        oracle: oracle.then(OracleLimits::default),
    };
    let config = matching.config();
    let sweep = sweep_report(&pairs, &restart_list, &config, &options);
    ctx.emit(
        json!({ "match": config, "restart_list": restart_list, "oracle": oracle, "parallel": matching.parallel }),
        &sweep,
        || report::sweep_text(&sweep),
    );
    Ok(())
}

fn cmd_spar(ctx: &Ctx, corpus: &str, matching: &MatchArgs, apply: Option<usize>) -> Result<(), CliError> {
    let docs = read_corpus(corpus)?;
    let forms: Vec<_> = docs.iter().map(|d| d.form.clone()).collect();
    let config = matching.config();
    let chosen = spar_select(&forms, &config, matching.parallel).map_err(|e| CliError::Failed(e.to_string()))?;
    let form = &forms[chosen.index];
    let copies = apply.unwrap_or(1);
    let ids: Vec<String> = (1..=copies).map(|i| i.to_string()).collect();
    let output = if apply.is_some() {
        serialize_corpus(ids.iter().map(|id| (id.as_str(), form)))
    } else {
        serialize_form(form)
    };
    if ctx.json {
        let result = json!({ "selection": chosen, "form": FormJson::from(form), "copies": copies });
        println!("{}", ctx.report(json!({ "match": config }), result).to_json());
    } else {
        eprintln!(
            "selected {} (document {}), mean F1 {}",
            chosen.doc_id,
            chosen.index + 1,
            pct(chosen.mean_f1)
        );
        print!("{output}");
    }
    Ok(())
}

fn cmd_amr2drs(ctx: &Ctx, penman: &str, dict: Option<&str>, strict: bool) -> Result<(), CliError> {
    let text = read_text(penman)?;
    let blocks = parse_penman_corpus(&text).map_err(|e| CliError::Parse(format!("{penman}:{}: {}", e.line, e.message)))?;
    let mut dictionary = ConversionDictionary::default();
    if let Some(path) = dict {
        let rules = read_text(path)?;
        dictionary
            .extend_from_tsv(&rules)
            .map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
    }
    let policy = if strict { UnmappedPolicy::Fail } else { UnmappedPolicy::Skip };
    let mut docs = Vec::with_capacity(blocks.len());
    let mut warnings = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let id = block.id.clone().unwrap_or_else(|| (i + 1).to_string());
        let conv = amr_to_drs(&block.graph, &dictionary, policy)
            .map_err(|e| CliError::Failed(format!("graph {id}: {e}")))?;
        warnings.extend(conv.warnings.iter().map(|w| format!("graph {id}: {w}")));
        docs.push((id, conv.form));
    }
    if ctx.json {
        let forms: Vec<FormJson> = docs
            .iter()
            .map(|(id, f)| FormJson::from(&f.clone().with_doc_id(id.clone())))
            .collect();
        let result = json!({ "documents": forms, "warnings": warnings });
        println!("{}", ctx.report(json!({ "strict": strict, "dict": dict }), result).to_json());
    } else {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        print!("{}", serialize_corpus(docs.iter().map(|(id, f)| (id.as_str(), f))));
    }
    Ok(())
}

fn cmd_validate(ctx: &Ctx, path: &str) -> Result<(), CliError> {
    let docs = read_corpus(path)?;
    let mut errors = 0;
    let mut per_doc = Vec::new();
    for doc in &docs {
        let report = validate_form(&doc.form);
        errors += report
            .violations
            .iter()
            .filter(|v| v.severity() == Severity::Error)
            .count();
        per_doc.push((doc.doc_id.clone(), report));
    }
    ctx.emit(json!({}), json!({ "documents": docs.len(), "errors": errors, "reports": per_doc }), || {
        let mut out = String::new();
        for (id, report) in &per_doc {
            for v in &report.violations {
                let level = match v.severity() {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                let _ = writeln!(out, "{id}: {level}: {v}");
            }
        }
        let _ = writeln!(out, "{} documents, {errors} errors", docs.len());
        out
    });
    if errors > 0 {
        return Err(CliError::Failed(format!("{errors} validation errors")));
    }
    Ok(())
}

fn cmd_json(path: &str) -> Result<(), CliError> {
    let docs = read_corpus(path)?;
    let forms: Vec<FormJson> = docs.iter().map(|d| FormJson::from(&d.form)).collect();
    println!("{}", serde_json::to_string_pretty(&forms).expect("serializable"));
    Ok(())
}

fn cmd_synth(pairs: usize, seed: u64, system_out: &str, gold_out: &str, large: bool) -> Result<(), CliError> {
    let params = if large { SynthParams::sweep() } else { SynthParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generated: Vec<_> = (0..pairs).map(|_| random_pair(&mut rng, &params)).collect();
    let ids: Vec<String> = (1..=pairs).map(|i| format!("s{i}")).collect();
    let sys = serialize_corpus(ids.iter().zip(&generated).map(|(id, (a, _))| (id.as_str(), a)));
    let gold = serialize_corpus(ids.iter().zip(&generated).map(|(id, (_, b))| (id.as_str(), b)));
    for (path, text) in [(system_out, sys), (gold_out, gold)] {
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    }
    eprintln!("wrote {pairs} pairs to {system_out} and {gold_out}");
    Ok(())
}
