//! `pregroup`: parse sentences against a lexicon, translate them through a
//! functor, validate data files and run the property suites.
//!
//! Exit status is 0 on success, 1 on configuration or I/O errors and 2
//! when a sentence does not reduce or does not translate.

mod resolve;

use std::fmt::Display;
use std::io::{self, BufRead};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pregroup_core::checks::{law_suite, naturality_suite, oracle_suite, SuiteReport};
use pregroup_core::translate::MAX_SELECTIONS;
use pregroup_core::{
    enumerate_reductions, is_reducible, parse_compound, render_sentence_diagram, split_braced_sentence,
    translate_sentence, CompoundType, DiagramFormat, FunctorSpec, Lexicon, ReductionWitness, TargetType,
    DEFAULT_LIMIT,
};

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Linguistic(String),
}

impl Failure {
    pub fn config(e: impl Display) -> Self {
        Failure::Config(e.to_string())
    }

    fn linguistic(e: impl Display) -> Self {
        Failure::Linguistic(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Linguistic(_) => 2,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "error: {m}"),
            Failure::Linguistic(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "pregroup", version, about = "Pregroup parsing, translation and tensor semantics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a sentence to a target type and draw the reduction.
    Parse(ParseArgs),
    /// Carry a sentence through a translation functor.
    Translate(TranslateArgs),
    /// Run a property suite.
    Check(CheckArgs),
    /// Load and validate lexicons, functors, word maps and tensor fixtures.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Dot,
    Json,
}

#[derive(Args)]
struct ParseArgs {
    /// Sentence; whitespace separates tokens, `@0` is the empty word.
    /// Read one sentence per line from stdin when omitted.
    sentence: Option<String>,
    /// Bundled lexicon name or lexicon file.
    #[arg(long)]
    lex: String,
    /// Target type; defaults to the least plain atom the sentence reduces to.
    #[arg(long)]
    target: Option<String>,
    /// Enumerate every reduction, up to --limit.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TranslateArgs {
    /// Sentence; `|` separates braces, `@0` is the empty word.
    /// Read one sentence per line from stdin when omitted.
    sentence: Option<String>,
    /// Bundled functor name or functor file.
    #[arg(long)]
    functor: String,
    /// Source lexicon; defaults to the functor's source language.
    #[arg(long)]
    src: Option<String>,
    /// Target lexicon; defaults to the functor's target language.
    #[arg(long)]
    tgt: Option<String>,
    /// Word map; defaults to the bundled map named like the functor.
    #[arg(long)]
    wordmap: Option<String>,
    /// Source target type; defaults as for `parse`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Laws,
    Naturality,
    Oracle,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Naturality residual tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Longest random type string for the oracle suite.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    /// Random samples (laws) or strings (oracle).
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Random component draws per naturality square.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    lex: Vec<String>,
    #[arg(long)]
    functor: Option<String>,
    #[arg(long)]
    src: Option<String>,
    #[arg(long)]
    tgt: Option<String>,
    #[arg(long)]
    wordmap: Option<String>,
    /// Tensor fixture, checked against the first --lex.
    #[arg(long)]
    tensors: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Translate(a) => cmd_translate(a),
        Command::Check(a) => cmd_check(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}

/// Runs `each` on the argument sentence, or on every non-blank stdin line.
/// A configuration error stops the batch; otherwise the worst line wins.
fn for_each_sentence(
    sentence: Option<String>,
    mut each: impl FnMut(&str) -> Result<(), Failure>,
) -> Result<(), Failure> {
    let Some(line) = sentence else {
        let mut worst = None;
        for line in io::stdin().lock().lines() {
            let line = line.map_err(|e| Failure::Config(format!("stdin: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            match each(&line) {
                Ok(()) => {}
                Err(f @ Failure::Config(_)) => return Err(f),
                Err(f) => {
                    eprintln!("{f}");
                    worst = Some(Failure::Linguistic("some sentences failed".into()));
                }
            }
        }
        return worst.map_or(Ok(()), Err);
    };
    each(&line)
}

/// Type selections in lexicon order, last token fastest, capped.
fn selections(typed: &[(String, Vec<CompoundType>)]) -> Vec<Vec<CompoundType>> {
    let mut out = Vec::new();
    let mut choice = vec![0usize; typed.len()];
    loop {
        out.push(typed.iter().zip(&choice).map(|((_, ts), &c)| ts[c].clone()).collect());
        if out.len() >= MAX_SELECTIONS {
            return out;
        }
        let mut i = typed.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < typed[i].1.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

fn flatten(types: &[CompoundType]) -> CompoundType {
    types.iter().flat_map(|t| t.iter().cloned()).collect()
}

/// The explicit target, or the least plain atom some selection reduces to.
fn pick_target(
    lex: &Lexicon,
    explicit: Option<&str>,
    candidates: &[Vec<CompoundType>],
) -> Result<TargetType, Failure> {
    let table = lex.table();
    if let Some(text) = explicit {
        let t = parse_compound(text, table).map_err(|e| Failure::Config(format!("--target: {e}")))?;
        return Ok(TargetType::new(t));
    }
    let mut reachable = Vec::new();
    for atom in table.atoms() {
        let target = TargetType::new(parse_compound(atom.as_str(), table).map_err(Failure::config)?);
        for sel in candidates {
            if is_reducible(&flatten(sel), &target, table).map_err(Failure::config)? {
                reachable.push((atom.clone(), target));
                break;
            }
        }
    }
    let least = reachable.iter().find(|(a, _)| {
        !reachable
            .iter()
            .any(|(b, _)| b != a && table.leq(b, a).unwrap_or(false))
    });
    least
        .map(|(_, t)| t.clone())
        .ok_or_else(|| Failure::linguistic("not reducible: no type selection reduces to a single atom"))
}

fn diagram(words: &[(String, CompoundType)], w: &ReductionWitness, format: DiagramFormat) -> Result<String, Failure> {
    let refs: Vec<(&str, &CompoundType)> = words.iter().map(|(s, t)| (s.as_str(), t)).collect();
    render_sentence_diagram(&refs, w, format).map_err(Failure::config)
}

fn witness_json(w: &ReductionWitness) -> Value {
    json!({
        "links": w.links().iter().map(|l| [l.left, l.right]).collect::<Vec<_>>(),
        "residue": w.residue(),
    })
}

fn words_json(words: &[(String, CompoundType)]) -> Value {
    words
        .iter()
        .map(|(w, t)| json!({"word": w, "type": t.to_string()}))
        .collect()
}

fn cmd_parse(a: ParseArgs) -> Result<(), Failure> {
    let lex = resolve::lexicon(&a.lex)?;
    if a.limit == 0 {
        return Err(Failure::Config("--limit must be positive".into()));
    }
    for_each_sentence(a.sentence.clone(), |line| parse_one(&lex, &a, line))
}

fn parse_one(lex: &Lexicon, a: &ParseArgs, line: &str) -> Result<(), Failure> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let typed = lex.type_sentence(&tokens).map_err(Failure::linguistic)?;
    let sels = selections(&typed);
    let target = pick_target(lex, a.target.as_deref(), &sels)?;
    let want = if a.all { a.limit } else { 1 };
    let mut found: Vec<(Vec<(String, CompoundType)>, ReductionWitness)> = Vec::new();
    for sel in &sels {
        let ws = enumerate_reductions(&flatten(sel), &target, lex.table(), want - found.len())
            .map_err(Failure::config)?;
        let words: Vec<(String, CompoundType)> = tokens.iter().map(|t| t.to_string()).zip(sel.iter().cloned()).collect();
        found.extend(ws.into_iter().map(|w| (words.clone(), w)));
        if found.len() >= want {
            break;
        }
    }
    if found.is_empty() {
        return Err(Failure::Linguistic(format!(
            "not reducible: \"{line}\" does not reduce to {}",
            target.as_type()
        )));
    }
    match a.format {
        Format::Json => {
            let parses: Vec<Value> = found
                .iter()
                .map(|(words, w)| json!({"words": words_json(words), "witness": witness_json(w)}))
                .collect();
            let out = json!({"sentence": line, "target": target.as_type().to_string(), "reductions": parses});
            println!("{out}");
        }
        Format::Text | Format::Dot => {
            let format = if matches!(a.format, Format::Dot) { DiagramFormat::Dot } else { DiagramFormat::Text };
            for (i, (words, w)) in found.iter().enumerate() {
                if found.len() > 1 && format == DiagramFormat::Text {
                    println!("reduction {} of {}", i + 1, found.len());
                }
                print!("{}", diagram(words, w, format)?);
            }
        }
    }
    Ok(())
}

struct Translation {
    src: Lexicon,
    tgt: Lexicon,
    functor: FunctorSpec,
    wordmap: pregroup_core::WordMap,
}

fn load_translation(
    functor: &str,
    src: Option<&str>,
    tgt: Option<&str>,
    wordmap: Option<&str>,
) -> Result<Translation, Failure> {
    let file = resolve::functor_file(functor)?;
    let src = resolve::lexicon(src.unwrap_or(&file.source_language))?;
    let tgt = resolve::lexicon(tgt.unwrap_or(&file.target_language))?;
    let functor_spec = FunctorSpec::from_file(&file, &src, &tgt).map_err(Failure::config)?;
    let wordmap = resolve::wordmap(wordmap, functor)?;
    Ok(Translation {
        src,
        tgt,
        functor: functor_spec,
        wordmap,
    })
}

fn cmd_translate(a: TranslateArgs) -> Result<(), Failure> {
    let t = load_translation(&a.functor, a.src.as_deref(), a.tgt.as_deref(), a.wordmap.as_deref())?;
    for_each_sentence(a.sentence.clone(), |line| translate_one(&t, &a, line))
}

fn translate_one(t: &Translation, a: &TranslateArgs, line: &str) -> Result<(), Failure> {
    let (tokens, bracing) = split_braced_sentence(line).map_err(Failure::linguistic)?;
    let typed = t.src.type_sentence(&tokens).map_err(Failure::linguistic)?;
    let target = pick_target(&t.src, a.target.as_deref(), &selections(&typed))?;
    let r = translate_sentence(&t.src, &t.tgt, &t.functor, &t.wordmap, &tokens, &bracing, &target)
        .map_err(|e| match e {
            pregroup_core::TranslateError::NoSourceReduction(_) => Failure::Linguistic(format!("not reducible: {e}")),
            pregroup_core::TranslateError::UnmappedWord(_) | pregroup_core::TranslateError::MaskLength { .. } => {
                Failure::linguistic(e)
            }
            other => Failure::config(other),
        })?;
    let target_words = r.target_word_types();
    match a.format {
        Format::Json => {
            let out = json!({
                "source": words_json(&r.source_words),
                "source_type": r.source_type.to_string(),
                "source_witness": witness_json(&r.source_witness),
                "translated": r.translated.to_string(),
                "target_words": words_json(&target_words),
                "target_witness": r.target_witness.as_ref().map(witness_json),
                "sentence": r.succeeded().then(|| r.sentence()),
                "diagnostic": r.diagnostic,
            });
            println!("{out}");
        }
        Format::Text => {
            println!("source      {}", r.source_type);
            print!("{}", diagram(&r.source_words, &r.source_witness, DiagramFormat::Text)?);
            println!("translated  {}", r.translated);
            if let Some(w) = &r.target_witness {
                print!("{}", diagram(&target_words, w, DiagramFormat::Text)?);
                println!("target      {}", r.sentence());
            }
        }
        Format::Dot => {
            print!("{}", diagram(&r.source_words, &r.source_witness, DiagramFormat::Dot)?);
            if let Some(w) = &r.target_witness {
                print!("{}", diagram(&target_words, w, DiagramFormat::Dot)?);
            }
        }
    }
    match &r.target_witness {
        Some(_) => Ok(()),
        None => Err(Failure::Linguistic(format!(
            "not translatable: {}",
            r.diagnostic.as_deref().unwrap_or("the image does not reduce")
        ))),
    }
}

fn print_report(report: &SuiteReport, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("report serializes")),
        Format::Text | Format::Dot => {
            for c in &report.cases {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("{mark} {}", c.name);
                } else {
                    println!("{mark} {}: {}", c.name, c.detail);
                }
            }
            let failed = report.cases.iter().filter(|c| !c.passed).count();
            println!("{}: {} cases, {failed} failed", report.suite, report.cases.len());
        }
    }
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    if a.tol.is_nan() || a.tol < 0.0 {
        return Err(Failure::Config("--tol must be a non-negative number".into()));
    }
    let report = match a.suite {
        Suite::Laws => law_suite(a.samples, a.seed).map_err(Failure::config)?,
        Suite::Naturality => naturality_suite(a.seeds, a.tol).map_err(Failure::config)?,
        Suite::Oracle => {
            if a.max_len > pregroup_core::reduction::ORACLE_MAX_LEN {
                return Err(Failure::Config(format!(
                    "--max-len is limited to {}",
                    pregroup_core::reduction::ORACLE_MAX_LEN
                )));
            }
            oracle_suite(a.samples, a.max_len, a.seed)
        }
    };
    print_report(&report, a.format);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Linguistic(format!("{} suite failed", report.suite)))
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Failure> {
    if a.lex.is_empty() && a.functor.is_none() && a.wordmap.is_none() {
        return Err(Failure::Config("nothing to validate; pass --lex, --functor or --wordmap".into()));
    }
    let mut first = None;
    for name in &a.lex {
        let lex = resolve::lexicon(name)?;
        let entries = lex.entries().count();
        let closed: usize = lex.entries().map(|e| e.closed_types().len()).sum();
        println!(
            "lexicon {name}: language {}, {} atoms, {entries} words, {closed} types after metarules",
            lex.language(),
            lex.table().atoms().len()
        );
        first.get_or_insert(lex);
    }
    if let Some(name) = &a.functor {
        let t = load_translation(name, a.src.as_deref(), a.tgt.as_deref(), a.wordmap.as_deref())?;
        println!(
            "functor {name}: {} from {} to {}, {} word map entries",
            t.functor.mode().name(),
            t.functor.source_language(),
            t.functor.target_language(),
            t.wordmap.len()
        );
    } else if let Some(name) = &a.wordmap {
        let wm = resolve::wordmap(Some(name), name)?;
        println!("word map {name}: {} entries", wm.len());
    }
    if let Some(name) = &a.tensors {
        let lex = first
            .as_ref()
            .ok_or_else(|| Failure::Config("--tensors needs a --lex to check against".into()))?;
        let fixture = resolve::tensors(name, lex)?;
        println!("tensors {name}: {} words", fixture.words.len());
    }
    Ok(())
}
