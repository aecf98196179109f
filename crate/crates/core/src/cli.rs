//! `lid` command line: build, identify, evaluate, inspect.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 usage error, 2 data/parse error, 3 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classifier::{
    classify_batch, resource_file, LanguageResources, Model, Thresholds, Verdict, NGRAMS_FILE,
    RULES_FILE, SUFFIXES_FILE, THRESHOLDS_FILE, UNIGRAMS_FILE,
};
use crate::error::LidError;
use crate::evalharness::{evaluate, parse_testset};
use crate::lang::Language;
use crate::lexicon::{is_lexicon_key, UnigramLexicon};
use crate::suffixrules::{shared_suffix_fraction, RuleSet, SuffixTable, DEFAULT_RULES, MAX_SUFFIX_LEN};
use crate::textcore::{normalize, normalize_bytes, tokenize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

const BATCH_LINES: usize = 1024;

#[derive(Debug, Parser)]
#[command(name = "lid", version, about = "Identify Hindi, Magahi or other-language Devanagari text")]
struct Cli {
    /// Model directory
    #[arg(long, global = true, env = "LID_MODEL_DIR")]
    model: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a model directory from one-sentence-per-line corpora
    Build(BuildArgs),
    /// Classify each input line
    Identify(IdentifyArgs),
    /// Evaluate a model on a labeled test set
    Evaluate(EvaluateArgs),
    /// Show every piece of evidence a single word produces
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Minimum fraction of Devanagari words to pass the script gate
    #[arg(long = "min-devanagari")]
    min_devanagari: Option<f64>,
    /// Score lead required to decide a language
    #[arg(long)]
    margin: Option<f64>,
}

impl ThresholdArgs {
    fn apply(&self, base: Thresholds) -> Result<Thresholds, LidError> {
        Thresholds::new(
            self.min_devanagari.unwrap_or(base.min_devanagari_fraction),
            self.margin.unwrap_or(base.decision_margin),
        )
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Hindi corpus
    #[arg(long)]
    hin: PathBuf,
    /// Magahi corpus
    #[arg(long)]
    mag: PathBuf,
    /// Output model directory (defaults to --model)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Longest word group stored in the n-gram dictionaries
    #[arg(long = "max-ngram", default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    max_ngram: u8,
    /// Keep only words exclusive to one language in the unigram lexicons
    #[arg(long = "exclusive-lexicon")]
    exclusive_lexicon: bool,
    /// Extra Hindi word list (`word` or `word<TAB>freq` per line)
    #[arg(long = "import-hin")]
    import_hin: Vec<PathBuf>,
    /// Extra Magahi word list, e.g. a morphological analyser dictionary
    #[arg(long = "import-mag")]
    import_mag: Vec<PathBuf>,
    /// Rule file to ship instead of the bundled default
    #[arg(long)]
    rules: Option<PathBuf>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Tsv,
    Jsonl,
}

#[derive(Debug, Args)]
struct IdentifyArgs {
    /// Input file, one sentence per line (stdin when absent or `-`)
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    #[command(flatten)]
    thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Test set: `<hin|mag|other>\t<sentence>` per line
    testset: PathBuf,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    #[command(flatten)]
    thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
struct InspectArgs {
    word: String,
}

enum Failure {
    Usage(String),
    Lid(LidError),
}

impl From<LidError> for Failure {
    fn from(e: LidError) -> Self {
        Failure::Lid(e)
    }
}

fn out_err(e: std::io::Error) -> Failure {
    Failure::Lid(LidError::io("<stdout>", e))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Build(args) => cmd_build(&cli, args, stdout, stderr),
        Command::Identify(args) => cmd_identify(&cli, args, stdin, stdout, stderr),
        Command::Evaluate(args) => cmd_evaluate(&cli, args, stdout),
        Command::Inspect(args) => cmd_inspect(&cli, args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                LidError::Io { .. } => EXIT_IO,
                _ => EXIT_DATA,
            }
        }
    }
}

fn model_dir(cli: &Cli) -> Result<&Path, Failure> {
    cli.model
        .as_deref()
        .ok_or_else(|| Failure::Usage("no model directory: pass --model or set LID_MODEL_DIR".into()))
}

fn load_model(cli: &Cli, thresholds: &ThresholdArgs) -> Result<Model, Failure> {
    let model = Model::load(model_dir(cli)?)?;
    let t = thresholds.apply(model.thresholds())?;
    Ok(model.with_thresholds(t)?)
}

/// Calls `f` with every normalized line of a corpus file; returns the
/// number of lines read.
fn for_each_line(path: &Path, mut f: impl FnMut(&str)) -> Result<usize, LidError> {
    let file = File::open(path).map_err(|e| LidError::io(path, e))?;
    let mut count = 0;
    for (idx, raw) in BufReader::new(file).split(b'\n').enumerate() {
        let mut raw = raw.map_err(|e| LidError::io(path, e))?;
        if raw.last() == Some(&b'\r') {
            raw.pop();
        }
        let line = normalize_bytes(&raw).map_err(|e| {
            LidError::Parse {
                source_name: path.display().to_string(),
                line: idx + 1,
                message: e.to_string(),
            }
        })?;
        f(&line);
        count += 1;
    }
    Ok(count)
}

fn build_language(
    path: &Path,
    language: Language,
    max_n: usize,
    stderr: &mut dyn Write,
) -> Result<LanguageResources, LidError> {
    let mut res = LanguageResources::empty(language);
    let lines = for_each_line(path, |line| {
        res.unigrams.add_line(line);
        res.ngrams.add_line(line, max_n);
        res.suffixes.add_line(line, MAX_SUFFIX_LEN);
    })?;
    if lines == 0 || res.unigrams.total_tokens() == 0 {
        let _ = writeln!(
            stderr,
            "warning: {} corpus {} is empty; its resources will be empty",
            language.tag(),
            path.display()
        );
    }
    Ok(res)
}

fn import_lists(lex: &mut UnigramLexicon, paths: &[PathBuf]) -> Result<(), LidError> {
    for path in paths {
        let reader = BufReader::new(File::open(path).map_err(|e| LidError::io(path, e))?);
        lex.import(reader, &path.display().to_string())?;
    }
    Ok(())
}

fn cmd_build(cli: &Cli, args: &BuildArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let out = match &args.out {
        Some(dir) => dir.as_path(),
        None => model_dir(cli)?,
    };
    let max_n = usize::from(args.max_ngram);
    let mut hindi = build_language(&args.hin, Language::Hindi, max_n, stderr)?;
    let mut magahi = build_language(&args.mag, Language::Magahi, max_n, stderr)?;
    import_lists(&mut hindi.unigrams, &args.import_hin)?;
    import_lists(&mut magahi.unigrams, &args.import_mag)?;
    if args.exclusive_lexicon {
        hindi.unigrams.retain_exclusive(&mut magahi.unigrams);
    }

    let rules_text = match &args.rules {
        Some(path) => std::fs::read_to_string(path).map_err(|e| LidError::io(path, e))?,
        None => DEFAULT_RULES.to_string(),
    };
    let rules = RuleSet::read_from(rules_text.as_bytes(), RULES_FILE)?;
    let thresholds = args.thresholds.apply(Thresholds::default())?;
    let model = Model::new(hindi, magahi, rules, thresholds)?;

    std::fs::create_dir_all(out).map_err(|e| LidError::io(out, e))?;
    for lang in Language::ALL {
        let res = model.resources(lang);
        res.unigrams.save(&out.join(resource_file(lang, UNIGRAMS_FILE)))?;
        res.ngrams.save(&out.join(resource_file(lang, NGRAMS_FILE)))?;
        res.suffixes.save(&out.join(resource_file(lang, SUFFIXES_FILE)))?;
    }
    let rules_path = out.join(RULES_FILE);
    std::fs::write(&rules_path, rules_text).map_err(|e| LidError::io(&rules_path, e))?;
    model.thresholds().save(&out.join(THRESHOLDS_FILE))?;

    write_build_summary(&model, stdout).map_err(out_err)?;
    Ok(EXIT_OK)
}

fn write_build_summary(model: &Model, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "language\ttokens\tunique_words\tngrams\tsuffixes")?;
    for lang in Language::ALL {
        let r = model.resources(lang);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            lang.tag(),
            r.unigrams.total_tokens(),
            r.unigrams.len(),
            r.ngrams.len(),
            r.suffixes.len()
        )?;
    }
    let hin = &model.resources(Language::Hindi).suffixes;
    let mag = &model.resources(Language::Magahi).suffixes;
    match shared_suffix_fraction(mag, hin) {
        Ok(o) => writeln!(
            out,
            "shared_suffixes\t{}\t{}\t{:.4}",
            o.shared, o.union, o.fraction
        ),
        Err(_) => writeln!(out, "shared_suffixes\t0\t{}\tundefined", hin.len() + mag.len()),
    }
}

fn write_verdict(v: &Verdict, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Human => writeln!(out, "{}", v.label.phrase()),
        Format::Tsv => writeln!(out, "{}", v.to_tsv()),
        Format::Jsonl => {
            let value = json!({
                "label": v.label.tag(),
                "stage": v.stage.tag(),
                "score_hin": v.scores.hindi,
                "score_mag": v.scores.magahi,
                "echo": v.echo,
                "evidence": v.evidence,
            });
            writeln!(out, "{value}")
        }
    }
}

fn cmd_identify(
    cli: &Cli,
    args: &IdentifyArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let model = load_model(cli, &args.thresholds)?;
    let mut file_reader;
    let (reader, source): (&mut dyn BufRead, String) = match &args.input {
        Some(path) if path.as_os_str() != "-" => {
            file_reader = BufReader::new(File::open(path).map_err(|e| LidError::io(path, e))?);
            (&mut file_reader, path.display().to_string())
        }
        _ => (stdin, "<stdin>".to_string()),
    };

    let mut status = EXIT_OK;
    let mut batch: Vec<Vec<u8>> = Vec::with_capacity(BATCH_LINES);
    let mut first_line = 1usize;
    let mut flush = |batch: &mut Vec<Vec<u8>>, first_line: usize, status: &mut i32| -> Result<(), Failure> {
        for (offset, result) in classify_batch(batch, &model).into_iter().enumerate() {
            match result {
                Ok(v) => write_verdict(&v, args.format, stdout).map_err(out_err)?,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {source}:{}: {e}", first_line + offset);
                    *status = EXIT_DATA;
                }
            }
        }
        batch.clear();
        Ok(())
    };
    let mut lineno = 0usize;
    for raw in reader.split(b'\n') {
        let mut raw = raw.map_err(|e| LidError::io(&source, e))?;
        if raw.last() == Some(&b'\r') {
            raw.pop();
        }
        lineno += 1;
        batch.push(raw);
        if batch.len() == BATCH_LINES {
            flush(&mut batch, first_line, &mut status)?;
            first_line = lineno + 1;
        }
    }
    if !batch.is_empty() {
        flush(&mut batch, first_line, &mut status)?;
    }
    Ok(status)
}

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let model = load_model(cli, &args.thresholds)?;
    let file = File::open(&args.testset).map_err(|e| LidError::io(&args.testset, e))?;
    let testset = parse_testset(BufReader::new(file), &args.testset.display().to_string())?;
    let report = evaluate(&testset, &model)?;
    let text = match args.format {
        Format::Human => report.to_human(),
        Format::Tsv => report.to_tsv(),
        Format::Jsonl => {
            let value = serde_json::to_string(&report)
                .map_err(|e| Failure::Lid(LidError::Integrity(e.to_string())))?;
            format!("{value}\n")
        }
    };
    stdout.write_all(text.as_bytes()).map_err(out_err)?;
    Ok(EXIT_OK)
}

fn cmd_inspect(cli: &Cli, args: &InspectArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let word = normalize(args.word.trim());
    if !is_lexicon_key(&word) {
        return Err(LidError::Input(format!("`{}` is not a single Devanagari word", args.word)).into());
    }
    let model = Model::load(model_dir(cli)?)?;
    write_inspection(&model, &word, stdout).map_err(out_err)?;
    Ok(EXIT_OK)
}

fn write_inspection(model: &Model, word: &str, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "word\t{word}")?;
    for lang in Language::ALL {
        let freq = model.resources(lang).unigrams.frequency(word);
        match freq {
            Some(f) => writeln!(out, "{}.unigram\t{f}", lang.tag())?,
            None => writeln!(out, "{}.unigram\tabsent", lang.tag())?,
        }
    }
    for lang in Language::ALL {
        let own: &SuffixTable = &model.resources(lang).suffixes;
        let rival = &model.resources(lang.other()).suffixes;
        match own.match_word(word) {
            Some(m) => {
                let shared = if rival.contains(&m.suffix) { "\tshared" } else { "" };
                writeln!(out, "{}.suffix\t{}\t{}{shared}", lang.tag(), m.suffix, m.frequency)?
            }
            None => writeln!(out, "{}.suffix\tnone", lang.tag())?,
        }
    }
    let tokens = tokenize(word);
    for rule in model.rules().rules() {
        if rule.pattern.matches_at(&tokens, 0) {
            writeln!(
                out,
                "rule\t{}\t{}\t{}\t{}",
                rule.id,
                rule.language.tag(),
                rule.pattern,
                rule.weight()
            )?;
        }
    }
    Ok(())
}
