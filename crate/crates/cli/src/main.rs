use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use omni_tmae::autoencoder::train_with_progress;
use omni_tmae::corpus::read_corpus;
use omni_tmae::embedding::nearest_neighbors;
use omni_tmae::eval::{cluster_documents, run_similarity_benchmark, LabeledDocuments, SimilarityDataset};
use omni_tmae::inspect::{clause_report, cooccurrence, explain_similarity, positive_clause_reports, write_clause_csv};
use omni_tmae::{build_index, build_vocabulary, extract_all, persist, EmbeddingMatrix, TmConfig};

#[derive(Parser)]
#[command(name = "omni-tmae", version, about = "Tsetlin machine autoencoder word embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a vocabulary and index from a corpus and train a model
    Train(TrainArgs),
    /// Export the corpus vocabulary as `token<TAB>id<TAB>doc_frequency`
    Vocab(VocabArgs),
    /// Extract embeddings for every output word into a vector text file
    Embed(EmbedArgs),
    /// Nearest neighbours of a word by cosine similarity
    Similar(SimilarArgs),
    /// Spearman/Kendall correlation against human similarity ratings
    EvalSim(EvalSimArgs),
    /// Cluster labeled documents with k-means and score against the labels
    Cluster(ClusterArgs),
    /// Literal states of a word's clauses
    Inspect(InspectArgs),
    /// Features two words' embeddings share positively
    Explain(ExplainArgs),
    /// Number of corpus documents containing both words
    Cooccur(CooccurArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Text file with one document per line, or a directory of .txt files
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 40000)]
    vocab_size: usize,
    #[arg(long, default_value_t = 32)]
    clauses: usize,
    #[arg(long = "threshold-T", default_value_t = 20000)]
    threshold: u32,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 4)]
    epochs: usize,
    #[arg(long, default_value_t = 2000)]
    examples: usize,
    #[arg(long, default_value_t = 24)]
    accumulation: usize,
    #[arg(long, default_value_t = 8)]
    state_bits: u32,
    #[arg(long, overrides_with = "no_boost")]
    boost: bool,
    #[arg(long, overrides_with = "boost")]
    no_boost: bool,
    #[arg(long, env = "OMNI_SEED", default_value_t = 42)]
    seed: u64,
    /// File listing output words, one per line (default: whole vocabulary)
    #[arg(long)]
    outputs: Option<PathBuf>,
    /// Model file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VocabArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 40000)]
    vocab_size: usize,
    /// Destination TSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct VectorSource {
    /// Vector text file
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Model file; embeddings are extracted on the fly
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct SimilarArgs {
    #[command(flatten)]
    source: VectorSource,
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalSimArgs {
    #[command(flatten)]
    source: VectorSource,
    /// Similarity TSV `word1<TAB>word2<TAB>score`; repeatable
    #[arg(long, required = true)]
    dataset: Vec<PathBuf>,
    /// Also write the JSON lines here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    source: VectorSource,
    /// Labeled documents `label<TAB>text`
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, env = "OMNI_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    word: String,
    /// Clause id; all positive clauses of the word when omitted
    #[arg(long)]
    clause: Option<usize>,
    /// Literals per report, 0 for all
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    json: bool,
    /// Write every clause's full literal-state row as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    model: PathBuf,
    /// Exactly two words
    #[arg(long, num_args = 1, required = true)]
    word: Vec<String>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CooccurArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Take the vocabulary from this model instead of rebuilding it
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 40000)]
    vocab_size: usize,
    /// Exactly two words
    #[arg(long, num_args = 1, required = true)]
    word: Vec<String>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Vocab(a) => cmd_vocab(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Similar(a) => cmd_similar(a),
        Command::EvalSim(a) => cmd_eval_sim(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Cooccur(a) => cmd_cooccur(a),
    }
}

fn load_corpus(path: &Path) -> Result<Vec<Vec<String>>> {
    read_corpus(path).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_model(path: &Path) -> Result<omni_tmae::TrainedModel> {
    persist::load(path).with_context(|| format!("loading model {}", path.display()))
}

fn load_matrix(source: &VectorSource) -> Result<EmbeddingMatrix> {
    match (&source.vectors, &source.model) {
        (Some(v), _) => EmbeddingMatrix::load_text(v).with_context(|| format!("reading vectors {}", v.display())),
        (None, Some(m)) => Ok(extract_all(&load_model(m)?)),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reports an invalid flag value and exits with status 2.
fn usage_error(message: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, message).exit()
}

fn two_words(words: &[String]) -> (&str, &str) {
    match words {
        [a, b] => (a, b),
        _ => usage_error(format!("expected exactly two --word values, got {}", words.len())),
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let config = TmConfig {
        clauses: a.clauses,
        threshold: a.threshold,
        specificity: a.s,
        state_bits: a.state_bits,
        epochs: a.epochs,
        number_of_examples: a.examples,
        accumulation: a.accumulation,
        boost_true_positive: !a.no_boost,
        seed: a.seed,
    };
    if let Err(e) = config.validate() {
        usage_error(e);
    }
    if a.vocab_size == 0 {
        usage_error("--vocab-size must be >= 1");
    }
    println!("{}", config.echo());

    let docs = load_corpus(&a.corpus)?;
    let vocab = build_vocabulary(&docs, a.vocab_size);
    let index = build_index(&docs, &vocab);
    let outputs: Vec<u32> = match &a.outputs {
        Some(path) => fs::read_to_string(path)
            .with_context(|| format!("reading outputs {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|w| Ok(vocab.require(&w.to_lowercase())?))
            .collect::<Result<_>>()?,
        None => (0..vocab.len() as u32).collect(),
    };
    println!("docs={} vocab={} outputs={}", index.num_docs(), vocab.len(), outputs.len());

    let model = train_with_progress(&index, &vocab, &outputs, &config, |epoch, elapsed| {
        eprintln!("epoch {epoch}: {:.3}s", elapsed.as_secs_f64());
    })?;
    persist::save(&model, &a.out).with_context(|| format!("writing model {}", a.out.display()))?;
    println!("model written to {}", a.out.display());
    Ok(())
}

fn cmd_vocab(a: VocabArgs) -> Result<()> {
    let docs = load_corpus(&a.corpus)?;
    let vocab = build_vocabulary(&docs, a.vocab_size);
    let index = build_index(&docs, &vocab);
    match a.out {
        Some(path) => index.write_vocab_tsv(&vocab, io::BufWriter::new(fs::File::create(&path)?))?,
        None => index.write_vocab_tsv(&vocab, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_embed(a: EmbedArgs) -> Result<()> {
    let matrix = extract_all(&load_model(&a.model)?);
    matrix
        .export_text(&a.out)
        .with_context(|| format!("writing vectors {}", a.out.display()))?;
    eprintln!("wrote {} vectors of dimension {}", matrix.len(), matrix.dim());
    Ok(())
}

fn cmd_similar(a: SimilarArgs) -> Result<()> {
    let matrix = load_matrix(&a.source)?;
    let word = a.word.to_lowercase();
    let k = a.k as usize;
    let neighbors = nearest_neighbors(&matrix, &word, k)?;
    if neighbors.len() < k {
        eprintln!("warning: only {} other words available", neighbors.len());
    }
    if a.json {
        let rows: Vec<Value> = neighbors
            .iter()
            .map(|n| json!({"word": n.token, "score": n.score}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&json!({"word": word, "neighbors": rows}))?);
    } else {
        let width = neighbors.iter().map(|n| n.token.chars().count()).max().unwrap_or(0);
        for n in &neighbors {
            println!("{:<width$}  {:.6}", n.token, n.score);
        }
    }
    Ok(())
}

fn cmd_eval_sim(a: EvalSimArgs) -> Result<()> {
    let matrix = load_matrix(&a.source)?;
    let mut lines = Vec::new();
    for path in &a.dataset {
        let file = fs::File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
        let dataset = SimilarityDataset::read_tsv(BufReader::new(file))
            .with_context(|| format!("parsing dataset {}", path.display()))?;
        let result = run_similarity_benchmark(&matrix, &dataset);
        let mut value = serde_json::to_value(&result)?;
        value["dataset"] = json!(dataset_name(path));
        lines.push(serde_json::to_string(&value)?);
    }
    emit_lines(&lines, a.out.as_deref())
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let matrix = load_matrix(&a.source)?;
    let file = fs::File::open(&a.dataset).with_context(|| format!("opening dataset {}", a.dataset.display()))?;
    let docs = LabeledDocuments::read_tsv(BufReader::new(file))
        .with_context(|| format!("parsing dataset {}", a.dataset.display()))?;
    let result = cluster_documents(&matrix, &docs, a.k, a.max_iters, a.seed)?;
    let value = json!({
        "dataset": dataset_name(&a.dataset),
        "k": result.k,
        "nmi": result.nmi,
        "ari": result.ari,
    });
    emit_lines(&[serde_json::to_string(&value)?], a.out.as_deref())
}

fn emit_lines(lines: &[String], out: Option<&Path>) -> Result<()> {
    let mut stdout = io::stdout().lock();
    for line in lines {
        writeln!(stdout, "{line}")?;
    }
    if let Some(path) = out {
        let mut text = lines.join("\n");
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let word = a.word.to_lowercase();
    let reports = match a.clause {
        Some(j) => vec![clause_report(&model, &word, j, a.k)?],
        None => positive_clause_reports(&model, &word, a.k)?,
    };
    if let Some(path) = &a.csv {
        let file = io::BufWriter::new(fs::File::create(path).with_context(|| format!("writing {}", path.display()))?);
        write_clause_csv(&model, &word, file)?;
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for (i, r) in reports.iter().enumerate() {
            if i > 0 {
                println!();
            }
            print!("{r}");
        }
    }
    Ok(())
}

fn cmd_explain(a: ExplainArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let (first, second) = two_words(&a.word);
    let explanation = explain_similarity(&model, &first.to_lowercase(), &second.to_lowercase(), a.k)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&explanation)?);
    } else {
        print!("{explanation}");
    }
    Ok(())
}

fn cmd_cooccur(a: CooccurArgs) -> Result<()> {
    let (first, second) = two_words(&a.word);
    let (first, second) = (first.to_lowercase(), second.to_lowercase());
    let docs = load_corpus(&a.corpus)?;
    let vocab = match &a.model {
        Some(m) => load_model(m)?.vocab,
        None => build_vocabulary(&docs, a.vocab_size),
    };
    let index = build_index(&docs, &vocab);
    let count = cooccurrence(&index, &vocab, &first, &second)?;
    if a.json {
        println!("{}", json!({"first": first, "second": second, "documents": count}));
    } else {
        println!("{count}");
    }
    Ok(())
}
