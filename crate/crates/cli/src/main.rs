use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cqmscan::extraction::Resources;
use cqmscan::matching::{parse_verdicts, verdicts_to_tsv, EmbeddingTable, VerdictRow};
use cqmscan::optimize::{evaluate_weights, grid_search, surface_to_tsv, CitationGold};
use cqmscan::pipeline::{
    self, evaluate, ingest_files, load_measures, match_measures, measure_score_parts, parse_rankings, rankings_to_tsv,
    scan_measures, ManualJudgements, MatchSettings,
};
use cqmscan::search::{SearchIndex, Target};
use cqmscan::triple_store::TripleStore;
use cqmscan::{tsv, Error, Weights};

#[derive(Parser)]
#[command(name = "cqmscan", version, about = "Literature scan for clinical quality measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract fielded documents and triples from a corpus file.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        /// Directory with resource tables; the bundled tables when absent.
        #[arg(long)]
        resources: Option<PathBuf>,
        /// Output directory for fielded.tsv and triples.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the search index from fielded documents.
    Index {
        #[arg(long)]
        fielded: PathBuf,
        #[arg(long)]
        index: PathBuf,
    },
    /// Rank indexed documents against each measure.
    Scan {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        resources: Option<PathBuf>,
        /// Five field weights: keywords, concepts, expansions, relations, cqm relations.
        #[arg(long)]
        weights: Option<Weights>,
        #[arg(long, default_value_t = 30)]
        top_k: usize,
        #[arg(long, default_value_t = Target::Abstracts)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-search the field weights against cited documents.
    OptimizeWeights {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// Citations: measure_id, doc_id per row.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        resources: Option<PathBuf>,
        #[arg(long, default_value_t = Target::Abstracts)]
        target: Target,
        /// Output directory for weights.txt, mrr.tsv and surface.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Judge relevancy by locating the measure graphs in document graphs.
    MatchGraphs {
        #[arg(long)]
        triples: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Scan output; restricts each measure to its ranked documents.
        #[arg(long)]
        ranking: Option<PathBuf>,
        #[arg(long)]
        resources: Option<PathBuf>,
        #[arg(long, default_value_t = 0.6)]
        threshold: f64,
        #[arg(long, default_value_t = 0.0)]
        confidence_min: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare verdicts with manual relevancy calls.
    Evaluate {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        manual: PathBuf,
        #[arg(long, default_value_t = 30)]
        top_k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled resource tables to a directory for editing.
    Resources {
        #[arg(long)]
        out: PathBuf,
    },
}

fn resources(dir: Option<&Path>) -> cqmscan::Result<Resources> {
    match dir {
        Some(d) => Resources::load_dir(d),
        None => Ok(Resources::bundled().clone()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> cqmscan::Result<()> {
    match out {
        Some(path) => tsv::write_string(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })
        }
    }
}

fn run(command: Command) -> cqmscan::Result<()> {
    match command {
        Command::Ingest {
            corpus,
            resources: dir,
            out,
        } => {
            let res = resources(dir.as_deref())?;
            let done = ingest_files(&corpus, &res, &out)?;
            log::info!(
                "{} documents, {} triples, {} records skipped",
                done.docs.len(),
                done.store.len(),
                done.rejected.len()
            );
        }
        Command::Index { fielded, index } => {
            let built = pipeline::index_files::<f64>(&fielded, &index)?;
            log::info!("indexed {} documents", built.n_docs());
        }
        Command::Scan {
            index,
            measure,
            resources: dir,
            weights,
            top_k,
            target,
            out,
        } => {
            let index = SearchIndex::<f64>::load(&index)?;
            let measures = load_measures(&measure)?;
            let weights = weights.unwrap_or_default();
            let rankings = scan_measures(&index, &measures, &resources(dir.as_deref())?, &weights, top_k, target)?;
            emit(out.as_deref(), &rankings_to_tsv(&rankings))?;
        }
        Command::OptimizeWeights {
            index,
            measure,
            gold,
            resources: dir,
            target,
            out,
        } => {
            let index = SearchIndex::<f64>::load(&index)?;
            let measures = load_measures(&measure)?;
            let gold = CitationGold::parse(&tsv::read_to_string(&gold)?, &gold.display().to_string())?;
            let parts = measure_score_parts(&index, &measures, &resources(dir.as_deref())?, target)?;
            let result = grid_search(&parts, &gold)?;
            let (published, _) = evaluate_weights(&parts, &gold, &Weights::published())?;
            log::info!("best mean MRR {} (published weights: {published})", result.best_mrr);
            tsv::write_string(&out.join("weights.txt"), &format!("{}\n", result.best))?;
            let mut mrr = String::from("measure_id\tmrr\tfound\tcited\tranks\n");
            for r in &result.per_measure {
                let ranks: Vec<String> = r.ranks.iter().map(usize::to_string).collect();
                mrr.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    r.measure_id,
                    r.v,
                    r.m,
                    r.total,
                    ranks.join(",")
                ));
            }
            mrr.push_str(&format!("mean\t{}\t\t\t\n", result.best_mrr));
            tsv::write_string(&out.join("mrr.tsv"), &mrr)?;
            tsv::write_string(&out.join("surface.tsv"), &surface_to_tsv(&result))?;
        }
        Command::MatchGraphs {
            triples,
            measure,
            embeddings,
            ranking,
            resources: dir,
            threshold,
            confidence_min,
            out,
        } => {
            let res = resources(dir.as_deref())?;
            let store = TripleStore::open(&triples)?;
            let measures = load_measures(&measure)?;
            let embeddings = EmbeddingTable::<f64>::load(&embeddings)?;
            let rankings = match &ranking {
                Some(path) => Some(parse_rankings::<f64>(
                    &tsv::read_to_string(path)?,
                    &path.display().to_string(),
                )?),
                None => None,
            };
            let settings = MatchSettings {
                acronyms: &res.acronyms,
                embeddings: &embeddings,
                threshold,
                confidence_min,
            };
            let verdicts = match_measures(&store, &measures, rankings.as_deref(), &settings)?;
            emit(out.as_deref(), &verdicts_to_tsv(&verdicts))?;
        }
        Command::Evaluate {
            verdicts,
            manual,
            top_k,
            out,
        } => {
            let rows: Vec<VerdictRow> =
                parse_verdicts(&tsv::read_to_string(&verdicts)?, &verdicts.display().to_string())?;
            let manual = ManualJudgements::parse(&tsv::read_to_string(&manual)?, &manual.display().to_string())?;
            let report = evaluate(&rows, &manual, top_k)?;
            emit(out.as_deref(), &report.to_tsv())?;
        }
        Command::Resources { out } => Resources::write_bundled(&out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
