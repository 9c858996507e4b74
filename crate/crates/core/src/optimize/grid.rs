use rayon::prelude::*;

use super::mrr::{mrr_from_ranks, CitationGold, MrrResult};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::search::{combine_parts, ScoreParts, WeightVector};

/// Grid resolution: weights run over `0, 1/divisions, ..., 1` per field.
pub const DIVISIONS: u8 = 10;

/// Number of grid points for a resolution, the all-zero vector included.
pub fn grid_size(divisions: u8) -> usize {
    (divisions as usize + 1).pow(5)
}

/// Grid coordinates of point `i` in lexicographic order.
fn steps_of(mut i: usize, divisions: u8) -> [u8; 5] {
    let base = divisions as usize + 1;
    let mut steps = [0u8; 5];
    for s in steps.iter_mut().rev() {
        *s = (i % base) as u8;
        i /= base;
    }
    steps
}

/// Weight vector at grid coordinates.
pub fn grid_weights<T: Real>(steps: [u8; 5], divisions: u8) -> Result<WeightVector<T>> {
    WeightVector::new(steps.map(|s| T::from_count(s as usize) / T::from_count(divisions as usize)))
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub steps: [u8; 5],
    pub mean_mrr: f64,
}

#[derive(Debug, Clone)]
pub struct GridResult<T> {
    pub best: WeightVector<T>,
    pub best_steps: [u8; 5],
    pub best_mrr: f64,
    /// Per-measure results at the optimum.
    pub per_measure: Vec<MrrResult>,
    /// Every non-zero grid point in lexicographic order.
    pub surface: Vec<GridPoint>,
    pub divisions: u8,
}

/// Precomputed ranking inputs of one measure.
struct Prepared<T> {
    measure_id: String,
    table: Vec<[T; 5]>,
    denominators: [T; 5],
    /// Rows of cited documents in `docs`.
    gold_rows: Vec<usize>,
    total: usize,
}

impl<T: Real> Prepared<T> {
    fn new(parts: &ScoreParts<T>, gold: &CitationGold) -> Option<Self> {
        let cited = gold.cited(&parts.measure_id)?;
        let (docs, table): (Vec<String>, Vec<[T; 5]>) = parts.filled_table().into_iter().unzip();
        let gold_rows = docs
            .iter()
            .enumerate()
            .filter(|(_, d)| cited.contains(*d))
            .map(|(i, _)| i)
            .collect();
        Some(Prepared {
            measure_id: parts.measure_id.clone(),
            table,
            denominators: parts.denominators(),
            gold_rows,
            total: cited.len(),
        })
    }

    /// Same ranks as sorting the recombined list (score descending, id
    /// ascending); rows are already in id order.
    fn ranks(&self, weights: &WeightVector<T>, scores: &mut Vec<T>) -> Vec<usize> {
        scores.clear();
        scores.extend(
            self.table
                .iter()
                .map(|row| combine_parts(*row, self.denominators, weights)),
        );
        let mut ranks: Vec<usize> = self
            .gold_rows
            .iter()
            .map(|&g| {
                let sg = scores[g];
                1 + scores
                    .iter()
                    .enumerate()
                    .filter(|(i, s)| **s > sg || (**s == sg && *i < g))
                    .count()
            })
            .collect();
        ranks.sort_unstable();
        ranks
    }

    fn evaluate(&self, weights: &WeightVector<T>, scores: &mut Vec<T>) -> f64 {
        mrr_from_ranks(&self.ranks(weights, scores), self.total)
    }

    fn result(&self, weights: &WeightVector<T>) -> MrrResult {
        let ranks = self.ranks(weights, &mut Vec::new());
        MrrResult {
            measure_id: self.measure_id.clone(),
            v: mrr_from_ranks(&ranks, self.total),
            m: ranks.len(),
            total: self.total,
            ranks,
        }
    }
}

fn prepare<T: Real>(parts: &[ScoreParts<T>], gold: &CitationGold) -> Result<Vec<Prepared<T>>> {
    let prepared: Vec<Prepared<T>> = parts.iter().filter_map(|p| Prepared::new(p, gold)).collect();
    if prepared.is_empty() {
        return Err(Error::EmptyGold);
    }
    Ok(prepared)
}

/// Mean modified MRR of one weight vector over the measures with citations.
pub fn evaluate_weights<T: Real>(
    parts: &[ScoreParts<T>],
    gold: &CitationGold,
    weights: &WeightVector<T>,
) -> Result<(f64, Vec<MrrResult>)> {
    let prepared = prepare(parts, gold)?;
    let results: Vec<MrrResult> = prepared.iter().map(|p| p.result(weights)).collect();
    let mean = results.iter().map(|r| r.v).sum::<f64>() / results.len() as f64;
    Ok((mean, results))
}

/// Exhaustive search over the weight grid with step `1/DIVISIONS`.
///
/// Works only from the precomputed score parts. Measures without citations
/// are skipped; the mean is unweighted. Ties go to the lexicographically
/// smallest weight vector.
pub fn grid_search<T: Real>(parts: &[ScoreParts<T>], gold: &CitationGold) -> Result<GridResult<T>> {
    grid_search_with(parts, gold, DIVISIONS)
}

pub fn grid_search_with<T: Real>(parts: &[ScoreParts<T>], gold: &CitationGold, divisions: u8) -> Result<GridResult<T>> {
    assert!(divisions >= 1, "at least one division");
    let prepared = prepare(parts, gold)?;
    let n_measures = prepared.len() as f64;
    let surface: Vec<GridPoint> = (1..grid_size(divisions))
        .into_par_iter()
        .map_init(Vec::new, |scores, i| {
            let steps = steps_of(i, divisions);
            let w = grid_weights::<T>(steps, divisions).expect("non-zero grid point");
            let total: f64 = prepared.iter().map(|p| p.evaluate(&w, scores)).sum();
            GridPoint {
                steps,
                mean_mrr: total / n_measures,
            }
        })
        .collect();
    // first maximum in lexicographic order
    let best = surface
        .iter()
        .fold(None::<&GridPoint>, |acc, p| match acc {
            Some(b) if b.mean_mrr >= p.mean_mrr => Some(b),
            _ => Some(p),
        })
        .expect("grid is non-empty");
    let best_steps = best.steps;
    let best_mrr = best.mean_mrr;
    let weights = grid_weights(best_steps, divisions)?;
    let per_measure = prepared.iter().map(|p| p.result(&weights)).collect();
    Ok(GridResult {
        best: weights,
        best_steps,
        best_mrr,
        per_measure,
        surface,
        divisions,
    })
}

pub const SURFACE_HEADER: &str = "w_keywords\tw_concepts\tw_expansion\tw_relation\tw_cqm_relation\tmean_mrr";

fn step_text(step: u8, divisions: u8) -> String {
    (step as f64 / divisions as f64).to_string()
}

/// Surface dump: five weights and the mean MRR per row.
pub fn surface_to_tsv(result: &GridResult<impl Real>) -> String {
    let mut out = String::from(SURFACE_HEADER);
    out.push('\n');
    for p in &result.surface {
        let w: Vec<String> = p.steps.iter().map(|s| step_text(*s, result.divisions)).collect();
        out.push_str(&format!("{}\t{}\n", w.join("\t"), p.mean_mrr));
    }
    out
}
