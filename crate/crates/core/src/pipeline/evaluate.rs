use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matching::VerdictRow;
use crate::tsv;

/// Manual relevancy calls: measure -> doc -> relevant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManualJudgements {
    calls: BTreeMap<String, BTreeMap<String, bool>>,
}

impl ManualJudgements {
    /// Rows `measure_id<TAB>doc_id<TAB>yes|no`; a header row is allowed.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut manual = ManualJudgements::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [measure, doc, call] = cells.as_slice() else {
                return Err(Error::parse(origin, line_no, "expected measure_id, doc_id, relevant"));
            };
            if *measure == "measure_id" {
                continue;
            }
            let relevant = tsv::parse_bool(call)
                .ok_or_else(|| Error::parse(origin, line_no, format!("bad relevancy `{call}`")))?;
            manual.insert(measure, doc, relevant);
        }
        if manual.is_empty() {
            return Err(Error::EmptyManual);
        }
        Ok(manual)
    }

    pub fn insert(&mut self, measure_id: &str, doc_id: &str, relevant: bool) {
        self.calls
            .entry(measure_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), relevant);
    }

    pub fn is_empty(&self) -> bool {
        self.calls.values().all(BTreeMap::is_empty)
    }

    pub fn measures(&self) -> impl Iterator<Item = &str> {
        self.calls.keys().map(String::as_str)
    }

    pub fn calls(&self, measure_id: &str) -> Option<&BTreeMap<String, bool>> {
        self.calls.get(measure_id)
    }
}

/// Agreement counts between an automated flag and the manual calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn add(&mut self, auto: bool, manual: bool) {
        match (auto, manual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    /// `tp / (tp + fp)`; zero when nothing was flagged.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `tp / (tp + fn)`; zero when nothing is manually relevant.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEval {
    pub measure_id: String,
    pub relevant: Confusion,
    pub stringent: Confusion,
    /// Automated relevant documents over `k`.
    pub relevant_fraction: f64,
    /// Verdict rows without a manual call (left out of the counts).
    pub unadjudicated: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub measures: Vec<MeasureEval>,
}

impl EvalReport {
    fn mean(&self, f: impl Fn(&MeasureEval) -> f64) -> f64 {
        if self.measures.is_empty() {
            return 0.0;
        }
        self.measures.iter().map(f).sum::<f64>() / self.measures.len() as f64
    }

    pub fn mean_precision(&self) -> f64 {
        self.mean(|m| m.relevant.precision())
    }

    pub fn mean_recall(&self) -> f64 {
        self.mean(|m| m.relevant.recall())
    }

    pub fn mean_stringent_precision(&self) -> f64 {
        self.mean(|m| m.stringent.precision())
    }

    pub fn mean_stringent_recall(&self) -> f64 {
        self.mean(|m| m.stringent.recall())
    }

    pub fn mean_relevant_fraction(&self) -> f64 {
        self.mean(|m| m.relevant_fraction)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(EVAL_HEADER);
        out.push('\n');
        let row = |id: &str, c: Option<&Confusion>, p: f64, r: f64, sp: f64, sr: f64, frac: f64| {
            let counts = c.map_or_else(
                || "\t\t\t".to_string(),
                |c| format!("{}\t{}\t{}\t{}", c.tp, c.fp, c.fn_, c.tn),
            );
            format!("{id}\t{counts}\t{p:.4}\t{r:.4}\t{sp:.4}\t{sr:.4}\t{frac:.4}\n")
        };
        for m in &self.measures {
            out.push_str(&row(
                &tsv::escape(&m.measure_id),
                Some(&m.relevant),
                m.relevant.precision(),
                m.relevant.recall(),
                m.stringent.precision(),
                m.stringent.recall(),
                m.relevant_fraction,
            ));
        }
        out.push_str(&row(
            "mean",
            None,
            self.mean_precision(),
            self.mean_recall(),
            self.mean_stringent_precision(),
            self.mean_stringent_recall(),
            self.mean_relevant_fraction(),
        ));
        out
    }
}

pub const EVAL_HEADER: &str =
    "measure_id\ttp\tfp\tfn\ttn\tprecision\trecall\tstringent_precision\tstringent_recall\trelevant_fraction";

/// Scores automated verdicts against the manual calls.
///
/// Only measures in the manual file are reported, and only documents with a
/// manual call enter precision and recall. The relevant fraction counts every
/// verdict row of the measure.
pub fn evaluate(verdicts: &[VerdictRow], manual: &ManualJudgements, k: usize) -> Result<EvalReport> {
    if manual.is_empty() {
        return Err(Error::EmptyManual);
    }
    if k == 0 {
        return Err(Error::InvalidQuery("k must be at least 1".into()));
    }
    let mut measures = Vec::new();
    for measure_id in manual.measures() {
        let calls = manual.calls(measure_id).expect("listed measure");
        let mut eval = MeasureEval {
            measure_id: measure_id.to_string(),
            relevant: Confusion::default(),
            stringent: Confusion::default(),
            relevant_fraction: 0.0,
            unadjudicated: 0,
        };
        let rows: Vec<&VerdictRow> = verdicts.iter().filter(|v| v.measure_id == measure_id).collect();
        let flagged = rows.iter().filter(|v| v.relevant).count();
        eval.relevant_fraction = flagged as f64 / k as f64;
        let auto: BTreeMap<&str, &VerdictRow> = rows.iter().map(|v| (v.doc_id.as_str(), *v)).collect();
        eval.unadjudicated = auto.keys().filter(|d| !calls.contains_key(**d)).count();
        for (doc, truth) in calls {
            let (rel, strict) = auto
                .get(doc.as_str())
                .map_or((false, false), |v| (v.relevant, v.stringent_relevant));
            eval.relevant.add(rel, *truth);
            eval.stringent.add(strict, *truth);
        }
        measures.push(eval);
    }
    Ok(EvalReport { k, measures })
}
