use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::tsv;

#[derive(Debug, Clone, PartialEq, Eq)]
struct SuffixRule {
    suffix: String,
    replacement: String,
    min_stem: usize,
    undouble: bool,
}

/// Table-driven lemmatizer: an exception list, then the first matching
/// suffix rule in file order.
///
/// Rule file lines are either `=<TAB>word<TAB>lemma` (exception) or
/// `suffix<TAB>replacement<TAB>min_stem[<TAB>undouble]`. A replacement of `-`
/// means the empty string. `min_stem` counts the characters left in front of
/// the suffix. `undouble` drops the last letter of a stem ending in a doubled
/// consonant other than l, s or z.
#[derive(Debug, Clone, Default)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
    rules: Vec<SuffixRule>,
}

impl Lemmatizer {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lemmatizer = Lemmatizer::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            match cells.as_slice() {
                ["=", word, lemma] => {
                    lemmatizer.exceptions.insert(word.to_lowercase(), lemma.to_lowercase());
                }
                [suffix, replacement, min_stem, rest @ ..] if rest.len() <= 1 => {
                    let undouble = match rest {
                        [] => false,
                        ["undouble"] => true,
                        [flag] => return Err(Error::parse(origin, line_no, format!("unknown flag `{flag}`"))),
                        _ => unreachable!(),
                    };
                    let min_stem = min_stem
                        .parse()
                        .map_err(|_| Error::parse(origin, line_no, format!("bad min_stem `{min_stem}`")))?;
                    let replacement = if *replacement == "-" { "" } else { replacement };
                    lemmatizer.rules.push(SuffixRule {
                        suffix: suffix.to_lowercase(),
                        replacement: replacement.to_lowercase(),
                        min_stem,
                        undouble,
                    });
                }
                _ => return Err(Error::parse(origin, line_no, format!("malformed lemma rule `{line}`"))),
            }
        }
        Ok(lemmatizer)
    }

    /// Lowercase base form of `word`.
    pub fn lemma(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        if let Some(lemma) = self.exceptions.get(&lower) {
            return lemma.clone();
        }
        if !lower.chars().all(|c| c.is_alphabetic() || c == '-') {
            return lower;
        }
        for rule in &self.rules {
            let Some(stem) = lower.strip_suffix(rule.suffix.as_str()) else {
                continue;
            };
            if stem.chars().count() < rule.min_stem {
                continue;
            }
            let mut lemma = format!("{stem}{}", rule.replacement);
            if rule.undouble {
                undouble(&mut lemma);
            }
            return lemma;
        }
        lower
    }
}

fn undouble(word: &mut String) {
    let mut rev = word.chars().rev();
    if let (Some(a), Some(b)) = (rev.next(), rev.next()) {
        if a == b && a.is_alphabetic() && !"aeiouylsz".contains(a) {
            word.pop();
        }
    }
}

/// Case-insensitive stopword set, one word per line.
#[derive(Debug, Clone, Default)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn parse(text: &str) -> Self {
        Stopwords {
            words: tsv::content_lines(text)
                .map(|(_, line)| line.trim().to_lowercase())
                .collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
