use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use super::lemma::{Lemmatizer, Stopwords};
use super::tokenize::{tokenize_lemmatize, Token};
use crate::error::{Error, Result};
use crate::ontology::{AttributeKey, ConceptAttributes, ConceptType};
use crate::tsv;

/// What a lexicon phrase denotes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MentionCategory {
    /// One of the five measure concepts.
    Cqm(ConceptType),
    /// A biomedical concept outside the measure ontology (`Concept`).
    Concept,
    /// A verbal concept with a lexical class (`Event:<class>`), used as the
    /// bridging argument of semantic calculus axioms.
    Event(String),
}

impl MentionCategory {
    pub fn concept_type(&self) -> Option<ConceptType> {
        match self {
            MentionCategory::Cqm(c) => Some(*c),
            _ => None,
        }
    }

    pub fn lexical_class(&self) -> Option<&str> {
        match self {
            MentionCategory::Event(class) => Some(class),
            _ => None,
        }
    }

    /// Events are linguistic glue; everything else is a biomedical concept.
    pub fn is_concept(&self) -> bool {
        !matches!(self, MentionCategory::Event(_))
    }
}

impl fmt::Display for MentionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MentionCategory::Cqm(c) => write!(f, "{c}"),
            MentionCategory::Concept => f.write_str("Concept"),
            MentionCategory::Event(class) => write!(f, "Event:{class}"),
        }
    }
}

impl std::str::FromStr for MentionCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Concept" {
            return Ok(MentionCategory::Concept);
        }
        if let Some(class) = s.strip_prefix("Event:") {
            if class.is_empty() {
                return Err("empty event class".into());
            }
            return Ok(MentionCategory::Event(class.to_string()));
        }
        s.parse().map(MentionCategory::Cqm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub category: MentionCategory,
    pub alias: String,
    pub attributes: ConceptAttributes,
}

/// A concept found in text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptMention {
    /// Source text covered by the mention.
    pub text: String,
    /// Canonical name from the lexicon; never empty.
    pub alias: String,
    pub category: MentionCategory,
    /// Byte range in the source text.
    pub span: Range<usize>,
    /// Token index range.
    pub tokens: Range<usize>,
    pub attributes: ConceptAttributes,
}

impl ConceptMention {
    pub fn concept_type(&self) -> Option<ConceptType> {
        self.category.concept_type()
    }
}

/// Phrase lexicon keyed by lemma sequence.
///
/// File lines: `phrase<TAB>type<TAB>alias[<TAB>key=value;key=value]`, where
/// type is a concept type name, `Concept` or `Event:<class>`. Phrases are
/// lemmatized on load with the same lemmatizer applied to documents.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<Vec<String>, LexiconEntry>,
    max_len: usize,
}

impl Lexicon {
    pub fn parse(text: &str, origin: &str, lemmatizer: &Lemmatizer) -> Result<Self> {
        let mut lexicon = Lexicon::default();
        let no_stopwords = Stopwords::default();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            if !(3..=4).contains(&cells.len()) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected 3 or 4 columns: `{line}`"),
                ));
            }
            let category: MentionCategory = cells[1].parse().map_err(|m| Error::parse(origin, line_no, m))?;
            let lemmas: Vec<String> = tokenize_lemmatize(cells[0], lemmatizer, &no_stopwords)
                .into_iter()
                .map(|t| t.lemma)
                .collect();
            if lemmas.is_empty() {
                return Err(Error::parse(origin, line_no, "empty phrase"));
            }
            let mut attributes = ConceptAttributes::new();
            if let Some(spec) = cells.get(3) {
                let concept = category
                    .concept_type()
                    .ok_or_else(|| Error::parse(origin, line_no, "attributes need a concept type"))?;
                for pair in spec.split(';').filter(|p| !p.trim().is_empty()) {
                    let (key, value) = pair
                        .split_once('=')
                        .ok_or_else(|| Error::parse(origin, line_no, format!("bad attribute `{pair}`")))?;
                    let key: AttributeKey = key.trim().parse().map_err(|m| Error::parse(origin, line_no, m))?;
                    attributes
                        .insert(concept, key, value.trim())
                        .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
                }
            }
            lexicon.insert(lemmas, category, cells[2], attributes);
        }
        Ok(lexicon)
    }

    /// Adds or replaces the entry for a lemma sequence. An empty alias falls
    /// back to the phrase itself.
    pub fn insert(
        &mut self,
        lemmas: Vec<String>,
        category: MentionCategory,
        alias: &str,
        attributes: ConceptAttributes,
    ) {
        let alias = if alias.trim().is_empty() {
            lemmas.join(" ")
        } else {
            alias.trim().to_string()
        };
        self.max_len = self.max_len.max(lemmas.len());
        self.entries.insert(
            lemmas,
            LexiconEntry {
                category,
                alias,
                attributes,
            },
        );
    }

    pub fn get(&self, lemmas: &[String]) -> Option<&LexiconEntry> {
        self.entries.get(lemmas)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_phrase_len(&self) -> usize {
        self.max_len
    }
}

/// Lexicon tagging: scanning left to right, the longest phrase starting at
/// the current token wins and the scan resumes after it. Phrases never cross
/// sentence boundaries.
pub fn tag_concepts(tokens: &[Token], text: &str, lexicon: &Lexicon) -> Vec<ConceptMention> {
    let mut mentions = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let longest = (1..=lexicon.max_phrase_len().min(tokens.len() - i))
            .rev()
            .filter(|len| tokens[i + len - 1].sentence == tokens[i].sentence)
            .find_map(|len| {
                let key: Vec<String> = tokens[i..i + len].iter().map(|t| t.lemma.clone()).collect();
                lexicon.get(&key).map(|entry| (len, entry))
            });
        match longest {
            Some((len, entry)) => {
                let span = tokens[i].offset.start..tokens[i + len - 1].offset.end;
                mentions.push(ConceptMention {
                    text: text[span.clone()].to_string(),
                    alias: entry.alias.clone(),
                    category: entry.category.clone(),
                    span,
                    tokens: i..i + len,
                    attributes: entry.attributes.clone(),
                });
                i += len;
            }
            None => i += 1,
        }
    }
    mentions
}
