//! Text to knowledge structures: keywords, concepts, expansions, base
//! relations and measure-model relations.

pub mod calculus;
pub mod expansion;
pub mod lemma;
pub mod lexicon;
pub mod relations;
pub mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

pub use calculus::{apply_semantic_calculus, Axioms, Bridge, CqmRelationMention, Premise, SemanticAxiom};
pub use expansion::{accumulate, expand_concepts, Expansion, ExpansionTable};
pub use lemma::{Lemmatizer, Stopwords};
pub use lexicon::{tag_concepts, ConceptMention, Lexicon, LexiconEntry, MentionCategory};
pub use relations::{extract_base_relations, ArgConstraint, BaseRelationMention, RelationRule, RelationRules};
pub use tokenize::{tokenize_lemmatize, Token};

use crate::error::{Error, Result};
use crate::triple_store::AcronymTable;
use crate::tsv;

/// The five scored fields, in weight-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Keywords,
    Concepts,
    Expansions,
    Relations,
    CqmRelations,
}

impl Field {
    pub const ALL: [Field; 5] = [
        Field::Keywords,
        Field::Concepts,
        Field::Expansions,
        Field::Relations,
        Field::CqmRelations,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Keywords => "keywords",
            Field::Concepts => "concepts",
            Field::Expansions => "expansions",
            Field::Relations => "relations",
            Field::CqmRelations => "cqm_relations",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown field `{s}`"))
    }
}

/// A document (or measure description) split into the five fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldedDocument {
    pub doc_id: String,
    /// Lemmas of non-stopword tokens.
    pub keywords: Vec<String>,
    /// Lowercase aliases of concept mentions.
    pub concepts: Vec<String>,
    pub expansions: Vec<Expansion>,
    /// `alias1|CODE|alias2`
    pub relations: Vec<String>,
    /// `alias1|Relation|alias2`
    pub cqm_relations: Vec<String>,
}

impl FieldedDocument {
    pub fn new(doc_id: impl Into<String>) -> Self {
        FieldedDocument {
            doc_id: doc_id.into(),
            ..Default::default()
        }
    }

    /// Occurrences of one field with their weights. Only expansions carry
    /// weights other than 1.
    pub fn weighted_terms(&self, field: Field) -> Vec<(&str, f64)> {
        fn plain(terms: &[String]) -> Vec<(&str, f64)> {
            terms.iter().map(|t| (t.as_str(), 1.0)).collect()
        }
        match field {
            Field::Keywords => plain(&self.keywords),
            Field::Concepts => plain(&self.concepts),
            Field::Relations => plain(&self.relations),
            Field::CqmRelations => plain(&self.cqm_relations),
            Field::Expansions => self.expansions.iter().map(|e| (e.alias.as_str(), e.weight)).collect(),
        }
    }

    /// Summed weight per distinct term.
    pub fn term_counts(&self, field: Field) -> BTreeMap<String, f64> {
        let mut counts = BTreeMap::new();
        for (term, weight) in self.weighted_terms(field) {
            *counts.entry(term.to_string()).or_insert(0.0) += weight;
        }
        counts
    }

    /// Number of occurrences in a field (the field length).
    pub fn field_len(&self, field: Field) -> usize {
        match field {
            Field::Keywords => self.keywords.len(),
            Field::Concepts => self.concepts.len(),
            Field::Expansions => self.expansions.len(),
            Field::Relations => self.relations.len(),
            Field::CqmRelations => self.cqm_relations.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        Field::ALL.iter().all(|f| self.field_len(*f) == 0)
    }

    fn push(&mut self, field: Field, term: String, weight: f64) {
        match field {
            Field::Keywords => self.keywords.push(term),
            Field::Concepts => self.concepts.push(term),
            Field::Relations => self.relations.push(term),
            Field::CqmRelations => self.cqm_relations.push(term),
            Field::Expansions => self.expansions.push(Expansion { alias: term, weight }),
        }
    }
}

const FIELDED_HEADER: &str = "doc_id\tfield\tterm\tweight";

/// Serializes fielded documents, one row per occurrence. Each document opens
/// with a `doc` row so that documents with empty fields survive a round trip.
pub fn fielded_to_tsv(docs: &[FieldedDocument]) -> String {
    let mut out = String::from(FIELDED_HEADER);
    out.push('\n');
    for doc in docs {
        let id = tsv::escape(&doc.doc_id);
        out.push_str(&format!("{id}\tdoc\t\t0\n"));
        for field in Field::ALL {
            for (term, weight) in doc.weighted_terms(field) {
                out.push_str(&format!("{id}\t{field}\t{}\t{weight}\n", tsv::escape(term)));
            }
        }
    }
    out
}

pub fn parse_fielded_tsv(text: &str, origin: &str) -> Result<Vec<FieldedDocument>> {
    let mut docs: Vec<FieldedDocument> = Vec::new();
    for (line_no, line) in tsv::data_lines(text) {
        if line == FIELDED_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [id, field, term, weight] = cells.as_slice() else {
            return Err(Error::parse(origin, line_no, "expected 4 columns"));
        };
        let id = tsv::unescape(id);
        if *field == "doc" {
            if docs.iter().any(|d| d.doc_id == id) {
                return Err(Error::DuplicateDoc(id));
            }
            docs.push(FieldedDocument::new(id));
            continue;
        }
        let field: Field = field.parse().map_err(|m| Error::parse(origin, line_no, m))?;
        let weight: f64 = weight
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad weight `{weight}`")))?;
        let doc = docs
            .last_mut()
            .filter(|d| d.doc_id == id)
            .ok_or_else(|| Error::parse(origin, line_no, format!("row for `{id}` outside its document block")))?;
        doc.push(field, tsv::unescape(term), weight);
    }
    Ok(docs)
}

/// Everything extracted from one text.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub fielded: FieldedDocument,
    pub tokens: Vec<Token>,
    pub mentions: Vec<ConceptMention>,
    pub base_relations: Vec<BaseRelationMention>,
    pub cqm_relations: Vec<CqmRelationMention>,
}

/// Runs the whole extraction chain on `text`.
pub fn extract(doc_id: &str, text: &str, resources: &Resources) -> Extraction {
    let tokens = tokenize_lemmatize(text, &resources.lemmatizer, &resources.stopwords);
    let mentions = tag_concepts(&tokens, text, &resources.lexicon);
    let expansions = expand_concepts(&mentions, &resources.expansions);
    let base_relations = extract_base_relations(&tokens, &mentions, &resources.relation_rules);
    let cqm_relations = apply_semantic_calculus(&base_relations, &resources.axioms);

    let fielded = FieldedDocument {
        doc_id: doc_id.to_string(),
        keywords: tokens
            .iter()
            .filter(|t| !t.is_stopword)
            .map(|t| t.lemma.clone())
            .collect(),
        concepts: mentions
            .iter()
            .filter(|m| m.category.is_concept())
            .map(|m| m.alias.to_lowercase())
            .collect(),
        expansions,
        relations: base_relations.iter().map(BaseRelationMention::term).collect(),
        cqm_relations: cqm_relations.iter().map(CqmRelationMention::term).collect(),
    };
    Extraction {
        fielded,
        tokens,
        mentions,
        base_relations,
        cqm_relations,
    }
}

/// The fielded form of `text`. Used for documents and measure descriptions alike.
pub fn build_fielded_document(doc_id: &str, text: &str, resources: &Resources) -> FieldedDocument {
    extract(doc_id, text, resources).fielded
}

/// Every resource table the pipeline reads.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lemmatizer: Lemmatizer,
    pub stopwords: Stopwords,
    pub lexicon: Lexicon,
    pub expansions: ExpansionTable,
    pub relation_rules: RelationRules,
    pub axioms: Axioms,
    pub acronyms: AcronymTable,
}

/// File names inside a resource directory.
pub const RESOURCE_FILES: [&str; 7] = [
    "lemmas.tsv",
    "stopwords.txt",
    "lexicon.tsv",
    "expansions.tsv",
    "relation_rules.tsv",
    "axioms.tsv",
    "acronyms.tsv",
];

impl Resources {
    /// Tables compiled into the crate.
    pub fn bundled() -> &'static Resources {
        static BUNDLED: OnceLock<Resources> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Resources::from_sources(|name| {
                let text = match name {
                    "lemmas.tsv" => include_str!("../../resources/lemmas.tsv"),
                    "stopwords.txt" => include_str!("../../resources/stopwords.txt"),
                    "lexicon.tsv" => include_str!("../../resources/lexicon.tsv"),
                    "expansions.tsv" => include_str!("../../resources/expansions.tsv"),
                    "relation_rules.tsv" => include_str!("../../resources/relation_rules.tsv"),
                    "axioms.tsv" => include_str!("../../resources/axioms.tsv"),
                    "acronyms.tsv" => include_str!("../../resources/acronyms.tsv"),
                    _ => unreachable!("unknown resource {name}"),
                };
                Ok(text.to_string())
            })
            .expect("bundled resources parse")
        })
    }

    /// Reads the tables from a directory holding [`RESOURCE_FILES`].
    pub fn load_dir(dir: &Path) -> Result<Resources> {
        Resources::from_sources(|name| tsv::read_to_string(&dir.join(name)))
    }

    /// Writes the bundled tables into `dir`, for editing.
    pub fn write_bundled(dir: &Path) -> Result<()> {
        let texts = [
            include_str!("../../resources/lemmas.tsv"),
            include_str!("../../resources/stopwords.txt"),
            include_str!("../../resources/lexicon.tsv"),
            include_str!("../../resources/expansions.tsv"),
            include_str!("../../resources/relation_rules.tsv"),
            include_str!("../../resources/axioms.tsv"),
            include_str!("../../resources/acronyms.tsv"),
        ];
        for (name, text) in RESOURCE_FILES.iter().zip(texts) {
            tsv::write_string(&dir.join(name), text)?;
        }
        Ok(())
    }

    fn from_sources(mut read: impl FnMut(&str) -> Result<String>) -> Result<Resources> {
        let lemmatizer = Lemmatizer::parse(&read("lemmas.tsv")?, "lemmas.tsv")?;
        let lexicon = Lexicon::parse(&read("lexicon.tsv")?, "lexicon.tsv", &lemmatizer)?;
        Ok(Resources {
            stopwords: Stopwords::parse(&read("stopwords.txt")?),
            lexicon,
            expansions: ExpansionTable::parse(&read("expansions.tsv")?, "expansions.tsv")?,
            relation_rules: RelationRules::parse(&read("relation_rules.tsv")?, "relation_rules.tsv")?,
            axioms: Axioms::parse(&read("axioms.tsv")?, "axioms.tsv")?,
            acronyms: AcronymTable::parse(&read("acronyms.tsv")?, "acronyms.tsv")?,
            lemmatizer,
        })
    }
}
