use std::collections::HashSet;
use std::fmt;

use super::lexicon::{ConceptMention, MentionCategory};
use super::tokenize::Token;
use crate::error::{Error, Result};
use crate::ontology::{BaseRelationType, ConceptType};
use crate::tsv;

/// Type restriction on a rule argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgConstraint {
    Any,
    Cqm(ConceptType),
    /// Any non-event mention.
    Concept,
    /// Any event mention.
    Event,
    /// Event mention of one lexical class.
    Class(String),
}

impl ArgConstraint {
    pub fn accepts(&self, mention: &ConceptMention) -> bool {
        match (self, &mention.category) {
            (ArgConstraint::Any, _) => true,
            (ArgConstraint::Cqm(want), MentionCategory::Cqm(got)) => want == got,
            (ArgConstraint::Concept, category) => category.is_concept(),
            (ArgConstraint::Event, MentionCategory::Event(_)) => true,
            (ArgConstraint::Class(want), MentionCategory::Event(got)) => want == got,
            _ => false,
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "" => ArgConstraint::Any,
            "Concept" => ArgConstraint::Concept,
            "Event" => ArgConstraint::Event,
            _ => match s.strip_prefix('@') {
                Some("") => return Err("empty lexical class".into()),
                Some(class) => ArgConstraint::Class(class.to_string()),
                None => ArgConstraint::Cqm(s.parse()?),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum GapItem {
    Lemma(String),
    /// `*`: exactly one token.
    One,
    /// `...`: any number of tokens.
    Many,
}

/// A surface pattern `A gap B` between two mentions in one sentence.
///
/// `A` and `B` are the slots `X` and `Y` (either order), optionally
/// constrained as `X:HealthStatus`, `X:Concept`, `X:Event` or `X:@class`.
/// The relation is always emitted as `code(X, Y)`. Gap items are lemmas,
/// `*` (one token) or `...` (any number of tokens).
#[derive(Debug, Clone, PartialEq)]
pub struct RelationRule {
    pub code: BaseRelationType,
    pub confidence: f64,
    left: ArgConstraint,
    right: ArgConstraint,
    left_is_x: bool,
    gap: Vec<GapItem>,
    source: String,
}

impl fmt::Display for RelationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.code)
    }
}

impl RelationRule {
    pub fn new(pattern: &str, code: BaseRelationType, confidence: f64) -> Result<Self, String> {
        let items: Vec<&str> = pattern.split_whitespace().collect();
        if items.len() < 2 {
            return Err(format!("pattern `{pattern}` needs two argument slots"));
        }
        let slot = |item: &str| -> Result<(char, ArgConstraint), String> {
            let (name, constraint) = item.split_once(':').unwrap_or((item, ""));
            match name {
                "X" => Ok(('X', ArgConstraint::parse(constraint)?)),
                "Y" => Ok(('Y', ArgConstraint::parse(constraint)?)),
                _ => Err(format!("pattern `{pattern}` must start and end with X/Y slots")),
            }
        };
        let (first, left) = slot(items[0])?;
        let (last, right) = slot(items[items.len() - 1])?;
        if first == last {
            return Err(format!("pattern `{pattern}` needs one X and one Y"));
        }
        let mut gap = Vec::new();
        for item in &items[1..items.len() - 1] {
            gap.push(match *item {
                "*" => GapItem::One,
                "..." => GapItem::Many,
                s if matches!(s, "X" | "Y") || s.starts_with("X:") || s.starts_with("Y:") => {
                    return Err(format!("pattern `{pattern}` has a slot inside its gap"));
                }
                s => GapItem::Lemma(s.to_lowercase()),
            });
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("confidence {confidence} outside [0, 1]"));
        }
        Ok(RelationRule {
            code,
            confidence,
            left,
            right,
            left_is_x: first == 'X',
            gap,
            source: pattern.to_string(),
        })
    }

    /// `(x, y)` argument order when the rule fires on `left ... right`.
    fn fire<'m>(
        &self,
        left: &'m ConceptMention,
        right: &'m ConceptMention,
        gap: &[Token],
    ) -> Option<(&'m ConceptMention, &'m ConceptMention)> {
        if !(self.left.accepts(left) && self.right.accepts(right) && gap_matches(&self.gap, gap)) {
            return None;
        }
        Some(if self.left_is_x { (left, right) } else { (right, left) })
    }
}

fn gap_matches(items: &[GapItem], tokens: &[Token]) -> bool {
    match items.split_first() {
        None => tokens.is_empty(),
        Some((GapItem::Many, rest)) => (0..=tokens.len()).any(|skip| gap_matches(rest, &tokens[skip..])),
        Some((item, rest)) => match tokens.split_first() {
            None => false,
            Some((token, tail)) => {
                let ok = match item {
                    GapItem::One => true,
                    GapItem::Lemma(lemma) => token.lemma == *lemma,
                    GapItem::Many => unreachable!(),
                };
                ok && gap_matches(rest, tail)
            }
        },
    }
}

/// Ordered rule list. File lines: `pattern<TAB>code[<TAB>confidence]`,
/// confidence defaulting to 1.0.
#[derive(Debug, Clone, Default)]
pub struct RelationRules {
    rules: Vec<RelationRule>,
}

impl RelationRules {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (line_no, line) in tsv::content_lines(text) {
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let (pattern, code, confidence) = match cells.as_slice() {
                [p, c] => (*p, *c, 1.0),
                [p, c, conf] => {
                    let conf = conf
                        .parse()
                        .map_err(|_| Error::parse(origin, line_no, format!("bad confidence `{conf}`")))?;
                    (*p, *c, conf)
                }
                _ => {
                    return Err(Error::parse(
                        origin,
                        line_no,
                        format!("expected 2 or 3 columns: `{line}`"),
                    ))
                }
            };
            let code: BaseRelationType = code.parse().map_err(|m| Error::parse(origin, line_no, m))?;
            let rule = RelationRule::new(pattern, code, confidence).map_err(|m| Error::parse(origin, line_no, m))?;
            rules.push(rule);
        }
        Ok(RelationRules { rules })
    }

    pub fn from_rules(rules: Vec<RelationRule>) -> Self {
        RelationRules { rules }
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationRule> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// A base semantic relation between two mentions.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseRelationMention {
    pub arg1: ConceptMention,
    pub code: BaseRelationType,
    pub arg2: ConceptMention,
    pub confidence: f64,
}

impl BaseRelationMention {
    /// Index term `alias1|CODE|alias2`.
    pub fn term(&self) -> String {
        format!(
            "{}|{}|{}",
            self.arg1.alias.to_lowercase(),
            self.code,
            self.arg2.alias.to_lowercase()
        )
    }
}

/// Applies every rule to every ordered mention pair within a sentence.
///
/// Output order: by left mention, then right mention, then rule order. A
/// `(code, X span, Y span)` combination is emitted once, by the first rule
/// producing it.
pub fn extract_base_relations(
    tokens: &[Token],
    mentions: &[ConceptMention],
    rules: &RelationRules,
) -> Vec<BaseRelationMention> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, left) in mentions.iter().enumerate() {
        for right in &mentions[i + 1..] {
            if left.tokens.end > right.tokens.start {
                continue;
            }
            let sentence = tokens[left.tokens.start].sentence;
            if tokens[right.tokens.start].sentence != sentence {
                break;
            }
            let gap = &tokens[left.tokens.end..right.tokens.start];
            for rule in rules.iter() {
                let Some((x, y)) = rule.fire(left, right, gap) else {
                    continue;
                };
                if seen.insert((rule.code, x.span.clone(), y.span.clone())) {
                    out.push(BaseRelationMention {
                        arg1: x.clone(),
                        code: rule.code,
                        arg2: y.clone(),
                        confidence: rule.confidence,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{lexicon::tag_concepts, tokenize::tokenize_lemmatize, Resources};

    fn run(text: &str) -> Vec<BaseRelationMention> {
        let r = Resources::bundled();
        let tokens = tokenize_lemmatize(text, &r.lemmatizer, &r.stopwords);
        let mentions = tag_concepts(&tokens, text, &r.lexicon);
        extract_base_relations(&tokens, &mentions, &r.relation_rules)
    }

    fn triples(rels: &[BaseRelationMention]) -> Vec<(String, String, String)> {
        rels.iter()
            .map(|r| (r.arg1.alias.clone(), r.code.to_string(), r.arg2.alias.clone()))
            .collect()
    }

    #[test]
    fn value_of_blood_pressure() {
        let rels = triples(&run("A reading of 120/80 is the value of blood pressure."));
        assert!(
            rels.contains(&("120/80".into(), "VAL".into(), "blood pressure".into())),
            "{rels:?}"
        );
    }

    #[test]
    fn hypertension_causes_headache() {
        let rels = triples(&run("Hypertension causes headache."));
        assert_eq!(rels, vec![("hypertension".into(), "CAU".into(), "headache".into())]);
    }

    #[test]
    fn no_mentions_no_relations() {
        assert!(run("nothing of interest here").is_empty());
        assert!(run("").is_empty());
    }

    #[test]
    fn theme_and_cause_from_worked_sentence() {
        let rels = triples(&run(
            "The impact of yoga upon female patients suffering from hypothyroidism",
        ));
        assert!(
            rels.contains(&("patients".into(), "THM".into(), "suffering".into())),
            "{rels:?}"
        );
        assert!(
            rels.contains(&("suffering".into(), "CAU".into(), "hypothyroidism".into())),
            "{rels:?}"
        );
    }

    #[test]
    fn relations_stay_inside_sentences() {
        assert!(run("Hypertension. Headache").is_empty());
    }

    #[test]
    fn rule_syntax() {
        use BaseRelationType::*;
        assert!(RelationRule::new("X cause Y", Cause, 1.0).is_ok());
        assert!(RelationRule::new("Y:Output X:HealthStatus", Theme, 0.9).is_ok());
        assert!(RelationRule::new("X ... of Y:@experiencing", Theme, 1.0).is_ok());
        assert!(RelationRule::new("X cause X", Cause, 1.0).is_err());
        assert!(RelationRule::new("X Y Z", Cause, 1.0).is_err());
        assert!(RelationRule::new("X Y:Concept Y", Cause, 1.0).is_err());
        assert!(RelationRule::new("X", Cause, 1.0).is_err());
        assert!(RelationRule::new("X:Person Y", Cause, 1.0).is_err());
        assert!(RelationRule::new("X cause Y", Cause, 1.5).is_err());
        let rules = RelationRules::parse("X cause Y\tCAU\n", "t").unwrap();
        assert_eq!(rules.iter().next().unwrap().confidence, 1.0);
        assert!(RelationRules::parse("X cause Y\tFOO\n", "t").is_err());
    }

    #[test]
    fn emitted_arguments_satisfy_rule_constraints() {
        let r = Resources::bundled();
        let text = "Patients suffering from acute myocardial infarction received aspirin. Aspirin reduced mortality.";
        let tokens = tokenize_lemmatize(text, &r.lemmatizer, &r.stopwords);
        let mentions = tag_concepts(&tokens, text, &r.lexicon);
        let rels = extract_base_relations(&tokens, &mentions, &r.relation_rules);
        assert!(!rels.is_empty());
        for rel in &rels {
            assert_ne!(rel.arg1.span, rel.arg2.span);
            let rule_ok = r.relation_rules.iter().any(|rule| {
                rule.code == rel.code && {
                    let (l, rt) = if rule.left_is_x {
                        (&rel.arg1, &rel.arg2)
                    } else {
                        (&rel.arg2, &rel.arg1)
                    };
                    rule.left.accepts(l) && rule.right.accepts(rt)
                }
            });
            assert!(rule_ok, "{rel:?}");
        }
        assert_eq!(rels, extract_base_relations(&tokens, &mentions, &r.relation_rules));
    }

    #[test]
    fn wildcard_gaps() {
        let tok = |lemma: &str| Token {
            surface: lemma.into(),
            lemma: lemma.into(),
            offset: 0..0,
            is_stopword: false,
            sentence: 0,
        };
        let gap: Vec<Token> = ["a", "b", "c"].into_iter().map(tok).collect();
        use GapItem::*;
        assert!(gap_matches(&[Many], &gap));
        assert!(gap_matches(&[Many], &[]));
        assert!(gap_matches(&[One, Lemma("b".into()), One], &gap));
        assert!(gap_matches(&[Many, Lemma("c".into())], &gap));
        assert!(!gap_matches(&[Many, Lemma("a".into())], &gap));
        assert!(!gap_matches(&[One], &gap));
    }
}
