use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The five abstract measure concepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptType {
    ChangeConcept,
    HealthStatus,
    Population,
    Utilization,
    Output,
}

impl ConceptType {
    pub const ALL: [ConceptType; 5] = [
        ConceptType::ChangeConcept,
        ConceptType::HealthStatus,
        ConceptType::Population,
        ConceptType::Utilization,
        ConceptType::Output,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConceptType::ChangeConcept => "ChangeConcept",
            ConceptType::HealthStatus => "HealthStatus",
            ConceptType::Population => "Population",
            ConceptType::Utilization => "Utilization",
            ConceptType::Output => "Output",
        }
    }

    /// Population and Output instances are collapsed to a single generic node
    /// when document graphs are built.
    pub fn is_generic(self) -> bool {
        matches!(self, ConceptType::Population | ConceptType::Output)
    }
}

impl fmt::Display for ConceptType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConceptType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConceptType::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown concept type `{s}`"))
    }
}

/// Refinement attributes. Only some concept kinds accept each key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeKey {
    AgeGroup,
    Gender,
    SocialDeterminants,
    Severity,
    Time,
}

impl AttributeKey {
    pub const ALL: [AttributeKey; 5] = [
        AttributeKey::AgeGroup,
        AttributeKey::Gender,
        AttributeKey::SocialDeterminants,
        AttributeKey::Severity,
        AttributeKey::Time,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKey::AgeGroup => "age_group",
            AttributeKey::Gender => "gender",
            AttributeKey::SocialDeterminants => "social_determinants",
            AttributeKey::Severity => "severity",
            AttributeKey::Time => "time",
        }
    }

    pub fn allowed_on(self, concept: ConceptType) -> bool {
        match self {
            AttributeKey::AgeGroup | AttributeKey::Gender | AttributeKey::SocialDeterminants => {
                concept == ConceptType::Population
            }
            AttributeKey::Severity | AttributeKey::Time => concept == ConceptType::HealthStatus,
        }
    }
}

impl fmt::Display for AttributeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttributeKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttributeKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown attribute `{s}`"))
    }
}

/// Free-text attribute values attached to one concept of a fixed kind.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptAttributes {
    values: BTreeMap<AttributeKey, String>,
}

impl ConceptAttributes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, concept: ConceptType, key: AttributeKey, value: impl Into<String>) -> Result<()> {
        if !key.allowed_on(concept) {
            return Err(Error::IllegalAttribute {
                concept,
                key: key.as_str().to_string(),
            });
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: AttributeKey) -> Option<&str> {
        self.values.get(&key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AttributeKey, &str)> {
        self.values.iter().map(|(k, v)| (*k, v.as_str()))
    }
}

/// Relations of the measure ontology. Domain/range pairs live in the schema file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CqmRelationType {
    Experiences,
    HasFocus,
    IsAPartOf,
    IsMadeUpOf,
    ResultsIn,
}

impl CqmRelationType {
    pub const ALL: [CqmRelationType; 5] = [
        CqmRelationType::Experiences,
        CqmRelationType::HasFocus,
        CqmRelationType::IsAPartOf,
        CqmRelationType::IsMadeUpOf,
        CqmRelationType::ResultsIn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CqmRelationType::Experiences => "Experiences",
            CqmRelationType::HasFocus => "HasFocus",
            CqmRelationType::IsAPartOf => "IsAPartOf",
            CqmRelationType::IsMadeUpOf => "IsMadeUpOf",
            CqmRelationType::ResultsIn => "ResultsIn",
        }
    }

    /// Legal `(domain, range)` pairs from the bundled schema.
    pub fn legal_pairs(self) -> &'static [(ConceptType, ConceptType)] {
        super::Ontology::bundled().legal_pairs(self)
    }
}

impl fmt::Display for CqmRelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CqmRelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CqmRelationType::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown CQM relation `{s}`"))
    }
}

macro_rules! base_relations {
    ($($variant:ident => $code:literal, $desc:literal;)*) => {
        /// The closed inventory of base semantic relations.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum BaseRelationType {
            $($variant,)*
        }

        impl BaseRelationType {
            pub const ALL: [BaseRelationType; 26] = [$(BaseRelationType::$variant,)*];

            pub fn code(self) -> &'static str {
                match self {
                    $(BaseRelationType::$variant => $code,)*
                }
            }

            pub fn description(self) -> &'static str {
                match self {
                    $(BaseRelationType::$variant => $desc,)*
                }
            }
        }
    };
}

base_relations! {
    Agent => "AGT", "X is the agent of Y; X is prototypically a person";
    Association => "ASO", "person X is associated with person Y; not necessarily kinship";
    AtLocation => "AT-L", "X is at location Y, or where X takes place";
    AtTime => "AT-T", "X is at time Y, or when X takes place";
    Cause => "CAU", "X causes Y";
    Experiencer => "EXP", "X is an experiencer of Y; involves cognition and senses";
    Influence => "IFL", "X caused something to happen to Y";
    Instrument => "INS", "X is an instrument in Y";
    Intent => "INT", "X is the intent, goal or reason of Y";
    IsA => "ISA", "X is a kind of Y";
    Justification => "JST", "X is the reason, motivation or justification for Y";
    Kinship => "KIN", "X is related to Y by blood or by marriage";
    Make => "MAK", "X makes Y";
    Manner => "MNR", "X is the manner in which Y happens";
    PartWhole => "PW", "X is a part of Y";
    Possession => "POS", "X is a possession of Y; Y owns X";
    Property => "PRO", "X is a property, attribute or value of Y";
    Purpose => "PRP", "X is the purpose for Y";
    Quantification => "QNT", "X is a quantification of Y";
    Recipient => "RCP", "X is the recipient of Y; X is an animated entity";
    Source => "SRC", "X is the source, origin or previous location of Y";
    Stimulus => "STI", "X is the stimulus of Y; perceived through senses";
    Synonymy => "SYN", "X is a synonym, name or equal of Y";
    Theme => "THM", "X is the theme of Y";
    Topic => "TPC", "X is the topic or focus of cognitive communication Y";
    Value => "VAL", "X is the value of Y";
}

impl fmt::Display for BaseRelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for BaseRelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseRelationType::ALL
            .into_iter()
            .find(|r| r.code() == s)
            .ok_or_else(|| format!("unknown base relation code `{s}`"))
    }
}
