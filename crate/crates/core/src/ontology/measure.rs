use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{ConceptAttributes, Ontology, PatternGraph, PatternName};
use crate::error::{Error, Result};

/// Template node roles and the measure field each one binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Population,
    DenominatorHealthStatus,
    NumeratorHealthStatus,
    ChangeConcept,
    Output,
    CareSetting,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Population,
        Role::DenominatorHealthStatus,
        Role::NumeratorHealthStatus,
        Role::ChangeConcept,
        Role::Output,
        Role::CareSetting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Population => "population",
            Role::DenominatorHealthStatus => "denominator_health_status",
            Role::NumeratorHealthStatus => "numerator_health_status",
            Role::ChangeConcept => "change_concept",
            Role::Output => "output",
            Role::CareSetting => "care_setting",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role `{s}`"))
    }
}

/// Concepts manually read off one measure description.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeasureConceptInstance {
    pub measure_id: String,
    pub population: String,
    pub population_attributes: ConceptAttributes,
    pub denominator_health_status: String,
    pub change_concept: String,
    pub numerator_health_status: String,
    pub output: String,
    pub utilization: Option<String>,
}

impl MeasureConceptInstance {
    /// Bound text for a role; `None` for an absent or blank care setting.
    pub fn text(&self, role: Role) -> Option<&str> {
        let text = match role {
            Role::Population => &self.population,
            Role::DenominatorHealthStatus => &self.denominator_health_status,
            Role::NumeratorHealthStatus => &self.numerator_health_status,
            Role::ChangeConcept => &self.change_concept,
            Role::Output => &self.output,
            Role::CareSetting => self.utilization.as_ref()?,
        };
        let text = text.trim();
        (!text.is_empty()).then_some(text)
    }

    fn check_complete(&self) -> Result<()> {
        for role in [
            Role::Population,
            Role::DenominatorHealthStatus,
            Role::ChangeConcept,
            Role::NumeratorHealthStatus,
            Role::Output,
        ] {
            if self.text(role).is_none() {
                return Err(Error::MissingConcept {
                    measure_id: self.measure_id.clone(),
                    field: role.as_str(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldNode<'a> {
    pub role: Role,
    pub text: &'a str,
}

/// A template instantiated with one measure's texts.
///
/// `pattern` is the template restricted to the bound nodes; `texts[i]` is the
/// gold text of `pattern.nodes[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldGraph {
    pub measure_id: String,
    pub pattern: PatternGraph,
    pub roles: Vec<Role>,
    pub texts: Vec<String>,
}

impl GoldGraph {
    pub fn name(&self) -> PatternName {
        self.pattern.name
    }

    pub fn node(&self, index: usize) -> GoldNode<'_> {
        GoldNode {
            role: self.roles[index],
            text: &self.texts[index],
        }
    }

    pub fn text_of(&self, role: Role) -> Option<&str> {
        self.roles
            .iter()
            .position(|r| *r == role)
            .map(|i| self.texts[i].as_str())
    }
}

/// Binds a measure's texts to the Numerator, Denominator and Opportunity
/// templates. The care-setting node is kept only when `utilization` is set.
pub fn instantiate_measure_graphs(instance: &MeasureConceptInstance) -> Result<BTreeMap<PatternName, GoldGraph>> {
    instantiate_with(Ontology::bundled(), instance)
}

pub(crate) fn instantiate_with(
    ontology: &Ontology,
    instance: &MeasureConceptInstance,
) -> Result<BTreeMap<PatternName, GoldGraph>> {
    instance.check_complete()?;
    let mut graphs = BTreeMap::new();
    for template in ontology.patterns() {
        let pattern = template.restricted(|node| {
            let role: Role = node.id.parse().expect("schema roles are validated");
            !node.optional || instance.text(role).is_some()
        });
        let roles: Vec<Role> = pattern
            .nodes
            .iter()
            .map(|n| n.id.parse().expect("schema roles are validated"))
            .collect();
        let texts = roles
            .iter()
            .map(|r| instance.text(*r).expect("bound roles have text").to_string())
            .collect();
        graphs.insert(
            template.name,
            GoldGraph {
                measure_id: instance.measure_id.clone(),
                pattern,
                roles,
                texts,
            },
        );
    }
    Ok(graphs)
}
