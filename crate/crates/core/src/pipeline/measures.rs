use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ontology::{instantiate_measure_graphs, AttributeKey, ConceptType, MeasureConceptInstance};
use crate::tsv;

/// One measure: its description and, when annotated, its concept instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureRecord {
    pub id: String,
    pub description: String,
    pub instance: Option<MeasureConceptInstance>,
}

/// Reads a measure file: `key<TAB>value` lines, each `id` line opening a new
/// measure.
///
/// Keys: `description` (required), the concept roles `population`,
/// `denominator_health_status`, `change_concept`, `numerator_health_status`,
/// `output`, `utilization`, and population attributes such as
/// `population.age_group`. A measure with any role key gets an
/// instance, which must then name every required role.
pub fn parse_measures(text: &str, origin: &str) -> Result<Vec<MeasureRecord>> {
    let mut out: Vec<(MeasureRecord, bool)> = Vec::new();
    let mut ids = HashSet::new();
    for (line_no, line) in tsv::content_lines(text) {
        let err = |m: String| Error::parse(origin, line_no, m);
        let Some((key, value)) = line.split_once('\t') else {
            return Err(err("expected key<TAB>value".into()));
        };
        let (key, value) = (key.trim(), tsv::unescape(value.trim()));
        if key == "id" {
            if value.is_empty() || !ids.insert(value.clone()) {
                return Err(err(format!("empty or repeated measure id `{value}`")));
            }
            let instance = MeasureConceptInstance {
                measure_id: value.clone(),
                ..Default::default()
            };
            out.push((
                MeasureRecord {
                    id: value,
                    description: String::new(),
                    instance: Some(instance),
                },
                false,
            ));
            continue;
        }
        let Some((record, annotated)) = out.last_mut() else {
            return Err(err(format!("`{key}` before the first id line")));
        };
        let inst = record.instance.as_mut().expect("instance until finished");
        match key {
            "description" => record.description = value,
            "population" => inst.population = value,
            "denominator_health_status" => inst.denominator_health_status = value,
            "change_concept" => inst.change_concept = value,
            "numerator_health_status" => inst.numerator_health_status = value,
            "output" => inst.output = value,
            "utilization" => inst.utilization = Some(value).filter(|v| !v.is_empty()),
            _ => {
                let Some((owner, attr)) = key.split_once('.') else {
                    return Err(err(format!("unknown key `{key}`")));
                };
                if owner != "population" {
                    return Err(err(format!(
                        "attributes are only kept for the population, not `{owner}`"
                    )));
                }
                let attr: AttributeKey = attr.parse().map_err(err)?;
                inst.population_attributes
                    .insert(ConceptType::Population, attr, value)?;
            }
        }
        if key != "description" {
            *annotated = true;
        }
    }
    out.into_iter()
        .map(|(mut record, annotated)| {
            if record.description.trim().is_empty() {
                return Err(Error::parse(
                    origin,
                    0,
                    format!("measure `{}` has no description", record.id),
                ));
            }
            match &record.instance {
                Some(inst) if annotated => {
                    instantiate_measure_graphs(inst)?;
                }
                _ => record.instance = None,
            }
            Ok(record)
        })
        .collect()
}
