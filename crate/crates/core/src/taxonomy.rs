//! Namespaced tag vocabularies applied to incidents.
//!
//! Each namespace is owned independently; nothing here couples two
//! namespaces. Classifications attach to incidents and surface as facets on
//! every member report.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::index::METADATA_FACETS;
use crate::model::{Classification, IncidentNumber, TaxonomyNamespace};

type ClassificationKey = (IncidentNumber, String, String);

pub fn validate_namespace(def: &TaxonomyNamespace) -> Result<()> {
    let invalid = |reason| Error::InvalidName {
        name: def.name.clone(),
        reason,
    };
    if def.name.trim().is_empty() {
        return Err(invalid("namespace name is empty"));
    }
    if def.name.contains(':') {
        return Err(invalid("':' separates facet keys from values"));
    }
    if def.name != def.name.trim() {
        return Err(invalid("leading or trailing whitespace"));
    }
    if METADATA_FACETS.contains(&def.name.as_str()) {
        return Err(invalid("reserved for a metadata facet"));
    }
    let mut seen = BTreeSet::new();
    for tag in &def.tags {
        if tag.name.trim().is_empty() {
            return Err(Error::InvalidName {
                name: tag.name.clone(),
                reason: "tag name is empty",
            });
        }
        if !seen.insert(tag.name.as_str()) {
            return Err(Error::InvalidName {
                name: tag.name.clone(),
                reason: "tag defined twice in namespace",
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    namespaces: BTreeMap<String, TaxonomyNamespace>,
    classifications: BTreeMap<ClassificationKey, Classification>,
}

impl Taxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn namespace(&self, name: &str) -> Result<&TaxonomyNamespace> {
        self.namespaces
            .get(name)
            .ok_or_else(|| Error::UnknownNamespace(name.to_string()))
    }

    pub fn namespaces(&self) -> impl Iterator<Item = &TaxonomyNamespace> {
        self.namespaces.values()
    }

    pub fn classifications(&self) -> impl Iterator<Item = &Classification> {
        self.classifications.values()
    }

    pub fn check_register(&self, def: &TaxonomyNamespace) -> Result<()> {
        validate_namespace(def)?;
        if self.namespaces.contains_key(&def.name) {
            return Err(Error::DuplicateNamespace(def.name.clone()));
        }
        Ok(())
    }

    pub fn register_namespace(&mut self, def: TaxonomyNamespace) -> Result<()> {
        self.check_register(&def)?;
        self.namespaces.insert(def.name.clone(), def);
        Ok(())
    }

    /// Namespace and tag checks; incident existence is the caller's concern.
    pub fn check_classify(&self, incident: IncidentNumber, namespace: &str, tag: &str) -> Result<()> {
        let ns = self.namespace(namespace)?;
        if !ns.has_tag(tag) {
            return Err(Error::UnknownTag {
                namespace: namespace.to_string(),
                tag: tag.to_string(),
            });
        }
        let key = (incident, namespace.to_string(), tag.to_string());
        if self.classifications.contains_key(&key) {
            return Err(Error::DuplicateClassification {
                incident,
                namespace: namespace.to_string(),
                tag: tag.to_string(),
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, classification: Classification) -> Result<()> {
        self.check_classify(
            classification.incident_number,
            &classification.namespace,
            &classification.tag,
        )?;
        let key = (
            classification.incident_number,
            classification.namespace.clone(),
            classification.tag.clone(),
        );
        self.classifications.insert(key, classification);
        Ok(())
    }

    pub fn check_declassify(&self, incident: IncidentNumber, namespace: &str, tag: &str) -> Result<()> {
        let key = (incident, namespace.to_string(), tag.to_string());
        if self.classifications.contains_key(&key) {
            Ok(())
        } else {
            Err(Error::UnknownClassification {
                incident,
                namespace: namespace.to_string(),
                tag: tag.to_string(),
            })
        }
    }

    pub fn remove(&mut self, incident: IncidentNumber, namespace: &str, tag: &str) -> Result<Classification> {
        self.check_declassify(incident, namespace, tag)?;
        let key = (incident, namespace.to_string(), tag.to_string());
        Ok(self.classifications.remove(&key).expect("checked"))
    }

    /// Drops every classification of an incident (used when it is retired).
    pub fn remove_incident(&mut self, incident: IncidentNumber) -> Vec<Classification> {
        let keys: Vec<ClassificationKey> = self
            .classifications
            .keys()
            .filter(|(n, _, _)| *n == incident)
            .cloned()
            .collect();
        keys.into_iter()
            .filter_map(|k| self.classifications.remove(&k))
            .collect()
    }

    pub fn classifications_of(&self, incident: IncidentNumber) -> Vec<&Classification> {
        self.classifications
            .range((incident, String::new(), String::new())..)
            .take_while(|((n, _, _), _)| *n == incident)
            .map(|(_, c)| c)
            .collect()
    }

    /// Incidents per tag, tags in definition order, incident numbers ascending.
    pub fn incidents_by_tag(&self, namespace: &str) -> Result<Vec<(String, Vec<IncidentNumber>)>> {
        let ns = self.namespace(namespace)?;
        let mut by_tag: BTreeMap<&str, Vec<IncidentNumber>> = BTreeMap::new();
        for c in self.classifications.values().filter(|c| c.namespace == namespace) {
            by_tag.entry(c.tag.as_str()).or_default().push(c.incident_number);
        }
        Ok(ns
            .tags
            .iter()
            .map(|t| {
                let mut incidents = by_tag.remove(t.name.as_str()).unwrap_or_default();
                incidents.sort();
                (t.name.clone(), incidents)
            })
            .collect())
    }
}
