use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::snippet::Fragment;
use crate::model::{IncidentNumber, ReportId};

pub const FACET_SOURCE: &str = "source";
pub const FACET_AUTHOR: &str = "author";
pub const FACET_SUBMITTER: &str = "submitter";
pub const FACET_INCIDENT: &str = "incidentNumber";

/// Metadata facet keys. Taxonomy facets use the namespace name as the key.
pub const METADATA_FACETS: [&str; 4] = [FACET_SOURCE, FACET_AUTHOR, FACET_SUBMITTER, FACET_INCIDENT];

pub const DEFAULT_PAGE_SIZE: u32 = 10;
pub const MAX_PAGE_SIZE: u32 = 100;

pub type FacetCounts = BTreeMap<String, BTreeMap<String, u64>>;

/// Full-text text plus facet filters. Filters are OR within one key and AND
/// across keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Query {
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub facet_filters: BTreeMap<String, BTreeSet<String>>,
    #[serde(default = "default_page")]
    pub page: u32,
    #[serde(default = "default_page_size")]
    pub page_size: u32,
}

fn default_page() -> u32 {
    1
}

fn default_page_size() -> u32 {
    DEFAULT_PAGE_SIZE
}

impl Default for Query {
    fn default() -> Self {
        Query {
            text: String::new(),
            facet_filters: BTreeMap::new(),
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

impl Query {
    pub fn text(text: impl Into<String>) -> Self {
        Query {
            text: text.into(),
            ..Query::default()
        }
    }

    pub fn filter(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.facet_filters
            .entry(key.into())
            .or_default()
            .insert(value.into());
        self
    }

    /// Adds a filter written as `key:value`, splitting at the first colon.
    /// `Fairness:Bias` filters namespace `Fairness` on tag `Bias`.
    pub fn filter_spec(self, spec: &str) -> Result<Self> {
        let (key, value) = parse_filter_spec(spec)?;
        Ok(self.filter(key, value))
    }

    pub fn page(mut self, page: u32, page_size: u32) -> Self {
        self.page = page;
        self.page_size = page_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.page == 0 {
            return Err(Error::InvalidQuery("page starts at 1".into()));
        }
        if !(1..=MAX_PAGE_SIZE).contains(&self.page_size) {
            return Err(Error::InvalidQuery(format!(
                "pageSize must be between 1 and {MAX_PAGE_SIZE}"
            )));
        }
        Ok(())
    }
}

pub fn parse_filter_spec(spec: &str) -> Result<(&str, &str)> {
    match spec.split_once(':') {
        Some((key, value)) if !key.is_empty() && !value.is_empty() => Ok((key, value)),
        _ => Err(Error::InvalidQuery(format!(
            "facet filter {spec:?} is not of the form key:value"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hit {
    pub report_id: ReportId,
    pub incident_number: IncidentNumber,
    pub title: String,
    pub source: String,
    pub url: String,
    pub date_published: NaiveDate,
    pub score: f64,
    pub snippets: Vec<Fragment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    pub total_hits: u64,
    pub page: u32,
    pub page_size: u32,
    pub hits: Vec<Hit>,
    pub facet_counts: FacetCounts,
    /// Unknown facet keys that were ignored.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub elapsed_micros: u64,
}

impl SearchResult {
    /// Serialized form with timing removed; identical engine states give
    /// identical bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut copy = self.clone();
        copy.elapsed_micros = 0;
        serde_json::to_vec(&copy).expect("search results serialize")
    }
}
