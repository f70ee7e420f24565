//! Domain records shared across modules. Field names serialize in camelCase.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident($inner:ty)) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<$inner> for $name {
            fn from(v: $inner) -> Self {
                $name(v)
            }
        }
    };
}

id_newtype!(
    /// Positive, system-assigned, never reused.
    IncidentNumber(u32)
);
id_newtype!(ReportId(u64));
id_newtype!(SubmissionId(u64));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub id: ReportId,
    pub incident_number: IncidentNumber,
    pub title: String,
    pub text: String,
    pub url: String,
    pub source: String,
    pub authors: Vec<String>,
    pub submitters: Vec<String>,
    pub date_published: NaiveDate,
    pub date_submitted: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incident_date: Option<NaiveDate>,
}

/// A report before it is assigned an id and an incident.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDraft {
    pub title: String,
    pub text: String,
    pub url: String,
    pub source: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub submitters: Vec<String>,
    pub date_published: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_submitted: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incident_date: Option<NaiveDate>,
}

impl ReportDraft {
    pub(crate) fn into_report(
        self,
        id: ReportId,
        incident_number: IncidentNumber,
        date_submitted: NaiveDate,
    ) -> Report {
        Report {
            id,
            incident_number,
            title: self.title,
            text: self.text,
            url: self.url,
            source: self.source,
            authors: self.authors,
            submitters: self.submitters,
            date_published: self.date_published,
            date_submitted: self.date_submitted.unwrap_or(date_submitted),
            incident_date: self.incident_date,
        }
    }
}

/// Incident as exposed to readers. There is deliberately no title.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Incident {
    pub number: IncidentNumber,
    pub report_ids: Vec<ReportId>,
    pub first_submitter: String,
    pub earliest_incident_date: NaiveDate,
    /// Set when no member report carries an incident date and the earliest
    /// publication date stands in for it.
    pub incident_date_approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Citation {
    pub incident_number: IncidentNumber,
    pub retrieved_date: NaiveDate,
    pub report_count: usize,
    pub citation_string: String,
}

impl Citation {
    pub fn new(incident_number: IncidentNumber, report_count: usize, retrieved_date: NaiveDate) -> Self {
        let noun = if report_count == 1 { "report" } else { "reports" };
        let citation_string = format!(
            "AI Incident Database, Incident {incident_number} ({report_count} {noun}), retrieved {}",
            retrieved_date.format("%Y-%m-%d")
        );
        Citation {
            incident_number,
            retrieved_date,
            report_count,
            citation_string,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDefinition {
    pub name: String,
    #[serde(default)]
    pub description: String,
}

/// An independently owned tag vocabulary. Loaded from one JSON document per
/// namespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNamespace {
    pub name: String,
    #[serde(default)]
    pub owner: String,
    #[serde(default)]
    pub description: String,
    pub tags: Vec<TagDefinition>,
}

impl TaxonomyNamespace {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t.name == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub incident_number: IncidentNumber,
    pub namespace: String,
    pub tag: String,
    pub classifier: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionState {
    Pending,
    Accepted,
    Rejected,
}

/// Reviewer's choice of where an accepted submission goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Resolution {
    New,
    Incident(IncidentNumber),
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::New => f.write_str("new"),
            Resolution::Incident(n) => n.fmt(f),
        }
    }
}

impl std::str::FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("new") {
            return Ok(Resolution::New);
        }
        s.parse::<u32>()
            .ok()
            .filter(|&n| n > 0)
            .map(|n| Resolution::Incident(IncidentNumber(n)))
            .ok_or_else(|| format!("expected \"new\" or a positive incident number, got {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Candidate {
    pub incident_number: IncidentNumber,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decision {
    pub reviewer: String,
    pub date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_id: Option<ReportId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Submission {
    pub id: SubmissionId,
    pub draft: ReportDraft,
    pub submitter: String,
    pub state: SubmissionState,
    pub candidates: Vec<Candidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
}

impl Submission {
    pub fn date_submitted(&self) -> NaiveDate {
        self.draft
            .date_submitted
            .expect("pipeline stamps dateSubmitted on submit")
    }
}
