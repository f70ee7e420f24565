//! Submit-form backend: validation of raw drafts and the review queue.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, FieldErrors, Result};
use crate::model::{Decision, ReportDraft, Submission, SubmissionId, SubmissionState};
use crate::registry::normalize_url;

pub const PENDING_PAGE_SIZE: usize = 50;

/// Draft as it arrives from a form or API body, before validation. Every
/// field is optional so that all problems can be reported at once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DraftInput {
    pub title: Option<String>,
    pub text: Option<String>,
    pub url: Option<String>,
    pub source: Option<String>,
    pub authors: Option<Vec<String>>,
    pub submitters: Option<Vec<String>>,
    pub date_published: Option<String>,
    pub date_submitted: Option<String>,
    pub incident_date: Option<String>,
}

impl From<ReportDraft> for DraftInput {
    fn from(d: ReportDraft) -> Self {
        DraftInput {
            title: Some(d.title),
            text: Some(d.text),
            url: Some(d.url),
            source: Some(d.source),
            authors: Some(d.authors),
            submitters: Some(d.submitters),
            date_published: Some(d.date_published.to_string()),
            date_submitted: d.date_submitted.map(|d| d.to_string()),
            incident_date: d.incident_date.map(|d| d.to_string()),
        }
    }
}

fn required(errors: &mut Vec<FieldError>, field: &str, value: Option<String>) -> String {
    match value {
        Some(v) if !v.trim().is_empty() => v,
        _ => {
            errors.push(FieldError::new(field, "required"));
            String::new()
        }
    }
}

fn date(errors: &mut Vec<FieldError>, field: &str, value: Option<String>) -> Option<NaiveDate> {
    let value = value.filter(|v| !v.trim().is_empty())?;
    match value.trim().parse::<NaiveDate>() {
        Ok(d) => Some(d),
        Err(_) => {
            errors.push(FieldError::new(field, "expected an ISO-8601 date (YYYY-MM-DD)"));
            None
        }
    }
}

fn names(list: Option<Vec<String>>) -> Vec<String> {
    list.unwrap_or_default()
        .into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Checks the metadata set every report carries: url (absolute http(s)),
/// title, text, source and publication date are required; dates must parse.
pub fn validate_draft(input: DraftInput) -> Result<ReportDraft> {
    let mut errors = Vec::new();
    let title = required(&mut errors, "title", input.title);
    let text = required(&mut errors, "text", input.text);
    let url = required(&mut errors, "url", input.url);
    if !url.is_empty() {
        if let Err(Error::Validation(FieldErrors(mut e))) = normalize_url(&url) {
            errors.append(&mut e);
        }
    }
    let source = required(&mut errors, "source", input.source);
    let published_raw = input.date_published.clone();
    let date_published = date(&mut errors, "datePublished", input.date_published);
    if published_raw.map_or(true, |v| v.trim().is_empty()) {
        errors.push(FieldError::new("datePublished", "required"));
    }
    let date_submitted = date(&mut errors, "dateSubmitted", input.date_submitted);
    let incident_date = date(&mut errors, "incidentDate", input.incident_date);
    if !errors.is_empty() {
        return Err(Error::Validation(FieldErrors(errors)));
    }
    Ok(ReportDraft {
        title,
        text,
        url,
        source,
        authors: names(input.authors),
        submitters: names(input.submitters),
        date_published: date_published.expect("validated"),
        date_submitted,
        incident_date,
    })
}

#[derive(Debug, Clone)]
pub struct SubmissionQueue {
    submissions: BTreeMap<SubmissionId, Submission>,
    next_id: u64,
}

impl Default for SubmissionQueue {
    fn default() -> Self {
        SubmissionQueue {
            submissions: BTreeMap::new(),
            next_id: 1,
        }
    }
}

impl SubmissionQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&self) -> SubmissionId {
        SubmissionId(self.next_id)
    }

    pub fn get(&self, id: SubmissionId) -> Result<&Submission> {
        self.submissions.get(&id).ok_or(Error::UnknownSubmission(id))
    }

    pub fn all(&self) -> impl Iterator<Item = &Submission> {
        self.submissions.values()
    }

    /// Ids are never reused; a restored allocation counter may already be
    /// past the id being inserted.
    pub fn insert(&mut self, submission: Submission) -> Result<()> {
        if self.submissions.contains_key(&submission.id) {
            return Err(Error::Storage(format!(
                "submission id {} reused",
                submission.id
            )));
        }
        self.next_id = self.next_id.max(submission.id.0 + 1);
        self.submissions.insert(submission.id, submission);
        Ok(())
    }

    /// The submission must exist and still be pending.
    pub fn check_pending(&self, id: SubmissionId) -> Result<&Submission> {
        let sub = self.get(id)?;
        if sub.state != SubmissionState::Pending {
            return Err(Error::AlreadyDecided(id));
        }
        Ok(sub)
    }

    pub fn decide(&mut self, id: SubmissionId, state: SubmissionState, decision: Decision) -> Result<&Submission> {
        self.check_pending(id)?;
        let sub = self.submissions.get_mut(&id).expect("checked");
        sub.state = state;
        sub.decision = Some(decision);
        Ok(sub)
    }

    /// Pending submissions by submission date, then id. `page` starts at 1.
    pub fn pending(&self, page: usize, page_size: usize) -> Vec<&Submission> {
        let mut pending: Vec<&Submission> = self
            .submissions
            .values()
            .filter(|s| s.state == SubmissionState::Pending)
            .collect();
        pending.sort_by_key(|s| (s.date_submitted(), s.id));
        pending
            .into_iter()
            .skip(page.saturating_sub(1) * page_size)
            .take(page_size)
            .collect()
    }

    pub fn restore_next_id(&mut self, next: SubmissionId) {
        self.next_id = self.next_id.max(next.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input() -> DraftInput {
        DraftInput {
            title: Some("Title".into()),
            text: Some("Text".into()),
            url: Some("https://news.example/a".into()),
            source: Some("News".into()),
            authors: Some(vec!["  Ann ".into(), "".into()]),
            submitters: None,
            date_published: Some("2020-01-02".into()),
            date_submitted: None,
            incident_date: None,
        }
    }

    fn fields(err: Error) -> Vec<String> {
        err.field_errors()
            .unwrap()
            .iter()
            .map(|e| e.field.clone())
            .collect()
    }

    #[test]
    fn valid_draft() {
        let d = validate_draft(input()).unwrap();
        assert_eq!(d.authors, vec!["Ann"]);
        assert_eq!(d.date_published, NaiveDate::from_ymd_opt(2020, 1, 2).unwrap());
    }

    #[test]
    fn missing_title() {
        let err = validate_draft(DraftInput { title: None, ..input() }).unwrap_err();
        assert_eq!(fields(err), vec!["title"]);
    }

    #[test]
    fn several_problems_reported_together() {
        let err = validate_draft(DraftInput {
            url: Some("not a url".into()),
            date_published: Some("yesterday".into()),
            incident_date: Some("2020-13-40".into()),
            source: Some("  ".into()),
            ..input()
        })
        .unwrap_err();
        assert_eq!(fields(err), vec!["url", "source", "datePublished", "incidentDate"]);
    }

    #[test]
    fn missing_publication_date() {
        let err = validate_draft(DraftInput { date_published: None, ..input() }).unwrap_err();
        assert_eq!(fields(err), vec!["datePublished"]);
    }
}
