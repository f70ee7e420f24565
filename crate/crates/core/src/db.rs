//! The database: materialized state rebuilt from the event log, a single
//! writer, and concurrent readers.
//!
//! Every mutation is validated against the current state, turned into an
//! [`Event`], appended to the log, and only then applied. Replay applies the
//! same events through the same code path, so a restart reproduces the
//! state exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use chrono::NaiveDate;
use parking_lot::{Mutex, RwLock, RwLockReadGuard};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{Query, SearchIndex, SearchResult};
use crate::model::{
    Candidate, Citation, Classification, Decision, Incident, IncidentNumber, Report, ReportDraft,
    ReportId, Resolution, Submission, SubmissionId, SubmissionState, TaxonomyNamespace,
};
use crate::persistence::{Event, EventLog};
use crate::registry::Registry;
use crate::resolution::{resolve_candidates, ResolveOptions};
use crate::submission::{validate_draft, DraftInput, SubmissionQueue, PENDING_PAGE_SIZE};
use crate::taxonomy::Taxonomy;

pub const LOG_FILE: &str = "log.jsonl";

/// Everything derived from the log.
#[derive(Debug, Clone, Default)]
pub struct State {
    pub registry: Registry,
    pub index: SearchIndex,
    pub taxonomy: Taxonomy,
    pub submissions: SubmissionQueue,
    /// Sequence of the last applied record.
    pub sequence: u64,
    pub view_sequences: ViewSequences,
}

/// Sequence of the last event that changed the input of each static view.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViewSequences {
    /// Report set: drives word counts and leaderboards.
    pub reports: u64,
    pub namespaces: BTreeMap<String, u64>,
}

/// Which view inputs an event changed.
#[derive(Debug, Default)]
struct Touched {
    reports: bool,
    namespaces: BTreeSet<String>,
}

impl Touched {
    fn reports() -> Self {
        Touched {
            reports: true,
            ..Touched::default()
        }
    }

    fn namespace(name: &str) -> Self {
        Touched {
            namespaces: BTreeSet::from([name.to_string()]),
            ..Touched::default()
        }
    }
}

impl State {
    fn store_new_incident(&mut self, first_submitter: &str, report: &Report) -> Result<Arc<Report>> {
        let stored = self.registry.insert_incident(first_submitter, report.clone())?;
        self.index.add_report(Arc::clone(&stored))?;
        Ok(stored)
    }

    fn store_report(&mut self, report: &Report) -> Result<Arc<Report>> {
        let stored = self.registry.insert_report(report.clone())?;
        self.index.add_report(Arc::clone(&stored))?;
        Ok(stored)
    }

    fn retire(&mut self, number: IncidentNumber, touched: &mut Touched) {
        for c in self.taxonomy.remove_incident(number) {
            touched.namespaces.insert(c.namespace);
        }
        self.index.clear_incident_tags(number);
    }

    /// Applies the event recorded at `seq`. All checks run before anything
    /// is mutated, so a failed apply leaves the state untouched.
    pub fn apply(&mut self, seq: u64, event: &Event) -> Result<()> {
        let touched = self.apply_event(event)?;
        self.sequence = seq;
        if touched.reports {
            self.view_sequences.reports = seq;
        }
        for ns in touched.namespaces {
            self.view_sequences.namespaces.insert(ns, seq);
        }
        Ok(())
    }

    fn apply_event(&mut self, event: &Event) -> Result<Touched> {
        let mut touched = Touched::default();
        match event {
            Event::IncidentCreated {
                number,
                first_submitter,
                report,
            } => {
                if report.incident_number != *number {
                    return Err(Error::Storage("report does not belong to the created incident".into()));
                }
                self.store_new_incident(first_submitter, report)?;
                touched.reports = true;
            }
            Event::ReportAdded { report } => {
                self.store_report(report)?;
                touched.reports = true;
            }
            Event::ReportRemoved {
                report_id,
                retire_incident,
            } => {
                let (report, retired) = self.registry.remove_report(*report_id, *retire_incident)?;
                self.index.remove_report(*report_id)?;
                touched.reports = true;
                if retired {
                    self.retire(report.incident_number, &mut touched);
                }
            }
            Event::ReportReassigned {
                report_id,
                target,
                retire_source,
            } => {
                let (source, retired) =
                    self.registry
                        .reassign_report(*report_id, *target, *retire_source)?;
                self.index.set_report_incident(*report_id, *target)?;
                if retired {
                    self.retire(source, &mut touched);
                }
            }
            Event::IncidentRetired { number } => self.registry.restore_retired(*number)?,
            Event::NamespaceRegistered { namespace } => {
                self.taxonomy.register_namespace(namespace.clone())?;
                self.index.register_namespace(&namespace.name);
                touched = Touched::namespace(&namespace.name);
            }
            Event::ClassificationAdded { classification } => {
                let n = classification.incident_number;
                if !self.registry.contains_incident(n) {
                    return Err(Error::UnknownIncident(n));
                }
                self.taxonomy.insert(classification.clone())?;
                self.index
                    .add_incident_tag(n, &classification.namespace, &classification.tag);
                touched = Touched::namespace(&classification.namespace);
            }
            Event::ClassificationRemoved {
                incident_number,
                namespace,
                tag,
            } => {
                self.taxonomy.remove(*incident_number, namespace, tag)?;
                self.index.remove_incident_tag(*incident_number, namespace, tag);
                touched = Touched::namespace(namespace);
            }
            Event::SubmissionCreated { submission } => self.submissions.insert(submission.clone())?,
            Event::SubmissionDecided {
                submission_id,
                state,
                decision,
                report,
                new_incident,
            } => {
                let submitter = self.submissions.check_pending(*submission_id)?.submitter.clone();
                match (state, report) {
                    (SubmissionState::Accepted, Some(report)) if *new_incident => {
                        self.store_new_incident(&submitter, report)?;
                        touched = Touched::reports();
                    }
                    (SubmissionState::Accepted, Some(report)) => {
                        self.store_report(report)?;
                        touched = Touched::reports();
                    }
                    (SubmissionState::Rejected, None) => {}
                    _ => return Err(Error::Storage("malformed submission decision".into())),
                }
                self.submissions
                    .decide(*submission_id, *state, decision.clone())?;
            }
            Event::Checkpoint {
                next_incident,
                next_report,
                next_submission,
            } => {
                self.registry.restore_counters(*next_incident, *next_report);
                self.submissions.restore_next_id(*next_submission);
            }
        }
        Ok(touched)
    }

    /// Minimal event sequence that rebuilds this state.
    pub fn snapshot_events(&self) -> Vec<Event> {
        let pristine = self.registry.report_count() == 0
            && self.registry.retired_numbers().next().is_none()
            && self.registry.next_incident_number().0 == 1
            && self.registry.next_report_id().0 == 1
            && self.submissions.next_id().0 == 1
            && self.taxonomy.namespaces().next().is_none();
        if pristine {
            return Vec::new();
        }
        let mut events = vec![Event::Checkpoint {
            next_incident: self.registry.next_incident_number(),
            next_report: self.registry.next_report_id(),
            next_submission: self.submissions.next_id(),
        }];
        events.extend(
            self.registry
                .retired_numbers()
                .map(|number| Event::IncidentRetired { number }),
        );
        events.extend(self.taxonomy.namespaces().map(|ns| Event::NamespaceRegistered {
            namespace: ns.clone(),
        }));
        for number in self.registry.incident_numbers() {
            let incident = self.registry.incident(number).expect("live incident");
            let mut reports = self.registry.reports_of(number).expect("live incident").into_iter();
            let first = reports.next().expect("incidents have reports");
            events.push(Event::IncidentCreated {
                number,
                first_submitter: incident.first_submitter,
                report: Report::clone(first),
            });
            events.extend(reports.map(|r| Event::ReportAdded {
                report: Report::clone(r),
            }));
        }
        events.extend(
            self.taxonomy
                .classifications()
                .map(|c| Event::ClassificationAdded {
                    classification: c.clone(),
                }),
        );
        events.extend(self.submissions.all().map(|s| Event::SubmissionCreated {
            submission: s.clone(),
        }));
        events
    }

    /// Builds state by applying records in order.
    pub fn replay<'a>(records: impl IntoIterator<Item = (u64, &'a Event)>) -> Result<State> {
        let mut state = State::default();
        for (i, (seq, event)) in records.into_iter().enumerate() {
            state.apply(seq, event).map_err(|e| Error::CorruptLog {
                line: i + 1,
                reason: format!("record {seq} ({}) does not apply: {e}", event.kind()),
            })?;
        }
        state
            .registry
            .verify()
            .map_err(|reason| Error::CorruptLog { line: 0, reason })?;
        Ok(state)
    }
}

/// One line of a bulk ingest file: a report draft plus the incident number
/// it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestRecord {
    pub incident_number: IncidentNumber,
    #[serde(flatten)]
    pub draft: ReportDraft,
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {error}")]
pub struct IngestFailure {
    pub line: usize,
    pub error: Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestSummary {
    pub reports: usize,
    pub incidents_created: usize,
}

/// Parses an ingest file: one JSON report document per line, blank lines
/// ignored.
pub fn parse_ingest(text: &str) -> std::result::Result<Vec<(usize, IngestRecord)>, IngestFailure> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str::<IngestRecord>(line)
                .map(|r| (i + 1, r))
                .map_err(|e| IngestFailure {
                    line: i + 1,
                    error: Error::validation("record", &e.to_string()),
                })
        })
        .collect()
}

/// Incident joined with its reports, classifications and citation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IncidentDocument {
    #[serde(flatten)]
    pub incident: Incident,
    pub report_count: usize,
    pub reports: Vec<ReportSummary>,
    pub classifications: Vec<Classification>,
    pub citation_string: String,
}

/// Report metadata without the full text.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportSummary {
    pub id: ReportId,
    pub title: String,
    pub url: String,
    pub source: String,
    pub authors: Vec<String>,
    pub submitters: Vec<String>,
    pub date_published: NaiveDate,
    pub date_submitted: NaiveDate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incident_date: Option<NaiveDate>,
}

impl From<&Report> for ReportSummary {
    fn from(r: &Report) -> Self {
        ReportSummary {
            id: r.id,
            title: r.title.clone(),
            url: r.url.clone(),
            source: r.source.clone(),
            authors: r.authors.clone(),
            submitters: r.submitters.clone(),
            date_published: r.date_published,
            date_submitted: r.date_submitted,
            incident_date: r.incident_date,
        }
    }
}

type Clock = Box<dyn Fn() -> NaiveDate + Send + Sync>;

fn system_clock() -> NaiveDate {
    chrono::Utc::now().date_naive()
}

pub struct Database {
    state: RwLock<State>,
    writer: Mutex<Option<EventLog>>,
    reads: AtomicU64,
    clock: Clock,
    data_dir: Option<PathBuf>,
    replay_warnings: Vec<String>,
}

impl std::fmt::Debug for Database {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Database")
            .field("data_dir", &self.data_dir)
            .field("sequence", &self.state.read().sequence)
            .finish()
    }
}

impl Database {
    /// A database with no backing log.
    pub fn in_memory() -> Self {
        Database {
            state: RwLock::new(State::default()),
            writer: Mutex::new(None),
            reads: AtomicU64::new(0),
            clock: Box::new(system_clock),
            data_dir: None,
            replay_warnings: Vec::new(),
        }
    }

    /// Opens `<data_dir>/log.jsonl`, replaying it into memory.
    pub fn open(data_dir: impl AsRef<Path>) -> Result<Self> {
        let data_dir = data_dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&data_dir)?;
        let (log, replay) = EventLog::open(data_dir.join(LOG_FILE))?;
        for warning in &replay.warnings {
            tracing::warn!("{warning}");
        }
        let state = State::replay(replay.records.iter().map(|r| (r.seq, &r.event)))?;
        Ok(Database {
            state: RwLock::new(state),
            writer: Mutex::new(Some(log)),
            reads: AtomicU64::new(0),
            clock: Box::new(system_clock),
            data_dir: Some(data_dir),
            replay_warnings: replay.warnings,
        })
    }

    pub fn with_clock(mut self, clock: impl Fn() -> NaiveDate + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    /// Notes from recovery, such as a dropped torn record.
    pub fn replay_warnings(&self) -> &[String] {
        &self.replay_warnings
    }

    pub fn today(&self) -> NaiveDate {
        (self.clock)()
    }

    /// Number of read accesses to the materialized state so far.
    pub fn read_count(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    /// Read access to the current state. Each call counts as one read.
    pub fn read(&self) -> RwLockReadGuard<'_, State> {
        self.reads.fetch_add(1, Ordering::Relaxed);
        self.state.read()
    }

    pub fn sequence(&self) -> u64 {
        self.read().sequence
    }

    fn commit(&self, log: &mut Option<EventLog>, event: Event) -> Result<u64> {
        let seq = match log {
            Some(log) => log.append(&event)?,
            None => self.state.read().sequence + 1,
        };
        self.state.write().apply(seq, &event)?;
        Ok(seq)
    }

    /// Runs `prepare` against the current state under the writer lock and
    /// commits the event it returns.
    fn mutate<T>(&self, prepare: impl FnOnce(&State) -> Result<(Event, T)>) -> Result<T> {
        let mut log = self.writer.lock();
        let (event, out) = prepare(&self.state.read())?;
        self.commit(&mut log, event)?;
        Ok(out)
    }

    pub fn create_incident(&self, draft: ReportDraft, submitter: &str) -> Result<Incident> {
        let today = self.today();
        let number = self.mutate(|st| {
            let number = st.registry.next_incident_number();
            let report = st.registry.prepare_report(draft, number, today)?;
            Ok((
                Event::IncidentCreated {
                    number,
                    first_submitter: submitter.to_string(),
                    report,
                },
                number,
            ))
        })?;
        self.read().registry.incident(number)
    }

    pub fn attach_report(&self, number: IncidentNumber, draft: ReportDraft) -> Result<Arc<Report>> {
        let today = self.today();
        let id = self.mutate(|st| {
            if !st.registry.contains_incident(number) {
                return Err(Error::UnknownIncident(number));
            }
            let report = st.registry.prepare_report(draft, number, today)?;
            let id = report.id;
            Ok((Event::ReportAdded { report }, id))
        })?;
        Ok(Arc::clone(self.read().registry.report(id).expect("just stored")))
    }

    pub fn reassign_report(&self, id: ReportId, target: IncidentNumber, retire_source: bool) -> Result<()> {
        self.mutate(|st| {
            st.registry.check_reassign(id, target, retire_source)?;
            Ok((
                Event::ReportReassigned {
                    report_id: id,
                    target,
                    retire_source,
                },
                (),
            ))
        })
    }

    pub fn remove_report(&self, id: ReportId, retire_incident: bool) -> Result<()> {
        self.mutate(|st| {
            st.registry.check_remove(id, retire_incident)?;
            Ok((
                Event::ReportRemoved {
                    report_id: id,
                    retire_incident,
                },
                (),
            ))
        })
    }

    pub fn register_namespace(&self, namespace: TaxonomyNamespace) -> Result<()> {
        self.mutate(|st| {
            st.taxonomy.check_register(&namespace)?;
            Ok((Event::NamespaceRegistered { namespace }, ()))
        })
    }

    pub fn classify(&self, number: IncidentNumber, namespace: &str, tag: &str, classifier: &str) -> Result<Classification> {
        let today = self.today();
        self.mutate(|st| {
            if !st.registry.contains_incident(number) {
                return Err(Error::UnknownIncident(number));
            }
            st.taxonomy.check_classify(number, namespace, tag)?;
            let classification = Classification {
                incident_number: number,
                namespace: namespace.to_string(),
                tag: tag.to_string(),
                classifier: classifier.to_string(),
                date: today,
            };
            Ok((
                Event::ClassificationAdded {
                    classification: classification.clone(),
                },
                classification,
            ))
        })
    }

    pub fn declassify(&self, number: IncidentNumber, namespace: &str, tag: &str) -> Result<()> {
        self.mutate(|st| {
            st.taxonomy.check_declassify(number, namespace, tag)?;
            Ok((
                Event::ClassificationRemoved {
                    incident_number: number,
                    namespace: namespace.to_string(),
                    tag: tag.to_string(),
                },
                (),
            ))
        })
    }

    /// Validates a raw draft and queues it for review with its resolution
    /// candidates.
    pub fn submit(&self, input: DraftInput, submitter: &str) -> Result<Submission> {
        let mut draft = validate_draft(input)?;
        if submitter.trim().is_empty() {
            return Err(Error::validation("submitter", "required"));
        }
        let today = self.today();
        draft.date_submitted.get_or_insert(today);
        if draft.submitters.is_empty() {
            draft.submitters.push(submitter.to_string());
        }
        self.mutate(|st| {
            if let Some(existing) = st.registry.find_url(&draft.url) {
                let url = &st.registry.report(existing).expect("indexed").url;
                return Err(Error::DuplicateUrl(url.clone()));
            }
            let candidates = resolve_candidates(&st.registry, &st.index, &draft, ResolveOptions::default());
            let submission = Submission {
                id: st.submissions.next_id(),
                draft,
                submitter: submitter.to_string(),
                state: SubmissionState::Pending,
                candidates,
                decision: None,
            };
            Ok((
                Event::SubmissionCreated {
                    submission: submission.clone(),
                },
                submission,
            ))
        })
    }

    pub fn accept(&self, id: SubmissionId, resolution: Resolution, reviewer: &str) -> Result<Arc<Report>> {
        let today = self.today();
        let report_id = self.mutate(|st| {
            let submission = st.submissions.check_pending(id)?;
            let (number, new_incident) = match resolution {
                Resolution::New => (st.registry.next_incident_number(), true),
                Resolution::Incident(n) if st.registry.contains_incident(n) => (n, false),
                Resolution::Incident(n) => return Err(Error::UnknownIncident(n)),
            };
            let report = st
                .registry
                .prepare_report(submission.draft.clone(), number, today)?;
            let report_id = report.id;
            Ok((
                Event::SubmissionDecided {
                    submission_id: id,
                    state: SubmissionState::Accepted,
                    decision: Decision {
                        reviewer: reviewer.to_string(),
                        date: today,
                        resolution: Some(resolution),
                        report_id: Some(report_id),
                        reason: None,
                    },
                    report: Some(report),
                    new_incident,
                },
                report_id,
            ))
        })?;
        Ok(Arc::clone(self.read().registry.report(report_id).expect("just stored")))
    }

    pub fn reject(&self, id: SubmissionId, reason: &str, reviewer: &str) -> Result<Submission> {
        let today = self.today();
        self.mutate(|st| {
            st.submissions.check_pending(id)?;
            if reason.trim().is_empty() {
                return Err(Error::validation("reason", "required"));
            }
            Ok((
                Event::SubmissionDecided {
                    submission_id: id,
                    state: SubmissionState::Rejected,
                    decision: Decision {
                        reviewer: reviewer.to_string(),
                        date: today,
                        resolution: None,
                        report_id: None,
                        reason: Some(reason.to_string()),
                    },
                    report: None,
                    new_incident: false,
                },
                (),
            ))
        })?;
        self.submission(id)
    }

    /// Bulk load. Incident numbers must appear in allocation order: a
    /// number not seen before must be the next free one. Nothing is stored
    /// unless every record applies.
    pub fn ingest(
        &self,
        records: Vec<(usize, IngestRecord)>,
    ) -> std::result::Result<IngestSummary, IngestFailure> {
        let mut log = self.writer.lock();
        let mut scratch = self.state.read().clone();
        let first_seq = match log.as_ref() {
            Some(log) => log.next_seq(),
            None => scratch.sequence + 1,
        };
        let today = self.today();
        let mut events = Vec::with_capacity(records.len());
        let mut summary = IngestSummary {
            reports: 0,
            incidents_created: 0,
        };
        for (line, record) in records {
            let fail = |error| IngestFailure { line, error };
            let number = record.incident_number;
            let event = if scratch.registry.contains_incident(number) {
                let report = scratch
                    .registry
                    .prepare_report(record.draft, number, today)
                    .map_err(fail)?;
                Event::ReportAdded { report }
            } else if number == scratch.registry.next_incident_number() {
                let first_submitter = record
                    .draft
                    .submitters
                    .first()
                    .cloned()
                    .unwrap_or_else(|| "anonymous".to_string());
                let report = scratch
                    .registry
                    .prepare_report(record.draft, number, today)
                    .map_err(fail)?;
                summary.incidents_created += 1;
                Event::IncidentCreated {
                    number,
                    first_submitter,
                    report,
                }
            } else {
                return Err(fail(Error::validation(
                    "incidentNumber",
                    &format!(
                        "incident {number} does not exist and the next number is {}",
                        scratch.registry.next_incident_number()
                    ),
                )));
            };
            scratch
                .apply(first_seq + events.len() as u64, &event)
                .map_err(fail)?;
            summary.reports += 1;
            events.push(event);
        }
        if let Some(log) = log.as_mut() {
            let seqs = log
                .append_batch(&events)
                .map_err(|error| IngestFailure { line: 0, error })?;
            debug_assert_eq!(seqs.first().copied().unwrap_or(first_seq), first_seq);
        }
        *self.state.write() = scratch;
        Ok(summary)
    }

    /// Rewrites the log as a snapshot of the current state.
    pub fn compact(&self) -> Result<()> {
        let mut log = self.writer.lock();
        let events = self.state.read().snapshot_events();
        if let Some(log) = log.as_mut() {
            log.rewrite(&events)?;
            // Rebuild from the snapshot so memory matches what a restart sees.
            let first = log.next_seq() - events.len() as u64;
            let rebuilt = State::replay((first..).zip(&events))?;
            *self.state.write() = rebuilt;
        }
        Ok(())
    }

    pub fn search(&self, query: &Query) -> Result<SearchResult> {
        self.read().index.search(query)
    }

    pub fn resolve_candidates(&self, draft: &ReportDraft, options: ResolveOptions) -> Vec<Candidate> {
        let st = self.read();
        resolve_candidates(&st.registry, &st.index, draft, options)
    }

    pub fn incident(&self, number: IncidentNumber) -> Result<Incident> {
        self.read().registry.incident(number)
    }

    pub fn cite(&self, number: IncidentNumber, retrieved: NaiveDate) -> Result<Citation> {
        self.read().registry.cite(number, retrieved)
    }

    pub fn incident_document(&self, number: IncidentNumber) -> Result<IncidentDocument> {
        let today = self.today();
        let st = self.read();
        let incident = st.registry.incident(number)?;
        let reports: Vec<ReportSummary> = st
            .registry
            .reports_of(number)?
            .into_iter()
            .map(|r| ReportSummary::from(r.as_ref()))
            .collect();
        let citation = st.registry.cite(number, today)?;
        Ok(IncidentDocument {
            incident,
            report_count: reports.len(),
            reports,
            classifications: st
                .taxonomy
                .classifications_of(number)
                .into_iter()
                .cloned()
                .collect(),
            citation_string: citation.citation_string,
        })
    }

    pub fn report(&self, id: ReportId) -> Result<Arc<Report>> {
        self.read()
            .registry
            .report(id)
            .cloned()
            .ok_or(Error::UnknownReport(id))
    }

    pub fn submission(&self, id: SubmissionId) -> Result<Submission> {
        self.read().submissions.get(id).cloned()
    }

    /// Pending submissions, oldest first. `page` starts at 1.
    pub fn pending_queue(&self, page: usize) -> Vec<Submission> {
        self.read()
            .submissions
            .pending(page, PENDING_PAGE_SIZE)
            .into_iter()
            .cloned()
            .collect()
    }

    pub fn namespace(&self, name: &str) -> Result<TaxonomyNamespace> {
        self.read().taxonomy.namespace(name).cloned()
    }
}
