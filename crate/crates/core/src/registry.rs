//! Incidents and their reports.
//!
//! Numbers are allocated by the registry, dense at creation and never
//! reused: retiring an incident burns its number. Every report belongs to
//! exactly one live incident and every live incident has at least one report.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use chrono::NaiveDate;
use url::Url;

use crate::analysis::normalize;
use crate::error::{Error, Result};
use crate::model::{Citation, Incident, IncidentNumber, Report, ReportDraft, ReportId};

/// Query parameters dropped before URL comparison.
pub const TRACKING_PARAMS: &[&str] = &[
    "utm_source",
    "utm_medium",
    "utm_campaign",
    "utm_term",
    "utm_content",
    "utm_id",
    "fbclid",
    "gclid",
    "dclid",
    "msclkid",
    "mc_cid",
    "mc_eid",
    "igshid",
    "ref_src",
];

/// Canonical URL for duplicate detection: lowercase scheme and host, no
/// fragment, no tracking parameters, no trailing slash.
pub fn normalize_url(raw: &str) -> Result<String> {
    let mut url = Url::parse(raw.trim())
        .map_err(|e| Error::validation("url", &format!("not an absolute url: {e}")))?;
    if !matches!(url.scheme(), "http" | "https") || url.host_str().is_none() {
        return Err(Error::validation("url", "expected an http(s) url with a host"));
    }
    url.set_fragment(None);
    let kept: Vec<(String, String)> = url
        .query_pairs()
        .filter(|(k, _)| !TRACKING_PARAMS.contains(&k.to_ascii_lowercase().as_str()))
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect();
    if kept.is_empty() {
        url.set_query(None);
    } else {
        url.query_pairs_mut().clear().extend_pairs(kept);
    }
    let path = url.path().to_string();
    if path.len() > 1 && path.ends_with('/') {
        url.set_path(path.trim_end_matches('/'));
    }
    let mut out = url.to_string();
    if url.query().is_none() && out.ends_with('/') {
        out.pop();
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct IncidentEntry {
    report_ids: BTreeSet<ReportId>,
    first_submitter: String,
}

#[derive(Debug, Clone)]
pub struct Registry {
    reports: BTreeMap<ReportId, Arc<Report>>,
    incidents: BTreeMap<IncidentNumber, IncidentEntry>,
    urls: HashMap<String, ReportId>,
    retired: BTreeSet<IncidentNumber>,
    next_incident: u32,
    next_report: u64,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            reports: BTreeMap::new(),
            incidents: BTreeMap::new(),
            urls: HashMap::new(),
            retired: BTreeSet::new(),
            next_incident: 1,
            next_report: 1,
        }
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn report_count(&self) -> usize {
        self.reports.len()
    }

    pub fn incident_count(&self) -> usize {
        self.incidents.len()
    }

    pub fn report(&self, id: ReportId) -> Option<&Arc<Report>> {
        self.reports.get(&id)
    }

    pub fn reports(&self) -> impl Iterator<Item = &Arc<Report>> {
        self.reports.values()
    }

    pub fn incident_numbers(&self) -> impl Iterator<Item = IncidentNumber> + '_ {
        self.incidents.keys().copied()
    }

    pub fn retired_numbers(&self) -> impl Iterator<Item = IncidentNumber> + '_ {
        self.retired.iter().copied()
    }

    pub fn contains_incident(&self, number: IncidentNumber) -> bool {
        self.incidents.contains_key(&number)
    }

    pub fn is_retired(&self, number: IncidentNumber) -> bool {
        self.retired.contains(&number)
    }

    pub fn next_incident_number(&self) -> IncidentNumber {
        IncidentNumber(self.next_incident)
    }

    pub fn next_report_id(&self) -> ReportId {
        ReportId(self.next_report)
    }

    /// Report id stored under a URL, after normalization.
    pub fn find_url(&self, raw_url: &str) -> Option<ReportId> {
        normalize_url(raw_url)
            .ok()
            .and_then(|u| self.urls.get(&u).copied())
    }

    pub fn reports_of(&self, number: IncidentNumber) -> Result<Vec<&Arc<Report>>> {
        let entry = self
            .incidents
            .get(&number)
            .ok_or(Error::UnknownIncident(number))?;
        Ok(entry.report_ids.iter().map(|id| &self.reports[id]).collect())
    }

    pub fn incident(&self, number: IncidentNumber) -> Result<Incident> {
        let entry = self
            .incidents
            .get(&number)
            .ok_or(Error::UnknownIncident(number))?;
        let reports = entry.report_ids.iter().map(|id| &self.reports[id]);
        let known = reports.clone().filter_map(|r| r.incident_date).min();
        let (earliest_incident_date, approximate) = match known {
            Some(date) => (date, false),
            None => (
                reports
                    .map(|r| r.date_published)
                    .min()
                    .expect("incidents have at least one report"),
                true,
            ),
        };
        Ok(Incident {
            number,
            report_ids: entry.report_ids.iter().copied().collect(),
            first_submitter: entry.first_submitter.clone(),
            earliest_incident_date,
            incident_date_approximate: approximate,
        })
    }

    pub fn cite(&self, number: IncidentNumber, retrieved: NaiveDate) -> Result<Citation> {
        let entry = self
            .incidents
            .get(&number)
            .ok_or(Error::UnknownIncident(number))?;
        Ok(Citation::new(number, entry.report_ids.len(), retrieved))
    }

    /// Normalizes a draft into a report with the next free id. Does not
    /// store it.
    pub fn prepare_report(
        &self,
        draft: ReportDraft,
        incident: IncidentNumber,
        today: NaiveDate,
    ) -> Result<Report> {
        let url = normalize_url(&draft.url)?;
        if self.urls.contains_key(&url) {
            return Err(Error::DuplicateUrl(url));
        }
        let draft = ReportDraft {
            url,
            title: normalize(draft.title.trim()),
            text: normalize(&draft.text),
            source: normalize(draft.source.trim()),
            ..draft
        };
        Ok(draft.into_report(self.next_report_id(), incident, today))
    }

    fn check_new_report(&self, report: &Report) -> Result<()> {
        if self.reports.contains_key(&report.id) {
            return Err(Error::DuplicateReport(report.id));
        }
        if self.urls.contains_key(&report.url) {
            return Err(Error::DuplicateUrl(report.url.clone()));
        }
        Ok(())
    }

    fn store(&mut self, report: Report) -> Arc<Report> {
        self.next_report = self.next_report.max(report.id.0 + 1);
        self.urls.insert(report.url.clone(), report.id);
        let report = Arc::new(report);
        self.reports.insert(report.id, Arc::clone(&report));
        report
    }

    /// Stores a prepared report as the first member of a new incident.
    /// Live callers pass [`Registry::next_incident_number`]; replay of a
    /// compacted log may restore older numbers, which must be unused.
    pub fn insert_incident(&mut self, first_submitter: &str, report: Report) -> Result<Arc<Report>> {
        let number = report.incident_number;
        if number.0 == 0 || self.incidents.contains_key(&number) || self.retired.contains(&number) {
            return Err(Error::Storage(format!("incident number {number} is already allocated")));
        }
        self.check_new_report(&report)?;
        self.next_incident = self.next_incident.max(number.0 + 1);
        self.incidents.insert(
            number,
            IncidentEntry {
                report_ids: BTreeSet::from([report.id]),
                first_submitter: first_submitter.to_string(),
            },
        );
        Ok(self.store(report))
    }

    /// Stores a prepared report under its (existing) incident.
    pub fn insert_report(&mut self, report: Report) -> Result<Arc<Report>> {
        let number = report.incident_number;
        if !self.incidents.contains_key(&number) {
            return Err(Error::UnknownIncident(number));
        }
        self.check_new_report(&report)?;
        self.incidents
            .get_mut(&number)
            .expect("checked")
            .report_ids
            .insert(report.id);
        Ok(self.store(report))
    }

    pub fn create_incident(
        &mut self,
        draft: ReportDraft,
        submitter: &str,
        today: NaiveDate,
    ) -> Result<Incident> {
        let report = self.prepare_report(draft, self.next_incident_number(), today)?;
        let number = report.incident_number;
        self.insert_incident(submitter, report)?;
        self.incident(number)
    }

    pub fn attach_report(
        &mut self,
        number: IncidentNumber,
        draft: ReportDraft,
        today: NaiveDate,
    ) -> Result<Arc<Report>> {
        if !self.incidents.contains_key(&number) {
            return Err(Error::UnknownIncident(number));
        }
        let report = self.prepare_report(draft, number, today)?;
        self.insert_report(report)
    }

    /// Validates a move without applying it. Returns the source incident.
    pub fn check_reassign(
        &self,
        id: ReportId,
        target: IncidentNumber,
        retire_source: bool,
    ) -> Result<IncidentNumber> {
        let report = self.reports.get(&id).ok_or(Error::UnknownReport(id))?;
        if !self.incidents.contains_key(&target) {
            return Err(Error::UnknownIncident(target));
        }
        let source = report.incident_number;
        if source != target && self.incidents[&source].report_ids.len() == 1 && !retire_source {
            return Err(Error::WouldOrphanIncident {
                report: id,
                incident: source,
            });
        }
        Ok(source)
    }

    /// Moves a report. When it was the last report of its incident and
    /// `retire_source` is set, the source number is retired. Returns the
    /// source incident and whether it was retired.
    pub fn reassign_report(
        &mut self,
        id: ReportId,
        target: IncidentNumber,
        retire_source: bool,
    ) -> Result<(IncidentNumber, bool)> {
        let source = self.check_reassign(id, target, retire_source)?;
        if source == target {
            return Ok((source, false));
        }
        let entry = self.incidents.get_mut(&source).expect("checked");
        entry.report_ids.remove(&id);
        let retired = entry.report_ids.is_empty();
        if retired {
            self.incidents.remove(&source);
            self.retired.insert(source);
        }
        self.incidents
            .get_mut(&target)
            .expect("checked")
            .report_ids
            .insert(id);
        Arc::make_mut(self.reports.get_mut(&id).expect("checked")).incident_number = target;
        Ok((source, retired))
    }

    pub fn check_remove(&self, id: ReportId, retire_incident: bool) -> Result<IncidentNumber> {
        let report = self.reports.get(&id).ok_or(Error::UnknownReport(id))?;
        let number = report.incident_number;
        if self.incidents[&number].report_ids.len() == 1 && !retire_incident {
            return Err(Error::WouldOrphanIncident {
                report: id,
                incident: number,
            });
        }
        Ok(number)
    }

    /// Deletes a report. Returns it and whether its incident was retired.
    pub fn remove_report(&mut self, id: ReportId, retire_incident: bool) -> Result<(Arc<Report>, bool)> {
        let number = self.check_remove(id, retire_incident)?;
        let report = self.reports.remove(&id).expect("checked");
        self.urls.remove(&report.url);
        let entry = self.incidents.get_mut(&number).expect("checked");
        entry.report_ids.remove(&id);
        let retired = entry.report_ids.is_empty();
        if retired {
            self.incidents.remove(&number);
            self.retired.insert(number);
        }
        Ok((report, retired))
    }

    /// Marks a number as used and retired without an incident behind it.
    /// Used when restoring compacted state.
    pub fn restore_retired(&mut self, number: IncidentNumber) -> Result<()> {
        if self.incidents.contains_key(&number) {
            return Err(Error::Storage(format!("incident {number} is live, cannot retire")));
        }
        self.retired.insert(number);
        self.next_incident = self.next_incident.max(number.0 + 1);
        Ok(())
    }

    /// Raises allocation counters; never lowers them.
    pub fn restore_counters(&mut self, next_incident: IncidentNumber, next_report: ReportId) {
        self.next_incident = self.next_incident.max(next_incident.0);
        self.next_report = self.next_report.max(next_report.0);
    }

    /// Checks the structural invariants. Used by tests and after replay.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        for (number, entry) in &self.incidents {
            if entry.report_ids.is_empty() {
                return Err(format!("incident {number} has no reports"));
            }
            if self.retired.contains(number) {
                return Err(format!("incident {number} is both live and retired"));
            }
            if number.0 >= self.next_incident {
                return Err(format!("incident {number} beyond allocation counter"));
            }
            for id in &entry.report_ids {
                if !seen.insert(*id) {
                    return Err(format!("report {id} appears under two incidents"));
                }
                match self.reports.get(id) {
                    Some(r) if r.incident_number == *number => {}
                    _ => return Err(format!("report {id} does not point back to incident {number}")),
                }
            }
        }
        if seen.len() != self.reports.len() {
            return Err("some reports belong to no incident".into());
        }
        let allocated: BTreeSet<u32> = self
            .incidents
            .keys()
            .chain(&self.retired)
            .map(|n| n.0)
            .collect();
        if allocated.iter().copied().ne(1..self.next_incident) {
            return Err("allocated incident numbers are not dense".into());
        }
        if self.urls.len() != self.reports.len() {
            return Err("url index out of sync".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 11, 1).unwrap()
    }

    pub(crate) fn draft(url: &str) -> ReportDraft {
        ReportDraft {
            title: "Title".into(),
            text: "Body text".into(),
            url: url.into(),
            source: "Source".into(),
            authors: vec!["A".into()],
            submitters: vec!["S".into()],
            date_published: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            date_submitted: None,
            incident_date: None,
        }
    }

    #[test]
    fn url_normalization() {
        assert_eq!(
            normalize_url("HTTPS://Example.COM/News/Story/?utm_source=x&id=4#top").unwrap(),
            "https://example.com/News/Story?id=4"
        );
        assert_eq!(normalize_url("http://example.com/").unwrap(), "http://example.com");
        assert_eq!(
            normalize_url("https://example.com/a?fbclid=1").unwrap(),
            "https://example.com/a"
        );
        assert!(normalize_url("/relative/path").is_err());
        assert!(normalize_url("ftp://example.com/file").is_err());
    }

    #[test]
    fn numbers_start_at_one_and_increase() {
        let mut reg = Registry::new();
        let first = reg.create_incident(draft("https://a.com/1"), "alice", day()).unwrap();
        assert_eq!(first.number, IncidentNumber(1));
        assert_eq!(first.report_ids.len(), 1);
        assert_eq!(first.first_submitter, "alice");
        let second = reg.create_incident(draft("https://a.com/2"), "bob", day()).unwrap();
        assert_eq!(second.number, IncidentNumber(2));
    }

    #[test]
    fn duplicate_urls_rejected_after_normalization() {
        let mut reg = Registry::new();
        reg.create_incident(draft("https://a.com/1"), "alice", day()).unwrap();
        assert!(matches!(
            reg.create_incident(draft("https://A.com/1/#frag"), "bob", day()),
            Err(Error::DuplicateUrl(_))
        ));
        assert!(matches!(
            reg.attach_report(IncidentNumber(1), draft("https://a.com/1?utm_medium=x"), day()),
            Err(Error::DuplicateUrl(_))
        ));
    }

    #[test]
    fn attach_builds_multi_report_incident() {
        let mut reg = Registry::new();
        reg.create_incident(draft("https://a.com/0"), "alice", day()).unwrap();
        for i in 1..18 {
            reg.attach_report(IncidentNumber(1), draft(&format!("https://a.com/{i}")), day())
                .unwrap();
        }
        let cite = reg.cite(IncidentNumber(1), day()).unwrap();
        assert_eq!(cite.report_count, 18);
        assert!(matches!(
            reg.attach_report(IncidentNumber(9), draft("https://b.com"), day()),
            Err(Error::UnknownIncident(_))
        ));
        assert!(matches!(reg.cite(IncidentNumber(9), day()), Err(Error::UnknownIncident(_))));
        reg.verify().unwrap();
    }

    #[test]
    fn reassignment_and_retirement() {
        let mut reg = Registry::new();
        reg.create_incident(draft("https://a.com/1"), "alice", day()).unwrap();
        let moved = reg
            .attach_report(IncidentNumber(1), draft("https://a.com/2"), day())
            .unwrap();
        reg.create_incident(draft("https://a.com/3"), "bob", day()).unwrap();

        // 1 of 2 reports moves: both incidents stay valid
        reg.reassign_report(moved.id, IncidentNumber(2), false).unwrap();
        reg.verify().unwrap();
        assert_eq!(reg.report(moved.id).unwrap().incident_number, IncidentNumber(2));

        // the sole report of incident 1 cannot move without retiring it
        let sole = reg.reports_of(IncidentNumber(1)).unwrap()[0].id;
        assert!(matches!(
            reg.reassign_report(sole, IncidentNumber(2), false),
            Err(Error::WouldOrphanIncident { .. })
        ));
        let (source, retired) = reg.reassign_report(sole, IncidentNumber(2), true).unwrap();
        assert_eq!((source, retired), (IncidentNumber(1), true));
        assert!(reg.is_retired(IncidentNumber(1)));
        reg.verify().unwrap();

        let next = reg.create_incident(draft("https://a.com/4"), "carol", day()).unwrap();
        assert_eq!(next.number, IncidentNumber(3));
        assert_eq!(reg.incident(IncidentNumber(2)).unwrap().first_submitter, "bob");
    }

    #[test]
    fn reassign_errors() {
        let mut reg = Registry::new();
        reg.create_incident(draft("https://a.com/1"), "alice", day()).unwrap();
        assert!(matches!(
            reg.reassign_report(ReportId(42), IncidentNumber(1), false),
            Err(Error::UnknownReport(_))
        ));
        assert!(matches!(
            reg.reassign_report(ReportId(1), IncidentNumber(5), false),
            Err(Error::UnknownIncident(_))
        ));
    }

    #[test]
    fn earliest_incident_date_falls_back_to_publication() {
        let mut reg = Registry::new();
        let mut d = draft("https://a.com/1");
        d.date_published = NaiveDate::from_ymd_opt(2019, 5, 1).unwrap();
        reg.create_incident(d, "alice", day()).unwrap();
        let inc = reg.incident(IncidentNumber(1)).unwrap();
        assert!(inc.incident_date_approximate);
        assert_eq!(inc.earliest_incident_date, NaiveDate::from_ymd_opt(2019, 5, 1).unwrap());

        let mut d = draft("https://a.com/2");
        d.incident_date = NaiveDate::from_ymd_opt(2019, 3, 1);
        reg.attach_report(IncidentNumber(1), d, day()).unwrap();
        let inc = reg.incident(IncidentNumber(1)).unwrap();
        assert!(!inc.incident_date_approximate);
        assert_eq!(inc.earliest_incident_date, NaiveDate::from_ymd_opt(2019, 3, 1).unwrap());
    }

    #[test]
    fn removal_frees_url_and_can_retire() {
        let mut reg = Registry::new();
        reg.create_incident(draft("https://a.com/1"), "alice", day()).unwrap();
        assert!(matches!(
            reg.remove_report(ReportId(1), false),
            Err(Error::WouldOrphanIncident { .. })
        ));
        let (_, retired) = reg.remove_report(ReportId(1), true).unwrap();
        assert!(retired);
        assert_eq!(reg.find_url("https://a.com/1"), None);
        let again = reg.create_incident(draft("https://a.com/1"), "bob", day()).unwrap();
        assert_eq!(again.number, IncidentNumber(2));
        assert_eq!(again.report_ids, vec![ReportId(2)]);
        reg.verify().unwrap();
    }
}
