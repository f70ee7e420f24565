//! In-memory inverted index over reports: conjunctive matching with a
//! trailing search-as-you-type prefix, BM25 ranking, facet filtering and
//! counting, and snippets for the returned page.

pub mod bm25;
pub mod query;
pub mod snippet;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{normalize, shared_analyzer, Analyzer, Term};
use crate::error::{Error, Result};
use crate::model::{IncidentNumber, Report, ReportId};

pub use query::{
    FacetCounts, Hit, Query, SearchResult, DEFAULT_PAGE_SIZE, FACET_AUTHOR, FACET_INCIDENT,
    FACET_SOURCE, FACET_SUBMITTER, MAX_PAGE_SIZE, METADATA_FACETS,
};
pub use snippet::{Field, Fragment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldPosition {
    pub field: Field,
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Posting {
    pub report_id: ReportId,
    pub positions: Vec<FieldPosition>,
    pub term_frequency: u32,
}

impl Posting {
    fn field_frequencies(&self) -> (u32, u32) {
        self.positions.iter().fold((0, 0), |(t, b), p| match p.field {
            Field::Title => (t + 1, b),
            Field::Body => (t, b + 1),
        })
    }
}

/// Postings for one stem, sorted by report id with no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostingList {
    pub stem: String,
    pub postings: Vec<Posting>,
}

impl PostingList {
    fn doc_freq(&self) -> usize {
        self.postings.len()
    }

    fn find(&self, id: ReportId) -> Option<&Posting> {
        self.postings
            .binary_search_by_key(&id, |p| p.report_id)
            .ok()
            .map(|i| &self.postings[i])
    }
}

/// Per-report term frequencies, split by field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocTerm {
    pub stem: String,
    pub title_tf: u32,
    pub body_tf: u32,
}

#[derive(Debug, Clone)]
struct DocEntry {
    report: Arc<Report>,
    weighted_len: u32,
    terms: Vec<DocTerm>,
    surfaces: Vec<String>,
}

#[derive(Debug, Clone)]
struct SurfaceEntry {
    stem: String,
    docs: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FacetKey<'a> {
    Source,
    Author,
    Submitter,
    Incident,
    Namespace(&'a str),
}

impl<'a> FacetKey<'a> {
    fn name(&self) -> &'a str {
        match self {
            FacetKey::Source => FACET_SOURCE,
            FacetKey::Author => FACET_AUTHOR,
            FacetKey::Submitter => FACET_SUBMITTER,
            FacetKey::Incident => FACET_INCIDENT,
            FacetKey::Namespace(ns) => ns,
        }
    }
}

/// Ranked hit list before paging.
#[derive(Debug, Clone, Default)]
pub struct Ranking {
    pub hits: Vec<(ReportId, f64)>,
    /// Stems to highlight: the full query terms plus the prefix expansion.
    pub matched: BTreeSet<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SearchIndex {
    analyzer: Arc<Analyzer>,
    postings: BTreeMap<String, PostingList>,
    surfaces: BTreeMap<String, SurfaceEntry>,
    docs: BTreeMap<ReportId, DocEntry>,
    total_weighted_len: u64,
    namespaces: BTreeSet<String>,
    incident_tags: HashMap<IncidentNumber, BTreeMap<String, BTreeSet<String>>>,
}

impl Default for SearchIndex {
    fn default() -> Self {
        Self::new(shared_analyzer())
    }
}

impl SearchIndex {
    pub fn new(analyzer: Arc<Analyzer>) -> Self {
        SearchIndex {
            analyzer,
            postings: BTreeMap::new(),
            surfaces: BTreeMap::new(),
            docs: BTreeMap::new(),
            total_weighted_len: 0,
            namespaces: BTreeSet::new(),
            incident_tags: HashMap::new(),
        }
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn contains(&self, id: ReportId) -> bool {
        self.docs.contains_key(&id)
    }

    pub fn report(&self, id: ReportId) -> Option<&Arc<Report>> {
        self.docs.get(&id).map(|d| &d.report)
    }

    pub fn report_ids(&self) -> impl Iterator<Item = ReportId> + '_ {
        self.docs.keys().copied()
    }

    pub fn posting_list(&self, stem: &str) -> Option<&PostingList> {
        self.postings.get(stem)
    }

    /// Distinct stems of a report with their per-field frequencies, sorted by stem.
    pub fn doc_terms(&self, id: ReportId) -> Option<&[DocTerm]> {
        self.docs.get(&id).map(|d| d.terms.as_slice())
    }

    pub fn add_report(&mut self, report: Arc<Report>) -> Result<()> {
        if self.docs.contains_key(&report.id) {
            return Err(Error::DuplicateReport(report.id));
        }
        let id = report.id;
        let mut by_stem: BTreeMap<String, Vec<FieldPosition>> = BTreeMap::new();
        let mut surfaces = BTreeSet::new();
        let mut collect = |field: Field, text: &str, terms: Vec<Term>| {
            for term in terms {
                surfaces.insert(text[term.offset.clone()].to_lowercase());
                by_stem.entry(term.stem).or_default().push(FieldPosition {
                    field,
                    position: term.position,
                });
            }
        };
        collect(Field::Title, &report.title, self.analyzer.analyze(&report.title));
        collect(Field::Body, &report.text, self.analyzer.analyze(&report.text));

        let mut terms = Vec::with_capacity(by_stem.len());
        let mut weighted_len = 0;
        for (stem, positions) in by_stem {
            let posting = Posting {
                report_id: id,
                term_frequency: positions.len() as u32,
                positions,
            };
            let (title_tf, body_tf) = posting.field_frequencies();
            weighted_len += bm25::weighted(title_tf, body_tf);
            terms.push(DocTerm {
                stem: stem.clone(),
                title_tf,
                body_tf,
            });
            let list = self.postings.entry(stem.clone()).or_insert_with(|| PostingList {
                stem,
                postings: Vec::new(),
            });
            let at = list
                .postings
                .binary_search_by_key(&id, |p| p.report_id)
                .unwrap_err();
            list.postings.insert(at, posting);
        }
        for surface in &surfaces {
            let stem = self
                .analyzer
                .term_for(surface)
                .expect("surface produced a term when indexed");
            self.surfaces
                .entry(surface.clone())
                .or_insert(SurfaceEntry { stem, docs: 0 })
                .docs += 1;
        }
        self.total_weighted_len += u64::from(weighted_len);
        self.docs.insert(
            id,
            DocEntry {
                report,
                weighted_len,
                terms,
                surfaces: surfaces.into_iter().collect(),
            },
        );
        Ok(())
    }

    pub fn remove_report(&mut self, id: ReportId) -> Result<Arc<Report>> {
        let doc = self.docs.remove(&id).ok_or(Error::UnknownReport(id))?;
        for term in &doc.terms {
            if let Some(list) = self.postings.get_mut(&term.stem) {
                if let Ok(at) = list.postings.binary_search_by_key(&id, |p| p.report_id) {
                    list.postings.remove(at);
                }
                if list.postings.is_empty() {
                    self.postings.remove(&term.stem);
                }
            }
        }
        for surface in &doc.surfaces {
            if let Some(entry) = self.surfaces.get_mut(surface) {
                entry.docs -= 1;
                if entry.docs == 0 {
                    self.surfaces.remove(surface);
                }
            }
        }
        self.total_weighted_len -= u64::from(doc.weighted_len);
        Ok(doc.report)
    }

    /// Moves an indexed report to another incident for faceting purposes.
    pub fn set_report_incident(&mut self, id: ReportId, incident: IncidentNumber) -> Result<()> {
        let doc = self.docs.get_mut(&id).ok_or(Error::UnknownReport(id))?;
        if doc.report.incident_number != incident {
            Arc::make_mut(&mut doc.report).incident_number = incident;
        }
        Ok(())
    }

    pub fn register_namespace(&mut self, namespace: &str) {
        self.namespaces.insert(namespace.to_string());
    }

    pub fn add_incident_tag(&mut self, incident: IncidentNumber, namespace: &str, tag: &str) {
        self.incident_tags
            .entry(incident)
            .or_default()
            .entry(namespace.to_string())
            .or_default()
            .insert(tag.to_string());
    }

    pub fn remove_incident_tag(&mut self, incident: IncidentNumber, namespace: &str, tag: &str) {
        if let Some(by_ns) = self.incident_tags.get_mut(&incident) {
            if let Some(tags) = by_ns.get_mut(namespace) {
                tags.remove(tag);
                if tags.is_empty() {
                    by_ns.remove(namespace);
                }
            }
            if by_ns.is_empty() {
                self.incident_tags.remove(&incident);
            }
        }
    }

    pub fn clear_incident_tags(&mut self, incident: IncidentNumber) {
        self.incident_tags.remove(&incident);
    }

    /// All facet keys this index knows: metadata keys then namespaces.
    pub fn facet_keys(&self) -> Vec<String> {
        METADATA_FACETS
            .iter()
            .map(|k| k.to_string())
            .chain(self.namespaces.iter().cloned())
            .collect()
    }

    fn facet_key<'a>(&self, key: &'a str) -> Option<FacetKey<'a>> {
        match key {
            FACET_SOURCE => Some(FacetKey::Source),
            FACET_AUTHOR => Some(FacetKey::Author),
            FACET_SUBMITTER => Some(FacetKey::Submitter),
            FACET_INCIDENT => Some(FacetKey::Incident),
            ns if self.namespaces.contains(ns) => Some(FacetKey::Namespace(ns)),
            _ => None,
        }
    }

    /// Distinct values of `key` on one report.
    fn facet_values(&self, doc: &DocEntry, key: &FacetKey<'_>) -> Vec<String> {
        let report = &doc.report;
        let mut values: Vec<String> = match key {
            FacetKey::Source => vec![report.source.clone()],
            FacetKey::Author => report.authors.clone(),
            FacetKey::Submitter => report.submitters.clone(),
            FacetKey::Incident => vec![report.incident_number.to_string()],
            FacetKey::Namespace(ns) => self
                .incident_tags
                .get(&report.incident_number)
                .and_then(|by_ns| by_ns.get(*ns))
                .map(|tags| tags.iter().cloned().collect())
                .unwrap_or_default(),
        };
        values.sort();
        values.dedup();
        values
    }

    /// Stems reachable from a typed prefix: indexed stems starting with it,
    /// plus the stems of indexed words starting with it.
    pub fn expand_prefix(&self, prefix: &str) -> BTreeSet<String> {
        let range = (Bound::Included(prefix.to_string()), Bound::Unbounded);
        let mut out: BTreeSet<String> = self
            .postings
            .range::<String, _>(range.clone())
            .take_while(|(stem, _)| stem.starts_with(prefix))
            .map(|(stem, _)| stem.clone())
            .collect();
        out.extend(
            self.surfaces
                .range::<String, _>(range)
                .take_while(|(surface, _)| surface.starts_with(prefix))
                .map(|(_, entry)| entry.stem.clone()),
        );
        out
    }

    fn avg_len(&self) -> f64 {
        if self.docs.is_empty() {
            0.0
        } else {
            self.total_weighted_len as f64 / self.docs.len() as f64
        }
    }

    fn score_posting(&self, list: &PostingList, posting: &Posting, avg: f64) -> f64 {
        let idf = bm25::idf(self.docs.len(), list.doc_freq());
        let (title_tf, body_tf) = posting.field_frequencies();
        let doc_len = self.docs[&posting.report_id].weighted_len;
        bm25::term_score(idf, bm25::weighted(title_tf, body_tf), doc_len, avg)
    }

    /// Text predicate and BM25 scores. `None` means the text places no
    /// constraint (empty or stopword-only query).
    fn text_matches(&self, text: &str) -> (Option<BTreeMap<ReportId, f64>>, BTreeSet<String>) {
        let analyzed = self.analyzer.analyze_query(&normalize(text));
        if analyzed.is_empty() {
            return (None, BTreeSet::new());
        }
        let stems: BTreeSet<String> = analyzed.terms.into_iter().map(|t| t.stem).collect();
        let mut matched = stems.clone();
        let avg = self.avg_len();

        let mut lists = Vec::with_capacity(stems.len());
        for stem in &stems {
            match self.postings.get(stem) {
                Some(list) => lists.push(list),
                None => return (Some(BTreeMap::new()), matched),
            }
        }
        lists.sort_by_key(|l| l.doc_freq());

        let prefix_scores = analyzed.prefix.map(|prefix| {
            let expansion = self.expand_prefix(&prefix);
            let mut best: BTreeMap<ReportId, f64> = BTreeMap::new();
            for stem in &expansion {
                let list = &self.postings[stem];
                for posting in &list.postings {
                    let s = self.score_posting(list, posting, avg);
                    best.entry(posting.report_id)
                        .and_modify(|b| *b = b.max(s))
                        .or_insert(s);
                }
            }
            matched.extend(expansion);
            best
        });

        let mut candidates: Vec<ReportId> = match (lists.first(), &prefix_scores) {
            (Some(first), _) => first.postings.iter().map(|p| p.report_id).collect(),
            (None, Some(prefix)) => prefix.keys().copied().collect(),
            (None, None) => unreachable!("non-empty query has terms or a prefix"),
        };
        for list in lists.iter().skip(1) {
            candidates.retain(|id| list.find(*id).is_some());
        }
        if let Some(prefix) = &prefix_scores {
            if !lists.is_empty() {
                candidates.retain(|id| prefix.contains_key(id));
            }
        }

        let scores = candidates
            .into_iter()
            .map(|id| {
                let mut score = 0.0;
                for stem in &stems {
                    let list = &self.postings[stem];
                    let posting = list.find(id).expect("candidate is in every list");
                    score += self.score_posting(list, posting, avg);
                }
                if let Some(prefix) = &prefix_scores {
                    score += prefix[&id];
                }
                (id, score)
            })
            .collect();
        (Some(scores), matched)
    }

    fn resolve_filters<'q>(
        &self,
        query: &'q Query,
        warnings: &mut Vec<String>,
    ) -> Vec<(FacetKey<'q>, &'q BTreeSet<String>)> {
        let mut filters = Vec::new();
        for (key, values) in &query.facet_filters {
            match self.facet_key(key) {
                Some(k) if !values.is_empty() => filters.push((k, values)),
                Some(_) => {}
                None => warnings.push(format!("unknown facet key {key:?} ignored")),
            }
        }
        filters
    }

    fn passes(&self, doc: &DocEntry, filters: &[(FacetKey<'_>, &BTreeSet<String>)]) -> bool {
        filters.iter().all(|(key, accepted)| {
            self.facet_values(doc, key)
                .iter()
                .any(|v| accepted.contains(v))
        })
    }

    /// Full ranked hit list for a query, ignoring paging.
    pub fn rank(&self, query: &Query) -> Ranking {
        let mut warnings = Vec::new();
        let filters = self.resolve_filters(query, &mut warnings);
        let (text, matched) = self.text_matches(&query.text);
        let mut hits: Vec<(ReportId, f64)> = match text {
            Some(scores) => scores
                .into_iter()
                .filter(|(id, _)| self.passes(&self.docs[id], &filters))
                .collect(),
            None => self
                .docs
                .iter()
                .filter(|(_, doc)| self.passes(doc, &filters))
                .map(|(id, _)| (*id, 0.0))
                .collect(),
        };
        hits.sort_by(|a, b| match b.1.total_cmp(&a.1) {
            Ordering::Equal => a.0.cmp(&b.0),
            other => other,
        });
        Ranking {
            hits,
            matched,
            warnings,
        }
    }

    pub fn search(&self, query: &Query) -> Result<SearchResult> {
        query.validate()?;
        let started = Instant::now();
        let ranking = self.rank(query);
        let ids: Vec<ReportId> = ranking.hits.iter().map(|(id, _)| *id).collect();
        let keys = self.facet_keys();
        let key_refs: Vec<&str> = keys.iter().map(String::as_str).collect();
        let facet_counts = self.facet_counts(&ids, &key_refs);

        let start = (query.page as usize - 1) * query.page_size as usize;
        let hits = ranking
            .hits
            .iter()
            .skip(start)
            .take(query.page_size as usize)
            .map(|&(id, score)| {
                let report = &self.docs[&id].report;
                Hit {
                    report_id: id,
                    incident_number: report.incident_number,
                    title: report.title.clone(),
                    source: report.source.clone(),
                    url: report.url.clone(),
                    date_published: report.date_published,
                    score,
                    snippets: snippet::fragments(
                        &self.analyzer,
                        &report.title,
                        &report.text,
                        &ranking.matched,
                    ),
                }
            })
            .collect();
        Ok(SearchResult {
            total_hits: ids.len() as u64,
            page: query.page,
            page_size: query.page_size,
            hits,
            facet_counts,
            warnings: ranking.warnings,
            elapsed_micros: started.elapsed().as_micros() as u64,
        })
    }

    /// Highlighted fragments of one report for a set of matched stems.
    pub fn snippet(&self, id: ReportId, matched: &BTreeSet<String>) -> Result<Vec<Fragment>> {
        let doc = self.docs.get(&id).ok_or(Error::UnknownReport(id))?;
        Ok(snippet::fragments(
            &self.analyzer,
            &doc.report.title,
            &doc.report.text,
            matched,
        ))
    }

    /// Per-value hit counts for each requested key. Unknown keys and report
    /// ids are skipped. Multi-valued keys may sum above the hit count.
    pub fn facet_counts(&self, hits: &[ReportId], keys: &[&str]) -> FacetCounts {
        let mut out = FacetCounts::new();
        for key_name in keys {
            let Some(key) = self.facet_key(key_name) else {
                continue;
            };
            let counts = out.entry(key.name().to_string()).or_default();
            for id in hits {
                if let Some(doc) = self.docs.get(id) {
                    for value in self.facet_values(doc, &key) {
                        *counts.entry(value).or_default() += 1;
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn report(id: u64, incident: u32, title: &str, text: &str, source: &str) -> Arc<Report> {
        Arc::new(Report {
            id: ReportId(id),
            incident_number: IncidentNumber(incident),
            title: title.into(),
            text: text.into(),
            url: format!("https://example.com/{id}"),
            source: source.into(),
            authors: vec![format!("Author {id}"), "Shared Author".into()],
            submitters: vec!["Sam".into()],
            date_published: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            date_submitted: NaiveDate::from_ymd_opt(2020, 2, 1).unwrap(),
            incident_date: None,
        })
    }

    fn ids(index: &SearchIndex, q: Query) -> Vec<u64> {
        index.rank(&q).hits.iter().map(|(id, _)| id.0).collect()
    }

    fn sample() -> SearchIndex {
        let mut index = SearchIndex::default();
        index
            .add_report(report(1, 1, "Facial recognition misfires", "The facial recognition system failed at the border.", "Wired"))
            .unwrap();
        index
            .add_report(report(2, 1, "Police use face matching", "Policing with recognition software raised bias concerns.", "Wired"))
            .unwrap();
        index
            .add_report(report(3, 2, "Translation error", "A status update was translated as attack them.", "Guardian"))
            .unwrap();
        index
            .add_report(report(4, 3, "Robot crash", "The delivery robot crashed into a xyzzy sign.", "Verge"))
            .unwrap();
        index
    }

    #[test]
    fn add_then_find_unique_word() {
        let index = sample();
        assert_eq!(ids(&index, Query::text("xyzzy ")), vec![4]);
    }

    #[test]
    fn posting_lists_are_sorted() {
        let mut index = SearchIndex::default();
        index.add_report(report(9, 1, "robot", "", "A")).unwrap();
        index.add_report(report(2, 1, "robots", "robot", "A")).unwrap();
        let list = index.posting_list("robot").unwrap();
        let order: Vec<u64> = list.postings.iter().map(|p| p.report_id.0).collect();
        assert_eq!(order, vec![2, 9]);
        for p in &list.postings {
            assert_eq!(p.term_frequency as usize, p.positions.len());
        }
        assert_eq!(list.postings[0].term_frequency, 2);
    }

    #[test]
    fn duplicate_and_unknown_reports() {
        let mut index = sample();
        assert!(matches!(
            index.add_report(report(1, 1, "x", "y", "z")),
            Err(Error::DuplicateReport(ReportId(1)))
        ));
        assert!(matches!(index.remove_report(ReportId(77)), Err(Error::UnknownReport(_))));
    }

    #[test]
    fn remove_and_re_add() {
        let mut index = sample();
        let removed = index.remove_report(ReportId(4)).unwrap();
        assert_eq!(ids(&index, Query::text("xyzzy ")), Vec::<u64>::new());
        assert!(index.posting_list("xyzzi").is_none());
        assert!(index.expand_prefix("xyz").is_empty());
        index.add_report(removed).unwrap();
        assert_eq!(ids(&index, Query::text("xyzzy")), vec![4]);
    }

    #[test]
    fn removing_one_of_two_matches() {
        let mut index = sample();
        assert_eq!(ids(&index, Query::text("recognition ")).len(), 2);
        index.remove_report(ReportId(1)).unwrap();
        assert_eq!(ids(&index, Query::text("recognition ")), vec![2]);
    }

    #[test]
    fn terms_are_conjunctive() {
        let index = sample();
        assert_eq!(ids(&index, Query::text("facial recognition ")), vec![1]);
        assert_eq!(ids(&index, Query::text("facial translation ")), Vec::<u64>::new());
    }

    #[test]
    fn trailing_prefix_matches_words_and_stems() {
        let index = sample();
        assert_eq!(ids(&index, Query::text("facial recog")), vec![1]);
        // "policing" stems to "polic"; typing the whole word still matches.
        assert_eq!(ids(&index, Query::text("policing")), vec![2]);
        let mut translat = ids(&index, Query::text("transl"));
        translat.sort();
        assert_eq!(translat, vec![3]);
    }

    #[test]
    fn empty_query_matches_everything_in_id_order() {
        let index = sample();
        let result = index.search(&Query::default()).unwrap();
        assert_eq!(result.total_hits, 4);
        let order: Vec<u64> = result.hits.iter().map(|h| h.report_id.0).collect();
        assert_eq!(order, vec![1, 2, 3, 4]);
        let sources: u64 = result.facet_counts[FACET_SOURCE].values().sum();
        assert_eq!(sources, 4);
    }

    #[test]
    fn filters_or_within_and_across_keys() {
        let index = sample();
        let q = Query::default().filter(FACET_SOURCE, "Wired").filter(FACET_SOURCE, "Verge");
        assert_eq!(ids(&index, q), vec![1, 2, 4]);
        let q = Query::default()
            .filter(FACET_SOURCE, "Wired")
            .filter(FACET_INCIDENT, "2");
        assert!(ids(&index, q).is_empty());
        let q = Query::text("recognition ").filter(FACET_AUTHOR, "Author 2");
        assert_eq!(ids(&index, q), vec![2]);
    }

    #[test]
    fn unknown_facet_key_is_ignored_with_warning() {
        let index = sample();
        let result = index
            .search(&Query::default().filter("nonsense", "x"))
            .unwrap();
        assert_eq!(result.total_hits, 4);
        assert_eq!(result.warnings.len(), 1);
    }

    #[test]
    fn taxonomy_facets_follow_incident_tags() {
        let mut index = sample();
        index.register_namespace("Fairness");
        index.add_incident_tag(IncidentNumber(1), "Fairness", "Bias");
        let q = Query::default().filter("Fairness", "Bias");
        assert_eq!(ids(&index, q.clone()), vec![1, 2]);
        let result = index.search(&Query::default()).unwrap();
        assert_eq!(result.facet_counts["Fairness"]["Bias"], 2);
        index.remove_incident_tag(IncidentNumber(1), "Fairness", "Bias");
        assert!(ids(&index, q).is_empty());
    }

    #[test]
    fn reassignment_updates_incident_facet() {
        let mut index = sample();
        index.set_report_incident(ReportId(4), IncidentNumber(1)).unwrap();
        let q = Query::default().filter(FACET_INCIDENT, "1");
        assert_eq!(ids(&index, q), vec![1, 2, 4]);
    }

    #[test]
    fn facet_counts_group_by() {
        let index = sample();
        let all: Vec<ReportId> = index.report_ids().collect();
        let counts = index.facet_counts(&all, &[FACET_SOURCE, FACET_AUTHOR]);
        assert_eq!(counts[FACET_SOURCE]["Wired"], 2);
        assert_eq!(counts[FACET_SOURCE]["Guardian"], 1);
        assert_eq!(counts[FACET_AUTHOR]["Shared Author"], 4);
        let empty = index.facet_counts(&[], &[FACET_SOURCE]);
        assert!(empty[FACET_SOURCE].is_empty());
    }

    #[test]
    fn ranking_prefers_title_matches_and_is_stable() {
        let mut index = SearchIndex::default();
        index.add_report(report(1, 1, "Other", "robot arm", "A")).unwrap();
        index.add_report(report(2, 1, "Robot arm", "", "A")).unwrap();
        index.add_report(report(3, 1, "Other", "robot arm", "A")).unwrap();
        let first = index.rank(&Query::text("robot "));
        assert_eq!(first.hits[0].0, ReportId(2));
        // equal scores fall back to id order
        assert_eq!(first.hits[1].0, ReportId(1));
        assert_eq!(first.hits[2].0, ReportId(3));
        assert_eq!(first.hits, index.rank(&Query::text("robot ")).hits);
    }

    #[test]
    fn search_attaches_snippets_to_page() {
        let index = sample();
        let result = index.search(&Query::text("facial recognition")).unwrap();
        assert_eq!(result.total_hits, 1);
        let snippets = &result.hits[0].snippets;
        assert_eq!(snippets[0].field, Field::Title);
        assert!(snippets[1].text.contains("<mark>facial</mark> <mark>recognition</mark>"));
    }

    #[test]
    fn paging_slices_ranked_hits() {
        let index = sample();
        let result = index.search(&Query::default().page(2, 3)).unwrap();
        assert_eq!(result.total_hits, 4);
        assert_eq!(result.hits.len(), 1);
        assert_eq!(result.hits[0].report_id, ReportId(4));
        assert!(index.search(&Query::default().page(1, 0)).is_err());
    }

    #[test]
    fn snippet_for_unknown_report() {
        let index = sample();
        let terms: BTreeSet<String> = ["robot".to_string()].into();
        assert!(matches!(index.snippet(ReportId(99), &terms), Err(Error::UnknownReport(_))));
        // title and body both match
        assert_eq!(index.snippet(ReportId(4), &terms).unwrap().len(), 2);
    }
}
