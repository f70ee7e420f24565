//! Suggesting which existing incident a new report belongs to.
//!
//! Reports and the draft are compared as tf-idf vectors over their analyzed
//! title and text; an incident scores the best cosine among its reports.

use std::collections::BTreeMap;

use crate::analysis::normalize;
use crate::index::SearchIndex;
use crate::model::{Candidate, IncidentNumber, ReportDraft, ReportId};
use crate::registry::Registry;

pub const DEFAULT_THRESHOLD: f64 = 0.35;
pub const DEFAULT_CANDIDATES: usize = 5;

/// Smoothed idf, `ln((1 + N) / (1 + df)) + 1`.
pub fn tfidf_idf(doc_count: usize, doc_freq: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + doc_freq as f64)).ln() + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolveOptions {
    pub k: usize,
    pub threshold: f64,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            k: DEFAULT_CANDIDATES,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

fn draft_term_counts(index: &SearchIndex, draft: &ReportDraft) -> BTreeMap<String, u32> {
    let analyzer = index.analyzer();
    let mut counts = BTreeMap::new();
    for text in [normalize(&draft.title), normalize(&draft.text)] {
        for term in analyzer.analyze(&text) {
            *counts.entry(term.stem).or_insert(0) += 1;
        }
    }
    counts
}

/// Ranked incidents with similarity at or above the threshold, best first,
/// ties by incident number. A draft whose URL is already stored resolves to
/// that report's incident with score 1.0 and nothing else.
pub fn resolve_candidates(
    registry: &Registry,
    index: &SearchIndex,
    draft: &ReportDraft,
    options: ResolveOptions,
) -> Vec<Candidate> {
    if let Some(report) = registry.find_url(&draft.url).and_then(|id| registry.report(id)) {
        return vec![Candidate {
            incident_number: report.incident_number,
            score: 1.0,
        }];
    }
    let doc_count = index.len();
    if doc_count == 0 || options.k == 0 {
        return Vec::new();
    }
    let draft_counts = draft_term_counts(index, draft);

    let mut draft_norm = 0.0;
    let mut dots: BTreeMap<ReportId, f64> = BTreeMap::new();
    for (stem, &tf) in &draft_counts {
        let list = index.posting_list(stem);
        let idf = tfidf_idf(doc_count, list.map_or(0, |l| l.postings.len()));
        let weight = f64::from(tf) * idf;
        draft_norm += weight * weight;
        for posting in list.iter().flat_map(|l| &l.postings) {
            *dots.entry(posting.report_id).or_insert(0.0) +=
                weight * f64::from(posting.term_frequency) * idf;
        }
    }
    if draft_norm == 0.0 {
        return Vec::new();
    }
    let draft_norm = draft_norm.sqrt();

    let mut best: BTreeMap<IncidentNumber, f64> = BTreeMap::new();
    for (id, dot) in dots {
        let terms = index.doc_terms(id).unwrap_or_default();
        let doc_norm = terms
            .iter()
            .map(|t| {
                let idf = tfidf_idf(
                    doc_count,
                    index.posting_list(&t.stem).map_or(0, |l| l.postings.len()),
                );
                let w = f64::from(t.title_tf + t.body_tf) * idf;
                w * w
            })
            .sum::<f64>()
            .sqrt();
        if doc_norm == 0.0 {
            continue;
        }
        let cosine = dot / (draft_norm * doc_norm);
        let Some(report) = registry.report(id) else {
            continue;
        };
        let entry = best.entry(report.incident_number).or_insert(0.0);
        *entry = entry.max(cosine);
    }

    let mut ranked: Vec<Candidate> = best
        .into_iter()
        .filter(|&(_, score)| score >= options.threshold)
        .map(|(incident_number, score)| Candidate {
            incident_number,
            score,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.incident_number.cmp(&b.incident_number))
    });
    ranked.truncate(options.k);
    ranked
}
