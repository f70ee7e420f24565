#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use chrono::NaiveDate;
use rand::Rng;
use incidentdb::db::{Database, IngestRecord};
use incidentdb::fixture::{self, ClassificationRecord, Corpus};

pub fn today() -> NaiveDate {
    NaiveDate::from_ymd_opt(2022, 3, 1).unwrap()
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_records(db: &Database, records: &[IngestRecord]) {
    let numbered = records.iter().cloned().enumerate().map(|(i, r)| (i + 1, r)).collect();
    db.ingest(numbered).expect("fixture ingests");
}

pub fn load_taxonomies(db: &Database, classifications: &[ClassificationRecord]) {
    for ns in fixture::taxonomies() {
        db.register_namespace(ns).unwrap();
    }
    for c in classifications {
        db.classify(c.incident_number, &c.namespace, &c.tag, &c.classifier)
            .unwrap();
    }
}

/// In-memory database holding `corpus` with both fixture taxonomies applied.
pub fn loaded(corpus: &Corpus) -> Database {
    let db = Database::in_memory().with_clock(today);
    load_records(&db, &corpus.records);
    load_taxonomies(&db, &fixture::classifications(corpus));
    db
}

pub fn percentile(samples: &mut [f64], p: f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(f64::total_cmp);
    let rank = ((p * samples.len() as f64).ceil() as usize).clamp(1, samples.len());
    samples[rank - 1]
}

/// Random query source drawn from a corpus vocabulary and its facet values.
pub struct QueryGen {
    pub words: Vec<String>,
    pub facets: Vec<(String, Vec<String>)>,
}

const STOPWORD_SAMPLES: &[&str] = &["the", "and", "of", "was", "their", "into"];

impl QueryGen {
    pub fn new(db: &Database) -> Self {
        let st = db.read();
        let mut words = std::collections::BTreeSet::new();
        for r in st.registry.reports() {
            for t in incidentdb::analysis::tokenize(&r.title).chain(incidentdb::analysis::tokenize(&r.text)) {
                if t.surface.chars().all(char::is_alphabetic) && t.surface.len() >= 3 {
                    words.insert(t.surface.to_lowercase());
                }
            }
        }
        let all = st.index.search(&incidentdb::index::Query::default()).unwrap();
        let facets = all
            .facet_counts
            .into_iter()
            .map(|(k, v)| (k, v.into_keys().collect()))
            .collect();
        QueryGen {
            words: words.into_iter().collect(),
            facets,
        }
    }

    pub fn word(&self, rng: &mut impl Rng) -> &str {
        &self.words[rng.gen_range(0..self.words.len())]
    }

    /// Free text: up to three whole words, sometimes a stopword or an
    /// unknown word, optionally ending in a partial token.
    pub fn text(&self, rng: &mut impl Rng) -> String {
        let mut parts: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let w = match rng.gen_range(0..10) {
                0 => STOPWORD_SAMPLES[rng.gen_range(0..STOPWORD_SAMPLES.len())].to_string(),
                1 => "zzyzxq".to_string(),
                2 => self.word(rng).to_uppercase(),
                _ => self.word(rng).to_string(),
            };
            parts.push(w);
        }
        let mut text = parts.join(" ");
        if rng.gen_bool(0.6) {
            let w: Vec<char> = self.word(rng).chars().collect();
            let cut = rng.gen_range(1..=w.len());
            if !text.is_empty() {
                text.push(' ');
            }
            text.extend(&w[..cut]);
        } else if !text.is_empty() && rng.gen_bool(0.5) {
            text.push(' ');
        }
        text
    }

    /// Zero to two facet keys, each with one or two values; occasionally
    /// a value or key that matches nothing.
    pub fn filters(&self, rng: &mut impl Rng) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            if rng.gen_ratio(1, 20) {
                out.push(("nosuchkey".to_string(), "x".to_string()));
                continue;
            }
            let (key, values) = &self.facets[rng.gen_range(0..self.facets.len())];
            if values.is_empty() {
                continue;
            }
            for _ in 0..rng.gen_range(1..=2) {
                let v = if rng.gen_ratio(1, 20) {
                    "no such value".to_string()
                } else {
                    values[rng.gen_range(0..values.len())].clone()
                };
                out.push((key.clone(), v));
            }
        }
        out
    }

    pub fn query(&self, rng: &mut impl Rng) -> incidentdb::index::Query {
        let mut q = incidentdb::index::Query::text(self.text(rng));
        for (k, v) in self.filters(rng) {
            q = q.filter(k, v);
        }
        q
    }
}
