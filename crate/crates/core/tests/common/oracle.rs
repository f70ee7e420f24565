//! Brute-force reference implementations. Each one recomputes its answer
//! by scanning every report, sharing nothing with the engine but the
//! analyzer, which is checked separately against the reference stemmer
//! vocabulary.

use std::collections::{BTreeMap, BTreeSet};

use incidentdb::analysis::{default_analyzer, normalize, tokenize};
use incidentdb::fixture::ClassificationRecord;
use incidentdb::model::{IncidentNumber, Report, ReportDraft, ReportId};

pub type Counts = BTreeMap<String, BTreeMap<String, u64>>;

pub struct Doc {
    pub id: ReportId,
    pub incident: IncidentNumber,
    stems: BTreeSet<String>,
    surfaces: BTreeSet<String>,
    facets: BTreeMap<String, BTreeSet<String>>,
}

pub struct SearchOracle {
    pub docs: Vec<Doc>,
    keys: Vec<String>,
    all_stems: BTreeSet<String>,
    all_surfaces: BTreeMap<String, String>,
}

fn terms(text: &str) -> Vec<(String, String)> {
    let analyzer = default_analyzer();
    tokenize(text)
        .filter_map(|t| {
            analyzer
                .term_for(t.surface)
                .map(|stem| (t.surface.to_lowercase(), stem))
        })
        .collect()
}

impl SearchOracle {
    pub fn new(reports: &[&Report], namespaces: &[&str], classifications: &[ClassificationRecord]) -> Self {
        let mut tags: BTreeMap<(IncidentNumber, &str), BTreeSet<String>> = BTreeMap::new();
        for c in classifications {
            tags.entry((c.incident_number, c.namespace.as_str()))
                .or_default()
                .insert(c.tag.clone());
        }
        let mut all_stems = BTreeSet::new();
        let mut all_surfaces = BTreeMap::new();
        let docs = reports
            .iter()
            .map(|r| {
                let mut stems = BTreeSet::new();
                let mut surfaces = BTreeSet::new();
                for (surface, stem) in terms(&r.title).into_iter().chain(terms(&r.text)) {
                    all_surfaces.insert(surface.clone(), stem.clone());
                    all_stems.insert(stem.clone());
                    stems.insert(stem);
                    surfaces.insert(surface);
                }
                let mut facets = BTreeMap::new();
                facets.insert("source".to_string(), BTreeSet::from([r.source.clone()]));
                facets.insert("author".to_string(), r.authors.iter().cloned().collect());
                facets.insert("submitter".to_string(), r.submitters.iter().cloned().collect());
                facets.insert(
                    "incidentNumber".to_string(),
                    BTreeSet::from([r.incident_number.0.to_string()]),
                );
                for ns in namespaces {
                    let t = tags.get(&(r.incident_number, *ns)).cloned().unwrap_or_default();
                    facets.insert(ns.to_string(), t);
                }
                Doc {
                    id: r.id,
                    incident: r.incident_number,
                    stems,
                    surfaces,
                    facets,
                }
            })
            .collect();
        let keys = ["source", "author", "submitter", "incidentNumber"]
            .iter()
            .map(|s| s.to_string())
            .chain(namespaces.iter().map(|s| s.to_string()))
            .collect();
        SearchOracle {
            docs,
            keys,
            all_stems,
            all_surfaces,
        }
    }

    /// Hit set and facet counts for a query.
    pub fn run(&self, text: &str, filters: &BTreeMap<String, BTreeSet<String>>) -> (BTreeSet<ReportId>, Counts) {
        let analyzer = default_analyzer();
        let text = normalize(text);
        let tokens: Vec<_> = tokenize(&text).collect();
        let ends_mid_token = tokens.last().is_some_and(|t| t.offset.end == text.len());
        let (full, prefix) = if ends_mid_token {
            let (last, rest) = tokens.split_last().unwrap();
            (rest, Some(last.surface.to_lowercase()))
        } else {
            (&tokens[..], None)
        };
        let wanted: Vec<String> = full.iter().filter_map(|t| analyzer.term_for(t.surface)).collect();
        let expansion: Option<BTreeSet<&String>> = prefix.as_ref().map(|p| {
            self.all_stems
                .iter()
                .filter(|s| s.starts_with(p.as_str()))
                .chain(
                    self.all_surfaces
                        .iter()
                        .filter(|(w, _)| w.starts_with(p.as_str()))
                        .map(|(_, s)| s),
                )
                .collect()
        });

        let active: Vec<(&String, &BTreeSet<String>)> = filters
            .iter()
            .filter(|(k, v)| self.keys.contains(k) && !v.is_empty())
            .collect();
        let hits: Vec<&Doc> = self
            .docs
            .iter()
            .filter(|d| wanted.iter().all(|s| d.stems.contains(s)))
            .filter(|d| {
                expansion
                    .as_ref()
                    .map_or(true, |e| d.stems.iter().any(|s| e.contains(s)))
            })
            .filter(|d| {
                active
                    .iter()
                    .all(|(k, values)| d.facets[*k].iter().any(|v| values.contains(v)))
            })
            .collect();

        let mut counts = Counts::new();
        for key in &self.keys {
            let per = counts.entry(key.clone()).or_default();
            for d in &hits {
                for v in &d.facets[key] {
                    *per.entry(v.clone()).or_default() += 1;
                }
            }
        }
        (hits.iter().map(|d| d.id).collect(), counts)
    }

    pub fn doc(&self, id: ReportId) -> &Doc {
        self.docs.iter().find(|d| d.id == id).unwrap()
    }

    pub fn surfaces_of(&self, id: ReportId) -> &BTreeSet<String> {
        &self.doc(id).surfaces
    }
}

/// Stem occurrence counts over titles and bodies, ranked and truncated.
pub fn word_counts(reports: &[&Report], top_n: usize) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in reports {
        for (_, stem) in terms(&r.title).into_iter().chain(terms(&r.text)) {
            *counts.entry(stem).or_default() += 1;
        }
    }
    let mut ranked: Vec<_> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    ranked
}

/// Reports per name; a name repeated on one report counts once.
pub fn tally<'a>(reports: &[&'a Report], field: impl Fn(&'a Report) -> &'a [String]) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in reports {
        let names: BTreeSet<&String> = field(r).iter().collect();
        for n in names {
            *counts.entry(n.clone()).or_default() += 1;
        }
    }
    let mut ranked: Vec<_> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Incidents per tag for one namespace, tags in the given order.
pub fn namespace_summary(
    tags: &[String],
    namespace: &str,
    classifications: &[ClassificationRecord],
) -> Vec<(String, Vec<IncidentNumber>)> {
    tags.iter()
        .map(|tag| {
            let mut incidents: Vec<IncidentNumber> = classifications
                .iter()
                .filter(|c| c.namespace == namespace && &c.tag == tag)
                .map(|c| c.incident_number)
                .collect();
            incidents.sort();
            incidents.dedup();
            (tag.clone(), incidents)
        })
        .collect()
}

fn stem_counts(title: &str, text: &str) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    for (_, stem) in terms(&normalize(title)).into_iter().chain(terms(&normalize(text))) {
        *counts.entry(stem).or_insert(0.0) += 1.0;
    }
    counts
}

/// Cosine similarity of a draft to every incident, best report per
/// incident, sorted best first.
pub fn cosine_ranking(reports: &[&Report], draft: &ReportDraft) -> Vec<(IncidentNumber, f64)> {
    let vectors: Vec<(IncidentNumber, BTreeMap<String, f64>)> = reports
        .iter()
        .map(|r| (r.incident_number, stem_counts(&r.title, &r.text)))
        .collect();
    let n = vectors.len() as f64;
    let mut df: BTreeMap<&str, f64> = BTreeMap::new();
    for (_, v) in &vectors {
        for stem in v.keys() {
            *df.entry(stem).or_insert(0.0) += 1.0;
        }
    }
    let idf = |stem: &str| ((1.0 + n) / (1.0 + df.get(stem).copied().unwrap_or(0.0))).ln() + 1.0;
    let weigh = |v: &BTreeMap<String, f64>| -> BTreeMap<String, f64> {
        v.iter().map(|(s, tf)| (s.clone(), tf * idf(s))).collect()
    };
    let norm = |v: &BTreeMap<String, f64>| v.values().map(|w| w * w).sum::<f64>().sqrt();

    let q = weigh(&stem_counts(&draft.title, &draft.text));
    let qn = norm(&q);
    let mut best: BTreeMap<IncidentNumber, f64> = BTreeMap::new();
    for (incident, v) in &vectors {
        let d = weigh(v);
        let dot: f64 = q.iter().map(|(s, w)| w * d.get(s).copied().unwrap_or(0.0)).sum();
        let cos = dot / (qn * norm(&d));
        let e = best.entry(*incident).or_insert(0.0);
        *e = e.max(cos);
    }
    let mut ranked: Vec<_> = best.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// BM25 scores of every report containing all `stems`, title tf doubled.
pub fn bm25(reports: &[&Report], stems: &[&str]) -> BTreeMap<ReportId, f64> {
    let (k1, b) = (1.2, 0.75);
    let docs: Vec<(ReportId, BTreeMap<String, f64>, f64)> = reports
        .iter()
        .map(|r| {
            let mut tf: BTreeMap<String, f64> = BTreeMap::new();
            for (_, s) in terms(&r.title) {
                *tf.entry(s).or_default() += 2.0;
            }
            for (_, s) in terms(&r.text) {
                *tf.entry(s).or_default() += 1.0;
            }
            let len = tf.values().sum();
            (r.id, tf, len)
        })
        .collect();
    let n = docs.len() as f64;
    let avg = docs.iter().map(|d| d.2).sum::<f64>() / n;
    let mut out = BTreeMap::new();
    for (id, tf, len) in &docs {
        if !stems.iter().all(|s| tf.contains_key(*s)) {
            continue;
        }
        let score = stems
            .iter()
            .map(|s| {
                let df = docs.iter().filter(|d| d.1.contains_key(*s)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let f = tf[*s];
                idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * len / avg))
            })
            .sum();
        out.insert(*id, score);
    }
    out
}
