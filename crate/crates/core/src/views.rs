//! Pre-rendered views: word counts, leaderboards and per-namespace
//! summaries, written once per build and then served as plain files.
//!
//! Layout under the data directory:
//!
//! ```text
//! views -> view-builds/<sequence>-<nonce>   (symlink, swapped atomically)
//! view-builds/<sequence>-<nonce>/manifest.json
//! view-builds/<sequence>-<nonce>/wordcounts.json
//! view-builds/<sequence>-<nonce>/leaderboards.json
//! view-builds/<sequence>-<nonce>/summary-<namespace>.json
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::db::{Database, State};
use crate::error::{Error, Result};
use crate::model::IncidentNumber;

pub const DEFAULT_TOP_N: usize = 100;
pub const VIEWS_LINK: &str = "views";
pub const BUILDS_DIR: &str = "view-builds";
pub const MANIFEST: &str = "manifest";
pub const WORDCOUNTS: &str = "wordcounts";
pub const LEADERBOARDS: &str = "leaderboards";
const STAGING_PREFIX: &str = ".staging-";

static BUILD_LOCK: Mutex<()> = Mutex::new(());

/// One rendered view. `corpus_sequence` is the sequence of the last log
/// event that changed this view's input, so a view is rewritten byte for
/// byte identically until something it depends on changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StaticView<P> {
    pub name: String,
    pub corpus_sequence: u64,
    pub payload: P,
}

impl<P: Serialize> StaticView<P> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("views serialize");
        bytes.push(b'\n');
        bytes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCount {
    pub stem: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WordCounts {
    pub top_n: usize,
    pub words: Vec<WordCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameCount {
    pub name: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaderboards {
    pub submitters: Vec<NameCount>,
    pub authors: Vec<NameCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSummary {
    pub tag: String,
    pub count: u64,
    pub incidents: Vec<IncidentNumber>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamespaceSummary {
    pub namespace: String,
    pub tags: Vec<TagSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub corpus_sequence: u64,
    /// View name to file name within the build directory.
    pub views: BTreeMap<String, String>,
}

fn rank(counts: BTreeMap<String, u64>) -> Vec<(String, u64)> {
    let mut ranked: Vec<_> = counts.into_iter().collect();
    // BTreeMap order already sorts names ascending; the sort is stable.
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked
}

fn name_counts(counts: BTreeMap<String, u64>) -> Vec<NameCount> {
    rank(counts)
        .into_iter()
        .map(|(name, count)| NameCount { name, count })
        .collect()
}

/// Accumulates word counts and leaderboards in a single pass over reports.
#[derive(Debug, Default)]
struct Tally {
    stems: BTreeMap<String, u64>,
    submitters: BTreeMap<String, u64>,
    authors: BTreeMap<String, u64>,
}

impl Tally {
    fn of(state: &State) -> Tally {
        let analyzer = state.index.analyzer();
        let mut tally = Tally::default();
        for report in state.registry.reports() {
            for field in [&report.title, &report.text] {
                for term in analyzer.analyze(field) {
                    *tally.stems.entry(term.stem).or_default() += 1;
                }
            }
            let submitters: BTreeSet<&String> = report.submitters.iter().collect();
            for s in submitters {
                *tally.submitters.entry(s.clone()).or_default() += 1;
            }
            let authors: BTreeSet<&String> = report.authors.iter().collect();
            for a in authors {
                *tally.authors.entry(a.clone()).or_default() += 1;
            }
        }
        tally
    }

    fn wordcounts(&self, top_n: usize) -> WordCounts {
        let words = rank(self.stems.clone())
            .into_iter()
            .take(top_n)
            .map(|(stem, count)| WordCount { stem, count })
            .collect();
        WordCounts { top_n, words }
    }

    fn leaderboards(&self) -> Leaderboards {
        Leaderboards {
            submitters: name_counts(self.submitters.clone()),
            authors: name_counts(self.authors.clone()),
        }
    }
}

/// Most frequent stems over all report titles and bodies, count descending
/// then stem ascending.
pub fn build_wordcounts(state: &State, top_n: usize) -> StaticView<WordCounts> {
    StaticView {
        name: WORDCOUNTS.into(),
        corpus_sequence: state.view_sequences.reports,
        payload: Tally::of(state).wordcounts(top_n),
    }
}

/// Submitters and authors ranked by the number of reports crediting them.
/// A name listed twice on one report counts once.
pub fn build_leaderboards(state: &State) -> StaticView<Leaderboards> {
    StaticView {
        name: LEADERBOARDS.into(),
        corpus_sequence: state.view_sequences.reports,
        payload: Tally::of(state).leaderboards(),
    }
}

pub fn summary_view_name(namespace: &str) -> String {
    format!("summary-{namespace}")
}

pub fn build_namespace_summary(state: &State, namespace: &str) -> Result<StaticView<NamespaceSummary>> {
    let tags = state
        .taxonomy
        .incidents_by_tag(namespace)?
        .into_iter()
        .map(|(tag, incidents)| TagSummary {
            tag,
            count: incidents.len() as u64,
            incidents,
        })
        .collect();
    Ok(StaticView {
        name: summary_view_name(namespace),
        corpus_sequence: state
            .view_sequences
            .namespaces
            .get(namespace)
            .copied()
            .unwrap_or_default(),
        payload: NamespaceSummary {
            namespace: namespace.to_string(),
            tags,
        },
    })
}

/// File name for a view. Bytes outside `[A-Za-z0-9._-]` are percent-encoded
/// so any namespace name maps to a single safe path component.
pub fn view_file_name(view: &str) -> String {
    let mut out = String::with_capacity(view.len() + 5);
    for b in view.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' => out.push(b as char),
            b'.' if !out.is_empty() => out.push('.'),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out.push_str(".json");
    out
}

/// All artifacts for one build, as (file name, bytes), manifest last.
pub fn render_all(state: &State, top_n: usize) -> Result<Vec<(String, Vec<u8>)>> {
    let tally = Tally::of(state);
    let seq = state.view_sequences.reports;
    let mut files = vec![
        (
            WORDCOUNTS.to_string(),
            StaticView {
                name: WORDCOUNTS.into(),
                corpus_sequence: seq,
                payload: tally.wordcounts(top_n),
            }
            .to_bytes(),
        ),
        (
            LEADERBOARDS.to_string(),
            StaticView {
                name: LEADERBOARDS.into(),
                corpus_sequence: seq,
                payload: tally.leaderboards(),
            }
            .to_bytes(),
        ),
    ];
    for ns in state.taxonomy.namespaces() {
        let view = build_namespace_summary(state, &ns.name)?;
        files.push((view.name.clone(), view.to_bytes()));
    }
    let manifest = Manifest {
        corpus_sequence: state.sequence,
        views: files
            .iter()
            .map(|(name, _)| (name.clone(), view_file_name(name)))
            .collect(),
    };
    let mut out: Vec<(String, Vec<u8>)> = files
        .into_iter()
        .map(|(name, bytes)| (view_file_name(&name), bytes))
        .collect();
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');
    out.push((view_file_name(MANIFEST), manifest_bytes));
    Ok(out)
}

/// A build directory being filled. Nothing is visible to readers until
/// [`StagedBuild::commit`]; dropping an uncommitted build removes it.
#[derive(Debug)]
pub struct StagedBuild {
    data_dir: PathBuf,
    dir: PathBuf,
    final_name: String,
    committed: bool,
}

fn sync_dir(path: &Path) -> Result<()> {
    fs::File::open(path)?.sync_all()?;
    Ok(())
}

impl StagedBuild {
    pub fn begin(data_dir: &Path, sequence: u64) -> Result<StagedBuild> {
        let builds = data_dir.join(BUILDS_DIR);
        fs::create_dir_all(&builds)?;
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or_default();
        let final_name = format!("{sequence:012}-{:x}{:x}", std::process::id(), nanos);
        let dir = builds.join(format!("{STAGING_PREFIX}{final_name}"));
        fs::create_dir(&dir)?;
        Ok(StagedBuild {
            data_dir: data_dir.to_path_buf(),
            dir,
            final_name,
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, file: &str, bytes: &[u8]) -> Result<()> {
        let mut f = fs::File::create(self.dir.join(file))?;
        f.write_all(bytes)?;
        f.sync_all()?;
        Ok(())
    }

    /// Publishes the build: rename out of staging, then swap the `views`
    /// symlink in one rename. Older builds are removed afterwards.
    pub fn commit(mut self) -> Result<PathBuf> {
        let builds = self.data_dir.join(BUILDS_DIR);
        let target = builds.join(&self.final_name);
        sync_dir(&self.dir)?;
        fs::rename(&self.dir, &target)?;
        self.committed = true;
        sync_dir(&builds)?;

        let link = self.data_dir.join(VIEWS_LINK);
        if link.exists() && !fs::symlink_metadata(&link)?.file_type().is_symlink() {
            return Err(Error::Storage(format!(
                "{} exists and is not a symlink",
                link.display()
            )));
        }
        let tmp_link = self.data_dir.join(format!(".{VIEWS_LINK}.tmp-{}", self.final_name));
        let relative = Path::new(BUILDS_DIR).join(&self.final_name);
        symlink(&relative, &tmp_link)?;
        fs::rename(&tmp_link, &link)?;
        sync_dir(&self.data_dir)?;

        for entry in fs::read_dir(&builds)? {
            let entry = entry?;
            let name = entry.file_name();
            let name = name.to_string_lossy();
            if name != self.final_name && !name.starts_with(STAGING_PREFIX) {
                let _ = fs::remove_dir_all(entry.path());
            }
        }
        Ok(target)
    }
}

impl Drop for StagedBuild {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

#[cfg(unix)]
fn symlink(target: &Path, link: &Path) -> Result<()> {
    std::os::unix::fs::symlink(target, link)?;
    Ok(())
}

#[cfg(windows)]
fn symlink(target: &Path, link: &Path) -> Result<()> {
    std::os::windows::fs::symlink_dir(target, link)?;
    Ok(())
}

/// Removes staging directories left behind by builds that never finished.
fn sweep_staging(data_dir: &Path) {
    let Ok(entries) = fs::read_dir(data_dir.join(BUILDS_DIR)) else {
        return;
    };
    for entry in entries.flatten() {
        if entry.file_name().to_string_lossy().starts_with(STAGING_PREFIX) {
            let _ = fs::remove_dir_all(entry.path());
        }
    }
}

/// Renders every view from one consistent snapshot and publishes them.
/// Returns the manifest of the new build.
pub fn build_all(db: &Database, data_dir: &Path, top_n: usize) -> Result<Manifest> {
    let _guard = BUILD_LOCK.lock();
    sweep_staging(data_dir);
    let (sequence, files) = {
        let state = db.read();
        (state.sequence, render_all(&state, top_n)?)
    };
    let mut staged = StagedBuild::begin(data_dir, sequence)?;
    for (file, bytes) in &files {
        staged.write(file, bytes)?;
    }
    staged.commit()?;
    let (_, manifest) = files.last().expect("manifest is always rendered");
    serde_json::from_slice(manifest).map_err(|e| Error::Storage(e.to_string()))
}

/// A served artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub bytes: Vec<u8>,
    /// Strong validator, quoted, derived from the manifest sequence.
    pub etag: String,
}

/// Serves published views from disk. Holds no reference to the database.
#[derive(Debug, Clone)]
pub struct ViewStore {
    data_dir: PathBuf,
}

impl ViewStore {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ViewStore {
            data_dir: data_dir.into(),
        }
    }

    /// Directory of the current build, if any build has been published.
    fn current(&self) -> Option<PathBuf> {
        fs::canonicalize(self.data_dir.join(VIEWS_LINK)).ok()
    }

    pub fn manifest(&self) -> Result<Manifest> {
        let dir = self.current().ok_or_else(|| Error::UnknownView(MANIFEST.into()))?;
        read_manifest(&dir)
    }

    pub fn get(&self, name: &str) -> Result<Artifact> {
        let dir = self.current().ok_or_else(|| Error::UnknownView(name.into()))?;
        let manifest = read_manifest(&dir)?;
        let etag = format!("\"views-{}\"", manifest.corpus_sequence);
        let file = if name == MANIFEST {
            view_file_name(MANIFEST)
        } else {
            manifest
                .views
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnknownView(name.into()))?
        };
        let bytes = fs::read(dir.join(file))?;
        Ok(Artifact { bytes, etag })
    }
}

fn read_manifest(dir: &Path) -> Result<Manifest> {
    let bytes = fs::read(dir.join(view_file_name(MANIFEST)))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Storage(format!("bad manifest: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ReportDraft, TagDefinition, TaxonomyNamespace};
    use chrono::NaiveDate;

    fn draft(n: u32, title: &str, text: &str, authors: &[&str], submitters: &[&str]) -> ReportDraft {
        ReportDraft {
            title: title.into(),
            text: text.into(),
            url: format!("https://example.com/{n}"),
            source: "Wire".into(),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            submitters: submitters.iter().map(|s| s.to_string()).collect(),
            date_published: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            date_submitted: None,
            incident_date: None,
        }
    }

    fn db() -> Database {
        Database::in_memory().with_clock(|| NaiveDate::from_ymd_opt(2021, 1, 1).unwrap())
    }

    #[test]
    fn wordcounts_rank_by_count_then_stem() {
        let db = db();
        db.create_incident(draft(1, "", "the robot failed", &[], &[]), "s").unwrap();
        db.create_incident(draft(2, "", "robot crashed", &[], &[]), "s").unwrap();
        let view = build_wordcounts(&db.read(), DEFAULT_TOP_N);
        let words: Vec<_> = view.payload.words.iter().map(|w| (w.stem.as_str(), w.count)).collect();
        assert_eq!(words, vec![("robot", 2), ("crash", 1), ("fail", 1)]);
        assert_eq!(build_wordcounts(&db.read(), 1).payload.words.len(), 1);
        assert!(build_wordcounts(&State::default(), 10).payload.words.is_empty());
    }

    #[test]
    fn leaderboards_credit_every_name() {
        let db = db();
        for i in 1..=3 {
            db.create_incident(draft(i, "t", "x", &["Ann", "Bo"], &["A"]), "s").unwrap();
        }
        db.create_incident(draft(4, "t", "x", &["Bo", "Bo"], &["B"]), "s").unwrap();
        let view = build_leaderboards(&db.read()).payload;
        let subs: Vec<_> = view.submitters.iter().map(|n| (n.name.as_str(), n.count)).collect();
        assert_eq!(subs, vec![("A", 3), ("B", 1)]);
        let authors: Vec<_> = view.authors.iter().map(|n| (n.name.as_str(), n.count)).collect();
        assert_eq!(authors, vec![("Bo", 4), ("Ann", 3)]);
    }

    #[test]
    fn namespace_summary_in_tag_order() {
        let db = db();
        db.create_incident(draft(1, "t", "x", &[], &[]), "s").unwrap();
        db.create_incident(draft(2, "t", "x", &[], &[]), "s").unwrap();
        for name in ["Fairness", "Other"] {
            db.register_namespace(TaxonomyNamespace {
                name: name.into(),
                owner: "o".into(),
                description: String::new(),
                tags: ["Privacy", "Bias"]
                    .iter()
                    .map(|t| TagDefinition { name: t.to_string(), description: String::new() })
                    .collect(),
            })
            .unwrap();
        }
        let empty = build_namespace_summary(&db.read(), "Fairness").unwrap().payload;
        assert!(empty.tags.iter().all(|t| t.count == 0));
        db.classify(IncidentNumber(2), "Fairness", "Bias", "c").unwrap();
        db.classify(IncidentNumber(1), "Fairness", "Bias", "c").unwrap();
        db.classify(IncidentNumber(1), "Other", "Privacy", "c").unwrap();
        let summary = build_namespace_summary(&db.read(), "Fairness").unwrap().payload;
        assert_eq!(summary.tags[0], TagSummary { tag: "Privacy".into(), count: 0, incidents: vec![] });
        assert_eq!(
            summary.tags[1],
            TagSummary { tag: "Bias".into(), count: 2, incidents: vec![IncidentNumber(1), IncidentNumber(2)] }
        );
        assert!(matches!(
            build_namespace_summary(&db.read(), "Nope"),
            Err(Error::UnknownNamespace(_))
        ));
    }

    #[test]
    fn file_names_are_single_components() {
        assert_eq!(view_file_name("wordcounts"), "wordcounts.json");
        assert_eq!(view_file_name("summary-a/b"), "summary-a%2Fb.json");
        assert_eq!(view_file_name(".."), "%2E..json");
        assert_eq!(view_file_name("summary-Café"), "summary-Caf%C3%A9.json");
    }

    #[test]
    fn build_publish_and_serve() {
        let dir = tempfile::tempdir().unwrap();
        let db = db();
        let store = ViewStore::new(dir.path());
        assert!(matches!(store.get(WORDCOUNTS), Err(Error::UnknownView(_))));
        db.create_incident(draft(1, "Robot", "robot", &[], &[]), "s").unwrap();
        let first = build_all(&db, dir.path(), 10).unwrap();
        let a = store.get(WORDCOUNTS).unwrap();
        assert_eq!(a.etag, format!("\"views-{}\"", first.corpus_sequence));
        build_all(&db, dir.path(), 10).unwrap();
        assert_eq!(store.get(WORDCOUNTS).unwrap(), a);
        assert_eq!(fs::read_dir(dir.path().join(BUILDS_DIR)).unwrap().count(), 1);
        assert!(matches!(store.get("nope"), Err(Error::UnknownView(_))));

        db.create_incident(draft(2, "Robot", "robot", &[], &[]), "s").unwrap();
        let second = build_all(&db, dir.path(), 10).unwrap();
        assert!(second.corpus_sequence > first.corpus_sequence);
        assert_ne!(store.get(WORDCOUNTS).unwrap().etag, a.etag);
    }

    #[test]
    fn abandoned_build_is_invisible() {
        let dir = tempfile::tempdir().unwrap();
        let db = db();
        db.create_incident(draft(1, "Robot", "robot", &[], &[]), "s").unwrap();
        build_all(&db, dir.path(), 10).unwrap();
        let store = ViewStore::new(dir.path());
        let before = store.get(WORDCOUNTS).unwrap();

        db.create_incident(draft(2, "Other", "words", &[], &[]), "s").unwrap();
        let mut staged = StagedBuild::begin(dir.path(), 99).unwrap();
        staged.write(&view_file_name(WORDCOUNTS), b"partial").unwrap();
        std::mem::forget(staged);
        assert_eq!(store.get(WORDCOUNTS).unwrap(), before);

        build_all(&db, dir.path(), 10).unwrap();
        assert_eq!(fs::read_dir(dir.path().join(BUILDS_DIR)).unwrap().count(), 1);
    }
}
