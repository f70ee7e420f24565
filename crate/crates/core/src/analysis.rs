//! Analyzer chain shared by indexing, querying, resolution and static views.
//!
//! `tokenize` keeps surface forms and byte offsets so snippets can be cut
//! from the stored text; `analyze` lowercases, drops stopwords and applies
//! the Snowball English (Porter2) stemmer. Positions are token ordinals taken
//! before stopword removal, so gaps left by dropped words are preserved.

use std::collections::HashSet;
use std::ops::Range;
use std::path::Path;
use std::sync::{Arc, LazyLock};

use rust_stemmers::{Algorithm, Stemmer};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

static DEFAULT_ANALYZER: LazyLock<Arc<Analyzer>> = LazyLock::new(|| Arc::new(Analyzer::default()));

/// A contiguous run of letters and digits in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub surface: &'a str,
    pub position: u32,
    pub offset: Range<usize>,
}

/// An index term: the stemmed, lowercased form of a non-stopword token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub stem: String,
    pub position: u32,
    pub offset: Range<usize>,
}

/// Query analysis result. `prefix` holds the lowercased, unstemmed trailing
/// token when the user is still typing it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalyzedQuery {
    pub terms: Vec<Term>,
    pub prefix: Option<String>,
}

impl AnalyzedQuery {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.prefix.is_none()
    }
}

/// Pinned stopword list: one lowercase word per line.
#[derive(Debug, Clone)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }

    pub fn parse(source: &str) -> Self {
        let words = source
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(str::to_lowercase)
            .collect();
        Stopwords { words }
    }

    pub fn from_file(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::bundled()
    }
}

pub struct Analyzer {
    stopwords: Stopwords,
    stemmer: Stemmer,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::new(Stopwords::bundled())
    }
}

impl std::fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analyzer")
            .field("stopwords", &self.stopwords.len())
            .finish()
    }
}

impl Analyzer {
    pub fn new(stopwords: Stopwords) -> Self {
        Analyzer {
            stopwords,
            stemmer: Stemmer::create(Algorithm::English),
        }
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    /// Stems a single lowercase word.
    pub fn stem<'w>(&self, word: &'w str) -> std::borrow::Cow<'w, str> {
        self.stemmer.stem(word)
    }

    /// Lowercases and stems one token, or returns `None` when either the
    /// word or its stem is a stopword.
    pub fn term_for(&self, surface: &str) -> Option<String> {
        let lower = surface.to_lowercase();
        if self.stopwords.contains(&lower) {
            return None;
        }
        let stem = self.stemmer.stem(&lower).into_owned();
        if stem.is_empty() || self.stopwords.contains(&stem) {
            return None;
        }
        Some(stem)
    }

    pub fn analyze(&self, text: &str) -> Vec<Term> {
        tokenize(text)
            .filter_map(|token| {
                self.term_for(token.surface).map(|stem| Term {
                    stem,
                    position: token.position,
                    offset: token.offset,
                })
            })
            .collect()
    }

    pub fn analyze_query(&self, text: &str) -> AnalyzedQuery {
        let mut tokens: Vec<Token<'_>> = tokenize(text).collect();
        let prefix = match tokens.last() {
            Some(last) if last.offset.end == text.len() => {
                let last = tokens.pop().expect("non-empty");
                Some(last.surface.to_lowercase())
            }
            _ => None,
        };
        let terms = tokens
            .into_iter()
            .filter_map(|token| {
                self.term_for(token.surface).map(|stem| Term {
                    stem,
                    position: token.position,
                    offset: token.offset,
                })
            })
            .collect();
        AnalyzedQuery { terms, prefix }
    }
}

/// Canonical composition applied to all stored and queried text so byte
/// offsets are stable.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

fn is_token_char(ch: char) -> bool {
    ch.is_alphanumeric()
}

/// Splits text into letter/digit runs. Everything else separates, including
/// hyphens, slashes and apostrophes. Combining marks extend a run in progress.
pub fn tokenize(text: &str) -> impl Iterator<Item = Token<'_>> {
    Tokens {
        text,
        cursor: 0,
        position: 0,
    }
}

struct Tokens<'a> {
    text: &'a str,
    cursor: usize,
    position: u32,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let rest = &self.text[self.cursor..];
        let (skip, _) = rest.char_indices().find(|&(_, ch)| is_token_char(ch))?;
        let start = self.cursor + skip;
        let end = self.text[start..]
            .char_indices()
            .find(|&(_, ch)| !(is_token_char(ch) || is_combining_mark(ch)))
            .map_or(self.text.len(), |(i, _)| start + i);
        self.cursor = end;
        let token = Token {
            surface: &self.text[start..end],
            position: self.position,
            offset: start..end,
        };
        self.position += 1;
        Some(token)
    }
}

pub fn default_analyzer() -> &'static Analyzer {
    &DEFAULT_ANALYZER
}

/// Shared handle to the analyzer built from the bundled stopword list.
pub fn shared_analyzer() -> Arc<Analyzer> {
    Arc::clone(&DEFAULT_ANALYZER)
}

pub fn analyze(text: &str) -> Vec<Term> {
    DEFAULT_ANALYZER.analyze(text)
}

pub fn analyze_query(text: &str) -> AnalyzedQuery {
    DEFAULT_ANALYZER.analyze_query(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<(&str, u32)> {
        tokenize(text).map(|t| (t.surface, t.position)).collect()
    }

    fn stems(terms: &[Term]) -> Vec<(&str, u32)> {
        terms.iter().map(|t| (t.stem.as_str(), t.position)).collect()
    }

    #[test]
    fn splits_on_punctuation_and_whitespace() {
        assert_eq!(surfaces("Good morning!"), vec![("Good", 0), ("morning", 1)]);
        assert_eq!(surfaces("737 MAX 8"), vec![("737", 0), ("MAX", 1), ("8", 2)]);
        assert_eq!(
            surfaces("state-of-the-art"),
            vec![("state", 0), ("of", 1), ("the", 2), ("art", 3)]
        );
        assert_eq!(surfaces("and/or"), vec![("and", 0), ("or", 1)]);
    }

    #[test]
    fn empty_and_separator_only_text() {
        assert!(surfaces("").is_empty());
        assert!(surfaces("  -- / ..").is_empty());
    }

    #[test]
    fn offsets_slice_back_to_surface() {
        let text = "Café—résumé, naïve";
        for token in tokenize(text) {
            assert_eq!(&text[token.offset.clone()], token.surface);
        }
        assert_eq!(surfaces(text), vec![("Café", 0), ("résumé", 1), ("naïve", 2)]);
    }

    #[test]
    fn combining_marks_stay_inside_tokens() {
        let decomposed = "cafe\u{301} au lait";
        assert_eq!(surfaces(decomposed)[0].0, "cafe\u{301}");
        assert_eq!(normalize(decomposed), "café au lait");
    }

    #[test]
    fn analyze_drops_stopwords_and_keeps_positions() {
        assert_eq!(stems(&analyze("the robot failed")), vec![("robot", 1), ("fail", 2)]);
        assert_eq!(stems(&analyze("recommended")), vec![("recommend", 0)]);
        assert_eq!(stems(&analyze("policing")), vec![("polic", 0)]);
    }

    #[test]
    fn stems_that_collapse_to_stopwords_are_dropped() {
        // "downs" stems to the stopword "down".
        assert!(analyze("downs").is_empty());
    }

    #[test]
    fn query_trailing_token_is_prefix() {
        let q = analyze_query("facial recog");
        assert_eq!(stems(&q.terms), vec![("facial", 0)]);
        assert_eq!(q.prefix.as_deref(), Some("recog"));

        let q = analyze_query("facial recognition ");
        assert_eq!(stems(&q.terms), vec![("facial", 0), ("recognit", 1)]);
        assert_eq!(q.prefix, None);

        let q = analyze_query("t");
        assert!(q.terms.is_empty());
        assert_eq!(q.prefix.as_deref(), Some("t"));
    }

    #[test]
    fn stopword_prefix_is_retained() {
        let q = analyze_query("robot the");
        assert_eq!(q.prefix.as_deref(), Some("the"));
        let q = analyze_query("the robot ");
        assert_eq!(stems(&q.terms), vec![("robot", 1)]);
    }

    #[test]
    fn bundled_stopword_list_is_pinned() {
        let words = Stopwords::bundled();
        assert_eq!(words.len(), 174);
        assert!(words.contains("the"));
        assert!(!words.contains("robot"));
        assert!(words.iter().all(|w| w == w.to_lowercase()));
    }

    proptest! {
        #[test]
        fn analyze_invariants(text in "\\PC{0,80}") {
            let stopwords = Stopwords::bundled();
            let mut last_position = None;
            let mut last_end = 0;
            for token in tokenize(&text) {
                prop_assert!(!token.surface.is_empty());
                prop_assert!(last_position.map_or(true, |p| token.position > p));
                prop_assert!(token.offset.start >= last_end);
                last_position = Some(token.position);
                last_end = token.offset.end;
            }
            let first = analyze(&text);
            prop_assert_eq!(&first, &analyze(&text));
            for term in &first {
                prop_assert!(!term.stem.is_empty());
                prop_assert!(!stopwords.contains(&term.stem));
                prop_assert_eq!(term.stem.to_lowercase(), term.stem.clone());
                let lowered = text[term.offset.clone()].to_lowercase();
                prop_assert_eq!(default_analyzer().stem(&lowered).into_owned(), term.stem.clone());
            }
        }
    }
}
