//! Highlighted fragments around query matches.
//!
//! Fragment text is HTML-escaped; the only markup is `<mark>`/`</mark>`
//! around each matched token.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::analysis::{tokenize, Analyzer};

pub const MAX_FRAGMENTS: usize = 3;
/// Tokens of context kept on each side of a match cluster.
pub const CONTEXT_TOKENS: usize = 10;
/// Matches closer than this (in tokens) share a cluster.
const CLUSTER_GAP: usize = CONTEXT_TOKENS;
const MAX_CLUSTER_SPAN: usize = 2 * CONTEXT_TOKENS;

pub const MARK_OPEN: &str = "<mark>";
pub const MARK_CLOSE: &str = "</mark>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Title,
    Body,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub field: Field,
    pub text: String,
}

struct Cluster {
    first: usize,
    last: usize,
    matches: usize,
}

/// Builds up to [`MAX_FRAGMENTS`] fragments: the title first when it matches,
/// then the densest body clusters, in text order.
pub fn fragments(
    analyzer: &Analyzer,
    title: &str,
    body: &str,
    matched: &BTreeSet<String>,
) -> Vec<Fragment> {
    if matched.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let title_tokens: Vec<_> = tokenize(title).collect();
    let title_hits: Vec<bool> = title_tokens
        .iter()
        .map(|t| is_match(analyzer, t.surface, matched))
        .collect();
    if title_hits.iter().any(|&m| m) {
        out.push(Fragment {
            field: Field::Title,
            text: render(title, &title_tokens, &title_hits, 0, title_tokens.len() - 1),
        });
    }

    let body_tokens: Vec<_> = tokenize(body).collect();
    let body_hits: Vec<bool> = body_tokens
        .iter()
        .map(|t| is_match(analyzer, t.surface, matched))
        .collect();
    let mut clusters = clusters(&body_hits);
    clusters.sort_by(|a, b| b.matches.cmp(&a.matches).then(a.first.cmp(&b.first)));
    clusters.truncate(MAX_FRAGMENTS - out.len());
    clusters.sort_by_key(|c| c.first);
    for cluster in clusters {
        let from = cluster.first.saturating_sub(CONTEXT_TOKENS);
        let to = (cluster.last + CONTEXT_TOKENS).min(body_tokens.len() - 1);
        out.push(Fragment {
            field: Field::Body,
            text: render(body, &body_tokens, &body_hits, from, to),
        });
    }
    out
}

fn is_match(analyzer: &Analyzer, surface: &str, matched: &BTreeSet<String>) -> bool {
    analyzer
        .term_for(surface)
        .is_some_and(|stem| matched.contains(&stem))
}

fn clusters(hits: &[bool]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, _) in hits.iter().enumerate().filter(|(_, &m)| m) {
        match out.last_mut() {
            Some(c) if i - c.last <= CLUSTER_GAP && i - c.first <= MAX_CLUSTER_SPAN => {
                c.last = i;
                c.matches += 1;
            }
            _ => out.push(Cluster {
                first: i,
                last: i,
                matches: 1,
            }),
        }
    }
    out
}

fn render(
    text: &str,
    tokens: &[crate::analysis::Token<'_>],
    hits: &[bool],
    from: usize,
    to: usize,
) -> String {
    let mut out = String::new();
    let mut cursor = tokens[from].offset.start;
    for (token, &hit) in tokens[from..=to].iter().zip(&hits[from..=to]) {
        escape_into(&mut out, &text[cursor..token.offset.start]);
        if hit {
            out.push_str(MARK_OPEN);
            escape_into(&mut out, token.surface);
            out.push_str(MARK_CLOSE);
        } else {
            escape_into(&mut out, token.surface);
        }
        cursor = token.offset.end;
    }
    out
}

fn escape_into(out: &mut String, s: &str) {
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::default_analyzer;

    fn stems(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn single_cluster_is_highlighted() {
        let frags = fragments(
            default_analyzer(),
            "Report",
            "The facial recognition system failed.",
            &stems(&["facial", "recognit"]),
        );
        assert_eq!(frags.len(), 1);
        assert_eq!(frags[0].field, Field::Body);
        assert_eq!(
            frags[0].text,
            "The <mark>facial</mark> <mark>recognition</mark> system failed"
        );
    }

    #[test]
    fn title_only_match_is_flagged() {
        let frags = fragments(
            default_analyzer(),
            "Translation error leads to arrest",
            "A status update was misread.",
            &stems(&["translat"]),
        );
        assert_eq!(frags.len(), 1);
        assert_eq!(frags[0].field, Field::Title);
        assert!(frags[0].text.starts_with("<mark>Translation</mark>"));
    }

    #[test]
    fn dispersed_matches_are_capped() {
        let filler = " lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor incididunt ut labore magna aliqua";
        let body: String = (0..5).map(|_| format!("robot{filler}")).collect::<Vec<_>>().join(" ");
        let frags = fragments(default_analyzer(), "t", &body, &stems(&["robot"]));
        assert_eq!(frags.len(), MAX_FRAGMENTS);
        for f in &frags {
            assert_eq!(f.text.matches(MARK_OPEN).count(), f.text.matches(MARK_CLOSE).count());
            assert!(f.text.split_whitespace().count() <= 2 * CONTEXT_TOKENS + 1);
        }
    }

    #[test]
    fn markup_in_source_is_escaped() {
        let frags = fragments(default_analyzer(), "", "a <b>robot</b> & co", &stems(&["robot"]));
        assert_eq!(frags[0].text, "a &lt;b&gt;<mark>robot</mark>&lt;/b&gt; &amp; co");
    }

    #[test]
    fn no_terms_no_fragments() {
        assert!(fragments(default_analyzer(), "x", "y", &BTreeSet::new()).is_empty());
    }
}
