//! Okapi BM25 over a single weighted field: title occurrences count twice.

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;
pub const TITLE_WEIGHT: u32 = 2;

/// Non-negative idf variant `ln(1 + (N - df + 0.5) / (df + 0.5))`.
pub fn idf(doc_count: usize, doc_freq: usize) -> f64 {
    let n = doc_count as f64;
    let df = doc_freq as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

pub fn weighted(title: u32, body: u32) -> u32 {
    TITLE_WEIGHT * title + body
}

pub fn term_score(idf: f64, tf: u32, doc_len: u32, avg_doc_len: f64) -> f64 {
    if tf == 0 {
        return 0.0;
    }
    let tf = f64::from(tf);
    let norm = if avg_doc_len > 0.0 {
        1.0 - B + B * f64::from(doc_len) / avg_doc_len
    } else {
        1.0
    };
    idf * tf * (K1 + 1.0) / (tf + K1 * norm)
}
