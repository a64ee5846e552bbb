//! TF-IDF cosine similarity between motion descriptions.

use std::collections::{BTreeMap, HashMap};

/// Lowercase alphanumeric word tokens.
pub fn word_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Document frequencies over a description corpus. Built once, shared read-only.
#[derive(Debug, Clone)]
pub struct SimilarityIndex {
    docs: usize,
    df: HashMap<String, usize>,
}

impl SimilarityIndex {
    pub fn new<S: AsRef<str>>(corpus: &[S]) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in corpus {
            let mut words = word_tokens(doc.as_ref());
            words.sort();
            words.dedup();
            for w in words {
                *df.entry(w).or_insert(0) += 1;
            }
        }
        SimilarityIndex {
            docs: corpus.len(),
            df,
        }
    }

    /// Smoothed inverse document frequency, `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, word: &str) -> f64 {
        let df = self.df.get(word).copied().unwrap_or(0) as f64;
        ((1.0 + self.docs as f64) / (1.0 + df)).ln() + 1.0
    }

    fn vector(&self, text: &str) -> BTreeMap<String, f64> {
        let mut tf: BTreeMap<String, f64> = BTreeMap::new();
        for w in word_tokens(text) {
            *tf.entry(w).or_insert(0.0) += 1.0;
        }
        for (w, v) in tf.iter_mut() {
            *v *= self.idf(w);
        }
        tf
    }

    /// Cosine of the two TF-IDF vectors, in `[0, 1]`.
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        let (va, vb) = (self.vector(a), self.vector(b));
        let dot: f64 = va
            .iter()
            .filter_map(|(w, x)| vb.get(w).map(|y| x * y))
            .sum();
        let na = va.values().map(|x| x * x).sum::<f64>().sqrt();
        let nb = vb.values().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        if va == vb {
            return 1.0;
        }
        (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

/// Similarity of two descriptions with IDF taken over the pair itself.
pub fn description_similarity(a: &str, b: &str) -> f64 {
    SimilarityIndex::new(&[a, b]).similarity(a, b)
}
