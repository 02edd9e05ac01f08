use std::collections::{BTreeMap, BTreeSet};

/// Per-article TF-IDF vectors with smoothed idf, `ln((1 + n) / (1 + df)) + 1`,
/// and raw counts as tf. Each vector is scaled to unit Euclidean norm; an
/// article without terms keeps the zero vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TfIdfIndex {
    idf: BTreeMap<String, f64>,
    vectors: Vec<BTreeMap<String, f64>>,
    /// term -> (sum over articles, max over articles)
    totals: BTreeMap<String, (f64, f64)>,
}

impl TfIdfIndex {
    pub fn build<S: AsRef<str>>(articles: &[Vec<S>]) -> Self {
        let n = articles.len() as f64;
        let counts: Vec<BTreeMap<&str, usize>> = articles
            .iter()
            .map(|terms| {
                let mut m = BTreeMap::new();
                for t in terms {
                    *m.entry(t.as_ref()).or_insert(0) += 1;
                }
                m
            })
            .collect();

        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &counts {
            for &t in c.keys() {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let idf: BTreeMap<String, f64> = df
            .iter()
            .map(|(&t, &d)| (t.to_string(), ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
            .collect();

        let vectors: Vec<BTreeMap<String, f64>> = counts
            .iter()
            .map(|c| {
                let raw: Vec<(&str, f64)> = c
                    .iter()
                    .map(|(&t, &tf)| (t, tf as f64 * idf[t]))
                    .collect();
                let norm = raw.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
                raw.into_iter()
                    .map(|(t, v)| (t.to_string(), if norm > 0.0 { v / norm } else { 0.0 }))
                    .collect()
            })
            .collect();

        let mut totals: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for v in &vectors {
            for (t, &x) in v {
                let e = totals.entry(t.clone()).or_insert((0.0, 0.0));
                e.0 += x;
                e.1 = e.1.max(x);
            }
        }
        TfIdfIndex {
            idf,
            vectors,
            totals,
        }
    }

    pub fn article_count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.idf.keys().map(String::as_str).collect()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.idf.get(term).copied()
    }

    pub fn value(&self, article: usize, term: &str) -> f64 {
        self.vectors
            .get(article)
            .and_then(|v| v.get(term))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn norm(&self, article: usize) -> f64 {
        self.vectors[article]
            .values()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Mean and max of the term's value over all articles; absent counts as 0.
    /// `(0, 0)` for an empty index.
    pub fn mean_max(&self, term: &str) -> (f64, f64) {
        match self.totals.get(term) {
            Some(&(sum, max)) => (sum / self.vectors.len() as f64, max),
            None => (0.0, 0.0),
        }
    }

    /// Every term with its mean value, highest first, ties by term.
    pub fn ranked_by_mean(&self) -> Vec<(String, f64)> {
        let n = self.vectors.len() as f64;
        let mut out: Vec<(String, f64)> = self
            .totals
            .iter()
            .map(|(t, &(sum, _))| (t.clone(), sum / n))
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}
