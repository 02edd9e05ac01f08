//! Information gain of each feature with respect to the label.

use std::collections::BTreeMap;

use crate::features::FeatureVector;

use super::LabeledDataset;

pub const BINS: usize = 10;

fn entropy(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// Equal-frequency bin of every value. Equal values share a bin.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..bins).filter_map(|i| sorted.get(i * n / bins).copied()).collect();
    cuts.dedup();
    values.iter().map(|v| cuts.partition_point(|c| c <= v)).collect()
}

fn gain(categories: &[String], labels: &[bool]) -> f64 {
    let pos = labels.iter().filter(|&&l| l).count();
    let base = entropy([pos, labels.len() - pos]);
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (c, &l) in categories.iter().zip(labels) {
        let e = groups.entry(c).or_default();
        if l {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let n = labels.len() as f64;
    let cond: f64 = groups
        .values()
        .map(|&(p, q)| (p + q) as f64 / n * entropy([p, q]))
        .sum();
    (base - cond).max(0.0)
}

fn binned(values: &[f64]) -> Vec<String> {
    equal_frequency_bins(values, BINS).into_iter().map(|b| b.to_string()).collect()
}

/// Each original feature column as categories: nominal and ordinal values
/// as they are, numeric values binned. Undefined f9 is its own category.
fn columns(rows: &[FeatureVector]) -> Vec<(&'static str, Vec<String>)> {
    let num = |f: fn(&FeatureVector) -> f64| binned(&rows.iter().map(f).collect::<Vec<_>>());
    let cat = |f: fn(&FeatureVector) -> String| rows.iter().map(f).collect::<Vec<_>>();

    let defined: Vec<f64> = rows.iter().filter_map(|r| r.f9).collect();
    let mut f9_bins = binned(&defined).into_iter();
    let f9 = rows
        .iter()
        .map(|r| match r.f9 {
            Some(_) => f9_bins.next().expect("one bin per defined value"),
            None => "?".to_string(),
        })
        .collect();

    vec![
        ("f1", cat(|r| r.f1.as_str().to_string())),
        ("f2", cat(|r| r.f2.as_str().to_string())),
        ("f3", cat(|r| r.f3.to_string())),
        ("f4", num(|r| r.f4 as f64)),
        ("f5", num(|r| r.f5 as f64)),
        ("f6", num(|r| r.f6)),
        ("f7", num(|r| r.f7)),
        ("f8", num(|r| r.f8 as f64)),
        ("f9", f9),
        ("f10", cat(|r| r.f10.to_string())),
        ("f11", cat(|r| r.f11.to_string())),
        ("f12", num(|r| r.f12)),
        ("f13", num(|r| r.f13)),
    ]
}

/// Features by information gain (bits), highest first; ties keep column
/// order.
pub fn info_gain_ranking(dataset: &LabeledDataset) -> Vec<(String, f64)> {
    let labels = dataset.labels();
    let mut ranked: Vec<(String, f64)> = columns(&dataset.matrix.rows)
        .into_iter()
        .map(|(name, cats)| (name.to_string(), gain(&cats, &labels)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    ranked
}
