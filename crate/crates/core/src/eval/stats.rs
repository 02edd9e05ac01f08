//! Two-sided Wilcoxon rank-sum test and the Vargha-Delaney A12 effect size.

use statrs::distribution::{ContinuousCDF, Normal};

/// Largest pooled size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 12;

/// Midranks (1-based) of `values`, ties sharing the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided p-value for the rank sum of `a` against `b`.
///
/// Exact when the pooled size is at most [`EXACT_LIMIT`] (ties handled by
/// permuting the midranks), otherwise the normal approximation with tie and
/// continuity corrections.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    if pooled.len() <= EXACT_LIMIT {
        exact_p(&ranks, a.len(), w)
    } else {
        normal_p(&ranks, a.len(), b.len(), w)
    }
}

/// Counts subsets of size `n` by their sum of doubled midranks (integers).
fn exact_p(ranks: &[f64], n: usize, w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[j][s]: subsets of size j with doubled sum s
    let mut counts = vec![vec![0u64; max_sum + 1]; n + 1];
    counts[0][0] = 1;
    for &r in &doubled {
        for j in (1..=n).rev() {
            for s in (r..=max_sum).rev() {
                counts[j][s] += counts[j - 1][s - r];
            }
        }
    }
    let target = (w * 2.0).round() as usize;
    let total: u64 = counts[n].iter().sum();
    let le: u64 = counts[n][..=target].iter().sum();
    let ge: u64 = counts[n][target..].iter().sum();
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

fn normal_p(ranks: &[f64], n: usize, m: usize, w: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let big_n = nf + mf;
    let mean = nf * (big_n + 1.0) / 2.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let var = nf * mf / 12.0 * ((big_n + 1.0) - ties / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

/// Probability that a value drawn from `a` exceeds one from `b`, ties
/// counting half.
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let mut score = 0.0;
    for x in a {
        for y in b {
            if x > y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    score / (a.len() * b.len()) as f64
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every way of choosing which pooled positions belong to `a`.
    pub(crate) fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let ranks = midranks(&pooled);
        let w: f64 = ranks[..a.len()].iter().sum();
        let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << pooled.len()) {
            if mask.count_ones() as usize != a.len() {
                continue;
            }
            let s: f64 = (0..pooled.len()).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            total += 1;
            if s <= w + 1e-9 {
                le += 1;
            }
            if s >= w - 1e-9 {
                ge += 1;
            }
        }
        (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
    }

    #[test]
    fn midranks_with_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 30.0]), [1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn fully_separated_three_by_three() {
        // rank sum 6 is the single most extreme of 20 arrangements
        let p = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]);
        assert!((p - 0.1).abs() < 1e-15);
        assert_eq!(p, enumerate_p(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]));
    }

    #[test]
    fn identical_samples() {
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(wilcoxon_rank_sum(&[5.0; 4], &[5.0; 4]), 1.0);
        assert_eq!(wilcoxon_rank_sum(&[5.0; 10], &[5.0; 10]), 1.0);
        assert_eq!(vargha_delaney_a12(&[1.0, 2.0, 2.0], &[1.0, 2.0, 2.0]), 0.5);
    }

    #[test]
    fn hand_a12() {
        let a = [2.0, 3.0, 4.0];
        let b = [1.0, 2.0, 3.0];
        // pairs: 2>1, 2=2 | 3>1, 3>2, 3=3 | 4>1, 4>2, 4>3 -> 6 wins and 2 ties of 9 pairs
        assert_eq!(vargha_delaney_a12(&a, &b), 7.0 / 9.0);
        assert_eq!(vargha_delaney_a12(&[9.0, 8.0], &[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(vargha_delaney_a12(&[1.0], &[9.0]), 0.0);
    }

    #[test]
    fn large_sample_approximation() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let b: Vec<f64> = (10..30).map(f64::from).collect();
        let p = wilcoxon_rank_sum(&a, &b);
        // scipy mannwhitneyu(a, b, method="asymptotic", use_continuity=True)
        assert!((p - 5.212_549_620_603_751_5e-5).abs() < 1e-12, "{p}");
        assert_eq!(p, wilcoxon_rank_sum(&b, &a));
    }

    #[test]
    fn summaries() {
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(
            a in proptest::collection::vec(0u8..6, 1..6),
            b in proptest::collection::vec(0u8..6, 1..6),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let p = wilcoxon_rank_sum(&a, &b);
            prop_assert!((p - enumerate_p(&a, &b)).abs() < 1e-12);
            prop_assert!((p - wilcoxon_rank_sum(&b, &a)).abs() < 1e-12);
            let s = vargha_delaney_a12(&a, &b) + vargha_delaney_a12(&b, &a);
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
