//! Weighted CART trees (Gini impurity) and a bagged random forest.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
enum Node {
    Leaf {
        /// Weighted share of the positive class.
        p: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    root: Node,
}

#[derive(Debug, Clone, Copy)]
struct Growth {
    max_depth: usize,
    min_leaf: usize,
    /// Features tried per split; 0 tries all.
    max_features: usize,
}

fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

fn grow(
    x: &[Vec<f64>],
    y: &[bool],
    w: &[f64],
    idx: &mut [usize],
    depth: usize,
    g: Growth,
    rng: &mut ChaCha8Rng,
) -> Node {
    let total: f64 = idx.iter().map(|&i| w[i]).sum();
    let pos: f64 = idx.iter().filter(|&&i| y[i]).map(|&i| w[i]).sum();
    let leaf = Node::Leaf {
        p: if total > 0.0 { pos / total } else { 0.5 },
    };
    if depth >= g.max_depth || idx.len() < 2 * g.min_leaf || pos <= 0.0 || pos >= total {
        return leaf;
    }

    let d = x[idx[0]].len();
    let features: Vec<usize> = if g.max_features == 0 || g.max_features >= d {
        (0..d).collect()
    } else {
        let mut f = sample(rng, d, g.max_features).into_vec();
        f.sort_unstable();
        f
    };

    let parent = gini(pos, total) * total;
    let mut best: Option<(f64, usize, f64)> = None;
    for &f in &features {
        idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let (mut lw, mut lp) = (0.0, 0.0);
        for split in 1..idx.len() {
            let i = idx[split - 1];
            lw += w[i];
            if y[i] {
                lp += w[i];
            }
            let (a, b) = (x[i][f], x[idx[split]][f]);
            if a == b || split < g.min_leaf || idx.len() - split < g.min_leaf {
                continue;
            }
            let impurity = gini(lp, lw) * lw + gini(pos - lp, total - lw) * (total - lw);
            let gain = parent - impurity;
            if gain > -1e-12 && best.is_none_or(|(bg, _, _)| gain > bg + 1e-12) {
                best = Some((gain, f, a + (b - a) / 2.0));
            }
        }
    }
    let Some((_, feature, threshold)) = best else {
        return leaf;
    };
    let (mut l, mut r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] <= threshold);
    Node::Split {
        feature,
        threshold,
        left: Box::new(grow(x, y, w, &mut l, depth + 1, g, rng)),
        right: Box::new(grow(x, y, w, &mut r, depth + 1, g, rng)),
    }
}

impl TreeModel {
    /// Keys: `max_depth` (default 12), `min_leaf` (default 2).
    pub fn fit(x: &[Vec<f64>], y: &[bool], w: &[f64], params: &Params, seed: u64) -> Self {
        let g = Growth {
            max_depth: params.get("max_depth", 12.0) as usize,
            min_leaf: (params.get("min_leaf", 2.0) as usize).max(1),
            max_features: 0,
        };
        let mut idx: Vec<usize> = (0..x.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TreeModel {
            root: grow(x, y, w, &mut idx, 0, g, &mut rng),
        }
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { p } => return *p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<TreeModel>,
}

impl ForestModel {
    /// Keys: `trees` (default 100), `max_depth` (default 30), `min_leaf`
    /// (default 1), `max_features` (default sqrt of the width).
    ///
    /// Tree `t` draws its bootstrap and feature subsets from its own stream,
    /// so the result does not depend on how trees are scheduled.
    pub fn fit(x: &[Vec<f64>], y: &[bool], w: &[f64], params: &Params, seed: u64) -> Self {
        let d = x.first().map_or(1, Vec::len);
        let n_trees = (params.get("trees", 100.0) as usize).max(1);
        let g = Growth {
            max_depth: params.get("max_depth", 30.0) as usize,
            min_leaf: (params.get("min_leaf", 1.0) as usize).max(1),
            max_features: (params.get("max_features", (d as f64).sqrt().ceil()) as usize).clamp(1, d),
        };
        let n = x.len();
        let build = |t: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            TreeModel {
                root: grow(x, y, w, &mut idx, 0, g, &mut rng),
            }
        };
        let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n_trees);
        let mut trees: Vec<Option<TreeModel>> = vec![None; n_trees];
        std::thread::scope(|s| {
            for (c, chunk) in trees.chunks_mut(n_trees.div_ceil(workers)).enumerate() {
                let build = &build;
                let start = c * n_trees.div_ceil(workers);
                s.spawn(move || {
                    for (o, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(build(start + o));
                    }
                });
            }
        });
        ForestModel {
            trees: trees.into_iter().map(|t| t.expect("every tree built")).collect(),
        }
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.probability(x)).sum::<f64>() / self.trees.len() as f64
    }
}
