//! Squared-loss gradient boosting over exact-greedy regression trees.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbdtParams {
    pub num_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Fraction of rows drawn without replacement for each stage.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            num_trees: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_leaf: 5,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.max_depth == 0 {
            return Err(Error::config("max_depth must be at least 1"));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::config("min_samples_leaf must be at least 1"));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::config(format!("subsample must lie in (0, 1], got {}", self.subsample)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    /// Arena; the root is node 0.
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_sizes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { samples, .. } => Some(*samples),
                Node::Split { .. } => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    pub params: GbdtParams,
    /// Accumulated split gain per input feature.
    pub gains: Vec<f64>,
}

impl BoostedEnsemble {
    pub fn n_features(&self) -> usize {
        self.gains.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.init + self.trees.iter().map(|t| self.learning_rate * t.predict(x)).sum::<f64>()
    }

    /// Predictions after each stage, starting with the constant model.
    pub fn staged_predict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![self.init];
        let mut acc = self.init;
        for t in &self.trees {
            acc += self.learning_rate * t.predict(x);
            out.push(acc);
        }
        out
    }
}

/// Column-sorted row lists for one node.
struct NodeRows {
    by_feature: Vec<Vec<u32>>,
}

struct TreeBuilder<'a> {
    /// Column-major copy of the inputs.
    cols: &'a [Vec<f64>],
    residual: &'a [f64],
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
    gains: &'a mut [f64],
    in_left: Vec<bool>,
}

struct BestSplit {
    feature: usize,
    position: usize,
    threshold: f64,
    gain: f64,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, rows: &[u32]) -> usize {
        let value = rows.iter().map(|&r| self.residual[r as usize]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf {
            value,
            samples: rows.len(),
        });
        self.nodes.len() - 1
    }

    fn best_split(&self, node: &NodeRows) -> Option<BestSplit> {
        let any = &node.by_feature[0];
        let n = any.len();
        if n < 2 * self.min_leaf {
            return None;
        }
        let total: f64 = any.iter().map(|&r| self.residual[r as usize]).sum();
        let sse: f64 = any
            .iter()
            .map(|&r| self.residual[r as usize].powi(2))
            .sum::<f64>()
            - total * total / n as f64;
        if sse <= 1e-14 {
            return None;
        }
        let mut best: Option<BestSplit> = None;
        for (f, order) in node.by_feature.iter().enumerate() {
            let col = &self.cols[f];
            let mut left_sum = 0.0;
            for pos in 0..n - 1 {
                let r = order[pos] as usize;
                left_sum += self.residual[r];
                let nl = pos + 1;
                let nr = n - nl;
                if nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let a = col[r];
                let b = col[order[pos + 1] as usize];
                if a == b {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / nl as f64 + right_sum * right_sum / nr as f64 - total * total / n as f64;
                if gain > 1e-12 * sse && best.as_ref().map_or(true, |b| gain > b.gain) {
                    let mut threshold = 0.5 * (a + b);
                    // midpoint can round up to `b` for adjacent floats
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        position: nl,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, node: NodeRows, depth: usize) -> usize {
        let split = if depth < self.max_depth { self.best_split(&node) } else { None };
        let Some(split) = split else {
            return self.leaf(&node.by_feature[0]);
        };
        let chosen = &node.by_feature[split.feature];
        for (i, &r) in chosen.iter().enumerate() {
            self.in_left[r as usize] = i < split.position;
        }
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for order in &node.by_feature {
            let (l, r): (Vec<u32>, Vec<u32>) = order.iter().partition(|&&r| self.in_left[r as usize]);
            left.push(l);
            right.push(r);
        }
        drop(node);
        self.gains[split.feature] += split.gain;
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0, samples: 0 });
        let l = self.grow(NodeRows { by_feature: left }, depth + 1);
        let r = self.grow(NodeRows { by_feature: right }, depth + 1);
        self.nodes[me] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            gain: split.gain,
            left: l,
            right: r,
        };
        me
    }
}

/// Fits `params.num_trees` stages; zero stages give the constant mean model.
pub fn fit_gbdt(x: &[Vec<f64>], y: &[f64], params: &GbdtParams) -> Result<BoostedEnsemble> {
    params.validate()?;
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Precondition(format!(
            "need matching non-empty inputs, got {} rows and {} targets",
            x.len(),
            y.len()
        )));
    }
    let width = x[0].len();
    if x.iter().any(|r| r.len() != width) {
        return Err(Error::Precondition("ragged feature rows".into()));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite value in training data".into()));
    }
    let n = x.len();
    let init = y.iter().sum::<f64>() / n as f64;
    let mut gains = vec![0.0; width];
    let mut trees = Vec::with_capacity(params.num_trees);
    if width == 0 {
        return Ok(BoostedEnsemble {
            init,
            learning_rate: params.learning_rate,
            trees,
            params: *params,
            gains,
        });
    }

    let cols: Vec<Vec<f64>> = (0..width).map(|f| x.iter().map(|r| r[f]).collect()).collect();
    // Global per-feature orders; ties keep row order.
    let orders: Vec<Vec<u32>> = cols
        .iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            idx
        })
        .collect();
    let n_sub = ((params.subsample * n as f64).round() as usize).clamp(1, n);
    let mut pred = vec![init; n];
    let mut residual = vec![0.0; n];
    let mut chosen = vec![false; n];
    for t in 0..params.num_trees {
        for i in 0..n {
            residual[i] = y[i] - pred[i];
        }
        if n_sub < n {
            chosen.iter_mut().for_each(|c| *c = false);
            let mut r = rng(derive_seed(params.seed, &[t as u64]));
            for i in sample(&mut r, n, n_sub) {
                chosen[i] = true;
            }
        } else {
            chosen.iter_mut().for_each(|c| *c = true);
        }
        let root = NodeRows {
            by_feature: orders
                .iter()
                .map(|o| o.iter().copied().filter(|&r| chosen[r as usize]).collect())
                .collect(),
        };
        let mut builder = TreeBuilder {
            cols: &cols,
            residual: &residual,
            max_depth: params.max_depth,
            min_leaf: params.min_samples_leaf,
            nodes: Vec::new(),
            gains: &mut gains,
            in_left: vec![false; n],
        };
        builder.grow(root, 0);
        let tree = RegressionTree { nodes: builder.nodes };
        for i in 0..n {
            pred[i] += params.learning_rate * tree.predict(&x[i]);
        }
        trees.push(tree);
    }
    Ok(BoostedEnsemble {
        init,
        learning_rate: params.learning_rate,
        trees,
        params: *params,
        gains,
    })
}
