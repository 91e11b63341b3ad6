//! Decision trees and random forests, written from first principles.
//!
//! Trees split greedily: at every node each candidate feature is sorted and
//! the midpoints between consecutive distinct values are tried as
//! thresholds; the (feature, threshold) pair with the lowest weighted child
//! impurity wins. Ties are broken deterministically — lowest feature index,
//! then lowest threshold, then lowest label index — so a fixed seed always
//! produces a bit-identical serialized model. Zero-gain splits are allowed
//! (XOR-style data needs them); recursion still terminates because every
//! midpoint split produces two strictly smaller, non-empty children.
//!
//! A forest fits `n_trees` such trees, each on its own bootstrap resample
//! with a fresh feature subset drawn at every node, and predicts by
//! majority vote.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Criterion> {
        match s.to_ascii_lowercase().as_str() {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            _ => Err(Error::invalid(format!("unknown split criterion '{s}'"))),
        }
    }
}

/// Node impurity from a class histogram. Gini is `1 − Σ pᵢ²`; entropy is
/// `−Σ pᵢ·log₂ pᵢ` with the `0·log 0 = 0` convention.
pub fn impurity(class_counts: &[u32], criterion: Criterion) -> Result<f64> {
    let total: u32 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("impurity of an empty node"));
    }
    let total = f64::from(total);
    Ok(match criterion {
        Criterion::Gini => {
            let sum_sq: f64 = class_counts
                .iter()
                .map(|&c| {
                    let p = f64::from(c) / total;
                    p * p
                })
                .sum();
            1.0 - sum_sq
        }
        Criterion::Entropy => class_counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = f64::from(c) / total;
                -p * p.log2()
            })
            .sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// `None` = grow until pure (or until `min_samples_leaf` blocks).
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Only consumed when fitting with per-node feature subsampling.
    pub rng_seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode<T> {
    Internal {
        feature_index: usize,
        threshold: T,
        left: Box<TreeNode<T>>,
        right: Box<TreeNode<T>>,
    },
    Leaf {
        class_counts: Vec<u32>,
    },
}

impl<T: Scalar> TreeNode<T> {
    /// Descend to a leaf: `x[feature] ≤ threshold` goes left.
    pub fn leaf_for(&self, x: &[T]) -> &[u32] {
        match self {
            TreeNode::Leaf { class_counts } => class_counts,
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                if x[*feature_index] <= *threshold {
                    left.leaf_for(x)
                } else {
                    right.leaf_for(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// Argmax with ties resolved to the lowest index.
fn argmax_u32(counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<T> {
    pub params: TreeParams,
    pub n_classes: usize,
    pub root: TreeNode<T>,
}

impl<T: Scalar> DecisionTree<T> {
    pub fn predict(&self, x: &[T]) -> usize {
        argmax_u32(self.root.leaf_for(x))
    }

    /// Majority label plus the leaf's class frequencies.
    pub fn predict_proba(&self, x: &[T]) -> (usize, Vec<f64>) {
        let counts = self.root.leaf_for(x);
        let total: u32 = counts.iter().sum();
        let probs = counts.iter().map(|&c| f64::from(c) / f64::from(total)).collect();
        (argmax_u32(counts), probs)
    }

    pub fn predict_batch(&self, x: &Matrix<T>) -> Vec<usize> {
        (0..x.rows()).map(|i| self.predict(x.row(i))).collect()
    }
}

struct FitContext<'a, T> {
    x: &'a Matrix<T>,
    y: &'a [usize],
    params: &'a TreeParams,
    n_classes: usize,
    /// `None` = consider every feature at every node.
    features_per_split: Option<usize>,
    rng: Option<Rng>,
}

impl<T: Scalar> FitContext<'_, T> {
    fn histogram(&self, indices: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &i in indices {
            counts[self.y[i]] += 1;
        }
        counts
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match self.features_per_split {
            None => (0..d).collect(),
            Some(m) => {
                let rng = self.rng.as_mut().expect("rng present under subsampling");
                // Partial Fisher-Yates over a scratch index list, then sort
                // so candidates are visited in ascending feature order.
                let mut pool: Vec<usize> = (0..d).collect();
                for i in 0..m {
                    let j = i + rng.next_below(d - i);
                    pool.swap(i, j);
                }
                let mut picked = pool[..m].to_vec();
                picked.sort_unstable();
                picked
            }
        }
    }

    fn fit_node(&mut self, indices: &[usize], depth: usize) -> TreeNode<T> {
        let counts = self.histogram(indices);
        let is_pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_allows = self.params.max_depth.map_or(true, |md| depth < md);
        if is_pure || !depth_allows || indices.len() < 2 * self.params.min_samples_leaf {
            return TreeNode::Leaf {
                class_counts: counts,
            };
        }

        let n = indices.len();
        let total_counts = counts;
        let mut best: Option<(f64, usize, T, usize)> = None; // (impurity, feature, threshold, left size)

        for feature in self.candidate_features() {
            let mut ordered: Vec<(T, usize)> = indices
                .iter()
                .map(|&i| (self.x.get(i, feature), self.y[i]))
                .collect();
            ordered.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

            let mut left_counts = vec![0u32; self.n_classes];
            for (pos, &(value, label)) in ordered.iter().enumerate().take(n - 1) {
                left_counts[label] += 1;
                let next_value = ordered[pos + 1].0;
                if value == next_value {
                    continue;
                }
                let left_n = pos + 1;
                let right_n = n - left_n;
                if left_n < self.params.min_samples_leaf || right_n < self.params.min_samples_leaf {
                    continue;
                }
                let right_counts: Vec<u32> = total_counts
                    .iter()
                    .zip(&left_counts)
                    .map(|(&t, &l)| t - l)
                    .collect();
                let il = impurity(&left_counts, self.params.criterion).expect("non-empty child");
                let ir = impurity(&right_counts, self.params.criterion).expect("non-empty child");
                let weighted = (left_n as f64 * il + right_n as f64 * ir) / n as f64;
                // Strict `<` with ascending (feature, threshold) iteration
                // implements the documented tie-break.
                if best.as_ref().map_or(true, |b| weighted < b.0) {
                    let threshold = (value + next_value) / T::c(2.0);
                    best = Some((weighted, feature, threshold, left_n));
                }
            }
        }

        let Some((_, feature, threshold, _)) = best else {
            // No admissible split (e.g. all candidate features constant).
            return TreeNode::Leaf {
                class_counts: total_counts,
            };
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.x.get(i, feature) <= threshold);
        let left = self.fit_node(&left_idx, depth + 1);
        let right = self.fit_node(&right_idx, depth + 1);
        TreeNode::Internal {
            feature_index: feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

fn check_training_input<T: Scalar>(x: &Matrix<T>, y: &[usize], n_classes: usize) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    if x.rows() != y.len() {
        return Err(Error::invalid(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    Ok(())
}

pub fn fit_tree<T: Scalar>(
    x: &Matrix<T>,
    y: &[usize],
    params: &TreeParams,
    n_classes: usize,
) -> Result<DecisionTree<T>> {
    check_training_input(x, y, n_classes)?;
    let mut ctx = FitContext {
        x,
        y,
        params,
        n_classes,
        features_per_split: None,
        rng: None,
    };
    let indices: Vec<usize> = (0..x.rows()).collect();
    let root = ctx.fit_node(&indices, 0);
    Ok(DecisionTree {
        params: params.clone(),
        n_classes,
        root,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    /// Candidate features drawn at every node; `⌊√136⌋ = 11` by default.
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub rng_seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            tree: TreeParams::default(),
            features_per_split: 11,
            bootstrap: true,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest<T> {
    pub params: ForestParams,
    pub n_classes: usize,
    pub trees: Vec<TreeNode<T>>,
}

impl<T: Scalar> RandomForest<T> {
    /// Majority vote over the trees; vote ties go to the lowest label index.
    pub fn predict(&self, x: &[T]) -> usize {
        let mut votes = vec![0u32; self.n_classes];
        for tree in &self.trees {
            votes[argmax_u32(tree.leaf_for(x))] += 1;
        }
        argmax_u32(&votes)
    }

    pub fn predict_batch(&self, x: &Matrix<T>) -> Vec<usize> {
        (0..x.rows()).map(|i| self.predict(x.row(i))).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forest serializes")
    }
}

/// Fit `n_trees` trees. Per-tree seeds are drawn up front from the forest
/// seed, so each tree's stream is independent of the others and the whole
/// procedure could run tree-parallel without changing any result.
pub fn fit_forest<T: Scalar>(
    x: &Matrix<T>,
    y: &[usize],
    params: &ForestParams,
    n_classes: usize,
) -> Result<RandomForest<T>> {
    check_training_input(x, y, n_classes)?;
    if params.n_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    if params.features_per_split == 0 || params.features_per_split > x.cols() {
        return Err(Error::invalid(format!(
            "features_per_split {} out of range 1..={}",
            params.features_per_split,
            x.cols()
        )));
    }

    let mut master = Rng::new(params.rng_seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.next_u64()).collect();

    let n = x.rows();
    let mut trees = Vec::with_capacity(params.n_trees);
    for seed in tree_seeds {
        let mut rng = Rng::new(seed);
        let (sample_x, sample_y): (Matrix<T>, Vec<usize>) = if params.bootstrap {
            let picks: Vec<usize> = (0..n).map(|_| rng.next_below(n)).collect();
            let ys = picks.iter().map(|&i| y[i]).collect();
            (x.select_rows(&picks), ys)
        } else {
            (x.clone(), y.to_vec())
        };
        let mut ctx = FitContext {
            x: &sample_x,
            y: &sample_y,
            params: &params.tree,
            n_classes,
            features_per_split: Some(params.features_per_split),
            rng: Some(rng),
        };
        let indices: Vec<usize> = (0..sample_x.rows()).collect();
        trees.push(ctx.fit_node(&indices, 0));
    }
    Ok(RandomForest {
        params: params.clone(),
        n_classes,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impurity_of_pure_node_is_zero() {
        let counts = [8, 0, 0, 0, 0, 0, 0];
        assert_eq!(impurity(&counts, Criterion::Gini).unwrap(), 0.0);
        assert_eq!(impurity(&counts, Criterion::Entropy).unwrap(), 0.0);
    }

    #[test]
    fn impurity_of_balanced_binary_node() {
        let counts = [4, 4, 0, 0, 0, 0, 0];
        assert_eq!(impurity(&counts, Criterion::Gini).unwrap(), 0.5);
        assert_eq!(impurity(&counts, Criterion::Entropy).unwrap(), 1.0);
    }

    #[test]
    fn impurity_of_uniform_seven_classes() {
        let counts = [3u32; 7];
        let gini = impurity(&counts, Criterion::Gini).unwrap();
        let entropy = impurity(&counts, Criterion::Entropy).unwrap();
        assert!((gini - 6.0 / 7.0).abs() < 1e-15);
        assert!((entropy - 7.0f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn impurity_of_empty_node_errors() {
        assert!(impurity(&[0, 0], Criterion::Gini).is_err());
    }

    #[test]
    fn impurity_stays_within_bounds() {
        let mut rng = Rng::new(5);
        for _ in 0..200 {
            let counts: Vec<u32> = (0..7).map(|_| rng.next_below(20) as u32).collect();
            if counts.iter().sum::<u32>() == 0 {
                continue;
            }
            let gini = impurity(&counts, Criterion::Gini).unwrap();
            let entropy = impurity(&counts, Criterion::Entropy).unwrap();
            assert!((0.0..=6.0 / 7.0 + 1e-15).contains(&gini));
            assert!((0.0..=7.0f64.log2() + 1e-15).contains(&entropy));
        }
    }

    fn matrix_1d(values: &[f64]) -> Matrix<f64> {
        Matrix::from_rows(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>())
    }

    #[test]
    fn separable_1d_data_needs_one_split() {
        let x = matrix_1d(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let y = vec![0, 0, 0, 1, 1, 1];
        let tree = fit_tree(&x, &y, &TreeParams::default(), 2).unwrap();
        assert_eq!(tree.root.depth(), 1);
        let predictions = tree.predict_batch(&x);
        assert_eq!(predictions, y);
        match &tree.root {
            TreeNode::Internal { threshold, .. } => assert_eq!(*threshold, 0.0),
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
    }

    #[test]
    fn uniform_labels_give_a_single_leaf() {
        let x = matrix_1d(&[1.0, 2.0, 3.0]);
        let tree = fit_tree(&x, &[4, 4, 4], &TreeParams::default(), 7).unwrap();
        assert!(matches!(tree.root, TreeNode::Leaf { .. }));
        assert_eq!(tree.predict(&[99.0]), 4);
    }

    fn xor_data() -> (Matrix<f64>, Vec<usize>) {
        let x = Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ]);
        (x, vec![0, 0, 1, 1])
    }

    #[test]
    fn xor_needs_depth_two() {
        let (x, y) = xor_data();
        let deep = fit_tree(
            &x,
            &y,
            &TreeParams {
                max_depth: Some(2),
                ..TreeParams::default()
            },
            2,
        )
        .unwrap();
        assert_eq!(deep.predict_batch(&x), y);

        let shallow = fit_tree(
            &x,
            &y,
            &TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            },
            2,
        )
        .unwrap();
        let correct = shallow
            .predict_batch(&x)
            .iter()
            .zip(&y)
            .filter(|(p, t)| p == t)
            .count();
        assert!(correct as f64 / y.len() as f64 <= 0.75);
    }

    #[test]
    fn unlimited_tree_memorizes_distinct_training_points() {
        let mut rng = Rng::new(40);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| (0..5).map(|j| (i * 5 + j) as f64 + rng.next_f64() * 0.5).collect())
            .collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<usize> = (0..30).map(|_| rng.next_below(7)).collect();
        let tree = fit_tree(&x, &y, &TreeParams::default(), 7).unwrap();
        assert_eq!(tree.predict_batch(&x), y);
    }

    #[test]
    fn min_samples_leaf_blocks_small_splits() {
        let x = matrix_1d(&[1.0, 2.0, 3.0, 4.0]);
        let y = vec![0, 0, 0, 1];
        let tree = fit_tree(
            &x,
            &y,
            &TreeParams {
                min_samples_leaf: 2,
                ..TreeParams::default()
            },
            2,
        )
        .unwrap();
        fn check(node: &TreeNode<f64>, min: u32) {
            match node {
                TreeNode::Leaf { class_counts } => {
                    assert!(class_counts.iter().sum::<u32>() >= min)
                }
                TreeNode::Internal { left, right, .. } => {
                    check(left, min);
                    check(right, min);
                }
            }
        }
        check(&tree.root, 2);
    }

    #[test]
    fn exact_threshold_goes_left() {
        let node: TreeNode<f64> = TreeNode::Internal {
            feature_index: 0,
            threshold: 5.0,
            left: Box::new(TreeNode::Leaf {
                class_counts: vec![3, 0],
            }),
            right: Box::new(TreeNode::Leaf {
                class_counts: vec![0, 3],
            }),
        };
        assert_eq!(argmax_u32(node.leaf_for(&[5.0])), 0);
        assert_eq!(argmax_u32(node.leaf_for(&[5.0 + 1e-9])), 1);
    }

    #[test]
    fn leaf_argmax_tie_takes_lowest_label() {
        let tree = DecisionTree {
            params: TreeParams::default(),
            n_classes: 3,
            root: TreeNode::Leaf {
                class_counts: vec![0, 4, 4],
            },
        };
        assert_eq!(tree.predict(&[0.0]), 1);
        let (_, probs) = tree.predict_proba(&[0.0]);
        assert_eq!(probs, vec![0.0, 0.5, 0.5]);
    }

    /// Exhaustive scan over all (feature, midpoint) candidates, mirroring
    /// the documented tie-break order.
    fn brute_force_root(x: &Matrix<f64>, y: &[usize], criterion: Criterion) -> Option<(usize, f64)> {
        let n = x.rows();
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in 0..x.cols() {
            let mut values: Vec<f64> = (0..n).map(|i| x.get(i, feature)).collect();
            values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for pair in values.windows(2) {
                let thr = (pair[0] + pair[1]) / 2.0;
                let mut lc = vec![0u32; 7];
                let mut rc = vec![0u32; 7];
                for i in 0..n {
                    if x.get(i, feature) <= thr {
                        lc[y[i]] += 1;
                    } else {
                        rc[y[i]] += 1;
                    }
                }
                let ln: u32 = lc.iter().sum();
                let rn: u32 = rc.iter().sum();
                if ln == 0 || rn == 0 {
                    continue;
                }
                let weighted = (f64::from(ln) * impurity(&lc, criterion).unwrap()
                    + f64::from(rn) * impurity(&rc, criterion).unwrap())
                    / n as f64;
                if best.as_ref().map_or(true, |b| weighted < b.0) {
                    best = Some((weighted, feature, thr));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    #[test]
    fn root_split_matches_brute_force_on_small_data() {
        let mut rng = Rng::new(77);
        for criterion in [Criterion::Gini, Criterion::Entropy] {
            for _ in 0..50 {
                let n = 2 + rng.next_below(7);
                let d = 1 + rng.next_below(2);
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..d).map(|_| (rng.next_below(6) as f64) / 2.0).collect())
                    .collect();
                let x = Matrix::from_rows(&rows);
                let y: Vec<usize> = (0..n).map(|_| rng.next_below(3)).collect();
                let tree = fit_tree(
                    &x,
                    &y,
                    &TreeParams {
                        criterion,
                        ..TreeParams::default()
                    },
                    7,
                )
                .unwrap();
                let expected = brute_force_root(&x, &y, criterion);
                match (&tree.root, expected) {
                    (TreeNode::Leaf { .. }, None) => {}
                    (TreeNode::Leaf { class_counts }, Some(_)) => {
                        // A leaf is only allowed when the node is pure.
                        assert_eq!(class_counts.iter().filter(|&&c| c > 0).count(), 1);
                    }
                    (
                        TreeNode::Internal {
                            feature_index,
                            threshold,
                            ..
                        },
                        Some((f, t)),
                    ) => {
                        assert_eq!((*feature_index, *threshold), (f, t));
                    }
                    (TreeNode::Internal { .. }, None) => panic!("split without candidates"),
                }
            }
        }
    }

    fn noisy_blobs(seed: u64, n_per: usize) -> (Matrix<f64>, Vec<usize>) {
        let mut rng = Rng::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..3usize {
            for _ in 0..n_per {
                let cx = class as f64 * 4.0;
                rows.push(vec![
                    cx + rng.gaussian(),
                    -cx + rng.gaussian(),
                    rng.gaussian(),
                ]);
                labels.push(class);
            }
        }
        (Matrix::from_rows(&rows), labels)
    }

    #[test]
    fn degenerate_forest_equals_a_single_tree() {
        let (x, y) = noisy_blobs(9, 15);
        let params = ForestParams {
            n_trees: 1,
            bootstrap: false,
            features_per_split: 3,
            ..ForestParams::default()
        };
        // features_per_split = all columns makes subsampling a no-op.
        let forest = fit_forest(&x, &y, &params, 3).unwrap();
        let tree = fit_tree(&x, &y, &TreeParams::default(), 3).unwrap();
        let mut rng = Rng::new(1);
        for _ in 0..50 {
            let probe = vec![
                rng.next_f64() * 10.0 - 2.0,
                rng.next_f64() * 10.0 - 8.0,
                rng.gaussian(),
            ];
            assert_eq!(forest.predict(&probe), tree.predict(&probe));
        }
    }

    #[test]
    fn same_seed_gives_bit_identical_forests() {
        let (x, y) = noisy_blobs(11, 10);
        let params = ForestParams {
            n_trees: 12,
            features_per_split: 2,
            rng_seed: 42,
            ..ForestParams::default()
        };
        let a = fit_forest(&x, &y, &params, 3).unwrap();
        let b = fit_forest(&x, &y, &params, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());

        let different = fit_forest(
            &x,
            &y,
            &ForestParams {
                rng_seed: 43,
                ..params
            },
            3,
        )
        .unwrap();
        assert_ne!(a.to_json(), different.to_json());
    }

    #[test]
    fn vote_tie_takes_lowest_label_index() {
        let leaf = |class: usize| TreeNode::Leaf {
            class_counts: {
                let mut c = vec![0u32; 7];
                c[class] = 5;
                c
            },
        };
        let forest = RandomForest::<f64> {
            params: ForestParams::default(),
            n_classes: 7,
            trees: vec![leaf(1), leaf(0)],
        };
        assert_eq!(forest.predict(&[0.0; 136]), 0);
    }

    #[test]
    fn forest_json_round_trips() {
        let (x, y) = noisy_blobs(3, 6);
        let params = ForestParams {
            n_trees: 3,
            features_per_split: 2,
            ..ForestParams::default()
        };
        let forest = fit_forest(&x, &y, &params, 3).unwrap();
        let json = forest.to_json();
        let back: RandomForest<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, forest);
        // Node records carry the documented field names.
        assert!(json.contains("\"feature_index\""));
        assert!(json.contains("\"threshold\""));
        assert!(json.contains("\"class_counts\""));
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = matrix_1d(&[1.0, 2.0]);
        assert!(fit_tree(&x, &[0], &TreeParams::default(), 2).is_err());
        assert!(fit_tree(&x, &[0, 5], &TreeParams::default(), 2).is_err());
        let empty: Matrix<f64> = Matrix::zeros(0, 3);
        assert!(fit_tree(&empty, &[], &TreeParams::default(), 2).is_err());
        assert!(fit_forest(
            &x,
            &[0, 1],
            &ForestParams {
                features_per_split: 9,
                ..ForestParams::default()
            },
            2
        )
        .is_err());
    }
}
