//! Evaluation metrics: mean cluster conductance against the graph, NMI
//! between two assignments, Precision@n under identity / exhaustive /
//! greedy cluster-to-label matching, and the deterministic k-fold
//! cross-validation splitter with its mean ± sample-std summary.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::LabelMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest community count for which exhaustive matching is attempted
/// (8! = 40320 permutations).
pub const EXHAUSTIVE_MATCHING_LIMIT: usize = 8;

/// Per-cluster conductance and its mean. Clusters with an empty or
/// full-graph volume have no defined conductance; they contribute 0 to the
/// mean and are listed in `degenerate_clusters`.
#[derive(Clone, Debug)]
pub struct Conductance {
    pub mean: f64,
    pub per_cluster: Vec<f64>,
    pub degenerate_clusters: Vec<usize>,
}

/// Mean over clusters of `cut(C) / min(vol(C), vol(V \ C))`, where `cut`
/// counts edges leaving the cluster and `vol` sums member degrees.
pub fn conductance(g: &Graph, assign: &[usize]) -> Result<Conductance> {
    if assign.len() != g.n_nodes() {
        return Err(Error::DimensionMismatch { expected: g.n_nodes(), found: assign.len() });
    }
    if assign.is_empty() {
        return Err(Error::EmptyInput { what: "cluster assignment" });
    }
    let k = assign.iter().max().expect("nonempty") + 1;
    let mut vol = vec![0usize; k];
    for v in 0..g.n_nodes() as u32 {
        vol[assign[v as usize]] += g.degree(v);
    }
    let total: usize = vol.iter().sum();
    let mut cut = vec![0usize; k];
    for &(u, v) in g.edges() {
        let (cu, cv) = (assign[u as usize], assign[v as usize]);
        if cu != cv {
            cut[cu] += 1;
            cut[cv] += 1;
        }
    }
    let mut per_cluster = Vec::with_capacity(k);
    let mut degenerate_clusters = Vec::new();
    for c in 0..k {
        let denom = vol[c].min(total - vol[c]);
        if denom == 0 {
            degenerate_clusters.push(c);
            per_cluster.push(0.0);
        } else {
            per_cluster.push(cut[c] as f64 / denom as f64);
        }
    }
    let mean = per_cluster.iter().sum::<f64>() / k as f64;
    Ok(Conductance { mean, per_cluster, degenerate_clusters })
}

/// An NMI value; `degenerate` is set when either side is a single cluster,
/// where the score is 0 by convention rather than by the formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmiScore {
    pub value: f64,
    pub degenerate: bool,
}

/// Normalized mutual information `2 I(P; T) / (H(P) + H(T))` between two
/// total assignments, from the contingency counts, with `0 log 0 = 0`.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<NmiScore> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), found: pred.len() });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput { what: "assignments" });
    }
    let kp = pred.iter().max().expect("nonempty") + 1;
    let kt = truth.iter().max().expect("nonempty") + 1;
    let n = pred.len() as f64;
    let mut joint = vec![0usize; kp * kt];
    let mut rows = vec![0usize; kp];
    let mut cols = vec![0usize; kt];
    for (&p, &t) in pred.iter().zip(truth) {
        joint[p * kt + t] += 1;
        rows[p] += 1;
        cols[t] += 1;
    }
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let q = c as f64 / n;
                -q * q.ln()
            })
            .sum()
    };
    let hp = entropy(&rows);
    let ht = entropy(&cols);
    if hp == 0.0 || ht == 0.0 {
        return Ok(NmiScore { value: 0.0, degenerate: true });
    }
    let mut mi = 0.0;
    for p in 0..kp {
        for t in 0..kt {
            let c = joint[p * kt + t];
            if c > 0 {
                let q = c as f64 / n;
                mi += q * (q / (rows[p] as f64 / n) / (cols[t] as f64 / n)).ln();
            }
        }
    }
    Ok(NmiScore { value: 2.0 * mi / (hp + ht), degenerate: false })
}

/// How predicted community ids are matched to truth columns before
/// scoring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Matching {
    /// Predicted ids are already truth columns (supervised classifiers).
    Identity,
    /// Best over all permutations of ids; only tractable up to
    /// [`EXHAUSTIVE_MATCHING_LIMIT`] communities.
    Exhaustive,
    /// Largest predicted cluster first (ties to the smaller id), each
    /// taking its dominant unused truth class.
    Greedy,
}

/// Fraction of labeled nodes with at least one of their top-n predicted
/// communities among their true ones, after matching predicted ids to
/// truth columns. Unlabeled nodes are excluded from the denominator.
pub fn precision_at_n(pred: &[Vec<u32>], truth: &LabelMatrix, matching: Matching) -> Result<f64> {
    if pred.len() != truth.n() {
        return Err(Error::DimensionMismatch { expected: truth.n(), found: pred.len() });
    }
    let labeled = truth.labeled_nodes();
    if labeled.is_empty() {
        return Err(Error::EmptyInput { what: "labeled nodes" });
    }
    if labeled.iter().any(|&i| pred[i].is_empty()) {
        return Err(Error::EmptyInput { what: "top-n prediction for a labeled node" });
    }
    let k = truth.k();
    let score_with = |assoc: &dyn Fn(u32) -> Option<usize>| -> f64 {
        let hits = labeled
            .iter()
            .filter(|&&i| {
                pred[i]
                    .iter()
                    .any(|&p| assoc(p).is_some_and(|j| truth.contains(i, j as u32)))
            })
            .count();
        hits as f64 / labeled.len() as f64
    };
    match matching {
        Matching::Identity => {
            if pred.iter().flatten().any(|&p| p as usize >= k) {
                return Err(Error::Usage(format!(
                    "identity matching needs predicted ids below the community count {k}"
                )));
            }
            Ok(score_with(&|p| Some(p as usize)))
        }
        Matching::Exhaustive => {
            let p_count = 1 + pred.iter().flatten().copied().max().unwrap_or(0) as usize;
            let m = p_count.max(k);
            if m > EXHAUSTIVE_MATCHING_LIMIT {
                return Err(Error::MatchingTooLarge { k: m, max: EXHAUSTIVE_MATCHING_LIMIT });
            }
            let mut best = 0.0f64;
            for_each_permutation(m, &mut |perm| {
                let score = score_with(&|p| {
                    let j = perm[p as usize];
                    (j < k).then_some(j)
                });
                best = best.max(score);
            });
            Ok(best)
        }
        Matching::Greedy => {
            let p_count = 1 + pred.iter().flatten().copied().max().unwrap_or(0) as usize;
            // Cluster sizes by primary (top-1) prediction over labeled nodes.
            let mut sizes = vec![0usize; p_count];
            for &i in &labeled {
                sizes[pred[i][0] as usize] += 1;
            }
            let mut order: Vec<usize> = (0..p_count).collect();
            order.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
            let mut assoc: Vec<Option<usize>> = vec![None; p_count];
            let mut used = vec![false; k];
            for &c in &order {
                let mut votes = vec![0usize; k];
                for &i in &labeled {
                    if pred[i][0] as usize == c {
                        for &j in truth.memberships(i) {
                            votes[j as usize] += 1;
                        }
                    }
                }
                let winner = (0..k)
                    .filter(|&j| !used[j] && votes[j] > 0)
                    .max_by_key(|&j| (votes[j], std::cmp::Reverse(j)));
                if let Some(j) = winner {
                    used[j] = true;
                    assoc[c] = Some(j);
                }
            }
            Ok(score_with(&|p| assoc[p as usize]))
        }
    }
}

/// Calls `f` with every permutation of `0..m`.
fn for_each_permutation(m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(perm: &mut Vec<usize>, used: &mut [bool], m: usize, f: &mut impl FnMut(&[usize])) {
        if perm.len() == m {
            f(perm);
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                rec(perm, used, m, f);
                perm.pop();
                used[v] = false;
            }
        }
    }
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], m, f);
}

/// One cross-validation split over the labeled nodes. `missing_classes`
/// lists truth columns with no member in the training side — the affected
/// classifier decides whether that is fatal.
#[derive(Clone, Debug)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub missing_classes: Vec<usize>,
}

/// Deterministic shuffled k-fold splits of the labeled nodes: validation
/// parts are disjoint, cover every labeled node, and differ in size by at
/// most one.
pub fn kfold(labels: &LabelMatrix, folds: usize, seed: u64) -> Result<Vec<Fold>> {
    let nodes = labels.labeled_nodes();
    if folds < 2 {
        return Err(Error::Usage("cross-validation needs at least 2 folds".into()));
    }
    if nodes.len() < folds {
        return Err(Error::Usage(format!(
            "{} labeled nodes cannot fill {folds} folds",
            nodes.len()
        )));
    }
    let mut shuffled = nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let n = shuffled.len();
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let validation: Vec<usize> = shuffled[start..start + len].to_vec();
        let train: Vec<usize> =
            shuffled[..start].iter().chain(&shuffled[start + len..]).copied().collect();
        let mut covered = vec![false; labels.k()];
        for &i in &train {
            for &j in labels.memberships(i) {
                covered[j as usize] = true;
            }
        }
        let missing_classes = (0..labels.k()).filter(|&j| !covered[j]).collect();
        out.push(Fold { train, validation, missing_classes });
        start += len;
    }
    Ok(out)
}

/// Mean and sample standard deviation (n − 1 denominator; 0 for a single
/// value) of a metric over folds or runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptyInput { what: "metric values" });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(Summary { mean, std })
}
