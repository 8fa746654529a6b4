//! Supervised community prediction on ball embeddings: nearest-barycenter
//! K-means, a supervised mixture fit with Bayes-rule ranking, hyperbolic
//! logistic regression on geodesic hyperplane distances, and the
//! most-common-community baseline. Predictions are dense community
//! *columns* (`0..K`, see [`LabelMatrix`]); original ids are recovered
//! through [`LabelMatrix::class_id`].

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{log_density, ZetaTable};
use crate::geometry::{self, kern, BallPoint, TangentVector};
use crate::mixture::{m_step, weighted_barycenter, BarycenterOptions, MixtureModel, Responsibilities};
use crate::metrics::{kfold, precision_at_n, Matching};

/// Binary node-community membership matrix `y` with `N` rows and `K`
/// columns. Rows may carry several ones (multi-label datasets) or none at
/// all (unlabeled nodes); columns are dense `0..K` and remember the
/// original community ids they were built from.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMatrix {
    /// Original community id of each column, strictly ascending.
    class_ids: Vec<usize>,
    /// Per node, the ascending column indices with `y[i][j] = 1`.
    memberships: Vec<Vec<u32>>,
}

impl LabelMatrix {
    /// Builds the matrix from per-node lists of original community ids.
    /// Columns are the sorted distinct ids over all nodes; empty lists mark
    /// unlabeled nodes and produce all-zero rows.
    pub fn from_memberships(node_classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut ids: Vec<usize> = node_classes.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Err(Error::EmptyInput { what: "community labels" });
        }
        let col = |id: usize| ids.binary_search(&id).expect("id collected above") as u32;
        let memberships = node_classes
            .into_iter()
            .map(|mut classes| {
                classes.sort_unstable();
                classes.dedup();
                classes.into_iter().map(col).collect()
            })
            .collect();
        Ok(LabelMatrix { class_ids: ids, memberships })
    }

    /// Builds a single-label matrix from one community id per node.
    pub fn from_assignment(assign: &[usize]) -> Result<Self> {
        Self::from_memberships(assign.iter().map(|&c| vec![c]).collect())
    }

    /// Number of nodes (rows).
    pub fn n(&self) -> usize {
        self.memberships.len()
    }

    /// Number of communities (columns).
    pub fn k(&self) -> usize {
        self.class_ids.len()
    }

    /// Original community id behind column `j`.
    pub fn class_id(&self, j: usize) -> usize {
        self.class_ids[j]
    }

    /// Column index of an original community id, if present.
    pub fn column_of(&self, class_id: usize) -> Option<usize> {
        self.class_ids.binary_search(&class_id).ok()
    }

    /// Ascending column indices of node `i`'s communities (empty if
    /// unlabeled).
    pub fn memberships(&self, i: usize) -> &[u32] {
        &self.memberships[i]
    }

    /// Whether node `i` carries at least one label.
    pub fn is_labeled(&self, i: usize) -> bool {
        !self.memberships[i].is_empty()
    }

    /// The matrix entry `y[i][j]`.
    pub fn contains(&self, i: usize, j: u32) -> bool {
        self.memberships[i].binary_search(&j).is_ok()
    }

    /// Indices of all labeled nodes, ascending.
    pub fn labeled_nodes(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_labeled(i)).collect()
    }

    /// Per-column count of member nodes.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k()];
        for row in &self.memberships {
            for &j in row {
                counts[j as usize] += 1;
            }
        }
        counts
    }

    /// The single column of each node when every labeled node has exactly
    /// one label and no node is unlabeled; `None` for true multi-label or
    /// partially labeled data.
    pub fn single_assignment(&self) -> Option<Vec<u32>> {
        self.memberships.iter().map(|row| if row.len() == 1 { Some(row[0]) } else { None }).collect()
    }

    /// Rows at `nodes`, in order, with the column space unchanged — a
    /// fold's training matrix keeps the same `K` columns as the full data,
    /// so classes absent from the fold show up as zero counts rather than
    /// silently renumbering the rest.
    pub fn subset(&self, nodes: &[usize]) -> Result<Self> {
        let memberships = nodes
            .iter()
            .map(|&i| {
                self.memberships
                    .get(i)
                    .cloned()
                    .ok_or(Error::DimensionMismatch { expected: self.n(), found: i })
            })
            .collect::<Result<_>>()?;
        Ok(LabelMatrix { class_ids: self.class_ids.clone(), memberships })
    }
}

/// Per-community barycenters for nearest-barycenter classification.
#[derive(Clone, Debug)]
pub struct CommunityBarycenters {
    means: Vec<BallPoint>,
}

/// Fits one barycenter per community from its member points; a node in
/// several communities contributes to each of them. Every community must
/// have at least one training point.
pub fn supervised_kmeans_fit(
    points: &[BallPoint],
    labels: &LabelMatrix,
    opts: &BarycenterOptions,
) -> Result<CommunityBarycenters> {
    if points.len() != labels.n() {
        return Err(Error::DimensionMismatch { expected: labels.n(), found: points.len() });
    }
    let k = labels.k();
    let mut means = Vec::with_capacity(k);
    for j in 0..k {
        let weights: Vec<f64> =
            (0..labels.n()).map(|i| f64::from(labels.contains(i, j as u32))).collect();
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::DegenerateCluster { index: j });
        }
        means.push(weighted_barycenter(points, &weights, opts)?);
    }
    Ok(CommunityBarycenters { means })
}

impl CommunityBarycenters {
    pub fn k(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[BallPoint] {
        &self.means
    }

    /// The communities of the `n` nearest barycenters by hyperbolic
    /// distance, ties broken toward the smaller community id.
    pub fn predict(&self, query: &BallPoint, n: usize) -> Vec<u32> {
        let mut order: Vec<(f64, u32)> = self
            .means
            .iter()
            .enumerate()
            .map(|(j, mu)| (kern::dist(query.coords(), mu.coords()), j as u32))
            .collect();
        order.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
        order.truncate(n);
        order.into_iter().map(|(_, j)| j).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let rec = BarycentersRecord {
            means: self.means.iter().map(|m| m.coords().to_vec()).collect(),
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: BarycentersRecord = serde_json::from_str(s)?;
        if rec.means.is_empty() {
            return Err(Error::EmptyInput { what: "barycenters" });
        }
        let means = rec.means.into_iter().map(BallPoint::new).collect::<Result<Vec<_>>>()?;
        let dim = means[0].dim();
        if means.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: 0 });
        }
        Ok(CommunityBarycenters { means })
    }
}

#[derive(Serialize, Deserialize)]
struct BarycentersRecord {
    means: Vec<Vec<f64>>,
}

/// One maximization step from label-derived responsibilities
/// `w[i][k] = y[i][k] / Σ_k y[i][k]`. Every training row must be labeled
/// and every community must have at least one member — there is no rescue
/// re-seeding here, a missing class is an error.
pub fn supervised_gmm_fit(
    points: &[BallPoint],
    labels: &LabelMatrix,
    table: &ZetaTable,
    opts: &BarycenterOptions,
) -> Result<MixtureModel> {
    if points.len() != labels.n() {
        return Err(Error::DimensionMismatch { expected: labels.n(), found: points.len() });
    }
    let k = labels.k();
    if let Some(j) = labels.class_counts().iter().position(|&c| c == 0) {
        return Err(Error::DegenerateCluster { index: j });
    }
    let mut w = vec![0.0; labels.n() * k];
    for i in 0..labels.n() {
        let row = labels.memberships(i);
        if row.is_empty() {
            return Err(Error::Usage(format!("training node {i} carries no label")));
        }
        let share = 1.0 / row.len() as f64;
        for &j in row {
            w[i * k + j as usize] = share;
        }
    }
    let resp = Responsibilities::from_rows(labels.n(), k, w)?;
    // No column is empty, so the rescue stream is never consumed; the seed
    // is a fixed placeholder.
    let mut rescue = ChaCha8Rng::seed_from_u64(0);
    m_step(points, &resp, table, opts, &mut rescue)
}

/// Ranks communities by `ln pi_k + ln f(x | mu_k, sigma_k)` and returns the
/// top `n` columns, ties toward the smaller id. `priors` overrides the
/// model's mixing proportions (it is normalized internally); `None` uses
/// them as stored.
pub fn supervised_gmm_predict(
    model: &MixtureModel,
    priors: Option<&[f64]>,
    x: &BallPoint,
    n: usize,
) -> Result<Vec<u32>> {
    let k = model.k();
    let ln_priors: Vec<f64> = match priors {
        Some(p) => {
            if p.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonFinite { what: "class priors" });
            }
            let total: f64 = p.iter().sum();
            if total <= 0.0 {
                return Err(Error::EmptyInput { what: "class priors" });
            }
            p.iter().map(|v| (v / total).ln()).collect()
        }
        None => model.pi().iter().map(|v| v.ln()).collect(),
    };
    let mut order: Vec<(f64, u32)> = model
        .components()
        .iter()
        .zip(&ln_priors)
        .enumerate()
        .map(|(j, (c, lp))| Ok((-(lp + log_density(x, c)?), j as u32)))
        .collect::<Result<_>>()?;
    // Negated scores sort ascending, so equal scores fall to the smaller id.
    order.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    order.truncate(n);
    Ok(order.into_iter().map(|(_, j)| j).collect())
}

/// A geodesic decision surface: the set of points whose tangent direction
/// from `p` is orthogonal to `a`.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    p: BallPoint,
    a: TangentVector,
}

impl Hyperplane {
    /// `a` must be anchored at `p` and have nonzero direction.
    pub fn new(p: BallPoint, a: TangentVector) -> Result<Self> {
        if a.base() != &p {
            return Err(Error::Usage("hyperplane normal must be anchored at its offset".into()));
        }
        if a.norm() == 0.0 {
            return Err(Error::Usage("hyperplane normal must be nonzero".into()));
        }
        Ok(Hyperplane { p, a })
    }

    pub fn p(&self) -> &BallPoint {
        &self.p
    }

    pub fn a(&self) -> &TangentVector {
        &self.a
    }
}

/// Geodesic distance from `x` to the hyperplane:
/// `asinh( 2 |<(-p) ⊕ x, a>| / ((1 - ||(-p) ⊕ x||^2) ||a||) )`.
pub fn hyperplane_distance(x: &BallPoint, h: &Hyperplane) -> Result<f64> {
    Ok(signed_hyperplane_score(x, h)?.abs())
}

/// The signed variant: `asinh` of the same argument without the absolute
/// value, so the sign of `<(-p) ⊕ x, a>` picks the side of the surface.
pub fn signed_hyperplane_score(x: &BallPoint, h: &Hyperplane) -> Result<f64> {
    if x.dim() != h.p.dim() {
        return Err(Error::DimensionMismatch { expected: h.p.dim(), found: x.dim() });
    }
    let mut u = vec![0.0; x.dim()];
    kern::mobius_add_neg_x(h.p.coords(), x.coords(), &mut u);
    let e = 1.0 - kern::sq_norm(&u);
    let na = h.a.norm();
    Ok((2.0 * kern::dot(&u, h.a.components()) / (e * na)).asinh())
}

/// Hyperbolic logistic regression hyper-parameters: full-batch gradient
/// steps with rate `lr` for `epochs` rounds per community.
#[derive(Clone, Debug)]
pub struct HlrOptions {
    pub lr: f64,
    pub epochs: usize,
    pub bary: BarycenterOptions,
}

impl Default for HlrOptions {
    fn default() -> Self {
        HlrOptions { lr: 5e-2, epochs: 300, bary: BarycenterOptions::default() }
    }
}

/// One-vs-rest hyperbolic logistic regression: per community `k`, learns a
/// hyperplane minimizing the cross-entropy of
/// `P(z = k | x) = sigmoid(signed score)`, taking Riemannian steps on the
/// offset `p` and Euclidean steps on the normal `a` (re-anchored at the
/// moved `p` after every step). Starts from `p` at the barycenter of the
/// positives with `a` the unit tangent pointing away from the negatives'
/// barycenter.
pub fn hlr_fit(
    points: &[BallPoint],
    labels: &LabelMatrix,
    opts: &HlrOptions,
) -> Result<Vec<Hyperplane>> {
    if points.len() != labels.n() {
        return Err(Error::DimensionMismatch { expected: labels.n(), found: points.len() });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "training points" });
    }
    if !(opts.lr.is_finite() && opts.lr > 0.0) || opts.epochs == 0 {
        return Err(Error::Usage("logistic regression needs lr > 0 and epochs >= 1".into()));
    }
    let dim = points[0].dim();
    let k = labels.k();
    let counts = labels.class_counts();
    let mut planes = Vec::with_capacity(k);
    for j in 0..k {
        if counts[j] == 0 {
            return Err(Error::DegenerateCluster { index: j });
        }
        if counts[j] == labels.n() {
            // One-vs-rest needs at least one negative example.
            return Err(Error::DegenerateCluster { index: j });
        }
        let targets: Vec<f64> =
            (0..labels.n()).map(|i| f64::from(labels.contains(i, j as u32))).collect();
        let negatives: Vec<f64> = targets.iter().map(|t| 1.0 - t).collect();
        let pos_bary = weighted_barycenter(points, &targets, &opts.bary)?;
        let neg_bary = weighted_barycenter(points, &negatives, &opts.bary)?;
        let away = geometry::log_map(&pos_bary, &neg_bary)?;
        let norm = away.norm();
        let mut a: Vec<f64> = if norm > 1e-12 {
            away.components().iter().map(|c| -c / norm).collect()
        } else {
            // Coincident barycenters give no preferred direction; fall back
            // to the first coordinate axis.
            let mut e1 = vec![0.0; dim];
            e1[0] = 1.0;
            e1
        };
        let mut p = pos_bary.coords().to_vec();

        let mut grad_p = vec![0.0; dim];
        let mut grad_a = vec![0.0; dim];
        let mut next = vec![0.0; dim];
        for _ in 0..opts.epochs {
            let loss = hlr_loss_and_grads(points, &targets, &p, &a, &mut grad_p, &mut grad_a);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { what: "hyperbolic logistic regression" });
            }
            kern::rgd_step(&p, &grad_p, opts.lr, &mut next);
            p.copy_from_slice(&next);
            for (av, g) in a.iter_mut().zip(&grad_a) {
                *av -= opts.lr * g;
            }
        }
        let base = BallPoint::from_clamped(p);
        let normal = TangentVector::new(base.clone(), a)?;
        planes.push(Hyperplane::new(base, normal)?);
    }
    Ok(planes)
}

/// Mean cross-entropy of `sigmoid(signed score)` against `targets`, with
/// the Riemannian gradient in `p` written to `grad_p` and the Euclidean
/// gradient in `a` written to `grad_a`.
fn hlr_loss_and_grads(
    points: &[BallPoint],
    targets: &[f64],
    p: &[f64],
    a: &[f64],
    grad_p: &mut [f64],
    grad_a: &mut [f64],
) -> f64 {
    let n = points.len() as f64;
    let na2 = kern::sq_norm(a);
    let na = na2.sqrt();
    let p_sq = kern::sq_norm(p);
    let softplus = |v: f64| if v > 0.0 { v + (-v).exp().ln_1p() } else { v.exp().ln_1p() };

    grad_p.fill(0.0);
    grad_a.fill(0.0);
    let mut loss = 0.0;
    let mut u = vec![0.0; p.len()];
    for (x, &t) in points.iter().zip(targets) {
        let xc = x.coords();
        kern::mobius_add_neg_x(p, xc, &mut u);
        let e = 1.0 - kern::sq_norm(&u);
        let dot_ua = kern::dot(&u, a);
        let z = 2.0 * dot_ua / (e * na);
        let s = z.asinh();
        // Cross-entropy via softplus: -t ln P - (1-t) ln(1-P).
        loss += (t * softplus(-s) + (1.0 - t) * softplus(s)) / n;
        let sig = 1.0 / (1.0 + (-s).exp());
        let dldz = (sig - t) / n / (1.0 + z * z).sqrt();

        // dz/da = 2u / (e na) - (z / na^2) a.
        for ((ga, &uv), &av) in grad_a.iter_mut().zip(&u).zip(a) {
            *ga += dldz * (2.0 * uv / (e * na) - z * av / na2);
        }

        // dz/du = 2a / (e na) + (2z / e) u, pulled back through the
        // Jacobian of q ⊕ x in q = -p, then negated for d/dp.
        let gu: Vec<f64> = a
            .iter()
            .zip(&u)
            .map(|(&av, &uv)| dldz * (2.0 * av / (e * na) + 2.0 * z * uv / e))
            .collect();
        let x_sq = kern::sq_norm(xc);
        let qx = -kern::dot(p, xc);
        let a_coef = 1.0 + 2.0 * qx + x_sq;
        let d_coef = 1.0 + 2.0 * qx + p_sq * x_sq;
        let g_dot_q = -kern::dot(&gu, p);
        let g_dot_x = kern::dot(&gu, xc);
        let g_dot_u = kern::dot(&gu, &u);
        for i in 0..p.len() {
            let jt = (2.0 * xc[i] * g_dot_q + a_coef * gu[i] + 2.0 * p[i] * g_dot_x
                - g_dot_u * (2.0 * xc[i] - 2.0 * p[i] * x_sq))
                / d_coef;
            grad_p[i] -= jt;
        }
    }
    // Euclidean -> Riemannian gradient: scale by the inverse metric.
    let inv_metric = (1.0 - p_sq) * (1.0 - p_sq) / 4.0;
    for g in grad_p.iter_mut() {
        *g *= inv_metric;
    }
    loss
}

/// Ranks communities for `x` by one-vs-rest probability (equivalently, by
/// signed score) and returns the top `n`, ties toward the smaller id.
pub fn hlr_predict(planes: &[Hyperplane], x: &BallPoint, n: usize) -> Result<Vec<u32>> {
    let mut order: Vec<(f64, u32)> = planes
        .iter()
        .enumerate()
        .map(|(j, h)| Ok((-signed_hyperplane_score(x, h)?, j as u32)))
        .collect::<Result<_>>()?;
    order.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    order.truncate(n);
    Ok(order.into_iter().map(|(_, j)| j).collect())
}

/// One-vs-rest membership probability of `x` for each hyperplane.
pub fn hlr_probabilities(planes: &[Hyperplane], x: &BallPoint) -> Result<Vec<f64>> {
    planes
        .iter()
        .map(|h| Ok(1.0 / (1.0 + (-signed_hyperplane_score(x, h)?).exp())))
        .collect()
}

/// Serializable form of a fitted hyperplane set.
#[derive(Serialize, Deserialize)]
struct HyperplaneRecord {
    p: Vec<f64>,
    a: Vec<f64>,
}

pub fn hyperplanes_to_json(planes: &[Hyperplane]) -> Result<String> {
    let recs: Vec<HyperplaneRecord> = planes
        .iter()
        .map(|h| HyperplaneRecord {
            p: h.p.coords().to_vec(),
            a: h.a.components().to_vec(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&recs)?)
}

pub fn hyperplanes_from_json(s: &str) -> Result<Vec<Hyperplane>> {
    let recs: Vec<HyperplaneRecord> = serde_json::from_str(s)?;
    recs.into_iter()
        .map(|r| {
            let p = BallPoint::new(r.p)?;
            let a = TangentVector::new(p.clone(), r.a)?;
            Hyperplane::new(p, a)
        })
        .collect()
}

/// Community frequencies `y-hat = Σ_i y_i / Σ_i Σ_k y_ik` over the
/// training labels.
pub fn mcc_frequencies(labels: &LabelMatrix) -> Result<Vec<f64>> {
    let counts = labels.class_counts();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput { what: "training labels" });
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Most-common-community baseline: the `n` most frequent communities in
/// the training labels, ties toward the smaller id. Every query gets the
/// same answer.
pub fn mcc_baseline(labels: &LabelMatrix, n: usize) -> Result<Vec<u32>> {
    let freq = mcc_frequencies(labels)?;
    let mut order: Vec<(f64, u32)> =
        freq.iter().enumerate().map(|(j, &f)| (-f, j as u32)).collect();
    order.sort_by(|a, b| a.partial_cmp(b).expect("frequencies are finite"));
    order.truncate(n);
    Ok(order.into_iter().map(|(_, j)| j).collect())
}

/// Sampling variant of the baseline: draws `n` distinct communities
/// without replacement, proportional to their remaining frequency mass.
pub fn mcc_sampled(labels: &LabelMatrix, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u32>> {
    let mut freq = mcc_frequencies(labels)?;
    let n = n.min(freq.iter().filter(|&&f| f > 0.0).count());
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let dist = WeightedIndex::new(&freq)
            .map_err(|e| Error::Usage(format!("community frequencies unusable: {e}")))?;
        let j = dist.sample(rng);
        out.push(j as u32);
        freq[j] = 0.0;
    }
    Ok(out)
}

/// Which classifier a cross-validation run evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassifierKind {
    /// Nearest community barycenters.
    NearestBarycenter,
    /// Supervised mixture fit + Bayes-rule ranking.
    SupervisedGmm,
    /// One-vs-rest hyperbolic logistic regression.
    LogisticRegression,
    /// Most-common-community baseline.
    MostCommon,
}

/// Cross-validation settings: fold count and shuffle seed, the Precision@n
/// levels to report, and the per-classifier knobs.
#[derive(Clone, Debug)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub topn: Vec<usize>,
    pub bary: BarycenterOptions,
    pub hlr: HlrOptions,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 5,
            seed: 42,
            topn: vec![1],
            bary: BarycenterOptions::default(),
            hlr: HlrOptions::default(),
        }
    }
}

/// Per-fold Precision@n for each requested `n`, plus the folds that were
/// skipped because a community lost all its training members.
#[derive(Clone, Debug)]
pub struct CvReport {
    pub topn: Vec<usize>,
    /// `per_fold[t][f]` = Precision@`topn[t]` on evaluated fold `f`.
    pub per_fold: Vec<Vec<f64>>,
    /// Original fold indices that were skipped.
    pub skipped_folds: Vec<usize>,
}

/// K-fold cross-validation of one classifier over the labeled nodes:
/// fits on each training side, predicts top-n communities for the held-out
/// nodes, and scores Precision@n with identity matching. Folds whose
/// training side loses an entire community are skipped for the fitted
/// classifiers (the baseline never needs one) and reported as such.
pub fn cross_validate(
    points: &[BallPoint],
    labels: &LabelMatrix,
    kind: ClassifierKind,
    opts: &CvOptions,
) -> Result<CvReport> {
    if points.len() != labels.n() {
        return Err(Error::DimensionMismatch { expected: labels.n(), found: points.len() });
    }
    if opts.topn.is_empty() || opts.topn.contains(&0) {
        return Err(Error::Usage("precision levels must be nonempty and positive".into()));
    }
    let n_max = opts.topn.iter().copied().max().expect("nonempty").min(labels.k());
    let table = match kind {
        ClassifierKind::SupervisedGmm => Some(ZetaTable::new(points[0].dim())?),
        _ => None,
    };

    let folds = kfold(labels, opts.folds, opts.seed)?;
    let mut per_fold = vec![Vec::new(); opts.topn.len()];
    let mut skipped_folds = Vec::new();
    for (f, fold) in folds.iter().enumerate() {
        if !fold.missing_classes.is_empty() && kind != ClassifierKind::MostCommon {
            skipped_folds.push(f);
            continue;
        }
        let train_points: Vec<BallPoint> =
            fold.train.iter().map(|&i| points[i].clone()).collect();
        let train_labels = labels.subset(&fold.train)?;
        let predict: Box<dyn Fn(&BallPoint) -> Result<Vec<u32>>> = match kind {
            ClassifierKind::NearestBarycenter => {
                let fit = supervised_kmeans_fit(&train_points, &train_labels, &opts.bary)?;
                Box::new(move |x| Ok(fit.predict(x, n_max)))
            }
            ClassifierKind::SupervisedGmm => {
                let model = supervised_gmm_fit(
                    &train_points,
                    &train_labels,
                    table.as_ref().expect("built above"),
                    &opts.bary,
                )?;
                Box::new(move |x| supervised_gmm_predict(&model, None, x, n_max))
            }
            ClassifierKind::LogisticRegression => {
                let planes = hlr_fit(&train_points, &train_labels, &opts.hlr)?;
                Box::new(move |x| hlr_predict(&planes, x, n_max))
            }
            ClassifierKind::MostCommon => {
                let answer = mcc_baseline(&train_labels, n_max)?;
                Box::new(move |_| Ok(answer.clone()))
            }
        };
        let preds: Vec<Vec<u32>> = fold
            .validation
            .iter()
            .map(|&i| predict(&points[i]))
            .collect::<Result<_>>()?;
        let truth = labels.subset(&fold.validation)?;
        for (t, &n) in opts.topn.iter().enumerate() {
            let clipped: Vec<Vec<u32>> =
                preds.iter().map(|p| p[..n.min(p.len())].to_vec()).collect();
            per_fold[t].push(precision_at_n(&clipped, &truth, Matching::Identity)?);
        }
    }
    if per_fold[0].is_empty() {
        return Err(Error::EmptyInput { what: "evaluable folds" });
    }
    Ok(CvReport { topn: opts.topn.clone(), per_fold, skipped_folds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianComponent;
    use crate::geometry::{distance, exp_map, metric_inner};
    use rand::Rng;

    #[test]
    fn label_matrix_densifies_sparse_class_ids() {
        // Original ids 3 and 7 become columns 0 and 1.
        let y = LabelMatrix::from_memberships(vec![vec![7], vec![3], vec![3, 7], vec![]]).unwrap();
        assert_eq!(y.n(), 4);
        assert_eq!(y.k(), 2);
        assert_eq!(y.class_id(0), 3);
        assert_eq!(y.class_id(1), 7);
        assert_eq!(y.column_of(7), Some(1));
        assert_eq!(y.column_of(4), None);
        assert_eq!(y.memberships(0), &[1]);
        assert_eq!(y.memberships(2), &[0, 1]);
        assert!(!y.is_labeled(3));
        assert_eq!(y.labeled_nodes(), vec![0, 1, 2]);
        assert_eq!(y.class_counts(), vec![2, 2]);
        assert!(y.contains(2, 0) && !y.contains(0, 0));
    }

    #[test]
    fn label_matrix_needs_at_least_one_label() {
        assert!(matches!(
            LabelMatrix::from_memberships(vec![vec![], vec![]]),
            Err(Error::EmptyInput { .. })
        ));
    }

    #[test]
    fn single_assignment_requires_exactly_one_label_everywhere() {
        let y = LabelMatrix::from_assignment(&[0, 1, 0]).unwrap();
        assert_eq!(y.single_assignment(), Some(vec![0, 1, 0]));
        let multi = LabelMatrix::from_memberships(vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(multi.single_assignment(), None);
        let partial = LabelMatrix::from_memberships(vec![vec![0], vec![]]).unwrap();
        assert_eq!(partial.single_assignment(), None);
    }

    #[test]
    fn duplicate_ids_in_a_row_collapse() {
        let y = LabelMatrix::from_memberships(vec![vec![5, 5, 2]]).unwrap();
        assert_eq!(y.memberships(0), &[0, 1]);
    }

    #[test]
    fn subset_keeps_the_column_space() {
        let y = LabelMatrix::from_assignment(&[0, 1, 2, 1]).unwrap();
        let sub = y.subset(&[3, 0]).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.k(), 3);
        assert_eq!(sub.memberships(0), &[1]);
        assert_eq!(sub.memberships(1), &[0]);
        // Class 2 lost all members but keeps its column.
        assert_eq!(sub.class_counts(), vec![1, 1, 0]);
        assert!(y.subset(&[9]).is_err());
    }

    fn pt(coords: &[f64]) -> BallPoint {
        BallPoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn singleton_communities_rank_their_own_point_first() {
        let points = vec![pt(&[0.4, 0.0]), pt(&[-0.2, 0.3])];
        let labels = LabelMatrix::from_assignment(&[0, 1]).unwrap();
        let fit = supervised_kmeans_fit(&points, &labels, &BarycenterOptions::default()).unwrap();
        assert_eq!(fit.predict(&points[0], 2), vec![0, 1]);
        assert_eq!(fit.predict(&points[1], 1), vec![1]);
    }

    #[test]
    fn equidistant_query_prefers_the_smaller_community_id() {
        let points = vec![pt(&[-0.3, 0.0]), pt(&[0.3, 0.0])];
        // Deliberately reversed ids: the right point is community 0.
        let labels = LabelMatrix::from_assignment(&[1, 0]).unwrap();
        let fit = supervised_kmeans_fit(&points, &labels, &BarycenterOptions::default()).unwrap();
        let origin = pt(&[0.0, 0.0]);
        assert_eq!(fit.predict(&origin, 2), vec![0, 1]);
    }

    #[test]
    fn kmeans_fit_rejects_an_empty_community() {
        let points = vec![pt(&[0.1, 0.0]), pt(&[0.2, 0.0])];
        let full = LabelMatrix::from_assignment(&[0, 2]).unwrap();
        let labels = full.subset(&[0, 1]).unwrap();
        // Column 1 (original id 2) keeps members; fabricate emptiness by
        // taking only node 0.
        let partial = full.subset(&[0]).unwrap();
        assert!(matches!(
            supervised_kmeans_fit(&points[..1], &partial, &BarycenterOptions::default()),
            Err(Error::DegenerateCluster { index: 1 })
        ));
        assert!(supervised_kmeans_fit(&points, &labels, &BarycenterOptions::default()).is_ok());
    }

    #[test]
    fn multi_label_members_pull_every_one_of_their_barycenters() {
        let opts = BarycenterOptions::default();
        let points = vec![pt(&[0.5, 0.0]), pt(&[-0.5, 0.0]), pt(&[0.0, 0.4])];
        let labels =
            LabelMatrix::from_memberships(vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        let fit = supervised_kmeans_fit(&points, &labels, &opts).unwrap();
        let solo0 = weighted_barycenter(&points[..1], &[1.0], &opts).unwrap();
        // Community 0's mean moved toward the shared node.
        assert!(distance(&fit.means()[0], &points[2]).unwrap()
            < distance(&solo0, &points[2]).unwrap());
        let direct =
            weighted_barycenter(&points, &[1.0, 0.0, 1.0], &opts).unwrap();
        assert_eq!(fit.means()[0], direct);
    }

    #[test]
    fn supervised_fit_means_are_per_class_barycenters() {
        let points = vec![
            pt(&[0.3, 0.1]),
            pt(&[0.4, -0.1]),
            pt(&[-0.3, 0.2]),
            pt(&[-0.4, 0.0]),
        ];
        let labels = LabelMatrix::from_assignment(&[0, 0, 1, 1]).unwrap();
        let table = ZetaTable::new(2).unwrap();
        let opts = BarycenterOptions::default();
        let model = supervised_gmm_fit(&points, &labels, &table, &opts).unwrap();
        for j in 0..2 {
            let weights: Vec<f64> =
                (0..4).map(|i| f64::from(labels.contains(i, j as u32))).collect();
            let bary = weighted_barycenter(&points, &weights, &opts).unwrap();
            let gap = distance(model.components()[j].mu(), &bary).unwrap();
            assert!(gap < 1e-12, "class {j} mean off by {gap}");
        }
        assert_eq!(model.pi(), &[0.5, 0.5]);
    }

    #[test]
    fn shared_members_split_their_weight() {
        // Nodes: one per class 0..3 plus one node in classes {0, 1}.
        let points = vec![
            pt(&[0.3, 0.0]),
            pt(&[-0.3, 0.0]),
            pt(&[0.0, 0.3]),
            pt(&[0.0, -0.3]),
            pt(&[0.1, 0.1]),
        ];
        let labels = LabelMatrix::from_memberships(vec![
            vec![0],
            vec![1],
            vec![2],
            vec![3],
            vec![0, 1],
        ])
        .unwrap();
        let table = ZetaTable::new(2).unwrap();
        let model =
            supervised_gmm_fit(&points, &labels, &table, &BarycenterOptions::default()).unwrap();
        // Column sums 1.5, 1.5, 1, 1 over 5 nodes.
        let want = [0.3, 0.3, 0.2, 0.2];
        for (got, want) in model.pi().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn supervised_fit_requires_full_coverage_and_labels() {
        let points = vec![pt(&[0.1, 0.0]), pt(&[0.2, 0.0])];
        let table = ZetaTable::new(2).unwrap();
        let opts = BarycenterOptions::default();
        let two_class = LabelMatrix::from_assignment(&[0, 1]).unwrap();
        let missing = two_class.subset(&[0, 0]).unwrap();
        assert!(matches!(
            supervised_gmm_fit(&points, &missing, &table, &opts),
            Err(Error::DegenerateCluster { index: 1 })
        ));
        let unlabeled =
            LabelMatrix::from_memberships(vec![vec![0], vec![]]).unwrap();
        assert!(matches!(
            supervised_gmm_fit(&points, &unlabeled, &table, &opts),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn dominant_component_wins_at_its_own_mean() {
        let model = MixtureModel::new(
            vec![
                GaussianComponent::new(pt(&[0.5, 0.0]), 0.2).unwrap(),
                GaussianComponent::new(pt(&[-0.5, 0.0]), 0.2).unwrap(),
            ],
            vec![0.9, 0.1],
        )
        .unwrap();
        let top = supervised_gmm_predict(&model, None, &pt(&[0.5, 0.0]), 2).unwrap();
        assert_eq!(top, vec![0, 1]);
        let other = supervised_gmm_predict(&model, None, &pt(&[-0.5, 0.0]), 1).unwrap();
        assert_eq!(other, vec![1]);
    }

    #[test]
    fn uniform_priors_and_shared_sigma_reduce_to_nearest_barycenter() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let means: Vec<BallPoint> =
            (0..4).map(|_| BallPoint::sample_uniform(2, 0.7, &mut rng)).collect();
        let model = MixtureModel::new(
            means
                .iter()
                .map(|m| GaussianComponent::new(m.clone(), 0.3).unwrap())
                .collect(),
            vec![0.4, 0.3, 0.2, 0.1],
        )
        .unwrap();
        let fit = CommunityBarycenters { means };
        let uniform = [1.0, 1.0, 1.0, 1.0];
        for _ in 0..50 {
            let x = BallPoint::sample_uniform(2, 0.9, &mut rng);
            let bayes = supervised_gmm_predict(&model, Some(&uniform), &x, 4).unwrap();
            let nearest = fit.predict(&x, 4);
            assert_eq!(bayes, nearest);
        }
    }

    #[test]
    fn hyperplane_distance_matches_the_hand_cases() {
        let p = pt(&[0.2, -0.1]);
        let a = TangentVector::new(p.clone(), vec![0.3, 0.4]).unwrap();
        let h = Hyperplane::new(p.clone(), a).unwrap();
        // x = p: the translated point is the origin.
        assert!(hyperplane_distance(&p, &h).unwrap().abs() < 1e-15);
        // p = 0, a = e1, x on the e2 axis: the inner product vanishes.
        let origin = pt(&[0.0, 0.0]);
        let e1 = TangentVector::new(origin.clone(), vec![1.0, 0.0]).unwrap();
        let h0 = Hyperplane::new(origin, e1).unwrap();
        assert!(hyperplane_distance(&pt(&[0.0, 0.5]), &h0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn hyperplane_distance_ignores_normal_scale_and_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = BallPoint::sample_uniform(3, 0.8, &mut rng);
            let x = BallPoint::sample_uniform(3, 0.8, &mut rng);
            let dir: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if kern::sq_norm(&dir) < 1e-6 {
                continue;
            }
            let base = hyperplane_distance(
                &x,
                &Hyperplane::new(p.clone(), TangentVector::new(p.clone(), dir.clone()).unwrap())
                    .unwrap(),
            )
            .unwrap();
            for factor in [3.5, -1.0, -0.2] {
                let scaled: Vec<f64> = dir.iter().map(|c| c * factor).collect();
                let d = hyperplane_distance(
                    &x,
                    &Hyperplane::new(p.clone(), TangentVector::new(p.clone(), scaled).unwrap())
                        .unwrap(),
                )
                .unwrap();
                assert!((d - base).abs() < 1e-12 * base.max(1.0));
            }
            assert!(base >= 0.0);
        }
    }

    #[test]
    fn hyperplane_needs_matching_base_and_nonzero_normal() {
        let p = pt(&[0.1, 0.0]);
        let q = pt(&[0.0, 0.1]);
        let at_q = TangentVector::new(q, vec![1.0, 0.0]).unwrap();
        assert!(Hyperplane::new(p.clone(), at_q).is_err());
        let zero = TangentVector::zero(p.clone());
        assert!(Hyperplane::new(p, zero).is_err());
    }

    #[test]
    fn logistic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points: Vec<BallPoint> =
            (0..6).map(|_| BallPoint::sample_uniform(2, 0.7, &mut rng)).collect();
        let targets = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let p = [0.15, -0.2];
        let a = [0.8, -0.4];
        let mut grad_p = [0.0; 2];
        let mut grad_a = [0.0; 2];
        hlr_loss_and_grads(&points, &targets, &p, &a, &mut grad_p, &mut grad_a);

        let loss_at = |p: &[f64], a: &[f64]| {
            let mut gp = [0.0; 2];
            let mut ga = [0.0; 2];
            hlr_loss_and_grads(&points, &targets, p, a, &mut gp, &mut ga)
        };
        let h = 1e-6;
        // Euclidean parameter: plain central differences per coordinate.
        for i in 0..2 {
            let mut hi = a;
            let mut lo = a;
            hi[i] += h;
            lo[i] -= h;
            let fd = (loss_at(&p, &hi) - loss_at(&p, &lo)) / (2.0 * h);
            let rel = (fd - grad_a[i]).abs() / grad_a[i].abs().max(1e-3);
            assert!(rel < 1e-5, "grad_a[{i}]: fd {fd} vs {}", grad_a[i]);
        }
        // Ball parameter: directional derivatives through the exponential
        // map against the metric inner product with the Riemannian gradient.
        let base = BallPoint::new(p.to_vec()).unwrap();
        for dir in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
            let shoot = |t: f64| {
                let v =
                    TangentVector::new(base.clone(), dir.iter().map(|d| d * t).collect()).unwrap();
                let moved = exp_map(&v);
                loss_at(moved.coords(), &a)
            };
            let fd = (shoot(h) - shoot(-h)) / (2.0 * h);
            let analytic = metric_inner(&base, &grad_p, &dir).unwrap();
            let rel = (fd - analytic).abs() / analytic.abs().max(1e-3);
            assert!(rel < 1e-5, "grad_p along {dir:?}: fd {fd} vs {analytic}");
        }
    }

    #[test]
    fn separable_classes_on_a_diameter_reach_full_training_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut points = Vec::new();
        let mut assign = Vec::new();
        for i in 0..30 {
            let side = if i % 2 == 0 { 1.0 } else { -1.0 };
            let x = side * rng.gen_range(0.2..0.7);
            let y: f64 = rng.gen_range(-0.25..0.25);
            points.push(pt(&[x, y]));
            assign.push(usize::from(side < 0.0));
        }
        let labels = LabelMatrix::from_assignment(&assign).unwrap();
        let planes = hlr_fit(&points, &labels, &HlrOptions::default()).unwrap();
        assert_eq!(planes.len(), 2);
        for (x, &truth) in points.iter().zip(&assign) {
            let top = hlr_predict(&planes, x, 1).unwrap();
            assert_eq!(top[0] as usize, truth, "misclassified {:?}", x.coords());
            let probs = hlr_probabilities(&planes, x).unwrap();
            assert!(probs.iter().all(|&q| q > 0.0 && q < 1.0));
            // The two one-vs-rest scores agree with the decision.
            assert_eq!(usize::from(probs[1] > probs[0]), truth);
        }
    }

    #[test]
    fn logistic_fit_rejects_degenerate_label_sets() {
        let points = vec![pt(&[0.1, 0.0]), pt(&[0.2, 0.0])];
        let one_class = LabelMatrix::from_assignment(&[0, 0]).unwrap();
        assert!(matches!(
            hlr_fit(&points, &one_class, &HlrOptions::default()),
            Err(Error::DegenerateCluster { .. })
        ));
        let two = LabelMatrix::from_assignment(&[0, 1]).unwrap();
        let empty = two.subset(&[0, 0]).unwrap();
        assert!(hlr_fit(&points, &empty, &HlrOptions::default()).is_err());
    }

    #[test]
    fn hyperplanes_round_trip_through_json() {
        let p = pt(&[0.2, -0.1]);
        let a = TangentVector::new(p.clone(), vec![0.3, 0.4]).unwrap();
        let planes = vec![Hyperplane::new(p, a).unwrap()];
        let json = hyperplanes_to_json(&planes).unwrap();
        let back = hyperplanes_from_json(&json).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].p(), planes[0].p());
        assert_eq!(back[0].a().components(), planes[0].a().components());
        let x = pt(&[0.4, 0.2]);
        assert_eq!(
            hyperplane_distance(&x, &back[0]).unwrap(),
            hyperplane_distance(&x, &planes[0]).unwrap()
        );
    }

    #[test]
    fn barycenters_round_trip_through_json() {
        let points = vec![pt(&[0.4, 0.0]), pt(&[-0.2, 0.3])];
        let labels = LabelMatrix::from_assignment(&[0, 1]).unwrap();
        let fit = supervised_kmeans_fit(&points, &labels, &BarycenterOptions::default()).unwrap();
        let back = CommunityBarycenters::from_json(&fit.to_json().unwrap()).unwrap();
        assert_eq!(back.means(), fit.means());
    }

    #[test]
    fn most_common_community_ranks_by_frequency() {
        let labels = LabelMatrix::from_assignment(&[0, 0, 0, 1, 1, 1, 1, 2, 2, 2]).unwrap();
        let freq = mcc_frequencies(&labels).unwrap();
        assert!((freq.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(mcc_baseline(&labels, 1).unwrap(), vec![1]);
        // Classes 0 and 2 tie at 3 members: smaller id first.
        assert_eq!(mcc_baseline(&labels, 3).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn sampled_baseline_draws_distinct_ids_deterministically() {
        let labels = LabelMatrix::from_assignment(&[0, 0, 0, 0, 0, 0, 1, 1, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draw = mcc_sampled(&labels, 3, &mut rng).unwrap();
        assert_eq!(draw.len(), 3);
        let mut sorted = draw.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 3, "draws must be distinct: {draw:?}");
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(mcc_sampled(&labels, 3, &mut rng2).unwrap(), draw);
        // Over many seeds the majority class nearly always leads.
        let lead_majority = (0..200)
            .filter(|&s| {
                let mut r = ChaCha8Rng::seed_from_u64(s);
                mcc_sampled(&labels, 1, &mut r).unwrap()[0] == 0
            })
            .count();
        assert!(lead_majority > 90, "majority led only {lead_majority}/200");
    }

    /// Two well-separated blobs of 10 points each.
    fn blob_data(seed: u64) -> (Vec<BallPoint>, LabelMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut assign = Vec::new();
        for i in 0..20 {
            let side = if i % 2 == 0 { 0.5 } else { -0.5 };
            let x = side + rng.gen_range(-0.08..0.08);
            let y = rng.gen_range(-0.08..0.08);
            points.push(pt(&[x, y]));
            assign.push(usize::from(side < 0.0));
        }
        (points, LabelMatrix::from_assignment(&assign).unwrap())
    }

    #[test]
    fn cross_validation_is_deterministic_and_scores_separable_data_perfectly() {
        let (points, labels) = blob_data(31);
        let opts = CvOptions { topn: vec![1, 2], ..CvOptions::default() };
        for kind in [
            ClassifierKind::NearestBarycenter,
            ClassifierKind::SupervisedGmm,
            ClassifierKind::LogisticRegression,
        ] {
            let report = cross_validate(&points, &labels, kind, &opts).unwrap();
            assert!(report.skipped_folds.is_empty());
            assert_eq!(report.per_fold[0].len(), 5);
            for &p1 in &report.per_fold[0] {
                assert_eq!(p1, 1.0, "{kind:?} misclassified a separable fold");
            }
            // Precision@2 with K = 2 is trivially 1.
            for &p2 in &report.per_fold[1] {
                assert_eq!(p2, 1.0);
            }
            let again = cross_validate(&points, &labels, kind, &opts).unwrap();
            assert_eq!(report.per_fold, again.per_fold);
        }
        let mcc = cross_validate(&points, &labels, ClassifierKind::MostCommon, &opts).unwrap();
        // Balanced classes: the baseline hovers near one half.
        let mean =
            mcc.per_fold[0].iter().sum::<f64>() / mcc.per_fold[0].len() as f64;
        assert!((0.2..=0.8).contains(&mean), "baseline mean {mean}");
    }

    #[test]
    fn folds_that_lose_a_community_are_skipped_for_fitted_classifiers() {
        // Ten labeled nodes, one lone member of class 2: exactly one of the
        // five folds holds it out and must be skipped.
        let mut points = Vec::new();
        let mut assign = Vec::new();
        for i in 0..9 {
            let side = if i % 2 == 0 { 0.4 } else { -0.4 };
            points.push(pt(&[side, 0.01 * i as f64]));
            assign.push(usize::from(side < 0.0));
        }
        points.push(pt(&[0.0, 0.6]));
        assign.push(2);
        let labels = LabelMatrix::from_assignment(&assign).unwrap();
        let opts = CvOptions::default();
        let report =
            cross_validate(&points, &labels, ClassifierKind::NearestBarycenter, &opts).unwrap();
        assert_eq!(report.skipped_folds.len(), 1);
        assert_eq!(report.per_fold[0].len(), 4);
        let mcc =
            cross_validate(&points, &labels, ClassifierKind::MostCommon, &opts).unwrap();
        assert!(mcc.skipped_folds.is_empty());
        assert_eq!(mcc.per_fold[0].len(), 5);
    }
}
