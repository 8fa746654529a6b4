//! Mixtures of Riemannian Gaussians: weighted barycenters, EM, and K-Means
//! on the Poincaré ball.
//!
//! The mean of a cluster is the Riemannian barycenter, computed by the
//! fixed-point iteration
//! `mu <- Exp_mu(lambda * (2 / Σw) * Σ_i w_i Log_mu(x_i))`, and σ comes from
//! inverting the mean-squared-distance map `Phi^{-1}` on the precomputed
//! grid (see [`crate::gaussian::ZetaTable`]). EM alternates soft
//! assignments with per-component maximum likelihood; K-Means is the hard
//! counterpart sharing the same barycenter.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{eval_zeta, mle, GaussianComponent, ZetaTable};
use crate::geometry::{kern, BallPoint};
use crate::numeric::logsumexp;

/// Fixed-point iteration controls for the weighted barycenter.
#[derive(Clone, Debug)]
pub struct BarycenterOptions {
    /// Step scale of the update `Exp_mu(lambda * (2/Σw) Σ w_i Log_mu x_i)`.
    pub lambda: f64,
    /// Stop once the applied update's Euclidean norm drops below this.
    pub eps: f64,
    /// Iteration cap; exceeding it is a convergence error.
    pub max_iters: usize,
}

impl Default for BarycenterOptions {
    fn default() -> Self {
        BarycenterOptions { lambda: 5e-2, eps: 1e-4, max_iters: 1000 }
    }
}

/// Weighted Riemannian barycenter of `points` under non-negative `weights`.
///
/// Scale-invariant in the weights (only ratios matter). Starts from the
/// weighted Euclidean mean clamped into the ball and iterates the
/// fixed-point update until the step norm falls below `opts.eps`.
pub fn weighted_barycenter(
    points: &[BallPoint],
    weights: &[f64],
    opts: &BarycenterOptions,
) -> Result<BallPoint> {
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "barycenter points" });
    }
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
    }
    let dim = points[0].dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: points.iter().find(|p| p.dim() != dim).unwrap().dim(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFinite { what: "barycenter weights" });
    }
    let total: f64 = weights.iter().sum();
    if total < 1e-12 {
        return Err(Error::DegenerateCluster { index: 0 });
    }

    // Euclidean weighted mean as the starting point; convex combinations of
    // in-ball points stay in the ball, the clamp only guards rounding.
    let mut mu = vec![0.0; dim];
    for (p, w) in points.iter().zip(weights) {
        for (m, c) in mu.iter_mut().zip(p.coords()) {
            *m += w * c;
        }
    }
    for m in mu.iter_mut() {
        *m /= total;
    }
    kern::clamp_ball(&mut mu);

    let mut log = vec![0.0; dim];
    let mut step = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let scale = 2.0 * opts.lambda / total;
    for _ in 0..opts.max_iters {
        step.fill(0.0);
        for (p, w) in points.iter().zip(weights) {
            if *w == 0.0 {
                continue;
            }
            kern::log_map(&mu, p.coords(), &mut log);
            for (s, l) in step.iter_mut().zip(&log) {
                *s += w * l;
            }
        }
        for s in step.iter_mut() {
            *s *= scale;
        }
        if kern::sq_norm(&step).sqrt() < opts.eps {
            return Ok(BallPoint::from_clamped(mu));
        }
        kern::exp_map(&mu, &step, &mut next);
        std::mem::swap(&mut mu, &mut next);
    }
    Err(Error::NoConvergence { what: "weighted_barycenter", iters: opts.max_iters, last: mu })
}

/// A mixture: component parameters plus mixing proportions.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureModel {
    components: Vec<GaussianComponent>,
    pi: Vec<f64>,
}

/// JSON schema of a serialized mixture.
#[derive(Serialize, Deserialize)]
struct MixtureFile {
    dim: usize,
    #[serde(rename = "K")]
    k: usize,
    pi: Vec<f64>,
    components: Vec<GaussianComponent>,
}

impl MixtureModel {
    /// Validates shapes and that `pi` is a distribution (renormalized to
    /// remove accumulated rounding; rejected if off by more than 1e-6).
    pub fn new(components: Vec<GaussianComponent>, mut pi: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput { what: "mixture components" });
        }
        if components.len() != pi.len() {
            return Err(Error::DimensionMismatch {
                expected: components.len(),
                found: pi.len(),
            });
        }
        let dim = components[0].mu().dim();
        if components.iter().any(|c| c.mu().dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: 0 });
        }
        if pi.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::NonFinite { what: "mixing proportions" });
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Usage(format!("mixing proportions sum to {total}, not 1")));
        }
        for p in pi.iter_mut() {
            *p /= total;
        }
        Ok(MixtureModel { components, pi })
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].mu().dim()
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Serializes as `{dim, K, pi, components: [{mu, sigma}, ...]}`.
    pub fn to_json(&self) -> Result<String> {
        let file = MixtureFile {
            dim: self.dim(),
            k: self.k(),
            pi: self.pi.clone(),
            components: self.components.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses and validates the JSON produced by [`MixtureModel::to_json`].
    pub fn from_json(s: &str) -> Result<Self> {
        let file: MixtureFile = serde_json::from_str(s)?;
        if file.k != file.components.len() {
            return Err(Error::Usage(format!(
                "mixture file: K = {} but {} components",
                file.k,
                file.components.len()
            )));
        }
        let model = MixtureModel::new(file.components, file.pi)?;
        if model.dim() != file.dim {
            return Err(Error::Usage(format!(
                "mixture file: dim = {} but components have dimension {}",
                file.dim,
                model.dim()
            )));
        }
        for c in model.components() {
            if c.sigma() <= 0.0 || !c.sigma().is_finite() {
                return Err(Error::NonFinite { what: "component sigma" });
            }
        }
        Ok(model)
    }

    pub fn save<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let s = self.to_json()?;
        w.write_all(s.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn load<R: std::io::Read>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json(&s)
    }
}

/// Soft assignments: row-major `n x k`, rows summing to 1.
#[derive(Clone, Debug)]
pub struct Responsibilities {
    n: usize,
    k: usize,
    w: Vec<f64>,
}

impl Responsibilities {
    /// Builds from a row-major weight matrix; every row must already be a
    /// distribution over the `k` components.
    pub fn from_rows(n: usize, k: usize, w: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 || w.len() != n * k {
            return Err(Error::Usage(format!(
                "responsibilities shape mismatch: {} values for {n} x {k}",
                w.len()
            )));
        }
        for i in 0..n {
            let row = &w[i * k..(i + 1) * k];
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonFinite { what: "responsibilities" });
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Usage(format!("responsibility row {i} sums to {s}")));
            }
        }
        Ok(Responsibilities { n, k, w })
    }

    /// One-hot rows from hard assignments.
    pub fn from_assignments(assignments: &[usize], k: usize) -> Result<Self> {
        if assignments.is_empty() || k == 0 {
            return Err(Error::EmptyInput { what: "assignments" });
        }
        if let Some(bad) = assignments.iter().find(|a| **a >= k) {
            return Err(Error::Usage(format!("assignment {bad} out of range for k = {k}")));
        }
        let n = assignments.len();
        let mut w = vec![0.0; n * k];
        for (i, a) in assignments.iter().enumerate() {
            w[i * k + a] = 1.0;
        }
        Ok(Responsibilities { n, k, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.k..(i + 1) * self.k]
    }

    /// Index of the largest responsibility in row `i` (ties -> smaller id).
    pub fn argmax(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = 0;
        for (j, v) in row.iter().enumerate().skip(1) {
            if *v > row[best] {
                best = j;
            }
        }
        best
    }

    /// Mean absolute difference against another matrix of the same shape.
    pub fn mean_abs_diff(&self, other: &Responsibilities) -> f64 {
        debug_assert_eq!(self.w.len(), other.w.len());
        let s: f64 = self.w.iter().zip(&other.w).map(|(a, b)| (a - b).abs()).sum();
        s / self.w.len() as f64
    }
}

/// E-step output: the responsibilities and the observed-data log-likelihood
/// `Σ_i ln Σ_k pi_k f(x_i | k)` under the model that produced them.
pub struct EStep {
    pub resp: Responsibilities,
    pub log_likelihood: f64,
}

/// Soft assignment of every point to every component, in log space, each
/// row normalized across components.
pub fn e_step(points: &[BallPoint], model: &MixtureModel) -> Result<EStep> {
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "e_step points" });
    }
    let dim = model.dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: points[0].dim() });
    }
    let k = model.k();
    let n = points.len();
    // Per-component constants: ln pi_k - ln zeta(sigma_k) and 1/(2 sigma^2).
    let consts: Vec<(f64, f64)> = model
        .components
        .iter()
        .zip(&model.pi)
        .map(|(c, p)| {
            let ln_norm = p.ln() - eval_zeta(dim, c.sigma()).ln_zeta;
            (ln_norm, 0.5 / (c.sigma() * c.sigma()))
        })
        .collect();

    let mut w = vec![0.0; n * k];
    let lls: Vec<f64> = w
        .par_chunks_mut(k)
        .enumerate()
        .map(|(i, row)| {
            let x = points[i].coords();
            for (j, c) in model.components.iter().enumerate() {
                let d2 = kern::dist_sq(x, c.mu().coords());
                row[j] = consts[j].0 - d2 * consts[j].1;
            }
            let lse = logsumexp(row);
            if lse == f64::NEG_INFINITY {
                row.fill(1.0 / k as f64);
                return f64::NEG_INFINITY;
            }
            for v in row.iter_mut() {
                *v = (*v - lse).exp();
            }
            lse
        })
        .collect();
    let log_likelihood = lls.iter().sum();
    Ok(EStep { resp: Responsibilities { n, k, w }, log_likelihood })
}

/// M-step: mixing proportions from column means, each component refit by
/// weighted maximum likelihood. A column whose total weight is below 1e-12
/// is re-seeded at a random data point (drawn from `rescue`), its spread
/// reset from the unweighted mean squared distance and its proportion
/// floored at `1/n`.
pub fn m_step(
    points: &[BallPoint],
    resp: &Responsibilities,
    table: &ZetaTable,
    opts: &BarycenterOptions,
    rescue: &mut ChaCha8Rng,
) -> Result<MixtureModel> {
    if points.len() != resp.n() {
        return Err(Error::DimensionMismatch { expected: resp.n(), found: points.len() });
    }
    let n = points.len();
    let k = resp.k();
    let mut col_sums = vec![0.0; k];
    for i in 0..n {
        for (j, v) in resp.row(i).iter().enumerate() {
            col_sums[j] += v;
        }
    }
    // Decide rescues first so rng consumption is in component order and
    // independent of the parallel fitting below.
    let rescue_at: Vec<Option<usize>> = col_sums
        .iter()
        .map(|s| if *s < 1e-12 { Some(rescue.gen_range(0..n)) } else { None })
        .collect();

    let fits: Vec<Result<GaussianComponent>> = (0..k)
        .into_par_iter()
        .map(|j| {
            if let Some(seed_idx) = rescue_at[j] {
                let mu = points[seed_idx].clone();
                let msd = points
                    .iter()
                    .map(|p| kern::dist_sq(p.coords(), mu.coords()))
                    .sum::<f64>()
                    / n as f64;
                return GaussianComponent::new(mu, table.sigma_for_msd(msd));
            }
            let weights: Vec<f64> = (0..n).map(|i| resp.row(i)[j]).collect();
            mle(points, &weights, table, opts)
        })
        .collect();

    let mut components = Vec::with_capacity(k);
    for f in fits {
        components.push(f?);
    }
    let mut pi: Vec<f64> = col_sums.iter().map(|s| s / n as f64).collect();
    for (j, p) in pi.iter_mut().enumerate() {
        if rescue_at[j].is_some() {
            *p = (*p).max(1.0 / n as f64);
        }
    }
    let total: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p /= total;
    }
    MixtureModel::new(components, pi)
}

/// How to seed a fit.
#[derive(Clone, Debug)]
pub enum InitPolicy {
    /// D^2-weighted farthest-point seeding from the data, then hard
    /// assignment and one M-step.
    KMeansPlusPlus { seed: u64 },
    /// Explicit starting centroids.
    Centroids(Vec<BallPoint>),
    /// Resume from a full model (EM) / its means (K-Means).
    Model(MixtureModel),
}

/// EM controls.
#[derive(Clone, Debug)]
pub struct EmOptions {
    pub max_iters: usize,
    /// Converged when the mean absolute responsibility change per entry
    /// drops below this.
    pub w_tol: f64,
    pub bary: BarycenterOptions,
    /// Stream for degenerate-component rescues.
    pub rescue_seed: u64,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions { max_iters: 100, w_tol: 1e-4, bary: BarycenterOptions::default(), rescue_seed: 0 }
    }
}

/// A completed EM fit.
pub struct EmFit {
    pub model: MixtureModel,
    pub resp: Responsibilities,
    /// Observed-data log-likelihood after each E-step.
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Fits a `k`-component mixture by EM. Stops when responsibilities move
/// less than `opts.w_tol` on average, or after `opts.max_iters` iterations
/// (returned with `converged = false`, not an error). The returned model
/// and responsibilities are a consistent pair (the responsibilities were
/// computed under the returned model).
pub fn em_fit(
    points: &[BallPoint],
    k: usize,
    init: InitPolicy,
    table: &ZetaTable,
    opts: &EmOptions,
) -> Result<EmFit> {
    validate_fit_inputs(points, k, table)?;
    let mut rescue = ChaCha8Rng::seed_from_u64(opts.rescue_seed);
    let mut model = match init {
        InitPolicy::Model(m) => {
            if m.k() != k || m.dim() != table.dim() {
                return Err(Error::Usage("init model shape mismatch".into()));
            }
            m
        }
        InitPolicy::Centroids(c) => {
            model_from_centroids(points, c, k, table, &opts.bary, &mut rescue)?
        }
        InitPolicy::KMeansPlusPlus { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let centroid_ids = kmeans_pp_indices(points, k, &mut rng);
            let centroids = centroid_ids.iter().map(|i| points[*i].clone()).collect();
            model_from_centroids(points, centroids, k, table, &opts.bary, &mut rescue)?
        }
    };

    let mut log_likelihoods = Vec::new();
    let mut prev_resp: Option<Responsibilities> = None;
    for iter in 0..opts.max_iters {
        let EStep { resp, log_likelihood } = e_step(points, &model)?;
        log_likelihoods.push(log_likelihood);
        let moved = prev_resp.as_ref().map(|p| resp.mean_abs_diff(p));
        if let Some(delta) = moved {
            if delta < opts.w_tol {
                return Ok(EmFit {
                    model,
                    resp,
                    log_likelihoods,
                    iterations: iter,
                    converged: true,
                });
            }
        }
        model = m_step(points, &resp, table, &opts.bary, &mut rescue)?;
        prev_resp = Some(resp);
    }
    // Out of iterations: do a final E-step so the pair is consistent.
    let EStep { resp, log_likelihood } = e_step(points, &model)?;
    log_likelihoods.push(log_likelihood);
    Ok(EmFit { model, resp, log_likelihoods, iterations: opts.max_iters, converged: false })
}

fn validate_fit_inputs(points: &[BallPoint], k: usize, table: &ZetaTable) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "fit points" });
    }
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::Usage(format!("k = {k} exceeds {} points", points.len())));
    }
    if points.iter().any(|p| p.dim() != table.dim()) {
        return Err(Error::DimensionMismatch { expected: table.dim(), found: points[0].dim() });
    }
    Ok(())
}

/// Hard-assigns points to the given centroids and runs one M-step.
fn model_from_centroids(
    points: &[BallPoint],
    centroids: Vec<BallPoint>,
    k: usize,
    table: &ZetaTable,
    bary: &BarycenterOptions,
    rescue: &mut ChaCha8Rng,
) -> Result<MixtureModel> {
    if centroids.len() != k {
        return Err(Error::Usage(format!("{} centroids for k = {k}", centroids.len())));
    }
    let assignments = assign_nearest(points, &centroids);
    let resp = Responsibilities::from_assignments(&assignments, k)?;
    m_step(points, &resp, table, bary, rescue)
}

/// Nearest-centroid assignment; ties resolve to the smaller index.
fn assign_nearest(points: &[BallPoint], centroids: &[BallPoint]) -> Vec<usize> {
    points
        .par_iter()
        .map(|p| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = kern::dist_sq(p.coords(), c.coords());
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// D^2-weighted seeding: first centroid uniform, each next drawn with
/// probability proportional to the squared distance to the nearest chosen
/// one. Falls back to uniform when all residual distances vanish.
fn kmeans_pp_indices(points: &[BallPoint], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| kern::dist_sq(p.coords(), points[chosen[0]].coords()))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            WeightedIndex::new(&d2).map(|w| w.sample(rng)).unwrap_or_else(|_| rng.gen_range(0..n))
        } else {
            rng.gen_range(0..n)
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            let d = kern::dist_sq(p.coords(), points[next].coords());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
}

/// K-Means controls.
#[derive(Clone, Debug)]
pub struct KmeansOptions {
    pub max_iters: usize,
    pub bary: BarycenterOptions,
}

impl Default for KmeansOptions {
    fn default() -> Self {
        KmeansOptions { max_iters: 200, bary: BarycenterOptions::default() }
    }
}

/// A completed K-Means fit.
pub struct KmeansFit {
    pub centroids: Vec<BallPoint>,
    pub assignments: Vec<usize>,
    /// Σ_i d^2(x_i, c_{a_i}) at the returned assignment.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Lloyd's algorithm with geodesic distances and Riemannian barycenters.
/// An emptied cluster is re-seeded at the point farthest from its previous
/// centroid (deterministic; ties to the smaller point index).
pub fn kmeans_fit(
    points: &[BallPoint],
    k: usize,
    init: InitPolicy,
    table: &ZetaTable,
    opts: &KmeansOptions,
) -> Result<KmeansFit> {
    validate_fit_inputs(points, k, table)?;
    let mut centroids: Vec<BallPoint> = match init {
        InitPolicy::Centroids(c) => {
            if c.len() != k {
                return Err(Error::Usage(format!("{} centroids for k = {k}", c.len())));
            }
            c
        }
        InitPolicy::Model(m) => {
            if m.k() != k {
                return Err(Error::Usage("init model shape mismatch".into()));
            }
            m.components().iter().map(|c| c.mu().clone()).collect()
        }
        InitPolicy::KMeansPlusPlus { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            kmeans_pp_indices(points, k, &mut rng).iter().map(|i| points[*i].clone()).collect()
        }
    };

    let mut assignments = assign_nearest(points, &centroids);
    let mut iterations = 0;
    let mut converged = false;
    let ones = vec![1.0; points.len()];
    while iterations < opts.max_iters {
        iterations += 1;
        // Update step: per-cluster unweighted barycenter.
        let new_centroids: Vec<Result<BallPoint>> = (0..k)
            .into_par_iter()
            .map(|j| {
                let members: Vec<usize> =
                    (0..points.len()).filter(|i| assignments[*i] == j).collect();
                if members.is_empty() {
                    // Re-seed at the point farthest from the old centroid.
                    let far = (0..points.len())
                        .max_by(|a, b| {
                            let da = kern::dist_sq(points[*a].coords(), centroids[j].coords());
                            let db = kern::dist_sq(points[*b].coords(), centroids[j].coords());
                            da.partial_cmp(&db).unwrap().then(b.cmp(a))
                        })
                        .unwrap();
                    return Ok(points[far].clone());
                }
                let member_points: Vec<BallPoint> =
                    members.iter().map(|i| points[*i].clone()).collect();
                weighted_barycenter(&member_points, &ones[..member_points.len()], &opts.bary)
            })
            .collect();
        let mut next = Vec::with_capacity(k);
        for c in new_centroids {
            next.push(c?);
        }
        centroids = next;
        let new_assignments = assign_nearest(points, &centroids);
        if new_assignments == assignments {
            converged = true;
            assignments = new_assignments;
            break;
        }
        assignments = new_assignments;
    }
    let objective = points
        .iter()
        .zip(&assignments)
        .map(|(p, a)| kern::dist_sq(p.coords(), centroids[*a].coords()))
        .sum();
    Ok(KmeansFit { centroids, assignments, objective, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::SIGMA_MIN;

    fn pt(coords: &[f64]) -> BallPoint {
        BallPoint::new(coords.to_vec()).unwrap()
    }

    fn table2() -> ZetaTable {
        ZetaTable::new(2).unwrap()
    }

    #[test]
    fn barycenter_of_one_point_is_that_point() {
        let p = pt(&[0.3, -0.2]);
        let b = weighted_barycenter(&[p.clone()], &[2.0], &BarycenterOptions::default()).unwrap();
        assert!(kern::dist_sq(b.coords(), p.coords()).sqrt() < 1e-12);
    }

    #[test]
    fn barycenter_of_symmetric_pair_is_the_origin() {
        let pts = [pt(&[0.5, 0.1]), pt(&[-0.5, -0.1])];
        let b = weighted_barycenter(&pts, &[1.0, 1.0], &BarycenterOptions::default()).unwrap();
        assert!(b.norm() < 1e-3, "expected ~origin, got norm {}", b.norm());
    }

    #[test]
    fn barycenter_is_weight_scale_invariant() {
        let pts = [pt(&[0.4, 0.0]), pt(&[0.0, 0.3]), pt(&[-0.2, -0.1])];
        let opts = BarycenterOptions::default();
        let a = weighted_barycenter(&pts, &[1.0, 2.0, 3.0], &opts).unwrap();
        let b = weighted_barycenter(&pts, &[10.0, 20.0, 30.0], &opts).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert!((x - y).abs() < 1e-12, "scaling weights changed the barycenter");
        }
    }

    #[test]
    fn barycenter_matches_euclidean_mean_near_origin() {
        // Curvature is negligible at scale 1e-3.
        let pts = [pt(&[1e-3, 2e-3]), pt(&[-3e-3, 1e-3]), pt(&[2e-3, -2e-3])];
        let w = [1.0, 1.0, 2.0];
        let b = weighted_barycenter(&pts, &w, &BarycenterOptions::default()).unwrap();
        let mean = [
            (1e-3 - 3e-3 + 2.0 * 2e-3) / 4.0,
            (2e-3 + 1e-3 + 2.0 * -2e-3) / 4.0,
        ];
        for (x, m) in b.coords().iter().zip(mean) {
            assert!((x - m).abs() < 1e-5, "got {x} want {m}");
        }
    }

    #[test]
    fn barycenter_does_not_increase_the_weighted_objective() {
        let pts = [pt(&[0.6, 0.0]), pt(&[0.0, 0.5]), pt(&[-0.4, -0.4]), pt(&[0.1, 0.2])];
        let w = [1.0, 2.0, 1.0, 3.0];
        let obj = |c: &BallPoint| -> f64 {
            pts.iter().zip(&w).map(|(p, wi)| wi * kern::dist_sq(p.coords(), c.coords())).sum()
        };
        // Objective at the Euclidean-mean start.
        let mut start = vec![0.0; 2];
        let total: f64 = w.iter().sum();
        for (p, wi) in pts.iter().zip(&w) {
            for (s, c) in start.iter_mut().zip(p.coords()) {
                *s += wi * c / total;
            }
        }
        let start = BallPoint::new(start).unwrap();
        let b = weighted_barycenter(&pts, &w, &BarycenterOptions::default()).unwrap();
        assert!(obj(&b) <= obj(&start) + 1e-9, "barycenter worse than its init");
    }

    #[test]
    fn barycenter_rejects_degenerate_inputs() {
        let pts = [pt(&[0.1, 0.1])];
        assert!(matches!(
            weighted_barycenter(&pts, &[0.0], &BarycenterOptions::default()),
            Err(Error::DegenerateCluster { .. })
        ));
        assert!(weighted_barycenter(&[], &[], &BarycenterOptions::default()).is_err());
        assert!(weighted_barycenter(&pts, &[-1.0], &BarycenterOptions::default()).is_err());
    }

    fn two_blob_points() -> Vec<BallPoint> {
        vec![
            pt(&[0.45, 0.02]),
            pt(&[0.5, -0.03]),
            pt(&[0.42, -0.05]),
            pt(&[0.48, 0.06]),
            pt(&[-0.45, 0.03]),
            pt(&[-0.5, -0.02]),
            pt(&[-0.43, 0.05]),
            pt(&[-0.47, -0.06]),
        ]
    }

    #[test]
    fn e_step_rows_sum_to_one_and_separate_blobs() {
        let model = MixtureModel::new(
            vec![
                GaussianComponent::new(pt(&[0.46, 0.0]), 0.2).unwrap(),
                GaussianComponent::new(pt(&[-0.46, 0.0]), 0.2).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        let points = two_blob_points();
        let EStep { resp, log_likelihood } = e_step(&points, &model).unwrap();
        assert!(log_likelihood.is_finite());
        for i in 0..points.len() {
            let s: f64 = resp.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "row {i} sums to {s}");
            let want = if i < 4 { 0 } else { 1 };
            assert_eq!(resp.argmax(i), want, "point {i} assigned to the wrong blob");
            assert!(resp.row(i)[want] > 0.99, "separation should be near-hard");
        }
    }

    #[test]
    fn e_step_survives_extreme_underflow() {
        // sigma at the grid floor and a point far away: the unnormalized
        // densities underflow to exp(-1e6), but log-space keeps rows valid.
        let model = MixtureModel::new(
            vec![
                GaussianComponent::new(pt(&[0.9, 0.0]), SIGMA_MIN).unwrap(),
                GaussianComponent::new(pt(&[-0.9, 0.0]), SIGMA_MIN).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        let points = vec![pt(&[0.0, 0.88])];
        let EStep { resp, .. } = e_step(&points, &model).unwrap();
        let s: f64 = resp.row(0).iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
        assert!(resp.row(0).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn m_step_recovers_proportions_and_means_from_hard_labels() {
        let points = two_blob_points();
        let assignments = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let resp = Responsibilities::from_assignments(&assignments, 2).unwrap();
        let table = table2();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model =
            m_step(&points, &resp, &table, &BarycenterOptions::default(), &mut rng).unwrap();
        assert!((model.pi()[0] - 0.5).abs() < 1e-12);
        assert!(model.components()[0].mu().coords()[0] > 0.4);
        assert!(model.components()[1].mu().coords()[0] < -0.4);
    }

    #[test]
    fn m_step_rescues_an_empty_column() {
        let points = two_blob_points();
        // All mass on component 0; component 1 is dead.
        let mut w = vec![0.0; points.len() * 2];
        for i in 0..points.len() {
            w[i * 2] = 1.0;
        }
        let resp = Responsibilities::from_rows(points.len(), 2, w).unwrap();
        let table = table2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model =
            m_step(&points, &resp, &table, &BarycenterOptions::default(), &mut rng).unwrap();
        assert_eq!(model.k(), 2);
        assert!(model.pi()[1] > 0.0, "rescued component needs positive weight");
        assert!(model.components()[1].sigma() >= SIGMA_MIN);
    }

    #[test]
    fn em_separates_two_blobs_with_monotone_likelihood() {
        let points = two_blob_points();
        let table = table2();
        let fit = em_fit(
            &points,
            2,
            InitPolicy::KMeansPlusPlus { seed: 42 },
            &table,
            &EmOptions::default(),
        )
        .unwrap();
        assert!(fit.converged);
        // Hard classification by argmax responsibility must split the blobs.
        let side0 = fit.resp.argmax(0);
        for i in 0..4 {
            assert_eq!(fit.resp.argmax(i), side0);
        }
        for i in 4..8 {
            assert_ne!(fit.resp.argmax(i), side0);
        }
        for pair in fit.log_likelihoods.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1e-9,
                "log-likelihood decreased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn kmeans_partitions_blobs_and_reports_converged() {
        let points = two_blob_points();
        let table = table2();
        let fit = kmeans_fit(
            &points,
            2,
            InitPolicy::KMeansPlusPlus { seed: 7 },
            &table,
            &KmeansOptions::default(),
        )
        .unwrap();
        assert!(fit.converged);
        let side0 = fit.assignments[0];
        assert!(fit.assignments[..4].iter().all(|a| *a == side0));
        assert!(fit.assignments[4..].iter().all(|a| *a != side0));
        // Eight points at geodesic radius ~0.2 from their blob centers give
        // an objective around 0.2; anything near the cross-blob separation
        // (~2.4 squared) would mean a busted partition.
        assert!(fit.objective < 0.5, "tight blobs should have a small objective");
    }

    #[test]
    fn kmeans_reseeds_an_empty_cluster() {
        let points = two_blob_points();
        // Second centroid far from every point: its cluster starts empty.
        let init = InitPolicy::Centroids(vec![pt(&[0.0, 0.0]), pt(&[0.0, -0.97])]);
        let table = table2();
        let fit = kmeans_fit(&points, 2, init, &table, &KmeansOptions::default()).unwrap();
        // After re-seeding, both clusters must be non-empty.
        assert!(fit.assignments.iter().any(|a| *a == 0));
        assert!(fit.assignments.iter().any(|a| *a == 1));
    }

    #[test]
    fn mixture_json_round_trips_exactly() {
        let model = MixtureModel::new(
            vec![
                GaussianComponent::new(pt(&[0.1234567890123456, -0.2]), 0.345).unwrap(),
                GaussianComponent::new(pt(&[-0.4, 0.5]), 1.25).unwrap(),
            ],
            vec![0.25, 0.75],
        )
        .unwrap();
        let json = model.to_json().unwrap();
        assert!(json.contains("\"K\""), "schema uses a capital K: {json}");
        assert!(json.contains("\"dim\""));
        assert!(json.contains("\"pi\""));
        assert!(json.contains("\"components\""));
        assert!(json.contains("\"mu\""));
        assert!(json.contains("\"sigma\""));
        let back = MixtureModel::from_json(&json).unwrap();
        assert_eq!(back.k(), 2);
        for (a, b) in model.components().iter().zip(back.components()) {
            assert_eq!(a.sigma().to_bits(), b.sigma().to_bits());
            for (x, y) in a.mu().coords().iter().zip(b.mu().coords()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        for (a, b) in model.pi().iter().zip(back.pi()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn mixture_json_rejects_inconsistencies() {
        let good = MixtureModel::new(
            vec![GaussianComponent::new(pt(&[0.1, 0.0]), 0.5).unwrap()],
            vec![1.0],
        )
        .unwrap()
        .to_json()
        .unwrap();
        let bad_k = good.replace("\"K\": 1", "\"K\": 2");
        assert!(MixtureModel::from_json(&bad_k).is_err());
        let bad_dim = good.replace("\"dim\": 2", "\"dim\": 3");
        assert!(MixtureModel::from_json(&bad_dim).is_err());
        let bad_pi = good.replace("\"pi\": [\n    1.0\n  ]", "\"pi\": [\n    0.5\n  ]");
        assert!(bad_pi != good, "test setup: pi replacement failed");
        assert!(MixtureModel::from_json(&bad_pi).is_err());
    }

    #[test]
    fn em_validates_inputs() {
        let table = table2();
        let points = two_blob_points();
        assert!(em_fit(&[], 2, InitPolicy::KMeansPlusPlus { seed: 0 }, &table, &EmOptions::default())
            .is_err());
        assert!(em_fit(
            &points,
            0,
            InitPolicy::KMeansPlusPlus { seed: 0 },
            &table,
            &EmOptions::default()
        )
        .is_err());
        assert!(em_fit(
            &points,
            100,
            InitPolicy::KMeansPlusPlus { seed: 0 },
            &table,
            &EmOptions::default()
        )
        .is_err());
    }
}
