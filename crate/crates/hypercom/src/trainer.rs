//! Joint training of node and context embeddings in the ball under three
//! losses: first-order edge attraction (O1), skip-gram with negative
//! sampling over walk contexts (O2), and a community loss pulling nodes
//! toward their mixture components (O3).
//!
//! An epoch runs the losses in a fixed order — all edges under O1, all
//! (center, context) pairs under O2, one O3 sweep, then one EM refresh of
//! the mixture — with the first `warmup_epochs` epochs running O1 and O2
//! only, so communities are estimated on embeddings that already carry the
//! graph structure. All gradients are Riemannian: each update is one
//! `rgd_step`, so every embedding stays strictly inside the ball.
//!
//! Determinism: every random stream (initialization, walks, windows,
//! per-epoch shuffles and negative draws, mixture seeding) is derived from
//! the run seed, and parallel sections only ever write disjoint slots, so
//! a (graph, config) pair reproduces bit-identical embeddings at any
//! thread count.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, ZetaTable};
use crate::geometry::{kern, BallPoint};
use crate::graph::{contexts, random_walks, Graph, NegativeSampler};
use crate::mixture::{
    e_step, em_fit, m_step, BarycenterOptions, EmOptions, InitPolicy, MixtureModel,
    Responsibilities,
};
use crate::numeric::derive_seed;
use crate::MAX_DIM;

/// Radius of the uniform ball both embedding tables are initialized in;
/// small-norm starts keep the early conformal factors (and so the first
/// gradients) tame.
const INIT_RADIUS: f64 = 1e-2;

// Child-stream salts for [`derive_seed`]; epoch streams start at
// `SEED_EPOCH_BASE + epoch` and must not collide with the fixed salts.
const SEED_INIT: u64 = 0;
const SEED_WALKS: u64 = 1;
const SEED_CONTEXTS: u64 = 2;
const SEED_MIXTURE: u64 = 3;
const SEED_RESCUE: u64 = 4;
const SEED_EPOCH_BASE: u64 = 16;

/// Node embeddings `phi` and context embeddings `phi_ctx`, stored flat
/// (`n * dim`) for in-place updates. Every entry is strictly inside the
/// ball at all times.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    phi: Vec<f64>,
    phi_ctx: Vec<f64>,
}

impl EmbeddingTable {
    /// Fresh tables with every embedding drawn uniformly from the ball of
    /// the given radius.
    pub fn random(n: usize, dim: usize, radius: f64, rng: &mut ChaCha8Rng) -> EmbeddingTable {
        let mut draw = |_| BallPoint::sample_uniform(dim, radius, rng).coords().to_vec();
        let phi: Vec<f64> = (0..n).flat_map(&mut draw).collect();
        let phi_ctx: Vec<f64> = (0..n).flat_map(&mut draw).collect();
        EmbeddingTable { dim, phi, phi_ctx }
    }

    /// Builds a table around existing node embeddings (context embeddings
    /// start at the same positions).
    pub fn from_points(points: &[BallPoint]) -> Result<EmbeddingTable> {
        if points.is_empty() {
            return Err(Error::EmptyInput { what: "embedding points" });
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: 0 });
        }
        let phi: Vec<f64> = points.iter().flat_map(|p| p.coords().to_vec()).collect();
        Ok(EmbeddingTable { dim, phi_ctx: phi.clone(), phi })
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.phi.len() / self.dim
    }

    /// Embedding dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Node embedding of `i` as a raw coordinate slice.
    pub fn phi(&self, i: u32) -> &[f64] {
        &self.phi[i as usize * self.dim..][..self.dim]
    }

    /// Context embedding of `i` as a raw coordinate slice.
    pub fn phi_ctx(&self, i: u32) -> &[f64] {
        &self.phi_ctx[i as usize * self.dim..][..self.dim]
    }

    /// Node embedding of `i` as a point.
    pub fn phi_point(&self, i: u32) -> BallPoint {
        BallPoint::from_clamped(self.phi(i).to_vec())
    }

    /// All node embeddings as points (the mixture side of the pipeline
    /// works on these).
    pub fn phi_points(&self) -> Vec<BallPoint> {
        (0..self.n() as u32).map(|i| self.phi_point(i)).collect()
    }

    /// Errors if any coordinate went non-finite (diverged training).
    fn check_finite(&self) -> Result<()> {
        if self.phi.iter().chain(&self.phi_ctx).all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::TrainingDiverged { what: "embedding coordinates went non-finite" })
        }
    }
}

/// All knobs of a training run. `epochs` counts every epoch including the
/// first `warmup_epochs` that skip the community loss.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Ball dimension `m`, in `1..=10`.
    pub dim: usize,
    /// Weight of the first-order edge loss.
    pub alpha: f64,
    /// Weight of the context (skip-gram) loss.
    pub beta: f64,
    /// Weight of the community loss.
    pub gamma: f64,
    /// Riemannian learning rate.
    pub lr: f64,
    pub epochs: usize,
    pub warmup_epochs: usize,
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Context window sizes are drawn uniformly from `1..=max_window`.
    pub max_window: usize,
    /// Negative samples per (center, context) pair.
    pub negatives: usize,
    /// Number of mixture components.
    pub k: usize,
    /// When set, gradients are accumulated over batches of this many
    /// edges/pairs against a frozen table, then applied; when unset every
    /// pair updates the table immediately (pure SGD).
    pub batch: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 2,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.1,
            lr: 1e-2,
            epochs: 50,
            warmup_epochs: 10,
            walks_per_node: 10,
            walk_length: 80,
            max_window: 5,
            negatives: 5,
            k: 2,
            batch: None,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: self.dim, max: MAX_DIM });
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Usage("learning rate must be positive and finite".into()));
        }
        for (name, w) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Usage(format!("{name} must be finite and nonnegative")));
            }
        }
        if self.warmup_epochs > self.epochs {
            return Err(Error::Usage(format!(
                "warmup_epochs ({}) exceeds epochs ({})",
                self.warmup_epochs, self.epochs
            )));
        }
        if self.walks_per_node == 0 || self.walk_length == 0 || self.max_window == 0 {
            return Err(Error::Usage(
                "walks_per_node, walk_length and max_window must be at least 1".into(),
            ));
        }
        if self.k == 0 {
            return Err(Error::Usage("k must be at least 1".into()));
        }
        if self.batch == Some(0) {
            return Err(Error::Usage("batch size must be at least 1 when set".into()));
        }
        Ok(())
    }
}

/// Unweighted loss sums of one epoch; `o3` is zero during warmup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub o1: f64,
    pub o2: f64,
    pub o3: f64,
}

impl EpochLoss {
    /// The combined objective the epoch optimized.
    pub fn weighted(&self, cfg: &TrainConfig) -> f64 {
        cfg.alpha * self.o1 + cfg.beta * self.o2 + cfg.gamma * self.o3
    }
}

/// Everything a finished run hands back: final embeddings, the fitted
/// mixture with the responsibilities it produced, and per-epoch losses.
#[derive(Clone, Debug)]
pub struct TrainResult {
    pub table: EmbeddingTable,
    pub model: MixtureModel,
    pub resp: Responsibilities,
    pub losses: Vec<EpochLoss>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-ln sigmoid(-d2) = ln(1 + e^{d2})`, stable for the nonnegative `d2`
/// distances produce.
fn attract_loss(d2: f64) -> f64 {
    d2 + (-d2).exp().ln_1p()
}

/// `-ln sigmoid(d2) = ln(1 + e^{-d2})`.
fn repel_loss(d2: f64) -> f64 {
    (-d2).exp().ln_1p()
}

/// Gradients of the pairwise attraction `-ln sigmoid(-d2(x, y))` at both
/// endpoints: `sigmoid(d2) * (-2 Log_x(y))` and symmetrically at `y`.
fn attraction_grads(x: &[f64], y: &[f64], gx: &mut [f64], gy: &mut [f64]) -> f64 {
    let d2 = kern::dist_sq(x, y);
    let s = sigmoid(d2);
    kern::log_map(x, y, gx);
    kern::log_map(y, x, gy);
    for c in gx.iter_mut().chain(gy.iter_mut()) {
        *c *= -2.0 * s;
    }
    attract_loss(d2)
}

/// Gradient of the repulsion `-ln sigmoid(d2(x, y))` at `y` only (the `x`
/// side is accumulated by the caller): `2 sigmoid(-d2) Log_y(x)`.
fn repulsion_grad_at(x: &[f64], y: &[f64], gy: &mut [f64]) -> f64 {
    let d2 = kern::dist_sq(x, y);
    let s = sigmoid(-d2);
    kern::log_map(y, x, gy);
    for c in gy.iter_mut() {
        *c *= 2.0 * s;
    }
    repel_loss(d2)
}

/// One Riemannian step on a flat storage slot.
fn apply_step(storage: &mut [f64], dim: usize, i: u32, grad: &[f64], eta: f64) {
    if eta == 0.0 {
        return;
    }
    let mut out = [0.0f64; MAX_DIM];
    let slot = &mut storage[i as usize * dim..][..dim];
    kern::rgd_step(slot, grad, eta, &mut out[..dim]);
    slot.copy_from_slice(&out[..dim]);
}

/// One first-order update for the edge `(i, j)`: both node embeddings take
/// a step toward each other along the attraction gradient (computed at the
/// pre-step positions). Returns the pre-step edge loss.
pub fn o1_update(table: &mut EmbeddingTable, i: u32, j: u32, eta: f64) -> f64 {
    let dim = table.dim;
    let mut gi = [0.0f64; MAX_DIM];
    let mut gj = [0.0f64; MAX_DIM];
    let loss = attraction_grads(table.phi(i), table.phi(j), &mut gi[..dim], &mut gj[..dim]);
    apply_step(&mut table.phi, dim, i, &gi[..dim], eta);
    apply_step(&mut table.phi, dim, j, &gj[..dim], eta);
    loss
}

/// One skip-gram update: the node embedding of `center` attracts the
/// context embedding of `context` and repels the context embeddings of the
/// `negatives` (all gradients at pre-step positions, applied center,
/// context, then negatives in order). Returns the pre-step pair loss.
pub fn o2_update(
    table: &mut EmbeddingTable,
    center: u32,
    context: u32,
    negatives: &[u32],
    eta: f64,
) -> f64 {
    let dim = table.dim;
    let mut g_center = vec![0.0f64; dim];
    let mut g_ctx = [0.0f64; MAX_DIM];
    let mut loss =
        attraction_grads(table.phi(center), table.phi_ctx(context), &mut g_center, &mut g_ctx[..dim]);

    // Each negative k contributes 2 sigmoid(-d2) Log at both ends; the
    // center side accumulates, the k side is applied below.
    let mut g_negs = vec![0.0f64; negatives.len() * dim];
    let mut tmp = [0.0f64; MAX_DIM];
    let x = table.phi(center);
    for (k, gk) in negatives.iter().zip(g_negs.chunks_mut(dim)) {
        let ck = table.phi_ctx(*k);
        loss += repulsion_grad_at(x, ck, gk);
        let d2 = kern::dist_sq(x, ck);
        let s = sigmoid(-d2);
        kern::log_map(x, ck, &mut tmp[..dim]);
        for (a, t) in g_center.iter_mut().zip(&tmp[..dim]) {
            *a += 2.0 * s * t;
        }
    }

    apply_step(&mut table.phi, dim, center, &g_center, eta);
    apply_step(&mut table.phi_ctx, dim, context, &g_ctx[..dim], eta);
    for (k, gk) in negatives.iter().zip(g_negs.chunks(dim)) {
        apply_step(&mut table.phi_ctx, dim, *k, gk, eta);
    }
    loss
}

/// The community gradient and loss of one node against the whole mixture:
/// `grad = -sum_k (w_k / sigma_k^2) Log_x(mu_k)`,
/// `loss = sum_k w_k (d2(x, mu_k) / 2 sigma_k^2 + ln zeta(sigma_k))`.
fn community_grad_row(
    x: &[f64],
    model: &MixtureModel,
    w_row: &[f64],
    ln_zetas: &[f64],
    grad: &mut [f64],
) -> f64 {
    let dim = x.len();
    let mut tmp = [0.0f64; MAX_DIM];
    let mut loss = 0.0;
    grad.fill(0.0);
    for ((comp, &w), &ln_z) in model.components().iter().zip(w_row).zip(ln_zetas) {
        let mu = comp.mu().coords();
        let inv_s2 = 1.0 / (comp.sigma() * comp.sigma());
        let d2 = kern::dist_sq(x, mu);
        loss += w * (0.5 * d2 * inv_s2 + ln_z);
        kern::log_map(x, mu, &mut tmp[..dim]);
        for (g, t) in grad.iter_mut().zip(&tmp[..dim]) {
            *g -= w * inv_s2 * t;
        }
    }
    loss
}

/// One community sweep: every node embedding takes one step along its
/// responsibility-weighted gradient toward the component means (the
/// mixture itself is left untouched — the EM refresh owns it). Returns the
/// pre-step community loss summed over nodes.
pub fn o3_update(
    table: &mut EmbeddingTable,
    model: &MixtureModel,
    w: &Responsibilities,
    eta: f64,
) -> Result<f64> {
    if w.n() != table.n() || model.k() != w.k() {
        return Err(Error::DimensionMismatch { expected: table.n(), found: w.n() });
    }
    if model.dim() != table.dim {
        return Err(Error::DimensionMismatch { expected: table.dim, found: model.dim() });
    }
    let dim = table.dim;
    let ln_zetas = model
        .components()
        .iter()
        .map(|c| gaussian::ln_zeta(dim, c.sigma()))
        .collect::<Result<Vec<f64>>>()?;
    // Rows only touch their own slot, so this parallelizes without
    // affecting determinism; losses are reduced sequentially afterwards.
    let losses: Vec<f64> = table
        .phi
        .par_chunks_mut(dim)
        .enumerate()
        .map(|(i, slot)| {
            let mut grad = [0.0f64; MAX_DIM];
            let loss = community_grad_row(slot, model, w.row(i), &ln_zetas, &mut grad[..dim]);
            if eta != 0.0 {
                let mut out = [0.0f64; MAX_DIM];
                kern::rgd_step(slot, &grad[..dim], eta, &mut out[..dim]);
                slot.copy_from_slice(&out[..dim]);
            }
            loss
        })
        .collect();
    Ok(losses.iter().sum())
}

/// A gradient packet produced against a frozen table: which table, which
/// slot, what tangent.
struct GradPacket {
    ctx_side: bool,
    idx: u32,
    grad: Vec<f64>,
}

/// Applies packets batch-style: packets touching the same slot are summed
/// (they were all computed at the slot's frozen position, so they share a
/// tangent space), then each touched slot takes a single step. First-touch
/// order keeps the float accumulation deterministic.
fn apply_packets(table: &mut EmbeddingTable, packets: Vec<GradPacket>, eta: f64) {
    let dim = table.dim;
    let mut order: Vec<(bool, u32)> = Vec::new();
    let mut acc: std::collections::HashMap<(bool, u32), Vec<f64>> = std::collections::HashMap::new();
    for p in packets {
        let key = (p.ctx_side, p.idx);
        match acc.get_mut(&key) {
            Some(sum) => {
                for (a, g) in sum.iter_mut().zip(&p.grad) {
                    *a += g;
                }
            }
            None => {
                order.push(key);
                acc.insert(key, p.grad);
            }
        }
    }
    for key in order {
        let grad = &acc[&key];
        let storage = if key.0 { &mut table.phi_ctx } else { &mut table.phi };
        apply_step(storage, dim, key.1, grad, eta);
    }
}

/// O1 over all edges: immediate SGD updates, or frozen-gradient batches
/// when `batch` is set.
fn run_o1(table: &mut EmbeddingTable, edges: &[(u32, u32)], eta: f64, batch: Option<usize>) -> f64 {
    let dim = table.dim;
    match batch {
        None => edges.iter().map(|&(i, j)| o1_update(table, i, j, eta)).sum(),
        Some(b) => {
            let mut total = 0.0;
            for chunk in edges.chunks(b) {
                let computed: Vec<(f64, GradPacket, GradPacket)> = chunk
                    .par_iter()
                    .map(|&(i, j)| {
                        let mut gi = vec![0.0f64; dim];
                        let mut gj = vec![0.0f64; dim];
                        let loss = attraction_grads(table.phi(i), table.phi(j), &mut gi, &mut gj);
                        (
                            loss,
                            GradPacket { ctx_side: false, idx: i, grad: gi },
                            GradPacket { ctx_side: false, idx: j, grad: gj },
                        )
                    })
                    .collect();
                let mut packets = Vec::with_capacity(2 * computed.len());
                for (loss, pi, pj) in computed {
                    total += loss;
                    packets.push(pi);
                    packets.push(pj);
                }
                apply_packets(table, packets, eta);
            }
            total
        }
    }
}

/// O2 over all pairs. Negatives are always drawn sequentially from the
/// epoch stream (so batch and SGD modes sample identically); in batch mode
/// the gradient computation fans out over the chunk.
fn run_o2(
    table: &mut EmbeddingTable,
    pairs: &[(u32, u32)],
    sampler: &NegativeSampler,
    negatives: usize,
    eta: f64,
    batch: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let dim = table.dim;
    let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> {
        (0..negatives).map(|_| sampler.draw(rng)).collect()
    };
    match batch {
        None => pairs
            .iter()
            .map(|&(c, ctx)| {
                let negs = draw(rng);
                o2_update(table, c, ctx, &negs, eta)
            })
            .sum(),
        Some(b) => {
            let mut total = 0.0;
            for chunk in pairs.chunks(b) {
                let negs_per_pair: Vec<Vec<u32>> = chunk.iter().map(|_| draw(rng)).collect();
                let computed: Vec<(f64, Vec<GradPacket>)> = chunk
                    .par_iter()
                    .zip(&negs_per_pair)
                    .map(|(&(center, context), negs)| {
                        let mut g_center = vec![0.0f64; dim];
                        let mut g_ctx = vec![0.0f64; dim];
                        let mut loss = attraction_grads(
                            table.phi(center),
                            table.phi_ctx(context),
                            &mut g_center,
                            &mut g_ctx,
                        );
                        let mut packets = Vec::with_capacity(negs.len() + 2);
                        let x = table.phi(center);
                        let mut tmp = [0.0f64; MAX_DIM];
                        for &k in negs {
                            let mut gk = vec![0.0f64; dim];
                            loss += repulsion_grad_at(x, table.phi_ctx(k), &mut gk);
                            let d2 = kern::dist_sq(x, table.phi_ctx(k));
                            let s = sigmoid(-d2);
                            kern::log_map(x, table.phi_ctx(k), &mut tmp[..dim]);
                            for (a, t) in g_center.iter_mut().zip(&tmp[..dim]) {
                                *a += 2.0 * s * t;
                            }
                            packets.push(GradPacket { ctx_side: true, idx: k, grad: gk });
                        }
                        packets.push(GradPacket { ctx_side: false, idx: center, grad: g_center });
                        packets.push(GradPacket { ctx_side: true, idx: context, grad: g_ctx });
                        (loss, packets)
                    })
                    .collect();
                let mut packets = Vec::new();
                for (loss, ps) in computed {
                    total += loss;
                    packets.extend(ps);
                }
                apply_packets(table, packets, eta);
            }
            total
        }
    }
}

/// Runs the full training pipeline on a graph: walk generation, context
/// extraction, warmup epochs of O1+O2, then full epochs adding the
/// community loss and an EM refresh of the mixture each epoch. The mixture
/// is seeded from the embeddings at the warmup boundary (or fitted once at
/// the end if the run is all warmup).
pub fn train(g: &Graph, cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if g.n_nodes() < cfg.k {
        return Err(Error::Usage(format!(
            "k ({}) exceeds the number of nodes ({})",
            cfg.k,
            g.n_nodes()
        )));
    }
    let ztable = ZetaTable::new(cfg.dim)?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SEED_INIT));
    let mut table = EmbeddingTable::random(g.n_nodes(), cfg.dim, INIT_RADIUS, &mut init_rng);

    let corpus =
        random_walks(g, cfg.walks_per_node, cfg.walk_length, derive_seed(cfg.seed, SEED_WALKS))?;
    let mut pairs: Vec<(u32, u32)> =
        contexts(&corpus, cfg.max_window, derive_seed(cfg.seed, SEED_CONTEXTS)).collect();
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    let sampler = NegativeSampler::new(g)?;

    let em_opts = EmOptions { rescue_seed: derive_seed(cfg.seed, SEED_RESCUE), ..EmOptions::default() };
    let fit_mixture = |points: &[BallPoint]| {
        em_fit(
            points,
            cfg.k,
            InitPolicy::KMeansPlusPlus { seed: derive_seed(cfg.seed, SEED_MIXTURE) },
            &ztable,
            &em_opts,
        )
    };

    let mut rescue = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SEED_RESCUE).wrapping_add(1));
    let mut state: Option<(MixtureModel, Responsibilities)> = None;
    let mut losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SEED_EPOCH_BASE + epoch as u64));
        edges.shuffle(&mut rng);
        pairs.shuffle(&mut rng);

        let o1 = run_o1(&mut table, &edges, cfg.alpha * cfg.lr, cfg.batch);
        let o2 = run_o2(
            &mut table,
            &pairs,
            &sampler,
            cfg.negatives,
            cfg.beta * cfg.lr,
            cfg.batch,
            &mut rng,
        );

        let mut o3 = 0.0;
        if epoch >= cfg.warmup_epochs {
            if state.is_none() {
                let fit = fit_mixture(&table.phi_points())?;
                state = Some((fit.model, fit.resp));
            }
            let (model, resp) = state.as_ref().expect("seeded above");
            o3 = o3_update(&mut table, model, resp, cfg.gamma * cfg.lr)?;
            // EM refresh: responsibilities under the moved embeddings, then
            // one M-step; the next epoch's O3 uses exactly this pair.
            let points = table.phi_points();
            let es = e_step(&points, model)?;
            let new_model =
                m_step(&points, &es.resp, &ztable, &BarycenterOptions::default(), &mut rescue)?;
            state = Some((new_model, es.resp));
        }
        table.check_finite()?;
        losses.push(EpochLoss { o1, o2, o3 });
    }

    let (model, resp) = match state {
        Some(pair) => pair,
        None => {
            let fit = fit_mixture(&table.phi_points())?;
            (fit.model, fit.resp)
        }
    };
    Ok(TrainResult { table, model, resp, losses })
}

/// Writes embeddings as CSV, one `token,x_1,...,x_m` row per node in id
/// order, floats in shortest round-trip form. Node tokens containing a
/// comma cannot be represented and are rejected.
pub fn write_embeddings_csv<W: Write>(table: &EmbeddingTable, g: &Graph, mut w: W) -> Result<()> {
    if g.n_nodes() != table.n() {
        return Err(Error::DimensionMismatch { expected: g.n_nodes(), found: table.n() });
    }
    for i in 0..table.n() as u32 {
        let token = g.token(i);
        if token.contains(',') {
            return Err(Error::Usage(format!("node token '{token}' contains a comma")));
        }
        let mut row = String::from(token);
        for c in table.phi(i) {
            row.push(',');
            row.push_str(&format!("{c}"));
        }
        row.push('\n');
        w.write_all(row.as_bytes())?;
    }
    Ok(())
}

/// Reads an embeddings CSV back into tokens and points. Rows must share
/// one dimension in `1..=10`; duplicate tokens are rejected.
pub fn read_embeddings_csv<R: BufRead>(reader: R) -> Result<(Vec<String>, Vec<BallPoint>)> {
    let mut tokens: Vec<String> = Vec::new();
    let mut points: Vec<BallPoint> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let token = fields.next().expect("split yields at least one field");
        let coords = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad coordinate '{f}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse { line: idx + 1, msg: "row has no coordinates".into() });
        }
        if coords.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: coords.len(), max: MAX_DIM });
        }
        if let Some(first) = points.first() {
            if coords.len() != first.dim() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {} coordinates, found {}", first.dim(), coords.len()),
                });
            }
        }
        if tokens.contains(&token.to_string()) {
            return Err(Error::Parse { line: idx + 1, msg: format!("duplicate token '{token}'") });
        }
        tokens.push(token.to_string());
        points.push(BallPoint::new(coords)?);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "embeddings CSV" });
    }
    Ok((tokens, points))
}
