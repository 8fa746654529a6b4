//! Graph ingestion and the sampling machinery embeddings are trained on:
//! edge-list parsing, adjacency and degree queries, uniform random walks,
//! context-window extraction from those walks, and the `deg^{3/4}`
//! negative-sampling distribution.
//!
//! Graphs are undirected and simple: input edges are symmetrized and
//! deduplicated, a self-loop is kept once and contributes one to its
//! node's degree. All sampling here is deterministic given a seed and
//! independent of thread count — every parallel work item derives its own
//! RNG stream from (seed, item index).

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::LabelMatrix;
use crate::error::{Error, Result};
use crate::numeric::derive_seed;

/// An undirected simple graph over dense node ids `0..n`, remembering the
/// original node tokens of the input file.
#[derive(Clone, Debug)]
pub struct Graph {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    /// Deduplicated edges, normalized to `u <= v`, in first-seen order.
    edges: Vec<(u32, u32)>,
    /// Sorted neighbor lists; `adjacency[u]` contains `u` once per self-loop.
    adjacency: Vec<Vec<u32>>,
}

impl Graph {
    fn empty() -> Graph {
        Graph { tokens: Vec::new(), ids: HashMap::new(), edges: Vec::new(), adjacency: Vec::new() }
    }

    /// Builds a graph on `n_nodes` ids with decimal tokens; edges are
    /// symmetrized and deduplicated like file input.
    pub fn from_id_edges(n_nodes: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        if n_nodes == 0 {
            return Err(Error::EmptyInput { what: "graph nodes" });
        }
        let mut g = Graph::empty();
        for v in 0..n_nodes {
            g.ensure_node(&v.to_string());
        }
        let mut seen = HashSet::new();
        for &(u, v) in edges {
            if u as usize >= n_nodes || v as usize >= n_nodes {
                return Err(Error::Usage(format!(
                    "edge ({u}, {v}) references a node outside 0..{n_nodes}"
                )));
            }
            g.add_edge(u, v, &mut seen);
        }
        g.sort_adjacency();
        Ok(g)
    }

    /// Builds an edgeless graph over the given node tokens — the node
    /// universe of data that arrives without adjacency, such as an
    /// embedding file consumed by label-based commands. Duplicate tokens
    /// are rejected.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Graph> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput { what: "graph nodes" });
        }
        let mut g = Graph::empty();
        for (i, t) in tokens.iter().enumerate() {
            let before = g.tokens.len();
            g.ensure_node(t.as_ref());
            if g.tokens.len() == before {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate node token '{}'", t.as_ref()),
                });
            }
        }
        Ok(g)
    }

    /// Interns a token, appending a fresh isolated node on first sight.
    pub(crate) fn ensure_node(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.ids.insert(token.to_string(), id);
        self.adjacency.push(Vec::new());
        id
    }

    fn add_edge(&mut self, u: u32, v: u32, seen: &mut HashSet<(u32, u32)>) {
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return;
        }
        self.edges.push(key);
        self.adjacency[u as usize].push(v);
        if u != v {
            self.adjacency[v as usize].push(u);
        }
    }

    fn sort_adjacency(&mut self) {
        for nbrs in &mut self.adjacency {
            nbrs.sort_unstable();
        }
    }

    /// Number of nodes `|V|`.
    pub fn n_nodes(&self) -> usize {
        self.tokens.len()
    }

    /// Number of distinct undirected edges `|E|`.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// The deduplicated edge list, each pair normalized to `u <= v`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    /// `deg(v)`: neighbor count, a self-loop counting once.
    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    /// Original token of node `v`.
    pub fn token(&self, v: u32) -> &str {
        &self.tokens[v as usize]
    }

    /// Dense id of a token, if the token occurred in the input.
    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Whether `{u, v}` is an edge.
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }
}

/// Parses an edge list: one edge per line as two whitespace-separated node
/// tokens; blank lines and lines starting with `#` are skipped. Tokens are
/// mapped to dense ids in first-seen order; duplicate edges (in either
/// orientation) are dropped.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut g = Graph::empty();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "expected two whitespace-separated node tokens".into(),
                })
            }
        };
        let u = g.ensure_node(a);
        let v = g.ensure_node(b);
        g.add_edge(u, v, &mut seen);
    }
    if g.n_nodes() == 0 {
        return Err(Error::EmptyInput { what: "edge list" });
    }
    g.sort_adjacency();
    Ok(g)
}

/// [`load_edge_list`] over a file path.
pub fn load_edge_list_path<P: AsRef<Path>>(path: P) -> Result<Graph> {
    load_edge_list(BufReader::new(File::open(path)?))
}

/// Parses a label file — per line `node_token community_id[,community_id...]`
/// — into a membership matrix aligned with the graph's node ids. Tokens not
/// yet in the graph are appended as isolated nodes (label files may declare
/// nodes the edge list never mentions); graph nodes missing from the file
/// come out unlabeled.
pub fn load_labels<R: BufRead>(reader: R, g: &mut Graph) -> Result<LabelMatrix> {
    let mut by_node: HashMap<u32, Vec<usize>> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (token, classes) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(c), None) => (t, c),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "expected 'node_token community_id[,community_id...]'".into(),
                })
            }
        };
        let node = g.ensure_node(token);
        if by_node.contains_key(&node) {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("node '{token}' labeled twice"),
            });
        }
        let ids = classes
            .split(',')
            .map(|c| {
                c.parse::<usize>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad community id '{c}'"),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        by_node.insert(node, ids);
    }
    let memberships =
        (0..g.n_nodes() as u32).map(|v| by_node.remove(&v).unwrap_or_default()).collect();
    LabelMatrix::from_memberships(memberships)
}

/// [`load_labels`] over a file path.
pub fn load_labels_path<P: AsRef<Path>>(path: P, g: &mut Graph) -> Result<LabelMatrix> {
    load_labels(BufReader::new(File::open(path)?), g)
}

/// A bag of random walks; consecutive nodes in a walk are always graph
/// neighbors.
#[derive(Clone, Debug)]
pub struct WalkCorpus {
    walks: Vec<Vec<u32>>,
}

impl WalkCorpus {
    /// Wraps externally produced walks (each a sequence of node ids) so
    /// they can feed the context extractor.
    pub fn from_walks(walks: Vec<Vec<u32>>) -> WalkCorpus {
        WalkCorpus { walks }
    }

    pub fn walks(&self) -> &[Vec<u32>] {
        &self.walks
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }
}

/// Generates `walks_per_node` uniform-neighbor walks of `walk_length` nodes
/// from every node. A walk truncates early only when it reaches a node with
/// no neighbors. Walk slots are independent — each derives its RNG stream
/// from (seed, slot index) — so the corpus is identical at any thread count.
pub fn random_walks(
    g: &Graph,
    walks_per_node: usize,
    walk_length: usize,
    seed: u64,
) -> Result<WalkCorpus> {
    if walks_per_node == 0 || walk_length == 0 {
        return Err(Error::Usage("walks_per_node and walk_length must be at least 1".into()));
    }
    let n = g.n_nodes();
    let mut walks = vec![Vec::new(); n * walks_per_node];
    walks.par_iter_mut().enumerate().for_each(|(slot, walk)| {
        let start = (slot / walks_per_node) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, slot as u64));
        walk.reserve(walk_length);
        walk.push(start);
        let mut here = start;
        for _ in 1..walk_length {
            let nbrs = g.neighbors(here);
            if nbrs.is_empty() {
                break;
            }
            here = nbrs[rng.gen_range(0..nbrs.len())];
            walk.push(here);
        }
    });
    Ok(WalkCorpus { walks })
}

/// Streams skip-gram training pairs off a walk corpus. At every walk
/// position a window size `c` is drawn uniformly from `{1..max_window}`,
/// and the center is paired with every node within `c` positions on either
/// side (clipped at the walk ends): left context in walk order, then right.
/// One draw happens per position regardless of clipping, so the stream is a
/// pure function of (corpus, max_window, seed).
pub fn contexts(corpus: &WalkCorpus, max_window: usize, seed: u64) -> ContextPairs<'_> {
    assert!(max_window >= 1, "max_window must be at least 1");
    ContextPairs {
        walks: &corpus.walks,
        max_window,
        rng: ChaCha8Rng::seed_from_u64(seed),
        walk: 0,
        pos: 0,
        buf: Vec::new(),
        next: 0,
    }
}

/// Iterator over `(center, context)` pairs; see [`contexts`].
pub struct ContextPairs<'a> {
    walks: &'a [Vec<u32>],
    max_window: usize,
    rng: ChaCha8Rng,
    walk: usize,
    pos: usize,
    buf: Vec<(u32, u32)>,
    next: usize,
}

impl Iterator for ContextPairs<'_> {
    type Item = (u32, u32);

    fn next(&mut self) -> Option<(u32, u32)> {
        loop {
            if self.next < self.buf.len() {
                let pair = self.buf[self.next];
                self.next += 1;
                return Some(pair);
            }
            let walk = loop {
                let w = self.walks.get(self.walk)?;
                if self.pos < w.len() {
                    break w;
                }
                self.walk += 1;
                self.pos = 0;
            };
            self.buf.clear();
            self.next = 0;
            let c = self.rng.gen_range(1..=self.max_window);
            let center = walk[self.pos];
            for q in self.pos.saturating_sub(c)..self.pos {
                self.buf.push((center, walk[q]));
            }
            for q in self.pos + 1..walk.len().min(self.pos + c + 1) {
                self.buf.push((center, walk[q]));
            }
            self.pos += 1;
        }
    }
}

/// The negative-sampling distribution `P(v) ∝ deg(v)^{3/4}`. Zero-degree
/// nodes get probability zero and are never drawn.
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    /// Cumulative unnormalized weights; last entry is the total mass.
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    /// Builds the distribution from a graph's degrees.
    pub fn new(g: &Graph) -> Result<NegativeSampler> {
        let degrees: Vec<usize> = (0..g.n_nodes() as u32).map(|v| g.degree(v)).collect();
        NegativeSampler::from_degrees(&degrees)
    }

    /// Builds the distribution from raw degree counts.
    pub fn from_degrees(degrees: &[usize]) -> Result<NegativeSampler> {
        let mut cumulative = Vec::with_capacity(degrees.len());
        let mut total = 0.0;
        for &d in degrees {
            total += (d as f64).powf(0.75);
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::EmptyInput { what: "edges for negative sampling" });
        }
        Ok(NegativeSampler { cumulative })
    }

    /// Probability of drawing node `v`.
    pub fn prob(&self, v: u32) -> f64 {
        let i = v as usize;
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        (self.cumulative[i] - lo) / self.total()
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("nonempty by construction")
    }

    /// One draw from the distribution.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> u32 {
        let u = rng.gen_range(0.0..self.total());
        self.cumulative.partition_point(|&c| c <= u) as u32
    }
}

/// `count` i.i.d. draws from the sampler, deterministic given the seed.
pub fn negative_sample(sampler: &NegativeSampler, count: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.draw(&mut rng)).collect()
}
