//! Shared helpers for the integration tests: an independent rejection
//! sampler for ball Gaussians, a brute-force quadrature of the 2-D
//! Gaussian mass, a planted-partition graph generator, and fixture
//! loaders. These are deliberately written from first principles, not
//! by calling the library's own formulas, so they can serve as oracles.
#![allow(dead_code)]

use std::sync::{Mutex, MutexGuard, OnceLock};

use hypercom::graph::{load_edge_list_path, load_labels_path, Graph};
use hypercom::classify::LabelMatrix;
use hypercom::geometry::{distance, mobius_add, BallPoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Serializes the CPU-heavy tests against the wall-clock-sensitive ones.
/// The test harness runs tests in this binary concurrently, so a test
/// that saturates the machine (the cross-validation runs) would otherwise
/// contaminate a test that measures elapsed time. Every test that does
/// either takes this lock first.
pub fn cpu_gate() -> MutexGuard<'static, ()> {
    static GATE: OnceLock<Mutex<()>> = OnceLock::new();
    // A panic in one gated test (e.g. an honest dataset failure) must not
    // silence the others, so a poisoned lock is still taken.
    GATE.get_or_init(|| Mutex::new(())).lock().unwrap_or_else(|e| e.into_inner())
}

/// One standard normal draw via Box-Muller.
pub fn std_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    }
}

/// Draws from the isotropic ball Gaussian with mean `mu` and spread
/// `sigma` by exact rejection sampling, independently of the library's
/// density code.
///
/// The radial law on distance-from-mean `r` has density proportional to
/// `exp(-r^2 / 2 sigma^2) * sinh(r)^(m-1)`. Writing
/// `sinh(r)^(m-1) = e^((m-1) r) (1 - e^(-2r))^(m-1) / 2^(m-1)` and
/// completing the square shows a normal envelope with mean
/// `(m-1) sigma^2` and standard deviation `sigma`, accepted with
/// probability `(1 - e^(-2r))^(m-1)` (and r > 0). The direction is
/// uniform on the sphere, the point at distance `r` from the origin has
/// Euclidean norm `tanh(r/2)`, and left translation by `mu` (an isometry
/// taking the origin to `mu`) recenters the draw.
pub fn sample_ball_gaussian<R: Rng>(mu: &BallPoint, sigma: f64, rng: &mut R) -> BallPoint {
    let m = mu.dim();
    let shift = (m as f64 - 1.0) * sigma * sigma;
    let r = loop {
        let r = shift + sigma * std_normal(rng);
        if r <= 0.0 {
            continue;
        }
        let accept = (1.0 - (-2.0 * r).exp()).powi(m as i32 - 1);
        if rng.gen::<f64>() < accept {
            break r;
        }
    };
    // Uniform direction from m normals.
    let mut u = vec![0.0; m];
    loop {
        for c in u.iter_mut() {
            *c = std_normal(rng);
        }
        let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-12 {
            for c in u.iter_mut() {
                *c /= n;
            }
            break;
        }
    }
    let rho = (r / 2.0).tanh();
    let x0 = BallPoint::new(u.iter().map(|c| c * rho).collect()).unwrap();
    mobius_add(mu, &x0).unwrap()
}

/// Brute-force mass of the unnormalized 2-D ball Gaussian
/// `exp(-d(x, center)^2 / 2 sigma^2)` over the whole disc, by polar
/// quadrature in Euclidean coordinates: Simpson in the radius over
/// `[0, rho_max]` and the trapezoid rule over the full angle (which is
/// spectrally accurate for periodic integrands). The volume element is
/// `(2 / (1 - rho^2))^2 rho drho dtheta`. The radial cutoff is placed
/// at hyperbolic radius `8 sigma + d(0, center) + 1`, far past any
/// appreciable mass.
pub fn disc_gaussian_mass(center: &BallPoint, sigma: f64, n_rho: usize, n_theta: usize) -> f64 {
    assert_eq!(center.dim(), 2, "quadrature oracle is 2-D only");
    assert!(n_rho >= 2 && n_rho % 2 == 0, "Simpson needs an even interval count");
    let d0 = distance(&BallPoint::origin(2), center).unwrap();
    let rho_max = ((8.0 * sigma + d0 + 1.0) / 2.0).tanh();
    let d_rho = rho_max / n_rho as f64;
    let d_theta = std::f64::consts::TAU / n_theta as f64;
    let inv_two_sig_sq = 1.0 / (2.0 * sigma * sigma);

    let ring = |rho: f64| -> f64 {
        if rho == 0.0 {
            return 0.0; // the Jacobian factor rho vanishes at the center
        }
        let lambda = 2.0 / (1.0 - rho * rho);
        let mut theta_sum = 0.0;
        for j in 0..n_theta {
            let theta = j as f64 * d_theta;
            let x = BallPoint::new(vec![rho * theta.cos(), rho * theta.sin()]).unwrap();
            let d = distance(&x, center).unwrap();
            theta_sum += (-d * d * inv_two_sig_sq).exp();
        }
        theta_sum * d_theta * lambda * lambda * rho
    };

    let mut simpson = ring(0.0) + ring(rho_max);
    for i in 1..n_rho {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        simpson += w * ring(i as f64 * d_rho);
    }
    simpson * d_rho / 3.0
}

/// Generates a planted-partition graph: `n` nodes assigned round-robin
/// to `k` communities, each node drawing `intra` random partners inside
/// its community and `inter` outside, deduplicated. Returns the graph
/// and the ground-truth community of every node.
pub fn planted_partition(
    n: usize,
    k: usize,
    intra: usize,
    inter: usize,
    seed: u64,
) -> (Graph, Vec<usize>) {
    use rand::SeedableRng;
    assert!(k >= 2 && n >= 2 * k);
    let comm: Vec<usize> = (0..n).map(|i| i % k).collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (i, &c) in comm.iter().enumerate() {
        members[c].push(i as u32);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * (intra + inter));
    for i in 0..n as u32 {
        let c = comm[i as usize];
        for _ in 0..intra {
            loop {
                let j = members[c][rng.gen_range(0..members[c].len())];
                if j != i {
                    edges.push((i, j));
                    break;
                }
            }
        }
        for _ in 0..inter {
            loop {
                let oc = rng.gen_range(0..k);
                if oc == c {
                    continue;
                }
                let j = members[oc][rng.gen_range(0..members[oc].len())];
                edges.push((i, j));
                break;
            }
        }
    }
    let g = Graph::from_id_edges(n, &edges).unwrap();
    (g, comm)
}

/// Repository path of a bundled data file.
pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Loads the bundled karate-club fixture (graph + two-faction labels).
pub fn karate() -> (Graph, LabelMatrix) {
    let mut g = load_edge_list_path(data_path("karate.edges")).unwrap();
    let labels = load_labels_path(data_path("karate.labels"), &mut g).unwrap();
    (g, labels)
}
