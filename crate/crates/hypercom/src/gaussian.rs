//! Isotropic Riemannian Gaussians on the Poincaré ball.
//!
//! The density at distance `d` from the mean is
//! `f(x | mu, sigma) = exp(-d^2 / (2 sigma^2)) / zeta_m(sigma)`, where the
//! normalization depends on the dimension `m` but not on `mu` (the ball is
//! homogeneous). `zeta_m` here is the *radial* mass
//!
//! ```text
//! zeta_m(sigma) = ∫_0^∞ exp(-r^2 / (2 sigma^2)) sinh^(m-1)(r) dr
//! ```
//!
//! i.e. the constant angular factor `Omega_{m-1} = 2 pi^{m/2} / Gamma(m/2)`
//! is left out, so the density integrates to `Omega_{m-1}` over the ball
//! rather than to 1. The factor is independent of both `mu` and `sigma`,
//! so responsibilities, likelihood ratios, and maximum-likelihood estimates
//! are unaffected; tests that integrate the density account for it.
//!
//! Two exact evaluations of the same function are used depending on
//! conditioning:
//!
//! - the alternating closed form
//!   `zeta_m = sqrt(pi/2) sigma 2^{-(m-1)} Σ_k (-1)^k C(m-1,k)
//!    e^{p_k^2 sigma^2 / 2} (1 + erf(p_k sigma / sqrt 2))`, `p_k = m-1-2k`,
//!   summed in scaled log space with compensation; and
//! - the positive power series
//!   `zeta_m = (1/2) Σ_j a_j (2 sigma^2)^{j + m/2} Gamma(j + m/2)` where
//!   `sinh^{m-1}(r) = Σ_j a_j r^{m-1+2j}`,
//!
//! switching to the series when the alternating sum loses more than ~3
//! digits to cancellation (which happens for small `sigma (m-1)`; at
//! `m = 10, sigma = 1e-3` the closed form is pure rounding noise).
//!
//! `Phi^{-1}(sigma) = sigma^3 d(ln zeta)/d sigma` — the mean squared
//! distance under the density — gets closed forms in both regimes, so no
//! numerical differentiation happens anywhere in the library.

use libm::{erf, erfc, lgamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kern, BallPoint};
use crate::mixture::BarycenterOptions;
use crate::numeric::{logaddexp, CompensatedSum};
use crate::MAX_DIM;

/// Default σ grid bounds and spacing.
pub const SIGMA_MIN: f64 = 1e-3;
pub const SIGMA_MAX: f64 = 2.0;
pub const SIGMA_STEP: f64 = 1e-3;

/// Condition-number threshold beyond which the alternating closed form is
/// abandoned for the power series (≈ digits lost to cancellation > 3).
const ALT_CONDITION_LIMIT: f64 = 1e3;

/// One mixture component: a mean in the ball and an isotropic spread.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    mu: BallPoint,
    sigma: f64,
}

impl GaussianComponent {
    pub fn new(mu: BallPoint, sigma: f64) -> Result<Self> {
        if mu.dim() > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: mu.dim(), max: MAX_DIM });
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::NonFinite { what: "sigma" });
        }
        Ok(GaussianComponent { mu, sigma })
    }

    pub fn mu(&self) -> &BallPoint {
        &self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Normalization constant `zeta_m(sigma)`. `m` must be in `1..=10` and
/// `sigma` within the default table range.
pub fn zeta(m: usize, sigma: f64) -> Result<f64> {
    Ok(ln_zeta(m, sigma)?.exp())
}

/// `ln zeta_m(sigma)`, same domain as [`zeta`].
pub fn ln_zeta(m: usize, sigma: f64) -> Result<f64> {
    check_dim(m)?;
    check_sigma(sigma)?;
    Ok(eval_zeta(m, sigma).ln_zeta)
}

/// `Phi^{-1}(sigma) = sigma^3 d(ln zeta_m)/d sigma`: the mean squared
/// distance from the mean under the Gaussian with spread `sigma`. Strictly
/// increasing in `sigma`, which is what makes the σ-MLE a grid lookup.
pub fn phi_inverse(m: usize, sigma: f64) -> Result<f64> {
    check_dim(m)?;
    check_sigma(sigma)?;
    Ok(eval_zeta(m, sigma).phi_inv)
}

/// Log density `-d^2(x, mu) / (2 sigma^2) - ln zeta_m(sigma)` (see the
/// module docs for the normalization convention).
pub fn log_density(x: &BallPoint, g: &GaussianComponent) -> Result<f64> {
    if x.dim() != g.mu.dim() {
        return Err(Error::DimensionMismatch { expected: g.mu.dim(), found: x.dim() });
    }
    check_dim(x.dim())?;
    check_sigma(g.sigma)?;
    let d2 = kern::dist_sq(x.coords(), g.mu.coords());
    Ok(-d2 / (2.0 * g.sigma * g.sigma) - eval_zeta(x.dim(), g.sigma).ln_zeta)
}

/// Maximum-likelihood fit of a single component to weighted points:
/// the mean is the weighted barycenter, and σ solves
/// `Phi^{-1}(sigma) = (Σ w_i d^2(x_i, mu)) / (Σ w_i)` on the table's grid.
pub fn mle(
    points: &[BallPoint],
    weights: &[f64],
    table: &ZetaTable,
    opts: &BarycenterOptions,
) -> Result<GaussianComponent> {
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "mle points" });
    }
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
    }
    if points.iter().any(|p| p.dim() != table.dim()) {
        return Err(Error::DimensionMismatch { expected: table.dim(), found: points[0].dim() });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFinite { what: "mle weights" });
    }
    let total: f64 = weights.iter().sum();
    if total < 1e-12 {
        return Err(Error::DegenerateCluster { index: 0 });
    }
    let mu = crate::mixture::weighted_barycenter(points, weights, opts)?;
    let msd = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * kern::dist_sq(p.coords(), mu.coords()))
        .sum::<f64>()
        / total;
    let sigma = table.sigma_for_msd(msd);
    GaussianComponent::new(mu, sigma)
}

fn check_dim(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DIM {
        return Err(Error::UnsupportedDimension { dim: m, max: MAX_DIM });
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    // One grid step of slack absorbs the float noise of grid construction.
    if !sigma.is_finite() || sigma < SIGMA_MIN * (1.0 - 1e-9) || sigma > SIGMA_MAX * (1.0 + 1e-9) {
        return Err(Error::SigmaOutOfRange { sigma, min: SIGMA_MIN, max: SIGMA_MAX });
    }
    Ok(())
}

/// σ-grid description: `count` points `min, min + step, ...` capped at `max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { min: SIGMA_MIN, max: SIGMA_MAX, step: SIGMA_STEP }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        let ok = self.min.is_finite()
            && self.step.is_finite()
            && self.max.is_finite()
            && self.min >= 1e-6
            && self.step > 0.0
            && self.max > self.min
            && self.max <= 16.0
            && self.count() <= 10_000_000;
        if ok {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "invalid sigma grid: min {} max {} step {}",
                self.min, self.max, self.step
            )))
        }
    }

    fn count(&self) -> usize {
        ((self.max - self.min) / self.step).round() as usize + 1
    }

    fn sigma_at(&self, s: usize) -> f64 {
        (self.min + s as f64 * self.step).min(self.max)
    }
}

/// Precomputed `(sigma_s, ln zeta_m(sigma_s), Phi^{-1}(sigma_s))` over a σ
/// grid for one dimension. Serializes to JSON and round-trips bit-exactly
/// (floats are printed with shortest-round-trip precision).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaTable {
    dim: usize,
    grid: GridSpec,
    sigmas: Vec<f64>,
    ln_zetas: Vec<f64>,
    phi_invs: Vec<f64>,
}

impl ZetaTable {
    /// Builds the table for dimension `m` on the default grid.
    pub fn new(m: usize) -> Result<Self> {
        Self::with_grid(m, GridSpec::default())
    }

    /// Builds the table on a custom grid.
    pub fn with_grid(m: usize, grid: GridSpec) -> Result<Self> {
        check_dim(m)?;
        grid.validate()?;
        let count = grid.count();
        let mut sigmas = Vec::with_capacity(count);
        let mut ln_zetas = Vec::with_capacity(count);
        let mut phi_invs = Vec::with_capacity(count);
        for s in 0..count {
            let sigma = grid.sigma_at(s);
            let parts = eval_zeta(m, sigma);
            sigmas.push(sigma);
            ln_zetas.push(parts.ln_zeta);
            phi_invs.push(parts.phi_inv);
        }
        let table = ZetaTable { dim: m, grid, sigmas, ln_zetas, phi_invs };
        table.check_invariants()?;
        Ok(table)
    }

    fn check_invariants(&self) -> Result<()> {
        let n = self.sigmas.len();
        if n == 0 || self.ln_zetas.len() != n || self.phi_invs.len() != n {
            return Err(Error::Usage("zeta table: inconsistent lengths".into()));
        }
        for i in 0..n {
            if !self.ln_zetas[i].is_finite() || !self.phi_invs[i].is_finite() {
                return Err(Error::NonFinite { what: "zeta table entries" });
            }
            if i > 0
                && (self.sigmas[i] <= self.sigmas[i - 1]
                    || self.ln_zetas[i] <= self.ln_zetas[i - 1]
                    || self.phi_invs[i] <= self.phi_invs[i - 1])
            {
                return Err(Error::Usage(format!(
                    "zeta table: entries not strictly increasing at index {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn ln_zetas(&self) -> &[f64] {
        &self.ln_zetas
    }

    pub fn phi_invs(&self) -> &[f64] {
        &self.phi_invs
    }

    /// Grid σ whose `Phi^{-1}` is closest to the target mean squared
    /// distance; exact ties resolve toward the smaller σ, and targets
    /// beyond the grid clamp to its ends.
    pub fn sigma_for_msd(&self, target: f64) -> f64 {
        self.sigmas[self.sigma_index_for_msd(target)]
    }

    pub fn sigma_index_for_msd(&self, target: f64) -> usize {
        let hi = self.phi_invs.partition_point(|v| *v < target);
        if hi == 0 {
            return 0;
        }
        if hi == self.phi_invs.len() {
            return self.phi_invs.len() - 1;
        }
        let lo = hi - 1;
        if (target - self.phi_invs[lo]) <= (self.phi_invs[hi] - target) {
            lo
        } else {
            hi
        }
    }

    /// Writes the table as JSON.
    pub fn save<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    /// Reads a table back and re-checks its invariants.
    pub fn load<R: std::io::Read>(r: R) -> Result<Self> {
        let table: ZetaTable = serde_json::from_reader(r)?;
        check_dim(table.dim)?;
        table.grid.validate()?;
        table.check_invariants()?;
        Ok(table)
    }

    /// Reads a cached table and verifies it was built for `(m, grid)`.
    pub fn load_for<R: std::io::Read>(r: R, m: usize, grid: &GridSpec) -> Result<Self> {
        let table = Self::load(r)?;
        if table.dim != m || table.grid != *grid {
            return Err(Error::Usage(format!(
                "zeta cache mismatch: cached (dim {}, grid {:?}), requested (dim {}, grid {:?})",
                table.dim, table.grid, m, grid
            )));
        }
        Ok(table)
    }
}

/// `ln zeta` and `Phi^{-1}` evaluated together (they share all the work).
pub(crate) struct ZetaParts {
    pub ln_zeta: f64,
    pub phi_inv: f64,
}

/// Dual-regime evaluator; `m` in `1..=MAX_DIM`, any positive σ that keeps
/// `p^2 sigma^2` finite (callers bound σ ≤ 16).
pub(crate) fn eval_zeta(m: usize, sigma: f64) -> ZetaParts {
    debug_assert!(m >= 1 && m <= MAX_DIM);
    debug_assert!(sigma > 0.0);
    if m == 1 {
        // Single k = 0 term with p = 0: zeta_1 = sqrt(pi/2) sigma exactly.
        return ZetaParts {
            ln_zeta: (std::f64::consts::PI / 2.0).sqrt().ln() + sigma.ln(),
            phi_inv: sigma * sigma,
        };
    }
    match alternating_parts(m, sigma) {
        Some(parts) => parts,
        None => series_parts(m, sigma),
    }
}

/// Alternating closed form in scaled log space. Returns `None` when the sum
/// is too ill-conditioned to trust (small `sigma (m-1)`).
fn alternating_parts(m: usize, sigma: f64) -> Option<ZetaParts> {
    let n = m - 1;
    let binoms = pascal_row(n);
    // ln |term_k| and sign for term_k = (-1)^k C(n,k) E_k, with
    // E_k = e^{p^2 s^2/2} (1 + erf(p s / sqrt 2)) kept in log space.
    let mut ln_terms = [f64::NEG_INFINITY; MAX_DIM];
    let mut ps = [0.0f64; MAX_DIM];
    let mut max_ln = f64::NEG_INFINITY;
    for k in 0..=n {
        let p = (n as isize - 2 * k as isize) as f64;
        let z = p * sigma / std::f64::consts::SQRT_2;
        let gauss = 0.5 * p * p * sigma * sigma;
        let ln_e = if p >= 0.0 {
            gauss + erf(z).ln_1p()
        } else {
            let e = erfc(-z);
            if e == 0.0 {
                // Underflowed tail: the term is ~e^{-z^2}/z relative to the
                // dominant one, far below representable significance.
                f64::NEG_INFINITY
            } else {
                gauss + e.ln()
            }
        };
        ln_terms[k] = binoms[k].ln() + ln_e;
        ps[k] = p;
        max_ln = max_ln.max(ln_terms[k]);
    }
    let mut s0 = CompensatedSum::default();
    let mut abs0 = 0.0f64;
    let mut s2 = CompensatedSum::default();
    let mut abs2 = 0.0f64;
    for k in 0..=n {
        if ln_terms[k] == f64::NEG_INFINITY {
            continue;
        }
        let t = (ln_terms[k] - max_ln).exp();
        let signed = if k % 2 == 0 { t } else { -t };
        s0.add(signed);
        abs0 += t;
        s2.add(signed * ps[k] * ps[k]);
        abs2 += t * ps[k] * ps[k];
    }
    let (s0, s2) = (s0.value(), s2.value());
    if !(s0 > 0.0) || abs0 / s0 > ALT_CONDITION_LIMIT {
        return None;
    }
    if s2 != 0.0 && abs2 / s2.abs() > ALT_CONDITION_LIMIT {
        return None;
    }
    let half_pi_sqrt = (std::f64::consts::PI / 2.0).sqrt();
    let ln_zeta =
        half_pi_sqrt.ln() + sigma.ln() - n as f64 * std::f64::consts::LN_2 + max_ln + s0.ln();
    // Phi^{-1} = s^2 + s^4 S2/S0 + s^3 sqrt(2/pi) S1/S0 where
    // S1 = Σ (-1)^k C(n,k) p_k vanishes for every n except n = 1 (value 2).
    let s1_exact = if n == 1 { 2.0 } else { 0.0 };
    let sig2 = sigma * sigma;
    let phi_inv = sig2
        + sig2 * sig2 * (s2 / s0)
        + sig2 * sigma * (2.0 / std::f64::consts::PI).sqrt() * s1_exact * (-max_ln).exp() / s0;
    Some(ZetaParts { ln_zeta, phi_inv })
}

/// Power-series evaluation: all terms positive, streamed with a running
/// rescaled sum and an early break once the tail is below ~1e-20 relative.
fn series_parts(m: usize, sigma: f64) -> ZetaParts {
    let ln_coeffs = sinh_power_ln_coeffs(m - 1);
    let ln_2s2 = (2.0 * sigma * sigma).ln();
    let mh = m as f64 / 2.0;
    let mut max_ln = f64::NEG_INFINITY;
    let mut sum = 0.0f64; // Σ e^{ln T_j - max_ln}
    let mut weighted = 0.0f64; // Σ (2j + m) e^{ln T_j - max_ln}
    let mut prev = f64::NEG_INFINITY;
    for (j, ln_a) in ln_coeffs.iter().enumerate() {
        let q = j as f64 + mh;
        let ln_t = ln_a + q * ln_2s2 + lgamma(q);
        let w = 2.0 * j as f64 + m as f64;
        if ln_t > max_ln {
            let rescale = if max_ln == f64::NEG_INFINITY { 0.0 } else { (max_ln - ln_t).exp() };
            sum = sum * rescale + 1.0;
            weighted = weighted * rescale + w;
            max_ln = ln_t;
        } else {
            let e = (ln_t - max_ln).exp();
            sum += e;
            weighted += e * w;
            // Past the peak and 46 nats below the running total: converged.
            if ln_t < prev && ln_t < max_ln + sum.ln() - 46.0 {
                break;
            }
        }
        prev = ln_t;
    }
    ZetaParts {
        ln_zeta: max_ln + sum.ln() - std::f64::consts::LN_2,
        phi_inv: sigma * sigma * weighted / sum,
    }
}

/// Row `n` of Pascal's triangle as f64 (exact for n ≤ 9).
fn pascal_row(n: usize) -> [f64; MAX_DIM] {
    let mut row = [0.0f64; MAX_DIM];
    row[0] = 1.0;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] += row[j - 1];
        }
    }
    row
}

/// Maximum series length; far beyond what the series regime ever consumes
/// (it is only active for small `sigma (m-1)` where ~30 terms suffice).
const SERIES_LEN: usize = 512;

/// `ln a_j` for `sinh^n(r) = Σ_j a_j r^{n+2j}`, via the recurrence
/// `(n+2j)(n+2j-1) a_j = n^2 a_{j-1} + n(n-1) a'_j` with `a'` the
/// coefficients of `sinh^{n-2}` — all terms positive, so log space is exact.
fn sinh_power_ln_coeffs(n: usize) -> [f64; SERIES_LEN] {
    let mut prev2 = [f64::NEG_INFINITY; SERIES_LEN]; // sinh^{n mod 2 - 2}? parity base
    let mut cur = [f64::NEG_INFINITY; SERIES_LEN];
    if n % 2 == 0 {
        cur[0] = 0.0; // sinh^0 = 1
    } else {
        for (j, c) in cur.iter_mut().enumerate() {
            *c = -lgamma(2.0 * j as f64 + 2.0); // sinh: 1/(2j+1)!
        }
    }
    let mut k = n % 2;
    while k < n {
        k += 2;
        prev2.copy_from_slice(&cur);
        let kf = k as f64;
        let mut carry = f64::NEG_INFINITY; // ln a_{j-1} of the row being built
        for j in 0..SERIES_LEN {
            let jf = j as f64;
            let from_prev = 2.0 * kf.ln() + carry;
            let from_lower = kf.ln() + (kf - 1.0).ln() + prev2[j];
            let ln_a =
                logaddexp(from_prev, from_lower) - ((kf + 2.0 * jf) * (kf + 2.0 * jf - 1.0)).ln();
            cur[j] = ln_a;
            carry = ln_a;
        }
    }
    cur
}
