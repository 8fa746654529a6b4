//! Poincaré-ball primitives: Möbius addition, geodesic distance, exponential
//! and logarithmic maps, and Riemannian gradient-descent steps.
//!
//! The model is the open unit ball with the conformal metric
//! `g_x = (2 / (1 - ||x||^2))^2 * I`. Every [`BallPoint`] is kept strictly
//! inside the ball by a radial clamp to norm `1 - BALL_EPS`, applied on
//! construction and after every exponential map, so downstream code never
//! sees a denominator `1 - ||x||^2` collapse to zero.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Margin keeping points away from the unit sphere: norms are clamped to
/// `1 - BALL_EPS`. Also the threshold of the gradient-step skip rule.
pub const BALL_EPS: f64 = 1e-10;

/// Euclidean tolerance under which two points count as coincident; the log
/// map and distance gradients return the zero tangent vector there instead
/// of dividing by a vanishing norm.
pub const COINCIDENT_EPS: f64 = 1e-12;

/// A point strictly inside the unit ball.
///
/// Construction validates that coordinates are finite and non-empty, then
/// radially clamps the norm to at most `1 - BALL_EPS`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl<'de> serde::Deserialize<'de> for BallPoint {
    /// Deserializes as a bare coordinate array, re-validating through
    /// [`BallPoint::new`], so JSON can never smuggle in a point outside
    /// the ball or a non-finite coordinate.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        BallPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

impl BallPoint {
    /// Builds a point from raw coordinates, clamping it into the ball.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput { what: "BallPoint coordinates" });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "BallPoint coordinates" });
        }
        kern::clamp_ball(&mut coords);
        Ok(BallPoint { coords })
    }

    /// The origin of the `dim`-dimensional ball.
    pub fn origin(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        BallPoint { coords: vec![0.0; dim] }
    }

    /// Wraps coordinates already known to be finite and strictly inside the
    /// ball (e.g. produced by a kernel that clamps). Debug-asserts the
    /// invariant instead of re-validating.
    pub(crate) fn from_clamped(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        debug_assert!(kern::sq_norm(&coords) < 1.0);
        BallPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        kern::sq_norm(&self.coords).sqrt()
    }

    /// Samples a point uniformly (w.r.t. Euclidean volume) from the ball of
    /// the given radius. Used for embedding initialization and tests.
    pub fn sample_uniform<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> Self {
        assert!(dim > 0, "dimension must be positive");
        assert!(radius > 0.0 && radius < 1.0, "radius must be in (0, 1)");
        // Isotropic direction from Gaussians, radius from the inverse CDF.
        let mut v: Vec<f64> = (0..dim).map(|_| normal_sample(rng)).collect();
        let n = kern::sq_norm(&v).sqrt();
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        let scale = if n > 0.0 { r / n } else { 0.0 };
        for c in &mut v {
            *c *= scale;
        }
        BallPoint::from_clamped(v)
    }
}

/// Standard normal draw via Box-Muller; avoids pulling in a distributions
/// crate for the one place that needs it.
fn normal_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A tangent vector attached to a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: BallPoint,
    components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: BallPoint, components: Vec<f64>) -> Result<Self> {
        if components.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: components.len() });
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "tangent components" });
        }
        Ok(TangentVector { base, components })
    }

    pub fn zero(base: BallPoint) -> Self {
        let dim = base.dim();
        TangentVector { base, components: vec![0.0; dim] }
    }

    pub fn base(&self) -> &BallPoint {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Euclidean norm of the components (not the metric norm).
    pub fn norm(&self) -> f64 {
        kern::sq_norm(&self.components).sqrt()
    }

    /// Same base point, components scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut v = self.clone();
        for c in &mut v.components {
            *c *= s;
        }
        v
    }
}

/// Möbius addition `x ⊕ y`, the ball's gyro-translation. The result is
/// clamped back into the ball.
pub fn mobius_add(x: &BallPoint, y: &BallPoint) -> Result<BallPoint> {
    check_dims(x, y)?;
    let mut out = vec![0.0; x.dim()];
    kern::mobius_add(x.coords(), y.coords(), &mut out);
    kern::clamp_ball(&mut out);
    Ok(BallPoint::from_clamped(out))
}

/// Geodesic distance
/// `d(x, y) = arcosh(1 + 2 ||x - y||^2 / ((1 - ||x||^2)(1 - ||y||^2)))`.
pub fn distance(x: &BallPoint, y: &BallPoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(kern::dist(x.coords(), y.coords()))
}

/// Squared geodesic distance.
pub fn distance_sq(x: &BallPoint, y: &BallPoint) -> Result<f64> {
    let d = distance(x, y)?;
    Ok(d * d)
}

/// Exponential map `Exp_x(v) = x ⊕ (tanh(||v|| / (1 - ||x||^2)) v / ||v||)`,
/// clamped back into the ball. The zero vector maps to the base point.
pub fn exp_map(v: &TangentVector) -> BallPoint {
    let mut out = vec![0.0; v.base.dim()];
    kern::exp_map(v.base.coords(), v.components(), &mut out);
    BallPoint::from_clamped(out)
}

/// Logarithmic map: the tangent vector at `x` whose exponential reaches `y`,
/// `Log_x(y) = (1 - ||x||^2) artanh(||w||) w / ||w||` with `w = (-x) ⊕ y`.
/// Coincident points (within `COINCIDENT_EPS`) give the zero vector.
pub fn log_map(x: &BallPoint, y: &BallPoint) -> Result<TangentVector> {
    check_dims(x, y)?;
    let mut out = vec![0.0; x.dim()];
    kern::log_map(x.coords(), y.coords(), &mut out);
    Ok(TangentVector { base: x.clone(), components: out })
}

/// Riemannian gradient of `x ↦ d^2(x, y)`, namely `-2 Log_x(y)`.
pub fn grad_sq_distance(x: &BallPoint, y: &BallPoint) -> Result<TangentVector> {
    let v = log_map(x, y)?;
    Ok(v.scaled(-2.0))
}

/// One Riemannian gradient-descent step `Exp_x(-eta * grad)`.
///
/// Boundary rule: if the unclamped exponential lands at norm
/// `>= 1 - BALL_EPS`, the step is discarded and `x` returned unchanged.
pub fn rgd_step(x: &BallPoint, grad: &TangentVector, eta: f64) -> Result<BallPoint> {
    if grad.components.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: grad.components.len() });
    }
    if !eta.is_finite() {
        return Err(Error::NonFinite { what: "step size" });
    }
    let mut out = vec![0.0; x.dim()];
    kern::rgd_step(x.coords(), grad.components(), eta, &mut out);
    Ok(BallPoint::from_clamped(out))
}

/// Metric inner product of two tangent vectors at `x`:
/// `(2 / (1 - ||x||^2))^2 <u, v>`.
pub fn metric_inner(x: &BallPoint, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != x.dim() || v.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: if u.len() != x.dim() { u.len() } else { v.len() },
        });
    }
    let lam = kern::conformal(x.coords());
    Ok(lam * lam * kern::dot(u, v))
}

fn check_dims(x: &BallPoint, y: &BallPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}

/// Allocation-free slice kernels behind the typed API. Inputs are assumed
/// finite and strictly inside the ball (the `BallPoint` invariant); outputs
/// are clamped wherever the contract requires it.
pub(crate) mod kern {
    use super::BALL_EPS;

    pub fn dot(x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn sq_norm(x: &[f64]) -> f64 {
        dot(x, x)
    }

    pub fn sq_dist_euclid(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Conformal factor `lambda_x = 2 / (1 - ||x||^2)`.
    pub fn conformal(x: &[f64]) -> f64 {
        2.0 / (1.0 - sq_norm(x))
    }

    /// Radially clamps `x` to norm at most `1 - BALL_EPS`.
    pub fn clamp_ball(x: &mut [f64]) {
        let n2 = sq_norm(x);
        let max = 1.0 - BALL_EPS;
        if n2 > max * max {
            let scale = max / n2.sqrt();
            for c in x.iter_mut() {
                *c *= scale;
            }
        }
    }

    /// Möbius addition, unclamped:
    /// `x ⊕ y = ((1 + 2<x,y> + ||y||^2) x + (1 - ||x||^2) y) / (1 + 2<x,y> + ||x||^2 ||y||^2)`.
    /// Safe to call with `out` aliasing `y` elementwise (every `y[i]` is read
    /// before `out[i]` is written).
    pub fn mobius_add(x: &[f64], y: &[f64], out: &mut [f64]) {
        let xy = dot(x, y);
        let xx = sq_norm(x);
        let yy = sq_norm(y);
        let a = 1.0 + 2.0 * xy + yy;
        let b = 1.0 - xx;
        let d = 1.0 + 2.0 * xy + xx * yy;
        for i in 0..x.len() {
            out[i] = (a * x[i] + b * y[i]) / d;
        }
    }

    /// `(-x) ⊕ y` without materializing `-x`.
    pub fn mobius_add_neg_x(x: &[f64], y: &[f64], out: &mut [f64]) {
        let xy = -dot(x, y);
        let xx = sq_norm(x);
        let yy = sq_norm(y);
        let a = 1.0 + 2.0 * xy + yy;
        let b = 1.0 - xx;
        let d = 1.0 + 2.0 * xy + xx * yy;
        for i in 0..x.len() {
            out[i] = (a * -x[i] + b * y[i]) / d;
        }
    }

    /// Geodesic distance via `arcosh(1 + t)` with
    /// `t = 2 ||x - y||^2 / ((1 - ||x||^2)(1 - ||y||^2))`, evaluated as
    /// `ln(1 + t + sqrt(t (t + 2)))` so nearby points do not cancel.
    pub fn dist(x: &[f64], y: &[f64]) -> f64 {
        let t = 2.0 * sq_dist_euclid(x, y) / ((1.0 - sq_norm(x)) * (1.0 - sq_norm(y)));
        (t + (t * (t + 2.0)).sqrt()).ln_1p()
    }

    pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
        let d = dist(x, y);
        d * d
    }

    /// Log map components written into `out`. Coincident inputs give zeros.
    pub fn log_map(x: &[f64], y: &[f64], out: &mut [f64]) {
        if sq_dist_euclid(x, y) < super::COINCIDENT_EPS * super::COINCIDENT_EPS {
            out.fill(0.0);
            return;
        }
        mobius_add_neg_x(x, y, out);
        let r = sq_norm(out).sqrt().min(1.0 - BALL_EPS);
        if r == 0.0 {
            out.fill(0.0);
            return;
        }
        let scale = (1.0 - sq_norm(x)) * r.atanh() / r;
        for c in out.iter_mut() {
            *c *= scale;
        }
    }

    /// Exponential map without the final clamp, with the tangent components
    /// already stored in `out` (overwritten with the result).
    pub fn exp_map_inplace_raw(x: &[f64], out: &mut [f64]) {
        let nv = sq_norm(out).sqrt();
        if nv < 1e-300 {
            out.copy_from_slice(x);
            return;
        }
        let t = (nv / (1.0 - sq_norm(x))).tanh();
        let scale = t / nv;
        for c in out.iter_mut() {
            *c *= scale;
        }
        let xy = dot(x, out);
        let xx = sq_norm(x);
        let yy = sq_norm(out);
        let a = 1.0 + 2.0 * xy + yy;
        let b = 1.0 - xx;
        let d = 1.0 + 2.0 * xy + xx * yy;
        for i in 0..x.len() {
            out[i] = (a * x[i] + b * out[i]) / d;
        }
    }

    /// Exponential map, clamped into the ball.
    pub fn exp_map(x: &[f64], v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
        exp_map_inplace_raw(x, out);
        clamp_ball(out);
    }

    /// One descent step `Exp_x(-eta * grad)` with the boundary skip rule:
    /// if the unclamped result reaches norm `1 - BALL_EPS` the step is
    /// discarded and `x` copied to `out`. Returns whether the step applied.
    pub fn rgd_step(x: &[f64], grad: &[f64], eta: f64, out: &mut [f64]) -> bool {
        for i in 0..grad.len() {
            out[i] = -eta * grad[i];
        }
        exp_map_inplace_raw(x, out);
        let max = 1.0 - BALL_EPS;
        if sq_norm(out) >= max * max {
            out.copy_from_slice(x);
            false
        } else {
            true
        }
    }
}
