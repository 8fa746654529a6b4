//! SVG rendering of 2-D ball embeddings: the unit-circle boundary, the
//! node scatter colored by first label, mixture means as red squares, and
//! one geodesic circle of radius σ per component. Output is plain SVG
//! text with no external assets, so fixtures diff cleanly.

use std::fmt::Write as _;

use crate::classify::LabelMatrix;
use crate::error::{Error, Result};
use crate::geometry::{exp_map, BallPoint, TangentVector};
use crate::mixture::MixtureModel;

/// Scatter colors, cycled by label column; unlabeled nodes are gray.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#d62728",
];
const UNLABELED: &str = "#999999";
const MEAN_COLOR: &str = "#d62728";

#[derive(Clone, Debug)]
pub struct PlotOptions {
    /// Rendered width and height in pixels (the drawing is square).
    pub size_px: usize,
    /// Node dot radius in ball units.
    pub point_radius: f64,
    /// Polyline segments per geodesic circle.
    pub circle_segments: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { size_px: 640, point_radius: 0.012, circle_segments: 128 }
    }
}

/// The circle of hyperbolic radius `sigma` around `mu`, as `segments`
/// ball-coordinate vertices: `Exp_mu(v_theta)` over a full turn of tangent
/// directions with metric norm `sigma`, i.e. Euclidean tangent norm
/// `sigma (1 - ||mu||^2) / 2`.
pub fn geodesic_circle(mu: &BallPoint, sigma: f64, segments: usize) -> Result<Vec<(f64, f64)>> {
    if mu.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: mu.dim(), max: 2 });
    }
    if !(sigma.is_finite() && sigma > 0.0) || segments < 3 {
        return Err(Error::Usage("geodesic circle needs sigma > 0 and >= 3 segments".into()));
    }
    let tangent_norm = sigma * (1.0 - mu.norm() * mu.norm()) / 2.0;
    (0..segments)
        .map(|s| {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / segments as f64;
            let v = TangentVector::new(
                mu.clone(),
                vec![tangent_norm * theta.cos(), tangent_norm * theta.sin()],
            )?;
            let p = exp_map(&v);
            Ok((p.coords()[0], p.coords()[1]))
        })
        .collect()
}

/// Renders the embedding to an SVG document. `labels` colors nodes by
/// their first community (absent or empty rows fall back to a single
/// gray); `model` adds the red-square means and per-component geodesic
/// σ-circles. Only 2-D embeddings can be drawn.
pub fn render_svg(
    points: &[BallPoint],
    labels: Option<&LabelMatrix>,
    model: Option<&MixtureModel>,
    opts: &PlotOptions,
) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyInput { what: "points to plot" });
    }
    if points[0].dim() != 2 || points.iter().any(|p| p.dim() != 2) {
        return Err(Error::Usage(
            "plotting needs a 2-dimensional embedding; retrain with --dim 2".into(),
        ));
    }
    if let Some(y) = labels {
        if y.n() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: y.n() });
        }
    }
    if let Some(m) = model {
        if m.dim() != 2 {
            return Err(Error::Usage(
                "mixture to plot needs dimension 2; refit with --dim 2".into(),
            ));
        }
    }

    // Math convention: positive y points up, so the y coordinate is
    // negated on its way into SVG's downward axis.
    let mut svg = String::new();
    let px = opts.size_px;
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" \
         width=\"{px}\" height=\"{px}\">"
    )
    .expect("string writes cannot fail");
    svg.push_str(
        "  <circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" \
         stroke=\"#333333\" stroke-width=\"0.006\"/>\n",
    );

    for (i, p) in points.iter().enumerate() {
        let color = match labels {
            Some(y) if y.is_labeled(i) => PALETTE[y.memberships(i)[0] as usize % PALETTE.len()],
            _ => UNLABELED,
        };
        writeln!(
            svg,
            "  <circle class=\"node\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.4}\" fill=\"{color}\" \
             fill-opacity=\"0.85\"/>",
            p.coords()[0],
            -p.coords()[1],
            opts.point_radius
        )
        .expect("string writes cannot fail");
    }

    if let Some(m) = model {
        for c in m.components() {
            let verts = geodesic_circle(c.mu(), c.sigma(), opts.circle_segments)?;
            let mut pts = String::new();
            for (x, y) in &verts {
                write!(pts, "{x:.6},{:.6} ", -y).expect("string writes cannot fail");
            }
            // Close the loop back to the first vertex.
            write!(pts, "{:.6},{:.6}", verts[0].0, -verts[0].1)
                .expect("string writes cannot fail");
            writeln!(
                svg,
                "  <polyline class=\"contour\" points=\"{pts}\" fill=\"none\" \
                 stroke=\"{MEAN_COLOR}\" stroke-width=\"0.005\"/>"
            )
            .expect("string writes cannot fail");
        }
        let s = opts.point_radius * 1.6;
        for c in m.components() {
            writeln!(
                svg,
                "  <rect class=\"mean\" x=\"{:.6}\" y=\"{:.6}\" width=\"{:.4}\" \
                 height=\"{:.4}\" fill=\"{MEAN_COLOR}\"/>",
                c.mu().coords()[0] - s,
                -c.mu().coords()[1] - s,
                2.0 * s,
                2.0 * s
            )
            .expect("string writes cannot fail");
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
