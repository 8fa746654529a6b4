//! The README walkthrough: embed the bundled karate-club graph, read off
//! the unsupervised communities, and cross-validate a supervised
//! classifier. Run from the repository root:
//!
//! ```sh
//! cargo run --release -p hypercom --example karate
//! ```

use hypercom::classify::{cross_validate, ClassifierKind, CvOptions};
use hypercom::graph::{load_edge_list_path, load_labels_path};
use hypercom::metrics::{conductance, precision_at_n, Matching};
use hypercom::trainer::{train, TrainConfig};

fn main() -> hypercom::Result<()> {
    let mut g = load_edge_list_path("data/karate.edges")?;
    let labels = load_labels_path("data/karate.labels", &mut g)?;

    // Joint embedding + mixture training.
    let fit = train(&g, &TrainConfig { k: 2, ..TrainConfig::default() })?;
    let points = fit.table.phi_points();

    // Unsupervised view: most probable mixture component per node.
    let assign: Vec<usize> = (0..points.len()).map(|i| fit.resp.argmax(i)).collect();
    println!("conductance {:.4}", conductance(&g, &assign)?.mean);
    let pred: Vec<Vec<u32>> = assign.iter().map(|&c| vec![c as u32]).collect();
    println!("precision@1 {:.4}", precision_at_n(&pred, &labels, Matching::Exhaustive)?);

    // Supervised view: 5-fold CV of the nearest-barycenter classifier.
    let report = cross_validate(
        &points,
        &labels,
        ClassifierKind::NearestBarycenter,
        &CvOptions::default(),
    )?;
    println!("cv folds: {:?}", report.per_fold[0]);
    Ok(())
}
