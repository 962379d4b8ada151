//! Fit each generator on the same training data at two privacy budgets
//! and compare how far the synthetic output drifts from the original.

use std::error::Error;

use privaudit::data::{synthesize_population, PopulationConfig, PopulationEdge};
use privaudit::gen::{fit, sample, GeneratorConfig, GeneratorKind, Mode};
use privaudit::rng::stream;
use privaudit::stats::dataset_distance;

fn edge(parent: usize, child: usize, coupling: f64) -> PopulationEdge {
    PopulationEdge { parent, child, coupling }
}

fn main() -> Result<(), Box<dyn Error>> {
    let pop = PopulationConfig {
        rows: 5000,
        domains: vec![8, 6, 5, 4, 3, 6],
        edges: vec![edge(0, 1, 0.6), edge(0, 2, 0.5), edge(1, 3, 0.5), edge(2, 4, 0.4), edge(2, 5, 0.5)],
        names: None,
        seed: 11,
    };
    let data = synthesize_population(&pop)?;
    let train = data.subset(&(0..2000).collect::<Vec<_>>())?;

    println!("{:<12} {:>8} {:>10}", "generator", "epsilon", "distance");
    for kind in [GeneratorKind::MstLike, GeneratorKind::PrivBayesLike, GeneratorKind::GsdLike] {
        for eps in [0.5, 100.0] {
            let mut cfg = GeneratorConfig::new(kind, eps, 2000, 7);
            // Keep the evolutionary search small so the example stays quick.
            cfg.gsd.generations = 2000;
            cfg.gsd.patience = 200;
            let fitted = fit(&cfg, &train, Mode::Full)?;
            let synth = sample(&fitted, 2000, &mut stream(7, "example/sample"))?;
            let d = dataset_distance(&synth, &train)?;
            println!("{:<12} {:>8} {:>10.4}", kind.to_string(), eps, d);
        }
    }
    println!("\nlower distance = closer match to the training marginals");
    Ok(())
}
