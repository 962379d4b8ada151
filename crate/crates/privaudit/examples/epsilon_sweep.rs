//! Sweep the privacy budget and watch attack strength and output fidelity
//! trade off. A scaled-down version of the experiment the CLI runs.

use std::error::Error;

use privaudit::data::{synthesize_population, PopulationConfig, PopulationEdge};
use privaudit::eval::{run_experiment, AttackKind, TrialConfig};
use privaudit::gen::{GeneratorConfig, GeneratorKind};

fn main() -> Result<(), Box<dyn Error>> {
    let pop = PopulationConfig {
        rows: 12_000,
        domains: vec![10, 9, 8, 10, 9, 8],
        edges: vec![
            PopulationEdge { parent: 0, child: 1, coupling: 0.55 },
            PopulationEdge { parent: 1, child: 2, coupling: 0.5 },
            PopulationEdge { parent: 1, child: 3, coupling: 0.5 },
            PopulationEdge { parent: 2, child: 4, coupling: 0.5 },
            PopulationEdge { parent: 3, child: 5, coupling: 0.5 },
        ],
        names: None,
        seed: 5,
    };
    let aux = synthesize_population(&pop)?;

    let mut grid = Vec::new();
    for eps in [0.1, 10.0, 1000.0] {
        let gen = GeneratorConfig::new(GeneratorKind::MstLike, eps, 500, 0);
        let mut cell = TrialConfig::new(gen, 500, 48, 24, 0);
        cell.attacks = vec![AttackKind::MamaMia, AttackKind::Domias];
        cell.shadow_runs = 30;
        grid.push(cell);
    }

    println!("running {} cells x 10 trials", grid.len());
    let outcome = run_experiment(&grid, 10, 2024, &aux)?;

    println!("\n{:>8} {:>10} {:>8} {:>8} {:>10}", "epsilon", "attack", "auc", "ma", "distance");
    for row in &outcome.summary {
        println!(
            "{:>8} {:>10} {:>8.3} {:>8.3} {:>10.3}",
            row.epsilon,
            row.attack.to_string(),
            row.auc_mean,
            row.ma_mean,
            row.quality_mean,
        );
    }
    println!("\nleakage (auc) rises with epsilon while distance to the train data falls");
    Ok(())
}
