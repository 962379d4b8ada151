//! The full membership attack, stage by stage, against one release.
//!
//! A victim trains a generator on a private sample and publishes synthetic
//! data. The auditor, holding only the release and a reference dataset
//! from the same population, profiles the generator's focal points,
//! scores candidate records by weighted density ratios, and calibrates
//! the scores into membership probabilities.

use std::error::Error;

use privaudit::attack::{activate, shadow_profile, zeta};
use privaudit::data::{synthesize_population, Dataset, PopulationConfig, PopulationEdge};
use privaudit::eval::{auc, membership_advantage};
use privaudit::gen::{fit, sample, GeneratorConfig, GeneratorKind, Mode};
use privaudit::rng::stream;

fn main() -> Result<(), Box<dyn Error>> {
    let pop = PopulationConfig {
        rows: 30_000,
        domains: vec![9, 8, 7, 6, 8, 7, 6, 5, 9, 4],
        edges: vec![
            PopulationEdge { parent: 0, child: 1, coupling: 0.55 },
            PopulationEdge { parent: 0, child: 2, coupling: 0.5 },
            PopulationEdge { parent: 1, child: 3, coupling: 0.5 },
            PopulationEdge { parent: 1, child: 4, coupling: 0.5 },
            PopulationEdge { parent: 2, child: 5, coupling: 0.5 },
            PopulationEdge { parent: 4, child: 6, coupling: 0.45 },
            PopulationEdge { parent: 5, child: 7, coupling: 0.5 },
            PopulationEdge { parent: 6, child: 8, coupling: 0.5 },
            PopulationEdge { parent: 7, child: 9, coupling: 0.5 },
        ],
        names: None,
        seed: 19,
    };
    let population = synthesize_population(&pop)?;
    let aux = population.subset(&(0..20_000).collect::<Vec<_>>())?;

    // Victim side: a private training sample and its synthetic release.
    let train = population.subset(&(20_000..21_000).collect::<Vec<_>>())?;
    let cfg = GeneratorConfig::new(GeneratorKind::PrivBayesLike, 500.0, 1000, 42);
    println!("victim: fitting {} at epsilon {}", cfg.kind, cfg.epsilon);
    let fitted = fit(&cfg, &train, Mode::Full)?;
    let synth = sample(&fitted, 1000, &mut stream(42, "victim/sample"))?;

    // Targets: 16 training members mixed with 16 outsiders.
    let mut rows: Vec<Vec<_>> = Vec::new();
    let mut labels = Vec::new();
    for i in 0..16 {
        rows.push(train.row(i * 7).to_vec());
        labels.push(true);
        rows.push(population.row(25_000 + i * 11).to_vec());
        labels.push(false);
    }
    let targets = Dataset::from_rows(aux.schema().clone(), &rows)?;

    // Auditor side: the victim's training data never appears below.
    println!("auditor: shadow-profiling 50 runs on reference data");
    let profile = shadow_profile(&cfg, &aux, 1000, 50, 7)?;
    let mut scores = zeta(&synth, &aux, &profile, &targets)?;
    activate(&mut scores, 1.0, 0.5)?;

    let zetas: Vec<f64> = scores.iter().map(|s| s.zeta).collect();
    let probs: Vec<f64> = scores.iter().map(|s| s.probability.unwrap()).collect();
    println!("\n{:>6} {:>10} {:>6} {}", "target", "zeta", "prob", "member?");
    for (s, &l) in scores.iter().zip(&labels).take(8) {
        println!("{:>6} {:>10.2} {:>6.3} {}", s.target, s.zeta, s.probability.unwrap(), l);
    }
    println!("   ...");
    println!("\nAUC = {:.3}", auc(&zetas, &labels)?);
    println!("membership advantage = {:.3}", membership_advantage(&probs, &labels)?);
    Ok(())
}
