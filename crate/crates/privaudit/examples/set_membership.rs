//! Auditing groups instead of individuals. When several records enter (or
//! stay out of) the training data together, pooling their scores makes
//! the call easier than judging any one record alone.

use std::error::Error;

use privaudit::data::{synthesize_population, PopulationConfig, PopulationEdge};
use privaudit::eval::{run_trial, AttackKind, TrialConfig};
use privaudit::gen::{GeneratorConfig, GeneratorKind};

fn main() -> Result<(), Box<dyn Error>> {
    let pop = PopulationConfig {
        rows: 15_000,
        domains: vec![9, 8, 7, 8, 9, 6, 7, 8],
        edges: vec![
            PopulationEdge { parent: 0, child: 1, coupling: 0.55 },
            PopulationEdge { parent: 0, child: 2, coupling: 0.5 },
            PopulationEdge { parent: 1, child: 3, coupling: 0.5 },
            PopulationEdge { parent: 2, child: 4, coupling: 0.5 },
            PopulationEdge { parent: 3, child: 5, coupling: 0.5 },
            PopulationEdge { parent: 4, child: 6, coupling: 0.5 },
            PopulationEdge { parent: 5, child: 7, coupling: 0.5 },
        ],
        names: None,
        seed: 23,
    };
    let aux = synthesize_population(&pop)?;

    // A tiny training set makes single-record calls hard; sets of five
    // records pool five weak signals into one decision.
    let gen = GeneratorConfig::new(GeneratorKind::PrivBayesLike, 8.0, 1000, 0);
    let mut cfg = TrialConfig::new(gen, 100, 12, 6, 0);
    cfg.attacks = vec![AttackKind::MamaMia];
    cfg.set_size = Some(5);

    let mut record = Vec::new();
    let mut set = Vec::new();
    for trial in 0..5 {
        cfg.seed = trial;
        let result = run_trial(&cfg, &aux)?;
        let report = &result.reports[0];
        record.push(report.auc);
        set.push(report.set_auc.expect("set metrics requested"));
        println!(
            "trial {trial}: record auc = {:.3}, set auc = {:.3}",
            report.auc,
            report.set_auc.unwrap()
        );
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("\nmean record auc = {:.3}", mean(&record));
    println!("mean set auc    = {:.3}", mean(&set));
    Ok(())
}
