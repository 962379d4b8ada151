//! Audit a numeric CSV end to end: discretize with equal-depth bins, fit
//! a generator, and score leakage. Stands in for the usual case where the
//! data arrives as a file rather than a ready-made categorical table.

use std::error::Error;
use std::io::Write;

use privaudit::attack::{shadow_profile, zeta};
use privaudit::cli::DataSource;
use privaudit::data::Dataset;
use privaudit::eval::auc;
use privaudit::gen::{fit, sample, GeneratorConfig, GeneratorKind, Mode};
use privaudit::rng::stream;

fn main() -> Result<(), Box<dyn Error>> {
    // Three correlated numeric columns plus a small categorical one.
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("measurements.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "load,temp,drift,site")?;
    let mut rng = stream(1, "example/csv");
    use rand::Rng as _;
    for _ in 0..8000 {
        let load: f64 = rng.gen_range(0.0..100.0);
        let temp = 20.0 + 0.3 * load + rng.gen_range(-5.0..5.0);
        let drift = (load - 50.0).abs() / 10.0 + rng.gen_range(0.0..2.0);
        let site = ["north", "south", "east"][rng.gen_range(0..3)];
        writeln!(f, "{load:.2},{temp:.2},{drift:.3},{site}")?;
    }
    drop(f);

    let source = DataSource::Csv { path: "measurements.csv".into(), bins: 20, schema: None };
    let (schema, aux, _) = source.load(dir.path())?;
    println!("loaded {} rows, {} features", aux.n_rows(), schema.len());
    for i in 0..schema.len() {
        println!("  {} -> {} categories", schema.feature(i).name, schema.domain(i));
    }

    let train = aux.subset(&(0..1000).collect::<Vec<_>>())?;
    let cfg = GeneratorConfig::new(GeneratorKind::MstLike, 100.0, 1000, 9);
    let fitted = fit(&cfg, &train, Mode::Full)?;
    let synth = sample(&fitted, 1000, &mut stream(9, "example/synth"))?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..20 {
        rows.push(train.row(i * 13).to_vec());
        labels.push(true);
        rows.push(aux.row(4000 + i * 17).to_vec());
        labels.push(false);
    }
    let targets = Dataset::from_rows(schema.clone(), &rows)?;

    let profile = shadow_profile(&cfg, &aux, 1000, 30, 14)?;
    let scores = zeta(&synth, &aux, &profile, &targets)?;
    let zetas: Vec<f64> = scores.iter().map(|s| s.zeta).collect();
    println!("\nmembership AUC on the binned table: {:.3}", auc(&zetas, &labels)?);
    Ok(())
}
