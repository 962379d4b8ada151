//! Shared fixtures and property checks used by the integration suites.
//!
//! Each `prop_*` function is a self-contained randomized check that panics
//! on violation; `properties.rs` exposes them as individual tests and the
//! acceptance suite reruns the whole list under a stopwatch.

#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestError, TestRunner};

use privaudit::attack::{zeta_with, FPProfile};
use privaudit::data::{
    synthesize_population, Cat, Dataset, PopulationConfig, PopulationEdge, Schema,
};
use privaudit::eval::{auc, membership_advantage, roc, roc_area};
use privaudit::gen::gsd::{evolve, EvoParams};
use privaudit::gen::mst::select_edges;
use privaudit::gen::privbayes::parent_cap;
use privaudit::gen::{fit, GeneratorConfig, GeneratorKind, Mode};
use privaudit::rng::stream;
use privaudit::stats::{
    estimate_marginal, mutual_information, FocalPoint,
};

/// The shared audit population: 15 categorical features with domain sizes
/// spanning 2 through 10, dependencies forming a single tree. Mostly large
/// domains keep pairwise cells sparse enough that membership actually
/// leaks at weak privacy; the two small-domain leaves are strongly coupled
/// so their edges still carry structure.
pub fn audit_population(rows: usize, seed: u64) -> Dataset {
    let domains = vec![10, 9, 8, 10, 9, 8, 10, 9, 8, 10, 2, 9, 8, 10, 3];
    let edges = [
        (0, 1, 0.5),
        (0, 2, 0.5),
        (1, 3, 0.5),
        (1, 4, 0.5),
        (2, 5, 0.5),
        (2, 6, 0.5),
        (3, 7, 0.5),
        (4, 8, 0.5),
        (5, 9, 0.5),
        (5, 10, 0.8),
        (6, 11, 0.5),
        (7, 12, 0.5),
        (8, 13, 0.5),
        (9, 14, 0.75),
    ];
    let cfg = PopulationConfig {
        rows,
        domains,
        edges: edges
            .iter()
            .map(|&(parent, child, coupling)| PopulationEdge { parent, child, coupling })
            .collect(),
        names: None,
        seed,
    };
    synthesize_population(&cfg).expect("audit population must build")
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(PropConfig { cases, failure_persistence: None, ..PropConfig::default() })
}

fn unwrap_prop<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) {
    if let Err(e) = r {
        panic!("property {name} failed: {e}");
    }
}

/// Rows over `domains`, as a strategy.
fn rows_strategy(domains: Vec<usize>, max_rows: usize) -> impl Strategy<Value = Vec<Vec<Cat>>> {
    let row = domains
        .iter()
        .map(|&d| (0..d as u16).boxed())
        .collect::<Vec<_>>();
    prop::collection::vec(row, 2..max_rows)
}

fn small_dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(2usize..6, 2..5)
        .prop_flat_map(|domains| {
            let d2 = domains.clone();
            rows_strategy(domains, 120).prop_map(move |rows| {
                let names: Vec<String> = (0..d2.len()).map(|i| format!("f{i}")).collect();
                let schema = Arc::new(Schema::uniform(&names, &d2).unwrap());
                Dataset::from_rows(schema, &rows).unwrap()
            })
        })
}

/// Estimated marginal probabilities sum to 1 within 1e-9, for any feature
/// subset and pseudo-count.
pub fn prop_marginal_normalization() {
    let strat = (small_dataset(), 0usize..3, prop::sample::select(vec![0.0, 0.5, 1.0]));
    unwrap_prop(
        "marginal_normalization",
        runner(64).run(&strat, |(d, nvars, pseudo)| {
            let vars: Vec<usize> = (0..=nvars.min(d.n_features() - 1)).collect();
            let t = estimate_marginal(&d, &vars, pseudo).unwrap();
            let total: f64 = (0..t.cells()).map(|c| t.prob_cell(c)).sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "probabilities sum to {total}");
            Ok(())
        }),
    );
}

/// Collapsing one axis of a 2-way count table reproduces the 1-way count
/// table exactly (raw counts are integers, so no tolerance).
pub fn prop_marginalization_consistency() {
    unwrap_prop(
        "marginalization_consistency",
        runner(64).run(&small_dataset(), |d| {
            prop_assume!(d.n_features() >= 2);
            let two = estimate_marginal(&d, &[0, 1], 0.0).unwrap();
            let one = estimate_marginal(&d, &[0], 0.0).unwrap();
            let d1 = d.schema().domain(1) as u64;
            for a in 0..d.schema().domain(0) as u64 {
                let collapsed: f64 = (0..d1).map(|b| two.raw_count(a * d1 + b)).sum();
                prop_assert_eq!(collapsed, one.raw_count(a));
            }
            Ok(())
        }),
    );
}

/// Mutual information is symmetric (bitwise, by construction over sorted
/// axes) and non-negative up to float fuzz.
pub fn prop_mi_symmetric_nonnegative() {
    unwrap_prop(
        "mi_symmetric_nonnegative",
        runner(64).run(&small_dataset(), |d| {
            prop_assume!(d.n_features() >= 2);
            let ij = mutual_information(&d, 0, 1).unwrap();
            let ji = mutual_information(&d, 1, 0).unwrap();
            prop_assert!((ij - ji).abs() < 1e-12, "MI symmetric: {ij} vs {ji}");
            prop_assert!(ij >= -1e-9, "MI must be non-negative, got {ij}");
            Ok(())
        }),
    );
}

fn connected(l: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..l).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let r0 = find(&mut parent, 0);
    (1..l).all(|i| find(&mut parent, i) == r0)
}

/// Every tree-generator selection, at any epsilon, returns exactly l-1
/// distinct edges forming a connected (hence spanning) tree.
pub fn prop_mst_spanning_tree() {
    let strat = (small_dataset(), prop::sample::select(vec![0.05f64, 1.0, 50.0]), 0u64..1000);
    unwrap_prop(
        "mst_spanning_tree",
        runner(48).run(&strat, |(d, eps, seed)| {
            prop_assume!(d.n_features() >= 2);
            let l = d.n_features();
            let edges = select_edges(&d, eps, &mut stream(seed, "prop/select")).unwrap();
            prop_assert_eq!(edges.len(), l - 1);
            for &(i, j) in &edges {
                prop_assert!(i < j && j < l, "edges are ordered pairs in range");
            }
            let mut dedup = edges.clone();
            dedup.sort_unstable();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), l - 1, "edges are distinct");
            prop_assert!(connected(l, &edges), "tree spans every feature");
            Ok(())
        }),
    );
}

/// Every Bayesian-network structure is a DAG under some placement order
/// and respects the epsilon-dependent parent cap.
pub fn prop_privbayes_dag_and_cap() {
    let strat = (small_dataset(), prop::sample::select(vec![0.1f64, 1.0, 10.0, 1000.0]), 0u64..1000);
    unwrap_prop(
        "privbayes_dag_and_cap",
        runner(48).run(&strat, |(d, eps, seed)| {
            let cap = parent_cap(eps, None);
            let cfg = GeneratorConfig::new(GeneratorKind::PrivBayesLike, eps, 10, seed);
            let out = fit(&cfg, &d, Mode::FpOnly).unwrap();
            prop_assert_eq!(out.focal_points.len(), d.n_features());
            let mut placed = vec![false; d.n_features()];
            for fp in &out.focal_points {
                let (child, parents) = match fp {
                    FocalPoint::Conditional { child, parents } => (*child, parents.clone()),
                    FocalPoint::Marginal { features } => {
                        prop_assert_eq!(features.len(), 1, "root factors are 1-way");
                        (features[0], vec![])
                    }
                };
                prop_assert!(parents.len() <= cap, "parent set within cap {cap}");
                for p in &parents {
                    prop_assert!(placed[*p], "parents precede children: DAG order");
                }
                prop_assert!(!placed[child], "each feature placed once");
                placed[child] = true;
            }
            prop_assert!(placed.iter().all(|&p| p), "all features placed");
            Ok(())
        }),
    );
}

/// With elitism the best fitness never worsens between generations, and
/// evolved rows stay inside their feature domains.
pub fn prop_gsd_elitism_and_domains() {
    let strat = (prop::collection::vec(2usize..5, 2..4), 0u64..1000);
    unwrap_prop(
        "gsd_elitism_and_domains",
        runner(16).run(&strat, |(domains, seed)| {
            let names: Vec<String> = (0..domains.len()).map(|i| format!("f{i}")).collect();
            let schema = Arc::new(Schema::uniform(&names, &domains).unwrap());
            // One marginal query per feature plus one pairwise query; each
            // target vector has one entry per indicator combination.
            let mut queries: Vec<Vec<(usize, Cat)>> =
                (0..domains.len()).map(|f| vec![(f, 0)]).collect();
            queries.push(vec![(0, 1), (1, 0)]);
            let targets: Vec<Vec<f64>> = queries
                .iter()
                .map(|q| {
                    let cells = 1usize << q.len();
                    vec![1.0 / cells as f64; cells]
                })
                .collect();
            let params =
                EvoParams { population: 8, elites: 2, generations: 40, patience: 40, rows: 24 };
            let ev = evolve(&schema, &queries, &targets, &params, seed).unwrap();
            for w in ev.trace.windows(2) {
                prop_assert!(w[1] <= w[0], "best fitness is non-increasing: {:?}", w);
            }
            for (i, &v) in ev.rows.iter().enumerate() {
                let f = i % domains.len();
                prop_assert!((v as usize) < domains[f], "value inside domain");
            }
            Ok(())
        }),
    );
}

fn scores_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    // Coarse score grid forces plenty of ties.
    let pair = (prop::sample::select(vec![0.0f64, 0.25, 0.5, 0.75, 1.0]), any::<bool>());
    prop::collection::vec(pair, 4..64).prop_filter_map("need both classes", |v| {
        let (scores, labels): (Vec<f64>, Vec<bool>) = v.into_iter().unzip();
        (labels.iter().any(|&l| l) && labels.iter().any(|&l| !l)).then_some((scores, labels))
    })
}

/// Trapezoid area under the tie-aware ROC curve equals the rank-based AUC
/// within 1e-9, and reversing scores complements the AUC exactly.
pub fn prop_auc_roc_consistency() {
    unwrap_prop(
        "auc_roc_consistency",
        runner(128).run(&scores_strategy(), |(scores, labels)| {
            let a = auc(&scores, &labels).unwrap();
            let area = roc_area(&roc(&scores, &labels).unwrap());
            prop_assert!((a - area).abs() < 1e-9, "rank AUC {a} vs curve area {area}");
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let b = auc(&neg, &labels).unwrap();
            prop_assert_eq!(a + b, 1.0, "complement symmetry is exact");
            Ok(())
        }),
    );
}

/// Membership advantage hits its fixed points: perfect confident
/// classification gives 1, inverted gives 0, and all-abstaining gives 1/2.
pub fn prop_ma_fixed_points() {
    let strat = prop::collection::vec(any::<bool>(), 2..40).prop_filter("need both classes", |l| {
        l.iter().any(|&x| x) && l.iter().any(|&x| !x)
    });
    unwrap_prop(
        "ma_fixed_points",
        runner(64).run(&strat, |labels| {
            let perfect: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
            let inverted: Vec<f64> = labels.iter().map(|&l| if l { 0.0 } else { 1.0 }).collect();
            let abstain = vec![0.5; labels.len()];
            prop_assert_eq!(membership_advantage(&perfect, &labels).unwrap(), 1.0);
            prop_assert_eq!(membership_advantage(&inverted, &labels).unwrap(), 0.0);
            prop_assert_eq!(membership_advantage(&abstain, &labels).unwrap(), 0.5);
            Ok(())
        }),
    );
}

fn profile_over(counts: Vec<(FocalPoint, u32)>, runs: usize) -> FPProfile {
    FPProfile::new(GeneratorKind::MstLike, 10.0, 100, runs, 0, counts)
        .expect("profile parts are valid")
}

/// Scoring a dataset against itself with matched pseudo-counts returns the
/// profile's total weight for every target, exactly.
pub fn prop_zeta_total_weight_identity() {
    let strat = (small_dataset(), prop::collection::vec(1u32..50, 1..4));
    unwrap_prop(
        "zeta_total_weight_identity",
        runner(48).run(&strat, |(d, weights)| {
            prop_assume!(d.n_features() >= 2);
            let fps: Vec<(FocalPoint, u32)> = (0..d.n_features() - 1)
                .zip(weights.iter())
                .map(|(f, &w)| (FocalPoint::marginal(&[f, f + 1]).unwrap(), w))
                .collect();
            let profile = profile_over(fps, 50);
            let scores = zeta_with(&d, &d, &profile, &d, 0.0, 0.0).unwrap();
            for s in &scores {
                prop_assert_eq!(s.zeta, profile.total_weight(), "zeta equals the weight sum");
            }
            Ok(())
        }),
    );
}

/// Multiplying every profile weight by a constant rescales scores without
/// changing the target ranking.
pub fn prop_weight_scaling_preserves_ranking() {
    let strat = (small_dataset(), 1u32..6, 2u32..50, 1u64..500);
    unwrap_prop(
        "weight_scaling_preserves_ranking",
        runner(32).run(&strat, |(d, pow2, k, seed)| {
            prop_assume!(d.n_features() >= 2 && d.n_rows() >= 8);
            let mut rng = stream(seed, "prop/synth-split");
            let synth = d.sample_rows(d.n_rows() / 2, &mut rng).unwrap();
            let fps: Vec<(FocalPoint, u32)> = (0..d.n_features() - 1)
                .map(|f| (FocalPoint::marginal(&[f, f + 1]).unwrap(), 7))
                .collect();
            let rescale = |m: u32| -> Vec<(FocalPoint, u32)> {
                fps.iter().map(|(fp, w)| (fp.clone(), w * m)).collect()
            };
            let base = profile_over(rescale(1), 50);
            let zetas = |p: &privaudit::attack::FPProfile| -> Vec<f64> {
                zeta_with(&synth, &d, p, &d, 0.0, 1.0)
                    .unwrap()
                    .iter()
                    .map(|s| s.zeta)
                    .collect()
            };
            let s1 = zetas(&base);

            // Power-of-two scaling commutes with float rounding, so the
            // whole score vector scales exactly and every tie survives.
            let two = profile_over(rescale(1 << pow2), 50 << pow2);
            let s2 = zetas(&two);
            let f = f64::from(1u32 << pow2);
            for (a, b) in s1.iter().zip(&s2) {
                prop_assert_eq!(a * f, *b, "power-of-two scaling is exact");
            }

            // Arbitrary positive scaling must keep every decided pair in
            // the same order; pairs tied up to rounding may go either way.
            let big = profile_over(rescale(k), 50 * k as usize);
            let s3 = zetas(&big);
            for i in 0..s1.len() {
                for j in i + 1..s1.len() {
                    let gap = (s1[i] - s1[j]).abs();
                    if gap > 1e-9 * s1[i].max(s1[j]) {
                        prop_assert_eq!(
                            s1[i] > s1[j],
                            s3[i] > s3[j],
                            "strict order preserved under scaling by {}",
                            k
                        );
                    }
                }
            }
            Ok(())
        }),
    );
}

/// The full list, in a stable order, for timed execution.
pub fn all_properties() -> Vec<(&'static str, fn())> {
    vec![
        ("marginal_normalization", prop_marginal_normalization as fn()),
        ("marginalization_consistency", prop_marginalization_consistency),
        ("mi_symmetric_nonnegative", prop_mi_symmetric_nonnegative),
        ("mst_spanning_tree", prop_mst_spanning_tree),
        ("privbayes_dag_and_cap", prop_privbayes_dag_and_cap),
        ("gsd_elitism_and_domains", prop_gsd_elitism_and_domains),
        ("auc_roc_consistency", prop_auc_roc_consistency),
        ("ma_fixed_points", prop_ma_fixed_points),
        ("zeta_total_weight_identity", prop_zeta_total_weight_identity),
        ("weight_scaling_preserves_ranking", prop_weight_scaling_preserves_ranking),
    ]
}
