//! Evolutionary generator: adaptively select one-hot marginal queries, take
//! noisy measurements, then run a (mu + lambda) search over candidate
//! synthetic datasets minimizing L1 error against the noisy targets.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use crate::stats::OneHotMap;

use crate::data::{Cat, Dataset, Schema};
use crate::dp::{exponential_select, laplace_counts, Budget, NoisyMeasurement};
use crate::rng::{child_seed, child_seed_idx, stream, stream_idx};
use crate::stats::{estimate_onehot_marginal, FocalPoint};
use crate::{Error, Result};

use super::{FitOutcome, GeneratorConfig, GeneratorKind, GsdParams, Mode, Model};

/// Candidate query universes beyond this are a config mistake.
const MAX_QUERY_CANDIDATES: usize = 200_000;
/// Offspring are mostly cell mutations of the best candidate; the rest are
/// elite crossovers.
const MUTATION_SHARE: f64 = 0.9;

/// Mini-search settings used to maintain the running best candidate during
/// adaptive query selection.
const SELECT_EVO: EvoParams =
    EvoParams { population: 8, elites: 2, generations: 250, patience: 80, rows: 128 };

/// Selected queries plus their noisy, clipped frequency targets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GsdTargets {
    /// Marginal focal points over one-hot binary columns.
    pub queries: Vec<FocalPoint>,
    /// Raw noisy measurements, aligned with `queries`.
    pub measurements: Vec<NoisyMeasurement>,
    /// Clipped, normalized frequencies per query, aligned with `queries`.
    pub answers: Vec<Vec<f64>>,
}

/// Evolutionary search settings independent of query selection.
#[derive(Clone, Copy, Debug)]
pub struct EvoParams {
    pub population: usize,
    pub elites: usize,
    pub generations: usize,
    pub patience: usize,
    /// Rows per candidate dataset.
    pub rows: usize,
}

/// Search result: the best candidate's rows plus bookkeeping.
#[derive(Clone, Debug)]
pub struct Evolved {
    pub rows: Vec<Cat>,
    pub fitness: f64,
    /// Best fitness after each generation; non-increasing by elitism.
    pub trace: Vec<f64>,
    pub generations_run: usize,
}

/// All arity-sized combinations of one-hot columns, lexicographic.
fn query_universe(width: usize, arity: usize) -> Result<Vec<Vec<usize>>> {
    if arity == 0 || arity > width || arity > 3 {
        return Err(Error::Config(format!("query arity {arity} unsupported for width {width}")));
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..arity).collect();
    loop {
        out.push(combo.clone());
        if out.len() > MAX_QUERY_CANDIDATES {
            return Err(Error::Config(format!(
                "more than {MAX_QUERY_CANDIDATES} candidate queries; reduce arity or domain sizes"
            )));
        }
        // Advance to the next combination.
        let mut i = arity;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if combo[i] != i + width - arity {
                break;
            }
        }
        combo[i] += 1;
        for j in (i + 1)..arity {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

fn decode_query(onehot: &OneHotMap, cols: &[usize]) -> Vec<(usize, Cat)> {
    cols.iter().map(|&c| onehot.decode(c)).collect()
}

/// Bit-pattern cell code of a row under a query, first column most
/// significant; matches the one-hot probability-table encoding.
fn row_code(row: &[Cat], query: &[(usize, Cat)]) -> usize {
    let mut code = 0usize;
    for &(f, c) in query {
        code = code * 2 + usize::from(row[f] == c);
    }
    code
}

/// Exact frequency answers of every query on a row buffer.
fn answers_on(rows: &[Cat], l: usize, queries: &[Vec<(usize, Cat)>]) -> Vec<Vec<f64>> {
    let n = if l == 0 { 0 } else { rows.len() / l };
    let mut out: Vec<Vec<f64>> = queries.iter().map(|q| vec![0.0; 1 << q.len()]).collect();
    for r in 0..n {
        let row = &rows[r * l..(r + 1) * l];
        for (qi, q) in queries.iter().enumerate() {
            out[qi][row_code(row, q)] += 1.0;
        }
    }
    if n > 0 {
        for a in &mut out {
            for v in a.iter_mut() {
                *v /= n as f64;
            }
        }
    }
    out
}

/// Closed-form query answer under fully independent uniform features.
fn uniform_answer(schema: &Schema, query: &[(usize, Cat)]) -> Vec<f64> {
    let cells = 1usize << query.len();
    let mut out = Vec::with_capacity(cells);
    for cell in 0..cells {
        let mut p = 1.0;
        let mut feats: Vec<usize> = query.iter().map(|&(f, _)| f).collect();
        feats.sort_unstable();
        feats.dedup();
        for &f in &feats {
            let m = schema.domain(f) as f64;
            let mut hot: Option<Cat> = None;
            let mut cold = 0usize;
            let mut impossible = false;
            for (pos, &(qf, qc)) in query.iter().enumerate() {
                if qf != f {
                    continue;
                }
                let bit = cell >> (query.len() - 1 - pos) & 1;
                if bit == 1 {
                    if hot.is_some() {
                        impossible = true;
                    }
                    hot = Some(qc);
                } else {
                    cold += 1;
                }
            }
            let count = if impossible {
                0.0
            } else if hot.is_some() {
                1.0
            } else {
                (schema.domain(f) - cold) as f64
            };
            p *= count / m;
        }
        out.push(p);
    }
    out
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Adaptive query selection: in each round the remaining candidates are
/// scored by the worst-case gap between the running reference answer
/// (uniform in round one, the evolving best candidate afterwards) and the
/// exact answer, and a batch is drawn with the exponential mechanism at
/// `eps_select / q` per pick.
pub fn select_queries(
    train: &Dataset,
    onehot: &OneHotMap,
    q: usize,
    rounds: usize,
    arity: usize,
    eps_select: f64,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if q == 0 {
        return Err(Error::Config("query count must be positive".into()));
    }
    let universe = query_universe(onehot.width(), arity)?;
    if q > universe.len() {
        return Err(Error::Config(format!(
            "requested {q} queries but only {} candidates exist",
            universe.len()
        )));
    }
    let decoded: Vec<Vec<(usize, Cat)>> =
        universe.iter().map(|cols| decode_query(onehot, cols)).collect();
    let l = train.schema().len();
    let exact = answers_on(train.raw(), l, &decoded);
    let mut scores: Vec<f64> = decoded
        .iter()
        .zip(&exact)
        .map(|(query, ans)| linf(&uniform_answer(train.schema(), query), ans))
        .collect();

    let rounds = rounds.clamp(1, q);
    let eps_pick = eps_select / q as f64;
    let sens = 1.0 / train.n_rows() as f64;
    let mut rng = stream(seed, "gsd/select");
    let mut remaining: Vec<usize> = (0..universe.len()).collect();
    let mut picked: Vec<usize> = Vec::with_capacity(q);
    for round in 0..rounds {
        let batch = q / rounds + usize::from(round < q % rounds);
        for _ in 0..batch {
            let batch_scores: Vec<f64> = remaining.iter().map(|&i| scores[i]).collect();
            let sel = exponential_select(&batch_scores, eps_pick, sens, &mut rng)?;
            picked.push(remaining.remove(sel));
        }
        if round + 1 == rounds || remaining.is_empty() {
            continue;
        }
        // Refresh the running best candidate against the exact answers of
        // everything picked so far, then re-score the remaining candidates
        // against its answers.
        let sel_queries: Vec<Vec<(usize, Cat)>> = picked.iter().map(|&i| decoded[i].clone()).collect();
        let sel_targets: Vec<Vec<f64>> = picked.iter().map(|&i| exact[i].clone()).collect();
        let model = evolve(
            train.schema(),
            &sel_queries,
            &sel_targets,
            &SELECT_EVO,
            child_seed_idx(seed, "gsd/select-evo", round as u64),
        )?;
        let model_answers = answers_on(&model.rows, l, &decoded);
        for &i in &remaining {
            scores[i] = linf(&model_answers[i], &exact[i]);
        }
    }
    Ok(picked.into_iter().map(|i| universe[i].clone()).collect())
}

/// Laplace-noise each selected query at `eps_measure / q`, sensitivity 1,
/// and derive clipped frequency targets.
pub fn measure<R: Rng>(
    train: &Dataset,
    queries: &[Vec<usize>],
    eps_measure: f64,
    rng: &mut R,
) -> Result<(Vec<NoisyMeasurement>, Vec<Vec<f64>>)> {
    let eps_query = eps_measure / queries.len() as f64;
    let mut measurements = Vec::with_capacity(queries.len());
    let mut answers = Vec::with_capacity(queries.len());
    for cols in queries {
        let table = estimate_onehot_marginal(train, cols, 0.0)?;
        let noisy = laplace_counts(&table, eps_query, 1.0, rng)?;
        answers.push(noisy.clipped_probs());
        measurements.push(noisy);
    }
    Ok((measurements, answers))
}

struct Candidate {
    rows: Vec<Cat>,
    /// Flat cell counts, query-major with `offsets` strides.
    counts: Vec<u32>,
    fitness: f64,
}

struct EvoCtx<'a> {
    schema: &'a Schema,
    queries: &'a [Vec<(usize, Cat)>],
    /// Flat targets aligned with `offsets`.
    targets: Vec<f64>,
    offsets: Vec<usize>,
    /// Query indices touching each feature.
    feat_queries: Vec<Vec<usize>>,
    rows: usize,
}

impl<'a> EvoCtx<'a> {
    fn new(schema: &'a Schema, queries: &'a [Vec<(usize, Cat)>], targets: &[Vec<f64>], rows: usize) -> Result<Self> {
        if queries.is_empty() || queries.len() != targets.len() {
            return Err(Error::Config("query/target lists must be non-empty and aligned".into()));
        }
        let mut offsets = Vec::with_capacity(queries.len() + 1);
        let mut flat = Vec::new();
        offsets.push(0);
        for (q, t) in queries.iter().zip(targets) {
            if t.len() != 1 << q.len() {
                return Err(Error::Config("target vector does not match query cell count".into()));
            }
            flat.extend_from_slice(t);
            offsets.push(flat.len());
        }
        let mut feat_queries = vec![Vec::new(); schema.len()];
        for (qi, q) in queries.iter().enumerate() {
            for &(f, _) in q {
                if f >= schema.len() {
                    return Err(Error::Config(format!("query feature {f} out of schema range")));
                }
                if !feat_queries[f].contains(&qi) {
                    feat_queries[f].push(qi);
                }
            }
        }
        Ok(EvoCtx { schema, queries, targets: flat, offsets, feat_queries, rows })
    }

    fn count_rows(&self, rows: &[Cat]) -> Vec<u32> {
        let l = self.schema.len();
        let n = rows.len() / l;
        let mut counts = vec![0u32; self.targets.len()];
        for r in 0..n {
            let row = &rows[r * l..(r + 1) * l];
            for (qi, q) in self.queries.iter().enumerate() {
                counts[self.offsets[qi] + row_code(row, q)] += 1;
            }
        }
        counts
    }

    fn fitness(&self, counts: &[u32]) -> f64 {
        let n = self.rows as f64;
        counts
            .iter()
            .zip(&self.targets)
            .map(|(&c, &t)| (c as f64 / n - t).abs())
            .sum()
    }

    fn random_candidate<R: Rng>(&self, rng: &mut R) -> Candidate {
        let l = self.schema.len();
        let mut rows = Vec::with_capacity(self.rows * l);
        for _ in 0..self.rows {
            for f in 0..l {
                rows.push(rng.gen_range(0..self.schema.domain(f)) as Cat);
            }
        }
        let counts = self.count_rows(&rows);
        let fitness = self.fitness(&counts);
        Candidate { rows, counts, fitness }
    }

    /// Set one uniformly chosen cell to a uniformly chosen category and
    /// patch only the touched query cells.
    fn mutate<R: Rng>(&self, cand: &mut Candidate, rng: &mut R) {
        let l = self.schema.len();
        let r = rng.gen_range(0..self.rows);
        let f = rng.gen_range(0..l);
        let new = rng.gen_range(0..self.schema.domain(f)) as Cat;
        let row_start = r * l;
        let old = cand.rows[row_start + f];
        if new == old {
            return;
        }
        let n = self.rows as f64;
        for &qi in &self.feat_queries[f] {
            let q = &self.queries[qi];
            let row = &cand.rows[row_start..row_start + l];
            let code_old = self.offsets[qi] + row_code(row, q);
            cand.rows[row_start + f] = new;
            let row = &cand.rows[row_start..row_start + l];
            let code_new = self.offsets[qi] + row_code(row, q);
            cand.rows[row_start + f] = old;
            if code_old == code_new {
                continue;
            }
            let t_old = self.targets[code_old];
            let t_new = self.targets[code_new];
            let c_old = cand.counts[code_old] as f64;
            let c_new = cand.counts[code_new] as f64;
            cand.fitness += ((c_old - 1.0) / n - t_old).abs() - (c_old / n - t_old).abs()
                + ((c_new + 1.0) / n - t_new).abs()
                - (c_new / n - t_new).abs();
            cand.counts[code_old] -= 1;
            cand.counts[code_new] += 1;
        }
        cand.rows[row_start + f] = new;
    }

    /// One-point row crossover; counts are rebuilt from the cheaper of the
    /// prefix or suffix spans.
    fn crossover<R: Rng>(&self, a: &Candidate, b: &Candidate, rng: &mut R) -> Candidate {
        let l = self.schema.len();
        let cut = rng.gen_range(0..=self.rows);
        let split = cut * l;
        let mut rows = Vec::with_capacity(self.rows * l);
        rows.extend_from_slice(&a.rows[..split]);
        rows.extend_from_slice(&b.rows[split..]);
        let counts: Vec<u32> = if cut <= self.rows / 2 {
            // counts(child) = counts(b) - counts(b prefix) + counts(a prefix)
            let pa = self.count_rows(&a.rows[..split]);
            let pb = self.count_rows(&b.rows[..split]);
            b.counts
                .iter()
                .zip(pb.iter().zip(&pa))
                .map(|(&full, (&drop, &add))| full - drop + add)
                .collect()
        } else {
            let sa = self.count_rows(&a.rows[split..]);
            let sb = self.count_rows(&b.rows[split..]);
            a.counts
                .iter()
                .zip(sa.iter().zip(&sb))
                .map(|(&full, (&drop, &add))| full - drop + add)
                .collect()
        };
        let fitness = self.fitness(&counts);
        Candidate { rows, counts, fitness }
    }
}

/// (mu + lambda) search returning the best candidate ever evaluated.
/// Per-generation randomness is pre-split per offspring slot, so evaluation
/// order cannot change the result.
pub fn evolve(
    schema: &Arc<Schema>,
    queries: &[Vec<(usize, Cat)>],
    targets: &[Vec<f64>],
    params: &EvoParams,
    seed: u64,
) -> Result<Evolved> {
    if params.elites == 0 || params.population < params.elites {
        return Err(Error::Config("population must be at least the elite count, elites >= 1".into()));
    }
    if params.rows == 0 {
        return Err(Error::Config("candidate datasets need at least one row".into()));
    }
    let ctx = EvoCtx::new(schema, queries, targets, params.rows)?;
    let mut pop: Vec<Candidate> = (0..params.population)
        .map(|c| ctx.random_candidate(&mut stream_idx(seed, "gsd/init", c as u64)))
        .collect();
    let rank = |pop: &[Candidate]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..pop.len()).collect();
        idx.sort_by(|&a, &b| pop[a].fitness.partial_cmp(&pop[b].fitness).unwrap().then(a.cmp(&b)));
        idx
    };
    let mut order = rank(&pop);
    let mut best = pop[order[0]].fitness;
    let mut trace = vec![best];
    let mut stale = 0usize;
    let mut generations_run = 0usize;
    for g in 0..params.generations {
        let gen_seed = child_seed_idx(seed, "gsd/generation", g as u64);
        let mut next: Vec<Candidate> = order[..params.elites]
            .iter()
            .map(|&i| Candidate {
                rows: pop[i].rows.clone(),
                counts: pop[i].counts.clone(),
                fitness: pop[i].fitness,
            })
            .collect();
        for s in 0..params.population - params.elites {
            let mut rng = stream_idx(gen_seed, "slot", s as u64);
            let cand = if params.elites >= 2 && rng.gen::<f64>() >= MUTATION_SHARE {
                let a = order[rng.gen_range(0..params.elites)];
                let b = order[rng.gen_range(0..params.elites)];
                ctx.crossover(&pop[a], &pop[b], &mut rng)
            } else {
                let bi = order[0];
                let mut cand = Candidate {
                    rows: pop[bi].rows.clone(),
                    counts: pop[bi].counts.clone(),
                    fitness: pop[bi].fitness,
                };
                ctx.mutate(&mut cand, &mut rng);
                cand
            };
            next.push(cand);
        }
        pop = next;
        order = rank(&pop);
        generations_run = g + 1;
        let now = pop[order[0]].fitness;
        if now < best - 1e-12 {
            best = now;
            stale = 0;
        } else {
            stale += 1;
        }
        trace.push(pop[order[0]].fitness);
        if stale >= params.patience {
            break;
        }
    }
    let winner = &pop[order[0]];
    Ok(Evolved { rows: winner.rows.clone(), fitness: winner.fitness, trace, generations_run })
}

pub(super) fn fit(cfg: &GeneratorConfig, train: &Dataset, mode: Mode) -> Result<FitOutcome> {
    let p: GsdParams = cfg.gsd;
    let onehot = OneHotMap::new(train.schema());
    let mut budget = Budget::new(cfg.epsilon)?;
    let eps_select = budget.spend("selection", 0.5)?;
    let query_cols = select_queries(train, &onehot, p.queries, p.rounds, p.arity, eps_select, cfg.seed)?;
    let focal_points: Vec<FocalPoint> =
        query_cols.iter().map(|cols| FocalPoint::marginal(cols)).collect::<Result<_>>()?;
    if mode == Mode::FpOnly {
        return Ok(FitOutcome {
            kind: GeneratorKind::GsdLike,
            focal_points,
            model: None,
            budget,
            wall_secs: 0.0,
        });
    }
    if cfg.synth_rows == 0 {
        return Err(Error::Config("evolutionary generator needs synth_rows >= 1".into()));
    }
    let eps_measure = budget.spend("measurement", 0.5)?;
    let mut meas_rng = stream(cfg.seed, "gsd/measure");
    let (measurements, answers) = measure(train, &query_cols, eps_measure, &mut meas_rng)?;
    let decoded: Vec<Vec<(usize, Cat)>> =
        query_cols.iter().map(|cols| decode_query(&onehot, cols)).collect();
    let evo_params = EvoParams {
        population: p.population,
        elites: p.elites,
        generations: p.generations,
        patience: p.patience,
        rows: cfg.synth_rows,
    };
    let evolved = evolve(train.schema(), &decoded, &answers, &evo_params, child_seed(cfg.seed, "gsd/evolve"))?;
    let targets = GsdTargets { queries: focal_points.clone(), measurements, answers };
    let model = Model::Evolved {
        targets,
        fitness: evolved.fitness,
        rows: evolved.rows,
        schema: Arc::clone(train.schema()),
    };
    Ok(FitOutcome {
        kind: GeneratorKind::GsdLike,
        focal_points,
        model: Some(model),
        budget,
        wall_secs: 0.0,
    })
}

/// The evolved dataset is itself the synthetic output; other row counts are
/// uniform resamples of it.
pub fn resample<R: Rng>(rows: &[Cat], schema: &Arc<Schema>, n: usize, rng: &mut R) -> Result<Dataset> {
    let l = schema.len();
    let have = rows.len() / l;
    if have == 0 {
        return Err(Error::Runtime("evolved model holds no rows".into()));
    }
    if n == have {
        return Dataset::new(Arc::clone(schema), rows.to_vec());
    }
    let mut data = Vec::with_capacity(n * l);
    for _ in 0..n {
        let r = rng.gen_range(0..have);
        data.extend_from_slice(&rows[r * l..(r + 1) * l]);
    }
    Dataset::new(Arc::clone(schema), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{fit as fit_any, sample};

    fn toy(rows: usize, seed: u64) -> Dataset {
        let cfg = crate::data::PopulationConfig {
            rows,
            domains: vec![2, 3, 2],
            edges: vec![crate::data::PopulationEdge { parent: 0, child: 1, coupling: 0.8 }],
            names: None,
            seed,
        };
        crate::data::synthesize_population(&cfg).unwrap()
    }

    #[test]
    fn query_universe_is_lexicographic() {
        let u = query_universe(4, 2).unwrap();
        assert_eq!(u, vec![
            vec![0, 1], vec![0, 2], vec![0, 3],
            vec![1, 2], vec![1, 3], vec![2, 3],
        ]);
        assert!(query_universe(4, 0).is_err());
        assert!(query_universe(2, 3).is_err());
    }

    #[test]
    fn uniform_answers_match_enumeration() {
        let schema = Schema::uniform(&["a", "b"], &[3, 2]).unwrap();
        let onehot = OneHotMap::new(&schema);
        for cols in query_universe(onehot.width(), 2).unwrap() {
            let query = decode_query(&onehot, &cols);
            let got = uniform_answer(&schema, &query);
            // Enumerate the full 3 x 2 domain.
            let mut want = vec![0.0; 4];
            for a in 0..3u16 {
                for b in 0..2u16 {
                    let row = [a, b];
                    want[row_code(&row, &query)] += 1.0 / 6.0;
                }
            }
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "query {query:?}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn single_query_high_epsilon_is_the_exhaustive_argmax() {
        let d = toy(200, 9);
        let onehot = OneHotMap::new(d.schema());
        let picked = select_queries(&d, &onehot, 1, 4, 2, f64::INFINITY, 5).unwrap();
        assert_eq!(picked.len(), 1);
        let universe = query_universe(onehot.width(), 2).unwrap();
        let l = d.schema().len();
        let decoded: Vec<Vec<(usize, Cat)>> =
            universe.iter().map(|c| decode_query(&onehot, c)).collect();
        let exact = answers_on(d.raw(), l, &decoded);
        let scores: Vec<f64> = decoded
            .iter()
            .zip(&exact)
            .map(|(q, a)| linf(&uniform_answer(d.schema(), q), a))
            .collect();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got = universe.iter().position(|u| u == &picked[0]).unwrap();
        assert!((scores[got] - best).abs() < 1e-12, "picked score {} vs max {best}", scores[got]);
    }

    #[test]
    fn selection_returns_distinct_queries_of_the_requested_arity() {
        let d = toy(100, 2);
        let onehot = OneHotMap::new(d.schema());
        let picked = select_queries(&d, &onehot, 10, 4, 2, 1.0, 77).unwrap();
        assert_eq!(picked.len(), 10);
        let mut dedup = picked.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 10, "duplicate queries selected");
        for q in &picked {
            assert_eq!(q.len(), 2);
        }
        assert!(select_queries(&d, &onehot, 10_000, 4, 2, 1.0, 1).is_err());
    }

    #[test]
    fn measurement_is_exact_at_infinite_epsilon() {
        let d = toy(60, 4);
        let onehot = OneHotMap::new(d.schema());
        let queries = vec![vec![0, 2], vec![1, 5]];
        let mut rng = stream(3, "m");
        let (meas, answers) = measure(&d, &queries, f64::INFINITY, &mut rng).unwrap();
        assert_eq!(meas.len(), 2);
        let decoded: Vec<Vec<(usize, Cat)>> =
            queries.iter().map(|c| decode_query(&onehot, c)).collect();
        let exact = answers_on(d.raw(), d.schema().len(), &decoded);
        for (got, want) in answers.iter().zip(&exact) {
            let sum: f64 = got.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-9, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn zero_generations_returns_best_random_candidate() {
        let schema = Arc::new(Schema::uniform(&["a", "b"], &[2, 2]).unwrap());
        let queries = vec![vec![(0usize, 0 as Cat), (1, 0)]];
        let targets = vec![vec![0.25, 0.25, 0.25, 0.25]];
        let params = EvoParams { population: 6, elites: 2, generations: 0, patience: 10, rows: 16 };
        let out = evolve(&schema, &queries, &targets, &params, 11).unwrap();
        assert_eq!(out.generations_run, 0);
        assert_eq!(out.trace.len(), 1);
        // Reported fitness equals the recomputed error of the returned rows.
        let ans = answers_on(&out.rows, 2, &queries);
        let err: f64 = ans[0].iter().zip(&targets[0]).map(|(a, t)| (a - t).abs()).sum();
        assert!((out.fitness - err).abs() < 1e-12);
    }

    #[test]
    fn best_fitness_never_increases() {
        let d = toy(50, 8);
        let onehot = OneHotMap::new(d.schema());
        let queries = query_universe(onehot.width(), 2).unwrap();
        let decoded: Vec<Vec<(usize, Cat)>> =
            queries.iter().map(|c| decode_query(&onehot, c)).collect();
        let targets = answers_on(d.raw(), d.schema().len(), &decoded);
        let params = EvoParams { population: 10, elites: 3, generations: 300, patience: 300, rows: 30 };
        let out = evolve(&d.schema(), &decoded, &targets, &params, 21).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "fitness increased: {} -> {}", w[0], w[1]);
        }
        assert!(out.fitness < out.trace[0]);
    }

    #[test]
    fn tiny_instance_converges_to_exact_targets() {
        // 2 binary features, 8 rows, every 2-way one-hot query, no noise.
        let schema = Arc::new(Schema::uniform(&["a", "b"], &[2, 2]).unwrap());
        let rows: Vec<Vec<Cat>> = vec![
            vec![0, 0], vec![0, 0], vec![0, 1], vec![0, 1],
            vec![1, 0], vec![1, 0], vec![1, 1], vec![0, 0],
        ];
        let d = Dataset::from_rows(Arc::clone(&schema), &rows).unwrap();
        let onehot = OneHotMap::new(&schema);
        let queries = query_universe(onehot.width(), 2).unwrap();
        let mut rng = stream(1, "m");
        let cols: Vec<Vec<usize>> = queries.clone();
        let (_, answers) = measure(&d, &cols, f64::INFINITY, &mut rng).unwrap();
        let decoded: Vec<Vec<(usize, Cat)>> =
            cols.iter().map(|c| decode_query(&onehot, c)).collect();
        let params = EvoParams { population: 20, elites: 4, generations: 5000, patience: 5000, rows: 8 };
        let out = evolve(&schema, &decoded, &answers, &params, 33).unwrap();
        assert!(out.fitness < 0.05, "final fitness {}", out.fitness);
    }

    #[test]
    fn early_stopping_halts_on_stale_fitness() {
        let schema = Arc::new(Schema::uniform(&["a"], &[2]).unwrap());
        let queries = vec![vec![(0usize, 0 as Cat)]];
        // A 4-row candidate can match these targets exactly, after which
        // fitness stays 0 and patience kicks in.
        let targets = vec![vec![0.5, 0.5]];
        let params = EvoParams { population: 8, elites: 2, generations: 100_000, patience: 25, rows: 4 };
        let out = evolve(&schema, &queries, &targets, &params, 3).unwrap();
        assert!(out.generations_run < 100_000, "early stopping never fired");
        assert_eq!(out.fitness, 0.0);
    }

    #[test]
    fn fp_only_matches_full_fit_selection() {
        let d = toy(120, 6);
        let mut cfg = GeneratorConfig::new(GeneratorKind::GsdLike, 2.0, 40, 19);
        cfg.gsd = GsdParams { population: 8, elites: 2, generations: 60, patience: 60, arity: 2, queries: 6, rounds: 3 };
        let a = fit_any(&cfg, &d, Mode::FpOnly).unwrap();
        let b = fit_any(&cfg, &d, Mode::Full).unwrap();
        assert_eq!(a.focal_points, b.focal_points);
        assert_eq!(a.focal_points.len(), 6);
        assert!(matches!(b.model, Some(Model::Evolved { .. })));
    }

    #[test]
    fn fit_and_sample_round_trip_deterministically() {
        let d = toy(80, 14);
        let mut cfg = GeneratorConfig::new(GeneratorKind::GsdLike, 5.0, 25, 7);
        cfg.gsd = GsdParams { population: 8, elites: 2, generations: 80, patience: 80, arity: 2, queries: 5, rounds: 2 };
        let out1 = fit_any(&cfg, &d, Mode::Full).unwrap();
        let out2 = fit_any(&cfg, &d, Mode::Full).unwrap();
        let s1 = sample(&out1, 25, &mut stream(2, "s")).unwrap();
        let s2 = sample(&out2, 25, &mut stream(2, "s")).unwrap();
        assert_eq!(s1.raw(), s2.raw());
        assert_eq!(s1.n_rows(), 25);
        // A different row count resamples from the evolved rows.
        let s3 = sample(&out1, 60, &mut stream(2, "s")).unwrap();
        assert_eq!(s3.n_rows(), 60);
    }
}
