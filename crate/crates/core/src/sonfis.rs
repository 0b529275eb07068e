//! SONFIS: the self-organizing neuro-fuzzy inference loop. Each iteration
//! compresses the training data with a self-organizing map (the closed,
//! granular step), fits a Takagi–Sugeno model on the granule prototypes (the
//! open, inferential step), and measures the result on untouched test data.
//! The map size then grows or shrinks — by a linear growth law or at random —
//! and the loop keeps the structure that best balances error against size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{rmse, AttributeKind, DecisionTable};
use crate::error::{Error, Result};
use crate::nfis::{
    build_tsk_model, cluster_with_rule_target, train_tsk, SubtractiveConfig, TskModel,
};
use crate::som::{crisp_granulate, train_som, Neighborhood, SomGrid, SomTopology};

/// Map-training settings shared by the balancing loops. The lattice shape is
/// chosen per iteration, so only the schedule lives here.
#[derive(Debug, Clone, PartialEq)]
pub struct SomParams {
    pub epochs: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    pub neighborhood: Neighborhood,
    /// `None` picks half the longer lattice side.
    pub initial_radius: Option<f64>,
}

impl Default for SomParams {
    fn default() -> Self {
        Self {
            epochs: 100,
            lr_initial: 0.5,
            lr_final: 0.01,
            neighborhood: Neighborhood::Gaussian,
            initial_radius: None,
        }
    }
}

impl SomParams {
    /// Concrete topology for an `n1 x n2` lattice.
    pub fn topology(&self, dims: (usize, usize), seed: u64) -> SomTopology {
        SomTopology {
            rows: dims.0,
            cols: dims.1,
            neighborhood: self.neighborhood,
            initial_radius: self
                .initial_radius
                .unwrap_or_else(|| (dims.0.max(dims.1) as f64 / 2.0).max(1.0)),
            epochs: self.epochs,
            lr_initial: self.lr_initial,
            lr_final: self.lr_final,
            seed,
        }
    }
}

/// How the neuron count moves between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthMode {
    /// Uniform draw from the neuron range each iteration.
    Random,
    /// Linear growth law `N(t+1) = alpha N(t) + beta E(t) + gamma` seeded at
    /// the bottom of the neuron range, where `E(t)` is the iteration's test
    /// error.
    Adaptive,
}

impl GrowthMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Adaptive => "adaptive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "adaptive" => Ok(Self::Adaptive),
            other => Err(Error::Parse(format!(
                "unknown growth mode {other:?}; use random or adaptive"
            ))),
        }
    }
}

/// What "best structure" means when the loop finishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionCriterion {
    /// Lowest test error; ties to fewer rules, then fewer granules.
    #[default]
    MinError,
    /// Fewest rules; ties to lower error, then fewer granules.
    MinRules,
    /// Fewest granules; ties to lower error, then fewer rules.
    MinObjects,
}

impl SelectionCriterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MinError => "min-error",
            Self::MinRules => "min-rules",
            Self::MinObjects => "min-objects",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "min-error" => Ok(Self::MinError),
            "min-rules" => Ok(Self::MinRules),
            "min-objects" => Ok(Self::MinObjects),
            other => Err(Error::Parse(format!(
                "unknown selection criterion {other:?}; use min-error, min-rules, or min-objects"
            ))),
        }
    }
}

/// Settings for [`run_sonfis`].
#[derive(Debug, Clone)]
pub struct SonfisConfig {
    /// Inclusive bounds on the neuron count.
    pub neuron_range: (usize, usize),
    /// Hard cap on the fuzzy rule count.
    pub max_rules: usize,
    pub iterations: usize,
    pub mode: GrowthMode,
    /// Growth-law coefficients.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Stop early once the test error reaches this value.
    pub error_target: Option<f64>,
    pub criterion: SelectionCriterion,
    pub seed: u64,
    pub som: SomParams,
    pub nfis_epochs: usize,
    pub nfis_step: f64,
    pub subtractive: SubtractiveConfig,
}

impl Default for SonfisConfig {
    fn default() -> Self {
        Self {
            neuron_range: (10, 100),
            max_rules: 4,
            iterations: 10,
            mode: GrowthMode::Adaptive,
            alpha: 1.01,
            beta: 0.001,
            gamma: 0.5,
            error_target: None,
            criterion: SelectionCriterion::MinError,
            seed: 0,
            som: SomParams::default(),
            nfis_epochs: 30,
            nfis_step: 0.05,
            subtractive: SubtractiveConfig::default(),
        }
    }
}

impl SonfisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.neuron_range.0 < 2 {
            return Err(Error::Config(
                "the neuron range must start at 2 or more".into(),
            ));
        }
        if self.neuron_range.0 > self.neuron_range.1 {
            return Err(Error::Config(format!(
                "empty neuron range {}..={}",
                self.neuron_range.0, self.neuron_range.1
            )));
        }
        if self.max_rules == 0 {
            return Err(Error::Config("at least one rule is required".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("at least one iteration is required".into()));
        }
        let alpha_ok = self.alpha > 0.0 && self.alpha.is_finite();
        if self.mode == GrowthMode::Adaptive && !alpha_ok {
            return Err(Error::Config(format!(
                "adaptive growth needs a positive alpha, got {}",
                self.alpha
            )));
        }
        if let Some(t) = self.error_target {
            if t < 0.0 || t.is_nan() {
                return Err(Error::Config(format!(
                    "error target must be non-negative, got {t}"
                )));
            }
        }
        self.subtractive.validate()?;
        Ok(())
    }
}

/// Applies the growth law once and clamps into `range`, rounding half away
/// from zero.
pub fn next_neuron_count(
    current: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    error: f64,
    range: (usize, usize),
) -> usize {
    let error_term = if error.is_finite() { beta * error } else { 0.0 };
    let raw = alpha * current as f64 + error_term + gamma;
    let rounded = raw.round();
    let clamped = rounded.clamp(range.0 as f64, range.1 as f64);
    clamped as usize
}

/// Unrounded growth trajectory: starting at `n0`, applies
/// `N(t+1) = alpha N(t) + beta E(t) + gamma` once per error sample and
/// returns all `errors.len() + 1` values, the start included.
pub fn growth_trajectory(n0: f64, alpha: f64, beta: f64, gamma: f64, errors: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(errors.len() + 1);
    let mut n = n0;
    out.push(n);
    for &e in errors {
        n = alpha * n + beta * e + gamma;
        out.push(n);
    }
    out
}

/// Factors `n` into the most balanced two-dimensional lattice `(n1, n2)`
/// with `n1 <= n2`. When even the best factorization is more elongated than
/// square-ish (side difference above the square root of `n`), a single row
/// is used instead.
pub fn grid_dims(n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let root = (n as f64).sqrt();
    let mut d = 1;
    for cand in 1..=(root.floor() as usize) {
        if n.is_multiple_of(cand) {
            d = cand;
        }
    }
    let dims = (d, n / d);
    if (dims.1 - dims.0) as f64 > root {
        (1, n)
    } else {
        dims
    }
}

/// One pass of the close-open loop.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub neuron_count: usize,
    pub grid_dims: (usize, usize),
    /// Occupied neurons after granulation.
    pub granule_count: usize,
    pub rule_count: usize,
    /// Test RMSE; infinite when the iteration failed.
    pub test_error: f64,
    pub failed: bool,
}

/// Outcome of [`run_sonfis`]: the full iteration trace plus the artifacts of
/// the winning iteration.
#[derive(Debug, Clone)]
pub struct SonfisResult {
    pub records: Vec<IterationRecord>,
    pub best_index: usize,
    pub best_model: TskModel,
    pub best_grid: SomGrid,
}

impl SonfisResult {
    pub fn best(&self) -> &IterationRecord {
        &self.records[self.best_index]
    }
}

fn compare_records(
    a: &IterationRecord,
    b: &IterationRecord,
    criterion: SelectionCriterion,
) -> std::cmp::Ordering {
    let err = a.test_error.total_cmp(&b.test_error);
    let rules = a.rule_count.cmp(&b.rule_count);
    let granules = a.granule_count.cmp(&b.granule_count);
    let t = a.iteration.cmp(&b.iteration);
    match criterion {
        SelectionCriterion::MinError => err.then(rules).then(granules).then(t),
        SelectionCriterion::MinRules => rules.then(err).then(granules).then(t),
        SelectionCriterion::MinObjects => granules.then(err).then(rules).then(t),
    }
}

fn numeric_matrix(table: &DecisionTable) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    for attr in table.attributes() {
        if attr.kind != AttributeKind::Numeric {
            return Err(Error::Shape(format!(
                "attribute {} is symbolic; this loop needs numeric attributes throughout",
                attr.name
            )));
        }
    }
    let names: Vec<String> = table.attributes().iter().map(|a| a.name.clone()).collect();
    let rows: Vec<Vec<f64>> = table
        .rows()
        .iter()
        .map(|row| row.iter().map(|c| c.as_num().expect("numeric")).collect())
        .collect();
    Ok((names, rows))
}

type ConditionSplit = (Vec<String>, Vec<Vec<f64>>, Vec<f64>);

fn condition_split(table: &DecisionTable) -> Result<ConditionSplit> {
    let cond = table.condition_indices();
    let dec = table.decision_index();
    let names: Vec<String> = cond
        .iter()
        .map(|&j| table.attributes()[j].name.clone())
        .collect();
    let mut xs = Vec::with_capacity(table.n_objects());
    let mut ys = Vec::with_capacity(table.n_objects());
    for row in table.rows() {
        let x: Option<Vec<f64>> = cond.iter().map(|&j| row[j].as_num()).collect();
        let y = row[dec].as_num();
        match (x, y) {
            (Some(x), Some(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ => {
                return Err(Error::Shape(
                    "this loop needs numeric attributes throughout".into(),
                ))
            }
        }
    }
    Ok((names, xs, ys))
}

/// Runs the close-open balancing loop: granulate the training table with a
/// map, fit a Takagi–Sugeno model on the granule prototypes, score it on the
/// test table, then move the neuron count and repeat. Failed iterations are
/// recorded with infinite error and skipped at selection time.
pub fn run_sonfis(
    train: &DecisionTable,
    test: &DecisionTable,
    config: &SonfisConfig,
) -> Result<SonfisResult> {
    config.validate()?;
    let train_names: Vec<&str> = train.attributes().iter().map(|a| a.name.as_str()).collect();
    let test_names: Vec<&str> = test.attributes().iter().map(|a| a.name.as_str()).collect();
    if train_names != test_names || train.decision_index() != test.decision_index() {
        return Err(Error::Shape(
            "train and test tables must share the same attributes".into(),
        ));
    }
    let (feature_names, matrix) = numeric_matrix(train)?;
    let (condition_names, test_x, test_y) = condition_split(test)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records: Vec<IterationRecord> = Vec::with_capacity(config.iterations);
    let mut artifacts: Vec<Option<(TskModel, SomGrid)>> = Vec::with_capacity(config.iterations);
    let mut neurons = match config.mode {
        GrowthMode::Random => 0, // drawn at the top of each iteration
        GrowthMode::Adaptive => config.neuron_range.0,
    };

    for t in 0..config.iterations {
        if config.mode == GrowthMode::Random {
            neurons = rng.random_range(config.neuron_range.0..=config.neuron_range.1);
        }
        let som_seed: u64 = rng.random();
        let dims = grid_dims(neurons);

        let outcome = (|| -> Result<(usize, usize, f64, TskModel, SomGrid)> {
            let topology = config.som.topology(dims, som_seed);
            let grid = train_som(&matrix, &feature_names, topology)?;
            let granules = crisp_granulate(&grid, train)?;
            let g = granules.n_granules();
            let (_, gran_x, gran_y) = condition_split(&granules.prototypes)?;
            let target = config.max_rules.min(g);
            let (centers, radius) =
                cluster_with_rule_target(&gran_x, target, &config.subtractive)?;
            let model = build_tsk_model(&centers, &gran_x, &gran_y, &condition_names, radius)?;
            let report = train_tsk(&model, &gran_x, &gran_y, config.nfis_epochs, config.nfis_step)?;
            let predictions = report.model.predict_batch(&test_x)?;
            let error = rmse(&predictions, &test_y)?;
            Ok((g, report.model.n_rules(), error, report.model, grid))
        })();

        let record = match outcome {
            Ok((granule_count, rule_count, test_error, model, grid)) => {
                artifacts.push(Some((model, grid)));
                IterationRecord {
                    iteration: t,
                    neuron_count: neurons,
                    grid_dims: dims,
                    granule_count,
                    rule_count,
                    test_error,
                    failed: false,
                }
            }
            Err(e) => {
                log::warn!("iteration {t} failed: {e}");
                artifacts.push(None);
                IterationRecord {
                    iteration: t,
                    neuron_count: neurons,
                    grid_dims: dims,
                    granule_count: 0,
                    rule_count: 0,
                    test_error: f64::INFINITY,
                    failed: true,
                }
            }
        };
        let error = record.test_error;
        records.push(record);

        if let Some(target) = config.error_target {
            if error <= target {
                break;
            }
        }
        if config.mode == GrowthMode::Adaptive {
            if !error.is_finite() {
                log::warn!("iteration {t} has no finite error; growth law sees zero error");
            }
            neurons = next_neuron_count(
                neurons,
                config.alpha,
                config.beta,
                config.gamma,
                error,
                config.neuron_range,
            );
        }
    }

    let best_index = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.failed && r.test_error.is_finite())
        .min_by(|(_, a), (_, b)| compare_records(a, b, config.criterion))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Training("every iteration failed".into()))?;
    let (best_model, best_grid) = artifacts
        .swap_remove(best_index)
        .expect("selected record did not fail");

    Ok(SonfisResult {
        records,
        best_index,
        best_model,
        best_grid,
    })
}

/// How long each neuron count persists across the trace: a run starts at its
/// first count (the anchor) and extends while later counts stay within
/// `tolerance` of that anchor. Returns each anchor's longest run.
pub fn neuron_durability(
    records: &[IterationRecord],
    tolerance: f64,
) -> std::collections::BTreeMap<usize, usize> {
    let mut out = std::collections::BTreeMap::new();
    let mut idx = 0;
    while idx < records.len() {
        let anchor = records[idx].neuron_count;
        let mut len = 1;
        while idx + len < records.len()
            && (records[idx + len].neuron_count as f64 - anchor as f64).abs() <= tolerance
        {
            len += 1;
        }
        let entry = out.entry(anchor).or_insert(0);
        *entry = (*entry).max(len);
        idx += len;
    }
    out
}

/// A stretch of the trace where the structure stopped moving: both the
/// neuron counts and the errors stay within their spreads over a full
/// window.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceHole {
    /// Index of the first record in the settled window.
    pub start: usize,
    pub neuron_mean: f64,
    pub error_mean: f64,
}

/// Finds the earliest window of `window` consecutive successful iterations
/// whose neuron-count spread stays within `neuron_tol` and whose error
/// spread stays within `error_tol`.
pub fn detect_balance_hole(
    records: &[IterationRecord],
    window: usize,
    neuron_tol: f64,
    error_tol: f64,
) -> Option<BalanceHole> {
    if window < 2 || records.len() < window {
        return None;
    }
    'outer: for start in 0..=records.len() - window {
        let slice = &records[start..start + window];
        let mut n_lo = f64::INFINITY;
        let mut n_hi = f64::NEG_INFINITY;
        let mut e_lo = f64::INFINITY;
        let mut e_hi = f64::NEG_INFINITY;
        for r in slice {
            if r.failed || !r.test_error.is_finite() {
                continue 'outer;
            }
            n_lo = n_lo.min(r.neuron_count as f64);
            n_hi = n_hi.max(r.neuron_count as f64);
            e_lo = e_lo.min(r.test_error);
            e_hi = e_hi.max(r.test_error);
        }
        if n_hi - n_lo <= neuron_tol && e_hi - e_lo <= error_tol {
            let n_mean = slice.iter().map(|r| r.neuron_count as f64).sum::<f64>() / window as f64;
            let e_mean = slice.iter().map(|r| r.test_error).sum::<f64>() / window as f64;
            return Some(BalanceHole {
                start,
                neuron_mean: n_mean,
                error_mean: e_mean,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::load_decision_table;

    #[test]
    fn growth_step_rounds_half_away_from_zero_and_clamps() {
        // 1.01 * 20 + 0.001 * 10 + 0.5 = 20.71 -> 21.
        assert_eq!(next_neuron_count(20, 1.01, 0.001, 0.5, 10.0, (2, 100)), 21);
        // 0.8 * 20 + 0.5 = 16.5 -> 17.
        assert_eq!(next_neuron_count(20, 0.8, 0.0, 0.5, 0.0, (2, 100)), 17);
        // Clamping at both ends.
        assert_eq!(next_neuron_count(99, 1.5, 0.0, 0.5, 0.0, (2, 100)), 100);
        assert_eq!(next_neuron_count(3, 0.1, 0.0, 0.0, 0.0, (2, 100)), 2);
        // Infinite error contributes nothing.
        assert_eq!(
            next_neuron_count(20, 1.0, 1.0, 0.0, f64::INFINITY, (2, 100)),
            20
        );
    }

    #[test]
    fn trajectory_matches_closed_form() {
        let (alpha, gamma) = (1.01, 0.5);
        let errors = vec![0.0; 200];
        let traj = growth_trajectory(10.0, alpha, 0.001, gamma, &errors);
        assert_eq!(traj.len(), 201);
        for (t, &n) in traj.iter().enumerate() {
            let closed =
                alpha.powi(t as i32) * 10.0 + gamma * (alpha.powi(t as i32) - 1.0) / (alpha - 1.0);
            assert!((n - closed).abs() < 1e-9, "t={t}: {n} vs {closed}");
        }
    }

    #[test]
    fn shrinking_regime_decays_toward_its_fixed_point() {
        let traj = growth_trajectory(50.0, 0.8, 0.0, 0.5, &vec![0.0; 100]);
        assert!(traj.windows(2).all(|w| w[1] <= w[0]));
        let fixed = 0.5 / (1.0 - 0.8);
        assert!((traj.last().unwrap() - fixed).abs() < 1e-6);
    }

    #[test]
    fn lattice_factorization() {
        assert_eq!(grid_dims(63), (7, 9));
        assert_eq!(grid_dims(16), (4, 4));
        assert_eq!(grid_dims(13), (1, 13));
        assert_eq!(grid_dims(26), (1, 26));
        assert_eq!(grid_dims(12), (3, 4));
        assert_eq!(grid_dims(1), (1, 1));
        assert_eq!(grid_dims(2), (1, 2));
        for n in 1..200 {
            let (a, b) = grid_dims(n);
            assert_eq!(a * b, n, "area preserved for {n}");
            assert!(a <= b);
        }
    }

    #[test]
    fn durability_tracks_anchored_runs() {
        let rec = |n: usize| IterationRecord {
            iteration: 0,
            neuron_count: n,
            grid_dims: grid_dims(n),
            granule_count: 0,
            rule_count: 0,
            test_error: 1.0,
            failed: false,
        };
        let records: Vec<_> = [20, 20, 21, 35, 35, 35].iter().map(|&n| rec(n)).collect();
        let d = neuron_durability(&records, 1.0);
        assert_eq!(d.get(&20), Some(&3));
        assert_eq!(d.get(&35), Some(&3));
        assert_eq!(d.len(), 2);
        // Zero tolerance splits the drifting run.
        let d0 = neuron_durability(&records, 0.0);
        assert_eq!(d0.get(&20), Some(&2));
        assert_eq!(d0.get(&21), Some(&1));
        assert_eq!(d0.get(&35), Some(&3));
    }

    #[test]
    fn balance_hole_detection() {
        let rec = |n: usize, e: f64, failed: bool| IterationRecord {
            iteration: 0,
            neuron_count: n,
            grid_dims: grid_dims(n),
            granule_count: 0,
            rule_count: 0,
            test_error: e,
            failed,
        };
        let records = vec![
            rec(10, 9.0, false),
            rec(30, 5.0, false),
            rec(50, 2.0, false),
            rec(51, 2.1, false),
            rec(50, 2.05, false),
            rec(52, 1.95, false),
        ];
        let hole = detect_balance_hole(&records, 3, 2.0, 0.5).unwrap();
        assert_eq!(hole.start, 2);
        assert!((hole.neuron_mean - (50.0 + 51.0 + 50.0) / 3.0).abs() < 1e-12);
        // A failed record poisons its windows.
        let mut poisoned = records.clone();
        poisoned[3] = rec(51, f64::INFINITY, true);
        assert_eq!(detect_balance_hole(&poisoned, 3, 2.0, 0.5), None);
        // Impossible windows.
        assert_eq!(detect_balance_hole(&records, 1, 2.0, 0.5), None);
        assert_eq!(detect_balance_hole(&records, 9, 2.0, 0.5), None);
    }

    fn synthetic_tables(seed: u64) -> (DecisionTable, DecisionTable) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut csv = String::from("a,b,c,y\n");
        for _ in 0..80 {
            let a: f64 = rng.random::<f64>() * 10.0;
            let b: f64 = rng.random::<f64>() * 5.0;
            let c: f64 = rng.random::<f64>() * 2.0;
            let y = 2.0 * a - b + 3.0 * c + (a * 0.5).sin();
            csv.push_str(&format!("{a},{b},{c},{y}\n"));
        }
        let table = load_decision_table(&csv, "y").unwrap();
        let split = crate::data::split_train_test(&table, 60, 20, seed).unwrap();
        (split.train, split.test)
    }

    fn quick_config(seed: u64, mode: GrowthMode) -> SonfisConfig {
        SonfisConfig {
            neuron_range: (4, 24),
            max_rules: 3,
            iterations: 4,
            mode,
            seed,
            som: SomParams {
                epochs: 25,
                ..Default::default()
            },
            nfis_epochs: 10,
            ..Default::default()
        }
    }

    #[test]
    fn loop_records_every_iteration_and_selects_finite_best() {
        let (train, test) = synthetic_tables(5);
        let result = run_sonfis(&train, &test, &quick_config(7, GrowthMode::Random)).unwrap();
        assert_eq!(result.records.len(), 4);
        let best = result.best();
        assert!(best.test_error.is_finite());
        assert!(!best.failed);
        assert!(best.rule_count <= 3);
        for r in &result.records {
            assert_eq!(r.grid_dims.0 * r.grid_dims.1, r.neuron_count);
            assert!(r.neuron_count >= 4 && r.neuron_count <= 24);
            if !r.failed {
                assert!(r.test_error >= best.test_error || r.iteration == best.iteration);
            }
        }
        // The winning model predicts on test-shaped inputs.
        assert_eq!(result.best_model.n_inputs(), 3);
        assert!(result.best_model.infer(&[1.0, 2.0, 0.5]).unwrap().is_finite());
    }

    #[test]
    fn loop_is_deterministic_per_seed() {
        let (train, test) = synthetic_tables(6);
        let a = run_sonfis(&train, &test, &quick_config(9, GrowthMode::Random)).unwrap();
        let b = run_sonfis(&train, &test, &quick_config(9, GrowthMode::Random)).unwrap();
        assert_eq!(a.best_index, b.best_index);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.neuron_count, rb.neuron_count);
            assert_eq!(ra.test_error.to_bits(), rb.test_error.to_bits());
        }
        assert_eq!(a.best_model, b.best_model);
    }

    #[test]
    fn adaptive_mode_follows_the_growth_law() {
        let (train, test) = synthetic_tables(8);
        let config = quick_config(3, GrowthMode::Adaptive);
        let result = run_sonfis(&train, &test, &config).unwrap();
        assert_eq!(result.records[0].neuron_count, 4, "starts at the range floor");
        for w in result.records.windows(2) {
            let expected = next_neuron_count(
                w[0].neuron_count,
                config.alpha,
                config.beta,
                config.gamma,
                w[0].test_error,
                config.neuron_range,
            );
            assert_eq!(w[1].neuron_count, expected);
        }
    }

    #[test]
    fn error_target_stops_early() {
        let (train, test) = synthetic_tables(5);
        let config = SonfisConfig {
            error_target: Some(f64::INFINITY),
            ..quick_config(7, GrowthMode::Random)
        };
        let result = run_sonfis(&train, &test, &config).unwrap();
        assert_eq!(result.records.len(), 1, "first iteration already meets an infinite target");
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let ok = SonfisConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SonfisConfig {
            neuron_range: (1, 5),
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SonfisConfig {
            neuron_range: (9, 5),
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SonfisConfig {
            max_rules: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SonfisConfig {
            alpha: 0.0,
            mode: GrowthMode::Adaptive,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SonfisConfig {
            error_target: Some(-1.0),
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn symbolic_attributes_are_rejected() {
        let csv = "a,b,y\nx,1,2\ny,3,4\n";
        let table = load_decision_table(csv, "y").unwrap();
        let err = run_sonfis(&table, &table, &quick_config(1, GrowthMode::Random)).unwrap_err();
        assert!(err.to_string().contains("numeric"), "{err}");
    }
}
