//! SORST: the self-organizing rough-set loop. Each structure draws a random
//! map size, granulates the training data, discretizes every attribute into
//! ordered levels with one-dimensional maps, induces rough decision rules on
//! the granule table, filters them by strength, and scores the survivors by
//! classifying the discretized test objects.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{mse_classification, AttributeKind, DecisionTable};
use crate::error::{Error, Result};
use crate::rst::{
    classify, induce_rules, strength_filter, DfUniverse, InductionOptions, RoughRuleSet,
    RuleStrategy, SymbolicTable,
};
use crate::som::{crisp_granulate, discretize_attribute, train_som, Discretization};
use crate::sonfis::{grid_dims, SomParams};

/// Settings for [`run_sorst`].
#[derive(Debug, Clone)]
pub struct SorstConfig {
    /// Level counts per attribute name; missing attributes use
    /// `default_levels`.
    pub levels: BTreeMap<String, usize>,
    pub default_levels: usize,
    /// Inclusive bounds for the per-structure neuron draw.
    pub neuron_range: (usize, usize),
    /// Number of random structures to try.
    pub structures: usize,
    /// Minimum dependency factor a rule must reach to survive.
    pub strength_threshold: f64,
    /// Drop disjunctive rules before filtering.
    pub exact_only: bool,
    /// Code reported for test objects no rule recognizes.
    pub fallback_code: f64,
    pub seed: u64,
    pub som: SomParams,
    /// Fit the level maps on the raw training values instead of the granule
    /// prototypes.
    pub fit_levels_on_raw: bool,
    /// After a structure is rejected, multiply the threshold by this factor
    /// before trying the next one.
    pub threshold_decay: Option<f64>,
    pub df_universe: DfUniverse,
    pub strategy: RuleStrategy,
}

impl Default for SorstConfig {
    fn default() -> Self {
        Self {
            levels: BTreeMap::new(),
            default_levels: 3,
            neuron_range: (10, 100),
            structures: 7,
            strength_threshold: 0.0,
            exact_only: false,
            fallback_code: 4.0,
            seed: 0,
            som: SomParams::default(),
            fit_levels_on_raw: false,
            threshold_decay: None,
            df_universe: DfUniverse::Whole,
            strategy: RuleStrategy::Minimal,
        }
    }
}

impl SorstConfig {
    pub fn validate(&self) -> Result<()> {
        if self.default_levels == 0 || self.levels.values().any(|&k| k == 0) {
            return Err(Error::Config("level counts must be at least 1".into()));
        }
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
        if self.structures == 0 {
            return Err(Error::Config("at least one structure is required".into()));
        }
        if !(0.0..=1.0).contains(&self.strength_threshold) {
            return Err(Error::Config(format!(
                "strength threshold must lie in [0, 1], got {}",
                self.strength_threshold
            )));
        }
        if let Some(d) = self.threshold_decay {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Config(format!(
                    "threshold decay must lie in (0, 1], got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Fits a level map for every attribute of the table (decision included):
/// each numeric column is discretized on its own, with a seed derived from
/// the attribute's position.
pub fn fit_level_maps(
    table: &DecisionTable,
    levels: &BTreeMap<String, usize>,
    default_levels: usize,
    seed: u64,
) -> Result<Vec<(String, Discretization)>> {
    if default_levels == 0 {
        return Err(Error::Config("level counts must be at least 1".into()));
    }
    let mut maps = Vec::with_capacity(table.attributes().len());
    for (j, attr) in table.attributes().iter().enumerate() {
        if attr.kind != AttributeKind::Numeric {
            return Err(Error::Shape(format!(
                "attribute {} is symbolic and cannot be discretized",
                attr.name
            )));
        }
        let k = levels.get(&attr.name).copied().unwrap_or(default_levels);
        if k == 0 {
            return Err(Error::Config(format!(
                "attribute {} asks for zero levels",
                attr.name
            )));
        }
        let values = table.numeric_column(j)?;
        let map = discretize_attribute(&values, k, seed.wrapping_add(j as u64))?;
        maps.push((attr.name.clone(), map));
    }
    Ok(maps)
}

/// Replaces every numeric value with its level under the given maps,
/// producing a symbolic table. Every attribute of the table must have a map.
pub fn apply_levels(
    table: &DecisionTable,
    maps: &[(String, Discretization)],
) -> Result<SymbolicTable> {
    let dec = table.decision_index();
    let mut cond_names = Vec::new();
    let mut cond_cols = Vec::new();
    let mut dec_col: Option<Vec<u32>> = None;
    for (j, attr) in table.attributes().iter().enumerate() {
        let map = maps
            .iter()
            .find(|(n, _)| n == &attr.name)
            .ok_or_else(|| Error::Attribute(format!("no level map for attribute {}", attr.name)))?;
        let values = table.numeric_column(j)?;
        let levels = map.1.apply(&values);
        if j == dec {
            dec_col = Some(levels);
        } else {
            cond_names.push(attr.name.clone());
            cond_cols.push(levels);
        }
    }
    SymbolicTable::from_levels(
        table.object_ids().to_vec(),
        cond_names,
        &cond_cols,
        table.attributes()[dec].name.clone(),
        &dec_col.expect("decision column exists"),
    )
}

/// One random structure's outcome.
#[derive(Debug, Clone)]
pub struct StructureRecord {
    pub structure: usize,
    pub neuron_count: usize,
    pub grid_dims: (usize, usize),
    pub granule_count: usize,
    /// Strength threshold in force when this structure was filtered.
    pub threshold: f64,
    /// The rules that survived filtering (empty when rejected).
    pub rule_set: RoughRuleSet,
    /// The level maps all tables were discretized with.
    pub level_maps: Vec<(String, Discretization)>,
    /// Per test object: the predicted decision level, or `None` when no rule
    /// recognized it.
    pub test_predictions: Vec<Option<u32>>,
    /// Classification MSE on the discretized test decisions, counting one
    /// full penalty unit per unrecognized object. Infinite when rejected.
    pub test_mse: f64,
    /// True when no rule survived (or the structure failed outright).
    pub rejected: bool,
}

/// Outcome of [`run_sorst`].
#[derive(Debug, Clone)]
pub struct SorstResult {
    pub records: Vec<StructureRecord>,
    /// Winning structure (lowest test MSE; ties to fewer rules, then order),
    /// or `None` when every structure was rejected.
    pub best_index: Option<usize>,
}

impl SorstResult {
    pub fn best(&self) -> Option<&StructureRecord> {
        self.best_index.map(|i| &self.records[i])
    }
}

/// Runs the rough-set balancing loop over randomly sized structures; see the
/// module docs for the per-structure pipeline.
pub fn run_sorst(
    train: &DecisionTable,
    test: &DecisionTable,
    config: &SorstConfig,
) -> Result<SorstResult> {
    config.validate()?;
    let train_names: Vec<&str> = train.attributes().iter().map(|a| a.name.as_str()).collect();
    let test_names: Vec<&str> = test.attributes().iter().map(|a| a.name.as_str()).collect();
    if train_names != test_names || train.decision_index() != test.decision_index() {
        return Err(Error::Shape(
            "train and test tables must share the same attributes".into(),
        ));
    }
    for attr in train.attributes() {
        if attr.kind != AttributeKind::Numeric {
            return Err(Error::Shape(format!(
                "attribute {} is symbolic; this loop needs numeric attributes throughout",
                attr.name
            )));
        }
    }
    let feature_names: Vec<String> = train.attributes().iter().map(|a| a.name.clone()).collect();
    let matrix: Vec<Vec<f64>> = train
        .rows()
        .iter()
        .map(|row| row.iter().map(|c| c.as_num().expect("numeric")).collect())
        .collect();
    let condition_names: Vec<String> = train
        .condition_indices()
        .iter()
        .map(|&j| train.attributes()[j].name.clone())
        .collect();
    let decision_name = train.attributes()[train.decision_index()].name.clone();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut threshold = config.strength_threshold;
    let mut records = Vec::with_capacity(config.structures);

    for s in 0..config.structures {
        let neurons = rng.random_range(config.neuron_range.0..=config.neuron_range.1);
        let som_seed: u64 = rng.random();
        let dims = grid_dims(neurons);

        let outcome = (|| -> Result<StructureRecord> {
            let topology = config.som.topology(dims, som_seed);
            let grid = train_som(&matrix, &feature_names, topology)?;
            let granules = crisp_granulate(&grid, train)?;
            let fit_source = if config.fit_levels_on_raw {
                train
            } else {
                &granules.prototypes
            };
            let maps = fit_level_maps(fit_source, &config.levels, config.default_levels, som_seed)?;
            let granule_symbolic = apply_levels(&granules.prototypes, &maps)?;

            let options = InductionOptions {
                strategy: config.strategy,
                exact_only: config.exact_only,
                strength_threshold: threshold,
                df_universe: config.df_universe,
                fallback_code: config.fallback_code,
            };
            let mut rule_set = induce_rules(&granule_symbolic, &options)?;
            if config.strategy != RuleStrategy::Strong {
                rule_set = strength_filter(&rule_set, threshold);
            }

            if rule_set.rules.is_empty() {
                return Ok(StructureRecord {
                    structure: s,
                    neuron_count: neurons,
                    grid_dims: dims,
                    granule_count: granules.n_granules(),
                    threshold,
                    rule_set,
                    level_maps: maps,
                    test_predictions: Vec::new(),
                    test_mse: f64::INFINITY,
                    rejected: true,
                });
            }

            let test_symbolic = apply_levels(test, &maps)?;
            let mut predictions: Vec<Option<u32>> = Vec::with_capacity(test.n_objects());
            for i in 0..test_symbolic.n_objects() {
                let object: BTreeMap<String, String> = condition_names
                    .iter()
                    .enumerate()
                    .map(|(j, name)| (name.clone(), test_symbolic.value(i, j).to_string()))
                    .collect();
                let label = classify(&rule_set, &object);
                predictions.push(label.and_then(|v| v.parse::<u32>().ok()));
            }
            let actual: Vec<f64> = (0..test_symbolic.n_objects())
                .map(|i| {
                    test_symbolic
                        .decision_value(i)
                        .parse::<f64>()
                        .expect("levels are numeric")
                })
                .collect();
            let as_f64: Vec<Option<f64>> =
                predictions.iter().map(|p| p.map(f64::from)).collect();
            let test_mse = mse_classification(&as_f64, &actual, 1.0)?;

            Ok(StructureRecord {
                structure: s,
                neuron_count: neurons,
                grid_dims: dims,
                granule_count: granules.n_granules(),
                threshold,
                rule_set,
                level_maps: maps,
                test_predictions: predictions,
                test_mse,
                rejected: false,
            })
        })();

        let record = match outcome {
            Ok(r) => r,
            Err(e) => {
                log::warn!("structure {s} failed: {e}");
                StructureRecord {
                    structure: s,
                    neuron_count: neurons,
                    grid_dims: dims,
                    granule_count: 0,
                    threshold,
                    rule_set: RoughRuleSet {
                        rules: Vec::new(),
                        decision_name: decision_name.clone(),
                        strategy: config.strategy,
                        df_universe: config.df_universe,
                        fallback_code: config.fallback_code,
                    },
                    level_maps: Vec::new(),
                    test_predictions: Vec::new(),
                    test_mse: f64::INFINITY,
                    rejected: true,
                }
            }
        };
        let was_rejected = record.rejected;
        records.push(record);
        if was_rejected {
            if let Some(decay) = config.threshold_decay {
                threshold *= decay;
            }
        }
    }

    let best_index = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.rejected && r.test_mse.is_finite())
        .min_by(|(_, a), (_, b)| {
            a.test_mse
                .total_cmp(&b.test_mse)
                .then(a.rule_set.rules.len().cmp(&b.rule_set.rules.len()))
                .then(a.structure.cmp(&b.structure))
        })
        .map(|(i, _)| i);

    Ok(SorstResult {
        records,
        best_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_decision_table, split_train_test};

    fn staircase_tables(seed: u64) -> (DecisionTable, DecisionTable) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut csv = String::from("a,b,c,y\n");
        for _ in 0..120 {
            let a: f64 = rng.random::<f64>() * 10.0;
            let b: f64 = rng.random::<f64>() * 5.0;
            let c: f64 = rng.random::<f64>() * 2.0;
            let y = if a < 3.3 {
                1.0
            } else if a < 6.6 {
                2.0
            } else {
                3.0
            };
            csv.push_str(&format!("{a},{b},{c},{y}\n"));
        }
        let table = load_decision_table(&csv, "y").unwrap();
        let split = split_train_test(&table, 90, 30, seed).unwrap();
        (split.train, split.test)
    }

    fn quick_config(seed: u64) -> SorstConfig {
        SorstConfig {
            neuron_range: (4, 20),
            structures: 4,
            seed,
            som: SomParams {
                epochs: 25,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn level_maps_cover_all_attributes_and_apply_consistently() {
        let (train, _) = staircase_tables(3);
        let maps = fit_level_maps(&train, &BTreeMap::new(), 3, 17).unwrap();
        assert_eq!(maps.len(), 4);
        assert!(maps.iter().all(|(_, m)| m.effective() <= 3));
        let symbolic = apply_levels(&train, &maps).unwrap();
        assert_eq!(symbolic.n_objects(), train.n_objects());
        assert_eq!(symbolic.n_conditions(), 3);
        // Reapplication is stable.
        let again = apply_levels(&train, &maps).unwrap();
        assert_eq!(symbolic, again);
        // Missing map is an error.
        let partial = &maps[..3].to_vec();
        assert!(apply_levels(&train, partial).is_err());
    }

    #[test]
    fn loop_scores_structures_and_selects_a_winner() {
        let (train, test) = staircase_tables(5);
        let result = run_sorst(&train, &test, &quick_config(11)).unwrap();
        assert_eq!(result.records.len(), 4);
        let best = result.best().expect("a permissive threshold keeps rules");
        assert!(best.test_mse.is_finite());
        assert!(!best.rejected);
        assert_eq!(best.test_predictions.len(), 30);
        for r in &result.records {
            assert_eq!(r.grid_dims.0 * r.grid_dims.1, r.neuron_count);
            if !r.rejected {
                assert!(!r.rule_set.rules.is_empty());
                assert!(r.granule_count >= 1);
                assert!(r.test_mse >= best.test_mse || r.structure == best.structure);
            }
        }
    }

    #[test]
    fn loop_is_deterministic_per_seed() {
        let (train, test) = staircase_tables(6);
        let a = run_sorst(&train, &test, &quick_config(13)).unwrap();
        let b = run_sorst(&train, &test, &quick_config(13)).unwrap();
        assert_eq!(a.best_index, b.best_index);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.neuron_count, rb.neuron_count);
            assert_eq!(ra.test_mse.to_bits(), rb.test_mse.to_bits());
            assert_eq!(ra.rule_set, rb.rule_set);
            assert_eq!(ra.test_predictions, rb.test_predictions);
        }
    }

    #[test]
    fn survivors_respect_the_strength_threshold() {
        let (train, test) = staircase_tables(7);
        let config = SorstConfig {
            strength_threshold: 0.05,
            ..quick_config(19)
        };
        let result = run_sorst(&train, &test, &config).unwrap();
        for r in &result.records {
            for rule in &r.rule_set.rules {
                assert!(
                    rule.dependency_factor >= r.threshold,
                    "rule below threshold {}: {}",
                    r.threshold,
                    rule.display("y")
                );
            }
        }
    }

    #[test]
    fn impossible_threshold_rejects_and_decays() {
        let (train, test) = staircase_tables(9);
        let config = SorstConfig {
            strength_threshold: 1.0,
            exact_only: true,
            threshold_decay: Some(0.5),
            ..quick_config(23)
        };
        let result = run_sorst(&train, &test, &config).unwrap();
        // The first structure is filtered at 1.0; each rejection halves the
        // threshold for the next.
        assert_eq!(result.records[0].threshold, 1.0);
        for w in result.records.windows(2) {
            if w[0].rejected {
                assert_eq!(w[1].threshold, w[0].threshold * 0.5);
            } else {
                assert_eq!(w[1].threshold, w[0].threshold);
            }
        }
        // With no decay and an impossible bar, everything is rejected.
        let rigid = SorstConfig {
            strength_threshold: 1.0,
            exact_only: true,
            threshold_decay: None,
            ..quick_config(23)
        };
        let all_rejected = run_sorst(&train, &test, &rigid).unwrap();
        if all_rejected.records.iter().all(|r| r.rejected) {
            assert_eq!(all_rejected.best_index, None);
        }
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let ok = SorstConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SorstConfig {
            default_levels: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SorstConfig {
            neuron_range: (1, 5),
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SorstConfig {
            structures: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SorstConfig {
            strength_threshold: 1.5,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SorstConfig {
            threshold_decay: Some(0.0),
            ..ok
        }
        .validate()
        .is_err());
    }
}
