//! One function per subcommand. Every command resolves its settings from
//! flags, the optional config file, and defaults (in that order), reads its
//! inputs through the manifest (so digests are recorded), writes its outputs
//! through it, and finishes by writing `manifest.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use granulate_core::data::{
    header_columns, load_decision_table, rmse, split_train_test, write_delimited, AttributeKind,
    DecisionTable,
};
use granulate_core::lattice::{
    divergence_field, evaluate_rules, evaluate_tsk, AxisSpec, PredictionLattice,
};
use granulate_core::nfis::{
    build_tsk_model, cluster_with_rule_target, subtractive_cluster, train_tsk, SubtractiveConfig,
    TskModel,
};
use granulate_core::rst::{
    induce_rules, strength_filter, DfUniverse, InductionOptions, RoughRuleSet, RuleStrategy,
};
use granulate_core::som::{crisp_granulate, train_som, Neighborhood};
use granulate_core::sonfis::{
    detect_balance_hole, neuron_durability, run_sonfis, GrowthMode, SelectionCriterion,
    SomParams, SonfisConfig,
};
use granulate_core::sorst::{apply_levels, fit_level_maps, run_sorst, SorstConfig};

use crate::cfg::Cfg;
use crate::levelmaps::{parse_levelmaps, write_levelmaps};
use crate::manifest::Manifest;
use crate::synth;
use crate::{Cli, Command};

pub fn run(cli: Cli) -> Result<()> {
    let cfg = Cfg::load(cli.config.as_deref())?;
    let seed = cli.seed;
    let out = cli.out.clone();
    let config_path = cli.config.clone();
    let mut manifest = Manifest::new(command_name(&cli.command), seed, &out)?;
    manifest.record_config(config_path.as_deref())?;
    match cli.command {
        Command::Synth {
            preset,
            n,
            neg_frac,
        } => cmd_synth(&mut manifest, &cfg, seed, &preset, n, neg_frac),
        Command::Split {
            input,
            decision,
            train,
            test,
        } => cmd_split(&mut manifest, &cfg, seed, &input, decision, train, test),
        Command::SomTrain {
            input,
            decision,
            rows,
            cols,
            epochs,
            lr_initial,
            lr_final,
            radius,
            neighborhood,
        } => cmd_som_train(
            &mut manifest,
            &cfg,
            seed,
            &input,
            decision,
            SomFlags {
                rows,
                cols,
                epochs,
                lr_initial,
                lr_final,
                radius,
                neighborhood,
            },
        ),
        Command::NfisTrain {
            input,
            decision,
            rules,
            radius,
            epochs,
            step,
        } => cmd_nfis_train(
            &mut manifest,
            &cfg,
            &input,
            decision,
            rules,
            radius,
            epochs,
            step,
        ),
        Command::RstRules {
            input,
            decision,
            levels,
            strategy,
            exact_only,
            threshold,
            universe,
            fallback,
        } => cmd_rst_rules(
            &mut manifest,
            &cfg,
            seed,
            &input,
            decision,
            RstFlags {
                levels,
                strategy,
                exact_only,
                threshold,
                universe,
                fallback,
            },
        ),
        Command::Sonfis {
            train,
            test,
            decision,
            iterations,
            max_rules,
            neurons_min,
            neurons_max,
            mode,
            criterion,
            alpha,
            beta,
            gamma,
            error_target,
            som_epochs,
            nfis_epochs,
            nfis_step,
        } => cmd_sonfis(
            &mut manifest,
            &cfg,
            seed,
            &train,
            &test,
            decision,
            SonfisFlags {
                iterations,
                max_rules,
                neurons_min,
                neurons_max,
                mode,
                criterion,
                alpha,
                beta,
                gamma,
                error_target,
                som_epochs,
                nfis_epochs,
                nfis_step,
            },
        ),
        Command::Sorst {
            train,
            test,
            decision,
            structures,
            levels,
            neurons_min,
            neurons_max,
            threshold,
            decay,
            exact_only,
            strategy,
            universe,
            fallback,
            som_epochs,
        } => cmd_sorst(
            &mut manifest,
            &cfg,
            seed,
            &train,
            &test,
            decision,
            SorstFlags {
                structures,
                levels,
                neurons_min,
                neurons_max,
                threshold,
                decay,
                exact_only,
                strategy,
                universe,
                fallback,
                som_epochs,
            },
        ),
        Command::PredictGrid {
            tsk,
            rules,
            levelmaps,
            axis,
            unknown_code,
        } => cmd_predict_grid(&mut manifest, tsk, rules, levelmaps, &axis, unknown_code),
        Command::Divergence { input } => cmd_divergence(&mut manifest, &input),
    }?;
    manifest.finish()?;
    Ok(())
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Synth { .. } => "synth",
        Command::Split { .. } => "split",
        Command::SomTrain { .. } => "som-train",
        Command::NfisTrain { .. } => "nfis-train",
        Command::RstRules { .. } => "rst-rules",
        Command::Sonfis { .. } => "sonfis",
        Command::Sorst { .. } => "sorst",
        Command::PredictGrid { .. } => "predict-grid",
        Command::Divergence { .. } => "divergence",
    }
}

/// Decision attribute: flag, then config key `decision`, then the last
/// header column.
fn resolve_decision(cfg: &Cfg, flag: Option<String>, text: &str) -> Result<String> {
    if let Some(d) = cfg.resolve_opt(flag, "decision")? {
        return Ok(d);
    }
    header_columns(text)?
        .last()
        .cloned()
        .ok_or_else(|| anyhow!("the header row names no columns"))
}

/// All-numeric value matrix over every attribute, in table order.
fn full_matrix(table: &DecisionTable) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    for attr in table.attributes() {
        if attr.kind != AttributeKind::Numeric {
            bail!(
                "attribute {} is symbolic; this command needs numeric columns",
                attr.name
            );
        }
    }
    let names = table
        .attributes()
        .iter()
        .map(|a| a.name.clone())
        .collect();
    let rows = table
        .rows()
        .iter()
        .map(|row| row.iter().map(|c| c.as_num().expect("numeric")).collect())
        .collect();
    Ok((names, rows))
}

/// Condition names, condition rows, and decision values, in table order.
type ConditionMatrix = (Vec<String>, Vec<Vec<f64>>, Vec<f64>);

fn condition_matrix(table: &DecisionTable) -> Result<ConditionMatrix> {
    for attr in table.attributes() {
        if attr.kind != AttributeKind::Numeric {
            bail!(
                "attribute {} is symbolic; this command needs numeric columns",
                attr.name
            );
        }
    }
    let cond = table.condition_indices();
    let names = cond
        .iter()
        .map(|&j| table.attributes()[j].name.clone())
        .collect();
    let mut xs = Vec::with_capacity(table.n_objects());
    let mut ys = Vec::with_capacity(table.n_objects());
    for row in table.rows() {
        xs.push(
            cond.iter()
                .map(|&j| row[j].as_num().expect("numeric"))
                .collect(),
        );
        ys.push(row[table.decision_index()].as_num().expect("numeric"));
    }
    Ok((names, xs, ys))
}

/// Per-attribute level overrides from config keys `levels.<attribute>`.
fn level_overrides(cfg: &Cfg) -> Result<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for (attr, v) in cfg.with_prefix("levels.") {
        let k: usize = v
            .parse()
            .map_err(|_| anyhow!("config key levels.{attr}: cannot parse {v:?}"))?;
        out.insert(attr, k);
    }
    Ok(out)
}

fn cmd_synth(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    preset: &str,
    n: usize,
    neg_frac: Option<f64>,
) -> Result<()> {
    let neg_frac = cfg.resolve(neg_frac, "neg_frac", 0.7)?;
    let table = synth::generate(preset, n, neg_frac, seed)?;
    manifest.write_output(&format!("{preset}.csv"), &write_delimited(&table))?;
    Ok(())
}

fn cmd_split(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    input: &Path,
    decision: Option<String>,
    train: usize,
    test: usize,
) -> Result<()> {
    let text = manifest.read_input(input)?;
    let decision = resolve_decision(cfg, decision, &text)?;
    let table = load_decision_table(&text, &decision)?;
    let split = split_train_test(&table, train, test, seed)?;
    manifest.write_output("train.csv", &write_delimited(&split.train))?;
    manifest.write_output("test.csv", &write_delimited(&split.test))?;
    Ok(())
}

struct SomFlags {
    rows: Option<usize>,
    cols: Option<usize>,
    epochs: Option<usize>,
    lr_initial: Option<f64>,
    lr_final: Option<f64>,
    radius: Option<f64>,
    neighborhood: Option<String>,
}

fn cmd_som_train(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    input: &Path,
    decision: Option<String>,
    flags: SomFlags,
) -> Result<()> {
    let text = manifest.read_input(input)?;
    let decision = resolve_decision(cfg, decision, &text)?;
    let table = load_decision_table(&text, &decision)?;
    let (names, matrix) = full_matrix(&table)?;

    let rows = cfg.resolve(flags.rows, "rows", 3)?;
    let cols = cfg.resolve(flags.cols, "cols", 3)?;
    let params = SomParams {
        epochs: cfg.resolve(flags.epochs, "epochs", 100)?,
        lr_initial: cfg.resolve(flags.lr_initial, "lr_initial", 0.5)?,
        lr_final: cfg.resolve(flags.lr_final, "lr_final", 0.01)?,
        neighborhood: Neighborhood::parse(
            &cfg.resolve(flags.neighborhood, "neighborhood", "gaussian".to_string())?,
        )?,
        initial_radius: cfg.resolve_opt(flags.radius, "radius")?,
    };
    let grid = train_som(&matrix, &names, params.topology((rows, cols), seed))?;
    let granules = crisp_granulate(&grid, &table)?;

    manifest.write_output("som.txt", &grid.to_text()?)?;

    let mut assignments = String::from("object\tneuron\tgranule\n");
    for (i, id) in table.object_ids().iter().enumerate() {
        let neuron = granules.assignment[i];
        let _ = writeln!(assignments, "{id}\t{neuron}\tg{neuron}");
    }
    manifest.write_output("granules.tsv", &assignments)?;

    let mut report = String::new();
    let _ = writeln!(report, "lattice = {rows} x {cols}");
    let _ = writeln!(report, "objects = {}", table.n_objects());
    let _ = writeln!(report, "granules = {}", granules.n_granules());
    let _ = writeln!(
        report,
        "quantization_error = {}",
        grid.quantization_error(&matrix)?
    );
    for (neuron, count) in &granules.occupancy {
        let _ = writeln!(report, "granule g{neuron} objects {count}");
    }
    manifest.write_output("report.txt", &report)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_nfis_train(
    manifest: &mut Manifest,
    cfg: &Cfg,
    input: &Path,
    decision: Option<String>,
    rules: Option<usize>,
    radius: Option<f64>,
    epochs: Option<usize>,
    step: Option<f64>,
) -> Result<()> {
    let text = manifest.read_input(input)?;
    let decision = resolve_decision(cfg, decision, &text)?;
    let table = load_decision_table(&text, &decision)?;
    let (names, x, y) = condition_matrix(&table)?;

    let sub = SubtractiveConfig {
        radius: cfg.resolve(radius, "radius", 0.5)?,
        quash_factor: cfg.resolve(None, "quash_factor", SubtractiveConfig::default().quash_factor)?,
        accept_ratio: cfg.resolve(None, "accept_ratio", SubtractiveConfig::default().accept_ratio)?,
        reject_ratio: cfg.resolve(None, "reject_ratio", SubtractiveConfig::default().reject_ratio)?,
    };
    let rules = cfg.resolve_opt(rules, "rules")?;
    let epochs = cfg.resolve(epochs, "epochs", 30)?;
    let step = cfg.resolve(step, "step", 0.05)?;

    let (centers, used_radius) = match rules {
        Some(k) => cluster_with_rule_target(&x, k, &sub)?,
        None => (subtractive_cluster(&x, &sub)?, sub.radius),
    };
    let model = build_tsk_model(&centers, &x, &y, &names, used_radius)?;
    let trained = train_tsk(&model, &x, &y, epochs, step)?;

    manifest.write_output("tsk.txt", &trained.model.to_text()?)?;

    let predictions = trained.model.predict_batch(&x)?;
    let mut pred_text = String::from("object\tactual\tpredicted\n");
    for (i, id) in table.object_ids().iter().enumerate() {
        let _ = writeln!(pred_text, "{id}\t{}\t{}", y[i], predictions[i]);
    }
    manifest.write_output("predictions.tsv", &pred_text)?;

    let mut report = String::new();
    let _ = writeln!(report, "inputs = {}", names.join(", "));
    let _ = writeln!(report, "rules = {}", trained.model.n_rules());
    let _ = writeln!(report, "radius = {used_radius}");
    let _ = writeln!(report, "train_rmse = {}", rmse(&predictions, &y)?);
    let _ = writeln!(report, "width_clamps = {}", trained.width_clamps);
    let _ = writeln!(
        report,
        "least_squares_fallback = {}",
        trained.model.lsq_fallback
    );
    for (t, e) in trained.rmse_history.iter().enumerate() {
        let _ = writeln!(report, "epoch {t} rmse {e}");
    }
    manifest.write_output("report.txt", &report)?;
    Ok(())
}

struct RstFlags {
    levels: Option<usize>,
    strategy: Option<String>,
    exact_only: bool,
    threshold: Option<f64>,
    universe: Option<String>,
    fallback: Option<f64>,
}

fn cmd_rst_rules(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    input: &Path,
    decision: Option<String>,
    flags: RstFlags,
) -> Result<()> {
    let text = manifest.read_input(input)?;
    let decision = resolve_decision(cfg, decision, &text)?;
    let table = load_decision_table(&text, &decision)?;

    let default_levels = cfg.resolve(flags.levels, "levels", 5)?;
    let overrides = level_overrides(cfg)?;
    let maps = fit_level_maps(&table, &overrides, default_levels, seed)?;
    let symbolic = apply_levels(&table, &maps)?;

    let strategy =
        RuleStrategy::parse(&cfg.resolve(flags.strategy, "strategy", "minimal".to_string())?)?;
    let threshold = cfg.resolve(flags.threshold, "threshold", 0.0)?;
    let options = InductionOptions {
        strategy,
        exact_only: cfg.resolve_switch(flags.exact_only, "exact_only")?,
        strength_threshold: threshold,
        df_universe: DfUniverse::parse(
            &cfg.resolve(flags.universe, "universe", "whole".to_string())?,
        )?,
        fallback_code: cfg.resolve(flags.fallback, "fallback", 4.0)?,
    };
    let mut set = induce_rules(&symbolic, &options)?;
    if strategy != RuleStrategy::Strong && threshold > 0.0 {
        set = strength_filter(&set, threshold);
    }

    manifest.write_output("rules.txt", &set.to_text()?)?;
    manifest.write_output("levelmaps.txt", &write_levelmaps(&maps)?)?;

    let mut report = String::new();
    let _ = writeln!(report, "strategy = {}", strategy.as_str());
    let _ = writeln!(report, "levels = {default_levels}");
    let _ = writeln!(report, "threshold = {threshold}");
    let _ = writeln!(report, "rules = {}", set.rules.len());
    for line in set.display_lines() {
        let _ = writeln!(report, "{line}");
    }
    manifest.write_output("report.txt", &report)?;
    Ok(())
}

struct SonfisFlags {
    iterations: Option<usize>,
    max_rules: Option<usize>,
    neurons_min: Option<usize>,
    neurons_max: Option<usize>,
    mode: Option<String>,
    criterion: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    error_target: Option<f64>,
    som_epochs: Option<usize>,
    nfis_epochs: Option<usize>,
    nfis_step: Option<f64>,
}

fn cmd_sonfis(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    train_path: &Path,
    test_path: &Path,
    decision: Option<String>,
    flags: SonfisFlags,
) -> Result<()> {
    let train_text = manifest.read_input(train_path)?;
    let test_text = manifest.read_input(test_path)?;
    let decision = resolve_decision(cfg, decision, &train_text)?;
    let train = load_decision_table(&train_text, &decision)?;
    let test = load_decision_table(&test_text, &decision)?;

    let config = SonfisConfig {
        neuron_range: (
            cfg.resolve(flags.neurons_min, "neurons_min", 10)?,
            cfg.resolve(flags.neurons_max, "neurons_max", 100)?,
        ),
        max_rules: cfg.resolve(flags.max_rules, "max_rules", 4)?,
        iterations: cfg.resolve(flags.iterations, "iterations", 10)?,
        mode: GrowthMode::parse(&cfg.resolve(flags.mode, "mode", "adaptive".to_string())?)?,
        alpha: cfg.resolve(flags.alpha, "alpha", 1.01)?,
        beta: cfg.resolve(flags.beta, "beta", 0.001)?,
        gamma: cfg.resolve(flags.gamma, "gamma", 0.5)?,
        error_target: cfg.resolve_opt(flags.error_target, "error_target")?,
        criterion: SelectionCriterion::parse(&cfg.resolve(
            flags.criterion,
            "criterion",
            "min-error".to_string(),
        )?)?,
        seed,
        som: SomParams {
            epochs: cfg.resolve(flags.som_epochs, "som_epochs", 100)?,
            ..SomParams::default()
        },
        nfis_epochs: cfg.resolve(flags.nfis_epochs, "nfis_epochs", 30)?,
        nfis_step: cfg.resolve(flags.nfis_step, "nfis_step", 0.05)?,
        subtractive: SubtractiveConfig {
            radius: cfg.resolve(None, "radius", 0.5)?,
            ..SubtractiveConfig::default()
        },
    };
    let result = run_sonfis(&train, &test, &config)?;

    let mut trace = String::from("t\tneurons\tn1\tn2\tgranules\trules\trmse\tfailed\n");
    for r in &result.records {
        let _ = writeln!(
            trace,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.iteration,
            r.neuron_count,
            r.grid_dims.0,
            r.grid_dims.1,
            r.granule_count,
            r.rule_count,
            r.test_error,
            r.failed
        );
    }
    manifest.write_output("sonfis_trace.tsv", &trace)?;
    manifest.write_output("tsk.txt", &result.best_model.to_text()?)?;
    manifest.write_output("som.txt", &result.best_grid.to_text()?)?;

    let (_, test_x, test_y) = condition_matrix(&test)?;
    let predictions = result.best_model.predict_batch(&test_x)?;
    let mut pred_text = String::from("object\tactual\tpredicted\n");
    for (i, id) in test.object_ids().iter().enumerate() {
        let _ = writeln!(pred_text, "{id}\t{}\t{}", test_y[i], predictions[i]);
    }
    manifest.write_output("predictions.tsv", &pred_text)?;

    let best = result.best();
    let mut report = String::new();
    let _ = writeln!(report, "mode = {}", config.mode.as_str());
    let _ = writeln!(report, "criterion = {}", config.criterion.as_str());
    let _ = writeln!(report, "iterations_run = {}", result.records.len());
    let _ = writeln!(report, "best_iteration = {}", best.iteration);
    let _ = writeln!(report, "best_neurons = {}", best.neuron_count);
    let _ = writeln!(report, "best_rules = {}", best.rule_count);
    let _ = writeln!(report, "best_test_rmse = {}", best.test_error);
    for (neurons, span) in neuron_durability(&result.records, 1.0) {
        let _ = writeln!(report, "durable neurons {neurons} iterations {span}");
    }
    let error_tol = 0.1 * best.test_error.max(1e-12);
    match detect_balance_hole(&result.records, 3, 2.0, error_tol) {
        Some(hole) => {
            let _ = writeln!(
                report,
                "balance_hole start {} neuron_mean {} error_mean {}",
                hole.start, hole.neuron_mean, hole.error_mean
            );
        }
        None => {
            let _ = writeln!(report, "balance_hole none");
        }
    }
    manifest.write_output("report.txt", &report)?;
    Ok(())
}

struct SorstFlags {
    structures: Option<usize>,
    levels: Option<usize>,
    neurons_min: Option<usize>,
    neurons_max: Option<usize>,
    threshold: Option<f64>,
    decay: Option<f64>,
    exact_only: bool,
    strategy: Option<String>,
    universe: Option<String>,
    fallback: Option<f64>,
    som_epochs: Option<usize>,
}

fn cmd_sorst(
    manifest: &mut Manifest,
    cfg: &Cfg,
    seed: u64,
    train_path: &Path,
    test_path: &Path,
    decision: Option<String>,
    flags: SorstFlags,
) -> Result<()> {
    let train_text = manifest.read_input(train_path)?;
    let test_text = manifest.read_input(test_path)?;
    let decision = resolve_decision(cfg, decision, &train_text)?;
    let train = load_decision_table(&train_text, &decision)?;
    let test = load_decision_table(&test_text, &decision)?;

    let config = SorstConfig {
        levels: level_overrides(cfg)?,
        default_levels: cfg.resolve(flags.levels, "levels", 3)?,
        neuron_range: (
            cfg.resolve(flags.neurons_min, "neurons_min", 10)?,
            cfg.resolve(flags.neurons_max, "neurons_max", 100)?,
        ),
        structures: cfg.resolve(flags.structures, "structures", 7)?,
        strength_threshold: cfg.resolve(flags.threshold, "threshold", 0.0)?,
        exact_only: cfg.resolve_switch(flags.exact_only, "exact_only")?,
        fallback_code: cfg.resolve(flags.fallback, "fallback", 4.0)?,
        seed,
        som: SomParams {
            epochs: cfg.resolve(flags.som_epochs, "som_epochs", 100)?,
            ..SomParams::default()
        },
        fit_levels_on_raw: cfg.resolve_switch(false, "fit_levels_on_raw")?,
        threshold_decay: cfg.resolve_opt(flags.decay, "decay")?,
        df_universe: DfUniverse::parse(
            &cfg.resolve(flags.universe, "universe", "whole".to_string())?,
        )?,
        strategy: RuleStrategy::parse(
            &cfg.resolve(flags.strategy, "strategy", "minimal".to_string())?,
        )?,
    };
    let result = run_sorst(&train, &test, &config)?;

    let mut trace = String::from("s\tneurons\tn1\tn2\tgranules\trules\tthreshold\tmse\trejected\n");
    for r in &result.records {
        let _ = writeln!(
            trace,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.structure,
            r.neuron_count,
            r.grid_dims.0,
            r.grid_dims.1,
            r.granule_count,
            r.rule_set.rules.len(),
            r.threshold,
            r.test_mse,
            r.rejected
        );
    }
    manifest.write_output("sorst_trace.tsv", &trace)?;

    let mut report = String::new();
    let _ = writeln!(report, "structures = {}", result.records.len());
    let _ = writeln!(report, "strategy = {}", config.strategy.as_str());
    let _ = writeln!(report, "fallback = {}", config.fallback_code);

    if let Some(best) = result.best() {
        manifest.write_output("rules.txt", &best.rule_set.to_text()?)?;
        manifest.write_output("levelmaps.txt", &write_levelmaps(&best.level_maps)?)?;

        let test_symbolic = apply_levels(&test, &best.level_maps)?;
        let mut pred_text = String::from("object\tactual\tpredicted\n");
        for (i, id) in test.object_ids().iter().enumerate() {
            let actual = test_symbolic.decision_value(i);
            match best.test_predictions[i] {
                Some(level) => {
                    let _ = writeln!(pred_text, "{id}\t{actual}\t{level}");
                }
                None => {
                    let _ = writeln!(pred_text, "{id}\t{actual}\t{}", config.fallback_code);
                }
            }
        }
        manifest.write_output("predictions.tsv", &pred_text)?;

        let _ = writeln!(report, "best_structure = {}", best.structure);
        let _ = writeln!(report, "best_neurons = {}", best.neuron_count);
        let _ = writeln!(report, "best_rules = {}", best.rule_set.rules.len());
        let _ = writeln!(report, "best_test_mse = {}", best.test_mse);
        let unmatched = best
            .test_predictions
            .iter()
            .filter(|p| p.is_none())
            .count();
        let _ = writeln!(report, "unrecognized_test_objects = {unmatched}");
        for line in best.rule_set.display_lines() {
            let _ = writeln!(report, "{line}");
        }
    } else {
        let _ = writeln!(report, "best_structure = none (every structure was rejected)");
    }
    manifest.write_output("report.txt", &report)?;
    Ok(())
}

fn parse_axis(spec: &str) -> Result<AxisSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        bail!("axis {spec:?} must look like name:min:max:step");
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| anyhow!("axis {spec:?}: bad number {s:?}"))
    };
    Ok(AxisSpec {
        name: parts[0].to_string(),
        min: num(parts[1])?,
        max: num(parts[2])?,
        step: num(parts[3])?,
    })
}

fn cmd_predict_grid(
    manifest: &mut Manifest,
    tsk: Option<PathBuf>,
    rules: Option<PathBuf>,
    levelmaps: Option<PathBuf>,
    axis: &[String],
    unknown_code: Option<f64>,
) -> Result<()> {
    if axis.is_empty() {
        bail!("at least one --axis name:min:max:step is required");
    }
    if axis.len() > 3 {
        bail!("at most 3 axes are supported, got {}", axis.len());
    }
    let axes: Vec<AxisSpec> = axis.iter().map(|s| parse_axis(s)).collect::<Result<_>>()?;

    let lattice = match (tsk, rules) {
        (Some(model_path), None) => {
            let model = TskModel::from_text(&manifest.read_input(&model_path)?)
                .with_context(|| format!("parsing model {}", model_path.display()))?;
            evaluate_tsk(&model, &axes)?
        }
        (None, Some(rules_path)) => {
            let maps_path = levelmaps
                .ok_or_else(|| anyhow!("--levelmaps is required alongside --rules"))?;
            let set = RoughRuleSet::from_text(&manifest.read_input(&rules_path)?)
                .with_context(|| format!("parsing rules {}", rules_path.display()))?;
            let maps = parse_levelmaps(&manifest.read_input(&maps_path)?)
                .with_context(|| format!("parsing level maps {}", maps_path.display()))?;
            let unknown = match unknown_code {
                Some(c) => c,
                None => {
                    let decision_map = maps
                        .iter()
                        .find(|(n, _)| n == &set.decision_name)
                        .ok_or_else(|| {
                            anyhow!(
                                "no level map for decision {}; pass --unknown-code explicitly",
                                set.decision_name
                            )
                        })?;
                    (decision_map.1.effective() + 1) as f64
                }
            };
            evaluate_rules(&set, &maps, &axes, unknown)?
        }
        (Some(_), Some(_)) => bail!("pass either --tsk or --rules, not both"),
        (None, None) => bail!("pass a model via --tsk or --rules"),
    };
    manifest.write_output("grid.tsv", &lattice.to_text())?;
    Ok(())
}

fn cmd_divergence(manifest: &mut Manifest, input: &Path) -> Result<()> {
    let lattice = PredictionLattice::from_text(&manifest.read_input(input)?)
        .with_context(|| format!("parsing lattice {}", input.display()))?;
    let field = divergence_field(&lattice)?;
    manifest.write_output("divergence.tsv", &field.to_text())?;
    Ok(())
}
