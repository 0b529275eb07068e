//! Seeded synthetic borehole-style datasets. Two schemas: `dam5` mirrors a
//! drill-log table (depth, interval length, rock quality, weathering code,
//! water take) with the water take negatively correlated with rock quality
//! inside a configurable fraction of depth zones; `xyz` lays a smooth scalar
//! field over spatial coordinates.

use anyhow::{anyhow, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use granulate_core::data::{
    Attribute, AttributeKind, AttributeRole, Cell, DecisionTable, TWR_CODES,
};

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn numeric_attrs(names: &[&str]) -> Vec<Attribute> {
    names
        .iter()
        .enumerate()
        .map(|(j, name)| Attribute {
            name: (*name).to_string(),
            role: if j + 1 == names.len() {
                AttributeRole::Decision
            } else {
                AttributeRole::Condition
            },
            kind: AttributeKind::Numeric,
        })
        .collect()
}

fn build(names: &[&str], rows: Vec<Vec<f64>>) -> Result<DecisionTable> {
    let ids = (1..=rows.len()).map(|i| format!("o{i}")).collect();
    let cells = rows
        .into_iter()
        .map(|r| r.into_iter().map(Cell::Num).collect())
        .collect();
    Ok(DecisionTable::new(ids, numeric_attrs(names), cells)?)
}

/// Drill-log style table: depth `Z`, test-interval length `L`, rock quality
/// `RQD` (0–100), weathering code `TWR`, and the decision `lugeon`.
/// `neg_frac` of the depth zones invert the quality–take relation.
pub fn dam5(n: usize, neg_frac: f64, seed: u64) -> Result<DecisionTable> {
    if n == 0 {
        return Err(anyhow!("cannot synthesize an empty dataset (n = 0)"));
    }
    if !(0.0..=1.0).contains(&neg_frac) {
        return Err(anyhow!("neg-frac must lie in [0, 1], got {neg_frac}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    const ZONES: usize = 8;
    let reverse: Vec<bool> = (0..ZONES).map(|_| rng.random::<f64>() < neg_frac).collect();
    let rqd_mean: Vec<f64> = (0..ZONES).map(|_| rng.random_range(35.0..90.0)).collect();

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = rng.random_range(0.0..120.0);
        let zone = ((z / 15.0) as usize).min(ZONES - 1);
        let rqd = (rqd_mean[zone] + 15.0 * noise.sample(&mut rng)).clamp(0.0, 100.0);
        let l: f64 = rng.random_range(1.5..6.0);
        let widx = ((100.0 - rqd) / 100.0 * 8.0 + 0.8 * noise.sample(&mut rng))
            .round()
            .clamp(0.0, 8.0) as usize;
        let twr = TWR_CODES[widx].1;
        let lugeon = if reverse[zone] {
            (58.0 - 0.5 * rqd + 6.0 * noise.sample(&mut rng)).clamp(0.0, 120.0)
        } else {
            (12.0 + 0.05 * rqd + 4.0 * noise.sample(&mut rng)).clamp(0.0, 120.0)
        };
        rows.push(vec![
            round3(z),
            round3(l),
            round3(rqd),
            twr,
            round3(lugeon),
        ]);
    }
    build(&["Z", "L", "RQD", "TWR", "lugeon"], rows)
}

/// Spatial scalar field: coordinates `X`, `Y`, `Z` and the decision `lugeon`
/// sampled from a smooth trend plus noise.
pub fn xyz(n: usize, seed: u64) -> Result<DecisionTable> {
    if n == 0 {
        return Err(anyhow!("cannot synthesize an empty dataset (n = 0)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.random_range(0.0..500.0);
        let y: f64 = rng.random_range(0.0..500.0);
        let z: f64 = rng.random_range(0.0..120.0);
        let lugeon = (30.0 + 18.0 * (x / 120.0).sin() * (y / 160.0).cos() - 0.12 * z
            + 2.0 * noise.sample(&mut rng))
        .clamp(0.0, 100.0);
        rows.push(vec![round3(x), round3(y), round3(z), round3(lugeon)]);
    }
    build(&["X", "Y", "Z", "lugeon"], rows)
}

/// Dispatches on the preset name.
pub fn generate(preset: &str, n: usize, neg_frac: f64, seed: u64) -> Result<DecisionTable> {
    match preset {
        "dam5" => dam5(n, neg_frac, seed),
        "xyz" => xyz(n, seed),
        other => Err(anyhow!("unknown preset {other:?}; use dam5 or xyz")),
    }
}
