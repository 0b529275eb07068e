//! Self-organizing maps on a rectangular lattice: competitive training,
//! crisp granulation of decision tables into occupied-neuron prototypes, and
//! one-dimensional discretization of numeric attributes into ordered levels.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{AttributeKind, Cell, DecisionTable};
use crate::error::{Error, Result};

/// Neighborhood function applied around the winning neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    Gaussian,
    Bubble,
}

impl Neighborhood {
    /// Update weight for a neuron at lattice distance `d` when the
    /// neighborhood radius is `r`.
    fn weight(self, d: f64, r: f64) -> f64 {
        match self {
            Neighborhood::Gaussian => (-d * d / (2.0 * r * r)).exp(),
            Neighborhood::Bubble => {
                if d <= r {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Neighborhood::Gaussian => "gaussian",
            Neighborhood::Bubble => "bubble",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Neighborhood::Gaussian),
            "bubble" => Ok(Neighborhood::Bubble),
            other => Err(Error::Parse(format!("unknown neighborhood: {other}"))),
        }
    }
}

/// Lattice shape and training schedule for a map.
///
/// The learning rate decays linearly from `lr_initial` to `lr_final`, and the
/// neighborhood radius decays linearly from `initial_radius` to 1 (or stays
/// constant when it starts below 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SomTopology {
    pub rows: usize,
    pub cols: usize,
    pub neighborhood: Neighborhood,
    pub initial_radius: f64,
    pub epochs: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    pub seed: u64,
}

impl SomTopology {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("map dimensions must be at least 1x1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("training needs at least one epoch".into()));
        }
        if !(self.lr_final > 0.0 && self.lr_initial >= self.lr_final) {
            return Err(Error::Config(format!(
                "learning rate must satisfy initial >= final > 0, got {} -> {}",
                self.lr_initial, self.lr_final
            )));
        }
        if !(self.initial_radius > 0.0 && self.initial_radius.is_finite()) {
            return Err(Error::Config(format!(
                "initial radius must be positive and finite, got {}",
                self.initial_radius
            )));
        }
        Ok(())
    }

    pub fn n_neurons(&self) -> usize {
        self.rows * self.cols
    }
}

/// A trained (or freshly initialized) map. Prototypes are stored in the
/// original units of the training data together with the per-feature value
/// ranges, so distances are measured on range-scaled coordinates and an
/// export/import round trip reproduces predictions exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SomGrid {
    topology: SomTopology,
    feature_names: Vec<String>,
    /// `(min, max)` seen per feature when the grid was initialized.
    feature_ranges: Vec<(f64, f64)>,
    /// Row-major: neuron `(r, c)` lives at index `r * cols + c`.
    prototypes: Vec<Vec<f64>>,
}

fn check_samples(data: &[Vec<f64>], dim: usize) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Training("cannot train on zero samples".into()));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Shape(format!(
                "sample {} has {} coordinates, expected {}",
                i + 1,
                row.len(),
                dim
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training(format!(
                "sample {} contains a non-finite value",
                i + 1
            )));
        }
    }
    Ok(())
}

impl SomGrid {
    /// Seeds a grid with prototypes drawn uniformly inside the bounding box
    /// of `data`. Feature ranges are captured here and reused for all later
    /// distance computations.
    pub fn random_init(
        topology: SomTopology,
        feature_names: &[String],
        data: &[Vec<f64>],
    ) -> Result<Self> {
        topology.validate()?;
        if feature_names.is_empty() {
            return Err(Error::Shape("a map needs at least one feature".into()));
        }
        check_samples(data, feature_names.len())?;
        let d = feature_names.len();
        let mut ranges = Vec::with_capacity(d);
        for j in 0..d {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in data {
                lo = lo.min(row[j]);
                hi = hi.max(row[j]);
            }
            ranges.push((lo, hi));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(topology.seed);
        let n = topology.n_neurons();
        let mut prototypes = Vec::with_capacity(n);
        for _ in 0..n {
            let proto: Vec<f64> = ranges
                .iter()
                .map(|(lo, hi)| lo + rng.random::<f64>() * span(*lo, *hi))
                .collect();
            prototypes.push(proto);
        }
        Ok(Self {
            topology,
            feature_names: feature_names.to_vec(),
            feature_ranges: ranges,
            prototypes,
        })
    }

    /// Rebuilds a grid from explicit parts (e.g. parsed from an export).
    pub fn from_parts(
        topology: SomTopology,
        feature_names: Vec<String>,
        feature_ranges: Vec<(f64, f64)>,
        prototypes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        topology.validate()?;
        if feature_names.is_empty() {
            return Err(Error::Shape("a map needs at least one feature".into()));
        }
        if feature_ranges.len() != feature_names.len() {
            return Err(Error::Shape(format!(
                "{} ranges for {} features",
                feature_ranges.len(),
                feature_names.len()
            )));
        }
        if prototypes.len() != topology.n_neurons() {
            return Err(Error::Shape(format!(
                "{} prototypes for a {}x{} map",
                prototypes.len(),
                topology.rows,
                topology.cols
            )));
        }
        for p in &prototypes {
            if p.len() != feature_names.len() {
                return Err(Error::Shape(format!(
                    "prototype has {} coordinates, expected {}",
                    p.len(),
                    feature_names.len()
                )));
            }
        }
        for (lo, hi) in &feature_ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Shape(format!("invalid feature range {lo}..{hi}")));
            }
        }
        Ok(Self {
            topology,
            feature_names,
            feature_ranges,
            prototypes,
        })
    }

    pub fn topology(&self) -> &SomTopology {
        &self.topology
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.topology.rows, self.topology.cols)
    }

    pub fn n_neurons(&self) -> usize {
        self.prototypes.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_ranges(&self) -> &[(f64, f64)] {
        &self.feature_ranges
    }

    pub fn prototypes(&self) -> &[Vec<f64>] {
        &self.prototypes
    }

    /// Lattice coordinates of a neuron index.
    pub fn position(&self, neuron: usize) -> (usize, usize) {
        (neuron / self.topology.cols, neuron % self.topology.cols)
    }

    /// Squared distance between two points with every coordinate scaled by
    /// its feature range (a zero range scales by 1).
    pub fn scaled_dist2(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.feature_names.len() {
            let (lo, hi) = self.feature_ranges[j];
            let diff = (a[j] - b[j]) / span(lo, hi);
            acc += diff * diff;
        }
        acc
    }

    /// Best-matching unit: the neuron whose prototype is nearest to `x`
    /// under the range-scaled metric. Ties go to the lowest neuron index.
    pub fn bmu(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.feature_names.len() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.prototypes.iter().enumerate() {
            let d = self.scaled_dist2(x, p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }

    /// Mean range-scaled distance from each sample to its best-matching
    /// prototype.
    pub fn quantization_error(&self, data: &[Vec<f64>]) -> Result<f64> {
        check_samples(data, self.feature_names.len())?;
        let mut acc = 0.0;
        for row in data {
            let b = self.bmu(row)?;
            acc += self.scaled_dist2(row, &self.prototypes[b]).sqrt();
        }
        Ok(acc / data.len() as f64)
    }

    /// Runs competitive training over `data`. Samples are visited in a
    /// seeded random order each epoch; the winner and its lattice
    /// neighborhood move toward each sample by the decaying learning rate.
    /// The state with the lowest quantization error seen at any epoch
    /// boundary — the starting state included — is the one kept, so training
    /// never leaves the map worse than it started.
    pub fn train(&mut self, data: &[Vec<f64>]) -> Result<()> {
        check_samples(data, self.feature_names.len())?;
        let d = self.feature_names.len();
        let cols = self.topology.cols;
        let lows: Vec<f64> = self.feature_ranges.iter().map(|r| r.0).collect();
        let spans: Vec<f64> = self
            .feature_ranges
            .iter()
            .map(|(lo, hi)| span(*lo, *hi))
            .collect();
        let norm = |row: &[f64]| -> Vec<f64> {
            (0..d).map(|j| (row[j] - lows[j]) / spans[j]).collect()
        };
        let mut protos: Vec<Vec<f64>> = self.prototypes.iter().map(|p| norm(p)).collect();
        let samples: Vec<Vec<f64>> = data.iter().map(|r| norm(r)).collect();
        let mut best_protos = self.prototypes.clone();
        let mut best_qe = self.quantization_error(data)?;
        let positions: Vec<(f64, f64)> = (0..protos.len())
            .map(|i| ((i / cols) as f64, (i % cols) as f64))
            .collect();

        // Decorrelate the visit order from the prototype-initialization
        // stream, which uses the seed directly.
        let mut rng = ChaCha8Rng::seed_from_u64(self.topology.seed ^ 0x9e37_79b9_7f4a_7c15);
        let epochs = self.topology.epochs;
        let r0 = self.topology.initial_radius;
        let r_end = r0.min(1.0);
        let lr0 = self.topology.lr_initial;
        let lr1 = self.topology.lr_final;
        let mut order: Vec<usize> = (0..samples.len()).collect();

        for t in 0..epochs {
            let frac = if epochs > 1 {
                t as f64 / (epochs - 1) as f64
            } else {
                0.0
            };
            let lr = lr0 + (lr1 - lr0) * frac;
            let radius = r0 + (r_end - r0) * frac;
            // Beyond this lattice distance a Gaussian weight is below 1e-12
            // and the update would be a no-op.
            let cutoff = match self.topology.neighborhood {
                Neighborhood::Gaussian => radius * 7.44,
                Neighborhood::Bubble => radius,
            };
            order.shuffle(&mut rng);
            for &si in &order {
                let x = &samples[si];
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, p) in protos.iter().enumerate() {
                    let mut acc = 0.0;
                    for j in 0..d {
                        let diff = x[j] - p[j];
                        acc += diff * diff;
                    }
                    if acc < best_d {
                        best_d = acc;
                        best = i;
                    }
                }
                let (br, bc) = positions[best];
                for (i, p) in protos.iter_mut().enumerate() {
                    let (nr, nc) = positions[i];
                    let ld = ((nr - br).powi(2) + (nc - bc).powi(2)).sqrt();
                    if ld > cutoff {
                        continue;
                    }
                    let h = self.topology.neighborhood.weight(ld, radius);
                    for j in 0..d {
                        p[j] += lr * h * (x[j] - p[j]);
                    }
                }
            }

            self.prototypes = protos
                .iter()
                .map(|p| (0..d).map(|j| lows[j] + p[j] * spans[j]).collect())
                .collect();
            let qe = self.quantization_error(data)?;
            if qe < best_qe {
                best_qe = qe;
                best_protos = self.prototypes.clone();
            }
        }

        self.prototypes = best_protos;
        Ok(())
    }

    /// Serializes the grid as flat text: a header line with the topology,
    /// the feature names, one range line per feature, and one prototype line
    /// per neuron (row-major). Numbers round-trip exactly.
    pub fn to_text(&self) -> Result<String> {
        for name in &self.feature_names {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Encoding(format!(
                    "feature name {name:?} cannot appear in a whitespace-delimited export"
                )));
            }
        }
        let t = &self.topology;
        let mut out = format!(
            "som {} {} {} {} {} {} {} {}\n",
            t.rows,
            t.cols,
            t.neighborhood.as_str(),
            t.initial_radius,
            t.epochs,
            t.lr_initial,
            t.lr_final,
            t.seed
        );
        out.push_str(&format!("features {}\n", self.feature_names.join(" ")));
        for (lo, hi) in &self.feature_ranges {
            out.push_str(&format!("range {lo} {hi}\n"));
        }
        for p in &self.prototypes {
            let coords: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("proto {}\n", coords.join(" ")));
        }
        Ok(out)
    }

    /// Parses the format produced by [`SomGrid::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty map export".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 9 || parts[0] != "som" {
            return Err(Error::Parse(format!(
                "bad map header (expected 9 fields starting with 'som'): {header:?}"
            )));
        }
        let topology = SomTopology {
            rows: parse_num(parts[1], "rows")?,
            cols: parse_num(parts[2], "cols")?,
            neighborhood: Neighborhood::parse(parts[3])?,
            initial_radius: parse_num(parts[4], "initial_radius")?,
            epochs: parse_num(parts[5], "epochs")?,
            lr_initial: parse_num(parts[6], "lr_initial")?,
            lr_final: parse_num(parts[7], "lr_final")?,
            seed: parse_num(parts[8], "seed")?,
        };
        let feat_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing features line".into()))?;
        let mut feat_parts = feat_line.split_whitespace();
        if feat_parts.next() != Some("features") {
            return Err(Error::Parse(format!("expected features line, got {feat_line:?}")));
        }
        let feature_names: Vec<String> = feat_parts.map(str::to_string).collect();
        if feature_names.is_empty() {
            return Err(Error::Parse("features line names no features".into()));
        }
        let mut feature_ranges = Vec::with_capacity(feature_names.len());
        for _ in 0..feature_names.len() {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing range line".into()))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "range" {
                return Err(Error::Parse(format!("bad range line: {line:?}")));
            }
            feature_ranges.push((parse_num(parts[1], "range")?, parse_num(parts[2], "range")?));
        }
        let mut prototypes = Vec::with_capacity(topology.n_neurons());
        for line in lines {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("proto") {
                return Err(Error::Parse(format!("bad prototype line: {line:?}")));
            }
            let coords: Vec<f64> = parts
                .map(|s| parse_num(s, "prototype coordinate"))
                .collect::<Result<_>>()?;
            prototypes.push(coords);
        }
        Self::from_parts(topology, feature_names, feature_ranges, prototypes)
    }
}

fn span(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {what} from {s:?}")))
}

/// Initializes and trains a map on `data` in one call.
pub fn train_som(
    data: &[Vec<f64>],
    feature_names: &[String],
    topology: SomTopology,
) -> Result<SomGrid> {
    let mut grid = SomGrid::random_init(topology, feature_names, data)?;
    grid.train(data)?;
    Ok(grid)
}

/// Crisp granulation of a table: each occupied neuron becomes one granule.
#[derive(Debug, Clone)]
pub struct GranuleSet {
    /// One row per occupied neuron, in ascending neuron order. Attribute
    /// roles mirror the source table, so this is itself a decision table.
    pub prototypes: DecisionTable,
    /// Winning neuron index per source object.
    pub assignment: Vec<usize>,
    /// Occupied neuron index -> number of assigned objects.
    pub occupancy: BTreeMap<usize, usize>,
    /// Neuron index behind each prototype row.
    pub neuron_of_granule: Vec<usize>,
}

impl GranuleSet {
    pub fn n_granules(&self) -> usize {
        self.neuron_of_granule.len()
    }
}

/// Assigns every object of `table` to its best-matching neuron and collapses
/// the table onto the occupied prototypes. The grid must have been trained
/// on the table's numeric attributes, including its decision attribute, so
/// that the prototype rows form a valid decision table themselves.
pub fn crisp_granulate(grid: &SomGrid, table: &DecisionTable) -> Result<GranuleSet> {
    let mut columns = Vec::with_capacity(grid.feature_names().len());
    let mut attrs = Vec::with_capacity(grid.feature_names().len());
    for name in grid.feature_names() {
        let idx = table.attribute_index(name)?;
        let attr = &table.attributes()[idx];
        if attr.kind != AttributeKind::Numeric {
            return Err(Error::Shape(format!(
                "attribute {name} is not numeric and cannot be granulated"
            )));
        }
        columns.push(idx);
        attrs.push(attr.clone());
    }
    if !columns.contains(&table.decision_index()) {
        return Err(Error::Shape(
            "the map must cover the decision attribute to granulate a decision table".into(),
        ));
    }

    let mut assignment = Vec::with_capacity(table.n_objects());
    let mut occupancy: BTreeMap<usize, usize> = BTreeMap::new();
    let mut x = vec![0.0; columns.len()];
    for row in table.rows() {
        for (k, &c) in columns.iter().enumerate() {
            x[k] = row[c].as_num().expect("kind checked");
        }
        let b = grid.bmu(&x)?;
        assignment.push(b);
        *occupancy.entry(b).or_insert(0) += 1;
    }

    let neuron_of_granule: Vec<usize> = occupancy.keys().copied().collect();
    let ids: Vec<String> = neuron_of_granule.iter().map(|n| format!("g{n}")).collect();
    let rows: Vec<Vec<Cell>> = neuron_of_granule
        .iter()
        .map(|&n| grid.prototypes()[n].iter().map(|&v| Cell::Num(v)).collect())
        .collect();
    let prototypes = DecisionTable::new(ids, attrs, rows)?;
    Ok(GranuleSet {
        prototypes,
        assignment,
        occupancy,
        neuron_of_granule,
    })
}

/// Ordered discretization of one numeric attribute, produced by a 1-D map:
/// level `k` means "nearest to the k-th smallest occupied prototype".
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    /// Occupied prototypes in ascending order; level `i + 1` is anchored at
    /// `level_prototypes[i]`.
    pub level_prototypes: Vec<f64>,
    /// Number of levels originally asked for.
    pub requested: usize,
}

impl Discretization {
    /// 1-based level of a value: the index of its nearest prototype, with
    /// ties going to the lower level.
    pub fn level_of(&self, v: f64) -> u32 {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.level_prototypes.iter().enumerate() {
            let d = (v - p).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        (best + 1) as u32
    }

    pub fn apply(&self, values: &[f64]) -> Vec<u32> {
        values.iter().map(|&v| self.level_of(v)).collect()
    }

    /// Number of distinct levels actually available.
    pub fn effective(&self) -> usize {
        self.level_prototypes.len()
    }

    /// True when fewer levels emerged than were requested.
    pub fn is_degenerate(&self) -> bool {
        self.effective() < self.requested
    }
}

/// Discretizes `values` into at most `levels` ordered levels by training a
/// 1 x `levels` map on them and keeping the occupied prototypes, sorted
/// ascending and deduplicated. The result may be degenerate (fewer levels
/// than requested) when the data cannot support the full count.
pub fn discretize_attribute(values: &[f64], levels: usize, seed: u64) -> Result<Discretization> {
    if levels == 0 {
        return Err(Error::Config("at least one level is required".into()));
    }
    let data: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
    let names = vec!["value".to_string()];
    let topology = SomTopology {
        rows: 1,
        cols: levels,
        neighborhood: Neighborhood::Gaussian,
        initial_radius: (levels as f64 / 2.0).max(1.0),
        epochs: 120,
        lr_initial: 0.5,
        lr_final: 0.01,
        seed,
    };
    let grid = train_som(&data, &names, topology)?;

    let mut occupied: BTreeMap<usize, ()> = BTreeMap::new();
    for row in &data {
        occupied.insert(grid.bmu(row)?, ());
    }
    let mut protos: Vec<f64> = occupied.keys().map(|&n| grid.prototypes()[n][0]).collect();
    protos.sort_by(f64::total_cmp);

    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * span(lo, hi);
    let mut level_prototypes: Vec<f64> = Vec::with_capacity(protos.len());
    for p in protos {
        match level_prototypes.last() {
            Some(last) if p - last <= tol => {}
            _ => level_prototypes.push(p),
        }
    }
    Ok(Discretization {
        level_prototypes,
        requested: levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::load_decision_table;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn blob_data(seed: u64, n: usize) -> Vec<Vec<f64>> {
        // Two well-separated blobs plus a linear strand.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                match i % 3 {
                    0 => vec![10.0 + u, 5.0 + v],
                    1 => vec![40.0 + u, 90.0 + v],
                    _ => vec![20.0 + 10.0 * u, 50.0 + 10.0 * u + v],
                }
            })
            .collect()
    }

    fn small_topology(seed: u64) -> SomTopology {
        SomTopology {
            rows: 3,
            cols: 4,
            neighborhood: Neighborhood::Gaussian,
            initial_radius: 2.0,
            epochs: 40,
            lr_initial: 0.5,
            lr_final: 0.01,
            seed,
        }
    }

    #[test]
    fn topology_validation() {
        let mut t = small_topology(1);
        t.rows = 0;
        assert!(t.validate().is_err());
        let mut t = small_topology(1);
        t.epochs = 0;
        assert!(t.validate().is_err());
        let mut t = small_topology(1);
        t.lr_final = 0.9;
        assert!(t.validate().is_err(), "final lr above initial");
        let mut t = small_topology(1);
        t.initial_radius = 0.0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let data = blob_data(3, 60);
        let a = train_som(&data, &names(&["x", "y"]), small_topology(9)).unwrap();
        let b = train_som(&data, &names(&["x", "y"]), small_topology(9)).unwrap();
        assert_eq!(a.prototypes(), b.prototypes());
        let c = train_som(&data, &names(&["x", "y"]), small_topology(10)).unwrap();
        assert_ne!(a.prototypes(), c.prototypes());
    }

    #[test]
    fn training_reduces_quantization_error() {
        for seed in 0..8 {
            let data = blob_data(seed, 90);
            let init =
                SomGrid::random_init(small_topology(seed), &names(&["x", "y"]), &data).unwrap();
            let before = init.quantization_error(&data).unwrap();
            let mut trained = init.clone();
            trained.train(&data).unwrap();
            let after = trained.quantization_error(&data).unwrap();
            assert!(
                after <= before,
                "seed {seed}: error grew from {before} to {after}"
            );
        }
    }

    #[test]
    fn bmu_tie_breaks_to_lowest_index() {
        let topology = SomTopology {
            rows: 1,
            cols: 3,
            ..small_topology(0)
        };
        let grid = SomGrid::from_parts(
            topology,
            names(&["x"]),
            vec![(0.0, 10.0)],
            vec![vec![5.0], vec![5.0], vec![1.0]],
        )
        .unwrap();
        assert_eq!(grid.bmu(&[5.0]).unwrap(), 0);
        assert_eq!(grid.bmu(&[1.2]).unwrap(), 2);
    }

    #[test]
    fn export_import_round_trips_exactly() {
        let data = blob_data(17, 50);
        let grid = train_som(&data, &names(&["x", "y"]), small_topology(17)).unwrap();
        let text = grid.to_text().unwrap();
        let back = SomGrid::from_text(&text).unwrap();
        assert_eq!(grid, back);
        for row in &data {
            assert_eq!(grid.bmu(row).unwrap(), back.bmu(row).unwrap());
        }
        assert_eq!(text, back.to_text().unwrap());
    }

    #[test]
    fn import_rejects_malformed_text() {
        assert!(SomGrid::from_text("").is_err());
        assert!(SomGrid::from_text("som 1 2 gaussian 1 10 0.5 0.1\n").is_err());
        let good = train_som(&blob_data(1, 20), &names(&["x", "y"]), small_topology(1))
            .unwrap()
            .to_text()
            .unwrap();
        let truncated: String = good.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(SomGrid::from_text(&truncated).is_err());
    }

    #[test]
    fn granulation_covers_every_object() {
        let csv = "\
x,y,q
1,1,10
1.1,0.9,11
40,40,90
39.5,40.2,88
40.1,39.9,91
80,5,50
";
        let table = load_decision_table(csv, "q").unwrap();
        let data: Vec<Vec<f64>> = table
            .rows()
            .iter()
            .map(|r| r.iter().map(|c| c.as_num().unwrap()).collect())
            .collect();
        let grid = train_som(&data, &names(&["x", "y", "q"]), small_topology(5)).unwrap();
        let g = crisp_granulate(&grid, &table).unwrap();

        assert_eq!(g.assignment.len(), 6);
        assert_eq!(g.occupancy.values().sum::<usize>(), 6);
        assert!(g.n_granules() <= grid.n_neurons());
        assert!(g.n_granules() >= 1);
        // Prototype rows keep the source schema.
        assert_eq!(g.prototypes.attributes().len(), 3);
        assert_eq!(g.prototypes.decision_index(), 2);
        // Granule ids name their neuron, ascending.
        for (row, &n) in g.prototypes.object_ids().iter().zip(&g.neuron_of_granule) {
            assert_eq!(row, &format!("g{n}"));
        }
        assert!(g.neuron_of_granule.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn granulation_requires_decision_coverage() {
        let csv = "x,y,q\n1,2,3\n4,5,6\n";
        let table = load_decision_table(csv, "q").unwrap();
        let data = vec![vec![1.0, 2.0], vec![4.0, 5.0]];
        let grid = train_som(&data, &names(&["x", "y"]), small_topology(2)).unwrap();
        assert!(crisp_granulate(&grid, &table).is_err());
    }

    #[test]
    fn discretization_levels_are_monotone() {
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let d = discretize_attribute(&values, 3, 11).unwrap();
        assert_eq!(d.effective(), 3);
        assert!(!d.is_degenerate());
        let levels = d.apply(&values);
        assert!(levels.windows(2).all(|w| w[0] <= w[1]), "{levels:?}");
        assert_eq!(levels[0], 1);
        assert_eq!(levels[9], 3);
        assert!(d
            .level_prototypes
            .windows(2)
            .all(|w| w[0] < w[1]));
    }

    #[test]
    fn discretization_handles_degenerate_data() {
        let constant = [4.2; 8];
        let d = discretize_attribute(&constant, 3, 2).unwrap();
        assert_eq!(d.effective(), 1);
        assert!(d.is_degenerate());
        assert!(d.apply(&constant).iter().all(|&l| l == 1));

        let single = discretize_attribute(&[1.0, 2.0, 3.0], 1, 2).unwrap();
        assert_eq!(single.effective(), 1);
        assert!(!single.is_degenerate());
    }

    #[test]
    fn discretization_is_stable_under_reapplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let values: Vec<f64> = (0..40).map(|_| rng.random::<f64>() * 100.0).collect();
        let d = discretize_attribute(&values, 5, 7).unwrap();
        assert_eq!(d.apply(&values), d.apply(&values));
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let levels = d.apply(&sorted);
        assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn from_parts_validates_shapes() {
        let t = small_topology(0);
        assert!(SomGrid::from_parts(
            t.clone(),
            names(&["x"]),
            vec![(0.0, 1.0)],
            vec![vec![0.5]; 5], // 12 neurons expected
        )
        .is_err());
        assert!(SomGrid::from_parts(
            t,
            names(&["x", "y"]),
            vec![(0.0, 1.0)], // one range for two features
            vec![vec![0.5, 0.5]; 12],
        )
        .is_err());
    }
}
