//! Regular evaluation lattices: sweep a model over a Cartesian grid of
//! inputs, export the surface as text, and measure its local curvature with
//! second differences (a balance diagnostic — flat regions answer 0, bowed
//! regions answer their bending strength).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::nfis::TskModel;
use crate::rst::{classify, RoughRuleSet};
use crate::som::Discretization;

/// Hard cap on lattice size, to keep accidental huge sweeps from exhausting
/// memory.
const MAX_POINTS: usize = 16_777_216;

/// One lattice axis: evenly spaced samples `min, min+step, …` up to `max`
/// (inclusive when it lands on a sample within rounding slack).
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!(
                "axis name {:?} must be non-empty and free of whitespace",
                self.name
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "axis {} needs a positive finite step, got {}",
                self.name, self.step
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::Config(format!(
                "axis {} has an empty or unbounded range [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }

    /// Number of samples along the axis. A tiny slack absorbs rounding, so a
    /// range whose endpoint is within a billionth of a step still includes it.
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + self.step * i as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }
}

fn validate_axes(axes: &[AxisSpec]) -> Result<usize> {
    if axes.is_empty() {
        return Err(Error::Config("at least one axis is required".into()));
    }
    let mut total: usize = 1;
    for (i, ax) in axes.iter().enumerate() {
        ax.validate()?;
        if axes[..i].iter().any(|other| other.name == ax.name) {
            return Err(Error::Config(format!("duplicate axis name {}", ax.name)));
        }
        total = total
            .checked_mul(ax.len())
            .filter(|&n| n <= MAX_POINTS)
            .ok_or_else(|| {
                Error::Size(format!(
                    "lattice exceeds the {MAX_POINTS}-point cap; coarsen the steps"
                ))
            })?;
    }
    Ok(total)
}

/// A sampled surface: one value per grid point, stored row-major with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionLattice {
    pub axes: Vec<AxisSpec>,
    pub values: Vec<f64>,
}

impl PredictionLattice {
    pub fn new(axes: Vec<AxisSpec>, values: Vec<f64>) -> Result<Self> {
        let total = validate_axes(&axes)?;
        if values.len() != total {
            return Err(Error::Size(format!(
                "lattice needs {total} values, got {}",
                values.len()
            )));
        }
        Ok(Self { axes, values })
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(AxisSpec::len).collect()
    }

    fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1usize; dims.len()];
        for a in (0..dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * dims[a + 1];
        }
        strides
    }

    /// Grid coordinates of a flat index.
    pub fn coords(&self, flat: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut rem = flat;
        let mut coords = vec![0usize; dims.len()];
        for a in (0..dims.len()).rev() {
            coords[a] = rem % dims[a];
            rem /= dims[a];
        }
        coords
    }

    /// Flat index of grid coordinates.
    pub fn flat(&self, coords: &[usize]) -> usize {
        self.strides()
            .iter()
            .zip(coords)
            .map(|(s, c)| s * c)
            .sum()
    }

    /// Axis values at a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.coords(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&c, ax)| ax.value(c))
            .collect()
    }

    /// Serializes the lattice: one `# axis name min max step` line per axis,
    /// a tab-separated header, then one row per point (coordinates, value).
    /// Numbers print in shortest round-trip form, so parsing back is exact.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for ax in &self.axes {
            s.push_str(&format!(
                "# axis {} {} {} {}\n",
                ax.name, ax.min, ax.max, ax.step
            ));
        }
        let mut cols: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        cols.push("value".into());
        s.push_str(&cols.join("\t"));
        s.push('\n');
        for flat in 0..self.n_points() {
            let mut fields: Vec<String> =
                self.point(flat).iter().map(|v| format!("{v}")).collect();
            fields.push(format!("{}", self.values[flat]));
            s.push_str(&fields.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut axes = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# axis ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(Error::Parse(format!(
                        "line {}: expected `# axis name min max step`",
                        lineno + 1
                    )));
                }
                let num = |s: &str| -> Result<f64> {
                    s.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad number {s:?}", lineno + 1))
                    })
                };
                axes.push(AxisSpec {
                    name: parts[0].to_string(),
                    min: num(parts[1])?,
                    max: num(parts[2])?,
                    step: num(parts[3])?,
                });
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                let cols: Vec<&str> = line.split('\t').collect();
                if cols.len() != axes.len() + 1 || cols.last() != Some(&"value") {
                    return Err(Error::Parse(format!(
                        "line {}: header must list the axis names then `value`",
                        lineno + 1
                    )));
                }
                continue;
            }
            let last = line.split('\t').next_back().ok_or_else(|| {
                Error::Parse(format!("line {}: empty row", lineno + 1))
            })?;
            values.push(last.parse::<f64>().map_err(|_| {
                Error::Parse(format!("line {}: bad value {last:?}", lineno + 1))
            })?);
        }
        Self::new(axes, values)
    }
}

/// Samples an arbitrary function over the grid.
pub fn evaluate_fn(
    axes: &[AxisSpec],
    mut f: impl FnMut(&[f64]) -> f64,
) -> Result<PredictionLattice> {
    let total = validate_axes(axes)?;
    let mut lattice = PredictionLattice {
        axes: axes.to_vec(),
        values: vec![0.0; total],
    };
    for flat in 0..total {
        let point = lattice.point(flat);
        lattice.values[flat] = f(&point);
    }
    Ok(lattice)
}

/// Sweeps a fuzzy inference model over the grid. Axes are matched to model
/// inputs by name, so their order may differ from the model's.
pub fn evaluate_tsk(model: &TskModel, axes: &[AxisSpec]) -> Result<PredictionLattice> {
    validate_axes(axes)?;
    if model.n_inputs() != axes.len() {
        return Err(Error::Shape(format!(
            "model has {} inputs but {} axes were given",
            model.n_inputs(),
            axes.len()
        )));
    }
    let perm: Vec<usize> = model
        .input_names
        .iter()
        .map(|n| {
            axes.iter().position(|a| &a.name == n).ok_or_else(|| {
                Error::Attribute(format!("no axis for model input {n}"))
            })
        })
        .collect::<Result<_>>()?;
    let mut x = vec![0.0; axes.len()];
    evaluate_fn(axes, |p| {
        for (j, &src) in perm.iter().enumerate() {
            x[j] = p[src];
        }
        model.infer(&x).expect("input arity was checked")
    })
}

/// Sweeps a rough rule set over the grid: each coordinate is discretized
/// with its level map, the rules classify the level vector, and unmatched
/// points answer `unknown_code`. Every rule decision label must be numeric.
pub fn evaluate_rules(
    rules: &RoughRuleSet,
    maps: &[(String, Discretization)],
    axes: &[AxisSpec],
    unknown_code: f64,
) -> Result<PredictionLattice> {
    validate_axes(axes)?;
    let axis_maps: Vec<&Discretization> = axes
        .iter()
        .map(|a| {
            maps.iter()
                .find(|(n, _)| n == &a.name)
                .map(|(_, m)| m)
                .ok_or_else(|| {
                    Error::Attribute(format!("no level map for axis {}", a.name))
                })
        })
        .collect::<Result<_>>()?;
    for rule in &rules.rules {
        for d in &rule.decisions {
            if d.parse::<f64>().is_err() {
                return Err(Error::Parse(format!(
                    "rule decision {d:?} is not numeric; a numeric surface needs numeric labels"
                )));
            }
        }
    }
    evaluate_fn(axes, |p| {
        let object: BTreeMap<String, String> = axes
            .iter()
            .zip(&axis_maps)
            .zip(p)
            .map(|((a, m), &v)| (a.name.clone(), m.level_of(v).to_string()))
            .collect();
        match classify(rules, &object) {
            Some(label) => label.parse::<f64>().expect("checked above"),
            None => unknown_code,
        }
    })
}

/// Total curvature at every grid point: the sum over axes of the second
/// difference along that axis, `(f[i+1] - 2 f[i] + f[i-1]) / step²`, using a
/// shifted stencil at the edges. Exact for quadratic surfaces: constants and
/// planes answer 0 everywhere, `x²` answers 2. Axes with a single sample
/// contribute nothing; axes with exactly two samples cannot bend and are an
/// error.
pub fn divergence_field(lattice: &PredictionLattice) -> Result<PredictionLattice> {
    let dims: Vec<usize> = lattice.axes.iter().map(AxisSpec::len).collect();
    for (axis, &n) in lattice.axes.iter().zip(&dims) {
        if n == 2 {
            return Err(Error::Shape(format!(
                "axis {} has only two samples; curvature needs at least three",
                axis.name
            )));
        }
    }
    let strides = lattice.strides();
    let mut out = vec![0.0; lattice.n_points()];
    for (flat, slot) in out.iter_mut().enumerate() {
        let coords = lattice.coords(flat);
        let mut total = 0.0;
        for a in 0..dims.len() {
            let n = dims[a];
            if n < 3 {
                continue;
            }
            let h2 = lattice.axes[a].step * lattice.axes[a].step;
            let i = coords[a];
            let at = |j: usize| {
                let offset = (j as isize - i as isize) * strides[a] as isize;
                lattice.values[(flat as isize + offset) as usize]
            };
            let dd = if i >= 1 && i + 1 < n {
                at(i + 1) - 2.0 * at(i) + at(i - 1)
            } else if i == 0 {
                at(0) - 2.0 * at(1) + at(2)
            } else {
                at(n - 1) - 2.0 * at(n - 2) + at(n - 3)
            };
            total += dd / h2;
        }
        *slot = total;
    }
    Ok(PredictionLattice {
        axes: lattice.axes.clone(),
        values: out,
    })
}
