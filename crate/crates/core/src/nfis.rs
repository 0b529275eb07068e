//! Takagi–Sugeno fuzzy inference: Gaussian premises, linear consequents,
//! subtractive-clustering rule seeding, and hybrid training that alternates
//! least-squares consequent refits with gradient steps on the premises.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gaussian membership function `exp(-(x - center)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMf {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianMf {
    pub fn membership(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// One rule: a Gaussian premise per input and a linear consequent
/// `coeffs . x + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct TskRule {
    pub premises: Vec<GaussianMf>,
    pub coeffs: Vec<f64>,
    pub bias: f64,
}

impl TskRule {
    /// Product of the premise memberships, computed in log space so a long
    /// product cannot underflow prematurely.
    pub fn firing_strength(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (mf, &xv) in self.premises.iter().zip(x) {
            let z = (xv - mf.center) / mf.sigma;
            acc += 0.5 * z * z;
        }
        (-acc).exp()
    }

    pub fn consequent(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.bias
    }
}

/// A complete Takagi–Sugeno model: the weighted average of rule consequents
/// under normalized firing strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct TskModel {
    pub rules: Vec<TskRule>,
    pub input_names: Vec<String>,
    /// Lower bound per input for premise widths during training.
    pub sigma_floor: Vec<f64>,
    /// True when the last consequent refit hit a rank-deficient system and
    /// took the minimum-norm solution.
    pub lsq_fallback: bool,
}

impl TskModel {
    pub fn n_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_inputs() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n_inputs()
            )));
        }
        Ok(())
    }

    /// Normalized firing strengths at `x`; they always sum to 1. When every
    /// raw strength underflows to zero the rule whose premise center is
    /// nearest in width-scaled coordinates takes all the weight, and the
    /// returned flag is true.
    pub fn normalized_strengths(&self, x: &[f64]) -> (Vec<f64>, bool) {
        let raw: Vec<f64> = self.rules.iter().map(|r| r.firing_strength(x)).collect();
        let sum: f64 = raw.iter().sum();
        if sum > 1e-300 {
            (raw.iter().map(|w| w / sum).collect(), false)
        } else {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, rule) in self.rules.iter().enumerate() {
                let d: f64 = rule
                    .premises
                    .iter()
                    .zip(x)
                    .map(|(mf, &xv)| ((xv - mf.center) / mf.sigma).powi(2))
                    .sum();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            let mut g = vec![0.0; self.rules.len()];
            g[best] = 1.0;
            (g, true)
        }
    }

    /// Model output at `x`, plus a flag marking points where every rule's
    /// strength underflowed and a nearest-rule fallback was used.
    pub fn infer_with_flag(&self, x: &[f64]) -> Result<(f64, bool)> {
        self.check_point(x)?;
        let (g, degenerate) = self.normalized_strengths(x);
        let value = self
            .rules
            .iter()
            .zip(&g)
            .map(|(r, gi)| gi * r.consequent(x))
            .sum();
        Ok((value, degenerate))
    }

    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        Ok(self.infer_with_flag(x)?.0)
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.infer(x)).collect()
    }

    /// Serializes the model as flat text; numbers round-trip exactly.
    pub fn to_text(&self) -> Result<String> {
        for name in &self.input_names {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Encoding(format!(
                    "input name {name:?} cannot appear in a whitespace-delimited export"
                )));
            }
        }
        let mut out = format!("tsk {} {}\n", self.n_rules(), self.n_inputs());
        out.push_str(&format!("inputs {}\n", self.input_names.join(" ")));
        let floors: Vec<String> = self.sigma_floor.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("floors {}\n", floors.join(" ")));
        out.push_str(&format!("meta fallback={}\n", self.lsq_fallback));
        for rule in &self.rules {
            let mut fields = Vec::with_capacity(3 * self.n_inputs() + 1);
            for mf in &rule.premises {
                fields.push(mf.center.to_string());
                fields.push(mf.sigma.to_string());
            }
            for c in &rule.coeffs {
                fields.push(c.to_string());
            }
            fields.push(rule.bias.to_string());
            out.push_str(&format!("rule {}\n", fields.join(" ")));
        }
        Ok(out)
    }

    /// Parses the format produced by [`TskModel::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty model export".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "tsk" {
            return Err(Error::Parse(format!("bad model header: {header:?}")));
        }
        let n_rules: usize = parse_num(parts[1], "rule count")?;
        let n_inputs: usize = parse_num(parts[2], "input count")?;
        if n_rules == 0 || n_inputs == 0 {
            return Err(Error::Parse("a model needs rules and inputs".into()));
        }

        let inputs_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing inputs line".into()))?;
        let mut ip = inputs_line.split_whitespace();
        if ip.next() != Some("inputs") {
            return Err(Error::Parse(format!("expected inputs line, got {inputs_line:?}")));
        }
        let input_names: Vec<String> = ip.map(str::to_string).collect();
        if input_names.len() != n_inputs {
            return Err(Error::Parse(format!(
                "{} input names for {} inputs",
                input_names.len(),
                n_inputs
            )));
        }

        let floors_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing floors line".into()))?;
        let mut fp = floors_line.split_whitespace();
        if fp.next() != Some("floors") {
            return Err(Error::Parse(format!("expected floors line, got {floors_line:?}")));
        }
        let sigma_floor: Vec<f64> = fp
            .map(|s| parse_num(s, "width floor"))
            .collect::<Result<_>>()?;
        if sigma_floor.len() != n_inputs {
            return Err(Error::Parse(format!(
                "{} width floors for {} inputs",
                sigma_floor.len(),
                n_inputs
            )));
        }

        let meta_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing meta line".into()))?;
        let lsq_fallback = match meta_line.trim() {
            "meta fallback=true" => true,
            "meta fallback=false" => false,
            other => return Err(Error::Parse(format!("bad meta line: {other:?}"))),
        };

        let mut rules = Vec::with_capacity(n_rules);
        for line in lines {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("rule") {
                return Err(Error::Parse(format!("bad rule line: {line:?}")));
            }
            let nums: Vec<f64> = parts
                .map(|s| parse_num(s, "rule field"))
                .collect::<Result<_>>()?;
            if nums.len() != 3 * n_inputs + 1 {
                return Err(Error::Parse(format!(
                    "rule line has {} fields, expected {}",
                    nums.len(),
                    3 * n_inputs + 1
                )));
            }
            let premises: Vec<GaussianMf> = (0..n_inputs)
                .map(|j| GaussianMf {
                    center: nums[2 * j],
                    sigma: nums[2 * j + 1],
                })
                .collect();
            if premises.iter().any(|mf| mf.sigma <= 0.0 || mf.sigma.is_nan()) {
                return Err(Error::Parse("premise width must be positive".into()));
            }
            let coeffs = nums[2 * n_inputs..3 * n_inputs].to_vec();
            let bias = nums[3 * n_inputs];
            rules.push(TskRule {
                premises,
                coeffs,
                bias,
            });
        }
        if rules.len() != n_rules {
            return Err(Error::Parse(format!(
                "{} rule lines for {} rules",
                rules.len(),
                n_rules
            )));
        }
        Ok(TskModel {
            rules,
            input_names,
            sigma_floor,
            lsq_fallback,
        })
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {what} from {s:?}")))
}

/// Settings for subtractive clustering on the unit hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtractiveConfig {
    /// Cluster radius in normalized coordinates, in `(0, 1]`.
    pub radius: f64,
    /// Multiplier on `radius` for the potential-reduction neighborhood.
    pub quash_factor: f64,
    /// A candidate above this fraction of the first peak is accepted.
    pub accept_ratio: f64,
    /// A candidate below this fraction of the first peak stops the search.
    pub reject_ratio: f64,
}

impl Default for SubtractiveConfig {
    fn default() -> Self {
        Self {
            radius: 0.5,
            quash_factor: 1.25,
            accept_ratio: 0.5,
            reject_ratio: 0.15,
        }
    }
}

impl SubtractiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(Error::Config(format!(
                "cluster radius must lie in (0, 1], got {}",
                self.radius
            )));
        }
        if self.quash_factor <= 1.0 || self.quash_factor.is_nan() {
            return Err(Error::Config(format!(
                "quash factor must exceed 1, got {}",
                self.quash_factor
            )));
        }
        if !(0.0 < self.reject_ratio && self.reject_ratio < self.accept_ratio
            && self.accept_ratio <= 1.0)
        {
            return Err(Error::Config(format!(
                "ratios must satisfy 0 < reject < accept <= 1, got reject {} accept {}",
                self.reject_ratio, self.accept_ratio
            )));
        }
        Ok(())
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        Self {
            radius,
            ..self.clone()
        }
    }
}

fn column_ranges(data: &[Vec<f64>], d: usize) -> Vec<(f64, f64)> {
    (0..d)
        .map(|j| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in data {
                lo = lo.min(row[j]);
                hi = hi.max(row[j]);
            }
            (lo, hi)
        })
        .collect()
}

fn span(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn check_points(data: &[Vec<f64>], d: usize) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Clustering("cannot cluster zero points".into()));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Shape(format!(
                "point {} has {} coordinates, expected {}",
                i + 1,
                row.len(),
                d
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Clustering(format!(
                "point {} contains a non-finite value",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Mountain-potential subtractive clustering. Every point starts with a
/// potential set by its neighbor density; peaks are drawn off one by one,
/// each subtracting its influence, until the remaining potential falls below
/// the rejection threshold. Returns the chosen centers in original units.
pub fn subtractive_cluster(
    data: &[Vec<f64>],
    config: &SubtractiveConfig,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let d = data.first().map_or(0, Vec::len);
    check_points(data, d)?;
    if d == 0 {
        return Err(Error::Shape("points need at least one coordinate".into()));
    }
    let ranges = column_ranges(data, d);
    let norm: Vec<Vec<f64>> = data
        .iter()
        .map(|row| {
            (0..d)
                .map(|j| (row[j] - ranges[j].0) / span(ranges[j].0, ranges[j].1))
                .collect()
        })
        .collect();

    let n = norm.len();
    let alpha = 4.0 / (config.radius * config.radius);
    let r_b = config.quash_factor * config.radius;
    let beta = 4.0 / (r_b * r_b);
    let dist2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };

    let mut potential: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (-alpha * dist2(&norm[i], &norm[j])).exp())
                .sum()
        })
        .collect();

    let argmax = |p: &[f64]| -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, &v) in p.iter().enumerate() {
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        best
    };

    let first = argmax(&potential);
    let first_potential = potential[first];
    if first_potential <= 0.0 || first_potential.is_nan() {
        return Err(Error::Clustering("all potentials vanished".into()));
    }

    let mut centers: Vec<usize> = Vec::new();
    let mut candidate = first;
    loop {
        centers.push(candidate);
        if centers.len() == n {
            break;
        }
        let p_star = potential[candidate];
        for i in 0..n {
            potential[i] -= p_star * (-beta * dist2(&norm[i], &norm[candidate])).exp();
        }

        // Pick the next peak, arbitrating the gray zone between clear
        // acceptance and clear rejection by how far it sits from the
        // existing centers.
        let accepted = loop {
            let cand = argmax(&potential);
            let p = potential[cand];
            if p > config.accept_ratio * first_potential {
                break Some(cand);
            }
            if p < config.reject_ratio * first_potential {
                break None;
            }
            let d_min = centers
                .iter()
                .map(|&c| dist2(&norm[cand], &norm[c]).sqrt())
                .fold(f64::INFINITY, f64::min);
            if d_min / config.radius + p / first_potential >= 1.0 {
                break Some(cand);
            }
            potential[cand] = 0.0;
        };
        match accepted {
            Some(cand) => candidate = cand,
            None => break,
        }
    }

    Ok(centers.into_iter().map(|i| data[i].clone()).collect())
}

/// Searches for a cluster radius whose subtractive clustering yields
/// `target` centers, by bisection on the radius. The target is a hard cap:
/// if even the widest radius yields more centers, only the `target`
/// strongest ones (subtractive clustering emits centers in decreasing peak
/// order) are kept. Returns the centers and the radius that produced them.
pub fn cluster_with_rule_target(
    data: &[Vec<f64>],
    target: usize,
    config: &SubtractiveConfig,
) -> Result<(Vec<Vec<f64>>, f64)> {
    if target == 0 {
        return Err(Error::Clustering("target center count must be positive".into()));
    }
    let mut lo = 0.01;
    let mut hi = 1.0;
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    // After capping, the best candidate is the one closest to the target
    // from below; among equals, the one needing the least truncation.
    let better = |cand: &(Vec<Vec<f64>>, f64), cur: &Option<(Vec<Vec<f64>>, f64)>| -> bool {
        let Some(cur) = cur else { return true };
        let key = |c: &(Vec<Vec<f64>>, f64)| {
            let n = c.0.len();
            (target - n.min(target), n.saturating_sub(target))
        };
        key(cand) < key(cur)
    };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let centers = subtractive_cluster(data, &config.with_radius(mid))?;
        let count = centers.len();
        let cand = (centers, mid);
        if better(&cand, &best) {
            best = Some(cand);
        }
        if count == target {
            break;
        }
        if count > target {
            // Too many clusters: widen the radius.
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (mut centers, radius) =
        best.ok_or_else(|| Error::Clustering("no radius produced any centers".into()))?;
    centers.truncate(target);
    Ok((centers, radius))
}

/// Evenly spaced seed centers on a Cartesian grid over the given ranges:
/// `per_dim` points per dimension, capped at 4096 total.
pub fn grid_seed_centers(ranges: &[(f64, f64)], per_dim: usize) -> Result<Vec<Vec<f64>>> {
    if per_dim == 0 || ranges.is_empty() {
        return Err(Error::Config("grid seeding needs at least one point and one dimension".into()));
    }
    let total = per_dim
        .checked_pow(ranges.len() as u32)
        .filter(|&t| t <= 4096)
        .ok_or_else(|| {
            Error::Size(format!(
                "{per_dim}^{} grid centers exceed the 4096 cap",
                ranges.len()
            ))
        })?;
    let coord = |(lo, hi): (f64, f64), i: usize| -> f64 {
        if per_dim == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (per_dim - 1) as f64
        }
    };
    let mut centers = Vec::with_capacity(total);
    let mut idx = vec![0usize; ranges.len()];
    loop {
        centers.push(
            ranges
                .iter()
                .zip(&idx)
                .map(|(&r, &i)| coord(r, i))
                .collect::<Vec<f64>>(),
        );
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return Ok(centers);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Builds a Takagi–Sugeno model from cluster centers: one rule per center,
/// premise widths proportional to the cluster radius and each input's data
/// range, and consequents fitted by least squares.
pub fn build_tsk_model(
    centers: &[Vec<f64>],
    x: &[Vec<f64>],
    y: &[f64],
    input_names: &[String],
    radius: f64,
) -> Result<TskModel> {
    let d = input_names.len();
    if d == 0 {
        return Err(Error::Shape("a model needs at least one input".into()));
    }
    if centers.is_empty() {
        return Err(Error::Training("a model needs at least one rule center".into()));
    }
    check_points(centers, d)?;
    check_points(x, d)?;
    if y.len() != x.len() {
        return Err(Error::Shape(format!(
            "{} targets for {} samples",
            y.len(),
            x.len()
        )));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::Config(format!(
            "cluster radius must lie in (0, 1], got {radius}"
        )));
    }

    let ranges = column_ranges(x, d);
    let spans: Vec<f64> = ranges.iter().map(|&(lo, hi)| span(lo, hi)).collect();
    // A Gaussian with sigma = r * span / sqrt(8) reproduces the clustering
    // kernel exp(-4 |x - c|^2 / r^2) on range-scaled coordinates.
    let sigmas: Vec<f64> = spans.iter().map(|s| radius * s / 8f64.sqrt()).collect();
    let sigma_floor: Vec<f64> = spans.iter().map(|s| 1e-6 * s).collect();

    let rules = centers
        .iter()
        .map(|c| TskRule {
            premises: c
                .iter()
                .zip(&sigmas)
                .map(|(&center, &sigma)| GaussianMf { center, sigma })
                .collect(),
            coeffs: vec![0.0; d],
            bias: 0.0,
        })
        .collect();
    let mut model = TskModel {
        rules,
        input_names: input_names.to_vec(),
        sigma_floor,
        lsq_fallback: false,
    };
    refit_consequents(&mut model, x, y)?;
    Ok(model)
}

/// Refits every rule's linear consequent by least squares against the
/// current premises. A rank-deficient system falls back to the minimum-norm
/// solution and sets the model's `lsq_fallback` flag.
pub fn refit_consequents(model: &mut TskModel, x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    let d = model.n_inputs();
    check_points(x, d)?;
    if y.len() != x.len() {
        return Err(Error::Shape(format!(
            "{} targets for {} samples",
            y.len(),
            x.len()
        )));
    }
    let r = model.n_rules();
    let m = x.len();
    let ncols = r * (d + 1);
    let mut a = DMatrix::zeros(m, ncols);
    for (s, xs) in x.iter().enumerate() {
        let (g, _) = model.normalized_strengths(xs);
        for i in 0..r {
            for j in 0..d {
                a[(s, i * (d + 1) + j)] = g[i] * xs[j];
            }
            a[(s, i * (d + 1) + d)] = g[i];
        }
    }
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.iter().fold(0.0f64, |acc, v| acc.max(*v));
    let tol = (s_max * m.max(ncols) as f64 * f64::EPSILON).max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let theta = svd
        .solve(&b, tol)
        .map_err(|e| Error::Training(format!("least squares failed: {e}")))?;
    for (i, rule) in model.rules.iter_mut().enumerate() {
        for j in 0..d {
            rule.coeffs[j] = theta[i * (d + 1) + j];
        }
        rule.bias = theta[i * (d + 1) + d];
    }
    model.lsq_fallback = rank < ncols;
    Ok(())
}

/// Training loss: half the mean squared error of the model over the data.
pub fn loss(model: &TskModel, x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Shape(format!(
            "{} targets for {} samples",
            y.len(),
            x.len()
        )));
    }
    let mut acc = 0.0;
    for (xs, &ys) in x.iter().zip(y) {
        let f = model.infer(xs)?;
        acc += (f - ys) * (f - ys);
    }
    Ok(acc / (2.0 * x.len() as f64))
}

/// Center and width gradients, each indexed `[rule][input]`.
pub type PremiseGradients = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Analytic gradient of [`loss`] with respect to every premise center and
/// width, as `(d_loss/d_center, d_loss/d_sigma)` indexed `[rule][input]`.
/// Points where all firing strengths underflow contribute nothing.
pub fn premise_gradients(model: &TskModel, x: &[Vec<f64>], y: &[f64]) -> Result<PremiseGradients> {
    let d = model.n_inputs();
    check_points(x, d)?;
    if y.len() != x.len() {
        return Err(Error::Shape(format!(
            "{} targets for {} samples",
            y.len(),
            x.len()
        )));
    }
    let r = model.n_rules();
    let mut grad_c = vec![vec![0.0; d]; r];
    let mut grad_s = vec![vec![0.0; d]; r];
    let m = x.len() as f64;
    for (xs, &ys) in x.iter().zip(y) {
        let (g, degenerate) = model.normalized_strengths(xs);
        if degenerate {
            continue;
        }
        let values: Vec<f64> = model.rules.iter().map(|rule| rule.consequent(xs)).collect();
        let f: f64 = g.iter().zip(&values).map(|(gi, vi)| gi * vi).sum();
        let err = (f - ys) / m;
        for i in 0..r {
            let common = err * (values[i] - f) * g[i];
            if common == 0.0 {
                continue;
            }
            for j in 0..d {
                let mf = &model.rules[i].premises[j];
                let diff = xs[j] - mf.center;
                let s2 = mf.sigma * mf.sigma;
                grad_c[i][j] += common * diff / s2;
                grad_s[i][j] += common * diff * diff / (s2 * mf.sigma);
            }
        }
    }
    Ok((grad_c, grad_s))
}

/// Outcome of hybrid training.
#[derive(Debug, Clone)]
pub struct TskTrainReport {
    /// The best model observed, by training RMSE.
    pub model: TskModel,
    /// RMSE before training, then after each epoch.
    pub rmse_history: Vec<f64>,
    /// Number of width updates that were clamped to the floor.
    pub width_clamps: usize,
}

/// Hybrid training: each epoch refits the consequents by least squares, then
/// takes one gradient step on the premise centers and widths. The step is
/// halved whenever an epoch makes the error worse, widths never fall below
/// the model's floor, and the best model seen is returned.
pub fn train_tsk(
    model: &TskModel,
    x: &[Vec<f64>],
    y: &[f64],
    epochs: usize,
    step: f64,
) -> Result<TskTrainReport> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let d = model.n_inputs();
    let mut current = model.clone();
    let mut step = step;
    let predictions = current.predict_batch(x)?;
    let initial = crate::data::rmse(&predictions, y)?;
    let mut history = vec![initial];
    let mut best = current.clone();
    let mut best_rmse = initial;
    let mut clamps = 0usize;

    for _ in 0..epochs {
        refit_consequents(&mut current, x, y)?;
        let (grad_c, grad_s) = premise_gradients(&current, x, y)?;
        let floors = current.sigma_floor.clone();
        for (i, rule) in current.rules.iter_mut().enumerate() {
            for j in 0..d {
                rule.premises[j].center -= step * grad_c[i][j];
                let next = rule.premises[j].sigma - step * grad_s[i][j];
                if next < floors[j] {
                    rule.premises[j].sigma = floors[j];
                    clamps += 1;
                } else {
                    rule.premises[j].sigma = next;
                }
            }
        }
        let e = crate::data::rmse(&current.predict_batch(x)?, y)?;
        if e < best_rmse {
            best_rmse = e;
            best = current.clone();
        }
        if e > *history.last().expect("non-empty") {
            step *= 0.5;
        }
        history.push(e);
    }
    if clamps > 0 {
        log::warn!("{clamps} premise width updates clamped to the floor during training");
    }
    Ok(TskTrainReport {
        model: best,
        rmse_history: history,
        width_clamps: clamps,
    })
}
