//! Rough-set machinery over symbolic decision tables: indiscernibility
//! partitions, lower/upper approximations, discernibility matrices, reducts,
//! dependency factors, rule induction, and rule-based classification.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::data::DecisionTable;
use crate::error::{Error, Result};

/// A decision table whose values are plain symbols, the form rough-set
/// operations work on. Values are interned: `rows[i][j]` indexes into
/// `alphabets[j]`, and `decisions[i]` indexes into the decision alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicTable {
    object_ids: Vec<String>,
    condition_names: Vec<String>,
    decision_name: String,
    alphabets: Vec<Vec<String>>,
    decision_alphabet: Vec<String>,
    rows: Vec<Vec<u32>>,
    decisions: Vec<u32>,
}

fn intern_column(values: &[String]) -> (Vec<String>, Vec<u32>) {
    let mut alphabet: Vec<String> = values.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    // BTreeSet already sorts lexically; numeric-looking alphabets sort by
    // value instead so ordered levels keep their order.
    if alphabet.iter().all(|v| v.parse::<f64>().is_ok()) {
        alphabet.sort_by(|a, b| {
            a.parse::<f64>()
                .unwrap()
                .total_cmp(&b.parse::<f64>().unwrap())
        });
    }
    let index: HashMap<&str, u32> = alphabet
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i as u32))
        .collect();
    let ids = values.iter().map(|v| index[v.as_str()]).collect();
    (alphabet, ids)
}

impl SymbolicTable {
    /// Converts any decision table by rendering every cell as a string.
    pub fn from_decision_table(table: &DecisionTable) -> Result<Self> {
        if table.n_objects() == 0 {
            return Err(Error::Size("a symbolic table needs at least one object".into()));
        }
        let dec_idx = table.decision_index();
        let cond_idx = table.condition_indices();
        let condition_names: Vec<String> = cond_idx
            .iter()
            .map(|&j| table.attributes()[j].name.clone())
            .collect();
        let mut alphabets = Vec::with_capacity(cond_idx.len());
        let mut columns = Vec::with_capacity(cond_idx.len());
        for &j in &cond_idx {
            let strings: Vec<String> = table
                .rows()
                .iter()
                .map(|row| row[j].to_string())
                .collect();
            let (alphabet, ids) = intern_column(&strings);
            alphabets.push(alphabet);
            columns.push(ids);
        }
        let dec_strings: Vec<String> = table
            .rows()
            .iter()
            .map(|row| row[dec_idx].to_string())
            .collect();
        let (decision_alphabet, decisions) = intern_column(&dec_strings);
        let rows: Vec<Vec<u32>> = (0..table.n_objects())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Ok(Self {
            object_ids: table.object_ids().to_vec(),
            condition_names,
            decision_name: table.attributes()[dec_idx].name.clone(),
            alphabets,
            decision_alphabet,
            rows,
            decisions,
        })
    }

    /// Builds a table from per-attribute discretization levels (1-based).
    /// `condition_columns[j]` holds the level of attribute `j` for every
    /// object, and `decision_column` the decision levels.
    pub fn from_levels(
        object_ids: Vec<String>,
        condition_names: Vec<String>,
        condition_columns: &[Vec<u32>],
        decision_name: String,
        decision_column: &[u32],
    ) -> Result<Self> {
        let n = object_ids.len();
        if n == 0 {
            return Err(Error::Size("a symbolic table needs at least one object".into()));
        }
        if condition_names.is_empty() {
            return Err(Error::Shape("at least one condition attribute is required".into()));
        }
        if condition_columns.len() != condition_names.len() {
            return Err(Error::Shape(format!(
                "{} level columns for {} condition attributes",
                condition_columns.len(),
                condition_names.len()
            )));
        }
        for (name, col) in condition_names.iter().zip(condition_columns) {
            if col.len() != n {
                return Err(Error::Shape(format!(
                    "attribute {name} has {} levels for {n} objects",
                    col.len()
                )));
            }
        }
        if decision_column.len() != n {
            return Err(Error::Shape(format!(
                "{} decision levels for {n} objects",
                decision_column.len()
            )));
        }
        let mut alphabets = Vec::with_capacity(condition_columns.len());
        let mut columns = Vec::with_capacity(condition_columns.len());
        for col in condition_columns {
            let strings: Vec<String> = col.iter().map(|v| v.to_string()).collect();
            let (alphabet, ids) = intern_column(&strings);
            alphabets.push(alphabet);
            columns.push(ids);
        }
        let dec_strings: Vec<String> = decision_column.iter().map(|v| v.to_string()).collect();
        let (decision_alphabet, decisions) = intern_column(&dec_strings);
        let rows: Vec<Vec<u32>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Ok(Self {
            object_ids,
            condition_names,
            decision_name,
            alphabets,
            decision_alphabet,
            rows,
            decisions,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.rows.len()
    }

    pub fn n_conditions(&self) -> usize {
        self.condition_names.len()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn condition_names(&self) -> &[String] {
        &self.condition_names
    }

    pub fn decision_name(&self) -> &str {
        &self.decision_name
    }

    pub fn alphabet(&self, attribute: usize) -> &[String] {
        &self.alphabets[attribute]
    }

    pub fn decision_alphabet(&self) -> &[String] {
        &self.decision_alphabet
    }

    /// Value symbol of `object` on condition `attribute`.
    pub fn value(&self, object: usize, attribute: usize) -> &str {
        &self.alphabets[attribute][self.rows[object][attribute] as usize]
    }

    pub fn decision_value(&self, object: usize) -> &str {
        &self.decision_alphabet[self.decisions[object] as usize]
    }

    pub fn condition_index(&self, name: &str) -> Result<usize> {
        self.condition_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Attribute(name.to_string()))
    }

    fn check_attrs(&self, attrs: &[usize]) -> Result<()> {
        for &a in attrs {
            if a >= self.n_conditions() {
                return Err(Error::Attribute(format!(
                    "condition index {a} out of range for {} attributes",
                    self.n_conditions()
                )));
            }
        }
        Ok(())
    }

    /// Equivalence classes of the indiscernibility relation over `attrs`:
    /// two objects fall in one class exactly when they agree on every listed
    /// attribute. Classes appear in order of their first member; members are
    /// in ascending object order. An empty attribute set lumps all objects
    /// into one class.
    pub fn indiscernibility_classes(&self, attrs: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.check_attrs(attrs)?;
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        for i in 0..self.n_objects() {
            let key: Vec<u32> = attrs.iter().map(|&a| self.rows[i][a]).collect();
            match seen.get(&key) {
                Some(&c) => classes[c].push(i),
                None => {
                    seen.insert(key, classes.len());
                    classes.push(vec![i]);
                }
            }
        }
        Ok(classes)
    }

    /// Objects whose whole indiscernibility class lies inside `target`.
    pub fn lower_approximation(
        &self,
        attrs: &[usize],
        target: &BTreeSet<usize>,
    ) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for class in self.indiscernibility_classes(attrs)? {
            if class.iter().all(|i| target.contains(i)) {
                out.extend(class);
            }
        }
        Ok(out)
    }

    /// Objects whose indiscernibility class touches `target`.
    pub fn upper_approximation(
        &self,
        attrs: &[usize],
        target: &BTreeSet<usize>,
    ) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for class in self.indiscernibility_classes(attrs)? {
            if class.iter().any(|i| target.contains(i)) {
                out.extend(class);
            }
        }
        Ok(out)
    }

    /// Objects sharing object `i`'s decision value.
    pub fn decision_class_of(&self, object: usize) -> BTreeSet<usize> {
        let d = self.decisions[object];
        (0..self.n_objects())
            .filter(|&i| self.decisions[i] == d)
            .collect()
    }
}

/// Pairwise attribute-difference sets, stored as bitmasks over the condition
/// attributes for every unordered object pair.
#[derive(Debug, Clone)]
pub struct DiscernibilityMatrix {
    n_objects: usize,
    n_attrs: usize,
    /// Lower triangle, row-major: entry for pair `(i, j)` with `i > j` lives
    /// at `i (i - 1) / 2 + j`.
    entries: Vec<u64>,
}

impl DiscernibilityMatrix {
    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    /// Bitmask of attributes on which objects `i` and `j` differ.
    pub fn entry(&self, i: usize, j: usize) -> Result<u64> {
        if i == j || i >= self.n_objects || j >= self.n_objects {
            return Err(Error::Size(format!(
                "invalid object pair ({i}, {j}) for {} objects",
                self.n_objects
            )));
        }
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        Ok(self.entries[hi * (hi - 1) / 2 + lo])
    }

    /// Attribute indices on which objects `i` and `j` differ.
    pub fn attrs_differing(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        let mask = self.entry(i, j)?;
        Ok((0..self.n_attrs).filter(|a| mask & (1 << a) != 0).collect())
    }
}

/// Builds the discernibility matrix of a table: for every pair of objects,
/// the set of condition attributes that tell them apart.
pub fn discernibility_matrix(table: &SymbolicTable) -> Result<DiscernibilityMatrix> {
    let n_attrs = table.n_conditions();
    if n_attrs > 64 {
        return Err(Error::Size(format!(
            "discernibility bitmasks support at most 64 condition attributes, got {n_attrs}"
        )));
    }
    let n = table.n_objects();
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..n {
        for j in 0..i {
            let mut mask = 0u64;
            for a in 0..n_attrs {
                if table.rows[i][a] != table.rows[j][a] {
                    mask |= 1 << a;
                }
            }
            entries.push(mask);
        }
    }
    Ok(DiscernibilityMatrix {
        n_objects: n,
        n_attrs,
        entries,
    })
}

/// All minimal attribute subsets preserving the full discernibility
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductSet {
    /// Reducts sorted by size, then by lowest attribute indices.
    pub sets: Vec<BTreeSet<usize>>,
    /// False when the search fell back to a greedy single reduct.
    pub exact: bool,
    /// True when no pair of objects is discernible at all, making the empty
    /// set the unique reduct.
    pub degenerate: bool,
}

fn insert_minimal(masks: &mut Vec<u64>, cand: u64) {
    if masks.iter().any(|&m| m & !cand == 0) {
        return; // a subset (or equal) is already present
    }
    masks.retain(|&m| cand & !m != 0);
    masks.push(cand);
}

/// Computes reducts from a discernibility matrix: every minimal attribute
/// set that intersects each non-empty difference set. Small instances are
/// solved exactly (all reducts); larger ones fall back to one greedy,
/// inclusion-minimal reduct with `exact = false`.
pub fn reducts(matrix: &DiscernibilityMatrix) -> ReductSet {
    let mut clauses: Vec<u64> = matrix
        .entries
        .iter()
        .copied()
        .filter(|&m| m != 0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // Absorption: a clause that contains another adds nothing.
    clauses = {
        let snapshot = clauses.clone();
        clauses
            .into_iter()
            .filter(|&c| !snapshot.iter().any(|&o| o != c && c & o == o))
            .collect()
    };
    if clauses.is_empty() {
        return ReductSet {
            sets: vec![BTreeSet::new()],
            exact: true,
            degenerate: true,
        };
    }

    let exact_feasible = matrix.n_attrs <= 20 || clauses.len() <= 32;
    let masks: Vec<u64> = if exact_feasible {
        let mut partial: Vec<u64> = vec![0];
        for &clause in &clauses {
            let mut next: Vec<u64> = Vec::with_capacity(partial.len());
            for &p in &partial {
                if p & clause != 0 {
                    insert_minimal(&mut next, p);
                } else {
                    for a in 0..matrix.n_attrs {
                        if clause & (1 << a) != 0 {
                            insert_minimal(&mut next, p | (1 << a));
                        }
                    }
                }
            }
            partial = next;
        }
        partial
    } else {
        // Greedy cover, then shrink to inclusion-minimality.
        let mut chosen = 0u64;
        let mut uncovered: Vec<u64> = clauses.clone();
        while !uncovered.is_empty() {
            let best = (0..matrix.n_attrs)
                .max_by_key(|a| {
                    (
                        uncovered.iter().filter(|&&c| c & (1 << a) != 0).count(),
                        usize::MAX - a, // ties to the lowest index
                    )
                })
                .expect("at least one attribute");
            chosen |= 1 << best;
            uncovered.retain(|&c| c & chosen == 0);
        }
        for a in 0..matrix.n_attrs {
            let bit = 1 << a;
            if chosen & bit != 0 {
                let without = chosen & !bit;
                if clauses.iter().all(|&c| c & without != 0) {
                    chosen = without;
                }
            }
        }
        vec![chosen]
    };

    let mut sets: Vec<(u32, u64)> = masks.iter().map(|&m| (m.count_ones(), m)).collect();
    sets.sort();
    ReductSet {
        sets: sets
            .into_iter()
            .map(|(_, m)| (0..matrix.n_attrs).filter(|a| m & (1 << a) != 0).collect())
            .collect(),
        exact: exact_feasible,
        degenerate: false,
    }
}

/// One condition of a rule: the attribute's value must fall in `values`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub attribute: String,
    pub values: BTreeSet<String>,
}

/// An induced decision rule. Multiple decision values mean the matched
/// region is inconsistent and the rule asserts their disjunction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughRule {
    pub conditions: Vec<Descriptor>,
    pub decisions: BTreeSet<String>,
    pub dependency_factor: f64,
    /// Number of training objects matching the conditions.
    pub support: usize,
}

impl RoughRule {
    pub fn is_exact(&self) -> bool {
        self.decisions.len() == 1
    }

    /// True when every condition is satisfied by the object's values.
    pub fn matches(&self, object: &BTreeMap<String, String>) -> bool {
        self.conditions.iter().all(|d| {
            object
                .get(&d.attribute)
                .is_some_and(|v| d.values.contains(v))
        })
    }

    /// Renders the rule against a decision attribute name, e.g.
    /// `(l in {2, 3}) & (rqd = 2) => (Dec = 1);`.
    pub fn display(&self, decision_name: &str) -> String {
        let conds: Vec<String> = self
            .conditions
            .iter()
            .map(|d| {
                let vals = sort_values(&d.values);
                if vals.len() == 1 {
                    format!("({} = {})", d.attribute, vals[0])
                } else {
                    format!("({} in {{{}}})", d.attribute, vals.join(", "))
                }
            })
            .collect();
        let decs: Vec<String> = sort_values(&self.decisions)
            .into_iter()
            .map(|v| format!("({decision_name} = {v})"))
            .collect();
        format!("{} => {};", conds.join(" & "), decs.join(" OR "))
    }
}

/// Sorts symbols numerically when they all parse as numbers, lexically
/// otherwise.
fn sort_values(values: &BTreeSet<String>) -> Vec<String> {
    let mut out: Vec<String> = values.iter().cloned().collect();
    if out.iter().all(|v| v.parse::<f64>().is_ok()) {
        out.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    out
}

/// The decision a rule asserts when forced to a single value: the smallest,
/// comparing numerically when possible.
pub fn min_decision(decisions: &BTreeSet<String>) -> Option<&String> {
    if decisions.iter().all(|v| v.parse::<f64>().is_ok()) {
        decisions
            .iter()
            .min_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()))
    } else {
        decisions.iter().next()
    }
}

/// How to induce rules from a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleStrategy {
    /// One shortest rule per indiscernibility class, by greedily dropping
    /// conditions and then merging rules that differ in a single value set.
    Minimal,
    /// Every prime exact rule: each minimal condition subset whose
    /// descriptor pins down a single decision.
    Exhaustive,
    /// The minimal rules whose dependency factor reaches the strength
    /// threshold.
    Strong,
}

impl RuleStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleStrategy::Minimal => "minimal",
            RuleStrategy::Exhaustive => "exhaustive",
            RuleStrategy::Strong => "strong",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(RuleStrategy::Minimal),
            "exhaustive" => Ok(RuleStrategy::Exhaustive),
            "strong" => Ok(RuleStrategy::Strong),
            other => Err(Error::Parse(format!("unknown rule strategy: {other}"))),
        }
    }
}

/// The universe a dependency factor is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DfUniverse {
    /// Positive region size over the whole table.
    #[default]
    Whole,
    /// Positive region restricted to the objects the rule matches.
    RuleCovered,
}

impl DfUniverse {
    pub fn as_str(self) -> &'static str {
        match self {
            DfUniverse::Whole => "whole",
            DfUniverse::RuleCovered => "covered",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(DfUniverse::Whole),
            "covered" => Ok(DfUniverse::RuleCovered),
            other => Err(Error::Parse(format!("unknown universe: {other}"))),
        }
    }
}

/// Induction settings; see [`induce_rules`].
#[derive(Debug, Clone)]
pub struct InductionOptions {
    pub strategy: RuleStrategy,
    /// Drop rules whose decision is a disjunction.
    pub exact_only: bool,
    /// Minimum dependency factor for [`RuleStrategy::Strong`].
    pub strength_threshold: f64,
    pub df_universe: DfUniverse,
    /// Code reported for objects no rule recognizes.
    pub fallback_code: f64,
}

impl Default for InductionOptions {
    fn default() -> Self {
        Self {
            strategy: RuleStrategy::Minimal,
            exact_only: false,
            strength_threshold: 0.0,
            df_universe: DfUniverse::Whole,
            fallback_code: 4.0,
        }
    }
}

/// A rule base plus the metadata needed to classify with it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughRuleSet {
    pub rules: Vec<RoughRule>,
    pub decision_name: String,
    pub strategy: RuleStrategy,
    pub df_universe: DfUniverse,
    /// Code reported for objects no rule recognizes.
    pub fallback_code: f64,
}

/// Dependency factor of a rule against a table: the fraction of the chosen
/// universe that provably belongs to the rule's decision classes, judging by
/// the rule's condition attributes alone.
pub fn dependency_factor(
    table: &SymbolicTable,
    rule: &RoughRule,
    universe: DfUniverse,
) -> Result<f64> {
    let attrs: Vec<usize> = rule
        .conditions
        .iter()
        .map(|d| table.condition_index(&d.attribute))
        .collect::<Result<_>>()?;
    let target: BTreeSet<usize> = (0..table.n_objects())
        .filter(|&i| rule.decisions.contains(table.decision_value(i)))
        .collect();
    let positive = table.lower_approximation(&attrs, &target)?;
    match universe {
        DfUniverse::Whole => Ok(positive.len() as f64 / table.n_objects() as f64),
        DfUniverse::RuleCovered => {
            let matched: Vec<usize> = matched_objects(table, rule)?;
            if matched.is_empty() {
                return Ok(0.0);
            }
            let hits = matched.iter().filter(|i| positive.contains(i)).count();
            Ok(hits as f64 / matched.len() as f64)
        }
    }
}

fn matched_objects(table: &SymbolicTable, rule: &RoughRule) -> Result<Vec<usize>> {
    let mut descs = Vec::with_capacity(rule.conditions.len());
    for d in &rule.conditions {
        let a = table.condition_index(&d.attribute)?;
        let ids: BTreeSet<u32> = d
            .values
            .iter()
            .filter_map(|v| {
                table.alphabets[a]
                    .iter()
                    .position(|s| s == v)
                    .map(|i| i as u32)
            })
            .collect();
        descs.push((a, ids));
    }
    Ok((0..table.n_objects())
        .filter(|&i| descs.iter().all(|(a, ids)| ids.contains(&table.rows[i][*a])))
        .collect())
}

// Internal rule representation during induction: sorted condition attribute
// indices with value-id sets, plus decision-id set.
type IRule = (Vec<(usize, BTreeSet<u32>)>, BTreeSet<u32>);

fn imatched(table: &SymbolicTable, conds: &[(usize, BTreeSet<u32>)]) -> Vec<usize> {
    (0..table.n_objects())
        .filter(|&i| conds.iter().all(|(a, ids)| ids.contains(&table.rows[i][*a])))
        .collect()
}

fn idecisions(table: &SymbolicTable, objects: &[usize]) -> BTreeSet<u32> {
    objects.iter().map(|&i| table.decisions[i]).collect()
}

/// Greedily shortens a full descriptor: attributes are dropped in table
/// order whenever the widened match still decides inside `allowed`. At least
/// one condition always remains.
fn shorten(
    table: &SymbolicTable,
    full: &[(usize, BTreeSet<u32>)],
    allowed: &BTreeSet<u32>,
) -> Vec<(usize, BTreeSet<u32>)> {
    let mut active = full.to_vec();
    for attr in 0..table.n_conditions() {
        if active.len() == 1 {
            break;
        }
        let trial: Vec<_> = active.iter().filter(|(a, _)| *a != attr).cloned().collect();
        if trial.len() == active.len() {
            continue;
        }
        let decided = idecisions(table, &imatched(table, &trial));
        if decided.is_subset(allowed) {
            active = trial;
        }
    }
    active
}

fn minimal_rules(table: &SymbolicTable, exact_only: bool) -> Result<Vec<IRule>> {
    let all_attrs: Vec<usize> = (0..table.n_conditions()).collect();
    let classes = table.indiscernibility_classes(&all_attrs)?;
    let mut rules: Vec<IRule> = Vec::new();
    for class in classes {
        let rep = class[0];
        let allowed = idecisions(table, &class);
        if exact_only && allowed.len() > 1 {
            continue;
        }
        let full: Vec<(usize, BTreeSet<u32>)> = all_attrs
            .iter()
            .map(|&a| (a, BTreeSet::from([table.rows[rep][a]])))
            .collect();
        let conds = shorten(table, &full, &allowed);
        let rule = (conds, allowed);
        if !rules.contains(&rule) {
            rules.push(rule);
        }
    }

    // Merge rules that share decisions and attributes and differ in exactly
    // one attribute's value set; the merged match is the union of the two,
    // so the decision bound still holds.
    'merge: loop {
        for i in 0..rules.len() {
            for j in i + 1..rules.len() {
                if rules[i].1 != rules[j].1 {
                    continue;
                }
                let (ci, cj) = (&rules[i].0, &rules[j].0);
                if ci.len() != cj.len() {
                    continue;
                }
                if ci.iter().zip(cj).any(|((a, _), (b, _))| a != b) {
                    continue;
                }
                let diffs: Vec<usize> = (0..ci.len()).filter(|&k| ci[k].1 != cj[k].1).collect();
                if diffs.len() != 1 {
                    continue;
                }
                let k = diffs[0];
                let extra: BTreeSet<u32> = rules[j].0[k].1.clone();
                rules[i].0[k].1.extend(extra);
                rules.remove(j);
                continue 'merge;
            }
        }
        break;
    }
    Ok(rules)
}

fn exhaustive_rules(table: &SymbolicTable, exact_only: bool) -> Result<Vec<IRule>> {
    let n_attrs = table.n_conditions();
    if n_attrs > 16 {
        return Err(Error::Size(format!(
            "exhaustive induction supports at most 16 condition attributes, got {n_attrs}"
        )));
    }
    let all_attrs: Vec<usize> = (0..n_attrs).collect();
    let mut rules: Vec<IRule> = Vec::new();
    let mut seen: BTreeSet<Vec<(usize, u32)>> = BTreeSet::new();

    // Consistency of a descriptor is monotone in the attribute set, so a
    // rule on B is prime exactly when no (|B|-1)-subset is consistent.
    let mut subsets: Vec<u32> = (1..(1u32 << n_attrs)).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for mask in subsets {
        let attrs: Vec<usize> = (0..n_attrs).filter(|a| mask & (1 << a) != 0).collect();
        for class in table.indiscernibility_classes(&attrs)? {
            let decided = idecisions(table, &class);
            if decided.len() != 1 {
                continue;
            }
            let rep = class[0];
            let key: Vec<(usize, u32)> =
                attrs.iter().map(|&a| (a, table.rows[rep][a])).collect();
            if seen.contains(&key) {
                continue;
            }
            let prime = attrs.len() == 1
                || attrs.iter().all(|&drop| {
                    let sub: Vec<usize> =
                        attrs.iter().copied().filter(|&a| a != drop).collect();
                    let conds: Vec<(usize, BTreeSet<u32>)> = sub
                        .iter()
                        .map(|&a| (a, BTreeSet::from([table.rows[rep][a]])))
                        .collect();
                    idecisions(table, &imatched(table, &conds)).len() > 1
                });
            if !prime {
                continue;
            }
            seen.insert(key);
            let conds: Vec<(usize, BTreeSet<u32>)> = attrs
                .iter()
                .map(|&a| (a, BTreeSet::from([table.rows[rep][a]])))
                .collect();
            rules.push((conds, decided));
        }
    }

    if !exact_only {
        // Inconsistent regions still deserve a (shortened) disjunctive rule.
        for class in table.indiscernibility_classes(&all_attrs)? {
            let allowed = idecisions(table, &class);
            if allowed.len() < 2 {
                continue;
            }
            let rep = class[0];
            let full: Vec<(usize, BTreeSet<u32>)> = all_attrs
                .iter()
                .map(|&a| (a, BTreeSet::from([table.rows[rep][a]])))
                .collect();
            let rule = (shorten(table, &full, &allowed), allowed);
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
    }
    Ok(rules)
}

/// Induces decision rules from a symbolic table under the chosen strategy,
/// scoring each rule with its dependency factor and support.
pub fn induce_rules(table: &SymbolicTable, options: &InductionOptions) -> Result<RoughRuleSet> {
    if !(0.0..=1.0).contains(&options.strength_threshold) {
        return Err(Error::Config(format!(
            "strength threshold must lie in [0, 1], got {}",
            options.strength_threshold
        )));
    }
    let internal = match options.strategy {
        RuleStrategy::Minimal | RuleStrategy::Strong => {
            minimal_rules(table, options.exact_only)?
        }
        RuleStrategy::Exhaustive => exhaustive_rules(table, options.exact_only)?,
    };

    let mut rules = Vec::with_capacity(internal.len());
    for (conds, decs) in internal {
        let conditions: Vec<Descriptor> = conds
            .iter()
            .map(|(a, ids)| Descriptor {
                attribute: table.condition_names[*a].clone(),
                values: ids
                    .iter()
                    .map(|&v| table.alphabets[*a][v as usize].clone())
                    .collect(),
            })
            .collect();
        let decisions: BTreeSet<String> = decs
            .iter()
            .map(|&d| table.decision_alphabet[d as usize].clone())
            .collect();
        let support = imatched(table, &conds).len();
        let mut rule = RoughRule {
            conditions,
            decisions,
            dependency_factor: 0.0,
            support,
        };
        rule.dependency_factor = dependency_factor(table, &rule, options.df_universe)?;
        rules.push(rule);
    }
    let mut set = RoughRuleSet {
        rules,
        decision_name: table.decision_name.clone(),
        strategy: options.strategy,
        df_universe: options.df_universe,
        fallback_code: options.fallback_code,
    };
    if options.strategy == RuleStrategy::Strong {
        set = strength_filter(&set, options.strength_threshold);
    }
    Ok(set)
}

/// Keeps only the rules whose dependency factor reaches `threshold`,
/// preserving order.
pub fn strength_filter(set: &RoughRuleSet, threshold: f64) -> RoughRuleSet {
    RoughRuleSet {
        rules: set
            .rules
            .iter()
            .filter(|r| r.dependency_factor >= threshold)
            .cloned()
            .collect(),
        ..set.clone()
    }
}

/// Classifies one object (attribute name -> value). Among matching rules the
/// strongest wins: highest dependency factor, then fewest conditions, then
/// lexicographically smallest attribute list, then induction order. A
/// disjunctive winner answers its smallest decision. `None` means no rule
/// recognized the object.
pub fn classify(set: &RoughRuleSet, object: &BTreeMap<String, String>) -> Option<String> {
    let mut best: Option<(usize, &RoughRule)> = None;
    for (idx, rule) in set.rules.iter().enumerate() {
        if !rule.matches(object) {
            continue;
        }
        let better = match best {
            None => true,
            Some((best_idx, b)) => {
                let key = |r: &RoughRule, i: usize| {
                    let mut names: Vec<&str> =
                        r.conditions.iter().map(|d| d.attribute.as_str()).collect();
                    names.sort_unstable();
                    (
                        std::cmp::Reverse(ordered(r.dependency_factor)),
                        r.conditions.len(),
                        names.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                        i,
                    )
                };
                key(rule, idx) < key(b, best_idx)
            }
        };
        if better {
            best = Some((idx, rule));
        }
    }
    best.and_then(|(_, r)| min_decision(&r.decisions).cloned())
}

fn ordered(v: f64) -> ordered_key::OrderedF64 {
    ordered_key::OrderedF64(v)
}

mod ordered_key {
    /// Total order on f64 for tie-breaking keys.
    #[derive(Debug, PartialEq)]
    pub struct OrderedF64(pub f64);

    impl Eq for OrderedF64 {}

    impl PartialOrd for OrderedF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    impl Ord for OrderedF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}

const FORBIDDEN: [char; 4] = ['\t', '&', '|', '='];

fn check_symbol(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| FORBIDDEN.contains(&c)) {
        return Err(Error::Encoding(format!(
            "{what} {s:?} cannot appear in a rule export (empty or contains one of \\t & | =)"
        )));
    }
    Ok(())
}

impl RoughRuleSet {
    /// Human-readable rule lines in induction order.
    pub fn display_lines(&self) -> Vec<String> {
        self.rules
            .iter()
            .map(|r| r.display(&self.decision_name))
            .collect()
    }

    /// Serializes the rule base as tab-separated text with a header carrying
    /// the classification metadata. Numbers round-trip exactly.
    pub fn to_text(&self) -> Result<String> {
        check_symbol(&self.decision_name, "decision name")?;
        if self.decision_name.chars().any(char::is_whitespace) {
            return Err(Error::Encoding(format!(
                "decision name {:?} cannot contain whitespace",
                self.decision_name
            )));
        }
        let mut out = format!(
            "roughrules {} {} {} {}\n",
            self.strategy.as_str(),
            self.fallback_code,
            self.decision_name,
            self.df_universe.as_str()
        );
        for rule in &self.rules {
            let conds: Vec<String> = rule
                .conditions
                .iter()
                .map(|d| {
                    check_symbol(&d.attribute, "attribute name")?;
                    let vals: Vec<&str> = d.values.iter().map(String::as_str).collect();
                    for v in &vals {
                        check_symbol(v, "value")?;
                    }
                    Ok(format!("{}={}", d.attribute, vals.join("|")))
                })
                .collect::<Result<_>>()?;
            let decs: Vec<&str> = rule.decisions.iter().map(String::as_str).collect();
            for v in &decs {
                check_symbol(v, "decision value")?;
            }
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                conds.join("&"),
                decs.join("|"),
                rule.dependency_factor,
                rule.support
            ));
        }
        Ok(out)
    }

    /// Parses the format produced by [`RoughRuleSet::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty rule export".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 5 || parts[0] != "roughrules" {
            return Err(Error::Parse(format!("bad rule header: {header:?}")));
        }
        let strategy = RuleStrategy::parse(parts[1])?;
        let fallback_code: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad fallback code: {:?}", parts[2])))?;
        let decision_name = parts[3].to_string();
        let df_universe = DfUniverse::parse(parts[4])?;

        let mut rules = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "rule line has {} fields, expected 4: {line:?}",
                    fields.len()
                )));
            }
            let mut conditions = Vec::new();
            for desc in fields[0].split('&') {
                let Some((attr, vals)) = desc.split_once('=') else {
                    return Err(Error::Parse(format!("bad descriptor: {desc:?}")));
                };
                if attr.is_empty() || vals.is_empty() {
                    return Err(Error::Parse(format!("bad descriptor: {desc:?}")));
                }
                conditions.push(Descriptor {
                    attribute: attr.to_string(),
                    values: vals.split('|').map(str::to_string).collect(),
                });
            }
            if conditions.is_empty() {
                return Err(Error::Parse("a rule needs at least one condition".into()));
            }
            let decisions: BTreeSet<String> =
                fields[1].split('|').map(str::to_string).collect();
            if decisions.iter().any(String::is_empty) {
                return Err(Error::Parse(format!("bad decision field: {:?}", fields[1])));
            }
            let dependency_factor: f64 = fields[2]
                .parse()
                .map_err(|_| Error::Parse(format!("bad dependency factor: {:?}", fields[2])))?;
            let support: usize = fields[3]
                .parse()
                .map_err(|_| Error::Parse(format!("bad support: {:?}", fields[3])))?;
            rules.push(RoughRule {
                conditions,
                decisions,
                dependency_factor,
                support,
            });
        }
        Ok(RoughRuleSet {
            rules,
            decision_name,
            strategy,
            df_universe,
            fallback_code,
        })
    }
}
