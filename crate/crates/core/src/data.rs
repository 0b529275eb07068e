//! Decision tables: typed tabular data with condition and decision attributes,
//! plus loading, train/test splitting, label encoding, and error measures.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Role an attribute plays in a decision table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeRole {
    Condition,
    Decision,
}

/// Value domain of an attribute column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Symbolic,
}

/// A named column with a role and a value kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub role: AttributeRole,
    pub kind: AttributeKind,
}

/// A single table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Sym(String),
}

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Sym(_) => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Cell::Sym(s) => Some(s),
            Cell::Num(_) => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// A finite table of objects described by condition attributes and exactly one
/// decision attribute. Every cell is present (no missing values) and object
/// identifiers are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    object_ids: Vec<String>,
    attributes: Vec<Attribute>,
    /// Row-major: `values[i][j]` is the value of attribute `j` on object `i`.
    values: Vec<Vec<Cell>>,
}

impl DecisionTable {
    /// Builds a table after checking structural invariants: exactly one
    /// decision attribute, at least one condition attribute, unique object
    /// ids, rectangular rows matching the attribute count.
    pub fn new(
        object_ids: Vec<String>,
        attributes: Vec<Attribute>,
        values: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        let n_dec = attributes
            .iter()
            .filter(|a| a.role == AttributeRole::Decision)
            .count();
        if n_dec != 1 {
            return Err(Error::Shape(format!(
                "a decision table needs exactly one decision attribute, found {n_dec}"
            )));
        }
        if attributes.len() < 2 {
            return Err(Error::Shape(
                "a decision table needs at least one condition attribute".into(),
            ));
        }
        if object_ids.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} object ids for {} rows",
                object_ids.len(),
                values.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &object_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Shape(format!("duplicate object id: {id}")));
            }
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::Shape(format!(
                    "row {} has {} cells for {} attributes",
                    i + 1,
                    row.len(),
                    attributes.len()
                )));
            }
            for (cell, attr) in row.iter().zip(&attributes) {
                let ok = match attr.kind {
                    AttributeKind::Numeric => matches!(cell, Cell::Num(_)),
                    AttributeKind::Symbolic => matches!(cell, Cell::Sym(_)),
                };
                if !ok {
                    return Err(Error::Shape(format!(
                        "row {} column {} does not match the declared kind of attribute {}",
                        i + 1,
                        attr.name,
                        attr.name
                    )));
                }
            }
        }
        Ok(Self {
            object_ids,
            attributes,
            values,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.values.len()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.values
    }

    pub fn cell(&self, object: usize, attribute: usize) -> &Cell {
        &self.values[object][attribute]
    }

    /// Index of the (unique) decision attribute.
    pub fn decision_index(&self) -> usize {
        self.attributes
            .iter()
            .position(|a| a.role == AttributeRole::Decision)
            .expect("validated at construction")
    }

    /// Indices of all condition attributes, in table order.
    pub fn condition_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == AttributeRole::Condition)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Attribute(name.to_string()))
    }

    /// All values of one numeric attribute, in object order.
    pub fn numeric_column(&self, attribute: usize) -> Result<Vec<f64>> {
        let attr = &self.attributes[attribute];
        if attr.kind != AttributeKind::Numeric {
            return Err(Error::Shape(format!(
                "attribute {} is not numeric",
                attr.name
            )));
        }
        Ok(self
            .values
            .iter()
            .map(|row| row[attribute].as_num().expect("kind checked"))
            .collect())
    }

    /// Sub-table containing the given objects (by index), preserving order.
    pub fn select_objects(&self, indices: &[usize]) -> Result<Self> {
        let mut ids = Vec::with_capacity(indices.len());
        let mut rows = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_objects() {
                return Err(Error::Size(format!(
                    "object index {i} out of range for {} objects",
                    self.n_objects()
                )));
            }
            ids.push(self.object_ids[i].clone());
            rows.push(self.values[i].clone());
        }
        Self::new(ids, self.attributes.clone(), rows)
    }
}

/// Outcome of a random train/test partition.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: DecisionTable,
    pub test: DecisionTable,
    /// Objects drawn into neither part (when `n_train + n_test < n_objects`).
    pub discarded: usize,
}

/// Randomly partitions a table into disjoint train and test parts of the
/// requested sizes. The same seed always yields the same partition. Objects
/// beyond `n_train + n_test` are left out and counted in `discarded`.
pub fn split_train_test(
    table: &DecisionTable,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<TrainTestSplit> {
    let n = table.n_objects();
    if n_train == 0 || n_test == 0 {
        return Err(Error::Size(
            "both train and test parts must be non-empty".into(),
        ));
    }
    if n_train + n_test > n {
        return Err(Error::Size(format!(
            "cannot draw {n_train} + {n_test} objects from a table of {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let train = table.select_objects(&order[..n_train])?;
    let test = table.select_objects(&order[n_train..n_train + n_test])?;
    Ok(TrainTestSplit {
        train,
        test,
        discarded: n - n_train - n_test,
    })
}

/// Weathering-grade labels and their numeric codes.
///
/// The mapping is a bijection so every code decodes back to its label:
/// Fresh = 0, Fresh-SW = 0.5, SW = 1, Fresh-MW = 1.5, SW-MW = 2, CW = 2.5,
/// MW = 3, HW-MW = 3.5, HW = 4.
pub const TWR_CODES: [(&str, f64); 9] = [
    ("Fresh", 0.0),
    ("Fresh-SW", 0.5),
    ("SW", 1.0),
    ("Fresh-MW", 1.5),
    ("SW-MW", 2.0),
    ("CW", 2.5),
    ("MW", 3.0),
    ("HW-MW", 3.5),
    ("HW", 4.0),
];

/// Numeric code for a weathering-grade label.
pub fn encode_twr(label: &str) -> Result<f64> {
    TWR_CODES
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, c)| *c)
        .ok_or_else(|| Error::Encoding(format!("unknown weathering label: {label}")))
}

/// Weathering-grade label for a numeric code.
pub fn decode_twr(code: f64) -> Result<&'static str> {
    TWR_CODES
        .iter()
        .find(|(_, c)| *c == code)
        .map(|(l, _)| *l)
        .ok_or_else(|| Error::Encoding(format!("no weathering label has code {code}")))
}

/// All weathering-grade labels in code order.
pub fn twr_labels() -> Vec<&'static str> {
    TWR_CODES.iter().map(|(l, _)| *l).collect()
}

/// Root mean square error between predictions and targets:
/// `sqrt(sum((t_i - p_i)^2) / m)`.
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::Measure(format!(
            "{} predictions for {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Measure("cannot measure error on zero pairs".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (a - p) * (a - p))
        .sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// Mean squared error for classification with a fixed penalty for objects the
/// classifier did not recognize (`None` predictions): each recognized object
/// contributes `(actual - predicted)^2`, each unrecognized one contributes
/// `penalty`, and the total is divided by the number of objects.
pub fn mse_classification(
    predicted: &[Option<f64>],
    actual: &[f64],
    penalty: f64,
) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::Measure(format!(
            "{} predictions for {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Measure("cannot measure error on zero pairs".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| match p {
            Some(v) => (a - v) * (a - v),
            None => penalty,
        })
        .sum();
    Ok(sum / predicted.len() as f64)
}

/// Loads a decision table from delimited text (comma, tab, or semicolon —
/// detected from the header). The first row names the attributes. `decision`
/// selects the decision column; every other column is a condition. Column
/// kinds are inferred from the first data row: a cell that parses as a number
/// makes the column numeric. A later cell that contradicts the inferred kind
/// is an error naming its 1-based line.
pub fn load_decision_table(text: &str, decision: &str) -> Result<DecisionTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Ingestion {
            line: 1,
            message: "empty input: no header row".into(),
        })?;
    let delim = ['\t', ';', ',']
        .into_iter()
        .find(|d| header.contains(*d))
        .unwrap_or(',');
    let names: Vec<String> = header.split(delim).map(|s| s.trim().to_string()).collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(Error::Ingestion {
            line: 1,
            message: "blank attribute name in header".into(),
        });
    }
    let dec_col = names
        .iter()
        .position(|n| n == decision)
        .ok_or_else(|| Error::Attribute(decision.to_string()))?;

    let mut raw_rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (idx, line) in lines {
        let cells: Vec<String> = line.split(delim).map(|s| s.trim().to_string()).collect();
        if cells.len() != names.len() {
            return Err(Error::Ingestion {
                line: idx + 1,
                message: format!(
                    "expected {} fields, found {}",
                    names.len(),
                    cells.len()
                ),
            });
        }
        raw_rows.push((idx + 1, cells));
    }
    if raw_rows.is_empty() {
        return Err(Error::Ingestion {
            line: 1,
            message: "no objects: table body is empty".into(),
        });
    }

    // Column kinds come from the first data row.
    let kinds: Vec<AttributeKind> = raw_rows[0]
        .1
        .iter()
        .map(|cell| {
            if cell.parse::<f64>().is_ok() {
                AttributeKind::Numeric
            } else {
                AttributeKind::Symbolic
            }
        })
        .collect();

    let attributes: Vec<Attribute> = names
        .iter()
        .enumerate()
        .map(|(j, name)| Attribute {
            name: name.clone(),
            role: if j == dec_col {
                AttributeRole::Decision
            } else {
                AttributeRole::Condition
            },
            kind: kinds[j],
        })
        .collect();

    let mut values = Vec::with_capacity(raw_rows.len());
    for (line_no, cells) in &raw_rows {
        let mut row = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            match kinds[j] {
                AttributeKind::Numeric => match cell.parse::<f64>() {
                    Ok(v) => row.push(Cell::Num(v)),
                    Err(_) => {
                        return Err(Error::Ingestion {
                            line: *line_no,
                            message: format!(
                                "column {} is numeric but value {:?} does not parse",
                                names[j], cell
                            ),
                        })
                    }
                },
                AttributeKind::Symbolic => row.push(Cell::Sym(cell.clone())),
            }
        }
        values.push(row);
    }

    let object_ids = (1..=values.len()).map(|i| format!("o{i}")).collect();
    DecisionTable::new(object_ids, attributes, values)
}

/// Loads a decision table from a file; see [`load_decision_table`].
pub fn load_decision_table_file(path: &Path, decision: &str) -> Result<DecisionTable> {
    let text = std::fs::read_to_string(path)?;
    load_decision_table(&text, decision)
}

/// Column names of a delimited table's header row, using the same delimiter
/// detection as [`load_decision_table`]. Handy for defaulting the decision
/// attribute to the last column.
pub fn header_columns(text: &str) -> Result<Vec<String>> {
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Ingestion {
            line: 1,
            message: "empty input: no header row".into(),
        })?;
    let delim = ['\t', ';', ',']
        .into_iter()
        .find(|d| header.contains(*d))
        .unwrap_or(',');
    Ok(header.split(delim).map(|s| s.trim().to_string()).collect())
}

/// Serializes a table as comma-delimited text with a header row. Numeric
/// cells use the shortest representation that parses back to the same value,
/// so a write/load round trip reproduces the table exactly.
pub fn write_delimited(table: &DecisionTable) -> String {
    let mut out = String::new();
    let names: Vec<&str> = table.attributes().iter().map(|a| a.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for row in table.rows() {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
