//! Data model and ARFF-subset I/O.
//!
//! The ARFF subset understood here: `@relation`, `@attribute` with a
//! nominal value list in braces or the keyword `numeric`/`real`,
//! `@data` with one comma-separated instance per line, `?` for missing
//! values and `%` comment lines. The last attribute is the class
//! unless overridden.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tree::Outcome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttributeKind {
    /// Ordered list of admissible values.
    Nominal(Vec<String>),
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn nominal(name: &str, values: &[&str]) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::Nominal(values.iter().map(|v| v.to_string()).collect()),
        }
    }

    pub fn numeric(name: &str) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal(_))
    }

    /// Value list of a nominal attribute; empty for numeric ones.
    pub fn values(&self) -> &[String] {
        match &self.kind {
            AttributeKind::Nominal(vs) => vs,
            AttributeKind::Numeric => &[],
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values().len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values().iter().position(|v| v == value)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || self
                .name
                .chars()
                .any(|c| c.is_whitespace() || c.is_control())
        {
            return Err(Error::InvalidDataset(format!(
                "attribute name '{}' must be non-empty and contain no whitespace",
                self.name
            )));
        }
        if self.name.contains(',') || self.name.contains('{') || self.name.contains('}') {
            return Err(Error::InvalidDataset(format!(
                "attribute name '{}' contains reserved characters",
                self.name
            )));
        }
        if let AttributeKind::Nominal(values) = &self.kind {
            if values.is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "nominal attribute '{}' has an empty value list",
                    self.name
                )));
            }
            let mut seen = HashSet::new();
            for v in values {
                if v.is_empty()
                    || v != v.trim()
                    || v == "?"
                    || v.contains(',')
                    || v.contains('{')
                    || v.contains('}')
                    || v.contains('%')
                    || v.chars().any(|c| c.is_control())
                {
                    return Err(Error::InvalidDataset(format!(
                        "nominal value '{v}' of attribute '{}' is not representable",
                        self.name
                    )));
                }
                if !seen.insert(v.as_str()) {
                    return Err(Error::InvalidDataset(format!(
                        "duplicate nominal value '{v}' in attribute '{}'",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A single attribute value of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    /// 0-based index into the attribute's value list.
    Nominal(usize),
    Number(f64),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub cells: Vec<Cell>,
    pub weight: f64,
}

impl Instance {
    pub fn new(cells: Vec<Cell>) -> Self {
        Instance { cells, weight: 1.0 }
    }

    pub fn weighted(cells: Vec<Cell>, weight: f64) -> Self {
        Instance { cells, weight }
    }

    /// Checks this instance against a schema. `require_class` demands a
    /// present class cell (training data); prediction inputs may leave
    /// the class missing.
    pub fn validate(
        &self,
        schema: &[AttributeSpec],
        class_index: usize,
        require_class: bool,
    ) -> Result<()> {
        if self.cells.len() != schema.len() {
            return Err(Error::InvalidDataset(format!(
                "instance has {} cells, schema has {} attributes",
                self.cells.len(),
                schema.len()
            )));
        }
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "instance weight {} is not a positive finite number",
                self.weight
            )));
        }
        for (i, (cell, attr)) in self.cells.iter().zip(schema).enumerate() {
            match (cell, &attr.kind) {
                (Cell::Missing, _) => {
                    if require_class && i == class_index {
                        return Err(Error::InvalidDataset(
                            "class cell must not be missing".to_string(),
                        ));
                    }
                }
                (Cell::Nominal(v), AttributeKind::Nominal(values)) => {
                    if *v >= values.len() {
                        return Err(Error::InvalidDataset(format!(
                            "nominal index {v} out of range for attribute '{}'",
                            attr.name
                        )));
                    }
                }
                (Cell::Number(x), AttributeKind::Numeric) => {
                    if !x.is_finite() {
                        return Err(Error::InvalidDataset(format!(
                            "non-finite number in attribute '{}'",
                            attr.name
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidDataset(format!(
                        "cell kind does not match attribute '{}'",
                        attr.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Schema well-formedness shared by datasets and persisted trees.
pub(crate) fn validate_schema(schema: &[AttributeSpec], class_index: usize) -> Result<()> {
    if schema.is_empty() {
        return Err(Error::InvalidDataset(
            "schema has no attributes".to_string(),
        ));
    }
    let mut names = HashSet::new();
    for attr in schema {
        attr.validate()?;
        if !names.insert(attr.name.to_ascii_lowercase()) {
            return Err(Error::InvalidDataset(format!(
                "duplicate attribute name '{}'",
                attr.name
            )));
        }
    }
    if class_index >= schema.len() {
        return Err(Error::InvalidDataset(
            "class index out of range".to_string(),
        ));
    }
    if !schema[class_index].is_nominal() {
        return Err(Error::InvalidDataset(
            "class attribute must be nominal".to_string(),
        ));
    }
    Ok(())
}

/// An immutable table of instances under a fixed schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    relation: String,
    schema: Vec<AttributeSpec>,
    class_index: usize,
    instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(
        relation: impl Into<String>,
        schema: Vec<AttributeSpec>,
        class_index: usize,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let relation = relation.into();
        if relation.is_empty() || relation.contains('\n') || relation.contains('\r') {
            return Err(Error::InvalidDataset(
                "relation name must be a non-empty single line".to_string(),
            ));
        }
        validate_schema(&schema, class_index)?;
        for inst in &instances {
            inst.validate(&schema, class_index, true)?;
        }
        Ok(Dataset {
            relation,
            schema,
            class_index,
            instances,
        })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn attribute(&self, index: usize) -> &AttributeSpec {
        &self.schema[index]
    }

    pub fn class_attribute(&self) -> &AttributeSpec {
        &self.schema[self.class_index]
    }

    pub fn class_labels(&self) -> &[String] {
        self.class_attribute().values()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels().len()
    }

    /// Class index of a training instance. Panics on a missing class
    /// cell, which `Dataset::new` rules out.
    pub fn class_of(&self, inst: &Instance) -> usize {
        match inst.cells[self.class_index] {
            Cell::Nominal(c) => c,
            _ => unreachable!("training instances always carry a class"),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.instances.iter().map(|i| i.weight).sum()
    }

    /// Same schema, different instance list. Instances are validated.
    pub fn with_instances(&self, instances: Vec<Instance>) -> Result<Dataset> {
        for inst in &instances {
            inst.validate(&self.schema, self.class_index, true)?;
        }
        Ok(Dataset {
            relation: self.relation.clone(),
            schema: self.schema.clone(),
            class_index: self.class_index,
            instances,
        })
    }

    /// Re-designates the class attribute (CLI override).
    pub fn with_class_index(&self, class_index: usize) -> Result<Dataset> {
        Dataset::new(
            self.relation.clone(),
            self.schema.clone(),
            class_index,
            self.instances.clone(),
        )
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.name == name)
    }

    /// Sub-dataset of instances matching `outcome` on `attr`.
    /// Missing-valued instances are excluded; weights are preserved.
    pub fn partition(&self, attr: usize, outcome: &Outcome) -> Result<Dataset> {
        if attr == self.class_index {
            return Err(Error::InvalidArgument(
                "cannot partition on the class attribute".to_string(),
            ));
        }
        if attr >= self.schema.len() {
            return Err(Error::InvalidArgument(format!(
                "attribute index {attr} out of range"
            )));
        }
        let nominal = self.schema[attr].is_nominal();
        match (outcome, nominal) {
            (Outcome::Equals(_) | Outcome::InSubset(_), false) => {
                return Err(Error::InvalidArgument(format!(
                    "nominal outcome applied to numeric attribute '{}'",
                    self.schema[attr].name
                )));
            }
            (Outcome::Le(_) | Outcome::Gt(_), true) => {
                return Err(Error::InvalidArgument(format!(
                    "threshold outcome applied to nominal attribute '{}'",
                    self.schema[attr].name
                )));
            }
            _ => {}
        }
        let instances = self
            .instances
            .iter()
            .filter(|inst| outcome.matches(&inst.cells[attr]))
            .cloned()
            .collect();
        Ok(Dataset {
            relation: self.relation.clone(),
            schema: self.schema.clone(),
            class_index: self.class_index,
            instances,
        })
    }
}

// ---------------------------------------------------------------------------
// ARFF subset
// ---------------------------------------------------------------------------

/// Parses the ARFF subset described in the module docs. The last
/// attribute becomes the class.
pub fn parse_arff(source: &str) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut schema: Vec<AttributeSpec> = Vec::new();
    let mut in_data = false;
    let mut instances: Vec<Instance> = Vec::new();
    let mut seen_names: HashSet<String> = HashSet::new();

    for (lineno, raw) in source.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = trimmed.to_ascii_lowercase();
            if let Some(name) = keyword_rest(trimmed, "@relation") {
                if relation.is_some() {
                    return Err(syntax(line, 1, "duplicate @relation"));
                }
                if name.is_empty() {
                    return Err(syntax(line, "@relation".len() + 1, "missing relation name"));
                }
                relation = Some(name.to_string());
            } else if let Some(rest) = keyword_rest(trimmed, "@attribute") {
                if relation.is_none() {
                    return Err(syntax(line, 1, "@attribute before @relation"));
                }
                let col = trimmed.len() - rest.len() + 1;
                let (name, spec) = match rest.split_once(char::is_whitespace) {
                    Some((n, s)) => (n.trim(), s.trim()),
                    None => return Err(syntax(line, col, "expected attribute name and type")),
                };
                if name.is_empty() {
                    return Err(syntax(line, col, "missing attribute name"));
                }
                if !seen_names.insert(name.to_ascii_lowercase()) {
                    return Err(Error::DuplicateAttribute {
                        line,
                        name: name.to_string(),
                    });
                }
                let kind = parse_attribute_type(spec, line, trimmed)?;
                schema.push(AttributeSpec {
                    name: name.to_string(),
                    kind,
                });
            } else if lower == "@data" {
                if relation.is_none() {
                    return Err(syntax(line, 1, "@data before @relation"));
                }
                if schema.is_empty() {
                    return Err(syntax(line, 1, "@data before any @attribute"));
                }
                in_data = true;
            } else {
                return Err(syntax(line, 1, &format!("unexpected line '{trimmed}'")));
            }
        } else {
            let tokens: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if tokens.len() != schema.len() {
                return Err(Error::ArityMismatch {
                    line,
                    expected: schema.len(),
                    found: tokens.len(),
                });
            }
            let class_index = schema.len() - 1;
            let mut cells = Vec::with_capacity(tokens.len());
            for (i, token) in tokens.iter().enumerate() {
                if *token == "?" {
                    if i == class_index {
                        return Err(Error::MissingClassValue { line });
                    }
                    cells.push(Cell::Missing);
                    continue;
                }
                match &schema[i].kind {
                    AttributeKind::Nominal(_) => match schema[i].value_index(token) {
                        Some(v) => cells.push(Cell::Nominal(v)),
                        None => {
                            return Err(Error::UnknownNominalValue {
                                line,
                                attribute: schema[i].name.clone(),
                                value: token.to_string(),
                            })
                        }
                    },
                    AttributeKind::Numeric => match token.parse::<f64>() {
                        Ok(x) if x.is_finite() => cells.push(Cell::Number(x)),
                        _ => {
                            return Err(syntax(
                                line,
                                1,
                                &format!(
                                    "'{token}' is not a number for attribute '{}'",
                                    schema[i].name
                                ),
                            ))
                        }
                    },
                }
            }
            instances.push(Instance::new(cells));
        }
    }

    let relation =
        relation.ok_or_else(|| syntax(source.lines().count().max(1), 1, "missing @relation"))?;
    if !in_data {
        return Err(syntax(
            source.lines().count().max(1),
            1,
            "missing @data section",
        ));
    }
    let class_index = schema.len() - 1;
    Dataset::new(relation, schema, class_index, instances)
}

/// Text after a case-insensitive keyword that ends at a word boundary,
/// trimmed; `None` when the line starts with something else.
fn keyword_rest<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    if line.len() < keyword.len() || !line[..keyword.len()].eq_ignore_ascii_case(keyword) {
        return None;
    }
    let rest = &line[keyword.len()..];
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

fn parse_attribute_type(spec: &str, line: usize, whole: &str) -> Result<AttributeKind> {
    if spec.starts_with('{') {
        let col = whole.find('{').map(|i| i + 1).unwrap_or(1);
        let inner = spec
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| syntax(line, col, "unterminated nominal value list"))?;
        let values: Vec<String> = inner.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(syntax(line, col, "empty nominal value"));
        }
        Ok(AttributeKind::Nominal(values))
    } else {
        match spec.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(AttributeKind::Numeric),
            other => Err(syntax(
                line,
                whole.len() - spec.len() + 1,
                &format!("unsupported attribute type '{other}'"),
            )),
        }
    }
}

fn syntax(line: usize, col: usize, msg: &str) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.to_string(),
    }
}

/// Canonical ARFF text: LF line endings, declaration order preserved,
/// `?` for missing, shortest round-trip decimals for numerics.
pub fn serialize_arff(d: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("@relation ");
    out.push_str(d.relation());
    out.push('\n');
    for attr in d.schema() {
        out.push_str("@attribute ");
        out.push_str(&attr.name);
        out.push(' ');
        match &attr.kind {
            AttributeKind::Nominal(values) => {
                out.push('{');
                out.push_str(&values.join(","));
                out.push('}');
            }
            AttributeKind::Numeric => out.push_str("numeric"),
        }
        out.push('\n');
    }
    out.push_str("@data\n");
    for inst in d.instances() {
        let row: Vec<String> = inst
            .cells
            .iter()
            .zip(d.schema())
            .map(|(cell, attr)| match cell {
                Cell::Missing => "?".to_string(),
                Cell::Nominal(v) => attr.values()[*v].clone(),
                Cell::Number(x) => format!("{x}"),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Student-schema helpers
// ---------------------------------------------------------------------------

/// High-school / senior-secondary grade bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    O,
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Grade {
    pub const LABELS: [&'static str; 7] = ["O", "A", "B", "C", "D", "E", "F"];

    pub fn label(self) -> &'static str {
        Self::LABELS[self as usize]
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Maps a mark percentage to its grade band. The percentage is floored
/// first, so band gaps like 89.5 resolve to the lower band.
pub fn bin_grade(percentage: f64) -> Result<Grade> {
    if !(0.0..=100.0).contains(&percentage) {
        return Err(Error::InvalidArgument(format!(
            "percentage {percentage} outside [0, 100]"
        )));
    }
    let p = percentage.floor();
    Ok(if p >= 90.0 {
        Grade::O
    } else if p >= 80.0 {
        Grade::A
    } else if p >= 70.0 {
        Grade::B
    } else if p >= 60.0 {
        Grade::C
    } else if p >= 50.0 {
        Grade::D
    } else if p >= 40.0 {
        Grade::E
    } else {
        Grade::F
    })
}

/// First-year outcome classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultLabel {
    Pass,
    Promoted,
    Fail,
}

impl ResultLabel {
    pub fn label(self) -> &'static str {
        match self {
            ResultLabel::Pass => "Pass",
            ResultLabel::Promoted => "Promoted",
            ResultLabel::Fail => "Fail",
        }
    }
}

impl fmt::Display for ResultLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Promotion rule: pass everything outright, be promoted while failing
/// at most three theory and two practical subjects, fail otherwise.
pub fn derive_result(failed_theory: u32, failed_practical: u32) -> ResultLabel {
    if failed_theory == 0 && failed_practical == 0 {
        ResultLabel::Pass
    } else if failed_theory <= 3 && failed_practical <= 2 {
        ResultLabel::Promoted
    } else {
        ResultLabel::Fail
    }
}

/// The 17-variable student enrolment schema (class last).
pub fn student_schema() -> Vec<AttributeSpec> {
    vec![
        AttributeSpec::nominal("Branch", &["CS", "IT", "ME"]),
        AttributeSpec::nominal("Sex", &["Male", "Female"]),
        AttributeSpec::nominal("Cat", &["Unreserved", "OBC", "SC", "ST"]),
        AttributeSpec::nominal("HSG", &Grade::LABELS),
        AttributeSpec::nominal("SSG", &Grade::LABELS),
        AttributeSpec::nominal("Atype", &["UPSEE", "Direct"]),
        AttributeSpec::nominal("Med", &["Hindi", "English"]),
        AttributeSpec::nominal("LLoc", &["Village", "Town", "Tahseel", "District"]),
        AttributeSpec::nominal("Hos", &["Yes", "No"]),
        AttributeSpec::nominal("FSize", &["1", "2", "3", ">3"]),
        AttributeSpec::nominal("FStat", &["Joint", "Individual"]),
        AttributeSpec::nominal("FAIn", &["BPL", "poor", "medium", "high"]),
        AttributeSpec::nominal(
            "FQual",
            &[
                "no-education",
                "elementary",
                "secondary",
                "UG",
                "PG",
                "Ph.D.",
                "NA",
            ],
        ),
        AttributeSpec::nominal(
            "MQual",
            &[
                "no-education",
                "elementary",
                "secondary",
                "UG",
                "PG",
                "Ph.D.",
                "NA",
            ],
        ),
        AttributeSpec::nominal(
            "FOcc",
            &["Service", "Business", "Agriculture", "Retired", "NA"],
        ),
        AttributeSpec::nominal("MOcc", &["House-wife", "Service", "Retired", "NA"]),
        AttributeSpec::nominal("Result", &["Pass", "Promoted", "Fail"]),
    ]
}

/// Deterministic synthetic enrolment data over the student schema.
/// The Result column is derived from a latent risk score over the
/// academic attributes, so trees have structure to find.
pub fn generate_synthetic(seed: u64, n: usize) -> Dataset {
    let schema = student_schema();
    let mut rng = SplitMix64::new(seed);
    let mut instances = Vec::with_capacity(n);

    for _ in 0..n {
        let branch = rng.pick_weighted(&[0.40, 0.30, 0.30]);
        let sex = rng.pick_weighted(&[0.65, 0.35]);
        let cat = rng.pick_weighted(&[0.45, 0.30, 0.15, 0.10]);

        // Correlated grade bands from one latent aptitude.
        let apt = rng.next_f64();
        let hsg = grade_rank(apt, &mut rng);
        let ssg = grade_rank(apt, &mut rng);

        let atype = rng.pick_weighted(&[0.70, 0.30]);
        let med = rng.pick_weighted(&[0.55, 0.45]);
        let lloc = rng.pick_weighted(&[0.35, 0.25, 0.20, 0.20]);
        let hos = rng.pick_weighted(&[0.40, 0.60]);
        let fsize = rng.pick_weighted(&[0.10, 0.25, 0.30, 0.35]);
        let fstat = rng.pick_weighted(&[0.55, 0.45]);
        let fain = rng.pick_weighted(&[0.15, 0.35, 0.35, 0.15]);
        let fqual = rng.pick_weighted(&[0.15, 0.20, 0.25, 0.20, 0.12, 0.05, 0.03]);
        let mqual = rng.pick_weighted(&[0.25, 0.25, 0.22, 0.15, 0.08, 0.02, 0.03]);
        let focc = rng.pick_weighted(&[0.35, 0.25, 0.25, 0.10, 0.05]);
        let mocc = rng.pick_weighted(&[0.70, 0.15, 0.05, 0.10]);

        let mut risk = 1.2 * ssg as f64 + 0.7 * hsg as f64;
        if med == 0 {
            risk += 0.8; // Hindi medium
        }
        if fain <= 1 {
            risk += 0.9; // BPL or poor
        }
        if atype == 1 {
            risk += 0.5; // direct admission
        }
        if lloc == 0 {
            risk += 0.4; // village
        }
        risk += rng.next_f64() * 3.0;

        let failed_theory = (((risk - 6.4) / 1.1).floor().max(0.0) as u32).min(6);
        let failed_practical = (((risk - 7.0) / 1.9).floor().max(0.0) as u32).min(4);
        let result = derive_result(failed_theory, failed_practical);

        instances.push(Instance::new(vec![
            Cell::Nominal(branch),
            Cell::Nominal(sex),
            Cell::Nominal(cat),
            Cell::Nominal(hsg),
            Cell::Nominal(ssg),
            Cell::Nominal(atype),
            Cell::Nominal(med),
            Cell::Nominal(lloc),
            Cell::Nominal(hos),
            Cell::Nominal(fsize),
            Cell::Nominal(fstat),
            Cell::Nominal(fain),
            Cell::Nominal(fqual),
            Cell::Nominal(mqual),
            Cell::Nominal(focc),
            Cell::Nominal(mocc),
            Cell::Nominal(result as usize),
        ]));
    }

    Dataset::new("student-performance", schema, 16, instances)
        .expect("generated instances always satisfy the schema")
}

/// Grade rank 0 (O) .. 6 (F) around the latent aptitude.
fn grade_rank(apt: f64, rng: &mut SplitMix64) -> usize {
    let jitter = rng.next_f64() * 3.0 - 1.5;
    let rank = apt * 6.0 + jitter;
    rank.round().clamp(0.0, 6.0) as usize
}
