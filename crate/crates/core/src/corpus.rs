//! Benchmark corpus ingestion.
//!
//! Reads the official distributions of the four restaurant/neighbourhood
//! benchmarks into one data model: a [`Split`] of [`Sentence`]s, each carrying
//! its gold [`Opinion`]s, validated against the dataset's [`LabelSchema`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: u32, column: u32, message: String },
    #[error("schema violation in sentence {sentence_id}: {message}")]
    SchemaViolation { sentence_id: String, message: String },
    #[error("invalid sentence {sentence_id}: {message}")]
    InvalidSentence { sentence_id: String, message: String },
    #[error("invalid label schema: {0}")]
    InvalidSchema(String),
    #[error("unknown dataset `{0}` (expected restaurants-14, restaurants-15, restaurants-16 or sentihood)")]
    UnknownDataset(String),
}

/// One of the four supported benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dataset {
    #[serde(rename = "restaurants-14")]
    Restaurants14,
    #[serde(rename = "restaurants-15")]
    Restaurants15,
    #[serde(rename = "restaurants-16")]
    Restaurants16,
    #[serde(rename = "sentihood")]
    Sentihood,
}

impl Dataset {
    pub const ALL: [Dataset; 4] = [
        Dataset::Restaurants14,
        Dataset::Restaurants15,
        Dataset::Restaurants16,
        Dataset::Sentihood,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Restaurants14 => "restaurants-14",
            Dataset::Restaurants15 => "restaurants-15",
            Dataset::Restaurants16 => "restaurants-16",
            Dataset::Sentihood => "sentihood",
        }
    }

    /// The built-in label schema of the official distribution.
    pub fn schema(self) -> LabelSchema {
        let (aspects, polarities, targets): (&[&str], &[&str], bool) = match self {
            Dataset::Restaurants14 => (SE14_ASPECTS, &["positive", "negative", "neutral", "conflict"], false),
            Dataset::Restaurants15 => (SE15_ASPECTS, &["positive", "negative", "neutral"], true),
            Dataset::Restaurants16 => (SE16_ASPECTS, &["positive", "negative", "neutral"], true),
            Dataset::Sentihood => (SENTIHOOD_ASPECTS, &["positive", "negative", "none"], false),
        };
        LabelSchema::new(self, aspects.iter().copied(), polarities.iter().copied(), targets)
            .expect("built-in schemas are well formed")
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "restaurants-14" | "restaurants14" | "se14" | "se-14" | "semeval14" => Ok(Dataset::Restaurants14),
            "restaurants-15" | "restaurants15" | "se15" | "se-15" | "semeval15" => Ok(Dataset::Restaurants15),
            "restaurants-16" | "restaurants16" | "se16" | "se-16" | "semeval16" => Ok(Dataset::Restaurants16),
            "sentihood" | "sh" => Ok(Dataset::Sentihood),
            _ => Err(CorpusError::UnknownDataset(s.to_string())),
        }
    }
}

const SE14_ASPECTS: &[&str] = &["ambience", "anecdotes/miscellaneous", "food", "price", "service"];

const SE16_ASPECTS: &[&str] = &[
    "AMBIENCE#GENERAL",
    "DRINKS#PRICES",
    "DRINKS#QUALITY",
    "DRINKS#STYLE_OPTIONS",
    "FOOD#PRICES",
    "FOOD#QUALITY",
    "FOOD#STYLE_OPTIONS",
    "LOCATION#GENERAL",
    "RESTAURANT#GENERAL",
    "RESTAURANT#MISCELLANEOUS",
    "RESTAURANT#PRICES",
    "SERVICE#GENERAL",
];

// The 2015 release additionally annotates FOOD#GENERAL.
const SE15_ASPECTS: &[&str] = &[
    "AMBIENCE#GENERAL",
    "DRINKS#PRICES",
    "DRINKS#QUALITY",
    "DRINKS#STYLE_OPTIONS",
    "FOOD#GENERAL",
    "FOOD#PRICES",
    "FOOD#QUALITY",
    "FOOD#STYLE_OPTIONS",
    "LOCATION#GENERAL",
    "RESTAURANT#GENERAL",
    "RESTAURANT#MISCELLANEOUS",
    "RESTAURANT#PRICES",
    "SERVICE#GENERAL",
];

const SENTIHOOD_ASPECTS: &[&str] = &[
    "LOCATION1#general",
    "LOCATION1#price",
    "LOCATION1#safety",
    "LOCATION1#transit-location",
    "LOCATION2#general",
    "LOCATION2#price",
    "LOCATION2#safety",
    "LOCATION2#transit-location",
];

const SENTIHOOD_ENTITIES: &[&str] = &["LOCATION1", "LOCATION2"];
const SENTIHOOD_EVALUATED: &[&str] = &["general", "price", "safety", "transit-location"];
// Present in the official files but outside the four evaluated aspects.
const SENTIHOOD_UNEVALUATED: &[&str] = &[
    "dining",
    "green-nature",
    "live",
    "multicultural",
    "nightlife",
    "quiet",
    "shopping",
    "touristy",
];

/// Closed aspect and polarity label sets of one dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSchema {
    dataset: Dataset,
    aspects: BTreeSet<String>,
    polarities: BTreeSet<String>,
    supports_targets: bool,
}

impl LabelSchema {
    /// Builds a schema, rejecting empty label sets and labels that collide
    /// case-insensitively.
    pub fn new<A, P>(
        dataset: Dataset,
        aspects: impl IntoIterator<Item = A>,
        polarities: impl IntoIterator<Item = P>,
        supports_targets: bool,
    ) -> Result<Self, CorpusError>
    where
        A: Into<String>,
        P: Into<String>,
    {
        let aspects = canonical_label_set("aspect", aspects)?;
        let polarities = canonical_label_set("polarity", polarities)?;
        Ok(LabelSchema {
            dataset,
            aspects,
            polarities,
            supports_targets,
        })
    }

    pub fn dataset(&self) -> Dataset {
        self.dataset
    }

    pub fn name(&self) -> &'static str {
        self.dataset.name()
    }

    pub fn aspects(&self) -> &BTreeSet<String> {
        &self.aspects
    }

    pub fn polarities(&self) -> &BTreeSet<String> {
        &self.polarities
    }

    pub fn supports_targets(&self) -> bool {
        self.supports_targets
    }

    /// Case-insensitive lookup returning the schema's canonical spelling.
    pub fn canonical_aspect(&self, raw: &str) -> Option<&str> {
        lookup(&self.aspects, raw)
    }

    pub fn canonical_polarity(&self, raw: &str) -> Option<&str> {
        lookup(&self.polarities, raw)
    }
}

fn lookup<'a>(labels: &'a BTreeSet<String>, raw: &str) -> Option<&'a str> {
    let raw = raw.trim();
    if let Some(exact) = labels.get(raw) {
        return Some(exact.as_str());
    }
    labels
        .iter()
        .find(|label| label.to_lowercase() == raw.to_lowercase())
        .map(String::as_str)
}

fn canonical_label_set<L: Into<String>>(
    what: &str,
    labels: impl IntoIterator<Item = L>,
) -> Result<BTreeSet<String>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for label in labels {
        let label: String = label.into();
        let trimmed = label.trim();
        if trimmed.is_empty() {
            return Err(CorpusError::InvalidSchema(format!("empty {what} label")));
        }
        if !seen.insert(trimmed.to_lowercase()) {
            return Err(CorpusError::InvalidSchema(format!(
                "duplicate {what} label `{trimmed}`"
            )));
        }
        out.insert(trimmed.to_string());
    }
    if out.is_empty() {
        return Err(CorpusError::InvalidSchema(format!("no {what} labels")));
    }
    Ok(out)
}

/// A single (target, aspect, polarity) annotation. `target: None` is the
/// implicit (NULL) target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Opinion {
    pub target: Option<String>,
    pub aspect: String,
    pub polarity: String,
}

impl Opinion {
    pub fn new(target: Option<&str>, aspect: &str, polarity: &str) -> Self {
        Opinion {
            target: target.map(str::to_string),
            aspect: aspect.to_string(),
            polarity: polarity.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    pub opinions: Vec<Opinion>,
}

impl Sentence {
    pub fn new(id: &str, text: &str, opinions: Vec<Opinion>) -> Self {
        Sentence {
            id: id.to_string(),
            text: text.to_string(),
            opinions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Train,
    Dev,
    Test,
}

impl SplitKind {
    pub fn name(self) -> &'static str {
        match self {
            SplitKind::Train => "train",
            SplitKind::Dev => "dev",
            SplitKind::Test => "test",
        }
    }

    /// Guesses the split from a file name (`train`, `dev`/`trial`/`val`,
    /// anything else is treated as test data).
    pub fn from_path(path: &Path) -> SplitKind {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if name.contains("train") {
            SplitKind::Train
        } else if name.contains("dev") || name.contains("trial") || name.contains("val") {
            SplitKind::Dev
        } else {
            SplitKind::Test
        }
    }
}

/// A loaded, validated split. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    schema: LabelSchema,
    kind: SplitKind,
    sentences: Vec<Sentence>,
    notes: Vec<Diagnostic>,
}

impl Split {
    /// Validates every sentence against `schema` and collapses duplicate
    /// opinions within a sentence.
    pub fn new(schema: LabelSchema, kind: SplitKind, sentences: Vec<Sentence>) -> Result<Self, CorpusError> {
        Self::with_notes(schema, kind, sentences, Vec::new())
    }

    fn with_notes(
        schema: LabelSchema,
        kind: SplitKind,
        mut sentences: Vec<Sentence>,
        mut notes: Vec<Diagnostic>,
    ) -> Result<Self, CorpusError> {
        notes.dedup();
        let mut ids = HashSet::new();
        for sentence in &mut sentences {
            if sentence.id.is_empty() {
                return Err(CorpusError::InvalidSentence {
                    sentence_id: String::new(),
                    message: "empty sentence id".into(),
                });
            }
            if !ids.insert(sentence.id.clone()) {
                return Err(CorpusError::InvalidSentence {
                    sentence_id: sentence.id.clone(),
                    message: "duplicate sentence id".into(),
                });
            }
            if sentence.text.trim().is_empty() {
                return Err(CorpusError::InvalidSentence {
                    sentence_id: sentence.id.clone(),
                    message: "empty sentence text".into(),
                });
            }
            for opinion in &sentence.opinions {
                check_opinion(&schema, &sentence.id, opinion)?;
            }
            dedup_in_place(&mut sentence.opinions);
        }
        Ok(Split {
            schema,
            kind,
            sentences,
            notes,
        })
    }

    pub fn schema(&self) -> &LabelSchema {
        &self.schema
    }

    pub fn kind(&self) -> SplitKind {
        self.kind
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    /// Non-fatal observations made while loading (offset mismatches,
    /// skipped aspects, unusual NULL spellings).
    pub fn notes(&self) -> &[Diagnostic] {
        &self.notes
    }

    pub fn with_kind(mut self, kind: SplitKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn get(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn opinion_count(&self) -> usize {
        self.sentences.iter().map(|s| s.opinions.len()).sum()
    }
}

fn check_opinion(schema: &LabelSchema, sentence_id: &str, opinion: &Opinion) -> Result<(), CorpusError> {
    let violation = |message: String| CorpusError::SchemaViolation {
        sentence_id: sentence_id.to_string(),
        message,
    };
    if !schema.aspects().contains(&opinion.aspect) {
        return Err(violation(format!("unknown aspect category `{}`", opinion.aspect)));
    }
    if !schema.polarities().contains(&opinion.polarity) {
        return Err(violation(format!("unknown polarity `{}`", opinion.polarity)));
    }
    if schema.dataset() == Dataset::Sentihood && opinion.polarity == "none" {
        return Err(violation(
            "`none` is implied at scoring time and cannot be annotated".into(),
        ));
    }
    match &opinion.target {
        Some(_) if !schema.supports_targets() => {
            Err(violation(format!("{} annotations carry no targets", schema.name())))
        }
        Some(t) if t.trim().is_empty() => Err(CorpusError::InvalidSentence {
            sentence_id: sentence_id.to_string(),
            message: "empty target".into(),
        }),
        _ => Ok(()),
    }
}

fn dedup_in_place(opinions: &mut Vec<Opinion>) {
    let mut seen = HashSet::new();
    opinions.retain(|o| seen.insert(o.clone()));
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// A present target is not a case-insensitive substring of the text.
    TargetNotInText { target: String },
    /// `from`/`to` do not delimit the target in the text.
    OffsetMismatch { target: String, from: usize, to: usize },
    /// A target spelled like NULL in other than the canonical casing.
    NullSpelling { raw: String },
    /// A Sentihood aspect outside the evaluated four was skipped.
    UnevaluatedAspect { aspect: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub sentence_id: String,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sentence {}: ", self.sentence_id)?;
        match &self.kind {
            DiagnosticKind::TargetNotInText { target } => {
                write!(f, "target `{target}` does not occur in the sentence text")
            }
            DiagnosticKind::OffsetMismatch { target, from, to } => {
                write!(f, "offsets {from}..{to} do not delimit target `{target}`")
            }
            DiagnosticKind::NullSpelling { raw } => {
                write!(f, "target `{raw}` treated as the implicit NULL target")
            }
            DiagnosticKind::UnevaluatedAspect { aspect } => {
                write!(f, "skipped opinion on unevaluated aspect `{aspect}`")
            }
        }
    }
}

/// Flags every present target that is not a case-insensitive substring of
/// its sentence.
pub fn validate_split(split: &Split) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for sentence in split.sentences() {
        let text = sentence.text.to_lowercase();
        for target in sentence.opinions.iter().filter_map(|o| o.target.as_deref()) {
            if !text.contains(&target.trim().to_lowercase()) {
                out.push(Diagnostic {
                    sentence_id: sentence.id.clone(),
                    kind: DiagnosticKind::TargetNotInText {
                        target: target.to_string(),
                    },
                });
            }
        }
    }
    out
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(match text.strip_prefix('\u{feff}') {
        Some(stripped) => stripped.to_string(),
        None => text,
    })
}

/// Loads a SemEval-2014 Task 4 restaurants file (aspect categories only).
pub fn load_semeval14(path: impl AsRef<Path>) -> Result<Split, CorpusError> {
    let path = path.as_ref();
    parse_semeval14(&read_file(path)?, SplitKind::from_path(path))
}

/// Loads a SemEval-2015 Task 12 (`year = 15`) or SemEval-2016 Task 5
/// (`year = 16`) restaurants file.
pub fn load_semeval1516(path: impl AsRef<Path>, year: u8) -> Result<Split, CorpusError> {
    let path = path.as_ref();
    parse_semeval1516(&read_file(path)?, year, SplitKind::from_path(path))
}

pub fn load_sentihood(path: impl AsRef<Path>) -> Result<Split, CorpusError> {
    let path = path.as_ref();
    parse_sentihood(&read_file(path)?, SplitKind::from_path(path))
}

/// Loads any supported dataset by name.
pub fn load_dataset(dataset: Dataset, path: impl AsRef<Path>) -> Result<Split, CorpusError> {
    match dataset {
        Dataset::Restaurants14 => load_semeval14(path),
        Dataset::Restaurants15 => load_semeval1516(path, 15),
        Dataset::Restaurants16 => load_semeval1516(path, 16),
        Dataset::Sentihood => load_sentihood(path),
    }
}

fn parse_xml(text: &str) -> Result<roxmltree::Document<'_>, CorpusError> {
    let options = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    roxmltree::Document::parse_with_options(text, options).map_err(|e| {
        let pos = e.pos();
        CorpusError::Parse {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })
}

fn node_error(doc: &roxmltree::Document<'_>, node: roxmltree::Node<'_, '_>, message: String) -> CorpusError {
    let pos = doc.text_pos_at(node.range().start);
    CorpusError::Parse {
        line: pos.row,
        column: pos.col,
        message,
    }
}

fn required_attr<'a>(
    doc: &roxmltree::Document<'_>,
    node: roxmltree::Node<'a, '_>,
    name: &str,
) -> Result<&'a str, CorpusError> {
    node.attribute(name).ok_or_else(|| {
        node_error(
            doc,
            node,
            format!("<{}> is missing the `{name}` attribute", node.tag_name().name()),
        )
    })
}

fn child_elements<'a, 'i>(
    node: roxmltree::Node<'a, 'i>,
    name: &'static str,
) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> {
    node.children().filter(move |n| n.has_tag_name(name))
}

/// Sentence id and text of a `<sentence>` element.
fn sentence_header(
    doc: &roxmltree::Document<'_>,
    node: roxmltree::Node<'_, '_>,
) -> Result<(String, String), CorpusError> {
    let id = required_attr(doc, node, "id")?.to_string();
    let text_node = child_elements(node, "text")
        .next()
        .ok_or_else(|| node_error(doc, node, format!("sentence {id} has no <text> element")))?;
    let text: String = text_node
        .descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect();
    Ok((id, text))
}

fn label<'s>(schema: &'s LabelSchema, sentence_id: &str, raw: &str, aspect: bool) -> Result<&'s str, CorpusError> {
    let found = if aspect {
        schema.canonical_aspect(raw)
    } else {
        schema.canonical_polarity(raw)
    };
    found.ok_or_else(|| CorpusError::SchemaViolation {
        sentence_id: sentence_id.to_string(),
        message: format!(
            "unknown {} `{raw}` for {}",
            if aspect { "category" } else { "polarity" },
            schema.name()
        ),
    })
}

pub fn parse_semeval14(xml: &str, kind: SplitKind) -> Result<Split, CorpusError> {
    let doc = parse_xml(xml)?;
    let schema = Dataset::Restaurants14.schema();
    let mut sentences = Vec::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("sentence")) {
        let (id, text) = sentence_header(&doc, node)?;
        let mut opinions = Vec::new();
        // aspectTerms are not linked to categories and are not used
        for group in child_elements(node, "aspectCategories") {
            for cat in child_elements(group, "aspectCategory") {
                let aspect = label(&schema, &id, required_attr(&doc, cat, "category")?, true)?;
                let polarity = label(&schema, &id, required_attr(&doc, cat, "polarity")?, false)?;
                opinions.push(Opinion::new(None, aspect, polarity));
            }
        }
        sentences.push(Sentence { id, text, opinions });
    }
    Split::new(schema, kind, sentences)
}

pub fn parse_semeval1516(xml: &str, year: u8, kind: SplitKind) -> Result<Split, CorpusError> {
    let dataset = match year {
        15 => Dataset::Restaurants15,
        16 => Dataset::Restaurants16,
        other => return Err(CorpusError::UnknownDataset(format!("restaurants-{other}"))),
    };
    let doc = parse_xml(xml)?;
    let schema = dataset.schema();
    let mut sentences = Vec::new();
    let mut notes = Vec::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("sentence")) {
        let (id, text) = sentence_header(&doc, node)?;
        let mut opinions = Vec::new();
        for group in child_elements(node, "Opinions") {
            for op in child_elements(group, "Opinion") {
                let raw_target = required_attr(&doc, op, "target")?;
                let aspect = label(&schema, &id, required_attr(&doc, op, "category")?, true)?;
                let polarity = label(&schema, &id, required_attr(&doc, op, "polarity")?, false)?;
                let offsets = offsets(&doc, op)?;
                let target = if raw_target.trim().eq_ignore_ascii_case("null") {
                    if raw_target != "NULL" {
                        notes.push(Diagnostic {
                            sentence_id: id.clone(),
                            kind: DiagnosticKind::NullSpelling {
                                raw: raw_target.to_string(),
                            },
                        });
                    }
                    None
                } else {
                    if let Some((from, to)) = offsets {
                        let span: Option<String> =
                            (from <= to).then(|| text.chars().skip(from).take(to - from).collect());
                        if span.as_deref() != Some(raw_target) {
                            notes.push(Diagnostic {
                                sentence_id: id.clone(),
                                kind: DiagnosticKind::OffsetMismatch {
                                    target: raw_target.to_string(),
                                    from,
                                    to,
                                },
                            });
                        }
                    }
                    Some(raw_target)
                };
                opinions.push(Opinion::new(target, aspect, polarity));
            }
        }
        sentences.push(Sentence { id, text, opinions });
    }
    Split::with_notes(schema, kind, sentences, notes)
}

fn offsets(
    doc: &roxmltree::Document<'_>,
    node: roxmltree::Node<'_, '_>,
) -> Result<Option<(usize, usize)>, CorpusError> {
    let parse = |name: &str| -> Result<Option<usize>, CorpusError> {
        node.attribute(name)
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| {
                    node_error(
                        doc,
                        node,
                        format!("`{name}` offset `{v}` is not a non-negative integer"),
                    )
                })
            })
            .transpose()
    };
    Ok(parse("from")?.zip(parse("to")?))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Int(i64),
    Str(String),
}

#[derive(Deserialize)]
struct RawRecord {
    id: RawId,
    text: String,
    #[serde(default)]
    opinions: Vec<RawOpinion>,
}

#[derive(Deserialize)]
struct RawOpinion {
    target_entity: String,
    aspect: String,
    sentiment: String,
}

pub fn parse_sentihood(json: &str, kind: SplitKind) -> Result<Split, CorpusError> {
    let records: Vec<RawRecord> = serde_json::from_str(json).map_err(|e| CorpusError::Parse {
        line: e.line() as u32,
        column: e.column() as u32,
        message: e.to_string(),
    })?;
    let schema = Dataset::Sentihood.schema();
    let mut sentences = Vec::with_capacity(records.len());
    let mut notes = Vec::new();
    for record in records {
        let id = match record.id {
            RawId::Int(n) => n.to_string(),
            RawId::Str(s) => s,
        };
        let mut opinions = Vec::new();
        for op in record.opinions {
            let violation = |message: String| CorpusError::SchemaViolation {
                sentence_id: id.clone(),
                message,
            };
            let entity = SENTIHOOD_ENTITIES
                .iter()
                .find(|e| e.eq_ignore_ascii_case(op.target_entity.trim()))
                .ok_or_else(|| violation(format!("unknown target_entity `{}`", op.target_entity)))?;
            let raw_aspect = op.aspect.trim().to_lowercase();
            if !SENTIHOOD_EVALUATED.contains(&raw_aspect.as_str()) {
                if SENTIHOOD_UNEVALUATED.contains(&raw_aspect.as_str()) {
                    notes.push(Diagnostic {
                        sentence_id: id.clone(),
                        kind: DiagnosticKind::UnevaluatedAspect { aspect: op.aspect },
                    });
                    continue;
                }
                return Err(violation(format!("unknown aspect `{}`", op.aspect)));
            }
            let polarity = match op.sentiment.trim().to_lowercase().as_str() {
                "positive" => "positive",
                "negative" => "negative",
                _ => return Err(violation(format!("unknown sentiment `{}`", op.sentiment))),
            };
            let aspect = format!("{entity}#{raw_aspect}");
            opinions.push(Opinion::new(None, &aspect, polarity));
        }
        sentences.push(Sentence {
            id,
            text: record.text,
            opinions,
        });
    }
    Split::with_notes(schema, kind, sentences, notes)
}
