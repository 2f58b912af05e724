//! Construction of pseudo-phrase and pseudo-sentence generation targets.
//!
//! | task | phrase                        | sentence clause                             |
//! |------|-------------------------------|---------------------------------------------|
//! | AD   | `aspect`                      | `opinion on [aspect]`                       |
//! | ASD  | `aspect ~ polarity`           | `[polarity] opinion on [aspect]`            |
//! | TD   | `target`                      | `opinion for [target]`                      |
//! | TSD  | `target ~ polarity`           | `[polarity] opinion for [target]`           |
//! | TAD  | `target ~ aspect`             | `opinion on [aspect] for [target]`          |
//! | TASD | `target ~ aspect ~ polarity`  | `[polarity] opinion on [aspect] for [target]` |
//!
//! Phrase opinions are joined by ` ~~ `. Sentence clauses are joined by `, `
//! and the first one is preceded by `The review expressed`. An implicit
//! target renders as `NULL`; a sentence without opinions renders as
//! [`EMPTY_SENTINEL`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{LabelSchema, Opinion, Sentence, Split};
use crate::taskspec::{canonical_order, supported_tasks, OpinionTuple, TaskError, TaskKind};

pub const EMPTY_SENTINEL: &str = "NONE";
pub const FIELD_SEPARATOR: &str = " ~ ";
pub const OPINION_SEPARATOR: &str = " ~~ ";
pub const SENTENCE_PREFIX: &str = "The review expressed";
pub const IMPLICIT_TOKEN: &str = "NULL";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SerializeError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("sentence {sentence_id}: target `{target}` contains reserved character `{reserved}`")]
    ReservedCharacter {
        sentence_id: String,
        target: String,
        reserved: char,
    },
    #[error("sentence {sentence_id}: output would be indistinguishable from the empty sentinel")]
    SentinelCollision { sentence_id: String },
    #[error("sentence {sentence_id}: label `{label}` is not in the {dataset} schema")]
    UnknownLabel {
        sentence_id: String,
        label: String,
        dataset: &'static str,
    },
    #[error("unknown format `{0}` (expected phrase or sentence)")]
    UnknownFormat(String),
    #[error("unknown mode `{0}` (expected joint or separate)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SerializationFormat {
    Phrase,
    Sentence,
}

impl SerializationFormat {
    pub const ALL: [SerializationFormat; 2] = [SerializationFormat::Phrase, SerializationFormat::Sentence];

    pub fn name(self) -> &'static str {
        match self {
            SerializationFormat::Phrase => "phrase",
            SerializationFormat::Sentence => "sentence",
        }
    }
}

impl fmt::Display for SerializationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SerializationFormat {
    type Err = SerializeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phrase" => Ok(SerializationFormat::Phrase),
            "sentence" => Ok(SerializationFormat::Sentence),
            _ => Err(SerializeError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One model generating the dataset's maximal task.
    Joint,
    /// One model per task, each with its own template.
    Separate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Joint => "joint",
            Mode::Separate => "separate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = SerializeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "joint" => Ok(Mode::Joint),
            "separate" => Ok(Mode::Separate),
            _ => Err(SerializeError::UnknownMode(s.to_string())),
        }
    }
}

/// A task bound to a serialization format, a training mode and a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInstance {
    task: TaskKind,
    format: SerializationFormat,
    mode: Mode,
    schema: LabelSchema,
}

impl TaskInstance {
    pub fn new(
        task: TaskKind,
        format: SerializationFormat,
        mode: Mode,
        schema: LabelSchema,
    ) -> Result<Self, TaskError> {
        if !supported_tasks(&schema).contains(&task) {
            return Err(TaskError::Unsupported {
                task,
                dataset: schema.name(),
            });
        }
        let expected = TaskKind::joint_for(&schema);
        if mode == Mode::Joint && task != expected {
            return Err(TaskError::JointTask {
                task,
                expected,
                dataset: schema.name(),
            });
        }
        Ok(TaskInstance {
            task,
            format,
            mode,
            schema,
        })
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn format(&self) -> SerializationFormat {
        self.format
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn schema(&self) -> &LabelSchema {
        &self.schema
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Target,
    Aspect,
    Polarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ClausePart {
    Word(&'static str),
    Slot(Slot),
}

/// Field order of one phrase-format opinion.
pub(crate) fn phrase_fields(task: TaskKind) -> &'static [Slot] {
    use Slot::*;
    match task {
        TaskKind::Ad => &[Aspect],
        TaskKind::Td => &[Target],
        TaskKind::Asd => &[Aspect, Polarity],
        TaskKind::Tsd => &[Target, Polarity],
        TaskKind::Tad => &[Target, Aspect],
        TaskKind::Tasd => &[Target, Aspect, Polarity],
    }
}

/// One sentence-format clause, without the leading `The review expressed`.
pub(crate) fn clause_template(task: TaskKind) -> &'static [ClausePart] {
    use ClausePart::{Slot as S, Word as W};
    use Slot::*;
    match task {
        TaskKind::Ad => &[W("opinion"), W("on"), S(Aspect)],
        TaskKind::Asd => &[S(Polarity), W("opinion"), W("on"), S(Aspect)],
        TaskKind::Td => &[W("opinion"), W("for"), S(Target)],
        TaskKind::Tsd => &[S(Polarity), W("opinion"), W("for"), S(Target)],
        TaskKind::Tad => &[W("opinion"), W("on"), S(Aspect), W("for"), S(Target)],
        TaskKind::Tasd => &[S(Polarity), W("opinion"), W("on"), S(Aspect), W("for"), S(Target)],
    }
}

/// Renders one sentence into the generation target for `instance`.
///
/// Opinions are put in [`canonical_order`], projected onto the task, and
/// deduplicated on their projection before rendering. Targets keep their
/// original casing.
pub fn serialize(sentence: &Sentence, instance: &TaskInstance) -> Result<String, SerializeError> {
    let task = instance.task();
    let schema = instance.schema();
    if !supported_tasks(schema).contains(&task) {
        return Err(TaskError::Unsupported {
            task,
            dataset: schema.name(),
        }
        .into());
    }
    let mut rendered: Vec<(OpinionTuple, &Opinion)> = Vec::new();
    let ordered = canonical_order(&sentence.opinions, sentence);
    for opinion in &ordered {
        check_labels(sentence, opinion, instance)?;
        let tuple = OpinionTuple::from_opinion(opinion, task);
        if !rendered.iter().any(|(t, _)| *t == tuple) {
            rendered.push((tuple, opinion));
        }
    }
    if rendered.is_empty() {
        return Ok(EMPTY_SENTINEL.to_string());
    }
    let out = match instance.format() {
        SerializationFormat::Phrase => rendered
            .iter()
            .map(|(tuple, opinion)| render_phrase(tuple, opinion, task))
            .collect::<Vec<_>>()
            .join(OPINION_SEPARATOR),
        SerializationFormat::Sentence => {
            let clauses: Vec<String> = rendered
                .iter()
                .map(|(tuple, opinion)| render_clause(tuple, opinion, task))
                .collect();
            format!("{SENTENCE_PREFIX} {}", clauses.join(", "))
        }
    };
    if out.trim() == EMPTY_SENTINEL {
        return Err(SerializeError::SentinelCollision {
            sentence_id: sentence.id.clone(),
        });
    }
    Ok(out)
}

fn check_labels(sentence: &Sentence, opinion: &Opinion, instance: &TaskInstance) -> Result<(), SerializeError> {
    let schema = instance.schema();
    let unknown = |label: &str| SerializeError::UnknownLabel {
        sentence_id: sentence.id.clone(),
        label: label.to_string(),
        dataset: schema.name(),
    };
    if !schema.aspects().contains(&opinion.aspect) {
        return Err(unknown(&opinion.aspect));
    }
    if !schema.polarities().contains(&opinion.polarity) {
        return Err(unknown(&opinion.polarity));
    }
    if let (true, Some(target)) = (instance.task().has_target(), &opinion.target) {
        let reserved: &[char] = match instance.format() {
            SerializationFormat::Phrase => &['~'],
            SerializationFormat::Sentence => &['[', ']'],
        };
        if let Some(c) = target.chars().find(|c| reserved.contains(c)) {
            return Err(SerializeError::ReservedCharacter {
                sentence_id: sentence.id.clone(),
                target: target.clone(),
                reserved: c,
            });
        }
    }
    Ok(())
}

fn slot_text(slot: Slot, tuple: &OpinionTuple, opinion: &Opinion) -> String {
    match slot {
        Slot::Target => match &opinion.target {
            Some(t) if !tuple.has_implicit_target() => t.split_whitespace().collect::<Vec<_>>().join(" "),
            _ => IMPLICIT_TOKEN.to_string(),
        },
        Slot::Aspect => opinion.aspect.clone(),
        Slot::Polarity => opinion.polarity.clone(),
    }
}

fn render_phrase(tuple: &OpinionTuple, opinion: &Opinion, task: TaskKind) -> String {
    phrase_fields(task)
        .iter()
        .map(|&slot| slot_text(slot, tuple, opinion))
        .collect::<Vec<_>>()
        .join(FIELD_SEPARATOR)
}

fn render_clause(tuple: &OpinionTuple, opinion: &Opinion, task: TaskKind) -> String {
    clause_template(task)
        .iter()
        .map(|part| match *part {
            ClausePart::Word(w) => w.to_string(),
            ClausePart::Slot(slot) => format!("[{}]", slot_text(slot, tuple, opinion)),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The default input prefix, e.g. `"tasd: "`.
pub fn default_prefix(task: TaskKind) -> String {
    format!("{}: ", task.name().to_lowercase())
}

/// One seq2seq training example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub id: String,
    pub input: String,
    pub target: String,
}

/// One line of a predictions file: the raw generated text for a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub output: String,
}

pub fn build_training_pairs(
    split: &Split,
    instance: &TaskInstance,
    prefix: &str,
) -> Result<Vec<TrainingPair>, SerializeError> {
    split
        .sentences()
        .iter()
        .map(|sentence| {
            Ok(TrainingPair {
                id: sentence.id.clone(),
                input: format!("{prefix}{}", sentence.text),
                target: serialize(sentence, instance)?,
            })
        })
        .collect()
}
