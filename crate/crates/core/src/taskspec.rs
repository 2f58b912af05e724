//! The six detection tasks and projection of opinions onto task tuples.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{LabelSchema, Opinion, Sentence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaskError {
    #[error("task {task} is not supported on {dataset}")]
    Unsupported { task: TaskKind, dataset: &'static str },
    #[error("cannot project {from} tuples onto {to}")]
    IncompatibleProjection { from: TaskKind, to: TaskKind },
    #[error("tuple shape does not match task {task}")]
    ShapeMismatch { task: TaskKind },
    #[error("joint mode on {dataset} must use task {expected}, not {task}")]
    JointTask {
        task: TaskKind,
        expected: TaskKind,
        dataset: &'static str,
    },
    #[error("unknown task `{0}` (expected one of AD, TD, ASD, TSD, TAD, TASD)")]
    UnknownTask(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TaskKind {
    Ad,
    Td,
    Asd,
    Tsd,
    Tad,
    Tasd,
}

impl TaskKind {
    pub const ALL: [TaskKind; 6] = [
        TaskKind::Ad,
        TaskKind::Td,
        TaskKind::Asd,
        TaskKind::Tsd,
        TaskKind::Tad,
        TaskKind::Tasd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Ad => "AD",
            TaskKind::Td => "TD",
            TaskKind::Asd => "ASD",
            TaskKind::Tsd => "TSD",
            TaskKind::Tad => "TAD",
            TaskKind::Tasd => "TASD",
        }
    }

    pub fn has_target(self) -> bool {
        matches!(self, TaskKind::Td | TaskKind::Tsd | TaskKind::Tad | TaskKind::Tasd)
    }

    pub fn has_aspect(self) -> bool {
        matches!(self, TaskKind::Ad | TaskKind::Asd | TaskKind::Tad | TaskKind::Tasd)
    }

    pub fn has_polarity(self) -> bool {
        matches!(self, TaskKind::Asd | TaskKind::Tsd | TaskKind::Tasd)
    }

    /// True when every field of `self` is also a field of `other`.
    pub fn is_projection_of(self, other: TaskKind) -> bool {
        (!self.has_target() || other.has_target())
            && (!self.has_aspect() || other.has_aspect())
            && (!self.has_polarity() || other.has_polarity())
    }

    /// The maximal task a joint model is trained on for this schema.
    pub fn joint_for(schema: &LabelSchema) -> TaskKind {
        if schema.supports_targets() {
            TaskKind::Tasd
        } else {
            TaskKind::Asd
        }
    }

    fn from_fields(target: bool, aspect: bool, polarity: bool) -> Option<TaskKind> {
        match (target, aspect, polarity) {
            (false, true, false) => Some(TaskKind::Ad),
            (true, false, false) => Some(TaskKind::Td),
            (false, true, true) => Some(TaskKind::Asd),
            (true, false, true) => Some(TaskKind::Tsd),
            (true, true, false) => Some(TaskKind::Tad),
            (true, true, true) => Some(TaskKind::Tasd),
            _ => None,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = TaskError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TaskError::UnknownTask(s.to_string()))
    }
}

/// Lowercase, trim, and collapse internal whitespace runs to one space.
pub fn normalize_target(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Target field of a tuple. `Implicit` can never collide with a real target:
/// a target normalizing to `null` is itself read as implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetSlot {
    Implicit,
    Explicit(String),
}

impl TargetSlot {
    pub fn from_raw(raw: Option<&str>) -> TargetSlot {
        match raw.map(normalize_target) {
            Some(t) if !t.is_empty() && t != "null" => TargetSlot::Explicit(t),
            _ => TargetSlot::Implicit,
        }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, TargetSlot::Implicit)
    }
}

impl fmt::Display for TargetSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSlot::Implicit => f.write_str("NULL"),
            TargetSlot::Explicit(t) => f.write_str(t),
        }
    }
}

/// An opinion projected onto one task: only the task's fields are set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpinionTuple {
    target: Option<TargetSlot>,
    aspect: Option<String>,
    polarity: Option<String>,
}

impl OpinionTuple {
    /// Returns `None` unless exactly the fields of `task` are given.
    pub fn new(
        task: TaskKind,
        target: Option<TargetSlot>,
        aspect: Option<&str>,
        polarity: Option<&str>,
    ) -> Option<Self> {
        let tuple = OpinionTuple {
            target,
            aspect: aspect.map(str::to_string),
            polarity: polarity.map(str::to_string),
        };
        (tuple.task() == Some(task)).then_some(tuple)
    }

    pub fn from_opinion(opinion: &Opinion, task: TaskKind) -> Self {
        OpinionTuple {
            target: task
                .has_target()
                .then(|| TargetSlot::from_raw(opinion.target.as_deref())),
            aspect: task.has_aspect().then(|| opinion.aspect.clone()),
            polarity: task.has_polarity().then(|| opinion.polarity.clone()),
        }
    }

    pub fn target(&self) -> Option<&TargetSlot> {
        self.target.as_ref()
    }

    pub fn aspect(&self) -> Option<&str> {
        self.aspect.as_deref()
    }

    pub fn polarity(&self) -> Option<&str> {
        self.polarity.as_deref()
    }

    pub fn task(&self) -> Option<TaskKind> {
        TaskKind::from_fields(self.target.is_some(), self.aspect.is_some(), self.polarity.is_some())
    }

    pub fn has_implicit_target(&self) -> bool {
        self.target.as_ref().is_some_and(TargetSlot::is_implicit)
    }

    /// Drops the fields `task` does not use. `None` if a needed field is unset.
    pub fn project(&self, task: TaskKind) -> Option<OpinionTuple> {
        let tuple = OpinionTuple {
            target: if task.has_target() {
                Some(self.target.clone()?)
            } else {
                None
            },
            aspect: if task.has_aspect() {
                Some(self.aspect.clone()?)
            } else {
                None
            },
            polarity: if task.has_polarity() {
                Some(self.polarity.clone()?)
            } else {
                None
            },
        };
        Some(tuple)
    }
}

impl fmt::Display for OpinionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::with_capacity(3);
        if let Some(t) = &self.target {
            parts.push(t.to_string());
        }
        if let Some(a) = &self.aspect {
            parts.push(a.clone());
        }
        if let Some(p) = &self.polarity {
            parts.push(p.clone());
        }
        write!(f, "({})", parts.join(", "))
    }
}

/// Duplicate-free set of tuples sharing one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSet {
    task: TaskKind,
    tuples: BTreeSet<OpinionTuple>,
}

impl TupleSet {
    pub fn new(task: TaskKind) -> Self {
        TupleSet {
            task,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples(task: TaskKind, tuples: impl IntoIterator<Item = OpinionTuple>) -> Result<Self, TaskError> {
        let mut set = TupleSet::new(task);
        for tuple in tuples {
            set.insert(tuple)?;
        }
        Ok(set)
    }

    /// Inserts a tuple; returns whether it was new.
    pub fn insert(&mut self, tuple: OpinionTuple) -> Result<bool, TaskError> {
        if tuple.task() != Some(self.task) {
            return Err(TaskError::ShapeMismatch { task: self.task });
        }
        Ok(self.tuples.insert(tuple))
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &OpinionTuple) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpinionTuple> {
        self.tuples.iter()
    }

    /// Size of the intersection with `other`.
    pub fn matched(&self, other: &TupleSet) -> usize {
        self.tuples.intersection(&other.tuples).count()
    }

    pub fn project_to(&self, task: TaskKind) -> Result<TupleSet, TaskError> {
        if !task.is_projection_of(self.task) {
            return Err(TaskError::IncompatibleProjection {
                from: self.task,
                to: task,
            });
        }
        let tuples = self.tuples.iter().filter_map(|t| t.project(task)).collect();
        Ok(TupleSet { task, tuples })
    }

    /// The subset of tuples with an explicit target (all of them for tasks
    /// without a target field).
    pub fn explicit_only(&self) -> TupleSet {
        TupleSet {
            task: self.task,
            tuples: self
                .tuples
                .iter()
                .filter(|t| !t.has_implicit_target())
                .cloned()
                .collect(),
        }
    }
}

impl<'a> IntoIterator for &'a TupleSet {
    type Item = &'a OpinionTuple;
    type IntoIter = std::collections::btree_set::Iter<'a, OpinionTuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.tuples.iter()
    }
}

/// Projects gold opinions onto `task`, collapsing duplicates.
pub fn project(opinions: &[Opinion], task: TaskKind) -> TupleSet {
    TupleSet {
        task,
        tuples: opinions.iter().map(|o| OpinionTuple::from_opinion(o, task)).collect(),
    }
}

/// [`project`], refusing target-bearing tasks on schemas without targets.
pub fn project_for_schema(opinions: &[Opinion], task: TaskKind, schema: &LabelSchema) -> Result<TupleSet, TaskError> {
    if !supported_tasks(schema).contains(&task) {
        return Err(TaskError::Unsupported {
            task,
            dataset: schema.name(),
        });
    }
    Ok(project(opinions, task))
}

pub fn supported_tasks(schema: &LabelSchema) -> BTreeSet<TaskKind> {
    if schema.supports_targets() {
        TaskKind::ALL.into_iter().collect()
    } else {
        [TaskKind::Ad, TaskKind::Asd].into_iter().collect()
    }
}

/// Deterministic generation order: explicit targets by first occurrence in
/// the text (targets not found in the text after those, by string), then
/// implicit targets; ties broken by aspect, polarity, then target.
pub fn canonical_order(opinions: &[Opinion], sentence: &Sentence) -> Vec<Opinion> {
    let text = sentence.text.to_lowercase();
    let mut ordered = opinions.to_vec();
    ordered.sort_by_cached_key(|o| {
        let (group, position, by_string) = match &o.target {
            Some(t) => {
                let needle = t.trim().to_lowercase();
                match text.find(&needle) {
                    Some(pos) => (0u8, pos, String::new()),
                    None => (1, 0, needle),
                }
            }
            None => (2, 0, String::new()),
        };
        (
            group,
            position,
            by_string,
            o.aspect.clone(),
            o.polarity.clone(),
            o.target.clone(),
        )
    });
    ordered.dedup();
    ordered
}
