//! Scoring of predicted tuple sets against gold splits.
//!
//! Tuples match by exact equality after target normalization. Empty
//! denominators score 0. Gold sentences without a prediction are scored as
//! if the prediction were empty and are counted in
//! [`MatchCounts::missing_predictions`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Dataset, Split};
use crate::serializer::{Mode, SerializationFormat};
use crate::taskspec::{project, TaskError, TaskKind, TupleSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("prediction id `{0}` does not exist in the gold split")]
    UnknownId(String),
    #[error("duplicate prediction id `{0}`")]
    DuplicateId(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("{0}")]
    Unsupported(String),
}

/// Decoded output for one gold sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub id: String,
    pub tuples: TupleSet,
}

impl Prediction {
    pub fn new(id: impl Into<String>, tuples: TupleSet) -> Self {
        Prediction { id: id.into(), tuples }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatchCounts {
    pub gold_tuples: usize,
    pub predicted_tuples: usize,
    pub matched_tuples: usize,
    pub scored_sentences: usize,
    pub missing_predictions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroStats {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: MatchCounts,
}

impl MicroStats {
    pub fn from_counts(counts: MatchCounts) -> Self {
        let precision = ratio(counts.matched_tuples, counts.predicted_tuples);
        let recall = ratio(counts.matched_tuples, counts.gold_tuples);
        MicroStats {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
            counts,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn index_predictions<'p>(
    preds: &'p [Prediction],
    gold: &Split,
) -> Result<HashMap<&'p str, &'p TupleSet>, MetricsError> {
    let mut index = HashMap::with_capacity(preds.len());
    for pred in preds {
        if gold.get(&pred.id).is_none() {
            return Err(MetricsError::UnknownId(pred.id.clone()));
        }
        if index.insert(pred.id.as_str(), &pred.tuples).is_some() {
            return Err(MetricsError::DuplicateId(pred.id.clone()));
        }
    }
    Ok(index)
}

/// Pairs every gold sentence with its gold and predicted tuple sets for `task`.
fn aligned(
    preds: &[Prediction],
    gold: &Split,
    task: TaskKind,
) -> Result<(Vec<(TupleSet, TupleSet)>, usize), MetricsError> {
    let index = index_predictions(preds, gold)?;
    let mut missing = 0;
    let mut rows = Vec::with_capacity(gold.len());
    for sentence in gold.sentences() {
        let gold_set = project(&sentence.opinions, task);
        let pred_set = match index.get(sentence.id.as_str()) {
            Some(set) => set.project_to(task)?,
            None => {
                missing += 1;
                TupleSet::new(task)
            }
        };
        rows.push((gold_set, pred_set));
    }
    Ok((rows, missing))
}

fn micro_over(rows: &[(TupleSet, TupleSet)], missing: usize, keep_implicit: bool) -> MicroStats {
    let mut counts = MatchCounts {
        scored_sentences: rows.len(),
        missing_predictions: missing,
        ..MatchCounts::default()
    };
    for (gold, pred) in rows {
        let (gold, pred) = if keep_implicit {
            (gold.clone(), pred.clone())
        } else {
            (gold.explicit_only(), pred.explicit_only())
        };
        counts.gold_tuples += gold.len();
        counts.predicted_tuples += pred.len();
        counts.matched_tuples += gold.matched(&pred);
    }
    MicroStats::from_counts(counts)
}

/// Micro-averaged precision, recall and F1 over pooled tuple matches.
pub fn micro_f1(preds: &[Prediction], gold: &Split, task: TaskKind) -> Result<MicroStats, MetricsError> {
    let (rows, missing) = aligned(preds, gold, task)?;
    Ok(micro_over(&rows, missing, true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroF1 {
    pub macro_f1: f64,
    /// Per-category detection F1; `None` for categories that were skipped.
    pub per_category: BTreeMap<String, Option<f64>>,
}

/// Sentihood aspect detection: binary per-category F1 over sentences,
/// averaged over the eight categories. With `skip_absent`, categories that
/// occur in neither gold nor predictions are left out of the mean.
pub fn macro_f1_sentihood(preds: &[Prediction], gold: &Split, skip_absent: bool) -> Result<MacroF1, MetricsError> {
    if gold.schema().dataset() != Dataset::Sentihood {
        return Err(MetricsError::Unsupported(format!(
            "macro-F1 is defined for sentihood, not {}",
            gold.schema().name()
        )));
    }
    let (rows, _) = aligned(preds, gold, TaskKind::Ad)?;
    let mut per_category = BTreeMap::new();
    let mut scored = Vec::new();
    for category in gold.schema().aspects() {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for (g, p) in &rows {
            let in_gold = g.iter().any(|t| t.aspect() == Some(category));
            let in_pred = p.iter().any(|t| t.aspect() == Some(category));
            match (in_gold, in_pred) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        if skip_absent && tp + fp + fn_ == 0 {
            per_category.insert(category.clone(), None);
            continue;
        }
        let f1 = harmonic_mean(ratio(tp, tp + fp), ratio(tp, tp + fn_));
        per_category.insert(category.clone(), Some(f1));
        scored.push(f1);
    }
    let macro_f1 = if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    };
    Ok(MacroF1 { macro_f1, per_category })
}

/// Polarity subset used by way-filtered sentiment accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Way {
    Four,
    Three,
    Two,
}

impl Way {
    pub const ALL: [Way; 3] = [Way::Four, Way::Three, Way::Two];

    pub fn label(self) -> &'static str {
        match self {
            Way::Four => "4-way",
            Way::Three => "3-way",
            Way::Two => "2-way",
        }
    }

    fn polarities(self) -> &'static [&'static str] {
        match self {
            Way::Four => &["positive", "negative", "neutral", "conflict"],
            Way::Three => &["positive", "negative", "neutral"],
            Way::Two => &["positive", "negative"],
        }
    }
}

impl fmt::Display for Way {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl TryFrom<u8> for Way {
    type Error = MetricsError;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            4 => Ok(Way::Four),
            3 => Ok(Way::Three),
            2 => Ok(Way::Two),
            _ => Err(MetricsError::Unsupported(format!("{n}-way accuracy"))),
        }
    }
}

/// The ways [`accuracy_asd`] accepts for a gold split's schema.
pub fn supported_ways(gold: &Split) -> Vec<Way> {
    let schema = gold.schema();
    if schema.dataset() == Dataset::Sentihood {
        return vec![Way::Three];
    }
    Way::ALL
        .into_iter()
        .filter(|w| w.polarities().iter().all(|p| schema.polarities().contains(*p)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyStats {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// Sentiment accuracy over (sentence, aspect) units.
///
/// Restaurant data: the units are gold ASD tuples whose polarity lies in the
/// way's subset; a unit is correct when the prediction holds the same aspect
/// with the same polarity. Sentihood (3-way only): the units are every
/// sentence paired with each of the eight categories, labelled `none` when
/// unmentioned, and a unit is correct when the predicted label agrees.
pub fn accuracy_asd(preds: &[Prediction], gold: &Split, way: Way) -> Result<AccuracyStats, MetricsError> {
    if !supported_ways(gold).contains(&way) {
        return Err(MetricsError::Unsupported(format!(
            "{way} accuracy is not defined for {}",
            gold.schema().name()
        )));
    }
    let (rows, _) = aligned(preds, gold, TaskKind::Asd)?;
    let (mut correct, mut total) = (0, 0);
    if gold.schema().dataset() == Dataset::Sentihood {
        for (g, p) in &rows {
            for category in gold.schema().aspects() {
                total += 1;
                if implied_labels(g, category) == implied_labels(p, category) {
                    correct += 1;
                }
            }
        }
    } else {
        let subset = way.polarities();
        for (g, p) in &rows {
            for unit in g
                .iter()
                .filter(|t| t.polarity().is_some_and(|pol| subset.contains(&pol)))
            {
                total += 1;
                if p.contains(unit) {
                    correct += 1;
                }
            }
        }
    }
    Ok(AccuracyStats {
        correct,
        total,
        accuracy: ratio(correct, total),
    })
}

/// Polarity labels given to `category`, with `none` when it is unmentioned.
fn implied_labels<'s>(set: &'s TupleSet, category: &str) -> BTreeSet<&'s str> {
    let labels: BTreeSet<&str> = set
        .iter()
        .filter(|t| t.aspect() == Some(category))
        .filter_map(|t| t.polarity())
        .collect();
    if labels.is_empty() {
        BTreeSet::from(["none"])
    } else {
        labels
    }
}

/// Which of the two TSD/TASD numbers is the headline one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicitPairing {
    /// Headline score ignores implicit-target tuples; the variant keeps them.
    #[default]
    OverallExcludesImplicit,
    OverallIncludesImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImplicitTargets {
    Excluded,
    Included,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitScores {
    pub overall: MicroStats,
    pub implicit_variant: MicroStats,
    pub pairing: ImplicitPairing,
}

/// Micro scores for TSD/TASD with and without implicit-target tuples.
pub fn tsd_tasd_scores(
    preds: &[Prediction],
    gold: &Split,
    task: TaskKind,
    pairing: ImplicitPairing,
) -> Result<ImplicitScores, MetricsError> {
    if !matches!(task, TaskKind::Tsd | TaskKind::Tasd) {
        return Err(MetricsError::Unsupported(format!(
            "the implicit-target variant applies to TSD and TASD, not {task}"
        )));
    }
    if !gold.schema().supports_targets() {
        return Err(TaskError::Unsupported {
            task,
            dataset: gold.schema().name(),
        }
        .into());
    }
    let (rows, missing) = aligned(preds, gold, task)?;
    let excluding = micro_over(&rows, missing, false);
    let including = micro_over(&rows, missing, true);
    let (overall, implicit_variant) = match pairing {
        ImplicitPairing::OverallExcludesImplicit => (excluding, including),
        ImplicitPairing::OverallIncludesImplicit => (including, excluding),
    };
    Ok(ImplicitScores {
        overall,
        implicit_variant,
        pairing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecodeStats {
    pub dropped: usize,
    pub repairs: usize,
}

/// Identifies one scored run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunInfo {
    pub dataset: Dataset,
    pub task: TaskKind,
    pub format: SerializationFormat,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub implicit_pairing: ImplicitPairing,
    pub skip_absent_categories: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            implicit_pairing: ImplicitPairing::default(),
            skip_absent_categories: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implicit_targets: Option<ImplicitTargets>,
}

impl PrfScores {
    fn new(stats: &MicroStats, implicit_targets: Option<ImplicitTargets>) -> Self {
        PrfScores {
            precision: stats.precision,
            recall: stats.recall,
            f1: stats.f1,
            implicit_targets,
        }
    }
}

/// Everything computed for one run, before assembly into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputedMetrics {
    pub micro: MicroStats,
    pub macro_f1: Option<MacroF1>,
    pub accuracy: Vec<(Way, AccuracyStats)>,
    pub implicit: Option<ImplicitScores>,
}

/// Serializable summary of one scored run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dataset: Dataset,
    pub task: TaskKind,
    pub format: SerializationFormat,
    pub mode: Mode,
    pub micro: PrfScores,
    pub macro_f1: Option<f64>,
    pub accuracy: Option<BTreeMap<String, f64>>,
    pub implicit_variant: Option<PrfScores>,
    pub counts: MatchCounts,
    pub decode_stats: DecodeStats,
    pub toolkit_version: String,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report fields are always serializable");
        out.push('\n');
        out
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Assembles a report. When `metrics.implicit` is set, its headline number
/// is reported as `micro` and the other as `implicit_variant`.
pub fn build_report(run: &RunInfo, metrics: &ComputedMetrics, decode_stats: DecodeStats) -> MetricsReport {
    let (micro, implicit_variant, counts) = match &metrics.implicit {
        Some(implicit) => {
            let (head, variant) = match implicit.pairing {
                ImplicitPairing::OverallExcludesImplicit => (ImplicitTargets::Excluded, ImplicitTargets::Included),
                ImplicitPairing::OverallIncludesImplicit => (ImplicitTargets::Included, ImplicitTargets::Excluded),
            };
            (
                PrfScores::new(&implicit.overall, Some(head)),
                Some(PrfScores::new(&implicit.implicit_variant, Some(variant))),
                implicit.overall.counts,
            )
        }
        None => (PrfScores::new(&metrics.micro, None), None, metrics.micro.counts),
    };
    let accuracy = (!metrics.accuracy.is_empty()).then(|| {
        metrics
            .accuracy
            .iter()
            .map(|(way, stats)| (way.label().to_string(), stats.accuracy))
            .collect()
    });
    MetricsReport {
        dataset: run.dataset,
        task: run.task,
        format: run.format,
        mode: run.mode,
        micro,
        macro_f1: metrics.macro_f1.as_ref().map(|m| m.macro_f1),
        accuracy,
        implicit_variant,
        counts,
        decode_stats,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Computes every metric that applies to the run's dataset and task.
pub fn compute_metrics(
    preds: &[Prediction],
    gold: &Split,
    task: TaskKind,
    options: &ScoreOptions,
) -> Result<ComputedMetrics, MetricsError> {
    let implicit = match task {
        TaskKind::Tsd | TaskKind::Tasd => Some(tsd_tasd_scores(preds, gold, task, options.implicit_pairing)?),
        _ => None,
    };
    let micro = match &implicit {
        Some(scores) => scores.overall,
        None => micro_f1(preds, gold, task)?,
    };
    let macro_f1 = if task == TaskKind::Ad && gold.schema().dataset() == Dataset::Sentihood {
        Some(macro_f1_sentihood(preds, gold, options.skip_absent_categories)?)
    } else {
        None
    };
    let accuracy = if task == TaskKind::Asd {
        supported_ways(gold)
            .into_iter()
            .map(|way| Ok((way, accuracy_asd(preds, gold, way)?)))
            .collect::<Result<_, MetricsError>>()?
    } else {
        Vec::new()
    };
    Ok(ComputedMetrics {
        micro,
        macro_f1,
        accuracy,
        implicit,
    })
}

pub fn score_run(
    preds: &[Prediction],
    gold: &Split,
    run: &RunInfo,
    decode_stats: DecodeStats,
    options: &ScoreOptions,
) -> Result<MetricsReport, MetricsError> {
    if run.dataset != gold.schema().dataset() {
        return Err(MetricsError::Unsupported(format!(
            "run is labelled {} but the gold split is {}",
            run.dataset,
            gold.schema().name()
        )));
    }
    let metrics = compute_metrics(preds, gold, run.task, options)?;
    Ok(build_report(run, &metrics, decode_stats))
}
