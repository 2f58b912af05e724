//! Aspect-based sentiment analysis as conditional text generation.
//!
//! The crate turns gold opinion annotations into target sequences for a
//! text-to-text model, parses generated text back into opinion tuples, and
//! scores those tuples against gold data.
//!
//! The pipeline is split into five modules:
//!
//! - [`corpus`]: loaders for the SemEval-2014/2015/2016 restaurant XML files
//!   and the Sentihood JSON splits, plus the label schemas of each dataset.
//! - [`taskspec`]: the six detection tasks (AD, TD, ASD, TSD, TAD, TASD) and
//!   projection of opinions onto task-specific tuples.
//! - [`serializer`]: pseudo-phrase and pseudo-sentence target construction.
//! - [`decoder`]: total, fault-tolerant parsing of generated text.
//! - [`metrics`]: micro-F1, Sentihood macro-F1, way-filtered accuracy and the
//!   implicit-target variant, collected into a [`MetricsReport`].
//!
//! ```
//! use absagen::{decode, serialize, DecodePolicy, Dataset, Mode, Opinion, SerializationFormat,
//!               Sentence, TaskInstance, TaskKind};
//!
//! let sentence = Sentence::new(
//!     "1",
//!     "Always crowded, but they are good at seating you promptly and have quick service.",
//!     vec![
//!         Opinion::new(Some("service"), "SERVICE#GENERAL", "positive"),
//!         Opinion::new(None, "SERVICE#GENERAL", "positive"),
//!     ],
//! );
//! let instance = TaskInstance::new(
//!     TaskKind::Tasd,
//!     SerializationFormat::Phrase,
//!     Mode::Joint,
//!     Dataset::Restaurants16.schema(),
//! )
//! .unwrap();
//! let text = serialize(&sentence, &instance).unwrap();
//! assert_eq!(text, "service ~ SERVICE#GENERAL ~ positive ~~ NULL ~ SERVICE#GENERAL ~ positive");
//! let outcome = decode(&text, &instance, &DecodePolicy::strict());
//! assert_eq!(outcome.tuples.len(), 2);
//! ```

pub mod corpus;
pub mod decoder;
pub mod metrics;
pub mod serializer;
pub mod taskspec;

pub use corpus::{
    load_dataset, load_semeval14, load_semeval1516, load_sentihood, validate_split, CorpusError, Dataset, Diagnostic,
    DiagnosticKind, LabelSchema, Opinion, Sentence, Split, SplitKind,
};
pub use decoder::{
    decode, decode_batch, BatchOutcome, DecodeBatchError, DecodeOutcome, DecodePolicy, InstanceSource, LabelRepair,
    PolicyError, Strictness,
};
pub use metrics::{
    accuracy_asd, build_report, compute_metrics, macro_f1_sentihood, micro_f1, score_run, supported_ways,
    tsd_tasd_scores, AccuracyStats, ComputedMetrics, DecodeStats, ImplicitPairing, ImplicitScores, ImplicitTargets,
    MacroF1, MatchCounts, MetricsError, MetricsReport, MicroStats, Prediction, PrfScores, RunInfo, ScoreOptions, Way,
};
pub use serializer::{
    build_training_pairs, default_prefix, serialize, Mode, PredictionRecord, SerializationFormat, SerializeError,
    TaskInstance, TrainingPair, EMPTY_SENTINEL,
};
pub use taskspec::{
    canonical_order, normalize_target, project, project_for_schema, supported_tasks, OpinionTuple, TargetSlot,
    TaskError, TaskKind, TupleSet,
};
