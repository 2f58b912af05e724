//! Parsing generated text back into tuples.
//!
//! [`decode`] accepts any string. Fragments that cannot be bound to the
//! task's template are dropped and counted in [`DecodeOutcome::dropped`];
//! well-formed siblings always survive.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::LabelSchema;
use crate::serializer::{
    clause_template, phrase_fields, ClausePart, SerializationFormat, Slot, TaskInstance, EMPTY_SENTINEL,
};
use crate::taskspec::{OpinionTuple, TargetSlot, TupleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelRepair {
    #[default]
    Off,
    /// Replace an unknown label with the unique schema label within
    /// `max_distance` edits (case-insensitive).
    NearestMatch { max_distance: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("nearest-match repair needs a positive edit-distance budget")]
    ZeroBudget,
    #[error("unknown decode policy `{0}` (expected strict, lenient or lenient:N)")]
    Unknown(String),
}

/// How [`decode`] treats labels outside the schema. Repair only applies
/// under [`Strictness::Lenient`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodePolicy {
    strictness: Strictness,
    repair: LabelRepair,
}

impl DecodePolicy {
    pub const DEFAULT_REPAIR_BUDGET: usize = 2;

    /// Drop malformed fragments, never repair. Used for headline scores.
    pub fn strict() -> Self {
        DecodePolicy::default()
    }

    pub fn lenient(repair: LabelRepair) -> Result<Self, PolicyError> {
        if let LabelRepair::NearestMatch { max_distance: 0 } = repair {
            return Err(PolicyError::ZeroBudget);
        }
        Ok(DecodePolicy {
            strictness: Strictness::Lenient,
            repair,
        })
    }

    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    pub fn repair(&self) -> LabelRepair {
        self.repair
    }

    fn repair_budget(&self) -> Option<usize> {
        match (self.strictness, self.repair) {
            (Strictness::Lenient, LabelRepair::NearestMatch { max_distance }) => Some(max_distance),
            _ => None,
        }
    }
}

impl fmt::Display for DecodePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.strictness, self.repair) {
            (Strictness::Strict, _) => f.write_str("strict"),
            (Strictness::Lenient, LabelRepair::Off) => f.write_str("lenient:0"),
            (Strictness::Lenient, LabelRepair::NearestMatch { max_distance }) => {
                write!(f, "lenient:{max_distance}")
            }
        }
    }
}

impl FromStr for DecodePolicy {
    type Err = PolicyError;

    /// `strict`, `lenient` (repair budget 2), or `lenient:N` (`N = 0`
    /// disables repair).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            None if s == "strict" => Ok(DecodePolicy::strict()),
            None if s == "lenient" => DecodePolicy::lenient(LabelRepair::NearestMatch {
                max_distance: Self::DEFAULT_REPAIR_BUDGET,
            }),
            Some(("lenient", n)) => match n.trim().parse::<usize>() {
                Ok(0) => DecodePolicy::lenient(LabelRepair::Off),
                Ok(max_distance) => DecodePolicy::lenient(LabelRepair::NearestMatch { max_distance }),
                Err(_) => Err(PolicyError::Unknown(s.clone())),
            },
            _ => Err(PolicyError::Unknown(s.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub tuples: TupleSet,
    pub dropped: usize,
    pub repairs: usize,
    pub notes: Vec<String>,
}

enum LabelKind {
    Aspect,
    Polarity,
}

struct Decoder<'a> {
    instance: &'a TaskInstance,
    policy: &'a DecodePolicy,
    outcome: DecodeOutcome,
}

impl<'a> Decoder<'a> {
    fn new(instance: &'a TaskInstance, policy: &'a DecodePolicy) -> Self {
        Decoder {
            instance,
            policy,
            outcome: DecodeOutcome {
                tuples: TupleSet::new(instance.task()),
                dropped: 0,
                repairs: 0,
                notes: Vec::new(),
            },
        }
    }

    fn drop_fragment(&mut self, fragment: &str, reason: String) {
        self.outcome.dropped += 1;
        self.outcome
            .notes
            .push(format!("dropped `{}`: {reason}", fragment.trim()));
    }

    /// Binds raw slot values (in template order) to a tuple, or explains why
    /// the fragment is malformed.
    fn bind(&mut self, slots: &[Slot], values: &[&str]) -> Result<OpinionTuple, String> {
        debug_assert_eq!(slots.len(), values.len());
        let mut target = None;
        let mut aspect = None;
        let mut polarity = None;
        let mut repairs = Vec::new();
        for (&slot, &raw) in slots.iter().zip(values) {
            let raw = raw.trim();
            match slot {
                Slot::Target => {
                    if raw.is_empty() {
                        return Err("empty target".into());
                    }
                    target = Some(TargetSlot::from_raw(Some(raw)));
                }
                Slot::Aspect => {
                    let (label, repaired) = self.resolve(raw, LabelKind::Aspect)?;
                    if repaired {
                        repairs.push((raw.to_string(), label.clone()));
                    }
                    aspect = Some(label);
                }
                Slot::Polarity => {
                    let (label, repaired) = self.resolve(raw, LabelKind::Polarity)?;
                    if repaired {
                        repairs.push((raw.to_string(), label.clone()));
                    }
                    polarity = Some(label);
                }
            }
        }
        let tuple = OpinionTuple::new(self.instance.task(), target, aspect.as_deref(), polarity.as_deref())
            .ok_or_else(|| "slot set does not match the task".to_string())?;
        for (raw, label) in repairs {
            self.outcome.repairs += 1;
            self.outcome.notes.push(format!("repaired `{raw}` to `{label}`"));
        }
        Ok(tuple)
    }

    fn resolve(&self, raw: &str, kind: LabelKind) -> Result<(String, bool), String> {
        let schema: &LabelSchema = self.instance.schema();
        let (exact, labels, what) = match kind {
            LabelKind::Aspect => (schema.canonical_aspect(raw), schema.aspects(), "aspect"),
            LabelKind::Polarity => (schema.canonical_polarity(raw), schema.polarities(), "polarity"),
        };
        if let Some(label) = exact {
            return Ok((label.to_string(), false));
        }
        let Some(budget) = self.policy.repair_budget() else {
            return Err(format!("unknown {what} `{raw}`"));
        };
        match nearest_label(raw, labels.iter().map(String::as_str), budget) {
            Some(label) => Ok((label.to_string(), true)),
            None => Err(format!(
                "unknown {what} `{raw}` (no unique label within {budget} edits)"
            )),
        }
    }

    fn accept(&mut self, tuple: OpinionTuple) {
        // shape was checked in `bind`
        let _ = self.outcome.tuples.insert(tuple);
    }

    fn decode_phrase(&mut self, text: &str) {
        let fields = phrase_fields(self.instance.task());
        for fragment in split_opinions(text) {
            if fragment.trim().is_empty() {
                self.outcome.notes.push("ignored empty fragment".into());
                continue;
            }
            let values: Vec<&str> = fragment.split('~').collect();
            if values.len() != fields.len() {
                let reason = format!("expected {} field(s), found {}", fields.len(), values.len());
                self.drop_fragment(fragment, reason);
                continue;
            }
            match self.bind(fields, &values) {
                Ok(tuple) => self.accept(tuple),
                Err(reason) => self.drop_fragment(fragment, reason),
            }
        }
    }

    fn decode_sentence(&mut self, text: &str) {
        let template = clause_template(self.instance.task());
        let slots: Vec<Slot> = template
            .iter()
            .filter_map(|p| match p {
                ClausePart::Slot(s) => Some(*s),
                ClausePart::Word(_) => None,
            })
            .collect();
        for clause in split_clauses(text) {
            if clause.trim().is_empty() {
                self.outcome.notes.push("ignored empty clause".into());
                continue;
            }
            let parsed = tokenize_clause(clause).and_then(|tokens| match_template(&tokens, template));
            match parsed {
                Ok(values) => match self.bind(&slots, &values) {
                    Ok(tuple) => self.accept(tuple),
                    Err(reason) => self.drop_fragment(clause, reason),
                },
                Err(reason) => self.drop_fragment(clause, reason),
            }
        }
    }
}

/// Parses generated `text` for `instance`. Never fails.
pub fn decode(text: &str, instance: &TaskInstance, policy: &DecodePolicy) -> DecodeOutcome {
    let mut decoder = Decoder::new(instance, policy);
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == EMPTY_SENTINEL {
        return decoder.outcome;
    }
    match instance.format() {
        SerializationFormat::Phrase => decoder.decode_phrase(trimmed),
        SerializationFormat::Sentence => decoder.decode_sentence(trimmed),
    }
    decoder.outcome
}

/// Splits on every run of two or more `~`.
fn split_opinions(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c != '~' {
            continue;
        }
        let mut end = i + 1;
        let mut run = 1;
        while let Some(&(j, '~')) = chars.peek() {
            end = j + 1;
            run += 1;
            chars.next();
        }
        if run >= 2 {
            out.push(&text[start..i]);
            start = end;
        }
    }
    out.push(&text[start..]);
    out
}

/// Splits a pseudo-sentence on commas outside brackets.
fn split_clauses(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

#[derive(Debug, PartialEq)]
enum Token<'t> {
    Word(&'t str),
    Slot(&'t str),
}

fn tokenize_clause(clause: &str) -> Result<Vec<Token<'_>>, String> {
    let mut tokens = Vec::new();
    let mut rest = clause.trim();
    // a trailing full stop is not part of any template
    if let Some(stripped) = rest.strip_suffix('.') {
        if stripped.trim_end().ends_with(']') {
            rest = stripped.trim_end();
        }
    }
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('[') {
            let close = after.find(']').ok_or("unclosed `[`")?;
            let inner = &after[..close];
            if inner.contains('[') {
                return Err("nested `[`".into());
            }
            tokens.push(Token::Slot(inner));
            rest = after[close + 1..].trim_start();
        } else if rest.starts_with(']') {
            return Err("unmatched `]`".into());
        } else {
            let end = rest
                .find(|c: char| c.is_whitespace() || c == '[' || c == ']')
                .unwrap_or(rest.len());
            tokens.push(Token::Word(&rest[..end]));
            rest = rest[end..].trim_start();
        }
    }
    Ok(tokens)
}

fn match_template<'t>(tokens: &[Token<'t>], template: &[ClausePart]) -> Result<Vec<&'t str>, String> {
    let prefix = ["the", "review", "expressed"];
    let has_prefix = tokens.len() >= prefix.len()
        && tokens
            .iter()
            .zip(prefix)
            .all(|(t, w)| matches!(t, Token::Word(x) if x.eq_ignore_ascii_case(w)));
    let body = if has_prefix { &tokens[prefix.len()..] } else { tokens };
    if body.len() != template.len() {
        return Err(format!(
            "expected {} template token(s), found {}",
            template.len(),
            body.len()
        ));
    }
    let mut values = Vec::new();
    for (token, part) in body.iter().zip(template) {
        match (token, part) {
            (Token::Word(w), ClausePart::Word(expected)) if w.eq_ignore_ascii_case(expected) => {}
            (Token::Slot(v), ClausePart::Slot(_)) => values.push(*v),
            (Token::Word(w), ClausePart::Word(expected)) => return Err(format!("expected `{expected}`, found `{w}`")),
            (Token::Word(w), ClausePart::Slot(_)) => return Err(format!("expected a slot, found `{w}`")),
            (Token::Slot(v), ClausePart::Word(expected)) => {
                return Err(format!("expected `{expected}`, found slot `[{v}]`"))
            }
        }
    }
    Ok(values)
}

/// The unique label within `budget` case-insensitive edits of `raw` with
/// the smallest distance; `None` if there is none or the minimum is shared.
fn nearest_label<'l>(raw: &str, labels: impl Iterator<Item = &'l str>, budget: usize) -> Option<&'l str> {
    let raw = raw.to_lowercase();
    let mut best: Option<(usize, &'l str)> = None;
    let mut tied = false;
    for label in labels {
        let d = strsim::levenshtein(&raw, &label.to_lowercase());
        if d > budget {
            continue;
        }
        match best {
            Some((bd, _)) if d > bd => {}
            Some((bd, _)) if d == bd => tied = true,
            _ => {
                best = Some((d, label));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(_, l)| l)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeBatchError {
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("no task instance for record `{0}`")]
    MissingInstance(String),
}

/// Where [`decode_batch`] gets each record's instance.
#[derive(Debug, Clone, Copy)]
pub enum InstanceSource<'a> {
    Shared(&'a TaskInstance),
    PerRecord(&'a HashMap<String, TaskInstance>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BatchOutcome {
    pub outcomes: BTreeMap<String, DecodeOutcome>,
    pub dropped: usize,
    pub repairs: usize,
}

/// Decodes `(id, text)` records. Ids must be unique.
pub fn decode_batch(
    records: &[(String, String)],
    instances: InstanceSource<'_>,
    policy: &DecodePolicy,
) -> Result<BatchOutcome, DecodeBatchError> {
    let mut seen = HashSet::new();
    for (id, _) in records {
        if !seen.insert(id.as_str()) {
            return Err(DecodeBatchError::DuplicateId(id.clone()));
        }
    }
    let mut batch = BatchOutcome::default();
    for (id, text) in records {
        let instance = match instances {
            InstanceSource::Shared(instance) => instance,
            InstanceSource::PerRecord(map) => map
                .get(id)
                .ok_or_else(|| DecodeBatchError::MissingInstance(id.clone()))?,
        };
        let outcome = decode(text, instance, policy);
        batch.dropped += outcome.dropped;
        batch.repairs += outcome.repairs;
        batch.outcomes.insert(id.clone(), outcome);
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Dataset;
    use crate::serializer::Mode;
    use crate::taskspec::TaskKind;

    fn instance(task: TaskKind, format: SerializationFormat) -> TaskInstance {
        TaskInstance::new(task, format, Mode::Separate, Dataset::Restaurants16.schema()).unwrap()
    }

    fn tasd(target: Option<&str>, aspect: &str, polarity: &str) -> OpinionTuple {
        OpinionTuple::new(
            TaskKind::Tasd,
            Some(TargetSlot::from_raw(target)),
            Some(aspect),
            Some(polarity),
        )
        .unwrap()
    }

    fn worked_tuples() -> TupleSet {
        TupleSet::from_tuples(
            TaskKind::Tasd,
            [
                tasd(Some("service"), "SERVICE#GENERAL", "positive"),
                tasd(None, "SERVICE#GENERAL", "positive"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_phrase_decodes() {
        let text = "service ~ SERVICE#GENERAL ~ positive ~~ NULL ~ SERVICE#GENERAL ~ positive";
        let out = decode(
            text,
            &instance(TaskKind::Tasd, SerializationFormat::Phrase),
            &DecodePolicy::strict(),
        );
        assert_eq!(out.tuples, worked_tuples());
        assert_eq!(out.dropped, 0);
    }

    #[test]
    fn worked_sentence_decodes() {
        let text = "The review expressed [positive] opinion on [SERVICE#GENERAL] for [service], \
                    [positive] opinion on [SERVICE#GENERAL] for [NULL]";
        let out = decode(
            text,
            &instance(TaskKind::Tasd, SerializationFormat::Sentence),
            &DecodePolicy::strict(),
        );
        assert_eq!(out.tuples, worked_tuples());
        assert_eq!(out.dropped, 0);
    }

    #[test]
    fn misspelled_label_repair() {
        let inst = instance(TaskKind::Tasd, SerializationFormat::Phrase);
        let text = "food ~ FOOD#QUALTY ~ positive";
        let lenient = DecodePolicy::lenient(LabelRepair::NearestMatch { max_distance: 2 }).unwrap();
        let out = decode(text, &inst, &lenient);
        assert_eq!(out.repairs, 1);
        assert!(out.tuples.contains(&tasd(Some("food"), "FOOD#QUALITY", "positive")));
        assert_eq!(out.tuples.len(), 1);

        let strict = decode(text, &inst, &DecodePolicy::strict());
        assert!(strict.tuples.is_empty());
        assert_eq!(strict.dropped, 1);
    }

    #[test]
    fn ambiguous_repair_is_malformed() {
        // "nesitive" is two edits from both "positive" and "negative"
        let inst = instance(TaskKind::Asd, SerializationFormat::Phrase);
        let out = decode("FOOD#QUALITY ~ nesitive", &inst, &"lenient".parse().unwrap());
        assert!(out.tuples.is_empty());
        assert_eq!((out.dropped, out.repairs), (1, 0));
        let out = decode("FOOD#QUALITY ~ negtive", &inst, &"lenient".parse().unwrap());
        assert_eq!((out.tuples.len(), out.repairs), (1, 1));
        assert_eq!(nearest_label("ab", ["aa", "bb"].into_iter(), 1), None);
    }

    #[test]
    fn sentinel_and_blank_decode_to_empty() {
        let inst = instance(TaskKind::Tasd, SerializationFormat::Sentence);
        for text in ["NONE", "", "   \n", " NONE "] {
            let out = decode(text, &inst, &DecodePolicy::strict());
            assert!(out.tuples.is_empty());
            assert_eq!(out.dropped, 0);
        }
    }

    #[test]
    fn tripled_separators_are_tolerated() {
        let text = "service~positive ~~~ NULL ~ negative";
        let out = decode(
            text,
            &instance(TaskKind::Tsd, SerializationFormat::Phrase),
            &DecodePolicy::strict(),
        );
        assert_eq!(out.tuples.len(), 2);
        assert_eq!(out.dropped, 0);
    }

    #[test]
    fn wrong_field_count_is_dropped_but_siblings_survive() {
        let text = "service ~ SERVICE#GENERAL ~~ NULL ~ SERVICE#GENERAL ~ positive";
        let out = decode(
            text,
            &instance(TaskKind::Tasd, SerializationFormat::Phrase),
            &DecodePolicy::strict(),
        );
        assert_eq!(out.tuples.len(), 1);
        assert_eq!(out.dropped, 1);
    }

    #[test]
    fn sentence_clause_mismatch() {
        let inst = instance(TaskKind::Tasd, SerializationFormat::Sentence);
        let text = "The review expressed [positive] opinion about [SERVICE#GENERAL] for [service], \
                    [negative] opinion on [FOOD#QUALITY] for [pasta].";
        let out = decode(text, &inst, &DecodePolicy::strict());
        assert_eq!(out.dropped, 1);
        assert!(out.tuples.contains(&tasd(Some("pasta"), "FOOD#QUALITY", "negative")));
    }

    #[test]
    fn sentence_slot_with_comma_and_case() {
        let inst = instance(TaskKind::Tasd, SerializationFormat::Sentence);
        let text = "the review expressed [Positive] opinion on [food#quality] for [Salt, Pepper & Lime Shrimp]";
        let out = decode(text, &inst, &DecodePolicy::strict());
        assert_eq!(out.dropped, 0);
        assert!(out
            .tuples
            .contains(&tasd(Some("salt, pepper & lime shrimp"), "FOOD#QUALITY", "positive")));
    }

    #[test]
    fn sentence_unclosed_bracket() {
        let inst = instance(TaskKind::Asd, SerializationFormat::Sentence);
        let out = decode(
            "The review expressed [positive opinion on [FOOD#QUALITY]",
            &inst,
            &DecodePolicy::strict(),
        );
        assert!(out.tuples.is_empty());
        assert_eq!(out.dropped, 1);
    }

    #[test]
    fn duplicates_collapse() {
        let text = "FOOD#QUALITY ~~ FOOD#QUALITY ~~ food#quality";
        let out = decode(
            text,
            &instance(TaskKind::Ad, SerializationFormat::Phrase),
            &DecodePolicy::strict(),
        );
        assert_eq!(out.tuples.len(), 1);
        assert_eq!(out.dropped, 0);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("strict".parse::<DecodePolicy>().unwrap(), DecodePolicy::strict());
        let lenient: DecodePolicy = "lenient".parse().unwrap();
        assert_eq!(lenient.repair(), LabelRepair::NearestMatch { max_distance: 2 });
        let off: DecodePolicy = "lenient:0".parse().unwrap();
        assert_eq!(off.repair(), LabelRepair::Off);
        assert!("wild".parse::<DecodePolicy>().is_err());
        assert_eq!(
            DecodePolicy::lenient(LabelRepair::NearestMatch { max_distance: 0 }),
            Err(PolicyError::ZeroBudget)
        );
        for p in ["strict", "lenient:0", "lenient:3"] {
            assert_eq!(p.parse::<DecodePolicy>().unwrap().to_string(), p);
        }
    }

    #[test]
    fn batch() {
        let inst = instance(TaskKind::Ad, SerializationFormat::Phrase);
        let records = vec![
            ("a".to_string(), "FOOD#QUALITY".to_string()),
            ("b".to_string(), "SERVICE#GENERAL ~~ junk".to_string()),
        ];
        let out = decode_batch(&records, InstanceSource::Shared(&inst), &DecodePolicy::strict()).unwrap();
        assert_eq!(out.outcomes.len(), 2);
        assert_eq!(out.dropped, 1);

        let empty = decode_batch(&[], InstanceSource::Shared(&inst), &DecodePolicy::strict()).unwrap();
        assert!(empty.outcomes.is_empty());

        let dup = vec![records[0].clone(), records[0].clone()];
        assert_eq!(
            decode_batch(&dup, InstanceSource::Shared(&inst), &DecodePolicy::strict()),
            Err(DecodeBatchError::DuplicateId("a".into()))
        );

        let map = HashMap::from([("a".to_string(), inst.clone())]);
        assert_eq!(
            decode_batch(&records, InstanceSource::PerRecord(&map), &DecodePolicy::strict()),
            Err(DecodeBatchError::MissingInstance("b".into()))
        );
    }
}
