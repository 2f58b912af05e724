#![allow(dead_code)]

use std::path::PathBuf;

use absagen::{load_dataset, Dataset, Opinion, Sentence, Split};
use proptest::prelude::*;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

pub fn fixture_path(dataset: Dataset) -> PathBuf {
    let rel = match dataset {
        Dataset::Restaurants14 => "se14/Restaurants_Train_v2.xml",
        Dataset::Restaurants15 => "se15/ABSA-15_Restaurants_Test.xml",
        Dataset::Restaurants16 => "se16/restaurants_train_sb1.xml",
        Dataset::Sentihood => "sentihood/sentihood-train.json",
    };
    fixture_dir().join(rel)
}

pub fn load_fixture(dataset: Dataset) -> Split {
    load_dataset(dataset, fixture_path(dataset)).unwrap_or_else(|e| panic!("{dataset}: {e}"))
}

/// Tokens with the punctuation that real reviews put inside targets.
const WORDS: &[&str] = &[
    "the",
    "sushi",
    "Bar",
    "salt,",
    "pepper",
    "&",
    "lime",
    "shrimp",
    "\"Ray's",
    "Special\"",
    "café",
    "crème",
    "brûlée",
    "(vegan)",
    "50%",
    "$12",
    "wine-list",
    "Pad",
    "Thai",
    "staff",
    "was",
    "slow",
    "great",
    "but",
    "décor",
    "naïve",
    "NY",
    "pizza!",
    "x",
    "a.",
    "l'entrecôte",
    "Sake?",
];

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(WORDS).prop_map(str::to_string)
}

fn labels(dataset: Dataset) -> (Vec<String>, Vec<String>) {
    let schema = dataset.schema();
    let aspects = schema.aspects().iter().cloned().collect();
    let polarities = schema.polarities().iter().filter(|p| *p != "none").cloned().collect();
    (aspects, polarities)
}

/// A sentence whose opinions use `dataset`'s labels. Targets, where the
/// dataset has them, are a span of the text, an unrelated word, or implicit.
pub fn arb_sentence(dataset: Dataset) -> impl Strategy<Value = Sentence> {
    let (aspects, polarities) = labels(dataset);
    let with_targets = dataset.schema().supports_targets();
    (
        prop::collection::vec(word(), 1..14),
        prop::collection::vec(
            (
                prop::sample::select(aspects),
                prop::sample::select(polarities),
                0usize..3,
                any::<prop::sample::Index>(),
                1usize..4,
                word(),
            ),
            0..6,
        ),
        "[a-z0-9]{1,6}",
    )
        .prop_map(move |(words, raw, id)| {
            let text = words.join(" ");
            let opinions = raw
                .into_iter()
                .map(|(aspect, polarity, kind, start, len, stray)| {
                    let target = match (with_targets, kind) {
                        (false, _) | (true, 0) => None,
                        (true, 1) => {
                            let start = start.index(words.len());
                            let end = (start + len).min(words.len());
                            Some(words[start..end].join(" "))
                        }
                        (true, _) => Some(format!("{stray} {stray}")),
                    };
                    Opinion {
                        target,
                        aspect,
                        polarity,
                    }
                })
                .collect();
            Sentence { id, text, opinions }
        })
}
