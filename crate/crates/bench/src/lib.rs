//! Synthetic splits for benchmarking. Generation is seeded so every run sees
//! the same data.

use absagen::{Dataset, Opinion, Sentence, Split, SplitKind};

const WORDS: &[&str] = &[
    "the", "pasta", "was", "cold", "but", "our", "waiter", "made", "up", "for", "it", "with", "a", "free", "dessert",
    "and", "wine", "list", "is", "long", "view", "of", "river", "prices", "are", "steep",
];

/// Small xorshift generator; enough for shaping benchmark inputs.
struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

/// `sentences` sentences of 8 to 30 words, each with up to `max_opinions`
/// opinions drawn from `dataset`'s labels.
pub fn synthetic_split(dataset: Dataset, sentences: usize, max_opinions: usize, seed: u64) -> Split {
    let schema = dataset.schema();
    let aspects: Vec<&String> = schema.aspects().iter().collect();
    let polarities: Vec<&String> = schema.polarities().iter().filter(|p| *p != "none").collect();
    let mut rng = XorShift(seed | 1);
    let mut out = Vec::with_capacity(sentences);
    for i in 0..sentences {
        let len = 8 + rng.below(23);
        let words: Vec<&str> = (0..len).map(|_| WORDS[rng.below(WORDS.len())]).collect();
        let opinions = (0..rng.below(max_opinions + 1))
            .map(|_| {
                let target = (schema.supports_targets() && rng.below(4) != 0).then(|| {
                    let start = rng.below(len);
                    let end = (start + 1 + rng.below(3)).min(len);
                    words[start..end].join(" ")
                });
                Opinion {
                    target,
                    aspect: aspects[rng.below(aspects.len())].clone(),
                    polarity: polarities[rng.below(polarities.len())].clone(),
                }
            })
            .collect();
        out.push(Sentence {
            id: format!("syn:{i}"),
            text: words.join(" "),
            opinions,
        });
    }
    Split::new(schema, SplitKind::Test, out).expect("generated labels come from the schema")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_sized() {
        let a = synthetic_split(Dataset::Restaurants16, 50, 4, 9);
        assert_eq!(a, synthetic_split(Dataset::Restaurants16, 50, 4, 9));
        assert_eq!(a.len(), 50);
        assert!(a.sentences().iter().all(|s| s.opinions.len() <= 4));
        assert!(synthetic_split(Dataset::Sentihood, 10, 3, 1)
            .sentences()
            .iter()
            .flat_map(|s| &s.opinions)
            .all(|o| o.target.is_none()));
    }
}
