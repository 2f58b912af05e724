#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use absagen::{Dataset, PredictionRecord, TrainingPair};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_absagen"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

pub fn fixture(dataset: Dataset) -> PathBuf {
    let rel = match dataset {
        Dataset::Restaurants14 => "se14/Restaurants_Train_v2.xml",
        Dataset::Restaurants15 => "se15/ABSA-15_Restaurants_Test.xml",
        Dataset::Restaurants16 => "se16/restaurants_train_sb1.xml",
        Dataset::Sentihood => "sentihood/sentihood-train.json",
    };
    fixture_dir().join(rel)
}

/// Gold files per dataset: the bundled fixtures, plus any official files
/// found under `$ABSAGEN_DATA_DIR/{se14,se15,se16,sentihood}`.
pub fn gold_files(dataset: Dataset) -> Vec<PathBuf> {
    let mut files = vec![fixture(dataset)];
    if let Some(root) = std::env::var_os("ABSAGEN_DATA_DIR") {
        let (sub, ext) = match dataset {
            Dataset::Restaurants14 => ("se14", "xml"),
            Dataset::Restaurants15 => ("se15", "xml"),
            Dataset::Restaurants16 => ("se16", "xml"),
            Dataset::Sentihood => ("sentihood", "json"),
        };
        if let Ok(entries) = fs::read_dir(Path::new(&root).join(sub)) {
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == ext))
                .collect();
            found.sort();
            files.extend(found);
        }
    }
    files
}

pub fn read_pairs(path: &Path) -> Vec<TrainingPair> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Turns training targets into a predictions file, keeping the ids for
/// which `keep` holds.
pub fn replay(pairs: &[TrainingPair], path: &Path, keep: impl Fn(usize) -> bool) {
    let mut body = String::new();
    for (i, pair) in pairs.iter().enumerate().filter(|(i, _)| keep(*i)) {
        let record = PredictionRecord {
            id: pair.id.clone(),
            output: pair.target.clone(),
        };
        body.push_str(&serde_json::to_string(&record).unwrap());
        body.push('\n');
        let _ = i;
    }
    fs::write(path, body).unwrap();
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
