use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use absagen::{
    build_training_pairs, decode, decode_batch, default_prefix, load_dataset, project, score_run, serialize,
    supported_tasks, validate_split, DecodeStats, InstanceSource, MetricsReport, Mode, Prediction, PredictionRecord,
    RunInfo, SerializationFormat, Split, TaskInstance, TaskKind,
};

use crate::config::RunConfig;
use crate::error::CliError;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn load_gold(cfg: &RunConfig, path: &Path) -> Result<Split, CliError> {
    load_dataset(cfg.dataset()?, path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Writes one JSONL training file per gold split and task.
pub fn prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let dataset = cfg.dataset()?;
    let schema = dataset.schema();
    let format = cfg.format()?;
    let mode = cfg.mode()?;
    let out = cfg.out.as_deref().ok_or_else(|| CliError::usage("--out is required"))?;
    if cfg.gold.is_empty() {
        return Err(CliError::usage("--gold is required"));
    }
    let tasks = match (mode, cfg.tasks()?) {
        (Mode::Joint, given) => {
            let joint = TaskKind::joint_for(&schema);
            if given.iter().any(|t| *t != joint) {
                return Err(CliError::usage(format!(
                    "joint mode trains on {joint} for {dataset}; pass --task {joint} or omit it"
                )));
            }
            vec![joint]
        }
        (Mode::Separate, given) if given.is_empty() => {
            return Err(CliError::usage("--task is required in separate mode"));
        }
        (Mode::Separate, given) => given,
    };

    let single_file = cfg.gold.len() == 1 && tasks.len() == 1 && out.extension().is_some_and(|e| e == "jsonl");
    let mut planned: BTreeMap<PathBuf, String> = BTreeMap::new();
    for gold in &cfg.gold {
        let split = load_gold(cfg, gold)?;
        for &task in &tasks {
            let instance = TaskInstance::new(task, format, mode, schema.clone())?;
            let prefix = cfg.prefix.clone().unwrap_or_else(|| default_prefix(task));
            let pairs = build_training_pairs(&split, &instance, &prefix)?;
            let mut body = String::new();
            for pair in &pairs {
                body.push_str(&serde_json::to_string(pair).expect("training pairs serialize"));
                body.push('\n');
            }
            let path = if single_file {
                out.to_path_buf()
            } else {
                out.join(format!("{}.{}.jsonl", split.kind().name(), task.name().to_lowercase()))
            };
            if planned.insert(path.clone(), body).is_some() {
                return Err(CliError::usage(format!(
                    "two gold files map to {}; give them different split names",
                    path.display()
                )));
            }
        }
    }
    for (path, body) in &planned {
        write_file(path, body)?;
        eprintln!("wrote {} ({} lines)", path.display(), body.lines().count());
    }
    Ok(())
}

fn read_predictions(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(line).map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), n + 1)))?;
        records.push((record.id, record.output));
    }
    Ok(records)
}

/// Decodes predictions, scores them and returns the report.
pub fn score(cfg: &RunConfig) -> Result<MetricsReport, CliError> {
    let dataset = cfg.dataset()?;
    let schema = dataset.schema();
    let format = cfg.format()?;
    let mode = cfg.mode()?;
    let task = cfg.task(dataset, mode)?;
    let policy = cfg.policy()?;
    let decode_task = match mode {
        Mode::Joint => TaskKind::joint_for(&schema),
        Mode::Separate => task,
    };
    if !task.is_projection_of(decode_task) {
        return Err(CliError::usage(format!(
            "{task} cannot be scored from {decode_task} output"
        )));
    }
    let instance = TaskInstance::new(decode_task, format, mode, schema.clone())?;
    if !supported_tasks(&schema).contains(&task) {
        return Err(CliError::usage(format!("{task} is not defined for {dataset}")));
    }
    let gold = load_gold(cfg, cfg.single_gold()?)?;
    let pred_path = cfg
        .pred
        .as_deref()
        .ok_or_else(|| CliError::usage("--pred is required"))?;
    let records = read_predictions(pred_path)?;
    let batch = decode_batch(&records, InstanceSource::Shared(&instance), &policy)?;
    let preds = batch
        .outcomes
        .into_iter()
        .map(|(id, outcome)| Ok(Prediction::new(id, outcome.tuples.project_to(task)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let run = RunInfo {
        dataset,
        task,
        format,
        mode,
    };
    let stats = DecodeStats {
        dropped: batch.dropped,
        repairs: batch.repairs,
    };
    let report = score_run(&preds, &gold, &run, stats, &cfg.score_options())?;
    if report.counts.missing_predictions > 0 {
        eprintln!(
            "warning: {} of {} gold sentences have no prediction and were scored as empty",
            report.counts.missing_predictions, report.counts.scored_sentences
        );
    }
    if let Some(path) = &cfg.report {
        write_file(path, &report.to_json())?;
    }
    Ok(report)
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

/// Human-readable summary of a report, scores in percent.
pub fn summary_table(report: &MetricsReport) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("dataset".into(), report.dataset.to_string()),
        ("task".into(), report.task.to_string()),
        ("format / mode".into(), format!("{} / {}", report.format, report.mode)),
        ("precision".into(), pct(report.micro.precision)),
        ("recall".into(), pct(report.micro.recall)),
        ("micro-F1".into(), pct(report.micro.f1)),
    ];
    if let Some(v) = &report.implicit_variant {
        rows.push(("F1 (implicit variant)".into(), pct(v.f1)));
    }
    if let Some(m) = report.macro_f1 {
        rows.push(("macro-F1".into(), pct(m)));
    }
    for (way, acc) in report.accuracy.iter().flatten() {
        rows.push((format!("accuracy {way}"), pct(*acc)));
    }
    let c = &report.counts;
    rows.push((
        "tuples gold / pred / matched".into(),
        format!("{} / {} / {}", c.gold_tuples, c.predicted_tuples, c.matched_tuples),
    ));
    rows.push((
        "sentences / missing".into(),
        format!("{} / {}", c.scored_sentences, c.missing_predictions),
    ));
    rows.push((
        "dropped / repaired".into(),
        format!("{} / {}", report.decode_stats.dropped, report.decode_stats.repairs),
    ));
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// Loads each gold file, reports diagnostics and checks that every sentence
/// survives serialize-then-decode. Returns the number of round-trip failures.
pub fn validate(cfg: &RunConfig) -> Result<usize, CliError> {
    let dataset = cfg.dataset()?;
    let schema = dataset.schema();
    if cfg.gold.is_empty() {
        return Err(CliError::usage("--gold is required"));
    }
    let formats = match &cfg.format {
        Some(_) => vec![cfg.format()?],
        None => SerializationFormat::ALL.to_vec(),
    };
    let tasks = match cfg.tasks()? {
        t if t.is_empty() => supported_tasks(&schema).into_iter().collect(),
        t => t,
    };
    let policy = cfg.policy()?;
    let mut failures = 0;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for gold in &cfg.gold {
        let split = load_gold(cfg, gold)?;
        for note in split.notes().iter().chain(validate_split(&split).iter()) {
            let _ = writeln!(out, "note: {note}");
        }
        let mut file_failures = 0;
        for &task in &tasks {
            for &format in &formats {
                let instance = TaskInstance::new(task, format, Mode::Separate, schema.clone())?;
                for sentence in split.sentences() {
                    let problem = match serialize(sentence, &instance) {
                        Err(e) => Some(e.to_string()),
                        Ok(text) => {
                            let decoded = decode(&text, &instance, &policy).tuples;
                            (decoded != project(&sentence.opinions, task))
                                .then(|| format!("decoded tuples differ for `{text}`"))
                        }
                    };
                    if let Some(problem) = problem {
                        file_failures += 1;
                        let _ = writeln!(out, "FAIL {} {task} {format}: {problem}", sentence.id);
                    }
                }
            }
        }
        let _ = writeln!(
            out,
            "{}: {} sentences, {} opinions, {} round-trip failures",
            gold.display(),
            split.len(),
            split.opinion_count(),
            file_failures
        );
        failures += file_failures;
    }
    Ok(failures)
}

/// Shows one sentence: gold opinions, target text and what it decodes to.
pub fn inspect(cfg: &RunConfig, id: &str) -> Result<String, CliError> {
    let dataset = cfg.dataset()?;
    let format = cfg.format()?;
    let mode = cfg.mode()?;
    let task = cfg.task(dataset, mode)?;
    let instance = TaskInstance::new(task, format, mode, dataset.schema())?;
    let split = load_gold(cfg, cfg.single_gold()?)?;
    let sentence = split
        .get(id)
        .ok_or_else(|| CliError::data(format!("no sentence with id `{id}`")))?;
    let text = serialize(sentence, &instance)?;
    let decoded = decode(&text, &instance, &cfg.policy()?);
    let mut out = String::new();
    let _ = writeln!(out, "id:      {}", sentence.id);
    let _ = writeln!(out, "text:    {}", sentence.text);
    for o in &sentence.opinions {
        let _ = writeln!(
            out,
            "gold:    {} | {} | {}",
            o.target.as_deref().unwrap_or("NULL"),
            o.aspect,
            o.polarity
        );
    }
    let _ = writeln!(out, "target:  {text}");
    for t in decoded.tuples.iter() {
        let _ = writeln!(out, "decoded: {t}");
    }
    Ok(out)
}
