//! The pipeline stages. Each command reads its inputs, computes, and only
//! then writes its outputs.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use regmmd::corpus::{assemble_corpus, load_corpus_jsonl, parse_conllu, RawRecord};
use regmmd::detector::{balance_and_split, evaluate as evaluate_detector, train_logreg, LabeledDataset, LogRegModel};
use regmmd::dimensions::{
    dimension_scores, fit_stats, standardize, DimensionLoadings, StandardizationStats, DIMENSIONS,
};
use regmmd::features::{extract_matrix, feature_diff_report, FeatureInventory};
use regmmd::harness::{generate_corpus, GenerationJob, GenerationOptions, GenerationRecord, PromptTemplate, RetryPolicy};
use regmmd::matrix::FeatureMatrix;
use regmmd::sampler::{exclusion_filter, fewshot_pool, metadata_length, representative_subsample, SubsampleSpec};
use regmmd::stats::{
    coupled_ci, human_human_ci, median_bandwidth, mmd_cross_matrix, mmd_squared, stability_curve, trace_dispersion,
    trace_dispersion_ci, KernelConfig, MmdReportRow,
};
use regmmd::text_prep::{
    count_lexical_tokens, exclusions_jsonl, min_length_filter, punctuation_ratio_filter, truncate_to_limit,
    PUNCT_RATIO_THRESHOLD,
};
use serde::{Deserialize, Serialize};

use crate::backend::HttpBackend;
use crate::config::{RunConfig, RESOLVED_CONFIG};
use crate::error::CliError;
use crate::output::{csv_rows, jsonl, read_json, write_atomic};

/// Files produced by one command, written together at the end.
#[derive(Default)]
struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.0.push((path, bytes.into()));
    }

    fn json<T: Serialize + ?Sized>(&mut self, path: PathBuf, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.add(path, text);
    }

    fn commit(self, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::new();
        for (path, bytes) in self.0 {
            write_atomic(&path, &bytes)?;
            written.push(path);
        }
        let resolved = cfg.out.join(RESOLVED_CONFIG);
        write_atomic(&resolved, cfg.to_toml().as_bytes())?;
        written.push(resolved);
        Ok(written)
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn required<'a>(path: &'a Option<PathBuf>, what: &'static str) -> Result<&'a Path, CliError> {
    path.as_deref().ok_or(CliError::Missing(what))
}

fn load_matrix(path: &Path, cfg: &RunConfig, inv: &FeatureInventory) -> Result<FeatureMatrix, CliError> {
    let ids: Vec<&str> = inv.ids().collect();
    let matrix = FeatureMatrix::from_csv(open(path)?, &ids, inv.version).map_err(|e| CliError::input(path, e))?;
    if matrix.is_empty() {
        return Err(CliError::input(path, "feature matrix has no rows"));
    }
    if matrix.register != cfg.register {
        return Err(CliError::input(
            path,
            format!("matrix register `{}` does not match `{}`", matrix.register, cfg.register),
        ));
    }
    Ok(matrix)
}

fn load_stats(path: &Path, cfg: &RunConfig, inv: &FeatureInventory) -> Result<StandardizationStats, CliError> {
    let stats: StandardizationStats = read_json(path)?;
    if stats.register != cfg.register {
        return Err(CliError::input(
            path,
            format!("statistics fitted on register `{}`, run is `{}`", stats.register, cfg.register),
        ));
    }
    if stats.inventory_version != inv.version {
        return Err(CliError::input(
            path,
            format!(
                "statistics use inventory `{}`, extractor uses `{}`",
                stats.inventory_version, inv.version
            ),
        ));
    }
    Ok(stats)
}

fn load_kernel(path: &Path) -> Result<KernelConfig, CliError> {
    let kernel: KernelConfig = read_json(path)?;
    KernelConfig::rbf(kernel.bandwidth).map_err(|e| CliError::input(path, e))?;
    Ok(kernel)
}

/// The human matrix in its own standardized frame.
struct HumanFrame {
    raw: FeatureMatrix,
    stats: StandardizationStats,
    z: FeatureMatrix,
}

fn human_frame(cfg: &RunConfig, inv: &FeatureInventory, fit_if_missing: bool) -> Result<HumanFrame, CliError> {
    let raw = load_matrix(required(&cfg.inputs.human, "human feature matrix (--human)")?, cfg, inv)?;
    let stats = match &cfg.inputs.stats {
        Some(path) => load_stats(path, cfg, inv)?,
        None if fit_if_missing => fit_stats(&raw)?,
        None => return Err(CliError::Missing("standardization statistics (--stats)")),
    };
    let z = standardize(&raw, &stats)?;
    Ok(HumanFrame { raw, stats, z })
}

fn kernel_for(cfg: &RunConfig, z: &FeatureMatrix, fit_if_missing: bool) -> Result<KernelConfig, CliError> {
    match &cfg.inputs.kernel {
        Some(path) => load_kernel(path),
        None if fit_if_missing => Ok(median_bandwidth(z)?),
        None => Err(CliError::Missing("kernel configuration (--kernel)")),
    }
}

#[derive(Deserialize)]
struct Selection {
    selected_ids: Vec<String>,
}

fn selected_ids(path: &Option<PathBuf>) -> Result<Option<Vec<String>>, CliError> {
    path.as_deref()
        .map(|p| read_json::<Selection>(p).map(|s| s.selected_ids))
        .transpose()
}

fn select(matrix: &FeatureMatrix, ids: &[String], path: &Option<PathBuf>) -> Result<FeatureMatrix, CliError> {
    matrix.select_ids(ids).ok_or_else(|| {
        CliError::input(
            path.as_deref().unwrap_or(Path::new("selection")),
            "selection names documents missing from the human matrix",
        )
    })
}

/// The human evaluation sample: the stored selection when present,
/// otherwise the full matrix.
fn human_eval(cfg: &RunConfig, m: &FeatureMatrix) -> Result<FeatureMatrix, CliError> {
    match selected_ids(&cfg.inputs.selection)? {
        Some(ids) => select(m, &ids, &cfg.inputs.selection),
        None => Ok(m.clone()),
    }
}

/// Model matrices standardized in the human frame, in name order.
fn model_frames(
    cfg: &RunConfig,
    inv: &FeatureInventory,
    stats: &StandardizationStats,
) -> Result<Vec<(String, FeatureMatrix, FeatureMatrix)>, CliError> {
    cfg.inputs
        .models
        .iter()
        .map(|(name, path)| {
            let raw = load_matrix(path, cfg, inv)?;
            let z = standardize(&raw, stats)?;
            Ok((name.clone(), raw, z))
        })
        .collect()
}

fn report_row(pair: String, cfg: &RunConfig, mmd2: f64, low: f64, high: f64, n: usize, kernel: &KernelConfig) -> MmdReportRow {
    MmdReportRow {
        pair,
        register: cfg.register.clone(),
        mmd2,
        ci_low: low,
        ci_high: high,
        n,
        draws: cfg.sampling.draws,
        bandwidth: kernel.bandwidth,
        seed: cfg.seed,
    }
}

#[derive(Serialize)]
struct TruncationLine<'a> {
    doc_id: &'a str,
    lexical_tokens: usize,
    truncated: bool,
    hit_hard_limit: bool,
    text: &'a str,
}

pub fn extract(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    if cfg.inputs.corpus.is_empty() {
        return Err(CliError::Missing("tagged corpus (--input)"));
    }
    let mut docs = Vec::new();
    for path in &cfg.inputs.corpus {
        docs.extend(parse_conllu(open(path)?).map_err(|e| CliError::input(path, e))?);
    }
    let mut excluded = Vec::new();
    if cfg.text.punctuation_filter {
        let (kept, dropped) = punctuation_ratio_filter(docs, PUNCT_RATIO_THRESHOLD);
        docs = kept;
        excluded.extend(dropped);
    }
    if cfg.text.min_lexical_tokens > 0 {
        let (kept, dropped) = min_length_filter(docs, cfg.text.min_lexical_tokens);
        docs = kept;
        excluded.extend(dropped);
    }
    let mut corpus = assemble_corpus(docs, &cfg.register)?;

    let mut out = Outputs::default();
    if cfg.text.truncate {
        let mut lines = String::new();
        for doc in corpus.documents.iter_mut() {
            let t = truncate_to_limit(doc, cfg.text.soft_limit, cfg.text.hard_limit)?;
            let line = TruncationLine {
                doc_id: &doc.doc_id,
                lexical_tokens: t.lexical_tokens,
                truncated: t.truncated,
                hit_hard_limit: t.hit_hard_limit,
                text: &t.text,
            };
            lines.push_str(&(serde_json::to_string(&line).expect("line serializes") + "\n"));
            if let Some(kept) = t.document {
                *doc = kept;
            }
        }
        out.add(cfg.out.join("truncation.jsonl"), lines);
    }
    if !excluded.is_empty() {
        out.add(cfg.out.join("exclusions.jsonl"), exclusions_jsonl(&excluded));
    }

    let mut matrix = extract_matrix(&corpus, &inv)?;
    matrix.source = cfg.text.source.clone();
    let ids: Vec<&str> = inv.ids().collect();
    out.add(cfg.out.join("features.csv"), matrix.to_csv(&ids)?);
    out.add(cfg.out.join("features.jsonl"), matrix.to_jsonl());

    let lengths: usize = corpus.documents.iter().map(count_lexical_tokens).sum();
    println!(
        "{} documents ({} excluded), mean lexical length {:.1}",
        corpus.size(),
        excluded.len(),
        lengths as f64 / corpus.size() as f64
    );
    out.commit(cfg)
}

pub fn baseline(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    let frame = human_frame(cfg, &inv, true)?;
    let kernel = kernel_for(cfg, &frame.z, true)?;
    let s = &cfg.sampling;
    let curve = stability_curve(&frame.z, &s.sizes, s.draws, s.level, &kernel, cfg.seed)?;
    let rows: Vec<MmdReportRow> = curve
        .iter()
        .map(|ci| report_row("human-human".into(), cfg, ci.mean, ci.low, ci.high, ci.subsample_size, &kernel))
        .collect();
    for r in &rows {
        println!("n={:<5} mean {:.6}  {}% CI [{:.6}, {:.6}]", r.n, r.mmd2, s.level, r.ci_low, r.ci_high);
    }
    let mut out = Outputs::default();
    out.json(cfg.out.join("stats.json"), &frame.stats);
    out.json(cfg.out.join("kernel.json"), &kernel);
    out.add(cfg.out.join("stability.csv"), csv_rows(&rows)?);
    out.commit(cfg)
}

fn load_records(cfg: &RunConfig) -> Result<Vec<RawRecord>, CliError> {
    let path = required(&cfg.inputs.records, "human records (--records)")?;
    Ok(load_corpus_jsonl(open(path)?, &cfg.register)
        .map_err(|e| CliError::input(path, e))?
        .records)
}

pub fn subsample(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    let frame = human_frame(cfg, &inv, true)?;
    let dims = dimension_scores(&frame.z, &DimensionLoadings::for_inventory(&inv)?)?;
    let s = &cfg.sampling;
    let all_ids = frame.raw.doc_ids().to_vec();
    let eligible = match &cfg.inputs.records {
        Some(_) => {
            let records = load_records(cfg)?;
            let known: HashSet<&str> = all_ids.iter().map(String::as_str).collect();
            let lengths: Vec<(String, usize)> = records
                .iter()
                .filter(|r| known.contains(r.id.as_str()))
                .map(|r| (r.id.clone(), metadata_length(&r.metadata)))
                .collect();
            exclusion_filter(&lengths, s.exclusion_quantile)?.eligible
        }
        None => all_ids,
    };
    let spec = SubsampleSpec {
        n: s.n,
        candidate_draws: s.candidate_draws,
        exclusion_quantile: s.exclusion_quantile,
        seed: cfg.seed,
    };
    let eval = representative_subsample(&dims, &eligible, &spec)?;
    let eval_z = select(&frame.z, &eval.selected_ids, &None)?;
    let (d, _) = regmmd::stats::mean_abs_cohens_d(&eval_z, &frame.z)?;
    println!(
        "selected {} of {} eligible, aggregate W1 {:.4}, mean |d| {:.4}",
        eval.selected_ids.len(),
        eligible.len(),
        eval.aggregate_w1,
        d
    );
    let mut out = Outputs::default();
    out.json(cfg.out.join("selection.json"), &eval.manifest(&spec));
    if s.fewshot_n > 0 {
        let shot_spec = SubsampleSpec { n: s.fewshot_n, ..spec.clone() };
        let shots = fewshot_pool(&dims, &eligible, &eval.selected_ids, &shot_spec)?;
        out.json(cfg.out.join("fewshot.json"), &shots.manifest(&shot_spec));
    }
    out.commit(cfg)
}

fn read_generation_lines(path: &Path) -> Result<Vec<GenerationRecord>, CliError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut records = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CliError::input(path, format!("line {}: {e}", i + 1)));
        match record {
            Ok(r) => records.push(r),
            // A torn final line from an interrupted run is dropped.
            Err(e) => log::warn!("{e}"),
        }
    }
    Ok(records)
}

#[derive(Serialize)]
struct RawOutput<'a> {
    doc_id: &'a str,
    raw_output: &'a str,
}

#[derive(Serialize)]
struct ModelText<'a> {
    id: &'a str,
    text: &'a str,
    meta: &'a BTreeMap<String, String>,
}

pub fn generate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let g = &cfg.generation;
    if g.model.is_empty() {
        return Err(CliError::Missing("model id (--model)"));
    }
    let records = load_records(cfg)?;
    let keep = |ids: Option<Vec<String>>| -> Vec<RawRecord> {
        match ids {
            Some(ids) => {
                let ids: HashSet<String> = ids.into_iter().collect();
                records.iter().filter(|r| ids.contains(&r.id)).cloned().collect()
            }
            None => records.clone(),
        }
    };
    let eval = keep(selected_ids(&cfg.inputs.selection)?);
    let pool = match (g.shots, &cfg.inputs.fewshot) {
        (0, _) => Vec::new(),
        (_, Some(_)) => keep(selected_ids(&cfg.inputs.fewshot)?),
        (_, None) => return Err(CliError::Missing("few-shot pool (--fewshot)")),
    };
    let template = PromptTemplate::builtin(&cfg.register, &g.variant)?;
    let job = GenerationJob {
        model_id: g.model.clone(),
        endpoint: g.endpoint.clone(),
        temperature: g.temperature,
        top_p: g.top_p,
        shots: g.shots,
        seed: cfg.seed,
        max_new_tokens: g.max_new_tokens,
        prefix_transport: g.prefix_transport,
    };
    let options = GenerationOptions {
        parallelism: g.parallelism.max(1),
        min_interval: Duration::from_millis(g.min_interval_ms),
        retry: RetryPolicy {
            max_attempts: g.max_attempts.max(1),
            ..RetryPolicy::default()
        },
    };
    let api_key = std::env::var(&g.api_key_env).ok().filter(|k| !k.is_empty());
    let backend = HttpBackend::new(&g.endpoint, api_key);

    // Completed records are journaled as they arrive so an interrupted run
    // can resume without repeating requests.
    crate::output::ensure_dir(&cfg.out)?;
    let final_path = cfg.out.join("generations.jsonl");
    let journal_path = cfg.out.join("generations.journal.jsonl");
    let mut done = read_generation_lines(&final_path)?;
    let seen: HashSet<String> = done.iter().map(|r| r.doc_id.clone()).collect();
    done.extend(
        read_generation_lines(&journal_path)?
            .into_iter()
            .filter(|r| !seen.contains(&r.doc_id)),
    );
    // Records from other settings are regenerated; the endpoint may move.
    done.retain(|r| GenerationJob { endpoint: job.endpoint.clone(), ..r.job.clone() } == job);
    let journal = std::sync::Mutex::new(
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)
            .map_err(|source| CliError::Io {
                path: journal_path.clone(),
                source,
            })?,
    );
    let on_record = |r: &GenerationRecord| {
        let line = serde_json::to_string(r).expect("record serializes") + "\n";
        let mut file = journal.lock().expect("journal lock");
        if let Err(e) = file.write_all(line.as_bytes()).and_then(|_| file.flush()) {
            log::error!("journal write failed: {e}");
        }
    };
    let generated = generate_corpus(&eval, &pool, &template, &job, &backend, &options, &done, &on_record)?;

    let meta: BTreeMap<&str, &BTreeMap<String, String>> =
        eval.iter().map(|r| (r.id.as_str(), &r.metadata)).collect();
    let raw: Vec<RawOutput> = generated
        .iter()
        .map(|r| RawOutput {
            doc_id: &r.doc_id,
            raw_output: &r.raw_output,
        })
        .collect();
    let texts: Vec<ModelText> = generated
        .iter()
        .filter(|r| r.usable())
        .map(|r| ModelText {
            id: &r.doc_id,
            text: &r.cleaned_output,
            meta: meta[r.doc_id.as_str()],
        })
        .collect();
    let flagged = generated.iter().filter(|r| r.short_output).count();
    println!(
        "{} generations ({} unusable, {} shorter than the soft limit)",
        generated.len(),
        generated.len() - texts.len(),
        flagged
    );
    let mut out = Outputs::default();
    out.add(final_path, jsonl(&generated));
    out.add(cfg.out.join("raw_outputs.jsonl"), jsonl(&raw));
    out.add(cfg.out.join("model_texts.jsonl"), jsonl(&texts));
    let written = out.commit(cfg)?;
    let _ = fs::remove_file(&journal_path);
    Ok(written)
}

pub fn evaluate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    let frame = human_frame(cfg, &inv, false)?;
    let kernel = kernel_for(cfg, &frame.z, false)?;
    if cfg.inputs.models.is_empty() {
        return Err(CliError::Missing("model feature matrices (--model NAME=PATH)"));
    }
    let s = &cfg.sampling;
    let eval = human_eval(cfg, &frame.z)?;
    let reference = human_human_ci(&frame.z, s.n, s.draws, s.level, &kernel, cfg.seed)?;
    let mut rows = Vec::new();
    for (name, _, z) in model_frames(cfg, &inv, &frame.stats)? {
        let observed = mmd_squared(&eval, &z, &kernel)?;
        let ci = coupled_ci(&frame.z, &z, s.n, s.draws, s.level, &kernel, cfg.seed)?;
        rows.push(report_row(format!("human-{name}"), cfg, observed.value, ci.low, ci.high, s.n, &kernel));
    }
    rows.sort_by(|a, b| a.mmd2.total_cmp(&b.mmd2).then_with(|| a.pair.cmp(&b.pair)));
    rows.insert(
        0,
        report_row("human-human".into(), cfg, reference.mean, reference.low, reference.high, s.n, &kernel),
    );
    for r in &rows {
        println!("{:<24} {:.6}  [{:.6}, {:.6}]", r.pair, r.mmd2, r.ci_low, r.ci_high);
    }
    let mut out = Outputs::default();
    out.add(cfg.out.join("ranking.csv"), csv_rows(&rows)?);
    out.commit(cfg)
}

#[derive(Serialize)]
struct DimensionRow<'a> {
    source: &'a str,
    doc_id: &'a str,
    dimension: usize,
    score: f64,
}

#[derive(Serialize)]
struct FeatureDiffRow<'a> {
    model: &'a str,
    feature_id: &'a str,
    mean_human: f64,
    mean_model: f64,
    sd_difference: Option<f64>,
    wasserstein: f64,
    undefined: bool,
}

#[derive(Serialize)]
struct VarianceRow<'a> {
    source: &'a str,
    trace_dispersion: f64,
    human_ci_low: f64,
    human_ci_high: f64,
    n: usize,
}

#[derive(Serialize)]
struct MetricsRow<'a> {
    register: &'a str,
    accuracy: f64,
    roc_auc: Option<f64>,
}

fn train_detector(
    cfg: &RunConfig,
    human: &FeatureMatrix,
    models: &[(String, FeatureMatrix, FeatureMatrix)],
) -> Result<(LogRegModel, f64, Option<f64>), CliError> {
    let mut ai = models[0].2.clone();
    for (_, _, z) in &models[1..] {
        ai = ai.concat(z)?;
    }
    let data = LabeledDataset::from_pair(human, &ai, &cfg.register)?;
    let d = &cfg.detector;
    let (train, test) = balance_and_split(&data, d.test_fraction, cfg.seed)?;
    let model = train_logreg(&train, &d.l2_grid, d.folds, cfg.seed)?;
    let metrics = evaluate_detector(&model, &test)?;
    Ok((model, metrics.accuracy, metrics.roc_auc))
}

pub fn diagnostics(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    let frame = human_frame(cfg, &inv, false)?;
    let kernel = kernel_for(cfg, &frame.z, false)?;
    let models = model_frames(cfg, &inv, &frame.stats)?;
    let loadings = DimensionLoadings::for_inventory(&inv)?;
    let s = &cfg.sampling;
    let eval_raw = human_eval(cfg, &frame.raw)?;
    let eval_z = standardize(&eval_raw, &frame.stats)?;

    let mut samples: Vec<(String, &FeatureMatrix)> = vec![("human".into(), &eval_z)];
    samples.extend(models.iter().map(|(name, _, z)| (name.clone(), z)));

    let mut dim_rows = Vec::new();
    let scored: Vec<(String, Vec<_>)> = samples
        .iter()
        .map(|(name, z)| Ok((name.clone(), dimension_scores(z, &loadings)?)))
        .collect::<Result<_, CliError>>()?;
    for (name, scores) in &scored {
        for s in scores {
            for d in 0..DIMENSIONS {
                dim_rows.push(DimensionRow {
                    source: name,
                    doc_id: &s.doc_id,
                    dimension: d + 1,
                    score: s.scores[d],
                });
            }
        }
    }

    let mut diff_rows = Vec::new();
    let diffs: Vec<(String, Vec<_>)> = models
        .iter()
        .map(|(name, raw, _)| Ok((name.clone(), feature_diff_report(&eval_raw, raw, &frame.stats, &inv)?)))
        .collect::<Result<_, CliError>>()?;
    for (name, report) in &diffs {
        for d in report {
            diff_rows.push(FeatureDiffRow {
                model: name,
                feature_id: &d.feature_id,
                mean_human: d.mean_a,
                mean_model: d.mean_b,
                sd_difference: d.sd_difference,
                wasserstein: d.wasserstein,
                undefined: d.undefined,
            });
        }
    }

    let named: Vec<(String, FeatureMatrix)> = samples.iter().map(|(n, z)| (n.clone(), (*z).clone())).collect();
    let cross = mmd_cross_matrix(&named, &kernel)?;
    let mut cross_csv = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| CliError::Config(format!("csv serialization: {e}"));
    let mut header = vec!["source".to_string()];
    header.extend(cross.names.iter().cloned());
    cross_csv.write_record(&header).map_err(write_err)?;
    for (name, row) in cross.names.iter().zip(&cross.values) {
        let mut record = vec![name.clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        cross_csv.write_record(&record).map_err(write_err)?;
    }
    let cross_bytes = cross_csv
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv serialization: {e}")))?;

    let human_ci = trace_dispersion_ci(&frame.z, s.n, s.draws, s.level, cfg.seed)?;
    let mut variance_rows = Vec::new();
    for (name, z) in &samples {
        variance_rows.push(VarianceRow {
            source: name,
            trace_dispersion: trace_dispersion(z)?,
            human_ci_low: human_ci.low,
            human_ci_high: human_ci.high,
            n: s.n,
        });
    }

    let mut out = Outputs::default();
    out.add(cfg.out.join("dimensions.csv"), csv_rows(&dim_rows)?);
    out.add(cfg.out.join("cross_matrix.csv"), cross_bytes);
    out.add(cfg.out.join("variance.csv"), csv_rows(&variance_rows)?);
    if !models.is_empty() {
        out.add(cfg.out.join("feature_differences.csv"), csv_rows(&diff_rows)?);
        let (_, accuracy, roc_auc) = train_detector(cfg, &eval_z, &models)?;
        let metrics = [MetricsRow {
            register: &cfg.register,
            accuracy,
            roc_auc,
        }];
        out.add(cfg.out.join("detector_metrics.csv"), csv_rows(&metrics)?);
    }
    out.commit(cfg)
}

pub fn detector(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let inv = FeatureInventory::default();
    let frame = human_frame(cfg, &inv, false)?;
    let models = model_frames(cfg, &inv, &frame.stats)?;
    if models.is_empty() {
        return Err(CliError::Missing("model feature matrices (--model NAME=PATH)"));
    }
    let eval_z = human_eval(cfg, &frame.z)?;
    let (model, accuracy, roc_auc) = train_detector(cfg, &eval_z, &models)?;
    println!(
        "{}: accuracy {:.4}, ROC AUC {}, l2 {}",
        cfg.register,
        accuracy,
        roc_auc.map_or("undefined".into(), |a| format!("{a:.4}")),
        model.l2
    );
    let metrics = [MetricsRow {
        register: &cfg.register,
        accuracy,
        roc_auc,
    }];
    let mut out = Outputs::default();
    out.json(cfg.out.join("detector_model.json"), &model);
    out.add(cfg.out.join("detector_metrics.csv"), csv_rows(&metrics)?);
    out.commit(cfg)
}
