//! Browser bindings: a mean-shift MMD explorer, a human-human stability
//! curve, and feature extraction from pasted CoNLL-U.

use rand::Rng;
use rand_distr::StandardNormal;
use regmmd::corpus::parse_conllu_str;
use regmmd::dimensions::{dimension_scores, fit_stats, standardize, DimensionLoadings};
use regmmd::features::{extract_documents, raw_counts, FeatureInventory};
use regmmd::matrix::FeatureMatrix;
use regmmd::stats::{
    coupled_ci, human_human_ci, median_bandwidth, mmd_squared, stability_curve, stream_rng,
    ConfidenceInterval,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

pub const WIDTH: usize = 67;
const LEVEL: f64 = 95.0;

#[derive(Debug, Serialize)]
pub struct Interval {
    pub n: usize,
    pub low: f64,
    pub high: f64,
    pub mean: f64,
}

impl From<&ConfidenceInterval> for Interval {
    fn from(ci: &ConfidenceInterval) -> Self {
        Interval {
            n: ci.subsample_size,
            low: ci.low,
            high: ci.high,
            mean: ci.mean,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ShiftReport {
    pub bandwidth: f64,
    pub observed: f64,
    pub model: Interval,
    pub human: Interval,
}

#[derive(Debug, Serialize)]
pub struct FeatureValue {
    pub id: &'static str,
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct DocumentReport {
    pub doc_id: String,
    pub lexical_tokens: usize,
    pub features: Vec<FeatureValue>,
    /// Dimension scores standardized within the pasted documents.
    pub dimensions: Option<Vec<f64>>,
}

/// Standard-normal rows, with the first `shifted` columns moved by `shift`.
fn gaussian(rows: usize, shift: f64, shifted: usize, seed: u64, stream: u64) -> FeatureMatrix {
    let mut rng = stream_rng(seed, stream);
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            (0..WIDTH)
                .map(|j| {
                    let z: f64 = rng.sample(StandardNormal);
                    if j < shifted {
                        z + shift
                    } else {
                        z
                    }
                })
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(&data).expect("rows share a width")
}

/// Squared MMD between a simulated human corpus of `4n` documents and a
/// model corpus of `2n` documents shifted by `shift` standard deviations
/// on `shifted` features, with the human-human and coupled intervals.
pub fn shift_report(
    shift: f64,
    shifted: usize,
    n: usize,
    draws: usize,
    seed: u64,
) -> Result<ShiftReport, String> {
    if n == 0 {
        return Err("subsample size must be positive".into());
    }
    let shifted = shifted.min(WIDTH);
    let human = gaussian(4 * n, 0.0, 0, seed, u64::MAX);
    let model = gaussian(2 * n, shift, shifted, seed, u64::MAX - 1);
    let kernel = median_bandwidth(&human).map_err(|e| e.to_string())?;
    let eval = human.select(&(0..n).collect::<Vec<_>>());
    let observed = mmd_squared(&eval, &model, &kernel).map_err(|e| e.to_string())?;
    let model_ci = coupled_ci(&human, &model, n, draws, LEVEL, &kernel, seed).map_err(|e| e.to_string())?;
    let human_ci = human_human_ci(&human, n, draws, LEVEL, &kernel, seed).map_err(|e| e.to_string())?;
    Ok(ShiftReport {
        bandwidth: kernel.bandwidth,
        observed: observed.value,
        model: (&model_ci).into(),
        human: (&human_ci).into(),
    })
}

/// Human-human intervals over `sizes` on a simulated corpus large enough
/// for the largest size.
pub fn stability_report(sizes: &[usize], draws: usize, seed: u64) -> Result<Vec<Interval>, String> {
    let largest = sizes.iter().copied().max().ok_or("no subsample sizes given")?;
    let human = gaussian(2 * largest.max(1), 0.0, 0, seed, u64::MAX);
    let kernel = median_bandwidth(&human).map_err(|e| e.to_string())?;
    let curve = stability_curve(&human, sizes, draws, LEVEL, &kernel, seed).map_err(|e| e.to_string())?;
    Ok(curve.iter().map(Interval::from).collect())
}

/// Feature rates for each document in a CoNLL-U string.
pub fn conllu_report(text: &str) -> Result<Vec<DocumentReport>, String> {
    let docs = parse_conllu_str(text).map_err(|e| e.to_string())?;
    if docs.is_empty() {
        return Err("no documents found".into());
    }
    let inv = FeatureInventory::default();
    let matrix = extract_documents(&docs, "demo", "pasted", &inv).map_err(|e| e.to_string())?;
    let dims = if matrix.nrows() >= 2 {
        let stats = fit_stats(&matrix).map_err(|e| e.to_string())?;
        let z = standardize(&matrix, &stats).map_err(|e| e.to_string())?;
        let loadings = DimensionLoadings::for_inventory(&inv).map_err(|e| e.to_string())?;
        let scores = dimension_scores(&z, &loadings).map_err(|e| e.to_string())?;
        Some(scores.into_iter().map(|s| s.scores.to_vec()).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(docs
        .iter()
        .enumerate()
        .map(|(i, doc)| DocumentReport {
            doc_id: doc.doc_id.clone(),
            lexical_tokens: raw_counts(doc).lexical_tokens,
            features: inv
                .features
                .iter()
                .zip(matrix.row(i))
                .map(|(f, &value)| FeatureValue {
                    id: f.id,
                    name: f.name,
                    value,
                })
                .collect(),
            dimensions: dims.as_ref().map(|d| d[i].clone()),
        })
        .collect())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = shiftReport)]
pub fn shift_report_js(shift: f64, shifted: usize, n: usize, draws: usize, seed: u32) -> Result<String, JsValue> {
    to_js(shift_report(shift, shifted, n, draws, seed as u64))
}

#[wasm_bindgen(js_name = stabilityReport)]
pub fn stability_report_js(sizes: &str, draws: usize, seed: u32) -> Result<String, JsValue> {
    let sizes: Result<Vec<usize>, _> = sizes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect();
    match sizes {
        Ok(sizes) => to_js(stability_report(&sizes, draws, seed as u64)),
        Err(e) => Err(JsValue::from_str(&format!("sizes: {e}"))),
    }
}

#[wasm_bindgen(js_name = conlluReport)]
pub fn conllu_report_js(text: &str) -> Result<String, JsValue> {
    to_js(conllu_report(text))
}
