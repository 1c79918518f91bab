mod common;

use std::collections::HashSet;

use common::golden::GOLDEN_CONLLU;
use common::oracles::cdf_w1;
use common::synth::*;
use rand::Rng;
use regmmd::corpus::{assemble_corpus, parse_conllu_str};
use regmmd::dimensions::*;
use regmmd::features::{extract_matrix, feature_diff_report, FeatureInventory};
use regmmd::matrix::FeatureMatrix;
use regmmd::sampler::*;

/// Scores where one mode holds a tenth of the documents.
fn bimodal(n: usize, seed: u64) -> Vec<DimensionScores> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let shift = if r.random_bool(0.1) { 6.0 } else { 0.0 };
            let mut scores = [0.0; DIMENSIONS];
            for s in scores.iter_mut() {
                *s = shift + r.random_range(-1.0..1.0);
            }
            DimensionScores {
                doc_id: format!("d{i:04}"),
                scores,
            }
        })
        .collect()
}

#[test]
fn winning_draw_tracks_the_rare_mode() {
    let full = bimodal(1000, 1);
    let ids: Vec<String> = full.iter().map(|s| s.doc_id.clone()).collect();
    let spec = SubsampleSpec {
        candidate_draws: 200,
        ..SubsampleSpec::new(50, 2)
    };
    let r = representative_subsample(&full, &ids, &spec).unwrap();
    let mut sorted = r.candidate_w1.clone();
    sorted.sort_by(f64::total_cmp);
    assert!(r.aggregate_w1 < sorted[100]);

    let rare = |sel: &[String]| {
        let set: HashSet<&str> = sel.iter().map(String::as_str).collect();
        full.iter().filter(|s| set.contains(s.doc_id.as_str()) && s.scores[0] > 3.0).count() as f64
            / sel.len() as f64
    };
    let full_rare = full.iter().filter(|s| s.scores[0] > 3.0).count() as f64 / full.len() as f64;
    assert!((rare(&r.selected_ids) - full_rare).abs() < 0.05);

    // Re-score the winner with the oracle distance.
    let set: HashSet<&str> = r.selected_ids.iter().map(String::as_str).collect();
    let oracle: f64 = (0..DIMENSIONS)
        .map(|d| {
            let all = dimension_column(&full, d);
            let sel: Vec<f64> = full.iter().filter(|s| set.contains(s.doc_id.as_str())).map(|s| s.scores[d]).collect();
            cdf_w1(&all, &sel)
        })
        .sum();
    assert!((oracle - r.aggregate_w1).abs() < 1e-9);
}

#[test]
fn eval_and_fewshot_sets_are_disjoint() {
    let full = bimodal(300, 3);
    let lengths: Vec<(String, usize)> = full.iter().enumerate().map(|(i, s)| (s.doc_id.clone(), i % 17)).collect();
    let elig = exclusion_filter(&lengths, 0.05).unwrap();
    assert_eq!(elig.excluded.len(), 15);
    let spec = SubsampleSpec {
        candidate_draws: 50,
        ..SubsampleSpec::new(100, 4)
    };
    let eval = representative_subsample(&full, &elig.eligible, &spec).unwrap();
    let shots = fewshot_pool(&full, &elig.eligible, &eval.selected_ids, &spec).unwrap();
    let a: HashSet<_> = eval.selected_ids.iter().collect();
    assert!(shots.selected_ids.iter().all(|id| !a.contains(id)));
    assert!(eval.selected_ids.iter().all(|id| !elig.excluded.contains(id)));
    assert_eq!(eval.excluded_ids.len(), 15);
    let json = serde_json::to_value(eval.manifest(&spec)).unwrap();
    assert_eq!(json["seed"], 4);
    assert_eq!(json["spec"]["candidate_draws"], 50);
}

#[test]
fn unit_vectors_return_their_loading() {
    let loadings = DimensionLoadings::default();
    for e in &loadings.entries {
        let mut z = vec![0.0; 67];
        z[e.feature] = 1.0;
        let all = loadings.score_all(&z);
        for (d, s) in all.iter().enumerate() {
            let want = if d + 1 == e.dimension as usize { e.loading } else { 0.0 };
            assert_eq!(*s, want, "{} on dimension {}", e.feature_id, d + 1);
        }
    }
}

#[test]
fn conllu_to_dimension_scores() {
    let inv = FeatureInventory::default();
    let base = parse_conllu_str(GOLDEN_CONLLU).unwrap().remove(0);
    // Twelve documents, one sentence each.
    let docs: Vec<_> = base
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut d = base.clone();
            d.doc_id = format!("s{i:02}");
            d.sentences = vec![s.clone()];
            d
        })
        .collect();
    let corpus = assemble_corpus(docs, "fixture").unwrap();
    let raw = extract_matrix(&corpus, &inv).unwrap();
    assert_eq!(raw.nrows(), 12);
    let stats = fit_stats(&raw).unwrap();
    assert_eq!(stats.fitted_on, 12);
    assert!(!stats.flagged().is_empty());
    let z = standardize(&raw, &stats).unwrap();
    let scores = dimension_scores(&z, &DimensionLoadings::default()).unwrap();
    for d in 0..DIMENSIONS {
        let mean: f64 = dimension_column(&scores, d).iter().sum::<f64>() / 12.0;
        assert!(mean.abs() < 1e-9);
        assert!(scores.iter().all(|s| s.scores[d].is_finite()));
    }
    let report = feature_diff_report(&raw, &raw.select(&[0, 1, 2]), &stats, &inv).unwrap();
    assert_eq!(report.len(), 67);
    assert!(report.iter().filter(|r| r.undefined).all(|r| r.sd_difference.is_none() && r.wasserstein == 0.0));

    let json = serde_json::to_string(&stats).unwrap();
    let back: StandardizationStats = serde_json::from_str(&json).unwrap();
    assert_eq!(back, stats);

    let csv = raw.to_csv(&inv.ids().collect::<Vec<_>>()).unwrap();
    let reread = FeatureMatrix::from_csv(csv.as_bytes(), &inv.ids().collect::<Vec<_>>(), inv.version).unwrap();
    assert_eq!(reread.values(), raw.values());
}
