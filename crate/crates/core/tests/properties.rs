mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use regmmd::corpus::{parse_conllu_str, write_conllu, Sentence, TaggedDocument, TaggedToken};
use regmmd::dimensions::{
    dimension_scores, fit_stats, standardize, unstandardize, DimensionLoadings, StandardizationStats,
};
use regmmd::features::FEATURE_COUNT;
use regmmd::matrix::FeatureMatrix;
use regmmd::text_prep::{clean_text, count_lexical_tokens, truncate_to_limit, HARD_LIMIT, SOFT_LIMIT};

fn form() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z]{1,8}",
        Just(",".to_string()),
        Just(".".to_string()),
        Just("n't".to_string()),
    ]
}

fn sentence() -> impl Strategy<Value = Sentence> {
    prop::collection::vec(form(), 1..12).prop_map(|forms| {
        let n = forms.len();
        let tokens = forms
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                let punct = f == "," || f == ".";
                let upos = if punct { "PUNCT" } else { "NOUN" };
                let head = if i == 0 { 0 } else { (i * 7) % i + 1 };
                let mut t = TaggedToken::new(f.clone(), f.to_lowercase(), upos, Some("NN"), head.min(n), "dep");
                if i % 3 == 1 {
                    t.misc = Some("SpaceAfter=No".into());
                }
                t
            })
            .collect();
        Sentence::new(tokens)
    })
}

fn document() -> impl Strategy<Value = TaggedDocument> {
    (
        "[a-z][a-z0-9_]{0,6}",
        prop::collection::vec(sentence(), 1..5),
        prop::collection::btree_map("[a-z]{1,5}", "[A-Za-z ]{0,10}", 0..3),
    )
        .prop_map(|(id, sentences, metadata)| {
            let mut d = TaggedDocument::new(id, "fixture");
            d.sentences = sentences;
            d.metadata = metadata.into_iter().map(|(k, v)| (k, v.trim().to_string())).collect::<BTreeMap<_, _>>();
            d
        })
}

fn z_matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
    let mut m = FeatureMatrix::from_rows(&rows).unwrap();
    m.inventory_version = "B1988-67".into();
    let stats = StandardizationStats {
        inventory_version: "B1988-67".into(),
        register: "r".into(),
        means: vec![0.0; FEATURE_COUNT],
        sds: vec![1.0; FEATURE_COUNT],
        fitted_on: 0,
    };
    standardize(&m, &stats).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conllu_round_trip(doc in document()) {
        let text = write_conllu(std::slice::from_ref(&doc));
        let back = parse_conllu_str(&text).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].sentences, &doc.sentences);
        prop_assert_eq!(&back[0].doc_id, &doc.doc_id);
        prop_assert_eq!(&back[0].metadata, &doc.metadata);
        prop_assert_eq!(write_conllu(&back), text);
    }

    #[test]
    fn cleaning_is_idempotent(raw in "[ \\t\\n\\r.,;!?a-zA-Z\u{00a0}\u{fb01}]{0,60}") {
        let (once, _) = clean_text(&raw);
        let (twice, report) = clean_text(&once);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(report.replacements, 0);
    }

    #[test]
    fn truncation_respects_limits(lengths in prop::collection::vec(1usize..120, 1..12)) {
        let doc = common::synth::document(&lengths);
        let total: usize = lengths.iter().sum();
        let t = truncate_to_limit(&doc, SOFT_LIMIT, HARD_LIMIT).unwrap();
        prop_assert!(t.lexical_tokens <= HARD_LIMIT);
        if total < SOFT_LIMIT {
            prop_assert!(!t.truncated);
            prop_assert_eq!(t.lexical_tokens, total);
        } else {
            prop_assert!(t.lexical_tokens >= SOFT_LIMIT.min(total));
        }
        let kept = t.document.unwrap();
        prop_assert_eq!(count_lexical_tokens(&kept), t.lexical_tokens);
    }

    #[test]
    fn dimension_scores_are_linear(
        a in prop::collection::vec(-3.0f64..3.0, FEATURE_COUNT),
        b in prop::collection::vec(-3.0f64..3.0, FEATURE_COUNT),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let loadings = DimensionLoadings::default();
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let s = dimension_scores(&z_matrix(vec![a, b, combo]), &loadings).unwrap();
        for d in 0..6 {
            let want = alpha * s[0].scores[d] + beta * s[1].scores[d];
            prop_assert!((s[2].scores[d] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn standardize_round_trip(rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 2..20)) {
        let mut m = FeatureMatrix::from_rows(&rows).unwrap();
        m.inventory_version = "v".into();
        let stats = fit_stats(&m).unwrap();
        let back = unstandardize(&standardize(&m, &stats).unwrap(), &stats).unwrap();
        for (j, sd) in stats.sds.iter().enumerate() {
            if *sd == 0.0 {
                continue;
            }
            for i in 0..m.nrows() {
                let (x, y) = (m.row(i)[j], back.row(i)[j]);
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}

#[test]
fn standardized_columns_have_unit_spread() {
    let m = common::synth::gaussian(300, 67, 21);
    let stats = fit_stats(&m).unwrap();
    let z = standardize(&m, &stats).unwrap();
    let again = fit_stats(&z).unwrap();
    for j in 0..67 {
        assert!(again.means[j].abs() < 1e-12);
        assert!((again.sds[j] - 1.0).abs() < 1e-12);
    }
}
