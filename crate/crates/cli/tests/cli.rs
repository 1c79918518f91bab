use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regmmd_cli::config::RunConfig;
use tempfile::TempDir;

const GOLDEN: &str = include_str!("../../core/tests/fixtures/golden12.conllu");

/// The twelve tagged sentences of the golden fixture.
fn sentences() -> Vec<String> {
    GOLDEN
        .split("\n\n")
        .map(|block| {
            block
                .lines()
                .filter(|l| !l.starts_with("# newdoc") && !l.starts_with("# register"))
                .collect::<Vec<_>>()
                .join("\n")
        })
        .filter(|b| !b.trim().is_empty())
        .collect()
}

/// Documents assembled from sentences drawn out of `allowed`.
fn corpus(prefix: &str, docs: usize, allowed: &[usize], seed: u64) -> String {
    let pool = sentences();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for d in 0..docs {
        out.push_str(&format!("# newdoc id = {prefix}{d:04}\n# register = XSum\n"));
        for _ in 0..rng.random_range(6..12) {
            out.push_str(&pool[allowed[rng.random_range(0..allowed.len())]]);
            out.push_str("\n\n");
        }
    }
    out
}

fn records(prefix: &str, docs: usize) -> String {
    (0..docs)
        .map(|d| {
            let summary = vec!["word"; 3 + d % 11].join(" ");
            format!(
                "{}\n",
                serde_json::json!({"id": format!("{prefix}{d:04}"), "text": format!("story {d}"), "meta": {"summary": summary}})
            )
        })
        .collect()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let all: Vec<usize> = (0..12).collect();
        fs::write(dir.path().join("human.conllu"), corpus("h", 240, &all, 1)).unwrap();
        fs::write(dir.path().join("near.conllu"), corpus("h", 80, &all, 2)).unwrap();
        fs::write(dir.path().join("far.conllu"), corpus("h", 80, &[0, 1, 3, 5], 3)).unwrap();
        fs::write(dir.path().join("human.jsonl"), records("h", 240)).unwrap();
        Fixture { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_regmmd"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn extract(&self, name: &str) {
        self.ok(&[
            "extract",
            "--register",
            "XSum",
            "--input",
            &format!("{name}.conllu"),
            "--source",
            name,
            "--out",
            &format!("{name}_features"),
        ]);
    }

    fn baseline(&self, out: &str) {
        self.ok(&[
            "baseline", "--register", "XSum", "--human", "human_features/features.csv", "--sizes", "10,20,40,80", "--B",
            "60", "--seed", "7", "--out", out,
        ]);
    }

    fn with_models(&self, command: &str, out: &str) -> String {
        self.ok(&[
            command,
            "--register",
            "XSum",
            "--human",
            "human_features/features.csv",
            "--stats",
            "base/stats.json",
            "--kernel",
            "base/kernel.json",
            "--model",
            "near=near_features/features.csv",
            "--model",
            "far=far_features/features.csv",
            "--n",
            "40",
            "--B",
            "60",
            "--seed",
            "7",
            "--out",
            out,
        ])
    }

    fn prepared() -> Self {
        let f = Fixture::new();
        for name in ["human", "near", "far"] {
            f.extract(name);
        }
        f.baseline("base");
        f
    }
}

fn csv_records(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn extract_writes_matrix_and_resolved_config() {
    let f = Fixture::new();
    let stdout = f.ok(&[
        "extract", "--register", "XSum", "--input", "human.conllu", "--truncate", "--out", "ex",
    ]);
    assert!(stdout.starts_with("240 documents"), "{stdout}");
    let rows = csv_records(&f.path("ex/features.csv"));
    assert_eq!(rows.len(), 240);
    assert_eq!(rows[0]["register"], "XSum");
    assert_eq!(rows[0].len(), 3 + 67);
    assert_eq!(fs::read_to_string(f.path("ex/features.jsonl")).unwrap().lines().count(), 240);
    assert_eq!(fs::read_to_string(f.path("ex/truncation.jsonl")).unwrap().lines().count(), 240);
    let resolved = RunConfig::load(&f.path("ex/resolved_config.toml")).unwrap();
    assert_eq!(resolved.register, "XSum");
    assert!(resolved.text.truncate);
    assert_eq!(resolved.inputs.corpus, vec![PathBuf::from("human.conllu")]);
}

#[test]
fn missing_input_leaves_no_files() {
    let f = Fixture::new();
    let out = f.run(&["extract", "--register", "XSum", "--input", "absent.conllu", "--out", "ex"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.conllu"));
    assert!(!f.path("ex").exists() || fs::read_dir(f.path("ex")).unwrap().next().is_none());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let f = Fixture::new();
    fs::write(f.path("run.toml"), "register = \"XSum\"\n[sampling]\nbogus = 3\n").unwrap();
    let out = f.run(&["--config", "run.toml", "extract", "--input", "human.conllu"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn config_file_values_are_used_and_flags_override_them() {
    let f = Fixture::new();
    f.extract("human");
    fs::write(
        f.path("run.toml"),
        "register = \"XSum\"\nseed = 3\nout = \"cfg\"\n[inputs]\nhuman = \"human_features/features.csv\"\n\
         [sampling]\nB = 20\nsizes = [10, 20]\n",
    )
    .unwrap();
    f.ok(&["--config", "run.toml", "baseline", "--seed", "4"]);
    let resolved = RunConfig::load(&f.path("cfg/resolved_config.toml")).unwrap();
    assert_eq!((resolved.seed, resolved.sampling.draws), (4, 20));
    let rows = csv_records(&f.path("cfg/stability.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["B"], "20");
    assert_eq!(rows[0]["seed"], "4");
}

#[test]
fn baseline_reruns_identically_from_stored_artifacts() {
    let f = Fixture::prepared();
    f.ok(&[
        "baseline", "--register", "XSum", "--human", "human_features/features.csv", "--sizes", "10,20,40,80", "--B",
        "60", "--seed", "7", "--stats", "base/stats.json", "--kernel", "base/kernel.json", "--out", "again",
    ]);
    for file in ["stability.csv", "stats.json", "kernel.json"] {
        assert_eq!(
            fs::read(f.path("base").join(file)).unwrap(),
            fs::read(f.path("again").join(file)).unwrap(),
            "{file}"
        );
    }
    let rows = csv_records(&f.path("base/stability.csv"));
    let header: Vec<&str> = rows[0].keys().map(String::as_str).collect();
    let mut want = vec!["pair", "register", "mmd2", "ci_low", "ci_high", "n", "B", "bandwidth", "seed"];
    want.sort_unstable();
    assert_eq!(header, want);
    let highs: Vec<f64> = rows.iter().map(|r| r["ci_high"].parse().unwrap()).collect();
    assert!(highs.last() < highs.first(), "{highs:?}");
}

#[test]
fn baseline_rejects_sizes_above_half_the_corpus() {
    let f = Fixture::new();
    f.extract("human");
    let out = f.run(&[
        "baseline", "--register", "XSum", "--human", "human_features/features.csv", "--sizes", "50,150", "--B", "5",
        "--out", "big",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("need at least 300 rows, have 240"));
    assert!(!f.path("big/stability.csv").exists());
}

#[test]
fn stats_from_another_register_are_refused() {
    let f = Fixture::prepared();
    let mut stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(f.path("base/stats.json")).unwrap()).unwrap();
    stats["register"] = "wikiHow".into();
    fs::write(f.path("other.json"), stats.to_string()).unwrap();
    let out = f.run(&[
        "evaluate", "--register", "XSum", "--human", "human_features/features.csv", "--stats", "other.json", "--kernel",
        "base/kernel.json", "--model", "near=near_features/features.csv", "--n", "40", "--B", "5",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("wikiHow"));
}

#[test]
fn evaluate_ranks_the_shifted_model_last() {
    let f = Fixture::prepared();
    f.with_models("evaluate", "eval");
    let rows = csv_records(&f.path("eval/ranking.csv"));
    let pairs: Vec<&str> = rows.iter().map(|r| r["pair"].as_str()).collect();
    assert_eq!(pairs, ["human-human", "human-near", "human-far"]);
    let far = &rows[2];
    let reference = &rows[0];
    assert!(far["mmd2"].parse::<f64>().unwrap() > reference["ci_high"].parse::<f64>().unwrap());
    assert!(rows.iter().all(|r| r["bandwidth"] == rows[0]["bandwidth"] && r["seed"] == "7"));
}

#[test]
fn evaluate_is_byte_for_byte_reproducible() {
    let f = Fixture::prepared();
    f.with_models("evaluate", "e1");
    f.with_models("evaluate", "e2");
    assert_eq!(fs::read(f.path("e1/ranking.csv")).unwrap(), fs::read(f.path("e2/ranking.csv")).unwrap());
}

#[test]
fn diagnostics_reports() {
    let f = Fixture::prepared();
    f.with_models("diagnostics", "diag");
    let dims = csv_records(&f.path("diag/dimensions.csv"));
    assert_eq!(dims.len(), (240 + 80 + 80) * 6);
    for d in 1..=6 {
        let human: Vec<f64> = dims
            .iter()
            .filter(|r| r["source"] == "human" && r["dimension"] == d.to_string())
            .map(|r| r["score"].parse().unwrap())
            .collect();
        let mean = human.iter().sum::<f64>() / human.len() as f64;
        assert!(mean.abs() < 1e-9, "dimension {d}: {mean}");
    }
    let diffs = csv_records(&f.path("diag/feature_differences.csv"));
    assert_eq!(diffs.len(), 2 * 67);
    let cross = fs::read_to_string(f.path("diag/cross_matrix.csv")).unwrap();
    assert!(cross.starts_with("source,human,far,near\n"));
    let variance = csv_records(&f.path("diag/variance.csv"));
    assert_eq!(variance[0]["source"], "human");
    let metrics = fs::read_to_string(f.path("diag/detector_metrics.csv")).unwrap();
    assert!(metrics.starts_with("register,accuracy,roc_auc\nXSum,"));
}

#[test]
fn detector_separates_the_shifted_corpus() {
    let f = Fixture::prepared();
    f.ok(&[
        "detector", "--register", "XSum", "--human", "human_features/features.csv", "--stats", "base/stats.json",
        "--model", "far=far_features/features.csv", "--seed", "2", "--out", "det",
    ]);
    let metrics = csv_records(&f.path("det/detector_metrics.csv"));
    let auc: f64 = metrics[0]["roc_auc"].parse().unwrap();
    assert!(auc > 0.9, "{auc}");
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("det/detector_model.json")).unwrap()).unwrap();
    assert_eq!(model["weights"].as_array().unwrap().len(), 67);
    assert_eq!(model["inventory_version"], "B1988-67");
}

#[test]
fn subsample_writes_disjoint_manifests() {
    let f = Fixture::prepared();
    let stdout = f.ok(&[
        "subsample", "--register", "XSum", "--human", "human_features/features.csv", "--records", "human.jsonl", "--n",
        "60", "--fewshot-n", "60", "--seed", "5", "--out", "sel",
    ]);
    assert!(stdout.starts_with("selected 60 of 228 eligible"), "{stdout}");
    let read = |p: &str| -> serde_json::Value { serde_json::from_str(&fs::read_to_string(f.path(p)).unwrap()).unwrap() };
    let sel = read("sel/selection.json");
    let shots = read("sel/fewshot.json");
    let ids = |v: &serde_json::Value| -> Vec<String> {
        v["selected_ids"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
    };
    assert_eq!(ids(&sel).len(), 60);
    assert_eq!(sel["excluded_ids"].as_array().unwrap().len(), 12);
    assert!(ids(&shots).iter().all(|id| !ids(&sel).contains(id)));
}

/// Serves chat completions that echo the last user message.
fn stub_server() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                let request: serde_json::Value = serde_json::from_slice(&body).unwrap();
                let messages = request["messages"].as_array().unwrap();
                let user = messages.iter().rev().find(|m| m["role"] == "user").unwrap();
                let reply = serde_json::json!({
                    "choices": [{"message": {"role": "assistant", "content": format!("A reply about  {}", user["content"].as_str().unwrap())}}]
                })
                .to_string();
                let response = format!(
                    "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                    reply.len()
                );
                stream.write_all(response.as_bytes()).unwrap();
            });
        }
    });
    format!("http://{addr}/v1")
}

#[test]
fn generate_against_a_local_endpoint() {
    let f = Fixture::prepared();
    f.ok(&[
        "subsample", "--register", "XSum", "--human", "human_features/features.csv", "--n", "20", "--fewshot-n", "20",
        "--seed", "5", "--out", "sel",
    ]);
    let endpoint = stub_server();
    let stdout = f.ok(&[
        "generate", "--register", "XSum", "--records", "human.jsonl", "--selection", "sel/selection.json", "--fewshot",
        "sel/fewshot.json", "--shots", "2", "--model", "stub-model", "--endpoint", &endpoint, "--seed", "9", "--out",
        "gen",
    ]);
    assert!(stdout.starts_with("20 generations (0 unusable"), "{stdout}");
    let lines: Vec<serde_json::Value> = fs::read_to_string(f.path("gen/generations.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 20);
    let ids: Vec<&str> = lines.iter().map(|l| l["doc_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    assert_eq!(lines[0]["fewshot_ids"].as_array().unwrap().len(), 2);
    assert!(lines[0]["cleaned_output"].as_str().unwrap().starts_with("A reply about Please write an article given the following summary: word"));
    assert_eq!(fs::read_to_string(f.path("gen/model_texts.jsonl")).unwrap().lines().count(), 20);
    assert!(!f.path("gen/generations.journal.jsonl").exists());

    // A second run finds every record done and sends nothing.
    let dead = "http://127.0.0.1:9/v1";
    f.ok(&[
        "generate", "--register", "XSum", "--records", "human.jsonl", "--selection", "sel/selection.json", "--fewshot",
        "sel/fewshot.json", "--shots", "2", "--model", "stub-model", "--endpoint", dead, "--seed", "9", "--out", "gen",
    ]);
}
