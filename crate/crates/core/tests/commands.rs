mod common;

use std::path::{Path, PathBuf};

use reqcomp::commands::*;
use reqcomp::eval::EvalReport;
use reqcomp::ml::{load_model, Algorithm, Preset};
use reqcomp::stub::wiki::StubWiki;

use common::{fake_mlm_server, RAIL_A, RAIL_B};

fn write_docs(dir: &Path) -> Vec<PathBuf> {
    [("rail-a", RAIL_A), ("rail-b", RAIL_B)]
        .iter()
        .map(|(name, text)| {
            let p = dir.join(format!("{name}.txt"));
            std::fs::write(&p, text).unwrap();
            p
        })
        .collect()
}

fn hosting() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/hosting")
}

#[test]
fn empty_document_recommends_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let config = RunConfig {
        inputs: vec![empty],
        provider: Some(ProviderSource::Url("http://127.0.0.1:9".into())),
        ..RunConfig::default()
    };
    let reports = cmd_recommend(&config).unwrap();
    assert!(reports[0].terms.is_empty());
    assert_eq!(reports[0].masks, 0);
}

#[test]
fn unreachable_provider_is_exit_4() {
    let config = RunConfig {
        inputs: vec![hosting().join("hosting.txt")],
        provider: Some(ProviderSource::Url("http://127.0.0.1:9".into())),
        ..RunConfig::default()
    };
    let err = cmd_recommend(&config).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
}

#[test]
fn configuration_errors_are_exit_2() {
    let base = RunConfig {
        inputs: vec![hosting().join("hosting.txt")],
        provider: Some(ProviderSource::Fixture(hosting().join("fixture.json"))),
        ..RunConfig::default()
    };
    let cases = [
        RunConfig { k: 0, ..base.clone() },
        RunConfig { k: 51, ..base.clone() },
        RunConfig {
            preset: Some(Preset::Strict),
            ..base.clone()
        },
        RunConfig {
            inputs: vec!["/nonexistent/doc.txt".into()],
            ..base.clone()
        },
        RunConfig {
            provider: None,
            ..base.clone()
        },
        RunConfig {
            model: Some("/nonexistent/model.json".into()),
            ..base.clone()
        },
    ];
    for c in cases {
        let err = cmd_recommend(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }
}

#[test]
fn recommendations_carry_evidence() {
    let config = RunConfig {
        inputs: vec![hosting().join("hosting.txt")],
        provider: Some(ProviderSource::Fixture(hosting().join("fixture.json"))),
        k: 5,
        ..RunConfig::default()
    };
    let report = cmd_recommend(&config).unwrap().remove(0);
    let stability = report.terms.iter().find(|t| t.term == "stability").unwrap();
    assert_eq!(stability.evidence.len(), 1);
    assert_eq!(stability.evidence[0].source.masked, "availability");
    assert_eq!(stability.evidence[0].rank, 3);
    assert_eq!(stability.score, stability.evidence[0].features.f7);
    // descending by score
    assert!(report.terms.windows(2).all(|w| w[0].score >= w[1].score));
}

#[test]
fn train_then_filter() {
    let server = fake_mlm_server();
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        inputs: write_docs(dir.path()),
        provider: Some(ProviderSource::Url(server.url())),
        preset: Some(Preset::Lenient),
        out: Some(dir.path().join("out")),
        seed: 3,
        ..RunConfig::default()
    };
    let summary = cmd_train(&config, &TrainOptions::default()).unwrap();
    assert_eq!(summary.algorithm, Algorithm::SVM);
    let text = std::fs::read_to_string(&summary.model).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["config"]["cost"]["cost_fn"], 2.0);
    assert!(dir.path().join("out/training.csv").is_file());
    assert!(dir.path().join("out/info_gain.json").is_file());

    let model = load_model(&summary.model).unwrap();
    // lenient trains on an undersample
    assert!(model.relevant + model.non_relevant < summary.relevant + summary.non_relevant);
    assert_eq!(model.config.sampling_ratio, Some(1.0));

    let filtered = RunConfig {
        model: Some(summary.model.clone()),
        ..config.clone()
    };
    let unfiltered = RunConfig {
        preset: None,
        ..config.clone()
    };
    let a = cmd_recommend(&filtered).unwrap();
    let b = cmd_recommend(&unfiltered).unwrap();
    for (f, u) in a.iter().zip(&b) {
        assert!(f.term_set().is_subset(&u.term_set()));
        assert_eq!(f.filter, Some(Algorithm::SVM));
    }

    let mismatched = RunConfig {
        preset: Some(Preset::Strict),
        ..filtered
    };
    assert_eq!(cmd_recommend(&mismatched).unwrap_err().exit_code(), 2);

    let no_choice = RunConfig { preset: None, ..config };
    assert_eq!(cmd_train(&no_choice, &TrainOptions::default()).unwrap_err().exit_code(), 2);
}

#[test]
fn evaluate_writes_a_valid_report() {
    let server = fake_mlm_server();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = RunConfig {
        inputs: write_docs(dir.path()),
        provider: Some(ProviderSource::Url(server.url())),
        out: Some(out.clone()),
        ..RunConfig::default()
    };
    let report = cmd_evaluate(&config, &EvaluateOptions::default()).unwrap();
    assert_eq!(report.records.len(), 2);
    let back = EvalReport::from_json(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(back, report);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let plots: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("plots.json")).unwrap()).unwrap();
    assert_eq!(plots["accuracy/unfiltered"].as_array().unwrap().len(), 2);
}

#[test]
fn evaluate_records_failures_and_continues() {
    let server = fake_mlm_server();
    let dir = tempfile::tempdir().unwrap();
    let mut inputs = write_docs(dir.path());
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "The system shall log.").unwrap();
    inputs.push(short);
    let config = RunConfig {
        inputs,
        provider: Some(ProviderSource::Url(server.url())),
        out: Some(dir.path().join("out")),
        ..RunConfig::default()
    };
    let report = cmd_evaluate(&config, &EvaluateOptions::default()).unwrap();
    assert_eq!(report.records.len(), 2);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].doc_id, "short");
}

const WORDNET: &str = "  1 license line
00000001 03 n 02 signal 0 signaling 0 000 | a sign
00000002 03 n 02 route 0 path 0 000 | a way
00000003 03 n 02 delay 0 holdup 0 000 | waiting
00000004 03 n 02 maintenance 0 upkeep 0 000 | care
";

#[test]
fn baselines_give_three_hit_sets() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("data.noun");
    std::fs::write(&lexicon, WORDNET).unwrap();
    let config = RunConfig {
        inputs: write_docs(dir.path()),
        synonyms: Some(lexicon),
        out: Some(dir.path().join("out")),
        ..RunConfig::default()
    };
    let reports = cmd_baseline(&config, &BaselineOptions::default()).unwrap();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert_eq!(r.baselines.keys().collect::<Vec<_>>(), ["baseline1", "baseline2", "baseline3"]);
        assert!(r.baselines["baseline2"].warning.is_some());
    }
    assert!(dir.path().join("out/baselines.json").is_file());

    let without = RunConfig {
        synonyms: None,
        ..config.clone()
    };
    assert_eq!(cmd_baseline(&without, &BaselineOptions::default()).unwrap_err().exit_code(), 2);
    let bad = BaselineOptions {
        which: [4].into(),
        ..BaselineOptions::default()
    };
    assert_eq!(cmd_baseline(&config, &bad).unwrap_err().exit_code(), 2);
}

#[test]
fn mined_corpus_feeds_recommend() {
    let wiki = StubWiki::rail().serve();
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("rail.txt");
    std::fs::write(&doc, "Rail transport shall stop at every level crossing. The rail transport shall be safe.").unwrap();
    let corpora = dir.path().join("corpora");
    let config = RunConfig {
        inputs: vec![doc],
        wiki_url: Some(format!("{}/w/api.php", wiki.url())),
        wiki_rate: 0.0,
        corpus_dir: Some(corpora.clone()),
        ..RunConfig::default()
    };
    let mined = cmd_mine(&config).unwrap();
    assert!(mined[0].articles > 0);
    assert!(corpora.join("rail/manifest.json").is_file());

    let server = fake_mlm_server();
    let offline = RunConfig {
        wiki_url: None,
        provider: Some(ProviderSource::Url(server.url())),
        ..config
    };
    let hits = wiki.hits();
    let report = cmd_recommend(&offline).unwrap().remove(0);
    assert_eq!(wiki.hits(), hits);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
}

#[test]
fn unreachable_wiki_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("rail.txt");
    std::fs::write(&doc, "Rail transport shall stop at every level crossing.").unwrap();
    let config = RunConfig {
        inputs: vec![doc],
        wiki_url: Some("http://127.0.0.1:9/w/api.php".into()),
        wiki_rate: 0.0,
        out: Some(dir.path().join("out")),
        ..RunConfig::default()
    };
    assert_eq!(cmd_mine(&config).unwrap_err().exit_code(), 3);
}

#[test]
fn duplicate_document_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("x")).unwrap();
    let (a, b) = (dir.path().join("doc.txt"), dir.path().join("x/doc.txt"));
    std::fs::write(&a, "A.").unwrap();
    std::fs::write(&b, "B.").unwrap();
    assert_eq!(load_documents(&[a, b]).unwrap_err().exit_code(), 2);
}
