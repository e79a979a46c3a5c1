use std::path::{Path, PathBuf};
use std::process::Command;

use attnstudy::io::{read_ear_csv, read_landmarks};
use attnstudy::market::{build_timeline, event_window_stats, PriceSeries};
use attnstudy::pipeline::{Pipeline, RunConfig, COVARIATES};
use attnstudy::regression::{ols_univariate, RegressionInput};
use attnstudy::synth::{read_truth, scenario_prices, write_fixture, ConferenceTruth, SuiteSpec, SynthPlan};
use attnstudy::Error;

fn suite(n: usize, seed: u64) -> SuiteSpec {
    SuiteSpec {
        n_conferences: n,
        seed,
        conference_length_s: 90.0,
        ..SuiteSpec::default()
    }
}

fn fixture(plan: &SynthPlan) -> (tempfile::TempDir, PathBuf, Vec<ConferenceTruth>) {
    let dir = tempfile::tempdir().unwrap();
    let m = write_fixture(plan, dir.path()).unwrap();
    (dir, m.config, m.truth)
}

fn pipeline(config: &Path, out: &Path) -> Pipeline {
    Pipeline::new(RunConfig::load(config).unwrap(), out, 2, false).unwrap()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn identify_keeps_exactly_the_scripted_target_frames() {
    let (dir, config, truth) = fixture(&suite(5, 3).build().unwrap());
    let out = dir.path().join("out");
    let p = pipeline(&config, &out);
    let summary = p.identify().unwrap();
    for (rec, t) in summary.conferences.iter().zip(&truth) {
        assert_eq!(rec.conference_id, t.conference_id);
        let kept = read_landmarks(&out.join("identify").join(format!("{}.jsonl", t.conference_id))).unwrap();
        let idx: Vec<u64> = kept.iter().map(|f| f.frame_index).collect();
        assert_eq!(idx, t.target_frames);
        assert_eq!(rec.diagnostics.kept, t.target_frames.len());
        assert_eq!(rec.diagnostics.frames, t.frames);
        assert_eq!(rec.diagnostics.unknown, 0);
        assert!(rec.warning.is_none());
    }
}

#[test]
fn gallery_without_target_is_a_config_error() {
    let (dir, config, _) = fixture(&suite(4, 5).build().unwrap());
    let mut cfg = RunConfig::load(&config).unwrap();
    cfg.target_label = "nobody".into();
    let p = Pipeline::new(cfg, dir.path().join("out"), 1, false).unwrap();
    assert!(matches!(p.identify(), Err(Error::Config(_))));
}

#[test]
fn ear_values_equal_scripted_levels() {
    let (dir, config, truth) = fixture(&suite(4, 8).build().unwrap());
    let out = dir.path().join("out");
    let p = pipeline(&config, &out);
    p.identify().unwrap();
    let summary = p.ear().unwrap();
    for (rec, t) in summary.conferences.iter().zip(&truth) {
        let samples = read_ear_csv(&out.join("ear").join(format!("{}.csv", t.conference_id))).unwrap();
        assert_eq!(samples.len(), t.target_frames.len());
        assert_eq!(rec.diagnostics.valid, samples.len());
        for s in &samples {
            let seg = t
                .segments
                .iter()
                .find(|g| g.start_s <= s.timestamp_s && s.timestamp_s < g.end_s)
                .expect("sample inside a scripted segment");
            assert_eq!(seg.label, t.target_label);
            assert!((s.value - seg.ear).abs() < 1e-9, "t={} ear={} want {}", s.timestamp_s, s.value, seg.ear);
        }
    }
}

#[test]
fn stage_reruns_are_byte_identical() {
    let (dir, config, truth) = fixture(&suite(4, 9).build().unwrap());
    let out = dir.path().join("out");
    let p = pipeline(&config, &out);
    let id = &truth[1].conference_id;
    p.identify().unwrap();
    p.ear().unwrap();
    let f1 = std::fs::read(out.join("identify").join(format!("{id}.jsonl"))).unwrap();
    let e1 = std::fs::read(out.join("ear").join(format!("{id}.csv"))).unwrap();
    let p = pipeline(&config, &out);
    p.identify().unwrap();
    p.ear().unwrap();
    assert_eq!(f1, std::fs::read(out.join("identify").join(format!("{id}.jsonl"))).unwrap());
    assert_eq!(e1, std::fs::read(out.join("ear").join(format!("{id}.csv"))).unwrap());
}

#[test]
fn missing_stage_names_the_stage_to_run() {
    let (dir, config, _) = fixture(&suite(4, 10).build().unwrap());
    let p = pipeline(&config, &dir.path().join("out"));
    match p.ear() {
        Err(Error::MissingStage(m)) => assert!(m.contains("identify"), "{m}"),
        other => panic!("expected a missing stage error, got {other:?}"),
    }
    match p.eventstudy() {
        Err(Error::MissingStage(m)) => assert!(m.contains("attention"), "{m}"),
        other => panic!("expected a missing stage error, got {other:?}"),
    }
}

#[test]
fn empty_filtered_stream_gives_empty_csv_and_warnings() {
    let (dir, config, _) = fixture(&suite(4, 11).build().unwrap());
    let mut cfg = RunConfig::load(&config).unwrap();
    cfg.identity.min_votes = 1000;
    let out = dir.path().join("out");
    let p = Pipeline::new(cfg, &out, 1, false).unwrap();
    let ids = p.identify().unwrap();
    assert!(ids.conferences.iter().all(|c| c.diagnostics.kept == 0 && c.warning.is_some()));
    let ear = p.ear().unwrap();
    for c in &ear.conferences {
        assert!(c.warning.is_some());
        let lines = data_lines(&out.join("ear").join(format!("{}.csv", c.conference_id)));
        assert_eq!(lines, vec!["timestamp_s,ear".to_string()]);
    }
    let att = p.attention().unwrap();
    assert!(att.rows.is_empty());
    assert_eq!(att.exclusions.len(), 4);
}

#[test]
fn attention_matches_ground_truth() {
    let (dir, config, truth) = fixture(&suite(6, 12).build().unwrap());
    let out = dir.path().join("out");
    let p = pipeline(&config, &out);
    p.identify().unwrap();
    p.ear().unwrap();
    let s = p.attention().unwrap();
    assert_eq!(s.rows.len(), truth.len());
    assert!(s.exclusions.is_empty() && s.notes.is_empty());
    let dates: Vec<&str> = s.rows.iter().map(|r| r.date.as_str()).collect();
    let mut sorted = dates.clone();
    sorted.sort();
    assert_eq!(dates, sorted);
    for (row, t) in s.rows.iter().zip(&truth) {
        let dt = 1.0 / t.fps;
        // every piece boundary (episode, blink, gap, other speaker) costs at most one frame
        let pieces = t.segments.len() as f64;
        assert!((row.lambda_level - t.analytic_lambda).abs() <= pieces * dt * t.threshold_c, "{row:?}");
        assert!((row.reading_time_s - t.analytic_reading_time_s).abs() <= pieces * dt, "{row:?}");
        assert!(row.n_questions_log.is_some() && row.duration_chair_speech_log.is_some());
        assert!(((row.n_questions_log.unwrap()) - (t.questions as f64).ln()).abs() < 1e-12);
    }
    let first = &s.rows[0];
    assert!(first.delta_lambda.is_none() && first.delta_n_questions.is_none());
    assert!(first.delta_duration_qa.is_none() && first.delta_duration_chair_speech.is_none());
    for w in s.rows.windows(2) {
        assert_eq!(w[1].delta_lambda, Some(w[1].lambda - w[0].lambda));
    }
    let csv = data_lines(&out.join("attention").join("attention.csv"));
    assert_eq!(csv.len(), truth.len() + 1);
    assert!(csv[1].contains(",,"), "first row has empty deltas: {}", csv[1]);
}

#[test]
fn zero_attention_is_excluded_and_the_run_continues() {
    let mut plan = suite(6, 13).build().unwrap();
    let c = &mut plan.conferences[2];
    c.reading_episodes.clear();
    c.blink_rate_hz = 0.0;
    let dropped = c.conference_id.clone();
    let (dir, config, _) = fixture(&plan);
    let out = dir.path().join("out");
    let p = pipeline(&config, &out);
    p.identify().unwrap();
    p.ear().unwrap();
    let s = p.attention().unwrap();
    assert_eq!(s.rows.len(), 5);
    assert_eq!(s.exclusions.len(), 1);
    assert_eq!(s.exclusions[0].conference_id, dropped);
    // the following conference differences against the last included one
    assert_eq!(s.rows[2].delta_lambda, Some(s.rows[2].lambda - s.rows[1].lambda));
    let excl = data_lines(&out.join("attention").join("exclusions.csv"));
    assert_eq!(excl.len(), 2);
    assert!(excl[1].starts_with(&dropped));
    p.eventstudy().unwrap();
}

#[test]
fn eventstudy_writes_all_tables_and_windows() {
    let (dir, config, truth) = fixture(&suite(8, 14).build().unwrap());
    let out = dir.path().join("out");
    let s = pipeline(&config, &out).run_all().unwrap();
    assert_eq!(s.windows.len(), truth.len());
    assert_eq!(s.tables.len(), 3);
    for t in &s.tables {
        assert!(t.skipped.is_empty());
        let covs: Vec<&str> = t.table.columns.iter().map(|c| c.covariate.as_str()).collect();
        assert_eq!(covs, COVARIATES);
        for c in &t.table.columns {
            assert_eq!(c.result.n, truth.len() - 1);
        }
    }
    for name in ["r_d", "r_a", "vol_change_x100"] {
        for ext in ["txt", "csv", "json"] {
            let f = out.join("eventstudy").join(format!("table_{name}.{ext}"));
            let text = std::fs::read_to_string(&f).unwrap();
            assert!(text.contains(&s.meta.config_hash), "{}", f.display());
        }
    }
    let w = data_lines(&out.join("eventstudy").join("windows.csv"));
    assert_eq!(w.len(), truth.len() + 1);
    assert!(w[0].starts_with("conference_id,tau1,tau2,tau3,tau4,r_d,r_a"));
}

#[test]
fn too_few_conferences_abort_the_event_study() {
    let mut plan = suite(4, 15).build().unwrap();
    plan.conferences.truncate(3);
    let (dir, config, _) = fixture(&plan);
    let p = pipeline(&config, &dir.path().join("out"));
    assert!(matches!(p.run_all(), Err(Error::InsufficientData(_))));
}

#[test]
fn different_config_refuses_to_overwrite() {
    let (dir, config, _) = fixture(&suite(4, 16).build().unwrap());
    let out = dir.path().join("out");
    pipeline(&config, &out);
    let mut cfg = RunConfig::load(&config).unwrap();
    cfg.attention.threshold_c = 0.19;
    assert!(matches!(Pipeline::new(cfg.clone(), &out, 1, false), Err(Error::Config(_))));
    assert!(Pipeline::new(cfg, &out, 1, true).is_ok());
}

/// Size of the slope test when nothing is planted: the Q&A return is pure
/// noise, so a 1% test should reject rarely for every covariate.
#[test]
fn zero_effect_rarely_earns_three_stars() {
    let seeds = 200;
    let mut clean = 0;
    for seed in 0..seeds {
        let spec = SuiteSpec {
            n_conferences: 45,
            seed: 1000 + seed,
            beta: 0.0,
            per_minute_vol: Some(0.001),
            ..SuiteSpec::default()
        };
        let plan = spec.build().unwrap();
        let planted = plan.planted.as_ref().unwrap();
        let mut y = Vec::new();
        let mut xs = vec![Vec::new(); 4];
        let mut prev: Option<[f64; 3]> = None;
        for (c, row) in plan.conferences.iter().zip(planted) {
            let series = PriceSeries::new(scenario_prices(c).unwrap()).unwrap();
            let tl = build_timeline(c.timeline.qa_start, c.timeline.conference_end, c.timeline.trading_close).unwrap();
            let st = event_window_stats(&c.conference_id, &series, &tl).unwrap();
            let qa_s = (c.timeline.conference_end - c.timeline.qa_start).num_seconds() as f64;
            let bench = [
                (c.questions as f64).ln(),
                qa_s.ln(),
                c.speaker_segments().unwrap().chair_seconds().ln(),
            ];
            if let (Some(p), Some(dl)) = (prev, row.delta_lambda) {
                y.push(st.r_d);
                xs[0].push(dl);
                for k in 0..3 {
                    xs[k + 1].push(bench[k] - p[k]);
                }
            }
            prev = Some(bench);
        }
        let starred = xs.iter().any(|x| {
            let r = ols_univariate(&RegressionInput::unlabelled(y.clone(), x.clone()).unwrap()).unwrap();
            r.p_beta < 0.01
        });
        if !starred {
            clean += 1;
        }
    }
    let share = clean as f64 / seeds as f64;
    assert!(share >= 0.95, "only {share} of seeds free of *** coefficients");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_attnstudy"))
}

#[test]
fn cli_synth_then_run_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx");
    let st = bin()
        .args(["synth", "--conferences", "5", "--seed", "21", "--out"])
        .arg(&fx)
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(String::from_utf8_lossy(&st.stdout).contains("wrote 5 conferences"));
    let truth = read_truth(&fx.join("ground_truth.json")).unwrap();
    assert_eq!(truth.len(), 5);

    let out = dir.path().join("out");
    let o = bin().arg("run").arg("--config").arg(fx.join("config.json")).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Dependent variable: r_d"));
    assert!(stdout.contains("Observations"));

    // configuration problems exit with 1
    let o = bin().arg("run").arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin()
        .args(["attention", "--threshold-c", "0.25", "--config"])
        .arg(fx.join("config.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "different config into the same directory");

    // data problems exit with 2
    std::fs::write(fx.join("landmarks").join(format!("{}.jsonl", truth[0].conference_id)), "{not json\n").unwrap();
    let o = bin()
        .arg("identify")
        .arg("--config")
        .arg(fx.join("config.json"))
        .arg("--out")
        .arg(dir.path().join("out2"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
