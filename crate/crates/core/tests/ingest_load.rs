use std::io::Write;

use sessiz_core::ingest::{filter_language, filter_window, load_posts, InputFormat, LoadOptions, RawPost};
use sessiz_core::{TimeWindow, Timestamp};

const CORPUS_SIZE: usize = 47_024;

#[test]
fn full_size_csv_loads_every_row() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "id,created_at,text,lang").unwrap();
    let start = Timestamp::from_ymd_hms(2021, 6, 1, 0, 0, 0).unwrap().datetime();
    for i in 0..CORPUS_SIZE {
        let t = start + chrono::Duration::minutes(i as i64 * 17);
        writeln!(file, "{i},{},\"sessiz istila, gönderi {i}\",tr", t.format("%Y-%m-%dT%H:%M:%SZ")).unwrap();
    }
    file.flush().unwrap();
    let report = load_posts(file.path(), InputFormat::Csv, &LoadOptions::default()).unwrap();
    assert_eq!(report.posts.len(), CORPUS_SIZE);
    assert!(report.errors.is_empty());
    assert_eq!(report.posts[CORPUS_SIZE - 1].id, (CORPUS_SIZE - 1).to_string());
}

fn post(id: &str, ts: &str, lang: &str) -> RawPost {
    RawPost {
        id: id.into(),
        created_at: ts.parse().unwrap(),
        text: "x".into(),
        lang: lang.into(),
    }
}

#[test]
fn window_matches_per_record_comparison() {
    let posts = vec![
        post("a", "2021-05-31T23:59:59Z", "tr"),
        post("b", "2021-06-01T00:00:00Z", "tr"),
        post("c", "2021-06-01T00:00:01Z", "tr"),
    ];
    let window = TimeWindow::study_period();
    let expected: Vec<RawPost> = posts
        .iter()
        .filter(|p| p.created_at >= window.start() && p.created_at <= window.end())
        .cloned()
        .collect();
    let got = filter_window(posts, &window);
    assert_eq!(got, expected);
    assert_eq!(got.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["b", "c"]);
}

#[test]
fn language_filter_ignores_case() {
    let posts = vec![post("1", "2022-01-01T00:00:00Z", "tr"), post("2", "2022-01-01T00:00:00Z", "en"), post("3", "2022-01-01T00:00:00Z", "TR")];
    let kept = filter_language(posts, "Tr").unwrap();
    assert_eq!(kept.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["1", "3"]);
}

#[test]
fn malformed_share_above_limit_aborts() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "id,created_at,text,lang").unwrap();
    for i in 0..20 {
        let ts = if i < 3 { "garbage" } else { "2022-01-01T00:00:00Z" };
        writeln!(file, "{i},{ts},t,tr").unwrap();
    }
    let err = load_posts(file.path(), InputFormat::Csv, &LoadOptions::default()).unwrap_err();
    assert_eq!(err.kind(), sessiz_core::ErrorKind::Data);
}
