use std::path::Path;
use std::process::{Command, Output};

fn mobsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mobsim")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn city(dir: &Path) -> (String, String) {
    let out = mobsim(&["synth-city", "--out-dir", s(dir), "--n-locations", "25", "--city-seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (s(&dir.join("trips.csv")).to_owned(), s(&dir.join("locations.csv")).to_owned())
}

#[test]
fn ingest_reports_network_stats() {
    let dir = tempfile::tempdir().unwrap();
    let (trips, locations) = city(dir.path());
    let out = mobsim(&["ingest", "--trips", &trips, "--locations", &locations]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 25);
    assert!(v["e"].as_u64().unwrap() > 0);
    assert!(v["mean_degree"].as_f64().unwrap() > 0.0);
    assert!(v["degree_histogram"].is_array());
}

#[test]
fn simulate_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let (trips, locations) = city(dir.path());
    let mobile = dir.path().join("mobile.csv");
    let transit = dir.path().join("transit.csv");
    let base = ["simulate", "--trips", &trips, "--locations", &locations, "--disease", "varicella", "--seed", "5"];
    let out = mobsim(&[&base[..], &["--out", s(&mobile)]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = mobsim(&[&base[..], &["--transit-k", "2", "--transit-theta", "5", "--out", s(&transit)]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let header = std::fs::read_to_string(&mobile).unwrap();
    assert!(header.starts_with("day,prevalence,frac_locations_infected,total_S,total_I,total_R\n"));

    let out = mobsim(&["compare", "--transit", s(&transit), "--mobile", s(&mobile)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["early_warning", "peak_timing", "peak_magnitude", "situational_awareness", "locations_timing"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let same = mobsim(&["compare", "--transit", s(&mobile), "--mobile", s(&mobile)]);
    let v: serde_json::Value = serde_json::from_slice(&same.stdout).unwrap();
    assert_eq!(v["peak_timing"], 0);
    assert_eq!(v["situational_awareness"], 1.0);
}

#[test]
fn theory_writes_ranking_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (trips, locations) = city(dir.path());
    let out = mobsim(&[
        "theory", "--trips", &trips, "--locations", &locations, "--source", "L0000", "--beta", "0.5", "--gamma", "0.3333",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("source_id,dest_id,theta,theta_transit,ratio\n"));
    assert_eq!(text.lines().count(), 25);
}

#[test]
fn sweep_honours_config_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let (trips, locations) = city(dir.path());
    let config = dir.path().join("config.json");
    let cfg = serde_json::json!({
        "diseases": [{"name": "h1n1", "beta": 0.5, "gamma": 0.3333333333333333}],
        "delta_bands": ["low"],
        "k_range": [2, 3],
        "theta_range": [4, 5],
        "seed_draws": 1,
        "replicates": 1,
        "horizon": 150,
        "seed": 1,
        "input": {"trips": trips, "locations": locations},
    });
    std::fs::write(&config, cfg.to_string()).unwrap();
    let out_a = dir.path().join("a");
    let out = mobsim(&["sweep", "--config", s(&config), "--seed-draws", "2", "--replicates", "3", "--output-dir", s(&out_a)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("summary.json")).unwrap()).unwrap();
    // pairs with mean in [10, 20]: (2,5), (3,4), (3,5)
    assert_eq!(summary["paired_runs"], 2 * 3 * 3);
    assert_eq!(summary["total_simulations"], 2 * 3 * 4);

    let out_b = dir.path().join("b");
    mobsim(&["sweep", "--config", s(&config), "--seed-draws", "2", "--replicates", "3", "--output-dir", s(&out_b)]);
    for name in ["cells.csv", "ledger.jsonl", "r0_panels.csv", "prevalence_curves.csv", "sweep_result.json"] {
        assert_eq!(std::fs::read(out_a.join(name)).unwrap(), std::fs::read(out_b.join(name)).unwrap(), "{name}");
    }

    let out_c = dir.path().join("c");
    mobsim(&["sweep", "--config", s(&config), "--seed", "2", "--seed-draws", "2", "--replicates", "3", "--output-dir", s(&out_c)]);
    assert_ne!(
        std::fs::read(out_a.join("ledger.jsonl")).unwrap(),
        std::fs::read(out_c.join("ledger.jsonl")).unwrap()
    );

    let out_d = dir.path().join("d");
    let out = mobsim(&["export", "--input", s(&out_a.join("sweep_result.json")), "--out-dir", s(&out_d)]);
    assert!(out.status.success());
    for entry in std::fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(std::fs::read(out_a.join(&name)).unwrap(), std::fs::read(out_d.join(&name)).unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mobsim(&["simulate", "--beta", "-1", "--gamma", "0.3"]).status.code(), Some(1));
    assert_eq!(mobsim(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(mobsim(&["--help"]).status.code(), Some(0));

    let missing = dir.path().join("missing.csv");
    let out = mobsim(&["compare", "--transit", s(&missing), "--mobile", s(&missing)]);
    assert_eq!(out.status.code(), Some(3));

    let bad_config = dir.path().join("bad.json");
    std::fs::write(&bad_config, r#"{"replicates": 0}"#).unwrap();
    assert_eq!(mobsim(&["sweep", "--config", s(&bad_config)]).status.code(), Some(1));

    // almost all trips join two locations at the same coordinates
    let locations = dir.path().join("locations.csv");
    let trips = dir.path().join("trips.csv");
    std::fs::write(&locations, "id,lat,lon\na,43.9,125.3\nb,43.9,125.3\nc,43.9,125.45\n").unwrap();
    std::fs::write(&trips, "origin,destination,hour,count\na,b,8,900\nb,a,8,900\na,c,8,10\nc,a,8,10\na,a,8,5000\n").unwrap();
    let out = mobsim(&[
        "simulate", "--trips", s(&trips), "--locations", s(&locations), "--transit-k", "2", "--transit-theta", "5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    std::fs::write(&trips, "origin,destination,hour,count\na,b,24,1\n").unwrap();
    let out = mobsim(&["ingest", "--trips", s(&trips), "--locations", s(&locations)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}
