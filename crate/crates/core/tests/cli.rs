use std::process::{Command, Output};

use alpha_lomax::distribution::{snr_pdf, Channel};
use alpha_lomax::metrics::{ber_exact, outage_probability, Modulation, Threshold};

fn alomax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alomax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| if f.is_empty() { f64::NAN } else { f.parse().unwrap() }).collect())
        .collect();
    (header, rows)
}

#[test]
fn outage_example_row() {
    let o = alomax(&["metrics", "--metric", "op", "--alpha", "1", "--lambda", "2", "--snr-db", "10", "--gamma0", "1"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(h, ["alpha", "lambda", "snr_db", "op", "op_asymptote"]);
    assert_eq!(rows.len(), 1);
    assert!((rows[0][3] - 0.1735537).abs() < 1e-7);
    let ch = Channel::from_parts(1.0, 2.0, 10.0).unwrap();
    assert_eq!(rows[0][3].to_bits(), outage_probability(&ch, Threshold::Snr(1.0)).unwrap().to_bits());
}

#[test]
fn csv_numbers_round_trip() {
    let o = alomax(&["metrics", "--metric", "ber", "--alpha", "1.75", "--lambda", "1.25", "--snr-db", "0:10:60"]);
    assert!(o.status.success());
    let (_, rows) = table(&stdout(&o));
    for r in rows {
        let ch = Channel::from_parts(1.75, 1.25, 10f64.powf(r[2] / 10.0)).unwrap();
        assert_eq!(r[3].to_bits(), ber_exact(&ch, Modulation::Bpsk).unwrap().value.to_bits());
    }
}

#[test]
fn pdf_sweep_is_unimodal_at_the_mode() {
    let o = alomax(&["eval", "--pdf", "--alpha", "2", "--lambda", "1.25", "--mean-snr-db", "0", "--gamma", "0:0.05:6"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(h.last().unwrap(), "pdf");
    assert_eq!(rows.len(), 121);
    let pdf: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    let peak = (0..pdf.len()).max_by(|&a, &b| pdf[a].total_cmp(&pdf[b])).unwrap();
    assert!(pdf[..=peak].windows(2).all(|w| w[0] <= w[1]));
    assert!(pdf[peak..].windows(2).all(|w| w[0] >= w[1]));
    let ch = Channel::from_parts(2.0, 1.25, 1.0).unwrap();
    let zeta = ch.zeta();
    let mode = zeta.powf(-0.5) * (1.0f64 / 3.5).sqrt();
    assert!((rows[peak][3] - mode).abs() <= 0.05);
    assert_eq!(pdf[10].to_bits(), snr_pdf(&ch, rows[10][3]).unwrap().to_bits());
}

#[test]
fn parameter_violation_exits_2() {
    let o = alomax(&["metrics", "--metric", "ber", "--alpha", "0.5", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/alpha"));
    let o = alomax(&["metrics", "--alpha", "1:1:2", "--lambda", "2:1:3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = alomax(&["eval", "--alpha", "1", "--lambda", "2", "--gamma", "1:0:2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = alomax(&["nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for (p, streams) in paths.iter().zip(["1", "6"]) {
        let o = alomax(&[
            "simulate", "--alpha", "1.75", "--lambda", "1.25", "--snr-db", "0:10:20", "--samples", "50000",
            "--seed", "9", "--streams", streams, "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let (h, rows) = table(std::str::from_utf8(&a).unwrap());
    assert_eq!(h.len(), 3 + 4 * 4);
    assert_eq!(rows.len(), 3);
}

#[test]
fn sample_then_mle_fit() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let o = alomax(&[
        "sample", "--alpha", "2", "--lambda", "1.25", "--mean-snr-db", "0", "--samples", "20000", "--seed", "4",
        "--out", samples.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = alomax(&["fit", "--method", "mle", "--input", samples.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let alpha = v["params"]["alpha"].as_f64().unwrap();
    assert!((alpha / 2.0 - 1.0).abs() < 0.1, "{v}");
    assert!(v["objective"].as_f64().unwrap().is_finite());
}

#[test]
fn rad_fit_from_binned_csv() {
    let ch = Channel::from_parts(1.5, 2.0, 1.0).unwrap();
    let mut csv = String::from("bin_center,density\n");
    for i in 0..60 {
        let x = 0.05 + 0.1 * i as f64;
        csv.push_str(&format!("{x},{}\n", snr_pdf(&ch, x).unwrap()));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pdf.csv");
    std::fs::write(&path, csv).unwrap();
    let o = alomax(&["fit", "--input", path.to_str().unwrap(), "--domain", "snr"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["params"]["alpha"].as_f64().unwrap() / 1.5 - 1.0).abs() < 0.02, "{v}");
    assert!((v["params"]["lambda"].as_f64().unwrap() / 2.0 - 1.0).abs() < 0.05, "{v}");
    assert_eq!(v["domain"], "snr");
}

#[test]
fn malformed_pdf_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "bin_center,density\n0.5,0.2\n1.5,-0.1\n").unwrap();
    let o = alomax(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn validate_subset() {
    let o = alomax(&["validate", "--criteria", "1,4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    let o = alomax(&["validate", "--criteria", "42"]);
    assert_eq!(o.status.code(), Some(2));
}
