use std::fs;
use std::path::Path;

use invis_cli::{resolve, run, Overrides};
use invis_core::invispot::{potential_value_2d, ConstructionParams};
use invis_core::io::CsvTable;
use invis_core::numcore::{Envelope, WaveContext};
use invis_core::Complex64;
use serde_json::Value;

fn invis(dir: &Path, args: &[&str]) -> i32 {
    let mut all = vec!["invis".to_string()];
    all.extend(args.iter().map(|s| s.to_string()));
    all.extend(["--out".to_string(), dir.display().to_string()]);
    run(all)
}

fn csv(path: &Path) -> CsvTable {
    CsvTable::parse(&fs::read_to_string(path).unwrap()).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn construct_vanishes_outside_the_support() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invis(dir.path(), &["construct"]), 0);
    let t = csv(&dir.path().join("potential.csv"));
    let params = ConstructionParams::new(
        -1,
        1,
        1.0,
        Envelope::quartic(Complex64::new(1e-2, 0.0), 1.0).unwrap(),
        WaveContext::from_pi_multiple(2.0).unwrap(),
    )
    .unwrap();
    let (mut inside, mut outside) = (0, 0);
    for r in &t.rows {
        let (x, y, v) = (r[0], r[1], Complex64::new(r[2], r[3]));
        if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
            inside += 1;
            assert_eq!(v, potential_value_2d(&params, x, y).unwrap());
        } else {
            outside += 1;
            assert_eq!(v, Complex64::new(0.0, 0.0), "({x}, {y})");
        }
    }
    assert!(inside > 0 && outside > 0);
    assert!(t.rows.iter().any(|r| r[2] != 0.0 && r[3] != 0.0));
}

#[test]
fn validation_numerical_and_io_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invis(dir.path(), &["construct", "--ell", "1", "--m", "1"]), 2);
    assert_eq!(invis(dir.path(), &["amplitude", "--grid-n", "40", "--method", "xfermat"]), 2);
    assert_eq!(invis(dir.path(), &["amplitude", "--bogus"]), 2);
    let numeric = ["xfer", "--potential", "random:1", "--g0", "1e300", "--slices", "2", "--grid-n", "5"];
    assert_eq!(invis(dir.path(), &numeric), 3);
    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    assert_eq!(invis(&file, &["amplitude"]), 4);
    assert_eq!(invis(dir.path(), &["amplitude", "--config", "/nonexistent/config"]), 4);
}

#[test]
fn right_amplitude_vanishes_and_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(invis(d, &["amplitude", "--side", "right"]), 0);
    assert_eq!(invis(d, &["amplitude", "--side", "left"]), 0);
    assert_eq!(invis(d, &["amplitude", "--side", "left", "--method", "closed_form"]), 0);
    let right = csv(&d.join("amplitude_right_born.csv"));
    let born = csv(&d.join("amplitude_left_born.csv"));
    let closed = csv(&d.join("amplitude_left_closed_form.csv"));
    let scale = born.rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!(right.rows.iter().all(|r| r[3] <= 1e-10 * scale));
    for (a, b) in born.rows.iter().zip(&closed.rows) {
        assert_eq!(a[0], b[0]);
        let diff = Complex64::new(a[1] - b[1], a[2] - b[2]).norm();
        assert!(diff <= 1e-10 * scale);
    }
    // With an odd count the middle midpoint is θ = π/2 and is dropped.
    assert_eq!(born.rows.len(), 180);
    assert_eq!(invis(d, &["amplitude", "--theta-samples", "180"]), 0);
    // An even count straddles both grazing angles.
    assert_eq!(csv(&d.join("amplitude_left_born.csv")).rows.len(), 180);
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(invis(d, &["verify", "--potential", "zero", "--grid-n", "11"]), 0);
    let zero = json(&d.join("verify.json"));
    assert_eq!(zero["all_pass"], Value::Bool(true));
    for c in zero["checks"].as_array().unwrap().iter().take(3) {
        assert_eq!(c["residual"].as_f64().unwrap(), 0.0);
    }

    assert_eq!(invis(d, &["verify", "--grid-n", "21"]), 0);
    let weak = json(&d.join("verify.json"));
    assert_eq!(weak["predicates"]["right_invisible"], Value::Bool(true));
    assert_eq!(weak["predicates"]["reciprocal_transmission"], Value::Bool(false));
    assert_eq!(weak["predicates"]["left_reflectionless"], Value::Bool(false));
    assert_eq!(weak["predicates"]["left_transparent"], Value::Bool(false));

    assert_eq!(invis(d, &["verify", "--potential", "random:7", "--g0", "0.5", "--grid-n", "21"]), 0);
    let random = json(&d.join("verify.json"));
    assert_eq!(random["all_pass"], Value::Bool(true));
}

#[test]
fn fig2_files_manifest_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["fig2", "--k-list", "2,8", "--samples", "20"];
    assert_eq!(invis(d, &args), 0);
    let manifest = json(&d.join("manifest.json"));
    assert_eq!(manifest["curves"].as_array().unwrap().len(), 2);
    let first = fs::read(d.join("fig2_k8pi.csv")).unwrap();
    assert_eq!(invis(d, &args), 0);
    assert_eq!(fs::read(d.join("fig2_k8pi.csv")).unwrap(), first);
    let t = csv(&d.join("fig2_k2pi.csv"));
    assert_eq!(t.header, ["s_over_a", "dP_hat"]);
    assert_eq!(t.rows.len(), 20);
    assert!(!d.join("fig2_k4pi.csv").exists());
}

#[test]
fn embedded_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = ["amplitude", "--k", "4", "--envelope", "gaussian", "--g0", "0.02", "--g0-im", "-0.01"];
    assert_eq!(invis(&a, &args), 0);
    let first = a.join("amplitude_left_born.csv");
    let cfg = first.display().to_string();
    assert_eq!(invis(&b, &["amplitude", "--config", &cfg]), 0);
    let strip = |p: &Path| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# config"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&first), strip(&b.join("amplitude_left_born.csv")));

    assert_eq!(invis(&a, &["power", "--format", "json", "--k", "8"]), 0);
    let p = a.join("power.json");
    let cfg = p.display().to_string();
    assert_eq!(invis(&b, &["power", "--config", &cfg]), 0);
    let (x, y) = (json(&p), json(&b.join("power.json")));
    assert_eq!(x["summary"], y["summary"]);
    assert_eq!(x["screen"], y["screen"]);
    assert!(x["summary"]["dp_minus_left"].as_f64().unwrap() > 0.0);
}

#[test]
fn key_value_config_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "# demo\nk = 4\nenvelope = gaussian\nout = from-file\n").unwrap();
    let mut o = Overrides {
        config: Some(path),
        ..Default::default()
    };
    let cfg = resolve(&o, None).unwrap();
    assert_eq!((cfg.k, cfg.envelope.as_str()), (4.0, "gaussian"));
    assert_eq!(cfg.out, Path::new("from-file"));
    let cfg = resolve(&o, Some("from-env".into())).unwrap();
    assert_eq!(cfg.out, Path::new("from-env"));
    o.out = Some("from-flag".into());
    o.k = Some(6.0);
    let cfg = resolve(&o, Some("from-env".into())).unwrap();
    assert_eq!((cfg.k, cfg.out.as_path()), (6.0, Path::new("from-flag")));
}

#[test]
fn xfer_writes_operator_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(invis(d, &["xfer", "--grid-n", "11", "--slices", "50"]), 0);
    let op = json(&d.join("transfer_operator.json"));
    let text = serde_json::to_string(&op["operator"]).unwrap();
    let m = invis_core::xfermat::TransferOperator::from_json(&text).unwrap();
    assert_eq!(m.slices(), 50);
    let t = csv(&d.join("transfer_tables.csv"));
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.header.len(), 9);
}

#[test]
fn three_dimensional_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(invis(d, &["amplitude", "--dimension", "3", "--side", "right", "--theta-samples", "31"]), 0);
    let t = csv(&d.join("amplitude_right_born.csv"));
    assert_eq!(t.rows.len(), 30);
    assert!(t.rows.iter().all(|r| r[3] < 1e-15));
    assert_eq!(invis(d, &["amplitude", "--dimension", "3", "--method", "xfermat"]), 2);
}
