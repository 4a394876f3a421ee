use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ddalpha"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn toy_csv(dir: &Path) -> PathBuf {
    let mut s = String::from("x,y,class\n");
    for i in 0..12 {
        let t = i as f64 * 0.37;
        s.push_str(&format!("{},{},a\n", t.sin(), t.cos()));
        s.push_str(&format!("{},{},b\n", 10.0 + t.cos(), 10.0 + t.sin()));
    }
    let p = dir.join("toy.csv");
    fs::write(&p, s).unwrap();
    p
}

fn iris_pair(dir: &Path, a: &str, b: &str) -> PathBuf {
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/iris.csv");
    let text = fs::read_to_string(src).unwrap();
    let mut lines = text.lines();
    let mut out = format!("{}\n", lines.next().unwrap());
    for l in lines.filter(|l| l.ends_with(a) || l.ends_with(b)) {
        out.push_str(l);
        out.push('\n');
    }
    let p = dir.join(format!("{a}-{b}.csv"));
    fs::write(&p, out).unwrap();
    p
}

#[test]
fn train_separable_reports_zero_emr() {
    let dir = TempDir::new().unwrap();
    let data = toy_csv(dir.path());
    let model = dir.path().join("m.json");
    let o = run(&["train", "--data", data.to_str().unwrap(), "-o", model.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["emr"].as_f64(), Some(0.0));
    assert_eq!(v["seed"].as_u64(), Some(0));
    assert!(model.exists());
}

#[test]
fn tukey_without_treatment_fails() {
    let dir = TempDir::new().unwrap();
    let data = toy_csv(dir.path());
    let model = dir.path().join("m.json");
    let o = run(&["train", "--data", data.to_str().unwrap(), "-o", model.to_str().unwrap(), "--depth", "tukey"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("treatment"), "{err}");
}

#[test]
fn repeated_training_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = toy_csv(dir.path());
    let mut files = Vec::new();
    for i in 0..2 {
        let model = dir.path().join(format!("m{i}.json"));
        let o = run(&[
            "train", "--data", data.to_str().unwrap(), "-o", model.to_str().unwrap(),
            "--depth", "tukey", "--directions", "300", "--treatment", "knn", "--seed", "7",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(fs::read(model).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn classify_roundtrip_and_empty_input() {
    let dir = TempDir::new().unwrap();
    let data = toy_csv(dir.path());
    let model = dir.path().join("m.json");
    assert!(run(&["train", "--data", data.to_str().unwrap(), "-o", model.to_str().unwrap()]).status.success());

    let o = run(&["classify", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "y", "class", "predicted", "route"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r[2] == r[3]), "training EMR 0 means every row is reproduced");

    // the in-process batch classification agrees with the CLI
    let m = ddalpha_core::DDAlphaModel::from_json(&fs::read_to_string(&model).unwrap()).unwrap();
    let pts: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0].parse().unwrap(), r[1].parse().unwrap()]).collect();
    let preds = m.classify_batch(&ddalpha_core::data::Points::from_rows(&pts)).unwrap();
    for (r, p) in rows.iter().zip(&preds) {
        assert_eq!(&r[3], m.label_names[p.label.index()].as_str());
        assert_eq!(&r[4], p.route.to_string().as_str());
    }

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "x,y\n").unwrap();
    let o = run(&["classify", "--model", model.to_str().unwrap(), "--data", empty.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "x,y,predicted,route\n");

    let wide = dir.path().join("wide.csv");
    fs::write(&wide, "a,b,c,d\n1,2,3,4\n").unwrap();
    let o = run(&["classify", "--model", model.to_str().unwrap(), "--data", wide.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));
}

#[test]
fn stats_iris_row() {
    let dir = TempDir::new().unwrap();
    let data = iris_pair(dir.path(), "versicolor", "virginica");
    let o = run(&["stats", "--data", data.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n_total"], 100);
    assert_eq!(v["dim"], 4);
    assert_eq!(v["log_class_ratio"].as_f64(), Some(0.0));
    assert_eq!(v["samples_per_dim"].as_f64(), Some(25.0));
}

#[test]
fn stats_counts_designed_duplicates() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("dup.csv");
    fs::write(&p, "x,y,l\n1,1,a\n1,1,b\n1,1,a\n0,3,a\n4,0,a\n2,3,b\n2,3,b\n5,5,b\n3,-1,b\n").unwrap();
    let o = run(&["stats", "--data", p.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tied_count"], 3);
}

fn write_manifest(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("manifest.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn benchmark_single_cell() {
    let dir = TempDir::new().unwrap();
    iris_pair(dir.path(), "setosa", "virginica");
    let m = write_manifest(
        dir.path(),
        r#"{"tasks":[{"name":"iris-sv","path":"setosa-virginica.csv"}],"classifiers":[{"kind":"lda"}]}"#,
    );
    let o = run(&["benchmark", "--manifest", m.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["aer_table"]["aer"], serde_json::json!([[0.0]]));
    assert_eq!(v["aer_table"]["classifiers"], serde_json::json!(["LDA"]));
}

#[test]
fn benchmark_traditional_trio_and_determinism() {
    let dir = TempDir::new().unwrap();
    iris_pair(dir.path(), "versicolor", "virginica");
    let m = write_manifest(
        dir.path(),
        r#"{"seed":3,"tasks":[{"name":"iris-vv","path":"versicolor-virginica.csv"}],
            "classifiers":[{"kind":"lda"},{"kind":"qda"},{"kind":"knn"}]}"#,
    );
    let json = dir.path().join("r.json");
    let text = dir.path().join("r.txt");
    let args = [
        "benchmark", "--manifest", m.to_str().unwrap(), "--json-out", json.to_str().unwrap(),
        "--text-out", text.to_str().unwrap(),
    ];
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(&json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["aer_table"]["aer"], serde_json::json!([[3.0, 4.0, 3.0]]));
    assert_eq!(v["seed"], 3);
    let tables = fs::read_to_string(&text).unwrap();
    assert!(tables.contains("ARCE_trd"));
    assert!(tables.contains("iris-vv"));

    assert!(run(&["--jobs", "1"].iter().chain(&args).copied().collect::<Vec<_>>()).status.success());
    assert_eq!(fs::read(&json).unwrap(), first);
}

#[test]
fn benchmark_records_failures_and_continues() {
    let dir = TempDir::new().unwrap();
    iris_pair(dir.path(), "setosa", "virginica");
    let m = write_manifest(
        dir.path(),
        r#"{"tasks":[{"name":"ok","path":"setosa-virginica.csv"},{"name":"missing","path":"nope.csv"}],
            "classifiers":[{"kind":"lda"}]}"#,
    );
    let o = run(&["benchmark", "--manifest", m.to_str().unwrap(), "--format", "json"]);
    assert!(!o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["aer_table"]["tasks"], serde_json::json!(["ok"]));
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn contour_grid_from_data() {
    let dir = TempDir::new().unwrap();
    let data = toy_csv(dir.path());
    let o = run(&[
        "contour", "--data", data.to_str().unwrap(), "--depth", "tukey", "--directions", "200",
        "--x-min", "-2", "--x-max", "12", "--y-min", "-2", "--y-max", "12", "--nx", "4", "--ny", "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,y,depth1,depth2");
    assert_eq!(lines.len(), 13);
}
