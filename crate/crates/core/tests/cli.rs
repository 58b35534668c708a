use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symmus::bench::gen_php;
use symmus::formula::write_spec;

fn symmus(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symmus"))
        .args(args)
        .current_dir(dir)
        .env_remove("SYMMUS_SEED")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every stdout line is JSON"))
        .collect()
}

fn write_php(dir: &Path, p: usize, h: usize) -> String {
    let name = format!("php_{p}_{h}.opb");
    std::fs::write(dir.join(&name), write_spec(&gen_php(p, h).unwrap().spec)).unwrap();
    name
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run-report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Checks the keywords the report schema uses: type, required,
/// properties, items and enum.
fn validate(v: &Value, s: &Value, at: &str) -> Result<(), String> {
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(x) => vec![x.as_str()],
            Value::Array(xs) => xs.iter().filter_map(|x| x.as_str()).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{at}: {v} is not of type {t}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(|e| e.as_array()) {
        if !e.contains(v) {
            return Err(format!("{at}: {v} not in {e:?}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for r in s.get("required").and_then(|r| r.as_array()).into_iter().flatten() {
            let key = r.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{at}: missing {key}"));
            }
        }
        if let Some(props) = s.get("properties").and_then(|p| p.as_object()) {
            for (k, sub) in props {
                if let Some(x) = obj.get(k) {
                    validate(x, sub, &format!("{at}.{k}"))?;
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(x, items, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

#[test]
fn reports_match_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let f = write_php(d, 4, 2);
    std::fs::write(d.join("sat.opb"), "+1 x1 >= 1 ;\n").unwrap();
    let schema = schema();
    let runs: Vec<Vec<&str>> = vec![
        vec!["mus", &f],
        vec!["mus", "--algo", "symm-recompute", &f],
        vec!["ocus", "--lex", "--dynamic", &f],
        vec!["marco", "--lex", "--unroll", &f],
        vec!["detect", "--json", &f],
        vec!["gen", "--family", "queens", "--params", "4,1", "-o", "gen"],
        vec!["mus", "sat.opb"],
        vec!["mus", "--time-limit", "0", &f],
    ];
    for args in runs {
        let out = symmus(&args, d);
        let lines = json_lines(&out);
        let report = lines.last().unwrap();
        validate(report, &schema, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(report["exit_code"], out.status.code().unwrap());
    }
}

#[test]
fn mus_symm_on_pigeonhole() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_php(dir.path(), 4, 2);
    let out = symmus(&["mus", "--algo", "symm", &f], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0]["result"];
    assert_eq!(r["mus"].as_array().unwrap().len(), 5);
    assert!(r["marks_symmetric"].as_u64().unwrap() > 0);
}

#[test]
fn detect_prints_two_row_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_php(dir.path(), 4, 2);
    let out = symmus(&["detect", &f], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("rows{")).count(), 2);
    std::fs::write(dir.path().join("php.sym"), &text).unwrap();
    let out = symmus(&["ocus", "--lex", "--symmetries", "php.sym", &f], dir.path());
    assert_eq!(json_lines(&out)[0]["result"]["mus"], serde_json::json!(["P1", "P2", "P3", "H1", "H2"]));
}

#[test]
fn lex_order_changes_the_representative() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_php(dir.path(), 4, 2);
    let out = symmus(&["ocus", "--lex", "--lex-order", "P4,P3,P2,P1,H1,H2", &f], dir.path());
    assert_eq!(json_lines(&out)[0]["result"]["mus"], serde_json::json!(["P2", "P3", "P4", "H1", "H2"]));
    let out = symmus(&["ocus", "--lex", "--lex-order", "P9", &f], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weights_steer_ocus() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_php(dir.path(), 4, 2);
    std::fs::write(dir.path().join("w.txt"), "# heavy first pigeon\nP1 10\n").unwrap();
    let out = symmus(&["ocus", "--weights", "w.txt", &f], dir.path());
    let r = &json_lines(&out)[0]["result"];
    assert_eq!(r["mus"], serde_json::json!(["P2", "P3", "P4", "H1", "H2"]));
    assert_eq!(r["cost"], 5);
    std::fs::write(dir.path().join("bad.txt"), "P1 0\n").unwrap();
    assert_eq!(symmus(&["ocus", "--weights", "bad.txt", &f], dir.path()).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let f = write_php(d, 4, 2);
    std::fs::write(d.join("sat.opb"), "+1 x1 >= 1 ;\n").unwrap();
    assert_eq!(symmus(&[], d).status.code(), Some(1));
    assert_eq!(symmus(&["mus", "--algo", "nope", &f], d).status.code(), Some(1));
    assert_eq!(symmus(&["mus", "missing.opb"], d).status.code(), Some(1));
    assert_eq!(symmus(&["--help"], d).status.code(), Some(0));
    assert_eq!(symmus(&["ocus", "--dynamic", "--mcs-cap", "0", &f], d).status.code(), Some(1));
    for cmd in ["mus", "ocus", "marco"] {
        assert_eq!(symmus(&[cmd, "sat.opb"], d).status.code(), Some(2), "{cmd}");
    }
    let out = symmus(&["mus", "--time-limit", "0", &f], d);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_lines(&out)[0]["status"], "budget");
}

#[test]
fn marco_streams_then_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_php(dir.path(), 4, 2);
    let out = symmus(&["marco", "--max-muses", "2", &f], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["mus"].as_array().unwrap().len(), 5);
    assert_eq!(lines[2]["result"]["complete"], false);
    assert_eq!(lines[2]["result"]["count"], 2);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_symmus"));
        c.args(args).current_dir(dir.path()).env_remove("SYMMUS_SEED");
        if let Some(s) = env {
            c.env("SYMMUS_SEED", s);
        }
        let out = c.output().unwrap();
        json_lines(&out)[0]["config"]["seed"].clone()
    };
    let gen = ["gen", "--family", "binpack", "--params", "3,80"];
    assert_eq!(run(Some("11"), &gen), 11);
    assert_eq!(run(None, &gen), 0);
    let mut explicit = gen.to_vec();
    explicit.extend(["--seed", "4"]);
    assert_eq!(run(Some("11"), &explicit), 4);
    assert!(dir.path().join("binpack_3_80_s11.opb").exists());
    assert!(dir.path().join("binpack_3_80_s11.sym").exists());
}

#[test]
fn bench_run_writes_reports_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut cfg = String::from("algorithms = [\"shrink\", \"symm\"]\nthreads = 3\n");
    for p in 5..=9 {
        cfg.push_str(&format!("[[instances]]\nfamily = \"php\"\nparams = [{p}, {}]\n", p - 1));
    }
    std::fs::write(d.join("bench.toml"), cfg).unwrap();
    let out = symmus(&["bench-run", "bench.toml", "-o", "out"], d);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(d.join("out/summary.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    let calls = |row: &csv::StringRecord| row[5].parse::<u64>().unwrap();
    for pair in rows.chunks(2) {
        assert_eq!(&pair[0][1], "shrink");
        assert_eq!(&pair[1][1], "symm");
        assert!(calls(&pair[1]) <= calls(&pair[0]), "{pair:?}");
    }
    let reports = std::fs::read_dir(d.join("out")).unwrap().count();
    assert_eq!(reports, 11);
    let schema = schema();
    let r: Value = serde_json::from_str(&std::fs::read_to_string(d.join("out/php_7_6__symm.json")).unwrap()).unwrap();
    validate(&r, &schema, "$").unwrap();
}

#[test]
fn bench_run_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.toml"), "").unwrap();
    assert_eq!(symmus(&["bench-run", "empty.toml", "-o", "empty"], d).status.code(), Some(0));
    assert_eq!(std::fs::read_dir(d.join("empty")).unwrap().count(), 0);

    std::fs::write(
        d.join("bad.toml"),
        "algorithms = [\"shrink\", \"quick\"]\n[[instances]]\nfamily = \"php\"\nparams = [4, 2]\n",
    )
    .unwrap();
    let out = symmus(&["bench-run", "bad.toml", "-o", "bad"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(!d.join("bad").exists());

    write_php(d, 4, 2);
    std::fs::write(
        d.join("files.toml"),
        "algorithms = [\"marco-lex\"]\ngroup = \"known\"\n[[instances]]\nfile = \"php_4_2.opb\"\n[[instances]]\nfamily = \"queens\"\nparams = [4, 1]\n",
    )
    .unwrap();
    assert_eq!(symmus(&["bench-run", "files.toml", "-o", "files"], d).status.code(), Some(0));
    assert!(d.join("files/php_4_2__marco-lex.json").exists());
    assert!(d.join("files/queens_4_1__marco-lex.json").exists());
}
