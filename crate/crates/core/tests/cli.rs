use std::process::{Command, Output};

fn conjrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjrep"))
        .args(args)
        .env_remove("CONJREP_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn table_sl2_2_to_stdout() {
    let o = conjrep(&["table", "--p", "2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "degree\\class_size,1,3,2,1,3,2");
    assert!(stderr(&o).contains("degrees = {1,1,2}"));
    assert!(stderr(&o).contains("ell = 19"));
}

#[test]
fn table_to_file_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = conjrep(&["table", "--p", "5", "--n", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("k = 9\n"));
    assert!(out.contains("|G| = 120\n"));
    let degrees: Vec<u64> = out
        .lines()
        .find_map(|l| l.strip_prefix("degrees = {"))
        .unwrap()
        .trim_end_matches('}')
        .split(',')
        .map(|d| d.parse().unwrap())
        .collect();
    assert_eq!(degrees.iter().map(|d| d * d).sum::<u64>(), 120);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 10);
    // degree, 9 dense cyclotomic vectors, 9 complex values
    assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 19);
}

#[test]
fn table_json_format() {
    let o = conjrep(&["table", "--p", "3", "--n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 24);
    assert_eq!(v["k"], 7);
    assert_eq!(v["values"].as_array().unwrap().len(), 7);
}

#[test]
fn budget_rejections_exit_2() {
    let o = conjrep(&["table", "--p", "5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("234375000"));

    let o = Command::new(env!("CARGO_BIN_EXE_conjrep"))
        .args(["table", "--p", "5", "--n", "2"])
        .env("CONJREP_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("15000"));
}

#[test]
fn parameter_rejections_exit_2() {
    for args in [
        &["table", "--p", "6", "--n", "1"][..],
        &["verify", "--p", "5", "--n", "2", "--checks", "pcom2"],
        &["verify", "--p", "5", "--n", "2", "--checks", "theorem,nope"],
        &["verify", "--p", "5", "--n", "3", "--checks", "pcom2", "--i", "5"],
        &["f3", "--q", "9"],
        &["f3", "--q", "17"],
        &["table", "--p", "5"],
    ] {
        assert_eq!(conjrep(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn f3_census() {
    let o = conjrep(&["f3", "--q", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("124 of 124 nonzero vectors pass").count(), 2);
    let o = conjrep(&["f3", "--q", "3", "--form", "split"]);
    let out = stdout(&o);
    assert!(out.contains("isotropic census 8 = 4 + 4"));
    assert!(!out.contains("form trace"));
}

#[test]
fn verify_exit_codes_and_modes() {
    let o = conjrep(&["verify", "--p", "5", "--n", "2", "--checks", "theorem,cent,quotient"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theorem"]["mode"], "proved-range");
    let ids: Vec<&str> = v["lemmas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["cent", "quotient"]);

    let o = conjrep(&["verify", "--p", "5", "--n", "3", "--checks", "pcom2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lemmas"][0]["parameters"]["i"], 1);
    assert_eq!(v["lemmas"][0]["parameters"]["j"], 0);
    assert!(v["theorem"].is_null());

    let o = conjrep(&["verify", "--p", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theorem"]["mode"], "observed");
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3", "auto"] {
        for cmd in ["verify", "table"] {
            let path = dir.path().join(format!("{cmd}-{threads}"));
            let o = conjrep(&[
                "--threads",
                threads,
                cmd,
                "--p",
                "7",
                "--n",
                "1",
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
            outputs.push((cmd, std::fs::read(&path).unwrap()));
        }
    }
    for cmd in ["verify", "table"] {
        let same: Vec<&Vec<u8>> = outputs.iter().filter(|(c, _)| *c == cmd).map(|(_, b)| b).collect();
        assert!(same.windows(2).all(|w| w[0] == w[1]), "{cmd} output differs");
    }
}

#[test]
fn timings_are_opt_in() {
    let o = conjrep(&["verify", "--p", "5", "--n", "1", "--timings"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["timings_ms"].get("theorem").is_some());
    let o = conjrep(&["verify", "--p", "5", "--n", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["timings_ms"], serde_json::json!({}));
}
