use std::process::{Command, Output};

fn enhom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enhom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let o = enhom(&["list"]);
    assert!(o.status.success());
    let ids: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(
        ids,
        [
            "prop-6-1", "prop-6-5", "prop-6-6", "lemma-7-1", "lemma-7-2", "thm-7-3", "prop-7-5", "lemma-7-6",
            "lemma-7-8", "thm-8-4-smooth", "lemma-8-3"
        ]
    );
}

#[test]
fn scenario_json_report() {
    let o = enhom(&["scenario", "lemma-7-6", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "lemma-7-6");
    assert_eq!(v["pass"], true);
    assert!(v["diff"].as_array().unwrap().is_empty());
    let cells = v["tables"][0]["cells"].as_array().unwrap();
    let dims: Vec<(i64, u64)> = cells.iter().map(|c| (c["degree"].as_i64().unwrap(), c["dim"].as_u64().unwrap())).collect();
    assert_eq!(dims, vec![(0, 1), (1, 1), (3, 1)]);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let one = enhom(&["--threads", "1", "scenario", "prop-6-5", "--out", "csv"]);
    let two = enhom(&["--threads", "3", "scenario", "prop-6-5", "--out", "csv"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&two));
    let text = stdout(&one);
    assert!(text.starts_with("scenario,degree,weight,dim,expected,match\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn compute_bar_example() {
    let o = enhom(&["compute", "bar", "--field", "Q", "--algebra", "S(x:0)", "--n", "2", "--deg", "0..10", "--weight", "0..8", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').skip(1).take(3).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(rows, ["0,1,1", "2,2,1", "4,3,1", "6,4,1", "8,5,1", "10,6,1"]);
}

#[test]
fn compute_hodge_example() {
    let o = enhom(&["compute", "hodge", "--algebra", "sqzero:2", "--l", "1", "--deg", "0..5", "--weight", "0..5", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims: Vec<u64> = v["tables"][0]["cells"].as_array().unwrap().iter().map(|c| c["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![2, 1, 2, 3, 6]);
}

#[test]
fn compute_ce_example() {
    let o = enhom(&["compute", "ce", "--lie", "der-outer", "--gens", "x:0,y:0", "--weight-filter", "0", "--deg", "0..3", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(enhom(&["scenario", "no-such-thing"]).status.code(), Some(2));
    let bad = enhom(&["compute", "bar", "--algebra", "S(x:"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("position"));
    assert_eq!(enhom(&["scenario", "lemma-7-1", "--deg", "-9..0"]).status.code(), Some(2));
    assert_eq!(enhom(&["scenario", "lemma-8-3", "--budget", "50"]).status.code(), Some(3));
    assert_eq!(enhom(&["bogus"]).status.code(), Some(2));
}

#[test]
fn help_documents_the_grammar() {
    let o = enhom(&["--help"]);
    let text = stdout(&o);
    assert!(text.contains("sqzero:2") && text.contains("Q[x:0]/x^3") && text.contains("Exit codes"));
}
