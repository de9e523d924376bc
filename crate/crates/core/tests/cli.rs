use gausslab::cli::{run_with, Report};

fn run(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("gausslab").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn planar_word_1212() {
    assert_eq!(run(&["planar", "1212"]), (0, "non-planar\n".into(), String::new()));
    assert_eq!(run(&["planar", "1122"]).1, "planar\n");
}

#[test]
fn iso_relabel_and_rotate() {
    let (code, out, _) = run(&["iso", "1+2-1+2-", "2+1-2+1-", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(out, "isomorphic [oracle agrees]\n");
    assert_eq!(run(&["iso", "1+2-1+2-", "1+2+1+2+"]).1, "not isomorphic\n");
    assert_eq!(run(&["iso", "1-2+1-3-/2+3-", "2+3-/2+1-3-1-"]).1, "isomorphic\n");
}

// The six-occurrence trefoil sequence with alternating-looking signs traces
// a single face here; the recorded output is what the theory predicts.
#[test]
fn classify_trefoil_sign_sequence() {
    let (code, out, _) = run(&["classify", "1-2+3+1+2+3-"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1-2+3+1+2+3-: non-orientable, crosscaps 4 (V=3 E=6 F=1 chi=-2), not two-colorable\n");
    let (_, out, _) = run(&["classify", "1-2-3-1-2-3-"]);
    assert!(out.contains("genus 0") && out.contains(", two-colorable"), "{out}");
}

#[test]
fn json_reports_round_trip() {
    let (code, out, _) = run(&["--json", "--oracle", "classify", "1+2+1+2+", "1-2-3-1-2-3-"]);
    assert_eq!(code, 0);
    let reports: Vec<Report> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert_eq!(r.command, "classify");
        assert_eq!(r.oracle_agrees, Some(true));
        let again: Report = serde_json::from_str(&serde_json::to_string(r).unwrap()).unwrap();
        assert_eq!(&again, r);
    }
    assert_eq!(reports[1].result["surface"]["genus"], 0);
}

#[test]
fn moves_apply_and_search() {
    assert_eq!(run(&["moves", "apply", "1^++1^+-", "--index", "0"]).1, "-\n");
    let json = r#"{"kind":"R1","direction":"remove","sites":[{"component":0,"position":0}],"epsilon":"+"}"#;
    assert_eq!(run(&["moves", "apply", "1^++1^+-", "--instance", json]).1, "-\n");
    let (code, out, _) = run(&["moves", "search", "1^++1^+-", "-"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("path of length 1"), "{out}");
    assert!(run(&["moves", "search", "1^++1^+-", "+"]).1.starts_with("no path"));
    let (_, out, _) = run(&["--json", "moves", "search", "1^++1^+-", "-"]);
    let r: Report = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(r.result["moves"][0]["kind"], "R1");
}

#[test]
fn complement_round_trip() {
    let (_, link, _) = run(&["complement", "1+2-1+2-", "--writhes", "1:+,2:-"]);
    let (_, back, _) = run(&["complement", "--inverse", link.trim()]);
    assert_eq!(back, "1+2-1+2- writhes +-\n");
    assert_eq!(run(&["complement", "1+2-1+2-", "--writhes", "+"]).0, 1);
}

#[test]
fn file_input_and_seed() {
    let path = std::env::temp_dir().join("gausslab-cli-test.txt");
    std::fs::write(&path, "# sample\n1212\n\n1122\n").unwrap();
    let (code, out, err) = run(&["planar", "--file", path.to_str().unwrap()]);
    assert_eq!((code, err.as_str()), (0, ""));
    assert_eq!(out, "non-planar\nplanar\n");
    let a = run(&["random", "--n", "5", "--count", "3", "--seed", "9"]);
    assert_eq!(a, run(&["random", "--n", "5", "--count", "3", "--seed", "9"]));
    assert_eq!(a.1.lines().count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["iso", "1+1+"]).0, 2);
    let (code, _, err) = run(&["classify", "1+1"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: syntax error"), "{err}");
    assert_eq!(run(&["interlace", "12/12"]).0, 1);
    assert_eq!(run(&["iso", "1+2+1+2+", "1^++1^+-"]).0, 1);
}
