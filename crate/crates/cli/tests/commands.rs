use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn abbrev(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_abbrev"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn abbrev");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

const SMALL: &str = "id\tfrequency\tmagnitude\nthe\t50\t3\nof\t30\t2\nand\t20\t3\nwhereas\t5\t7\ndeclaration\t2\t11\n";

#[test]
fn encode_uniform_ten_binary() {
    let data: String = (1..=10).map(|i| format!("w{i}\t1\t4\n")).collect();
    let out = abbrev(&["encode", "--format", "json"], Some(&data));
    let v = json(&out);
    assert!((v["mean_length"].as_f64().unwrap() - 2.2).abs() < 1e-12);
    assert_eq!(v["max_length"], 3);
    assert_eq!(v["max_length_count"], 4);

    let tsv = abbrev(&["encode"], Some(&data));
    let text = String::from_utf8(tsv.stdout).unwrap();
    let first = text.lines().next().unwrap();
    let value: f64 = first.strip_prefix("# mean_length\t").unwrap().parse().unwrap();
    assert!((value - 2.2).abs() < 1e-12);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 11);
}

#[test]
fn verify_reports_zero_mismatches() {
    let out = abbrev(&["verify", "--vmax", "12", "--trials", "2000"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "0 mismatches");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mismatch_count"], 0);
    assert_eq!(v["cases"].as_array().unwrap().len(), 24);
}

#[test]
fn analyze_is_bit_reproducible() {
    let args = ["analyze", "--seed", "7", "--permutations", "499", "--cost", "log1p"];
    let a = abbrev(&args, Some(SMALL));
    let b = abbrev(&args, Some(SMALL));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    for key in [
        "input_digest",
        "types",
        "mean_cost",
        "type_mean_cost",
        "sd_probability",
        "sd_cost",
        "r",
        "rho",
        "tau",
        "concordant",
        "discordant",
        "total_pairs",
        "sign_criterion",
        "rho_bounds",
        "mean_cost_test",
        "tau_test",
        "seed",
        "version",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 7);
    assert_eq!(v["cost_model"], "log1p");
}

#[test]
fn analyze_tsv_and_plot_data() {
    let dir = std::env::temp_dir().join(format!("abbrev-plot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let plot = dir.join("plot.tsv");
    let out = abbrev(&["analyze", "--format", "tsv", "--plot-data", plot.to_str().unwrap()], Some(SMALL));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "types\t5"));
    assert!(text.lines().any(|l| l.starts_with("rho_bounds.daniels.lower\t")));
    let rows = std::fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "rank\tid\tprobability\tmagnitude");
    assert!(lines[1].starts_with("1\tthe\t"));
    assert_eq!(lines.len(), 6);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn analyze_text_mode() {
    let dir = std::env::temp_dir().join(format!("abbrev-text-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.txt");
    std::fs::write(&path, "the cat the\nJa ja, ON!\n").unwrap();
    let v = json(&abbrev(&["analyze", "--permutations", "9", "--text", path.to_str().unwrap()], None));
    assert_eq!(v["types"], 4);
    std::fs::write(&path, [b'a', b' ', 0xff, b'\n']).unwrap();
    let out = abbrev(&["analyze", "--text", path.to_str().unwrap()], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset 2"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn rtgen_feeds_analyze() {
    let gen = abbrev(&["rtgen", "--stop-probability", "0.2", "--count", "100000", "--seed", "11"], None);
    assert!(gen.status.success());
    let data = String::from_utf8(gen.stdout).unwrap();
    assert!(data.starts_with("id\tfrequency\tmagnitude\n"));
    let v = json(&abbrev(&["analyze", "--permutations", "99"], Some(&data)));
    assert!(v["tau"].as_f64().unwrap() < 0.0);

    let again = abbrev(&["rtgen", "--stop-probability", "0.2", "--count", "100000", "--seed", "11"], None);
    assert_eq!(again.stdout, data.as_bytes());
    let meta = json(&abbrev(&["rtgen", "--format", "json", "--stop-probability", "0.2", "--count", "10"], None));
    assert!(meta["slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn sigtest_exhaustive_sixth() {
    let data = "a\t5\t1\nb\t3\t2\nc\t2\t3\n";
    let v = json(&abbrev(&["sigtest", "--exhaustive"], Some(data)));
    assert_eq!(v["statistic"], "mean_cost");
    assert_eq!(v["replicates"], 6);
    assert!((v["p_left"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    let mc = json(&abbrev(&["sigtest", "--statistic", "tau", "--permutations", "999", "--seed", "3"], Some(data)));
    assert_eq!(mc["mode"], "monte-carlo");
    assert!(mc["p_left"].as_f64().unwrap() > 0.0);
}

#[test]
fn swapsim_reaches_no_concordant_pairs() {
    let data = "a\t9\t5\nb\t7\t1\nc\t4\t4\nd\t2\t2\ne\t1\t3\n";
    let v = json(&abbrev(&["swapsim", "--seed", "4", "--permutations", "99"], Some(data)));
    assert_eq!(v["report"]["concordant"], 0);
    assert_eq!(v["report"]["tau"].as_f64().unwrap(), -1.0);
    let m = &v["minimization"];
    assert!(m["final_cost"].as_f64().unwrap() <= m["initial_cost"].as_f64().unwrap());
}

#[test]
fn bounds_from_tau_and_dataset() {
    let v = json(&abbrev(&["bounds", "--tau", "0"], None));
    assert_eq!(v["daniels"]["lower"].as_f64(), Some(-0.5));
    assert_eq!(v["durbin"]["upper"].as_f64(), Some(0.5));
    let v = json(&abbrev(&["bounds", "--tau", "-1"], None));
    assert_eq!(v["durbin"]["lower"].as_f64(), Some(-1.0));
    assert_eq!(v["durbin"]["upper"].as_f64(), Some(-1.0));
    let v = json(&abbrev(&["bounds"], Some(SMALL)));
    assert_eq!(v["rho_within_bounds"], true);
}

#[test]
fn bad_input_fails_cleanly() {
    let out = abbrev(&["analyze"], Some("a\t1\n"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let out = abbrev(&["analyze"], Some("a\t1\t-2\n"));
    assert!(!out.status.success());
    let out = abbrev(&["analyze", "--nope"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = abbrev(&["encode", "--cost", "power:-1"], Some(SMALL));
    assert!(!out.status.success());
}
