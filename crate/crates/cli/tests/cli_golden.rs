mod common;

use multimoments::{central_moment, validate_params, Exact, Scalar};

#[test]
fn golden_transcripts() {
    let failures: Vec<String> = common::CASES
        .iter()
        .filter_map(|c| common::check(c).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn exact_values_round_trip_through_the_binary() {
    let params = validate_params(4, vec![Exact::from_ratio(2, 7), Exact::from_ratio(1, 3), Exact::from_ratio(1, 5)]).unwrap();
    for indices in [[1, 1, 2, 3], [3, 3, 3, 3], [2, 1, 2, 1]] {
        let list = indices.map(|i| i.to_string()).join(",");
        let (code, stdout, _) = common::run_binary(&[
            "moment", "central", "--m", "4", "--x", "2/7,1/3,1/5", "--indices", &list, "--exact",
        ]);
        assert_eq!(code, 0);
        let json: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        let printed = json["value"].as_str().unwrap();
        let parsed = Exact::parse_literal(printed).unwrap();
        assert_eq!(parsed, central_moment(&params, &indices).unwrap());
        assert_eq!(parsed.render(), printed);
    }
}

#[test]
fn moment_schema_is_stable() {
    let keys = |args: &[&str]| -> Vec<String> {
        let (_, stdout, _) = common::run_binary(args);
        let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        v.as_object().unwrap().keys().cloned().collect()
    };
    let a = keys(&["moment", "raw", "--m", "9", "--x", "0.1,0.2", "--indices", "2,2"]);
    let b = keys(&["moment", "raw", "--m", "1", "--x", "1/3", "--indices", "1", "--exact"]);
    assert_eq!(a, b);
}

#[test]
fn verify_report_is_deterministic() {
    let args = ["verify", "--oracles", "enum,mc", "--d", "2", "--m", "4", "--grid", "2", "--samples", "500", "--seed", "3"];
    let (c1, a, _) = common::run_binary(&args);
    let (c2, b, _) = common::run_binary(&args);
    assert_eq!(c1, c2);
    assert_eq!(common::mask(&a), common::mask(&b));
}

#[test]
fn monte_carlo_verify_example_passes() {
    let (code, stdout, stderr) = common::run_binary(&[
        "verify", "--oracles", "mc", "--d", "3", "--m", "50", "--samples", "100000", "--seed", "7",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["mc"]["coverage"].as_f64().unwrap() >= 0.95);
    assert_eq!(v["status"], "pass");
}

#[test]
fn parallel_sweep_matches_single_thread() {
    use multimoments_cli::verify::{run, Oracle, VerifyConfig};
    let cfg = VerifyConfig {
        oracles: vec![Oracle::Enum, Oracle::Mgf, Oracle::Expansion, Oracle::Mc],
        d: 1..=3,
        m: 1..=3,
        grid: 3,
        exact: false,
        samples: 200,
        seed: 11,
        keep_rows: true,
        ..VerifyConfig::default()
    };
    let in_pool = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut report = pool.install(|| run(&cfg)).unwrap();
        report.wall_time = 0.0;
        (report.to_json(), report.to_csv())
    };
    assert_eq!(in_pool(1), in_pool(4));
}
