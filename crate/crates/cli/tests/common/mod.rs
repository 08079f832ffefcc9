//! Golden-file harness for the `multimoments` binary.

use std::path::PathBuf;
use std::process::Command;

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit_code: i32,
}

pub const CASES: &[GoldenCase] = &[
    GoldenCase {
        name: "moment_central_exact",
        args: &["moment", "central", "--m", "2", "--x", "1/2,1/4", "--indices", "1,1,2,2", "--exact"],
        exit_code: 0,
    },
    GoldenCase {
        name: "moment_raw_float",
        args: &["moment", "raw", "--m", "3", "--x", "1/2,1/5", "--indices", "1"],
        exit_code: 0,
    },
    GoldenCase {
        name: "moment_factorial_exact",
        args: &["moment", "factorial", "--m", "2", "--x", "1/2,1/4", "--orders", "2,0", "--exact"],
        exit_code: 0,
    },
    GoldenCase {
        name: "moment_central_csv",
        args: &["moment", "central", "--m", "2", "--x", "1/3,1/3", "--indices", "1,1,2", "--exact", "--format", "csv"],
        exit_code: 0,
    },
    GoldenCase {
        name: "moment_simplex_violation",
        args: &["moment", "central", "--m", "2", "--x", "0.7,0.5", "--indices", "1,2"],
        exit_code: 2,
    },
    GoldenCase {
        name: "moment_bad_index",
        args: &["moment", "raw", "--m", "2", "--x", "1/2,1/4", "--indices", "1,3"],
        exit_code: 2,
    },
    GoldenCase {
        name: "moment_malformed_flag",
        args: &["moment", "raw", "--m", "two", "--x", "1/2", "--indices", "1"],
        exit_code: 2,
    },
    GoldenCase {
        name: "verify_exact_small",
        args: &["verify", "--oracles", "enum,mgf,expansion", "--d", "1..2", "--m", "1..2", "--grid", "2", "--exact"],
        exit_code: 0,
    },
    GoldenCase {
        name: "verify_counting",
        args: &["verify", "--oracles", "enum", "--d", "1", "--m", "1..2", "--grid", "2", "--exact", "--format", "csv"],
        exit_code: 0,
    },
    GoldenCase {
        name: "verify_mc_starved",
        args: &["verify", "--oracles", "mc", "--d", "2", "--m", "3", "--grid", "2", "--samples", "2", "--seed", "1"],
        exit_code: 1,
    },
    GoldenCase {
        name: "verify_unknown_oracle",
        args: &["verify", "--oracles", "enum,oops"],
        exit_code: 2,
    },
];

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run_binary(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multimoments"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Replaces the run-dependent wall time so transcripts are stable.
pub fn mask(stdout: &str) -> String {
    stdout
        .lines()
        .map(|l| match l.find("\"wall_time\":") {
            Some(pos) => format!("{}\"wall_time\": <masked>", &l[..pos]),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Checks one case against its golden transcript; `UPDATE_GOLDEN=1` rewrites it.
pub fn check(case: &GoldenCase) -> Result<(), String> {
    let (code, stdout, stderr) = run_binary(case.args);
    if code != case.exit_code {
        return Err(format!(
            "{}: exit {code}, expected {} (stderr: {stderr})",
            case.name, case.exit_code
        ));
    }
    let transcript = if case.exit_code == 2 {
        // Diagnostics go to stderr; only their first line is pinned.
        format!("stdout:{}\nstderr:{}", mask(&stdout), stderr.lines().next().unwrap_or(""))
    } else {
        mask(&stdout)
    };
    let path = golden_dir().join(format!("{}.txt", case.name));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &transcript).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: missing golden file: {e}", case.name))?;
    if expected != transcript {
        return Err(format!(
            "{}: transcript differs\n--- expected\n{expected}\n--- actual\n{transcript}",
            case.name
        ));
    }
    Ok(())
}
