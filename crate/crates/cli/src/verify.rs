//! `verify` subcommand: closed forms against the oracles over a parameter grid.
//!
//! A *case* is one `(d, m, x, tuple)` combination. Each case evaluates the raw
//! and central closed forms once and compares them with every selected oracle:
//! `enum` checks both kinds, `mgf` checks raw, `expansion` checks central and
//! `mc` checks both against 4-standard-error bands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use multimoments::enum_oracle::SupportTable;
use multimoments::formulas::{central_moment_with_arm, raw_moment_with_arm};
use multimoments::{
    central_from_raw, index_tuples, raw_moment_via_mgf, validate_params, ArmCoverage, Exact,
    McSampleSet, MgfJet, MomentError, MomentKind, Scalar,
};

use crate::{CliError, Format};

/// Relative tolerance for float-mode comparisons, scaled by `max(1, |a|, |b|)`.
pub const FLOAT_RTOL: f64 = 1e-12;
/// Monte Carlo band half-width in standard errors.
pub const MC_Z: f64 = 4.0;
/// Fraction of Monte Carlo comparisons that must fall inside their band.
pub const MC_MIN_COVERAGE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Enum,
    Mgf,
    Expansion,
    Mc,
}

impl Oracle {
    pub fn as_str(self) -> &'static str {
        match self {
            Oracle::Enum => "enum",
            Oracle::Mgf => "mgf",
            Oracle::Expansion => "expansion",
            Oracle::Mc => "mc",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub oracles: Vec<Oracle>,
    pub d: RangeInclusive<usize>,
    pub m: RangeInclusive<u64>,
    pub grid: u64,
    pub exact: bool,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
    /// Keep one row per case (needed for CSV output).
    pub keep_rows: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            oracles: vec![Oracle::Enum, Oracle::Mgf, Oracle::Expansion],
            d: 1..=3,
            m: 1..=5,
            grid: 4,
            exact: false,
            samples: 100_000,
            seed: 0,
            budget: multimoments::enum_oracle::DEFAULT_BUDGET,
            keep_rows: false,
        }
    }
}

impl VerifyConfig {
    fn uses(&self, o: Oracle) -> bool {
        self.oracles.contains(&o)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub oracle: Oracle,
    pub kind: &'static str,
    pub indices: Vec<usize>,
    pub m: u64,
    pub x: Vec<String>,
    pub closed_form: String,
    pub oracle_value: String,
    /// Monte Carlo standard error; zero for deterministic oracles.
    pub std_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct McSummary {
    pub samples: u64,
    pub seed: u64,
    pub comparisons: u64,
    pub within_band: u64,
    pub coverage: f64,
}

/// One `(d, m, x, tuple)` row; oracle columns are empty when not selected.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRow {
    pub d: usize,
    pub m: u64,
    pub x: Vec<String>,
    pub indices: Vec<usize>,
    pub raw: String,
    pub central: String,
    pub enum_raw: Option<String>,
    pub enum_central: Option<String>,
    pub mgf_raw: Option<String>,
    pub expansion_central: Option<String>,
    pub mc_raw: Option<(f64, f64)>,
    pub mc_central: Option<(f64, f64)>,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub mode: &'static str,
    pub oracles: Vec<Oracle>,
    pub cells: u64,
    pub cases_run: u64,
    pub comparisons: u64,
    pub mismatches: Vec<Mismatch>,
    pub arm_coverage: ArmCoverage,
    pub mc: McSummary,
    pub wall_time: f64,
    pub rows: Vec<CaseRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Coverage {
            raw: BTreeMap<String, u64>,
            central: BTreeMap<String, u64>,
            missing: Vec<String>,
        }
        #[derive(Serialize)]
        struct Json<'a> {
            mode: &'a str,
            oracles: &'a [Oracle],
            cells: u64,
            cases_run: u64,
            comparisons: u64,
            mismatches: &'a [Mismatch],
            arm_coverage: Coverage,
            mc: &'a McSummary,
            status: &'a str,
            wall_time: f64,
        }
        let mut coverage = Coverage {
            raw: BTreeMap::new(),
            central: BTreeMap::new(),
            missing: Vec::new(),
        };
        for arm in ArmCoverage::all_arms() {
            let hits = self.arm_coverage.hits(&arm);
            let key = arm.pattern.to_string();
            match arm.kind {
                MomentKind::Raw => coverage.raw.insert(key.clone(), hits),
                MomentKind::Central => coverage.central.insert(key.clone(), hits),
            };
            if hits == 0 {
                coverage.missing.push(arm.to_string());
            }
        }
        serde_json::to_value(Json {
            mode: self.mode,
            oracles: &self.oracles,
            cells: self.cells,
            cases_run: self.cases_run,
            comparisons: self.comparisons,
            mismatches: &self.mismatches,
            arm_coverage: coverage,
            mc: &self.mc,
            status: if self.passed() { "pass" } else { "fail" },
            wall_time: self.wall_time,
        })
        .expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "d,m,x,indices,raw,central,enum_raw,enum_central,mgf_raw,expansion_central,\
             mc_raw,mc_raw_se,mc_central,mc_central_se,ok\n",
        );
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        let est = |v: &Option<(f64, f64)>| match v {
            Some((e, se)) => (e.to_string(), se.to_string()),
            None => (String::new(), String::new()),
        };
        for r in &self.rows {
            let (mr, mrs) = est(&r.mc_raw);
            let (mc, mcs) = est(&r.mc_central);
            let indices: Vec<String> = r.indices.iter().map(usize::to_string).collect();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.d,
                r.m,
                r.x.join(";"),
                indices.join(";"),
                r.raw,
                r.central,
                opt(&r.enum_raw),
                opt(&r.enum_central),
                opt(&r.mgf_raw),
                opt(&r.expansion_central),
                mr,
                mrs,
                mc,
                mcs,
                r.ok
            )
            .expect("write to string");
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("serializable"),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Count vectors `k` with `Σk ≤ g`, colexicographic order.
pub fn lattice(g: u64, d: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut k = vec![0u64; d];
    loop {
        out.push(k.clone());
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            k[pos] += 1;
            if k.iter().sum::<u64>() <= g {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
    }
}

/// Whether two values agree under the comparison rule of their mode.
pub fn agree<S: Scalar>(a: &S, b: &S) -> bool {
    match S::MODE {
        multimoments::Mode::Exact => a == b,
        multimoments::Mode::Float => {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= FLOAT_RTOL * a.abs().max(b.abs()).max(1.0)
        }
    }
}

#[derive(Default)]
struct CellOutcome {
    cases: u64,
    comparisons: u64,
    mismatches: Vec<Mismatch>,
    mc_outliers: Vec<Mismatch>,
    mc_comparisons: u64,
    mc_within: u64,
    coverage: ArmCoverage,
    rows: Vec<CaseRow>,
}

struct Cell {
    index: u64,
    d: usize,
    m: u64,
    k: Vec<u64>,
}

fn run_cell<S: Scalar>(cfg: &VerifyConfig, cell: &Cell) -> Result<CellOutcome, MomentError> {
    let x: Vec<S> = cell
        .k
        .iter()
        .map(|&k| S::from_ratio(k as i64, cfg.grid as i64))
        .collect();
    let params = validate_params(cell.m, x)?;
    let x_text: Vec<String> = params.x().iter().map(Scalar::render).collect();
    let d = cell.d;

    let table = if cfg.uses(Oracle::Enum) {
        Some(SupportTable::build(&params, cfg.budget)?)
    } else {
        None
    };
    let jet = if cfg.uses(Oracle::Mgf) && d <= multimoments::mgf_oracle::MAX_VARS {
        let all: Vec<usize> = (1..=d).collect();
        Some(MgfJet::build(&params, &all, multimoments::mgf_oracle::MAX_DEGREE)?)
    } else {
        None
    };
    let draws = if cfg.uses(Oracle::Mc) {
        Some(McSampleSet::draw(&params, cfg.samples, cfg.seed, cell.index)?)
    } else {
        None
    };

    let mut out = CellOutcome::default();
    let mismatch = |oracle, kind: MomentKind, t: &[usize], cf: &S, ov: String, se: f64| Mismatch {
        oracle,
        kind: kind.as_str(),
        indices: t.to_vec(),
        m: cell.m,
        x: x_text.clone(),
        closed_form: cf.render(),
        oracle_value: ov,
        std_error: se,
    };

    for order in 1..=multimoments::model::MAX_ORDER {
        for t in index_tuples(order, d) {
            out.cases += 1;
            let (raw, raw_arm) = raw_moment_with_arm(&params, &t)?;
            let (central, central_arm) = central_moment_with_arm(&params, &t)?;
            out.coverage.record(raw_arm);
            out.coverage.record(central_arm);
            let before = out.mismatches.len() + out.mc_outliers.len();
            let mut row = CaseRow {
                d,
                m: cell.m,
                x: x_text.clone(),
                indices: t.clone(),
                raw: raw.render(),
                central: central.render(),
                enum_raw: None,
                enum_central: None,
                mgf_raw: None,
                expansion_central: None,
                mc_raw: None,
                mc_central: None,
                ok: true,
            };

            let mut check = |oracle, kind, closed: &S, other: S, slot: &mut Option<String>| {
                out.comparisons += 1;
                if !agree(closed, &other) {
                    out.mismatches
                        .push(mismatch(oracle, kind, &t, closed, other.render(), 0.0));
                }
                *slot = Some(other.render());
            };

            if let Some(table) = &table {
                let er = table.moment(&t, MomentKind::Raw)?;
                check(Oracle::Enum, MomentKind::Raw, &raw, er, &mut row.enum_raw);
                let ec = table.moment(&t, MomentKind::Central)?;
                check(Oracle::Enum, MomentKind::Central, &central, ec, &mut row.enum_central);
            }
            if cfg.uses(Oracle::Mgf) {
                let v = match &jet {
                    Some(jet) => jet.moment(&t)?,
                    None => raw_moment_via_mgf(&params, &t)?,
                };
                check(Oracle::Mgf, MomentKind::Raw, &raw, v, &mut row.mgf_raw);
            }
            if cfg.uses(Oracle::Expansion) {
                let v = central_from_raw(&params, &t)?;
                check(Oracle::Expansion, MomentKind::Central, &central, v, &mut row.expansion_central);
            }
            if let Some(draws) = &draws {
                for (kind, closed) in [(MomentKind::Raw, &raw), (MomentKind::Central, &central)] {
                    let est = draws.estimate(&t, kind)?;
                    out.comparisons += 1;
                    out.mc_comparisons += 1;
                    if est.covers(closed.to_f64(), MC_Z) {
                        out.mc_within += 1;
                    } else {
                        out.mc_outliers.push(mismatch(
                            Oracle::Mc,
                            kind,
                            &t,
                            closed,
                            est.estimate.to_string(),
                            est.std_error,
                        ));
                    }
                    let slot = match kind {
                        MomentKind::Raw => &mut row.mc_raw,
                        MomentKind::Central => &mut row.mc_central,
                    };
                    *slot = Some((est.estimate, est.std_error));
                }
            }
            row.ok = out.mismatches.len() + out.mc_outliers.len() == before;
            if cfg.keep_rows {
                out.rows.push(row);
            }
        }
    }
    Ok(out)
}

fn cells(cfg: &VerifyConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for d in cfg.d.clone() {
        let points = lattice(cfg.grid, d);
        for m in cfg.m.clone() {
            for k in &points {
                out.push(Cell {
                    index: out.len() as u64,
                    d,
                    m,
                    k: k.clone(),
                });
            }
        }
    }
    out
}

/// Runs the sweep; the result does not depend on thread scheduling.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport, CliError> {
    if cfg.oracles.is_empty() {
        return Err(CliError::usage("at least one oracle must be selected"));
    }
    if cfg.grid == 0 {
        return Err(CliError::usage("--grid must be at least 1"));
    }
    if *cfg.d.start() == 0 {
        return Err(MomentError::EmptyDimension.into());
    }
    if *cfg.m.start() == 0 {
        return Err(MomentError::BadTrialCount(0).into());
    }
    if cfg.uses(Oracle::Mc) && cfg.samples < 2 {
        return Err(CliError::usage("--samples must be at least 2"));
    }
    let start = Instant::now();
    let (mode, outcomes) = if cfg.exact {
        ("exact", sweep::<Exact>(cfg)?)
    } else {
        ("float", sweep::<f64>(cfg)?)
    };

    let mut report = VerifyReport {
        mode,
        oracles: cfg.oracles.clone(),
        cells: outcomes.len() as u64,
        cases_run: 0,
        comparisons: 0,
        mismatches: Vec::new(),
        arm_coverage: ArmCoverage::new(),
        mc: McSummary {
            samples: if cfg.uses(Oracle::Mc) { cfg.samples } else { 0 },
            seed: cfg.seed,
            ..McSummary::default()
        },
        wall_time: 0.0,
        rows: Vec::new(),
    };
    let mut outliers = Vec::new();
    for o in outcomes {
        report.cases_run += o.cases;
        report.comparisons += o.comparisons;
        report.mismatches.extend(o.mismatches);
        report.arm_coverage.merge(&o.coverage);
        report.mc.comparisons += o.mc_comparisons;
        report.mc.within_band += o.mc_within;
        outliers.extend(o.mc_outliers);
        report.rows.extend(o.rows);
    }
    report.mc.coverage = if report.mc.comparisons == 0 {
        1.0
    } else {
        report.mc.within_band as f64 / report.mc.comparisons as f64
    };
    if report.mc.coverage < MC_MIN_COVERAGE {
        report.mismatches.extend(outliers);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

fn sweep<S: Scalar>(cfg: &VerifyConfig) -> Result<Vec<CellOutcome>, MomentError> {
    cells(cfg)
        .par_iter()
        .map(|cell| run_cell::<S>(cfg, cell))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice(2, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(lattice(4, 3).len(), 35);
        assert_eq!(lattice(4, 4).len(), 70);
        assert_eq!(lattice(2, 2)[..4], [vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]]);
    }

    #[test]
    fn counting_contract() {
        let cfg = VerifyConfig {
            oracles: vec![Oracle::Enum],
            d: 1..=1,
            m: 1..=2,
            grid: 2,
            exact: true,
            ..VerifyConfig::default()
        };
        let report = run(&cfg).unwrap();
        // 4 tuples × 3 grid points × 2 trial counts.
        assert_eq!(report.cases_run, 24);
        assert_eq!(report.comparisons, 48);
        assert!(report.passed());
    }

    #[test]
    fn float_tolerance() {
        assert!(agree(&1.0f64, &(1.0 + 1e-13)));
        assert!(agree(&0.0f64, &1e-13));
        assert!(!agree(&1.0f64, &(1.0 + 1e-11)));
        assert!(agree(&1e6f64, &(1e6 + 1e-7)));
    }

    #[test]
    fn config_errors() {
        let base = VerifyConfig::default();
        let mut c = base.clone();
        c.oracles.clear();
        assert!(matches!(run(&c), Err(CliError::Usage(_))));
        let mut c = base.clone();
        c.d = 0..=2;
        assert!(matches!(run(&c), Err(CliError::Validation(_))));
        let mut c = base;
        c.d = 2..=2;
        c.m = 200..=200;
        c.budget = 100;
        assert!(matches!(
            run(&c),
            Err(CliError::Validation(MomentError::BudgetExceeded { .. }))
        ));
    }
}
