//! Run configuration, batch suites, exports, and on-disk artifacts behind
//! the `conjo` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{Report, ReportStatus};
use crate::roots::{CartanType, Component, TypeLetter};
use crate::verify::{verify_space, Verification, VerifyOptions};

/// One space to verify: a Cartan type plus the 0-based parabolic node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpec {
    pub cartan: CartanType,
    pub i_p: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(cartan: CartanType, mut i_p: Vec<usize>) -> SpaceSpec {
        i_p.sort_unstable();
        i_p.dedup();
        SpaceSpec { cartan, i_p }
    }

    /// Compact label, 1-based nodes: `A3/P1,3`, full flag `A3/B`.
    pub fn label(&self) -> String {
        if self.i_p.is_empty() {
            format!("{}/B", self.cartan.descriptor())
        } else {
            format!(
                "{}/P{}",
                self.cartan.descriptor(),
                self.i_p
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }

    /// Filesystem-safe slug for artifact names.
    pub fn slug(&self) -> String {
        if self.i_p.is_empty() {
            format!("{}__flag", self.cartan.descriptor())
        } else {
            format!(
                "{}__P{}",
                self.cartan.descriptor(),
                self.i_p
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join("-")
            )
        }
    }
}

/// Which artifact files to write per space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportSet {
    pub json: bool,
    pub dot: bool,
    pub csv: bool,
    pub matrix: bool,
}

impl Default for ExportSet {
    fn default() -> Self {
        ExportSet { json: true, dot: false, csv: false, matrix: false }
    }
}

impl ExportSet {
    pub fn parse(names: &[String]) -> Result<ExportSet> {
        let mut set = ExportSet { json: false, dot: false, csv: false, matrix: false };
        for name in names {
            match name.trim().to_ascii_lowercase().as_str() {
                "json" => set.json = true,
                "dot" => set.dot = true,
                "csv" => set.csv = true,
                "matrix" => set.matrix = true,
                other => {
                    return Err(Error::BadConfig(format!(
                        "unknown export `{other}` (expected json, dot, csv, matrix)"
                    )))
                }
            }
        }
        Ok(set)
    }
}

/// Full configuration of one `run` invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spaces: Vec<SpaceSpec>,
    pub options: VerifyOptions,
    pub out_dir: Option<PathBuf>,
    pub exports: ExportSet,
    pub jobs: usize,
    /// In suite mode a cap overflow skips the space instead of failing it.
    pub suite_mode: bool,
}

impl RunConfig {
    pub fn new(spaces: Vec<SpaceSpec>) -> RunConfig {
        RunConfig {
            spaces,
            options: VerifyOptions::default(),
            out_dir: None,
            exports: ExportSet::default(),
            jobs: 1,
            suite_mode: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spaces.is_empty() {
            return Err(Error::BadConfig("no spaces specified".into()));
        }
        if self.jobs == 0 {
            return Err(Error::BadConfig("jobs must be positive".into()));
        }
        self.options.validate()
    }
}

/// Per-space line of a run summary.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub space: String,
    pub basis_size: usize,
    pub r: Option<i64>,
    pub h: Option<u64>,
    pub delta0: Option<f64>,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowOutcome {
    Pass,
    Fail(String),
    Skipped(String),
}

/// Results of a whole run, reports in input order.
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
    pub reports: Vec<Report>,
    pub all_passed: bool,
    /// Set when some space exceeded the quotient cap outside suite mode.
    pub cap_exceeded: bool,
}

impl RunSummary {
    /// Plain-text summary table: space, basis size, r, h, delta0, outcome.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:>7} {:>4} {:>4} {:>16}  {}\n",
            "space", "|W^P|", "r", "h", "delta0", "result"
        ));
        for row in &self.rows {
            let fmt_opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<16} {:>7} {:>4} {:>4} {:>16}  {}\n",
                row.space,
                if row.basis_size == 0 { "-".into() } else { row.basis_size.to_string() },
                fmt_opt(row.r.map(|v| v.to_string())),
                fmt_opt(row.h.map(|v| v.to_string())),
                fmt_opt(row.delta0.map(|v| format!("{v:.9}"))),
                match &row.outcome {
                    RowOutcome::Pass => "pass".to_string(),
                    RowOutcome::Fail(why) => format!("FAIL ({why})"),
                    RowOutcome::Skipped(why) => format!("skipped ({why})"),
                },
            ));
        }
        out
    }
}

fn summarize(spec: &SpaceSpec, report: &Report, suite_mode: bool) -> SummaryRow {
    let outcome = match &report.status {
        ReportStatus::Complete => {
            if report.passed() {
                RowOutcome::Pass
            } else {
                RowOutcome::Fail("condition or witness failed".into())
            }
        }
        ReportStatus::CapExceeded { cap, .. } => {
            let why = format!("cap {cap}");
            if suite_mode {
                RowOutcome::Skipped(why)
            } else {
                RowOutcome::Fail(why)
            }
        }
        ReportStatus::Invalid { assertion } => RowOutcome::Fail(assertion.clone()),
    };
    SummaryRow {
        space: spec.label(),
        basis_size: report.space.basis_size,
        r: report.fano.as_ref().map(|f| f.r),
        h: report.spectral.as_ref().map(|s| s.h_graph),
        delta0: report.spectral.as_ref().map(|s| s.delta0),
        outcome,
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

fn write_artifacts(
    dir: &Path,
    spec: &SpaceSpec,
    v: &Verification,
    exports: &ExportSet,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let slug = spec.slug();
    let mut written = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    emit(format!("{slug}.report.txt"), v.report.render_text().into_bytes())?;
    if exports.json {
        emit(format!("{slug}.report.json"), v.report.to_json().into_bytes())?;
    }
    if exports.dot {
        if let (Some(digraph), Some(quotient)) = (&v.digraph, &v.quotient) {
            let labels: Vec<String> =
                quotient.elements().iter().map(|e| e.word_string()).collect();
            let mut buf = Vec::new();
            digraph
                .write_dot(&mut buf, Some(&labels))
                .map_err(|e| Error::io(format!("{slug}.digraph.dot"), e))?;
            emit(format!("{slug}.digraph.dot"), buf)?;
        }
    }
    if exports.csv {
        if let Some(spectrum) = &v.spectrum {
            let mut buf = Vec::new();
            spectrum
                .write_csv(&mut buf)
                .map_err(|e| Error::io(format!("{slug}.spectrum.csv"), e))?;
            emit(format!("{slug}.spectrum.csv"), buf)?;
        }
    }
    if exports.matrix {
        if let Some(matrix) = &v.matrix {
            let mut dense = Vec::new();
            matrix
                .write_dense_csv(&mut dense)
                .map_err(|e| Error::io(format!("{slug}.matrix.csv"), e))?;
            emit(format!("{slug}.matrix.csv"), dense)?;
            let mut sparse = Vec::new();
            matrix
                .write_sparse_annotated(&mut sparse)
                .map_err(|e| Error::io(format!("{slug}.matrix.sparse.txt"), e))?;
            emit(format!("{slug}.matrix.sparse.txt"), sparse)?;
        }
    }
    Ok(written)
}

/// Verifies every configured space (optionally in parallel), writes the
/// requested artifacts, and aggregates a summary. Deterministic given the
/// configuration: results are assembled in input order.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let verify_one = |spec: &SpaceSpec| -> Result<Verification> {
        verify_space(&spec.cartan, &spec.i_p, &config.options)
    };
    let results: Vec<Result<Verification>> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::BadConfig(format!("worker pool: {e}")))?;
        pool.install(|| config.spaces.par_iter().map(verify_one).collect())
    } else {
        config.spaces.iter().map(verify_one).collect()
    };

    let mut rows = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    let mut all_passed = true;
    let mut cap_exceeded = false;
    for (spec, result) in config.spaces.iter().zip(results) {
        let v = result?;
        if let Some(dir) = &config.out_dir {
            write_artifacts(dir, spec, &v, &config.exports)?;
        }
        let row = summarize(spec, &v.report, config.suite_mode);
        match &row.outcome {
            RowOutcome::Pass | RowOutcome::Skipped(_) => {}
            RowOutcome::Fail(_) => all_passed = false,
        }
        if matches!(v.report.status, ReportStatus::CapExceeded { .. }) && !config.suite_mode {
            cap_exceeded = true;
        }
        rows.push(row);
        reports.push(v.report);
    }
    Ok(RunSummary { rows, reports, all_passed, cap_exceeded })
}

/// Predefined batch suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Every proper parabolic of A1-A4, B2-B3, C3, D4, G2 with
    /// `|W^P| <= 500`.
    Desk,
    /// Cap raised to 20000, with F4 and B4/C4 parabolics added.
    Extended,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Suite::Desk),
            "extended" => Ok(Suite::Extended),
            other => Err(Error::BadConfig(format!(
                "unknown suite `{other}` (expected desk or extended)"
            ))),
        }
    }

    pub fn quotient_cap(self) -> usize {
        match self {
            Suite::Desk => 500,
            Suite::Extended => 20_000,
        }
    }

    fn type_list(self) -> Vec<CartanType> {
        let mut simple = vec![
            (TypeLetter::A, 1usize),
            (TypeLetter::A, 2),
            (TypeLetter::A, 3),
            (TypeLetter::A, 4),
            (TypeLetter::B, 2),
            (TypeLetter::B, 3),
            (TypeLetter::C, 3),
            (TypeLetter::D, 4),
            (TypeLetter::G, 2),
        ];
        if self == Suite::Extended {
            simple.extend([(TypeLetter::F, 4), (TypeLetter::B, 4), (TypeLetter::C, 4)]);
        }
        simple
            .into_iter()
            .map(|(letter, rank)| CartanType {
                components: vec![Component { letter, rank }],
            })
            .collect()
    }

    /// Every proper parabolic (all `I_P` strictly inside `I`) of each type.
    pub fn spaces(self) -> Vec<SpaceSpec> {
        let mut out = Vec::new();
        for ct in self.type_list() {
            let rank = ct.rank();
            for bits in 0..(1u32 << rank) - 1 {
                let i_p: Vec<usize> = (0..rank).filter(|&i| bits & (1 << i) != 0).collect();
                out.push(SpaceSpec::new(ct.clone(), i_p));
            }
        }
        out
    }

    /// Ready-to-run configuration for the suite.
    pub fn config(self) -> RunConfig {
        let mut config = RunConfig::new(self.spaces());
        config.options.quotient_cap = self.quotient_cap();
        config.suite_mode = true;
        config
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_space_counts() {
        // Proper parabolics per type: 2^rank - 1.
        let desk = Suite::Desk.spaces();
        let expected: usize = [1usize, 2, 3, 4, 2, 3, 3, 4, 2]
            .iter()
            .map(|rank| (1usize << rank) - 1)
            .sum();
        assert_eq!(desk.len(), expected);
        assert_eq!(expected, 61);
        // A2 contributes exactly its three proper parabolics.
        let a2: Vec<_> = desk
            .iter()
            .filter(|s| s.cartan.descriptor() == "A2")
            .collect();
        assert_eq!(a2.len(), 3);
    }

    #[test]
    fn labels_and_slugs() {
        let spec = SpaceSpec::new("A3".parse().unwrap(), vec![0, 2]);
        assert_eq!(spec.label(), "A3/P1,3");
        assert_eq!(spec.slug(), "A3__P1-3");
        let flag = SpaceSpec::new("B2".parse().unwrap(), vec![]);
        assert_eq!(flag.label(), "B2/B");
        assert_eq!(flag.slug(), "B2__flag");
    }

    #[test]
    fn export_parsing() {
        let set = ExportSet::parse(&["json".into(), "dot".into()]).unwrap();
        assert!(set.json && set.dot && !set.csv && !set.matrix);
        assert!(ExportSet::parse(&["bogus".into()]).is_err());
    }

    #[test]
    fn run_single_space_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = RunConfig::new(vec![SpaceSpec::new("A2".parse().unwrap(), vec![1])]);
        config.out_dir = Some(dir.path().to_path_buf());
        config.exports = ExportSet { json: true, dot: true, csv: true, matrix: true };
        let summary = run(&config).unwrap();
        assert!(summary.all_passed);
        for suffix in [
            "report.txt",
            "report.json",
            "digraph.dot",
            "spectrum.csv",
            "matrix.csv",
            "matrix.sparse.txt",
        ] {
            let path = dir.path().join(format!("A2__P2.{suffix}"));
            assert!(path.exists(), "{suffix}");
        }
    }

    #[test]
    fn run_rejects_empty_config() {
        let config = RunConfig::new(vec![]);
        assert!(matches!(run(&config), Err(Error::BadConfig(_))));
    }

    #[test]
    fn suite_mode_skips_capped_spaces() {
        let mut config = RunConfig::new(vec![
            SpaceSpec::new("A3".parse().unwrap(), vec![0, 2]),
            SpaceSpec::new("A3".parse().unwrap(), vec![]),
        ]);
        config.options.quotient_cap = 10;
        config.suite_mode = true;
        let summary = run(&config).unwrap();
        assert_eq!(summary.rows[0].outcome, RowOutcome::Pass);
        assert!(matches!(summary.rows[1].outcome, RowOutcome::Skipped(_)));
        assert!(summary.all_passed);
        assert!(!summary.cap_exceeded);
    }

    #[test]
    fn single_mode_flags_cap_overflow() {
        let mut config = RunConfig::new(vec![SpaceSpec::new("A3".parse().unwrap(), vec![])]);
        config.options.quotient_cap = 10;
        let summary = run(&config).unwrap();
        assert!(!summary.all_passed);
        assert!(summary.cap_exceeded);
    }

    #[test]
    fn parallel_run_matches_serial() {
        let spaces = vec![
            SpaceSpec::new("A2".parse().unwrap(), vec![]),
            SpaceSpec::new("A2".parse().unwrap(), vec![0]),
            SpaceSpec::new("B2".parse().unwrap(), vec![]),
            SpaceSpec::new("A3".parse().unwrap(), vec![0, 2]),
        ];
        let serial = run(&RunConfig::new(spaces.clone())).unwrap();
        let mut parallel_config = RunConfig::new(spaces);
        parallel_config.jobs = 4;
        let parallel = run(&parallel_config).unwrap();
        assert_eq!(serial.reports.len(), parallel.reports.len());
        for (a, b) in serial.reports.iter().zip(&parallel.reports) {
            assert_eq!(a.canonical_json(), b.canonical_json());
        }
    }
}
