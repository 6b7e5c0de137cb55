//! Versioned verification reports: the JSON schema emitted for each space
//! and a human-readable text rendering of the same data.
//!
//! Node indices in reports are 1-based (Bourbaki numbering), matching the
//! command-line interface; the library API itself is 0-based.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceInfo {
    pub descriptor: String,
    /// 1-based node indices of `I_P`.
    pub parabolic: Vec<usize>,
    /// 1-based node indices of `I^P`.
    pub complement: Vec<usize>,
    pub basis_size: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportStatus {
    Complete,
    CapExceeded { cap: usize, seen: usize },
    Invalid { assertion: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoInfo {
    /// Pairs `(node, n_node)` over `I^P`, nodes 1-based.
    pub n: Vec<(usize, i64)>,
    pub r: i64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub size: usize,
    pub nonzero_entries: usize,
    pub annotated_terms: usize,
    /// Decimal rendering of the largest entry.
    pub max_entry: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenOut {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub is_max_modulus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralInfo {
    pub delta0: f64,
    pub perron_residual: f64,
    pub perron_vector_min: f64,
    pub perron_iterations: usize,
    pub h_graph: u64,
    pub mode: String,
    pub exact_fallback: bool,
    pub eigenvalues: Vec<EigenOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOut {
    pub pass: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditions {
    /// The spectral radius is an eigenvalue.
    pub cond1: ConditionOut,
    /// That eigenvalue is simple.
    pub cond2: ConditionOut,
    /// Maximal-modulus eigenvalues are `delta0` times `r`-th roots of unity.
    pub cond3: ConditionOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityOut {
    pub r: i64,
    pub h: u64,
    pub r_divides_h: bool,
    pub h_divides_r: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiWitnessOut {
    /// 1-based node in `I^P`.
    pub node: usize,
    pub u_index: usize,
    pub u_word: String,
    pub coefficient: i64,
    /// Every `(u, coefficient)` carrying the `q_i`-term at that length.
    pub all_candidates: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleOut {
    pub node: usize,
    pub length: usize,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFormOut {
    pub k: usize,
    pub block_sizes: Vec<usize>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOut {
    pub node: usize,
    /// Coroot-lattice coordinates of the unique lift.
    pub lambda_b: Vec<i64>,
    /// 1-based nodes of the smaller parabolic cut out by the lift.
    pub delta_p_prime: Vec<usize>,
    pub w_p_w_p_prime_word: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PwStatus {
    Pass,
    Fail,
    SkippedOverCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetersonWoodwardOut {
    pub node: usize,
    pub status: PwStatus,
    pub p_side: i64,
    pub b_side: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub divisibility: DivisibilityOut,
    pub qi_witnesses: Vec<QiWitnessOut>,
    pub cycles: Vec<CycleOut>,
    pub block_certificate: BlockFormOut,
    pub lifts: Vec<LiftOut>,
    pub peterson_woodward: Vec<PetersonWoodwardOut>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u64,
    pub quotient_ms: u64,
    pub matrix_ms: u64,
    pub spectral_ms: u64,
    pub witnesses_ms: u64,
}

/// The full verification record for one space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub space: SpaceInfo,
    pub status: ReportStatus,
    pub fano: Option<FanoInfo>,
    pub matrix: Option<MatrixStats>,
    pub spectral: Option<SpectralInfo>,
    pub conditions: Option<Conditions>,
    pub witnesses: Option<Witnesses>,
    pub timings: Timings,
}

impl Report {
    /// Overall verdict: complete, all three conditions hold, and every
    /// witness check succeeded (a skipped comparison is not a failure).
    pub fn passed(&self) -> bool {
        if self.status != ReportStatus::Complete {
            return false;
        }
        let Some(c) = &self.conditions else { return false };
        if !(c.cond1.pass && c.cond2.pass && c.cond3.pass) {
            return false;
        }
        let Some(w) = &self.witnesses else { return false };
        w.divisibility.r_divides_h
            && w.divisibility.h_divides_r
            && w.qi_witnesses.iter().all(|q| q.coefficient == 1)
            && w.block_certificate.verified
            && w.peterson_woodward.iter().all(|p| p.status != PwStatus::Fail)
    }

    /// Copy with timing fields zeroed; reports are compared and cached in
    /// this form.
    pub fn canonical(&self) -> Report {
        let mut r = self.clone();
        r.timings = Timings::default();
        r
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering of the same data.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        let ip = if self.space.parabolic.is_empty() {
            "{} (full flag)".to_string()
        } else {
            format!(
                "{{{}}}",
                self.space
                    .parabolic
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        push(
            &mut out,
            format!(
                "space {} / I_P = {}  (basis {}, dim {})",
                self.space.descriptor, ip, self.space.basis_size, self.space.dim
            ),
        );
        match &self.status {
            ReportStatus::Complete => push(&mut out, "status: complete".into()),
            ReportStatus::CapExceeded { cap, seen } => {
                push(&mut out, format!("status: cap exceeded (cap {cap}, at least {seen} elements)"))
            }
            ReportStatus::Invalid { assertion } => {
                push(&mut out, format!("status: INVALID - {assertion}"))
            }
        }
        if let Some(f) = &self.fano {
            let ns = f
                .n
                .iter()
                .map(|(i, v)| format!("n_{i} = {v}"))
                .collect::<Vec<_>>()
                .join(", ");
            push(&mut out, format!("fano: {ns}; r = {}; dim = {}", f.r, f.dim));
        }
        if let Some(m) = &self.matrix {
            push(
                &mut out,
                format!(
                    "matrix: {0} x {0}, {1} nonzero entries, max entry {2}",
                    m.size, m.nonzero_entries, m.max_entry
                ),
            );
        }
        if let Some(s) = &self.spectral {
            push(
                &mut out,
                format!(
                    "spectral: delta0 = {:.12}, h = {}, mode = {}{}",
                    s.delta0,
                    s.h_graph,
                    s.mode,
                    if s.exact_fallback { " (fallback)" } else { "" }
                ),
            );
            let top: Vec<String> = s
                .eigenvalues
                .iter()
                .filter(|e| e.is_max_modulus)
                .map(|e| format!("{:.6}{:+.6}i", e.re, e.im))
                .collect();
            push(&mut out, format!("max-modulus eigenvalues: [{}]", top.join(", ")));
        }
        if let Some(c) = &self.conditions {
            for (label, cond) in
                [("(1)", &c.cond1), ("(2)", &c.cond2), ("(3)", &c.cond3)]
            {
                push(
                    &mut out,
                    format!(
                        "condition {label}: {} [{}; residual {:.3e}]",
                        if cond.pass { "pass" } else { "FAIL" },
                        cond.detail,
                        cond.residual
                    ),
                );
            }
        }
        if let Some(w) = &self.witnesses {
            push(
                &mut out,
                format!(
                    "divisibility: r = {}, h = {}, r|h {}, h|r {}",
                    w.divisibility.r,
                    w.divisibility.h,
                    w.divisibility.r_divides_h,
                    w.divisibility.h_divides_r
                ),
            );
            for q in &w.qi_witnesses {
                push(
                    &mut out,
                    format!(
                        "q_{} witness: u = #{} ({}), coefficient {}",
                        q.node, q.u_index, q.u_word, q.coefficient
                    ),
                );
            }
            for c in &w.cycles {
                push(
                    &mut out,
                    format!("cycle through the identity vertex for node {}: length {}", c.node, c.length),
                );
            }
            push(
                &mut out,
                format!(
                    "block form: k = {}, sizes {:?}, verified {}",
                    w.block_certificate.k, w.block_certificate.block_sizes, w.block_certificate.verified
                ),
            );
            for l in &w.lifts {
                push(
                    &mut out,
                    format!(
                        "lift for node {}: lambda_B = {:?}, Delta_P' = {:?}, w_P w_P' = {}",
                        l.node, l.lambda_b, l.delta_p_prime, l.w_p_w_p_prime_word
                    ),
                );
            }
            for p in &w.peterson_woodward {
                let status = match p.status {
                    PwStatus::Pass => "pass".to_string(),
                    PwStatus::Fail => format!("FAIL (P-side {}, B-side {})", p.p_side, p.b_side),
                    PwStatus::SkippedOverCap => "skipped (B side over cap)".to_string(),
                };
                push(&mut out, format!("Peterson-Woodward node {}: {status}", p.node));
            }
        }
        push(
            &mut out,
            format!("result: {}", if self.passed() { "PASS" } else { "FAIL" }),
        );
        out
    }
}
