//! Orchestrates the Conjecture O verdict for one space and machine-checks
//! every supporting statement, producing explicit witnesses: divisibility
//! of the Fano index against the imprimitivity index, `q_i`-term witnesses,
//! cycles through the identity vertex, superdiagonal block certificates,
//! coroot-lattice lifts, and Peterson-Woodward comparisons against the full
//! flag of the same group.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;

use crate::cache;
use crate::error::{Error, Result};
use crate::quantum::{
    c1_operator_from_table, fano_data, ChernOperatorMatrix, ChevalleyTable, Degree, FanoData,
};
use crate::report::{
    BlockFormOut, ConditionOut, Conditions, CycleOut, DivisibilityOut, EigenOut, FanoInfo,
    LiftOut, MatrixStats, PetersonWoodwardOut, PwStatus, QiWitnessOut, Report, ReportStatus,
    SpaceInfo, SpectralInfo, Timings, Witnesses, REPORT_SCHEMA_VERSION,
};
use crate::roots::{
    build_root_system, parabolic_data, CartanType, CorootVec, ParabolicData, RootSystem,
};
use crate::spectral::{
    block_form_certificate, digraph_of, imprimitivity_index, max_modulus_analysis, perron_root,
    BlockFormCertificate, Digraph, PerronRoot, Spectrum, SpectralOptions, SpectrumMode,
};
use crate::weyl::{
    enumerate_quotient, longest_element, reduced_word_tails, ParabolicQuotient, WeylElem,
};

/// Caps and tolerances for a verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub quotient_cap: usize,
    pub exact_cap: usize,
    /// Relative eigenvalue cluster radius.
    pub cluster_tol_rel: f64,
    pub power_tol: f64,
    pub power_max_iters: usize,
    /// Quotient cache directory, if any.
    pub cache_dir: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quotient_cap: 20_000,
            exact_cap: 400,
            cluster_tol_rel: 1e-8,
            power_tol: 1e-12,
            power_max_iters: 200_000,
            cache_dir: None,
        }
    }
}

impl VerifyOptions {
    pub fn spectral(&self) -> SpectralOptions {
        SpectralOptions {
            cluster_tol_rel: self.cluster_tol_rel,
            power_tol: self.power_tol,
            power_max_iters: self.power_max_iters,
            exact_cap: self.exact_cap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.quotient_cap == 0 || self.exact_cap == 0 {
            return Err(Error::BadConfig("caps must be positive".into()));
        }
        if self.cluster_tol_rel <= 0.0 || self.power_tol <= 0.0 {
            return Err(Error::BadConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Exact divisibility checks between the Fano index and the imprimitivity
/// index; on a homogeneous space both directions must hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisibilityCheck {
    pub r: i64,
    pub h: u64,
    pub r_divides_h: bool,
    pub h_divides_r: bool,
}

pub fn verify_divisibility(fano: &FanoData, h_graph: u64) -> DivisibilityCheck {
    let r = fano.r;
    DivisibilityCheck {
        r,
        h: h_graph,
        r_divides_h: r > 0 && (h_graph as i64) % r == 0,
        h_divides_r: h_graph > 0 && r % (h_graph as i64) == 0,
    }
}

/// A basis element `u` of length `n_i - 1` whose product with the divisor
/// class `sigma_{s_i}` contains `q_i sigma_{0^P}` with coefficient one.
#[derive(Debug, Clone)]
pub struct QiWitness {
    pub node: usize,
    pub u_index: usize,
    pub coefficient: i64,
    /// Every candidate at that length carrying the term, with coefficients.
    pub all: Vec<(usize, i64)>,
}

/// Searches all `u` of length `n_i - 1` in basis order for the
/// `q_i sigma_{0^P}`-term; a coefficient-one witness must exist.
pub fn find_qi_witness(
    q: &ParabolicQuotient,
    table: &ChevalleyTable,
    fano: &FanoData,
    node: usize,
) -> Result<QiWitness> {
    let par = q.par();
    let pos = par
        .complement_position(node)
        .ok_or_else(|| Error::BadConfig(format!("node {node} is not in I^P")))?;
    let comp_len = par.complement().len();
    let target_len = (fano.n[pos] - 1) as usize;
    let unit = Degree::unit(pos, comp_len);
    let id = q.identity_index();
    let mut all = Vec::new();
    for u in q.indices_with_length(target_len) {
        let c = table.product(pos, u).coefficient_of(&unit, id);
        if c > 0 {
            all.push((u, c));
        }
    }
    match all.iter().find(|(_, c)| *c == 1) {
        Some(&(u_index, coefficient)) => Ok(QiWitness { node, u_index, coefficient, all }),
        None => Err(Error::InternalInvariant(format!(
            "no coefficient-one q_i witness for node {node} at length {target_len}"
        ))),
    }
}

/// A verified cycle through the identity vertex, of length `n_i`.
#[derive(Debug, Clone)]
pub struct CycleWitness {
    pub node: usize,
    /// Vertex indices, first and last both the identity.
    pub vertices: Vec<usize>,
}

impl CycleWitness {
    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Builds the cycle `identity -> v_{l} -> ... -> v_1 = u -> identity` from
/// the reduced-word tails of the witness and verifies every arc against the
/// operator matrix.
pub fn build_cycle(
    q: &ParabolicQuotient,
    m: &ChernOperatorMatrix,
    witness: &QiWitness,
) -> Result<CycleWitness> {
    let rs = q.rs();
    let par = q.par();
    let u = q.elem(witness.u_index);
    let l = u.length();
    let tails = reduced_word_tails(rs, par, u)?;
    let mut vertices = Vec::with_capacity(l + 2);
    vertices.push(q.identity_index());
    // tails[k].tail = v_{k+2}; walk v_l, ..., v_2, then u = v_1.
    for j in (2..=l).rev() {
        let tail = &tails[j - 2].tail;
        let idx = q.index_of_elem(tail).ok_or_else(|| {
            Error::InternalInvariant("reduced-word tail missing from the quotient".into())
        })?;
        vertices.push(idx);
    }
    if l >= 1 {
        vertices.push(witness.u_index);
    }
    vertices.push(q.identity_index());
    for pair in vertices.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if m.entry(b, a).is_zero() {
            return Err(Error::InternalInvariant(format!(
                "missing arc {a} -> {b} along the constructed cycle"
            )));
        }
    }
    Ok(CycleWitness { node: witness.node, vertices })
}

/// The unique coroot-lattice lift of a quantum direction: congruent to
/// `alpha_i^v` modulo the subsystem coroots, pairing to `0` or `-1` with
/// every subsystem positive root.
#[derive(Debug, Clone)]
pub struct PetersonLift {
    pub node: usize,
    pub lambda_b: CorootVec,
    /// Nodes `j in I_P` with `<alpha_j, lambda_B> = 0` (0-based).
    pub delta_p_prime: Vec<usize>,
    pub w_p_w_p_prime: WeylElem,
}

fn lift_solutions(
    rs: &RootSystem,
    par: &ParabolicData,
    node: usize,
    bounds: &[i64],
) -> Result<Vec<Vec<i64>>> {
    let ip = par.i_p();
    let rank = rs.rank();
    let mut solutions = Vec::new();
    let mut counters: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    loop {
        let mut lambda = vec![0i64; rank];
        lambda[node] = 1;
        for (k, &j) in ip.iter().enumerate() {
            lambda[j] = counters.get(k).copied().unwrap_or(0);
        }
        let cv = CorootVec::new(lambda.clone());
        let ok = par.subsystem_roots().iter().all(|&ridx| {
            let p = rs
                .pairing(&rs.positive_roots()[ridx], &cv)
                .expect("dimensions agree");
            p == 0 || p == -1
        });
        if ok {
            solutions.push(lambda);
        }
        // Mixed-radix increment over the box.
        let mut k = 0;
        loop {
            if k == counters.len() {
                return Ok(solutions);
            }
            counters[k] += 1;
            if counters[k] <= bounds[k] {
                break;
            }
            counters[k] = -bounds[k];
            k += 1;
        }
    }
}

/// Finds the unique lift by exhaustive search over a bounded coefficient
/// box; an empty box result is retried once with doubled bounds to
/// distinguish a too-small box from genuine non-uniqueness.
pub fn lift_degree(rs: &RootSystem, par: &ParabolicData, node: usize) -> Result<PetersonLift> {
    if par.complement_position(node).is_none() {
        return Err(Error::BadConfig(format!("node {node} is not in I^P")));
    }
    let ip = par.i_p();
    let mut bounds = vec![1i64; ip.len()];
    for &ridx in par.subsystem_roots() {
        let cv = &rs.coroots()[ridx];
        for (k, &j) in ip.iter().enumerate() {
            bounds[k] = bounds[k].max(cv.coords[j] + 1);
        }
    }
    let mut solutions = lift_solutions(rs, par, node, &bounds)?;
    if solutions.is_empty() {
        let doubled: Vec<i64> = bounds.iter().map(|b| b * 2).collect();
        solutions = lift_solutions(rs, par, node, &doubled)?;
        if solutions.is_empty() {
            return Err(Error::LiftFailed {
                node,
                reason: "no solution even in the doubled box".into(),
            });
        }
    }
    if solutions.len() > 1 {
        return Err(Error::LiftFailed {
            node,
            reason: format!("{} solutions in the search box", solutions.len()),
        });
    }
    let lambda_b = CorootVec::new(solutions.pop().unwrap());
    let delta_p_prime: Vec<usize> = ip
        .iter()
        .copied()
        .filter(|&j| {
            rs.pairing(&rs.simple_root(j), &lambda_b).expect("dimensions agree") == 0
        })
        .collect();
    let w_p = longest_element(rs, ip)?;
    let w_p_prime = longest_element(rs, &delta_p_prime)?;
    let w_p_w_p_prime = WeylElem::product(rs, &w_p, &w_p_prime)?;
    Ok(PetersonLift { node, lambda_b, delta_p_prime, w_p_w_p_prime })
}

/// The full-flag side used for the Peterson-Woodward comparison.
pub struct BSide {
    pub quotient: ParabolicQuotient,
}

impl BSide {
    /// Builds the full flag quotient (`I_P` empty) of the same root system,
    /// returning `None` when it exceeds the cap.
    pub fn build(rs: &Arc<RootSystem>, cap: usize) -> Result<Option<BSide>> {
        let borel = parabolic_data(rs, &[])?;
        match enumerate_quotient(rs, &borel, cap) {
            Ok(quotient) => Ok(Some(BSide { quotient })),
            Err(Error::QuotientCapExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Outcome of one Peterson-Woodward comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwOutcome {
    Pass { p_side: i64, b_side: i64 },
    Fail { p_side: i64, b_side: i64 },
    /// The full flag exceeded the cap; never silently passed.
    SkippedOverCap,
}

/// Compares the structure constant carrying `q_i sigma_{0^P}` on the
/// parabolic side with the corresponding full-flag constant: same divisor
/// and source classes, target `w_P w_{P'}`, degree the unique lift.
pub fn peterson_woodward_check(
    q: &ParabolicQuotient,
    table: &ChevalleyTable,
    lift: &PetersonLift,
    witness: &QiWitness,
    b_side: Option<&BSide>,
) -> Result<PwOutcome> {
    let par = q.par();
    let pos = par
        .complement_position(lift.node)
        .ok_or_else(|| Error::BadConfig(format!("node {} is not in I^P", lift.node)))?;
    let comp_len = par.complement().len();
    let p_side = table
        .product(pos, witness.u_index)
        .coefficient_of(&Degree::unit(pos, comp_len), q.identity_index());

    let Some(b) = b_side else {
        return Ok(PwOutcome::SkippedOverCap);
    };
    let bq = &b.quotient;
    let u_b = bq
        .index_of_elem(q.elem(witness.u_index))
        .ok_or_else(|| Error::InternalInvariant("witness missing from the full flag".into()))?;
    let target_b = bq
        .index_of_elem(&lift.w_p_w_p_prime)
        .ok_or_else(|| Error::InternalInvariant("w_P w_P' missing from the full flag".into()))?;
    let product_b = crate::quantum::chevalley_product(bq, lift.node, u_b)?;
    let degree_b = Degree::new(lift.lambda_b.coords.clone());
    let b_coeff = product_b.coefficient_of(&degree_b, target_b);
    if p_side == b_coeff {
        Ok(PwOutcome::Pass { p_side, b_side: b_coeff })
    } else {
        Ok(PwOutcome::Fail { p_side, b_side: b_coeff })
    }
}

/// Everything computed for one space, kept for exports alongside the
/// serializable report.
pub struct Verification {
    pub report: Report,
    pub quotient: Option<ParabolicQuotient>,
    pub matrix: Option<ChernOperatorMatrix>,
    pub digraph: Option<Digraph>,
    pub spectrum: Option<Spectrum>,
    pub perron: Option<PerronRoot>,
    pub block_certificate: Option<BlockFormCertificate>,
}

fn space_info(rs: &RootSystem, par: &ParabolicData, basis_size: usize) -> SpaceInfo {
    SpaceInfo {
        descriptor: rs.cartan_type().descriptor(),
        parabolic: par.i_p().iter().map(|&i| i + 1).collect(),
        complement: par.complement().iter().map(|&i| i + 1).collect(),
        basis_size,
        dim: rs.num_positive_roots() - par.num_subsystem_roots(),
    }
}

struct StageClock {
    start: Instant,
    last: Instant,
}

impl StageClock {
    fn new() -> Self {
        let now = Instant::now();
        StageClock { start: now, last: now }
    }

    fn lap(&mut self) -> u64 {
        let now = Instant::now();
        let ms = now.duration_since(self.last).as_millis() as u64;
        self.last = now;
        ms
    }

    fn total(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// Runs the whole pipeline for one space. Hard input errors (bad type, bad
/// nodes, a parabolic equal to the whole group) surface as `Err`; a cap
/// overflow or an internal assertion failure is reported in the status of
/// the returned partial report instead.
pub fn verify_space(
    cartan_type: &CartanType,
    i_p: &[usize],
    opts: &VerifyOptions,
) -> Result<Verification> {
    opts.validate()?;
    let mut clock = StageClock::new();
    let mut timings = Timings::default();

    let rs = Arc::new(build_root_system(cartan_type)?);
    let par = parabolic_data(&rs, i_p)?;
    if par.complement().is_empty() {
        return Err(Error::ParabolicIsFullGroup);
    }

    let quotient = match cache::load_or_enumerate(
        opts.cache_dir.as_deref(),
        &rs,
        &par,
        opts.quotient_cap,
    ) {
        Ok(q) => q,
        Err(Error::QuotientCapExceeded { cap, seen }) => {
            timings.quotient_ms = clock.lap();
            timings.total_ms = clock.total();
            let report = Report {
                schema_version: REPORT_SCHEMA_VERSION,
                space: space_info(&rs, &par, 0),
                status: ReportStatus::CapExceeded { cap, seen },
                fano: None,
                matrix: None,
                spectral: None,
                conditions: None,
                witnesses: None,
                timings,
            };
            return Ok(Verification {
                report,
                quotient: None,
                matrix: None,
                digraph: None,
                spectrum: None,
                perron: None,
                block_certificate: None,
            });
        }
        Err(e) => return Err(e),
    };
    timings.quotient_ms = clock.lap();

    let space = space_info(&rs, &par, quotient.size());
    let fano = fano_data(&quotient)?;
    let fano_info = FanoInfo {
        n: par
            .complement()
            .iter()
            .zip(&fano.n)
            .map(|(&i, &v)| (i + 1, v))
            .collect(),
        r: fano.r,
        dim: fano.dim_x,
    };

    // Everything below reports internal assertion failures as an invalid
    // status rather than an error.
    let mut invalid: Option<String> = None;
    let invalid_mark = |msg: String, invalid: &mut Option<String>| {
        if invalid.is_none() {
            *invalid = Some(msg);
        }
    };

    let table = ChevalleyTable::build(&quotient)?;
    let matrix = c1_operator_from_table(&quotient, &fano, &table)?;
    let matrix_stats = MatrixStats {
        size: matrix.size(),
        nonzero_entries: matrix.matrix().nonzero_count(),
        annotated_terms: matrix.annotated().len(),
        max_entry: matrix.matrix().max_entry().to_string(),
    };
    timings.matrix_ms = clock.lap();

    let digraph = digraph_of(matrix.matrix())?;
    let mut spectral_info = None;
    let mut conditions = None;
    let mut witnesses = None;
    let mut spectrum_out = None;
    let mut perron_out = None;
    let mut block_out = None;

    'pipeline: {
        if !digraph.is_strongly_connected() {
            invalid_mark("operator matrix is reducible".into(), &mut invalid);
            break 'pipeline;
        }
        let imprimitivity = match imprimitivity_index(&digraph) {
            Ok(r) => r,
            Err(e) => {
                invalid_mark(format!("imprimitivity computation failed: {e}"), &mut invalid);
                break 'pipeline;
            }
        };
        let Some(h_graph) = imprimitivity.h else {
            invalid_mark("operator digraph has no cycle".into(), &mut invalid);
            break 'pipeline;
        };

        let sopts = opts.spectral();
        let perron = match perron_root(matrix.matrix(), &sopts) {
            Ok(p) => p,
            Err(e) => {
                invalid_mark(format!("Perron iteration failed: {e}"), &mut invalid);
                break 'pipeline;
            }
        };
        let spectrum = match crate::spectral::full_spectrum(
            matrix.matrix(),
            SpectrumMode::Exact,
            &sopts,
        ) {
            Ok(s) => s,
            Err(e) => {
                invalid_mark(format!("spectrum computation failed: {e}"), &mut invalid);
                break 'pipeline;
            }
        };

        let tol_abs = opts.cluster_tol_rel * perron.delta0.max(1.0);
        // Condition (1): the Perron value appears in the spectrum.
        let (cond1_idx, cond1_res) = spectrum
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d = (v.value() - num_complex::Complex64::new(perron.delta0, 0.0)).norm();
                (i, d)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap_or((0, f64::INFINITY));
        let cond1 = ConditionOut {
            pass: cond1_res <= tol_abs,
            residual: cond1_res,
            detail: format!("power-iteration value {:.12} matched in spectrum", perron.delta0),
        };

        // Condition (2): multiplicity one.
        let cond2 = if spectrum.mode == SpectrumMode::Exact {
            let mult = spectrum.values[cond1_idx].multiplicity;
            ConditionOut {
                pass: mult == 1 && cond1.pass,
                residual: cond1_res,
                detail: format!("exact multiplicity {mult} from square-free certificate"),
            }
        } else {
            let gap = spectrum
                .values
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != cond1_idx)
                .map(|(_, v)| {
                    (v.value() - num_complex::Complex64::new(perron.delta0, 0.0)).norm()
                })
                .fold(f64::INFINITY, f64::min);
            ConditionOut {
                pass: cond1.pass && gap > 10.0 * tol_abs,
                residual: gap,
                detail: format!("numeric gap {gap:.3e} > 10 x cluster radius"),
            }
        };

        // Condition (3): h = r exactly and the max-modulus ring structure.
        let analysis = max_modulus_analysis(&spectrum, h_graph, opts.cluster_tol_rel);
        let h_equals_r = h_graph as i64 == fano.r;
        let cond3 = ConditionOut {
            pass: h_equals_r && analysis.pass(),
            residual: analysis.max_residual,
            detail: format!(
                "h = {h_graph}, r = {}; count {}, simple {}, roots-of-unity {}, rotation {}",
                fano.r,
                analysis.count_ok,
                analysis.all_simple,
                analysis.roots_of_unity_ok,
                analysis.rotation_invariant
            ),
        };
        timings.spectral_ms = clock.lap();

        // Witnesses.
        let divisibility = verify_divisibility(&fano, h_graph);
        let residues: Vec<usize> = (0..quotient.size())
            .map(|u| quotient.length(u) % fano.r as usize)
            .collect();
        let certificate = match block_form_certificate(matrix.matrix(), fano.r as usize, &residues)
        {
            Ok(c) => c,
            Err(e) => {
                invalid_mark(format!("block certificate failed: {e}"), &mut invalid);
                break 'pipeline;
            }
        };

        let b_side = if par.i_p().is_empty() {
            Some(BSide { quotient: quotient.clone() })
        } else {
            match BSide::build(&rs, opts.quotient_cap) {
                Ok(b) => b,
                Err(e) => {
                    invalid_mark(format!("full-flag side failed: {e}"), &mut invalid);
                    break 'pipeline;
                }
            }
        };

        let mut qi_out = Vec::new();
        let mut cycles_out = Vec::new();
        let mut lifts_out = Vec::new();
        let mut pw_out = Vec::new();
        for &node in par.complement() {
            let witness = match find_qi_witness(&quotient, &table, &fano, node) {
                Ok(w) => w,
                Err(e) => {
                    invalid_mark(format!("q_i witness search failed: {e}"), &mut invalid);
                    break 'pipeline;
                }
            };
            let cycle = match build_cycle(&quotient, &matrix, &witness) {
                Ok(c) => c,
                Err(e) => {
                    invalid_mark(format!("cycle construction failed: {e}"), &mut invalid);
                    break 'pipeline;
                }
            };
            let lift = match lift_degree(&rs, &par, node) {
                Ok(l) => l,
                Err(e) => {
                    invalid_mark(format!("coroot lift failed: {e}"), &mut invalid);
                    break 'pipeline;
                }
            };
            let pw = match peterson_woodward_check(&quotient, &table, &lift, &witness, b_side.as_ref())
            {
                Ok(p) => p,
                Err(e) => {
                    invalid_mark(format!("Peterson-Woodward check failed: {e}"), &mut invalid);
                    break 'pipeline;
                }
            };
            qi_out.push(QiWitnessOut {
                node: node + 1,
                u_index: witness.u_index,
                u_word: quotient.elem(witness.u_index).word_string(),
                coefficient: witness.coefficient,
                all_candidates: witness.all.clone(),
            });
            cycles_out.push(CycleOut {
                node: node + 1,
                length: cycle.length(),
                vertices: cycle.vertices.clone(),
            });
            lifts_out.push(LiftOut {
                node: node + 1,
                lambda_b: lift.lambda_b.coords.clone(),
                delta_p_prime: lift.delta_p_prime.iter().map(|&j| j + 1).collect(),
                w_p_w_p_prime_word: lift.w_p_w_p_prime.word_string(),
            });
            let (status, p_val, b_val) = match pw {
                PwOutcome::Pass { p_side, b_side } => (PwStatus::Pass, p_side, b_side),
                PwOutcome::Fail { p_side, b_side } => (PwStatus::Fail, p_side, b_side),
                PwOutcome::SkippedOverCap => (PwStatus::SkippedOverCap, 0, 0),
            };
            pw_out.push(PetersonWoodwardOut {
                node: node + 1,
                status,
                p_side: p_val,
                b_side: b_val,
            });
        }
        timings.witnesses_ms = clock.lap();

        spectral_info = Some(SpectralInfo {
            delta0: perron.delta0,
            perron_residual: perron.residual,
            perron_vector_min: perron
                .vector
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min),
            perron_iterations: perron.iterations,
            h_graph,
            mode: match spectrum.mode {
                SpectrumMode::Exact => "exact".into(),
                SpectrumMode::Numeric => "numeric".into(),
            },
            exact_fallback: spectrum.exact_fallback,
            eigenvalues: spectrum
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| EigenOut {
                    re: v.re,
                    im: v.im,
                    multiplicity: v.multiplicity,
                    is_max_modulus: spectrum.max_modulus_indices.contains(&i),
                })
                .collect(),
        });
        conditions = Some(Conditions { cond1, cond2, cond3 });
        witnesses = Some(Witnesses {
            divisibility: DivisibilityOut {
                r: divisibility.r,
                h: divisibility.h,
                r_divides_h: divisibility.r_divides_h,
                h_divides_r: divisibility.h_divides_r,
            },
            qi_witnesses: qi_out,
            cycles: cycles_out,
            block_certificate: BlockFormOut {
                k: certificate.k,
                block_sizes: certificate.block_sizes.clone(),
                verified: certificate.verified,
            },
            lifts: lifts_out,
            peterson_woodward: pw_out,
        });
        spectrum_out = Some(spectrum);
        perron_out = Some(perron);
        block_out = Some(certificate);
    }

    timings.total_ms = clock.total();
    let status = match invalid {
        Some(assertion) => ReportStatus::Invalid { assertion },
        None => ReportStatus::Complete,
    };
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        space,
        status,
        fano: Some(fano_info),
        matrix: Some(matrix_stats),
        spectral: spectral_info,
        conditions,
        witnesses,
        timings,
    };
    Ok(Verification {
        report,
        quotient: Some(quotient),
        matrix: Some(matrix),
        digraph: Some(digraph),
        spectrum: spectrum_out,
        perron: perron_out,
        block_certificate: block_out,
    })
}

/// The full Conjecture O check for one space; see [`verify_space`] for the
/// error contract.
pub fn check_conjecture_o(
    cartan_type: &CartanType,
    i_p: &[usize],
    opts: &VerifyOptions,
) -> Result<Report> {
    Ok(verify_space(cartan_type, i_p, opts)?.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::c1_operator;
    use crate::roots::RootVec;
    use crate::spectral::IntMatrix;

    fn setup(desc: &str, i_p: &[usize]) -> (Arc<RootSystem>, ParabolicData, ParabolicQuotient) {
        let ct: CartanType = desc.parse().unwrap();
        let rs = Arc::new(build_root_system(&ct).unwrap());
        let par = parabolic_data(&rs, i_p).unwrap();
        let q = enumerate_quotient(&rs, &par, 20_000).unwrap();
        (rs, par, q)
    }

    fn check(desc: &str, i_p: &[usize]) -> Report {
        check_conjecture_o(&desc.parse().unwrap(), i_p, &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn projective_line_full_pass() {
        let r = check("A1", &[]);
        assert_eq!(r.status, ReportStatus::Complete);
        assert!(r.passed(), "{}", r.render_text());
        let s = r.spectral.as_ref().unwrap();
        assert!((s.delta0 - 2.0).abs() < 1e-9);
        assert_eq!(s.h_graph, 2);
        assert_eq!(r.fano.as_ref().unwrap().r, 2);
    }

    #[test]
    fn grassmannian_gr24_full_pass() {
        let r = check("A3", &[0, 2]);
        assert!(r.passed(), "{}", r.render_text());
        let s = r.spectral.as_ref().unwrap();
        assert!((s.delta0 - 1024f64.powf(0.25)).abs() < 1e-8);
        assert_eq!(s.h_graph, 4);
        let w = r.witnesses.as_ref().unwrap();
        assert_eq!(w.block_certificate.block_sizes, vec![1, 2, 1, 2]);
        assert_eq!(
            w.qi_witnesses.iter().map(|q| q.coefficient).collect::<Vec<_>>(),
            vec![1]
        );
        assert_eq!(w.cycles[0].length, 4);
    }

    #[test]
    fn b2_full_flag_pass() {
        let r = check("B2", &[]);
        assert!(r.passed(), "{}", r.render_text());
        assert_eq!(r.fano.as_ref().unwrap().r, 2);
        assert_eq!(r.spectral.as_ref().unwrap().h_graph, 2);
    }

    #[test]
    fn divisibility_examples() {
        // Projective 3-space.
        let (_, _, q) = setup("A3", &[1, 2]);
        let fano = fano_data(&q).unwrap();
        let d = verify_divisibility(&fano, 4);
        assert!(d.r_divides_h && d.h_divides_r);

        // Full flag of A3.
        let (_, _, q) = setup("A3", &[]);
        let fano = fano_data(&q).unwrap();
        let d = verify_divisibility(&fano, 2);
        assert_eq!((d.r, d.h), (2, 2));
        assert!(d.r_divides_h && d.h_divides_r);

        // Negative control: a primitive matrix has h = 1, and a fabricated
        // r = 2 fails the r | h direction (h | r still holds).
        let fake = FanoData { n: vec![2], r: 2, dim_x: 1 };
        let d = verify_divisibility(&fake, 1);
        assert!(!d.r_divides_h);
        assert!(d.h_divides_r);
    }

    #[test]
    fn qi_witness_examples() {
        // Projective line: u = s_1 of length 1.
        let (_, _, q) = setup("A1", &[]);
        let table = ChevalleyTable::build(&q).unwrap();
        let fano = fano_data(&q).unwrap();
        let w = find_qi_witness(&q, &table, &fano, 0).unwrap();
        assert_eq!(q.elem(w.u_index).word(), &[0]);
        assert_eq!(w.coefficient, 1);

        // Projective plane: u = s_2 s_1 of length 2.
        let (_, _, q) = setup("A2", &[1]);
        let table = ChevalleyTable::build(&q).unwrap();
        let fano = fano_data(&q).unwrap();
        let w = find_qi_witness(&q, &table, &fano, 0).unwrap();
        assert_eq!(q.elem(w.u_index).word(), &[1, 0]);

        // B2 full flag: a length-one witness for each node.
        let (_, _, q) = setup("B2", &[]);
        let table = ChevalleyTable::build(&q).unwrap();
        let fano = fano_data(&q).unwrap();
        for node in 0..2 {
            let w = find_qi_witness(&q, &table, &fano, node).unwrap();
            assert_eq!(q.length(w.u_index), 1);
            assert_eq!(q.elem(w.u_index).word(), &[node]);
        }
    }

    #[test]
    fn cycle_examples() {
        // Projective line: the 2-cycle through the identity.
        let (_, _, q) = setup("A1", &[]);
        let table = ChevalleyTable::build(&q).unwrap();
        let fano = fano_data(&q).unwrap();
        let m = c1_operator(&q, &fano).unwrap();
        let w = find_qi_witness(&q, &table, &fano, 0).unwrap();
        let c = build_cycle(&q, &m, &w).unwrap();
        assert_eq!(c.vertices, vec![0, 1, 0]);
        assert_eq!(c.length(), 2);

        // Projective plane: length 3 through the identity vertex.
        let (_, _, q) = setup("A2", &[1]);
        let table = ChevalleyTable::build(&q).unwrap();
        let fano = fano_data(&q).unwrap();
        let m = c1_operator(&q, &fano).unwrap();
        let w = find_qi_witness(&q, &table, &fano, 0).unwrap();
        let c = build_cycle(&q, &m, &w).unwrap();
        assert_eq!(c.length(), 3);
        assert_eq!(c.vertices.first(), c.vertices.last());
    }

    #[test]
    fn cycle_length_gcd_is_divisible_by_h() {
        for (desc, i_p) in [("A3", vec![0usize, 2]), ("B3", vec![]), ("G2", vec![1])] {
            let (_, _, q) = setup(desc, &i_p);
            let table = ChevalleyTable::build(&q).unwrap();
            let fano = fano_data(&q).unwrap();
            let m = c1_operator(&q, &fano).unwrap();
            let d = digraph_of(m.matrix()).unwrap();
            let h = imprimitivity_index(&d).unwrap().h.unwrap();
            let mut g = 0u64;
            for &node in q.par().complement() {
                let w = find_qi_witness(&q, &table, &fano, node).unwrap();
                let c = build_cycle(&q, &m, &w).unwrap();
                g = {
                    let (mut a, mut b) = (g, c.length() as u64);
                    while b != 0 {
                        let t = a % b;
                        a = b;
                        b = t;
                    }
                    a
                };
            }
            assert_eq!(g % h, 0, "{desc} {i_p:?}");
        }
    }

    #[test]
    fn lift_examples() {
        // Borel case: no constraints, the lift is the simple coroot itself.
        let (rs, par, _) = setup("A2", &[]);
        let lift = lift_degree(&rs, &par, 0).unwrap();
        assert_eq!(lift.lambda_b.coords, vec![1, 0]);
        assert!(lift.delta_p_prime.is_empty());
        assert!(lift.w_p_w_p_prime.is_identity());

        // Projective spaces: lambda_B = alpha_1^v.
        for n in 2..=4usize {
            let desc = format!("A{n}");
            let i_p: Vec<usize> = (1..n).collect();
            let (rs, par, _) = setup(&desc, &i_p);
            let lift = lift_degree(&rs, &par, 0).unwrap();
            let mut expect = vec![0i64; n];
            expect[0] = 1;
            assert_eq!(lift.lambda_b.coords, expect);
        }

        // B2 with the long node in the parabolic and the short node as the
        // quantum direction: lambda_B = alpha_1^v + alpha_2^v, the smaller
        // parabolic keeps the long node, and w_P w_P' collapses.
        let (rs, par, _) = setup("B2", &[0]);
        let lift = lift_degree(&rs, &par, 1).unwrap();
        assert_eq!(lift.lambda_b.coords, vec![1, 1]);
        assert_eq!(lift.delta_p_prime, vec![0]);
        assert!(lift.w_p_w_p_prime.is_identity());
        // The lift is the coroot of s_2(alpha_1) = alpha_1 + 2 alpha_2.
        let gamma = RootVec::new(vec![1, 2]);
        assert_eq!(rs.coroot_of(&gamma).unwrap().coords, lift.lambda_b.coords);
    }

    #[test]
    fn peterson_woodward_examples() {
        // Projective line: the parabolic side is the full flag already.
        let r = check("A1", &[]);
        let pw = &r.witnesses.as_ref().unwrap().peterson_woodward;
        assert!(matches!(pw[0].status, PwStatus::Pass));
        assert_eq!((pw[0].p_side, pw[0].b_side), (1, 1));

        // Projective plane: compared against the 6-element full flag.
        let r = check("A2", &[1]);
        let pw = &r.witnesses.as_ref().unwrap().peterson_woodward;
        assert!(matches!(pw[0].status, PwStatus::Pass));
        assert_eq!((pw[0].p_side, pw[0].b_side), (1, 1));

        // B2 with the long node parabolic.
        let r = check("B2", &[0]);
        let pw = &r.witnesses.as_ref().unwrap().peterson_woodward;
        assert!(matches!(pw[0].status, PwStatus::Pass));
        assert_eq!((pw[0].p_side, pw[0].b_side), (1, 1));
    }

    #[test]
    fn pw_skipped_when_b_side_over_cap() {
        let opts = VerifyOptions { quotient_cap: 10, ..VerifyOptions::default() };
        // Quotient of size 6 fits the cap of 10, the 24-element flag does not.
        let v = verify_space(&"A3".parse().unwrap(), &[0, 2], &opts).unwrap();
        let w = v.report.witnesses.as_ref().unwrap();
        assert!(w
            .peterson_woodward
            .iter()
            .all(|p| p.status == PwStatus::SkippedOverCap));
        // A skipped comparison does not fail the verdict.
        assert!(v.report.passed(), "{}", v.report.render_text());
    }

    #[test]
    fn cap_exceeded_yields_partial_report() {
        let opts = VerifyOptions { quotient_cap: 3, ..VerifyOptions::default() };
        let v = verify_space(&"A3".parse().unwrap(), &[0, 2], &opts).unwrap();
        assert!(matches!(v.report.status, ReportStatus::CapExceeded { cap: 3, .. }));
        assert!(!v.report.passed());
        assert!(v.quotient.is_none());
    }

    #[test]
    fn full_group_parabolic_rejected() {
        let err = check_conjecture_o(
            &"A2".parse().unwrap(),
            &[0, 1],
            &VerifyOptions::default(),
        );
        assert!(matches!(err, Err(Error::ParabolicIsFullGroup)));
    }

    #[test]
    fn reducible_control_matrix_rejected_by_perron() {
        let m = IntMatrix::from_rows_i64(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(matches!(
            perron_root(&m, &SpectralOptions::default()),
            Err(Error::NotIrreducible)
        ));
    }

    #[test]
    fn perron_vector_strictly_positive_on_instances() {
        for (desc, i_p) in [("A2", vec![]), ("A3", vec![0usize, 2]), ("G2", vec![])] {
            let v = verify_space(&desc.parse().unwrap(), &i_p, &VerifyOptions::default())
                .unwrap();
            let p = v.perron.unwrap();
            assert!(p.vector.iter().all(|&x| x > 1e-12), "{desc}");
        }
    }

    #[test]
    fn semisimple_product_space_passes() {
        let r = check("A2xA1", &[]);
        assert!(r.passed(), "{}", r.render_text());
        assert_eq!(r.fano.as_ref().unwrap().r, 2);
    }

    #[test]
    fn fano_index_one_space_passes() {
        // A3 with I_P = {3}: Chern numbers (2, 3), so r = 1 and the operator
        // is primitive.
        let r = check("A3", &[2]);
        assert!(r.passed(), "{}", r.render_text());
        assert_eq!(r.fano.as_ref().unwrap().r, 1);
        assert_eq!(r.spectral.as_ref().unwrap().h_graph, 1);
    }

    #[test]
    fn report_roundtrip_and_canonical_form() {
        let r = check("A2", &[1]);
        let json = r.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.canonical().timings, Timings::default());
        // Canonical forms of two runs agree even if timings differ.
        let r2 = check("A2", &[1]);
        assert_eq!(r.canonical_json(), r2.canonical_json());
    }
}
