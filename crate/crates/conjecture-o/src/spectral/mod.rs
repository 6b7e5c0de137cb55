//! Perron-Frobenius analysis of nonnegative integer matrices: digraph
//! encoding, irreducibility via strong connectivity, imprimitivity index,
//! superdiagonal block-form certificates, the Perron root with its positive
//! eigenvector, and full spectra in numeric and exact modes.
//!
//! Adjacency convention: vertex `v_i` has an arc to `v_j` iff the matrix
//! entry `(j, i)` is nonzero, so column `i` lists the out-neighbours of
//! `v_i`. For an operator matrix whose column `u` expands the image of the
//! `u`-th basis vector this makes an arc `u -> v` mean "`v` occurs in the
//! image of `u`".

pub mod aberth;
pub mod charpoly;

use std::io::Write;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn from_bigints(n: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Ok(IntMatrix { n, data })
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            data.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Ok(IntMatrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, v: &BigInt) {
        self.data[i * self.n + j] += v;
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }

    pub fn first_negative_entry(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| v.is_negative())
            .map(|k| (k / self.n, k % self.n))
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn max_entry(&self) -> BigInt {
        self.data.iter().max().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mat_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies the same permutation to rows and columns:
    /// `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<IntMatrix> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.get(perm[i], perm[j]).clone();
            }
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            self.get(i, j).to_f64().expect("entry representable in f64")
        })
    }

    /// Integer CSV, one row per line.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Directed graph on `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
}

/// Encodes the zero pattern of a nonnegative matrix: arc `i -> j` iff
/// `m[j][i] != 0`.
pub fn digraph_of(m: &IntMatrix) -> Result<Digraph> {
    if let Some((i, j)) = m.first_negative_entry() {
        return Err(Error::NegativeEntry(i, j));
    }
    let n = m.size();
    let mut out = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if !m.get(j, i).is_zero() {
                out[i].push(j);
            }
        }
    }
    Ok(Digraph { n, out })
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Digraph> {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::DimensionMismatch { expected: n, got: u.max(v) + 1 });
            }
            out[u].push(v);
        }
        for list in &mut out {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Digraph { n, out })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn num_arcs(&self) -> usize {
        self.out.iter().map(|l| l.len()).sum()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Strongly connected components by iterative Tarjan, returned as a
    /// component id per vertex plus the component count.
    pub fn scc(&self) -> (Vec<usize>, usize) {
        const UNSET: usize = usize::MAX;
        let n = self.n;
        let mut index = vec![UNSET; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut comp = vec![UNSET; n];
        let mut next_index = 0usize;
        let mut comp_count = 0usize;
        // Explicit DFS frames: (vertex, next out-neighbour position).
        let mut frames: Vec<(usize, usize)> = Vec::new();

        for start in 0..n {
            if index[start] != UNSET {
                continue;
            }
            frames.push((start, 0));
            index[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;

            while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
                if *pos < self.out[v].len() {
                    let w = self.out[v][*pos];
                    *pos += 1;
                    if index[w] == UNSET {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    frames.pop();
                    if let Some(&mut (parent, _)) = frames.last_mut() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp[w] = comp_count;
                            if w == v {
                                break;
                            }
                        }
                        comp_count += 1;
                    }
                }
            }
        }
        (comp, comp_count)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n <= 1 || self.scc().1 == 1
    }

    /// DOT rendering; `labels`, when given, must have one entry per vertex.
    pub fn write_dot(&self, w: &mut impl Write, labels: Option<&[String]>) -> std::io::Result<()> {
        writeln!(w, "digraph {{")?;
        for v in 0..self.n {
            match labels {
                Some(ls) => writeln!(w, "  v{} [label=\"{}\"];", v, ls[v])?,
                None => writeln!(w, "  v{};", v)?,
            }
        }
        for u in 0..self.n {
            for &v in &self.out[u] {
                writeln!(w, "  v{u} -> v{v};")?;
            }
        }
        writeln!(w, "}}")
    }
}

/// A matrix is irreducible iff its digraph is strongly connected. The 1x1
/// zero matrix counts as irreducible (single vertex).
pub fn is_irreducible(m: &IntMatrix) -> Result<bool> {
    Ok(digraph_of(m)?.is_strongly_connected())
}

/// Imprimitivity data for a strongly connected digraph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImprimitivityResult {
    pub strongly_connected: bool,
    /// The gcd of all cycle lengths; `None` only for a single vertex with
    /// no arcs, where no cycle exists.
    pub h: Option<u64>,
    /// BFS levels used in the gcd computation.
    pub levels: Vec<usize>,
}

/// Computes the index of imprimitivity: BFS levels from vertex 0, then the
/// gcd over all arcs `u -> v` of `level(u) + 1 - level(v)`. This equals the
/// gcd of the lengths of all cycles.
pub fn imprimitivity_index(d: &Digraph) -> Result<ImprimitivityResult> {
    if !d.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let n = d.num_vertices();
    let mut levels = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    levels[0] = 0;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        for &v in d.out_neighbours(u) {
            if levels[v] == usize::MAX {
                levels[v] = levels[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for u in 0..n {
        for &v in d.out_neighbours(u) {
            let defect = (levels[u] as i64 + 1 - levels[v] as i64).unsigned_abs();
            g = gcd_u64(g, defect);
        }
    }
    Ok(ImprimitivityResult {
        strongly_connected: true,
        h: if g == 0 { None } else { Some(g) },
        levels,
    })
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Why a block-form certificate failed to verify.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockFormFailure {
    /// A nonzero entry sits outside the superdiagonal blocks
    /// (coordinates in the permuted matrix).
    EntryOutsideBlocks { row: usize, col: usize },
    /// A designated block is empty or all zero.
    EmptyOrZeroBlock { index: usize },
}

/// Certificate that a matrix is cogredient to superdiagonal
/// `(m_1, ..., m_k)`-block form via an explicit basis permutation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockFormCertificate {
    pub k: usize,
    /// `permutation[new] = old` basis reordering.
    pub permutation: Vec<usize>,
    pub block_sizes: Vec<usize>,
    pub verified: bool,
    pub failure: Option<BlockFormFailure>,
}

/// Builds and checks the superdiagonal block form for the residue classes
/// `class_of` (values in `0..k`). Classes are ordered descending, so class
/// `k-1` forms the first block. Failure is a data outcome, not an error.
pub fn block_form_certificate(
    m: &IntMatrix,
    k: usize,
    class_of: &[usize],
) -> Result<BlockFormCertificate> {
    let n = m.size();
    if k == 0 {
        return Err(Error::BadResidueClasses("k must be positive".into()));
    }
    if class_of.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: class_of.len() });
    }
    if let Some(&bad) = class_of.iter().find(|&&c| c >= k) {
        return Err(Error::BadResidueClasses(format!("residue {bad} out of range 0..{k}")));
    }

    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.sort_by_key(|&i| (k - 1 - class_of[i], i));
    let block_sizes: Vec<usize> =
        (0..k).map(|b| class_of.iter().filter(|&&c| c == k - 1 - b).count()).collect();

    if k == 1 {
        return Ok(BlockFormCertificate {
            k,
            permutation,
            block_sizes,
            verified: true,
            failure: None,
        });
    }

    let block_of = |pos: usize| -> usize {
        let mut acc = 0;
        for (b, &sz) in block_sizes.iter().enumerate() {
            acc += sz;
            if pos < acc {
                return b;
            }
        }
        unreachable!()
    };

    let permuted = m.permute_symmetric(&permutation)?;
    let mut nonzero_in_block = vec![false; k];
    for i in 0..n {
        let bi = block_of(i);
        for j in 0..n {
            if permuted.get(i, j).is_zero() {
                continue;
            }
            let bj = block_of(j);
            let allowed = bj == bi + 1 || (bi == k - 1 && bj == 0);
            if !allowed {
                return Ok(BlockFormCertificate {
                    k,
                    permutation,
                    block_sizes,
                    verified: false,
                    failure: Some(BlockFormFailure::EntryOutsideBlocks { row: i, col: j }),
                });
            }
            nonzero_in_block[bi] = true;
        }
    }
    if let Some(idx) = nonzero_in_block.iter().position(|&b| !b) {
        return Ok(BlockFormCertificate {
            k,
            permutation,
            block_sizes,
            verified: false,
            failure: Some(BlockFormFailure::EmptyOrZeroBlock { index: idx }),
        });
    }
    Ok(BlockFormCertificate { k, permutation, block_sizes, verified: true, failure: None })
}

/// Tolerances and caps for the spectral routines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Relative radius for clustering eigenvalues: absolute radius is
    /// `cluster_tol_rel * max(1, delta0)`.
    pub cluster_tol_rel: f64,
    /// Convergence tolerance for the power iteration.
    pub power_tol: f64,
    pub power_max_iters: usize,
    /// Maximal size for exact-mode spectra; larger matrices fall back to
    /// numeric mode with a warning flag.
    pub exact_cap: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            cluster_tol_rel: 1e-8,
            power_tol: 1e-12,
            power_max_iters: 200_000,
            exact_cap: 400,
        }
    }
}

/// Perron data of an irreducible nonnegative matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerronRoot {
    pub delta0: f64,
    /// Strictly positive unit eigenvector.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Width of the final Collatz-Wielandt enclosure.
    pub residual: f64,
}

/// Power iteration on `M + I`, which is primitive whenever `M` is
/// irreducible, with Collatz-Wielandt bounds as the convergence test.
pub fn perron_root(m: &IntMatrix, opts: &SpectralOptions) -> Result<PerronRoot> {
    if !is_irreducible(m)? {
        return Err(Error::NotIrreducible);
    }
    let n = m.size();
    let a = m.to_f64();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut last_enclosure = f64::INFINITY;
    for it in 1..=opts.power_max_iters {
        // y = (M + I) x
        let mut y = x.clone();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * x[j];
            }
            y[i] += acc;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let ratio = y[i] / x[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        last_enclosure = hi - lo;
        if last_enclosure <= opts.power_tol * hi.max(1.0) {
            let delta0 = (hi + lo) / 2.0 - 1.0;
            if x.iter().any(|&v| v <= 0.0) {
                return Err(Error::InternalInvariant(
                    "Perron eigenvector is not strictly positive".into(),
                ));
            }
            return Ok(PerronRoot { delta0, vector: x, iterations: it, residual: last_enclosure });
        }
    }
    Err(Error::PowerIterationDiverged {
        residual: last_enclosure,
        iterations: opts.power_max_iters,
    })
}

/// Which eigenvalue pipeline produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMode {
    Numeric,
    Exact,
}

/// One eigenvalue with its multiplicity. Numeric mode reports each value
/// with multiplicity one; exact mode carries certified multiplicities from
/// the square-free decomposition of the characteristic polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralValue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl SpectralValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Full eigenvalue multiset of a real matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<SpectralValue>,
    /// Largest modulus over the multiset.
    pub delta0: f64,
    /// Indices into `values` within the cluster radius of `delta0` in
    /// modulus.
    pub max_modulus_indices: Vec<usize>,
    pub mode: SpectrumMode,
    /// Set when exact mode was requested but the size cap forced numeric.
    pub exact_fallback: bool,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.values.iter().map(|v| v.multiplicity).sum()
    }

    fn finish(mut values: Vec<SpectralValue>, mode: SpectrumMode, fallback: bool, tol_rel: f64) -> Spectrum {
        values.sort_by(|a, b| {
            let ma = a.value().norm();
            let mb = b.value().norm();
            mb.partial_cmp(&ma)
                .unwrap()
                .then(a.re.partial_cmp(&b.re).unwrap().reverse())
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        let delta0 = values.first().map(|v| v.value().norm()).unwrap_or(0.0);
        let tol = tol_rel * delta0.max(1.0);
        let max_modulus_indices = values
            .iter()
            .enumerate()
            .filter(|(_, v)| (v.value().norm() - delta0).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        Spectrum { values, delta0, max_modulus_indices, mode, exact_fallback: fallback }
    }

    /// CSV export: `re,im,multiplicity,is_max_modulus`.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "re,im,multiplicity,is_max_modulus")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{},{}",
                v.re,
                v.im,
                v.multiplicity,
                self.max_modulus_indices.contains(&i)
            )?;
        }
        Ok(())
    }
}

/// Parlett-Reinsch style balancing: diagonal similarity by powers of two.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let mut done = false;
    let mut rounds = 0;
    while !done && rounds < 100 {
        done = true;
        rounds += 1;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if c + r < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn numeric_eigenvalues(m: &IntMatrix) -> Result<Vec<Complex64>> {
    let n = m.size();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut a = m.to_f64();
    balance(&mut a);
    let schur = nalgebra::linalg::Schur::try_new(a, f64::EPSILON, 0)
        .ok_or(Error::NumericEigFailed)?;
    let eig = schur.complex_eigenvalues();
    Ok(eig.iter().map(|c| Complex64::new(c.re, c.im)).collect())
}

/// Computes the full eigenvalue multiset. Numeric mode runs balanced
/// Hessenberg reduction plus shifted QR in double precision; exact mode
/// computes the integer characteristic polynomial, extracts certified
/// multiplicities by square-free decomposition, and refines roots with a
/// simultaneous Aberth iteration.
pub fn full_spectrum(m: &IntMatrix, mode: SpectrumMode, opts: &SpectralOptions) -> Result<Spectrum> {
    match mode {
        SpectrumMode::Numeric => {
            let values = numeric_eigenvalues(m)?
                .into_iter()
                .map(|z| SpectralValue { re: z.re, im: z.im, multiplicity: 1 })
                .collect();
            Ok(Spectrum::finish(values, SpectrumMode::Numeric, false, opts.cluster_tol_rel))
        }
        SpectrumMode::Exact => {
            if m.size() > opts.exact_cap {
                let values = numeric_eigenvalues(m)?
                    .into_iter()
                    .map(|z| SpectralValue { re: z.re, im: z.im, multiplicity: 1 })
                    .collect();
                return Ok(Spectrum::finish(
                    values,
                    SpectrumMode::Numeric,
                    true,
                    opts.cluster_tol_rel,
                ));
            }
            let poly = charpoly::charpoly(m);
            let factors = charpoly::square_free_decomposition(&poly)?;
            let mut values = Vec::new();
            let mut total = 0usize;
            for (factor, mult) in &factors {
                let roots = aberth::roots_of_monic(factor);
                total += mult * roots.len();
                values.extend(roots.into_iter().map(|z| SpectralValue {
                    re: z.re,
                    im: z.im,
                    multiplicity: *mult,
                }));
            }
            if total != m.size() {
                return Err(Error::InternalInvariant(format!(
                    "exact spectrum found {total} roots for size {}",
                    m.size()
                )));
            }
            Ok(Spectrum::finish(values, SpectrumMode::Exact, false, opts.cluster_tol_rel))
        }
    }
}

/// Outcome of checking that the maximal-modulus eigenvalues are exactly the
/// `h`-th roots of unity times `delta0` and that the whole multiset is
/// invariant under rotation by `2 pi / h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxModulusReport {
    pub h: u64,
    pub delta0: f64,
    /// Total multiplicity found within the cluster radius of `delta0`.
    pub count: usize,
    pub count_ok: bool,
    pub all_simple: bool,
    /// Each `delta0 e^{2 pi i k / h}` matched by exactly one eigenvalue.
    pub roots_of_unity_ok: bool,
    pub rotation_invariant: bool,
    /// Largest matching residual encountered across all checks.
    pub max_residual: f64,
}

impl MaxModulusReport {
    pub fn pass(&self) -> bool {
        self.count_ok && self.all_simple && self.roots_of_unity_ok && self.rotation_invariant
    }
}

/// Runs the three max-modulus checks against a known imprimitivity index.
pub fn max_modulus_analysis(s: &Spectrum, h: u64, tol_rel: f64) -> MaxModulusReport {
    let delta0 = s.delta0;
    let tol = tol_rel * delta0.max(1.0);
    let mut max_residual = 0.0f64;

    let top: Vec<&SpectralValue> =
        s.max_modulus_indices.iter().map(|&i| &s.values[i]).collect();
    let count: usize = top.iter().map(|v| v.multiplicity).sum();
    let count_ok = count == h as usize;
    let all_simple = top.iter().all(|v| v.multiplicity == 1);

    // Match the h targets delta0 * e^{2 pi i k / h} one-to-one.
    let mut used = vec![false; top.len()];
    let mut roots_of_unity_ok = count_ok;
    for k in 0..h {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / (h as f64);
        let target = Complex64::from_polar(delta0, angle);
        let mut best: Option<(usize, f64)> = None;
        for (idx, v) in top.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let d = (v.value() - target).norm();
            if best.map(|(_, bd)| d < bd).unwrap_or(true) {
                best = Some((idx, d));
            }
        }
        match best {
            Some((idx, d)) if d <= tol => {
                used[idx] = true;
                max_residual = max_residual.max(d);
            }
            _ => {
                roots_of_unity_ok = false;
            }
        }
    }

    // Rotation invariance of the full multiset.
    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (h as f64));
    let mut remaining: Vec<(Complex64, usize)> =
        s.values.iter().map(|v| (v.value(), v.multiplicity)).collect();
    let mut rotation_invariant = true;
    'outer: for v in &s.values {
        let rotated = v.value() * zeta;
        let mut need = v.multiplicity;
        // Consume matching multiplicity from the remaining pool.
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by(|&a, &b| {
            (remaining[a].0 - rotated)
                .norm()
                .partial_cmp(&(remaining[b].0 - rotated).norm())
                .unwrap()
        });
        for idx in order {
            if need == 0 {
                break;
            }
            let (z, ref mut avail) = remaining[idx];
            let d = (z - rotated).norm();
            if d > tol {
                break;
            }
            let take = need.min(*avail);
            if take > 0 {
                *avail -= take;
                need -= take;
                max_residual = max_residual.max(d);
            }
        }
        if need > 0 {
            rotation_invariant = false;
            break 'outer;
        }
    }

    MaxModulusReport {
        h,
        delta0,
        count,
        count_ok,
        all_simple,
        roots_of_unity_ok,
        rotation_invariant,
        max_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows).unwrap()
    }

    #[test]
    fn digraph_examples() {
        let zero = m(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(digraph_of(&zero).unwrap().num_arcs(), 0);

        let id = m(&[vec![1, 0], vec![0, 1]]);
        let d = digraph_of(&id).unwrap();
        assert_eq!(d.num_arcs(), 2);
        assert!(d.has_arc(0, 0) && d.has_arc(1, 1));

        // Two-cycle for the projective-line operator.
        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let d = digraph_of(&p1).unwrap();
        assert!(d.has_arc(0, 1) && d.has_arc(1, 0));
        assert_eq!(d.num_arcs(), 2);
    }

    #[test]
    fn digraph_rejects_negative_entries() {
        let bad = m(&[vec![0, -1], vec![1, 0]]);
        assert!(matches!(digraph_of(&bad), Err(Error::NegativeEntry(0, 1))));
    }

    #[test]
    fn column_convention() {
        // Entry (j, i) nonzero means arc i -> j.
        let a = m(&[vec![0, 0], vec![5, 0]]);
        let d = digraph_of(&a).unwrap();
        assert!(d.has_arc(0, 1));
        assert!(!d.has_arc(1, 0));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&m(&[vec![0, 1], vec![1, 0]])).unwrap());
        assert!(!is_irreducible(&m(&[vec![1, 1], vec![0, 1]])).unwrap());
        assert!(is_irreducible(&m(&[vec![0]])).unwrap());
    }

    #[test]
    fn imprimitivity_examples() {
        // Directed k-cycle has h = k.
        for k in 2..=6usize {
            let arcs: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
            let d = Digraph::from_arcs(k, &arcs).unwrap();
            assert_eq!(imprimitivity_index(&d).unwrap().h, Some(k as u64));
        }
        // A self-loop forces h = 1.
        let fib = m(&[vec![1, 1], vec![1, 0]]);
        let d = digraph_of(&fib).unwrap();
        assert_eq!(imprimitivity_index(&d).unwrap().h, Some(1));
        // Not strongly connected is rejected.
        let bad = digraph_of(&m(&[vec![1, 1], vec![0, 1]])).unwrap();
        assert!(matches!(imprimitivity_index(&bad), Err(Error::NotStronglyConnected)));
        // Single vertex without arcs: no cycles at all.
        let lonely = Digraph::from_arcs(1, &[]).unwrap();
        assert_eq!(imprimitivity_index(&lonely).unwrap().h, None);
    }

    #[test]
    fn block_form_examples() {
        let p2 = m(&[vec![0, 0, 3], vec![3, 0, 0], vec![0, 3, 0]]);
        let cert = block_form_certificate(&p2, 3, &[0, 1, 2]).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.block_sizes, vec![1, 1, 1]);

        let trivial = block_form_certificate(&p2, 1, &[0, 0, 0]).unwrap();
        assert!(trivial.verified);
        assert_eq!(trivial.block_sizes, vec![3]);

        // A self-loop breaks any k >= 2 certificate.
        let fib = m(&[vec![1, 1], vec![1, 0]]);
        let cert = block_form_certificate(&fib, 2, &[0, 1]).unwrap();
        assert!(!cert.verified);
        assert!(matches!(cert.failure, Some(BlockFormFailure::EntryOutsideBlocks { .. })));
    }

    #[test]
    fn perron_examples() {
        let opts = SpectralOptions::default();
        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let pr = perron_root(&p1, &opts).unwrap();
        assert!((pr.delta0 - 2.0).abs() < 1e-9);
        assert!((pr.vector[0] - pr.vector[1]).abs() < 1e-6);

        let p2 = m(&[vec![0, 0, 3], vec![3, 0, 0], vec![0, 3, 0]]);
        let pr = perron_root(&p2, &opts).unwrap();
        assert!((pr.delta0 - 3.0).abs() < 1e-9);

        let reducible = m(&[vec![1, 1], vec![0, 1]]);
        assert!(matches!(perron_root(&reducible, &opts), Err(Error::NotIrreducible)));
    }

    #[test]
    fn spectrum_examples() {
        let opts = SpectralOptions::default();
        let d = m(&[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        for mode in [SpectrumMode::Numeric, SpectrumMode::Exact] {
            let s = full_spectrum(&d, mode, &opts).unwrap();
            let mut res: Vec<f64> = s.values.iter().map(|v| v.re).collect();
            res.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((res[0] - 1.0).abs() < 1e-9);
            assert!((res[1] - 2.0).abs() < 1e-9);
            assert!((res[2] - 3.0).abs() < 1e-9);
            assert_eq!(s.total_multiplicity(), 3);
        }

        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let s = full_spectrum(&p1, SpectrumMode::Exact, &opts).unwrap();
        assert_eq!(s.total_multiplicity(), 2);
        assert!((s.delta0 - 2.0).abs() < 1e-10);
        let mut res: Vec<f64> = s.values.iter().map(|v| v.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((res[0] + 2.0).abs() < 1e-10 && (res[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn exact_cap_falls_back_to_numeric() {
        let opts = SpectralOptions { exact_cap: 1, ..SpectralOptions::default() };
        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let s = full_spectrum(&p1, SpectrumMode::Exact, &opts).unwrap();
        assert_eq!(s.mode, SpectrumMode::Numeric);
        assert!(s.exact_fallback);
    }

    #[test]
    fn max_modulus_analysis_examples() {
        let opts = SpectralOptions::default();
        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let s = full_spectrum(&p1, SpectrumMode::Exact, &opts).unwrap();
        let rep = max_modulus_analysis(&s, 2, opts.cluster_tol_rel);
        assert!(rep.pass(), "{rep:?}");
        assert!(!max_modulus_analysis(&s, 3, opts.cluster_tol_rel).pass());

        let p2 = m(&[vec![0, 0, 3], vec![3, 0, 0], vec![0, 3, 0]]);
        let s = full_spectrum(&p2, SpectrumMode::Exact, &opts).unwrap();
        assert!(max_modulus_analysis(&s, 3, opts.cluster_tol_rel).pass());
    }

    #[test]
    fn permutation_equivariance() {
        // Irreducibility and imprimitivity are invariant under simultaneous
        // row/column permutations.
        let a = m(&[
            vec![0, 0, 3, 0],
            vec![3, 0, 0, 0],
            vec![0, 3, 0, 1],
            vec![0, 0, 1, 0],
        ]);
        let perms: Vec<Vec<usize>> = vec![
            vec![1, 0, 2, 3],
            vec![3, 2, 1, 0],
            vec![2, 0, 3, 1],
        ];
        let base_irr = is_irreducible(&a).unwrap();
        let base_h = imprimitivity_index(&digraph_of(&a).unwrap()).unwrap().h;
        for p in perms {
            let b = a.permute_symmetric(&p).unwrap();
            assert_eq!(is_irreducible(&b).unwrap(), base_irr);
            if base_irr {
                assert_eq!(imprimitivity_index(&digraph_of(&b).unwrap()).unwrap().h, base_h);
            }
        }
    }

    #[test]
    fn perron_dominates_spectrum() {
        let opts = SpectralOptions::default();
        let a = m(&[vec![1, 2, 0], vec![0, 1, 3], vec![2, 0, 1]]);
        let pr = perron_root(&a, &opts).unwrap();
        let s = full_spectrum(&a, SpectrumMode::Exact, &opts).unwrap();
        for v in &s.values {
            assert!(v.value().norm() <= pr.delta0 + 1e-8);
        }
    }

    #[test]
    fn trace_checks() {
        let opts = SpectralOptions::default();
        let a = m(&[vec![2, 1, 0], vec![1, 0, 3], vec![4, 1, 1]]);
        let s = full_spectrum(&a, SpectrumMode::Exact, &opts).unwrap();
        let sum: Complex64 = s
            .values
            .iter()
            .map(|v| v.value() * (v.multiplicity as f64))
            .sum();
        let tr = a.trace().to_f64().unwrap();
        assert!((sum.re - tr).abs() < 1e-8 && sum.im.abs() < 1e-8);
        let sum2: Complex64 = s
            .values
            .iter()
            .map(|v| v.value() * v.value() * (v.multiplicity as f64))
            .sum();
        let tr2 = a.mat_mul(&a).unwrap().trace().to_f64().unwrap();
        assert!((sum2.re - tr2).abs() < 1e-7 && sum2.im.abs() < 1e-7);
    }

    #[test]
    fn dot_export_shape() {
        let p1 = m(&[vec![0, 2], vec![2, 0]]);
        let d = digraph_of(&p1).unwrap();
        let mut buf = Vec::new();
        d.write_dot(&mut buf, Some(&["id".into(), "s1".into()])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("digraph {"));
        assert!(text.contains("v0 [label=\"id\"];"));
        assert!(text.contains("v0 -> v1;"));
    }
}
