//! Degrees, Chern numbers, quantum Chevalley products, and the operator
//! matrix of quantum multiplication by the first Chern class at `q = 1`.
//!
//! All coefficients come from the quantum Chevalley formula: for a divisor
//! class `sigma_{s_i}` and `u in W^P`, classical terms run over roots
//! `alpha in R^+ \ R_P^+` with `u s_alpha in W^P` one step longer, and
//! quantum terms over roots whose coset drops by `n_alpha - 1` in length,
//! each weighted by the `i`-th coroot coordinate of `alpha`. The matrix is
//! assembled column by column: column `u` expands the image of `sigma_u`.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{ParabolicData, RootSystem, RootVec};
use crate::spectral::IntMatrix;
use crate::weyl::ParabolicQuotient;

/// Effective curve class: nonnegative coordinates indexed by the ordered
/// complement `I^P`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Degree {
    coords: Vec<i64>,
}

impl Degree {
    pub fn zero(len: usize) -> Degree {
        Degree { coords: vec![0; len] }
    }

    pub fn unit(pos: usize, len: usize) -> Degree {
        let mut coords = vec![0; len];
        coords[pos] = 1;
        Degree { coords }
    }

    pub fn new(coords: Vec<i64>) -> Degree {
        Degree { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// A zero degree marks a classical term.
    pub fn is_classical(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Pairing with the first Chern class: `sum_i n_i d_i`.
    pub fn chern_pairing(&self, n: &[i64]) -> i64 {
        self.coords.iter().zip(n).map(|(d, n)| d * n).sum()
    }
}

/// The degree `d(alpha)`: coroot coordinates of `alpha` restricted to the
/// complement `I^P`.
pub fn degree_of_root(rs: &RootSystem, par: &ParabolicData, alpha: &RootVec) -> Result<Degree> {
    let cv = rs.coroot_of(alpha)?;
    Ok(Degree::new(par.complement().iter().map(|&i| cv.coords[i]).collect()))
}

/// The Chern number `n_alpha = <2 rho_P, alpha^v>`, defined for
/// `alpha in R^+ \ R_P^+` (quantum directions only).
pub fn n_alpha(rs: &RootSystem, par: &ParabolicData, alpha: &RootVec) -> Result<i64> {
    let (sign, idx) = rs
        .root_lookup(alpha)
        .ok_or_else(|| Error::NotARoot(alpha.coords.clone()))?;
    if sign < 0 {
        return Err(Error::NotAPositiveRoot(alpha.coords.clone()));
    }
    if par.root_in_subsystem(idx) {
        return Err(Error::RootInParabolicSubsystem(alpha.coords.clone()));
    }
    rs.pairing_weight(par.two_rho_p(), &rs.coroots()[idx])
}

/// Chern numbers `n_i`, the Fano index `r = gcd(n_i)`, and the dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoData {
    /// Aligned with the ordered complement `I^P`.
    pub n: Vec<i64>,
    pub r: i64,
    pub dim_x: usize,
}

impl FanoData {
    pub fn n_of_position(&self, pos: usize) -> i64 {
        self.n[pos]
    }
}

/// Computes the Fano data of the space behind a quotient. A parabolic equal
/// to the full group (empty complement) leaves a point and is rejected.
pub fn fano_data(q: &ParabolicQuotient) -> Result<FanoData> {
    let par = q.par();
    let rs = q.rs();
    if par.complement().is_empty() {
        return Err(Error::ParabolicIsFullGroup);
    }
    let dim_x = q.dim_x();
    let mut n = Vec::with_capacity(par.complement().len());
    for &i in par.complement() {
        let ni = rs.pairing_weight(par.two_rho_p(), &rs.simple_coroot(i))?;
        if ni < 2 || ni > dim_x as i64 + 1 {
            return Err(Error::InternalInvariant(format!(
                "Chern number n_{i} = {ni} outside [2, dim+1] = [2, {}]",
                dim_x + 1
            )));
        }
        n.push(ni);
    }
    let r = n.iter().fold(0i64, |acc, &v| gcd(acc, v));
    Ok(FanoData { n, r, dim_x })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One term of a quantum Chevalley product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChevalleyTerm {
    /// Always a positive integer.
    pub coefficient: i64,
    pub degree: Degree,
    /// Index of the target basis element in the quotient order.
    pub target: usize,
}

/// The expansion of `sigma_{s_i} * sigma_u` in the Schubert basis, with
/// terms aggregated by `(degree, target)` and listed in that order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChevalleyProduct {
    /// Node index `i` in `I^P`.
    pub divisor_node: usize,
    /// Basis index of `u`.
    pub source: usize,
    pub terms: Vec<ChevalleyTerm>,
}

impl ChevalleyProduct {
    /// Coefficient of the term with the given degree and target, zero when
    /// absent.
    pub fn coefficient_of(&self, degree: &Degree, target: usize) -> i64 {
        self.terms
            .iter()
            .find(|t| &t.degree == degree && t.target == target)
            .map(|t| t.coefficient)
            .unwrap_or(0)
    }

    pub fn classical_terms(&self) -> impl Iterator<Item = &ChevalleyTerm> {
        self.terms.iter().filter(|t| t.degree.is_classical())
    }

    pub fn quantum_terms(&self) -> impl Iterator<Item = &ChevalleyTerm> {
        self.terms.iter().filter(|t| !t.degree.is_classical())
    }
}

/// Per-root data shared by every product computation on a fixed quotient.
struct QuantumRoot {
    root_idx: usize,
    n_alpha: i64,
    degree: Vec<i64>,
}

fn quantum_roots(q: &ParabolicQuotient) -> Result<Vec<QuantumRoot>> {
    let rs = q.rs();
    let par = q.par();
    let mut out = Vec::new();
    for idx in 0..rs.num_positive_roots() {
        if par.root_in_subsystem(idx) {
            continue;
        }
        let cv = &rs.coroots()[idx];
        let na = rs.pairing_weight(par.two_rho_p(), cv)?;
        if na < 2 {
            return Err(Error::InternalInvariant(format!(
                "n_alpha = {na} < 2 for a quantum-side root"
            )));
        }
        let degree: Vec<i64> = par.complement().iter().map(|&i| cv.coords[i]).collect();
        out.push(QuantumRoot { root_idx: idx, n_alpha: na, degree });
    }
    Ok(out)
}

/// Accumulated terms for every `i in I^P` against a fixed source `u`.
fn accumulate_column(
    q: &ParabolicQuotient,
    roots: &[QuantumRoot],
    u: usize,
) -> Result<Vec<BTreeMap<(Degree, usize), i64>>> {
    let par = q.par();
    let comp_len = par.complement().len();
    let l_u = q.length(u) as i64;
    let mut acc: Vec<BTreeMap<(Degree, usize), i64>> = vec![BTreeMap::new(); comp_len];
    let u_perm = q.elem(u).perm();

    for rd in roots {
        let s_alpha = q.reflection(rd.root_idx);
        let v_perm = u_perm.compose(s_alpha.perm());
        let coset = q
            .coset_index(&v_perm)
            .ok_or_else(|| Error::InternalInvariant("coset key missing from quotient".into()))?;

        // Classical: v = u s_alpha itself in W^P, one step longer.
        let v_min = par.i_p().iter().all(|&j| v_perm.image_of(j) > 0);
        if v_min && q.length(coset) as i64 == l_u + 1 {
            for (pos, &c) in rd.degree.iter().enumerate() {
                if c != 0 {
                    *acc[pos].entry((Degree::zero(comp_len), coset)).or_insert(0) += c;
                }
            }
        }

        // Quantum: the minimal representative of [u s_alpha] drops by
        // n_alpha - 1 in length.
        if q.length(coset) as i64 == l_u + 1 - rd.n_alpha {
            for (pos, &c) in rd.degree.iter().enumerate() {
                if c != 0 {
                    *acc[pos]
                        .entry((Degree::new(rd.degree.clone()), coset))
                        .or_insert(0) += c;
                }
            }
        }
    }
    Ok(acc)
}

fn finish_product(
    q: &ParabolicQuotient,
    n: &[i64],
    divisor_node: usize,
    source: usize,
    acc: BTreeMap<(Degree, usize), i64>,
) -> Result<ChevalleyProduct> {
    let l_u = q.length(source) as i64;
    let mut terms = Vec::with_capacity(acc.len());
    for ((degree, target), coefficient) in acc {
        if coefficient <= 0 {
            return Err(Error::InternalInvariant("non-positive Chevalley coefficient".into()));
        }
        let graded = q.length(target) as i64 + degree.chern_pairing(n);
        if graded != l_u + 1 {
            return Err(Error::InternalInvariant(format!(
                "Chevalley grading violated: {} + {} != {} + 1",
                q.length(target),
                degree.chern_pairing(n),
                l_u
            )));
        }
        terms.push(ChevalleyTerm { coefficient, degree, target });
    }
    Ok(ChevalleyProduct { divisor_node, source, terms })
}

/// The quantum Chevalley product `sigma_{s_i} * sigma_u` for a single
/// divisor node `i in I^P` and basis index `u`.
pub fn chevalley_product(q: &ParabolicQuotient, i: usize, u: usize) -> Result<ChevalleyProduct> {
    let par = q.par();
    let pos = par
        .complement_position(i)
        .ok_or_else(|| Error::BadConfig(format!("node {i} is not in the complement I^P")))?;
    let fano = fano_data(q)?;
    let roots = quantum_roots(q)?;
    let mut acc = accumulate_column(q, &roots, u)?;
    finish_product(q, &fano.n, i, u, std::mem::take(&mut acc[pos]))
}

/// All Chevalley products `sigma_{s_i} * sigma_u` over `i in I^P` and
/// `u in W^P`, computed once and shared by the operator assembly and the
/// witness searches.
pub struct ChevalleyTable {
    size: usize,
    complement: Vec<usize>,
    /// `products[pos * size + u]`.
    products: Vec<ChevalleyProduct>,
}

impl ChevalleyTable {
    pub fn build(q: &ParabolicQuotient) -> Result<ChevalleyTable> {
        let fano = fano_data(q)?;
        let roots = quantum_roots(q)?;
        let size = q.size();
        let complement = q.par().complement().to_vec();
        let mut products = Vec::with_capacity(complement.len() * size);
        let mut columns: Vec<Vec<BTreeMap<(Degree, usize), i64>>> = Vec::with_capacity(size);
        for u in 0..size {
            columns.push(accumulate_column(q, &roots, u)?);
        }
        for (pos, &node) in complement.iter().enumerate() {
            for (u, col) in columns.iter_mut().enumerate() {
                products.push(finish_product(q, &fano.n, node, u, std::mem::take(&mut col[pos]))?);
            }
        }
        Ok(ChevalleyTable { size, complement, products })
    }

    pub fn product(&self, pos: usize, u: usize) -> &ChevalleyProduct {
        &self.products[pos * self.size + u]
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// One annotated entry of the operator matrix: the total coefficient
/// carried by a fixed quantum degree at position `(row, col)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotatedTerm {
    pub row: usize,
    pub col: usize,
    #[serde(with = "bigint_string")]
    pub coefficient: BigInt,
    pub degree: Degree,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        v.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// The matrix `M(X)` of quantum multiplication by `c_1(X)` at `q = 1`,
/// with the quantum degrees retained in an annotated sparse form.
/// Column `u` holds the expansion of the image of `sigma_u`.
#[derive(Debug, Clone)]
pub struct ChernOperatorMatrix {
    size: usize,
    matrix: IntMatrix,
    annotated: Vec<AnnotatedTerm>,
    complement_len: usize,
}

/// Assembles `M(X)` from a prebuilt Chevalley table.
pub fn c1_operator_from_table(
    q: &ParabolicQuotient,
    fano: &FanoData,
    table: &ChevalleyTable,
) -> Result<ChernOperatorMatrix> {
    let size = q.size();
    let mut matrix = IntMatrix::zeros(size);
    let mut annotated: BTreeMap<(usize, usize, Degree), BigInt> = BTreeMap::new();
    for (pos, _) in table.complement().iter().enumerate() {
        let weight = BigInt::from(fano.n[pos]);
        for u in 0..size {
            for term in &table.product(pos, u).terms {
                let contribution = &weight * BigInt::from(term.coefficient);
                matrix.add_assign_at(term.target, u, &contribution);
                *annotated
                    .entry((term.target, u, term.degree.clone()))
                    .or_insert_with(BigInt::zero) += contribution;
            }
        }
    }
    let annotated: Vec<AnnotatedTerm> = annotated
        .into_iter()
        .map(|((row, col, degree), coefficient)| AnnotatedTerm { row, col, coefficient, degree })
        .collect();
    Ok(ChernOperatorMatrix {
        size,
        matrix,
        annotated,
        complement_len: q.par().complement().len(),
    })
}

/// Builds the operator matrix of `[c_1(X)]` on the Schubert basis.
pub fn c1_operator(q: &ParabolicQuotient, fano: &FanoData) -> Result<ChernOperatorMatrix> {
    let table = ChevalleyTable::build(q)?;
    c1_operator_from_table(q, fano, &table)
}

impl ChernOperatorMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn annotated(&self) -> &[AnnotatedTerm] {
        &self.annotated
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        self.matrix.get(row, col)
    }

    /// Dense integer CSV of the `q = 1` matrix.
    pub fn write_dense_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        self.matrix.write_csv(w)
    }

    /// Sparse annotated export: one line per entry,
    /// `row col coeff d_1 ... d_k`.
    pub fn write_sparse_annotated(&self, w: &mut impl Write) -> std::io::Result<()> {
        for t in &self.annotated {
            let ds: Vec<String> = t.degree.coords().iter().map(|d| d.to_string()).collect();
            writeln!(w, "{} {} {} {}", t.row, t.col, t.coefficient, ds.join(" "))?;
        }
        Ok(())
    }

    /// Evaluation hook at arbitrary positive quantum parameters: entry
    /// `(row, col)` becomes `sum coeff * prod q_i^{d_i}`. At `q = 1` this
    /// reproduces the integer matrix; no further claims are attached.
    pub fn evaluate_at_q(&self, qvals: &[f64]) -> Result<Vec<f64>> {
        if qvals.len() != self.complement_len {
            return Err(Error::DimensionMismatch {
                expected: self.complement_len,
                got: qvals.len(),
            });
        }
        let mut dense = vec![0.0; self.size * self.size];
        for t in &self.annotated {
            let monomial: f64 = t
                .degree
                .coords()
                .iter()
                .zip(qvals)
                .map(|(&d, &qv)| qv.powi(d as i32))
                .product();
            dense[t.row * self.size + t.col] +=
                t.coefficient.to_f64().expect("coefficient fits f64") * monomial;
        }
        Ok(dense)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build_root_system, parabolic_data};
    use crate::weyl::enumerate_quotient;
    use std::sync::Arc;

    fn quotient(desc: &str, i_p: &[usize]) -> ParabolicQuotient {
        let ct = desc.parse().unwrap();
        let rs = Arc::new(build_root_system(&ct).unwrap());
        let par = parabolic_data(&rs, i_p).unwrap();
        enumerate_quotient(&rs, &par, 20_000).unwrap()
    }

    #[test]
    fn degree_of_simple_roots() {
        let q = quotient("A2", &[1]);
        let rs = q.rs();
        let par = q.par();
        assert_eq!(degree_of_root(rs, par, &rs.simple_root(0)).unwrap().coords(), &[1]);
        assert_eq!(degree_of_root(rs, par, &rs.simple_root(1)).unwrap().coords(), &[0]);
    }

    #[test]
    fn degree_via_coroot_in_b2() {
        // B2 with alpha_1 long, I^P = {0}: d(alpha_1 + alpha_2) reads the
        // first coordinate of (alpha_1 + alpha_2)^v = 2 alpha_1^v + alpha_2^v.
        let q = quotient("B2", &[1]);
        let d = degree_of_root(q.rs(), q.par(), &RootVec::new(vec![1, 1])).unwrap();
        assert_eq!(d.coords(), &[2]);
    }

    #[test]
    fn n_alpha_examples() {
        // Borel case: every n_i = 2.
        let q = quotient("B3", &[]);
        for i in 0..3 {
            assert_eq!(n_alpha(q.rs(), q.par(), &q.rs().simple_root(i)).unwrap(), 2);
        }
        // Projective spaces: n_1 = n + 1.
        for n in 1..=5usize {
            let desc = format!("A{n}");
            let i_p: Vec<usize> = (1..n).collect();
            let q = quotient(&desc, &i_p);
            assert_eq!(
                n_alpha(q.rs(), q.par(), &q.rs().simple_root(0)).unwrap(),
                n as i64 + 1
            );
        }
        // Roots inside the parabolic subsystem are rejected.
        let q = quotient("A2", &[1]);
        assert!(matches!(
            n_alpha(q.rs(), q.par(), &q.rs().simple_root(1)),
            Err(Error::RootInParabolicSubsystem(_))
        ));
    }

    #[test]
    fn fano_examples() {
        let flag_a2 = fano_data(&quotient("A2", &[])).unwrap();
        assert_eq!(flag_a2.n, vec![2, 2]);
        assert_eq!(flag_a2.r, 2);

        let p3 = fano_data(&quotient("A3", &[1, 2])).unwrap();
        assert_eq!(p3.n, vec![4]);
        assert_eq!(p3.r, 4);

        let gr24 = fano_data(&quotient("A3", &[0, 2])).unwrap();
        assert_eq!(gr24.n, vec![4]);
        assert_eq!(gr24.r, 4);
        assert_eq!(gr24.dim_x, 4);

        assert!(matches!(
            fano_data(&quotient("A2", &[0, 1])),
            Err(Error::ParabolicIsFullGroup)
        ));
    }

    #[test]
    fn chern_number_bounds_across_small_spaces() {
        for (desc, rank) in [("A3", 3usize), ("B3", 3), ("C3", 3), ("G2", 2), ("D4", 4)] {
            for bits in 0..(1u32 << rank) - 1 {
                let i_p: Vec<usize> = (0..rank).filter(|&i| bits & (1 << i) != 0).collect();
                let q = quotient(desc, &i_p);
                let fano = fano_data(&q).unwrap();
                for &ni in &fano.n {
                    assert!(ni >= 2 && ni <= fano.dim_x as i64 + 1, "{desc} {i_p:?}");
                }
            }
        }
    }

    #[test]
    fn identity_column_is_the_divisor_class() {
        let q = quotient("A3", &[0, 2]);
        let prod = chevalley_product(&q, 1, q.identity_index()).unwrap();
        assert_eq!(prod.terms.len(), 1);
        let t = &prod.terms[0];
        assert_eq!(t.coefficient, 1);
        assert!(t.degree.is_classical());
        assert_eq!(q.elem(t.target).word(), &[1]);
    }

    #[test]
    fn projective_line_product() {
        let q = quotient("A1", &[]);
        let prod = chevalley_product(&q, 0, 1).unwrap();
        assert_eq!(prod.terms.len(), 1);
        let t = &prod.terms[0];
        assert_eq!(t.coefficient, 1);
        assert_eq!(t.degree.coords(), &[1]);
        assert_eq!(t.target, q.identity_index());
    }

    #[test]
    fn projective_plane_top_product() {
        // sigma_{s_1} * sigma_{s_2 s_1} = q_1 sigma_{0^P} on the plane.
        let q = quotient("A2", &[1]);
        let top = q.top_index();
        assert_eq!(q.elem(top).word(), &[1, 0]);
        let prod = chevalley_product(&q, 0, top).unwrap();
        assert_eq!(prod.terms.len(), 1);
        let t = &prod.terms[0];
        assert_eq!((t.coefficient, t.target), (1, q.identity_index()));
        assert_eq!(t.degree.coords(), &[1]);
    }

    fn operator(desc: &str, i_p: &[usize]) -> (ParabolicQuotient, FanoData, ChernOperatorMatrix) {
        let q = quotient(desc, i_p);
        let fano = fano_data(&q).unwrap();
        let m = c1_operator(&q, &fano).unwrap();
        (q, fano, m)
    }

    #[test]
    fn projective_line_operator() {
        let (_, _, m) = operator("A1", &[]);
        assert_eq!(m.entry(0, 0), &BigInt::from(0));
        assert_eq!(m.entry(0, 1), &BigInt::from(2));
        assert_eq!(m.entry(1, 0), &BigInt::from(2));
        assert_eq!(m.entry(1, 1), &BigInt::from(0));
    }

    #[test]
    fn projective_plane_operator_is_cyclic() {
        let (q, _, m) = operator("A2", &[1]);
        assert_eq!(q.size(), 3);
        for col in 0..3 {
            for row in 0..3 {
                let expect = if row == (col + 1) % 3 { 3 } else { 0 };
                assert_eq!(m.entry(row, col), &BigInt::from(expect), "({row},{col})");
            }
        }
    }

    #[test]
    fn identity_column_of_the_operator() {
        // Column of 0^P holds exactly the classical coefficients n_i at the
        // rows of the simple divisor classes.
        let (q, fano, m) = operator("B2", &[]);
        let col = q.identity_index();
        for row in 0..q.size() {
            let word = q.elem(row).word();
            let expect = if word.len() == 1 {
                let pos = q.par().complement_position(word[0]).unwrap();
                BigInt::from(fano.n[pos])
            } else {
                BigInt::from(0)
            };
            assert_eq!(m.entry(row, col), &expect, "row {row}");
        }
    }

    #[test]
    fn grading_mod_r_on_nonzero_entries() {
        for (desc, i_p) in [("A3", vec![0usize, 2]), ("B2", vec![]), ("G2", vec![0])] {
            let (q, fano, m) = operator(desc, &i_p);
            let r = fano.r as usize;
            for row in 0..q.size() {
                for col in 0..q.size() {
                    if !m.entry(row, col).is_zero() {
                        assert_eq!(
                            (q.length(row)) % r,
                            (q.length(col) + 1) % r,
                            "{desc} ({row},{col})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn annotated_terms_sum_to_entries() {
        let (q, _, m) = operator("A3", &[0, 2]);
        let mut dense = IntMatrix::zeros(q.size());
        for t in m.annotated() {
            dense.add_assign_at(t.row, t.col, &t.coefficient);
        }
        for row in 0..q.size() {
            for col in 0..q.size() {
                assert_eq!(dense.get(row, col), m.entry(row, col));
            }
        }
    }

    #[test]
    fn divisor_operators_commute_at_q_one() {
        for (desc, i_p) in [("A3", vec![]), ("A3", vec![2]), ("B3", vec![0])] {
            let q = quotient(desc, &i_p);
            let table = ChevalleyTable::build(&q).unwrap();
            let size = q.size();
            let comp = table.complement().len();
            let mut mats = Vec::new();
            for pos in 0..comp {
                let mut m = IntMatrix::zeros(size);
                for u in 0..size {
                    for t in &table.product(pos, u).terms {
                        m.add_assign_at(t.target, u, &BigInt::from(t.coefficient));
                    }
                }
                mats.push(m);
            }
            for a in 0..comp {
                for b in a + 1..comp {
                    let ab = mats[a].mat_mul(&mats[b]).unwrap();
                    let ba = mats[b].mat_mul(&mats[a]).unwrap();
                    assert_eq!(ab, ba, "{desc} {i_p:?} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn classical_duality_symmetry() {
        // The classical coefficient of sigma_w in sigma_{s_i} * sigma_u
        // equals that of sigma_{u^v} in sigma_{s_i} * sigma_{w^v}.
        for (desc, i_p) in [("A2", vec![]), ("A3", vec![0usize, 2]), ("B2", vec![])] {
            let q = quotient(desc, &i_p);
            let table = ChevalleyTable::build(&q).unwrap();
            let comp_len = table.complement().len();
            let zero = Degree::zero(comp_len);
            for pos in 0..comp_len {
                for u in 0..q.size() {
                    for w in 0..q.size() {
                        let lhs = table.product(pos, u).coefficient_of(&zero, w);
                        let rhs =
                            table.product(pos, q.dual(w)).coefficient_of(&zero, q.dual(u));
                        assert_eq!(lhs, rhs, "{desc} {i_p:?} pos={pos} u={u} w={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn relaxed_classical_parameterization_agrees() {
        // Alternative classical sum: over all alpha in R^+ whose coset
        // minimal representative is one step longer, with the same
        // coefficient rule. Must reproduce the classical terms exactly.
        use crate::weyl::minimal_rep;
        for (desc, i_p) in [("A2", vec![1usize]), ("A3", vec![0, 2]), ("B2", vec![0])] {
            let q = quotient(desc, &i_p);
            let rs = q.rs().clone();
            let par = q.par().clone();
            let table = ChevalleyTable::build(&q).unwrap();
            let comp_len = par.complement().len();
            for u in 0..q.size() {
                let mut relaxed: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); comp_len];
                for idx in 0..rs.num_positive_roots() {
                    let s_alpha = q.reflection(idx);
                    let prod = crate::weyl::WeylElem::product(&rs, q.elem(u), s_alpha).unwrap();
                    let v = minimal_rep(&rs, &par, &prod).unwrap();
                    let vidx = q.index_of_elem(&v).unwrap();
                    if q.length(vidx) != q.length(u) + 1 {
                        continue;
                    }
                    let cv = &rs.coroots()[idx];
                    for (pos, &node) in par.complement().iter().enumerate() {
                        let c = cv.coords[node];
                        if c != 0 {
                            *relaxed[pos].entry(vidx).or_insert(0) += c;
                        }
                    }
                }
                for (pos, map) in relaxed.iter().enumerate() {
                    let classical: BTreeMap<usize, i64> = table
                        .product(pos, u)
                        .classical_terms()
                        .map(|t| (t.target, t.coefficient))
                        .collect();
                    assert_eq!(map, &classical, "{desc} {i_p:?} u={u} pos={pos}");
                }
            }
        }
    }

    #[test]
    fn q_evaluation_hook_consistent_at_one() {
        let (q, _, m) = operator("A3", &[0, 2]);
        let dense = m.evaluate_at_q(&[1.0]).unwrap();
        for row in 0..q.size() {
            for col in 0..q.size() {
                let expect = m.entry(row, col).to_f64().unwrap();
                assert_eq!(dense[row * q.size() + col], expect);
            }
        }
        assert!(matches!(
            m.evaluate_at_q(&[1.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn export_shapes() {
        let (_, _, m) = operator("A1", &[]);
        let mut dense = Vec::new();
        m.write_dense_csv(&mut dense).unwrap();
        assert_eq!(String::from_utf8(dense).unwrap(), "0,2\n2,0\n");
        let mut sparse = Vec::new();
        m.write_sparse_annotated(&mut sparse).unwrap();
        let text = String::from_utf8(sparse).unwrap();
        assert!(text.lines().any(|l| l == "1 0 2 0"));
        assert!(text.lines().any(|l| l == "0 1 2 1"));
    }
}
