//! Weyl group elements, reduced words, and the enumeration of the minimal
//! length coset representatives `W^P` indexing the Schubert basis.
//!
//! Elements are represented by their signed action on the set of positive
//! roots, which is faithful; each element also caches one reduced word.
//! The quotient `W^P` is enumerated as the orbit of the dominant weight
//! `omega = sum of fundamental weights over the complement of I_P`, whose
//! stabilizer is exactly `W_P`, so orbit points biject with cosets. The
//! orbit point doubles as the canonical coset key.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{ParabolicData, RootSystem, RootVec, WeightVec};

/// Signed permutation of the positive-root index set: `imgs[p] = +-(q+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm {
    imgs: Vec<i32>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { imgs: (1..=n as i32).collect() }
    }

    /// The simple reflection `s_i` acting on all positive roots.
    pub fn simple(rs: &RootSystem, i: usize) -> Perm {
        let alpha = rs.simple_root(i);
        let imgs = rs
            .positive_roots()
            .iter()
            .map(|beta| {
                let c = rs.pair_simple_coroot(beta, i);
                let img = RootVec::new(
                    beta.coords
                        .iter()
                        .zip(&alpha.coords)
                        .map(|(b, a)| b - c * a)
                        .collect(),
                );
                signed_index(rs, &img)
            })
            .collect();
        Perm { imgs }
    }

    pub fn len_roots(&self) -> usize {
        self.imgs.len()
    }

    pub fn apply_signed(&self, x: i32) -> i32 {
        if x > 0 {
            self.imgs[(x - 1) as usize]
        } else {
            -self.imgs[(-x - 1) as usize]
        }
    }

    /// Image of positive root index `p` as a signed index.
    pub fn image_of(&self, p: usize) -> i32 {
        self.imgs[p]
    }

    /// `self` after `other`: `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { imgs: other.imgs.iter().map(|&x| self.apply_signed(x)).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0i32; self.imgs.len()];
        for (p, &x) in self.imgs.iter().enumerate() {
            let q = (x.unsigned_abs() - 1) as usize;
            inv[q] = if x > 0 { (p + 1) as i32 } else { -((p + 1) as i32) };
        }
        Perm { imgs: inv }
    }

    /// Number of positive roots sent to negative roots.
    pub fn inversions(&self) -> usize {
        self.imgs.iter().filter(|&&x| x < 0).count()
    }

    pub fn is_identity(&self) -> bool {
        self.imgs.iter().enumerate().all(|(p, &x)| x == (p + 1) as i32)
    }

    /// Action on an arbitrary root (of either sign).
    pub fn act_root(&self, rs: &RootSystem, beta: &RootVec) -> Result<RootVec> {
        let (sign, idx) = rs.root_lookup(beta).ok_or_else(|| Error::NotARoot(beta.coords.clone()))?;
        let x = self.apply_signed(sign as i32 * (idx as i32 + 1));
        let q = (x.unsigned_abs() - 1) as usize;
        let root = &rs.positive_roots()[q];
        Ok(if x > 0 { root.clone() } else { root.negated() })
    }
}

fn signed_index(rs: &RootSystem, v: &RootVec) -> i32 {
    match rs.root_lookup(v) {
        Some((sign, q)) if sign > 0 => (q + 1) as i32,
        Some((_, q)) => -((q + 1) as i32),
        None => unreachable!("Weyl images of roots are roots"),
    }
}

/// A Weyl group element: signed root permutation plus one cached reduced word.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylElem {
    perm: Perm,
    word: Vec<usize>,
    length: usize,
}

impl PartialEq for WeylElem {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm
    }
}

impl Eq for WeylElem {}

impl WeylElem {
    pub fn identity(rs: &RootSystem) -> WeylElem {
        WeylElem { perm: Perm::identity(rs.num_positive_roots()), word: vec![], length: 0 }
    }

    pub fn simple(rs: &RootSystem, i: usize) -> WeylElem {
        WeylElem { perm: Perm::simple(rs, i), word: vec![i], length: 1 }
    }

    /// Reconstructs an element from its permutation, deriving a canonical
    /// reduced word by repeated right descents.
    pub fn from_perm(rs: &RootSystem, perm: Perm) -> Result<WeylElem> {
        let word = canonical_word(rs, &perm)?;
        let length = word.len();
        if perm.inversions() != length {
            return Err(Error::InternalInvariant(
                "derived word length disagrees with inversion count".into(),
            ));
        }
        Ok(WeylElem { perm, word, length })
    }

    pub(crate) fn from_parts(rs: &RootSystem, perm: Perm, word: Vec<usize>) -> Result<WeylElem> {
        if perm.inversions() != word.len() || word.iter().any(|&i| i >= rs.rank()) {
            return Err(Error::InternalInvariant("stored word is not reduced".into()));
        }
        let length = word.len();
        Ok(WeylElem { perm, word, length })
    }

    /// Group product `a * b` with a canonical reduced word.
    pub fn product(rs: &RootSystem, a: &WeylElem, b: &WeylElem) -> Result<WeylElem> {
        WeylElem::from_perm(rs, a.perm.compose(&b.perm))
    }

    pub fn inverse(&self, rs: &RootSystem) -> Result<WeylElem> {
        WeylElem::from_perm(rs, self.perm.inverse())
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// Action on a root vector; the sign of the image is preserved.
    pub fn apply(&self, rs: &RootSystem, beta: &RootVec) -> Result<RootVec> {
        self.perm.act_root(rs, beta)
    }

    /// `u(alpha_j) in R^+` for all `j in I_P`: the minimal-representative test.
    pub fn is_minimal_rep(&self, par: &ParabolicData) -> bool {
        par.i_p().iter().all(|&j| self.perm.image_of(j) > 0)
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "id".to_string()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(" ")
        }
    }
}

fn canonical_word(rs: &RootSystem, perm: &Perm) -> Result<Vec<usize>> {
    let mut w = perm.clone();
    let mut rev = Vec::new();
    let cap = rs.num_positive_roots() + 1;
    while !w.is_identity() {
        let i = (0..rs.rank())
            .find(|&i| w.image_of(i) < 0)
            .ok_or_else(|| Error::InternalInvariant("non-identity element without descent".into()))?;
        w = w.compose(&Perm::simple(rs, i));
        rev.push(i);
        if rev.len() > cap {
            return Err(Error::InternalInvariant("descent walk did not terminate".into()));
        }
    }
    rev.reverse();
    Ok(rev)
}

/// Longest element of the standard parabolic subgroup generated by `gens`,
/// built by greedy length ascent. With `gens = 0..rank` this is `w_0`.
pub fn longest_element(rs: &RootSystem, gens: &[usize]) -> Result<WeylElem> {
    let mut perm = Perm::identity(rs.num_positive_roots());
    let mut steps = 0usize;
    loop {
        match gens.iter().find(|&&i| perm.image_of(i) > 0) {
            Some(&i) => {
                perm = perm.compose(&Perm::simple(rs, i));
                steps += 1;
                if steps > rs.num_positive_roots() {
                    return Err(Error::InternalInvariant("length ascent did not terminate".into()));
                }
            }
            None => break,
        }
    }
    WeylElem::from_perm(rs, perm)
}

/// Right-descends `v` into the minimal length representative of its coset
/// `v W_P`; the result does not depend on the order of descents.
pub fn minimal_rep(rs: &RootSystem, par: &ParabolicData, v: &WeylElem) -> Result<WeylElem> {
    if v.is_minimal_rep(par) {
        return Ok(v.clone());
    }
    let mut perm = v.perm.clone();
    loop {
        match par.i_p().iter().find(|&&j| perm.image_of(j) < 0) {
            Some(&j) => perm = perm.compose(&Perm::simple(rs, j)),
            None => break,
        }
    }
    WeylElem::from_perm(rs, perm)
}

/// The reflection `s_alpha` for a positive root, as a group element.
pub fn reflection_of_root(rs: &RootSystem, alpha: &RootVec) -> Result<WeylElem> {
    if !rs.is_positive_root(alpha) {
        return Err(Error::NotAPositiveRoot(alpha.coords.clone()));
    }
    let imgs = rs
        .positive_roots()
        .iter()
        .map(|beta| {
            let img = rs.reflect_root(alpha, beta).expect("alpha is a root");
            signed_index(rs, &img)
        })
        .collect();
    WeylElem::from_perm(rs, Perm { imgs })
}

/// One entry of [`reduced_word_tails`]: for prefix index `m`, the tail
/// `v_{m+1} = s_{j_{m+1}} ... s_{j_l}` together with the exposed root
/// `v_{m+1}^{-1}(alpha_{j_m})`.
#[derive(Debug, Clone)]
pub struct TailStep {
    pub m: usize,
    pub tail: WeylElem,
    pub exposed_root: RootVec,
}

/// Walks the cached reduced word of `u in W^P` from the right, checking that
/// every tail stays in `W^P` and that each exposed root lies in
/// `R^+ \ R_P^+`. Violations signal a broken internal invariant.
pub fn reduced_word_tails(
    rs: &RootSystem,
    par: &ParabolicData,
    u: &WeylElem,
) -> Result<Vec<TailStep>> {
    let word = u.word();
    let l = word.len();
    let mut steps = Vec::with_capacity(l);
    // v holds v_{m+1}, starting from v_{l+1} = id.
    let mut v = WeylElem::identity(rs);
    for m in (1..=l).rev() {
        let letter = word[m - 1];
        let inv = v.perm.inverse();
        let x = inv.apply_signed((letter + 1) as i32);
        if x < 0 {
            return Err(Error::InternalInvariant(
                "exposed root of a reduced-word tail is negative".into(),
            ));
        }
        let exposed_idx = (x - 1) as usize;
        if par.root_in_subsystem(exposed_idx) {
            return Err(Error::InternalInvariant(
                "exposed root of a reduced-word tail lies in the parabolic subsystem".into(),
            ));
        }
        let exposed_root = rs.positive_roots()[exposed_idx].clone();
        steps.push(TailStep { m, tail: v.clone(), exposed_root });

        // Step to v_m = s_{j_m} v_{m+1}.
        let perm = Perm::simple(rs, letter).compose(&v.perm);
        let next = WeylElem::from_parts(rs, perm, word[m - 1..].to_vec())?;
        if !next.is_minimal_rep(par) {
            return Err(Error::InternalInvariant(
                "reduced-word tail left the minimal-representative set".into(),
            ));
        }
        v = next;
    }
    if v != *u {
        return Err(Error::InternalInvariant("tail walk did not reproduce the element".into()));
    }
    steps.reverse();
    Ok(steps)
}

/// Enumerates a standard parabolic subgroup by breadth-first products of the
/// given generators; intended for small subgroups and cross-checks.
pub fn enumerate_subgroup(rs: &RootSystem, gens: &[usize], cap: usize) -> Result<Vec<WeylElem>> {
    let mut seen: HashMap<Vec<i32>, usize> = HashMap::new();
    let mut elems: Vec<WeylElem> = vec![WeylElem::identity(rs)];
    seen.insert(elems[0].perm.imgs.clone(), 0);
    let mut head = 0;
    while head < elems.len() {
        let current = elems[head].clone();
        head += 1;
        for &i in gens {
            let perm = Perm::simple(rs, i).compose(&current.perm);
            if seen.contains_key(&perm.imgs) {
                continue;
            }
            if elems.len() >= cap {
                return Err(Error::QuotientCapExceeded { cap, seen: elems.len() + 1 });
            }
            let mut word = Vec::with_capacity(current.word.len() + 1);
            word.push(i);
            word.extend_from_slice(&current.word);
            let elem = if perm.inversions() == word.len() {
                WeylElem::from_parts(rs, perm.clone(), word)?
            } else {
                WeylElem::from_perm(rs, perm.clone())?
            };
            seen.insert(perm.imgs, elems.len());
            elems.push(elem);
        }
    }
    elems.sort_by(|a, b| a.length.cmp(&b.length).then_with(|| a.word.cmp(&b.word)));
    Ok(elems)
}

/// The enumerated, ordered set `W^P` with duals and reflection tables.
///
/// Ordering is by length ascending, ties broken by lexicographic reduced
/// word; this fixes the Schubert basis order once and for all.
#[derive(Debug, Clone)]
pub struct ParabolicQuotient {
    rs: Arc<RootSystem>,
    par: ParabolicData,
    base_weight: WeightVec,
    elements: Vec<WeylElem>,
    points: Vec<Vec<i64>>,
    index_of: HashMap<Vec<i64>, usize>,
    dual: Vec<usize>,
    dim_x: usize,
    w0: WeylElem,
    refl: Vec<WeylElem>,
}

/// Breadth-first enumeration of `W^P` via the orbit of the dominant weight
/// with stabilizer `W_P`. Aborts with the partial count when `cap` is
/// exceeded. Each element carries the reduced word read off the orbit tree.
pub fn enumerate_quotient(
    rs: &Arc<RootSystem>,
    par: &ParabolicData,
    cap: usize,
) -> Result<ParabolicQuotient> {
    let rank = rs.rank();
    let mut base = vec![0i64; rank];
    for &i in par.complement() {
        base[i] = 1;
    }
    let base_weight = WeightVec::new(base);

    let simple_perms: Vec<Perm> = (0..rank).map(|i| Perm::simple(rs, i)).collect();

    struct Node {
        point: WeightVec,
        perm: Perm,
        word: Vec<usize>,
    }
    let identity = Node {
        point: base_weight.clone(),
        perm: Perm::identity(rs.num_positive_roots()),
        word: vec![],
    };
    let mut nodes: Vec<Node> = vec![identity];
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(base_weight.coords.clone(), 0);
    let mut head = 0;
    while head < nodes.len() {
        for i in 0..rank {
            if nodes[head].point.coords[i] == 0 {
                continue;
            }
            let point = rs.reflect_weight_simple(i, &nodes[head].point);
            if seen.contains_key(&point.coords) {
                continue;
            }
            if nodes.len() >= cap {
                return Err(Error::QuotientCapExceeded { cap, seen: nodes.len() + 1 });
            }
            let perm = simple_perms[i].compose(&nodes[head].perm);
            let mut word = Vec::with_capacity(nodes[head].word.len() + 1);
            word.push(i);
            word.extend_from_slice(&nodes[head].word);
            seen.insert(point.coords.clone(), nodes.len());
            nodes.push(Node { point, perm, word });
        }
        head += 1;
    }

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        nodes[a]
            .word
            .len()
            .cmp(&nodes[b].word.len())
            .then_with(|| nodes[a].word.cmp(&nodes[b].word))
    });
    let mut elements = Vec::with_capacity(nodes.len());
    let mut points = Vec::with_capacity(nodes.len());
    for &k in &order {
        let node = &nodes[k];
        elements.push(WeylElem::from_parts(rs, node.perm.clone(), node.word.clone())?);
        points.push(node.point.coords.clone());
    }
    ParabolicQuotient::from_parts(Arc::clone(rs), par.clone(), base_weight, elements, points)
}

impl ParabolicQuotient {
    /// Assembles the quotient from sorted elements and orbit points,
    /// rebuilding every derived table and validating the basic shape.
    pub(crate) fn from_parts(
        rs: Arc<RootSystem>,
        par: ParabolicData,
        base_weight: WeightVec,
        elements: Vec<WeylElem>,
        points: Vec<Vec<i64>>,
    ) -> Result<ParabolicQuotient> {
        if elements.is_empty() || elements.len() != points.len() {
            return Err(Error::InternalInvariant("malformed quotient parts".into()));
        }
        if !elements[0].is_identity() {
            return Err(Error::InternalInvariant("first basis element is not the identity".into()));
        }
        let dim_x = rs.num_positive_roots() - par.num_subsystem_roots();
        let max_len = elements.last().map(|e| e.length()).unwrap_or(0);
        if max_len != dim_x {
            return Err(Error::InternalInvariant(format!(
                "maximal length {max_len} disagrees with dim {dim_x}"
            )));
        }
        let index_of: HashMap<Vec<i64>, usize> =
            points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        if index_of.len() != points.len() {
            return Err(Error::InternalInvariant("orbit points are not distinct".into()));
        }

        let w0 = longest_element(&rs, &(0..rs.rank()).collect::<Vec<_>>())?;
        let mut dual = Vec::with_capacity(elements.len());
        for (u_idx, elem) in elements.iter().enumerate() {
            let mut point = WeightVec::new(points[u_idx].clone());
            for &letter in w0.word().iter().rev() {
                point = rs.reflect_weight_simple(letter, &point);
            }
            let d = *index_of.get(&point.coords).ok_or_else(|| {
                Error::InternalInvariant("dual orbit point missing from the quotient".into())
            })?;
            if elements[d].length() + elem.length() != dim_x {
                return Err(Error::InternalInvariant(
                    "dual length is not the length complement".into(),
                ));
            }
            dual.push(d);
        }
        for (u, &d) in dual.iter().enumerate() {
            if dual[d] != u {
                return Err(Error::InternalInvariant("dual map is not an involution".into()));
            }
        }

        let refl = rs
            .positive_roots()
            .iter()
            .map(|alpha| reflection_of_root(&rs, alpha))
            .collect::<Result<Vec<_>>>()?;

        Ok(ParabolicQuotient {
            rs,
            par,
            base_weight,
            elements,
            points,
            index_of,
            dual,
            dim_x,
            w0,
            refl,
        })
    }

    pub fn rs(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn par(&self) -> &ParabolicData {
        &self.par
    }

    pub fn base_weight(&self) -> &WeightVec {
        &self.base_weight
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn elements(&self) -> &[WeylElem] {
        &self.elements
    }

    pub fn elem(&self, idx: usize) -> &WeylElem {
        &self.elements[idx]
    }

    pub fn length(&self, idx: usize) -> usize {
        self.elements[idx].length()
    }

    pub fn orbit_point(&self, idx: usize) -> &[i64] {
        &self.points[idx]
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn top_index(&self) -> usize {
        self.elements.len() - 1
    }

    /// Index of the dual `u^v`, the minimal representative of `[w_0 u]`.
    pub fn dual(&self, idx: usize) -> usize {
        self.dual[idx]
    }

    pub fn w0(&self) -> &WeylElem {
        &self.w0
    }

    pub fn reflection(&self, root_idx: usize) -> &WeylElem {
        &self.refl[root_idx]
    }

    /// Index of the coset of an arbitrary group element. The orbit point of
    /// the coset is `<base, v^{-1}(alpha_i^v)>` per coordinate, so no descent
    /// to the minimal representative is required.
    pub fn coset_index(&self, perm: &Perm) -> Option<usize> {
        let inv = perm.inverse();
        let rank = self.rs.rank();
        let mut key = Vec::with_capacity(rank);
        for i in 0..rank {
            let x = inv.image_of(i);
            let q = (x.unsigned_abs() - 1) as usize;
            let sum: i64 = self
                .par
                .complement()
                .iter()
                .map(|&j| self.rs.coroots()[q].coords[j])
                .sum();
            key.push(if x > 0 { sum } else { -sum });
        }
        self.index_of.get(&key).copied()
    }

    pub fn index_of_elem(&self, elem: &WeylElem) -> Option<usize> {
        self.coset_index(elem.perm())
    }

    /// Contiguous index range of the elements of the given length.
    pub fn indices_with_length(&self, l: usize) -> std::ops::Range<usize> {
        let start = self.elements.partition_point(|e| e.length() < l);
        let end = self.elements.partition_point(|e| e.length() <= l);
        start..end
    }

    /// Number of basis elements in each length degree, `0..=dim_x`.
    pub fn length_census(&self) -> Vec<usize> {
        let mut census = vec![0usize; self.dim_x + 1];
        for e in &self.elements {
            census[e.length()] += 1;
        }
        census
    }
}
