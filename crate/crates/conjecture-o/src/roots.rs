//! Root-system ground data: Cartan matrices, positive roots and coroots,
//! integral pairings, and parabolic subdata.
//!
//! Everything here is exact integer arithmetic. Inner products are never
//! materialized: all quantities that classically involve `(alpha, alpha)`
//! are expressed through coroot coordinates and Cartan integers instead.
//! Simple roots follow the Bourbaki numbering within each component
//! (0-based in this API); semisimple types are assembled block-diagonally
//! with node indices offset by the preceding components.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dynkin-type letter of a simple component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeLetter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TypeLetter {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(TypeLetter::A),
            'B' => Some(TypeLetter::B),
            'C' => Some(TypeLetter::C),
            'D' => Some(TypeLetter::D),
            'E' => Some(TypeLetter::E),
            'F' => Some(TypeLetter::F),
            'G' => Some(TypeLetter::G),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            TypeLetter::A => 'A',
            TypeLetter::B => 'B',
            TypeLetter::C => 'C',
            TypeLetter::D => 'D',
            TypeLetter::E => 'E',
            TypeLetter::F => 'F',
            TypeLetter::G => 'G',
        }
    }
}

/// One simple component, e.g. `B3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub letter: TypeLetter,
    pub rank: usize,
}

impl Component {
    /// Rank bounds: A >= 1, B >= 2, C >= 2, D >= 3, E in {6,7,8}, F = 4, G = 2.
    fn validate(&self) -> Result<()> {
        let ok = match self.letter {
            TypeLetter::A => self.rank >= 1,
            TypeLetter::B | TypeLetter::C => self.rank >= 2,
            TypeLetter::D => self.rank >= 3,
            TypeLetter::E => (6..=8).contains(&self.rank),
            TypeLetter::F => self.rank == 4,
            TypeLetter::G => self.rank == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCartanType(
                format!("{}{}", self.letter.as_char(), self.rank),
                "rank out of range for this letter".into(),
            ))
        }
    }

    fn positive_root_count(&self) -> usize {
        let n = self.rank;
        match self.letter {
            TypeLetter::A => n * (n + 1) / 2,
            TypeLetter::B | TypeLetter::C => n * n,
            TypeLetter::D => n * (n - 1),
            TypeLetter::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            TypeLetter::F => 24,
            TypeLetter::G => 6,
        }
    }

    /// Cartan matrix with the convention `a[i][j] = <alpha_j, alpha_i^v>`.
    fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let edge = |a: &mut Vec<Vec<i64>>, i: usize, j: usize, aij: i64, aji: i64| {
            a[i][j] = aij;
            a[j][i] = aji;
        };
        match self.letter {
            TypeLetter::A => {
                for i in 0..n.saturating_sub(1) {
                    edge(&mut a, i, i + 1, -1, -1);
                }
            }
            TypeLetter::B => {
                for i in 0..n - 2 {
                    edge(&mut a, i, i + 1, -1, -1);
                }
                // alpha_{n-1} short: <alpha_short, alpha_long^v> = -1.
                edge(&mut a, n - 2, n - 1, -1, -2);
            }
            TypeLetter::C => {
                for i in 0..n - 2 {
                    edge(&mut a, i, i + 1, -1, -1);
                }
                // alpha_{n-1} long.
                edge(&mut a, n - 2, n - 1, -2, -1);
            }
            TypeLetter::D => {
                for i in 0..n.saturating_sub(3) {
                    edge(&mut a, i, i + 1, -1, -1);
                }
                edge(&mut a, n - 3, n - 2, -1, -1);
                edge(&mut a, n - 3, n - 1, -1, -1);
            }
            TypeLetter::E => {
                // Bourbaki: chain 1-3-4-5-6(-7)(-8), node 2 attached to node 4.
                let chain: &[(usize, usize)] = &[(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)];
                for &(i, j) in chain {
                    edge(&mut a, i, j, -1, -1);
                }
                if n >= 7 {
                    edge(&mut a, 5, 6, -1, -1);
                }
                if n == 8 {
                    edge(&mut a, 6, 7, -1, -1);
                }
            }
            TypeLetter::F => {
                edge(&mut a, 0, 1, -1, -1);
                // alpha_1, alpha_2 long; alpha_3, alpha_4 short.
                edge(&mut a, 1, 2, -1, -2);
                edge(&mut a, 2, 3, -1, -1);
            }
            TypeLetter::G => {
                // alpha_1 short, alpha_2 long.
                edge(&mut a, 0, 1, -3, -1);
            }
        }
        a
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter.as_char(), self.rank)
    }
}

/// A simple or semisimple Lie type, e.g. `A3` or `A2xA1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanType {
    pub components: Vec<Component>,
}

impl CartanType {
    pub fn simple(letter: TypeLetter, rank: usize) -> Result<Self> {
        let ct = CartanType { components: vec![Component { letter, rank }] };
        ct.validate()?;
        Ok(ct)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidCartanType("".into(), "no components".into()));
        }
        for c in &self.components {
            c.validate()?;
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn positive_root_count(&self) -> usize {
        self.components.iter().map(|c| c.positive_root_count()).sum()
    }

    /// Descriptor string, components joined by `x`, e.g. `A2xA1`.
    pub fn descriptor(&self) -> String {
        self.components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x")
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut components = Vec::new();
        for part in s.split(['x', 'X']) {
            let part = part.trim();
            let mut chars = part.chars();
            let letter = chars
                .next()
                .and_then(TypeLetter::from_char)
                .ok_or_else(|| Error::BadDescriptor(s.into()))?;
            let rank: usize =
                chars.as_str().parse().map_err(|_| Error::BadDescriptor(s.into()))?;
            let comp = Component { letter, rank };
            comp.validate()?;
            components.push(comp);
        }
        if components.is_empty() {
            return Err(Error::BadDescriptor(s.into()));
        }
        Ok(CartanType { components })
    }
}

/// Integer vector in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootVec {
    pub coords: Vec<i64>,
}

/// Integer vector in simple-coroot coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorootVec {
    pub coords: Vec<i64>,
}

/// Integer vector in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVec {
    pub coords: Vec<i64>,
}

impl RootVec {
    pub fn new(coords: Vec<i64>) -> Self {
        RootVec { coords }
    }

    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0) && self.coords.iter().any(|&c| c != 0)
    }

    pub fn is_negative(&self) -> bool {
        self.coords.iter().all(|&c| c <= 0) && self.coords.iter().any(|&c| c != 0)
    }

    pub fn negated(&self) -> RootVec {
        RootVec::new(self.coords.iter().map(|c| -c).collect())
    }

    /// Index set of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.coords.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i).collect()
    }
}

impl CorootVec {
    pub fn new(coords: Vec<i64>) -> Self {
        CorootVec { coords }
    }

    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn negated(&self) -> CorootVec {
        CorootVec::new(self.coords.iter().map(|c| -c).collect())
    }
}

impl WeightVec {
    pub fn new(coords: Vec<i64>) -> Self {
        WeightVec { coords }
    }

    pub fn zero(rank: usize) -> Self {
        WeightVec { coords: vec![0; rank] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Immutable ground data of a root system: Cartan matrix, the full list of
/// positive roots with their coroots, and a symmetrizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSystem {
    cartan_type: CartanType,
    /// `cartan[i][j] = <alpha_j, alpha_i^v>`.
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<RootVec>,
    /// Aligned with `positive_roots`.
    coroots: Vec<CorootVec>,
    /// Positive integers with `d_i * a[i][j] = d_j * a[j][i]`.
    symmetrizer: Vec<i64>,
    #[serde(skip)]
    root_index: HashMap<Vec<i64>, usize>,
}

/// Builds the full root system for a valid Cartan type. Positive roots are
/// generated by closure under simple reflections starting from the simple
/// roots, then sorted by height with ties broken so that lower node indices
/// come first.
pub fn build_root_system(cartan_type: &CartanType) -> Result<RootSystem> {
    cartan_type.validate()?;
    let rank = cartan_type.rank();

    // Block-diagonal Cartan matrix.
    let mut cartan = vec![vec![0i64; rank]; rank];
    let mut offset = 0;
    for comp in &cartan_type.components {
        let block = comp.cartan();
        for i in 0..comp.rank {
            for j in 0..comp.rank {
                cartan[offset + i][offset + j] = block[i][j];
            }
        }
        offset += comp.rank;
    }

    // Closure of the simple roots under simple reflections, positive cone only.
    let pair_simple = |beta: &[i64], i: usize| -> i64 {
        cartan[i].iter().zip(beta).map(|(a, b)| a * b).sum()
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..rank {
        let mut e = vec![0i64; rank];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(beta) = queue.pop_front() {
        for i in 0..rank {
            let c = pair_simple(&beta, i);
            let mut gamma = beta.clone();
            gamma[i] -= c;
            if gamma.iter().all(|&x| x >= 0)
                && gamma.iter().any(|&x| x != 0)
                && !seen.contains(&gamma)
            {
                seen.insert(gamma.clone());
                queue.push_back(gamma);
            }
        }
    }
    let mut positive: Vec<Vec<i64>> = seen.into_iter().collect();
    positive.sort_by(|x, y| {
        let hx: i64 = x.iter().sum();
        let hy: i64 = y.iter().sum();
        hx.cmp(&hy).then_with(|| y.cmp(x))
    });

    let expected = cartan_type.positive_root_count();
    if positive.len() != expected {
        return Err(Error::InternalInvariant(format!(
            "root closure produced {} positive roots for {}, expected {}",
            positive.len(),
            cartan_type,
            expected
        )));
    }
    for (i, beta) in positive.iter().take(rank).enumerate() {
        let mut e = vec![0i64; rank];
        e[i] = 1;
        if *beta != e {
            return Err(Error::InternalInvariant(
                "simple roots are not the first entries of the root list".into(),
            ));
        }
    }

    let root_index: HashMap<Vec<i64>, usize> =
        positive.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

    // Coroots by transport: beta^v = s_i((s_i beta)^v) for a height-lowering i.
    let mut coroots: Vec<Option<CorootVec>> = vec![None; positive.len()];
    for (idx, beta) in positive.iter().enumerate() {
        let height: i64 = beta.iter().sum();
        if height == 1 {
            let mut e = vec![0i64; rank];
            let i = beta.iter().position(|&x| x == 1).unwrap();
            e[i] = 1;
            coroots[idx] = Some(CorootVec::new(e));
            continue;
        }
        let mut found = false;
        for i in 0..rank {
            let c = pair_simple(beta, i);
            if c <= 0 {
                continue;
            }
            let mut gamma = beta.clone();
            gamma[i] -= c;
            if gamma.iter().all(|&x| x == 0) {
                continue;
            }
            let gidx = *root_index.get(&gamma).ok_or_else(|| {
                Error::InternalInvariant("reflection left the positive root list".into())
            })?;
            let lower = coroots[gidx].clone().ok_or_else(|| {
                Error::InternalInvariant("coroot transport hit an unprocessed root".into())
            })?;
            // Dual simple reflection on coroot coordinates.
            let scal: i64 =
                lower.coords.iter().enumerate().map(|(j, cj)| cj * cartan[j][i]).sum();
            let mut cv = lower.coords;
            cv[i] -= scal;
            coroots[idx] = Some(CorootVec::new(cv));
            found = true;
            break;
        }
        if !found {
            return Err(Error::InternalInvariant(
                "no height-lowering reflection for a non-simple positive root".into(),
            ));
        }
    }
    let coroots: Vec<CorootVec> = coroots.into_iter().map(|c| c.unwrap()).collect();

    // Symmetrizer per component via rational propagation along Dynkin edges.
    let mut symmetrizer = vec![0i64; rank];
    let mut offset = 0;
    for comp in &cartan_type.components {
        let n = comp.rank;
        let mut num = vec![0i64; n];
        let mut den = vec![1i64; n];
        num[0] = 1;
        let mut stack = vec![0usize];
        let mut visited = vec![false; n];
        visited[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && cartan[offset + i][offset + j] != 0 && !visited[j] {
                    // d_j = d_i * a[i][j] / a[j][i].
                    let mut nn = num[i] * cartan[offset + i][offset + j];
                    let mut dd = den[i] * cartan[offset + j][offset + i];
                    if dd < 0 {
                        nn = -nn;
                        dd = -dd;
                    }
                    let g = gcd(nn.abs(), dd);
                    num[j] = nn / g;
                    den[j] = dd / g;
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
        let lcm_den = den.iter().fold(1i64, |acc, &d| acc / gcd(acc, d) * d);
        let mut scaled: Vec<i64> = (0..n).map(|i| num[i] * (lcm_den / den[i])).collect();
        let g = scaled.iter().fold(0i64, |acc, &v| gcd(acc, v.abs()));
        if g > 1 {
            scaled.iter_mut().for_each(|v| *v /= g);
        }
        symmetrizer[offset..offset + n].copy_from_slice(&scaled);
        offset += n;
    }

    let rs = RootSystem {
        cartan_type: cartan_type.clone(),
        cartan,
        positive_roots: positive.into_iter().map(RootVec::new).collect(),
        coroots,
        symmetrizer,
        root_index,
    };
    rs.check_invariants()?;
    Ok(rs)
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

impl RootSystem {
    fn check_invariants(&self) -> Result<()> {
        let rank = self.rank();
        for i in 0..rank {
            if self.cartan[i][i] != 2 {
                return Err(Error::InternalInvariant("Cartan diagonal is not 2".into()));
            }
            for j in 0..rank {
                if i != j && self.cartan[i][j] > 0 {
                    return Err(Error::InternalInvariant(
                        "positive off-diagonal Cartan entry".into(),
                    ));
                }
                if self.symmetrizer[i] * self.cartan[i][j]
                    != self.symmetrizer[j] * self.cartan[j][i]
                {
                    return Err(Error::InternalInvariant("symmetrizer does not work".into()));
                }
            }
            if self.symmetrizer[i] <= 0 {
                return Err(Error::InternalInvariant("non-positive symmetrizer".into()));
            }
        }
        for (beta, cv) in self.positive_roots.iter().zip(&self.coroots) {
            if cv.coords.iter().any(|&c| c <= 0) && cv.coords.iter().any(|&c| c != 0) {
                // Coroots of positive roots must be nonnegative with support.
                if !cv.coords.iter().all(|&c| c >= 0) {
                    return Err(Error::InternalInvariant(format!(
                        "coroot of {beta:?} has a negative coordinate"
                    )));
                }
            }
            if self.pairing(beta, cv)? != 2 {
                return Err(Error::InternalInvariant(format!(
                    "<beta, beta^v> != 2 for {beta:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn cartan_type(&self) -> &CartanType {
        &self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn positive_roots(&self) -> &[RootVec] {
        &self.positive_roots
    }

    pub fn coroots(&self) -> &[CorootVec] {
        &self.coroots
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn simple_root(&self, i: usize) -> RootVec {
        self.positive_roots[i].clone()
    }

    pub fn simple_coroot(&self, i: usize) -> CorootVec {
        let mut e = vec![0i64; self.rank()];
        e[i] = 1;
        CorootVec::new(e)
    }

    pub fn fundamental_weight(&self, i: usize) -> WeightVec {
        let mut e = vec![0i64; self.rank()];
        e[i] = 1;
        WeightVec::new(e)
    }

    /// Signed lookup: `Some((sign, index))` when `beta` is plus or minus a
    /// positive root.
    pub fn root_lookup(&self, beta: &RootVec) -> Option<(i64, usize)> {
        if let Some(&i) = self.root_index.get(&beta.coords) {
            return Some((1, i));
        }
        let neg: Vec<i64> = beta.coords.iter().map(|c| -c).collect();
        self.root_index.get(&neg).map(|&i| (-1, i))
    }

    pub fn is_positive_root(&self, beta: &RootVec) -> bool {
        matches!(self.root_lookup(beta), Some((1, _)))
    }

    /// `<beta, alpha_i^v>` for a vector in root coordinates.
    pub fn pair_simple_coroot(&self, beta: &RootVec, i: usize) -> i64 {
        self.cartan[i].iter().zip(&beta.coords).map(|(a, b)| a * b).sum()
    }

    /// The bilinear pairing `<beta, c>` of a root-coordinate vector with a
    /// coroot-coordinate vector, computed through the Cartan matrix.
    pub fn pairing(&self, beta: &RootVec, c: &CorootVec) -> Result<i64> {
        self.check_dim(beta.coords.len())?;
        self.check_dim(c.coords.len())?;
        Ok((0..self.rank()).map(|i| c.coords[i] * self.pair_simple_coroot(beta, i)).sum())
    }

    /// The pairing `<w, c>` of a weight with a coroot: a coordinate dot
    /// product since fundamental weights and simple coroots are dual bases.
    pub fn pairing_weight(&self, w: &WeightVec, c: &CorootVec) -> Result<i64> {
        self.check_dim(w.coords.len())?;
        self.check_dim(c.coords.len())?;
        Ok(w.coords.iter().zip(&c.coords).map(|(a, b)| a * b).sum())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got });
        }
        Ok(())
    }

    /// The coroot `beta^v` of a root (either sign).
    pub fn coroot_of(&self, beta: &RootVec) -> Result<CorootVec> {
        match self.root_lookup(beta) {
            Some((sign, i)) if sign > 0 => Ok(self.coroots[i].clone()),
            Some((_, i)) => Ok(self.coroots[i].negated()),
            None => Err(Error::NotARoot(beta.coords.clone())),
        }
    }

    /// Weight coordinates of a root-coordinate vector:
    /// `j`-th coordinate is `<beta, alpha_j^v>`.
    pub fn weight_coords(&self, beta: &RootVec) -> WeightVec {
        WeightVec::new((0..self.rank()).map(|j| self.pair_simple_coroot(beta, j)).collect())
    }

    /// Reflection `s_gamma(v) = v - <v, gamma^v> gamma` on root coordinates.
    pub fn reflect_root(&self, gamma: &RootVec, v: &RootVec) -> Result<RootVec> {
        let gv = self.coroot_of(gamma)?;
        let c = self.pairing(v, &gv)?;
        Ok(RootVec::new(
            v.coords.iter().zip(&gamma.coords).map(|(x, g)| x - c * g).collect(),
        ))
    }

    /// Dual reflection `s_gamma(c) = c - <gamma, c> gamma^v` on coroot
    /// coordinates.
    pub fn reflect_coroot(&self, gamma: &RootVec, v: &CorootVec) -> Result<CorootVec> {
        let gv = self.coroot_of(gamma)?;
        let c = self.pairing(gamma, v)?;
        Ok(CorootVec::new(
            v.coords.iter().zip(&gv.coords).map(|(x, g)| x - c * g).collect(),
        ))
    }

    /// Simple reflection on weight coordinates:
    /// `s_i(w)_j = w_j - w_i * a[j][i]`.
    pub fn reflect_weight_simple(&self, i: usize, w: &WeightVec) -> WeightVec {
        let wi = w.coords[i];
        WeightVec::new(
            w.coords
                .iter()
                .enumerate()
                .map(|(j, &wj)| wj - wi * self.cartan[j][i])
                .collect(),
        )
    }
}

/// Parabolic subdata for a subset `I_P` of the simple nodes: the set
/// `R_P^+` of positive roots supported on `I_P` and the weight `2 rho_P`
/// (sum of the positive roots outside `R_P^+`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicData {
    i_p: Vec<usize>,
    complement: Vec<usize>,
    in_rp: Vec<bool>,
    roots_p: Vec<usize>,
    two_rho_p: WeightVec,
}

/// Computes `ParabolicData` for `I_P` (0-based node indices).
pub fn parabolic_data(rs: &RootSystem, i_p: &[usize]) -> Result<ParabolicData> {
    let rank = rs.rank();
    let mut sorted: Vec<usize> = i_p.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&i| i >= rank) {
        return Err(Error::NodeOutOfRange(bad, rank));
    }
    let in_ip: Vec<bool> = (0..rank).map(|i| sorted.binary_search(&i).is_ok()).collect();
    let complement: Vec<usize> = (0..rank).filter(|&i| !in_ip[i]).collect();

    let mut in_rp = vec![false; rs.num_positive_roots()];
    let mut roots_p = Vec::new();
    let mut two_rho = vec![0i64; rank];
    for (idx, beta) in rs.positive_roots().iter().enumerate() {
        let supported = beta.support().iter().all(|&j| in_ip[j]);
        if supported {
            in_rp[idx] = true;
            roots_p.push(idx);
        } else {
            let w = rs.weight_coords(beta);
            for (t, wj) in two_rho.iter_mut().zip(&w.coords) {
                *t += wj;
            }
        }
        // Support dichotomy: coroot coordinates on the complement vanish
        // exactly for roots of the subsystem.
        let cv = &rs.coroots()[idx];
        let on_complement = complement.iter().any(|&i| cv.coords[i] != 0);
        if supported && on_complement {
            return Err(Error::InternalInvariant(
                "coroot of a subsystem root meets the complement".into(),
            ));
        }
        if !supported && !on_complement {
            return Err(Error::InternalInvariant(
                "coroot of a quantum-side root vanishes on the complement".into(),
            ));
        }
    }
    let two_rho_p = WeightVec::new(two_rho);
    for &j in &sorted {
        if two_rho_p.coords[j] != 0 {
            return Err(Error::InternalInvariant(
                "2 rho_P pairs nontrivially with a subsystem coroot".into(),
            ));
        }
    }
    Ok(ParabolicData { i_p: sorted, complement, in_rp, roots_p, two_rho_p })
}

impl ParabolicData {
    pub fn i_p(&self) -> &[usize] {
        &self.i_p
    }

    /// The complement `I^P`, the nodes indexing quantum directions.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn contains_node(&self, i: usize) -> bool {
        self.i_p.binary_search(&i).is_ok()
    }

    /// Whether positive root `idx` lies in `R_P^+`.
    pub fn root_in_subsystem(&self, idx: usize) -> bool {
        self.in_rp[idx]
    }

    pub fn subsystem_roots(&self) -> &[usize] {
        &self.roots_p
    }

    pub fn num_subsystem_roots(&self) -> usize {
        self.roots_p.len()
    }

    pub fn two_rho_p(&self) -> &WeightVec {
        &self.two_rho_p
    }

    /// Position of node `i` within the ordered complement, if any.
    pub fn complement_position(&self, i: usize) -> Option<usize> {
        self.complement.binary_search(&i).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(desc: &str) -> RootSystem {
        build_root_system(&desc.parse().unwrap()).unwrap()
    }

    #[test]
    fn a1_is_forced() {
        let r = rs("A1");
        assert_eq!(r.num_positive_roots(), 1);
        assert_eq!(r.cartan(), &[vec![2]]);
    }

    #[test]
    fn a2_closure() {
        let r = rs("A2");
        let coords: Vec<Vec<i64>> = r.positive_roots().iter().map(|b| b.coords.clone()).collect();
        assert_eq!(coords, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    // Independent closure oracle: fixed-point iteration over raw coordinate
    // vectors with a height cap, no sorting or dedup tricks shared with the
    // production path.
    fn closure_oracle(cartan: &[Vec<i64>], height_cap: i64) -> HashSet<Vec<i64>> {
        let rank = cartan.len();
        let mut set: HashSet<Vec<i64>> = HashSet::new();
        for i in 0..rank {
            let mut e = vec![0i64; rank];
            e[i] = 1;
            set.insert(e);
        }
        loop {
            let mut added = false;
            let snapshot: Vec<Vec<i64>> = set.iter().cloned().collect();
            for beta in snapshot {
                for i in 0..rank {
                    let c: i64 = cartan[i].iter().zip(&beta).map(|(a, b)| a * b).sum();
                    let mut g = beta.clone();
                    g[i] -= c;
                    let h: i64 = g.iter().sum();
                    if g.iter().all(|&x| x >= 0) && h >= 1 && h <= height_cap && !set.contains(&g)
                    {
                        set.insert(g);
                        added = true;
                    }
                }
            }
            if !added {
                return set;
            }
        }
    }

    #[test]
    fn g2_and_b3_counts_against_oracle() {
        for (desc, expect) in [("G2", 6usize), ("B3", 9)] {
            let r = rs(desc);
            assert_eq!(r.num_positive_roots(), expect, "{desc}");
            let oracle = closure_oracle(r.cartan(), 30);
            assert_eq!(oracle.len(), expect, "{desc} oracle");
            for beta in r.positive_roots() {
                assert!(oracle.contains(&beta.coords));
            }
        }
    }

    #[test]
    fn counts_match_type_formulas() {
        for (desc, expect) in
            [("A4", 10usize), ("C3", 9), ("D4", 12), ("F4", 24), ("E6", 36), ("A2xA1", 4)]
        {
            assert_eq!(rs(desc).num_positive_roots(), expect, "{desc}");
        }
    }

    #[test]
    fn pairing_duality_and_cartan_entries() {
        let a2 = rs("A2");
        let w = a2.fundamental_weight(0);
        assert_eq!(a2.pairing_weight(&w, &a2.simple_coroot(0)).unwrap(), 1);
        assert_eq!(a2.pairing_weight(&w, &a2.simple_coroot(1)).unwrap(), 0);
        assert_eq!(a2.pairing(&a2.simple_root(1), &a2.simple_coroot(0)).unwrap(), -1);

        // B2, alpha_1 long: <alpha_1 + alpha_2, alpha_2^v> = -2 + 2 = 0.
        let b2 = rs("B2");
        let sum = RootVec::new(vec![1, 1]);
        assert_eq!(b2.pairing(&sum, &b2.simple_coroot(1)).unwrap(), 0);
    }

    #[test]
    fn pairing_dimension_mismatch_rejected() {
        let a2 = rs("A2");
        let bad = CorootVec::new(vec![1]);
        assert!(matches!(
            a2.pairing(&a2.simple_root(0), &bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coroot_examples() {
        let a2 = rs("A2");
        let c = a2.coroot_of(&RootVec::new(vec![1, 1])).unwrap();
        assert_eq!(c.coords, vec![1, 1]);

        // B2 with alpha_1 long: (alpha_1 + alpha_2)^v = 2 alpha_1^v + alpha_2^v.
        // Oracle: transport along s_1, i.e. the dual reflection applied to
        // alpha_2^v, since alpha_1 + alpha_2 = s_1(alpha_2).
        let b2 = rs("B2");
        let via_orbit = b2
            .reflect_coroot(&b2.simple_root(0), &b2.simple_coroot(1))
            .unwrap();
        assert_eq!(via_orbit.coords, vec![2, 1]);
        let c = b2.coroot_of(&RootVec::new(vec![1, 1])).unwrap();
        assert_eq!(c, via_orbit);

        // G2 highest root 3 alpha_1 + 2 alpha_2 = s_2 s_1 (alpha_2); transport
        // oracle output frozen: coroot coordinates (1, 2).
        let g2 = rs("G2");
        let theta = RootVec::new(vec![3, 2]);
        assert!(g2.is_positive_root(&theta));
        let step1 = g2.reflect_coroot(&g2.simple_root(0), &g2.simple_coroot(1)).unwrap();
        let oracle = g2.reflect_coroot(&g2.simple_root(1), &step1).unwrap();
        assert_eq!(oracle.coords, vec![1, 2]);
        assert_eq!(g2.coroot_of(&theta).unwrap(), oracle);
    }

    #[test]
    fn coroot_rejects_non_roots() {
        let a2 = rs("A2");
        assert!(matches!(
            a2.coroot_of(&RootVec::new(vec![2, 0])),
            Err(Error::NotARoot(_))
        ));
    }

    #[test]
    fn reflect_examples() {
        let a2 = rs("A2");
        let a1 = a2.simple_root(0);
        assert_eq!(a2.reflect_root(&a1, &a1).unwrap().coords, vec![-1, 0]);
        assert_eq!(a2.reflect_root(&a1, &a2.simple_root(1)).unwrap().coords, vec![1, 1]);
    }

    #[test]
    fn reflection_is_an_involution_on_f4_roots() {
        let f4 = rs("F4");
        let roots = f4.positive_roots().to_vec();
        // Deterministic selection standing in for 20 random picks.
        for k in 0..20usize {
            let gamma = &roots[(7 * k + 3) % roots.len()];
            let v = &roots[(11 * k + 5) % roots.len()];
            let once = f4.reflect_root(gamma, v).unwrap();
            let twice = f4.reflect_root(gamma, &once).unwrap();
            assert_eq!(&twice, v);
            let cv = f4.coroot_of(v).unwrap();
            let conce = f4.reflect_coroot(gamma, &cv).unwrap();
            let ctwice = f4.reflect_coroot(gamma, &conce).unwrap();
            assert_eq!(ctwice, cv);
        }
    }

    #[test]
    fn closure_under_simple_reflections() {
        for desc in ["A3", "B3", "C3", "G2", "D4"] {
            let r = rs(desc);
            for beta in r.positive_roots() {
                for i in 0..r.rank() {
                    let img = r.reflect_root(&r.simple_root(i), beta).unwrap();
                    assert!(r.root_lookup(&img).is_some(), "{desc}: {beta:?} -> {img:?}");
                }
            }
        }
    }

    #[test]
    fn coroots_are_positive_and_pair_to_two() {
        for desc in ["A4", "B3", "C3", "D4", "F4", "G2"] {
            let r = rs(desc);
            for (beta, cv) in r.positive_roots().iter().zip(r.coroots()) {
                assert!(cv.coords.iter().all(|&c| c >= 0), "{desc}");
                assert!(cv.coords.iter().any(|&c| c > 0), "{desc}");
                assert_eq!(r.pairing(beta, cv).unwrap(), 2, "{desc}");
            }
        }
    }

    #[test]
    fn symmetrizer_relation() {
        for desc in ["B3", "C3", "F4", "G2", "A2xB2"] {
            let r = rs(desc);
            let d = r.symmetrizer();
            for i in 0..r.rank() {
                for j in 0..r.rank() {
                    assert_eq!(
                        d[i] * r.cartan()[i][j],
                        d[j] * r.cartan()[j][i],
                        "{desc} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn parabolic_full_and_empty() {
        let a2 = rs("A2");
        let full = parabolic_data(&a2, &[0, 1]).unwrap();
        assert_eq!(full.num_subsystem_roots(), 3);
        assert!(full.two_rho_p().is_zero());
        assert!(full.complement().is_empty());

        let borel = parabolic_data(&a2, &[]).unwrap();
        assert_eq!(borel.num_subsystem_roots(), 0);
        for i in 0..2 {
            assert_eq!(
                a2.pairing_weight(borel.two_rho_p(), &a2.simple_coroot(i)).unwrap(),
                2
            );
        }
    }

    #[test]
    fn parabolic_support_filter_gr24() {
        let a3 = rs("A3");
        let par = parabolic_data(&a3, &[0, 2]).unwrap();
        assert_eq!(par.num_subsystem_roots(), 2);
        assert_eq!(par.complement(), &[1]);
    }

    #[test]
    fn borel_two_rho_pairs_to_two_everywhere() {
        for desc in ["A3", "B3", "G2", "D4"] {
            let r = rs(desc);
            let par = parabolic_data(&r, &[]).unwrap();
            for i in 0..r.rank() {
                assert_eq!(
                    r.pairing_weight(par.two_rho_p(), &r.simple_coroot(i)).unwrap(),
                    2,
                    "{desc} node {i}"
                );
            }
        }
    }

    #[test]
    fn parabolic_rejects_bad_nodes() {
        let a2 = rs("A2");
        assert!(matches!(parabolic_data(&a2, &[5]), Err(Error::NodeOutOfRange(5, 2))));
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("A3".parse::<CartanType>().unwrap().descriptor(), "A3");
        assert_eq!("a2xg2".parse::<CartanType>().unwrap().descriptor(), "A2xG2");
        assert!("Z9".parse::<CartanType>().is_err());
        assert!("E9".parse::<CartanType>().is_err());
        assert!("B1".parse::<CartanType>().is_err());
        assert!("".parse::<CartanType>().is_err());
    }
}
