//! Exact characteristic polynomials of integer matrices.
//!
//! The polynomial is computed modulo a batch of 31-bit primes via
//! Hessenberg reduction and the Hessenberg determinant recurrence, then
//! reconstructed over the integers by the Chinese remainder theorem against
//! a Hadamard-style coefficient bound. Polynomial gcds over the integers
//! are computed modularly as well, with an exact trial-division check that
//! certifies the result, which makes Yun's square-free decomposition fully
//! exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::IntMatrix;

// ---------------------------------------------------------------------------
// Modular arithmetic on u64 values below 2^31.
// ---------------------------------------------------------------------------

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic descending stream of 31-bit primes.
pub(crate) struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    pub(crate) fn new() -> Self {
        PrimeStream { next: (1 << 31) - 1 }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next > (1 << 30) {
            let c = self.next;
            self.next -= 2;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Characteristic polynomial modulo a prime.
// ---------------------------------------------------------------------------

/// Charpoly of an `n x n` matrix over `Z_p`, monic, coefficient of `x^k` at
/// index `k`. Row-major input, entries already reduced.
fn charpoly_mod_p(mat: &[u64], n: usize, p: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut h = mat.to_vec();
    let at = |h: &[u64], i: usize, j: usize| h[i * n + j];

    // Similarity reduction to upper Hessenberg form.
    for j in 0..n.saturating_sub(2) {
        let pivot = (j + 1..n).find(|&i| at(&h, i, j) != 0);
        let Some(pivot) = pivot else { continue };
        if pivot != j + 1 {
            for col in 0..n {
                h.swap(pivot * n + col, (j + 1) * n + col);
            }
            for row in 0..n {
                h.swap(row * n + pivot, row * n + j + 1);
            }
        }
        let inv = inv_mod(at(&h, j + 1, j), p);
        for i in j + 2..n {
            let lead = at(&h, i, j);
            if lead == 0 {
                continue;
            }
            let f = mul_mod(lead, inv, p);
            for col in j..n {
                let sub = mul_mod(f, at(&h, j + 1, col), p);
                h[i * n + col] = sub_mod(at(&h, i, col), sub, p);
            }
            for row in 0..n {
                let add = mul_mod(f, at(&h, row, i), p);
                h[row * n + j + 1] = add_mod(at(&h, row, j + 1), add, p);
            }
        }
    }

    // Hessenberg determinant recurrence for det(xI - H).
    let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1]);
    for k in 1..=n {
        let prev = &polys[k - 1];
        // (x - h[k-1][k-1]) * p_{k-1}
        let mut q = vec![0u64; k + 1];
        for (idx, &c) in prev.iter().enumerate() {
            q[idx + 1] = add_mod(q[idx + 1], c, p);
            let sub = mul_mod(at(&h, k - 1, k - 1), c, p);
            q[idx] = sub_mod(q[idx], sub, p);
        }
        let mut prod = 1u64;
        for i in (1..k).rev() {
            prod = mul_mod(prod, at(&h, i, i - 1), p);
            if prod == 0 {
                break;
            }
            let coeff = mul_mod(at(&h, i - 1, k - 1), prod, p);
            if coeff == 0 {
                continue;
            }
            for (idx, &c) in polys[i - 1].iter().enumerate() {
                q[idx] = sub_mod(q[idx], mul_mod(coeff, c, p), p);
            }
        }
        polys.push(q);
    }
    polys.pop().unwrap()
}

// ---------------------------------------------------------------------------
// CRT reconstruction.
// ---------------------------------------------------------------------------

fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("reduced residue fits")
}

/// Combines residue vectors into symmetric-range integers.
fn crt_combine(residues: &[(u64, Vec<u64>)]) -> Vec<BigInt> {
    let len = residues[0].1.len();
    let mut value: Vec<BigInt> = residues[0].1.iter().map(|&r| BigInt::from(r)).collect();
    let mut modulus = BigInt::from(residues[0].0);
    for (p, rs) in &residues[1..] {
        let m_mod_p = bigint_mod_u64(&modulus, *p);
        let m_inv = inv_mod(m_mod_p, *p);
        for i in 0..len {
            let cur = bigint_mod_u64(&value[i], *p);
            let t = mul_mod(sub_mod(rs[i] % *p, cur, *p), m_inv, *p);
            value[i] += &modulus * BigInt::from(t);
        }
        modulus *= BigInt::from(*p);
    }
    let half = &modulus >> 1;
    for v in &mut value {
        if &*v > &half {
            *v -= &modulus;
        }
    }
    value
}

/// Exact characteristic polynomial `det(xI - M)`, monic, coefficient of
/// `x^k` at index `k`.
pub fn charpoly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.size();
    if n == 0 {
        return vec![BigInt::one()];
    }
    // Hadamard-style bound on coefficient bit size:
    // |c_k| <= C(n, n-k) * prod_i max(1, ||row_i||_2).
    let mut bits_bound = n as u64 + 8;
    for i in 0..n {
        let norm2: BigInt = (0..n).map(|j| m.get(i, j) * m.get(i, j)).sum();
        if norm2 > BigInt::one() {
            bits_bound += norm2.bits() / 2 + 1;
        }
    }

    let mut residues: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut acc_bits = 0u64;
    for p in PrimeStream::new() {
        let reduced: Vec<u64> = (0..n * n)
            .map(|k| bigint_mod_u64(m.get(k / n, k % n), p))
            .collect();
        residues.push((p, charpoly_mod_p(&reduced, n, p)));
        acc_bits += 30;
        if acc_bits > bits_bound + 2 {
            break;
        }
    }
    crt_combine(&residues)
}

// ---------------------------------------------------------------------------
// Integer polynomial utilities.
// ---------------------------------------------------------------------------

pub fn trim(p: &[BigInt]) -> Vec<BigInt> {
    let mut v = p.to_vec();
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

pub fn degree(p: &[BigInt]) -> usize {
    trim(p).len() - 1
}

pub fn is_zero_poly(p: &[BigInt]) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect()
}

pub fn eval_poly(p: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if is_zero_poly(a) || is_zero_poly(b) {
        return vec![BigInt::zero()];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
            x - y
        })
        .collect()
}

/// Division by a monic divisor over the integers; errors unless the
/// remainder vanishes identically.
pub fn poly_divide_exact(num: &[BigInt], den: &[BigInt]) -> Result<Vec<BigInt>> {
    let den = trim(den);
    if den.last().map(|c| !c.is_one()).unwrap_or(true) {
        return Err(Error::InternalInvariant("exact division needs a monic divisor".into()));
    }
    let mut rem = trim(num);
    let dd = den.len() - 1;
    if rem.len() - 1 < dd || is_zero_poly(&rem) {
        if is_zero_poly(&rem) {
            return Ok(vec![BigInt::zero()]);
        }
        return Err(Error::InternalInvariant("exact division left a remainder".into()));
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (j, dn) in den.iter().enumerate() {
            rem[k + j] -= &c * dn;
        }
    }
    if !is_zero_poly(&rem) {
        return Err(Error::InternalInvariant("exact division left a remainder".into()));
    }
    Ok(trim(&quot))
}

// ---------------------------------------------------------------------------
// Certified monic gcd via modular images.
// ---------------------------------------------------------------------------

fn poly_mod_p(p: &[BigInt], prime: u64) -> Vec<u64> {
    let mut v: Vec<u64> = p.iter().map(|c| bigint_mod_u64(c, prime)).collect();
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn gcd_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let trim_p = |v: &mut Vec<u64>| {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    };
    trim_p(&mut r0);
    trim_p(&mut r1);
    while !(r1.len() == 1 && r1[0] == 0) {
        // r2 = r0 mod r1
        let inv = inv_mod(*r1.last().unwrap(), p);
        let mut rem = r0.clone();
        if rem.len() >= r1.len() {
            for k in (0..=rem.len() - r1.len()).rev() {
                let c = mul_mod(rem[k + r1.len() - 1], inv, p);
                if c == 0 {
                    continue;
                }
                for (j, dj) in r1.iter().enumerate() {
                    rem[k + j] = sub_mod(rem[k + j], mul_mod(c, *dj, p), p);
                }
            }
        }
        trim_p(&mut rem);
        rem.truncate(r1.len().saturating_sub(1).max(1));
        trim_p(&mut rem);
        r0 = r1;
        r1 = rem;
    }
    // Normalize monic.
    let inv = inv_mod(*r0.last().unwrap(), p);
    r0.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn divides_exactly(num: &[BigInt], den: &[BigInt]) -> bool {
    poly_divide_exact(num, den).is_ok()
}

/// Monic gcd of two integer polynomials, at least one of them monic.
/// Computed from modular images of minimal degree and certified by exact
/// trial division.
pub fn monic_gcd(a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>> {
    let a = trim(a);
    let b = trim(b);
    if is_zero_poly(&b) {
        if a.last().map(|c| c.is_one()).unwrap_or(false) {
            return Ok(a);
        }
        return Err(Error::InternalInvariant("gcd with zero needs a monic argument".into()));
    }
    if is_zero_poly(&a) {
        return monic_gcd(&b, &a);
    }
    let lc_a = a.last().unwrap().clone();
    let lc_b = b.last().unwrap().clone();

    let mut best_deg = usize::MAX;
    let mut batch: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut tried = 0usize;
    for p in PrimeStream::new() {
        tried += 1;
        if tried > 512 {
            break;
        }
        if bigint_mod_u64(&lc_a, p) == 0 || bigint_mod_u64(&lc_b, p) == 0 {
            continue;
        }
        let g_p = gcd_mod_p(&poly_mod_p(&a, p), &poly_mod_p(&b, p), p);
        let deg = g_p.len() - 1;
        if deg == 0 {
            return Ok(vec![BigInt::one()]);
        }
        if deg < best_deg {
            best_deg = deg;
            batch.clear();
        }
        if deg == best_deg {
            batch.push((p, g_p));
            let candidate = crt_combine(&batch);
            if candidate.last().map(|c| c.is_one()).unwrap_or(false)
                && divides_exactly(&a, &candidate)
                && divides_exactly(&b, &candidate)
            {
                return Ok(candidate);
            }
        }
    }
    Err(Error::ExactGcdFailed)
}

/// Yun's square-free decomposition of a monic integer polynomial: returns
/// pairwise-coprime monic factors with their multiplicities, certified by
/// exact divisions and a final multiply-back check.
pub fn square_free_decomposition(c: &[BigInt]) -> Result<Vec<(Vec<BigInt>, usize)>> {
    let c = trim(c);
    if c.last().map(|x| !x.is_one()).unwrap_or(true) {
        return Err(Error::InternalInvariant(
            "square-free decomposition needs a monic polynomial".into(),
        ));
    }
    if c.len() == 1 {
        return Ok(vec![]);
    }
    let cp = derivative(&c);
    let g = monic_gcd(&c, &cp)?;
    let mut out: Vec<(Vec<BigInt>, usize)> = Vec::new();
    if degree(&g) == 0 {
        out.push((c.clone(), 1));
    } else {
        let mut w = poly_divide_exact(&c, &g)?;
        let mut y = poly_divide_exact(&cp, &g)?;
        let mut k = 1usize;
        loop {
            let z = poly_sub(&y, &derivative(&w));
            let f = monic_gcd(&w, &z)?;
            if degree(&f) >= 1 {
                out.push((f.clone(), k));
            }
            w = poly_divide_exact(&w, &f)?;
            y = poly_divide_exact(&trim(&z), &f)?;
            k += 1;
            if degree(&w) == 0 {
                break;
            }
            if k > c.len() {
                return Err(Error::InternalInvariant(
                    "square-free decomposition did not terminate".into(),
                ));
            }
        }
    }
    // Multiply-back certificate.
    let mut product = vec![BigInt::one()];
    for (f, mult) in &out {
        for _ in 0..*mult {
            product = poly_mul(&product, f);
        }
    }
    if trim(&product) != c {
        return Err(Error::InternalInvariant(
            "square-free decomposition failed the multiply-back check".into(),
        ));
    }
    Ok(out)
}
