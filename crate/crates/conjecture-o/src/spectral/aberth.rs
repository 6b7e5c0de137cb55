//! Simultaneous root refinement for monic integer polynomials.
//!
//! Coefficients are rescaled by a power of two chosen from a Cauchy-style
//! root bound so everything fits in `f64` with the roots inside the unit
//! disk, an Aberth-Ehrlich iteration finds all roots at once, and a few
//! Newton steps in double-double arithmetic polish each root before the
//! scale is undone. Intended for square-free inputs, where the iteration
//! converges fast and roots stay separated.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

/// `c / 2^shift` as an `f64`, correctly handling values far outside the
/// representable range of `c` itself.
fn scaled_to_f64(c: &BigInt, shift: i64) -> f64 {
    if c.is_zero() {
        return 0.0;
    }
    let bits = c.bits() as i64;
    let take = (bits - 53).max(0);
    let m = (c >> take as u64).to_f64().expect("53-bit mantissa fits");
    ldexp(m, take - shift)
}

fn ldexp(x: f64, exp: i64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if exp > 2000 {
        return if x > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    if exp < -2000 {
        return 0.0;
    }
    let mut out = x;
    let mut e = exp;
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    out * 2f64.powi(e as i32)
}

// ---------------------------------------------------------------------------
// Double-double arithmetic for the polish step.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from_c64(z: Complex64) -> Cdd {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn add(self, other: Cdd) -> Cdd {
        Cdd { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    fn mul(self, other: Cdd) -> Cdd {
        let re = self.re.mul(other.re).add(neg(self.im.mul(other.im)));
        let im = self.re.mul(other.im).add(self.im.mul(other.re));
        Cdd { re, im }
    }
}

fn neg(d: Dd) -> Dd {
    Dd { hi: -d.hi, lo: -d.lo }
}

/// `c / 2^shift` as a double-double value.
fn scaled_to_dd(c: &BigInt, shift: i64) -> Dd {
    if c.is_zero() {
        return Dd::from_f64(0.0);
    }
    let bits = c.bits() as i64;
    let take = (bits - 53).max(0);
    let m = (c >> take as u64).to_f64().expect("mantissa fits");
    let hi = ldexp(m, take - shift);
    let rem = c - (BigInt::from(m as i64) << take as u64);
    let lo = scaled_to_f64(&rem, shift);
    Dd { hi, lo }
}

// ---------------------------------------------------------------------------
// Aberth-Ehrlich iteration.
// ---------------------------------------------------------------------------

/// All roots of a monic integer polynomial, multiplicities ignored (each
/// distinct root of a square-free input appears once).
pub fn roots_of_monic(poly: &[BigInt]) -> Vec<Complex64> {
    let mut coeffs = poly.to_vec();
    while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return vec![];
    }

    // Exact zero roots: strip trailing zero coefficients.
    let zero_count = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_count];
    let reduced: Vec<BigInt> = coeffs[zero_count..].to_vec();
    let n = reduced.len() - 1;
    if n == 0 {
        return roots;
    }

    // Scale x = 2^e y so the y-roots sit in (roughly) the unit disk:
    // Cauchy bound |x| <= 1 + max |c_i / c_n|, in bit sizes.
    let top_bits = reduced[n].bits() as i64; // = 1 for monic, kept general
    let mut e: i64 = 1;
    for (i, c) in reduced.iter().enumerate().take(n) {
        if c.is_zero() {
            continue;
        }
        let excess = c.bits() as i64 - top_bits + 1;
        let per_step = (excess + (n - i) as i64 - 1).div_euclid((n - i) as i64) + 1;
        e = e.max(per_step);
    }

    let scaled: Vec<f64> = reduced
        .iter()
        .enumerate()
        .map(|(i, c)| scaled_to_f64(c, e * (n - i) as i64))
        .collect();
    let scaled_dd: Vec<Cdd> = reduced
        .iter()
        .enumerate()
        .map(|(i, c)| Cdd { re: scaled_to_dd(c, e * (n - i) as i64), im: Dd::from_f64(0.0) })
        .collect();

    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * (j as f64 + 0.26) / (n as f64) + 0.42;
            Complex64::from_polar(0.9, angle)
        })
        .collect();

    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for j in 0..n {
            let (p, dp) = horner_both(&scaled, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 { p } else { p / dp };
            let mut sum = Complex64::new(0.0, 0.0);
            for (k, zk) in z.iter().enumerate() {
                if k != j {
                    let diff = z[j] - zk;
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let delta = if denom.norm() == 0.0 { w } else { w / denom };
            z[j] -= delta;
            max_step = max_step.max(delta.norm() / z[j].norm().max(1.0));
        }
        if max_step < 5e-15 {
            break;
        }
    }

    // Newton polish in double-double arithmetic.
    for zj in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_both_dd(&scaled_dd, *zj);
            if dp.norm() < 1e-300 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zj -= step;
            if step.norm() < 1e-18 * zj.norm().max(1e-6) {
                break;
            }
        }
    }

    let scale = ldexp(1.0, e);
    roots.extend(z.into_iter().map(|zz| zz * scale));
    roots
}

fn horner_both(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let n = coeffs.len() - 1;
    let mut p = Complex64::new(coeffs[n], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + Complex64::new(coeffs[k], 0.0);
    }
    (p, dp)
}

fn horner_both_dd(coeffs: &[Cdd], z: Complex64) -> (Complex64, Complex64) {
    let n = coeffs.len() - 1;
    let zc = Cdd::from_c64(z);
    let mut p = coeffs[n];
    let mut dp = Cdd::from_c64(Complex64::new(0.0, 0.0));
    for k in (0..n).rev() {
        dp = dp.mul(zc).add(p);
        p = p.mul(zc).add(coeffs[k]);
    }
    (p.to_c64(), dp.to_c64())
}
