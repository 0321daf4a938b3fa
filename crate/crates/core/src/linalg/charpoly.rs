use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactMatrix, LinalgError, UniPoly};
use crate::field::GaussRat;

/// Characteristic polynomial `det(x I - M)` by the Faddeev-LeVerrier
/// recurrence. Exact over a field of characteristic zero.
pub fn char_poly(m: &ExactMatrix) -> Result<UniPoly, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![GaussRat::zero(); n + 1];
    coeffs[n] = GaussRat::one();
    let mut mk = ExactMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &ExactMatrix::identity(n).scale(&coeffs[n - k + 1]);
        let am = m * &mk;
        coeffs[n - k] = -(&am.trace() / &GaussRat::from(k as i64));
    }
    Ok(UniPoly::new(coeffs))
}

/// Smallest `k >= 1` with `(m - lambda)^k = 0`, if any `k <= dim` works.
pub fn nilpotency_index(m: &ExactMatrix, lambda: &GaussRat) -> Option<usize> {
    let n = m.rows();
    if n == 0 {
        return Some(1);
    }
    let shifted = m.shift(lambda);
    let mut p = shifted.clone();
    for k in 1..=n {
        if p.is_zero() {
            return Some(k);
        }
        p = &p * &shifted;
    }
    None
}

/// Roots of a polynomial that lie in `Q(i)`, with multiplicities, plus the
/// monic cofactor carrying every remaining root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSplit {
    pub roots: Vec<(GaussRat, usize)>,
    pub residual: UniPoly,
    /// Set when candidate enumeration was abandoned (integer too large to
    /// factor by trial division); roots may then be missing.
    pub incomplete: bool,
}

const TRIAL_LIMIT: u64 = 1_000_000;
const MAX_DIVISORS: usize = 4096;

/// Finds every root of `p` in `Q(i)`.
///
/// Candidates come from the rational-root theorem in the Gaussian integers:
/// after clearing denominators a root `a/b` in lowest terms has `a | c_0`
/// and `b | c_n`. Divisors are enumerated from the Gaussian prime
/// factorization, obtained by factoring the integer norms. No numerical
/// approximation is involved.
pub fn gaussian_roots(p: &UniPoly) -> RootSplit {
    let Some(deg) = p.degree() else {
        return RootSplit {
            roots: Vec::new(),
            residual: UniPoly::zero(),
            incomplete: false,
        };
    };
    let mut q = p.monic();
    let mut roots: Vec<(GaussRat, usize)> = Vec::new();
    let mut zero_mult = 0;
    while q.degree().unwrap_or(0) > 0 && q.coeff(0).is_zero() {
        q = UniPoly::new(q.coeffs()[1..].to_vec());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((GaussRat::zero(), zero_mult));
    }
    let mut incomplete = false;
    if q.degree().unwrap_or(0) > 0 {
        let sf = q.div_rem(&q.gcd(&q.derivative())).0;
        match candidates(&sf) {
            Some(cands) => {
                let want = sf.degree().unwrap_or(0);
                let mut found = 0;
                for r in cands {
                    if found == want {
                        break;
                    }
                    if sf.eval(&r).is_zero() {
                        found += 1;
                        let lin = UniPoly::linear(&r);
                        let mut mult = 0;
                        loop {
                            let (quo, rem) = q.div_rem(&lin);
                            if !rem.is_zero() {
                                break;
                            }
                            q = quo;
                            mult += 1;
                        }
                        roots.push((r, mult));
                    }
                }
            }
            None => incomplete = true,
        }
    }
    roots.sort();
    debug_assert!(roots.iter().map(|r| r.1).sum::<usize>() + q.degree().unwrap_or(0) == deg);
    RootSplit {
        roots,
        residual: q,
        incomplete,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn new(re: BigInt, im: BigInt) -> Self {
        GInt { re, im }
    }

    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    fn mul(&self, o: &GInt) -> GInt {
        GInt::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    /// Exact quotient `self / d` when it exists in `Z[i]`.
    fn div_exact(&self, d: &GInt) -> Option<GInt> {
        let n = d.norm();
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        if (&re % &n).is_zero() && (&im % &n).is_zero() {
            Some(GInt::new(re / &n, im / n))
        } else {
            None
        }
    }

    fn to_gauss(&self) -> GaussRat {
        GaussRat::new(
            BigRational::from_integer(self.re.clone()),
            BigRational::from_integer(self.im.clone()),
        )
    }
}

/// Prime factorization of a positive integer by trial division; `None` if a
/// cofactor beyond `TRIAL_LIMIT^2` cannot be certified prime.
fn factor_int(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2u32);
    let limit = BigInt::from(TRIAL_LIMIT);
    while &d * &d <= n {
        if d > limit {
            return None;
        }
        if (&n % &d).is_zero() {
            let mut e = 0;
            while (&n % &d).is_zero() {
                n /= &d;
                e += 1;
            }
            out.push((d.clone(), e));
        }
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    Some(out)
}

/// A Gaussian prime above the rational prime `p` (`p = 2` or `p = 1 mod 4`
/// split, `p = 3 mod 4` inert).
fn gaussian_primes_over(p: &BigInt) -> Option<Vec<GInt>> {
    let two = BigInt::from(2u32);
    if *p == two {
        return Some(vec![GInt::new(BigInt::one(), BigInt::one())]);
    }
    if (p % BigInt::from(4u32)) == BigInt::from(3u32) {
        return Some(vec![GInt::new(p.clone(), BigInt::zero())]);
    }
    // p = a^2 + b^2; the search is bounded by sqrt(p) <= TRIAL_LIMIT.
    let pu = p.to_u128()?;
    let mut a: u128 = 1;
    while a * a < pu {
        let rest = pu - a * a;
        let b = (rest as f64).sqrt() as u128;
        for cand in [b.saturating_sub(1), b, b + 1] {
            if cand * cand == rest {
                let g = GInt::new(BigInt::from(a), BigInt::from(cand));
                let h = GInt::new(BigInt::from(a), -BigInt::from(cand));
                return Some(vec![g, h]);
            }
        }
        a += 1;
        if a > TRIAL_LIMIT as u128 {
            return None;
        }
    }
    None
}

/// All divisors of `c` in `Z[i]` up to units.
fn divisors(c: &GInt) -> Option<Vec<GInt>> {
    let mut primes: Vec<(GInt, u32)> = Vec::new();
    let mut rest = c.clone();
    for (p, _) in factor_int(&c.norm())? {
        for pi in gaussian_primes_over(&p)? {
            let mut e = 0;
            while let Some(q) = rest.div_exact(&pi) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                primes.push((pi, e));
            }
        }
    }
    let count: usize = primes.iter().map(|(_, e)| *e as usize + 1).product();
    if count > MAX_DIVISORS {
        return None;
    }
    let mut out = vec![GInt::new(BigInt::one(), BigInt::zero())];
    for (pi, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = acc.mul(&pi);
                next.push(acc.clone());
            }
        }
        out = next;
    }
    Some(out)
}

fn candidates(p: &UniPoly) -> Option<BTreeSet<GaussRat>> {
    let scale = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()));
    let to_gint = |c: &GaussRat| {
        let s = GaussRat::from(scale.clone());
        let v = c * &s;
        GInt::new(v.re().to_integer(), v.im().to_integer())
    };
    let c0 = to_gint(&p.coeff(0));
    let cn = to_gint(p.lead()?);
    let nums = divisors(&c0)?;
    let dens = divisors(&cn)?;
    let units = [
        GaussRat::one(),
        -GaussRat::one(),
        GaussRat::i(),
        -GaussRat::i(),
    ];
    let mut out = BTreeSet::new();
    for a in &nums {
        for b in &dens {
            let r = &a.to_gauss() / &b.to_gauss();
            for u in &units {
                out.insert(&r * u);
            }
        }
    }
    Some(out)
}
