//! Univariate polynomials over the rationals with exact real-root isolation
//! (Sturm sequences) and real algebraic numbers given by an isolating
//! interval.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{rational_to_f64, Rational};

/// Dense coefficients, lowest degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&k| Rational::from_integer(BigInt::from(k))).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => self.scale(&(Rational::one() / l)),
            None => UniPoly::zero(),
        }
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: returns `(k, f_k)` with
    /// `f = c * prod f_k^k`, each `f_k` square-free and monic, and the `f_k`
    /// pairwise coprime. Factors of degree zero are omitted.
    pub fn square_free_decomposition(&self) -> Vec<(usize, UniPoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((k, g.clone()));
            }
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
            k += 1;
        }
        out
    }

    pub fn square_free_part(&self) -> UniPoly {
        let f = self.monic();
        let g = f.gcd(&f.derivative());
        f.div_rem(&g).0
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        seq
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("zero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Isolates all real roots. Roots met exactly during bisection are
    /// returned as rational numbers.
    pub fn real_roots(&self) -> Vec<RealAlgebraic> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let sf = self.square_free_part();
        let sturm = sf.sturm_sequence();
        let b = sf.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            // count roots in (lo, hi]
            let n = sign_changes(&sturm, &lo) - sign_changes(&sturm, &hi);
            if n == 0 {
                continue;
            }
            if sf.eval(&hi).is_zero() {
                out.push(RealAlgebraic::Rational(hi.clone()));
                if n > 1 {
                    // pull hi down until (hi', hi] holds only the root at hi
                    let mut step = (&hi - &lo) / Rational::from_integer(2.into());
                    loop {
                        let cand = &hi - &step;
                        if sign_changes(&sturm, &cand) - sign_changes(&sturm, &hi) == 1 {
                            stack.push((lo.clone(), cand));
                            break;
                        }
                        step /= Rational::from_integer(2.into());
                    }
                }
                continue;
            }
            if n == 1 {
                out.push(RealAlgebraic::isolated(sf.clone(), lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.cmp_value(b));
        out.dedup_by(|a, b| a.cmp_value(b) == Ordering::Equal);
        out
    }

    /// Rational roots via the rational root theorem.
    pub fn rational_roots(&self) -> Vec<Rational> {
        self.real_roots().into_iter().filter_map(|r| r.as_rational()).collect()
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp(&Rational::zero())
    }
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> i64 {
    let mut last = Ordering::Equal;
    let mut n = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "c")?;
                    } else {
                        write!(f, "c^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A real algebraic number: either an exact rational or the unique root of a
/// square-free polynomial inside an open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealAlgebraic {
    Rational(Rational),
    Root { poly: UniPoly, lo: Rational, hi: Rational },
}

impl RealAlgebraic {
    fn isolated(poly: UniPoly, lo: Rational, hi: Rational) -> Self {
        let mut r = RealAlgebraic::Root { poly, lo, hi };
        r.try_rationalize();
        r
    }

    /// Replaces an interval root by an exact rational when the minimal
    /// polynomial has a rational root in the interval.
    fn try_rationalize(&mut self) {
        if let RealAlgebraic::Root { poly, lo, hi } = self {
            for c in rational_root_candidates(poly) {
                if &c > lo && &c <= hi && poly.eval(&c).is_zero() {
                    *self = RealAlgebraic::Rational(c);
                    return;
                }
            }
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            RealAlgebraic::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RealAlgebraic::Rational(_))
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        if let RealAlgebraic::Root { poly, lo, hi } = self {
            let mid = (&*lo + &*hi) / Rational::from_integer(2.into());
            let s_mid = poly.sign_at(&mid);
            if s_mid == Ordering::Equal {
                *self = RealAlgebraic::Rational(mid);
                return;
            }
            let s_hi = poly.sign_at(hi);
            if s_hi == Ordering::Equal {
                // root is hi itself
                *self = RealAlgebraic::Rational(hi.clone());
                return;
            }
            if s_mid == s_hi {
                *hi = mid;
            } else {
                *lo = mid;
            }
        }
    }

    pub fn interval(&self) -> (Rational, Rational) {
        match self {
            RealAlgebraic::Rational(r) => (r.clone(), r.clone()),
            RealAlgebraic::Root { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        for _ in 0..64 {
            if let RealAlgebraic::Root { lo, hi, .. } = &r {
                if rational_to_f64(&(hi - lo)) < 1e-15 * (1.0 + rational_to_f64(hi).abs()) {
                    break;
                }
            }
            r.refine();
        }
        let (lo, hi) = r.interval();
        rational_to_f64(&((lo + hi) / Rational::from_integer(2.into())))
    }

    pub fn signum(&self) -> Ordering {
        self.cmp_rational(&Rational::zero())
    }

    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        let mut r = self.clone();
        loop {
            match &r {
                RealAlgebraic::Rational(v) => return v.cmp(x),
                RealAlgebraic::Root { poly, lo, hi } => {
                    if x <= lo {
                        return Ordering::Greater;
                    }
                    if x >= hi {
                        // root is in (lo, hi]: could equal hi
                        if x == hi && poly.eval(hi).is_zero() {
                            return Ordering::Equal;
                        }
                        return Ordering::Less;
                    }
                    if poly.eval(x).is_zero() {
                        return Ordering::Equal;
                    }
                }
            }
            r.refine();
        }
    }

    pub fn cmp_value(&self, other: &RealAlgebraic) -> Ordering {
        match (self, other) {
            (RealAlgebraic::Rational(a), b) => b.cmp_rational(a).reverse(),
            (a, RealAlgebraic::Rational(b)) => a.cmp_rational(b),
            _ => {
                let (mut a, mut b) = (self.clone(), other.clone());
                for _ in 0..200 {
                    let (alo, ahi) = a.interval();
                    let (blo, bhi) = b.interval();
                    // each value lies in its half-open interval (lo, hi]
                    if ahi <= blo {
                        return Ordering::Less;
                    }
                    if bhi <= alo {
                        return Ordering::Greater;
                    }
                    if let (RealAlgebraic::Root { poly: pa, .. }, RealAlgebraic::Root { poly: pb, .. }) =
                        (&a, &b)
                    {
                        let g = pa.gcd(pb);
                        if g.degree().unwrap_or(0) > 0 {
                            let lo = if alo > blo { alo.clone() } else { blo.clone() };
                            let hi = if ahi < bhi { ahi.clone() } else { bhi.clone() };
                            let s = g.sturm_sequence();
                            if sign_changes(&s, &lo) - sign_changes(&s, &hi) == 1 {
                                return Ordering::Equal;
                            }
                        }
                    }
                    if a.is_rational() || b.is_rational() {
                        return a.cmp_value(&b);
                    }
                    a.refine();
                    b.refine();
                }
                self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal)
            }
        }
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealAlgebraic::Rational(r) => write!(f, "{r}"),
            RealAlgebraic::Root { poly, lo, hi } => {
                write!(f, "root of {poly} in ({lo}, {hi}] ~ {:.6}", self.to_f64())
            }
        }
    }
}

/// Candidates `±p/q` with `p | a_0` and `q | a_n` after clearing
/// denominators. Includes zero when it is a root.
pub fn rational_root_candidates(f: &UniPoly) -> Vec<Rational> {
    let mut out = Vec::new();
    if f.is_zero() {
        return out;
    }
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        out.push(Rational::zero());
    }
    let a0 = ints[low].abs();
    let an = ints.last().unwrap().abs();
    let (da, dn) = (divisors(&a0), divisors(&an));
    for p in &da {
        for qd in &dn {
            let r = Rational::new(p.clone(), qd.clone());
            out.push(r.clone());
            out.push(-r);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // coefficient sizes here are small; trial division up to sqrt with a cap
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut i = BigInt::one();
    let cap = BigInt::from(1_000_000u64);
    while &i * &i <= *n && i <= cap {
        if (n % &i).is_zero() {
            out.push(i.clone());
            out.push(n / &i);
        }
        i += 1;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn sqrt_two_isolated() {
        let f = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = f.real_roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].to_f64() + 2f64.sqrt()).abs() < 1e-12);
        assert!((roots[1].to_f64() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(roots[1].cmp_rational(&q(141, 100)), Ordering::Greater);
        assert_eq!(roots[1].cmp_rational(&q(142, 100)), Ordering::Less);
    }

    #[test]
    fn rational_roots_found_exactly() {
        // (c - 1)(c + 1)(2c - 3)
        let f = UniPoly::from_ints(&[-1, 0, 1]).mul(&UniPoly::from_ints(&[-3, 2]));
        assert_eq!(f.rational_roots(), vec![q(-1, 1), q(1, 1), q(3, 2)]);
    }

    #[test]
    fn no_real_roots() {
        assert!(UniPoly::from_ints(&[1, 0, 1]).real_roots().is_empty());
    }

    #[test]
    fn square_free_decomposition_multiplicities() {
        // (c-1)^2 (c+2)^3 c
        let a = UniPoly::from_ints(&[-1, 1]);
        let b = UniPoly::from_ints(&[2, 1]);
        let c = UniPoly::from_ints(&[0, 1]);
        let f = a.mul(&a).mul(&b).mul(&b).mul(&b).mul(&c);
        let dec = f.square_free_decomposition();
        let mults: Vec<(usize, Vec<Rational>)> =
            dec.iter().map(|(k, g)| (*k, g.rational_roots())).collect();
        assert_eq!(
            mults,
            vec![(1, vec![q(0, 1)]), (2, vec![q(1, 1)]), (3, vec![q(-2, 1)])]
        );
    }

    #[test]
    fn compare_two_algebraics() {
        let s2 = UniPoly::from_ints(&[-2, 0, 1]).real_roots().pop().unwrap();
        let s3 = UniPoly::from_ints(&[-3, 0, 1]).real_roots().pop().unwrap();
        assert_eq!(s2.cmp_value(&s3), Ordering::Less);
        let s2b = UniPoly::from_ints(&[-4, 0, 2]).real_roots().pop().unwrap();
        assert_eq!(s2.cmp_value(&s2b), Ordering::Equal);
    }

    #[test]
    fn clustered_roots_separate() {
        // roots 1/1000 and 2/1000 and 0
        let f = UniPoly::from_ints(&[0, 2, -3000, 1_000_000]);
        let roots = f.real_roots();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(RealAlgebraic::is_rational));
    }
}
