use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, from_f64, q, sign, to_f64, Q};

/// Dense univariate polynomial, coefficients in ascending degree.
/// The zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

/// An isolated positive root: `lo <= root <= hi` (equal bounds mean the root is exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveRoot {
    pub lo: Q,
    pub hi: Q,
    pub multiplicity: usize,
}

impl PositiveRoot {
    pub fn midpoint(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / q(2)))
    }

    pub fn midpoint_exact(&self) -> Q {
        (&self.lo + &self.hi) / q(2)
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![Q::one()],
        }
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        UniPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn constant(c: Q) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Q) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn neg(&self) -> UniPoly {
        self.scale(&-Q::one())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }

    pub fn pow(&self, k: u32) -> UniPoly {
        (0..k).fold(UniPoly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(quo), UniPoly::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inverse_mod(&self, m: &UniPoly) -> Option<UniPoly> {
        // extended Euclid on (m, self)
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (quo, r) = r0.div_rem(&r1);
            let t = t0.sub(&quo.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        Some(t0.scale(&r0.lead().recip()).rem(m))
    }

    pub fn mul_mod(&self, o: &UniPoly, m: &UniPoly) -> UniPoly {
        self.mul(o).rem(m)
    }

    /// Divides out the largest power of `x`; returns the quotient and the power.
    pub fn strip_zero_roots(&self) -> (UniPoly, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (
            UniPoly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()),
            k,
        )
    }

    /// Number of sign changes in the nonzero coefficient sequence.
    pub fn descartes_sign_changes(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(sign_changes(self.coeffs.iter().map(sign)))
    }

    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut b = self.derivative();
        while !b.is_zero() {
            let r = seq.last().unwrap().rem(&b).neg();
            seq.push(b);
            b = r;
        }
        seq
    }

    /// Distinct roots in (0, inf), counted with Sturm sequences.
    pub fn count_positive_roots(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (p, _) = self.strip_zero_roots();
        let seq = p.sturm_sequence();
        let at0 = sign_changes(seq.iter().map(|s| sign(&s.coeff(0))));
        let at_inf = sign_changes(seq.iter().map(|s| sign(&s.lead())));
        Ok(at0 - at_inf)
    }

    /// Positive roots counted with multiplicity.
    pub fn count_positive_roots_with_multiplicity(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (p, _) = self.strip_zero_roots();
        let mut total = 0;
        for (f, m) in p.squarefree_decomposition() {
            total += m * f.count_positive_roots()?;
        }
        Ok(total)
    }

    /// Yun's algorithm: pairs `(f_i, i)` with `self = c * prod f_i^i`, each f_i squarefree.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let dp = self.derivative();
        let b = self.gcd(&dp);
        let mut c = self.div_rem(&b).0;
        let mut d = dp.div_rem(&b).0.sub(&c.derivative());
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = c.gcd(&d);
            c = c.div_rem(&a).0;
            d = d.div_rem(&a).0.sub(&c.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&self.gcd(&self.derivative())).0.monic()
    }

    /// Disjoint rational intervals of width at most `tol`, each holding one
    /// positive root, in increasing order. Requires no repeated positive root.
    pub fn isolate_positive_roots(&self, tol: f64) -> Result<Vec<(Q, Q)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        assert!(tol > 0.0, "tolerance must be positive");
        let (p, _) = self.strip_zero_roots();
        if p.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        let g = p.gcd(&p.derivative());
        if g.degree().unwrap_or(0) > 0 && g.count_positive_roots()? > 0 {
            return Err(Error::NotSquarefree);
        }
        let seq = p.sturm_sequence();
        let tol = from_f64(tol);
        let bound = p.cauchy_bound();
        let mut out = Vec::new();
        let mut stack = vec![(Q::zero(), bound)];
        while let Some((a, b)) = stack.pop() {
            let c = variations(&seq, &a) - variations(&seq, &b);
            if c == 0 {
                continue;
            }
            if c == 1 {
                out.push(p.refine(a, b, &tol));
                continue;
            }
            let m = p.split_point(&a, &b);
            stack.push((a, m.clone()));
            stack.push((m, b));
        }
        out.sort();
        Ok(out)
    }

    /// All positive roots with multiplicities, isolated to width `tol`.
    pub fn positive_roots(&self, tol: f64) -> Result<Vec<PositiveRoot>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (p, _) = self.strip_zero_roots();
        let mut out = Vec::new();
        for (f, m) in p.squarefree_decomposition() {
            for (lo, hi) in f.isolate_positive_roots(tol)? {
                out.push(PositiveRoot {
                    lo,
                    hi,
                    multiplicity: m,
                });
            }
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        Ok(out)
    }

    fn cauchy_bound(&self) -> Q {
        let lead = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Q::zero);
        m + Q::one()
    }

    /// A point strictly inside (a, b) that is not a root.
    fn split_point(&self, a: &Q, b: &Q) -> Q {
        let mut k = 2i64;
        loop {
            for j in 1..k {
                let m = a + (b - a) * Q::new(j.into(), k.into());
                if !self.eval(&m).is_zero() {
                    return m;
                }
            }
            k += 1;
        }
    }

    /// Bisects a sign-changing interval holding exactly one simple root.
    fn refine(&self, mut a: Q, mut b: Q, tol: &Q) -> (Q, Q) {
        let sa = sign(&self.eval(&a));
        if sign(&self.eval(&b)) == 0 {
            return (b.clone(), b);
        }
        while &(&b - &a) > tol {
            let m = (&a + &b) / q(2);
            let sm = sign(&self.eval(&m));
            if sm == 0 {
                return (m.clone(), m);
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
        }
        (a, b)
    }

    pub fn fmt_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, i) in (0..self.coeffs.len())
            .rev()
            .filter(|&i| !self.coeffs[i].is_zero())
            .enumerate()
        {
            let c = &self.coeffs[i];
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&fmt_q(&mag));
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{}", fmt_q(&mag), mono));
            }
        }
        s
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with("x"))
    }
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn variations(seq: &[UniPoly], x: &Q) -> usize {
    sign_changes(seq.iter().map(|p| sign(&p.eval(x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn descartes() {
        assert_eq!(
            UniPoly::from_ints(&[1, -1, 1, -1])
                .descartes_sign_changes()
                .unwrap(),
            3
        );
        assert_eq!(
            UniPoly::from_ints(&[1, 2, 3])
                .descartes_sign_changes()
                .unwrap(),
            0
        );
        assert_eq!(
            UniPoly::from_ints(&[-1, 0, 0, 1])
                .descartes_sign_changes()
                .unwrap(),
            1
        );
        assert!(UniPoly::zero().descartes_sign_changes().is_err());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(
            UniPoly::from_ints(&[1, -1, 1, -1])
                .count_positive_roots()
                .unwrap(),
            1
        );
        assert_eq!(
            UniPoly::from_ints(&[1, 0, 1])
                .count_positive_roots()
                .unwrap(),
            0
        );
        // (x-1)^2 (x-2) = x^3 - 4x^2 + 5x - 2
        let p = UniPoly::from_ints(&[-2, 5, -4, 1]);
        assert_eq!(p.count_positive_roots().unwrap(), 2);
        assert_eq!(p.count_positive_roots_with_multiplicity().unwrap(), 3);
        // roots at zero are not positive
        assert_eq!(
            UniPoly::from_ints(&[0, 0, -1, 1])
                .count_positive_roots()
                .unwrap(),
            1
        );
    }

    #[test]
    fn yun() {
        // (x-1)^2 (x-2)
        let p = UniPoly::from_ints(&[-2, 5, -4, 1]);
        let d = p.squarefree_decomposition();
        assert_eq!(
            d,
            vec![
                (UniPoly::from_ints(&[-2, 1]), 1),
                (UniPoly::from_ints(&[-1, 1]), 2)
            ]
        );
    }

    #[test]
    fn isolation() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let r = p.isolate_positive_roots(1e-9).unwrap();
        assert_eq!(r.len(), 1);
        let (a, b) = &r[0];
        assert!(b - a <= from_f64(1e-9));
        assert!(to_f64(a) <= 2f64.sqrt() && 2f64.sqrt() <= to_f64(b));
        let cubic = UniPoly::from_ints(&[1, -1, 1, -1]);
        let r = cubic.isolate_positive_roots(1e-9).unwrap();
        assert_eq!(r, vec![(q(1), q(1))]);
        assert!(UniPoly::from_ints(&[-2, 5, -4, 1])
            .isolate_positive_roots(1e-9)
            .is_err());
    }

    #[test]
    fn modular_inverse() {
        let m = UniPoly::from_ints(&[-1, 1, 1]); // x^2 + x - 1
        let inv = UniPoly::x().inverse_mod(&m).unwrap();
        assert_eq!(inv.mul_mod(&UniPoly::x(), &m), UniPoly::one());
        assert_eq!(inv, UniPoly::from_ints(&[1, 1]));
        assert_eq!(UniPoly::new(vec![qr(1, 2), q(1)]).to_string(), "x + 1/2");
    }
}
