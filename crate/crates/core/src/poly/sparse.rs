use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::rational::{fmt_q, to_f64, Q};

/// Sparse polynomial with rational coefficients in named indeterminates.
///
/// Terms are keyed by dense exponent vectors; zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl SparsePoly {
    pub fn zero(vars: &Arc<Vec<String>>) -> Self {
        SparsePoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<Vec<String>>, c: Q) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn var(vars: &Arc<Vec<String>>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Q::one())
    }

    /// Variable by name; panics if absent.
    pub fn named(vars: &Arc<Vec<String>>, name: &str) -> Self {
        let i = vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        Self::var(vars, i)
    }

    pub fn monomial(vars: &Arc<Vec<String>>, exps: Vec<u32>, c: Q) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    fn check_vars(&self, other: &SparsePoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists"
        );
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.check_vars(other);
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> SparsePoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.check_vars(other);
        let mut r = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut result = Self::constant(&self.vars, Q::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars.len());
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = to_f64(c);
                for (x, &k) in point.iter().zip(e) {
                    if k > 0 {
                        t *= x.powi(k as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes the given values for some variables; the variable list is kept.
    pub fn partial_eval(&self, assign: &[(usize, Q)]) -> SparsePoly {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let mut c = c.clone();
            for (i, v) in assign {
                let k = e[*i];
                if k > 0 {
                    c *= num_traits::pow(v.clone(), k as usize);
                    e[*i] = 0;
                }
            }
            r.add_term(e, c);
        }
        r
    }

    /// Replaces variable `i` by `images[i]`; all images share one variable list.
    pub fn compose(&self, images: &[SparsePoly]) -> SparsePoly {
        assert_eq!(images.len(), self.vars.len());
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| self.vars.clone());
        let mut powers: Vec<Vec<SparsePoly>> = images
            .iter()
            .map(|p| vec![SparsePoly::constant(&target, Q::one()), p.clone()])
            .collect();
        let mut r = SparsePoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = SparsePoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][k as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    /// Re-expresses the polynomial over a larger variable list containing all current names.
    pub fn embed(&self, vars: &Arc<Vec<String>>) -> SparsePoly {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .expect("variable missing from target list")
            })
            .collect();
        let mut r = SparsePoly::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            r.add_term(ne, c.clone());
        }
        r
    }

    pub fn derivative(&self, i: usize) -> SparsePoly {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                r.add_term(ne, c * Q::from_integer(e[i].into()));
            }
        }
        r
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// `Some(c)` with `self = c * other`, if such a rational exists.
    pub fn scalar_multiple_of(&self, other: &SparsePoly) -> Option<Q> {
        self.check_vars(other);
        if other.is_zero() {
            return self.is_zero().then(Q::zero);
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (e0, c0) = other.terms.iter().next()?;
        let c = self.terms.get(e0)? / c0;
        (self == &other.scale(&c)).then_some(c)
    }

    /// Coefficient of each power of variable `i`, as polynomials in the rest.
    pub fn coefficients_in(&self, i: usize) -> Vec<SparsePoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![Self::zero(&self.vars); d + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut ne = e.clone();
            ne[i] = 0;
            out[k].add_term(ne, c.clone());
        }
        out
    }

    /// Univariate view when only variable `i` occurs.
    pub fn to_uni(&self, i: usize) -> Option<super::UniPoly> {
        let mut coeffs = vec![Q::zero(); self.degree_in(i) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(j, &k)| j != i && k > 0) {
                return None;
            }
            coeffs[e[i] as usize] = c.clone();
        }
        Some(super::UniPoly::new(coeffs))
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let exps: Vec<(usize, i32)> = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as i32))
                        .collect();
                    (to_f64(c), exps)
                })
                .collect(),
        }
    }

    /// Terms in graded-lex order (higher total degree first, then lexicographic).
    fn ordered_terms(&self) -> Vec<(&Vec<u32>, &Q)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        t
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.ordered_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_q(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Float evaluation form of a polynomial, for hot loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().fold(*c, |t, &(i, k)| t * x[i].powi(k)))
            .sum()
    }

    /// Sum of absolute term values; a natural scale for the value.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().fold(c.abs(), |t, &(i, k)| t * x[i].abs().powi(k)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn vars(names: &[&str]) -> Arc<Vec<String>> {
        Arc::new(names.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn arithmetic_and_display() {
        let v = vars(&["x", "y"]);
        let x = SparsePoly::var(&v, 0);
        let y = SparsePoly::var(&v, 1);
        let p = x.add(&y).pow(2).sub(&SparsePoly::constant(&v, qr(1, 2)));
        assert_eq!(p.to_string(), "x^2 + 2*x*y + y^2 - 1/2");
        assert_eq!(p.num_terms(), 4);
        assert!(!p.is_homogeneous());
        assert_eq!(p.eval(&[q(1), q(2)]), qr(17, 2));
        assert_eq!(p.derivative(0).to_string(), "2*x + 2*y");
        assert_eq!(x.sub(&x).to_string(), "0");
        assert_eq!(x.scale(&q(-3)).to_string(), "-3*x");
    }

    #[test]
    fn compose_and_partial_eval() {
        let v = vars(&["x", "y"]);
        let w = vars(&["t"]);
        let p = SparsePoly::var(&v, 0).mul(&SparsePoly::var(&v, 1));
        let t = SparsePoly::var(&w, 0);
        let one = SparsePoly::constant(&w, q(1));
        let c = p.compose(&[t.add(&one), t.sub(&one)]);
        assert_eq!(c.to_string(), "t^2 - 1");
        let pe = p.partial_eval(&[(0, q(3))]);
        assert_eq!(pe.to_string(), "3*y");
    }

    #[test]
    fn scalar_multiples() {
        let v = vars(&["x"]);
        let x = SparsePoly::var(&v, 0);
        let p = x.pow(2).add(&x);
        assert_eq!(p.scale(&qr(-2, 3)).scalar_multiple_of(&p), Some(qr(-2, 3)));
        assert_eq!(p.scalar_multiple_of(&x), None);
    }
}
