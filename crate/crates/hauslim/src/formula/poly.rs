//! Multivariate polynomials over exact rationals, in the variables
//! `x1..xN` plus one distinguished parameter `l`.
//!
//! Exponent vectors have `num_vars + 1` entries; the last slot is the
//! parameter. Construction and arithmetic are exact; conversion to `f64`
//! happens only when a polynomial is evaluated at a point.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    num_vars: usize,
    /// exponent vector -> coefficient; zero coefficients are never stored.
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        let mut p = Polynomial::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; num_vars + 1], c);
        }
        p
    }

    /// The monomial `x_{index+1}` (zero-based index into the x-variables).
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars);
        let mut exps = vec![0u32; num_vars + 1];
        exps[index] = 1;
        let mut p = Polynomial::zero(num_vars);
        p.terms.insert(exps, BigRational::from_integer(1.into()));
        p
    }

    /// The parameter monomial `l`.
    pub fn param(num_vars: usize) -> Self {
        let mut exps = vec![0u32; num_vars + 1];
        exps[num_vars] = 1;
        let mut p = Polynomial::zero(num_vars);
        p.terms.insert(exps, BigRational::from_integer(1.into()));
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    /// Re-embed into a polynomial ring with more x-variables (the parameter
    /// slot stays last).
    pub fn widen(&self, num_vars: usize) -> Self {
        assert!(num_vars >= self.num_vars);
        let mut out = Polynomial::zero(num_vars);
        for (exps, c) in &self.terms {
            let mut e = vec![0u32; num_vars + 1];
            e[..self.num_vars].copy_from_slice(&exps[..self.num_vars]);
            e[num_vars] = exps[self.num_vars];
            out.terms.insert(e, c.clone());
        }
        out
    }

    /// Substitute `x_j -> x_{j + block * self.num_vars}` inside a ring of
    /// `self.num_vars * blocks` x-variables. Used to build formulas on
    /// tuples of points.
    pub fn shift_block(&self, block: usize, blocks: usize) -> Self {
        assert!(block < blocks);
        let n = self.num_vars;
        let total = n * blocks;
        let mut out = Polynomial::zero(total);
        for (exps, c) in &self.terms {
            let mut e = vec![0u32; total + 1];
            e[block * n..block * n + n].copy_from_slice(&exps[..n]);
            e[total] = exps[n];
            out.terms.insert(e, c.clone());
        }
        out
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.num_vars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = Polynomial::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.num_vars, BigRational::from_integer(1.into()));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Max total degree in the x-variables alone; the parameter degree is
    /// deliberately not counted. Zero for the zero polynomial.
    pub fn degree_in_x(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e[..self.num_vars].iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Indices of the x-variables that actually occur.
    pub fn vars_used(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_vars];
        for e in self.terms.keys() {
            for (i, &k) in e[..self.num_vars].iter().enumerate() {
                if k > 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    pub fn eval(&self, x: &[f64], lambda: f64) -> f64 {
        debug_assert_eq!(x.len(), self.num_vars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = rational_to_f64(c);
            for (i, &k) in e[..self.num_vars].iter().enumerate() {
                m *= x[i].powi(k as i32);
            }
            m *= lambda.powi(e[self.num_vars] as i32);
            acc += m;
        }
        acc
    }

    /// Flatten to float coefficients for hot evaluation loops.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (rational_to_f64(c), e.clone()))
                .collect(),
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range numerator/denominator; fall back on the sign.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Float view of a polynomial (coefficients converted once).
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    num_vars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64], lambda: f64) -> f64 {
        debug_assert_eq!(x.len(), self.num_vars);
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut m = *c;
            for (i, &k) in e[..self.num_vars].iter().enumerate() {
                if k > 0 {
                    m *= x[i].powi(k as i32);
                }
            }
            let kl = e[self.num_vars];
            if kl > 0 {
                m *= lambda.powi(kl as i32);
            }
            acc += m;
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text form: terms in descending exponent order, `*` between
    /// coefficient and monomial, `^` for powers. Parses back to the same
    /// polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in self.terms.iter().rev() {
            let neg = coeff.is_negative();
            let mag = coeff.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = monomial_string(exps, self.num_vars);
            let one = mag == BigRational::from_integer(1.into());
            match (one, mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

fn monomial_string(exps: &[u32], num_vars: usize) -> String {
    let mut parts = Vec::new();
    for (i, &k) in exps[..num_vars].iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, k)),
        }
    }
    match exps[num_vars] {
        0 => {}
        1 => parts.push("l".to_string()),
        k => parts.push(format!("l^{k}")),
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_cancels_exactly() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y)); // x^2 - y^2
        let q = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn degree_ignores_parameter() {
        // x1^3 * x2 - l^5 * x1
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let l = Polynomial::param(2);
        let p = x1.pow(3).mul(&x2).sub(&l.pow(5).mul(&x1));
        assert_eq!(p.degree_in_x(), 4);
    }

    #[test]
    fn display_roundtrip_shape() {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let one = Polynomial::constant(2, rat(1, 1));
        let p = x1.pow(2).add(&x2.pow(2)).sub(&one);
        assert_eq!(p.to_string(), "x1^2 + x2^2 - 1");
        let half = Polynomial::constant(1, rat(-1, 2));
        let q = Polynomial::var(1, 0).mul(&Polynomial::param(1)).add(&half);
        assert_eq!(q.to_string(), "x1*l - 1/2");
    }

    #[test]
    fn eval_matches_exact_expansion() {
        let x1 = Polynomial::var(1, 0);
        let l = Polynomial::param(1);
        let p = x1.sub(&l).pow(2); // (x1 - l)^2
        let v = p.eval(&[3.0], 1.0);
        assert!((v - 4.0).abs() < 1e-12);
        let c = p.compile();
        assert_eq!(c.eval(&[3.0], 1.0), v);
    }

    #[test]
    fn shift_block_relabels_variables() {
        let x1 = Polynomial::var(2, 0);
        let p = x1.pow(2); // x1^2 in (x1, x2)
        let shifted = p.shift_block(1, 2); // -> x3^2 in (x1..x4)
        assert_eq!(shifted.num_vars(), 4);
        assert_eq!(shifted.to_string(), "x3^2");
    }
}
