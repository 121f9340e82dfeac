//! Exact arbitrary-precision evaluators for the effective Betti-number
//! bound formulas, plus format arithmetic for diagonal formulas.
//!
//! Each formula's unspecified multiplicative constant is replaced by an
//! explicit caller-supplied `c` (default 1) recorded in the output, so
//! every value reads "up to the formula's unspecified constant".

use crate::error::{Error, Result};
use crate::formula::AlgFormat;
use num_bigint::BigUint;
use serde::Serialize;

/// Pfaffian complexity format: variables, chain length, chain degree,
/// function degree, distinct function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PfaffFormat {
    pub n: u64,
    pub ell: u64,
    pub alpha: u64,
    pub beta: u64,
    pub s: u64,
}

/// An exact bound value together with the constant substituted for each
/// unspecified factor. `k_raised_to_one` records that a degree argument
/// of zero was replaced by one to avoid a vacuous bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    #[serde(serialize_with = "serialize_biguint")]
    pub value: BigUint,
    pub constant_assumed: u64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub k_raised_to_one: bool,
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BoundValue {
    fn plain(value: BigUint, c: u64) -> Self {
        BoundValue { value, constant_assumed: c, k_raised_to_one: false }
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn pow_u64(base: &BigUint, exp: u64) -> BigUint {
    base.pow(u32::try_from(exp).expect("exponent out of range"))
}

fn two_pow(exp: u64) -> BigUint {
    pow_u64(&big(2), exp)
}

/// Root count bound for a square Pfaffian system with chain length `ell`,
/// chain degree `alpha`, and function degrees `betas`:
/// `2^{l(l-1)/2} b_1..b_n (b_1+..+b_n - n + min(n,l) a + 1)^l`.
pub fn khovanskii_bound(ell: u64, alpha: u64, betas: &[u64]) -> Result<BoundValue> {
    if betas.is_empty() {
        return Err(Error::InvalidInput("betas must be nonempty".into()));
    }
    if betas.iter().any(|&b| b == 0) {
        return Err(Error::InvalidInput("every beta must be at least 1".into()));
    }
    let n = betas.len() as u64;
    let product = betas.iter().fold(big(1), |acc, &b| acc * big(b));
    let sum: u64 = betas.iter().sum();
    // betas >= 1 entrywise keeps the base non-negative
    let base = big(sum - n + n.min(ell) * alpha + 1);
    let value = two_pow(ell * ell.saturating_sub(1) / 2) * product * pow_u64(&base, ell);
    Ok(BoundValue::plain(value, 1))
}

/// Root count bound depending only on monomial count: `2^{l(l-1)/2}(n+1)^l`.
pub fn fewnomial_bound(n: u64, ell: u64) -> BoundValue {
    let value = two_pow(ell * ell.saturating_sub(1) / 2) * pow_u64(&big(n + 1), ell);
    BoundValue::plain(value, 1)
}

/// Khovanskii-type bound on a general domain:
/// `2^{l(l-1)/2} b^n (c n (a+b))^l` with the domain constant `c` explicit.
pub fn khovanskii_domain_bound(n: u64, ell: u64, alpha: u64, beta: u64, c: u64) -> BoundValue {
    let value = two_pow(ell * ell.saturating_sub(1) / 2)
        * pow_u64(&big(beta), n)
        * pow_u64(&big(c * n * (alpha + beta)), ell);
    BoundValue::plain(value, c)
}

/// Total Betti bound for sets from closed sign conditions: `(c s d)^n`.
pub fn basu_bound(n: u64, d: u64, s: u64, c: u64) -> BoundValue {
    BoundValue::plain(pow_u64(&(big(c) * big(s) * big(d)), n), c)
}

/// Total Betti bound for arbitrary quantifier-free sets: `(c s^2 d)^n`.
pub fn gv_bound(n: u64, d: u64, s: u64, c: u64) -> BoundValue {
    BoundValue::plain(pow_u64(&(big(c) * big(s) * big(s) * big(d)), n), c)
}

/// Pfaffian analogue for closed formulas:
/// `2^{l(l-1)/2} s^n (c n (a+b))^{n+l}`.
pub fn pclosed_pfaffian_bound(f: PfaffFormat, c: u64) -> BoundValue {
    let value = two_pow(f.ell * f.ell.saturating_sub(1) / 2)
        * pow_u64(&big(f.s), f.n)
        * pow_u64(&big(c * f.n * (f.alpha + f.beta)), f.n + f.ell);
    BoundValue::plain(value, c)
}

/// Pfaffian analogue for arbitrary quantifier-free formulas:
/// `2^{l(l-1)/2} s^{2n} (c n (a+b))^{n+l}`.
pub fn qf_pfaffian_bound(f: PfaffFormat, c: u64) -> BoundValue {
    let value = two_pow(f.ell * f.ell.saturating_sub(1) / 2)
        * pow_u64(&big(f.s), 2 * f.n)
        * pow_u64(&big(c * f.n * (f.alpha + f.beta)), f.n + f.ell);
    BoundValue::plain(value, c)
}

/// Betti bound for the Hausdorff limit of a polynomial family of format
/// `(n, d, s)`: `(c k^2 s^2 d)^{(k+1) n}`, with `k = 0` raised to 1 and
/// `s^2` improved to `s` when the defining formula is closed.
pub fn hausdorff_limit_bound_alg(
    k: u64,
    n: u64,
    d: u64,
    s: u64,
    c: u64,
    p_closed: bool,
) -> BoundValue {
    let keff = k.max(1);
    let s_factor = if p_closed { big(s) } else { big(s) * big(s) };
    let base = big(c) * big(keff) * big(keff) * s_factor * big(d);
    BoundValue {
        value: pow_u64(&base, (k + 1) * n),
        constant_assumed: c,
        k_raised_to_one: k == 0,
    }
}

/// Betti bound for the limit of a semi-Pfaffian family of format
/// `(n, l, a, b, s)`:
/// `2^{ceil(l^2 (k+1)^2 / 2)} s^{2n(k+1)} (c k n (a+b))^{(k+1)(n+l)}`.
///
/// The leading exponent is rounded up to stay an integer; `k = 0` is
/// raised to 1 inside the constant factor; `s^{2n(k+1)}` improves to
/// `s^{n(k+1)}` for closed formulas.
pub fn relative_closure_bound(k: u64, f: PfaffFormat, c: u64, p_closed: bool) -> BoundValue {
    let keff = k.max(1);
    let lead_exp = (f.ell * f.ell * (k + 1) * (k + 1)).div_ceil(2);
    let s_exp = if p_closed { f.n * (k + 1) } else { 2 * f.n * (k + 1) };
    let value = two_pow(lead_exp)
        * pow_u64(&big(f.s), s_exp)
        * pow_u64(&big(c * keff * f.n * (f.alpha + f.beta)), (k + 1) * (f.n + f.ell));
    BoundValue { value, constant_assumed: c, k_raised_to_one: k == 0 }
}

/// Format of the diagonal formula on `p+1` blocks of an `(n, d, s)`
/// formula: `(n(p+1), max(2, d), s(p+1) + 1)`.
pub fn diagonal_format_alg(f: AlgFormat, p: u64) -> AlgFormat {
    AlgFormat { n: f.n * (p + 1), d: f.d.max(2), s: f.s * (p + 1) + 1 }
}

/// Pfaffian diagonal format: the chain is replicated once per block, so
/// `(n(p+1), l(p+1), a, b, s(p+1) + 1)`.
pub fn diagonal_format_pfaff(f: PfaffFormat, p: u64) -> PfaffFormat {
    PfaffFormat {
        n: f.n * (p + 1),
        ell: f.ell * (p + 1),
        alpha: f.alpha,
        beta: f.beta,
        s: f.s * (p + 1) + 1,
    }
}
