//! Truncated one-variable Laurent series with exact coefficients.
//!
//! A [`Series`] stores its nonzero coefficients sparsely together with a
//! declared lower exponent bound `min_exp` (everything below is zero) and a
//! truncation order `trunc` (everything above is unknown). A series with no
//! truncation order is *exact*: a Laurent polynomial known to all orders.
//!
//! Every operation produces the tightest window it can prove:
//!
//! * sum: `trunc = min(ta, tb)`;
//! * product: `trunc = min(ta + vb, tb + va)` where `v` is the provable
//!   valuation (lowest nonzero exponent, or `trunc + 1` for a series that
//!   vanishes inside its window);
//! * inverse: `trunc = ta - 2 va`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Exponent window `[min_exp, trunc_order]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub min_exp: i64,
    pub trunc_order: i64,
}

impl Window {
    pub fn new(min_exp: i64, trunc_order: i64) -> Self {
        Window { min_exp, trunc_order }
    }

    pub fn is_empty(&self) -> bool {
        self.trunc_order < self.min_exp
    }
}

#[derive(Clone, Debug)]
pub struct Series<C> {
    coeffs: BTreeMap<i64, C>,
    min_exp: i64,
    trunc: Option<i64>,
}

// The declared lower bound is bookkeeping; two series are equal when they
// know the same coefficients to the same order.
impl<C: PartialEq> PartialEq for Series<C> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Scalar> Series<C> {
    /// The exact zero series.
    pub fn zero() -> Self {
        Series { coeffs: BTreeMap::new(), min_exp: 0, trunc: None }
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), 0)
    }

    pub fn monomial(c: C, exp: i64) -> Self {
        Self::exact([(exp, c)])
    }

    /// A Laurent polynomial, known to all orders.
    pub fn exact<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut s = Series { coeffs: BTreeMap::new(), min_exp: 0, trunc: None };
        for (e, c) in terms {
            s.accumulate(e, c);
        }
        s.min_exp = s.coeffs.keys().next().copied().unwrap_or(0);
        s
    }

    /// A series known on `window`. Terms above the truncation order are
    /// dropped; terms below `min_exp` widen the window downward.
    pub fn truncated<I: IntoIterator<Item = (i64, C)>>(window: Window, terms: I) -> Self {
        let mut s = Series { coeffs: BTreeMap::new(), min_exp: window.min_exp, trunc: Some(window.trunc_order) };
        for (e, c) in terms {
            if e <= window.trunc_order {
                s.accumulate(e, c);
            }
        }
        if let Some(&lo) = s.coeffs.keys().next() {
            s.min_exp = s.min_exp.min(lo);
        }
        s
    }

    /// Zero, known only through `trunc_order`.
    pub fn zero_to(window: Window) -> Self {
        Series { coeffs: BTreeMap::new(), min_exp: window.min_exp, trunc: Some(window.trunc_order) }
    }

    fn accumulate(&mut self, e: i64, c: C) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(C::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn trunc_order(&self) -> Option<i64> {
        self.trunc
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    /// Window of an inexact series; exact series report `i64::MAX`.
    pub fn window(&self) -> Window {
        Window { min_exp: self.min_exp, trunc_order: self.trunc.unwrap_or(i64::MAX) }
    }

    /// True when the series is the exact zero series.
    pub fn is_exact_zero(&self) -> bool {
        self.trunc.is_none() && self.coeffs.is_empty()
    }

    /// True when every known coefficient vanishes.
    pub fn vanishes(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at `exp`, or `None` when it lies above the truncation order.
    pub fn coeff(&self, exp: i64) -> Option<C> {
        if self.trunc.is_some_and(|t| exp > t) {
            return None;
        }
        Some(self.coeffs.get(&exp).cloned().unwrap_or_else(C::zero))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Provable lower bound for the valuation; `None` for the exact zero.
    fn effective_valuation(&self) -> Option<i64> {
        match (self.valuation(), self.trunc) {
            (Some(v), _) => Some(v),
            (None, Some(t)) => Some(t + 1),
            (None, None) => None,
        }
    }

    /// Forget everything above `trunc_order`.
    pub fn truncate(&self, trunc_order: i64) -> Self {
        let t = min_opt(self.trunc, Some(trunc_order));
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| t.is_none_or(|t| e <= t))
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        Series { coeffs, min_exp: self.min_exp, trunc: t }
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.coeffs.iter().map(|(&e, a)| (e, a.clone() * c.clone())).collect()
        };
        Series { coeffs, min_exp: self.min_exp, trunc: self.trunc }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&C::from_rational(r))
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
            min_exp: self.min_exp + k,
            trunc: self.trunc.map(|t| t + k),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min_opt(self.trunc, other.trunc);
        let mut out = Series { coeffs: BTreeMap::new(), min_exp: self.min_exp.min(other.min_exp), trunc };
        for (&e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if trunc.is_none_or(|t| e <= t) {
                out.accumulate(e, c.clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect(),
            min_exp: self.min_exp,
            trunc: self.trunc,
        }
    }

    /// Cauchy product restricted to the derivable window.
    pub fn mul(&self, other: &Self) -> Self {
        let min_exp = self.min_exp + other.min_exp;
        let (va, vb) = match (self.effective_valuation(), other.effective_valuation()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Series { coeffs: BTreeMap::new(), min_exp, trunc: None },
        };
        let trunc = min_opt(self.trunc.map(|t| t + vb), other.trunc.map(|t| t + va));
        let mut out = Series { coeffs: BTreeMap::new(), min_exp, trunc };
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let e = i + j;
                if trunc.is_some_and(|t| e > t) {
                    break;
                }
                out.accumulate(e, a.clone() * b.clone());
            }
        }
        out
    }

    /// Multiplicative inverse. Exact inputs must be monomials; use
    /// [`Series::invert_to`] to expand the inverse of a Laurent polynomial.
    pub fn invert(&self) -> Result<Self> {
        match self.trunc {
            Some(_) => self.invert_within(None),
            None if self.coeffs.len() == 1 => {
                let (&e, c) = self.coeffs.iter().next().unwrap();
                Ok(Self::monomial(C::one() / c.clone(), -e))
            }
            None if self.coeffs.is_empty() => Err(Error::ZeroDivisor),
            None => Err(Error::UnboundedInverse),
        }
    }

    /// Inverse expanded through `trunc_order` (or less, if the input's own
    /// precision does not support it).
    pub fn invert_to(&self, trunc_order: i64) -> Result<Self> {
        self.invert_within(Some(trunc_order))
    }

    fn invert_within(&self, cap: Option<i64>) -> Result<Self> {
        let v = self.valuation().ok_or(Error::ZeroDivisor)?;
        let provable = self.trunc.map(|t| t - 2 * v);
        let trunc = min_opt(provable, cap).ok_or(Error::UnboundedInverse)?;
        let lead = self.coeffs[&v].clone();
        let lead_inv = C::one() / lead;
        // a = q^v (c_0 + c_1 q + ...); b = q^-v (b_0 + b_1 q + ...)
        let n_max = trunc + v;
        let mut b: Vec<C> = Vec::with_capacity((n_max.max(-1) + 1) as usize);
        for n in 0..=n_max {
            if n == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let mut acc = C::zero();
            for (&e, c) in self.coeffs.range(v + 1..=v + n) {
                let j = e - v;
                acc = acc + c.clone() * b[(n - j) as usize].clone();
            }
            b.push(-(acc * lead_inv.clone()));
        }
        let window = Window { min_exp: -v, trunc_order: trunc };
        Ok(Self::truncated(window, b.into_iter().enumerate().map(|(n, c)| (n as i64 - v, c))))
    }

    /// Integer power; negative powers need an inexact input or a monomial.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `exp(c x)` through `x^trunc_order`.
    pub fn exp_linear(c: &C, trunc_order: i64) -> Self {
        let mut term = C::one();
        let mut terms = Vec::new();
        for n in 0..=trunc_order.max(-1) {
            if n > 0 {
                term = term * c.clone() / C::from_i64(n);
            }
            terms.push((n, term.clone()));
        }
        Self::truncated(Window::new(0, trunc_order), terms)
    }

    /// Lowest exponent inside both windows where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let trunc = min_opt(self.trunc, other.trunc);
        let keys: std::collections::BTreeSet<i64> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .filter(|&e| trunc.is_none_or(|t| e <= t))
            .find(|e| self.coeffs.get(e) != other.coeffs.get(e))
    }

    /// Equality of every coefficient both series know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut out = Series { coeffs: BTreeMap::new(), min_exp: self.min_exp, trunc: self.trunc };
        for (&e, c) in &self.coeffs {
            out.accumulate(e, f(c));
        }
        out
    }
}

impl<C: Scalar> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: Self) -> Series<C> {
        Series::add(self, rhs)
    }
}

impl<C: Scalar> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        Series::sub(self, rhs)
    }
}

impl<C: Scalar> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: Self) -> Series<C> {
        Series::mul(self, rhs)
    }
}

impl<C: Scalar> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(self)
    }
}

impl<C: Scalar + fmt::Display> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (k, (e, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match *e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                e => write!(f, "({c})q^{e}")?,
            }
        }
        if let Some(t) = self.trunc {
            write!(f, " + O(q^{})", t + 1)?;
        }
        Ok(())
    }
}
