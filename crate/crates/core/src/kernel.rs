//! The multi-cover kernel `s_r = (-q)^r - 2 + (-q)^{-r}` and the rational
//! forms built from it.
//!
//! [`SBasisForm`] is a finite combination `sum_g c_g s_r^{g-1} (1+q)^m` for a
//! single `r`. Products of forms with different `r` (as produced by
//! exponentiating multi-cover sums) live in [`KernelForm`], the ring spanned
//! by monomials `prod_r s_r^{k_r} (1+q)^m`. Both expand to truncated
//! q-series on demand, and both can be substituted `q = -e^{iu}` exactly
//! (see `gwdt`), which raw truncated q-series cannot.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, parse_rational, rat, render_rational, sign_pow, Rational, Scalar};
use crate::series::{Series, Window};
use crate::QSeries;

/// Expansion of `s_r^{g-1}`.
///
/// For `g >= 1` this is an exact symmetric Laurent polynomial on
/// `[-r(g-1), r(g-1)]` and `window` is ignored. For `g <= 0` it is a power
/// series starting at `q^{r(1-g)}`, truncated at `window.trunc_order`.
pub fn kernel_power<C: Scalar>(g: i64, r: u32, window: Window) -> Series<C> {
    assert!(r >= 1, "multi-cover index must be positive");
    let r = r as i64;
    if g >= 1 {
        // s_r^k = x^{-rk} (1 - x^r)^{2k},  x = -q
        let k = g - 1;
        Series::exact((0..=2 * k).map(|j| {
            let e = r * (j - k);
            let c = BigInt::from(sign_pow(j) * sign_pow(e)) * binomial(2 * k, j);
            (e, C::from_rational(&Rational::from_integer(c)))
        }))
    } else {
        // s_r^{-n} = x^{rn} (1 - x^r)^{-2n} = sum_j C(j+2n-1, 2n-1) x^{r(j+n)}
        let n = 1 - g;
        let lowest = r * n;
        let w = Window::new(window.min_exp.min(lowest), window.trunc_order);
        let terms = (0..)
            .map(|j| (j, r * (j + n)))
            .take_while(|&(_, e)| e <= window.trunc_order)
            .map(|(j, e)| {
                let c = BigInt::from(sign_pow(e)) * binomial(j + 2 * n - 1, 2 * n - 1);
                (e, C::from_rational(&Rational::from_integer(c)))
            })
            .collect::<Vec<_>>();
        Series::truncated(w, terms)
    }
}

/// `(1+q)^m`, exact.
pub fn one_plus_q_power<C: Scalar>(m: u32) -> Series<C> {
    let m = m as i64;
    Series::exact((0..=m).map(|j| (j, C::from_rational(&Rational::from_integer(binomial(m, j))))))
}

/// `sum_g c_g s_r^{g-1} (1+q)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SBasisForm {
    terms: BTreeMap<i64, Rational>,
    r: u32,
    one_plus_q: u32,
}

impl SBasisForm {
    pub fn new(r: u32, one_plus_q: u32) -> Self {
        assert!(r >= 1, "multi-cover index must be positive");
        SBasisForm { terms: BTreeMap::new(), r, one_plus_q }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(r: u32, one_plus_q: u32, terms: I) -> Self {
        let mut f = Self::new(r, one_plus_q);
        for (g, c) in terms {
            f.add_term(g, c);
        }
        f
    }

    pub fn add_term(&mut self, g: i64, c: Rational) {
        let slot = self.terms.entry(g).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, g: i64) -> Rational {
        self.terms.get(&g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn one_plus_q_power(&self) -> u32 {
        self.one_plus_q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sbasis_expand`: the form as a q-series truncated at `window`.
    pub fn expand(&self, window: Window) -> QSeries {
        KernelForm::from(self).expand(window)
    }

    /// Product of two forms with the same multi-cover index.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::MixedKernelIndex(self.r, other.r));
        }
        let mut out = Self::new(self.r, self.one_plus_q + other.one_plus_q);
        for (g1, c1) in &self.terms {
            for (g2, c2) in &other.terms {
                // s^{g1-1} s^{g2-1} = s^{(g1+g2-1)-1}
                out.add_term(g1 + g2 - 1, c1 * c2);
            }
        }
        Ok(out)
    }
}

/// `prod_r s_r^{k_r} (1+q)^m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KernelMonomial {
    powers: BTreeMap<u32, i64>,
    one_plus_q: u32,
}

impl KernelMonomial {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn kernel(r: u32, k: i64) -> Self {
        let mut m = Self::default();
        if k != 0 {
            m.powers.insert(r, k);
        }
        m
    }

    pub fn with_one_plus_q(mut self, m: u32) -> Self {
        self.one_plus_q += m;
        self
    }

    pub fn powers(&self) -> &BTreeMap<u32, i64> {
        &self.powers
    }

    pub fn one_plus_q(&self) -> u32 {
        self.one_plus_q
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&r, &k) in &other.powers {
            let e = out.powers.entry(r).or_insert(0);
            *e += k;
            if *e == 0 {
                out.powers.remove(&r);
            }
        }
        out.one_plus_q += other.one_plus_q;
        out
    }

    /// Sum of `r k` over positive powers: the depth of the pole at `q = 0`.
    fn pole_order(&self) -> i64 {
        self.powers.iter().filter(|(_, &k)| k > 0).map(|(&r, &k)| r as i64 * k).sum()
    }

    fn expand(&self, trunc_order: i64) -> QSeries {
        let pad = self.pole_order();
        let inner = Window::new(0, trunc_order + pad);
        let mut acc = one_plus_q_power::<Rational>(self.one_plus_q);
        for (&r, &k) in &self.powers {
            acc = acc.mul(&kernel_power(1 + k, r, inner));
        }
        acc
    }
}

impl fmt::Display for KernelMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.powers.iter().map(|(r, k)| format!("s{r}^{k}")).collect();
        if self.one_plus_q > 0 {
            parts.push(format!("p^{}", self.one_plus_q));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl std::str::FromStr for KernelMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("malformed kernel monomial '{s}'"));
        let mut m = KernelMonomial::unit();
        if s == "1" {
            return Ok(m);
        }
        for factor in s.split('*') {
            let (base, exp) = factor.split_once('^').ok_or_else(bad)?;
            let exp: i64 = exp.parse().map_err(|_| bad())?;
            if base == "p" {
                m.one_plus_q += u32::try_from(exp).map_err(|_| bad())?;
            } else {
                let r: u32 = base.strip_prefix('s').ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if r == 0 {
                    return Err(bad());
                }
                m = m.mul(&KernelMonomial::kernel(r, exp));
            }
        }
        Ok(m)
    }
}

/// Finite rational combination of kernel monomials; a commutative ring.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct KernelForm {
    terms: BTreeMap<KernelMonomial, Rational>,
}

impl KernelForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(rat(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(KernelMonomial::unit(), c)
    }

    pub fn term(m: KernelMonomial, c: Rational) -> Self {
        let mut f = Self::zero();
        f.add_term(m, c);
        f
    }

    pub fn add_term(&mut self, m: KernelMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KernelMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        KernelForm { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &KernelMonomial) -> Self {
        KernelForm { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect() }
    }

    /// Expansion truncated at `window.trunc_order`.
    pub fn expand(&self, window: Window) -> QSeries {
        let mut acc = QSeries::zero_to(window);
        for (m, c) in &self.terms {
            acc = acc.add(&m.expand(window.trunc_order).scale(c));
        }
        acc.truncate(window.trunc_order)
    }

    /// Rewrite as an s-basis form when all monomials use a single `r`.
    pub fn to_sbasis(&self) -> Option<SBasisForm> {
        let mut r: Option<u32> = None;
        let mut p: Option<u32> = None;
        for m in self.terms.keys() {
            if m.powers.len() > 1 || p.is_some_and(|p| p != m.one_plus_q) {
                return None;
            }
            p = Some(m.one_plus_q);
            if let Some((&ri, _)) = m.powers.iter().next() {
                if r.is_some_and(|r| r != ri) {
                    return None;
                }
                r = Some(ri);
            }
        }
        let terms = self.terms.iter().map(|(m, c)| (m.powers.values().next().copied().unwrap_or(0) + 1, c.clone()));
        Some(SBasisForm::from_terms(r.unwrap_or(1), p.unwrap_or(0), terms))
    }
}

impl From<&SBasisForm> for KernelForm {
    fn from(f: &SBasisForm) -> Self {
        let mut out = KernelForm::zero();
        for (&g, c) in &f.terms {
            out.add_term(KernelMonomial::kernel(f.r, g - 1).with_one_plus_q(f.one_plus_q), c.clone());
        }
        out
    }
}

impl From<SBasisForm> for KernelForm {
    fn from(f: SBasisForm) -> Self {
        KernelForm::from(&f)
    }
}

impl fmt::Display for KernelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("({})*{}", render_rational(c), m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Range of genera an extraction actually determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenusRange {
    /// Lowest determined genus; `None` when nonpositive genera were assumed
    /// absent (symmetric peel).
    pub min: Option<i64>,
    pub max: i64,
}

impl GenusRange {
    pub fn contains(&self, g: i64) -> bool {
        g <= self.max && self.min.map_or(g >= 1, |m| g >= m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Peel {
    pub form: SBasisForm,
    /// What the kernel basis could not absorb inside the window.
    pub residual: QSeries,
    pub genera: GenusRange,
}

/// Decompose `f` as `sum_g c_g s_r^{g-1}` within its window.
///
/// Genera `g >= 2` are peeled from the most negative exponent upward, the
/// constant term gives `c_1`, and nonpositive genera are peeled from `q^r`
/// upward. With `symmetric_hint`, nonpositive genera are not used and any
/// positive-exponent remainder is reported in the residual instead.
pub fn sbasis_peel(f: &QSeries, r: u32, symmetric_hint: bool) -> Result<Peel> {
    let trunc = match f.trunc_order() {
        Some(t) => t,
        None => f.max_exponent().unwrap_or(0).max(0),
    };
    if trunc < 0 {
        return Err(Error::WindowTooSmall { required: 0, available: trunc });
    }
    let ri = r as i64;
    let mut work = f.truncate(trunc);
    let mut form = SBasisForm::new(r, 0);
    let mut residual: BTreeMap<i64, Rational> = BTreeMap::new();
    let inner = Window::new(0, trunc);
    let mut max_genus = 1;

    while let Some(e) = work.valuation() {
        if e > trunc {
            break;
        }
        let a = work.coeff(e).unwrap();
        let (g, lead_sign) = if e < 0 {
            if e % ri != 0 {
                residual.insert(e, a.clone());
                work = work.sub(&QSeries::monomial(a, e));
                continue;
            }
            let k = -e / ri;
            (k + 1, sign_pow(ri * k))
        } else if e == 0 {
            (1, 1)
        } else {
            if symmetric_hint || e % ri != 0 {
                residual.insert(e, a.clone());
                work = work.sub(&QSeries::monomial(a, e));
                continue;
            }
            let n = e / ri;
            (1 - n, sign_pow(ri * n))
        };
        let c = a * rat(lead_sign);
        let kernel: QSeries = kernel_power(g, r, inner);
        work = work.sub(&kernel.scale(&c).truncate(trunc));
        max_genus = max_genus.max(g);
        form.add_term(g, c);
    }

    let min = if symmetric_hint { None } else { Some(1 - trunc.div_euclid(ri)) };
    let residual = QSeries::truncated(Window::new(f.min_exp(), trunc), residual);
    Ok(Peel { form, residual, genera: GenusRange { min, max: max_genus } })
}

/// Parse a kernel-form token list `c*monomial` pairs as written by `Display`-like
/// renderers in file formats: one `(value, monomial)` per record.
pub fn parse_kernel_term(value: &str, monomial: &str) -> Result<(Rational, KernelMonomial)> {
    let c = parse_rational(value).ok_or_else(|| Error::Invalid(format!("malformed rational '{value}'")))?;
    Ok((c, monomial.parse()?))
}

pub fn is_unit_form(f: &KernelForm) -> bool {
    f.terms.len() == 1 && f.terms.get(&KernelMonomial::unit()).is_some_and(|c| c.is_one())
}
