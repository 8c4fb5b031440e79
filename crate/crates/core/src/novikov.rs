//! Formal series `sum_beta v^beta A_beta` over effective classes of bounded
//! degree, with coefficients in a ring such as [`QSeries`](crate::QSeries) or
//! [`KernelForm`].

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::kernel::KernelForm;
use crate::lattice::{CurveClass, Lattice, LatticeMap};
use crate::scalar::{Rational, Scalar};
use crate::series::Series;

/// Coefficient ring of a Novikov series.
pub trait CoeffRing: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    /// Structurally zero; such coefficients are not stored.
    fn is_exact_zero(&self) -> bool;
    /// Zero as far as it is known.
    fn vanishes(&self) -> bool;
    /// Agreement wherever both sides are known.
    fn agrees(&self, other: &Self) -> bool;
    /// Truncation order, for coefficient types that have one.
    fn precision(&self) -> Option<i64> {
        None
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<C: Scalar> CoeffRing for Series<C> {
    fn zero() -> Self {
        Series::zero()
    }
    fn one() -> Self {
        Series::one()
    }
    fn add(&self, other: &Self) -> Self {
        Series::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Series::mul(self, other)
    }
    fn neg(&self) -> Self {
        Series::neg(self)
    }
    fn scale(&self, c: &Rational) -> Self {
        self.scale_rational(c)
    }
    fn is_exact_zero(&self) -> bool {
        Series::is_exact_zero(self)
    }
    fn vanishes(&self) -> bool {
        Series::vanishes(self)
    }
    fn agrees(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
    fn precision(&self) -> Option<i64> {
        self.trunc_order()
    }
}

impl CoeffRing for KernelForm {
    fn zero() -> Self {
        KernelForm::zero()
    }
    fn one() -> Self {
        KernelForm::one()
    }
    fn add(&self, other: &Self) -> Self {
        KernelForm::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        KernelForm::mul(self, other)
    }
    fn neg(&self) -> Self {
        KernelForm::neg(self)
    }
    fn scale(&self, c: &Rational) -> Self {
        KernelForm::scale(self, c)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn agrees(&self, other: &Self) -> bool {
        self == other
    }
}

/// `sum_beta v^beta A_beta` truncated at degree `degree_bound`.
#[derive(Clone, Debug)]
pub struct NovikovSeries<R> {
    lattice: Lattice,
    degree_bound: u32,
    terms: BTreeMap<CurveClass, R>,
    notes: Vec<String>,
}

impl<R: PartialEq> PartialEq for NovikovSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.degree_bound == other.degree_bound && self.terms == other.terms
    }
}

impl<R: CoeffRing> NovikovSeries<R> {
    pub fn zero(lattice: Lattice, degree_bound: u32) -> Self {
        NovikovSeries { lattice, degree_bound, terms: BTreeMap::new(), notes: Vec::new() }
    }

    pub fn one(lattice: Lattice, degree_bound: u32) -> Self {
        let mut s = Self::zero(lattice, degree_bound);
        let z = s.lattice.zero();
        s.terms.insert(z, R::one());
        s
    }

    /// Build from terms; classes above the degree bound are dropped.
    pub fn from_terms<I: IntoIterator<Item = (CurveClass, R)>>(
        lattice: Lattice,
        degree_bound: u32,
        terms: I,
    ) -> Result<Self> {
        let mut s = Self::zero(lattice, degree_bound);
        for (beta, c) in terms {
            s.accumulate(beta, c)?;
        }
        Ok(s)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.notes.contains(&msg) {
            self.notes.push(msg);
        }
    }

    /// Add `c` to the coefficient of `beta`.
    pub fn accumulate(&mut self, beta: CurveClass, c: R) -> Result<()> {
        let a = self.lattice.cone_coords(&beta).ok_or_else(|| Error::NotEffective(beta.0.clone()))?;
        if a.iter().any(|&x| x < 0) {
            return Err(Error::NotEffective(beta.0));
        }
        if self.lattice.degree(&beta).unwrap() > self.degree_bound as i64 {
            return Ok(());
        }
        self.accumulate_unchecked(beta, c);
        Ok(())
    }

    fn accumulate_unchecked(&mut self, beta: CurveClass, c: R) {
        if c.is_exact_zero() {
            return;
        }
        let sum = match self.terms.remove(&beta) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_exact_zero() {
            self.terms.insert(beta, sum);
        }
    }

    pub fn get(&self, beta: &CurveClass) -> Option<&R> {
        self.terms.get(beta)
    }

    pub fn coeff(&self, beta: &CurveClass) -> R {
        self.terms.get(beta).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant(&self) -> R {
        self.coeff(&self.lattice.zero())
    }

    /// Terms ordered by degree, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (&CurveClass, &R)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| self.lattice.order_key(a).cmp(&self.lattice.order_key(b)));
        v.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn map_coeffs<S: CoeffRing>(&self, f: impl Fn(&CurveClass, &R) -> S) -> NovikovSeries<S> {
        let mut out = NovikovSeries::zero(self.lattice.clone(), self.degree_bound);
        for (b, c) in &self.terms {
            out.accumulate_unchecked(b.clone(), f(b, c));
        }
        out.notes = self.notes.clone();
        out
    }

    pub fn try_map_coeffs<S: CoeffRing>(
        &self,
        f: impl Fn(&CurveClass, &R) -> Result<S>,
    ) -> Result<NovikovSeries<S>> {
        let mut out = NovikovSeries::zero(self.lattice.clone(), self.degree_bound);
        for (b, c) in &self.terms {
            out.accumulate_unchecked(b.clone(), f(b, c)?);
        }
        out.notes = self.notes.clone();
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if self.degree_bound != other.degree_bound {
            return Err(Error::DegreeBoundMismatch(self.degree_bound, other.degree_bound));
        }
        Ok(())
    }

    fn merged_notes(&self, other: &Self) -> Vec<String> {
        let mut notes = self.notes.clone();
        for n in &other.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
        notes
    }

    fn min_precision(&self) -> Option<i64> {
        self.terms.values().filter_map(|c| c.precision()).min()
    }

    fn record_narrowing(&mut self, a: Option<i64>, b: Option<i64>) {
        if let (Some(x), Some(y)) = (a, b) {
            if x != y {
                self.note(format!("q-window narrowed from {} to {}", x.max(y), x.min(y)));
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.notes = self.merged_notes(other);
        for (b, c) in &other.terms {
            out.accumulate_unchecked(b.clone(), c.clone());
        }
        out.record_narrowing(self.min_precision(), other.min_precision());
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, c| c.neg())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        self.map_coeffs(|_, c| c.scale(s))
    }

    /// `nv_mul`: convolution over splittings into effective classes.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let bound = self.degree_bound as i64;
        let degs = |s: &Self| -> Vec<(i64, CurveClass, R)> {
            let mut v: Vec<_> =
                s.terms.iter().map(|(b, c)| (s.lattice.degree(b).unwrap(), b.clone(), c.clone())).collect();
            v.sort_by_key(|t| t.0);
            v
        };
        let (a, b) = (degs(self), degs(other));
        let mut out = Self::zero(self.lattice.clone(), self.degree_bound);
        out.notes = self.merged_notes(other);
        for (d1, b1, c1) in &a {
            for (d2, b2, c2) in &b {
                if d1 + d2 > bound {
                    break;
                }
                out.accumulate_unchecked(b1.add(b2), c1.mul(c2));
            }
        }
        out.record_narrowing(self.min_precision(), other.min_precision());
        Ok(out)
    }

    /// Same series without its constant term.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&self.lattice.zero());
        out
    }

    /// `nv_exp`; the constant term must vanish.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant().vanishes() {
            return Err(Error::NonzeroConstant);
        }
        let x = self.without_constant();
        let mut result = Self::one(self.lattice.clone(), self.degree_bound);
        let mut term = result.clone();
        for n in 1..=self.degree_bound as i64 {
            term = term.mul(&x)?.scale(&Rational::new(1.into(), n.into()));
            if term.terms.is_empty() {
                break;
            }
            result = result.add(&term)?;
        }
        result.notes = self.notes.clone();
        Ok(result)
    }

    fn unit_part(&self) -> Result<Self> {
        if !self.constant().sub(&R::one()).vanishes() {
            return Err(Error::NonUnitConstant);
        }
        Ok(self.without_constant())
    }

    /// `nv_log`; the constant term must be 1.
    pub fn log(&self) -> Result<Self> {
        let x = self.unit_part()?;
        let mut result = Self::zero(self.lattice.clone(), self.degree_bound);
        let mut power = Self::one(self.lattice.clone(), self.degree_bound);
        for n in 1..=self.degree_bound as i64 {
            power = power.mul(&x)?;
            if power.terms.is_empty() {
                break;
            }
            let sign = if n % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&Rational::new(sign.into(), n.into())))?;
        }
        result.notes = self.notes.clone();
        Ok(result)
    }

    /// Multiplicative inverse of a series with constant term 1.
    pub fn invert(&self) -> Result<Self> {
        let x = self.unit_part()?.neg();
        let mut result = Self::one(self.lattice.clone(), self.degree_bound);
        let mut power = result.clone();
        for _ in 1..=self.degree_bound {
            power = power.mul(&x)?;
            if power.terms.is_empty() {
                break;
            }
            result = result.add(&power)?;
        }
        result.notes = self.notes.clone();
        Ok(result)
    }

    /// `nv_div`: `self * other^{-1}`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    /// `nv_reindex`: move the term at `beta` to `map(beta)` (or `-map(beta)`
    /// with `flip_sign`). Every image must be effective in `target` and within
    /// `target_bound`.
    pub fn reindex(&self, map: &LatticeMap, target: &Lattice, target_bound: u32, flip_sign: bool) -> Result<Self> {
        let mut out = Self::zero(target.clone(), target_bound);
        out.notes = self.notes.clone();
        for (b, c) in &self.terms {
            let image = if flip_sign { map.apply(b).neg() } else { map.apply(b) };
            match target.cone_coords(&image) {
                Some(a) if a.iter().all(|&x| x >= 0) => {}
                _ => return Err(Error::NotEffective(b.0.clone())),
            }
            let to = target.degree(&image).unwrap();
            if to > target_bound as i64 {
                let from = self.lattice.degree(b).unwrap();
                return Err(Error::DegreeMismatch { class: b.0.clone(), from, to });
            }
            out.accumulate_unchecked(image, c.clone());
        }
        Ok(out)
    }

    /// Restrict to classes of degree at most `bound`.
    pub fn restrict(&self, bound: u32) -> Self {
        let mut out = Self::zero(self.lattice.clone(), bound.min(self.degree_bound));
        out.notes = self.notes.clone();
        for (b, c) in &self.terms {
            if self.lattice.degree(b).unwrap() <= bound as i64 {
                out.accumulate_unchecked(b.clone(), c.clone());
            }
        }
        out
    }

    /// Restrict to classes satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&CurveClass) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|b, _| keep(b));
        out
    }

    /// Coefficientwise agreement on every class either side knows.
    pub fn agrees(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// The first class (in output order) where the two series disagree.
    pub fn first_disagreement(&self, other: &Self) -> Option<CurveClass> {
        let mut keys: Vec<&CurveClass> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort_by(|a, b| self.lattice.order_key(a).cmp(&self.lattice.order_key(b)));
        keys.dedup();
        keys.into_iter().find(|b| !self.coeff(b).agrees(&other.coeff(b))).cloned()
    }
}
