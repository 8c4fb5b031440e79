//! Insertion monomials and multi-channel Novikov series.
//!
//! A generating function in insertion variables `t` is stored by its
//! divided-power coefficients: channel `m = prod T_i^{e_i}` holds the
//! coefficient of `prod t_i^{e_i} / e_i!`. Products therefore pick up the
//! binomial factors `prod_i C(e_i, e'_i)`. Only a finite, down-closed set of
//! channels is kept; everything else is truncated away.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{CurveClass, Lattice, LinearFunctional};
use crate::novikov::{CoeffRing, NovikovSeries};
use crate::scalar::{binomial, Rational};

/// One insertion `tau_d(label)`; `descendant = 0` is a primary insertion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Insertion {
    pub label: String,
    pub descendant: u32,
}

impl Insertion {
    pub fn primary(label: &str) -> Self {
        Insertion { label: label.to_string(), descendant: 0 }
    }

    pub fn descendant(label: &str, d: u32) -> Self {
        Insertion { label: label.to_string(), descendant: d }
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.descendant == 0 {
            write!(f, "{}", self.label)
        } else {
            write!(f, "tau{}({})", self.descendant, self.label)
        }
    }
}

/// A multiset of insertions, kept in canonical sorted form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InsertionMonomial {
    factors: BTreeMap<Insertion, u32>,
}

impl InsertionMonomial {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_insertions<I: IntoIterator<Item = Insertion>>(it: I) -> Self {
        let mut m = Self::empty();
        for x in it {
            *m.factors.entry(x).or_insert(0) += 1;
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of insertions counted with multiplicity.
    pub fn len(&self) -> u32 {
        self.factors.values().sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Insertion, u32)> {
        self.factors.iter().map(|(k, &v)| (k, v))
    }

    pub fn descendant_total(&self) -> u32 {
        self.factors.iter().map(|(k, &v)| k.descendant * v).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &v) in &other.factors {
            *out.factors.entry(k.clone()).or_insert(0) += v;
        }
        out
    }

    /// `self / other` when `other` divides `self`.
    pub fn quotient(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (k, &v) in &other.factors {
            let e = out.factors.get_mut(k)?;
            if *e < v {
                return None;
            }
            *e -= v;
            if *e == 0 {
                out.factors.remove(k);
            }
        }
        Some(out)
    }

    /// Every sub-multiset, with the divided-power factor `prod_i C(e_i, e'_i)`.
    pub fn splittings(&self) -> Vec<(InsertionMonomial, InsertionMonomial, Rational)> {
        let keys: Vec<(&Insertion, u32)> = self.factors().collect();
        let mut out = Vec::new();
        let mut pick = vec![0u32; keys.len()];
        loop {
            let mut a = Self::empty();
            let mut b = Self::empty();
            let mut c = Rational::from_integer(1.into());
            for ((ins, e), &p) in keys.iter().zip(&pick) {
                if p > 0 {
                    a.factors.insert((*ins).clone(), p);
                }
                if *e > p {
                    b.factors.insert((*ins).clone(), e - p);
                }
                c *= Rational::from_integer(binomial(*e as i64, p as i64));
            }
            out.push((a, b, c));
            // odometer
            let mut i = 0;
            loop {
                if i == keys.len() {
                    return out;
                }
                if pick[i] < keys[i].1 {
                    pick[i] += 1;
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    /// All divisors of this monomial.
    pub fn divisors(&self) -> Vec<InsertionMonomial> {
        self.splittings().into_iter().map(|(a, _, _)| a).collect()
    }
}

impl fmt::Display for InsertionMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (k, &v) in &self.factors {
            for _ in 0..v {
                parts.push(k.to_string());
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s != "1" && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl FromStr for InsertionMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Self::empty());
        }
        let bad = || Error::Invalid(format!("malformed insertion monomial '{s}'"));
        let mut out = Vec::new();
        for tok in s.split('*') {
            if let Some(rest) = tok.strip_prefix("tau") {
                let (d, label) = rest.split_once('(').ok_or_else(bad)?;
                let label = label.strip_suffix(')').ok_or_else(bad)?;
                let d: u32 = d.parse().map_err(|_| bad())?;
                if !valid_label(label) {
                    return Err(bad());
                }
                out.push(Insertion::descendant(label, d));
            } else if valid_label(tok) {
                out.push(Insertion::primary(tok));
            } else {
                return Err(bad());
            }
        }
        Ok(Self::from_insertions(out))
    }
}

/// A declared insertion class: cohomological degree, and for degree 2 the
/// pairing `beta -> int_beta D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionLabel {
    pub name: String,
    pub degree: u32,
    pub pairing: Option<LinearFunctional>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InsertionSet {
    labels: BTreeMap<String, InsertionLabel>,
}

impl InsertionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, degree: u32, pairing: Option<LinearFunctional>) -> Result<()> {
        if !valid_label(name) {
            return Err(Error::Invalid(format!("invalid insertion label '{name}'")));
        }
        if !degree.is_multiple_of(2) || degree > 6 {
            return Err(Error::Invalid(format!("insertion '{name}' has degree {degree}; expected 0, 2, 4 or 6")));
        }
        if degree == 2 && pairing.is_none() {
            return Err(Error::Invalid(format!("degree-2 insertion '{name}' needs a pairing")));
        }
        self.labels.insert(name.to_string(), InsertionLabel { name: name.to_string(), degree, pairing });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&InsertionLabel> {
        self.labels.get(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &InsertionLabel> {
        self.labels.values()
    }

    /// True when no factor is a degree-0 or primary degree-2 insertion.
    pub fn is_reduced(&self, m: &InsertionMonomial) -> Result<bool> {
        for (ins, _) in m.factors() {
            let l = self.get(&ins.label)?;
            if l.degree == 0 || (l.degree == 2 && ins.descendant == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `normalize_insertions`: apply the vanishing for degree-0 insertions and
    /// the divisor equation for primary degree-2 insertions.
    pub fn normalize(&self, m: &InsertionMonomial, beta: &CurveClass) -> Result<(Rational, InsertionMonomial)> {
        let mut scalar = Rational::from_integer(1.into());
        let mut kept = Vec::new();
        for (ins, e) in m.factors() {
            let l = self.get(&ins.label)?;
            if l.degree == 0 {
                return Ok((Rational::zero(), InsertionMonomial::empty()));
            }
            if l.degree == 2 && ins.descendant == 0 {
                let p = l.pairing.as_ref().unwrap().eval(beta);
                scalar *= Rational::from_integer(p.pow(e).into());
            } else {
                kept.extend(std::iter::repeat_n(ins.clone(), e as usize));
            }
        }
        Ok((scalar, InsertionMonomial::from_insertions(kept)))
    }
}

/// The down-closure of a set of monomials, always containing `1`.
pub fn down_closure<'a, I: IntoIterator<Item = &'a InsertionMonomial>>(ms: I) -> BTreeSet<InsertionMonomial> {
    let mut out = BTreeSet::from([InsertionMonomial::empty()]);
    for m in ms {
        out.extend(m.divisors());
    }
    out
}

/// A generating function in `v` and the insertion variables, one Novikov
/// series per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSeries<R> {
    lattice: Lattice,
    degree_bound: u32,
    channels: BTreeMap<InsertionMonomial, NovikovSeries<R>>,
}

impl<R: CoeffRing> ChannelSeries<R> {
    /// Zero on the down-closure of `monomials`.
    pub fn zero<'a, I: IntoIterator<Item = &'a InsertionMonomial>>(
        lattice: Lattice,
        degree_bound: u32,
        monomials: I,
    ) -> Self {
        let channels = down_closure(monomials)
            .into_iter()
            .map(|m| (m, NovikovSeries::zero(lattice.clone(), degree_bound)))
            .collect();
        ChannelSeries { lattice, degree_bound, channels }
    }

    pub fn one<'a, I: IntoIterator<Item = &'a InsertionMonomial>>(
        lattice: Lattice,
        degree_bound: u32,
        monomials: I,
    ) -> Self {
        let mut s = Self::zero(lattice.clone(), degree_bound, monomials);
        s.channels.insert(InsertionMonomial::empty(), NovikovSeries::one(lattice, degree_bound));
        s
    }

    /// A single-channel series.
    pub fn from_empty_channel(series: NovikovSeries<R>) -> Self {
        let lattice = series.lattice().clone();
        let degree_bound = series.degree_bound();
        ChannelSeries { lattice, degree_bound, channels: BTreeMap::from([(InsertionMonomial::empty(), series)]) }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn monomials(&self) -> impl Iterator<Item = &InsertionMonomial> {
        self.channels.keys()
    }

    pub fn channels(&self) -> impl Iterator<Item = (&InsertionMonomial, &NovikovSeries<R>)> {
        self.channels.iter()
    }

    pub fn channel(&self, m: &InsertionMonomial) -> Option<&NovikovSeries<R>> {
        self.channels.get(m)
    }

    pub fn empty_channel(&self) -> &NovikovSeries<R> {
        &self.channels[&InsertionMonomial::empty()]
    }

    /// Replace a channel; the monomial must already be declared.
    pub fn set_channel(&mut self, m: InsertionMonomial, s: NovikovSeries<R>) -> Result<()> {
        if s.lattice() != &self.lattice {
            return Err(Error::LatticeMismatch);
        }
        if s.degree_bound() != self.degree_bound {
            return Err(Error::DegreeBoundMismatch(self.degree_bound, s.degree_bound()));
        }
        match self.channels.get_mut(&m) {
            Some(slot) => {
                *slot = s;
                Ok(())
            }
            None => Err(Error::MissingEntry(format!("channel {m} is not declared"))),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if self.degree_bound != other.degree_bound {
            return Err(Error::DegreeBoundMismatch(self.degree_bound, other.degree_bound));
        }
        if self.channels.len() != other.channels.len() || self.channels.keys().ne(other.channels.keys()) {
            return Err(Error::InconsistentChannel {
                class: vec![],
                channel: String::new(),
                reason: "channel sets differ".into(),
            });
        }
        Ok(())
    }

    pub fn map_channels<S: CoeffRing>(
        &self,
        f: impl Fn(&InsertionMonomial, &NovikovSeries<R>) -> Result<NovikovSeries<S>>,
    ) -> Result<ChannelSeries<S>> {
        let mut channels = BTreeMap::new();
        for (m, s) in &self.channels {
            channels.insert(m.clone(), f(m, s)?);
        }
        let (lattice, degree_bound) = match channels.values().next() {
            Some(s) => (s.lattice().clone(), s.degree_bound()),
            None => (self.lattice.clone(), self.degree_bound),
        };
        Ok(ChannelSeries { lattice, degree_bound, channels })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, s) in out.channels.iter_mut() {
            *s = s.add(&other.channels[m])?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for s in out.channels.values_mut() {
            *s = s.scale(c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.lattice.clone(), self.degree_bound, self.channels.keys());
        for (k, slot) in out.channels.iter_mut() {
            for (a, b, c) in k.splittings() {
                let term = self.channels[&a].mul(&other.channels[&b])?;
                *slot = slot.add(&term.scale(&c))?;
            }
        }
        Ok(out)
    }

    fn nilpotency_bound(&self) -> u32 {
        self.degree_bound + self.channels.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    fn constant_of_unit(&self) -> Result<Self> {
        let z = self.lattice.zero();
        let mut x = self.clone();
        let empty = InsertionMonomial::empty();
        let c = x.channels[&empty].coeff(&z);
        if !c.sub(&R::one()).vanishes() {
            return Err(Error::NonUnitConstant);
        }
        let stripped = x.channels[&empty].without_constant();
        x.channels.insert(empty, stripped);
        Ok(x)
    }

    pub fn exp(&self) -> Result<Self> {
        let z = self.lattice.zero();
        if !self.empty_channel().coeff(&z).vanishes() {
            return Err(Error::NonzeroConstant);
        }
        let mut result = Self::one(self.lattice.clone(), self.degree_bound, self.channels.keys());
        let mut term = result.clone();
        for n in 1..=self.nilpotency_bound() as i64 {
            term = term.mul(self)?.scale(&Rational::new(1.into(), n.into()));
            result = result.add(&term)?;
        }
        Ok(result)
    }

    pub fn log(&self) -> Result<Self> {
        let x = self.constant_of_unit()?;
        let mut result = Self::zero(self.lattice.clone(), self.degree_bound, self.channels.keys());
        let mut power = Self::one(self.lattice.clone(), self.degree_bound, self.channels.keys());
        for n in 1..=self.nilpotency_bound() as i64 {
            power = power.mul(&x)?;
            let sign = if n % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&Rational::new(sign.into(), n.into())))?;
        }
        Ok(result)
    }

    /// First `(channel, class)` where the two series disagree.
    pub fn first_disagreement(&self, other: &Self) -> Option<(InsertionMonomial, CurveClass)> {
        let keys: BTreeSet<&InsertionMonomial> = self.channels.keys().chain(other.channels.keys()).collect();
        for m in keys {
            let zero = NovikovSeries::zero(self.lattice.clone(), self.degree_bound);
            let a = self.channels.get(m).unwrap_or(&zero);
            let b = other.channels.get(m).unwrap_or(&zero);
            if let Some(beta) = a.first_disagreement(b) {
                return Some((m.clone(), beta));
            }
        }
        None
    }
}
