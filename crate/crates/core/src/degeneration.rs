//! Cohomology-weighted partitions and the degeneration formula evaluator.
//!
//! Relative partition functions are inputs. The evaluator sums
//! `Z_main(eta_1..eta_l) * prod_i (-1)^{|eta_i| - l(eta_i)} z(eta_i) q^{-|eta_i|}
//! Z_i(eta_i^dual)` over splittings of the class, weighted partitions and
//! distributions of marked insertions, keeping only terms that satisfy the
//! dimension constraint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::lattice::{CurveClass, LinearFunctional};
use crate::scalar::{factorial, Rational};
use crate::series::Series;
use crate::QSeries;

/// Perfect pairing on a finite set of cohomology weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelPairing {
    duals: BTreeMap<String, String>,
}

impl LabelPairing {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare `a` and `b` dual to each other (`a == b` for a self-dual weight).
    pub fn pair(&mut self, a: &str, b: &str) {
        self.duals.insert(a.to_string(), b.to_string());
        self.duals.insert(b.to_string(), a.to_string());
    }

    pub fn dual(&self, a: &str) -> Result<&str> {
        self.duals.get(a).map(|s| s.as_str()).ok_or_else(|| Error::UnpairedLabel(a.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.duals.keys()
    }
}

/// A partition whose parts carry cohomology weights.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedPartition {
    parts: Vec<(u32, String)>,
}

impl WeightedPartition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = (u32, String)>>(parts: I) -> Result<Self> {
        let mut parts: Vec<(u32, String)> = parts.into_iter().collect();
        if parts.iter().any(|(s, _)| *s == 0) {
            return Err(Error::Invalid("partition parts must be positive".into()));
        }
        parts.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        Ok(WeightedPartition { parts })
    }

    pub fn parts(&self) -> &[(u32, String)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|eta|`.
    pub fn size(&self) -> u32 {
        self.parts.iter().map(|(s, _)| s).sum()
    }

    /// `l(eta)`.
    pub fn length(&self) -> u32 {
        self.parts.len() as u32
    }

    /// `|Aut(eta)|`: product of factorials of part multiplicities.
    pub fn aut_order(&self) -> BigInt {
        let mut counts: BTreeMap<&(u32, String), u64> = BTreeMap::new();
        for p in &self.parts {
            *counts.entry(p).or_insert(0) += 1;
        }
        counts.values().map(|&m| factorial(m)).product()
    }

    /// `z(eta) = |Aut(eta)| prod eta_i`.
    pub fn z_factor(&self) -> BigInt {
        self.aut_order() * self.parts.iter().map(|(s, _)| BigInt::from(*s)).product::<BigInt>()
    }

    /// `eta^dual`: same sizes, dual weights.
    pub fn dual(&self, pairing: &LabelPairing) -> Result<Self> {
        Self::new(
            self.parts.iter().map(|(s, l)| Ok((*s, pairing.dual(l)?.to_string()))).collect::<Result<Vec<_>>>()?,
        )
    }

    /// `(-1)^{|eta| - l(eta)} z(eta) q^{-|eta|}`.
    pub fn gluing_weight(&self) -> QSeries {
        let sign = if (self.size() - self.length()).is_multiple_of(2) { 1 } else { -1 };
        Series::monomial(Rational::from_integer(self.z_factor() * sign), -(self.size() as i64))
    }
}

impl fmt::Display for WeightedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.parts.iter().map(|(s, l)| format!("{s}:{l}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for WeightedPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "0" {
            return Ok(Self::empty());
        }
        let bad = || Error::Invalid(format!("malformed weighted partition '{s}'"));
        let parts = s
            .split(',')
            .map(|p| {
                let (n, l) = p.split_once(':').ok_or_else(bad)?;
                let n: u32 = n.parse().map_err(|_| bad())?;
                if l.is_empty() {
                    return Err(bad());
                }
                Ok((n, l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

/// Every weighted partition of size at most `bound` with weights from `labels`.
pub fn partitions_up_to(bound: u32, labels: &[String]) -> Vec<WeightedPartition> {
    let mut kinds: Vec<(u32, String)> = Vec::new();
    for s in 1..=bound {
        for l in labels {
            kinds.push((s, l.clone()));
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(
        kinds: &[(u32, String)],
        i: usize,
        budget: u32,
        current: &mut Vec<(u32, String)>,
        out: &mut Vec<WeightedPartition>,
    ) {
        if i == kinds.len() {
            out.push(WeightedPartition::new(current.clone()).unwrap());
            return;
        }
        let (s, _) = &kinds[i];
        let mut used = 0;
        loop {
            go(kinds, i + 1, budget - used * s, current, out);
            if (used + 1) * s > budget {
                break;
            }
            current.push(kinds[i].clone());
            used += 1;
        }
        for _ in 0..used {
            current.pop();
        }
    }
    go(&kinds, 0, bound, &mut current, &mut out);
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    out
}

/// `vdim_1(beta_1) + vdim_2(beta_2) = vdim(beta) + 2|eta|`, for any number of
/// pieces: `sum_i vdims[i] = total + 2 sum |eta_j|`.
pub fn dimension_filter(piece_vdims: &[i64], total_vdim: i64, etas: &[&WeightedPartition]) -> bool {
    let contact: i64 = etas.iter().map(|e| e.size() as i64).sum();
    piece_vdims.iter().sum::<i64>() == total_vdim + 2 * contact
}

/// Lookup key of a relative table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelativeKey {
    pub marks: BTreeSet<String>,
    pub contact: Vec<WeightedPartition>,
    pub class: CurveClass,
}

/// Relative partition function values with their virtual-dimension functional.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeTable {
    pub vdim: LinearFunctional,
    /// Missing entries count as zero.
    pub total: bool,
    entries: BTreeMap<RelativeKey, QSeries>,
}

impl RelativeTable {
    pub fn new(vdim: LinearFunctional, total: bool) -> Self {
        RelativeTable { vdim, total, entries: BTreeMap::new() }
    }

    /// The table with a single entry `1` at the zero class and empty contact.
    pub fn unit(vdim: LinearFunctional, rank: usize, contact_count: usize) -> Self {
        let mut t = Self::new(vdim, true);
        t.insert(BTreeSet::new(), vec![WeightedPartition::empty(); contact_count], CurveClass::zero(rank), QSeries::one());
        t
    }

    pub fn insert(&mut self, marks: BTreeSet<String>, contact: Vec<WeightedPartition>, class: CurveClass, value: QSeries) {
        self.entries.insert(RelativeKey { marks, contact, class }, value);
    }

    pub fn get(&self, key: &RelativeKey) -> Result<Option<&QSeries>> {
        match self.entries.get(key) {
            Some(v) => Ok(Some(v)),
            None if self.total => Ok(None),
            None => Err(Error::MissingEntry(format!(
                "class {} contact [{}] marks {{{}}}",
                key.class,
                key.contact.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
                key.marks.iter().cloned().collect::<Vec<_>>().join(",")
            ))),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&RelativeKey, &QSeries)> {
        self.entries.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = v.scale(c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let s = out.entries.get(k).map_or_else(|| v.clone(), |a| a.add(v));
            out.entries.insert(k.clone(), s);
        }
        out
    }
}

/// One decomposition of the target class: the main piece's class and one
/// class per bubble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub main: CurveClass,
    pub bubbles: Vec<CurveClass>,
}

/// Inputs of one degeneration-formula evaluation.
#[derive(Clone, Debug)]
pub struct Degeneration<'a> {
    pub main: &'a RelativeTable,
    pub bubbles: Vec<&'a RelativeTable>,
    pub pairing: &'a LabelPairing,
    /// Bound on `|eta_i|` for each contact partition.
    pub contact_bound: u32,
    /// Virtual dimension of the absolute class.
    pub total_vdim: i64,
}

/// Count of nonzero terms that survived the dimension filter, for reporting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SumStats {
    pub surviving_terms: usize,
    pub nonempty_contact_terms: usize,
}

impl Degeneration<'_> {
    /// `degeneration_sum` over the supplied splittings and every distribution
    /// of `marks` among the pieces.
    pub fn sum(&self, splittings: &[Splitting], marks: &BTreeSet<String>) -> Result<(QSeries, SumStats)> {
        let labels: Vec<String> = self.pairing.labels().cloned().collect();
        let etas = partitions_up_to(self.contact_bound, &labels);
        let l = self.bubbles.len();
        let mut stats = SumStats::default();
        let mut acc = QSeries::zero();
        let marks: Vec<&String> = marks.iter().collect();
        let assignments = (l + 1).pow(marks.len() as u32);

        for sp in splittings {
            if sp.bubbles.len() != l {
                return Err(Error::Invalid("splitting has the wrong number of bubble classes".into()));
            }
            let mut vdims = vec![self.main.vdim.eval(&sp.main)];
            vdims.extend(self.bubbles.iter().zip(&sp.bubbles).map(|(t, b)| t.vdim.eval(b)));

            let mut choice = vec![0usize; l];
            loop {
                let chosen: Vec<&WeightedPartition> = choice.iter().map(|&i| &etas[i]).collect();
                if dimension_filter(&vdims, self.total_vdim, &chosen) {
                    for code in 0..assignments {
                        let mut side_marks = vec![BTreeSet::new(); l + 1];
                        let mut c = code;
                        for m in &marks {
                            side_marks[c % (l + 1)].insert((*m).clone());
                            c /= l + 1;
                        }
                        let key = RelativeKey {
                            marks: side_marks[0].clone(),
                            contact: chosen.iter().map(|e| (*e).clone()).collect(),
                            class: sp.main.clone(),
                        };
                        let Some(main) = self.main.get(&key)? else { continue };
                        let mut term = main.clone();
                        for (i, table) in self.bubbles.iter().enumerate() {
                            let key = RelativeKey {
                                marks: side_marks[i + 1].clone(),
                                contact: vec![chosen[i].dual(self.pairing)?],
                                class: sp.bubbles[i].clone(),
                            };
                            let Some(v) = table.get(&key)? else {
                                term = QSeries::zero();
                                break;
                            };
                            term = term.mul(&chosen[i].gluing_weight()).mul(v);
                        }
                        if !term.is_exact_zero() {
                            stats.surviving_terms += 1;
                            if chosen.iter().any(|e| !e.is_empty()) {
                                stats.nonempty_contact_terms += 1;
                            }
                        }
                        acc = acc.add(&term);
                    }
                }
                // advance the contact odometer
                let mut i = 0;
                loop {
                    if i == l {
                        break;
                    }
                    choice[i] += 1;
                    if choice[i] < etas.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == l {
                    break;
                }
            }
        }
        Ok((acc, stats))
    }
}
