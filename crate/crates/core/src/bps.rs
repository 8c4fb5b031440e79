//! BPS state counts and the exponential transform relating them to reduced
//! DT partition functions.
//!
//! Forward: `Z = exp(sum_beta v^beta F_beta)` where, for `c1.beta = 0`,
//! `F_beta = sum_g sum_{r | beta} n_{g,beta/r} (-1)^{g-1}/r s_r^{g-1}`, and for
//! `c1.beta > 0`, `F_beta = sum_g n_{g,beta}(m) (-1)^{g-1} s_1^{g-1}
//! (1+q)^{c1.beta}` in insertion channel `m`. The inverse takes the logarithm
//! and peels the kernel basis class by class in increasing degree.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::channels::{ChannelSeries, InsertionMonomial, InsertionSet};
use crate::error::{Error, Result};
use crate::kernel::{kernel_power, one_plus_q_power, sbasis_peel, GenusRange, KernelForm, KernelMonomial};
use crate::lattice::{CurveClass, Lattice, LinearFunctional};
use crate::novikov::NovikovSeries;
use crate::scalar::{rat, sign_pow, Rational};
use crate::series::Window;
use crate::QSeries;

/// `n_{g,beta}(m)`, with the data needed to interpret it.
#[derive(Clone, Debug, PartialEq)]
pub struct BpsTable {
    lattice: Lattice,
    c1: LinearFunctional,
    insertions: InsertionSet,
    entries: BTreeMap<(CurveClass, InsertionMonomial), BTreeMap<i64, Rational>>,
}

impl BpsTable {
    pub fn new(lattice: Lattice, c1: LinearFunctional, insertions: InsertionSet) -> Self {
        BpsTable { lattice, c1, insertions, entries: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn c1(&self) -> &LinearFunctional {
        &self.c1
    }

    pub fn insertions(&self) -> &InsertionSet {
        &self.insertions
    }

    /// Add `value` to `n_{g,beta}(m)`.
    pub fn insert(&mut self, g: i64, beta: CurveClass, m: InsertionMonomial, value: Rational) -> Result<()> {
        if beta.is_zero() {
            return Err(Error::ZeroClass);
        }
        if !self.lattice.is_effective(&beta) {
            return Err(Error::NotEffective(beta.0));
        }
        let c = self.c1.eval(&beta);
        if c < 0 {
            return Err(Error::NegativeC1(beta.0));
        }
        if !self.insertions.is_reduced(&m)? {
            return Err(Error::InsertionNotReduced(m.to_string()));
        }
        if c == 0 && !m.is_empty() {
            return Err(Error::InconsistentChannel {
                class: beta.0,
                channel: m.to_string(),
                reason: "insertions are only carried by classes with positive c1".into(),
            });
        }
        let slot = self.entries.entry((beta.clone(), m.clone())).or_default();
        let v = slot.entry(g).or_insert_with(Rational::zero);
        *v += value;
        if v.is_zero() {
            slot.remove(&g);
            if slot.is_empty() {
                self.entries.remove(&(beta, m));
            }
        }
        Ok(())
    }

    pub fn get(&self, g: i64, beta: &CurveClass, m: &InsertionMonomial) -> Rational {
        self.entries
            .get(&(beta.clone(), m.clone()))
            .and_then(|s| s.get(&g).cloned())
            .unwrap_or_else(Rational::zero)
    }

    /// Genus slice of `(beta, m)`.
    pub fn genera(&self, beta: &CurveClass, m: &InsertionMonomial) -> Option<&BTreeMap<i64, Rational>> {
        self.entries.get(&(beta.clone(), m.clone()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.values().map(|s| s.len()).sum()
    }

    /// `(g, beta, m, n)` ordered by class degree, class, monomial, genus.
    pub fn entries(&self) -> Vec<(i64, &CurveClass, &InsertionMonomial, &Rational)> {
        let mut keys: Vec<_> = self.entries.keys().collect();
        keys.sort_by(|(a, ma), (b, mb)| {
            self.lattice.order_key(a).cmp(&self.lattice.order_key(b)).then_with(|| ma.cmp(mb))
        });
        let mut out = Vec::new();
        for k in keys {
            for (g, v) in &self.entries[k] {
                out.push((*g, &k.0, &k.1, v));
            }
        }
        out
    }

    /// Monomials appearing in the table.
    pub fn monomials(&self) -> Vec<InsertionMonomial> {
        let mut v: Vec<_> = self.entries.keys().map(|(_, m)| m.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Entries with class degree at most `bound`.
    pub fn restrict(&self, bound: u32) -> Self {
        let mut out = self.clone();
        out.entries.retain(|(b, _), _| self.lattice.degree(b).unwrap() <= bound as i64);
        out
    }
}

/// `divisors(beta)`.
pub fn divisors(lattice: &Lattice, beta: &CurveClass) -> Result<Vec<u32>> {
    lattice.divisors(beta)
}

fn kernel_term(g: i64, r: u32, one_plus_q: u32) -> KernelMonomial {
    KernelMonomial::kernel(r, g - 1).with_one_plus_q(one_plus_q)
}

/// The exponent `sum_beta v^beta F_beta` as exact kernel forms.
pub fn bps_exponent(
    table: &BpsTable,
    degree_bound: u32,
    channels: &[InsertionMonomial],
) -> Result<ChannelSeries<KernelForm>> {
    let lattice = &table.lattice;
    let mut declared: Vec<InsertionMonomial> = channels.to_vec();
    declared.extend(table.monomials());
    let mut out = ChannelSeries::<KernelForm>::zero(lattice.clone(), degree_bound, declared.iter());
    let monomials: Vec<InsertionMonomial> = out.monomials().cloned().collect();
    let bound = degree_bound as i64;

    // multi-cover block
    let mut empty = NovikovSeries::<KernelForm>::zero(lattice.clone(), degree_bound);
    for ((beta, m), genera) in &table.entries {
        if table.c1.eval(beta) != 0 {
            continue;
        }
        debug_assert!(m.is_empty());
        let d = lattice.degree(beta).unwrap();
        let mut r = 1u32;
        while d * r as i64 <= bound {
            let mut f = KernelForm::zero();
            for (&g, n) in genera {
                let c = n * rat(sign_pow(g - 1)) / rat(r as i64);
                f.add_term(kernel_term(g, r, 0), c);
            }
            empty.accumulate(beta.scale(r as i64), f)?;
            r += 1;
        }
    }

    // classes with positive c1, channel by channel
    let classes: Vec<CurveClass> = {
        let mut v: Vec<_> = table.entries.keys().map(|(b, _)| b.clone()).collect();
        v.dedup();
        v.into_iter().filter(|b| table.c1.eval(b) > 0 && lattice.degree(b).unwrap() <= bound).collect()
    };
    for m in &monomials {
        let mut series = if m.is_empty() { empty.clone() } else { NovikovSeries::zero(lattice.clone(), degree_bound) };
        for beta in &classes {
            let c = table.c1.eval(beta) as u32;
            let (scalar, reduced) = table.insertions.normalize(m, beta)?;
            if scalar.is_zero() {
                continue;
            }
            let Some(genera) = table.entries.get(&(beta.clone(), reduced)) else { continue };
            let mut f = KernelForm::zero();
            for (&g, n) in genera {
                f.add_term(kernel_term(g, 1, c), n * &scalar * rat(sign_pow(g - 1)));
            }
            series.accumulate(beta.clone(), f)?;
        }
        out.set_channel(m.clone(), series)?;
    }
    Ok(out)
}

/// DT coefficients as exact kernel forms.
pub fn bps_forward_forms(
    table: &BpsTable,
    degree_bound: u32,
    channels: &[InsertionMonomial],
) -> Result<ChannelSeries<KernelForm>> {
    bps_exponent(table, degree_bound, channels)?.exp()
}

/// `bps_forward`: the reduced DT partition function, expanded on `window`.
pub fn bps_forward(
    table: &BpsTable,
    degree_bound: u32,
    window: Window,
    channels: &[InsertionMonomial],
) -> Result<ChannelSeries<QSeries>> {
    expand_channels(&bps_forward_forms(table, degree_bound, channels)?, window)
}

pub fn expand_channels(forms: &ChannelSeries<KernelForm>, window: Window) -> Result<ChannelSeries<QSeries>> {
    forms.map_channels(|_, s| Ok(s.map_coeffs(|_, f| f.expand(window))))
}

/// Result of [`bps_inverse`].
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub table: BpsTable,
    /// Genera determined for each `(class, reduced monomial)`.
    pub coverage: BTreeMap<(CurveClass, InsertionMonomial), GenusRange>,
    /// Inconsistencies found in the input.
    pub diagnostics: Vec<String>,
}

impl Extraction {
    /// Whether `n_{g,beta}(m)` was determined by the input window.
    pub fn is_determined(&self, g: i64, beta: &CurveClass, m: &InsertionMonomial) -> bool {
        self.coverage.get(&(beta.clone(), m.clone())).is_some_and(|r| r.contains(g))
    }
}

fn divide_one_plus_q(f: &QSeries, c: u32) -> Result<QSeries> {
    if c == 0 {
        return Ok(f.clone());
    }
    let Some(t) = f.trunc_order() else {
        return Err(Error::WindowTooSmall { required: 0, available: i64::MIN });
    };
    let v = f.valuation().unwrap_or(t + 1).min(t + 1);
    let inv = one_plus_q_power::<Rational>(c).invert_to(t - v)?;
    Ok(f.mul(&inv).truncate(t))
}

/// `bps_inverse`: read BPS counts back off a reduced DT partition function.
pub fn bps_inverse(z: &ChannelSeries<QSeries>, c1: &LinearFunctional, insertions: &InsertionSet) -> Result<Extraction> {
    let lattice = z.lattice().clone();
    let log = z.log()?;
    let mut table = BpsTable::new(lattice.clone(), c1.clone(), insertions.clone());
    let mut coverage: BTreeMap<(CurveClass, InsertionMonomial), GenusRange> = BTreeMap::new();
    let mut precision: BTreeMap<CurveClass, i64> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let empty = InsertionMonomial::empty();
    let classes: Vec<CurveClass> =
        lattice.effective_classes(z.degree_bound()).into_iter().filter(|b| !b.is_zero()).collect();

    for beta in &classes {
        let c = c1.eval(beta);
        for (m, series) in log.channels() {
            let Some(f) = series.get(beta) else { continue };
            if c < 0 {
                if !f.vanishes() {
                    return Err(Error::NegativeC1(beta.0.clone()));
                }
                continue;
            }
            if c == 0 && !m.is_empty() {
                if !f.vanishes() {
                    diagnostics.push(format!(
                        "class {beta} channel {m}: nonzero coefficient where insertions cannot contribute"
                    ));
                }
                continue;
            }
            let Some(trunc) = f.trunc_order() else {
                return Err(Error::WindowMismatch(format!("class {beta} channel {m}: exact coefficient has no window")));
            };
            let (scalar, reduced) = if c > 0 { insertions.normalize(m, beta)? } else { (Rational::one(), empty.clone()) };
            if scalar.is_zero() {
                if !f.vanishes() {
                    diagnostics.push(format!("class {beta} channel {m}: insertion forces vanishing but coefficient is nonzero"));
                }
                continue;
            }
            let mut f = f.scale_rational(&(Rational::one() / &scalar));

            let mut det_trunc = trunc;
            if c == 0 {
                for r in lattice.divisors(beta)?.into_iter().filter(|&r| r > 1) {
                    let base = lattice.divide(beta, r).unwrap();
                    let window = Window::new(f.min_exp(), trunc);
                    if let Some(genera) = table.genera(&base, &empty) {
                        for (&g, n) in genera {
                            let k: QSeries = kernel_power(g, r, window);
                            let coef = n * rat(sign_pow(g - 1)) / rat(r as i64);
                            f = f.sub(&k.scale(&coef).truncate(trunc));
                        }
                    }
                    if let Some(&tb) = precision.get(&base) {
                        det_trunc = det_trunc.min(r as i64 * (tb + 1) - 1);
                    }
                }
            } else {
                f = divide_one_plus_q(&f, c as u32)?;
            }
            let f = f.truncate(det_trunc);
            let peel = sbasis_peel(&f, 1, false)?;
            if !peel.residual.vanishes() {
                let e = peel.residual.valuation().unwrap();
                return Err(Error::NotInKernelSpan { class: beta.0.clone(), channel: m.to_string(), exponent: e });
            }
            let key = (beta.clone(), reduced.clone());
            let values: BTreeMap<i64, Rational> =
                peel.form.terms().iter().map(|(&g, v)| (g, v * rat(sign_pow(g - 1)))).collect();
            if let Some(prev) = coverage.get(&key) {
                // another channel with the same reduced monomial
                let lo = prev.min.max(peel.genera.min);
                let existing = table.genera(beta, &reduced).cloned().unwrap_or_default();
                let agree = values
                    .keys()
                    .chain(existing.keys())
                    .filter(|&&g| lo.is_none_or(|lo| g >= lo))
                    .all(|g| values.get(g) == existing.get(g));
                if !agree {
                    diagnostics.push(format!(
                        "class {beta} channel {m}: disagrees with another channel reducing to {reduced}"
                    ));
                }
                continue;
            }
            for (g, v) in values {
                table.insert(g, beta.clone(), reduced.clone(), v)?;
            }
            coverage.insert(key, peel.genera);
            if m.is_empty() {
                precision.insert(beta.clone(), det_trunc);
            }
        }
    }
    Ok(Extraction { table, coverage, diagnostics })
}
