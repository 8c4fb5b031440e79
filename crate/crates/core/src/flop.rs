//! Flop data and the checkers comparing generating functions across a flop.
//!
//! The numerator/denominator ratios are formed on each side in its own
//! Novikov ring and compared through `F`; a class whose image is not
//! effective must carry a vanishing ratio coefficient.

use std::fmt;

use rayon::prelude::*;

use crate::bps::BpsTable;
use crate::channels::{ChannelSeries, InsertionMonomial};
use crate::error::{Error, Result};
use crate::lattice::{CurveClass, Lattice, LatticeMap, LinearFunctional};
use crate::novikov::{CoeffRing, NovikovSeries};
use crate::QSeries;

/// Lattice-level description of a flop `f: X --> X'`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlopData {
    pub source: Lattice,
    pub target: Lattice,
    pub f: LatticeMap,
    /// Center curve classes `[C_i]` (source coordinates) with widths, widest first.
    pub center: Vec<(CurveClass, u32)>,
    pub c1_source: LinearFunctional,
    pub c1_target: LinearFunctional,
    center_lattice: Option<Lattice>,
}

impl FlopData {
    pub fn new(
        source: Lattice,
        target: Lattice,
        f: LatticeMap,
        center: Vec<(CurveClass, u32)>,
        c1_source: LinearFunctional,
        c1_target: LinearFunctional,
    ) -> Result<Self> {
        let n = source.ambient_rank();
        if target.ambient_rank() != n || f.source_rank() != n || f.target_rank() != n {
            return Err(Error::InvalidFlop("F must be square on the common ambient rank".into()));
        }
        match f.determinant() {
            Some(1 | -1) => {}
            _ => return Err(Error::InvalidFlop("F is not a lattice isomorphism".into())),
        }
        if c1_source.0.len() != n || c1_target.0.len() != n {
            return Err(Error::InvalidFlop("c1 functionals have the wrong length".into()));
        }
        if center.windows(2).any(|w| w[0].1 < w[1].1) || center.iter().any(|c| c.1 == 0) {
            return Err(Error::InvalidWidths("widths must be positive and sorted widest first".into()));
        }
        for (c, _) in &center {
            if !source.is_effective(c) || c.is_zero() {
                return Err(Error::InvalidFlop(format!("center class {c} is not effective")));
            }
            let image = f.apply(c).neg();
            if !target.is_effective(&image) {
                return Err(Error::InvalidFlop(format!("F{c} = {} is not minus an effective class", f.apply(c))));
            }
        }
        for g in source.generators().iter().chain(center.iter().map(|c| &c.0)) {
            if c1_target.eval(&f.apply(g)) != c1_source.eval(g) {
                return Err(Error::InvalidFlop(format!("c1 is not preserved by F on {g}")));
            }
        }
        let center_lattice = if center.is_empty() {
            None
        } else {
            Some(
                Lattice::new(center.iter().map(|c| c.0 .0.clone()).collect(), vec![1; center.len()])
                    .map_err(|e| Error::InvalidFlop(format!("center classes: {e}")))?,
            )
        };
        Ok(FlopData { source, target, f, center, c1_source, c1_target, center_lattice })
    }

    pub fn widths(&self) -> Vec<u32> {
        self.center.iter().map(|c| c.1).collect()
    }

    /// `beta` in `Cen(f)`.
    pub fn in_center(&self, beta: &CurveClass) -> bool {
        match &self.center_lattice {
            Some(l) => l.contains(beta),
            None => beta.is_zero(),
        }
    }

    /// Coordinates of `beta` in the center basis.
    pub fn center_coords(&self, beta: &CurveClass) -> Option<Vec<i64>> {
        match &self.center_lattice {
            Some(l) => l.cone_coords(beta),
            None => beta.is_zero().then(Vec::new),
        }
    }

    /// `beta'` in `Cen(f^{-1}) = F Cen(f)`.
    pub fn in_target_center(&self, beta: &CurveClass) -> bool {
        self.f.inverse().map(|g| self.in_center(&g.apply(beta))).unwrap_or(false)
    }

    /// The inverse flop `X' --> X`.
    pub fn inverse(&self) -> Result<FlopData> {
        let g = self.f.inverse()?;
        let center = self.center.iter().map(|(c, w)| (self.f.apply(c).neg(), *w)).collect();
        FlopData::new(self.target.clone(), self.source.clone(), g, center, self.c1_target.clone(), self.c1_source.clone())
    }
}

/// One localized discrepancy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub channel: String,
    pub class: CurveClass,
    pub image: Option<CurveClass>,
    /// First q-exponent (or genus, for BPS checks) that differs.
    pub exponent: Option<i64>,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "channel {} class {}", self.channel, self.class)?;
        if let Some(i) = &self.image {
            write!(f, " -> {i}")?;
        }
        if let Some(e) = self.exponent {
            write!(f, " at {e}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Outcome of one checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    /// Number of coefficient comparisons made.
    pub compared: usize,
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport { name: name.to_string(), compared: 0, findings: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.compared += other.compared;
        self.findings.extend(other.findings);
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{}: {} ({} comparisons", self.name, verdict, self.compared)?;
        if !self.passed() {
            write!(f, ", {} findings", self.findings.len())?;
        }
        write!(f, ")")?;
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for x in &self.findings {
            write!(f, "\n  {x}")?;
        }
        Ok(())
    }
}

fn degree_within(l: &Lattice, beta: &CurveClass, bound: u32) -> bool {
    l.degree(beta).is_some_and(|d| d <= bound as i64)
}

/// Compare `a(beta)` with `b(map beta)` for effective `beta` of `a`'s lattice,
/// and report classes of either side whose partner is not effective.
pub fn compare_through<R: CoeffRing + 'static>(
    channel: &str,
    a: &NovikovSeries<R>,
    b: &NovikovSeries<R>,
    map: &LatticeMap,
    first_difference: &(dyn Fn(&R, &R) -> Option<i64> + Sync),
) -> Result<CheckReport> {
    let mut report = CheckReport::new(channel);
    let inverse = map.inverse()?;
    let (la, lb) = (a.lattice(), b.lattice());
    for beta in la.effective_classes(a.degree_bound()) {
        let image = map.apply(&beta);
        let ca = a.coeff(&beta);
        if lb.is_effective(&image) {
            if !degree_within(lb, &image, b.degree_bound()) {
                continue;
            }
            report.compared += 1;
            if let Some(e) = first_difference(&ca, &b.coeff(&image)) {
                report.findings.push(Finding {
                    channel: channel.to_string(),
                    class: beta,
                    image: Some(image),
                    exponent: Some(e),
                    message: "coefficients differ".into(),
                });
            }
        } else {
            report.compared += 1;
            if !ca.vanishes() {
                report.findings.push(Finding {
                    channel: channel.to_string(),
                    class: beta,
                    image: Some(image),
                    exponent: None,
                    message: "nonzero coefficient at a class whose image is not effective".into(),
                });
            }
        }
    }
    for beta in lb.effective_classes(b.degree_bound()) {
        let pre = inverse.apply(&beta);
        if la.is_effective(&pre) {
            continue;
        }
        report.compared += 1;
        if !b.coeff(&beta).vanishes() {
            report.findings.push(Finding {
                channel: channel.to_string(),
                class: pre,
                image: Some(beta),
                exponent: None,
                message: "nonzero coefficient at an image class whose preimage is not effective".into(),
            });
        }
    }
    Ok(report)
}

pub fn q_first_difference(a: &QSeries, b: &QSeries) -> Option<i64> {
    a.first_difference(b)
}

/// The center part `sum_{beta in Cen} v^beta Z_beta` of a series on the
/// source (`target_side = false`) or target side.
pub fn center_part<R: CoeffRing>(z: &NovikovSeries<R>, fd: &FlopData, target_side: bool) -> NovikovSeries<R> {
    if target_side {
        z.filter(|b| fd.in_target_center(b))
    } else {
        z.filter(|b| fd.in_center(b))
    }
}

/// `N / D` channel by channel, `D` the center part of the empty channel.
pub fn flop_ratio<R: CoeffRing>(z: &ChannelSeries<R>, fd: &FlopData, target_side: bool) -> Result<ChannelSeries<R>> {
    let den = center_part(z.empty_channel(), fd, target_side).invert()?;
    z.map_channels(|_, s| s.mul(&den))
}

fn match_channels<'a, R: CoeffRing>(
    zx: &'a ChannelSeries<R>,
    zxp: &'a ChannelSeries<R>,
    report: &mut CheckReport,
) -> Vec<(&'a InsertionMonomial, &'a NovikovSeries<R>, &'a NovikovSeries<R>)> {
    let mut out = Vec::new();
    for (m, s) in zx.channels() {
        match zxp.channel(m) {
            Some(t) => out.push((m, s, t)),
            None => report.findings.push(Finding {
                channel: m.to_string(),
                class: zx.lattice().zero(),
                image: None,
                exponent: None,
                message: "channel missing on the flopped side".into(),
            }),
        }
    }
    for (m, _) in zxp.channels() {
        if zx.channel(m).is_none() {
            report.findings.push(Finding {
                channel: m.to_string(),
                class: zxp.lattice().zero(),
                image: None,
                exponent: None,
                message: "channel missing on the original side".into(),
            });
        }
    }
    out
}

/// Ratio identity through `F`, for any coefficient ring.
pub fn check_ratio_identity<R: CoeffRing + 'static>(
    name: &str,
    zx: &ChannelSeries<R>,
    zxp: &ChannelSeries<R>,
    fd: &FlopData,
    first_difference: &(dyn Fn(&R, &R) -> Option<i64> + Sync),
) -> Result<CheckReport> {
    let rx = flop_ratio(zx, fd, false)?;
    let rxp = flop_ratio(zxp, fd, true)?;
    let mut report = CheckReport::new(name);
    let pairs = match_channels(&rx, &rxp, &mut report);
    let parts: Vec<Result<CheckReport>> = pairs
        .par_iter()
        .map(|(m, a, b)| compare_through(&m.to_string(), a, b, &fd.f, first_difference))
        .collect();
    for p in parts {
        report.merge(p?);
    }
    Ok(report)
}

/// `check_flop_formula`.
pub fn check_flop_formula(zx: &ChannelSeries<QSeries>, zxp: &ChannelSeries<QSeries>, fd: &FlopData) -> Result<CheckReport> {
    check_ratio_identity("flop", zx, zxp, fd, &q_first_difference)
}

/// `Z_X(beta) = Z_X'(-F beta)` on `Cen(f)`, generic in the coefficient ring.
pub fn check_center_identity<R: CoeffRing>(
    name: &str,
    zx: &NovikovSeries<R>,
    zxp: &NovikovSeries<R>,
    fd: &FlopData,
    first_difference: &(dyn Fn(&R, &R) -> Option<i64> + Sync),
) -> CheckReport {
    let mut report = CheckReport::new(name);
    let lx = zx.lattice();
    for beta in lx.effective_classes(zx.degree_bound()) {
        if !fd.in_center(&beta) {
            continue;
        }
        let image = fd.f.apply(&beta).neg();
        if !degree_within(zxp.lattice(), &image, zxp.degree_bound()) {
            continue;
        }
        report.compared += 1;
        if let Some(e) = first_difference(&zx.coeff(&beta), &zxp.coeff(&image)) {
            report.findings.push(Finding {
                channel: "1".into(),
                class: beta,
                image: Some(image),
                exponent: Some(e),
                message: "center coefficients differ".into(),
            });
        }
    }
    report
}

/// `check_center_formula`.
pub fn check_center_formula(zx: &ChannelSeries<QSeries>, zxp: &ChannelSeries<QSeries>, fd: &FlopData) -> CheckReport {
    check_center_identity("center", zx.empty_channel(), zxp.empty_channel(), fd, &q_first_difference)
}

/// `check_bps_corollary`: `n_{g,beta}(m) = n_{g,F beta}(m)` off the center and
/// `n_{g,beta} = n_{g,-F beta}` on it, for classes of degree at most `bound`.
pub fn check_bps_corollary(tx: &BpsTable, txp: &BpsTable, fd: &FlopData, bound: u32) -> CheckReport {
    let mut report = CheckReport::new("bps-corollary");
    let partner = |beta: &CurveClass| -> CurveClass {
        if fd.in_center(beta) {
            fd.f.apply(beta).neg()
        } else {
            fd.f.apply(beta)
        }
    };
    let inverse = fd.f.inverse().ok();
    let back = |beta: &CurveClass| -> Option<CurveClass> {
        let g = inverse.as_ref()?;
        let pre = g.apply(beta);
        // target center classes come from -F on the source center
        if fd.in_center(&pre) {
            Some(pre.neg())
        } else {
            Some(pre)
        }
    };
    for (g, beta, m, n) in tx.entries() {
        let image = partner(beta);
        if !degree_within(tx.lattice(), beta, bound) || !degree_within(txp.lattice(), &image, bound) {
            if !txp.lattice().is_effective(&image) {
                report.compared += 1;
                report.findings.push(Finding {
                    channel: m.to_string(),
                    class: beta.clone(),
                    image: Some(image),
                    exponent: Some(g),
                    message: "entry at a class whose image is not effective".into(),
                });
            }
            continue;
        }
        report.compared += 1;
        let other = txp.get(g, &image, m);
        if &other != n {
            report.findings.push(Finding {
                channel: m.to_string(),
                class: beta.clone(),
                image: Some(image),
                exponent: Some(g),
                message: format!("{} vs {}", crate::scalar::render_rational(n), crate::scalar::render_rational(&other)),
            });
        }
    }
    for (g, beta, m, n) in txp.entries() {
        let Some(pre) = back(beta) else { continue };
        if !degree_within(txp.lattice(), beta, bound) {
            continue;
        }
        let known = tx.lattice().is_effective(&pre) && degree_within(tx.lattice(), &pre, bound);
        if known && tx.get(g, &pre, m) != *n {
            if !tx.genera(&pre, m).is_some_and(|s| s.contains_key(&g)) {
                report.compared += 1;
                report.findings.push(Finding {
                    channel: m.to_string(),
                    class: pre,
                    image: Some(beta.clone()),
                    exponent: Some(g),
                    message: format!("0 vs {}", crate::scalar::render_rational(n)),
                });
            }
        } else if !tx.lattice().is_effective(&pre) {
            report.compared += 1;
            report.findings.push(Finding {
                channel: m.to_string(),
                class: pre,
                image: Some(beta.clone()),
                exponent: Some(g),
                message: "entry on the flopped side whose preimage is not effective".into(),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank1() -> Lattice {
        Lattice::standard(vec![1]).unwrap()
    }

    #[test]
    fn flop_data_validation() {
        let f = LatticeMap::from_rows(vec![vec![-1]]).unwrap();
        let zero = LinearFunctional(vec![0]);
        let fd = FlopData::new(rank1(), rank1(), f.clone(), vec![(CurveClass(vec![1]), 1)], zero.clone(), zero.clone())
            .unwrap();
        assert!(fd.in_center(&CurveClass(vec![3])));
        assert!(fd.in_target_center(&CurveClass(vec![2])));
        let bad = FlopData::new(
            rank1(),
            rank1(),
            LatticeMap::identity(1),
            vec![(CurveClass(vec![1]), 1)],
            zero.clone(),
            zero.clone(),
        );
        assert!(bad.is_err());
        let skew = FlopData::new(
            rank1(),
            rank1(),
            f,
            vec![(CurveClass(vec![1]), 1)],
            LinearFunctional(vec![1]),
            LinearFunctional(vec![1]),
        );
        assert!(skew.is_err());
    }

    #[test]
    fn trivial_flop_is_identity_check() {
        let l = rank1();
        let zero = LinearFunctional(vec![0]);
        let fd = FlopData::new(l.clone(), l.clone(), LatticeMap::identity(1), vec![], zero.clone(), zero).unwrap();
        let s = NovikovSeries::from_terms(
            l.clone(),
            3,
            [(CurveClass(vec![0]), QSeries::one()), (CurveClass(vec![2]), QSeries::monomial(crate::scalar::rat(3), 1))],
        )
        .unwrap();
        let z = ChannelSeries::from_empty_channel(s.clone());
        assert!(check_flop_formula(&z, &z, &fd).unwrap().passed());
        let mut t = s.clone();
        t.accumulate(CurveClass(vec![1]), QSeries::one()).unwrap();
        let r = check_flop_formula(&z, &ChannelSeries::from_empty_channel(t), &fd).unwrap();
        assert!(!r.passed());
        assert_eq!(r.findings[0].class, CurveClass(vec![1]));
    }
}
