//! The chain of generating-function identities relating `X`, its first
//! blow-up `X_1`, the relative geometry `X_1 / E_1`, and the flopped side.
//!
//! All series of a side are indexed by that side's own curve classes: the
//! level-1 and relative inputs at `beta` stand for the invariants at
//! `phi^! beta`.

use crate::channels::ChannelSeries;
use crate::error::{Error, Result};
use crate::flop::{
    center_part, check_center_identity, check_ratio_identity, q_first_difference, CheckReport, Finding, FlopData,
};
use crate::lattice::CurveClass;
use crate::novikov::NovikovSeries;
use crate::QSeries;

/// Inputs for one side of the flop.
#[derive(Clone, Debug)]
pub struct SideData {
    /// `sum v^beta Z(X)_beta`.
    pub absolute: ChannelSeries<QSeries>,
    /// `sum v^beta Z(X_1)_{phi^! beta}`.
    pub level1: ChannelSeries<QSeries>,
    /// `sum v^beta Z(X_1 / E_1)_{phi^! beta}`.
    pub relative: ChannelSeries<QSeries>,
    /// `sum_d v^{d C_i} Z(P_i / D_i)_{d C_i}`, one per center curve.
    pub bubbles: Vec<NovikovSeries<QSeries>>,
    /// The same for the bubbles of the level-1 degeneration.
    pub level1_bubbles: Vec<NovikovSeries<QSeries>>,
}

impl SideData {
    /// Inputs for a side whose center curves all have width one, from the
    /// absolute series alone: the bubbles are the center series along each
    /// curve and the level-1 bubbles are trivial.
    pub fn width_one(absolute: ChannelSeries<QSeries>, fd: &FlopData, target_side: bool) -> Result<SideData> {
        if fd.widths().iter().any(|&w| w != 1) {
            return Err(Error::InvalidWidths("all widths must equal one".into()));
        }
        let lattice = absolute.lattice().clone();
        let bound = absolute.degree_bound();
        let empty = absolute.empty_channel();
        let mut bubbles = Vec::new();
        for (c, _) in &fd.center {
            let c = if target_side { fd.f.apply(c).neg() } else { c.clone() };
            bubbles.push(empty.filter(|b| multiple_of(b, &c)));
        }
        let product = product_of(&bubbles, &lattice, bound)?;
        let inv = product.invert()?;
        let relative = absolute.map_channels(|_, s| s.mul(&inv))?;
        let trivial = vec![NovikovSeries::one(lattice, bound); bubbles.len()];
        Ok(SideData { absolute, level1: relative.clone(), relative, bubbles, level1_bubbles: trivial })
    }
}

fn multiple_of(b: &CurveClass, c: &CurveClass) -> bool {
    if b.is_zero() {
        return true;
    }
    let Some(i) = c.0.iter().position(|&x| x != 0) else { return false };
    let k = b.0[i] / c.0[i];
    k > 0 && c.scale(k) == *b
}

fn product_of(
    factors: &[NovikovSeries<QSeries>],
    lattice: &crate::lattice::Lattice,
    bound: u32,
) -> Result<NovikovSeries<QSeries>> {
    let mut p = NovikovSeries::one(lattice.clone(), bound);
    for f in factors {
        p = p.mul(f)?;
    }
    Ok(p)
}

/// Channelwise comparison of two series over the same lattice.
pub fn compare_channel_series(name: &str, a: &ChannelSeries<QSeries>, b: &ChannelSeries<QSeries>) -> CheckReport {
    let mut report = CheckReport::new(name);
    for (m, s) in a.channels() {
        let Some(t) = b.channel(m) else {
            report.findings.push(Finding {
                channel: m.to_string(),
                class: a.lattice().zero(),
                image: None,
                exponent: None,
                message: "channel missing on one side".into(),
            });
            continue;
        };
        report.merge(compare_series(name, &m.to_string(), s, t));
    }
    report
}

fn compare_series(name: &str, channel: &str, a: &NovikovSeries<QSeries>, b: &NovikovSeries<QSeries>) -> CheckReport {
    let mut report = CheckReport::new(name);
    let bound = a.degree_bound().min(b.degree_bound());
    for beta in a.lattice().effective_classes(bound) {
        report.compared += 1;
        if let Some(e) = a.coeff(&beta).first_difference(&b.coeff(&beta)) {
            report.findings.push(Finding {
                channel: channel.to_string(),
                class: beta,
                image: None,
                exponent: Some(e),
                message: "coefficients differ".into(),
            });
        }
    }
    report
}

fn times(z: &ChannelSeries<QSeries>, f: &NovikovSeries<QSeries>) -> Result<ChannelSeries<QSeries>> {
    z.map_channels(|_, s| s.mul(f))
}

fn ratio(z: &ChannelSeries<QSeries>, fd: &FlopData, target_side: bool) -> Result<ChannelSeries<QSeries>> {
    crate::flop::flop_ratio(z, fd, target_side)
}

fn center_channels(z: &ChannelSeries<QSeries>, fd: &FlopData, target_side: bool) -> Result<ChannelSeries<QSeries>> {
    z.map_channels(|_, s| Ok(center_part(s, fd, target_side)))
}

/// The identities internal to one side.
pub fn verify_side(side: &SideData, fd: &FlopData, target_side: bool) -> Result<Vec<CheckReport>> {
    let tag = if target_side { "X'" } else { "X" };
    let name = |s: &str| format!("{tag} {s}");
    let lattice = side.absolute.lattice();
    let bound = side.absolute.degree_bound();
    if side.bubbles.len() != fd.center.len() || side.level1_bubbles.len() != fd.center.len() {
        return Err(Error::Invalid("one bubble series per center curve is required".into()));
    }
    let bubbles = product_of(&side.bubbles, lattice, bound)?;
    let bubbles1 = product_of(&side.level1_bubbles, lattice, bound)?;
    let center = |z: &ChannelSeries<QSeries>| center_channels(z, fd, target_side);
    let mut out = Vec::new();

    out.push(compare_channel_series(&name("absolute factorization"), &side.absolute, &times(&side.relative, &bubbles)?));
    out.push(compare_channel_series(
        &name("center factorization"),
        &center(&side.absolute)?,
        &times(&center(&side.relative)?, &bubbles)?,
    ));
    out.push(compare_channel_series(
        &name("relative ratio"),
        &ratio(&side.absolute, fd, target_side)?,
        &ratio(&side.relative, fd, target_side)?,
    ));
    out.push(compare_channel_series(&name("level-1 factorization"), &side.level1, &times(&side.relative, &bubbles1)?));
    out.push(compare_channel_series(
        &name("level-1 center factorization"),
        &center(&side.level1)?,
        &times(&center(&side.relative)?, &bubbles1)?,
    ));
    out.push(compare_channel_series(
        &name("level-1 relative ratio"),
        &ratio(&side.level1, fd, target_side)?,
        &ratio(&side.relative, fd, target_side)?,
    ));
    out.push(compare_channel_series(
        &name("blow-up ratio"),
        &ratio(&side.absolute, fd, target_side)?,
        &ratio(&side.level1, fd, target_side)?,
    ));
    if fd.widths().iter().all(|&w| w == 1) {
        let one = ChannelSeries::from_empty_channel(NovikovSeries::one(lattice.clone(), bound));
        let mut r = CheckReport::new(&name("unit level-1 center"));
        let c = center_part(side.level1.empty_channel(), fd, target_side);
        r.merge(compare_series(&r.name.clone(), "1", &c, one.empty_channel()));
        out.push(r);
    }
    Ok(out)
}

/// Every identity of the chain, ending with the flop and center formulas.
pub fn verify_proof_pipeline(x: &SideData, xp: &SideData, fd: &FlopData) -> Result<Vec<CheckReport>> {
    let mut out = verify_side(x, fd, false)?;
    out.extend(verify_side(xp, fd, true)?);
    out.push(check_ratio_identity("level-1 flop ratio", &x.level1, &xp.level1, fd, &q_first_difference)?);
    out.push(check_center_identity(
        "relative center exchange",
        &center_part(x.relative.empty_channel(), fd, false),
        &center_part(xp.relative.empty_channel(), fd, true),
        fd,
        &q_first_difference,
    ));
    out.push(check_center_identity(
        "level-1 center exchange",
        &center_part(x.level1.empty_channel(), fd, false),
        &center_part(xp.level1.empty_channel(), fd, true),
        fd,
        &q_first_difference,
    ));
    let mut flop = crate::flop::check_flop_formula(&x.absolute, &xp.absolute, fd)?;
    flop.name = "flop".into();
    out.push(flop);
    out.push(crate::flop::check_center_formula(&x.absolute, &xp.absolute, fd));
    Ok(out)
}
