//! The Gromov-Witten side: the substitution `q = -e^{iu}` on kernel forms,
//! the correspondence checkers, the GW flop identities, and the chain that
//! carries the correspondence from `X` to the flopped side.

use num_traits::One;

use crate::channels::{ChannelSeries, InsertionMonomial, InsertionSet};
use crate::error::{Error, Result};
use crate::flop::{
    center_part, check_center_formula, check_center_identity, check_flop_formula, check_ratio_identity, CheckReport,
    Finding, FlopData,
};
use crate::kernel::{KernelForm, KernelMonomial, SBasisForm};
use crate::lattice::{CurveClass, LinearFunctional};
use crate::novikov::NovikovSeries;
use crate::scalar::{gaussian, imag_unit, rat, Gaussian, Rational, Scalar};
use crate::series::Window;
use crate::{QSeries, USeries};

/// GW partition functions per insertion channel, coefficients in `u`.
pub type GwChannels = ChannelSeries<USeries>;

fn u_window(valuation: i64, trunc: i64) -> Window {
    Window::new(valuation.min(trunc + 1), trunc)
}

/// `(2 cos(r u) - 2) / u^2` through `u^trunc`.
fn kernel_unit(r: u32, trunc: i64) -> USeries {
    let mut terms = Vec::new();
    let x2 = Rational::from_integer((r as i64 * r as i64).into());
    let mut power = rat(1);
    let mut fact = rat(1);
    for n in 1..=(trunc / 2 + 1) {
        power *= &x2;
        fact *= rat((2 * n - 1) * (2 * n));
        let sign = if n % 2 == 0 { rat(2) } else { rat(-2) };
        let e = 2 * n - 2;
        if e <= trunc {
            terms.push((e, Gaussian::from_rational(&(sign * &power / &fact))));
        }
    }
    USeries::truncated(u_window(0, trunc), terms)
}

/// `(1 - e^{iu}) / u` through `u^trunc`.
fn one_plus_q_unit(trunc: i64) -> USeries {
    let e = USeries::exp_linear(&imag_unit(), trunc + 1);
    USeries::one().sub(&e).shift(-1).truncate(trunc)
}

/// The image of `e^{c u}` through `u^trunc`.
pub fn exp_u(c: &Gaussian, trunc: i64) -> USeries {
    USeries::exp_linear(c, trunc)
}

/// `(-i u)^k`.
pub fn minus_i_u_power(k: i64) -> USeries {
    let base = gaussian(rat(0), rat(-1));
    let c = if k >= 0 {
        (0..k).fold(Gaussian::one(), |a, _| a * base.clone())
    } else {
        (0..-k).fold(Gaussian::one(), |a, _| a / base.clone())
    };
    USeries::monomial(c, k)
}

fn monomial_to_u(m: &KernelMonomial, trunc: i64) -> Result<USeries> {
    let valuation: i64 = m.powers().values().map(|k| 2 * k).sum::<i64>() + m.one_plus_q() as i64;
    let rel = trunc - valuation;
    if rel < 0 {
        return Ok(USeries::zero_to(u_window(valuation, trunc)));
    }
    let mut unit = USeries::one().truncate(rel);
    for (&r, &k) in m.powers() {
        unit = unit.mul(&kernel_unit(r, rel).pow(k)?);
    }
    if m.one_plus_q() > 0 {
        unit = unit.mul(&one_plus_q_unit(rel).pow(m.one_plus_q() as i64)?);
    }
    Ok(unit.shift(valuation))
}

/// `q_to_u`: substitute `q = -e^{iu}` in a kernel form, through `u^trunc`.
pub fn q_to_u(f: &KernelForm, trunc: i64) -> Result<USeries> {
    let mut out = USeries::zero_to(u_window(0, trunc));
    for (m, c) in f.terms() {
        out = out.add(&monomial_to_u(m, trunc)?.scale_rational(c));
    }
    Ok(out)
}

pub fn q_to_u_sbasis(f: &SBasisForm, trunc: i64) -> Result<USeries> {
    q_to_u(&KernelForm::from(f), trunc)
}

/// Raw q-series cannot be substituted: every power of `q` contributes to
/// every order in `u`. Only exact Laurent polynomials are accepted.
pub fn q_to_u_series(f: &QSeries, trunc: i64) -> Result<USeries> {
    if !f.is_exact() {
        return Err(Error::NotRationalForm);
    }
    let mut out = USeries::zero_to(u_window(0, trunc));
    for (j, c) in f.iter() {
        // (-q)^j (-1)^j
        let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
        let e = exp_u(&gaussian(rat(0), rat(j)), trunc);
        out = out.add(&e.scale_rational(&(sign * c)));
    }
    Ok(out)
}

/// Right-hand side of the correspondence for one coefficient:
/// `q_to_u((-q)^{-c/2} Z_DT)` with `(-q)^{-c/2} = e^{-i c u / 2}`.
pub fn dt_side(dt: &KernelForm, c1: i64, trunc: i64) -> Result<USeries> {
    let z = q_to_u(dt, trunc)?;
    if c1 == 0 {
        return Ok(z);
    }
    let pad = trunc - z.min_exp();
    let phase = exp_u(&gaussian(rat(0), Rational::new((-c1).into(), 2.into())), pad);
    Ok(z.mul(&phase).truncate(trunc))
}

fn validate_channel(m: &InsertionMonomial, insertions: &InsertionSet, allow_descendants: bool) -> Result<()> {
    for (ins, _) in m.factors() {
        let label = insertions.get(&ins.label)?;
        if label.degree == 0 {
            return Err(Error::Invalid(format!("identity-class insertion '{}' is not allowed", ins.label)));
        }
        if ins.descendant > 0 {
            if !allow_descendants {
                return Err(Error::Invalid(format!("descendant insertion {ins} needs the descendant checker")));
            }
            if label.degree != 6 {
                return Err(Error::DescendantOnNonPoint(ins.to_string()));
            }
        }
    }
    Ok(())
}

/// The correspondence `(-iu)^{c1.beta - sum d} Z_GW = q_to_u((-q)^{-c1.beta/2} Z_DT)`
/// for every channel and class, through `u^trunc`.
pub fn check_correspondence(
    name: &str,
    gw: &GwChannels,
    dt: &ChannelSeries<KernelForm>,
    c1: &LinearFunctional,
    insertions: &InsertionSet,
    trunc: i64,
    allow_descendants: bool,
) -> Result<CheckReport> {
    let mut report = CheckReport::new(name);
    let bound = gw.degree_bound().min(dt.degree_bound());
    let mut reached = trunc;
    for (m, dts) in dt.channels() {
        validate_channel(m, insertions, allow_descendants)?;
        let Some(gws) = gw.channel(m) else {
            report.findings.push(Finding {
                channel: m.to_string(),
                class: dt.lattice().zero(),
                image: None,
                exponent: None,
                message: "channel missing on the GW side".into(),
            });
            continue;
        };
        for beta in dt.lattice().effective_classes(bound) {
            let c = c1.eval(&beta);
            let k = c - m.descendant_total() as i64;
            let lhs = minus_i_u_power(k).mul(&gws.coeff(&beta));
            let lhs_trunc = lhs.trunc_order().unwrap_or(trunc);
            if lhs_trunc < 0 {
                return Err(Error::WindowMismatch(format!(
                    "GW coefficient at {beta} in channel {m} is known only through u^{}",
                    lhs_trunc
                )));
            }
            reached = reached.min(lhs_trunc);
            let rhs = dt_side(&dts.coeff(&beta), c, trunc)?;
            report.compared += 1;
            if let Some(e) = lhs.first_difference(&rhs) {
                report.findings.push(Finding {
                    channel: m.to_string(),
                    class: beta,
                    image: None,
                    exponent: Some(e),
                    message: "GW and DT sides differ".into(),
                });
            }
        }
    }
    report.notes.push(format!("compared through u^{reached}"));
    Ok(report)
}

/// `check_conjecture2`: primary insertions only.
pub fn check_conjecture2(
    gw: &GwChannels,
    dt: &ChannelSeries<KernelForm>,
    c1: &LinearFunctional,
    insertions: &InsertionSet,
    trunc: i64,
) -> Result<CheckReport> {
    check_correspondence("correspondence", gw, dt, c1, insertions, trunc, false)
}

/// `check_conjecture4prime`: descendants allowed on the point class.
pub fn check_conjecture4prime(
    gw: &GwChannels,
    dt: &ChannelSeries<KernelForm>,
    c1: &LinearFunctional,
    insertions: &InsertionSet,
    trunc: i64,
) -> Result<CheckReport> {
    check_correspondence("descendant correspondence", gw, dt, c1, insertions, trunc, true)
}

/// The GW side determined by DT data through the correspondence.
pub fn gw_from_dt(dt: &ChannelSeries<KernelForm>, c1: &LinearFunctional, trunc: i64) -> Result<GwChannels> {
    dt.map_channels(|m, s| {
        s.try_map_coeffs(|beta, f| {
            let c = c1.eval(beta);
            let k = c - m.descendant_total() as i64;
            let rhs = dt_side(f, c, trunc + k.max(0) - k.min(0))?;
            Ok(minus_i_u_power(-k).mul(&rhs).truncate(trunc))
        })
    })
}

/// Disconnected GW series from connected ones.
pub fn gw_from_connected(connected: &GwChannels) -> Result<GwChannels> {
    connected.exp()
}

fn first_difference_u(a: &USeries, b: &USeries) -> Option<i64> {
    a.first_difference(b)
}

/// `check_gw_flop`: the ratio identity through `F` and the center identity.
pub fn check_gw_flop(gw_x: &GwChannels, gw_xp: &GwChannels, fd: &FlopData) -> Result<Vec<CheckReport>> {
    let flop = check_ratio_identity("GW flop", gw_x, gw_xp, fd, &first_difference_u)?;
    let center = check_center_identity(
        "GW center",
        &center_part(gw_x.empty_channel(), fd, false).filter(|b| !b.is_zero()),
        &center_part(gw_xp.empty_channel(), fd, true).filter(|b| !b.is_zero()),
        fd,
        &first_difference_u,
    );
    Ok(vec![flop, center])
}

fn reweight(z: &GwChannels, c1: &LinearFunctional, sign: i64) -> Result<GwChannels> {
    z.map_channels(|_, s| Ok(s.map_coeffs(|beta, c| minus_i_u_power(sign * c1.eval(beta)).mul(c))))
}

/// Largest `d` for which every effective target class of degree at most `d`
/// has its preimages within `source_bound`.
pub fn transport_bound(fd: &FlopData, source_bound: u32) -> Result<u32> {
    let g = fd.f.inverse()?;
    let within = |b: &CurveClass| fd.source.degree(b).is_none_or(|d| d <= source_bound as i64);
    let mut best = None;
    for d in 0..=(4 * source_bound + 4) {
        let ok = fd.target.effective_classes(d).iter().all(|b| {
            let pre = g.apply(b);
            within(&pre) && (!fd.in_center(&pre) || within(&pre.neg()))
        });
        if !ok {
            break;
        }
        best = Some(d);
    }
    best.ok_or_else(|| Error::Invalid("no target degree is determined by the source data".into()))
}

/// GW channels of `X'` from those of `X`, via the flop and center identities
/// applied to `sum v^beta (-iu)^{c1.beta} Z_GW(X)_beta`.
pub fn transport_gw(gw_x: &GwChannels, fd: &FlopData, target_bound: u32) -> Result<GwChannels> {
    let g = fd.f.inverse()?;
    let weighted = reweight(gw_x, &fd.c1_source, 1)?;
    let ratio = crate::flop::flop_ratio(&weighted, fd, false)?;
    let center = center_part(weighted.empty_channel(), fd, false);
    let target = fd.target.clone();
    let mut den = NovikovSeries::zero(target.clone(), target_bound);
    for b in target.effective_classes(target_bound) {
        if fd.in_target_center(&b) {
            den.accumulate(b.clone(), center.coeff(&g.apply(&b).neg()))?;
        }
    }
    let moved = ratio.map_channels(|_, s| {
        let mut out = NovikovSeries::zero(target.clone(), target_bound);
        for b in target.effective_classes(target_bound) {
            let pre = g.apply(&b);
            if fd.source.is_effective(&pre) {
                out.accumulate(b, s.coeff(&pre))?;
            }
        }
        out.mul(&den)
    })?;
    reweight(&moved, &fd.c1_target, -1)
}

/// One link of the implication chain.
#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub links: Vec<CheckReport>,
    /// The derived GW channels of `X'`, when the chain got that far.
    pub derived: Option<GwChannels>,
}

impl CorollaryReport {
    pub fn passed(&self) -> bool {
        self.links.len() == 5 && self.links.iter().all(CheckReport::passed)
    }
}

/// `corollary_pipeline`: the correspondence on `X`, the DT flop and center
/// identities, the GW flop transport, and the correspondence on `X'`.
/// Stops at the first failing link.
#[allow(clippy::too_many_arguments)]
pub fn corollary_pipeline(
    gw_x: &GwChannels,
    dt_x: &ChannelSeries<KernelForm>,
    fd: &FlopData,
    dt_xp: &ChannelSeries<KernelForm>,
    insertions: &InsertionSet,
    q_window: Window,
    u_trunc: i64,
) -> Result<CorollaryReport> {
    let mut links = Vec::new();
    let done = |links: Vec<CheckReport>, derived| Ok(CorollaryReport { links, derived });

    let mut x = check_conjecture4prime(gw_x, dt_x, &fd.c1_source, insertions, u_trunc)?;
    x.name = "X correspondence".into();
    let ok = x.passed();
    links.push(x);
    if !ok {
        return done(links, None);
    }

    let qx = crate::bps::expand_channels(dt_x, q_window)?;
    let qxp = crate::bps::expand_channels(dt_xp, q_window)?;
    let mut flop = check_flop_formula(&qx, &qxp, fd)?;
    flop.name = "DT flop".into();
    let ok = flop.passed();
    links.push(flop);
    if !ok {
        return done(links, None);
    }
    let mut center = check_center_formula(&qx, &qxp, fd);
    center.name = "DT center".into();
    let ok = center.passed();
    links.push(center);
    if !ok {
        return done(links, None);
    }

    let bound = transport_bound(fd, gw_x.degree_bound())?.min(dt_xp.degree_bound());
    let derived = transport_gw(gw_x, fd, bound)?;
    let mut transport = CheckReport::new("GW transport");
    for r in check_gw_flop(gw_x, &derived, fd)? {
        transport.merge(r);
    }
    transport.notes.push(format!("X' channels derived through degree {bound}"));
    let ok = transport.passed();
    links.push(transport);
    if !ok {
        return done(links, Some(derived));
    }

    let restricted = dt_xp.map_channels(|_, s| Ok(s.restrict(bound)))?;
    let mut xp = check_conjecture4prime(&derived, &restricted, &fd.c1_target, insertions, u_trunc)?;
    xp.name = "X' correspondence".into();
    links.push(xp);
    done(links, Some(derived))
}
