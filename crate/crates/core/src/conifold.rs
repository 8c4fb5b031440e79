//! Small explicit models: the conifold flop and a rank-two flop whose BPS
//! tables are exchanged by `F`.

use num_traits::Zero;

use crate::bps::{bps_forward_forms, BpsTable};
use crate::channels::{ChannelSeries, InsertionSet};
use crate::error::Result;
use crate::flop::FlopData;
use crate::gwdt::GwChannels;
use crate::kernel::KernelForm;
use crate::lattice::{CurveClass, Lattice, LatticeMap, LinearFunctional};
use crate::novikov::NovikovSeries;
use crate::scalar::{rat, Gaussian, Rational, Scalar};
use crate::series::Window;
use crate::USeries;

/// The local `(-1,-1)` curve and its flop, `F = -1` on `H_2 = Z`.
pub fn conifold_flop() -> FlopData {
    let l = Lattice::standard(vec![1]).expect("rank one lattice");
    let zero = LinearFunctional(vec![0]);
    FlopData::new(
        l.clone(),
        l,
        LatticeMap::from_rows(vec![vec![-1]]).expect("1x1 map"),
        vec![(CurveClass(vec![1]), 1)],
        zero.clone(),
        zero,
    )
    .expect("conifold flop data")
}

/// `n_{0,[C]} = 1` on either side of the conifold flop.
pub fn conifold_table() -> BpsTable {
    let mut t = BpsTable::new(Lattice::standard(vec![1]).expect("rank one lattice"), LinearFunctional(vec![0]), InsertionSet::new());
    t.insert(0, CurveClass(vec![1]), Default::default(), rat(1)).expect("valid entry");
    t
}

/// Rank-two flop with `C = (1,0)`, `A = (0,1)` and
/// `F = [[-1, 1], [0, 1]]`, so `F C = -C'`, `F A = A' + C'` and `F(A + C) = A'`.
pub fn symmetric_flop() -> FlopData {
    let l = Lattice::standard(vec![1, 1]).expect("rank two lattice");
    let zero = LinearFunctional(vec![0, 0]);
    FlopData::new(
        l.clone(),
        l,
        LatticeMap::from_rows(vec![vec![-1, 1], vec![0, 1]]).expect("2x2 map"),
        vec![(CurveClass(vec![1, 0]), 1)],
        zero.clone(),
        zero,
    )
    .expect("symmetric flop data")
}

/// Genus-zero tables for [`symmetric_flop`]: `n_C = 1`, `n_A = a`,
/// `n_{A+C} = b` on `X` and `n_{C'} = 1`, `n_{A'+C'} = a`, `n_{A'} = b` on `X'`.
pub fn symmetric_tables(a: Rational, b: Rational) -> (BpsTable, BpsTable) {
    let l = Lattice::standard(vec![1, 1]).expect("rank two lattice");
    let table = |entries: [(Vec<i64>, Rational); 3]| {
        let mut t = BpsTable::new(l.clone(), LinearFunctional(vec![0, 0]), InsertionSet::new());
        for (beta, n) in entries {
            if !n.is_zero() {
                t.insert(0, CurveClass(beta), Default::default(), n).expect("valid entry");
            }
        }
        t
    };
    let x = table([(vec![1, 0], rat(1)), (vec![0, 1], a.clone()), (vec![1, 1], b.clone())]);
    let xp = table([(vec![1, 0], rat(1)), (vec![1, 1], a), (vec![0, 1], b)]);
    (x, xp)
}

/// `1 / (4 sin^2(u/2))` scaled to `u -> d u`, through `u^trunc`.
fn sine_pole(d: i64, trunc: i64) -> Result<USeries> {
    // 4 sin^2(x/2) = 2 - 2 cos x = x^2 (1 - x^2/12 + ...)
    let rel = trunc + 2;
    let mut terms = Vec::new();
    let mut fact = rat(1);
    let d2 = rat(d * d);
    let mut power = rat(1);
    for n in 1..=(rel / 2 + 1) {
        fact *= rat((2 * n - 1) * (2 * n));
        power *= &d2;
        let sign = if n % 2 == 1 { rat(2) } else { rat(-2) };
        if 2 * n - 2 <= rel {
            terms.push((2 * n - 2, Gaussian::from_rational(&(sign * &power / &fact))));
        }
    }
    let unit = USeries::truncated(Window::new(0, rel), terms);
    Ok(unit.invert()?.shift(-2))
}

/// Connected genus-zero GW series `sum_k n/k * (4 sin^2(k u/2))^{-1} v^{k beta}`
/// for a table of `(-1,-1)` curves, through `u^trunc`.
pub fn connected_gw(table: &BpsTable, degree_bound: u32, trunc: i64) -> Result<GwChannels> {
    let lattice = table.lattice().clone();
    let mut s = NovikovSeries::<USeries>::zero(lattice.clone(), degree_bound);
    for (g, beta, _, n) in table.entries() {
        if g != 0 {
            continue;
        }
        let d = lattice.degree(beta).unwrap_or(0);
        let mut k = 1i64;
        while d * k <= degree_bound as i64 {
            let term = sine_pole(k, trunc)?.scale_rational(&(n / rat(k)));
            s.accumulate(beta.scale(k), term)?;
            k += 1;
        }
    }
    Ok(ChannelSeries::from_empty_channel(s))
}

/// Disconnected GW series from [`connected_gw`], computed with enough
/// padding that every coefficient is known through `u^trunc`.
pub fn disconnected_gw(table: &BpsTable, degree_bound: u32, trunc: i64) -> Result<GwChannels> {
    let pad = 2 * degree_bound as i64;
    let z = connected_gw(table, degree_bound, trunc + pad)?.exp()?;
    z.map_channels(|_, s| Ok(s.map_coeffs(|_, c| c.truncate(trunc))))
}

/// DT forms of a table, as exact kernel forms.
pub fn dt_forms(table: &BpsTable, degree_bound: u32) -> Result<ChannelSeries<KernelForm>> {
    bps_forward_forms(table, degree_bound, &[])
}
