use dtflop_core::channels::{ChannelSeries, InsertionSet};
use dtflop_core::conifold::{symmetric_flop, symmetric_tables};
use dtflop_core::degeneration::{LabelPairing, WeightedPartition};
use dtflop_core::flop::check_flop_formula;
use dtflop_core::gwdt::q_to_u;
use dtflop_core::kernel::{kernel_power, sbasis_peel, KernelForm, KernelMonomial, SBasisForm};
use dtflop_core::lattice::{CurveClass, Lattice, LatticeMap, LinearFunctional};
use dtflop_core::novikov::NovikovSeries;
use dtflop_core::scalar::{rat, ratio};
use dtflop_core::bps::{bps_forward, bps_inverse, BpsTable};
use dtflop_core::{QSeries, Window};
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = dtflop_core::Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn truncated_series() -> impl Strategy<Value = QSeries> {
    (-3i64..=2, 4i64..=10, prop::collection::vec(small_rational(), 1..8)).prop_map(|(lo, hi, cs)| {
        let terms: Vec<_> = cs.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)).collect();
        QSeries::truncated(Window::new(lo, hi), terms)
    })
}

fn unit_series() -> impl Strategy<Value = QSeries> {
    (1i64..=5, prop::collection::vec(small_rational(), 0..6)).prop_map(|(c0, cs)| {
        let mut terms = vec![(0, rat(c0))];
        terms.extend(cs.into_iter().enumerate().map(|(i, c)| (i as i64 + 1, c)));
        QSeries::truncated(Window::new(0, 8), terms)
    })
}

fn sbasis_form() -> impl Strategy<Value = SBasisForm> {
    (1u32..=3, prop::collection::btree_map(-2i64..=4, small_rational(), 1..4))
        .prop_map(|(r, terms)| SBasisForm::from_terms(r, 0, terms))
}

fn kernel_form() -> impl Strategy<Value = KernelForm> {
    prop::collection::vec((1u32..=2, -2i64..=2, 0u32..=2, small_rational()), 1..4).prop_map(|ts| {
        let mut f = KernelForm::zero();
        for (r, k, m, c) in ts {
            f.add_term(KernelMonomial::kernel(r, k).with_one_plus_q(m), c);
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_laws(a in truncated_series(), b in truncated_series(), c in truncated_series()) {
        prop_assert!(a.mul(&b).agrees_with(&b.mul(&a)));
        prop_assert!(a.mul(&b).mul(&c).agrees_with(&a.mul(&b.mul(&c))));
        prop_assert!(a.mul(&b.add(&c)).agrees_with(&a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.add(&b).sub(&b).agrees_with(&a));
    }

    #[test]
    fn unit_inverse(a in unit_series()) {
        let inv = a.invert().unwrap();
        prop_assert!(a.mul(&inv).agrees_with(&QSeries::one()));
    }

    #[test]
    fn kernel_powers_are_inverse(g in -5i64..=5, r in 1u32..=3) {
        let w = Window::new(-10, 30);
        let a: QSeries = kernel_power(g, r, w);
        let b: QSeries = kernel_power(2 - g, r, w);
        let prod = a.mul(&b);
        prop_assert!(prod.agrees_with(&QSeries::one()));
        prop_assert!(prod.trunc_order().is_none_or(|t| t >= 0));
    }

    #[test]
    fn positive_genus_kernels_are_palindromic(g in 1i64..=5, r in 1u32..=3) {
        let s: QSeries = kernel_power(g, r, Window::new(-30, 30));
        prop_assert!(s.is_exact());
        for (e, c) in s.iter() {
            prop_assert_eq!(s.coeff(-e), Some(c.clone()));
        }
    }

    #[test]
    fn peel_inverts_expand(f in sbasis_form()) {
        let w = Window::new(-12, 24);
        let series = f.expand(w);
        let peel = sbasis_peel(&series, f.r(), false).unwrap();
        prop_assert!(peel.residual.vanishes());
        prop_assert_eq!(peel.form.terms(), f.terms());
    }

    #[test]
    fn q_to_u_is_multiplicative(f in kernel_form(), g in kernel_form()) {
        let t = 12;
        let fu = q_to_u(&f, t + 8).unwrap();
        let gu = q_to_u(&g, t + 8).unwrap();
        let fg = q_to_u(&f.mul(&g), t).unwrap();
        prop_assert!(fu.mul(&gu).truncate(t).agrees_with(&fg));
    }

    #[test]
    fn q_to_u_of_kernels_is_even_and_real(r in 1u32..=3, k in -2i64..=2) {
        let s = q_to_u(&KernelForm::term(KernelMonomial::kernel(r, k), rat(1)), 12).unwrap();
        for (e, c) in s.iter() {
            prop_assert_eq!(e % 2, 0);
            prop_assert_eq!(c.im.clone(), rat(0));
        }
    }

    #[test]
    fn novikov_exp_log(cs in prop::collection::vec(small_rational(), 1..4)) {
        let l = Lattice::standard(vec![1, 1]).unwrap();
        let classes = [vec![1, 0], vec![0, 1], vec![1, 1]];
        let terms = cs.iter().zip(classes.iter()).map(|(c, b)| (CurveClass(b.clone()), QSeries::monomial(c.clone(), 1)));
        let x = NovikovSeries::from_terms(l, 3, terms).unwrap();
        let back = x.exp().unwrap().log().unwrap();
        prop_assert!(back.agrees(&x));
    }

    #[test]
    fn reindex_round_trip(cs in prop::collection::vec(small_rational(), 1..4)) {
        let l = Lattice::standard(vec![1, 1]).unwrap();
        let swap = LatticeMap::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let classes = [vec![0, 0], vec![2, 1], vec![0, 3]];
        let terms = cs.iter().zip(classes.iter()).map(|(c, b)| (CurveClass(b.clone()), QSeries::monomial(c.clone(), 0)));
        let x = NovikovSeries::from_terms(l.clone(), 3, terms).unwrap();
        let there = x.reindex(&swap, &l, 3, false).unwrap();
        let back = there.reindex(&swap, &l, 3, false).unwrap();
        prop_assert!(back.agrees(&x));
    }

    #[test]
    fn partition_duality(parts in prop::collection::vec((1u32..=3, 0usize..2), 0..4)) {
        let mut pairing = LabelPairing::new();
        pairing.pair("a", "b");
        let names = ["a", "b"];
        let eta = WeightedPartition::new(parts.iter().map(|(k, i)| (*k, names[*i].to_string()))).unwrap();
        let dual = eta.dual(&pairing).unwrap();
        prop_assert_eq!(dual.dual(&pairing).unwrap(), eta.clone());
        prop_assert_eq!(dual.z_factor(), eta.z_factor());
        let prod: BigInt = eta.parts().iter().map(|(k, _)| BigInt::from(*k)).product();
        prop_assert_eq!(eta.z_factor(), eta.aut_order() * prod);
    }

    #[test]
    fn flop_check_is_symmetric(a in -3i64..=3, b in -3i64..=3, mutate in any::<bool>()) {
        let fd = symmetric_flop();
        let (tx, txp) = symmetric_tables(rat(a), rat(b));
        let txp = if mutate { symmetric_tables(rat(a), rat(b + 1)).1 } else { txp };
        let w = Window::new(-6, 8);
        let zx = bps_forward(&tx, 3, w, &[]).unwrap();
        let zxp = bps_forward(&txp, 3, w, &[]).unwrap();
        let there = check_flop_formula(&zx, &zxp, &fd).unwrap().passed();
        let back = check_flop_formula(&zxp, &zx, &fd.inverse().unwrap()).unwrap().passed();
        prop_assert_eq!(there, back);
        prop_assert_eq!(there, !mutate);
    }

    #[test]
    fn bps_round_trip(entries in prop::collection::btree_map((1i64..=2, 0i64..=2, -1i64..=2), small_rational(), 1..5)) {
        let l = Lattice::standard(vec![1, 1]).unwrap();
        let mut t = BpsTable::new(l, LinearFunctional(vec![0, 0]), InsertionSet::new());
        for ((x, y, g), n) in &entries {
            if *n != rat(0) {
                t.insert(*g, CurveClass(vec![*x, *y]), Default::default(), n.clone()).unwrap();
            }
        }
        let z = bps_forward(&t, 4, Window::new(-12, 24), &[]).unwrap();
        let ex = bps_inverse(&z, &LinearFunctional(vec![0, 0]), &InsertionSet::new()).unwrap();
        prop_assert!(ex.diagnostics.is_empty(), "{:?}", ex.diagnostics);
        for (g, beta, m, n) in t.entries() {
            prop_assert!(ex.is_determined(g, beta, m));
            prop_assert_eq!(&ex.table.get(g, beta, m), n);
        }
        prop_assert!(ChannelSeries::from_empty_channel(z.empty_channel().clone()).first_disagreement(&z).is_none());
    }
}
