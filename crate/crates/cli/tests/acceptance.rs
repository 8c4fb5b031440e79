use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use dtflop_cli::format::{self, DegenerationFile, Header};
use dtflop_core::bps::{bps_forward, bps_inverse, BpsTable};
use dtflop_core::channels::{ChannelSeries, InsertionMonomial, InsertionSet};
use dtflop_core::conifold;
use dtflop_core::degeneration::{
    partitions_up_to, Degeneration, LabelPairing, RelativeTable, Splitting, WeightedPartition,
};
use dtflop_core::flop::{check_center_formula, check_flop_formula, FlopData};
use dtflop_core::gwdt::{check_conjecture2, corollary_pipeline, q_to_u};
use dtflop_core::kernel::{kernel_power, KernelForm, KernelMonomial};
use dtflop_core::lattice::{CurveClass, Lattice, LinearFunctional};
use dtflop_core::reid::{build_reid_tower, check_support_lemma, check_width_one_lemma};
use dtflop_core::scalar::{rat, ratio};
use dtflop_core::{QSeries, Rational, Window};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_f10b;
const ROUND_TRIP_TABLES: usize = 200;
const MUTATIONS: usize = 100;
const LEMMA_BOX: i64 = 5;
const LEMMA_NODES: usize = 200_000;
const U_TRUNC: i64 = 10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// Kernel powers `s^g` and `s^{2-g}` multiply to one.
fn criterion_1() -> Outcome {
    let w = Window::new(-10, 30);
    let mut checked = 0;
    for r in 1..=3u32 {
        for g in -5i64..=5 {
            let a: QSeries = kernel_power(g, r, w);
            let b: QSeries = kernel_power(2 - g, r, w);
            let p = a.mul(&b);
            ensure(p.agrees_with(&QSeries::one()), || format!("r={r} g={g}: product is not 1"))?;
            ensure(p.trunc_order().is_none_or(|t| t >= 0), || format!("r={r} g={g}: product known only below q^0"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} products equal 1 exactly on [-10, 30]"))
}

/// Naive dense expansion of `prod_{k<=16} (1 - (-q)^k v)^k`, indexed `[v][q]`.
fn conifold_oracle(vmax: usize, qmax: usize) -> Vec<Vec<i128>> {
    let mut p = vec![vec![0i128; qmax + 1]; vmax + 1];
    p[0][0] = 1;
    for k in 1..=qmax {
        let c: i128 = if k % 2 == 0 { -1 } else { 1 };
        for _ in 0..k {
            for d in (1..=vmax).rev() {
                for q in (k..=qmax).rev() {
                    p[d][q] += c * p[d - 1][q - k];
                }
            }
        }
    }
    p
}

fn criterion_2() -> Outcome {
    let (vmax, qmax) = (6usize, 16usize);
    let oracle = conifold_oracle(vmax, qmax);
    let z = bps_forward(&conifold::conifold_table(), vmax as u32, Window::new(-8, qmax as i64), &[]).map_err(e)?;
    let mut compared = 0;
    for d in 0..=vmax {
        let c = z.empty_channel().coeff(&CurveClass(vec![d as i64]));
        ensure(c.trunc_order().is_none_or(|t| t >= qmax as i64), || format!("v^{d} known only through q^{:?}", c.trunc_order()))?;
        for q in -8..=qmax as i64 {
            let want = if q < 0 { 0 } else { oracle[d][q as usize] };
            let got = c.coeff(q).unwrap_or_else(|| rat(0));
            ensure(got == rat(want as i64), || format!("v^{d} q^{q}: engine {got}, oracle {want}"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} coefficients through (v^6, q^16) match the naive product"))
}

fn random_value(rng: &mut StdRng) -> Rational {
    loop {
        let n = rng.gen_range(-100i64..=100);
        if n != 0 {
            return ratio(n, rng.gen_range(1i64..=100));
        }
    }
}

fn round_trip(t: &BpsTable, bound: u32, channels: &[InsertionMonomial]) -> Result<(), String> {
    let z = bps_forward(t, bound, Window::new(-24, 40), channels).map_err(e)?;
    let ex = bps_inverse(&z, t.c1(), t.insertions()).map_err(e)?;
    ensure(ex.diagnostics.is_empty(), || format!("diagnostics {:?}", ex.diagnostics))?;
    for (g, beta, m, _) in t.entries() {
        ensure(ex.is_determined(g, beta, m), || format!("n_{{{g},{beta}}}({m}) not determined by the window"))?;
    }
    ensure(ex.table.restrict(bound) == *t, || "extracted table differs from the input".into())
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let bound = 5u32;
    let rank1 = Lattice::standard(vec![1]).map_err(e)?;
    let rank2 = Lattice::standard(vec![1, 1]).map_err(e)?;
    let mut ins = InsertionSet::new();
    ins.declare("P", 6, None).map_err(e)?;
    ins.declare("D", 2, Some(LinearFunctional(vec![1, 2]))).map_err(e)?;
    let monomials: Vec<InsertionMonomial> =
        ["1", "P", "P*P"].iter().map(|s| s.parse().expect("monomial")).collect();
    let divisor_channel: InsertionMonomial = "D*P".parse().expect("monomial");
    let (mut flat, mut positive) = (0, 0);
    for i in 0..ROUND_TRIP_TABLES {
        let mixed = i % 2 == 1;
        let t = if !mixed {
            let mut t = BpsTable::new(rank1.clone(), LinearFunctional(vec![0]), InsertionSet::new());
            for _ in 0..rng.gen_range(1..=5) {
                let beta = CurveClass(vec![rng.gen_range(1..=bound as i64)]);
                t.insert(rng.gen_range(-3..=3), beta, InsertionMonomial::empty(), random_value(&mut rng)).map_err(e)?;
            }
            flat += 1;
            t
        } else {
            // c1 = (0, 1): classes (a, 0) are multiple-cover classes, (a, b > 0) carry insertions
            let mut t = BpsTable::new(rank2.clone(), LinearFunctional(vec![0, 1]), ins.clone());
            for _ in 0..rng.gen_range(1..=6) {
                let b = rng.gen_range(0..=bound as i64);
                let a = rng.gen_range(if b == 0 { 1 } else { 0 }..=bound as i64 - b);
                let m = if b == 0 { InsertionMonomial::empty() } else { monomials[rng.gen_range(0..monomials.len())].clone() };
                t.insert(rng.gen_range(-3..=3), CurveClass(vec![a, b]), m, random_value(&mut rng)).map_err(e)?;
            }
            positive += 1;
            t
        };
        let extra = if mixed { vec![divisor_channel.clone()] } else { vec![] };
        round_trip(&t, bound, &extra).map_err(|m| format!("table {i}: {m}"))?;
    }
    Ok(format!("{flat} tables with c1 = 0 and {positive} with c1 > 0 channels recovered exactly"))
}

/// Whether the flop or center check looks at `beta` on the given side.
fn comparable(fd: &FlopData, beta: &CurveClass, bound: i64, source_side: bool) -> bool {
    let (here, there, map) = if source_side {
        (&fd.source, &fd.target, fd.f.clone())
    } else {
        (&fd.target, &fd.source, fd.f.inverse().expect("unimodular"))
    };
    let within = |l: &Lattice, c: &CurveClass| l.is_effective(c) && l.degree(c).is_some_and(|d| d <= bound);
    let image = map.apply(beta);
    let central = if source_side { fd.in_center(beta) } else { fd.in_target_center(beta) };
    !beta.is_zero() && within(here, beta) && (within(there, &image) || (central && within(there, &image.neg())))
}

fn criterion_4() -> Outcome {
    let fd = conifold::symmetric_flop();
    let (tx, txp) = conifold::symmetric_tables(rat(2), rat(-3));
    let bound = 6u32;
    let (qlo, qhi) = (-10i64, 20i64);
    let w = Window::new(qlo, qhi);
    let zx = bps_forward(&tx, bound, w, &[]).map_err(e)?;
    let zxp = bps_forward(&txp, bound, w, &[]).map_err(e)?;
    let flop = check_flop_formula(&zx, &zxp, &fd).map_err(e)?;
    let center = check_center_formula(&zx, &zxp, &fd);
    ensure(flop.passed(), || format!("unmutated flop check failed:\n{flop}"))?;
    ensure(center.passed(), || format!("unmutated center check failed:\n{center}"))?;

    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let sides = [
        (true, fd.source.effective_classes(bound)),
        (false, fd.target.effective_classes(bound)),
    ];
    let candidates: Vec<(bool, CurveClass)> = sides
        .iter()
        .flat_map(|(s, cs)| cs.iter().filter(|b| comparable(&fd, b, bound as i64, *s)).map(move |b| (*s, b.clone())))
        .collect();
    for i in 0..MUTATIONS {
        let (on_x, beta) = candidates[rng.gen_range(0..candidates.len())].clone();
        let exp = rng.gen_range(qlo..=qhi);
        let delta = random_value(&mut rng);
        let base = if on_x { &zx } else { &zxp };
        let mut s = base.empty_channel().clone();
        s.accumulate(beta.clone(), QSeries::monomial(delta, exp)).map_err(e)?;
        let mutated = ChannelSeries::from_empty_channel(s);
        let (a, b) = if on_x { (&mutated, &zxp) } else { (&zx, &mutated) };
        let reports = [check_flop_formula(a, b, &fd).map_err(e)?, check_center_formula(a, b, &fd)];
        let located = reports.iter().flat_map(|r| r.findings.iter()).any(|f| {
            let at = if on_x { Some(&f.class) == Some(&beta) } else { f.image.as_ref() == Some(&beta) };
            at && f.exponent == Some(exp)
        });
        let side = if on_x { "X" } else { "X'" };
        ensure(located, || {
            format!("mutation {i} at {side} class {beta} q^{exp} not localized:\n{}\n{}", reports[0], reports[1])
        })?;
    }
    Ok(format!(
        "flop ({} comparisons) and center ({} comparisons) pass through (v^6, q^20); {MUTATIONS} mutations localized",
        flop.compared, center.compared
    ))
}

fn random_series(rng: &mut StdRng) -> QSeries {
    let terms: Vec<(i64, Rational)> = (0..4).map(|k| (k, ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))).collect();
    QSeries::truncated(Window::new(0, 5), terms)
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);

    // additive dimensions: every nonempty contact term must drop out
    let mut pairing = LabelPairing::new();
    pairing.pair("pt", "one");
    let labels: Vec<String> = pairing.labels().cloned().collect();
    let etas = partitions_up_to(4, &labels);
    let zero = LinearFunctional(vec![0]);
    let mut main = RelativeTable::new(zero.clone(), true);
    let mut bubble = RelativeTable::new(zero.clone(), true);
    for d in 0..=3 {
        for eta in &etas {
            main.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), random_series(&mut rng));
            bubble.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), random_series(&mut rng));
        }
    }
    let target = 3;
    let splittings: Vec<Splitting> = (0..=target)
        .map(|a| Splitting { main: CurveClass(vec![a]), bubbles: vec![CurveClass(vec![target - a])] })
        .collect();
    let job = Degeneration { main: &main, bubbles: vec![&bubble], pairing: &pairing, contact_bound: 4, total_vdim: 0 };
    let (sum, stats) = job.sum(&splittings, &BTreeSet::new()).map_err(e)?;
    let empty = WeightedPartition::empty();
    let mut product = QSeries::zero();
    for a in 0..=target {
        let m = main.get(&key(&empty, a)).map_err(e)?.cloned().unwrap_or_else(QSeries::zero);
        let b = bubble.get(&key(&empty, target - a)).map_err(e)?.cloned().unwrap_or_else(QSeries::zero);
        product = product.add(&m.mul(&b));
    }
    ensure(stats.nonempty_contact_terms == 0, || format!("{} nonempty contact terms survived", stats.nonempty_contact_terms))?;
    ensure(sum == product, || format!("sum {sum} differs from the empty-contact product {product}"))?;
    let collapsed = etas.len();

    // generic dimensions, two splittings by two contact partitions, summed by hand
    let mut pairing = LabelPairing::new();
    pairing.pair("a", "a");
    let one_a: WeightedPartition = "1:a".parse().map_err(e)?;
    let mut main = RelativeTable::new(LinearFunctional(vec![0]), true);
    let mut bubble = RelativeTable::new(LinearFunctional(vec![2]), true);
    let mut vals = Vec::new();
    for eta in [&empty, &one_a] {
        for d in 0..=2 {
            let (m, b) = (random_series(&mut rng), random_series(&mut rng));
            main.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), m.clone());
            bubble.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), b.clone());
            vals.push(((eta.to_string(), d), (m, b)));
        }
    }
    let val = |eta: &WeightedPartition, d: i64| vals.iter().find(|(k, _)| *k == (eta.to_string(), d)).map(|(_, v)| v.clone()).unwrap();
    let splittings = vec![
        Splitting { main: CurveClass(vec![2]), bubbles: vec![CurveClass(vec![0])] },
        Splitting { main: CurveClass(vec![1]), bubbles: vec![CurveClass(vec![1])] },
    ];
    let job = Degeneration { main: &main, bubbles: vec![&bubble], pairing: &pairing, contact_bound: 1, total_vdim: 0 };
    let (sum, _) = job.sum(&splittings, &BTreeSet::new()).map_err(e)?;
    // (2,0): vdims 0 + 0 admit only the empty partition
    // (1,1): vdims 0 + 2 admit only |eta| = 1, with weight (+1) * 1 * q^-1
    let hand = val(&empty, 2).0.mul(&val(&empty, 0).1).add(
        &val(&one_a, 1).0.mul(&val(&one_a, 1).1).mul(&QSeries::monomial(rat(1), -1)),
    );
    ensure(sum == hand, || format!("evaluator {sum} differs from the hand sum {hand}"))?;
    Ok(format!("collapse over {collapsed} partitions of size <= 4; 2x2 generic sum matches by hand"))
}

fn key(eta: &WeightedPartition, d: i64) -> dtflop_core::degeneration::RelativeKey {
    dtflop_core::degeneration::RelativeKey { marks: BTreeSet::new(), contact: vec![eta.clone()], class: CurveClass(vec![d]) }
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for widths in [vec![1u32], vec![1, 1]] {
        let tower = build_reid_tower(&widths, widths.len()).map_err(e)?;
        let r = check_width_one_lemma(&tower, LEMMA_BOX, LEMMA_NODES).map_err(e)?;
        ensure(r.passed(), || format!("width-one lemma fails on {widths:?}: {:?}", r.failures))?;
        parts.push(format!("{widths:?}: {} classes", r.checked));
    }
    for widths in [vec![2u32, 1], vec![2, 2]] {
        let tower = build_reid_tower(&widths, widths.len()).map_err(e)?;
        let r = check_support_lemma(&tower, LEMMA_BOX, LEMMA_NODES).map_err(e)?;
        ensure(r.passed(), || format!("support lemma fails on {widths:?}: {:?}", r.failures))?;
        parts.push(format!("{widths:?}: {} classes", r.checked));
    }
    Ok(format!("box |coords| <= {LEMMA_BOX}; {}", parts.join(", ")))
}

/// Exact Bernoulli numbers `B_0..B_n` from `sum_{k<m} C(m+1,k) B_k = -(m+1) B_m`.
fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![rat(1)];
    for m in 1..=n {
        let mut acc = rat(0);
        let mut binom = rat(1);
        for (k, bk) in b.iter().enumerate() {
            acc += &binom * bk;
            binom = binom * rat((m + 1 - k) as i64) / rat(k as i64 + 1);
        }
        b.push(-acc / rat(m as i64 + 1));
    }
    b
}

/// `u^2 / (2 - 2 cos u)` by long division of the cosine series.
fn sine_division(terms: usize) -> Vec<Rational> {
    // (2 - 2 cos u) / u^2 = sum_n 2 (-1)^n u^{2n} / (2n+2)!
    let mut fact = rat(1);
    let mut den = Vec::new();
    for n in 0..terms {
        fact = fact * rat((2 * n + 1) as i64) * rat((2 * n + 2) as i64);
        let sign = if n % 2 == 0 { 2 } else { -2 };
        den.push(rat(sign) / &fact);
    }
    let mut q: Vec<Rational> = Vec::new();
    for n in 0..terms {
        let mut r = if n == 0 { rat(1) } else { rat(0) };
        for k in 0..n {
            r -= &q[k] * &den[n - k];
        }
        q.push(r / &den[0]);
    }
    q
}

fn reached(report: &dtflop_core::flop::CheckReport) -> Option<i64> {
    report.notes.iter().find_map(|n| n.strip_prefix("compared through u^")?.parse().ok())
}

fn criterion_7() -> Outcome {
    let image = q_to_u(&KernelForm::term(KernelMonomial::kernel(1, -1), rat(-1)), U_TRUNC).map_err(e)?;
    let b = bernoulli(2 * (U_TRUNC as usize / 2 + 1));
    let division = sine_division(U_TRUNC as usize / 2 + 2);
    let mut fact = rat(1);
    for g in 0..=(U_TRUNC / 2 + 1) {
        let exp = 2 * g - 2;
        let bern = if g == 0 {
            rat(1)
        } else {
            fact *= rat(if g == 1 { 1 } else { (2 * g - 2) * (2 * g - 3) });
            let sign = if g % 2 == 1 { rat(1) } else { rat(-1) };
            sign * &b[2 * g as usize] / (rat(2 * g) * &fact)
        };
        ensure(bern == division[g as usize], || format!("oracles disagree at u^{exp}"))?;
        let got = image.coeff(exp);
        ensure(got.as_ref().is_some_and(|c| c.re == bern && c.im == rat(0)), || {
            format!("u^{exp}: engine {got:?}, oracle {bern}")
        })?;
    }
    ensure(image.coeff(2).is_some_and(|c| c.re == ratio(1, 240)), || "u^2 coefficient".into())?;

    let fd = conifold::conifold_flop();
    let t = conifold::conifold_table();
    let bound = 4u32;
    let ins = InsertionSet::new();
    let dt = conifold::dt_forms(&t, bound).map_err(e)?;
    let gw = conifold::disconnected_gw(&t, bound, U_TRUNC).map_err(e)?;
    let c2 = check_conjecture2(&gw, &dt, &fd.c1_source, &ins, U_TRUNC).map_err(e)?;
    ensure(c2.passed() && reached(&c2) >= Some(U_TRUNC), || format!("correspondence:\n{c2}"))?;

    // padded GW input, so the transported X' channels still reach u^10
    let padded = conifold::disconnected_gw(&t, bound, U_TRUNC + 4 * bound as i64).map_err(e)?;
    let chain = corollary_pipeline(&padded, &dt, &fd, &dt, &ins, Window::new(-8, 20), U_TRUNC).map_err(e)?;
    let names: Vec<&str> = chain.links.iter().map(|l| l.name.as_str()).collect();
    ensure(chain.passed(), || format!("chain stopped after {names:?}:\n{}", chain.links.last().unwrap()))?;
    let last = chain.links.last().unwrap();
    ensure(reached(last) >= Some(U_TRUNC), || format!("X' link reached only u^{:?}", reached(last)))?;
    Ok(format!("1/(4 sin^2(u/2)) through u^{U_TRUNC}; correspondence and {} chain links through (v^4, u^{U_TRUNC})", names.len()))
}

struct Fixtures {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixtures {
    fn path(&self, name: &str) -> String {
        self.root.join(name).display().to_string()
    }
}

fn write(root: &Path, name: &str, text: &str) -> Result<(), String> {
    std::fs::write(root.join(name), text).map_err(e)
}

fn fixtures() -> Result<Fixtures, String> {
    let dir = tempfile::tempdir().map_err(e)?;
    let root = dir.path().to_path_buf();
    let fd = conifold::symmetric_flop();
    let (tx, txp) = conifold::symmetric_tables(rat(2), rat(-3));
    let header = |t: &BpsTable| Header { lattice: t.lattice().clone(), c1: t.c1().clone(), insertions: t.insertions().clone() };
    let w = Window::new(-8, 20);
    write(&root, "x.bps", &format::write_table(&tx))?;
    write(&root, "xp.bps", &format::write_table(&txp))?;
    write(&root, "x.dt", &format::write_qseries_file(&header(&tx), &bps_forward(&tx, 4, w, &[]).map_err(e)?))?;
    write(&root, "xp.dt", &format::write_qseries_file(&header(&txp), &bps_forward(&txp, 4, w, &[]).map_err(e)?))?;
    write(&root, "sym.flop", &format::write_flop(&fd))?;

    let t = conifold::conifold_table();
    write(&root, "con.flop", &format::write_flop(&conifold::conifold_flop()))?;
    write(&root, "con.gw", &format::write_gw_file(&header(&t), &conifold::disconnected_gw(&t, 3, 12 + 12).map_err(e)?))?;
    write(&root, "con.forms", &format::write_forms_file(&header(&t), &conifold::dt_forms(&t, 3).map_err(e)?))?;

    let mut pairing = LabelPairing::new();
    pairing.pair("a", "a");
    let one_a: WeightedPartition = "1:a".parse().map_err(e)?;
    let mut main = RelativeTable::new(LinearFunctional(vec![0]), true);
    let mut bubble = RelativeTable::new(LinearFunctional(vec![2]), true);
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    for eta in [WeightedPartition::empty(), one_a] {
        for d in 0..=2 {
            main.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), random_series(&mut rng));
            bubble.insert(BTreeSet::new(), vec![eta.clone()], CurveClass(vec![d]), random_series(&mut rng));
        }
    }
    let job = DegenerationFile {
        rank: 1,
        contact_bound: 1,
        total_vdim: 0,
        marks: BTreeSet::new(),
        pairing,
        main,
        bubbles: vec![bubble],
        splittings: vec![
            Splitting { main: CurveClass(vec![2]), bubbles: vec![CurveClass(vec![0])] },
            Splitting { main: CurveClass(vec![1]), bubbles: vec![CurveClass(vec![1])] },
        ],
    };
    write(&root, "job.degen", &format::write_degeneration(&job))?;
    Ok(Fixtures { _dir: dir, root })
}

fn run_cli(args: &[String], threads: u32) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dtflop"))
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(e)?;
    Ok((out.status.code(), out.stdout))
}

fn criterion_8() -> Outcome {
    let fx = fixtures()?;
    let p = |n: &str| fx.path(n);
    let s = |x: &str| x.to_string();
    let jobs: Vec<Vec<String>> = vec![
        vec![s("bps-forward"), p("x.bps")],
        vec![s("bps-forward"), s("--forms"), p("x.bps")],
        vec![s("bps-extract"), p("x.dt")],
        vec![s("flop-check"), p("x.dt"), p("xp.dt"), p("sym.flop")],
        vec![s("center-check"), p("x.dt"), p("xp.dt"), p("sym.flop")],
        vec![s("bps-corollary"), p("x.bps"), p("xp.bps"), p("sym.flop")],
        vec![s("--format"), s("lines"), s("flop-check"), p("x.dt"), p("xp.dt"), p("sym.flop")],
        vec![s("degenerate"), p("job.degen")],
        vec![s("reid"), s("--widths"), s("2,1"), s("--bound"), s("3")],
        vec![s("--degree"), s("3"), s("gwdt-check"), p("con.gw"), p("con.forms")],
        vec![s("--degree"), s("3"), s("corollary-pipeline"), p("con.gw"), p("con.forms"), p("con.forms"), p("con.flop")],
        vec![s("--degree"), s("3"), s("demo-conifold")],
    ];
    for job in &jobs {
        let reference = run_cli(job, 1)?;
        ensure(reference.0 == Some(0), || format!("{job:?} exited with {:?}", reference.0))?;
        ensure(!reference.1.is_empty(), || format!("{job:?} printed nothing"))?;
        for threads in [1, 4] {
            let again = run_cli(job, threads)?;
            ensure(again == reference, || format!("{job:?} output differs with --threads {threads}"))?;
        }
    }
    Ok(format!("{} invocations byte-identical across reruns and --threads 1/4", jobs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("kernel powers multiply to one", criterion_1),
        ("conifold product oracle", criterion_2),
        ("BPS round trip", criterion_3),
        ("flop and center soundness, mutation sensitivity", criterion_4),
        ("degeneration collapse and hand sum", criterion_5),
        ("effectivity lemmas", criterion_6),
        ("GW/DT substitution, correspondence and chain", criterion_7),
        ("CLI determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS ({name}; {detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}) [{secs:.2}s]\n{why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
