use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

use dtflop_cli::format::{self, DegenerationFile, Document, Header};
use dtflop_core::bps::{bps_forward, bps_forward_forms, BpsTable};
use dtflop_core::channels::{InsertionMonomial, InsertionSet};
use dtflop_core::conifold;
use dtflop_core::degeneration::{LabelPairing, RelativeTable, Splitting, WeightedPartition};
use dtflop_core::lattice::{CurveClass, Lattice, LinearFunctional};
use dtflop_core::scalar::{rat, ratio};
use dtflop_core::{QSeries, Window};

fn header(t: &BpsTable) -> Header {
    Header { lattice: t.lattice().clone(), c1: t.c1().clone(), insertions: t.insertions().clone() }
}

fn doc(text: &str) -> Document {
    Document::parse("mem", text).unwrap()
}

fn insertion_table() -> BpsTable {
    let mut ins = InsertionSet::new();
    ins.declare("P", 6, None).unwrap();
    ins.declare("D", 2, Some(LinearFunctional(vec![1, 2]))).unwrap();
    let mut t = BpsTable::new(Lattice::standard(vec![1, 2]).unwrap(), LinearFunctional(vec![0, 1]), ins);
    t.insert(0, CurveClass(vec![1, 0]), InsertionMonomial::empty(), rat(3)).unwrap();
    t.insert(-2, CurveClass(vec![0, 1]), "P".parse().unwrap(), ratio(-7, 4)).unwrap();
    t.insert(1, CurveClass(vec![1, 1]), InsertionMonomial::empty(), ratio(1, 3)).unwrap();
    t
}

fn dtflop(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dtflop")).args(args).output().unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn put(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn table_round_trip() {
    for t in [insertion_table(), conifold::symmetric_tables(rat(2), ratio(-5, 3)).0] {
        let text = format::write_table(&t);
        let back = format::read_table(&doc(&text)).unwrap();
        assert_eq!(back, t);
        assert_eq!(format::write_table(&back), text);
    }
}

#[test]
fn channel_files_round_trip() {
    let t = insertion_table();
    let extra: InsertionMonomial = "D*P".parse().unwrap();
    let z = bps_forward(&t, 3, Window::new(-6, 9), std::slice::from_ref(&extra)).unwrap();
    let text = format::write_qseries_file(&header(&t), &z);
    let back = format::read_qseries_file(&doc(&text)).unwrap();
    assert_eq!(back.header.lattice, *t.lattice());
    assert_eq!(back.header.insertions, *t.insertions());
    assert!(back.channels.first_disagreement(&z).is_none());
    assert_eq!(format::write_qseries_file(&back.header, &back.channels), text);

    let forms = bps_forward_forms(&t, 3, &[extra]).unwrap();
    let text = format::write_forms_file(&header(&t), &forms);
    let back = format::read_forms_file(&doc(&text)).unwrap();
    assert_eq!(format::write_forms_file(&back.header, &back.channels), text);

    let c = conifold::conifold_table();
    let gw = conifold::disconnected_gw(&c, 3, 6).unwrap();
    let text = format::write_gw_file(&header(&c), &gw);
    let back = format::read_gw_file(&doc(&text)).unwrap();
    assert!(back.channels.first_disagreement(&gw).is_none());
    assert_eq!(format::write_gw_file(&back.header, &back.channels), text);
}

#[test]
fn flop_round_trip() {
    for fd in [conifold::symmetric_flop(), conifold::conifold_flop()] {
        let text = format::write_flop(&fd);
        assert_eq!(format::read_flop(&doc(&text)).unwrap(), fd);
    }
}

#[test]
fn degeneration_round_trip() {
    let mut pairing = LabelPairing::new();
    pairing.pair("pt", "one");
    let eta: WeightedPartition = "2:pt,1:one".parse().unwrap();
    let mut main = RelativeTable::new(LinearFunctional(vec![1]), false);
    let v = QSeries::truncated(Window::new(-1, 4), [(-1, rat(2)), (3, ratio(1, 5))]);
    main.insert(BTreeSet::from(["h".to_string()]), vec![eta.clone()], CurveClass(vec![2]), v.clone());
    main.insert(BTreeSet::new(), vec![WeightedPartition::empty()], CurveClass(vec![0]), QSeries::one());
    let mut bubble = RelativeTable::new(LinearFunctional(vec![0]), true);
    bubble.insert(BTreeSet::new(), vec![eta.dual(&pairing).unwrap()], CurveClass(vec![1]), v);
    let job = DegenerationFile {
        rank: 1,
        contact_bound: 3,
        total_vdim: 2,
        marks: BTreeSet::from(["h".to_string()]),
        pairing,
        main,
        bubbles: vec![bubble],
        splittings: vec![Splitting { main: CurveClass(vec![2]), bubbles: vec![CurveClass(vec![1])] }],
    };
    let text = format::write_degeneration(&job);
    let back = format::read_degeneration(&doc(&text)).unwrap();
    assert_eq!(back.main, job.main);
    assert_eq!(back.bubbles, job.bubbles);
    assert_eq!(back.pairing, job.pairing);
    assert_eq!(back.splittings, job.splittings);
    assert_eq!((back.rank, back.contact_bound, back.total_vdim), (1, 3, 2));
    assert_eq!(back.marks, job.marks);
    assert_eq!(format::write_degeneration(&back), text);
}

#[test]
fn malformed_records_name_file_and_line() {
    let bad = "[lattice]\n1 0 1\n0 1 1\n\n[c1]\n0 0\n[bps]\n0 1 0 1 oops\n";
    let err = format::read_table(&Document::parse("t.bps", bad).unwrap()).unwrap_err();
    assert!(err.to_string().starts_with("t.bps:8:"), "{err}");
    let err = Document::parse("d.txt", "0 1\n").unwrap_err();
    assert!(err.to_string().starts_with("d.txt:1:"), "{err}");
    let err = Document::parse("d.txt", "[a]\n[a]\n").unwrap_err();
    assert!(err.to_string().starts_with("d.txt:2:"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = dtflop(&["bps-forward", &dir.path().join("absent.bps").display().to_string()]);
    assert_eq!(code, Some(2));
    assert!(err.contains("absent.bps"), "{err}");

    let bad = put(dir.path(), "bad.bps", "[lattice]\n1 1\n[bps]\nzero 1 1 1\n");
    let (code, _, err) = dtflop(&["bps-forward", &bad]);
    assert_eq!(code, Some(2));
    assert!(err.contains("bad.bps:4:"), "{err}");

    let fd = conifold::symmetric_flop();
    let (tx, txp) = conifold::symmetric_tables(rat(1), rat(2));
    let (_, mutated) = conifold::symmetric_tables(rat(1), rat(3));
    let w = Window::new(-8, 20);
    let x = put(dir.path(), "x.dt", &format::write_qseries_file(&header(&tx), &bps_forward(&tx, 4, w, &[]).unwrap()));
    let xp = put(dir.path(), "xp.dt", &format::write_qseries_file(&header(&txp), &bps_forward(&txp, 4, w, &[]).unwrap()));
    let bad = put(dir.path(), "m.dt", &format::write_qseries_file(&header(&mutated), &bps_forward(&mutated, 4, w, &[]).unwrap()));
    let flop = put(dir.path(), "f.flop", &format::write_flop(&fd));

    let (code, out, _) = dtflop(&["flop-check", &x, &xp, &flop]);
    assert_eq!(code, Some(0), "{out}");
    assert!(out.ends_with("RESULT: PASS\n"));
    let (code, out, _) = dtflop(&["flop-check", &x, &bad, &flop]);
    assert_eq!(code, Some(1), "{out}");
    assert!(out.contains("FAIL"));
    let (code, out, _) = dtflop(&["--format", "lines", "center-check", &x, &xp, &flop]);
    assert_eq!(code, Some(0));
    assert!(out.ends_with("result\tPASS\n"), "{out}");

    let (code, out, _) = dtflop(&["--degree", "2", "demo-conifold"]);
    assert_eq!(code, Some(0), "{out}");
    let (code, _, _) = dtflop(&["--qmin", "5", "--qmax", "1", "demo-conifold"]);
    assert_eq!(code, Some(2));
}

#[test]
fn forward_output_extracts_back() {
    let dir = tempfile::tempdir().unwrap();
    let t = insertion_table();
    let table = put(dir.path(), "t.bps", &format::write_table(&t));
    let series = dir.path().join("t.dt").display().to_string();
    let (code, _, err) = dtflop(&["--degree", "3", "--qmin", "-12", "--qmax", "24", "bps-forward", &table, "-o", &series]);
    assert_eq!(code, Some(0), "{err}");
    let (code, out, err) = dtflop(&["bps-extract", &series]);
    assert_eq!(code, Some(0), "{err}");
    let back = format::read_table(&doc(&out)).unwrap();
    assert_eq!(back.restrict(3), t);
}
