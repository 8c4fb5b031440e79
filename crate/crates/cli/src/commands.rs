//! The subcommands, as functions from inputs to rendered output.

use std::fmt::Write as _;
use std::path::Path;

use dtflop_core::bps::{bps_forward, bps_forward_forms, bps_inverse, BpsTable};
use dtflop_core::channels::{ChannelSeries, InsertionSet};
use dtflop_core::conifold;
use dtflop_core::degeneration::Degeneration;
use dtflop_core::flop::{check_bps_corollary, check_center_formula, check_flop_formula, CheckReport, FlopData};
use dtflop_core::gwdt::{check_conjecture2, check_conjecture4prime, corollary_pipeline, q_to_u};
use dtflop_core::kernel::{KernelForm, KernelMonomial};
use dtflop_core::pipeline::{verify_proof_pipeline, SideData};
use dtflop_core::reid::{build_reid_tower, check_support_lemma, check_width_one_lemma};
use dtflop_core::scalar::{rat, render_rational};
use dtflop_core::Window;

use crate::format::{self, CliError, CliResult, Document, Header};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Lines,
}

/// Truncation parameters shared by all commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub degree: u32,
    pub qmin: i64,
    pub qmax: i64,
    pub umax: i64,
    pub format: ReportFormat,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig { degree: 4, qmin: -8, qmax: 20, umax: 12, format: ReportFormat::Text }
    }
}

impl JobConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.qmin > self.qmax {
            return Err(CliError::new(format!("empty q-window [{}, {}]", self.qmin, self.qmax)));
        }
        if self.umax < 0 {
            return Err(CliError::new("the u-window must reach at least u^0"));
        }
        Ok(())
    }

    pub fn window(&self) -> Window {
        Window::new(self.qmin, self.qmax)
    }
}

/// Rendered output and verdict of a command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

impl Outcome {
    fn data(output: String) -> Self {
        Outcome { output, passed: true }
    }
}

pub fn load(path: &Path) -> CliResult<Document> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::in_file(&name, e.to_string()))?;
    Document::parse(&name, &text)
}

pub fn render_reports(reports: &[CheckReport], fmt: ReportFormat) -> String {
    let mut out = String::new();
    let passed = reports.iter().all(CheckReport::passed);
    let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
    match fmt {
        ReportFormat::Text => {
            for r in reports {
                let _ = writeln!(out, "{r}");
            }
            let _ = writeln!(out, "RESULT: {}", verdict(passed));
        }
        ReportFormat::Lines => {
            for r in reports {
                let _ = writeln!(out, "check\t{}\t{}\t{}", r.name, verdict(r.passed()), r.compared);
                for n in &r.notes {
                    let _ = writeln!(out, "note\t{}\t{n}", r.name);
                }
                for f in &r.findings {
                    let image = f.image.as_ref().map_or("-".to_string(), |i| i.to_string());
                    let exponent = f.exponent.map_or("-".to_string(), |e| e.to_string());
                    let _ = writeln!(
                        out,
                        "finding\t{}\t{}\t{}\t{image}\t{exponent}\t{}",
                        r.name, f.channel, f.class, f.message
                    );
                }
            }
            let _ = writeln!(out, "result\t{}", verdict(passed));
        }
    }
    out
}

fn report_outcome(reports: Vec<CheckReport>, fmt: ReportFormat) -> Outcome {
    let passed = reports.iter().all(CheckReport::passed);
    Outcome { output: render_reports(&reports, fmt), passed }
}

fn header_of(table: &BpsTable) -> Header {
    Header { lattice: table.lattice().clone(), c1: table.c1().clone(), insertions: table.insertions().clone() }
}

/// `bps-forward`: DT series (or exact kernel forms) of a BPS table.
pub fn cmd_bps_forward(table: &Path, forms: bool, cfg: &JobConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let doc = load(table)?;
    let t = format::read_table(&doc)?;
    let header = header_of(&t);
    if forms {
        let f = bps_forward_forms(&t, cfg.degree, &[])?;
        return Ok(Outcome::data(format::write_forms_file(&header, &f)));
    }
    let z = bps_forward(&t, cfg.degree, cfg.window(), &[])?;
    Ok(Outcome::data(format::write_qseries_file(&header, &z)))
}

/// `bps-extract`: BPS table from a DT series file, with coverage and diagnostics.
pub fn cmd_bps_extract(series: &Path, _cfg: &JobConfig) -> CliResult<Outcome> {
    let doc = load(series)?;
    let f = format::read_qseries_file(&doc)?;
    let ex = bps_inverse(&f.channels, &f.header.c1, &f.header.insertions)?;
    let mut out = format::write_table(&ex.table);
    let _ = writeln!(out, "[coverage]");
    for ((beta, m), range) in &ex.coverage {
        let lo = range.min.map_or("-".to_string(), |g| g.to_string());
        let _ = writeln!(out, "{} {m} {lo} {}", beta.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "), range.max);
    }
    for d in &ex.diagnostics {
        let _ = writeln!(out, "# diagnostic: {d}");
    }
    Ok(Outcome { output: out, passed: ex.diagnostics.is_empty() })
}

fn read_pair(x: &Path, xp: &Path, flop: &Path) -> CliResult<(ChannelSeries<dtflop_core::QSeries>, ChannelSeries<dtflop_core::QSeries>, FlopData)> {
    let fd = format::read_flop(&load(flop)?)?;
    let dx = load(x)?;
    let dxp = load(xp)?;
    let zx = format::read_qseries_file(&dx)?;
    let zxp = format::read_qseries_file(&dxp)?;
    if zx.header.lattice != fd.source {
        return Err(CliError::in_file(&dx.file, "lattice differs from [lattice-x] of the flop file"));
    }
    if zxp.header.lattice != fd.target {
        return Err(CliError::in_file(&dxp.file, "lattice differs from [lattice-xp] of the flop file"));
    }
    Ok((zx.channels, zxp.channels, fd))
}

/// `flop-check`.
pub fn cmd_flop_check(x: &Path, xp: &Path, flop: &Path, cfg: &JobConfig) -> CliResult<Outcome> {
    let (zx, zxp, fd) = read_pair(x, xp, flop)?;
    Ok(report_outcome(vec![check_flop_formula(&zx, &zxp, &fd)?], cfg.format))
}

/// `center-check`.
pub fn cmd_center_check(x: &Path, xp: &Path, flop: &Path, cfg: &JobConfig) -> CliResult<Outcome> {
    let (zx, zxp, fd) = read_pair(x, xp, flop)?;
    Ok(report_outcome(vec![check_center_formula(&zx, &zxp, &fd)], cfg.format))
}

/// `bps-corollary`.
pub fn cmd_bps_corollary(x: &Path, xp: &Path, flop: &Path, cfg: &JobConfig) -> CliResult<Outcome> {
    let fd = format::read_flop(&load(flop)?)?;
    let tx = format::read_table(&load(x)?)?;
    let txp = format::read_table(&load(xp)?)?;
    Ok(report_outcome(vec![check_bps_corollary(&tx, &txp, &fd, cfg.degree)], cfg.format))
}

/// `degenerate`: evaluate the degeneration formula.
pub fn cmd_degenerate(file: &Path, _cfg: &JobConfig) -> CliResult<Outcome> {
    let doc = load(file)?;
    let d = format::read_degeneration(&doc)?;
    let job = Degeneration {
        main: &d.main,
        bubbles: d.bubbles.iter().collect(),
        pairing: &d.pairing,
        contact_bound: d.contact_bound,
        total_vdim: d.total_vdim,
    };
    let (sum, stats) = job.sum(&d.splittings, &d.marks).map_err(|e| CliError::in_file(&doc.file, e.to_string()))?;
    let mut out = String::from("[sum]\n");
    for (e, c) in sum.iter() {
        let _ = writeln!(out, "{e} {}", render_rational(c));
    }
    match sum.trunc_order() {
        Some(t) => {
            let _ = writeln!(out, "trunc {t}");
        }
        None => out.push_str("exact\n"),
    }
    let _ = writeln!(
        out,
        "[stats]\nsurviving-terms {}\nnonempty-contact-terms {}",
        stats.surviving_terms, stats.nonempty_contact_terms
    );
    Ok(Outcome::data(out))
}

/// `reid`: tower summary and the effectivity lemmas on a coordinate box.
pub fn cmd_reid(widths: &[u32], bound: i64, nodes: usize, cfg: &JobConfig) -> CliResult<Outcome> {
    let tower = build_reid_tower(widths, widths.len())?;
    let mut out = String::new();
    let ws: Vec<String> = widths.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "widths {}", ws.join(","));
    for l in tower.levels() {
        let types: Vec<String> = l.surfaces.iter().map(|s| s.to_string()).collect();
        let next: Vec<String> = tower.level_widths(l.d).iter().map(|w| w.to_string()).collect();
        let next = if next.is_empty() { "-".to_string() } else { next.join(",") };
        let _ = writeln!(out, "level {} k {} rank {} surfaces {} flop-widths {next}", l.d, l.k, l.rank, types.join(","));
    }
    let mut reports = Vec::new();
    let lemma = |name: &str, r: dtflop_core::reid::LemmaReport| {
        let mut c = CheckReport::new(name);
        c.compared = r.checked;
        for (beta, verdict) in r.failures {
            c.findings.push(dtflop_core::flop::Finding {
                channel: "-".into(),
                class: dtflop_core::lattice::CurveClass(beta),
                image: None,
                exponent: None,
                message: format!("effectivity search returned {verdict:?}"),
            });
        }
        c
    };
    reports.push(lemma("support lemma", check_support_lemma(&tower, bound, nodes)?));
    if tower.depth() == 1 {
        reports.push(lemma("width-one lemma", check_width_one_lemma(&tower, bound, nodes)?));
    }
    let r = report_outcome(reports, cfg.format);
    Ok(Outcome { output: out + &r.output, passed: r.passed })
}

/// `gwdt-check`: the GW/DT correspondence on one side.
pub fn cmd_gwdt_check(gw: &Path, dt: &Path, descendants: bool, cfg: &JobConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let g = format::read_gw_file(&load(gw)?)?;
    let dd = load(dt)?;
    let d = format::read_forms_file(&dd)?;
    if g.header.lattice != d.header.lattice {
        return Err(CliError::in_file(&dd.file, "lattice differs from the GW file"));
    }
    let check = if descendants { check_conjecture4prime } else { check_conjecture2 };
    let r = check(&g.channels, &d.channels, &d.header.c1, &d.header.insertions, cfg.umax)?;
    Ok(report_outcome(vec![r], cfg.format))
}

/// `corollary-pipeline`.
pub fn cmd_corollary_pipeline(gw: &Path, dt: &Path, dtp: &Path, flop: &Path, cfg: &JobConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let fd = format::read_flop(&load(flop)?)?;
    let g = format::read_gw_file(&load(gw)?)?;
    let d = format::read_forms_file(&load(dt)?)?;
    let dp = format::read_forms_file(&load(dtp)?)?;
    let r = corollary_pipeline(&g.channels, &d.channels, &fd, &dp.channels, &d.header.insertions, cfg.window(), cfg.umax)?;
    let mut out = report_outcome(r.links.clone(), cfg.format);
    out.passed = r.passed();
    if !out.passed && r.links.iter().all(CheckReport::passed) {
        out.output.push_str("chain incomplete\n");
    }
    Ok(out)
}

/// `demo-conifold`: every pipeline on the built-in models.
pub fn cmd_demo_conifold(cfg: &JobConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let mut reports = Vec::new();
    let window = cfg.window();
    let d = cfg.degree;

    // forward and back on the conifold
    let t = conifold::conifold_table();
    let z = bps_forward(&t, d, window, &[])?;
    let ex = bps_inverse(&z, t.c1(), &InsertionSet::new())?;
    let mut rt = CheckReport::new("conifold round trip");
    for (g, beta, m, n) in t.entries() {
        rt.compared += 1;
        if &ex.table.get(g, beta, m) != n {
            rt.findings.push(dtflop_core::flop::Finding {
                channel: m.to_string(),
                class: beta.clone(),
                image: None,
                exponent: Some(g),
                message: "BPS value not recovered".into(),
            });
        }
    }
    rt.notes.extend(ex.diagnostics.iter().cloned());
    reports.push(rt);

    // flop identities on the rank-two model
    let fd = conifold::symmetric_flop();
    let (tx, txp) = conifold::symmetric_tables(rat(2), rat(-1));
    let zx = bps_forward(&tx, d, window, &[])?;
    let zxp = bps_forward(&txp, d, window, &[])?;
    reports.push(check_flop_formula(&zx, &zxp, &fd)?);
    reports.push(check_center_formula(&zx, &zxp, &fd));
    reports.push(check_bps_corollary(&tx, &txp, &fd, d));
    let x = SideData::width_one(zx, &fd, false)?;
    let xp = SideData::width_one(zxp, &fd, true)?;
    reports.extend(verify_proof_pipeline(&x, &xp, &fd)?);

    // the lemmas on the width-one tower
    let tower = build_reid_tower(&[1], 1)?;
    let lemma = check_width_one_lemma(&tower, 5, 100_000)?;
    let mut lr = CheckReport::new("width-one lemma");
    lr.compared = lemma.checked;
    if !lemma.passed() {
        lr.notes.push(format!("{} classes contradict the lemma", lemma.failures.len()));
        lr.findings.push(dtflop_core::flop::Finding {
            channel: "-".into(),
            class: dtflop_core::lattice::CurveClass(lemma.failures[0].0.clone()),
            image: None,
            exponent: None,
            message: "pullback found effective".into(),
        });
    }
    reports.push(lr);

    // the GW side
    let cf = conifold::conifold_flop();
    let gd = d.min(4);
    let gw = conifold::disconnected_gw(&t, gd, cfg.umax + 4 * gd as i64)?;
    let dt = conifold::dt_forms(&t, gd)?;
    let mut k = CheckReport::new("kernel substitution");
    let image = q_to_u(&KernelForm::term(KernelMonomial::kernel(1, -1), rat(-1)), cfg.umax)?;
    k.compared = 1;
    k.notes.push(format!("leading terms {}", image.truncate(2)));
    reports.push(k);
    reports.push(check_conjecture2(&gw, &dt, &cf.c1_source, &InsertionSet::new(), cfg.umax)?);
    let chain = corollary_pipeline(&gw, &dt, &cf, &dt, &InsertionSet::new(), window, cfg.umax)?;
    let complete = chain.passed();
    reports.extend(chain.links);
    let mut out = report_outcome(reports, cfg.format);
    out.passed &= complete;
    Ok(out)
}
