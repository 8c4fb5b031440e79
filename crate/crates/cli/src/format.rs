//! Line-oriented text files: `#` comments, `[section]` headers, and
//! whitespace-separated records.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use dtflop_core::bps::BpsTable;
use dtflop_core::channels::{ChannelSeries, InsertionMonomial, InsertionSet};
use dtflop_core::degeneration::{LabelPairing, RelativeTable, Splitting, WeightedPartition};
use dtflop_core::flop::FlopData;
use dtflop_core::kernel::{KernelForm, KernelMonomial};
use dtflop_core::lattice::{CurveClass, Lattice, LatticeMap, LinearFunctional};
use dtflop_core::novikov::NovikovSeries;
use dtflop_core::scalar::{gaussian, parse_rational, render_rational};
use dtflop_core::{Gaussian, QSeries, Rational, Series, USeries, Window};

/// A diagnostic located in an input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub file: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        CliError { file: None, line: None, message: message.into() }
    }

    pub fn at(file: &str, line: usize, message: impl Into<String>) -> Self {
        CliError { file: Some(file.to_string()), line: Some(line), message: message.into() }
    }

    pub fn in_file(file: &str, message: impl Into<String>) -> Self {
        CliError { file: Some(file.to_string()), line: None, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), Some(line)) => write!(f, "{file}:{line}: {}", self.message),
            (Some(file), None) => write!(f, "{file}: {}", self.message),
            _ => write!(f, "error: {}", self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dtflop_core::Error> for CliError {
    fn from(e: dtflop_core::Error) -> Self {
        CliError::new(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub line: usize,
    pub fields: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub records: Vec<Record>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub file: String,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(file: &str, text: &str) -> CliResult<Self> {
        let mut sections: Vec<Section> = Vec::new();
        let mut names = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::at(file, line, "unterminated section header"))?
                    .trim()
                    .to_string();
                if name.is_empty() {
                    return Err(CliError::at(file, line, "empty section name"));
                }
                if !names.insert(name.clone()) {
                    return Err(CliError::at(file, line, format!("duplicate section [{name}]")));
                }
                sections.push(Section { name, line, records: Vec::new() });
                continue;
            }
            let section = sections.last_mut().ok_or_else(|| CliError::at(file, line, "record outside any section"))?;
            section.records.push(Record { line, fields: content.split_whitespace().map(str::to_string).collect() });
        }
        Ok(Document { file: file.to_string(), sections })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> CliResult<&Section> {
        self.section(name).ok_or_else(|| CliError::in_file(&self.file, format!("missing section [{name}]")))
    }

    /// Sections named `prefix:suffix`, with their suffixes.
    pub fn prefixed<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a Section)> + 'a {
        self.sections.iter().filter_map(move |s| {
            s.name.strip_prefix(prefix).and_then(|r| r.strip_prefix(':')).map(|suffix| (suffix, s))
        })
    }

    pub fn err(&self, line: usize, message: impl Into<String>) -> CliError {
        CliError::at(&self.file, line, message)
    }

    fn single<'a>(&'a self, name: &str) -> CliResult<&'a Record> {
        let s = self.require(name)?;
        match s.records.as_slice() {
            [r] => Ok(r),
            _ => Err(self.err(s.line, format!("section [{name}] must hold exactly one record"))),
        }
    }
}

fn int(doc: &Document, line: usize, s: &str) -> CliResult<i64> {
    s.parse().map_err(|_| doc.err(line, format!("expected an integer, found '{s}'")))
}

fn rational(doc: &Document, line: usize, s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| doc.err(line, format!("expected a rational number, found '{s}'")))
}

fn ints(doc: &Document, r: &Record, fields: &[String]) -> CliResult<Vec<i64>> {
    fields.iter().map(|f| int(doc, r.line, f)).collect()
}

fn join<T: fmt::Display>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn class_fields(b: &CurveClass) -> String {
    join(b.coords(), " ")
}

fn located<T>(doc: &Document, line: usize, r: dtflop_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| doc.err(line, e.to_string()))
}

/// `[name]` lattice section: one generator per record, coordinates then weight.
pub fn read_lattice(doc: &Document, name: &str) -> CliResult<Lattice> {
    let s = doc.require(name)?;
    let mut gens = Vec::new();
    let mut weights = Vec::new();
    for r in &s.records {
        if r.fields.len() < 2 {
            return Err(doc.err(r.line, "a generator needs coordinates and a weight"));
        }
        let (coords, w) = r.fields.split_at(r.fields.len() - 1);
        gens.push(ints(doc, r, coords)?);
        let w = int(doc, r.line, &w[0])?;
        if w < 1 {
            return Err(doc.err(r.line, "weights must be positive"));
        }
        weights.push(w as u32);
    }
    located(doc, s.line, Lattice::new(gens, weights))
}

pub fn write_lattice(out: &mut String, name: &str, l: &Lattice) {
    let _ = writeln!(out, "[{name}]");
    for (g, w) in l.generators().iter().zip(l.weights()) {
        let _ = writeln!(out, "{} {w}", class_fields(g));
    }
}

fn read_class(doc: &Document, r: &Record, fields: &[String], rank: usize) -> CliResult<CurveClass> {
    if fields.len() != rank {
        return Err(doc.err(r.line, format!("expected {rank} class coordinates, found {}", fields.len())));
    }
    Ok(CurveClass(ints(doc, r, fields)?))
}

fn read_functional(doc: &Document, name: &str, rank: usize) -> CliResult<LinearFunctional> {
    match doc.section(name) {
        None => Ok(LinearFunctional::zero(rank)),
        Some(_) => {
            let r = doc.single(name)?;
            Ok(LinearFunctional(read_class(doc, r, &r.fields, rank)?.0))
        }
    }
}

fn write_functional(out: &mut String, name: &str, c: &LinearFunctional) {
    let _ = writeln!(out, "[{name}]\n{}", join(&c.0, " "));
}

fn read_insertions(doc: &Document, rank: usize) -> CliResult<InsertionSet> {
    let mut set = InsertionSet::new();
    let Some(s) = doc.section("insertions") else { return Ok(set) };
    for r in &s.records {
        if r.fields.len() < 2 {
            return Err(doc.err(r.line, "an insertion needs a name and a degree"));
        }
        let degree = int(doc, r.line, &r.fields[1])?;
        let pairing = if r.fields.len() > 2 {
            Some(LinearFunctional(read_class(doc, r, &r.fields[2..], rank)?.0))
        } else {
            None
        };
        located(doc, r.line, set.declare(&r.fields[0], degree.max(0) as u32, pairing))?;
    }
    Ok(set)
}

fn write_insertions(out: &mut String, set: &InsertionSet) {
    let labels: Vec<_> = set.labels().collect();
    if labels.is_empty() {
        return;
    }
    let _ = writeln!(out, "[insertions]");
    for l in labels {
        match &l.pairing {
            Some(p) => {
                let _ = writeln!(out, "{} {} {}", l.name, l.degree, join(&p.0, " "));
            }
            None => {
                let _ = writeln!(out, "{} {}", l.name, l.degree);
            }
        }
    }
}

fn monomial(doc: &Document, line: usize, s: &str) -> CliResult<InsertionMonomial> {
    located(doc, line, s.parse())
}

/// Lattice, `c1` and insertion labels shared by table and series files.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub lattice: Lattice,
    pub c1: LinearFunctional,
    pub insertions: InsertionSet,
}

impl Header {
    pub fn read(doc: &Document) -> CliResult<Self> {
        let lattice = read_lattice(doc, "lattice")?;
        let c1 = read_functional(doc, "c1", lattice.ambient_rank())?;
        let insertions = read_insertions(doc, lattice.ambient_rank())?;
        Ok(Header { lattice, c1, insertions })
    }

    pub fn write(&self, out: &mut String) {
        write_lattice(out, "lattice", &self.lattice);
        write_functional(out, "c1", &self.c1);
        write_insertions(out, &self.insertions);
    }
}

/// `[bps]` records `g beta... monomial value`.
pub fn read_table(doc: &Document) -> CliResult<BpsTable> {
    let h = Header::read(doc)?;
    let rank = h.lattice.ambient_rank();
    let mut table = BpsTable::new(h.lattice, h.c1, h.insertions);
    if let Some(s) = doc.section("bps") {
        for r in &s.records {
            if r.fields.len() != rank + 3 {
                return Err(doc.err(r.line, format!("expected {} fields: g, class, monomial, value", rank + 3)));
            }
            let g = int(doc, r.line, &r.fields[0])?;
            let beta = read_class(doc, r, &r.fields[1..=rank], rank)?;
            let m = monomial(doc, r.line, &r.fields[rank + 1])?;
            let v = rational(doc, r.line, &r.fields[rank + 2])?;
            located(doc, r.line, table.insert(g, beta, m, v))?;
        }
    }
    Ok(table)
}

pub fn write_table(table: &BpsTable) -> String {
    let mut out = String::new();
    Header { lattice: table.lattice().clone(), c1: table.c1().clone(), insertions: table.insertions().clone() }
        .write(&mut out);
    let _ = writeln!(out, "[bps]");
    for (g, beta, m, n) in table.entries() {
        let _ = writeln!(out, "{g} {} {m} {}", class_fields(beta), render_rational(n));
    }
    out
}

fn read_degree(doc: &Document) -> CliResult<u32> {
    let r = doc.single("degree")?;
    let d = int(doc, r.line, &r.fields[0])?;
    if d < 0 || r.fields.len() != 1 {
        return Err(doc.err(r.line, "expected one nonnegative degree bound"));
    }
    Ok(d as u32)
}

/// Parse one coefficient record set into per-class series.
trait CoeffFormat: Sized + Clone {
    const WIDTH: usize;
    fn parse(doc: &Document, r: &Record, fields: &[String]) -> CliResult<(i64, Self)>;
    fn render(e: i64, c: &Self) -> String;
}

impl CoeffFormat for Rational {
    const WIDTH: usize = 2;
    fn parse(doc: &Document, r: &Record, f: &[String]) -> CliResult<(i64, Self)> {
        Ok((int(doc, r.line, &f[0])?, rational(doc, r.line, &f[1])?))
    }
    fn render(e: i64, c: &Self) -> String {
        format!("{e} {}", render_rational(c))
    }
}

impl CoeffFormat for Gaussian {
    const WIDTH: usize = 3;
    fn parse(doc: &Document, r: &Record, f: &[String]) -> CliResult<(i64, Self)> {
        Ok((int(doc, r.line, &f[0])?, gaussian(rational(doc, r.line, &f[1])?, rational(doc, r.line, &f[2])?)))
    }
    fn render(e: i64, c: &Self) -> String {
        format!("{e} {} {}", render_rational(&c.re), render_rational(&c.im))
    }
}

#[derive(Default)]
struct Pending<C> {
    terms: Vec<(i64, C)>,
    trunc: Option<Option<i64>>,
    line: usize,
}

fn read_series_section<C>(doc: &Document, s: &Section, lattice: &Lattice, degree: u32) -> CliResult<NovikovSeries<Series<C>>>
where
    C: CoeffFormat + dtflop_core::Scalar,
{
    let rank = lattice.ambient_rank();
    let mut pending: std::collections::BTreeMap<CurveClass, Pending<C>> = Default::default();
    for r in &s.records {
        let n = r.fields.len();
        if n == rank + 1 && r.fields[rank] == "exact" {
            let beta = read_class(doc, r, &r.fields[..rank], rank)?;
            let p = pending.entry(beta).or_insert_with(|| Pending { terms: vec![], trunc: None, line: r.line });
            if p.trunc.is_some() {
                return Err(doc.err(r.line, "precision given twice"));
            }
            p.trunc = Some(None);
        } else if n == rank + 2 && r.fields[rank] == "trunc" {
            let beta = read_class(doc, r, &r.fields[..rank], rank)?;
            let t = int(doc, r.line, &r.fields[rank + 1])?;
            let p = pending.entry(beta).or_insert_with(|| Pending { terms: vec![], trunc: None, line: r.line });
            if p.trunc.is_some() {
                return Err(doc.err(r.line, "precision given twice"));
            }
            p.trunc = Some(Some(t));
        } else if n == rank + C::WIDTH {
            let beta = read_class(doc, r, &r.fields[..rank], rank)?;
            let (e, c) = C::parse(doc, r, &r.fields[rank..])?;
            let p = pending.entry(beta).or_insert_with(|| Pending { terms: vec![], trunc: None, line: r.line });
            if p.terms.iter().any(|(x, _)| *x == e) {
                return Err(doc.err(r.line, format!("exponent {e} given twice")));
            }
            p.terms.push((e, c));
        } else {
            return Err(doc.err(r.line, "malformed series record"));
        }
    }
    let mut out = NovikovSeries::zero(lattice.clone(), degree);
    for (beta, p) in pending {
        let series = match p.trunc {
            Some(Some(t)) => {
                if let Some((e, _)) = p.terms.iter().find(|(e, _)| *e > t) {
                    return Err(doc.err(p.line, format!("exponent {e} lies above the truncation order {t}")));
                }
                let lo = p.terms.iter().map(|(e, _)| *e).min().unwrap_or(t + 1).min(t + 1);
                Series::truncated(Window::new(lo, t), p.terms)
            }
            _ => Series::exact(p.terms),
        };
        if lattice.degree(&beta).is_some_and(|d| d > degree as i64) {
            continue;
        }
        located(doc, p.line, out.accumulate(beta, series))?;
    }
    Ok(out)
}

fn write_series_section<C>(out: &mut String, name: &str, s: &NovikovSeries<Series<C>>)
where
    C: CoeffFormat + dtflop_core::Scalar,
{
    let _ = writeln!(out, "[{name}]");
    for (beta, c) in s.iter() {
        let b = class_fields(beta);
        for (e, v) in c.iter() {
            let _ = writeln!(out, "{b} {}", C::render(e, v));
        }
        match c.trunc_order() {
            Some(t) => {
                let _ = writeln!(out, "{b} trunc {t}");
            }
            None => {
                let _ = writeln!(out, "{b} exact");
            }
        }
    }
}

fn channel_name(m: &InsertionMonomial) -> String {
    m.to_string()
}

/// A channel series file: header, `[degree]`, and `[PREFIX:MONOMIAL]` sections.
#[derive(Clone, Debug)]
pub struct ChannelFile<R: dtflop_core::novikov::CoeffRing> {
    pub header: Header,
    pub channels: ChannelSeries<R>,
}

fn read_channels<R: dtflop_core::novikov::CoeffRing>(
    doc: &Document,
    prefix: &str,
    read: impl Fn(&Section, &Lattice, u32) -> CliResult<NovikovSeries<R>>,
) -> CliResult<ChannelFile<R>> {
    let header = Header::read(doc)?;
    let degree = read_degree(doc)?;
    let mut parsed = Vec::new();
    for (suffix, s) in doc.prefixed(prefix) {
        let m = monomial(doc, s.line, suffix)?;
        parsed.push((m, read(s, &header.lattice, degree)?, s.line));
    }
    let declared: Vec<InsertionMonomial> = parsed.iter().map(|p| p.0.clone()).collect();
    let mut channels = ChannelSeries::zero(header.lattice.clone(), degree, declared.iter());
    for (m, s, line) in parsed {
        located(doc, line, channels.set_channel(m, s))?;
    }
    Ok(ChannelFile { header, channels })
}

fn write_channels<R: dtflop_core::novikov::CoeffRing>(
    header: &Header,
    channels: &ChannelSeries<R>,
    prefix: &str,
    write: impl Fn(&mut String, &str, &NovikovSeries<R>),
) -> String {
    let mut out = String::new();
    header.write(&mut out);
    let _ = writeln!(out, "[degree]\n{}", channels.degree_bound());
    for (m, s) in channels.channels() {
        write(&mut out, &format!("{prefix}:{}", channel_name(m)), s);
    }
    out
}

pub fn read_qseries_file(doc: &Document) -> CliResult<ChannelFile<QSeries>> {
    read_channels(doc, "channel", |s, l, d| read_series_section::<Rational>(doc, s, l, d))
}

pub fn write_qseries_file(header: &Header, channels: &ChannelSeries<QSeries>) -> String {
    write_channels(header, channels, "channel", write_series_section::<Rational>)
}

pub fn read_gw_file(doc: &Document) -> CliResult<ChannelFile<USeries>> {
    read_channels(doc, "gw", |s, l, d| read_series_section::<Gaussian>(doc, s, l, d))
}

pub fn write_gw_file(header: &Header, channels: &ChannelSeries<USeries>) -> String {
    write_channels(header, channels, "gw", write_series_section::<Gaussian>)
}

fn read_forms_section(doc: &Document, s: &Section, lattice: &Lattice, degree: u32) -> CliResult<NovikovSeries<KernelForm>> {
    let rank = lattice.ambient_rank();
    let mut out = NovikovSeries::zero(lattice.clone(), degree);
    for r in &s.records {
        if r.fields.len() != rank + 2 {
            return Err(doc.err(r.line, format!("expected {} fields: class, value, kernel monomial", rank + 2)));
        }
        let beta = read_class(doc, r, &r.fields[..rank], rank)?;
        let c = rational(doc, r.line, &r.fields[rank])?;
        let m: KernelMonomial = located(doc, r.line, r.fields[rank + 1].parse())?;
        if lattice.degree(&beta).is_some_and(|d| d > degree as i64) {
            continue;
        }
        located(doc, r.line, out.accumulate(beta, KernelForm::term(m, c)))?;
    }
    Ok(out)
}

fn write_forms_section(out: &mut String, name: &str, s: &NovikovSeries<KernelForm>) {
    let _ = writeln!(out, "[{name}]");
    for (beta, f) in s.iter() {
        for (m, c) in f.terms() {
            let _ = writeln!(out, "{} {} {m}", class_fields(beta), render_rational(c));
        }
    }
}

pub fn read_forms_file(doc: &Document) -> CliResult<ChannelFile<KernelForm>> {
    read_channels(doc, "forms", |s, l, d| read_forms_section(doc, s, l, d))
}

pub fn write_forms_file(header: &Header, channels: &ChannelSeries<KernelForm>) -> String {
    write_channels(header, channels, "forms", write_forms_section)
}

/// Flop file: `[lattice-x]`, `[lattice-xp]`, `[F-matrix]`, `[center]`
/// (`class... width`), `[c1-x]`, `[c1-xp]`.
pub fn read_flop(doc: &Document) -> CliResult<FlopData> {
    let source = read_lattice(doc, "lattice-x")?;
    let target = read_lattice(doc, "lattice-xp")?;
    let rank = source.ambient_rank();
    let fs = doc.require("F-matrix")?;
    let rows = fs
        .records
        .iter()
        .map(|r| read_class(doc, r, &r.fields, rank).map(|c| c.0))
        .collect::<CliResult<Vec<_>>>()?;
    let f = located(doc, fs.line, LatticeMap::from_rows(rows))?;
    let mut center = Vec::new();
    if let Some(s) = doc.section("center") {
        for r in &s.records {
            if r.fields.len() != rank + 1 {
                return Err(doc.err(r.line, format!("expected {} fields: class and width", rank + 1)));
            }
            let c = read_class(doc, r, &r.fields[..rank], rank)?;
            let w = int(doc, r.line, &r.fields[rank])?;
            if w < 1 {
                return Err(doc.err(r.line, "widths must be positive"));
            }
            center.push((c, w as u32));
        }
    }
    let c1x = read_functional(doc, "c1-x", rank)?;
    let c1xp = read_functional(doc, "c1-xp", rank)?;
    located(doc, fs.line, FlopData::new(source, target, f, center, c1x, c1xp))
}

pub fn write_flop(fd: &FlopData) -> String {
    let mut out = String::new();
    write_lattice(&mut out, "lattice-x", &fd.source);
    write_lattice(&mut out, "lattice-xp", &fd.target);
    let _ = writeln!(out, "[F-matrix]");
    for row in fd.f.rows() {
        let _ = writeln!(out, "{}", join(row, " "));
    }
    let _ = writeln!(out, "[center]");
    for (c, w) in &fd.center {
        let _ = writeln!(out, "{} {w}", class_fields(c));
    }
    write_functional(&mut out, "c1-x", &fd.c1_source);
    write_functional(&mut out, "c1-xp", &fd.c1_target);
    out
}

/// A degeneration-formula job.
#[derive(Clone, Debug)]
pub struct DegenerationFile {
    pub rank: usize,
    pub contact_bound: u32,
    pub total_vdim: i64,
    pub marks: BTreeSet<String>,
    pub pairing: LabelPairing,
    pub main: RelativeTable,
    pub bubbles: Vec<RelativeTable>,
    pub splittings: Vec<Splitting>,
}

fn comma_class(doc: &Document, line: usize, s: &str, rank: usize) -> CliResult<CurveClass> {
    let coords = s.split(',').map(|x| int(doc, line, x)).collect::<CliResult<Vec<_>>>()?;
    if coords.len() != rank {
        return Err(doc.err(line, format!("class '{s}' needs {rank} coordinates")));
    }
    Ok(CurveClass(coords))
}

fn marks_field(s: &str) -> BTreeSet<String> {
    if s == "-" {
        BTreeSet::new()
    } else {
        s.split(',').map(str::to_string).collect()
    }
}

fn render_marks(m: &BTreeSet<String>) -> String {
    if m.is_empty() {
        "-".into()
    } else {
        join(m, ",")
    }
}

fn read_relative(doc: &Document, s: &Section, rank: usize) -> CliResult<RelativeTable> {
    let mut vdim = None;
    let mut total = false;
    let mut rows: Vec<(usize, BTreeSet<String>, Vec<WeightedPartition>, CurveClass, Pending<Rational>)> = Vec::new();
    for r in &s.records {
        match r.fields[0].as_str() {
            "vdim" => vdim = Some(LinearFunctional(read_class(doc, r, &r.fields[1..], rank)?.0)),
            "total" => total = true,
            _ => {
                // marks contact class exponent value | marks contact class trunc T
                if r.fields.len() != 5 {
                    return Err(doc.err(r.line, "expected: marks contact class exponent value"));
                }
                let marks = marks_field(&r.fields[0]);
                let contact = if r.fields[1] == "-" {
                    Vec::new()
                } else {
                    r.fields[1]
                        .split(';')
                        .map(|p| located(doc, r.line, p.parse::<WeightedPartition>()))
                        .collect::<CliResult<Vec<_>>>()?
                };
                let class = comma_class(doc, r.line, &r.fields[2], rank)?;
                let i = match rows.iter().position(|x| x.1 == marks && x.2 == contact && x.3 == class) {
                    Some(i) => i,
                    None => {
                        rows.push((r.line, marks, contact, class, Pending { terms: vec![], trunc: None, line: r.line }));
                        rows.len() - 1
                    }
                };
                let p = &mut rows[i].4;
                if r.fields[3] == "trunc" {
                    p.trunc = Some(Some(int(doc, r.line, &r.fields[4])?));
                } else {
                    p.terms.push((int(doc, r.line, &r.fields[3])?, rational(doc, r.line, &r.fields[4])?));
                }
            }
        }
    }
    let vdim = vdim.ok_or_else(|| doc.err(s.line, "relative table needs a 'vdim' record"))?;
    let mut t = RelativeTable::new(vdim, total);
    for (_, marks, contact, class, p) in rows {
        let v = match p.trunc {
            Some(Some(tr)) => {
                let lo = p.terms.iter().map(|(e, _)| *e).min().unwrap_or(tr + 1).min(tr + 1);
                QSeries::truncated(Window::new(lo, tr), p.terms)
            }
            _ => QSeries::exact(p.terms),
        };
        t.insert(marks, contact, class, v);
    }
    Ok(t)
}

fn write_relative(out: &mut String, name: &str, t: &RelativeTable) {
    let _ = writeln!(out, "[{name}]\nvdim {}", join(&t.vdim.0, " "));
    if t.total {
        let _ = writeln!(out, "total");
    }
    for (k, v) in t.entries() {
        let head = format!(
            "{} {} {}",
            render_marks(&k.marks),
            if k.contact.is_empty() { "-".to_string() } else { join(&k.contact, ";") },
            join(k.class.coords(), ",")
        );
        for (e, c) in v.iter() {
            let _ = writeln!(out, "{head} {e} {}", render_rational(c));
        }
        if let Some(t) = v.trunc_order() {
            let _ = writeln!(out, "{head} trunc {t}");
        }
    }
}

/// Sections: `[degeneration]` (`rank`, `contact-bound`, `total-vdim`,
/// `marks` keyword records), `[pairing]`, `[splittings]` (comma-separated
/// classes, main first), `[relative:main]`, `[relative:1]`, ...
pub fn read_degeneration(doc: &Document) -> CliResult<DegenerationFile> {
    let s = doc.require("degeneration")?;
    let (mut rank, mut contact_bound, mut total_vdim, mut marks) = (None, 4u32, 0i64, BTreeSet::new());
    for r in &s.records {
        let value = r.fields.get(1).ok_or_else(|| doc.err(r.line, "keyword without a value"))?;
        match r.fields[0].as_str() {
            "rank" => rank = Some(int(doc, r.line, value)? as usize),
            "contact-bound" => contact_bound = int(doc, r.line, value)?.max(0) as u32,
            "total-vdim" => total_vdim = int(doc, r.line, value)?,
            "marks" => marks = marks_field(value),
            k => return Err(doc.err(r.line, format!("unknown keyword '{k}'"))),
        }
    }
    let rank = rank.ok_or_else(|| doc.err(s.line, "missing 'rank'"))?;
    let mut pairing = LabelPairing::new();
    for r in &doc.require("pairing")?.records {
        match r.fields.as_slice() {
            [a, b] => pairing.pair(a, b),
            [a] => pairing.pair(a, a),
            _ => return Err(doc.err(r.line, "expected one or two labels")),
        }
    }
    let main = read_relative(doc, doc.require("relative:main")?, rank)?;
    let mut bubbles = Vec::new();
    for i in 1.. {
        match doc.section(&format!("relative:{i}")) {
            Some(s) => bubbles.push(read_relative(doc, s, rank)?),
            None => break,
        }
    }
    let mut splittings = Vec::new();
    for r in &doc.require("splittings")?.records {
        if r.fields.len() != bubbles.len() + 1 {
            return Err(doc.err(r.line, format!("expected {} classes", bubbles.len() + 1)));
        }
        let classes = r.fields.iter().map(|f| comma_class(doc, r.line, f, rank)).collect::<CliResult<Vec<_>>>()?;
        splittings.push(Splitting { main: classes[0].clone(), bubbles: classes[1..].to_vec() });
    }
    Ok(DegenerationFile { rank, contact_bound, total_vdim, marks, pairing, main, bubbles, splittings })
}

pub fn write_degeneration(d: &DegenerationFile) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "[degeneration]\nrank {}\ncontact-bound {}\ntotal-vdim {}\nmarks {}",
        d.rank,
        d.contact_bound,
        d.total_vdim,
        render_marks(&d.marks)
    );
    let _ = writeln!(out, "[pairing]");
    for a in d.pairing.labels() {
        let b = d.pairing.dual(a).unwrap_or(a);
        if a.as_str() == b {
            let _ = writeln!(out, "{a}");
        } else if a.as_str() < b {
            let _ = writeln!(out, "{a} {b}");
        }
    }
    write_relative(&mut out, "relative:main", &d.main);
    for (i, b) in d.bubbles.iter().enumerate() {
        write_relative(&mut out, &format!("relative:{}", i + 1), b);
    }
    let _ = writeln!(out, "[splittings]");
    for s in &d.splittings {
        let mut classes = vec![join(s.main.coords(), ",")];
        classes.extend(s.bubbles.iter().map(|b| join(b.coords(), ",")));
        let _ = writeln!(out, "{}", classes.join(" "));
    }
    out
}
