//! Experiment specifications and the commands behind the `flatcount` binary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;

use flatcount::checks::{self, Check, WindtreeSettings};
use flatcount::enumerate::{convergence, convergence_csv, cylinders_up_to, report_json_lines, Filter};
use flatcount::svconst::constants_report;
use flatcount::templates::Template;
use flatcount::windtree::windtree_csv;
use flatcount::{io, FlatSurface, Kind, Scalar};

/// Where the surface of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceSource {
    Template(Template),
    File(PathBuf),
}

impl SurfaceSource {
    pub fn from_flags(template: Option<&str>, a: Option<Scalar>, b: Option<Scalar>, d: Option<usize>, file: Option<&Path>) -> anyhow::Result<Self> {
        match (template, file) {
            (Some(_), Some(_)) => bail!("--template and --file are mutually exclusive"),
            (None, None) => bail!("one of --template or --file is required"),
            (None, Some(f)) => Ok(SurfaceSource::File(f.to_path_buf())),
            (Some(t), None) => {
                let t = match t {
                    "torus" => Template::Torus,
                    "pillowcase" => Template::Pillowcase,
                    "lab" => Template::Lab(
                        a.ok_or_else(|| anyhow!("--template lab needs --a"))?,
                        b.ok_or_else(|| anyhow!("--template lab needs --b"))?,
                    ),
                    "q" => Template::Q(d.unwrap_or(1)),
                    other => bail!("unknown template '{other}' (torus, pillowcase, lab, q)"),
                };
                Ok(SurfaceSource::Template(t))
            }
        }
    }

    pub fn load(&self) -> anyhow::Result<FlatSurface> {
        match self {
            SurfaceSource::Template(t) => Ok(t.build()?),
            SurfaceSource::File(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                io::from_json(&text).with_context(|| format!("{}", p.display()))
            }
        }
    }
}

/// A counting experiment. The canonical text form is a list of `key=value` tokens, e.g.
/// `template=lab a=1/2 b=1/2 length=20 filter=weierstrass-pair steps=10`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub source: SurfaceSource,
    pub length: Scalar,
    pub filter: String,
    pub steps: u32,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            SurfaceSource::Template(Template::Torus) => write!(f, "template=torus")?,
            SurfaceSource::Template(Template::Pillowcase) => write!(f, "template=pillowcase")?,
            SurfaceSource::Template(Template::Lab(a, b)) => write!(f, "template=lab a={a} b={b}")?,
            SurfaceSource::Template(Template::Q(d)) => write!(f, "template=q d={d}")?,
            SurfaceSource::File(p) => write!(f, "file={}", p.display())?,
        }
        write!(f, " length={} filter={} steps={}", self.length, self.filter, self.steps)?;
        if let Some(o) = &self.out {
            write!(f, " out={}", o.display())?;
        }
        if let Some(t) = self.threads {
            write!(f, " threads={t}")?;
        }
        Ok(())
    }
}

impl FromStr for ExperimentSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (mut template, mut a, mut b, mut d, mut file) = (None, None, None, None, None);
        let (mut length, mut filter, mut steps, mut out, mut threads) = (None, None, None, None, None);
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| anyhow!("expected key=value, got '{tok}'"))?;
            match k {
                "template" => template = Some(v.to_string()),
                "a" => a = Some(v.parse::<Scalar>()?),
                "b" => b = Some(v.parse::<Scalar>()?),
                "d" => d = Some(v.parse::<usize>()?),
                "file" => file = Some(PathBuf::from(v)),
                "length" => length = Some(v.parse::<Scalar>()?),
                "filter" => filter = Some(v.to_string()),
                "steps" => steps = Some(v.parse::<u32>()?),
                "out" => out = Some(PathBuf::from(v)),
                "threads" => threads = Some(v.parse::<usize>()?),
                _ => bail!("unknown key '{k}'"),
            }
        }
        let source = SurfaceSource::from_flags(template.as_deref(), a, b, d, file.as_deref())?;
        ExperimentSpec::new(source, length.ok_or_else(|| anyhow!("missing length"))?, filter, steps, out, threads)
    }
}

impl ExperimentSpec {
    pub fn new(
        source: SurfaceSource,
        length: Scalar,
        filter: Option<String>,
        steps: Option<u32>,
        out: Option<PathBuf>,
        threads: Option<usize>,
    ) -> anyhow::Result<Self> {
        if length.signum() <= 0 {
            bail!("length must be positive, got {length}");
        }
        let steps = steps.unwrap_or(10);
        if steps == 0 {
            bail!("steps must be at least 1");
        }
        if threads == Some(0) {
            bail!("threads must be at least 1");
        }
        Ok(ExperimentSpec { source, length, filter: filter.unwrap_or_else(|| "all".into()), steps, out, threads })
    }

    /// The lengths `L·k/steps`, `k = 1..=steps`, at which the convergence table is sampled.
    pub fn sample_lengths(&self) -> Vec<Scalar> {
        let n = self.steps as i128;
        (1..=n).map(|k| self.length * Scalar::ratio(k, n)).collect()
    }
}

/// Runs `f` on a pool of `threads` workers, or on the default pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// The enumeration report (JSON lines) and the convergence table (CSV) of an experiment.
pub struct CountReports {
    pub cylinders: String,
    pub convergence: String,
}

pub fn count(spec: &ExperimentSpec) -> anyhow::Result<CountReports> {
    let surface = spec.source.load()?;
    let filter = Filter::parse(&surface, &spec.filter)?;
    with_threads(spec.threads, || {
        let cyl = cylinders_up_to(&surface, &spec.length);
        let selected: Vec<_> = cyl.iter().filter(|c| filter.matches(c)).cloned().collect();
        let rows = convergence(&surface, &cyl, &spec.sample_lengths(), &filter);
        CountReports { cylinders: report_json_lines(&surface, &selected), convergence: convergence_csv(&rows) }
    })
}

#[derive(Serialize)]
pub struct ConeRow {
    pub name: String,
    pub angle_pi: i64,
    pub order: i64,
    pub marked: bool,
}

#[derive(Serialize)]
pub struct StratumReport {
    pub stratum: String,
    pub kind: &'static str,
    pub genus: i64,
    pub area: String,
    pub euler_characteristic: i64,
    pub cells: usize,
    pub cones: Vec<ConeRow>,
    pub marked_points: Vec<String>,
}

pub fn stratum(surface: &FlatSurface) -> StratumReport {
    let sig = surface.stratum_signature();
    StratumReport {
        stratum: sig.to_string(),
        kind: match surface.kind() {
            Kind::Abelian => "abelian",
            Kind::Quadratic => "quadratic",
        },
        genus: sig.genus,
        area: surface.area().to_string(),
        euler_characteristic: surface.euler_characteristic(),
        cells: surface.cells().len(),
        cones: surface
            .cones()
            .iter()
            .map(|c| ConeRow { name: c.name.clone(), angle_pi: c.angle_pi, order: c.order, marked: c.marked })
            .collect(),
        marked_points: surface.markings().iter().filter(|m| !m.puncture).map(|m| m.name.clone()).collect(),
    }
}

impl fmt::Display for StratumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}, genus {}, area {}", self.stratum, self.genus, self.area)?;
        writeln!(f, "{} differential, {} cells, Euler characteristic {}", self.kind, self.cells, self.euler_characteristic)?;
        writeln!(f, "{:<8} {:>6} {:>6} {:>7}", "cone", "angle", "order", "marked")?;
        for c in &self.cones {
            let angle = if c.angle_pi == 1 { "π".to_string() } else { format!("{}π", c.angle_pi) };
            writeln!(f, "{:<8} {:>6} {:>6} {:>7}", c.name, angle, c.order, if c.marked { "yes" } else { "no" })?;
        }
        if !self.marked_points.is_empty() {
            writeln!(f, "marked points: {}", self.marked_points.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Constants,
    Covers,
    Counterexample,
    Windtree,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub torus_tolerance: f64,
    pub windtree_tolerance: f64,
    pub counterexample_bound: i128,
    pub lift_bound: i128,
    /// Caps every length of the wind-tree suite.
    pub max_length: Option<i128>,
    pub out: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { torus_tolerance: 0.02, windtree_tolerance: 0.15, counterexample_bound: 50, lift_bound: 20, max_length: None, out: None }
    }
}

#[derive(Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify(suite: Suite, opts: &VerifyOptions) -> anyhow::Result<Vec<SuiteResult>> {
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Constants, Suite::Covers, Suite::Counterexample, Suite::Windtree],
        s => std::slice::from_ref(match s {
            Suite::Constants => &Suite::Constants,
            Suite::Covers => &Suite::Covers,
            Suite::Counterexample => &Suite::Counterexample,
            _ => &Suite::Windtree,
        }),
    };
    let mut out = Vec::new();
    for &s in suites {
        let t = Instant::now();
        let (name, checks) = match s {
            Suite::Constants => ("constants", checks::constants_suite()),
            Suite::Covers => ("covers", checks::covers_suite(opts.lift_bound)),
            Suite::Counterexample => ("counterexample", checks::counterexample_suite(opts.counterexample_bound)),
            _ => {
                let mut settings = WindtreeSettings {
                    torus_tolerance: opts.torus_tolerance,
                    tolerance: opts.windtree_tolerance,
                    ..WindtreeSettings::default()
                };
                if let Some(m) = opts.max_length {
                    settings.torus_length = settings.torus_length.min(m);
                    for s in &mut settings.surfaces {
                        s.3 = s.3.min(m);
                    }
                }
                let (checks, rows) = checks::windtree_suite(&settings);
                if let Some(dir) = &opts.out {
                    write_file(&dir.join("windtree.csv"), &windtree_csv(&rows))?;
                }
                ("windtree", checks)
            }
        };
        out.push(SuiteResult { suite: name, checks, seconds: t.elapsed().as_secs_f64() });
    }
    Ok(out)
}

pub fn verify_text(results: &[SuiteResult]) -> String {
    let mut s = String::new();
    for r in results {
        for c in &r.checks {
            s.push_str(&format!(
                "{} {}/{} ({:.2}s): {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                c.seconds,
                c.detail
            ));
        }
        let n = r.checks.iter().filter(|c| c.passed).count();
        s.push_str(&format!("suite {}: {n}/{} passed in {:.2}s\n", r.suite, r.checks.len(), r.seconds));
    }
    s
}

/// One JSON object per check, tagged with its suite.
pub fn verify_json_lines(results: &[SuiteResult]) -> String {
    #[derive(Serialize)]
    struct Line<'a> {
        suite: &'a str,
        #[serde(flatten)]
        check: &'a Check,
    }
    let mut s = String::new();
    for r in results {
        for c in &r.checks {
            s.push_str(&serde_json::to_string(&Line { suite: r.suite, check: c }).expect("serializable check"));
            s.push('\n');
        }
    }
    s
}

pub fn constants_output(d: i64, format: Format) -> anyhow::Result<String> {
    let records = constants_report(d)?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("name,rational,float,units,provenance\n");
            for r in &records {
                s.push_str(&format!("{},{},{:.12},{},{}\n", r.name, r.rational, r.float, r.units, r.provenance));
            }
        }
        Format::Json => {
            for r in &records {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
        }
        Format::Text => {
            for r in &records {
                s.push_str(&format!("{:<32} {:>10}·π^-2  {:.9}  [{}]\n", r.name, r.rational, r.float, r.provenance));
            }
        }
    }
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        for text in [
            "template=torus length=100 filter=all steps=10",
            "template=lab a=1/2 b=1/2 length=20 filter=weierstrass-pair steps=4 out=run threads=2",
            "template=lab a=3/2-1/2√5 b=3/2-1/2√5 length=25/2 filter=pair:w1,w3 steps=10",
            "template=q d=2 length=8 filter=profile:p1,p2,11 steps=1",
            "file=docs/examples/pillowcase.json length=6 filter=all steps=3",
        ] {
            let spec: ExperimentSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn spec_defaults_and_errors() {
        let spec: ExperimentSpec = "length=5 template=pillowcase".parse().unwrap();
        assert_eq!(spec.to_string(), "template=pillowcase length=5 filter=all steps=10");
        assert!("template=lab a=1/2 length=5".parse::<ExperimentSpec>().is_err());
        assert!("template=torus length=0".parse::<ExperimentSpec>().is_err());
        assert!("template=torus".parse::<ExperimentSpec>().is_err());
        assert!("template=torus length=1 colour=red".parse::<ExperimentSpec>().is_err());
    }

    #[test]
    fn sample_lengths_end_at_length() {
        let spec: ExperimentSpec = "template=torus length=3 steps=4".parse().unwrap();
        let l = spec.sample_lengths();
        assert_eq!(l.len(), 4);
        assert_eq!(l[0], Scalar::ratio(3, 4));
        assert_eq!(l[3], Scalar::int(3));
    }

    #[test]
    fn stratum_text() {
        let s = SurfaceSource::Template(Template::Lab(Scalar::ratio(1, 2), Scalar::ratio(1, 2))).load().unwrap();
        let text = stratum(&s).to_string();
        assert!(text.starts_with("H(2), genus 2, area 3/4\n"), "{text}");
    }
}
