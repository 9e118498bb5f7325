//! Command-line front end: config parsing, the four commands and exit codes.
//!
//! Exit codes: 0 success (possibly with warnings), 1 config or usage error,
//! 2 runtime error, 3 I/O error.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analytic::{AnalyticScheme, Scrambling};
use crate::block_codes::CodeSpec;
use crate::ldpc::{CheckRule, LdpcPreset};
use crate::montecarlo::{self, Checkpoint, CodeChoice, SchemeKind, SimConfig, SimError};
use crate::scrambling::ScramblerKind;
use crate::secgap::{self, BerCurve, GapError, BER_VS_GAP_CSV_HEADER, GAP_CSV_HEADER};

/// Overrides the directory used when `--out` is not given.
pub const OUT_DIR_ENV: &str = "WIRETAP_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("I/O error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Checkpoint { ref path, .. } => CliError::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            },
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl ToString) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "wiretap", version, about = "Scrambled coding for the AWGN wire-tap channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form BER/FER curves.
    Analytic(RunArgs),
    /// Monte Carlo BER/FER curve.
    Simulate(RunArgs),
    /// Bob/Eve thresholds and security gap per curve.
    Gap(RunArgs),
    /// Eve's BER as a function of the gap.
    BerVsGap(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analytic(_) => "analytic",
            Command::Simulate(_) => "simulate",
            Command::Gap(_) => "gap",
            Command::BerVsGap(_) => "ber-vs-gap",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Analytic(a) | Command::Simulate(a) | Command::Gap(a) | Command::BerVsGap(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path (default: $WIRETAP_OUT_DIR/<command>.csv, or ./<command>.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides the config value.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for trial execution.
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Continue a simulation from its checkpoint file.
    #[arg(long)]
    pub resume: bool,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub parallel: Option<usize>,
    pub resume: bool,
}

impl RunManifest {
    pub fn from_command(cmd: &Command) -> Self {
        let a = cmd.args();
        let out = a.out.clone().unwrap_or_else(|| {
            let dir = std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("{}.csv", cmd.name()))
        });
        RunManifest {
            command: cmd.name(),
            config: a.config.clone(),
            out,
            seed: a.seed,
            parallel: a.parallel,
            resume: a.resume,
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(warnings) => {
            if warnings > 0 {
                eprintln!("finished with {warnings} warning(s)");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command; returns the number of warnings.
pub fn run(cmd: &Command) -> Result<usize, CliError> {
    let manifest = RunManifest::from_command(cmd);
    if manifest.parallel == Some(0) {
        return Err(CliError::Usage("--parallel must be at least 1".into()));
    }
    let text = fs::read_to_string(&manifest.config).map_err(|e| io_err(&manifest.config, e))?;
    let config = Config::parse(&text, &manifest.config.display().to_string())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = manifest.parallel {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| match cmd {
        Command::Analytic(_) => cmd_analytic(&config, &manifest),
        Command::Simulate(_) => cmd_simulate(&config, &manifest),
        Command::Gap(_) => cmd_gap(&config, &manifest),
        Command::BerVsGap(_) => cmd_ber_vs_gap(&config, &manifest),
    })
}

fn preamble(command: &str, seed: u64) -> Vec<String> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    vec![
        format!("# wiretap {command} seed={seed}"),
        format!("{TIMESTAMP_PREFIX}{now}"),
    ]
}

/// Prefix of the only output line that varies between identical runs.
pub const TIMESTAMP_PREFIX: &str = "# timestamp_unix=";

fn write_output(path: &Path, lines: &[String], body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text.push_str(body);
    fs::write(path, text).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// config file

/// `key = value` entries grouped under `[section]` headers; `#` starts a comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub path: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Config {
    pub fn parse(text: &str, path: &str) -> Result<Config, CliError> {
        let err = |line: usize, msg: String| CliError::Config {
            path: path.to_string(),
            line,
            msg,
        };
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(n, format!("unterminated section header `{line}`")))?
                    .trim();
                if name.is_empty() {
                    return Err(err(n, "empty section name".into()));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line: n,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(n, format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err(n, "empty key".into()));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| err(n, format!("`{key}` appears before any [section]")))?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(err(n, format!("duplicate key `{key}` in [{}]", section.name)));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line: n,
            });
        }
        Ok(Config {
            path: path.to_string(),
            sections,
        })
    }

    fn error(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }

    fn sections<'a>(&'a self, name: &str) -> impl Iterator<Item = SectionView<'a>> + 'a {
        let name = name.to_string();
        self.sections
            .iter()
            .filter(move |s| s.name == name)
            .map(move |s| SectionView {
                cfg: self,
                section: s,
                used: Default::default(),
            })
    }

    /// The single section called `name`.
    fn only(&self, name: &str) -> Result<SectionView<'_>, CliError> {
        let mut all: Vec<_> = self.sections(name).collect();
        match all.len() {
            1 => Ok(all.remove(0)),
            0 => Err(self.error(0, format!("missing [{name}] section"))),
            _ => Err(self.error(all[1].section.line, format!("[{name}] given more than once"))),
        }
    }

    fn check_sections(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.sections.iter().find(|s| !allowed.contains(&s.name.as_str())) {
            Some(s) => Err(self.error(
                s.line,
                format!("unexpected section [{}]; expected one of {allowed:?}", s.name),
            )),
            None => Ok(()),
        }
    }

    fn dir(&self) -> PathBuf {
        Path::new(&self.path)
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default()
    }
}

struct SectionView<'a> {
    cfg: &'a Config,
    section: &'a Section,
    used: std::cell::RefCell<HashSet<String>>,
}

impl SectionView<'_> {
    fn entry(&self, key: &str) -> Option<&Entry> {
        self.used.borrow_mut().insert(key.to_string());
        self.section.entries.iter().find(|e| e.key == key)
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        self.cfg.error(line, msg)
    }

    fn required(&self, key: &str) -> Result<&Entry, CliError> {
        self.entry(key).ok_or_else(|| {
            self.err(
                self.section.line,
                format!("[{}] is missing `{key}`", self.section.name),
            )
        })
    }

    fn parse_entry<T: std::str::FromStr>(&self, e: &Entry, what: &str) -> Result<T, CliError> {
        e.value
            .parse()
            .map_err(|_| self.err(e.line, format!("`{}` is not a valid {what}: `{}`", e.key, e.value)))
    }

    fn get<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T, CliError> {
        let e = self.required(key)?;
        self.parse_entry(e, what)
    }

    fn get_or<T: std::str::FromStr>(&self, key: &str, what: &str, default: T) -> Result<T, CliError> {
        match self.entry(key) {
            Some(e) => self.parse_entry(e, what),
            None => Ok(default),
        }
    }

    fn text(&self, key: &str) -> Result<&str, CliError> {
        Ok(self.required(key)?.value.as_str())
    }

    fn grid(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let e = self.required(key)?;
        parse_grid(&e.value).map_err(|m| self.err(e.line, format!("`{key}`: {m}")))
    }

    fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        match self.section.entries.iter().find(|e| !used.contains(&e.key)) {
            Some(e) => Err(self.err(
                e.line,
                format!("unknown key `{}` in [{}]", e.key, self.section.name),
            )),
            None => Ok(()),
        }
    }
}

/// `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{}` is not a finite number", t.trim()))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err("range must be start:stop:step".into());
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || b < a {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

fn parse_scrambling(s: &str) -> Option<Scrambling> {
    match s.trim() {
        "none" => Some(Scrambling::None),
        "perfect" => Some(Scrambling::Perfect),
        w => w.parse().ok().filter(|&w: &usize| w >= 1).map(Scrambling::Regular),
    }
}

fn analytic_scheme(v: &SectionView<'_>, scrambling: Scrambling) -> Result<AnalyticScheme, CliError> {
    let e = v.required("scheme")?;
    match e.value.as_str() {
        "unitary" => {
            let k: usize = v.get("k", "dimension")?;
            if k == 0 {
                return Err(v.err(e.line, "k must be positive"));
            }
            Ok(AnalyticScheme::Unitary { k, scrambling })
        }
        "bch_model" => {
            let (n, k, t) = (v.get("n", "length")?, v.get("k", "dimension")?, v.get("t", "radius")?);
            CodeSpec::BoundedDistance { n, k, t }
                .validate()
                .map_err(|err| v.err(e.line, err.to_string()))?;
            Ok(AnalyticScheme::TErrorCode { n, k, t, scrambling })
        }
        other => Err(v.err(e.line, format!("unknown analytic scheme `{other}` (unitary or bch_model)"))),
    }
}

fn format_prob(p: f64) -> String {
    format!("{p:.10e}")
}

// ---------------------------------------------------------------------------
// analytic

pub fn cmd_analytic(config: &Config, m: &RunManifest) -> Result<usize, CliError> {
    config.check_sections(&["analytic"])?;
    let v = config.only("analytic")?;
    let w_entry = v.required("w")?;
    let ws: Vec<Scrambling> = w_entry
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            parse_scrambling(s)
                .ok_or_else(|| v.err(w_entry.line, format!("bad w entry `{s}` (integer >= 1, none or perfect)")))
        })
        .collect::<Result<_, _>>()?;
    if ws.is_empty() {
        return Err(v.err(w_entry.line, "w list is empty"));
    }
    let schemes: Vec<AnalyticScheme> = ws
        .iter()
        .map(|&w| analytic_scheme(&v, w))
        .collect::<Result<_, _>>()?;
    let grid = v.grid("grid")?;
    v.finish()?;
    let mut body = String::from("scheme,ebn0_db,ber,fer\n");
    for s in &schemes {
        for &db in &grid {
            body.push_str(&format!(
                "{},{db},{},{}\n",
                s.tag(),
                format_prob(s.ber(db)),
                format_prob(s.fer(db))
            ));
        }
    }
    write_output(&m.out, &preamble("analytic", m.seed.unwrap_or(0)), &body)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate

fn parse_scrambler(v: &SectionView<'_>, e: &Entry) -> Result<ScramblerKind, CliError> {
    let parts: Vec<&str> = e.value.split_whitespace().collect();
    let bad = || {
        v.err(
            e.line,
            format!(
                "bad scrambler `{}` (identity | perfect | regular <w> | dense <density>)",
                e.value
            ),
        )
    };
    match parts.as_slice() {
        ["identity"] => Ok(ScramblerKind::Identity),
        ["perfect"] => Ok(ScramblerKind::PerfectModel),
        ["regular", w] => Ok(ScramblerKind::Regular {
            w: w.parse().map_err(|_| bad())?,
        }),
        ["dense", d] => Ok(ScramblerKind::Dense {
            density: d.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// Builds the simulation config from the `[simulate]` section.
pub fn sim_config(config: &Config, seed_override: Option<u64>) -> Result<SimConfig, CliError> {
    config.check_sections(&["simulate"])?;
    let v = config.only("simulate")?;
    let scheme_entry = v.required("scheme")?;
    let scheme: SchemeKind = scheme_entry
        .value
        .parse()
        .map_err(|e: SimError| v.err(scheme_entry.line, e.to_string()))?;
    let code = match scheme {
        SchemeKind::UnitaryScrambled => CodeChoice::Block(CodeSpec::Unitary {
            k: v.get("k", "dimension")?,
        }),
        SchemeKind::BchModelScrambled => CodeChoice::Block(CodeSpec::BoundedDistance {
            n: v.get("n", "length")?,
            k: v.get("k", "dimension")?,
            t: v.get("t", "radius")?,
        }),
        _ => {
            let e = v.required("preset")?;
            CodeChoice::Ldpc(LdpcPreset::from_name(&e.value).ok_or_else(|| {
                v.err(
                    e.line,
                    format!(
                        "preset `{}` not found (available: {})",
                        e.value,
                        LdpcPreset::ALL.map(|p| p.name()).join(", ")
                    ),
                )
            })?)
        }
    };
    let scrambler = match v.entry("scrambler") {
        Some(e) => Some(parse_scrambler(&v, e)?),
        None => None,
    };
    let mut cfg = SimConfig::new(scheme, code, scrambler)
        .with_grid(v.grid("grid")?)
        .with_stop(
            v.get_or("min_frame_errors", "count", montecarlo::DEFAULT_MIN_FRAME_ERRORS)?,
            v.get_or("max_frames", "count", montecarlo::DEFAULT_MAX_FRAMES)?,
        )
        .with_seed(v.get_or("seed", "seed", 0u64)?);
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    if let Some(e) = v.entry("label") {
        cfg.label = e.value.clone();
    }
    cfg.common_random_numbers = v.get_or("common_random_numbers", "boolean", false)?;
    cfg.max_iterations = v.get_or("max_iterations", "count", montecarlo::DEFAULT_MAX_ITERATIONS)?;
    if let Some(e) = v.entry("check_rule") {
        cfg.check_rule = match e.value.as_str() {
            "tanh" => CheckRule::Tanh,
            "boxplus" => CheckRule::BoxPlus,
            other => return Err(v.err(e.line, format!("unknown check_rule `{other}` (tanh or boxplus)"))),
        };
    }
    v.finish()?;
    cfg.validate().map_err(|e| v.err(v.section.line, e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_simulate(config: &Config, m: &RunManifest) -> Result<usize, CliError> {
    let cfg = sim_config(config, m.seed)?;
    if let Some(dir) = m.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let cp = Checkpoint {
        path: m.out.clone(),
        preamble: preamble("simulate", cfg.seed),
        resume: m.resume,
    };
    let result = montecarlo::run_sweep(&cfg, Some(&cp))?;
    Ok(result.points.iter().filter(|p| p.low_confidence).count())
}

// ---------------------------------------------------------------------------
// gap and ber-vs-gap

fn load_curves(config: &Config) -> Result<Vec<(String, Result<BerCurve, GapError>)>, CliError> {
    let mut curves = Vec::new();
    for v in config.sections("curve") {
        let name = v.text("name")?.to_string();
        if name.contains(',') {
            return Err(v.err(v.section.line, "curve name must not contain commas"));
        }
        let source = v.required("source")?;
        let curve = match source.value.as_str() {
            "analytic" => {
                let e = v.required("scrambling")?;
                let scr = parse_scrambling(&e.value)
                    .ok_or_else(|| v.err(e.line, format!("bad scrambling `{}`", e.value)))?;
                let scheme = analytic_scheme(&v, scr)?;
                let domain = match v.entry("domain") {
                    Some(e) => {
                        let d = parse_grid(&e.value.replace(':', ","))
                            .map_err(|m| v.err(e.line, m))?;
                        if d.len() != 2 || d[0] >= d[1] {
                            return Err(v.err(e.line, "domain must be `lo:hi` with lo < hi"));
                        }
                        (d[0], d[1])
                    }
                    None => (-20.0, 30.0),
                };
                let mut c = BerCurve::analytic(scheme, domain);
                c.tag = name.clone();
                Ok(c)
            }
            "csv" => {
                let e = v.required("path")?;
                let path = config.dir().join(&e.value);
                let text = fs::read_to_string(&path).map_err(|err| io_err(&path, err))?;
                let rows = montecarlo::parse_csv(&text).map_err(|err| CliError::Config {
                    path: path.display().to_string(),
                    line: err.line,
                    msg: err.reason,
                })?;
                let label = match v.entry("label") {
                    Some(l) => l.value.clone(),
                    None => name.clone(),
                };
                BerCurve::from_csv_rows(&label, &rows).map(|mut c| {
                    c.tag = name.clone();
                    c
                })
            }
            other => return Err(v.err(source.line, format!("unknown source `{other}` (analytic or csv)"))),
        };
        v.finish()?;
        curves.push((name, curve));
    }
    if curves.is_empty() {
        return Err(config.error(0, "no [curve] sections"));
    }
    Ok(curves)
}

fn targets(v: &SectionView<'_>) -> Result<(f64, f64), CliError> {
    let pb = v.get_or("pe_b", "probability", secgap::DEFAULT_PE_B)?;
    let pe = v.get_or("pe_e", "probability", secgap::DEFAULT_PE_E)?;
    if !(pb > 0.0 && pb < 1.0 && pe > 0.0 && pe < 1.0) {
        return Err(v.err(v.section.line, "targets must lie in (0, 1)"));
    }
    Ok((pb, pe))
}

pub fn cmd_gap(config: &Config, m: &RunManifest) -> Result<usize, CliError> {
    config.check_sections(&["gap", "curve"])?;
    let v = config.only("gap")?;
    let (pb, pe) = targets(&v)?;
    v.finish()?;
    let mut body = format!("{GAP_CSV_HEADER}\n");
    let mut warnings = 0;
    for (name, curve) in load_curves(config)? {
        match curve.and_then(|c| secgap::security_gap(&c, pb, pe)) {
            Ok(g) => body.push_str(&format!("{}\n", g.csv_row(&name))),
            Err(e) => {
                warnings += 1;
                eprintln!("warning: {name}: {e}");
                body.push_str(&format!("{name},{pb:e},{pe:e},NaN,NaN,NaN\n# error {name}: {e}\n"));
            }
        }
    }
    write_output(&m.out, &preamble("gap", m.seed.unwrap_or(0)), &body)?;
    Ok(warnings)
}

pub fn cmd_ber_vs_gap(config: &Config, m: &RunManifest) -> Result<usize, CliError> {
    config.check_sections(&["ber-vs-gap", "curve"])?;
    let v = config.only("ber-vs-gap")?;
    let (pb, _) = targets(&v)?;
    let gaps = v.grid("gaps")?;
    v.finish()?;
    let mut body = format!("{BER_VS_GAP_CSV_HEADER}\n");
    let mut warnings = 0;
    for (name, curve) in load_curves(config)? {
        match curve.and_then(|c| secgap::ber_vs_gap(&c, pb, &gaps)) {
            Ok(points) => {
                for (g, r) in points {
                    match r {
                        Ok(p) => body.push_str(&format!("{name},{g},{}\n", format_prob(p))),
                        Err(e) => {
                            warnings += 1;
                            body.push_str(&format!("{name},{g},NaN\n# error {name} at gap {g}: {e}\n"));
                        }
                    }
                }
            }
            Err(e) => {
                warnings += 1;
                eprintln!("warning: {name}: {e}");
                body.push_str(&format!("# error {name}: {e}\n"));
            }
        }
    }
    write_output(&m.out, &preamble("ber-vs-gap", m.seed.unwrap_or(0)), &body)?;
    Ok(warnings)
}
