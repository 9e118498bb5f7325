//! Seeded Monte Carlo engine: scramble, encode, modulate, add noise, decode,
//! descramble and count message-bit errors.
//!
//! Every frame owns an RNG stream selected by `(master seed, trial index)`.
//! Frames run in fixed-size batches (16, 32, ... doubling up to 4096) and the
//! stop rule is only evaluated between batches, so counts do not depend on the
//! number of worker threads. The same trial streams are reused at every grid
//! point.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::block_codes::{bounded_distance_decode, CodeError, CodeSpec, SystematicGenerator};
use crate::channel::{
    add_noise, add_symbol_relative_noise, hard_decision, modulate, trial_rng, ChannelError,
    ChannelParams,
};
use crate::gf2::{BitVector, Gf2Error};
use crate::ldpc::{CheckRule, LdpcCode, LdpcError, LdpcPreset, PunctureSet, SumProductDecoder};
use crate::scrambling::{ScramblerError, ScramblerKind, ScramblerPair, ScramblerSpec};

pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 100;
pub const DEFAULT_MAX_FRAMES: u64 = 10_000_000;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

const FIRST_BATCH: u64 = 16;
const LAST_BATCH: u64 = 4096;

pub const CSV_HEADER: &str = "scheme,ebn0_db,frames,bit_errors,frame_errors,ber,fer";
pub const LOW_CONFIDENCE_TAG: &str = "# low-confidence";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Scrambler(#[from] ScramblerError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("checkpoint {path}: {reason} (last completed point: {})", last_completed.map_or("none".to_string(), |d| format!("{d} dB")))]
    Checkpoint {
        path: PathBuf,
        reason: String,
        last_completed: Option<f64>,
    },
    #[error("cannot resume from {path}: {reason}")]
    Resume { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    UnitaryScrambled,
    BchModelScrambled,
    LdpcSystematic,
    LdpcScrambled,
    LdpcPunctured,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::UnitaryScrambled,
        SchemeKind::BchModelScrambled,
        SchemeKind::LdpcSystematic,
        SchemeKind::LdpcScrambled,
        SchemeKind::LdpcPunctured,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::UnitaryScrambled => "unitary-scrambled",
            SchemeKind::BchModelScrambled => "bch-model-scrambled",
            SchemeKind::LdpcSystematic => "ldpc-systematic",
            SchemeKind::LdpcScrambled => "ldpc-scrambled",
            SchemeKind::LdpcPunctured => "ldpc-punctured",
        }
    }

    pub fn is_ldpc(self) -> bool {
        matches!(
            self,
            SchemeKind::LdpcSystematic | SchemeKind::LdpcScrambled | SchemeKind::LdpcPunctured
        )
    }

    pub fn is_scrambled(self) -> bool {
        matches!(
            self,
            SchemeKind::UnitaryScrambled | SchemeKind::BchModelScrambled | SchemeKind::LdpcScrambled
        )
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SimError::InvalidConfig(format!("unknown scheme `{s}`")))
    }
}

/// Which code a scheme runs on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CodeChoice {
    Block(CodeSpec),
    Ldpc(LdpcPreset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            max_frames: DEFAULT_MAX_FRAMES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Row label in the CSV; defaults to the scheme name.
    pub label: String,
    pub scheme: SchemeKind,
    pub code: CodeChoice,
    /// `None` for the systematic and punctured schemes.
    pub scrambler: Option<ScramblerKind>,
    pub grid: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    /// Symbol-referenced noise so that every codeword sees the same error pattern.
    pub common_random_numbers: bool,
    pub max_iterations: usize,
    pub check_rule: CheckRule,
}

impl SimConfig {
    pub fn new(scheme: SchemeKind, code: CodeChoice, scrambler: Option<ScramblerKind>) -> Self {
        SimConfig {
            label: scheme.name().to_string(),
            scheme,
            code,
            scrambler,
            grid: Vec::new(),
            stop: StopRule::default(),
            seed: 0,
            common_random_numbers: false,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            check_rule: CheckRule::default(),
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_stop(mut self, min_frame_errors: u64, max_frames: u64) -> Self {
        self.stop = StopRule {
            min_frame_errors,
            max_frames,
        };
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Full check of a sweep configuration.
    pub fn validate(&self) -> Result<(), SimError> {
        self.validate_setup()?;
        if self.grid.is_empty() {
            return Err(SimError::InvalidConfig("Eb/N0 grid is empty".into()));
        }
        if let Some(x) = self.grid.iter().find(|x| !x.is_finite()) {
            return Err(SimError::InvalidConfig(format!("grid value {x} is not finite")));
        }
        Ok(())
    }

    /// Everything except the grid; enough to build a [`Simulator`].
    fn validate_setup(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.stop.min_frame_errors < 1 {
            return bad("min_frame_errors must be at least 1".into());
        }
        if self.stop.max_frames < 1 {
            return bad("max_frames must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        if self.label.is_empty() || self.label.contains([',', '\n', '#']) {
            return bad(format!("label `{}` must be non-empty without commas or `#`", self.label));
        }
        match (self.scheme, self.code) {
            (SchemeKind::UnitaryScrambled, CodeChoice::Block(CodeSpec::Unitary { .. })) => {}
            (SchemeKind::BchModelScrambled, CodeChoice::Block(CodeSpec::BoundedDistance { .. })) => {}
            (SchemeKind::LdpcPunctured, CodeChoice::Ldpc(p)) if !p.is_mother() => {
                return bad(format!("ldpc-punctured needs a mother-code preset, got `{}`", p.name()));
            }
            (SchemeKind::LdpcSystematic | SchemeKind::LdpcScrambled, CodeChoice::Ldpc(p))
                if p.is_mother() =>
            {
                return bad(format!("{} needs an unpunctured preset, got `{}`", self.scheme, p.name()));
            }
            (s, CodeChoice::Ldpc(_)) if s.is_ldpc() => {}
            (s, c) => return bad(format!("scheme {s} cannot run on {c:?}")),
        }
        if let CodeChoice::Block(spec) = self.code {
            spec.validate()?;
        }
        match (self.scheme.is_scrambled(), self.scrambler) {
            (true, None) => bad(format!("scheme {} needs a scrambler", self.scheme)),
            (false, Some(_)) => bad(format!("scheme {} takes no scrambler", self.scheme)),
            (true, Some(ScramblerKind::PerfectModel)) if self.scheme.is_ldpc() => {
                bad("the perfect-scrambling model is only simulated for unitary and bch-model".into())
            }
            _ => Ok(()),
        }
    }

    /// Canonical description of everything that affects the counts.
    pub fn canonical(&self) -> String {
        format!(
            "label={};scheme={};code={:?};scrambler={:?};grid={:?};stop={:?};seed={};crn={};iters={};rule={:?}",
            self.label,
            self.scheme,
            self.code,
            self.scrambler,
            self.grid,
            self.stop,
            self.seed,
            self.common_random_numbers,
            self.max_iterations,
            self.check_rule
        )
    }

    /// FNV-1a over [`SimConfig::canonical`]; stored in checkpoints.
    pub fn hash(&self) -> u64 {
        self.canonical().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        })
    }
}

/// Counts at one Eb/N0 value.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    /// Message-bit errors after descrambling.
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Message-position errors before descrambling.
    pub pre_bit_errors: u64,
    pub k: usize,
    pub wall_seconds: f64,
    pub low_confidence: bool,
}

impl SimPoint {
    pub fn ber(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.bit_errors as f64 / (self.frames as f64 * self.k as f64)
        }
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.frame_errors as f64 / self.frames as f64
        }
    }

    pub fn pre_ber(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.pre_bit_errors as f64 / (self.frames as f64 * self.k as f64)
        }
    }

    pub fn csv_row(&self, label: &str) -> String {
        format!(
            "{label},{},{},{},{},{:.6e},{:.6e}",
            self.ebn0_db,
            self.frames,
            self.bit_errors,
            self.frame_errors,
            self.ber(),
            self.fer()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub label: String,
    pub points: Vec<SimPoint>,
}

impl SimResult {
    /// CSV body (header plus rows), low-confidence rows followed by a comment.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for p in &self.points {
            s.push_str(&p.csv_row(&self.label));
            s.push('\n');
            if p.low_confidence {
                s.push_str(&format!("{LOW_CONFIDENCE_TAG} {} dB\n", p.ebn0_db));
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    pub pre_bit_errors: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    pre_bit_errors: u64,
}

impl Counts {
    fn add(mut self, o: Counts) -> Counts {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_errors;
        self.pre_bit_errors += o.pre_bit_errors;
        self
    }
}

enum Engine {
    Unitary,
    Bch {
        generator: SystematicGenerator,
        t: usize,
    },
    Ldpc {
        code: LdpcCode,
        decoder: SumProductDecoder,
        puncture: PunctureSet,
    },
}

/// A configured scheme ready to run frames.
pub struct Simulator {
    cfg: SimConfig,
    engine: Engine,
    scrambler: Option<ScramblerPair>,
    k: usize,
    n: usize,
    rate: f64,
}

/// Stream offsets so that construction randomness never overlaps trial streams.
const SCRAMBLER_SEED_SALT: u64 = 0x5c4a_3b1e_0000_0001;
const GENERATOR_SEED_SALT: u64 = 0x6e2d_9f70_0000_0002;

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self, SimError> {
        cfg.validate_setup()?;
        let (engine, k, n, transmitted) = match cfg.code {
            CodeChoice::Block(CodeSpec::Unitary { k }) => (Engine::Unitary, k, k, k),
            CodeChoice::Block(CodeSpec::BoundedDistance { n, k, t }) => (
                Engine::Bch {
                    generator: SystematicGenerator::random(n, k, cfg.seed ^ GENERATOR_SEED_SALT)?,
                    t,
                },
                k,
                n,
                n,
            ),
            CodeChoice::Ldpc(preset) => {
                let code = preset.build()?;
                let puncture = if cfg.scheme == SchemeKind::LdpcPunctured {
                    PunctureSet::first(code.n(), code.k())?
                } else {
                    PunctureSet::none(code.n())
                };
                let decoder = SumProductDecoder::with_rule(code.graph(), cfg.check_rule);
                let (k, n, tx) = (code.k(), code.n(), puncture.transmitted_len());
                (
                    Engine::Ldpc {
                        code,
                        decoder,
                        puncture,
                    },
                    k,
                    n,
                    tx,
                )
            }
        };
        let scrambler = match cfg.scrambler {
            None | Some(ScramblerKind::PerfectModel) => None,
            Some(kind) => Some(ScramblerPair::generate(&ScramblerSpec::new(
                kind,
                k,
                cfg.seed ^ SCRAMBLER_SEED_SALT,
            ))?),
        };
        Ok(Simulator {
            cfg: cfg.clone(),
            engine,
            scrambler,
            k,
            n,
            rate: k as f64 / transmitted as f64,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Information bits per transmitted channel symbol.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn scrambler(&self) -> Option<&ScramblerPair> {
        self.scrambler.as_ref()
    }

    fn perfect(&self) -> bool {
        self.cfg.scrambler == Some(ScramblerKind::PerfectModel)
    }

    /// One end-to-end frame. The trial's draws are: message bits, channel
    /// noise, then (perfect model only) the randomizing bits.
    pub fn run_frame(&self, params: &ChannelParams, trial: u64) -> Result<FrameOutcome, SimError> {
        let mut rng = trial_rng(self.cfg.seed, trial);
        let u = BitVector::random(self.k, &mut rng);
        let x = match &self.scrambler {
            Some(s) => s.scramble(&u)?,
            None => u.clone(),
        };
        let noisy = |c: &BitVector, rng: &mut _| {
            let symbols = modulate(c);
            if self.cfg.common_random_numbers {
                add_symbol_relative_noise(&symbols, params, rng)
            } else {
                add_noise(&symbols, params, rng)
            }
        };
        let (x_hat, frame_error) = match &self.engine {
            Engine::Unitary => {
                let r = hard_decision(&noisy(&x, &mut rng));
                let fe = r != x;
                (r, fe)
            }
            Engine::Bch { generator, t } => {
                let c = generator.encode(&x)?;
                let r = hard_decision(&noisy(&c, &mut rng));
                let out = bounded_distance_decode(&r, &c, *t)?;
                (out.decoded.slice(0, self.k), out.frame_error)
            }
            Engine::Ldpc {
                code,
                decoder,
                puncture,
            } => {
                let c = code.encode(&x)?;
                let y = noisy(&puncture.puncture(&c)?, &mut rng);
                let llr: Vec<f64> = y.iter().map(|&v| params.llr(v)).collect();
                let out = decoder.decode(&puncture.depuncture(&llr)?, self.cfg.max_iterations)?;
                let x_hat = out.hard.slice(0, self.k);
                let fe = x_hat != x;
                (x_hat, fe)
            }
        };
        let pre_bit_errors = x_hat.distance(&x)? as u64;
        let bit_errors = if !frame_error && pre_bit_errors == 0 {
            0
        } else if self.perfect() {
            if frame_error {
                BitVector::random(self.k, &mut rng).weight() as u64
            } else {
                pre_bit_errors
            }
        } else {
            match &self.scrambler {
                Some(s) => s.descramble(&x_hat)?.distance(&u)? as u64,
                None => pre_bit_errors,
            }
        };
        Ok(FrameOutcome {
            bit_errors,
            frame_error: frame_error || bit_errors > 0,
            pre_bit_errors,
        })
    }

    fn run_batch(&self, params: &ChannelParams, start: u64, len: u64) -> Result<Counts, SimError> {
        (start..start + len)
            .into_par_iter()
            .map(|trial| {
                self.run_frame(params, trial).map(|o| Counts {
                    frames: 1,
                    bit_errors: o.bit_errors,
                    frame_errors: o.frame_error as u64,
                    pre_bit_errors: o.pre_bit_errors,
                })
            })
            .try_reduce(Counts::default, |a, b| Ok(a.add(b)))
    }

    /// Runs frames until the configured stop rule fires.
    pub fn run_point(&self, ebn0_db: f64) -> Result<SimPoint, SimError> {
        self.run_point_with(ebn0_db, self.cfg.stop)
    }

    /// Same as [`Simulator::run_point`] with a different stop rule.
    pub fn run_point_with(&self, ebn0_db: f64, stop: StopRule) -> Result<SimPoint, SimError> {
        let params = ChannelParams::new(ebn0_db, self.rate)?;
        let started = Instant::now();
        let mut total = Counts::default();
        let mut batch = FIRST_BATCH;
        while total.frame_errors < stop.min_frame_errors && total.frames < stop.max_frames {
            let len = batch.min(stop.max_frames - total.frames);
            total = total.add(self.run_batch(&params, total.frames, len)?);
            batch = (batch * 2).min(LAST_BATCH);
        }
        Ok(SimPoint {
            ebn0_db,
            frames: total.frames,
            bit_errors: total.bit_errors,
            frame_errors: total.frame_errors,
            pre_bit_errors: total.pre_bit_errors,
            k: self.k,
            wall_seconds: started.elapsed().as_secs_f64(),
            low_confidence: total.frame_errors < stop.min_frame_errors,
        })
    }
}

/// Convenience wrapper building a [`Simulator`] for a single point.
pub fn run_point(cfg: &SimConfig, ebn0_db: f64) -> Result<SimPoint, SimError> {
    Simulator::new(cfg)?.run_point(ebn0_db)
}

/// Checkpoint location and the comment lines written above the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub path: PathBuf,
    pub preamble: Vec<String>,
    pub resume: bool,
}

/// Runs the whole grid in order. With a checkpoint, the file is rewritten after
/// every point; on resume, rows already present are reused when the stored
/// config hash matches.
pub fn run_sweep(cfg: &SimConfig, checkpoint: Option<&Checkpoint>) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let sim = Simulator::new(cfg)?;
    let mut result = SimResult {
        label: cfg.label.clone(),
        points: Vec::new(),
    };
    if let Some(cp) = checkpoint {
        if cp.resume && cp.path.exists() {
            result.points = load_checkpoint(&cp.path, cfg, sim.k())?;
        }
    }
    for &db in cfg.grid.iter().skip(result.points.len()) {
        result.points.push(sim.run_point(db)?);
        if let Some(cp) = checkpoint {
            write_checkpoint(cp, cfg, &result)?;
        }
    }
    if let Some(cp) = checkpoint {
        write_checkpoint(cp, cfg, &result)?;
    }
    Ok(result)
}

fn config_hash_line(cfg: &SimConfig) -> String {
    format!("# config_hash={:016x}", cfg.hash())
}

fn write_checkpoint(cp: &Checkpoint, cfg: &SimConfig, result: &SimResult) -> Result<(), SimError> {
    let mut body = String::new();
    for line in &cp.preamble {
        body.push_str(line);
        body.push('\n');
    }
    body.push_str(&config_hash_line(cfg));
    body.push('\n');
    body.push_str(&result.to_csv());
    let tmp = cp.path.with_extension("partial");
    let fail = |e: std::io::Error| SimError::Checkpoint {
        path: cp.path.clone(),
        reason: e.to_string(),
        last_completed: result.points.last().map(|p| p.ebn0_db),
    };
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    f.write_all(body.as_bytes()).map_err(fail)?;
    f.sync_all().map_err(fail)?;
    fs::rename(&tmp, &cp.path).map_err(fail)
}

fn load_checkpoint(path: &Path, cfg: &SimConfig, k: usize) -> Result<Vec<SimPoint>, SimError> {
    let refuse = |reason: String| SimError::Resume {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| refuse(e.to_string()))?;
    let expected = config_hash_line(cfg);
    let found = text.lines().find(|l| l.starts_with("# config_hash="));
    match found {
        Some(l) if l.trim() == expected => {}
        Some(l) => {
            return Err(refuse(format!(
                "config hash mismatch: file has `{}`, current config is `{expected}`",
                l.trim()
            )))
        }
        None => return Err(refuse("no config hash line".into())),
    }
    let rows = parse_csv(&text).map_err(|e| refuse(e.to_string()))?;
    let mut points = Vec::new();
    for (row, &db) in rows.iter().zip(&cfg.grid) {
        if row.ebn0_db != db || row.label != cfg.label {
            return Err(refuse(format!(
                "row for {} dB ({}) does not match grid value {db} dB",
                row.ebn0_db, row.label
            )));
        }
        points.push(SimPoint {
            ebn0_db: db,
            frames: row.frames,
            bit_errors: row.bit_errors,
            frame_errors: row.frame_errors,
            pre_bit_errors: 0,
            k,
            wall_seconds: 0.0,
            low_confidence: row.frame_errors < cfg.stop.min_frame_errors,
        });
    }
    if rows.len() > cfg.grid.len() {
        return Err(refuse("file has more rows than the grid".into()));
    }
    Ok(points)
}

/// One parsed row of a simulation CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub label: String,
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {reason}")]
pub struct CsvError {
    pub line: usize,
    pub reason: String,
}

/// Parses simulation CSV text; `#` lines and blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, CsvError> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: String| CsvError { line: i + 1, reason };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(err(format!("expected header `{CSV_HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", f.len())));
        }
        let num = |idx: usize| -> Result<f64, CsvError> {
            f[idx]
                .parse::<f64>()
                .map_err(|_| err(format!("field {} `{}` is not a number", idx + 1, f[idx])))
        };
        let int = |idx: usize| -> Result<u64, CsvError> {
            f[idx]
                .parse::<u64>()
                .map_err(|_| err(format!("field {} `{}` is not a count", idx + 1, f[idx])))
        };
        rows.push(CsvRow {
            label: f[0].to_string(),
            ebn0_db: num(1)?,
            frames: int(2)?,
            bit_errors: int(3)?,
            frame_errors: int(4)?,
            ber: num(5)?,
            fer: num(6)?,
        });
    }
    if !seen_header {
        return Err(CsvError {
            line: 0,
            reason: "missing CSV header".into(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn bch_cfg() -> SimConfig {
        SimConfig::new(
            SchemeKind::BchModelScrambled,
            CodeChoice::Block(CodeSpec::BCH_2047),
            Some(ScramblerKind::Regular { w: 21 }),
        )
        .with_grid(vec![4.0])
        .with_stop(20, 2000)
        .with_seed(11)
    }

    #[test]
    fn validation_rejects_bad_combinations() {
        let ok = bch_cfg();
        assert!(ok.validate().is_ok());
        assert!(ok.clone().with_grid(vec![]).validate().is_err());
        assert!(ok.clone().with_stop(0, 10).validate().is_err());
        let mut no_scr = ok.clone();
        no_scr.scrambler = None;
        assert!(no_scr.validate().is_err());
        let punct_with_scr = SimConfig::new(
            SchemeKind::LdpcPunctured,
            CodeChoice::Ldpc(LdpcPreset::DeskMother),
            Some(ScramblerKind::Dense { density: 0.5 }),
        )
        .with_grid(vec![1.0]);
        assert!(punct_with_scr.validate().is_err());
        let punct_on_desk = SimConfig::new(
            SchemeKind::LdpcPunctured,
            CodeChoice::Ldpc(LdpcPreset::Desk),
            None,
        )
        .with_grid(vec![1.0]);
        assert!(punct_on_desk.validate().is_err());
        let wrong_code = SimConfig::new(
            SchemeKind::UnitaryScrambled,
            CodeChoice::Block(CodeSpec::BCH_2047),
            Some(ScramblerKind::PerfectModel),
        )
        .with_grid(vec![1.0]);
        assert!(wrong_code.validate().is_err());
    }

    #[test]
    fn noiseless_frames_are_error_free() {
        let cfgs = [
            bch_cfg(),
            SimConfig::new(
                SchemeKind::UnitaryScrambled,
                CodeChoice::Block(CodeSpec::Unitary { k: 64 }),
                Some(ScramblerKind::Dense { density: 0.5 }),
            ),
            SimConfig::new(SchemeKind::LdpcSystematic, CodeChoice::Ldpc(LdpcPreset::Desk), None),
        ];
        for cfg in cfgs {
            let cfg = cfg.with_grid(vec![40.0]).with_stop(1, 50);
            let p = run_point(&cfg, 40.0).unwrap();
            assert_eq!((p.bit_errors, p.frame_errors), (0, 0), "{}", cfg.scheme);
            assert_eq!(p.frames, 50);
            assert!(p.low_confidence);
        }
    }

    #[test]
    fn counts_independent_of_thread_count() {
        let cfg = bch_cfg();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| run_point(&cfg, 4.0)).unwrap();
        let b = three.install(|| run_point(&cfg, 4.0)).unwrap();
        assert_eq!(
            (a.frames, a.bit_errors, a.frame_errors, a.pre_bit_errors),
            (b.frames, b.bit_errors, b.frame_errors, b.pre_bit_errors)
        );
    }

    #[test]
    fn stop_rule_batches() {
        // stops at the first batch boundary after 20 frame errors
        let p = run_point(&bch_cfg(), 3.0).unwrap();
        assert!(p.frame_errors >= 20);
        assert!([16, 48, 112, 240, 496, 1008, 2000].contains(&p.frames), "{}", p.frames);
        assert!(p.frame_errors >= 1 || p.bit_errors == 0);
    }

    #[test]
    fn common_random_numbers_fix_frame_errors() {
        let base = bch_cfg().with_stop(1_000_000, 400);
        let mut sys = base.clone();
        sys.scrambler = Some(ScramblerKind::Identity);
        let mut dense = base.clone();
        dense.scrambler = Some(ScramblerKind::Dense { density: 0.5 });
        for c in [&mut sys, &mut dense] {
            c.common_random_numbers = true;
        }
        let a = run_point(&sys, 4.2).unwrap();
        let b = run_point(&dense, 4.2).unwrap();
        assert!(a.frame_errors > 0);
        assert_eq!(a.frame_errors, b.frame_errors);
        assert_eq!(a.pre_bit_errors, b.pre_bit_errors);
        assert!(b.bit_errors > a.bit_errors);
    }

    #[test]
    fn unitary_perfect_model_tracks_half_fer() {
        let k = 64;
        let cfg = SimConfig::new(
            SchemeKind::UnitaryScrambled,
            CodeChoice::Block(CodeSpec::Unitary { k }),
            Some(ScramblerKind::PerfectModel),
        )
        .with_grid(vec![5.0])
        .with_stop(1_000_000, 20_000)
        .with_seed(3);
        let p = run_point(&cfg, 5.0).unwrap();
        let expected = analytic::unitary_perfect_scrambling(5.0, k).p_e;
        let se = (p.fer() * (1.0 - p.fer()) / p.frames as f64).sqrt() / 2.0
            + (0.25 / (p.frames as f64 * k as f64)).sqrt();
        assert!((p.ber() - expected).abs() < 4.0 * se, "{} vs {expected}", p.ber());
    }

    #[test]
    fn csv_roundtrip_and_low_confidence_comment() {
        let cfg = bch_cfg().with_stop(1_000_000, 16);
        let res = run_sweep(&cfg.with_grid(vec![4.0, 5.0]), None).unwrap();
        let csv = res.to_csv();
        assert!(csv.contains(LOW_CONFIDENCE_TAG));
        let rows = parse_csv(&csv).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].frames, 16);
        assert_eq!(rows[1].ebn0_db, 5.0);
        assert!(parse_csv("scheme,ebn0_db\n").is_err());
        let err = parse_csv(&format!("{CSV_HEADER}\nx,1,2,3\n")).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn resume_reuses_rows_and_refuses_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sim.csv");
        let cfg = bch_cfg().with_grid(vec![3.8, 4.0, 4.2]);
        let cp = Checkpoint {
            path: path.clone(),
            preamble: vec!["# test".into()],
            resume: true,
        };
        let full = run_sweep(&cfg, Some(&cp)).unwrap();
        let first = fs::read_to_string(&path).unwrap();

        // drop the last row and resume
        let truncated: Vec<&str> = first.lines().filter(|l| !l.contains(",4.2,")).collect();
        fs::write(&path, truncated.join("\n")).unwrap();
        let resumed = run_sweep(&cfg, Some(&cp)).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
        assert_eq!(resumed.points.len(), 3);
        assert_eq!(resumed.points[2].bit_errors, full.points[2].bit_errors);

        let other = cfg.clone().with_seed(12);
        assert!(matches!(run_sweep(&other, Some(&cp)), Err(SimError::Resume { .. })));
    }
}
