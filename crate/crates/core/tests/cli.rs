use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use wiretap::cli::TIMESTAMP_PREFIX;

const SIMULATE_UNITARY: &str = "\
[simulate]
scheme = unitary-scrambled
k = 64
scrambler = regular 5
grid = 0:4:2
min_frame_errors = 20
seed = 17
";

const SIMULATE_LDPC: &str = "\
[simulate]
scheme = ldpc-systematic
preset = desk
grid = 1.5, 2
min_frame_errors = 5
max_frames = 300
";

const ANALYTIC: &str = "\
[analytic]
scheme = bch_model
n = 2047
k = 1354
t = 69
w = none, 1, 20, perfect
grid = 3:6:0.5
";

const GAP: &str = "\
[gap]
pe_b = 1e-5
pe_e = 0.4

[curve]
name = bch_perfect
source = analytic
scheme = bch_model
n = 2047
k = 1354
t = 69
scrambling = perfect

[curve]
name = uncoded
source = analytic
scheme = unitary
k = 1576
scrambling = none
";

const BER_VS_GAP: &str = "\
[ber-vs-gap]
pe_b = 1e-5
gaps = 0:6:1

[curve]
name = unitary_perfect
source = analytic
scheme = unitary
k = 1576
scrambling = perfect
";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_wiretap"))
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn stable(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
        .collect::<Vec<_>>()
        .join("\n")
}

fn assert_repeatable(cmd: &str, config_text: &str, extra: &[&str], other_extra: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "run.cfg", config_text);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(run(cmd, &config, &a, extra), 0);
    assert_eq!(run(cmd, &config, &b, other_extra), 0);
    let text = stable(&a);
    assert_eq!(text, stable(&b), "{cmd}");
    text
}

#[test]
fn analytic_is_repeatable() {
    let text = assert_repeatable("analytic", ANALYTIC, &[], &[]);
    assert!(text.contains("scheme,ebn0_db,ber,fer"));
    assert_eq!(text.lines().filter(|l| l.starts_with("bch_model_")).count(), 4 * 7);
}

#[test]
fn simulate_is_repeatable_across_thread_counts() {
    let text = assert_repeatable("simulate", SIMULATE_UNITARY, &["--parallel", "1"], &["--parallel", "3"]);
    assert!(text.contains("# wiretap simulate seed=17"));
    assert_eq!(text.lines().filter(|l| l.starts_with("unitary-scrambled,")).count(), 3);
    let ldpc = assert_repeatable("simulate", SIMULATE_LDPC, &["--seed", "4"], &["--seed", "4", "--parallel", "2"]);
    assert_eq!(ldpc.lines().filter(|l| l.starts_with("ldpc-systematic,")).count(), 2);
}

#[test]
fn seed_changes_simulation_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "run.cfg", SIMULATE_UNITARY);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(run("simulate", &config, &a, &["--seed", "1"]), 0);
    assert_eq!(run("simulate", &config, &b, &["--seed", "2"]), 0);
    assert_ne!(stable(&a), stable(&b));
}

#[test]
fn gap_and_ber_vs_gap_are_repeatable() {
    let gap = assert_repeatable("gap", GAP, &[], &[]);
    let row = gap.lines().find(|l| l.starts_with("bch_perfect,")).unwrap();
    let value: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 1.3).abs() < 0.2);
    let bvg = assert_repeatable("ber-vs-gap", BER_VS_GAP, &[], &[]);
    assert_eq!(bvg.lines().filter(|l| l.starts_with("unitary_perfect,")).count(), 7);
}

#[test]
fn gap_reads_simulated_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sim_cfg = write(dir.path(), "sim.cfg", &SIMULATE_UNITARY.replace("grid = 0:4:2", "grid = -6:10:1"));
    let sim_out = dir.path().join("sim.csv");
    assert_eq!(run("simulate", &sim_cfg, &sim_out, &[]), 0);
    let gap_cfg = write(
        dir.path(),
        "gap.cfg",
        "[gap]\npe_b = 1e-2\npe_e = 0.3\n\n[curve]\nname = sim\nsource = csv\npath = sim.csv\nlabel = unitary-scrambled\n",
    );
    let out = dir.path().join("gap.csv");
    assert_eq!(run("gap", &gap_cfg, &out, &[]), 0);
    let text = stable(&out);
    let row = text.lines().find(|l| l.starts_with("sim,")).unwrap();
    let gap: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(gap.is_finite() && gap > 0.0, "{row}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let bad = write(dir.path(), "bad.cfg", "[analytic]\nscheme = unitary\nk = 8\nw = 1\ngrid = 0:1:0.5\nextra = 2\n");
    assert_eq!(run("analytic", &bad, &out, &[]), 1);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(run("analytic", &missing, &out, &[]), 3);
    let even = write(dir.path(), "even.cfg", &SIMULATE_UNITARY.replace("regular 5", "regular 4"));
    assert_eq!(run("simulate", &even, &out, &[]), 2);
    let status = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_wiretap")).args(args).output().unwrap().status.code().unwrap()
    };
    assert_eq!(status(&["teleport"]), 1);
    assert_eq!(status(&["--help"]), 0);
    assert_eq!(status(&["analytic", "--config", bad.to_str().unwrap(), "--parallel", "0"]), 1);
}
