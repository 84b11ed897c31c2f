use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::Command;

use spin2_gs::{total_energy, ModelParams, PotentialSpec};
use spin2gs_cli::{read_field, run_gs, run_sweep, RunConfig, RunSummary, SweepConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spin2gs"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn summary(dir: &Path) -> RunSummary {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn coarse(body: &str) -> RunConfig {
    RunConfig::from_toml(&format!("{body}\n[grid]\nh = 0.125\n")).unwrap()
}

#[test]
fn field_round_trip_reproduces_energy() {
    for m in [0.5, -0.5] {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = coarse(&format!("[model]\nbeta1 = 1\nbeta2 = -2\nm = {m}\n"));
        let out = run_gs(&cfg, tmp.path(), false).unwrap();
        assert!(out.summary.converged);
        let phi = read_field(BufReader::new(fs::File::open(tmp.path().join("field.tsv")).unwrap())).unwrap();
        assert_eq!(phi.grid().len(), 161);
        let p = ModelParams::new(100.0, 1.0, -2.0, 0.5, PotentialSpec::harmonic()).unwrap();
        let e = total_energy(&phi, &p);
        assert!((e - out.summary.energy).abs() <= 1e-12, "{e} vs {}", out.summary.energy);
        // mirrored runs report the requested sign of M
        let c = out.summary.masses.components;
        if m < 0.0 {
            assert!((out.summary.masses.magnetization + 0.5).abs() < 1e-12);
            assert!((c[4] - 0.625).abs() < 1e-9 && (c[0] - 0.375).abs() < 1e-9, "{c:?}");
        } else {
            assert!((c[0] - 0.625).abs() < 1e-9, "{c:?}");
        }
    }
}

#[test]
fn two_dimensional_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml(
        "[model]\nbeta1 = 10\nbeta2 = 2\nm = 0.5\npotential = { kind = \"box\" }\n[grid]\ndim = 2\nh = 1.0\n[stepper]\nmax_iter = 40\n",
    )
    .unwrap();
    let out = run_gs(&cfg, tmp.path(), false).unwrap();
    let phi = read_field(BufReader::new(fs::File::open(tmp.path().join("field.tsv")).unwrap())).unwrap();
    assert_eq!(phi.grid(), &cfg.resolve().unwrap().grid);
    let e = total_energy(&phi, &cfg.resolve().unwrap().params);
    assert!((e - out.summary.energy).abs() <= 1e-12);
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = coarse("[model]\nbeta1 = -1\nbeta2 = 2\nm = 0.3\n[initial]\nkind = \"random\"\nseed = 99\n[stepper]\nmax_iter = 300\n");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_gs(&cfg, a.path(), false).unwrap();
    run_gs(&cfg, b.path(), false).unwrap();
    for f in ["summary.json", "field.tsv", "diagnostics.tsv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_eq!(summary(a.path()).seed, Some(99));
}

#[test]
fn dry_run_echoes_initial_masses() {
    let tmp = tempfile::tempdir().unwrap();
    let cfgfile = tmp.path().join("c.toml");
    fs::write(&cfgfile, "[model]\nbeta1 = -1\nbeta2 = 2\nm = 0.5\n").unwrap();
    let st = bin()
        .args(["gs", "--dry-run", "-c"])
        .arg(&cfgfile)
        .arg("-o")
        .arg(tmp.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let s = summary(&tmp.path().join("o"));
    assert!(s.dry_run && s.iterations == 0);
    assert!((s.masses.total - 1.0).abs() < 1e-12 && (s.masses.magnetization - 0.5).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = tmp.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    let run = |args: &[&str], cfg: &Path| {
        bin().args(args).arg("-c").arg(cfg).arg("-o").arg(tmp.path().join("o")).status().unwrap().code()
    };
    let empty = write("empty.toml", "[model]\nbeta1 = -1\nbeta2 = 2\n[sweep]\nparameter = \"m\"\nvalues = []\n");
    assert_eq!(run(&["sweep"], &empty), Some(2));
    assert_eq!(run(&["gs"], &tmp.path().join("missing.toml")), Some(2));
    let bad = write("bad.toml", "[model]\nbeta1 = -1\nbeta2 = 2\nm = 3\n");
    assert_eq!(run(&["gs"], &bad), Some(2));

    let short = write("short.toml", "[model]\nbeta1 = 1\nbeta2 = -2\nm = 0.5\n[grid]\nh = 0.125\n[stepper]\nmax_iter = 5\n");
    assert_eq!(run(&["gs"], &short), Some(3));
    let s = summary(&tmp.path().join("o"));
    assert!(!s.converged && s.iterations == 5);
    assert!(tmp.path().join("o/field.tsv").exists());

    // only the l = 0 component is occupied, so M = 0.5 cannot be reached
    let stuck = write(
        "stuck.toml",
        "[model]\nbeta1 = 1\nbeta2 = -2\nm = 0.5\n[initial]\nkind = \"vector\"\nxi = [0, 0, 1, 0, 0]\n",
    );
    assert_eq!(run(&["gs"], &stuck), Some(4));
}

fn uniform(args: &[&str]) -> (i32, String) {
    let out = bin().arg("uniform").args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn value(report: &str, key: &str) -> Vec<String> {
    report
        .lines()
        .filter_map(|l| l.strip_prefix(&format!("{key}\t")))
        .map(str::to_string)
        .collect()
}

#[test]
fn uniform_reports() {
    let (code, r) = uniform(&["--beta1", "-1", "--beta2", "2", "-m", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r, "phase"), ["ferromagnetic"]);
    let tau: f64 = value(&r, "tau_g")[0].parse().unwrap();
    assert!((tau - 3.75f64.sqrt()).abs() < 1e-15);
    let e: f64 = value(&r, "energy_uniform")[0].parse().unwrap();
    let b: f64 = value(&r, "beta_of_m")[0].parse().unwrap();
    assert!((e - b).abs() < 1e-12 && (b - 48.0).abs() < 1e-12);

    let (_, r) = uniform(&["--beta1", "1", "--beta2", "20", "-m", "0"]);
    assert_eq!(value(&r, "phase"), ["cyclic"]);
    assert_eq!(value(&r, "tau_g")[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(value(&r, "delta_g")[0].parse::<f64>().unwrap(), 0.0);

    let (code, r) = uniform(&["--beta1", "0", "--beta2", "1", "-m", "0.8"]);
    assert_eq!(code, 0);
    assert!(value(&r, "phase")[0].starts_with("boundary"));
    let fams = value(&r, "family");
    assert_eq!(fams.len(), 2);
    assert!(fams[0].ends_with("ferromagnetic") && fams[1].ends_with("cyclic"), "{fams:?}");
    let es: Vec<f64> = value(&r, "energy_uniform").iter().map(|s| s.parse().unwrap()).collect();
    assert!((es[0] - es[1]).abs() < 1e-12);

    // negative M mirrors the five-vector
    let (_, pos) = uniform(&["--beta1", "1", "--beta2", "-2", "-m", "0.5"]);
    let (_, neg) = uniform(&["--beta1", "1", "--beta2", "-2", "-m", "-0.5"]);
    let mut a: Vec<String> = value(&pos, "xi_g")[0].split('\t').map(str::to_string).collect();
    a.reverse();
    assert_eq!(a.join("\t"), value(&neg, "xi_g")[0]);

    let (code, _) = uniform(&["--beta1", "10", "--beta2", "2", "-m", "0.5", "--family", "nematic"]);
    assert_eq!(code, 2);
    let (code, r) = uniform(&["--beta1", "10", "--beta2", "2", "-m", "0.5", "--family", "cyclic-theta", "--theta", "0.3"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r, "family").len(), 1);
}

#[test]
fn landscape_argmin_matches_analysis() {
    for (b1, b2) in [("-1", "20"), ("1", "-20"), ("1", "20")] {
        let out = bin()
            .args(["landscape", "--beta1", b1, "--beta2", b2, "-m", "0", "--resolution", "41"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let row = |tag: &str| -> Vec<f64> {
            let l = text.lines().find(|l| l.starts_with(tag)).unwrap();
            l.split('\t').skip(1).take(3).map(|s| s.parse().unwrap()).collect()
        };
        let (grid, exact) = (row("# argmin"), row("# minimum"));
        for k in 0..3 {
            assert!((grid[k] - exact[k]).abs() < 1e-12, "{b1},{b2}: {grid:?} vs {exact:?}");
        }
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 41 * 41);
    }
}

#[test]
fn shipped_configs_resolve() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = RunConfig::load(&path).unwrap();
            cfg.resolve().unwrap();
            if cfg.sweep.is_some() {
                SweepConfig::from_run(cfg).unwrap();
            }
            n += 1;
        }
    }
    assert!(n >= 20);
}

#[test]
fn nematic_row_energy() {
    let cfg = RunConfig::load(&configs_dir().join("line_nematic_m0.5.toml")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let out = run_gs(&cfg, tmp.path(), false).unwrap();
    assert!(out.summary.converged);
    assert!((out.summary.energy - 8.5003).abs() < 1e-3, "{}", out.summary.energy);
    assert_eq!(out.summary.phase.label, "nematic");
}

#[test]
fn ferromagnetic_sweep_over_m() {
    let cfg = SweepConfig::from_run(RunConfig::load(&configs_dir().join("sweep_ferro_m.toml")).unwrap()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let res = run_sweep(&cfg, tmp.path(), 2, false).unwrap();
    assert_eq!(res.len(), 3);
    for r in &res {
        let s = &r.as_ref().unwrap().summary;
        assert!(s.converged);
        assert!((s.energy - 8.2820).abs() < 1e-3, "{}", s.energy);
    }
    let table = fs::read_to_string(tmp.path().join("sweep.tsv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.starts_with("m\tenergy"));
    for k in 0..3 {
        assert!(tmp.path().join(format!("run_{k}/summary.json")).exists());
    }
}
