//! The four subcommands, as library calls.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use spin2_gs::energy::masses;
use spin2_gs::sma::SMA_DEFAULT_TOL;
use spin2_gs::uniform::{beta_of_m, classify, landscape_grid, minimize_landscape, MinimizerSet};
use spin2_gs::{
    build_initial_data, ground_xi, sma_validity, ClosedForm, GroundState, Phase, SpinorField, StepRecord, Stepper,
    ELLS,
};

use crate::config::{FamilySpec, ResolvedRun, RunConfig, SweepConfig};
use crate::output::{
    diagnostics_row, write_field, MassReport, PhaseReport, RunSummary, SmaSummary, DIAGNOSTICS_HEADER,
};
use crate::CliError;

pub const FIELD_FILE: &str = "field.tsv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.tsv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LANDSCAPE_FILE: &str = "landscape.tsv";
pub const SWEEP_FILE: &str = "sweep.tsv";

/// Summary of a finished (possibly unconverged) run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.converged || self.summary.dry_run {
            0
        } else {
            3
        }
    }
}

fn phase_report(run: &ResolvedRun) -> PhaseReport {
    let p = &run.params;
    let phase = classify(p.beta1, p.beta2);
    let lm = minimize_landscape(p.beta1, p.beta2, p.m);
    PhaseReport {
        label: phase.name().to_string(),
        regimes: phase.regimes().iter().map(|r| r.name().to_string()).collect(),
        tau: lm.argmin.tau,
        delta: lm.argmin.delta,
        beta_of_m: beta_of_m(p.beta0, p.beta1, p.beta2, p.m).value,
    }
}

fn summarize(run: &ResolvedRun, stepper: &Stepper, phi: &SpinorField, seed: Option<u64>) -> RunSummary {
    let sign = if run.mirrored { -1.0 } else { 1.0 };
    let ms = masses(phi);
    let mut components = ms.components;
    if run.mirrored {
        components.reverse();
    }
    let mult = stepper.hamiltonian().multipliers(phi);
    let sma = sma_validity(phi, SMA_DEFAULT_TOL).ok().map(|r| SmaSummary {
        valid: r.valid,
        deviation: r.deviation,
        reference: ELLS[r.reference] * sign as i32,
    });
    RunSummary {
        converged: false,
        dry_run: false,
        iterations: 0,
        energy: stepper.hamiltonian().energy(phi),
        masses: MassReport {
            total: ms.total,
            magnetization: sign * ms.magnetization,
            components,
        },
        mu: mult.map(|m| m.mu),
        lambda: mult.map(|m| sign * m.lambda),
        el_residual: mult.map(|m| m.residual),
        step_residual: 0.0,
        seed,
        mirrored: run.mirrored,
        phase: phase_report(run),
        sma,
    }
}

fn write_to(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Runs one ground-state computation and writes its outputs into `dir`.
///
/// A run that exhausts its iteration budget still writes everything, with
/// `converged = false` in the summary. With `dry_run` no step is taken and
/// the projected initial data is reported.
pub fn run_gs(cfg: &RunConfig, dir: &Path, dry_run: bool) -> Result<RunOutcome, CliError> {
    let run = cfg.resolve()?;
    let out = &cfg.output;
    fs::create_dir_all(dir)?;
    let stepper = Stepper::new(&run.grid, &run.params, run.stepper)?;
    let phi0 = build_initial_data(&run.initial, &run.params, &run.grid)?;
    let sign = if run.mirrored { -1.0 } else { 1.0 };

    if out.landscape {
        let p = &run.params;
        let table = landscape_table(p.beta0, p.beta1, p.beta2, sign * p.m, out.landscape_resolution)?;
        fs::write(dir.join(LANDSCAPE_FILE), table)?;
    }

    let mut diag = if out.diagnostics {
        let mut w = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
        writeln!(w, "{DIAGNOSTICS_HEADER}")?;
        Some(w)
    } else {
        None
    };
    let mut io_err: Option<std::io::Error> = None;
    let mut record = |r: &StepRecord| {
        if let Some(w) = diag.as_mut() {
            if io_err.is_none() {
                if let Err(e) = writeln!(w, "{}", diagnostics_row(r, sign)) {
                    io_err = Some(e);
                }
            }
        }
    };

    let (phi, summary) = if dry_run {
        let ham = stepper.hamiltonian();
        let m = masses(&phi0);
        record(&StepRecord {
            iteration: 0,
            energy: ham.energy(&phi0),
            n_total: m.total,
            m_total: m.magnetization,
            residual: 0.0,
            lambda: None,
        });
        let mut s = summarize(&run, &stepper, &phi0, cfg.initial.seed());
        s.dry_run = true;
        (phi0, s)
    } else {
        let gs: GroundState = stepper.run_observed(&phi0, &mut record)?;
        let mut s = summarize(&run, &stepper, &gs.field, cfg.initial.seed());
        s.converged = gs.converged();
        s.iterations = gs.diagnostics.iterations;
        s.energy = gs.energy;
        s.step_residual = gs.diagnostics.final_record().map_or(0.0, |r| r.residual);
        (gs.field, s)
    };
    if let Some(e) = io_err {
        return Err(e.into());
    }
    if let Some(mut w) = diag {
        w.flush()?;
    }

    if out.fields {
        let shown = if run.mirrored { phi.mirrored() } else { phi };
        write_to(&dir.join(FIELD_FILE), |w| write_field(w, &shown))?;
    }
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.into()))?;
    fs::write(dir.join(SUMMARY_FILE), json + "\n")?;
    Ok(RunOutcome {
        summary,
        dir: dir.to_path_buf(),
    })
}

fn fmt_xi(xi: &[f64; 5]) -> String {
    xi.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join("\t")
}

fn default_family(regime: Phase, m: f64) -> ClosedForm {
    match regime {
        Phase::Ferromagnetic => ClosedForm::Ferromagnetic,
        Phase::Nematic => ClosedForm::Nematic,
        _ => ClosedForm::cyclic_default(m),
    }
}

fn family_name(f: &ClosedForm) -> &'static str {
    match f {
        ClosedForm::Ferromagnetic => "ferromagnetic",
        ClosedForm::Nematic => "nematic",
        ClosedForm::NematicMixed { .. } => "nematic_mixed",
        ClosedForm::NematicTilted { .. } => "nematic_tilted",
        ClosedForm::CyclicSplit => "cyclic_split",
        ClosedForm::CyclicSymmetric => "cyclic_symmetric",
        ClosedForm::CyclicTheta { .. } => "cyclic_theta",
    }
}

fn describe(set: MinimizerSet) -> String {
    match set {
        MinimizerSet::Point(td) => format!("point ({:.17e}, {:.17e})", td.tau, td.delta),
        MinimizerSet::DeltaPair(d) => format!("pair (0, +-{d:.17e})"),
        MinimizerSet::EllipseBoundary => "whole ellipse boundary tau^2 + 4 delta^2 = 4 - M^2".into(),
        MinimizerSet::TauSegment { tau_max } => format!("segment delta = 0, 0 <= tau <= {tau_max:.17e}"),
        MinimizerSet::DeltaSegment { delta_max } => format!("segment tau = 0, |delta| <= {delta_max:.17e}"),
        MinimizerSet::Everywhere => "every feasible point".into(),
    }
}

/// Text report of the uniform ground state; `m` may be negative.
pub fn uniform_report(beta0: f64, beta1: f64, beta2: f64, m: f64, family: Option<FamilySpec>) -> Result<String, CliError> {
    for (name, v) in [("beta0", beta0), ("beta1", beta1), ("beta2", beta2), ("M", m)] {
        if !v.is_finite() {
            return Err(CliError::Config(format!("{name} = {v} is not finite")));
        }
    }
    if m.abs() > 2.0 {
        return Err(CliError::Config(format!("M = {m} must lie in [-2, 2]")));
    }
    let mirrored = m < 0.0;
    let ma = m.abs();
    let shown = |xi: [f64; 5]| {
        let mut x = xi;
        if mirrored {
            x.reverse();
        }
        x
    };
    let lm = minimize_landscape(beta1, beta2, ma);
    let bm = beta_of_m(beta0, beta1, beta2, ma);
    let mut s = String::new();
    writeln!(s, "phase\t{}", lm.phase).unwrap();
    writeln!(s, "tau_g\t{:.17e}", lm.argmin.tau).unwrap();
    writeln!(s, "delta_g\t{:.17e}", lm.argmin.delta).unwrap();
    writeln!(s, "minimizers\t{}", describe(lm.minimizers)).unwrap();
    writeln!(s, "beta_of_m\t{:.17e}", bm.value).unwrap();

    let families: Vec<ClosedForm> = match family {
        Some(f) => vec![f.resolve(ma)],
        None => lm.phase.regimes().iter().map(|r| default_family(*r, ma)).collect(),
    };
    if let Phase::Boundary(_) = lm.phase {
        writeln!(s, "boundary\t{} admissible families", families.len()).unwrap();
    }
    for f in families {
        let xi = ground_xi(beta1, beta2, ma, Some(f))?;
        let td = xi.tau_delta();
        let e = spin2_gs::uniform::energy_of(td, ma, beta0, beta1, beta2);
        writeln!(s, "family\t{}\t{}", family_name(&f), f.regime()).unwrap();
        writeln!(s, "xi_g\t{}", fmt_xi(&shown(xi.xi))).unwrap();
        writeln!(s, "energy_uniform\t{e:.17e}").unwrap();
    }
    Ok(s)
}

/// `tau delta energy` rows of the reduced uniform energy with the grid and
/// analytic minimizers as leading comment lines.
pub fn landscape_table(beta0: f64, beta1: f64, beta2: f64, m: f64, resolution: usize) -> Result<String, CliError> {
    if !(m.abs() <= 2.0) {
        return Err(CliError::Config(format!("M = {m} must lie in [-2, 2]")));
    }
    let ma = m.abs();
    let land = landscape_grid(beta0, beta1, beta2, ma, resolution)?;
    let lm = minimize_landscape(beta1, beta2, ma);
    let best = land.samples[land.argmin];
    let exact = spin2_gs::uniform::energy_of(lm.argmin, ma, beta0, beta1, beta2);
    let mut s = String::new();
    writeln!(s, "# argmin\t{:.17e}\t{:.17e}\t{:.17e}", best.tau, best.delta, best.energy).unwrap();
    writeln!(
        s,
        "# minimum\t{:.17e}\t{:.17e}\t{:.17e}\t{}",
        lm.argmin.tau, lm.argmin.delta, exact, lm.phase
    )
    .unwrap();
    writeln!(s, "tau\tdelta\tenergy").unwrap();
    for p in &land.samples {
        writeln!(s, "{:.17e}\t{:.17e}\t{:.17e}", p.tau, p.delta, p.energy).unwrap();
    }
    Ok(s)
}

fn sweep_row(value: f64, r: &Result<RunOutcome, CliError>) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.17e}"));
    match r {
        Ok(o) => {
            let s = &o.summary;
            let n = s.masses.components.map(|c| format!("{c:.17e}")).join("\t");
            format!(
                "{value:.17e}\t{:.17e}\t{n}\t{}\t{}\t{:.17e}\t{}\t{}\t{}",
                s.energy,
                opt(s.mu),
                opt(s.lambda),
                s.step_residual,
                s.iterations,
                s.converged,
                s.phase.label
            )
        }
        Err(e) => format!("{value:.17e}{}\terror: {e}", "\tnan".repeat(10) + "\t0\tfalse"),
    }
}

/// Runs every swept value on up to `workers` threads. Run `k` writes into
/// `dir/run_k`; the combined table goes to `dir/sweep.tsv`.
pub fn run_sweep(
    cfg: &SweepConfig,
    dir: &Path,
    workers: usize,
    dry_run: bool,
) -> Result<Vec<Result<RunOutcome, CliError>>, CliError> {
    let runs = cfg.runs();
    // fail fast on configuration problems before any thread starts
    for r in &runs {
        r.resolve()?;
    }
    fs::create_dir_all(dir)?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunOutcome, CliError>>>> = Mutex::new((0..runs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, runs.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= runs.len() {
                    break;
                }
                let res = run_gs(&runs[k], &dir.join(format!("run_{k}")), dry_run);
                slots.lock().unwrap()[k] = Some(res);
            });
        }
    });
    let results: Vec<_> = slots.into_inner().unwrap().into_iter().map(|r| r.expect("every run finishes")).collect();
    let name = cfg.parameter.name();
    let mut table = format!(
        "{name}\tenergy\tn_p2\tn_p1\tn_0\tn_m1\tn_m2\tmu\tlambda\tstep_residual\titerations\tconverged\tphase\n"
    );
    for (v, r) in cfg.values.iter().zip(&results) {
        table.push_str(&sweep_row(*v, r));
        table.push('\n');
    }
    fs::write(dir.join(SWEEP_FILE), table)?;
    Ok(results)
}
