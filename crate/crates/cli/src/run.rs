//! `run`: integrate the TGHS for every initial condition of a scenario and
//! write one CSV trajectory plus one JSON summary per member.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gchs::{integrate_tghs, monitor_report, PhasePoint64, ScalarField, Trajectory64};
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::scenario::Setup;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateOut {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl From<&PhasePoint64> for StateOut {
    fn from(x: &PhasePoint64) -> Self {
        Self { q: x.q().to_vec(), p: x.p().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualOut {
    pub max: f64,
    pub mean: f64,
    pub last: f64,
}

/// JSON summary of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub member: usize,
    pub samples: usize,
    pub t_end: f64,
    pub initial: StateOut,
    #[serde(rename = "final")]
    pub final_state: StateOut,
    pub hamiltonian_initial: f64,
    pub hamiltonian_final: f64,
    pub max_energy_drift: f64,
    pub decay_law_max_dev: f64,
    pub max_hh_bracket: f64,
    pub max_hh_chain: f64,
    pub max_conj_violation: f64,
    pub w_min: f64,
    pub w_max: f64,
    /// Covariant residual `|{f,H}|` statistics per observable.
    pub residuals: IndexMap<String, ResidualOut>,
}

#[derive(Clone, Debug)]
pub struct MemberOutput {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: Summary,
}

/// `dir/name.ext` → `dir/name_0007.ext` for ensemble members; the tag goes
/// before the first dot so `run.summary.json` becomes `run_0007.summary.json`.
pub fn member_path(path: &Path, member: Option<usize>) -> PathBuf {
    let Some(k) = member else { return path.to_path_buf() };
    let file = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match file.split_once('.') {
        Some((stem, rest)) => format!("{stem}_{k:04}.{rest}"),
        None => format!("{file}_{k:04}"),
    };
    path.with_file_name(name)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header(n: usize, observables: &[String]) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|j| format!("q{j}")));
    cols.extend((1..=n).map(|j| format!("p{j}")));
    cols.push("H".into());
    cols.push("w".into());
    for name in observables {
        cols.push(format!("{name}.re"));
        cols.push(format!("{name}.im"));
    }
    for name in observables {
        cols.push(format!("D{name}.re"));
        cols.push(format!("D{name}.im"));
    }
    cols
}

pub fn write_csv<W: Write>(out: W, traj: &Trajectory64, n: usize, observables: &[String]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    wtr.write_record(csv_header(n, observables))?;
    for ((t, x), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        let mut row = vec![fmt(*t)];
        row.extend(x.coords().iter().map(|&v| fmt(v)));
        row.push(fmt(m.hamiltonian));
        row.push(fmt(m.w));
        for v in m.observables.iter().chain(&m.residuals) {
            row.push(fmt(v.re));
            row.push(fmt(v.im));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn summarize(member: usize, traj: &Trajectory64, names: &[String]) -> Result<Summary> {
    let report = monitor_report(traj)?;
    let (first, last) = (&traj.monitors[0], traj.monitors.last().expect("non-empty"));
    Ok(Summary {
        member,
        samples: report.samples,
        t_end: report.t_end,
        initial: (&traj.states[0]).into(),
        final_state: traj.states.last().expect("non-empty").into(),
        hamiltonian_initial: first.hamiltonian,
        hamiltonian_final: last.hamiltonian,
        max_energy_drift: report.max_energy_drift,
        decay_law_max_dev: report.max_decay_dev,
        max_hh_bracket: report.max_hh_bracket,
        max_hh_chain: report.max_hh_chain,
        max_conj_violation: report.max_conj_violation,
        w_min: report.w_min,
        w_max: report.w_max,
        residuals: names
            .iter()
            .zip(&report.residuals)
            .map(|(name, r)| (name.clone(), ResidualOut { max: r.max, mean: r.mean, last: r.last }))
            .collect(),
    })
}

fn run_member(setup: &Setup, member: usize, ensemble: bool) -> Result<MemberOutput> {
    let z0 = &setup.initial[member];
    let names: Vec<String> = setup.observables.keys().cloned().collect();
    let fields: Vec<ScalarField> = setup.observables.values().cloned().collect();
    log::info!("member {member}: integrating from {:?}", z0.coords());
    let traj = integrate_tghs(&setup.system, z0, &setup.stepper, &fields)
        .with_context(|| format!("integration of member {member} failed"))?;
    log::debug!("member {member}: {} samples", traj.len());

    let tag = ensemble.then_some(member);
    let csv = member_path(&setup.csv, tag);
    let json = member_path(&setup.json, tag);
    let summary = summarize(member, &traj, &names)?;

    let file = std::fs::File::create(&csv).with_context(|| format!("cannot create {}", csv.display()))?;
    write_csv(std::io::BufWriter::new(file), &traj, setup.n, &names)?;
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&json, text).with_context(|| format!("cannot write {}", json.display()))?;
    Ok(MemberOutput { csv, json, summary })
}

/// Runs every ensemble member; with `jobs > 1` members run on a worker pool.
/// Results come back in member order either way.
pub fn run(setup: &Setup, jobs: usize) -> Result<Vec<MemberOutput>> {
    let count = setup.initial.len();
    let ensemble = count > 1;
    if jobs <= 1 || !ensemble {
        return (0..count).map(|k| run_member(setup, k, ensemble)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<Result<MemberOutput>> =
        pool.install(|| (0..count).into_par_iter().map(|k| run_member(setup, k, ensemble)).collect());
    results.into_iter().collect()
}
