//! Named presets. Each writes its CSVs and a `summary.txt` into the output
//! directory and reports one verdict per criterion it covers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::criteria::{self, Criterion};
use super::RunConfig;
use crate::error::{Error, Result};
use crate::lemma::LemmaTrial;
use crate::linear::DampingRow;

pub const SCENARIOS: [&str; 5] = ["linear-modes", "decay-verify", "omega-residual", "lemma-suite", "ledger-check"];

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub name: String,
    pub criteria: Vec<Criterion>,
    pub files: Vec<PathBuf>,
}

impl ScenarioReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&Criterion> {
        self.criteria.iter().filter(|c| !c.pass).collect()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("scenario {}\n", self.name);
        for c in &self.criteria {
            let _ = writeln!(s, "{c}");
        }
        s
    }
}

/// Options shared by every scenario.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOptions {
    pub out_dir: PathBuf,
    /// Replaces the preset's seed (initial data or lemma master seed).
    pub seed: Option<u64>,
    /// Replaces the decay-verify preset.
    pub config: Option<RunConfig>,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, contents)?;
        self.files.push(p);
        Ok(())
    }
}

fn damping_csv(rows: &[DampingRow]) -> String {
    let mut s = format!("{}\n", DampingRow::CSV_HEADER);
    for r in rows {
        let _ = writeln!(s, "{}", r.csv());
    }
    s
}

pub fn run_scenario(name: &str, opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let mut w = Writer::new(&opts.out_dir)?;
    let mut crits = Vec::new();
    match name {
        "linear-modes" => {
            crits.push(criteria::linear_spectra()?);
            crits.push(criteria::symbol_identity(16)?);
            let (c, rows) = criteria::anisotropic_damping(16)?;
            crits.push(c);
            w.write("damping_map.csv", &damping_csv(&rows))?;
            crits.push(criteria::linear_consistency(64, 1e-3, 1.0)?);
        }
        "decay-verify" => {
            let mut cfg = opts.config.clone().unwrap_or_else(criteria::decay_verify_config);
            if let Some(seed) = opts.seed {
                cfg.init.seed = seed;
            }
            let (c, out) = criteria::theorem_monitor_run(&cfg)?;
            w.write("diagnostics.csv", &out.ledger.to_csv())?;
            let mut mon = out.monitor.summary();
            for (label, g) in &out.growth {
                let _ = writeln!(mon, "growth t={}..{}: {label}: {g:.4}", cfg.t_end / 2.0, cfg.t_end);
            }
            w.write("monitor.txt", &mon)?;
            w.write("decay_fit.txt", &format!("{}\n", out.fit.report()))?;
            w.write("config.txt", &cfg.to_text())?;
            crits.push(c);
            let (c, _) = criteria::structure_preservation(cfg.n1, cfg.t_end)?;
            crits.push(c);
        }
        "omega-residual" => {
            let (c, e) = criteria::omega_consistency(32, 0.02)?;
            w.write("omega_residual.csv", &format!("h,relative_error\n0.02,{:.6e}\n0.01,{:.6e}\n", e[0], e[1]))?;
            crits.push(c);
        }
        "lemma-suite" => {
            let seed = opts.seed.unwrap_or(2024);
            let (c, ensembles) = criteria::lemma_suite(seed, 500)?;
            let mut csv = format!("{}\n", LemmaTrial::CSV_HEADER);
            let mut hashes = String::new();
            for e in &ensembles {
                csv.push_str(&e.csv_rows());
                let _ = writeln!(
                    hashes,
                    "{} s0={} trials={} max_ratio={:.6e} median_ratio={:.6e} sha256={}",
                    e.lemma.name(),
                    e.s0,
                    e.trials.len(),
                    e.max_ratio(),
                    e.median_ratio(),
                    e.hash()
                );
            }
            w.write("lemma_trials.csv", &csv)?;
            w.write("lemma_ensembles.txt", &hashes)?;
            crits.push(c);
            crits.push(criteria::norm_oracles(100)?);
        }
        "ledger-check" => {
            let (c, r) = criteria::ledger_convergence(32, 1e-3, 0.02, 1.0)?;
            w.write("ledger_convergence.csv", &format!("dt,residual\n0.02,{:.6e}\n0.01,{:.6e}\n", r[0], r[1]))?;
            crits.push(c);
            crits.push(criteria::integrator_order(64, 0.0025, 0.1)?);
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    }
    let report = ScenarioReport {
        name: name.to_string(),
        criteria: crits,
        files: w.files.clone(),
    };
    w.write("summary.txt", &report.summary())?;
    Ok(ScenarioReport {
        files: w.files,
        ..report
    })
}
