//! Flat `key = value` run configuration with bracketed sections.
//!
//! ```text
//! [grid]      n1, n2
//! [phys]      mu, lambda, gamma, linear_pressure
//! [init]      seed, epsilon, decay_rate, enable_rho, enable_u, enable_b, symmetric
//! [stepping]  dt, auto_cfl, scheme, filter, cfl, filter_strength, projection_tol
//! [diag]      s, sigma, sample_interval, ceiling
//! [run]       t_end, out_dir, checkpoint_every
//! ```
//!
//! `#` starts a comment anywhere on a line; lines starting with `;` are
//! comments too. Every key is optional except
//! `t_end`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::diagnostics::DiagnosticsConfig;
use crate::error::{Error, Result};
use crate::integrator::{Scheme, StepConfig};
use crate::physics::{PhysParams, PressureLaw};

/// Initial-data generator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitSpec {
    pub seed: u64,
    /// Target value of `‖ρ₀‖_{H^s} + ‖u₀‖_{H^s} + ‖b₀‖_{H^s}`.
    pub epsilon: f64,
    pub decay_rate: f64,
    pub enable_rho: bool,
    pub enable_u: bool,
    pub enable_b: bool,
    /// Symmetrize under `x₁ → -x₁` (with `u₁`, `b₁` odd).
    pub symmetric: bool,
}

impl Default for InitSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            epsilon: 1e-3,
            decay_rate: 0.5,
            enable_rho: true,
            enable_u: true,
            enable_b: true,
            symmetric: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n1: usize,
    pub n2: usize,
    pub phys: PhysParams,
    pub init: InitSpec,
    pub stepping: StepConfig,
    pub diag: DiagnosticsConfig,
    /// PASS ceiling for the bound monitor; a calibration, not a derived constant.
    pub ceiling: f64,
    pub t_end: f64,
    pub out_dir: PathBuf,
    pub checkpoint_every: Option<f64>,
}

pub const DEFAULT_CEILING: f64 = 100.0;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n1: 128,
            n2: 128,
            phys: PhysParams::default(),
            init: InitSpec::default(),
            stepping: StepConfig::default(),
            diag: DiagnosticsConfig::default(),
            ceiling: DEFAULT_CEILING,
            t_end: 1.0,
            out_dir: PathBuf::from("out"),
            checkpoint_every: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        crate::spectral::Grid::new(self.n1, self.n2)?;
        self.phys.validate()?;
        self.stepping.validate()?;
        self.diag.validate()?;
        if !(self.init.epsilon >= 0.0) || !self.init.epsilon.is_finite() {
            return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
        }
        if !(self.init.decay_rate > 0.0) {
            return Err(Error::InvalidParameter("decay_rate must be positive".into()));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter("t_end must be positive".into()));
        }
        if let Some(c) = self.checkpoint_every {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter("checkpoint_every must be positive".into()));
            }
        }
        Ok(())
    }

    /// Render back into the text format; `parse_config(c.to_text())` returns `c`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (gamma, linear) = match self.phys.pressure {
            PressureLaw::Gamma(g) => (g, false),
            PressureLaw::Linear => (1.4, true),
        };
        let st = &self.stepping;
        let _ = writeln!(s, "[grid]\nn1 = {}\nn2 = {}\n", self.n1, self.n2);
        let _ = writeln!(
            s,
            "[phys]\nmu = {:?}\nlambda = {:?}\ngamma = {:?}\nlinear_pressure = {}\n",
            self.phys.mu, self.phys.lambda, gamma, linear
        );
        let i = &self.init;
        let _ = writeln!(
            s,
            "[init]\nseed = {}\nepsilon = {:?}\ndecay_rate = {:?}\nenable_rho = {}\nenable_u = {}\nenable_b = {}\nsymmetric = {}\n",
            i.seed, i.epsilon, i.decay_rate, i.enable_rho, i.enable_u, i.enable_b, i.symmetric
        );
        let _ = writeln!(
            s,
            "[stepping]\ndt = {:?}\nauto_cfl = {}\nscheme = {}\nfilter = {}\ncfl = {:?}\nfilter_strength = {:?}\nprojection_tol = {}\n",
            st.dt,
            st.adaptive,
            match st.scheme {
                Scheme::IFRK3 => "ifrk3",
                Scheme::IFRK4 => "ifrk4",
            },
            st.filter_enabled,
            st.cfl_safety,
            st.filter_strength,
            st.projection_tol.map_or("off".to_string(), |t| format!("{t:?}"))
        );
        let _ = writeln!(
            s,
            "[diag]\ns = {:?}\nsigma = {:?}\nsample_interval = {:?}\nceiling = {:?}\n",
            self.diag.s, self.diag.sigma, self.diag.sample_interval, self.ceiling
        );
        let _ = writeln!(
            s,
            "[run]\nt_end = {:?}\nout_dir = {}\ncheckpoint_every = {}",
            self.t_end,
            self.out_dir.display(),
            self.checkpoint_every.map_or("off".to_string(), |c| format!("{c:?}"))
        );
        s
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn num(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| err(line, format!("{key}: expected a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(err(line, format!("{key}: must be finite")));
    }
    Ok(x)
}

fn int(line: usize, key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| err(line, format!("{key}: expected a nonnegative integer, got {v:?}")))
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(err(line, format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn optional(line: usize, key: &str, v: &str) -> Result<Option<f64>> {
    if matches!(v.to_ascii_lowercase().as_str(), "off" | "none") {
        Ok(None)
    } else {
        num(line, key, v).map(Some)
    }
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64> {
    let x = num(line, key, v)?;
    if x <= 0.0 {
        return Err(err(line, format!("{key}: must be positive, got {x}")));
    }
    Ok(x)
}

fn grid_size(line: usize, key: &str, v: &str) -> Result<usize> {
    let n = int(line, key, v)? as usize;
    if n < 8 || n % 2 != 0 {
        return Err(err(line, format!("{key}: must be even and at least 8, got {n}")));
    }
    Ok(n)
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let mut gamma = 1.4;
    let mut linear = false;
    let mut section: Option<String> = None;
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut t_end_seen = false;
    let mut last_phys_line = 0;

    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() || l.starts_with(';') {
            continue;
        }
        if let Some(name) = l.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header {l:?}")))?
                .trim();
            if !matches!(name, "grid" | "phys" | "init" | "stepping" | "diag" | "run") {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key = value, got {l:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section
            .as_deref()
            .ok_or_else(|| err(line, format!("key {key:?} outside any section")))?;
        if !seen.insert((sec.to_string(), key.to_string())) {
            return Err(err(line, format!("duplicate key {key:?} in [{sec}]")));
        }
        match (sec, key) {
            ("grid", "n1") => c.n1 = grid_size(line, key, value)?,
            ("grid", "n2") => c.n2 = grid_size(line, key, value)?,
            ("phys", "mu") => {
                c.phys.mu = positive(line, key, value)?;
                last_phys_line = line;
            }
            ("phys", "lambda") => {
                c.phys.lambda = num(line, key, value)?;
                last_phys_line = line;
            }
            ("phys", "gamma") => gamma = positive(line, key, value)?,
            ("phys", "linear_pressure") => linear = boolean(line, key, value)?,
            ("init", "seed") => c.init.seed = int(line, key, value)?,
            ("init", "epsilon") => {
                let e = num(line, key, value)?;
                if e < 0.0 {
                    return Err(err(line, format!("epsilon: must be nonnegative, got {e}")));
                }
                c.init.epsilon = e;
            }
            ("init", "decay_rate") => c.init.decay_rate = positive(line, key, value)?,
            ("init", "enable_rho") => c.init.enable_rho = boolean(line, key, value)?,
            ("init", "enable_u") => c.init.enable_u = boolean(line, key, value)?,
            ("init", "enable_b") => c.init.enable_b = boolean(line, key, value)?,
            ("init", "symmetric") => c.init.symmetric = boolean(line, key, value)?,
            ("stepping", "dt") => c.stepping.dt = positive(line, key, value)?,
            ("stepping", "auto_cfl") => c.stepping.adaptive = boolean(line, key, value)?,
            ("stepping", "scheme") => {
                c.stepping.scheme = Scheme::parse(value).map_err(|e| err(line, format!("scheme: {e}")))?
            }
            ("stepping", "filter") => c.stepping.filter_enabled = boolean(line, key, value)?,
            ("stepping", "cfl") => {
                let x = positive(line, key, value)?;
                if x > 1.0 {
                    return Err(err(line, format!("cfl: must not exceed 1, got {x}")));
                }
                c.stepping.cfl_safety = x;
            }
            ("stepping", "filter_strength") => {
                let x = num(line, key, value)?;
                if x < 0.0 {
                    return Err(err(line, "filter_strength: must be nonnegative"));
                }
                c.stepping.filter_strength = x;
            }
            ("stepping", "projection_tol") => c.stepping.projection_tol = optional(line, key, value)?,
            ("diag", "s") => {
                let s = num(line, key, value)?;
                if s < 2.0 {
                    return Err(err(line, format!("s: must be at least 2, got {s}")));
                }
                c.diag.s = s;
            }
            ("diag", "sigma") => {
                let s = num(line, key, value)?;
                if !(s > 0.0 && s < 0.5) {
                    return Err(err(line, format!("sigma: need 0 < sigma < 1/2, got {s}")));
                }
                c.diag.sigma = s;
            }
            ("diag", "sample_interval") => c.diag.sample_interval = positive(line, key, value)?,
            ("diag", "ceiling") => c.ceiling = positive(line, key, value)?,
            ("run", "t_end") => {
                c.t_end = positive(line, key, value)?;
                t_end_seen = true;
            }
            ("run", "out_dir") => c.out_dir = PathBuf::from(value),
            ("run", "checkpoint_every") => {
                c.checkpoint_every = optional(line, key, value)?;
                if let Some(x) = c.checkpoint_every {
                    if x <= 0.0 {
                        return Err(err(line, "checkpoint_every: must be positive"));
                    }
                }
            }
            _ => return Err(err(line, format!("unknown key {key:?} in [{sec}]"))),
        }
    }
    if !t_end_seen {
        return Err(err(0, "missing required key t_end in [run]"));
    }
    c.phys.pressure = if linear {
        PressureLaw::Linear
    } else {
        PressureLaw::gamma(gamma)?
    };
    c.phys.validate().map_err(|e| err(last_phys_line, e.to_string()))?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse_config("[run]\nt_end = 1\n").unwrap();
        assert_eq!((c.n1, c.n2), (128, 128));
        assert_eq!((c.phys.mu, c.phys.lambda), (1.0, 0.0));
        assert_eq!(c.phys.pressure, PressureLaw::Gamma(1.4));
        assert_eq!((c.diag.sigma, c.diag.s), (0.25, 4.0));
        assert_eq!(c.stepping.scheme, Scheme::IFRK4);
        assert_eq!(c.t_end, 1.0);
    }

    fn line_of(text: &str) -> usize {
        match parse_config(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_rejected_with_line() {
        assert_eq!(line_of("[run]\nt_end = 1\n[diag]\nsigma = 0.7\n"), 4);
        assert_eq!(line_of("[phys]\nmu = 0\n[run]\nt_end=1"), 2);
        assert_eq!(line_of("[run]\nt_end = 1\nbogus = 3\n"), 3);
        assert_eq!(line_of("[mystery]\n"), 1);
        assert_eq!(line_of("t_end = 1\n"), 1);
        assert_eq!(line_of("[run]\nt_end = 1\nt_end = 2\n"), 3);
        assert_eq!(line_of("[grid]\nn1 = 63\n[run]\nt_end = 1"), 2);
        assert_eq!(line_of("[stepping]\nscheme = euler\n[run]\nt_end = 1"), 2);
        assert_eq!(line_of("[init]\nepsilon = -1\n[run]\nt_end = 1"), 2);
        assert_eq!(line_of("[phys]\nmu = 1\nlambda = -2\n[run]\nt_end = 1"), 3);
        assert!(matches!(parse_config("[grid]\nn1 = 64\n"), Err(Error::Config { .. })));
    }

    #[test]
    fn full_config_round_trips() {
        let text = "# test\n[grid]\nn1 = 64   # x\nn2 = 32\n[phys]\nmu = 2\nlambda = 0.5\nlinear_pressure = true\n\
                    [init]\nseed = 9\nepsilon = 0\nsymmetric = yes\n[stepping]\nscheme = IFRK3\nauto_cfl = false\n\
                    projection_tol = off\n[diag]\nsample_interval = 0.5\nceiling = 7\n[run]\nt_end = 3\ncheckpoint_every = 1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.phys.pressure, PressureLaw::Linear);
        assert_eq!(c.stepping.projection_tol, None);
        assert!(!c.stepping.adaptive && c.init.symmetric);
        assert_eq!(c.checkpoint_every, Some(1.0));
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.to_text()).unwrap(), d);
    }
}
