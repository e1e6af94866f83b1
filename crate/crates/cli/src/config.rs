use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_8;
use viscap::deformation::{DeformationSpec, ScanWindow};
use viscap::potentials::{Envelope, PotentialKind};
use viscap::{Error, GridSpec, Potential, RectangleOmega, Result, C64};

use crate::json::Cx;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sweep,
    Oracle,
    Davies,
    Symbol,
    Compare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    #[serde(flatten)]
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Envelope>,
}

impl PotentialConfig {
    pub fn envelope(&self) -> Envelope {
        self.envelope.unwrap_or_else(|| self.kind.default_envelope())
    }

    pub fn build(&self) -> Result<Potential> {
        let e = self.envelope();
        Potential::from_kind(&self.kind, e.c, e.gamma)
    }
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig { kind: PotentialKind::Sech2 { v0: 8.0 }, envelope: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub eps_start: f64,
    pub eps_ratio: f64,
    pub eps_count: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { eps_start: 1e-1, eps_ratio: 10f64.powf(-0.5), eps_count: 7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest per-step jump of a track.
    pub track_radius: f64,
    /// Last-step motion below which a track counts as converged.
    pub cauchy_tol: f64,
    /// Relative Newton target for determinant zeros.
    pub newton_tol: f64,
    /// Disc radius for the CAP/BS count check.
    pub delta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { track_radius: 0.2, cauchy_tol: 1e-2, newton_tol: 1e-10, delta: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DaviesConfig {
    pub grid: GridSpec,
    pub lambda: Cx,
    pub gamma_weight: f64,
    pub weighted_eps: Vec<f64>,
    pub unweighted_grid: GridSpec,
    pub unweighted_z: Cx,
    pub unweighted_eps: Vec<f64>,
    /// Norms above this are reported as the cap itself.
    pub norm_cap: f64,
}

impl Default for DaviesConfig {
    fn default() -> Self {
        DaviesConfig {
            grid: GridSpec::new(12.0, 512),
            lambda: Cx { re: 1.5, im: 0.2 },
            gamma_weight: 1.0,
            weighted_eps: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            unweighted_grid: GridSpec::new(20.0, 512),
            unweighted_z: C64::from_polar(1.0, -FRAC_PI_8).into(),
            unweighted_eps: vec![4e-2, 2e-2, 1e-2, 5e-3],
            norm_cap: 1e12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolConfig {
    /// Deformation used for the scan and the Ω margin.
    pub spec: DeformationSpec,
    pub theta: Cx,
    pub window: ScanWindow,
    pub h: f64,
    /// Ω for the avoidance check, with θ = -iβ.
    pub omega: RectangleOmega,
    pub beta: f64,
    /// θ values for the bad-sector margins, in units of γ.
    pub sector_thetas: Vec<Cx>,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        SymbolConfig {
            spec: DeformationSpec::scaled_tanh(0.4, 1.0),
            theta: Cx { re: 0.0, im: -0.4 },
            window: ScanWindow::default(),
            h: 0.0,
            omega: RectangleOmega::new(6.0, 8.0, 0.1, 1.0),
            beta: 0.4,
            sector_thetas: vec![
                Cx { re: 0.5, im: 0.0 },
                Cx { re: -0.5, im: 0.0 },
                Cx { re: 0.0, im: 0.5 },
                Cx { re: 0.0, im: -0.5 },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the command line when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub potential: PotentialConfig,
    /// Grid for `P_ε`.
    pub grid: GridSpec,
    /// Grid for the Birman-Schwinger determinant.
    pub bs_grid: GridSpec,
    pub omega: RectangleOmega,
    pub schedule: ScheduleConfig,
    pub tolerances: Tolerances,
    pub davies: DaviesConfig,
    pub symbol: SymbolConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            potential: PotentialConfig::default(),
            grid: GridSpec::new(60.0, 800),
            bs_grid: GridSpec::new(15.0, 600),
            omega: RectangleOmega::new(2.0, 3.5, 0.8, 0.5),
            schedule: ScheduleConfig::default(),
            tolerances: Tolerances::default(),
            davies: DaviesConfig::default(),
            symbol: SymbolConfig::default(),
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Checks everything `cmd` will touch before any computation starts.
    pub fn validate(&self, cmd: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(Error::Config(format!("config names command {c:?} but {cmd:?} was requested")));
            }
        }
        let needs_potential = matches!(cmd, Command::Sweep | Command::Oracle | Command::Compare);
        if needs_potential {
            let p = self.potential.build()?;
            self.omega.validate(p.envelope_gamma)?;
        }
        if matches!(cmd, Command::Sweep | Command::Compare) {
            self.grid.build()?;
            self.sweep_config()?.validate()?;
        }
        if matches!(cmd, Command::Oracle | Command::Compare) {
            self.bs_grid.build()?;
            if !(self.tolerances.newton_tol > 0.0) {
                return Err(Error::Config("newton_tol must be positive".into()));
            }
        }
        if cmd == Command::Compare && !(self.tolerances.delta > 0.0) {
            return Err(Error::Config("delta must be positive".into()));
        }
        if cmd == Command::Davies {
            let d = &self.davies;
            d.grid.build()?;
            d.unweighted_grid.build()?;
            if d.weighted_eps.iter().chain(&d.unweighted_eps).any(|&e| !(e > 0.0)) {
                return Err(Error::Config("davies eps values must be positive".into()));
            }
            if !(d.gamma_weight >= 0.0) || !(d.norm_cap > 0.0) {
                return Err(Error::Config("davies gamma_weight must be >= 0 and norm_cap > 0".into()));
            }
        }
        if cmd == Command::Symbol {
            let s = &self.symbol;
            s.spec.validate()?;
            if !(s.h >= 0.0) || s.window.n < 2 || !(s.window.xi_max > 0.0) {
                return Err(Error::Config("symbol scan needs h >= 0, n >= 2 and xi_max > 0".into()));
            }
        }
        Ok(())
    }

    pub fn sweep_config(&self) -> Result<viscap::SweepConfig> {
        Ok(viscap::SweepConfig {
            potential: self.potential.build()?,
            grid: self.grid,
            omega: self.omega,
            eps_start: self.schedule.eps_start,
            eps_ratio: self.schedule.eps_ratio,
            eps_count: self.schedule.eps_count,
            track_radius: self.tolerances.track_radius,
            cauchy_tol: self.tolerances.cauchy_tol,
        })
    }
}
