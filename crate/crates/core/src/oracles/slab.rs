use std::f64::consts::PI;

use crate::bioheat::Material;
use crate::error::{Error, Result};

/// A 1D slab `0 <= x <= length` with fixed end temperatures, an initial
/// temperature `t_initial + bump·sin(πx/L)` and a uniform source switched
/// on at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle1DConfig {
    pub length: f64,
    pub material: Material,
    /// Relaxation time, s. Zero gives Fourier conduction.
    pub tau: f64,
    pub t_initial: f64,
    /// Amplitude of the smooth initial bump, K.
    pub bump: f64,
    pub t_left: f64,
    pub t_right: f64,
    /// W/m³
    pub source: f64,
    /// Grid cells of the finite-difference oracle and of the output table.
    pub cells: usize,
    /// Time step of the finite-difference oracle, s.
    pub dt: f64,
}

impl Oracle1DConfig {
    pub fn diffusivity(&self) -> f64 {
        self.material.diffusivity()
    }

    /// Largest stable explicit step on this grid.
    pub fn stable_dt(&self) -> f64 {
        let dx = self.length / self.cells as f64;
        let alpha = self.diffusivity();
        if self.tau > 0.0 {
            // c dt / dx <= 1 with c the wave speed
            dx / (alpha / self.tau).sqrt()
        } else {
            0.5 * dx * dx / alpha
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.cells >= 2) {
            return Err(Error::InvalidParameter("oracle slab needs length > 0 and >= 2 cells".into()));
        }
        if !(self.material.heat_capacity() > 0.0 && self.material.conductivity > 0.0 && self.tau >= 0.0) {
            return Err(Error::InvalidParameter("oracle material must have ρc, k > 0 and τ >= 0".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.length * i as f64 / self.cells as f64).collect()
    }
}

/// Temperatures on a grid at a list of times: `values[k][i]` is at
/// `times[k]`, `x[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Table {
    /// Linear interpolation in `x` at the `k`-th time.
    pub fn at(&self, k: usize, x: f64) -> f64 {
        let xs = &self.x;
        let row = &self.values[k];
        let i = xs.partition_point(|&v| v < x).clamp(1, xs.len() - 1);
        let s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        row[i - 1] + s * (row[i] - row[i - 1])
    }

    /// Largest absolute difference to `other` sampled on this table's grid.
    pub fn max_difference(&self, other: &Table) -> f64 {
        let mut d: f64 = 0.0;
        for k in 0..self.times.len() {
            for (i, &x) in self.x.iter().enumerate() {
                d = d.max((self.values[k][i] - other.at(k, x)).abs());
            }
        }
        d
    }
}

/// Truncation target for the series tail, K.
pub const SERIES_TOL: f64 = 1e-9;
const MAX_TERMS: usize = 2_000_000;

/// Separation-of-variables solution of the Fourier problem.
#[derive(Debug, Clone, Copy)]
pub struct SlabSeries {
    cfg: Oracle1DConfig,
}

impl SlabSeries {
    pub fn new(cfg: Oracle1DConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(SlabSeries { cfg })
    }

    pub fn steady(&self, x: f64) -> f64 {
        let c = &self.cfg;
        let l = c.length;
        c.t_left + (c.t_right - c.t_left) * x / l + c.source / (2.0 * c.material.conductivity) * x * (l - x)
    }

    /// Sine coefficient of `T(x, 0) − steady(x)`.
    fn coefficient(&self, n: usize) -> f64 {
        let c = &self.cfg;
        let np = n as f64 * PI;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let odd = 1.0 - sign;
        let l2 = c.length * c.length;
        let bump = if n == 1 { c.bump } else { 0.0 };
        2.0 * (c.t_initial - c.t_left) * odd / np + 2.0 * (c.t_right - c.t_left) * sign / np
            - c.source / (2.0 * c.material.conductivity) * 4.0 * l2 * odd / np.powi(3)
            + bump
    }

    /// Bound on `|b_n|·n`, uniform in n.
    fn coefficient_scale(&self) -> f64 {
        let c = &self.cfg;
        (4.0 * (c.t_initial - c.t_left).abs() + 2.0 * (c.t_right - c.t_left).abs()) / PI
            + c.bump.abs()
            + 8.0 * c.source.abs() / (2.0 * c.material.conductivity) * c.length * c.length / PI.powi(3)
    }

    /// Terms needed for a tail below `SERIES_TOL` at time `t`.
    fn terms(&self, t: f64) -> Result<usize> {
        let a = self.cfg.diffusivity() * (PI / self.cfg.length).powi(2) * t;
        let scale = self.coefficient_scale();
        if scale == 0.0 {
            return Ok(0);
        }
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("series does not converge at t = {t}")));
        }
        // Σ_{n>N} (C/n) e^{-a n²} <= (C/N) e^{-a N(N+1)} / (1 − e^{-a N})
        let mut n = 1usize;
        loop {
            let nf = n as f64;
            let bound = scale / nf * (-a * nf * (nf + 1.0)).exp() / (1.0 - (-a * nf).exp());
            if bound < SERIES_TOL {
                return Ok(n);
            }
            n *= 2;
            if n > MAX_TERMS {
                return Err(Error::InvalidParameter(format!(
                    "series needs more than {MAX_TERMS} terms at t = {t}"
                )));
            }
        }
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            let c = &self.cfg;
            return Ok(if x <= 0.0 {
                c.t_left
            } else if x >= c.length {
                c.t_right
            } else {
                c.t_initial + c.bump * (PI * x / c.length).sin()
            });
        }
        let n_terms = self.terms(t)?;
        let (l, alpha) = (self.cfg.length, self.cfg.diffusivity());
        let mut sum = 0.0;
        for n in 1..=n_terms {
            let k = n as f64 * PI / l;
            sum += self.coefficient(n) * (k * x).sin() * (-alpha * k * k * t).exp();
        }
        Ok(self.steady(x) + sum)
    }
}

/// Analytic Fourier-series solution on the grid of `cfg` at `times`.
pub fn oracle_be_1d(cfg: &Oracle1DConfig, times: &[f64]) -> Result<Table> {
    let series = SlabSeries::new(*cfg)?;
    let x = cfg.grid();
    let values = times
        .iter()
        .map(|&t| x.iter().map(|&xi| series.value(xi, t)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { x, times: times.to_vec(), values })
}

/// Explicit finite differences for `τ T_tt + T_t = α T_xx + s/ρc`.
///
/// With `τ > 0` the three-level central scheme starts from `Ṫ(0) = 0`; with
/// `τ = 0` it is forward Euler. `times` are rounded to the nearest step.
pub fn oracle_hbe_1d(cfg: &Oracle1DConfig, times: &[f64]) -> Result<Table> {
    cfg.validate()?;
    let limit = cfg.stable_dt();
    if !(cfg.dt > 0.0 && cfg.dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "oracle dt {} violates the explicit stability bound {limit}",
            cfg.dt
        )));
    }
    let x = cfg.grid();
    let n = x.len();
    let dx = cfg.length / cfg.cells as f64;
    let (alpha, tau, dt) = (cfg.diffusivity(), cfg.tau, cfg.dt);
    let q = cfg.source / cfg.material.heat_capacity();
    let lap = |u: &[f64], i: usize| (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dx * dx);

    let mut cur: Vec<f64> =
        x.iter().map(|&xi| cfg.t_initial + cfg.bump * (PI * xi / cfg.length).sin()).collect();
    cur[0] = cfg.t_left;
    cur[n - 1] = cfg.t_right;
    let mut prev = cur.clone();
    let mut next = cur.clone();

    let targets: Vec<usize> = times.iter().map(|&t| (t / dt).round() as usize).collect();
    let last = targets.iter().copied().max().unwrap_or(0);
    let mut values = vec![Vec::new(); times.len()];
    let store = |step: usize, u: &[f64], values: &mut Vec<Vec<f64>>| {
        for (k, &s) in targets.iter().enumerate() {
            if s == step {
                values[k] = u.to_vec();
            }
        }
    };
    store(0, &cur, &mut values);
    for step in 1..=last {
        for i in 1..n - 1 {
            let f = alpha * lap(&cur, i) + q;
            next[i] = if tau == 0.0 {
                cur[i] + dt * f
            } else if step == 1 {
                // ghost level T^{-1} = T^{1} from Ṫ(0) = 0
                cur[i] + dt * dt / (2.0 * tau) * f
            } else {
                let a = tau / (dt * dt);
                let b = 1.0 / (2.0 * dt);
                (f + a * (2.0 * cur[i] - prev[i]) + b * prev[i]) / (a + b)
            };
        }
        next[0] = cfg.t_left;
        next[n - 1] = cfg.t_right;
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        store(step, &cur, &mut values);
    }
    Ok(Table { x, times: targets.iter().map(|&s| s as f64 * dt).collect(), values })
}

/// Position where `row` first falls to `level` scanning from `x = 0`,
/// linearly interpolated.
pub fn crossing(x: &[f64], row: &[f64], level: f64) -> Option<f64> {
    for i in 1..x.len() {
        let (a, b) = (row[i - 1] - level, row[i] - level);
        if a >= 0.0 && b < 0.0 {
            return Some(x[i - 1] + (x[i] - x[i - 1]) * a / (a - b));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bioheat::MaterialTable;

    fn muscle_slab(cells: usize) -> Oracle1DConfig {
        Oracle1DConfig {
            length: 0.01,
            material: MaterialTable::default().muscle,
            tau: 0.0,
            t_initial: 37.0,
            bump: 0.0,
            t_left: 37.0,
            t_right: 37.0,
            source: 0.0,
            cells,
            dt: 0.0,
        }
    }

    #[test]
    fn constant_data_stays_constant() {
        let cfg = muscle_slab(10);
        let t = oracle_be_1d(&cfg, &[0.0, 5.0, 100.0]).unwrap();
        assert!(t.values.iter().flatten().all(|&v| v == 37.0));
    }

    #[test]
    fn long_time_limit_is_linear() {
        let cfg = Oracle1DConfig { t_left: 60.0, ..muscle_slab(20) };
        let t_long = 50.0 * cfg.length.powi(2) / cfg.diffusivity();
        let tab = oracle_be_1d(&cfg, &[t_long]).unwrap();
        for (i, &x) in tab.x.iter().enumerate() {
            let lin = 60.0 + (37.0 - 60.0) * x / cfg.length;
            assert!((tab.values[0][i] - lin).abs() < 1e-6);
        }
    }

    #[test]
    fn series_matches_fine_explicit_run() {
        let base = Oracle1DConfig { t_left: 60.0, source: 2e5, ..muscle_slab(400) };
        // α dt / dx² = 1/6 cancels the leading truncation error
        let cfg = Oracle1DConfig { dt: base.stable_dt() / 3.0, ..base };
        let times = [60.0];
        let fd = oracle_hbe_1d(&cfg, &times).unwrap();
        let series = SlabSeries::new(cfg).unwrap();
        let mid = series.value(0.005, fd.times[0]).unwrap();
        assert!((fd.at(0, 0.005) - mid).abs() < 1e-4, "{} vs {mid}", fd.at(0, 0.005));
    }

    #[test]
    fn bump_decays_as_the_first_mode() {
        let cfg = Oracle1DConfig { bump: 5.0, ..muscle_slab(50) };
        let series = SlabSeries::new(cfg).unwrap();
        let decay = (-cfg.diffusivity() * (PI / cfg.length).powi(2) * 30.0).exp();
        let v = series.value(0.3 * cfg.length, 30.0).unwrap();
        assert!((v - 37.0 - 5.0 * (0.3 * PI).sin() * decay).abs() < 1e-9);
    }

    #[test]
    fn unstable_step_rejected() {
        let base = Oracle1DConfig { tau: 16.0, ..muscle_slab(100) };
        let cfg = Oracle1DConfig { dt: 1.1 * base.stable_dt(), ..base };
        assert!(oracle_hbe_1d(&cfg, &[1.0]).is_err());
    }
}
