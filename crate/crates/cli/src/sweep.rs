//! Grid sweeps written as CSV.
//!
//! Numbers use Rust's shortest round-trip formatting, so every value parses
//! back to the exact `f64` that was computed.

use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use thermstab::channel::{negativity, qpd_thermal, total_overhead, ThermalParams};
use thermstab::dense::{delta_d_sweep, delta_f_sweep, delta_f_thermal_sweep};

/// Parses `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("malformed grid value '{s}' in '{spec}'"))?;
        if !v.is_finite() {
            bail!("grid value '{s}' is not finite");
        }
        Ok(v)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .with_context(|| format!("malformed grid count '{count}' in '{spec}'"))?;
            match n {
                0 => bail!("grid '{spec}' has zero points"),
                1 => Ok(vec![a]),
                _ => Ok(linspace(a, b, n)),
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => bail!("malformed grid '{spec}', expected start:stop:count or a comma list"),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(self.text, "{}", cells.join(",")).expect("string write");
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Trace-distance gap along the Bloch meridian.
pub fn delta_d_csv(thetas: &[f64], params: &ThermalParams) -> Result<String> {
    let mut csv = Csv::new(&["theta", "delta_d"]);
    for (t, d) in delta_d_sweep(thetas, params)? {
        csv.row(&[t, d]);
    }
    Ok(csv.into_string())
}

/// `F_reset - F_pta` over `(T2/T1, tau/T1)` at fixed `p1`.
pub fn delta_f_csv(t2_ratios: &[f64], tau_ratios: &[f64], p1: f64) -> Result<String> {
    let mut csv = Csv::new(&["t2_ratio", "tau_ratio", "delta_f"]);
    for (r, t, f) in delta_f_sweep(t2_ratios, tau_ratios, p1)? {
        csv.row(&[r, t, f]);
    }
    Ok(csv.into_string())
}

/// `F_reset - F_pta` over `(p1, tau/T1)` at fixed `T2/T1`.
pub fn delta_f_p1_csv(p1s: &[f64], tau_ratios: &[f64], t2_ratio: f64) -> Result<String> {
    let mut csv = Csv::new(&["p1", "tau_ratio", "delta_f"]);
    for (p, t, f) in delta_f_thermal_sweep(p1s, tau_ratios, t2_ratio)? {
        csv.row(&[p, t, f]);
    }
    Ok(csv.into_string())
}

/// Per-site negativity, its `n_c`-fold product and the variance factor `Gamma^(2 n_c)`.
pub fn overhead_csv(t2_ratios: &[f64], tau_ratios: &[f64], p1: f64, n_c: usize) -> Result<String> {
    let mut csv = Csv::new(&["t2_ratio", "tau_ratio", "gamma", "gamma_total", "variance_factor"]);
    for &r in t2_ratios {
        for &t in tau_ratios {
            let g = negativity(&qpd_thermal(&ThermalParams::new(1.0, r, t, p1)?));
            let (total, variance) = total_overhead(&[g], n_c)?;
            csv.row(&[r, t, g, total, variance]);
        }
    }
    Ok(csv.into_string())
}

pub fn default_thetas() -> Vec<f64> {
    linspace(0.0, PI, 181)
}
