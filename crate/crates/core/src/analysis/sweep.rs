//! Efficiency sweeps over the coupling strength, written as CSV.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::metrics::{conditional_fidelity, eta_d, eta_t};
use crate::analysis::AnalysisError;
use crate::circuits::{CircuitError, GateProgram, GateVariant, MeasurementMode};
use crate::physics::SystemParams;
use crate::state::ProductInput;

pub const CSV_HEADER: &str = "g_over_kappa,eta_T,eta_D,fidelity,trace";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub g_over_kappa: Vec<f64>,
    pub gamma_over_kappa: f64,
    pub cavity_detuning: f64,
    pub emitter_detuning: f64,
    /// Gate simulated for the fidelity and trace columns.
    pub variant: GateVariant,
    pub input: ProductInput,
    /// Seed of the spin measurements.
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(g_over_kappa: Vec<f64>, input: ProductInput) -> Self {
        Self {
            g_over_kappa,
            gamma_over_kappa: 0.01,
            cavity_detuning: 0.0,
            emitter_detuning: 0.0,
            variant: GateVariant::HyperToffoli,
            input,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.g_over_kappa.is_empty() {
            return Err(AnalysisError::InvalidSweep("grid is empty".into()));
        }
        if self.g_over_kappa.iter().any(|g| !g.is_finite()) {
            return Err(AnalysisError::InvalidSweep("grid contains a non-finite value".into()));
        }
        if self.g_over_kappa.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AnalysisError::InvalidSweep("grid is not strictly increasing".into()));
        }
        self.input.validate()?;
        Ok(())
    }

    pub fn params(&self, g_over_kappa: f64) -> SystemParams {
        SystemParams::detuned(g_over_kappa, self.gamma_over_kappa, self.cavity_detuning, self.emitter_detuning)
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub g_over_kappa: f64,
    pub eta_t: f64,
    pub eta_d: f64,
    /// Conditional fidelity of the simulated gate; NaN when the gate aborts.
    pub fidelity: f64,
    /// Simulated success probability.
    pub trace: f64,
}

fn sweep_point(spec: &SweepSpec, g: f64) -> Result<SweepRow, AnalysisError> {
    let pair = spec.params(g).reflection_pair()?;
    let program = GateProgram::new(spec.variant, pair);
    let (fidelity, trace) = match program.run(&spec.input, &MeasurementMode::Sampled(spec.seed)) {
        Ok(outs) => (conditional_fidelity(&outs[0], &spec.input)?, outs[0].success_probability),
        Err(CircuitError::Aborted) => (f64::NAN, 0.0),
        Err(e) => return Err(e.into()),
    };
    Ok(SweepRow { g_over_kappa: g, eta_t: eta_t(&pair), eta_d: eta_d(&pair), fidelity, trace })
}

/// One row per grid point, in grid order. Points are evaluated in parallel.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, AnalysisError> {
    spec.validate()?;
    spec.g_over_kappa.par_iter().map(|&g| sweep_point(spec, g)).collect()
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped,
/// exponent form below `1e-4` and from `1e12` up.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig12(r.g_over_kappa),
            format_sig12(r.eta_t),
            format_sig12(r.eta_d),
            format_sig12(r.fidelity),
            format_sig12(r.trace)
        )?;
    }
    Ok(())
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<(), AnalysisError> {
    let io = |source| AnalysisError::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv(rows, &mut buf).map_err(io)?;
    buf.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(0.905287461234567), "0.905287461235");
        assert_eq!(format_sig12(9.80296049407e-5), "9.80296049407e-05");
        assert_eq!(format_sig12(123456.0), "123456");
        assert_eq!(format_sig12(1e15), "1e+15");
        assert_eq!(format_sig12(-2.5e-7), "-2.5e-07");
        assert_eq!(format_sig12(f64::NAN), "nan");
        // rounding that carries into the next decade
        assert_eq!(format_sig12(0.99999999999999), "1");
    }

    #[test]
    fn grid_helpers() {
        assert_eq!(linear_grid(0.1, 5.0, 1), vec![0.1]);
        let g = linear_grid(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        let input = ProductInput::basis(0);
        assert!(SweepSpec::new(vec![], input).validate().is_err());
        assert!(SweepSpec::new(vec![1.0, 1.0], input).validate().is_err());
        assert!(SweepSpec::new(vec![2.0, 1.0], input).validate().is_err());
        assert!(SweepSpec::new(vec![1.0, f64::NAN], input).validate().is_err());
        assert!(SweepSpec::new(vec![0.5, 1.0], input).validate().is_ok());
    }

    #[test]
    fn zero_coupling_row_reports_abort() {
        let rows = run_sweep(&SweepSpec::new(vec![0.0, 1.0], ProductInput::basis(0))).unwrap();
        assert_eq!(rows[0].trace, 0.0);
        assert!(rows[0].fidelity.is_nan());
        assert!(rows[1].trace > 0.0);
    }
}
