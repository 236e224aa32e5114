//! Browser bindings: a problem session with three operations for the demo page
//! (a comparison row, sampled eigenfunctions, and the quantization curve).
//!
//! Every export returns a flat `Float64Array`; layouts are documented per method.

use dcstring::{
    build_wkb_frame, comparison_table, figure_data, pencil_solve, quantization_residual, CoefficientSet, Pairing,
    ProblemInstance, Tolerances, WkbFrame,
};
use wasm_bindgen::prelude::*;

/// Coefficients, contrast and the WKB frame, built once per parameter change.
#[wasm_bindgen]
pub struct Session {
    inst: ProblemInstance,
    frame: WkbFrame,
}

impl Session {
    pub fn create(a: f64, b: f64, k: &str, r: &str, kappa: &str, rho: &str, epsilon: f64) -> Result<Session, String> {
        let coeffs = CoefficientSet::new(a, b, k, r, kappa, rho).map_err(|e| e.to_string())?;
        let frame = build_wkb_frame(&coeffs, Tolerances::default()).map_err(|e| e.to_string())?;
        let inst = ProblemInstance::new(coeffs, epsilon).map_err(|e| e.to_string())?;
        Ok(Session { inst, frame })
    }

    pub fn row(&self, n: usize) -> Result<Vec<f64>, String> {
        let rows = comparison_table(&self.inst, &[n]).map_err(|e| e.to_string())?;
        let r = &rows[0];
        let code = match r.pairing {
            Pairing::Paired => 0.0,
            Pairing::DeltaHalfPi => 1.0,
            Pairing::Anomalous => 2.0,
        };
        Ok(vec![r.sqrt_exact, r.sqrt_lowfreq, r.omega, r.omega1, r.delta, r.sqrt_highfreq, r.l as f64, code])
    }

    pub fn shapes(&self, n: usize, points: usize) -> Result<Vec<f64>, String> {
        let fig = figure_data(&self.inst, n, points.max(2)).map_err(|e| e.to_string())?;
        Ok(fig.rows.iter().flatten().copied().collect())
    }

    pub fn curve(&self, l: u32, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>, String> {
        let c = &self.inst.coeffs;
        let tol = self.inst.tol;
        let samples = samples.max(2);
        let mut out = Vec::with_capacity(3 * samples);
        for i in 0..samples {
            let w = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let delta = pencil_solve(c, &self.frame, w, tol).map_err(|e| e.to_string())?.delta;
            let f = quantization_residual(c, &self.frame, self.inst.epsilon, l as i64, w, tol).unwrap_or(f64::NAN);
            out.extend([w, delta, f]);
        }
        Ok(out)
    }
}

#[wasm_bindgen]
impl Session {
    #[wasm_bindgen(constructor)]
    pub fn new(a: f64, b: f64, k: &str, r: &str, kappa: &str, rho: &str, epsilon: f64) -> Result<Session, JsError> {
        Session::create(a, b, k, r, kappa, rho, epsilon).map_err(|e| JsError::new(&e))
    }

    /// `S(0)`, the travel time of the soft part.
    #[wasm_bindgen(js_name = phaseLength)]
    pub fn phase_length(&self) -> f64 {
        self.frame.s0
    }

    /// `[sqrt_exact, sqrt_lowfreq, omega, omega1, delta, sqrt_highfreq, l, pairing]`,
    /// pairing 0 = paired, 1 = delta through pi/2, 2 = anomalous.
    #[wasm_bindgen(js_name = tableRow)]
    pub fn table_row(&self, n: usize) -> Result<Vec<f64>, JsError> {
        self.row(n).map_err(|e| JsError::new(&e))
    }

    /// Rows of `(x, u_exact, u_low, u_high)`, flattened.
    pub fn eigenfunctions(&self, n: usize, points: usize) -> Result<Vec<f64>, JsError> {
        self.shapes(n, points).map_err(|e| JsError::new(&e))
    }

    /// Rows of `(omega, delta, F)` with `F` the quantization residual for index `l`, flattened.
    #[wasm_bindgen(js_name = quantizationCurve)]
    pub fn quantization_curve(&self, l: u32, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>, JsError> {
        self.curve(l, lo, hi, samples).map_err(|e| JsError::new(&e))
    }
}
