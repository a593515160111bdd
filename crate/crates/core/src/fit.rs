//! Least-squares fits and closed-form derived quantities.
//!
//! Nonlinear models run through a small in-repo Levenberg-Marquardt
//! (damped Gauss-Newton) loop with numeric Jacobians; the log-linear
//! decay fits are ordinary least squares on the transformed data.
//! Uncertainties are 1-sigma values from the linearized covariance with
//! the residual variance estimate.

// Index-based loops are used deliberately in the small dense matrix code.
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use thiserror::Error;

use crate::real::{rf, Real};
use crate::spectral::AbsorptionProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
}

/// Named fit parameters with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub params: BTreeMap<String, T>,
    pub std_errors: BTreeMap<String, T>,
    pub residual_norm: T,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> FitResult<T> {
    pub fn param(&self, name: &str) -> Option<T> {
        self.params.get(name).copied()
    }

    pub fn std_error(&self, name: &str) -> Option<T> {
        self.std_errors.get(name).copied()
    }

    /// key=value report: `param.<name>`, `stderr.<name>`, `residual`,
    /// `converged`.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.params {
            out.push_str(&format!("param.{}={:.16e}\n", name, value));
        }
        for (name, value) in &self.std_errors {
            out.push_str(&format!("stderr.{}={:.16e}\n", name, value));
        }
        out.push_str(&format!("residual={:.16e}\n", self.residual_norm));
        out.push_str(&format!("converged={}\n", self.converged));
        out
    }

    fn from_parts(
        names: &[&str],
        values: &[T],
        errors: &[T],
        residual_norm: T,
        converged: bool,
        iterations: usize,
    ) -> Self {
        let params = names
            .iter()
            .zip(values)
            .map(|(n, v)| (n.to_string(), *v))
            .collect();
        let std_errors = names
            .iter()
            .zip(errors)
            .map(|(n, v)| (n.to_string(), *v))
            .collect();
        Self {
            params,
            std_errors,
            residual_norm,
            converged,
            iterations,
        }
    }
}

// ---------------------------------------------------------------------------
// Small dense linear algebra for the normal equations (n <= 3 here).

fn solve_linear<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < rf(1e-300) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                let upper = a[col][k];
                a[row][k] -= factor * upper;
            }
            let rhs = b[col];
            b[row] -= factor * rhs;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn invert<T: Real>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        columns.push(solve_linear(a.to_vec(), e)?);
    }
    let mut inv = vec![vec![T::zero(); n]; n];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt engine.

const LM_MAX_ITER: usize = 200;
const LM_REL_TOL: f64 = 1e-10;

struct LmOutcome<T> {
    theta: Vec<T>,
    covariance: Vec<Vec<T>>,
    residual_norm: T,
    converged: bool,
    iterations: usize,
}

fn numeric_jacobian<T: Real, F>(f: &F, theta: &[T], m: usize) -> Vec<Vec<T>>
where
    F: Fn(&[T]) -> Vec<T>,
{
    let n = theta.len();
    let mut jac = vec![vec![T::zero(); n]; m];
    let scale = rf::<T>(1e-6);
    for j in 0..n {
        let h = scale * theta[j].abs().max(T::one());
        let mut plus = theta.to_vec();
        plus[j] += h;
        let mut minus = theta.to_vec();
        minus[j] -= h;
        let rp = f(&plus);
        let rm = f(&minus);
        let denom = (plus[j] - minus[j]).max(rf(1e-300));
        for i in 0..m {
            jac[i][j] = (rp[i] - rm[i]) / denom;
        }
    }
    jac
}

fn lm_fit<T: Real, F>(f: &F, theta0: Vec<T>) -> LmOutcome<T>
where
    F: Fn(&[T]) -> Vec<T>,
{
    let n = theta0.len();
    let mut theta = theta0;
    let mut residuals = f(&theta);
    let m = residuals.len();
    let mut cost = residuals.iter().fold(T::zero(), |acc, r| acc + *r * *r);
    let mut lambda = rf::<T>(1e-3);
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..LM_MAX_ITER {
        iterations += 1;
        let jac = numeric_jacobian(f, &theta, m);
        // Normal equations: (J^T J + lambda diag(J^T J)) step = -J^T r
        let mut jtj = vec![vec![T::zero(); n]; n];
        let mut jtr = vec![T::zero(); n];
        for i in 0..m {
            for a in 0..n {
                jtr[a] += jac[i][a] * residuals[i];
                for b in a..n {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }

        let mut accepted = false;
        for _ in 0..16 {
            let mut damped = jtj.clone();
            for a in 0..n {
                let d = jtj[a][a].max(rf(1e-30));
                damped[a][a] = jtj[a][a] + lambda * d;
            }
            let rhs: Vec<T> = jtr.iter().map(|g| -*g).collect();
            let Some(step) = solve_linear(damped, rhs) else {
                lambda *= rf(10.0);
                continue;
            };
            let candidate: Vec<T> = theta.iter().zip(&step).map(|(t, s)| *t + *s).collect();
            let cand_res = f(&candidate);
            let cand_cost = cand_res.iter().fold(T::zero(), |acc, r| acc + *r * *r);
            if cand_cost.is_finite() && cand_cost <= cost {
                let rel_change = theta
                    .iter()
                    .zip(&candidate)
                    .map(|(a, b)| (*a - *b).abs() / a.abs().max(rf(1e-12)))
                    .fold(T::zero(), T::max);
                theta = candidate;
                residuals = cand_res;
                cost = cand_cost;
                lambda = (lambda / rf(3.0)).max(rf(1e-12));
                accepted = true;
                if rel_change < rf(LM_REL_TOL) {
                    converged = true;
                }
                break;
            }
            lambda *= rf(10.0);
        }
        if converged || !accepted {
            converged = converged || accepted;
            break;
        }
    }

    // Covariance from the linearization at the solution.
    let jac = numeric_jacobian(f, &theta, m);
    let mut jtj = vec![vec![T::zero(); n]; n];
    for i in 0..m {
        for a in 0..n {
            for b in a..n {
                jtj[a][b] += jac[i][a] * jac[i][b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj[a][b] = jtj[b][a];
        }
    }
    let dof = m.saturating_sub(n);
    let sigma2 = if dof > 0 {
        cost / rf(dof as f64)
    } else {
        T::zero()
    };
    let covariance = invert(&jtj)
        .map(|inv| {
            inv.into_iter()
                .map(|row| row.into_iter().map(|v| v * sigma2).collect())
                .collect()
        })
        .unwrap_or_else(|| vec![vec![T::zero(); n]; n]);

    LmOutcome {
        theta,
        covariance,
        residual_norm: cost.sqrt(),
        converged,
        iterations,
    }
}

// ---------------------------------------------------------------------------
// Ordinary least squares on a line, with covariance.

struct LineFit<T> {
    intercept: T,
    slope: T,
    var_intercept: T,
    var_slope: T,
    residual_norm: T,
}

fn line_fit<T: Real>(x: &[T], y: &[T]) -> Option<LineFit<T>> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = rf::<T>(n as f64);
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (xi, yi) in x.iter().zip(y) {
        sx += *xi;
        sy += *yi;
        sxx += *xi * *xi;
        sxy += *xi * *yi;
    }
    let denom = nf * sxx - sx * sx;
    if denom.abs() < rf(1e-300) {
        return None;
    }
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sxx * sy - sx * sxy) / denom;
    let mut ss_res = T::zero();
    for (xi, yi) in x.iter().zip(y) {
        let r = *yi - (intercept + slope * *xi);
        ss_res += r * r;
    }
    let sigma2 = if n > 2 {
        ss_res / rf((n - 2) as f64)
    } else {
        T::zero()
    };
    Some(LineFit {
        intercept,
        slope,
        var_intercept: sigma2 * sxx / denom,
        var_slope: sigma2 * nf / denom,
        residual_norm: ss_res.sqrt(),
    })
}

// ---------------------------------------------------------------------------
// The fit families.

/// Interference fringe fit: I(phi) = I_max/2 * (1 + V sin(phi + phi1)).
///
/// Requires at least 6 points spanning at least 1.5 pi of phase. The
/// visibility is kept in [0, 1] by fitting V = sin^2(q). Seeds come from
/// the first Fourier coefficient of the scan.
pub fn fit_sinusoid<T: Real>(phases: &[T], intensities: &[T]) -> Result<FitResult<T>, FitError> {
    if phases.len() != intensities.len() {
        return Err(FitError::Domain("phase/intensity length mismatch".into()));
    }
    if phases.len() < 6 {
        return Err(FitError::TooFewPoints {
            needed: 6,
            got: phases.len(),
        });
    }
    let span = phases.iter().fold(T::neg_infinity(), |a, p| a.max(*p))
        - phases.iter().fold(T::infinity(), |a, p| a.min(*p));
    if span < rf::<T>(1.5) * T::PI() {
        return Err(FitError::Domain(
            "phase scan must span at least 1.5 pi".into(),
        ));
    }

    // Linear least squares on I = c + a sin(phi) + b cos(phi) doubles as
    // the Fourier seed and the degenerate-contrast detector.
    let n = phases.len();
    let mut ata = vec![vec![T::zero(); 3]; 3];
    let mut atb = vec![T::zero(); 3];
    for (p, i) in phases.iter().zip(intensities) {
        let row = [T::one(), p.sin(), p.cos()];
        for a in 0..3 {
            atb[a] += row[a] * *i;
            for b in a..3 {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            ata[a][b] = ata[b][a];
        }
    }
    let seed = solve_linear(ata, atb).ok_or_else(|| {
        FitError::Domain("degenerate phase distribution".into())
    })?;
    let (c0, a0, b0) = (seed[0], seed[1], seed[2]);
    let first_harmonic = (a0 * a0 + b0 * b0).sqrt();

    if !(c0 > T::zero()) || first_harmonic < rf::<T>(1e-12) * c0.abs().max(rf(1e-300)) {
        // Constant data: no modulation, V = 0, phase offset unidentifiable.
        let mean = intensities.iter().fold(T::zero(), |acc, v| acc + *v) / rf(n as f64);
        let mut ss = T::zero();
        for v in intensities {
            ss += (*v - mean) * (*v - mean);
        }
        return Ok(FitResult::from_parts(
            &["i_max", "v", "phi1"],
            &[mean + mean, T::zero(), T::zero()],
            &[T::zero(), T::zero(), T::zero()],
            ss.sqrt(),
            true,
            0,
        ));
    }

    let v_seed = (first_harmonic / c0).min(rf(0.999999));
    let q_seed = v_seed.sqrt().min(T::one()).asin();
    let imax_seed = c0 + c0;
    let phi1_seed = b0.atan2(a0);

    let phases_v = phases.to_vec();
    let intens_v = intensities.to_vec();
    let model = move |theta: &[T]| -> Vec<T> {
        let (imax, q, phi1) = (theta[0], theta[1], theta[2]);
        let v = q.sin() * q.sin();
        let half = rf::<T>(0.5);
        phases_v
            .iter()
            .zip(&intens_v)
            .map(|(p, i)| half * imax * (T::one() + v * (*p + phi1).sin()) - *i)
            .collect()
    };
    let out = lm_fit(&model, vec![imax_seed, q_seed, phi1_seed]);
    let q = out.theta[1];
    let v = q.sin() * q.sin();
    // sigma_V via the delta method: dV/dq = sin(2q).
    let dv_dq = (q + q).sin().abs();
    let sigma_q = out.covariance[1][1].max(T::zero()).sqrt();
    let errors = [
        out.covariance[0][0].max(T::zero()).sqrt(),
        dv_dq * sigma_q,
        out.covariance[2][2].max(T::zero()).sqrt(),
    ];
    Ok(FitResult::from_parts(
        &["i_max", "v", "phi1"],
        &[out.theta[0], v, out.theta[2]],
        &errors,
        out.residual_norm,
        out.converged,
        out.iterations,
    ))
}

fn log_linear_decay<T: Real>(
    times: &[T],
    amplitudes: &[T],
    slope_to_tc: T, // decay time = slope_to_tc / (-slope)
    names: (&str, &str),
    intercept_is_log: bool,
) -> Result<FitResult<T>, FitError> {
    if times.len() != amplitudes.len() {
        return Err(FitError::Domain("time/amplitude length mismatch".into()));
    }
    if times.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: times.len(),
        });
    }
    if amplitudes.iter().any(|a| !(*a > T::zero())) {
        return Err(FitError::Domain(
            "amplitudes must be strictly positive".into(),
        ));
    }
    let logs: Vec<T> = amplitudes.iter().map(|a| a.ln()).collect();
    let line = line_fit(times, &logs)
        .ok_or_else(|| FitError::Domain("degenerate time distribution".into()))?;
    let amp0 = if intercept_is_log {
        line.intercept.exp()
    } else {
        line.intercept
    };
    let amp0_err = line.var_intercept.max(T::zero()).sqrt()
        * if intercept_is_log { amp0 } else { T::one() };

    if line.slope >= T::zero() {
        // Flat or growing data: no decay; report infinite time constant.
        return Ok(FitResult::from_parts(
            &[names.0, names.1],
            &[amp0, T::infinity()],
            &[amp0_err, T::infinity()],
            line.residual_norm,
            false,
            1,
        ));
    }
    let tc = slope_to_tc / (-line.slope);
    // |d tc / d slope| = slope_to_tc / slope^2
    let tc_err = line.var_slope.max(T::zero()).sqrt() * slope_to_tc / (line.slope * line.slope);
    Ok(FitResult::from_parts(
        &[names.0, names.1],
        &[amp0, tc],
        &[amp0_err, tc_err],
        line.residual_norm,
        true,
        1,
    ))
}

/// Two-pulse echo decay: amplitude(tau1) = A0 exp(-2 tau1 / T2), fitted
/// as a line in log space with slope -2/T2.
pub fn fit_exp_decay<T: Real>(times: &[T], amplitudes: &[T]) -> Result<FitResult<T>, FitError> {
    log_linear_decay(times, amplitudes, rf(2.0), ("a0", "t2"), true)
}

/// Rephasing-scheme efficiency decay: eta(tau) = eta0 exp(-4 tau / T2eff),
/// fitted as a line in log space with slope -4/T2eff.
pub fn fit_rose_decay<T: Real>(taus: &[T], efficiencies: &[T]) -> Result<FitResult<T>, FitError> {
    log_linear_decay(taus, efficiencies, rf(4.0), ("eta0", "t2eff"), true)
}

/// Gaussian spin dephasing decay: A(tau_s) = A0 exp(-(tau_s/T2star)^2).
/// Seeded from the log-linear form in tau^2, refined by LM on the direct
/// model.
pub fn fit_gaussian_decay<T: Real>(taus: &[T], amplitudes: &[T]) -> Result<FitResult<T>, FitError> {
    if taus.len() != amplitudes.len() {
        return Err(FitError::Domain("time/amplitude length mismatch".into()));
    }
    if taus.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: taus.len(),
        });
    }
    if amplitudes.iter().any(|a| !(*a > T::zero())) {
        return Err(FitError::Domain(
            "amplitudes must be strictly positive".into(),
        ));
    }
    let t2: Vec<T> = taus.iter().map(|t| *t * *t).collect();
    let logs: Vec<T> = amplitudes.iter().map(|a| a.ln()).collect();
    let line = line_fit(&t2, &logs)
        .ok_or_else(|| FitError::Domain("degenerate time distribution".into()))?;
    if line.slope >= T::zero() {
        return Ok(FitResult::from_parts(
            &["a0", "t2star"],
            &[line.intercept.exp(), T::infinity()],
            &[T::zero(), T::infinity()],
            line.residual_norm,
            false,
            1,
        ));
    }
    let seed = vec![line.intercept.exp(), (-line.slope).sqrt().recip()];

    let taus_v = taus.to_vec();
    let amps_v = amplitudes.to_vec();
    let model = move |theta: &[T]| -> Vec<T> {
        let (a0, t2star) = (theta[0], theta[1]);
        taus_v
            .iter()
            .zip(&amps_v)
            .map(|(t, a)| {
                let x = *t / t2star;
                a0 * (-x * x).exp() - *a
            })
            .collect()
    };
    let out = lm_fit(&model, seed);
    let errors = [
        out.covariance[0][0].max(T::zero()).sqrt(),
        out.covariance[1][1].max(T::zero()).sqrt(),
    ];
    Ok(FitResult::from_parts(
        &["a0", "t2star"],
        &[out.theta[0], out.theta[1]],
        &errors,
        out.residual_norm,
        out.converged,
        out.iterations,
    ))
}

/// Gaussian line fit of an absorption profile:
/// od(delta) = peak * exp(-4 ln2 (delta - center)^2 / fwhm^2).
/// Seeded from the half-maximum width; degenerate profiles (fewer than 3
/// bins above half maximum) report `converged = false`.
pub fn fit_gaussian_profile<T: Real>(
    profile: &AbsorptionProfile<T>,
) -> Result<FitResult<T>, FitError> {
    let grid = profile.grid();
    let n = grid.count();
    if n < 7 {
        return Err(FitError::TooFewPoints { needed: 7, got: n });
    }
    let od = profile.od();
    let mut peak = od[0];
    let mut peak_idx = 0usize;
    for (i, &v) in od.iter().enumerate() {
        if v > peak {
            peak = v;
            peak_idx = i;
        }
    }
    if !(peak > T::zero()) {
        return Err(FitError::Domain("profile has no absorption".into()));
    }
    let half = peak / rf(2.0);
    let above: Vec<usize> = (0..n).filter(|&i| od[i] >= half).collect();
    if above.len() < 3 {
        // Narrower than the grid can resolve.
        let zeros = vec![T::zero(); 3];
        return Ok(FitResult::from_parts(
            &["center", "fwhm", "peak_od"],
            &[grid.value(peak_idx), grid.step(), peak],
            &zeros,
            T::infinity(),
            false,
            0,
        ));
    }
    let fwhm_seed = grid.step() * rf((above.len() - 1) as f64);
    let center_seed = grid.value(peak_idx);

    let deltas: Vec<T> = grid.values().collect();
    let od_v = od.to_vec();
    let four_ln2 = rf::<T>(4.0) * T::LN_2();
    let model = move |theta: &[T]| -> Vec<T> {
        let (p, c, w) = (theta[0], theta[1], theta[2]);
        deltas
            .iter()
            .zip(&od_v)
            .map(|(d, o)| {
                let x = *d - c;
                p * (-four_ln2 * x * x / (w * w)).exp() - *o
            })
            .collect()
    };
    let out = lm_fit(&model, vec![peak, center_seed, fwhm_seed]);
    let errors = [
        out.covariance[1][1].max(T::zero()).sqrt(),
        out.covariance[2][2].max(T::zero()).sqrt().abs(),
        out.covariance[0][0].max(T::zero()).sqrt(),
    ];
    Ok(FitResult::from_parts(
        &["center", "fwhm", "peak_od"],
        &[out.theta[1], out.theta[2].abs(), out.theta[0]],
        &errors,
        out.residual_norm,
        out.converged,
        out.iterations,
    ))
}

/// Transfer efficiency of a single rephasing pulse from the
/// zero-storage-time efficiency and the optical depth:
/// eta_t = sqrt(eta0 exp(OD) / OD^2). Errors out when the inputs imply
/// eta_t > 1.
pub fn deduce_eta_t<T: Real>(eta0: T, od: T) -> Result<T, FitError> {
    if !(eta0 > T::zero()) || !(eta0 <= T::one()) {
        return Err(FitError::Domain("eta0 must lie in (0, 1]".into()));
    }
    if !(od > T::zero()) {
        return Err(FitError::Domain("od must be positive".into()));
    }
    let eta_t = (eta0 * od.exp()).sqrt() / od;
    let slack = rf::<T>(1e-9);
    if eta_t > T::one() + slack {
        return Err(FitError::InconsistentInputs(format!(
            "implied transfer efficiency {} exceeds 1",
            eta_t
        )));
    }
    Ok(eta_t.min(T::one()))
}

/// Inhomogeneous spin linewidth (FWHM, Hz) from the Gaussian spin
/// dephasing time: gamma = sqrt(2 ln2) / (pi * T2star).
pub fn gamma_inh_from_t2star<T: Real>(t2star: T) -> T {
    (rf::<T>(2.0) * T::LN_2()).sqrt() / (T::PI() * t2star)
}

/// Gaussian-beam focal spot diameter: D = 2.36 f lambda / (pi D0).
pub fn focal_spot_diameter<T: Real>(focal_length: T, wavelength: T, beam_diameter: T) -> T {
    rf::<T>(2.36) * focal_length * wavelength / (T::PI() * beam_diameter)
}
