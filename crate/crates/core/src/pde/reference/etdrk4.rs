//! Fourier spectral Allen-Cahn solver with fourth-order exponential time
//! differencing (ETDRK4).
//!
//! The stiff linear part (diffusion plus the linear reaction contribution)
//! is integrated exactly in Fourier space; the cubic term is treated by the
//! ETDRK4 stages. The phi-function coefficients are evaluated by contour
//! integration, which avoids cancellation for small `h L`.

use std::f64::consts::PI;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::pde::problem::{ALLEN_CAHN_DIFFUSIVITY, ALLEN_CAHN_REACTION};
use crate::pde::ReactionSign;

/// Number of Fourier collocation points on the periodic extension of
/// `[-1, 1]`.
pub const SPECTRAL_MODES: usize = 512;

/// Default ceiling on the time step.
pub const DEFAULT_DT: f64 = 1e-5;

/// Solve Allen-Cahn from `u_0(x) = x^2 cos(pi x)` and sample onto the
/// `xs x ts` grid. `ts` must be sorted ascending starting at 0; the step
/// inside each output interval is the largest value `<= dt_max` that tiles
/// the interval exactly.
pub fn allen_cahn_etdrk4(
    xs: &[f64],
    ts: &[f64],
    sign: ReactionSign,
    dt_max: f64,
    n_modes: usize,
) -> Result<Array2<f64>> {
    if ts.is_empty() || ts[0] != 0.0 {
        return Err(Error::Argument("time grid must start at 0".into()));
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("time grid must be strictly increasing".into()));
    }
    if !n_modes.is_power_of_two() {
        return Err(Error::Argument("mode count must be a power of two".into()));
    }

    let n = n_modes;
    let nu = ALLEN_CAHN_DIFFUSIVITY;
    // Linear/nonlinear split per sign convention:
    //   conventional: u_t = nu u_xx + 5u - 5u^3  -> L = -nu k^2 + 5, N = -5u^3
    //   as printed:   u_t = nu u_xx + 5u^3 - 5u  -> L = -nu k^2 - 5, N = +5u^3
    let (lin_react, cubic) = match sign {
        ReactionSign::Conventional => (ALLEN_CAHN_REACTION, -ALLEN_CAHN_REACTION),
        ReactionSign::AsPrinted => (-ALLEN_CAHN_REACTION, ALLEN_CAHN_REACTION),
    };

    // Wavenumbers for period 2: kappa_m = pi m in FFT ordering.
    let kappa: Vec<f64> = (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
            PI * m as f64
        })
        .collect();
    let lin: Vec<f64> = kappa.iter().map(|k| -nu * k * k + lin_react).collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    // Initial spectrum from the collocation values.
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = -1.0 + 2.0 * j as f64 / n as f64;
            Complex64::new(x * x * (PI * x).cos(), 0.0)
        })
        .collect();
    fft.process(&mut v);

    let mut values = Array2::<f64>::zeros((xs.len(), ts.len()));
    // At t = 0 the solution is the initial profile itself; sampling it in
    // closed form avoids the trigonometric interpolation error from the
    // derivative kink of the periodic extension at x = +-1.
    for (ix, &x) in xs.iter().enumerate() {
        values[[ix, 0]] = x * x * (PI * x).cos();
    }

    // All interior intervals share a step when the grid is uniform; the
    // coefficient set is cached per step size.
    let mut coeffs: Option<(f64, EtdrkCoeffs)> = None;
    let mut scratch = vec![Complex64::default(); n];

    for seg in 1..ts.len() {
        let interval = ts[seg] - ts[seg - 1];
        let steps = (interval / dt_max).ceil().max(1.0) as usize;
        let h = interval / steps as f64;
        let c = match &coeffs {
            Some((ch, c)) if (ch - h).abs() <= f64::EPSILON * h => c.clone(),
            _ => {
                let c = EtdrkCoeffs::new(&lin, h);
                coeffs = Some((h, c));
                coeffs.as_ref().unwrap().1.clone()
            }
        };

        for _ in 0..steps {
            etdrk4_step(&mut v, &c, cubic, fft.as_ref(), ifft.as_ref(), &mut scratch);
        }
        sample_spectrum(&v, &kappa, xs, &mut values, seg);
    }

    if values.iter().any(|u| !u.is_finite()) {
        return Err(Error::Numerical("allen-cahn integration diverged".into()));
    }
    Ok(values)
}

#[derive(Clone)]
struct EtdrkCoeffs {
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl EtdrkCoeffs {
    fn new(lin: &[f64], h: f64) -> Self {
        let n = lin.len();
        let m = 32usize;
        // Points on the unit circle around each h*L value.
        let contour: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, PI * (j as f64 + 0.5) / m as f64))
            .collect();

        let mut c = EtdrkCoeffs {
            e: vec![0.0; n],
            e2: vec![0.0; n],
            q: vec![0.0; n],
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            f3: vec![0.0; n],
        };
        for (k, &l) in lin.iter().enumerate() {
            let hl = h * l;
            c.e[k] = hl.exp();
            c.e2[k] = (hl / 2.0).exp();
            let mut q = Complex64::default();
            let mut f1 = Complex64::default();
            let mut f2 = Complex64::default();
            let mut f3 = Complex64::default();
            for &r in &contour {
                let z = Complex64::new(hl, 0.0) + r;
                let ez = z.exp();
                let z2 = z * z;
                let z3 = z2 * z;
                q += ((z / 2.0).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
                f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
                f3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
            }
            let scale = h / m as f64;
            c.q[k] = q.re * scale;
            c.f1[k] = f1.re * scale;
            c.f2[k] = f2.re * scale;
            c.f3[k] = f3.re * scale;
        }
        c
    }
}

/// Cubic nonlinearity evaluated in physical space: returns `fft(cubic * u^3)`.
fn nonlinear(
    v: &[Complex64],
    cubic: f64,
    fft: &dyn rustfft::Fft<f64>,
    ifft: &dyn rustfft::Fft<f64>,
    scratch: &mut [Complex64],
) -> Vec<Complex64> {
    let n = v.len() as f64;
    scratch.copy_from_slice(v);
    ifft.process(scratch);
    for s in scratch.iter_mut() {
        let u = s.re / n;
        *s = Complex64::new(cubic * u * u * u, 0.0);
    }
    let mut out = scratch.to_vec();
    fft.process(&mut out);
    out
}

fn etdrk4_step(
    v: &mut [Complex64],
    c: &EtdrkCoeffs,
    cubic: f64,
    fft: &dyn rustfft::Fft<f64>,
    ifft: &dyn rustfft::Fft<f64>,
    scratch: &mut [Complex64],
) {
    let n = v.len();
    let nv = nonlinear(v, cubic, fft, ifft, scratch);
    let mut a = vec![Complex64::default(); n];
    for k in 0..n {
        a[k] = c.e2[k] * v[k] + c.q[k] * nv[k];
    }
    let na = nonlinear(&a, cubic, fft, ifft, scratch);
    let mut b = vec![Complex64::default(); n];
    for k in 0..n {
        b[k] = c.e2[k] * v[k] + c.q[k] * na[k];
    }
    let nb = nonlinear(&b, cubic, fft, ifft, scratch);
    let mut cc = vec![Complex64::default(); n];
    for k in 0..n {
        cc[k] = c.e2[k] * a[k] + c.q[k] * (2.0 * nb[k] - nv[k]);
    }
    let nc = nonlinear(&cc, cubic, fft, ifft, scratch);
    for k in 0..n {
        v[k] = c.e[k] * v[k] + nv[k] * c.f1[k] + 2.0 * (na[k] + nb[k]) * c.f2[k] + nc[k] * c.f3[k];
    }
}

/// Evaluate the trigonometric interpolant of the spectrum at arbitrary `xs`
/// and store into column `it`. The DFT basis is anchored at the first
/// collocation point `x = -1`, so the interpolant argument is `x + 1`.
fn sample_spectrum(v: &[Complex64], kappa: &[f64], xs: &[f64], out: &mut Array2<f64>, it: usize) {
    let n = v.len() as f64;
    for (ix, &x) in xs.iter().enumerate() {
        let shifted = x + 1.0;
        let mut acc = 0.0;
        for (vk, k) in v.iter().zip(kappa) {
            let (s, c) = (k * shifted).sin_cos();
            acc += vk.re * c - vk.im * s;
        }
        out[[ix, it]] = acc / n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_column_reproduces_ic() {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let ts = vec![0.0, 0.01];
        let grid =
            allen_cahn_etdrk4(&xs, &ts, ReactionSign::Conventional, 1e-4, 128).unwrap();
        for (ix, &x) in xs.iter().enumerate() {
            let want = x * x * (PI * x).cos();
            assert!(
                (grid[[ix, 0]] - want).abs() < 1e-14,
                "x = {x}: {} vs {want}",
                grid[[ix, 0]]
            );
            // The first evolved column stays close to the initial profile
            // over a 0.01 horizon away from the boundary kink.
            if x.abs() < 0.9 {
                assert!(
                    (grid[[ix, 1]] - want).abs() < 5e-2,
                    "x = {x}: {} vs {want}",
                    grid[[ix, 1]]
                );
            }
        }
    }

    #[test]
    fn boundary_stays_near_minus_one() {
        let xs = vec![-1.0, 1.0];
        let ts = vec![0.0, 0.25, 0.5];
        let grid =
            allen_cahn_etdrk4(&xs, &ts, ReactionSign::Conventional, 1e-4, 256).unwrap();
        for it in 0..3 {
            assert!((grid[[0, it]] + 1.0).abs() < 1e-2);
            assert!((grid[[1, it]] + 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn short_horizon_self_convergence() {
        let xs: Vec<f64> = (0..17).map(|i| -1.0 + 0.125 * i as f64).collect();
        let ts = vec![0.0, 0.05];
        let coarse =
            allen_cahn_etdrk4(&xs, &ts, ReactionSign::Conventional, 2e-4, 256).unwrap();
        let fine =
            allen_cahn_etdrk4(&xs, &ts, ReactionSign::Conventional, 1e-4, 256).unwrap();
        let num: f64 = coarse
            .iter()
            .zip(fine.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = fine.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(num / den < 1e-8, "rel change {}", num / den);
    }
}
