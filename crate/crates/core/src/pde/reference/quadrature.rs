//! Gauss-Hermite quadrature and the Cole-Hopf closed form for Burgers'.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::pde::problem::BURGERS_VISCOSITY;

/// Nodes and weights of `n`-point Gauss-Hermite quadrature with weight
/// `exp(-z^2)`.
///
/// Nodes are the eigenvalues of the Jacobi matrix, isolated by Sturm-count
/// bisection (robust at any order) and polished with a few Newton steps on
/// the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Argument("gauss_hermite needs n >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];

    // Off-diagonals of the (zero-diagonal) Jacobi matrix.
    let offdiag: Vec<f64> = (1..n).map(|j| (j as f64 / 2.0).sqrt()).collect();
    let bound = 2.0 * offdiag.iter().cloned().fold(0.0, f64::max) + 1.0;

    // Number of eigenvalues strictly below x, from the LDL^T inertia count.
    let count_below = |x: f64| -> usize {
        let mut count = 0usize;
        let mut d = -x;
        if d < 0.0 {
            count += 1;
        }
        for b in &offdiag {
            let mut denom = d;
            if denom.abs() < 1e-300 {
                denom = if denom < 0.0 { -1e-300 } else { 1e-300 };
            }
            d = -x - b * b / denom;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };

    // Roots come in +- pairs; resolve the upper half and mirror.
    let half = n / 2;
    for k in (n - half)..n {
        let mut lo = 0.0;
        let mut hi = bound;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        let mut z = 0.5 * (lo + hi);
        for _ in 0..4 {
            let (p, d) = hermite_pp(n, z);
            let step = p / d;
            let next = z - step;
            if next <= lo || next >= hi {
                break;
            }
            z = next;
            if step.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[k] = z;
        nodes[n - 1 - k] = -z;
        let (_, pp) = hermite_pp(n, z);
        let w = 2.0 / (pp * pp);
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        // Middle root is exactly zero by symmetry.
        let mid = n / 2;
        nodes[mid] = 0.0;
        let (_, pp) = hermite_pp(n, 0.0);
        weights[mid] = 2.0 / (pp * pp);
    }

    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Numerical(format!(
            "gauss_hermite({n}) produced non-distinct nodes"
        )));
    }
    Ok((nodes, weights))
}

/// Orthonormal Hermite value `h_n(z)` and the derivative factor
/// `sqrt(2n) h_{n-1}(z)` used by both Newton steps and the weight formula.
fn hermite_pp(n: usize, z: f64) -> (f64, f64) {
    let pim4 = 1.0 / PI.powf(0.25);
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Burgers' solution via the Cole-Hopf transform, evaluated pointwise with
/// adaptive Gauss-Hermite quadrature.
///
/// With `f(y) = exp(-cos(pi y) / (2 pi nu))`,
///
/// ```text
/// u(x, t) = - int sin(pi (x - eta)) f(x - eta) exp(-eta^2 / (4 nu t)) d eta
///           / int f(x - eta) exp(-eta^2 / (4 nu t)) d eta
/// ```
///
/// and the substitution `eta = sqrt(4 nu t) z` maps both integrals onto the
/// Gauss-Hermite weight. Node counts double until every grid value moves by
/// less than `tol`.
pub fn burgers_cole_hopf(xs: &[f64], ts: &[f64], tol: f64, max_nodes: usize) -> Result<Array2<f64>> {
    let nu = BURGERS_VISCOSITY;
    let mut values = Array2::<f64>::zeros((xs.len(), ts.len()));
    let mut prev: Option<Array2<f64>> = None;
    let mut nodes = 64usize;

    loop {
        let (z, w) = gauss_hermite(nodes)?;
        for (it, &t) in ts.iter().enumerate() {
            if t == 0.0 {
                for (ix, &x) in xs.iter().enumerate() {
                    values[[ix, it]] = -(PI * x).sin();
                }
                continue;
            }
            let scale = (4.0 * nu * t).sqrt();
            for (ix, &x) in xs.iter().enumerate() {
                values[[ix, it]] = cole_hopf_point(x, scale, nu, &z, &w);
            }
        }

        if let Some(p) = &prev {
            let worst = values
                .iter()
                .zip(p.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if worst <= tol {
                return Ok(values);
            }
        }
        if nodes >= max_nodes {
            return Err(Error::Numerical(format!(
                "cole-hopf quadrature did not reach tol {tol} at {nodes} nodes"
            )));
        }
        prev = Some(values.clone());
        nodes *= 2;
    }
}

fn cole_hopf_point(x: f64, scale: f64, nu: f64, z: &[f64], w: &[f64]) -> f64 {
    let c = 1.0 / (2.0 * PI * nu);
    // Shift exponents by their maximum so the weighted sums stay in range.
    let mut max_e = f64::NEG_INFINITY;
    for &zi in z {
        let y = x - scale * zi;
        let e = -c * (PI * y).cos();
        if e > max_e {
            max_e = e;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&zi, &wi) in z.iter().zip(w) {
        let y = x - scale * zi;
        let g = wi * (-c * (PI * y).cos() - max_e).exp();
        num += (PI * y).sin() * g;
        den += g;
    }
    -num / den
}
