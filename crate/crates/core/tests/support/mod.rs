//! Independent oracles shared by the acceptance suite. Everything here is
//! deliberately written against the math, not against the library's
//! implementation paths.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pinndeim::autodiff::{evaluate, NetworkParams};
use pinndeim::domain::Point;
use pinndeim::transform::OutputTransform;

/// Interior points with a margin so central stencils stay inside the domain.
pub fn interior_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::new(rng.gen_range(-0.95..0.95), rng.gen_range(0.05..0.95)))
        .collect()
}

/// Transformed output values for a whole batch, via plain forward passes.
pub fn uhat_batch(params: &NetworkParams, tr: &OutputTransform, pts: &[Point]) -> Vec<f64> {
    let dim = tr.input_dim();
    let inputs = Array2::from_shape_fn((pts.len(), dim), |(i, d)| {
        tr.feature_jets(pts[i].x, pts[i].t).value[d]
    });
    let net = evaluate(params, &inputs).unwrap();
    pts.iter()
        .zip(net.iter())
        .map(|(p, &n)| tr.apply_value(p.x, p.t, n))
        .collect()
}

/// Batch l2 relative error.
pub fn rel_l2(got: &[f64], want: &[f64]) -> f64 {
    let num: f64 = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

/// Brute-force greedy pivot oracle: at each step pick the column with the
/// largest residual norm after explicit orthogonalization against the picks.
pub fn greedy_pivot_oracle(a: &Array2<f64>) -> Vec<usize> {
    let (rows, cols) = a.dim();
    let steps = rows.min(cols);
    let mut residual = a.clone();
    let mut remaining: Vec<usize> = (0..cols).collect();
    let mut picks = Vec::new();
    for _ in 0..steps {
        let mut best = remaining[0];
        let mut best_norm = -1.0;
        for &j in &remaining {
            let n: f64 = residual.column(j).iter().map(|v| v * v).sum();
            if n > best_norm {
                best = j;
                best_norm = n;
            }
        }
        picks.push(best);
        remaining.retain(|&j| j != best);
        let q: Vec<f64> = {
            let c = residual.column(best);
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter().map(|v| v / n).collect()
        };
        for &j in &remaining {
            let dot: f64 = (0..rows).map(|i| residual[[i, j]] * q[i]).sum();
            for i in 0..rows {
                residual[[i, j]] -= dot * q[i];
            }
        }
    }
    picks
}

/// Random matrix with orthonormal factors and a prescribed spectrum.
pub fn matrix_with_spectrum(rows: usize, cols: usize, values: &[f64], seed: u64) -> Array2<f64> {
    let r = values.len();
    let u = random_orthonormal(rows, r, seed);
    let v = random_orthonormal(cols, r, seed.wrapping_add(7919));
    let mut a = Array2::<f64>::zeros((rows, cols));
    for (k, &s) in values.iter().enumerate() {
        for i in 0..rows {
            for j in 0..cols {
                a[[i, j]] += s * u[[i, k]] * v[[j, k]];
            }
        }
    }
    a
}

pub fn random_orthonormal(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Array2::<f64>::from_shape_fn((rows, cols), |_| {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    // Modified Gram-Schmidt, two passes.
    for j in 0..cols {
        for _ in 0..2 {
            for i in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += y[[r, i]] * y[[r, j]];
                }
                for r in 0..rows {
                    y[[r, j]] -= dot * y[[r, i]];
                }
            }
        }
        let norm = y.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        for r in 0..rows {
            y[[r, j]] /= norm;
        }
    }
    y
}

/// Independent Burgers' solver: Crank-Nicolson in time with Newton
/// iteration and a tridiagonal (Thomas) solve, on an `intervals + 1` point
/// grid with `steps` time steps. Values are interpolated onto the requested
/// output grid (bilinear; both grids are far finer than the interpolation
/// error budget).
pub fn burgers_crank_nicolson(
    intervals: usize,
    steps: usize,
    xs_out: &[f64],
    ts_out: &[f64],
) -> Array2<f64> {
    let nu = 0.01 / std::f64::consts::PI;
    let n = intervals + 1;
    let h = 2.0 / intervals as f64;
    let dt = 1.0 / steps as f64;
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * h).collect();

    let mut u: Vec<f64> = xs.iter().map(|&x| -(std::f64::consts::PI * x).sin()).collect();
    let mut out = Array2::<f64>::zeros((xs_out.len(), ts_out.len()));

    let rhs_op = |u: &[f64], i: usize| -> f64 {
        let uxx = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
        let ux = (u[i + 1] - u[i - 1]) / (2.0 * h);
        nu * uxx - u[i] * ux
    };

    let sample = |u: &[f64], x: f64| -> f64 {
        let pos = ((x + 1.0) / h).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let w = pos - i as f64;
        u[i] * (1.0 - w) + u[i + 1] * w
    };

    // Emit any output times in (t_prev, t_cur] by linear interpolation.
    let emit = |u_prev: &[f64], u_cur: &[f64], t_prev: f64, t_cur: f64, out: &mut Array2<f64>| {
        for (jt, &t) in ts_out.iter().enumerate() {
            if t > t_prev && t <= t_cur + 1e-12 {
                let w = ((t - t_prev) / (t_cur - t_prev)).clamp(0.0, 1.0);
                for (jx, &x) in xs_out.iter().enumerate() {
                    out[[jx, jt]] = (1.0 - w) * sample(u_prev, x) + w * sample(u_cur, x);
                }
            }
        }
    };

    // t = 0 column.
    for (jt, &t) in ts_out.iter().enumerate() {
        if t == 0.0 {
            for (jx, &x) in xs_out.iter().enumerate() {
                out[[jx, jt]] = sample(&u, x);
            }
        }
    }

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for step in 0..steps {
        let t_prev = step as f64 * dt;
        let t_cur = t_prev + dt;
        let u_old = u.clone();
        // Newton iteration on v - u_old - dt/2 (L(v) + L(u_old)) = 0.
        let mut v = u.clone();
        for _newton in 0..12 {
            rhs[0] = 0.0;
            rhs[n - 1] = 0.0;
            for i in 1..(n - 1) {
                rhs[i] = -(v[i] - u_old[i] - 0.5 * dt * (rhs_op(&v, i) + rhs_op(&u_old, i)));
            }
            for i in 1..(n - 1) {
                let ux = (v[i + 1] - v[i - 1]) / (2.0 * h);
                sub[i] = -0.5 * dt * (nu / (h * h) + v[i] / (2.0 * h));
                diag[i] = 1.0 - 0.5 * dt * (-2.0 * nu / (h * h) - ux);
                sup[i] = -0.5 * dt * (nu / (h * h) - v[i] / (2.0 * h));
            }
            // Thomas solve over the interior; boundaries stay pinned at 0.
            let mut c_star = vec![0.0; n];
            let mut d_star = vec![0.0; n];
            c_star[1] = sup[1] / diag[1];
            d_star[1] = rhs[1] / diag[1];
            for i in 2..(n - 1) {
                let m = diag[i] - sub[i] * c_star[i - 1];
                c_star[i] = sup[i] / m;
                d_star[i] = (rhs[i] - sub[i] * d_star[i - 1]) / m;
            }
            let mut delta = vec![0.0; n];
            delta[n - 2] = d_star[n - 2];
            for i in (1..(n - 2)).rev() {
                delta[i] = d_star[i] - c_star[i] * delta[i + 1];
            }
            let mut worst = 0.0f64;
            for i in 1..(n - 1) {
                v[i] += delta[i];
                worst = worst.max(delta[i].abs());
            }
            if worst <= 1e-12 {
                break;
            }
        }
        u = v;
        emit(&u_old, &u, t_prev, t_cur, &mut out);
    }
    out
}
