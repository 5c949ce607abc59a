use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::domain::Point;
use crate::transform::OutputTransform;

fn random_params(config: &NetworkConfig, seed: u64) -> NetworkParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = NetworkParams::zeros(config);
    for layer in &mut params.layers {
        let bound = (6.0 / (layer.weights.ncols() + layer.weights.nrows()) as f64).sqrt();
        for w in layer.weights.iter_mut() {
            *w = rng.gen_range(-bound..bound);
        }
    }
    params
}

fn random_interior_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::new(rng.gen_range(-0.9..0.9), rng.gen_range(0.1..0.9)))
        .collect()
}

/// Straightforward per-point forward pass, independent of the batched path.
fn naive_forward(params: &NetworkParams, input: &[f64]) -> f64 {
    let mut cur: Vec<f64> = input.to_vec();
    let last = params.layers.len() - 1;
    for (l, layer) in params.layers.iter().enumerate() {
        let mut next = vec![0.0; layer.weights.nrows()];
        for (o, row) in layer.weights.rows().into_iter().enumerate() {
            let mut acc = layer.biases[o];
            for (w, x) in row.iter().zip(&cur) {
                acc += w * x;
            }
            next[o] = if l < last { acc.tanh() } else { acc };
        }
        cur = next;
    }
    cur[0]
}

/// Transformed output value at a point, for finite-difference probing.
fn uhat(params: &NetworkParams, transform: &OutputTransform, x: f64, t: f64) -> f64 {
    let f = transform.feature_jets(x, t);
    let dim = transform.input_dim();
    let inputs = Array2::from_shape_fn((1, dim), |(_, d)| f.value[d]);
    let net = evaluate(params, &inputs).unwrap()[0];
    transform.apply_value(x, t, net)
}

#[test]
fn affine_layer_is_exact() {
    // Single affine layer: out = 0.5 * w1 + 0.25 * w2.
    let params = NetworkParams {
        layers: vec![Layer {
            weights: ndarray::array![[2.0, 4.0]],
            biases: ndarray::array![0.0],
        }],
    };
    let inputs = ndarray::array![[0.5, 0.25]];
    let out = evaluate(&params, &inputs).unwrap();
    assert_eq!(out[0], 0.5 * 2.0 + 0.25 * 4.0);
}

#[test]
fn zero_network_outputs_zero() {
    let params = NetworkParams::zeros(&NetworkConfig::new(2, 5, 64));
    let inputs = Array2::from_shape_fn((7, 2), |(i, j)| (i + j) as f64 * 0.1 - 0.3);
    let out = evaluate(&params, &inputs).unwrap();
    assert!(out.iter().all(|&v| v == 0.0));
}

#[test]
fn batched_forward_matches_naive_oracle() {
    let config = NetworkConfig::new(2, 5, 64);
    let params = random_params(&config, 17);
    let pts = random_interior_points(10, 18);
    let inputs = Array2::from_shape_fn((10, 2), |(i, j)| if j == 0 { pts[i].x } else { pts[i].t });
    let batched = evaluate(&params, &inputs).unwrap();
    for (i, p) in pts.iter().enumerate() {
        let naive = naive_forward(&params, &[p.x, p.t]);
        let rel = (batched[i] - naive).abs() / naive.abs().max(1e-30);
        assert!(rel <= 1e-12, "point {i}: batched {} naive {naive}", batched[i]);
    }
}

#[test]
fn dimension_mismatch_is_config_error() {
    let params = NetworkParams::zeros(&NetworkConfig::new(2, 1, 4));
    let inputs = Array2::<f64>::zeros((3, 3));
    assert!(matches!(
        evaluate(&params, &inputs),
        Err(crate::error::Error::Config(_))
    ));
}

#[test]
fn linear_net_derivatives_are_exact() {
    // net(x, t) = 2x + 3t, identity transform.
    let params = NetworkParams {
        layers: vec![Layer {
            weights: ndarray::array![[2.0, 3.0]],
            biases: ndarray::array![0.5],
        }],
    };
    let pts = vec![Point::new(0.3, 0.7), Point::new(-0.2, 0.1)];
    let bundle = input_derivatives(
        &params,
        &pts,
        DerivativeRequest::all(),
        &OutputTransform::Identity,
    )
    .unwrap();
    for i in 0..2 {
        assert_eq!(bundle.u[i], 2.0 * pts[i].x + 3.0 * pts[i].t + 0.5);
        assert_eq!(bundle.u_x()[i], 2.0);
        assert_eq!(bundle.u_t()[i], 3.0);
        assert_eq!(bundle.u_xx()[i], 0.0);
        assert_eq!(bundle.u_tt()[i], 0.0);
    }
}

#[test]
fn zero_net_burgers_transform_derivative() {
    // u_hat = -sin(pi x) with a zero network; u_x(0.5, t) = -pi cos(pi/2) = 0.
    let params = NetworkParams::zeros(&NetworkConfig::new(2, 2, 8));
    let pts = vec![Point::new(0.5, 0.3), Point::new(0.5, 0.9)];
    let request = DerivativeRequest {
        value: true,
        dx: true,
        ..Default::default()
    };
    let bundle = input_derivatives(&params, &pts, request, &OutputTransform::Burgers).unwrap();
    for i in 0..2 {
        assert!(bundle.u_x()[i].abs() < 1e-15);
    }
}

#[test]
fn input_derivatives_match_finite_differences() {
    let transforms = [
        (OutputTransform::Identity, 2),
        (OutputTransform::Wave, 2),
        (OutputTransform::Convection, 3),
        (OutputTransform::AllenCahn, 2),
        (OutputTransform::Burgers, 2),
    ];
    for (tr, dim) in transforms {
        let config = NetworkConfig::new(dim, 5, 64);
        let params = random_params(&config, 31);
        let pts = random_interior_points(20, 32);
        let bundle = input_derivatives(&params, &pts, DerivativeRequest::all(), &tr).unwrap();

        let h1 = 1e-4;
        let h2 = 1e-3;
        let mut fd = DerivativeBundle::zeros(pts.len(), DerivativeRequest::all());
        for (i, p) in pts.iter().enumerate() {
            let u0 = uhat(&params, &tr, p.x, p.t);
            fd.u[i] = u0;
            fd.u_x.as_mut().unwrap()[i] =
                (uhat(&params, &tr, p.x + h1, p.t) - uhat(&params, &tr, p.x - h1, p.t)) / (2.0 * h1);
            fd.u_t.as_mut().unwrap()[i] =
                (uhat(&params, &tr, p.x, p.t + h1) - uhat(&params, &tr, p.x, p.t - h1)) / (2.0 * h1);
            let u0b = uhat(&params, &tr, p.x, p.t);
            fd.u_xx.as_mut().unwrap()[i] = (uhat(&params, &tr, p.x + h2, p.t) - 2.0 * u0b
                + uhat(&params, &tr, p.x - h2, p.t))
                / (h2 * h2);
            fd.u_tt.as_mut().unwrap()[i] = (uhat(&params, &tr, p.x, p.t + h2) - 2.0 * u0b
                + uhat(&params, &tr, p.x, p.t - h2))
                / (h2 * h2);
        }

        let rel = |a: &Array1<f64>, b: &Array1<f64>| {
            let num = (a - b).mapv(|v| v * v).sum().sqrt();
            let den = b.mapv(|v| v * v).sum().sqrt().max(1e-12);
            num / den
        };
        assert!(rel(bundle.u_x(), fd.u_x()) <= 1e-5, "{tr:?} u_x");
        assert!(rel(bundle.u_t(), fd.u_t()) <= 1e-5, "{tr:?} u_t");
        assert!(rel(bundle.u_xx(), fd.u_xx()) <= 1e-4, "{tr:?} u_xx");
        assert!(rel(bundle.u_tt(), fd.u_tt()) <= 1e-4, "{tr:?} u_tt");
    }
}

#[test]
fn differentiation_is_linear_over_networks() {
    // a*net1 + b*net2 realized as one block-diagonal network.
    let config = NetworkConfig::new(2, 2, 6);
    let p1 = random_params(&config, 41);
    let p2 = random_params(&config, 42);
    let (a, b) = (1.75, -0.4);

    let mut combined = NetworkParams::zeros(&NetworkConfig::new(2, 2, 12));
    for l in 0..2 {
        let w1 = &p1.layers[l].weights;
        let w2 = &p2.layers[l].weights;
        let combo = &mut combined.layers[l];
        if l == 0 {
            for i in 0..6 {
                for j in 0..2 {
                    combo.weights[[i, j]] = w1[[i, j]];
                    combo.weights[[i + 6, j]] = w2[[i, j]];
                }
            }
        } else {
            for i in 0..6 {
                for j in 0..6 {
                    combo.weights[[i, j]] = w1[[i, j]];
                    combo.weights[[i + 6, j + 6]] = w2[[i, j]];
                }
            }
        }
        for i in 0..6 {
            combo.biases[i] = p1.layers[l].biases[i];
            combo.biases[i + 6] = p2.layers[l].biases[i];
        }
    }
    let out = &mut combined.layers[2];
    for j in 0..6 {
        out.weights[[0, j]] = a * p1.layers[2].weights[[0, j]];
        out.weights[[0, j + 6]] = b * p2.layers[2].weights[[0, j]];
    }
    out.biases[0] = a * p1.layers[2].biases[0] + b * p2.layers[2].biases[0];

    let pts = random_interior_points(15, 43);
    let req = DerivativeRequest::all();
    let tr = OutputTransform::Identity;
    let b1 = input_derivatives(&p1, &pts, req, &tr).unwrap();
    let b2 = input_derivatives(&p2, &pts, req, &tr).unwrap();
    let bc = input_derivatives(&combined, &pts, req, &tr).unwrap();

    let check = |got: &Array1<f64>, u1: &Array1<f64>, u2: &Array1<f64>, name: &str| {
        let want = u1 * a + u2 * b;
        let num = (got - &want).mapv(|v| v * v).sum().sqrt();
        let den = want.mapv(|v| v * v).sum().sqrt().max(1e-300);
        assert!(num / den <= 1e-12, "{name}: rel {}", num / den);
    };
    check(&bc.u, &b1.u, &b2.u, "u");
    check(bc.u_x(), b1.u_x(), b2.u_x(), "u_x");
    check(bc.u_t(), b1.u_t(), b2.u_t(), "u_t");
    check(bc.u_xx(), b1.u_xx(), b2.u_xx(), "u_xx");
    check(bc.u_tt(), b1.u_tt(), b2.u_tt(), "u_tt");
}

#[test]
fn repeated_calls_are_bit_identical() {
    let config = NetworkConfig::new(2, 3, 32);
    let params = random_params(&config, 51);
    let pts = random_interior_points(700, 52); // spans multiple chunks
    let req = DerivativeRequest::all();
    let b1 = input_derivatives(&params, &pts, req, &OutputTransform::Wave).unwrap();
    let b2 = input_derivatives(&params, &pts, req, &OutputTransform::Wave).unwrap();
    assert_eq!(b1.u.as_slice().unwrap(), b2.u.as_slice().unwrap());
    assert_eq!(
        b1.u_xx().as_slice().unwrap(),
        b2.u_xx().as_slice().unwrap()
    );
}

/// Objective `sum_i scale * (c . bundle_i - target)^2` used to exercise the
/// reverse sweep over arbitrary channel mixes.
struct MixObjective {
    request: DerivativeRequest,
    coeff: [f64; 5], // u, u_x, u_t, u_xx, u_tt
    target: f64,
    scale: f64,
}

impl BatchObjective for MixObjective {
    fn request(&self) -> DerivativeRequest {
        self.request
    }

    fn value_and_adjoint(&self, bundle: &DerivativeBundle) -> (f64, DerivativeBundle) {
        let n = bundle.len();
        let pick = |arr: &Option<Array1<f64>>, i: usize| arr.as_ref().map_or(0.0, |a| a[i]);
        let mut value = 0.0;
        let mut adj = DerivativeBundle::zeros(n, self.request);
        for i in 0..n {
            let r = self.coeff[0] * bundle.u[i]
                + self.coeff[1] * pick(&bundle.u_x, i)
                + self.coeff[2] * pick(&bundle.u_t, i)
                + self.coeff[3] * pick(&bundle.u_xx, i)
                + self.coeff[4] * pick(&bundle.u_tt, i)
                - self.target;
            value += self.scale * r * r;
            let seed = 2.0 * self.scale * r;
            adj.u[i] = seed * self.coeff[0];
            if let Some(a) = adj.u_x.as_mut() {
                a[i] = seed * self.coeff[1];
            }
            if let Some(a) = adj.u_t.as_mut() {
                a[i] = seed * self.coeff[2];
            }
            if let Some(a) = adj.u_xx.as_mut() {
                a[i] = seed * self.coeff[3];
            }
            if let Some(a) = adj.u_tt.as_mut() {
                a[i] = seed * self.coeff[4];
            }
        }
        (value, adj)
    }
}

#[test]
fn zero_network_value_objective_has_zero_gradient() {
    // obj = 1/2 sum u^2 with a zero network: every gradient path carries a
    // factor of u = 0.
    let params = NetworkParams::zeros(&NetworkConfig::new(2, 3, 16));
    let pts = random_interior_points(12, 61);
    let obj = MixObjective {
        request: DerivativeRequest::value_only(),
        coeff: [1.0, 0.0, 0.0, 0.0, 0.0],
        target: 0.0,
        scale: 0.5,
    };
    let (value, grad) = parameter_gradient(&params, &pts, &OutputTransform::Identity, &obj).unwrap();
    assert_eq!(value, 0.0);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn scalar_closed_form_gradient() {
    // net(x, t) = theta * x; objective = mean over {(1,0), (2,0)} of
    // (u_x - 1)^2 = (theta - 1)^2; gradient at theta = 3 is 4.
    let theta = 3.0;
    let params = NetworkParams {
        layers: vec![Layer {
            weights: ndarray::array![[theta, 0.0]],
            biases: ndarray::array![0.0],
        }],
    };
    let pts = vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
    let obj = MixObjective {
        request: DerivativeRequest {
            value: true,
            dx: true,
            ..Default::default()
        },
        coeff: [0.0, 1.0, 0.0, 0.0, 0.0],
        target: 1.0,
        scale: 0.5, // mean over two points
    };
    let (value, grad) = parameter_gradient(&params, &pts, &OutputTransform::Identity, &obj).unwrap();
    assert!((value - 4.0).abs() < 1e-12);
    assert!((grad[0] - 4.0).abs() < 1e-12, "d/dtheta {}", grad[0]);
    assert_eq!(grad[1], 0.0); // t-weight unused by u_x
    assert_eq!(grad[2], 0.0); // bias unused by u_x
}

#[test]
fn parameter_gradient_matches_finite_differences() {
    // Third-order mixed path: objective consumes second-order input
    // derivatives through the wave transform.
    let config = NetworkConfig::new(2, 2, 8);
    let params = random_params(&config, 71);
    let pts = random_interior_points(25, 72);
    let obj = MixObjective {
        request: DerivativeRequest::all(),
        coeff: [0.6, -0.3, 1.0, 0.05, -0.02],
        target: 0.1,
        scale: 1.0 / 25.0,
    };
    let tr = OutputTransform::Wave;
    let (_, grad) = parameter_gradient(&params, &pts, &tr, &obj).unwrap();

    let flat = params.to_flat();
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut checked = 0;
    while checked < 20 {
        let k = rng.gen_range(0..flat.len());
        let h = 1e-5 * (1.0 + flat[k].abs());
        let mut probe = params.clone();
        let mut bumped = flat.clone();
        bumped[k] += h;
        probe.assign_from_flat(&bumped).unwrap();
        let plus = eval_objective(&probe, &pts, &tr, &obj);
        bumped[k] -= 2.0 * h;
        probe.assign_from_flat(&bumped).unwrap();
        let minus = eval_objective(&probe, &pts, &tr, &obj);
        let fd = (plus - minus) / (2.0 * h);
        let denom = grad[k].abs().max(1e-6);
        assert!(
            (fd - grad[k]).abs() / denom <= 1e-4,
            "param {k}: fd {fd} vs ad {}",
            grad[k]
        );
        checked += 1;
    }
}

fn eval_objective(
    params: &NetworkParams,
    pts: &[Point],
    tr: &OutputTransform,
    obj: &dyn BatchObjective,
) -> f64 {
    let bundle = input_derivatives(params, pts, obj.request(), tr).unwrap();
    obj.value_and_adjoint(&bundle).0
}
