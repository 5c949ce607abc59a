//! Output transforms that build initial and boundary conditions directly
//! into the network output.
//!
//! Every transform has the shape `u_hat(x, t) = A(x, t) + B(x, t) * net(e(x, t))`
//! where `e` is the input embedding. `A` carries the initial profile, `B`
//! vanishes where conditions must hold exactly, and both are smooth, so the
//! transformed output stays differentiable to the orders the residuals need.

use std::f64::consts::PI;

/// How `(x, t)` is presented to the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputEmbedding {
    /// Two features: `(x, t)`.
    RawXt,
    /// Three features: `(cos(pi x), sin(pi x), t)`, which makes the network
    /// output 2-periodic in `x`.
    PeriodicX,
}

impl InputEmbedding {
    pub fn dim(&self) -> usize {
        match self {
            InputEmbedding::RawXt => 2,
            InputEmbedding::PeriodicX => 3,
        }
    }
}

/// Condition-enforcing composition applied on top of the raw network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputTransform {
    /// `u_hat = net(x, t)`; used for tests that probe the raw network.
    Identity,
    /// `u_hat = sin(pi x) + sin(4 pi x)/2 + t^2 (1 - x^2) net(x, t)`.
    ///
    /// The `t^2` factor pins both the initial value and the initial time
    /// derivative; `1 - x^2` pins the homogeneous boundary.
    Wave,
    /// `u_hat = sin(pi x) + t * net(cos(pi x), sin(pi x), t)`; periodicity
    /// comes from the embedding rather than a boundary factor.
    Convection,
    /// `u_hat = x^2 cos(pi x) + t (1 - x^2) net(x, t)`; the boundary value
    /// `-1` is inherited from the initial profile at `x = +-1`.
    AllenCahn,
    /// `u_hat = -sin(pi x) + t (1 - x^2) net(x, t)`.
    Burgers,
}

/// `A`, `B` and their partials at one point, up to the orders used anywhere
/// in the residuals.
#[derive(Debug, Clone, Copy, Default)]
pub struct FactorJets {
    pub a: f64,
    pub a_x: f64,
    pub a_xx: f64,
    pub a_t: f64,
    pub a_tt: f64,
    pub b: f64,
    pub b_x: f64,
    pub b_xx: f64,
    pub b_t: f64,
    pub b_tt: f64,
}

/// Network input features and their `(x, t)` derivatives at one point.
/// Only the first [`dim`](InputEmbedding::dim) entries of each row are used.
#[derive(Debug, Clone, Copy)]
pub struct FeatureJets {
    pub value: [f64; 3],
    pub dx: [f64; 3],
    pub dt: [f64; 3],
    pub dxx: [f64; 3],
    pub dtt: [f64; 3],
}

impl OutputTransform {
    pub fn embedding(&self) -> InputEmbedding {
        match self {
            OutputTransform::Convection => InputEmbedding::PeriodicX,
            _ => InputEmbedding::RawXt,
        }
    }

    /// Network input dimension implied by the embedding.
    pub fn input_dim(&self) -> usize {
        self.embedding().dim()
    }

    pub fn feature_jets(&self, x: f64, t: f64) -> FeatureJets {
        match self.embedding() {
            InputEmbedding::RawXt => FeatureJets {
                value: [x, t, 0.0],
                dx: [1.0, 0.0, 0.0],
                dt: [0.0, 1.0, 0.0],
                dxx: [0.0; 3],
                dtt: [0.0; 3],
            },
            InputEmbedding::PeriodicX => {
                let (s, c) = (PI * x).sin_cos();
                FeatureJets {
                    value: [c, s, t],
                    dx: [-PI * s, PI * c, 0.0],
                    dt: [0.0, 0.0, 1.0],
                    dxx: [-PI * PI * c, -PI * PI * s, 0.0],
                    dtt: [0.0; 3],
                }
            }
        }
    }

    pub fn factor_jets(&self, x: f64, t: f64) -> FactorJets {
        match self {
            OutputTransform::Identity => FactorJets {
                b: 1.0,
                ..Default::default()
            },
            OutputTransform::Wave => {
                let (s1, c1) = (PI * x).sin_cos();
                let (s4, c4) = (4.0 * PI * x).sin_cos();
                let g = 1.0 - x * x;
                FactorJets {
                    a: s1 + 0.5 * s4,
                    a_x: PI * c1 + 2.0 * PI * c4,
                    a_xx: -PI * PI * s1 - 8.0 * PI * PI * s4,
                    a_t: 0.0,
                    a_tt: 0.0,
                    b: t * t * g,
                    b_x: -2.0 * x * t * t,
                    b_xx: -2.0 * t * t,
                    b_t: 2.0 * t * g,
                    b_tt: 2.0 * g,
                }
            }
            OutputTransform::Convection => {
                let (s1, c1) = (PI * x).sin_cos();
                FactorJets {
                    a: s1,
                    a_x: PI * c1,
                    a_xx: -PI * PI * s1,
                    b: t,
                    b_t: 1.0,
                    ..Default::default()
                }
            }
            OutputTransform::AllenCahn => {
                let (s1, c1) = (PI * x).sin_cos();
                let g = 1.0 - x * x;
                FactorJets {
                    a: x * x * c1,
                    a_x: 2.0 * x * c1 - PI * x * x * s1,
                    a_xx: 2.0 * c1 - 4.0 * PI * x * s1 - PI * PI * x * x * c1,
                    a_t: 0.0,
                    a_tt: 0.0,
                    b: t * g,
                    b_x: -2.0 * x * t,
                    b_xx: -2.0 * t,
                    b_t: g,
                    b_tt: 0.0,
                }
            }
            OutputTransform::Burgers => {
                let (s1, c1) = (PI * x).sin_cos();
                let g = 1.0 - x * x;
                FactorJets {
                    a: -s1,
                    a_x: -PI * c1,
                    a_xx: PI * PI * s1,
                    a_t: 0.0,
                    a_tt: 0.0,
                    b: t * g,
                    b_x: -2.0 * x * t,
                    b_xx: -2.0 * t,
                    b_t: g,
                    b_tt: 0.0,
                }
            }
        }
    }

    /// Transformed value from a raw network output at one point.
    pub fn apply_value(&self, x: f64, t: f64, net: f64) -> f64 {
        let f = self.factor_jets(x, t);
        f.a + f.b * net
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central-difference check of the hand-written factor derivatives.
    #[test]
    fn factor_jets_match_finite_differences() {
        let transforms = [
            OutputTransform::Wave,
            OutputTransform::Convection,
            OutputTransform::AllenCahn,
            OutputTransform::Burgers,
        ];
        let h = 1e-5;
        for tr in transforms {
            for &(x, t) in &[(0.3, 0.4), (-0.7, 0.9), (0.05, 0.15)] {
                let f = tr.factor_jets(x, t);
                let fx = |x: f64| tr.factor_jets(x, t);
                let ft = |t: f64| tr.factor_jets(x, t);
                let dax = (fx(x + h).a - fx(x - h).a) / (2.0 * h);
                let daxx = (fx(x + h).a - 2.0 * f.a + fx(x - h).a) / (h * h);
                let dbt = (ft(t + h).b - ft(t - h).b) / (2.0 * h);
                let dbtt = (ft(t + h).b - 2.0 * f.b + ft(t - h).b) / (h * h);
                let dbx = (fx(x + h).b - fx(x - h).b) / (2.0 * h);
                let dbxx = (fx(x + h).b - 2.0 * f.b + fx(x - h).b) / (h * h);
                assert!((dax - f.a_x).abs() < 1e-6, "{tr:?} a_x");
                assert!((daxx - f.a_xx).abs() < 1e-4, "{tr:?} a_xx");
                assert!((dbt - f.b_t).abs() < 1e-6, "{tr:?} b_t");
                assert!((dbtt - f.b_tt).abs() < 1e-4, "{tr:?} b_tt");
                assert!((dbx - f.b_x).abs() < 1e-6, "{tr:?} b_x");
                assert!((dbxx - f.b_xx).abs() < 1e-4, "{tr:?} b_xx");
            }
        }
    }

    #[test]
    fn boundary_factors_vanish() {
        for tr in [OutputTransform::Wave, OutputTransform::AllenCahn, OutputTransform::Burgers] {
            for t in [0.1, 0.5, 1.0] {
                assert_eq!(tr.factor_jets(1.0, t).b, 0.0);
                assert_eq!(tr.factor_jets(-1.0, t).b, 0.0);
            }
        }
        // All transforms kill the network at t = 0.
        for tr in [
            OutputTransform::Wave,
            OutputTransform::Convection,
            OutputTransform::AllenCahn,
            OutputTransform::Burgers,
        ] {
            assert_eq!(tr.factor_jets(0.3, 0.0).b, 0.0);
        }
        // Wave also pins the initial time derivative.
        assert_eq!(OutputTransform::Wave.factor_jets(0.3, 0.0).b_t, 0.0);
    }

    #[test]
    fn periodic_embedding_is_periodic() {
        let tr = OutputTransform::Convection;
        let a = tr.feature_jets(-1.0, 0.7);
        let b = tr.feature_jets(1.0, 0.7);
        for i in 0..3 {
            assert!((a.value[i] - b.value[i]).abs() < 1e-15);
        }
    }
}
