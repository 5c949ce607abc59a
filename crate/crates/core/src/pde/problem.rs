//! Benchmark problem definitions: residual operators and their transforms.

use std::f64::consts::PI;

use ndarray::Array1;

use crate::autodiff::{
    self, BatchObjective, DerivativeBundle, DerivativeRequest, NetworkParams,
};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::transform::OutputTransform;

pub const WAVE_SPEED_SQ: f64 = 4.0;
pub const CONVECTION_SPEED: f64 = 20.0;
pub const ALLEN_CAHN_DIFFUSIVITY: f64 = 1e-4;
pub const ALLEN_CAHN_REACTION: f64 = 5.0;
pub const BURGERS_VISCOSITY: f64 = 0.01 / PI;

/// Which benchmark equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeKind {
    Wave,
    Convection,
    AllenCahn,
    Burgers,
}

impl PdeKind {
    pub fn name(&self) -> &'static str {
        match self {
            PdeKind::Wave => "wave",
            PdeKind::Convection => "convection",
            PdeKind::AllenCahn => "allen_cahn",
            PdeKind::Burgers => "burgers",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "wave" => Ok(PdeKind::Wave),
            "convection" => Ok(PdeKind::Convection),
            "allen_cahn" => Ok(PdeKind::AllenCahn),
            "burgers" => Ok(PdeKind::Burgers),
            other => Err(Error::Config(format!("unknown pde '{other}'"))),
        }
    }
}

/// Sign convention for the Allen-Cahn reaction term.
///
/// `AsPrinted` solves `u_t = 1e-4 u_xx + 5 (u^3 - u)`; `Conventional` solves
/// the usual phase-separation form `u_t = 1e-4 u_xx - 5 (u^3 - u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionSign {
    AsPrinted,
    Conventional,
}

impl ReactionSign {
    /// Multiplier on `5 (u^3 - u)` on the right-hand side.
    fn rhs_sign(&self) -> f64 {
        match self {
            ReactionSign::AsPrinted => 1.0,
            ReactionSign::Conventional => -1.0,
        }
    }
}

/// One benchmark problem: residual form, derivative needs, transform, and
/// reference-solution handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PdeProblem {
    pub kind: PdeKind,
    /// Only meaningful for Allen-Cahn.
    pub reaction_sign: ReactionSign,
}

impl PdeProblem {
    pub fn new(kind: PdeKind) -> Self {
        PdeProblem {
            kind,
            reaction_sign: ReactionSign::AsPrinted,
        }
    }

    pub fn allen_cahn(sign: ReactionSign) -> Self {
        PdeProblem {
            kind: PdeKind::AllenCahn,
            reaction_sign: sign,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Distinguishes Allen-Cahn sign variants in cache file names.
    pub fn cache_key(&self) -> String {
        match self.kind {
            PdeKind::AllenCahn => match self.reaction_sign {
                ReactionSign::AsPrinted => "allen_cahn-as_printed".into(),
                ReactionSign::Conventional => "allen_cahn-conventional".into(),
            },
            other => other.name().into(),
        }
    }

    pub fn transform(&self) -> OutputTransform {
        match self.kind {
            PdeKind::Wave => OutputTransform::Wave,
            PdeKind::Convection => OutputTransform::Convection,
            PdeKind::AllenCahn => OutputTransform::AllenCahn,
            PdeKind::Burgers => OutputTransform::Burgers,
        }
    }

    /// Network input dimension after the transform's embedding.
    pub fn input_dim(&self) -> usize {
        self.transform().input_dim()
    }

    /// Derivatives the residual consumes.
    pub fn derivative_request(&self) -> DerivativeRequest {
        let mut r = DerivativeRequest::value_only();
        match self.kind {
            PdeKind::Wave => {
                r.dxx = true;
                r.dtt = true;
            }
            PdeKind::Convection => {
                r.dx = true;
                r.dt = true;
            }
            PdeKind::AllenCahn => {
                r.dt = true;
                r.dxx = true;
            }
            PdeKind::Burgers => {
                r.dx = true;
                r.dt = true;
                r.dxx = true;
            }
        }
        r
    }

    /// Initial profile `u_0(x)`.
    pub fn initial_condition(&self, x: f64) -> f64 {
        match self.kind {
            PdeKind::Wave => (PI * x).sin() + 0.5 * (4.0 * PI * x).sin(),
            PdeKind::Convection => (PI * x).sin(),
            PdeKind::AllenCahn => x * x * (PI * x).cos(),
            PdeKind::Burgers => -(PI * x).sin(),
        }
    }

    /// Pointwise residual from an already-computed derivative bundle.
    pub fn residual_from_bundle(&self, bundle: &DerivativeBundle) -> Array1<f64> {
        let n = bundle.len();
        let mut r = Array1::zeros(n);
        match self.kind {
            PdeKind::Wave => {
                let uxx = bundle.u_xx();
                let utt = bundle.u_tt();
                for i in 0..n {
                    r[i] = utt[i] - WAVE_SPEED_SQ * uxx[i];
                }
            }
            PdeKind::Convection => {
                let ux = bundle.u_x();
                let ut = bundle.u_t();
                for i in 0..n {
                    r[i] = ut[i] + CONVECTION_SPEED * ux[i];
                }
            }
            PdeKind::AllenCahn => {
                let sign = self.reaction_sign.rhs_sign();
                let ut = bundle.u_t();
                let uxx = bundle.u_xx();
                for i in 0..n {
                    let u = bundle.u[i];
                    r[i] = ut[i]
                        - ALLEN_CAHN_DIFFUSIVITY * uxx[i]
                        - sign * ALLEN_CAHN_REACTION * (u * u * u - u);
                }
            }
            PdeKind::Burgers => {
                let ux = bundle.u_x();
                let ut = bundle.u_t();
                let uxx = bundle.u_xx();
                for i in 0..n {
                    r[i] = ut[i] - BURGERS_VISCOSITY * uxx[i] + bundle.u[i] * ux[i];
                }
            }
        }
        r
    }

    /// Residual of the transformed network output at each point.
    pub fn residual(&self, params: &NetworkParams, points: &[Point]) -> Result<Array1<f64>> {
        let bundle = autodiff::input_derivatives(
            params,
            points,
            self.derivative_request(),
            &self.transform(),
        )?;
        Ok(self.residual_from_bundle(&bundle))
    }

    /// Transformed network output at each point.
    pub fn transformed_output(&self, params: &NetworkParams, points: &[Point]) -> Result<Array1<f64>> {
        let bundle = autodiff::input_derivatives(
            params,
            points,
            DerivativeRequest::value_only(),
            &self.transform(),
        )?;
        Ok(bundle.u)
    }

    /// Mean-squared-residual objective over a batch of `n` points.
    pub fn residual_objective(&self, n: usize) -> ResidualObjective {
        ResidualObjective {
            problem: *self,
            scale: 1.0 / n as f64,
        }
    }
}

/// `mean_i r_i^2` with the chain rule through each residual form.
pub struct ResidualObjective {
    problem: PdeProblem,
    scale: f64,
}

impl ResidualObjective {
    pub fn residuals(&self, bundle: &DerivativeBundle) -> Array1<f64> {
        self.problem.residual_from_bundle(bundle)
    }
}

impl BatchObjective for ResidualObjective {
    fn request(&self) -> DerivativeRequest {
        self.problem.derivative_request()
    }

    fn value_and_adjoint(&self, bundle: &DerivativeBundle) -> (f64, DerivativeBundle) {
        let n = bundle.len();
        let r = self.problem.residual_from_bundle(bundle);
        let value = self.scale * r.iter().map(|v| v * v).sum::<f64>();

        let mut adj = DerivativeBundle::zeros(n, self.request());
        match self.problem.kind {
            PdeKind::Wave => {
                let gxx = adj.u_xx.as_mut().unwrap();
                for i in 0..n {
                    gxx[i] = -WAVE_SPEED_SQ * 2.0 * self.scale * r[i];
                }
                let gtt = adj.u_tt.as_mut().unwrap();
                for i in 0..n {
                    gtt[i] = 2.0 * self.scale * r[i];
                }
            }
            PdeKind::Convection => {
                let gx = adj.u_x.as_mut().unwrap();
                for i in 0..n {
                    gx[i] = CONVECTION_SPEED * 2.0 * self.scale * r[i];
                }
                let gt = adj.u_t.as_mut().unwrap();
                for i in 0..n {
                    gt[i] = 2.0 * self.scale * r[i];
                }
            }
            PdeKind::AllenCahn => {
                let sign = self.problem.reaction_sign.rhs_sign();
                for i in 0..n {
                    let seed = 2.0 * self.scale * r[i];
                    let u = bundle.u[i];
                    adj.u[i] = -sign * ALLEN_CAHN_REACTION * (3.0 * u * u - 1.0) * seed;
                    adj.u_t.as_mut().unwrap()[i] = seed;
                    adj.u_xx.as_mut().unwrap()[i] = -ALLEN_CAHN_DIFFUSIVITY * seed;
                }
            }
            PdeKind::Burgers => {
                let ux = bundle.u_x().clone();
                for i in 0..n {
                    let seed = 2.0 * self.scale * r[i];
                    adj.u[i] = ux[i] * seed;
                    adj.u_x.as_mut().unwrap()[i] = bundle.u[i] * seed;
                    adj.u_t.as_mut().unwrap()[i] = seed;
                    adj.u_xx.as_mut().unwrap()[i] = -BURGERS_VISCOSITY * seed;
                }
            }
        }
        (value, adj)
    }
}
