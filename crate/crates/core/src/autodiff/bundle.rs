//! Derivative requests and the per-point results they produce.

use ndarray::Array1;

use crate::error::{Error, Result};

/// Which quantities of the transformed output to compute at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DerivativeRequest {
    pub value: bool,
    pub dx: bool,
    pub dt: bool,
    pub dxx: bool,
    pub dtt: bool,
}

impl DerivativeRequest {
    pub fn value_only() -> Self {
        DerivativeRequest {
            value: true,
            ..Default::default()
        }
    }

    pub fn all() -> Self {
        DerivativeRequest {
            value: true,
            dx: true,
            dt: true,
            dxx: true,
            dtt: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.value || self.dx || self.dt || self.dxx || self.dtt) {
            return Err(Error::Argument("empty derivative request".into()));
        }
        Ok(())
    }

    /// Union with the channels another consumer needs.
    pub fn merge(self, other: DerivativeRequest) -> Self {
        DerivativeRequest {
            value: self.value || other.value,
            dx: self.dx || other.dx,
            dt: self.dt || other.dt,
            dxx: self.dxx || other.dxx,
            dtt: self.dtt || other.dtt,
        }
    }
}

/// Values and requested derivatives of the transformed output, aligned with
/// the input batch. The value vector is always populated; derivative slots
/// are present exactly when requested.
#[derive(Debug, Clone)]
pub struct DerivativeBundle {
    pub u: Array1<f64>,
    pub u_x: Option<Array1<f64>>,
    pub u_t: Option<Array1<f64>>,
    pub u_xx: Option<Array1<f64>>,
    pub u_tt: Option<Array1<f64>>,
}

impl DerivativeBundle {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Empty-slot bundle with derivative slots allocated per `request`.
    pub fn zeros(n: usize, request: DerivativeRequest) -> Self {
        let slot = |on: bool| on.then(|| Array1::zeros(n));
        DerivativeBundle {
            u: Array1::zeros(n),
            u_x: slot(request.dx),
            u_t: slot(request.dt),
            u_xx: slot(request.dxx),
            u_tt: slot(request.dtt),
        }
    }

    pub fn u_x(&self) -> &Array1<f64> {
        self.u_x.as_ref().expect("u_x was not requested")
    }

    pub fn u_t(&self) -> &Array1<f64> {
        self.u_t.as_ref().expect("u_t was not requested")
    }

    pub fn u_xx(&self) -> &Array1<f64> {
        self.u_xx.as_ref().expect("u_xx was not requested")
    }

    pub fn u_tt(&self) -> &Array1<f64> {
        self.u_tt.as_ref().expect("u_tt was not requested")
    }

    /// Every requested quantity present and finite.
    pub fn validate(&self, request: DerivativeRequest) -> Result<()> {
        let check = |name: &str, arr: Option<&Array1<f64>>, wanted: bool| -> Result<()> {
            match (arr, wanted) {
                (None, true) => Err(Error::Logic(format!("requested {name} missing from bundle"))),
                (Some(a), _) => match a.iter().position(|v| !v.is_finite()) {
                    Some(i) => Err(Error::non_finite_at(name, i)),
                    None => Ok(()),
                },
                (None, false) => Ok(()),
            }
        };
        if let Some(i) = self.u.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite_at("u", i));
        }
        check("u_x", self.u_x.as_ref(), request.dx)?;
        check("u_t", self.u_t.as_ref(), request.dt)?;
        check("u_xx", self.u_xx.as_ref(), request.dxx)?;
        check("u_tt", self.u_tt.as_ref(), request.dtt)?;
        Ok(())
    }
}
