//! MLP architecture description and parameter storage.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Activation between hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
}

/// Architecture of the fully connected network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NetworkConfig {
    /// 2 for raw `(x, t)` inputs, 3 for the periodic embedding.
    pub input_dim: usize,
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub activation: Activation,
    pub output_dim: usize,
}

impl NetworkConfig {
    pub fn new(input_dim: usize, hidden_layers: usize, hidden_width: usize) -> Self {
        NetworkConfig {
            input_dim,
            hidden_layers,
            hidden_width,
            activation: Activation::Tanh,
            output_dim: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim != 2 && self.input_dim != 3 {
            return Err(Error::Config(format!(
                "input_dim must be 2 or 3, got {}",
                self.input_dim
            )));
        }
        if self.hidden_layers < 1 {
            return Err(Error::Config("hidden_layers must be at least 1".into()));
        }
        if self.hidden_width < 1 {
            return Err(Error::Config("hidden_width must be at least 1".into()));
        }
        if self.output_dim != 1 {
            return Err(Error::Config("output_dim must be 1".into()));
        }
        Ok(())
    }

    /// Layer shapes as `(fan_out, fan_in)` pairs, input to output.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::with_capacity(self.hidden_layers + 1);
        let mut fan_in = self.input_dim;
        for _ in 0..self.hidden_layers {
            shapes.push((self.hidden_width, fan_in));
            fan_in = self.hidden_width;
        }
        shapes.push((self.output_dim, fan_in));
        shapes
    }
}

/// One affine layer: `y = W x + b` with `W` stored as `fan_out x fan_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

/// All weights and biases of the network, input layer first. The activation
/// is applied after every layer except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

impl NetworkParams {
    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weights.nrows()
    }

    /// Total number of scalar parameters.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Layer dimensions chain consistently and every entry is finite.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        let mut fan_in = self.input_dim();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.weights.ncols() != fan_in {
                return Err(Error::Config(format!(
                    "layer {i} expects fan-in {fan_in}, has {}",
                    layer.weights.ncols()
                )));
            }
            if layer.biases.len() != layer.weights.nrows() {
                return Err(Error::Config(format!(
                    "layer {i} bias length {} does not match fan-out {}",
                    layer.biases.len(),
                    layer.weights.nrows()
                )));
            }
            if layer.weights.iter().chain(layer.biases.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("layer {i} has non-finite entries")));
            }
            fan_in = layer.weights.nrows();
        }
        Ok(())
    }

    /// Flatten to a single vector: per layer, weights row-major, then biases.
    pub fn to_flat(&self) -> Array1<f64> {
        let mut flat = Vec::with_capacity(self.parameter_count());
        for layer in &self.layers {
            flat.extend(layer.weights.iter());
            flat.extend(layer.biases.iter());
        }
        Array1::from(flat)
    }

    /// Overwrite all parameters from a flat vector laid out as [`to_flat`].
    ///
    /// [`to_flat`]: NetworkParams::to_flat
    pub fn assign_from_flat(&mut self, flat: &Array1<f64>) -> Result<()> {
        if flat.len() != self.parameter_count() {
            return Err(Error::Argument(format!(
                "flat vector length {} does not match parameter count {}",
                flat.len(),
                self.parameter_count()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut() {
                *w = flat[offset];
                offset += 1;
            }
            for b in layer.biases.iter_mut() {
                *b = flat[offset];
                offset += 1;
            }
        }
        Ok(())
    }

    /// All-zero parameters for the given architecture.
    pub fn zeros(config: &NetworkConfig) -> Self {
        let layers = config
            .layer_shapes()
            .into_iter()
            .map(|(out, inp)| Layer {
                weights: Array2::zeros((out, inp)),
                biases: Array1::zeros(out),
            })
            .collect();
        NetworkParams { layers }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(2, 5, 64).validate().is_ok());
        assert!(NetworkConfig::new(4, 5, 64).validate().is_err());
        assert!(NetworkConfig::new(2, 0, 64).validate().is_err());
        assert!(NetworkConfig::new(2, 5, 0).validate().is_err());
    }

    #[test]
    fn flat_round_trip() {
        let config = NetworkConfig::new(2, 2, 3);
        let mut params = NetworkParams::zeros(&config);
        let mut counter = 0.0;
        for layer in &mut params.layers {
            for w in layer.weights.iter_mut() {
                *w = counter;
                counter += 1.0;
            }
            for b in layer.biases.iter_mut() {
                *b = counter;
                counter += 1.0;
            }
        }
        let flat = params.to_flat();
        assert_eq!(flat.len(), params.parameter_count());
        let mut restored = NetworkParams::zeros(&config);
        restored.assign_from_flat(&flat).unwrap();
        assert_eq!(restored, params);
    }

    #[test]
    fn validate_catches_shape_breaks() {
        let config = NetworkConfig::new(2, 1, 4);
        let mut params = NetworkParams::zeros(&config);
        params.layers[1].weights = Array2::zeros((1, 3));
        assert!(params.validate().is_err());
    }
}
