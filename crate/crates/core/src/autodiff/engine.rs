//! Batched forward/reverse propagation kernels.
//!
//! Derivative channels (value, d/dx, d/dt, d2/dx2, d2/dt2) are stacked into
//! one matrix per layer so every linear map is a single GEMM. Batches are
//! split into fixed-size chunks processed in parallel; chunk boundaries and
//! the reduction order never depend on thread count, so results are
//! bit-reproducible.

use ndarray::{s, Array1, Array2, Axis};
use rayon::prelude::*;
use std::ops::Range;

use super::bundle::{DerivativeBundle, DerivativeRequest};
use super::network::NetworkParams;
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::transform::OutputTransform;

/// Rows per parallel chunk. Fixed so that chunk layout (and therefore the
/// floating-point reduction order) is independent of the thread count.
const CHUNK: usize = 128;

/// A scalar objective over a batch, differentiable with respect to every
/// bundle entry it consumes.
pub trait BatchObjective: Sync {
    /// Channels the objective reads.
    fn request(&self) -> DerivativeRequest;

    /// Objective value and its partial derivatives with respect to each
    /// bundle entry, returned in bundle layout (slots the objective does not
    /// touch may be omitted and are treated as zero).
    fn value_and_adjoint(&self, bundle: &DerivativeBundle) -> (f64, DerivativeBundle);
}

/// Which derivative channels propagate through the network. Second-order
/// channels require the matching first-order channel for the chain rule.
#[derive(Debug, Clone, Copy)]
struct ChannelSet {
    x: bool,
    t: bool,
    xx: bool,
    tt: bool,
}

impl ChannelSet {
    fn from_request(r: DerivativeRequest) -> Self {
        ChannelSet {
            x: r.dx || r.dxx,
            t: r.dt || r.dtt,
            xx: r.dxx,
            tt: r.dtt,
        }
    }

    fn count(&self) -> usize {
        1 + usize::from(self.x) + usize::from(self.t) + usize::from(self.xx) + usize::from(self.tt)
    }

    /// Block index of each channel in the stacked layout (value is 0).
    fn block_x(&self) -> Option<usize> {
        self.x.then_some(1)
    }

    fn block_t(&self) -> Option<usize> {
        self.t.then(|| 1 + usize::from(self.x))
    }

    fn block_xx(&self) -> Option<usize> {
        self.xx.then(|| 1 + usize::from(self.x) + usize::from(self.t))
    }

    fn block_tt(&self) -> Option<usize> {
        self.tt
            .then(|| 1 + usize::from(self.x) + usize::from(self.t) + usize::from(self.xx))
    }
}

struct LayerTrace {
    /// Stacked pre-activation jets.
    s_jets: Array2<f64>,
    /// Stacked post-activation jets.
    out_jets: Array2<f64>,
}

struct ChunkForward {
    /// Stacked input feature jets.
    feats: Array2<f64>,
    /// One trace per hidden layer (empty when traces were not requested).
    traces: Vec<LayerTrace>,
    /// Stacked network output jets, `channels * m` rows by 1 column.
    out_jets: Array2<f64>,
}

fn chunk_ranges(n: usize) -> Vec<Range<usize>> {
    (0..n.div_ceil(CHUNK))
        .map(|i| i * CHUNK..((i + 1) * CHUNK).min(n))
        .collect()
}

/// Raw network outputs for a batch of feature rows (no transform).
pub fn evaluate(params: &NetworkParams, inputs: &Array2<f64>) -> Result<Array1<f64>> {
    params.validate()?;
    let (n, dim) = inputs.dim();
    if n == 0 {
        return Err(Error::Argument("empty evaluation batch".into()));
    }
    if dim != params.input_dim() {
        return Err(Error::Config(format!(
            "batch dimension {dim} does not match network input_dim {}",
            params.input_dim()
        )));
    }
    if let Some(i) = inputs.iter().position(|v| !v.is_finite()) {
        return Err(Error::non_finite_at("input", i / dim));
    }
    if params.output_dim() != 1 {
        return Err(Error::Config("evaluate expects a scalar output network".into()));
    }

    let ranges = chunk_ranges(n);
    let chunks: Vec<Array1<f64>> = ranges
        .par_iter()
        .map(|r| {
            let mut cur = inputs.slice(s![r.clone(), ..]).to_owned();
            let last = params.layers.len() - 1;
            for (l, layer) in params.layers.iter().enumerate() {
                let mut z = cur.dot(&layer.weights.t());
                z += &layer.biases;
                if l < last {
                    z.mapv_inplace(f64::tanh);
                }
                cur = z;
            }
            cur.index_axis_move(Axis(1), 0)
        })
        .collect();

    let mut out = Array1::zeros(n);
    for (r, c) in ranges.iter().zip(chunks) {
        out.slice_mut(s![r.clone()]).assign(&c);
    }
    Ok(out)
}

/// Values and requested input derivatives of the transformed output at each
/// point of the batch.
pub fn input_derivatives(
    params: &NetworkParams,
    points: &[Point],
    request: DerivativeRequest,
    transform: &OutputTransform,
) -> Result<DerivativeBundle> {
    request.validate()?;
    params.validate()?;
    check_transform_dim(params, transform)?;
    if points.is_empty() {
        return Err(Error::Argument("empty point batch".into()));
    }

    let ch = ChannelSet::from_request(request);
    let ranges = chunk_ranges(points.len());
    let chunks: Vec<ChunkForward> = ranges
        .par_iter()
        .map(|r| forward_chunk(params, &points[r.clone()], ch, transform, false))
        .collect();

    let mut bundle = DerivativeBundle::zeros(points.len(), request);
    for (r, fwd) in ranges.iter().zip(&chunks) {
        apply_transform_chunk(transform, &points[r.clone()], ch, request, &fwd.out_jets, &mut bundle, r.start);
    }
    bundle.validate(request)?;
    Ok(bundle)
}

/// Gradient of `objective` with respect to every network parameter, in
/// [`NetworkParams::to_flat`] order. Also returns the derivative bundle the
/// objective consumed.
pub fn parameter_gradient_with_bundle(
    params: &NetworkParams,
    points: &[Point],
    transform: &OutputTransform,
    objective: &dyn BatchObjective,
) -> Result<(f64, Array1<f64>, DerivativeBundle)> {
    let request = objective.request();
    request.validate()?;
    params.validate()?;
    check_transform_dim(params, transform)?;
    if points.is_empty() {
        return Err(Error::Argument("empty point batch".into()));
    }

    let ch = ChannelSet::from_request(request);
    let ranges = chunk_ranges(points.len());
    let forwards: Vec<ChunkForward> = ranges
        .par_iter()
        .map(|r| forward_chunk(params, &points[r.clone()], ch, transform, true))
        .collect();

    let mut bundle = DerivativeBundle::zeros(points.len(), request);
    for (r, fwd) in ranges.iter().zip(&forwards) {
        apply_transform_chunk(transform, &points[r.clone()], ch, request, &fwd.out_jets, &mut bundle, r.start);
    }
    bundle.validate(request)?;

    let (value, adjoint) = objective.value_and_adjoint(&bundle);

    let partials: Vec<Array1<f64>> = ranges
        .par_iter()
        .zip(&forwards)
        .map(|(r, fwd)| {
            let net_adj = transform_adjoint_chunk(transform, &points[r.clone()], ch, &adjoint, r.start);
            backward_chunk(params, fwd, net_adj, ch)
        })
        .collect();

    let mut grad = Array1::<f64>::zeros(params.parameter_count());
    for p in &partials {
        grad += p;
    }
    check_gradient_finite(params, &grad)?;
    Ok((value, grad, bundle))
}

/// Gradient of `objective` with respect to every network parameter.
pub fn parameter_gradient(
    params: &NetworkParams,
    points: &[Point],
    transform: &OutputTransform,
    objective: &dyn BatchObjective,
) -> Result<(f64, Array1<f64>)> {
    let (value, grad, _) = parameter_gradient_with_bundle(params, points, transform, objective)?;
    Ok((value, grad))
}

fn check_transform_dim(params: &NetworkParams, transform: &OutputTransform) -> Result<()> {
    if transform.input_dim() != params.input_dim() {
        return Err(Error::Config(format!(
            "transform expects input_dim {}, network has {}",
            transform.input_dim(),
            params.input_dim()
        )));
    }
    Ok(())
}

fn check_gradient_finite(params: &NetworkParams, grad: &Array1<f64>) -> Result<()> {
    let mut offset = 0;
    for (l, layer) in params.layers.iter().enumerate() {
        let len = layer.weights.len() + layer.biases.len();
        if grad
            .slice(s![offset..offset + len])
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::Numerical(format!(
                "non-finite gradient entries in layer {l}"
            )));
        }
        offset += len;
    }
    Ok(())
}

/// Forward propagation of stacked jets through the network for one chunk.
fn forward_chunk(
    params: &NetworkParams,
    pts: &[Point],
    ch: ChannelSet,
    transform: &OutputTransform,
    keep_traces: bool,
) -> ChunkForward {
    let m = pts.len();
    let c = ch.count();
    let dim = params.input_dim();

    // Seed feature jets from the embedding.
    let mut feats = Array2::<f64>::zeros((c * m, dim));
    for (i, p) in pts.iter().enumerate() {
        let f = transform.feature_jets(p.x, p.t);
        for d in 0..dim {
            feats[[i, d]] = f.value[d];
        }
        if let Some(b) = ch.block_x() {
            for d in 0..dim {
                feats[[b * m + i, d]] = f.dx[d];
            }
        }
        if let Some(b) = ch.block_t() {
            for d in 0..dim {
                feats[[b * m + i, d]] = f.dt[d];
            }
        }
        if let Some(b) = ch.block_xx() {
            for d in 0..dim {
                feats[[b * m + i, d]] = f.dxx[d];
            }
        }
        if let Some(b) = ch.block_tt() {
            for d in 0..dim {
                feats[[b * m + i, d]] = f.dtt[d];
            }
        }
    }

    let last = params.layers.len() - 1;
    let mut traces: Vec<LayerTrace> = Vec::with_capacity(last);
    let mut carry: Option<Array2<f64>> = None;
    for layer in &params.layers[..last] {
        let input = match (&carry, traces.last()) {
            (Some(c), _) => c,
            (None, Some(trace)) => &trace.out_jets,
            (None, None) => &feats,
        };
        let mut s_jets = input.dot(&layer.weights.t());
        {
            let mut val = s_jets.slice_mut(s![0..m, ..]);
            val += &layer.biases;
        }
        let out_jets = activation_jets(&s_jets, m, ch);
        if keep_traces {
            traces.push(LayerTrace { s_jets, out_jets });
        } else {
            carry = Some(out_jets);
        }
    }
    let layer = &params.layers[last];
    let input = match (&carry, traces.last()) {
        (Some(c), _) => c,
        (None, Some(trace)) => &trace.out_jets,
        (None, None) => &feats,
    };
    let mut out_jets = input.dot(&layer.weights.t());
    {
        let mut val = out_jets.slice_mut(s![0..m, ..]);
        val += &layer.biases;
    }

    ChunkForward {
        feats,
        traces,
        out_jets,
    }
}

/// Push stacked jets through tanh with first- and second-order chain rules.
///
/// One fused pass per element: the derivative factors `p = 1 - z^2` and
/// `q = -2 z p` are recomputed from the value channel instead of staged in
/// temporaries (cheaper than the extra memory traffic on wide batches).
fn activation_jets(s_jets: &Array2<f64>, m: usize, ch: ChannelSet) -> Array2<f64> {
    let width = s_jets.ncols();
    let nn = m * width;
    let sf = s_jets.as_slice().expect("standard layout");
    let mut out = vec![0.0; sf.len()];

    let bx = ch.block_x().map(|b| b * nn);
    let bt = ch.block_t().map(|b| b * nn);
    let bxx = ch.block_xx().map(|b| b * nn);
    let btt = ch.block_tt().map(|b| b * nn);

    for i in 0..nn {
        let z = sf[i].tanh();
        out[i] = z;
        let p = 1.0 - z * z;
        let q = -2.0 * z * p;
        if let Some(b) = bx {
            let sx = sf[b + i];
            out[b + i] = p * sx;
            if let Some(bb) = bxx {
                out[bb + i] = q * sx * sx + p * sf[bb + i];
            }
        }
        if let Some(b) = bt {
            let st = sf[b + i];
            out[b + i] = p * st;
            if let Some(bb) = btt {
                out[bb + i] = q * st * st + p * sf[bb + i];
            }
        }
    }

    Array2::from_shape_vec(s_jets.raw_dim(), out).expect("shape preserved")
}

/// Adjoint of [`activation_jets`]: given the gradient with respect to the
/// post-activation jets, produce the gradient with respect to the
/// pre-activation jets.
fn activation_adjoint(trace: &LayerTrace, g: &Array2<f64>, m: usize, ch: ChannelSet) -> Array2<f64> {
    let width = trace.s_jets.ncols();
    let nn = m * width;
    let sf = trace.s_jets.as_slice().expect("standard layout");
    let zf = trace.out_jets.as_slice().expect("standard layout");
    let gf = g.as_slice().expect("standard layout");
    let mut s_adj = vec![0.0; gf.len()];

    let bx = ch.block_x().map(|b| b * nn);
    let bt = ch.block_t().map(|b| b * nn);
    let bxx = ch.block_xx().map(|b| b * nn);
    let btt = ch.block_tt().map(|b| b * nn);

    // Fused per element: acc1 collects s_c * g_c over derivative channels
    // (the dP/dz path), acc2 collects s_c^2 * g_cc over second-order
    // channels (the dQ/dz path).
    for i in 0..nn {
        let z = zf[i];
        let p = 1.0 - z * z;
        let q = -2.0 * z * p;
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        if let Some(b) = bx {
            let sx = sf[b + i];
            let gx = gf[b + i];
            let mut adj_x = p * gx;
            acc1 += sx * gx;
            if let Some(bb) = bxx {
                let gxx = gf[bb + i];
                s_adj[bb + i] = p * gxx;
                adj_x += 2.0 * q * sx * gxx;
                acc1 += sf[bb + i] * gxx;
                acc2 += sx * sx * gxx;
            }
            s_adj[b + i] = adj_x;
        }
        if let Some(b) = bt {
            let st = sf[b + i];
            let gt = gf[b + i];
            let mut adj_t = p * gt;
            acc1 += st * gt;
            if let Some(bb) = btt {
                let gtt = gf[bb + i];
                s_adj[bb + i] = p * gtt;
                adj_t += 2.0 * q * st * gtt;
                acc1 += sf[bb + i] * gtt;
                acc2 += st * st * gtt;
            }
            s_adj[b + i] = adj_t;
        }
        let z_eff = gf[i] + (-2.0 * z) * acc1 + (6.0 * z * z - 2.0) * acc2;
        s_adj[i] = p * z_eff;
    }

    Array2::from_shape_vec(g.raw_dim(), s_adj).expect("shape preserved")
}

/// Reverse sweep over one chunk, producing the flat parameter gradient
/// contribution.
fn backward_chunk(
    params: &NetworkParams,
    fwd: &ChunkForward,
    net_adj: Array2<f64>,
    ch: ChannelSet,
) -> Array1<f64> {
    let m = net_adj.nrows() / ch.count();
    let layer_count = params.layers.len();
    let mut w_grads: Vec<Array2<f64>> = Vec::with_capacity(layer_count);
    let mut b_grads: Vec<Array1<f64>> = Vec::with_capacity(layer_count);
    w_grads.resize_with(layer_count, || Array2::zeros((0, 0)));
    b_grads.resize_with(layer_count, || Array1::zeros(0));

    let mut g = net_adj;
    for l in (0..layer_count).rev() {
        let s_adj = if l == layer_count - 1 {
            g
        } else {
            activation_adjoint(&fwd.traces[l], &g, m, ch)
        };
        let input_jets = if l == 0 {
            &fwd.feats
        } else {
            &fwd.traces[l - 1].out_jets
        };
        w_grads[l] = s_adj.t().dot(input_jets);
        b_grads[l] = s_adj.slice(s![0..m, ..]).sum_axis(Axis(0));
        if l > 0 {
            g = s_adj.dot(&params.layers[l].weights);
        } else {
            break;
        }
    }

    let mut flat = Vec::with_capacity(params.parameter_count());
    for l in 0..layer_count {
        flat.extend(w_grads[l].iter());
        flat.extend(b_grads[l].iter());
    }
    Array1::from(flat)
}

/// Combine network output jets with the transform factors to produce the
/// requested quantities of the transformed output for one chunk.
#[allow(clippy::too_many_arguments)]
fn apply_transform_chunk(
    transform: &OutputTransform,
    pts: &[Point],
    ch: ChannelSet,
    request: DerivativeRequest,
    out_jets: &Array2<f64>,
    bundle: &mut DerivativeBundle,
    offset: usize,
) {
    let m = pts.len();
    let jets = out_jets.as_slice().expect("standard layout");
    let bx = ch.block_x().map(|b| b * m);
    let bt = ch.block_t().map(|b| b * m);
    let bxx = ch.block_xx().map(|b| b * m);
    let btt = ch.block_tt().map(|b| b * m);

    for (i, p) in pts.iter().enumerate() {
        let f = transform.factor_jets(p.x, p.t);
        let n = jets[i];
        let nx = bx.map_or(0.0, |b| jets[b + i]);
        let nt = bt.map_or(0.0, |b| jets[b + i]);
        let nxx = bxx.map_or(0.0, |b| jets[b + i]);
        let ntt = btt.map_or(0.0, |b| jets[b + i]);

        bundle.u[offset + i] = f.a + f.b * n;
        if let Some(arr) = bundle.u_x.as_mut() {
            if request.dx {
                arr[offset + i] = f.a_x + f.b_x * n + f.b * nx;
            }
        }
        if let Some(arr) = bundle.u_t.as_mut() {
            if request.dt {
                arr[offset + i] = f.a_t + f.b_t * n + f.b * nt;
            }
        }
        if let Some(arr) = bundle.u_xx.as_mut() {
            if request.dxx {
                arr[offset + i] = f.a_xx + f.b_xx * n + 2.0 * f.b_x * nx + f.b * nxx;
            }
        }
        if let Some(arr) = bundle.u_tt.as_mut() {
            if request.dtt {
                arr[offset + i] = f.a_tt + f.b_tt * n + 2.0 * f.b_t * nt + f.b * ntt;
            }
        }
    }
}

/// Pull an objective adjoint on the transformed output back to an adjoint on
/// the raw network output jets for one chunk.
fn transform_adjoint_chunk(
    transform: &OutputTransform,
    pts: &[Point],
    ch: ChannelSet,
    adjoint: &DerivativeBundle,
    offset: usize,
) -> Array2<f64> {
    let m = pts.len();
    let c = ch.count();
    let mut out = Array2::<f64>::zeros((c * m, 1));

    for (i, p) in pts.iter().enumerate() {
        let f = transform.factor_jets(p.x, p.t);
        let gu = adjoint.u[offset + i];
        let gx = adjoint.u_x.as_ref().map_or(0.0, |a| a[offset + i]);
        let gt = adjoint.u_t.as_ref().map_or(0.0, |a| a[offset + i]);
        let gxx = adjoint.u_xx.as_ref().map_or(0.0, |a| a[offset + i]);
        let gtt = adjoint.u_tt.as_ref().map_or(0.0, |a| a[offset + i]);

        out[[i, 0]] = f.b * gu + f.b_x * gx + f.b_t * gt + f.b_xx * gxx + f.b_tt * gtt;
        if let Some(b) = ch.block_x() {
            out[[b * m + i, 0]] = f.b * gx + 2.0 * f.b_x * gxx;
        }
        if let Some(b) = ch.block_t() {
            out[[b * m + i, 0]] = f.b * gt + 2.0 * f.b_t * gtt;
        }
        if let Some(b) = ch.block_xx() {
            out[[b * m + i, 0]] = f.b * gxx;
        }
        if let Some(b) = ch.block_tt() {
            out[[b * m + i, 0]] = f.b * gtt;
        }
    }
    out
}
