//! Space-time domain shared by all benchmarks: `[-1, 1] x [0, 1]`.

use rand::Rng;

pub const X_MIN: f64 = -1.0;
pub const X_MAX: f64 = 1.0;
pub const T_MIN: f64 = 0.0;
pub const T_MAX: f64 = 1.0;

/// A collocation point in the space-time domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub t: f64,
}

impl Point {
    pub fn new(x: f64, t: f64) -> Self {
        Point { x, t }
    }

    /// Strictly inside the spatial interval and in `(0, 1]` in time, where
    /// the PDE residual is defined.
    pub fn is_interior(&self) -> bool {
        self.x > X_MIN && self.x < X_MAX && self.t > T_MIN && self.t <= T_MAX
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.t.is_finite()
    }
}

/// One uniform draw from the open interior `(-1, 1) x (0, 1]`.
///
/// `gen_range` on half-open ranges gives `x` in `[-1, 1)` and `t` in `[0, 1)`;
/// mapping `t -> 1 - t` moves the closed end to `t = 1`, and exact boundary
/// hits (probability ~2^-53 per draw) are rejected.
pub fn uniform_interior_point<R: Rng + ?Sized>(rng: &mut R) -> Point {
    loop {
        let x = rng.gen_range(X_MIN..X_MAX);
        let t = 1.0 - rng.gen_range(T_MIN..T_MAX);
        let p = Point::new(x, t);
        if p.is_interior() {
            return p;
        }
    }
}
