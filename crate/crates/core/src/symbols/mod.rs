//! Symbolic holomorphic functions, weights, and self-maps of the ball.

mod expr;
pub mod wire;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use expr::HoloExpr;

use crate::error::{Error, Result};
use crate::geometry::{norm_sq, BallPoint};
use crate::linalg::CMatrix;
use crate::sampling::{par_chunks, shell_radius, sphere_direction, stream, Domain};

/// Number of boundary shells `1 − 2^{−j}` used when validating a self-map.
pub const VALIDATION_SHELLS: usize = 16;

/// Holomorphic weight `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSymbol {
    expr: HoloExpr,
    dim: usize,
}

impl WeightSymbol {
    pub fn new(expr: HoloExpr, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        expr.check_dim(n)?;
        Ok(WeightSymbol { expr, dim: n })
    }

    pub fn one(n: usize) -> Result<Self> {
        Self::new(HoloExpr::real(1.0), n)
    }

    pub fn expr(&self) -> &HoloExpr {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &BallPoint) -> Complex64 {
        self.expr.eval(z)
    }
}

/// Holomorphic map `φ = (φ_1, …, φ_n)` with a sampled estimate of `sup |φ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfMapSymbol {
    components: Vec<HoloExpr>,
    certified_bound: Option<f64>,
}

/// Outcome of sampling `|φ|` on boundary shells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfMapValidation {
    pub accepted: bool,
    pub max_norm: f64,
    pub argmax: Vec<Complex64>,
    pub samples: usize,
    /// `(shell radius, max |φ| on that shell)`
    pub shell_maxima: Vec<(f64, f64)>,
}

impl SelfMapSymbol {
    /// Unvalidated map; use [`SelfMapSymbol::validated`] before feeding it to
    /// anything that needs `φ(B) ⊂ B`.
    pub fn new(components: Vec<HoloExpr>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        for (i, c) in components.iter().enumerate() {
            c.check_dim(n).map_err(|e| match e {
                Error::Symbol { path, message } => Error::symbol(
                    path.replacen('$', &format!("$.components[{i}]"), 1),
                    message,
                ),
                other => other,
            })?;
        }
        Ok(SelfMapSymbol {
            components,
            certified_bound: None,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(HoloExpr::coord).collect())
    }

    pub fn validated(components: Vec<HoloExpr>, sample_count: usize, seed: u64) -> Result<Self> {
        let mut map = Self::new(components)?;
        map.validate(sample_count, seed)?;
        Ok(map)
    }

    /// Samples `|φ|` on the origin and boundary shells and records the
    /// largest value as `certified_bound`. Fails with
    /// [`Error::SelfMapRejected`] if some sample leaves the ball.
    pub fn validate(&mut self, sample_count: usize, seed: u64) -> Result<SelfMapValidation> {
        let report = validate_self_map(self, sample_count, seed)?;
        if !report.accepted {
            return Err(Error::SelfMapRejected {
                norm: report.max_norm,
                point: report.argmax.iter().map(|c| [c.re, c.im]).collect(),
            });
        }
        self.certified_bound = Some(report.max_norm);
        Ok(report)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HoloExpr] {
        &self.components
    }

    pub fn certified_bound(&self) -> Option<f64> {
        self.certified_bound
    }

    pub fn apply_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.value(z)).collect()
    }

    /// `φ(z)` as a ball point; errors if the image is outside the ball.
    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        BallPoint::from_coords(self.apply_raw(z))
    }

    /// Jacobian with row `i` equal to the gradient of `φ_i`.
    pub fn jacobian(&self, z: &BallPoint) -> CMatrix {
        self.value_jacobian(z).1
    }

    pub(crate) fn value_jacobian(&self, z: &[Complex64]) -> (Vec<Complex64>, CMatrix) {
        let n = self.dim();
        let mut values = Vec::with_capacity(n);
        let mut jac = CMatrix::zeros(n, n);
        for (i, c) in self.components.iter().enumerate() {
            let (v, g) = c.value_grad(z);
            values.push(v);
            for (j, gj) in g.into_iter().enumerate() {
                jac[(i, j)] = gj;
            }
        }
        (values, jac)
    }
}

/// See [`SelfMapSymbol::validate`]; this variant only reports.
pub fn validate_self_map(
    phi: &SelfMapSymbol,
    sample_count: usize,
    seed: u64,
) -> Result<SelfMapValidation> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be >= 1".into()));
    }
    let n = phi.dim();
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let image = phi.apply_raw(&origin);
    let mut best = (norm_sq(&image).sqrt(), origin);
    let mut shell_maxima = Vec::with_capacity(VALIDATION_SHELLS);
    let per_shell = sample_count.div_ceil(VALIDATION_SHELLS).max(1);
    for j in 1..=VALIDATION_SHELLS {
        let radius = shell_radius(j);
        let parts = par_chunks(per_shell, |chunk, _start, len| {
            let mut rng = stream(seed, Domain::SelfMap, j as u32, chunk as u32);
            let mut local: Option<(f64, Vec<Complex64>)> = None;
            for _ in 0..len {
                let z: Vec<Complex64> = sphere_direction(&mut rng, n)
                    .into_iter()
                    .map(|c| c * radius)
                    .collect();
                let v = norm_sq(&phi.apply_raw(&z)).sqrt();
                let v = if v.is_finite() { v } else { f64::INFINITY };
                if local.as_ref().is_none_or(|(m, _)| v > *m) {
                    local = Some((v, z));
                }
            }
            local
        });
        let mut shell_best: Option<(f64, Vec<Complex64>)> = None;
        for (v, z) in parts.into_iter().flatten() {
            if shell_best.as_ref().is_none_or(|(m, _)| v > *m) {
                shell_best = Some((v, z));
            }
        }
        if let Some((v, z)) = shell_best {
            shell_maxima.push((radius, v));
            if v > best.0 {
                best = (v, z);
            }
        }
    }
    Ok(SelfMapValidation {
        accepted: best.0 < 1.0,
        max_norm: best.0,
        argmax: best.1,
        samples: 1 + per_shell * VALIDATION_SHELLS,
        shell_maxima,
    })
}

/// `ψ` together with a self-map `φ` of matching dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPair {
    pub psi: WeightSymbol,
    pub phi: SelfMapSymbol,
}

impl SymbolPair {
    pub fn new(psi: WeightSymbol, phi: SelfMapSymbol) -> Result<Self> {
        if psi.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                found: psi.dim(),
            });
        }
        Ok(SymbolPair { psi, phi })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }
}

/// Parses `{"components": [node, …]}` (unvalidated).
pub fn self_map_from_json(value: &Value, path: &str) -> Result<SelfMapSymbol> {
    let items = value
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::symbol(path, "expected an object with a `components` array"))?;
    let components = items
        .iter()
        .enumerate()
        .map(|(i, v)| wire::expr_from_json_at(v, &format!("{path}.components[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    SelfMapSymbol::new(components).map_err(|e| match e {
        Error::Symbol { path: p, message } => Error::symbol(p.replacen('$', path, 1), message),
        other => other,
    })
}

pub fn self_map_to_json(phi: &SelfMapSymbol) -> Value {
    json!({"components": phi.components.iter().map(wire::expr_to_json).collect::<Vec<_>>()})
}
