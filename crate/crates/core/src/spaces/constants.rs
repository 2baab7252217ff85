//! Reference values of rendezvous numbers and intervals for
//! infinite-dimensional spaces. These are stored, not computed; the
//! experiments approach them at finite scale.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantValue {
    Scalar { value: f64 },
    Interval { lo: f64, hi: f64 },
    /// `2^(1/p)`, evaluated by [`named_constant`] when an exponent is given.
    PowerOfTwo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstant {
    pub key: &'static str,
    pub quantity: &'static str,
    pub value: ConstantValue,
    /// Whether the value is approached by a finite-scale experiment in this
    /// crate or only stored.
    pub reproduced_by: &'static str,
}

/// `1/3 + 2 sqrt(3) / pi`, the rendezvous number of the complex
/// two-dimensional sup-norm sphere.
pub fn sigma_complex() -> f64 {
    1.0 / 3.0 + 2.0 * 3f64.sqrt() / std::f64::consts::PI
}

/// The full table, in a fixed order.
pub fn named_constants() -> Vec<NamedConstant> {
    vec![
        NamedConstant {
            key: "lp",
            quantity: "rendezvous number of the unit sphere of L_p, 0 < p < inf",
            value: ConstantValue::PowerOfTwo,
            reproduced_by: "lp envelope experiment",
        },
        NamedConstant {
            key: "hilbert",
            quantity: "rendezvous number of the unit sphere of an infinite-dimensional Hilbert space",
            value: ConstantValue::Scalar { value: std::f64::consts::SQRT_2 },
            reproduced_by: "subspace convergence under the l_2 norm",
        },
        NamedConstant {
            key: "lp_metric",
            quantity: "rendezvous number of the unit sphere of L_p, 0 < p < 1, with the metric sum |x - y|^p",
            value: ConstantValue::Scalar { value: 2.0 },
            reproduced_by: "metric lower envelope and witness distances",
        },
        NamedConstant {
            key: "sigma_real",
            quantity: "rendezvous number of the unit sphere of real l_inf^2",
            value: ConstantValue::Scalar { value: 1.5 },
            reproduced_by: "square boundary grid",
        },
        NamedConstant {
            key: "sigma_complex",
            quantity: "rendezvous number of the unit sphere of complex l_inf^2",
            value: ConstantValue::Scalar { value: sigma_complex() },
            reproduced_by: "stored only",
        },
        NamedConstant {
            key: "c0_real",
            quantity: "rendezvous interval of the unit sphere of real c_0",
            value: ConstantValue::Interval { lo: 1.0, hi: 1.5 },
            reproduced_by: "stored only",
        },
        NamedConstant {
            key: "c0_complex",
            quantity: "rendezvous interval of the unit sphere of complex c_0",
            value: ConstantValue::Interval { lo: 1.0, hi: sigma_complex() },
            reproduced_by: "stored only",
        },
        NamedConstant {
            key: "ck_upper",
            quantity: "upper Chebyshev constant of the unit sphere of C(K), K infinite compact",
            value: ConstantValue::Scalar { value: 2.0 },
            reproduced_by: "sign-vector covering numbers",
        },
    ]
}

/// Looks up one constant. `lp` needs the exponent `p` and evaluates to
/// `2^(1/p)`.
pub fn named_constant(key: &str, p: Option<f64>) -> Result<ConstantValue> {
    let entry = named_constants()
        .into_iter()
        .find(|c| c.key == key)
        .ok_or_else(|| Error::Input(format!("unknown constant '{key}'")))?;
    match entry.value {
        ConstantValue::PowerOfTwo => {
            let p = p.ok_or_else(|| Error::Input("the lp constant needs an exponent p".into()))?;
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::Input(format!("exponent p must be finite and positive, got {p}")));
            }
            Ok(ConstantValue::Scalar { value: 2f64.powf(1.0 / p) })
        }
        v => Ok(v),
    }
}
