//! Closed-form scalar functions of the collar coordinate with exact
//! derivatives of every order.

use serde::{Deserialize, Serialize};

/// A smooth real function of one variable that can report its derivatives.
pub trait SmoothFn: Send + Sync {
    /// The `order`-th derivative at `t` (order 0 is the value).
    fn deriv(&self, t: f64, order: usize) -> f64;

    fn value(&self, t: f64) -> f64 {
        self.deriv(t, 0)
    }
}

impl<F> SmoothFn for F
where
    F: Fn(f64, usize) -> f64 + Send + Sync,
{
    fn deriv(&self, t: f64, order: usize) -> f64 {
        self(t, order)
    }
}

/// Expression tree for the warping functions used by the model collars.
///
/// Trigonometric and hyperbolic terms are affine in `t`:
/// `amp * sin(freq * t + phase)` and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Constant { value: f64 },
    /// `sum_i coeffs[i] * t^i`
    Polynomial { coeffs: Vec<f64> },
    Sin { amp: f64, freq: f64, phase: f64 },
    Cos { amp: f64, freq: f64, phase: f64 },
    Sinh { amp: f64, freq: f64, phase: f64 },
    Cosh { amp: f64, freq: f64, phase: f64 },
    /// `amp * exp(rate * t)`
    Exp { amp: f64, rate: f64 },
    Sum { terms: Vec<ScalarFn> },
    Product { factors: Vec<ScalarFn> },
}

impl ScalarFn {
    pub fn constant(value: f64) -> Self {
        ScalarFn::Constant { value }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        ScalarFn::Polynomial { coeffs }
    }

    /// `sin(freq * t + phase)`
    pub fn sin(freq: f64, phase: f64) -> Self {
        ScalarFn::Sin {
            amp: 1.0,
            freq,
            phase,
        }
    }

    /// `cosh(freq * t + phase)`
    pub fn cosh(freq: f64, phase: f64) -> Self {
        ScalarFn::Cosh {
            amp: 1.0,
            freq,
            phase,
        }
    }

    pub fn exp(amp: f64, rate: f64) -> Self {
        ScalarFn::Exp { amp, rate }
    }

    pub fn product(factors: Vec<ScalarFn>) -> Self {
        ScalarFn::Product { factors }
    }

    /// Substitutes `t -> -t`. Applying it twice returns a bit-identical tree.
    pub fn reflect(&self) -> Self {
        match self {
            ScalarFn::Constant { value } => ScalarFn::Constant { value: *value },
            ScalarFn::Polynomial { coeffs } => ScalarFn::Polynomial {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { *c })
                    .collect(),
            },
            ScalarFn::Sin { amp, freq, phase } => ScalarFn::Sin {
                amp: *amp,
                freq: -freq,
                phase: *phase,
            },
            ScalarFn::Cos { amp, freq, phase } => ScalarFn::Cos {
                amp: *amp,
                freq: -freq,
                phase: *phase,
            },
            ScalarFn::Sinh { amp, freq, phase } => ScalarFn::Sinh {
                amp: *amp,
                freq: -freq,
                phase: *phase,
            },
            ScalarFn::Cosh { amp, freq, phase } => ScalarFn::Cosh {
                amp: *amp,
                freq: -freq,
                phase: *phase,
            },
            ScalarFn::Exp { amp, rate } => ScalarFn::Exp {
                amp: *amp,
                rate: -rate,
            },
            ScalarFn::Sum { terms } => ScalarFn::Sum {
                terms: terms.iter().map(ScalarFn::reflect).collect(),
            },
            ScalarFn::Product { factors } => ScalarFn::Product {
                factors: factors.iter().map(ScalarFn::reflect).collect(),
            },
        }
    }

    fn product_deriv(factors: &[ScalarFn], t: f64, order: usize) -> f64 {
        match factors {
            [] => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            [only] => only.deriv(t, order),
            [first, rest @ ..] => {
                // Leibniz rule, peeling off one factor at a time.
                let mut binom = 1.0;
                let mut acc = 0.0;
                for j in 0..=order {
                    acc += binom * first.deriv(t, j) * Self::product_deriv(rest, t, order - j);
                    binom = binom * (order - j) as f64 / (j + 1) as f64;
                }
                acc
            }
        }
    }
}

fn sin_cycle(arg: f64, order: usize) -> f64 {
    match order % 4 {
        0 => arg.sin(),
        1 => arg.cos(),
        2 => -arg.sin(),
        _ => -arg.cos(),
    }
}

impl SmoothFn for ScalarFn {
    fn deriv(&self, t: f64, order: usize) -> f64 {
        match self {
            ScalarFn::Constant { value } => {
                if order == 0 {
                    *value
                } else {
                    0.0
                }
            }
            ScalarFn::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(order).rev() {
                    let falling: f64 = ((i - order + 1)..=i).map(|m| m as f64).product();
                    acc = acc * t + c * falling;
                }
                acc
            }
            ScalarFn::Sin { amp, freq, phase } => {
                amp * freq.powi(order as i32) * sin_cycle(freq * t + phase, order)
            }
            ScalarFn::Cos { amp, freq, phase } => {
                amp * freq.powi(order as i32) * sin_cycle(freq * t + phase, order + 1)
            }
            ScalarFn::Sinh { amp, freq, phase } => {
                let arg = freq * t + phase;
                let base = if order % 2 == 0 { arg.sinh() } else { arg.cosh() };
                amp * freq.powi(order as i32) * base
            }
            ScalarFn::Cosh { amp, freq, phase } => {
                let arg = freq * t + phase;
                let base = if order % 2 == 0 { arg.cosh() } else { arg.sinh() };
                amp * freq.powi(order as i32) * base
            }
            ScalarFn::Exp { amp, rate } => amp * rate.powi(order as i32) * (rate * t).exp(),
            ScalarFn::Sum { terms } => terms.iter().map(|f| f.deriv(t, order)).sum(),
            ScalarFn::Product { factors } => Self::product_deriv(factors, t, order),
        }
    }
}
