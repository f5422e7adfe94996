//! Truncated trivariate Taylor arithmetic ("jets") in the variables (x, y, b).
//!
//! A [`Jet`] stores every Taylor coefficient of a scalar function at an
//! expansion point up to a fixed total degree.  The coefficient at
//! multi-index `(i, j, k)` is
//!
//! ```text
//! c[i,j,k] = ∂^{i+j+k} f / (∂x^i ∂y^j ∂b^k) / (i! j! k!)
//! ```
//!
//! so `c[0,0,0]` is the function value and [`Jet::partial`] recovers raw
//! mixed partial derivatives.  Arithmetic truncates silently at the jet's
//! total degree; multiplying or dividing jets of different orders truncates
//! to the smaller one.  Propagating all three variables at once means a
//! single evaluation of a formula delivers every x-, y- and b-partial the
//! downstream field computations need.
//!
//! Coefficients live in a dense vector over the simplex of multi-indices
//! with `i + j + k <= order`, blocked by total degree (so truncation is a
//! prefix slice).  At the default order 6 that is 84 coefficients.

use thiserror::Error;

/// Default maximum total degree carried by family evaluations.
pub const DEFAULT_ORDER: usize = 6;

/// Largest supported jet order (bounded by the static index tables).
pub const MAX_ORDER: usize = 16;

/// Absolute floor on a divisor's value below which division is refused.
/// Callers that can rescale their quantities should do so before dividing.
pub const DIV_FLOOR: f64 = 1e-13;

/// The three jet variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    B,
}

#[derive(Debug, Error)]
pub enum JetError {
    /// A divisor's value sat within [`DIV_FLOOR`] of zero; the caller hit a
    /// singular point of whatever formula it was evaluating.
    #[error("division by near-zero jet value {value:e}")]
    DivisionNearZero { value: f64 },
    /// An elementary function was evaluated outside its domain.
    #[error("{func} evaluated outside its domain at {value}")]
    Domain { func: &'static str, value: f64 },
    /// A partial-derivative request exceeded the jet's order.
    #[error("partial ({i},{j},{k}) exceeds jet order {order}")]
    OrderExceeded {
        i: usize,
        j: usize,
        k: usize,
        order: usize,
    },
}

/// Number of multi-indices with total degree strictly below `d`.
#[inline]
fn tet(d: usize) -> usize {
    d * (d + 1) * (d + 2) / 6
}

/// Coefficient count of a jet of the given order.
#[inline]
pub fn simplex_size(order: usize) -> usize {
    tet(order + 1)
}

/// Position of multi-index `(i, j, k)` in the dense layout: degree blocks in
/// increasing total degree; within a block `i` descends, then `j` descends.
#[inline]
fn rank(i: usize, j: usize, k: usize) -> usize {
    let d = i + j + k;
    tet(d) + (d - i) * (d - i + 1) / 2 + (d - i - j)
}

/// All multi-indices of total degree `<= order`, in layout order.
fn index_table(order: usize) -> &'static [(u8, u8, u8)] {
    use std::sync::OnceLock;
    static TABLES: OnceLock<Vec<Vec<(u8, u8, u8)>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|n| {
                let mut v = Vec::with_capacity(simplex_size(n));
                for d in 0..=n {
                    for i in (0..=d).rev() {
                        for j in (0..=(d - i)).rev() {
                            v.push((i as u8, j as u8, (d - i - j) as u8));
                        }
                    }
                }
                v
            })
            .collect()
    });
    assert!(order <= MAX_ORDER, "jet order {order} exceeds MAX_ORDER");
    &tables[order]
}

const FACTORIALS: [f64; 17] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
];

/// Truncated Taylor expansion of a scalar function of (x, y, b).
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet of a constant: value at (0,0,0), zero elsewhere.
    pub fn constant(value: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; simplex_size(order)];
        coeffs[0] = value;
        Jet { order, coeffs }
    }

    /// Jet of a coordinate function: `value` at (0,0,0) and a unit
    /// coefficient at the corresponding first-order index.
    pub fn variable(which: Var, value: f64, order: usize) -> Jet {
        let mut jet = Jet::constant(value, order);
        if order >= 1 {
            let idx = match which {
                Var::X => rank(1, 0, 0),
                Var::Y => rank(0, 1, 0),
                Var::B => rank(0, 0, 1),
            };
            jet.coeffs[idx] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Function value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient at `(i, j, k)` (zero if beyond the order).
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> f64 {
        if i + j + k > self.order {
            0.0
        } else {
            self.coeffs[rank(i, j, k)]
        }
    }

    /// Raw mixed partial `∂^{i+j+k} f / ∂x^i ∂y^j ∂b^k`, i.e. the stored
    /// coefficient rescaled by `i! j! k!`.
    pub fn partial(&self, i: usize, j: usize, k: usize) -> Result<f64, JetError> {
        if i + j + k > self.order {
            return Err(JetError::OrderExceeded {
                i,
                j,
                k,
                order: self.order,
            });
        }
        Ok(self.coeffs[rank(i, j, k)] * FACTORIALS[i] * FACTORIALS[j] * FACTORIALS[k])
    }

    /// Discard all coefficients of total degree above `order`.
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order);
        Jet {
            order,
            coeffs: self.coeffs[..simplex_size(order)].to_vec(),
        }
    }

    /// Partial derivative as a jet one order lower.  Panics on order-0 jets;
    /// the caller is responsible for budgeting enough order up front.
    pub fn derivative(&self, which: Var) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.order - 1;
        let mut out = Jet::constant(0.0, n);
        for &(i, j, k) in index_table(n) {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            out.coeffs[rank(i, j, k)] = match which {
                Var::X => self.coeffs[rank(i + 1, j, k)] * (i + 1) as f64,
                Var::Y => self.coeffs[rank(i, j + 1, k)] * (j + 1) as f64,
                Var::B => self.coeffs[rank(i, j, k + 1)] * (k + 1) as f64,
            };
        }
        out
    }

    /// Scale by a real factor.
    pub fn scaled(&self, s: f64) -> Jet {
        Jet {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Quotient `self / rhs` by recursive coefficient solution of
    /// `self = rhs * q`, truncated at the smaller order.
    pub fn divide(&self, rhs: &Jet) -> Result<Jet, JetError> {
        if rhs.value().abs() <= DIV_FLOOR {
            return Err(JetError::DivisionNearZero { value: rhs.value() });
        }
        let n = self.order.min(rhs.order);
        let inv0 = 1.0 / rhs.coeffs[0];
        let mut out = Jet::constant(0.0, n);
        for &(i, j, k) in index_table(n) {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            let mut acc = self.coeffs[rank(i, j, k)];
            for &(p, q, r) in index_table(i + j + k) {
                let (p, q, r) = (p as usize, q as usize, r as usize);
                if (p, q, r) == (0, 0, 0) || p > i || q > j || r > k {
                    continue;
                }
                acc -= rhs.coeffs[rank(p, q, r)] * out.coeffs[rank(i - p, j - q, k - r)];
            }
            out.coeffs[rank(i, j, k)] = acc * inv0;
        }
        Ok(out)
    }

    /// Composes a univariate Taylor series `g` (coefficients of `g` at
    /// `self.value()`) with this jet: `g(self)` truncated at the jet order.
    fn compose(&self, series: &[f64]) -> Jet {
        let n = self.order;
        let mut tilde = self.clone();
        tilde.coeffs[0] = 0.0;
        let mut acc = Jet::constant(series[0], n);
        let mut pow = Jet::constant(1.0, n);
        for (m, g) in series.iter().enumerate().skip(1).take(n) {
            pow = &pow * &tilde;
            acc = &acc + &pow.scaled(*g);
            let _ = m;
        }
        acc
    }

    pub fn sin(&self) -> Jet {
        let v = self.value();
        let (s, c) = (v.sin(), v.cos());
        self.compose(&trig_series([s, c, -s, -c], self.order))
    }

    pub fn cos(&self) -> Jet {
        let v = self.value();
        let (s, c) = (v.sin(), v.cos());
        self.compose(&trig_series([c, -s, -c, s], self.order))
    }

    /// `tan` via `sin / cos`; refuses points where `cos` is near zero.
    pub fn tan(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v.cos().abs() <= DIV_FLOOR {
            return Err(JetError::Domain {
                func: "tan",
                value: v,
            });
        }
        self.sin().divide(&self.cos())
    }

    pub fn exp(&self) -> Jet {
        let ev = self.value().exp();
        let mut series = vec![0.0; self.order + 1];
        for (m, g) in series.iter_mut().enumerate() {
            *g = ev / FACTORIALS[m];
        }
        self.compose(&series)
    }

    /// Natural logarithm; requires a strictly positive value.
    pub fn ln(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(JetError::Domain {
                func: "log",
                value: v,
            });
        }
        let mut series = vec![0.0; self.order + 1];
        series[0] = v.ln();
        let mut vp = 1.0;
        for (m, g) in series.iter_mut().enumerate().skip(1) {
            vp *= v;
            *g = if m % 2 == 1 { 1.0 } else { -1.0 } / (m as f64 * vp);
        }
        Ok(self.compose(&series))
    }

    /// Square root; requires a strictly positive value.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(JetError::Domain {
                func: "sqrt",
                value: v,
            });
        }
        let root = v.sqrt();
        let mut series = vec![0.0; self.order + 1];
        series[0] = root;
        let mut binom = 1.0;
        let mut vp = 1.0;
        for (m, g) in series.iter_mut().enumerate().skip(1) {
            binom *= (0.5 - (m as f64 - 1.0)) / m as f64;
            vp *= v;
            *g = root * binom / vp;
        }
        Ok(self.compose(&series))
    }

    pub fn atan(&self) -> Jet {
        // Solve f'(t) * (1 + (v+t)^2) = 1 degree by degree.
        let v = self.value();
        let n = self.order;
        let (q0, q1, q2) = (1.0 + v * v, 2.0 * v, 1.0);
        let mut series = vec![0.0; n + 1];
        series[0] = v.atan();
        for m in 0..n {
            let mut rhs = if m == 0 { 1.0 } else { 0.0 };
            rhs -= m as f64 * series[m] * q1;
            if m >= 1 {
                rhs -= (m - 1) as f64 * series[m - 1] * q2;
            }
            series[m + 1] = rhs / ((m + 1) as f64 * q0);
        }
        self.compose(&series)
    }

    /// Jet of the polar angle `atan2(y, x)`: equal to `±atan` of a quotient
    /// up to a locally constant branch offset, so all derivative
    /// coefficients come from the quotient form while the value is the
    /// true two-argument angle.
    pub fn atan2(y: &Jet, x: &Jet) -> Result<Jet, JetError> {
        let (vy, vx) = (y.value(), x.value());
        if vx.abs() <= DIV_FLOOR && vy.abs() <= DIV_FLOOR {
            return Err(JetError::Domain {
                func: "atan2",
                value: 0.0,
            });
        }
        let mut t = if vx.abs() >= vy.abs() {
            y.divide(x)?.atan()
        } else {
            x.divide(y)?.atan().scaled(-1.0)
        };
        t.coeffs[0] = vy.atan2(vx);
        Ok(t)
    }

    /// Integer power by binary exponentiation (a polynomial operation, so it
    /// stays exact at zero values for non-negative exponents).
    pub fn powi(&self, k: i32) -> Result<Jet, JetError> {
        if k < 0 && self.value().abs() <= DIV_FLOOR {
            return Err(JetError::DivisionNearZero { value: self.value() });
        }
        let mut out = Jet::constant(1.0, self.order);
        let mut base = self.clone();
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        if k < 0 {
            out = Jet::constant(1.0, self.order).divide(&out)?;
        }
        Ok(out)
    }
}

fn trig_series(cycle: [f64; 4], order: usize) -> Vec<f64> {
    let mut series = vec![0.0; order + 1];
    for (m, g) in series.iter_mut().enumerate() {
        *g = cycle[m % 4] / FACTORIALS[m];
    }
    series
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let n = self.order.min(rhs.order);
                let mut coeffs = Vec::with_capacity(simplex_size(n));
                for idx in 0..simplex_size(n) {
                    coeffs.push(self.coeffs[idx] $op rhs.coeffs[idx]);
                }
                Jet { order: n, coeffs }
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);

impl std::ops::Mul for &Jet {
    type Output = Jet;
    /// Cauchy product truncated at the smaller total degree.
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order.min(rhs.order);
        let mut out = Jet::constant(0.0, n);
        for &(i1, j1, k1) in index_table(n) {
            let (i1, j1, k1) = (i1 as usize, j1 as usize, k1 as usize);
            let va = self.coeffs[rank(i1, j1, k1)];
            if va == 0.0 {
                continue;
            }
            let d1 = i1 + j1 + k1;
            for &(i2, j2, k2) in index_table(n - d1) {
                let (i2, j2, k2) = (i2 as usize, j2 as usize, k2 as usize);
                let vb = rhs.coeffs[rank(i2, j2, k2)];
                if vb != 0.0 {
                    out.coeffs[rank(i1 + i2, j1 + j2, k1 + k2)] += va * vb;
                }
            }
        }
        out
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}
