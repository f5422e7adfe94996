//! Central finite-difference estimates of mixed partial derivatives, used by
//! the validation suites as an oracle independent of jet arithmetic.
//!
//! One-dimensional stencils are fourth-order accurate; mixed partials
//! compose them axis by axis.  Step sizes should grow with the derivative
//! order to balance truncation against roundoff (see
//! [`recommended_step`]).

/// Fourth-order-accurate central stencils for d^n/dt^n, n = 1..=4, as
/// (offset, coefficient/h^n) pairs.
fn stencil(n: usize) -> &'static [(i32, f64)] {
    const D1: [(i32, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
    const D2: [(i32, f64); 5] = [
        (-2, -1.0 / 12.0),
        (-1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (1, 16.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    const D3: [(i32, f64); 6] = [
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ];
    const D4: [(i32, f64); 7] = [
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -13.0 / 2.0),
        (0, 28.0 / 3.0),
        (1, -13.0 / 2.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ];
    match n {
        1 => &D1,
        2 => &D2,
        3 => &D3,
        4 => &D4,
        _ => panic!("no stencil for derivative order {n}"),
    }
}

/// A step size balancing the stencils' O(h^4) truncation error against
/// roundoff amplification eps/h^order.
pub fn recommended_step(total_order: usize) -> f64 {
    match total_order {
        0 | 1 => 1e-3,
        2 => 2e-3,
        3 => 6e-3,
        4 => 1.5e-2,
        _ => 3e-2,
    }
}

/// Estimates the raw mixed partial d^{i+j+k} f / dx^i dy^j db^k at
/// `(x, y, b)` by composing central stencils with step `h` on each axis.
pub fn mixed_partial<F>(f: F, at: (f64, f64, f64), orders: (usize, usize, usize), h: f64) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    let (i, j, k) = orders;
    let (x, y, b) = at;
    let sx: &[(i32, f64)] = if i > 0 { stencil(i) } else { &[(0, 1.0)] };
    let sy: &[(i32, f64)] = if j > 0 { stencil(j) } else { &[(0, 1.0)] };
    let sb: &[(i32, f64)] = if k > 0 { stencil(k) } else { &[(0, 1.0)] };
    let mut acc = 0.0;
    for &(ox, cx) in sx {
        for &(oy, cy) in sy {
            for &(ob, cb) in sb {
                acc += cx
                    * cy
                    * cb
                    * f(x + ox as f64 * h, y + oy as f64 * h, b + ob as f64 * h);
            }
        }
    }
    acc / h.powi((i + j + k) as i32)
}
