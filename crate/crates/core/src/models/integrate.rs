//! Fixed-step RK4 for linear matrix ODEs and adaptive Simpson quadrature.

use nalgebra::{allocator::Allocator, DefaultAllocator, Dim, OMatrix};

use crate::error::{Error, Result};
use crate::qmat::C64;

/// Integrates `dY/dt = L(t) Y` from `y0` over `[0, t]` with `steps` RK4 steps.
pub(crate) fn rk4_linear<R, C, F>(
    generator: F,
    y0: OMatrix<C64, R, C>,
    t: f64,
    steps: usize,
) -> OMatrix<C64, R, C>
where
    R: Dim,
    C: Dim,
    DefaultAllocator: Allocator<R, R> + Allocator<R, C>,
    F: Fn(f64) -> OMatrix<C64, R, R>,
{
    let h = t / steps as f64;
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut y = y0;
    for k in 0..steps {
        let t0 = k as f64 * h;
        let l0 = generator(t0);
        let lm = generator(t0 + 0.5 * h);
        let l1 = generator(t0 + h);
        let k1 = &l0 * &y;
        let k2 = &lm * (&y + &k1 * half);
        let k3 = &lm * (&y + &k2 * half);
        let k4 = &l1 * (&y + &k3 * full);
        y += (k1 + k2 * two + k3 * two + k4) * sixth;
    }
    y
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute accuracy `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let value = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
        .ok_or(Error::QuadratureFailure { t: b })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::QuadratureFailure { t: b })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return None;
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}
