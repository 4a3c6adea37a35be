//! Finite-difference oracles.
//!
//! These use nothing but point values of the fields involved, so they are
//! independent of the jet machinery that produces analytic derivatives.

use crate::error::{Error, Result};
use crate::geometry::field::{ScalarField, VectorField};
use crate::geometry::symplectic::{PoissonTensor, SymplecticForm};

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {step}"
        )))
    }
}

/// Central-difference gradient of `f` at `p`.
pub fn fd_gradient<const N: usize>(f: &ScalarField<N>, p: [f64; N], step: f64) -> Result<[f64; N]> {
    check_step(step)?;
    f.check(&p)?;
    let mut g = [0.0; N];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut plus = p;
        let mut minus = p;
        plus[i] += step;
        minus[i] -= step;
        *gi = (f.eval(plus)? - f.eval(minus)?) / (2.0 * step);
    }
    Ok(g)
}

/// Central-difference Jacobian of `x` at `p`; row `i` differentiates component `i`.
pub fn fd_jacobian<const N: usize>(
    x: &VectorField<N>,
    p: [f64; N],
    step: f64,
) -> Result<[[f64; N]; N]> {
    check_step(step)?;
    x.eval(p)?;
    let mut jac = [[0.0; N]; N];
    for j in 0..N {
        let mut plus = p;
        let mut minus = p;
        plus[j] += step;
        minus[j] -= step;
        let (a, b) = (x.eval(plus)?, x.eval(minus)?);
        for i in 0..N {
            jac[i][j] = (a[i] - b[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// `{f, g}_ω` at `point` from finite-difference gradients of `f` and `g`.
pub fn fd_bracket_oracle<const N: usize>(
    f: &ScalarField<N>,
    g: &ScalarField<N>,
    omega: &SymplecticForm<N>,
    point: [f64; N],
    step: f64,
) -> Result<f64> {
    let gf = fd_gradient(f, point, step)?;
    let gg = fd_gradient(g, point, step)?;
    let mut acc = 0.0;
    for (p, w) in omega.pair_weights().iter().enumerate() {
        let (i, j) = (2 * p, 2 * p + 1);
        acc += (gf[i] * gg[j] - gf[j] * gg[i]) / w.eval(point)?;
    }
    Ok(acc)
}

/// Bracket with respect to an arbitrary Poisson tensor, from finite-difference gradients.
pub fn fd_tensor_bracket<const N: usize>(
    f: &ScalarField<N>,
    g: &ScalarField<N>,
    tensor: &PoissonTensor<N>,
    point: [f64; N],
    step: f64,
) -> Result<f64> {
    let gf = fd_gradient(f, point, step)?;
    let gg = fd_gradient(g, point, step)?;
    tensor.eval_bracket(&gf, &gg, point)
}

/// `[X, Y]` at `point` from finite-difference Jacobians.
pub fn fd_lie_bracket<const N: usize>(
    x: &VectorField<N>,
    y: &VectorField<N>,
    point: [f64; N],
    step: f64,
) -> Result<[f64; N]> {
    let (jx, jy) = (fd_jacobian(x, point, step)?, fd_jacobian(y, point, step)?);
    let (vx, vy) = (x.eval(point)?, y.eval(point)?);
    Ok(std::array::from_fn(|k| {
        (0..N).map(|j| jy[k][j] * vx[j] - jx[k][j] * vy[j]).sum()
    }))
}
