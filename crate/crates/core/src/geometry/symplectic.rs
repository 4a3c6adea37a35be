//! Poisson structures, Hamiltonian vector fields and brackets.

use crate::error::{Error, Result};
use crate::geometry::field::{Domain, ScalarField, VectorField};
use crate::jet::Jet;

/// An area form `w dx∧dy` on each consecutive coordinate pair of R^N.
///
/// `N = 2` is a single planar form; `N = 4` is the direct sum ω⊕ω on the
/// two-copy manifold.
#[derive(Clone, Debug)]
pub struct SymplecticForm<const N: usize> {
    weights: Vec<ScalarField<N>>,
    domain: Domain<N>,
}

pub type SymplecticForm2D = SymplecticForm<2>;

impl SymplecticForm<2> {
    /// `ω = weight dx∧dy`. The weight must not vanish on its domain.
    pub fn new(weight: ScalarField<2>) -> Self {
        let domain = weight.domain().clone();
        SymplecticForm {
            weights: vec![weight],
            domain,
        }
    }

    pub fn weight(&self) -> &ScalarField<2> {
        &self.weights[0]
    }

    /// ω⊕ω on R^2 x R^2.
    pub fn product(&self) -> SymplecticForm<4> {
        let w = &self.weights[0];
        let weights = vec![w.on_copy::<4>(0), w.on_copy::<4>(1)];
        let domain = weights[0].domain().intersect(weights[1].domain());
        SymplecticForm { weights, domain }
    }
}

impl<const N: usize> SymplecticForm<N> {
    pub fn domain(&self) -> &Domain<N> {
        &self.domain
    }

    pub fn pair_weights(&self) -> &[ScalarField<N>] {
        &self.weights
    }

    pub fn poisson_tensor(&self) -> PoissonTensor<N> {
        let entries = self
            .weights
            .iter()
            .enumerate()
            .map(|(p, w)| (2 * p, 2 * p + 1, w.recip()))
            .collect();
        PoissonTensor {
            entries,
            domain: self.domain.clone(),
        }
    }

    /// Weight at `p` for each coordinate pair; errors if any is zero or `p` is
    /// outside the domain.
    pub fn check_nondegenerate(&self, p: [f64; N]) -> Result<()> {
        for w in &self.weights {
            let v = w.eval(p)?;
            if v == 0.0 || !v.is_finite() {
                return Err(Error::domain(&p));
            }
        }
        Ok(())
    }
}

/// A bivector `Σ_{i<j} P_ij ∂_i∧∂_j` with field coefficients.
#[derive(Clone, Debug)]
pub struct PoissonTensor<const N: usize> {
    entries: Vec<(usize, usize, ScalarField<N>)>,
    domain: Domain<N>,
}

impl<const N: usize> PoissonTensor<N> {
    pub fn new(entries: Vec<(usize, usize, ScalarField<N>)>) -> Self {
        let domain = entries
            .iter()
            .fold(Domain::everywhere(), |d, (_, _, f)| d.intersect(f.domain()));
        PoissonTensor { entries, domain }
    }

    /// `{f, g} = Σ_{i<j} P_ij (f_i g_j − f_j g_i)`.
    pub fn bracket(&self, f: &ScalarField<N>, g: &ScalarField<N>) -> ScalarField<N> {
        let domain = f.domain().intersect(g.domain()).intersect(&self.domain);
        let mut inputs = vec![f.clone(), g.clone()];
        inputs.extend(self.entries.iter().map(|(_, _, p)| p.clone()));
        let pairs: Vec<(usize, usize)> = self.entries.iter().map(|&(i, j, _)| (i, j)).collect();
        ScalarField::derived(domain, inputs, move |l, _| {
            let (f, g) = (&l[0], &l[1]);
            let mut acc: Option<Jet> = None;
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let term = &l[2 + k] * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            acc.unwrap_or_else(|| f.partial(0).constant_like(0.0))
        })
    }

    /// Bracket value at `p` evaluated on the coefficient fields directly.
    pub fn eval_bracket(&self, grad_f: &[f64; N], grad_g: &[f64; N], p: [f64; N]) -> Result<f64> {
        let mut acc = 0.0;
        for (i, j, coef) in &self.entries {
            acc += coef.eval(p)? * (grad_f[*i] * grad_g[*j] - grad_f[*j] * grad_g[*i]);
        }
        Ok(acc)
    }
}

impl PoissonTensor<2> {
    /// `∂x∧∂y`.
    pub fn canonical() -> Self {
        PoissonTensor::new(vec![(0, 1, ScalarField::constant(1.0))])
    }
}

/// The Hamiltonian vector field `X_h` with `ι_{X_h} ω = dh`.
///
/// On each pair with `ω = w dx∧dy` this is `(h_y / w, −h_x / w)`, the
/// orientation under which `h = −1/y`, `ω = dx∧dy/y²` gives `X_h = ∂x`.
pub fn hamiltonian_vector_field<const N: usize>(
    h: &ScalarField<N>,
    omega: &SymplecticForm<N>,
) -> VectorField<N> {
    let domain = h.domain().intersect(omega.domain());
    let components = std::array::from_fn(|k| {
        let pair = k / 2;
        let w = omega.weights[pair].clone();
        let (var, sign) = if k % 2 == 0 {
            (k + 1, 1.0)
        } else {
            (k - 1, -1.0)
        };
        ScalarField::derived(domain.clone(), vec![h.clone(), w], move |l, _| {
            l[0].partial(var) / &l[1] * sign
        })
    });
    VectorField::new(components)
}

/// `{f, g}_ω = X_g f`.
pub fn poisson_bracket<const N: usize>(
    f: &ScalarField<N>,
    g: &ScalarField<N>,
    omega: &SymplecticForm<N>,
) -> ScalarField<N> {
    omega.poisson_tensor().bracket(f, g)
}

/// `[X, Y] = J_Y X − J_X Y`.
pub fn lie_bracket<const N: usize>(x: &VectorField<N>, y: &VectorField<N>) -> VectorField<N> {
    let domain = x.domain().intersect(y.domain());
    let components = std::array::from_fn(|k| {
        let mut inputs: Vec<ScalarField<N>> = x.components().to_vec();
        inputs.extend(y.components().iter().cloned());
        ScalarField::derived(domain.clone(), inputs, move |l, _| {
            let (xs, ys) = l.split_at(N);
            let mut acc = xs[0].constant_like(0.0).truncate(xs[0].order() - 1);
            for j in 0..N {
                acc = acc + &xs[j] * ys[k].partial(j) - &ys[j] * xs[k].partial(j);
            }
            acc
        })
    });
    VectorField::new(components)
}
