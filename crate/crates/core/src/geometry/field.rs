//! Scalar and vector fields on open subsets of R^N.
//!
//! Fields are closed-form evaluators over [`Jet`]s, so values, gradients and
//! Jacobians all come from one expression. Every field carries a domain
//! predicate; the checked accessors refuse points outside it.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;

type Predicate<const N: usize> = dyn Fn(&[f64; N]) -> bool + Send + Sync;
type Evaluator<const N: usize> = dyn Fn(&[Jet; N]) -> Jet + Send + Sync;

/// A boxed jet evaluator, as accepted by [`ScalarField::new`].
pub type JetFn<const N: usize> = Box<Evaluator<N>>;

/// An open subset of R^N given by a membership predicate.
#[derive(Clone)]
pub struct Domain<const N: usize> {
    contains: Arc<Predicate<N>>,
}

impl<const N: usize> Domain<N> {
    pub fn new(contains: impl Fn(&[f64; N]) -> bool + Send + Sync + 'static) -> Self {
        Domain {
            contains: Arc::new(contains),
        }
    }

    pub fn everywhere() -> Self {
        Domain::new(|p: &[f64; N]| p.iter().all(|c| c.is_finite()))
    }

    pub fn contains(&self, p: &[f64; N]) -> bool {
        (self.contains)(p)
    }

    pub fn intersect(&self, other: &Domain<N>) -> Domain<N> {
        let (a, b) = (self.clone(), other.clone());
        Domain::new(move |p| a.contains(p) && b.contains(p))
    }

    /// Pulls this domain back along the embedding of copy `copy` into R^M.
    pub fn on_copy<const M: usize>(&self, copy: usize) -> Domain<M> {
        assert!(N * (copy + 1) <= M);
        let inner = self.clone();
        Domain::new(move |p: &[f64; M]| {
            let q: [f64; N] = std::array::from_fn(|i| p[N * copy + i]);
            inner.contains(&q)
        })
    }
}

impl<const N: usize> fmt::Debug for Domain<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain<{N}>")
    }
}

/// A smooth real function on an open subset of R^N.
#[derive(Clone)]
pub struct ScalarField<const N: usize> {
    eval: Arc<Evaluator<N>>,
    domain: Domain<N>,
}

pub type ScalarField2D = ScalarField<2>;
pub type ScalarField3D = ScalarField<3>;
/// A field on the two-copy manifold R^2 x R^2, coordinates `(x1, y1, x2, y2)`.
pub type TwoCopyField = ScalarField<4>;

impl<const N: usize> ScalarField<N> {
    /// Builds a field from a jet evaluator. The evaluator receives jets for the
    /// N coordinates and must work for jets of any order and variable count.
    pub fn new(domain: Domain<N>, eval: impl Fn(&[Jet; N]) -> Jet + Send + Sync + 'static) -> Self {
        ScalarField {
            eval: Arc::new(eval),
            domain,
        }
    }

    pub fn constant(value: f64) -> Self {
        ScalarField::new(Domain::everywhere(), move |v| v[0].constant_like(value))
    }

    pub fn coordinate(index: usize) -> Self {
        assert!(index < N);
        ScalarField::new(Domain::everywhere(), move |v| v[index].clone())
    }

    /// A field defined through local Taylor data of other fields.
    ///
    /// To produce an order-k result, every input is expanded to order k+1 about
    /// the evaluation point and `combine` receives those expansions together
    /// with the coordinate jets at the same order. `combine` must return a jet
    /// of order at least k in the local variables. This is how operations that
    /// consume a derivative (brackets, Hamiltonian vector fields) stay exact.
    pub fn derived(
        domain: Domain<N>,
        inputs: Vec<ScalarField<N>>,
        combine: impl Fn(&[Jet], &[Jet; N]) -> Jet + Send + Sync + 'static,
    ) -> Self {
        ScalarField::new(domain, move |args: &[Jet; N]| {
            let base: [f64; N] = std::array::from_fn(|i| args[i].value());
            let order = args.iter().map(Jet::order).min().unwrap_or(0) + 1;
            let coords = Jet::seeds(base, order);
            let locals: Vec<Jet> = inputs.iter().map(|f| f.eval_jet(&coords)).collect();
            combine(&locals, &coords).compose(args)
        })
    }

    pub fn domain(&self) -> &Domain<N> {
        &self.domain
    }

    pub fn with_domain(&self, domain: Domain<N>) -> Self {
        ScalarField {
            eval: self.eval.clone(),
            domain,
        }
    }

    /// Evaluates on arbitrary jets without any domain check.
    pub fn eval_jet(&self, args: &[Jet; N]) -> Jet {
        (self.eval)(args)
    }

    /// Local Taylor expansion about `p`, truncated at `order`.
    pub fn jet(&self, p: [f64; N], order: usize) -> Result<Jet> {
        self.check(&p)?;
        Ok(self.jet_unchecked(p, order))
    }

    pub fn jet_unchecked(&self, p: [f64; N], order: usize) -> Jet {
        self.eval_jet(&Jet::seeds(p, order))
    }

    pub fn eval(&self, p: [f64; N]) -> Result<f64> {
        self.check(&p)?;
        Ok(self.eval_unchecked(p))
    }

    pub fn eval_unchecked(&self, p: [f64; N]) -> f64 {
        self.jet_unchecked(p, 0).value()
    }

    pub fn grad(&self, p: [f64; N]) -> Result<[f64; N]> {
        let g = self.jet(p, 1)?.gradient();
        Ok(std::array::from_fn(|i| g[i]))
    }

    pub fn hessian(&self, p: [f64; N]) -> Result<[[f64; N]; N]> {
        let h = self.jet(p, 2)?.hessian();
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| h[i][j])))
    }

    /// `∂f/∂x_var` as a field.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < N);
        ScalarField::derived(self.domain.clone(), vec![self.clone()], move |l, _| {
            l[0].partial(var)
        })
    }

    /// Applies a jet-level function pointwise, e.g. `f.map(Jet::shc)`.
    pub fn map(&self, f: impl Fn(&Jet) -> Jet + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        ScalarField::new(self.domain.clone(), move |v| f(&inner.eval_jet(v)))
    }

    /// Combines two fields pointwise on the intersection of their domains.
    pub fn zip(&self, other: &Self, f: impl Fn(&Jet, &Jet) -> Jet + Send + Sync + 'static) -> Self {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(self.domain.intersect(&other.domain), move |v| {
            f(&a.eval_jet(v), &b.eval_jet(v))
        })
    }

    pub fn recip(&self) -> Self {
        self.map(Jet::recip)
    }

    pub fn square(&self) -> Self {
        self.map(Jet::square)
    }

    /// Pulls this field back to R^M along the embedding of copy `copy`, so that
    /// it reads coordinates `N*copy .. N*copy+N` of the larger space.
    pub fn on_copy<const M: usize>(&self, copy: usize) -> ScalarField<M> {
        assert!(N * (copy + 1) <= M);
        let inner = self.clone();
        ScalarField::new(self.domain.on_copy(copy), move |v: &[Jet; M]| {
            let sub: [Jet; N] = std::array::from_fn(|i| v[N * copy + i].clone());
            inner.eval_jet(&sub)
        })
    }

    pub(crate) fn check(&self, p: &[f64; N]) -> Result<()> {
        if p.iter().all(|c| c.is_finite()) && self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(p))
        }
    }
}

impl<const N: usize> fmt::Debug for ScalarField<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField<{N}>")
    }
}

macro_rules! field_ops {
    ($trait:ident, $method:ident) => {
        impl<const N: usize> $trait<&ScalarField<N>> for &ScalarField<N> {
            type Output = ScalarField<N>;
            fn $method(self, rhs: &ScalarField<N>) -> ScalarField<N> {
                self.zip(rhs, |a, b| a.$method(b))
            }
        }
        impl<const N: usize> $trait<ScalarField<N>> for ScalarField<N> {
            type Output = ScalarField<N>;
            fn $method(self, rhs: ScalarField<N>) -> ScalarField<N> {
                (&self).$method(&rhs)
            }
        }
        impl<const N: usize> $trait<f64> for &ScalarField<N> {
            type Output = ScalarField<N>;
            fn $method(self, rhs: f64) -> ScalarField<N> {
                self.map(move |a| a.$method(rhs))
            }
        }
        impl<const N: usize> $trait<f64> for ScalarField<N> {
            type Output = ScalarField<N>;
            fn $method(self, rhs: f64) -> ScalarField<N> {
                (&self).$method(rhs)
            }
        }
        impl<const N: usize> $trait<&ScalarField<N>> for f64 {
            type Output = ScalarField<N>;
            fn $method(self, rhs: &ScalarField<N>) -> ScalarField<N> {
                rhs.map(move |a| self.$method(a))
            }
        }
    };
}

field_ops!(Add, add);
field_ops!(Sub, sub);
field_ops!(Mul, mul);
field_ops!(Div, div);

impl<const N: usize> Neg for &ScalarField<N> {
    type Output = ScalarField<N>;
    fn neg(self) -> ScalarField<N> {
        self.map(|a| -a)
    }
}

impl<const N: usize> Neg for ScalarField<N> {
    type Output = ScalarField<N>;
    fn neg(self) -> ScalarField<N> {
        -&self
    }
}

/// A smooth vector field on an open subset of R^N, one scalar field per component.
#[derive(Clone, Debug)]
pub struct VectorField<const N: usize> {
    components: [ScalarField<N>; N],
    domain: Domain<N>,
}

pub type VectorField2D = VectorField<2>;

impl<const N: usize> VectorField<N> {
    pub fn new(components: [ScalarField<N>; N]) -> Self {
        let domain = components[1..]
            .iter()
            .fold(components[0].domain().clone(), |d, c| {
                d.intersect(c.domain())
            });
        VectorField { components, domain }
    }

    pub fn zero() -> Self {
        VectorField::new(std::array::from_fn(|_| ScalarField::constant(0.0)))
    }

    pub fn components(&self) -> &[ScalarField<N>; N] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField<N> {
        &self.components[i]
    }

    pub fn domain(&self) -> &Domain<N> {
        &self.domain
    }

    pub fn with_domain(&self, domain: Domain<N>) -> Self {
        VectorField {
            components: std::array::from_fn(|i| self.components[i].with_domain(domain.clone())),
            domain,
        }
    }

    pub fn eval(&self, p: [f64; N]) -> Result<[f64; N]> {
        self.check(&p)?;
        Ok(self.eval_unchecked(p))
    }

    pub fn eval_unchecked(&self, p: [f64; N]) -> [f64; N] {
        let seeds = Jet::seeds(p, 0);
        std::array::from_fn(|i| self.components[i].eval_jet(&seeds).value())
    }

    /// Row `i` is the gradient of component `i`.
    pub fn jacobian(&self, p: [f64; N]) -> Result<[[f64; N]; N]> {
        self.check(&p)?;
        let seeds = Jet::seeds(p, 1);
        Ok(std::array::from_fn(|i| {
            let g = self.components[i].eval_jet(&seeds).gradient();
            std::array::from_fn(|j| g[j])
        }))
    }

    /// `f * self`, componentwise.
    pub fn scale(&self, f: &ScalarField<N>) -> Self {
        VectorField::new(std::array::from_fn(|i| f * &self.components[i]))
    }

    pub fn scale_const(&self, s: f64) -> Self {
        VectorField::new(std::array::from_fn(|i| &self.components[i] * s))
    }

    pub fn on_copy<const M: usize>(&self, copy: usize) -> [ScalarField<M>; N] {
        std::array::from_fn(|i| self.components[i].on_copy(copy))
    }

    fn check(&self, p: &[f64; N]) -> Result<()> {
        if p.iter().all(|c| c.is_finite()) && self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(p))
        }
    }
}

impl<const N: usize> Add<&VectorField<N>> for &VectorField<N> {
    type Output = VectorField<N>;
    fn add(self, rhs: &VectorField<N>) -> VectorField<N> {
        VectorField::new(std::array::from_fn(|i| {
            &self.components[i] + &rhs.components[i]
        }))
    }
}

impl<const N: usize> Sub<&VectorField<N>> for &VectorField<N> {
    type Output = VectorField<N>;
    fn sub(self, rhs: &VectorField<N>) -> VectorField<N> {
        VectorField::new(std::array::from_fn(|i| {
            &self.components[i] - &rhs.components[i]
        }))
    }
}
