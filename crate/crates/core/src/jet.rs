//! Truncated multivariate Taylor polynomials.
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function of up to
//! [`MAX_VARS`] variables, truncated at total degree `order`. Arithmetic on jets
//! is the chain rule carried out on coefficients, so a closed-form evaluator
//! written against `Jet` yields exact (round-off limited) derivatives of every
//! order up to the requested truncation.
//!
//! Coefficients are stored in graded order: all monomials of degree 0, then
//! degree 1, and so on. The within-degree ordering does not depend on the
//! truncation order, so a lower-order jet is a prefix of a higher-order one.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub const MAX_VARS: usize = 4;
pub const MAX_ORDER: usize = 6;

type Exponents = [u8; MAX_VARS];

struct Table {
    exps: Vec<Exponents>,
    /// Index of the first monomial of each degree, plus a final sentinel.
    degree_start: Vec<usize>,
    /// `(i, j, k)` with `exps[i] + exps[j] == exps[k]`.
    products: Vec<(u16, u16, u16)>,
    /// For each monomial, the index of `exps[i] + e_v` when it fits in the table.
    raise: Vec<[Option<u16>; MAX_VARS]>,
}

impl Table {
    fn build(nvars: usize, order: usize) -> Table {
        let mut exps: Vec<Exponents> = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for degree in 0..=order {
            degree_start.push(exps.len());
            push_monomials(nvars, degree, 0, [0; MAX_VARS], &mut exps);
        }
        degree_start.push(exps.len());

        let index_of = |e: &Exponents| exps.iter().position(|m| m == e);
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let mut sum = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    sum[v] = a[v] + b[v];
                }
                if let Some(k) = index_of(&sum) {
                    products.push((i as u16, j as u16, k as u16));
                }
            }
        }
        let raise = exps
            .iter()
            .map(|e| {
                let mut out = [None; MAX_VARS];
                for (v, slot) in out.iter_mut().enumerate().take(nvars) {
                    let mut up = *e;
                    up[v] += 1;
                    *slot = index_of(&up).map(|k| k as u16);
                }
                out
            })
            .collect();
        Table {
            exps,
            degree_start,
            products,
            raise,
        }
    }

    fn len(&self) -> usize {
        self.exps.len()
    }

    fn index_of(&self, e: &Exponents) -> Option<usize> {
        let degree: usize = e.iter().map(|&d| d as usize).sum();
        if degree + 1 >= self.degree_start.len() {
            return None;
        }
        let range = self.degree_start[degree]..self.degree_start[degree + 1];
        range.into_iter().find(|&i| &self.exps[i] == e)
    }
}

fn push_monomials(
    nvars: usize,
    remaining: usize,
    var: usize,
    cur: Exponents,
    out: &mut Vec<Exponents>,
) {
    if var + 1 == nvars {
        let mut e = cur;
        e[var] = remaining as u8;
        out.push(e);
        return;
    }
    for d in (0..=remaining).rev() {
        let mut e = cur;
        e[var] = d as u8;
        push_monomials(nvars, remaining - d, var + 1, e, out);
    }
}

fn table(nvars: usize, order: usize) -> &'static Table {
    #[allow(clippy::declare_interior_mutable_const)]
    const EMPTY: OnceLock<Table> = OnceLock::new();
    #[allow(clippy::declare_interior_mutable_const)]
    const ROW: [OnceLock<Table>; MAX_ORDER + 1] = [EMPTY; MAX_ORDER + 1];
    static TABLES: [[OnceLock<Table>; MAX_ORDER + 1]; MAX_VARS] = [ROW; MAX_VARS];
    assert!(
        (1..=MAX_VARS).contains(&nvars),
        "jets support 1..={MAX_VARS} variables, got {nvars}"
    );
    assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
    TABLES[nvars - 1][order].get_or_init(|| Table::build(nvars, order))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Taylor polynomial of a function of `nvars` variables, truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: u8,
    order: u8,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        let mut coeffs = vec![0.0; table(nvars, order).len()];
        coeffs[0] = value;
        Jet {
            nvars: nvars as u8,
            order: order as u8,
            coeffs,
        }
    }

    /// The coordinate function `x_index` expanded about `value`.
    pub fn variable(nvars: usize, order: usize, index: usize, value: f64) -> Jet {
        assert!(index < nvars);
        let mut jet = Jet::constant(nvars, order, value);
        if order >= 1 {
            jet.coeffs[1 + index] = 1.0;
        }
        jet
    }

    /// Coordinate jets for every variable, expanded about `point`.
    pub fn seeds<const N: usize>(point: [f64; N], order: usize) -> [Jet; N] {
        std::array::from_fn(|i| Jet::variable(N, order, i, point[i]))
    }

    /// A constant with the same shape as `self`.
    pub fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(self.nvars(), self.order(), value)
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let len = table(self.nvars(), order).len();
        Jet {
            nvars: self.nvars,
            order: order as u8,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// First derivatives at the expansion point. Requires `order >= 1`.
    pub fn gradient(&self) -> Vec<f64> {
        assert!(self.order >= 1, "gradient needs a jet of order >= 1");
        self.coeffs[1..=self.nvars()].to_vec()
    }

    /// Second derivatives at the expansion point. Requires `order >= 2`.
    pub fn hessian(&self) -> Vec<Vec<f64>> {
        assert!(self.order >= 2, "hessian needs a jet of order >= 2");
        let n = self.nvars();
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut e = [0u8; MAX_VARS];
                e[i] += 1;
                e[j] += 1;
                h[i][j] = self.derivative(&e[..n]);
            }
        }
        h
    }

    /// Mixed partial derivative with the given multi-index.
    pub fn derivative(&self, multi_index: &[u8]) -> f64 {
        let mut e = [0u8; MAX_VARS];
        e[..multi_index.len()].copy_from_slice(multi_index);
        let t = table(self.nvars(), self.order());
        match t.index_of(&e) {
            Some(i) => self.coeffs[i] * e.iter().map(|&d| factorial(d as usize)).product::<f64>(),
            None => panic!(
                "multi-index {multi_index:?} exceeds jet order {}",
                self.order
            ),
        }
    }

    /// Partial derivative with respect to `var`; the result has order one less.
    pub fn partial(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        assert!(var < self.nvars());
        let lower = table(self.nvars(), self.order() - 1);
        let full = table(self.nvars(), self.order());
        let coeffs = (0..lower.len())
            .map(|i| {
                let k = full.raise[i][var].expect("raised monomial within order") as usize;
                (lower.exps[i][var] as f64 + 1.0) * self.coeffs[k]
            })
            .collect();
        Jet {
            nvars: self.nvars,
            order: self.order - 1,
            coeffs,
        }
    }

    /// Composition `f(self)` given `derivatives[n] = f^(n)(self.value())`.
    pub fn apply(&self, derivatives: &[f64]) -> Jet {
        let order = self.order();
        assert!(derivatives.len() > order, "need {} derivatives", order + 1);
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = self.constant_like(derivatives[0]);
        let mut power = self.constant_like(1.0);
        for (n, d) in derivatives.iter().enumerate().take(order + 1).skip(1) {
            power = &power * &delta;
            let scale = d / factorial(n);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += scale * p;
            }
        }
        out
    }

    /// Substitutes `args` for the displacement variables of `self`.
    ///
    /// `self` is a local expansion in `self.nvars()` displacement variables about
    /// the point `args[i].value()`. The result is a jet in the variables of
    /// `args`, truncated at the smaller of the two orders.
    pub fn compose(&self, args: &[Jet]) -> Jet {
        assert_eq!(args.len(), self.nvars(), "one argument per variable");
        let nvars = args[0].nvars();
        let order = self
            .order()
            .min(args.iter().map(Jet::order).min().unwrap_or(0));
        let identity = nvars == self.nvars()
            && args.iter().enumerate().all(|(i, a)| {
                a.coeffs.iter().enumerate().skip(1).all(|(k, &c)| {
                    if k == 1 + i {
                        c == 1.0
                    } else {
                        c == 0.0
                    }
                })
            });
        if identity || order == 0 {
            let mut out = Jet::constant(nvars, order, self.coeffs[0]);
            if identity {
                let len = out.coeffs.len();
                out.coeffs.copy_from_slice(&self.coeffs[..len]);
            }
            return out;
        }
        let deltas: Vec<Jet> = args
            .iter()
            .map(|a| {
                let mut d = a.truncate(order);
                d.coeffs[0] = 0.0;
                d
            })
            .collect();
        // powers[i][e] = delta_i^e
        let powers: Vec<Vec<Jet>> = deltas
            .iter()
            .map(|d| {
                let mut p = vec![d.constant_like(1.0)];
                for e in 1..=order {
                    let next = &p[e - 1] * d;
                    p.push(next);
                }
                p
            })
            .collect();
        let local = table(self.nvars(), order);
        let mut out = Jet::constant(nvars, order, 0.0);
        for (idx, exps) in local.exps.iter().enumerate() {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            let mut term: Option<Jet> = None;
            for (i, &e) in exps.iter().enumerate().take(self.nvars()) {
                if e == 0 {
                    continue;
                }
                let p = &powers[i][e as usize];
                term = Some(match term {
                    None => p.clone(),
                    Some(t) => &t * p,
                });
            }
            match term {
                None => out.coeffs[0] += c,
                Some(t) => {
                    for (o, v) in out.coeffs.iter_mut().zip(&t.coeffs) {
                        *o += c * v;
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let u = self.value();
        let derivs: Vec<f64> = (0..=self.order())
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(n) / u.powi(n as i32 + 1)
            })
            .collect();
        self.apply(&derivs)
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.apply(&vec![e; self.order() + 1])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let derivs: Vec<f64> = (0..=self.order())
            .map(|n| if n % 2 == 0 { s } else { c })
            .collect();
        self.apply(&derivs)
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let derivs: Vec<f64> = (0..=self.order())
            .map(|n| if n % 2 == 0 { c } else { s })
            .collect();
        self.apply(&derivs)
    }

    /// Cardinal hyperbolic sine `sinh(u)/u`, regular at `u = 0`.
    pub fn shc(&self) -> Jet {
        let derivs = crate::geometry::special::shc_derivatives(self.value(), self.order());
        self.apply(&derivs)
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different variable sets");
        let order = self.order.min(other.order);
        let len = table(self.nvars(), order as usize).len();
        Jet {
            nvars: self.nvars,
            order,
            coeffs: (0..len)
                .map(|i| f(self.coeffs[i], other.coeffs[i]))
                .collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different variable sets");
        let order = self.order.min(other.order) as usize;
        let t = table(self.nvars(), order);
        let mut coeffs = vec![0.0; t.len()];
        for &(i, j, k) in &t.products {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            nvars: self.nvars,
            order: order as u8,
            coeffs,
        }
    }

    fn scaled(&self, s: f64) -> Jet {
        Jet {
            nvars: self.nvars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn shifted(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }
}

macro_rules! binary_ops {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

binary_ops!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
binary_ops!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
binary_ops!(Mul, mul, |a, b| a.product(b));
binary_ops!(Div, div, |a, b| a.product(&b.recip()));

macro_rules! scalar_ops {
    ($($lhs:ty),*) => {$(
        impl Add<f64> for $lhs {
            type Output = Jet;
            fn add(self, rhs: f64) -> Jet {
                self.shifted(rhs)
            }
        }
        impl Sub<f64> for $lhs {
            type Output = Jet;
            fn sub(self, rhs: f64) -> Jet {
                self.shifted(-rhs)
            }
        }
        impl Mul<f64> for $lhs {
            type Output = Jet;
            fn mul(self, rhs: f64) -> Jet {
                self.scaled(rhs)
            }
        }
        impl Div<f64> for $lhs {
            type Output = Jet;
            fn div(self, rhs: f64) -> Jet {
                self.scaled(1.0 / rhs)
            }
        }
        impl Add<$lhs> for f64 {
            type Output = Jet;
            fn add(self, rhs: $lhs) -> Jet {
                rhs.shifted(self)
            }
        }
        impl Sub<$lhs> for f64 {
            type Output = Jet;
            fn sub(self, rhs: $lhs) -> Jet {
                rhs.scaled(-1.0).shifted(self)
            }
        }
        impl Mul<$lhs> for f64 {
            type Output = Jet;
            fn mul(self, rhs: $lhs) -> Jet {
                rhs.scaled(self)
            }
        }
        impl Div<$lhs> for f64 {
            type Output = Jet;
            fn div(self, rhs: $lhs) -> Jet {
                rhs.recip().scaled(self)
            }
        }
    )*};
}

scalar_ops!(Jet, &Jet);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_sizes_match_binomials() {
        // C(n + k, k)
        assert_eq!(table(2, 2).len(), 6);
        assert_eq!(table(3, 3).len(), 20);
        assert_eq!(table(4, 2).len(), 15);
        assert_eq!(table(1, 6).len(), 7);
    }

    #[test]
    fn lower_order_tables_are_prefixes() {
        let hi = table(3, 4);
        let lo = table(3, 2);
        assert_eq!(&hi.exps[..lo.len()], &lo.exps[..]);
    }

    #[test]
    fn product_rule_on_polynomial() {
        // f = x^2 y at (2, 3)
        let [x, y] = Jet::seeds([2.0, 3.0], 3);
        let f = &x * &x * &y;
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.gradient(), vec![12.0, 4.0]);
        assert_eq!(f.hessian(), vec![vec![6.0, 4.0], vec![4.0, 0.0]]);
        assert_eq!(f.derivative(&[2, 1]), 2.0);
        assert_eq!(f.derivative(&[1, 2]), 0.0);
    }

    #[test]
    fn reciprocal_derivatives() {
        let [x] = Jet::seeds([0.5], 4);
        let r = x.recip();
        // d^n/dx^n 1/x = (-1)^n n! / x^(n+1)
        assert_relative_eq!(r.derivative(&[0]), 2.0);
        assert_relative_eq!(r.derivative(&[1]), -4.0);
        assert_relative_eq!(r.derivative(&[2]), 16.0);
        assert_relative_eq!(r.derivative(&[3]), -96.0);
        assert_relative_eq!(r.derivative(&[4]), 768.0);
    }

    #[test]
    fn partial_lowers_order() {
        let [x, y] = Jet::seeds([1.0, 2.0], 2);
        let f = &x * &y * &y;
        let fy = f.partial(1);
        assert_eq!(fy.order(), 1);
        assert_eq!(fy.value(), 4.0);
        assert_eq!(fy.gradient(), vec![4.0, 2.0]);
    }

    #[test]
    fn compose_matches_direct_chain_rule() {
        // g(u, v) = u * exp(v) expanded about (u0, v0) = (x0 y0, x0 + y0)
        let (x0, y0) = (0.3, -0.7);
        let [u, v] = Jet::seeds([x0 * y0, x0 + y0], 3);
        let g_local = &u * v.exp();
        let [x, y] = Jet::seeds([x0, y0], 3);
        let composed = g_local.compose(&[&x * &y, &x + &y]);
        let direct = (&x * &y) * (&x + &y).exp();
        for (a, b) in composed.coeffs().iter().zip(direct.coeffs()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn compose_into_more_variables() {
        let [u, v] = Jet::seeds([1.5, 2.0], 2);
        let local = &u * &v;
        let [a, b, c, d] = Jet::seeds([9.0, 1.5, 7.0, 2.0], 2);
        let out = local.compose(&[b.clone(), d.clone()]);
        let _ = (a, c);
        assert_eq!(out.nvars(), 4);
        assert_eq!(out.gradient(), vec![0.0, 2.0, 0.0, 1.5]);
        assert_eq!(out.derivative(&[0, 1, 0, 1]), 1.0);
    }

    #[test]
    fn hyperbolic_functions() {
        let [x] = Jet::seeds([0.8], 3);
        let s = x.sinh();
        let c = x.cosh();
        assert_relative_eq!(s.derivative(&[1]), 0.8f64.cosh());
        assert_relative_eq!(c.derivative(&[3]), 0.8f64.sinh());
        let e = x.exp();
        assert_relative_eq!(e.derivative(&[3]), 0.8f64.exp());
    }

    #[test]
    fn mixed_order_arithmetic_truncates() {
        let a = Jet::variable(2, 3, 0, 1.0);
        let b = Jet::variable(2, 1, 1, 2.0);
        let s = &a + &b;
        assert_eq!(s.order(), 1);
        assert_eq!(s.gradient(), vec![1.0, 1.0]);
    }
}
