//! Casimir levels and constants of motion on one and two copies of the plane.
//!
//! The deformed coproduct lifts a deformed Hamiltonian triple to
//! `R^2 x R^2`:
//!
//! ```text
//! h_{z,1}^(2) = h_{z,1}(p1) + h_{z,1}(p2)
//! h_{z,k}^(2) = h_{z,k}(p1) e^{2z h_{z,1}(p2)} + e^{−2z h_{z,1}(p1)} h_{z,k}(p2)   (k = 2, 3)
//! ```
//!
//! and the coupled invariant `F_z^(2) = shc(2z h_{z,1}^(2)) h_{z,1}^(2) h_{z,3}^(2) − (h_{z,2}^(2))²`
//! Poisson-commutes with all three lifted functions under ω⊕ω.

use crate::catalog::ClassTag;
use crate::deformation::DeformedSystem;
use crate::error::Result;
use crate::geometry::{
    poisson_bracket, Domain, JetFn, ScalarField, ScalarField2D, SymplecticForm, TwoCopyField,
    DEFAULT_GUARD,
};

/// `shc(2z h_{z,1}) h_{z,1} h_{z,3} − h_{z,2}²`, identically `c/4`.
pub fn casimir_level(dsys: &DeformedSystem) -> ScalarField2D {
    let z = dsys.z;
    let [h1, h2, h3] = &dsys.h;
    let s = h1.map(move |h| (h * (2.0 * z)).shc());
    &(&(&s * h1) * h3) - &h2.square()
}

/// The deformed coproduct lift of the Hamiltonian triple.
pub fn two_copy_lift(dsys: &DeformedSystem) -> [TwoCopyField; 3] {
    let z = dsys.z;
    let first: [TwoCopyField; 3] = std::array::from_fn(|k| dsys.h[k].on_copy(0));
    let second: [TwoCopyField; 3] = std::array::from_fn(|k| dsys.h[k].on_copy(1));
    let up = second[0].map(move |h| (h * (2.0 * z)).exp());
    let down = first[0].map(move |h| (h * (-2.0 * z)).exp());
    let lift = |k: usize| &(&first[k] * &up) + &(&down * &second[k]);
    [&first[0] + &second[0], lift(1), lift(2)]
}

/// `F_z^(2)` built from the lifted triple.
pub fn coupled_invariant(dsys: &DeformedSystem) -> TwoCopyField {
    let z = dsys.z;
    let [h1, h2, h3] = two_copy_lift(dsys);
    let s = h1.map(move |h| (h * (2.0 * z)).shc());
    &(&(&s * &h1) * &h3) - &h2.square()
}

/// ω⊕ω for the system's symplectic form.
pub fn product_form(dsys: &DeformedSystem) -> SymplecticForm<4> {
    dsys.base.omega.product()
}

/// `{f, g}` on the two-copy manifold.
pub fn product_bracket(dsys: &DeformedSystem, f: &TwoCopyField, g: &TwoCopyField) -> TwoCopyField {
    poisson_bracket(f, g, &product_form(dsys))
}

/// Additive constant `coupled_invariant − table_coupled_forms` for the
/// default representative of each class. Measured to vanish for all three.
pub fn table_offset(tag: ClassTag) -> f64 {
    match tag {
        ClassTag::P2 | ClassTag::I4 | ClassTag::I5 => 0.0,
    }
}

fn nonzero(guard: f64, dens: fn(&[f64; 4]) -> Vec<f64>) -> Domain<4> {
    Domain::new(move |p: &[f64; 4]| dens(p).iter().all(|d| d.abs() > guard))
}

/// The tabulated two-copy invariant for the default representative of a
/// class: the undeformed entry at `z = 0`, the deformed entry otherwise.
///
/// Defined wherever the denominators are nonzero, which is wider than the
/// class domain.
pub fn table_coupled_forms(tag: ClassTag, z: f64) -> Result<TwoCopyField> {
    if !z.is_finite() {
        return Err(crate::Error::InvalidArgument(format!(
            "deformation parameter must be finite, got {z}"
        )));
    }
    let g = DEFAULT_GUARD;
    let field =
        |dens: fn(&[f64; 4]) -> Vec<f64>, f: JetFn<4>| ScalarField::new(nonzero(g, dens), f);
    let undeformed = z == 0.0;
    Ok(match tag {
        ClassTag::P2 => field(
            |p| vec![p[1], p[3]],
            if undeformed {
                Box::new(|v| {
                    ((&v[0] - &v[2]).square() + (&v[1] + &v[3]).square()) / (&v[1] * &v[3])
                })
            } else {
                Box::new(move |v| {
                    let (a1, a2) = (v[1].recip() * (2.0 * z), v[3].recip() * (2.0 * z));
                    let (s1, s2) = (a1.shc(), a2.shc());
                    let e = (&a1 - &a2).exp();
                    let den = &v[1] * &v[3];
                    let first = (&v[0] - &v[2]).square() / &den * &s1 * &s2 * &e;
                    let second = (&v[1] + &v[3]).square() / &den * (&a1 + &a2).shc().square()
                        / (s1 * s2)
                        * e;
                    first + second
                })
            },
        ),
        ClassTag::I4 => field(
            |p| vec![p[0] - p[1], p[2] - p[3]],
            if undeformed {
                Box::new(|v| {
                    -((&v[2] - &v[1]) * (&v[0] - &v[3])) / ((&v[0] - &v[1]) * (&v[2] - &v[3]))
                })
            } else {
                Box::new(move |v| {
                    let (d1, d2) = (&v[0] - &v[1], &v[2] - &v[3]);
                    let (a1, a2) = (d1.recip() * (2.0 * z), d2.recip() * (2.0 * z));
                    let (s1, s2) = (a1.shc(), a2.shc());
                    let (e1, e2) = ((-&a1).exp(), a2.exp());
                    let den = &d1 * &d2 * 4.0;
                    let first =
                        (&v[0] - &v[2] + &v[1] - &v[3]).square() / &den * &s1 * &s2 * &e1 * &e2;
                    let bracket = e2 * &d1 / s1 + e1 * &d2 / s2;
                    let second =
                        (&v[0] + &v[2] - &v[1] - &v[3]) * (&a1 + &a2).shc() / den * bracket;
                    first - second
                })
            },
        ),
        ClassTag::I5 => field(
            |p| vec![p[1], p[3]],
            if undeformed {
                Box::new(|v| (&v[0] - &v[2]).square() / ((v[1].square() * v[3].square()) * 4.0))
            } else {
                Box::new(move |v| {
                    let (a1, a2) = (v[1].square().recip() * z, v[3].square().recip() * z);
                    (&v[0] - &v[2]).square() / ((v[1].square() * v[3].square()) * 4.0)
                        * a1.shc()
                        * a2.shc()
                        * (a1 - a2).exp()
                })
            },
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_class;
    use crate::deformation::structure_functions;
    use crate::geometry::{fd_bracket_oracle, fd_gradient, shc};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dsys(tag: ClassTag, z: f64) -> DeformedSystem {
        DeformedSystem::new(&make_class(tag, None).unwrap(), z).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn casimir_levels_are_c_over_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (tag, expect) in [
            (ClassTag::P2, 1.0),
            (ClassTag::I4, -0.25),
            (ClassTag::I5, 0.0),
        ] {
            for z in [0.0, 0.1, 0.5] {
                let d = dsys(tag, z);
                let f = casimir_level(&d);
                for _ in 0..200 {
                    let p = d.base.sample_point(&mut rng);
                    assert!((f.eval(p).unwrap() - expect).abs() < 1e-12, "{tag} z={z}");
                }
            }
        }
    }

    #[test]
    fn lift_at_zero_is_sum() {
        let d = dsys(ClassTag::P2, 0.0);
        let lifted = two_copy_lift(&d);
        let (p1, p2) = ([0.3, 1.1], [-0.7, 0.6]);
        let q = [p1[0], p1[1], p2[0], p2[1]];
        let swapped = [p2[0], p2[1], p1[0], p1[1]];
        for k in 0..3 {
            let sum = d.h[k].eval(p1).unwrap() + d.h[k].eval(p2).unwrap();
            assert_relative_eq!(lifted[k].eval(q).unwrap(), sum, max_relative = 1e-14);
            assert_relative_eq!(lifted[k].eval(swapped).unwrap(), sum, max_relative = 1e-14);
        }
    }

    #[test]
    fn swap_exchanges_exponentials() {
        let z = 0.3;
        let d = dsys(ClassTag::I5, z);
        let lifted = two_copy_lift(&d);
        let (p1, p2) = ([0.3, 1.1], [-0.7, 0.6]);
        let (a1, a2) = (d.h[0].eval(p1).unwrap(), d.h[0].eval(p2).unwrap());
        let (b1, b2) = (d.h[1].eval(p1).unwrap(), d.h[1].eval(p2).unwrap());
        let swapped = lifted[1].eval([p2[0], p2[1], p1[0], p1[1]]).unwrap();
        let mirror = b2 * (2.0 * z * a1).exp() + (-2.0 * z * a2).exp() * b1;
        assert_relative_eq!(swapped, mirror, max_relative = 1e-14);
    }

    #[test]
    fn lifted_brackets_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tag in ClassTag::ALL {
            for z in [0.0, 0.1, 0.5] {
                let d = dsys(tag, z);
                let lifted = two_copy_lift(&d);
                let h1 = &lifted[0];
                let s = h1.map(move |h| (h * (2.0 * z)).shc());
                let c = h1.map(move |h| (h * (2.0 * z)).cosh());
                let expected = [-&(&s * h1), &lifted[1] * -2.0, -&(&c * &lifted[2])];
                let pairs = [(0, 1), (0, 2), (1, 2)];
                for _ in 0..50 {
                    let q = d.base.sample_two_copy(&mut rng);
                    for (k, &(i, j)) in pairs.iter().enumerate() {
                        let b = product_bracket(&d, &lifted[i], &lifted[j]).eval(q).unwrap();
                        assert!(
                            close(b, expected[k].eval(q).unwrap(), 1e-10),
                            "{tag} z={z} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fd_product_bracket_oracle() {
        let d = dsys(ClassTag::P2, 0.2);
        let lifted = two_copy_lift(&d);
        let q = [0.4, 1.3, -0.2, 0.9];
        let fd = fd_bracket_oracle(&lifted[0], &lifted[1], &product_form(&d), q, 1e-5).unwrap();
        let h = lifted[0].eval(q).unwrap();
        let expected = -shc(0.4 * h).unwrap() * h;
        assert!((fd - expected).abs() < 1e-8 * (1.0 + expected.abs()));
    }

    #[test]
    fn coupled_invariant_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for tag in ClassTag::ALL {
            for z in [0.0, 0.1, 0.5] {
                let d = dsys(tag, z);
                let f = coupled_invariant(&d);
                let lifted = two_copy_lift(&d);
                for _ in 0..30 {
                    let q = d.base.sample_two_copy(&mut rng);
                    for h in &lifted {
                        let b = product_bracket(&d, &f, h).eval(q).unwrap();
                        assert!(b.abs() < 1e-9, "{tag} z={z} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = dsys(ClassTag::I4, 0.3);
        let f = coupled_invariant(&d);
        let q = [1.5, 0.2, 0.7, -0.8];
        let exact = f.grad(q).unwrap();
        let fd = fd_gradient(&f, q, 1e-5).unwrap();
        for i in 0..4 {
            assert!((exact[i] - fd[i]).abs() <= 1e-6 * exact[i].abs().max(1.0));
        }
    }

    #[test]
    fn table_one_examples() {
        let p2 = table_coupled_forms(ClassTag::P2, 0.0).unwrap();
        assert_relative_eq!(
            p2.eval([1.0, 2.0, 3.0, 4.0]).unwrap(),
            5.0,
            max_relative = 1e-15
        );
        let i4 = table_coupled_forms(ClassTag::I4, 0.0).unwrap();
        assert_relative_eq!(
            i4.eval([1.0, 2.0, 0.0, 3.0]).unwrap(),
            -4.0 / 3.0,
            max_relative = 1e-15
        );
        assert!(p2.eval([1.0, 0.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn table_two_limit_is_table_one() {
        // the exponential factors make the approach linear in z
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for tag in ClassTag::ALL {
            let sys = make_class(tag, None).unwrap();
            let t1 = table_coupled_forms(tag, 0.0).unwrap();
            let at = |z: f64| table_coupled_forms(tag, z).unwrap();
            let (a, b, tiny) = (at(1e-5), at(5e-6), at(1e-9));
            for _ in 0..100 {
                let q = sys.sample_two_copy(&mut rng);
                let base = t1.eval(q).unwrap();
                assert!(close(tiny.eval(q).unwrap(), base, 1e-8), "{tag}");
                let (ga, gb) = (a.eval(q).unwrap() - base, b.eval(q).unwrap() - base);
                assert!(ga.abs() <= 1e-3 * (1.0 + base.abs()), "{tag}");
                assert!(
                    (ga - 2.0 * gb).abs() <= 1e-7 * (1.0 + base.abs()),
                    "{tag} {ga} {gb}"
                );
            }
        }
    }

    #[test]
    fn i5_deformed_closed_form() {
        let z = 0.1;
        let d = dsys(ClassTag::I5, z);
        let f = coupled_invariant(&d);
        let q = [0.4, 0.8, -1.2, 1.5];
        let (x1, y1, x2, y2) = (q[0], q[1], q[2], q[3]);
        let (a1, a2) = (z / (y1 * y1), z / (y2 * y2));
        let expected = (x1 - x2).powi(2) / (4.0 * y1 * y1 * y2 * y2)
            * shc(a1).unwrap()
            * shc(a2).unwrap()
            * (a1 - a2).exp();
        assert_relative_eq!(f.eval(q).unwrap(), expected, max_relative = 1e-10);
    }

    #[test]
    fn offsets_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in ClassTag::ALL {
            for z in [0.0, 0.1, 0.5] {
                let d = dsys(tag, z);
                let f = coupled_invariant(&d);
                let t = table_coupled_forms(tag, z).unwrap();
                for _ in 0..100 {
                    let q = d.base.sample_two_copy(&mut rng);
                    let diff = f.eval(q).unwrap() - t.eval(q).unwrap();
                    assert!(close(diff, table_offset(tag), 1e-9), "{tag} z={z} {diff}");
                }
            }
        }
    }

    #[test]
    fn single_copy_structure_is_consistent() {
        // F12 at the Casimir level: {h1,h2} = −shc(2zh1) h1 on copy one
        let d = dsys(ClassTag::P2, 0.25);
        let f = structure_functions(&d.base, 0.25).unwrap();
        let b = poisson_bracket(&d.h[0], &d.h[1], &d.base.omega)
            .eval([0.5, 1.5])
            .unwrap();
        assert_relative_eq!(b, f[0].eval([0.5, 1.5]).unwrap(), max_relative = 1e-12);
    }
}
