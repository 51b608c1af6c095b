// Oracle for A_k recognition: rotate to kernel coordinates, eliminate the
// non-degenerate variable through the implicit series and read off the
// coefficients of the reduced one-variable function.

use proptest::prelude::*;
use wavefront::germ::{classify_germ, cubic_kernel_values, kernel_cubic_determinant, quintic_branch, GermClass, GermJet};

const D: usize = 6;

// dense bivariate polynomial p[i][j] x^i y^j, truncated at total degree D
type Poly = Vec<Vec<f64>>;

fn zero() -> Poly {
    vec![vec![0.0; D + 1]; D + 1]
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut r = zero();
    for i in 0..=D {
        for j in 0..=D - i {
            if a[i][j] == 0.0 {
                continue;
            }
            for k in 0..=D - i - j {
                for l in 0..=D - i - j - k {
                    r[i + k][j + l] += a[i][j] * b[k][l];
                }
            }
        }
    }
    r
}

fn add_scaled(a: &mut Poly, b: &Poly, s: f64) {
    for i in 0..=D {
        for j in 0..=D - i {
            a[i][j] += s * b[i][j];
        }
    }
}

fn linear(cx: f64, cy: f64) -> Poly {
    let mut p = zero();
    p[1][0] = cx;
    p[0][1] = cy;
    p
}

// p(X, Y) with X, Y polynomials
fn substitute(p: &Poly, x: &Poly, y: &Poly) -> Poly {
    let mut xp = vec![zero()];
    xp[0][0][0] = 1.0;
    let mut yp = xp.clone();
    for k in 1..=D {
        xp.push(mul(&xp[k - 1], x));
        yp.push(mul(&yp[k - 1], y));
    }
    let mut r = zero();
    for i in 0..=D {
        for j in 0..=D - i {
            if p[i][j] != 0.0 {
                add_scaled(&mut r, &mul(&xp[i], &yp[j]), p[i][j]);
            }
        }
    }
    r
}

fn d_dy(p: &Poly) -> Poly {
    let mut r = zero();
    for i in 0..=D {
        for j in 1..=D - i {
            r[i][j - 1] = j as f64 * p[i][j];
        }
    }
    r
}

// Reduced coefficients e_k of x^k in psi(x, Y(x)), psi_y(x, Y(x)) = 0.
fn reduce(psi: &Poly, s: f64) -> Vec<f64> {
    let g = d_dy(psi);
    let x = linear(1.0, 0.0);
    let mut y = zero();
    for _ in 0..=D {
        let r = substitute(&g, &x, &y);
        add_scaled(&mut y, &r, -1.0 / s);
    }
    let e = substitute(psi, &x, &y);
    (0..=D).map(|k| e[k][0]).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

// Germ in (u, v) with kernel (l, m): phi(u, v) = psi(l u + m v, m u - l v).
fn germ_of(psi: &Poly, l: f64, m: f64) -> GermJet<f64> {
    let phi = substitute(psi, &linear(l, m), &linear(m, -l));
    let mut c = Vec::new();
    for i in 0..=D {
        for j in 0..=D - i {
            c.push(((i, j), phi[i][j] * factorial(i) * factorial(j)));
        }
    }
    GermJet::from_taylor(&c)
}

// psi = s y^2 / 2 + random terms of degree 3..=5, then e_3..=e_kill_to forced to zero.
fn psi_from(s: f64, coeffs: &[f64], kill_to: usize) -> Poly {
    let mut p = zero();
    p[0][2] = s / 2.0;
    let mut it = coeffs.iter();
    for n in 3..=5 {
        for i in 0..=n {
            p[i][n - i] = *it.next().unwrap();
        }
    }
    // make e_3 .. e_kill_to vanish by correcting the pure x^k terms in order
    for k in 3..=kill_to {
        let e = reduce(&p, s);
        p[k][0] -= e[k];
    }
    p
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 15)
}

fn kernel() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..std::f64::consts::PI - 0.05).prop_map(|a| (a.cos(), a.sin()))
}

fn s_value() -> impl Strategy<Value = f64> {
    prop_oneof![0.5f64..3.0, -3.0f64..-0.5]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubic_term_matches(c in coeffs(), (l, m) in kernel(), s in s_value()) {
        let psi = psi_from(s, &c, 2);
        let e = reduce(&psi, s);
        let g = germ_of(&psi, l, m);
        let r = classify_germ(&g).unwrap();
        let k = r.kernel.unwrap();
        prop_assert!((k.s - s).abs() < 1e-9);
        let sign = (k.lambda * l + k.mu * m).signum();
        prop_assert!((r.witnesses.c3.unwrap() - sign * e[3]).abs() < 1e-9);
        prop_assert_eq!(r.class, if e[3].abs() > 1e-6 { GermClass::A2 } else { r.class });
    }

    #[test]
    fn quartic_term_matches(c in coeffs(), (l, m) in kernel(), s in s_value(), bump in -1.0f64..1.0) {
        let mut psi = psi_from(s, &c, 3);
        psi[4][0] += bump;
        let e = reduce(&psi, s);
        prop_assert!(e[3].abs() < 1e-12);
        let r = classify_germ(&germ_of(&psi, l, m)).unwrap();
        prop_assert!((r.witnesses.c4_hat.unwrap() - e[4]).abs() < 1e-8, "{:?} vs {}", r.witnesses, e[4]);
        if bump.abs() > 1e-3 {
            prop_assert_eq!(r.class, GermClass::A3);
        }
    }

    #[test]
    fn quintic_branches_vanish_together(c in coeffs(), (l, m) in kernel(), s in s_value(), bump in -1.0f64..1.0) {
        let mut psi = psi_from(s, &c, 4);
        psi[5][0] += bump;
        let e = reduce(&psi, s);
        prop_assert!(e[4].abs() < 1e-12);
        let g = germ_of(&psi, l, m);
        let r = classify_germ(&g).unwrap();
        let k = r.kernel.unwrap();
        let (qa, _) = quintic_branch(&g, &k, true);
        let (qb, _) = quintic_branch(&g, &k, false);
        // with a unit kernel both branches equal the reduced quintic coefficient
        let sign = (k.lambda * l + k.mu * m).signum();
        prop_assert!((qa - sign * e[5]).abs() < 1e-8 * (1.0 + e[5].abs()), "{} vs {}", qa, e[5]);
        prop_assert!((qb - sign * e[5]).abs() < 1e-8 * (1.0 + e[5].abs()), "{} vs {}", qb, e[5]);
        if bump.abs() > 1e-3 {
            prop_assert_eq!(r.class, GermClass::A4);
        } else {
            prop_assert!(r.class == GermClass::A4 || r.class == GermClass::Worse);
        }
    }

    #[test]
    fn kernel_cubic_identity(c in prop::collection::vec(-2.0f64..2.0, 4), (l, m) in kernel()) {
        let g = GermJet::from_taylor(&[((2, 0), 2.0 * m * m), ((1, 1), -2.0 * l * m), ((0, 2), 2.0 * l * l),
            ((3, 0), c[0]), ((2, 1), c[1]), ((1, 2), c[2]), ((0, 3), c[3])]);
        let k = classify_germ(&g).unwrap().kernel.unwrap();
        let (det, _) = kernel_cubic_determinant(&g, &k);
        let [c3, c3v, c3vv] = cubic_kernel_values(&g, &k);
        let lhs = k.lambda * k.lambda * det + 4.0 * c3v * c3v;
        prop_assert!((lhs - 6.0 * c3vv * c3).abs() < 1e-10, "{} vs {}", lhs, 6.0 * c3vv * c3);
    }
}
