//! Quadrature rules used when discretizing analytic forms: Gauss–Legendre
//! on segments and symmetric rules on triangles.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("Gauss-Legendre order must be in 1..={max}, got {order}", max = MAX_GAUSS_ORDER)]
    InvalidGaussOrder { order: usize },
    #[error("triangle rule degree must be in 1..=5, got {degree}")]
    InvalidTriangleDegree { degree: usize },
}

pub const MAX_GAUSS_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on [0, 1].
///
/// Nodes are the Legendre roots found by Newton iteration; an `n`-point rule
/// integrates polynomials up to degree `2n - 1` exactly.
pub fn gauss_legendre_01(order: usize) -> Result<Vec<(f64, f64)>, QuadratureError> {
    if order == 0 || order > MAX_GAUSS_ORDER {
        return Err(QuadratureError::InvalidGaussOrder { order });
    }
    let n = order;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // initial guess (Chebyshev-like), then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push(((x + 1.0) * 0.5, w * 0.5));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(rule)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A symmetric triangle rule in barycentric coordinates; weights sum to one
/// and multiply the triangle area.
pub fn triangle_rule(degree: usize) -> Result<Vec<([f64; 3], f64)>, QuadratureError> {
    // Standard symmetric rules (Dunavant). The degree-3 rule carries one
    // negative weight, which is fine for the smooth integrands used here.
    let pts: Vec<([f64; 3], f64)> = match degree {
        1 => vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)],
        2 => symmetric_orbit(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0),
        3 => {
            let mut v = vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], -27.0 / 48.0)];
            v.extend(symmetric_orbit(0.6, 0.2, 25.0 / 48.0));
            v
        }
        4 => {
            let mut v = symmetric_orbit(0.108103018168070, 0.445948490915965, 0.223381589678011);
            v.extend(symmetric_orbit(0.816847572980459, 0.091576213509771, 0.109951743655322));
            v
        }
        5 => {
            let mut v = vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225)];
            v.extend(symmetric_orbit(0.059715871789770, 0.470142064105115, 0.132394152788506));
            v.extend(symmetric_orbit(0.797426985353087, 0.101286507323456, 0.125939180544827));
            v
        }
        _ => return Err(QuadratureError::InvalidTriangleDegree { degree }),
    };
    Ok(pts)
}

fn symmetric_orbit(a: f64, b: f64, w: f64) -> Vec<([f64; 3], f64)> {
    vec![([a, b, b], w), ([b, a, b], w), ([b, b, a], w)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_01(order: usize, f: impl Fn(f64) -> f64) -> f64 {
        gauss_legendre_01(order)
            .unwrap()
            .iter()
            .map(|&(x, w)| w * f(x))
            .sum()
    }

    #[test]
    fn gauss_weights_sum_to_one() {
        for order in 1..=MAX_GAUSS_ORDER {
            let s: f64 = gauss_legendre_01(order).unwrap().iter().map(|&(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-14, "order {order}: {s}");
        }
    }

    #[test]
    fn gauss_exact_for_polynomials() {
        // order n is exact through degree 2n-1
        for order in 1..=8 {
            let deg = 2 * order - 1;
            let exact = 1.0 / (deg as f64 + 1.0);
            let got = integrate_01(order, |x| x.powi(deg as i32));
            assert!((got - exact).abs() < 1e-14, "order {order} deg {deg}: {got} vs {exact}");
        }
    }

    #[test]
    fn gauss_order_validation() {
        assert!(gauss_legendre_01(0).is_err());
        assert!(gauss_legendre_01(MAX_GAUSS_ORDER + 1).is_err());
    }

    #[test]
    fn triangle_weights_sum_to_one() {
        for degree in 1..=5 {
            let s: f64 = triangle_rule(degree).unwrap().iter().map(|&(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-14, "degree {degree}: {s}");
        }
    }

    #[test]
    fn triangle_exactness_on_monomials() {
        // reference triangle (0,0),(1,0),(0,1): ∫ x^p y^q = p! q! / (p+q+2)!
        let factorial = |n: usize| (1..=n).map(|k| k as f64).product::<f64>().max(1.0);
        for degree in 1..=5usize {
            for p in 0..=degree {
                for q in 0..=(degree - p) {
                    let exact = factorial(p) * factorial(q) / factorial(p + q + 2);
                    let rule = triangle_rule(degree).unwrap();
                    // area of reference triangle is 1/2; weights multiply area
                    let got: f64 = rule
                        .iter()
                        .map(|&([_, b, c], w)| {
                            let x = b;
                            let y = c;
                            0.5 * w * x.powi(p as i32) * y.powi(q as i32)
                        })
                        .sum();
                    assert!(
                        (got - exact).abs() < 1e-14,
                        "degree {degree} monomial x^{p} y^{q}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_degree_validation() {
        assert!(triangle_rule(0).is_err());
        assert!(triangle_rule(6).is_err());
    }
}
