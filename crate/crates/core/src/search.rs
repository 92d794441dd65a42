//! Small search primitives: golden-section bracketing and sphere sampling.

use nalgebra::DVector;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol` (or after `max_iter` shrinks).
///
/// For a function that is not unimodal on the bracket this still returns a
/// local minimum, never a point outside `[a, b]`.
pub fn golden_minimize<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;

    while (b - a) > tol && iterations < max_iter {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iterations += 1;
        // bracket collapsed below float resolution
        if x1 >= x2 {
            break;
        }
    }

    if f1 <= f2 {
        GoldenResult { x: x1, value: f1, iterations }
    } else {
        GoldenResult { x: x2, value: f2, iterations }
    }
}

/// Golden-section search for a maximum; see [`golden_minimize`].
pub fn golden_maximize<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    let r = golden_minimize(|x| -f(x), a, b, tol, max_iter);
    GoldenResult { value: -r.value, ..r }
}

/// `count` nearly uniform points on the unit 2-sphere (Fibonacci lattice).
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Steepest ascent of `value` on the unit sphere starting from `start`, with
/// a golden-section line search along each great circle.
///
/// Returns the best point seen and its value.
pub fn polish_on_sphere<V, G>(value: V, gradient: G, start: &DVector<f64>, max_iter: usize) -> (DVector<f64>, f64)
where
    V: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = start.normalize();
    let mut fx = value(&x);
    for _ in 0..max_iter {
        let g = gradient(&x);
        let tangent = &g - &x * g.dot(&x);
        let tn = tangent.norm();
        if tn < 1e-15 * (1.0 + g.norm()) {
            break;
        }
        let u = tangent / tn;
        let along = |theta: f64| &x * theta.cos() + &u * theta.sin();
        let line = golden_maximize(|theta| value(&along(theta)), 0.0, std::f64::consts::FRAC_PI_2, 1e-14, 200);
        if line.value.is_nan() || line.value <= fx {
            break;
        }
        x = along(line.x).normalize();
        fx = value(&x);
    }
    (x, fx)
}
