//! Quadrature engines on S^n with symmetry reduction.
//!
//! Single-center integrands reduce to one polar angle, two-center
//! integrands to (polar, azimuth); everything else goes through the
//! stereographic radial-angular product rule or seeded Monte-Carlo.
//! All rules accumulate in a fixed order so results are deterministic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sphere::{surface_area, SpherePoint, StereoChart};

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for k in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Process-wide cache of Gauss-Legendre tables keyed by node count.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Which engine a quadrature request should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Axisym1d,
    Biaxisym2d,
    RadialAngular,
    MonteCarlo,
}

/// Resolution parameters shared by the quadrature engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    /// Gauss-Legendre nodes per panel for the deterministic rules.
    pub nodes: usize,
    /// Product-Gauss order per angle for the radial-angular rule.
    pub angular_order: usize,
    /// Sample count for Monte-Carlo.
    pub mc_samples: usize,
    /// Monte-Carlo seed; deterministic output for a fixed seed.
    pub seed: u64,
}

impl QuadratureRule {
    pub fn axisym(nodes: usize) -> Self {
        QuadratureRule {
            kind: RuleKind::Axisym1d,
            nodes,
            ..Self::default()
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            kind: RuleKind::Axisym1d,
            nodes: 256,
            angular_order: 8,
            mc_samples: 1_000_000,
            seed: 0,
        }
    }
}

fn check_finite(v: f64, context: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::IntegrationFailure {
            context: context.to_string(),
        })
    }
}

/// `omega_(n-1) * int_0^pi f(theta) sin^(n-1)(theta) dtheta` by
/// Gauss-Legendre over the given panel decomposition of [0, pi].
///
/// Panels let callers isolate sharp bubble cores so the rule keeps its
/// spectral accuracy at large concentration.
pub fn integrate_axisym_panels<F>(
    n: usize,
    nodes: usize,
    panels: &[f64],
    mut f: F,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let gl = gauss_legendre(nodes);
    let mut acc = 0.0;
    let mut bad = false;
    for win in panels.windows(2) {
        acc += gl.integrate(win[0], win[1], |theta| {
            let v = f(theta) * theta.sin().powi(n as i32 - 1);
            if !v.is_finite() {
                bad = true;
                return 0.0;
            }
            v
        });
    }
    if bad {
        return Err(Error::IntegrationFailure {
            context: "axisymmetric integrand".into(),
        });
    }
    check_finite(acc * surface_area(n - 1), "axisymmetric accumulation")
}

/// Single-panel axisymmetric integral over [0, pi].
pub fn integrate_axisym<F>(n: usize, nodes: usize, f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_axisym_panels(n, nodes, &[0.0, std::f64::consts::PI], f)
}

/// Panel decomposition of [0, pi] that isolates bubble cores of width
/// ~1/lambda around each listed polar angle.
pub fn core_panels(centers_theta: &[f64], lambda_max: f64) -> Vec<f64> {
    let w = (20.0 / lambda_max.max(1.0)).min(0.4);
    let mut cuts = vec![0.0, std::f64::consts::PI];
    for &t in centers_theta {
        for c in [t - w, t + w] {
            if c > 1e-12 && c < std::f64::consts::PI - 1e-12 {
                cuts.push(c);
            }
        }
        // A mid cut keeps panels short between core and bulk.
        let m = t + 10.0 * w;
        if m > 1e-12 && m < std::f64::consts::PI - 1e-12 {
            cuts.push(m);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts
}

/// Two-center reduction: integrates `f(theta, psi)` where `theta` is the
/// polar angle to the first center and `psi` the azimuth measured from
/// the geodesic toward the second center:
///
/// `omega_(n-2) * int int f sin^(n-1)(theta) sin^(n-2)(psi) dpsi dtheta`.
///
/// For a point at (theta, psi) the distance d2 to the second center obeys
/// `cos d2 = cos(theta) cos(d12) + sin(theta) cos(psi) sin(d12)`.
pub fn integrate_biaxisym_panels<F>(
    n: usize,
    nodes: usize,
    theta_panels: &[f64],
    mut f: F,
) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    let gl = gauss_legendre(nodes);
    let mut acc = 0.0;
    let mut bad = false;
    for win in theta_panels.windows(2) {
        acc += gl.integrate(win[0], win[1], |theta| {
            let st = theta.sin();
            let inner = gl.integrate(0.0, std::f64::consts::PI, |psi| {
                let v = f(theta, psi) * psi.sin().powi(n as i32 - 2);
                if !v.is_finite() {
                    bad = true;
                    return 0.0;
                }
                v
            });
            inner * st.powi(n as i32 - 1)
        });
    }
    if bad {
        return Err(Error::IntegrationFailure {
            context: "biaxisymmetric integrand".into(),
        });
    }
    check_finite(acc * surface_area(n - 2), "biaxisymmetric accumulation")
}

/// cos of the distance to the second center for the biaxial parametrization.
#[inline]
pub fn biaxial_cos_d2(theta: f64, psi: f64, d12: f64) -> f64 {
    (theta.cos() * d12.cos() + theta.sin() * psi.cos() * d12.sin()).clamp(-1.0, 1.0)
}

/// Uniform Monte-Carlo on S^n; returns (estimate, standard error).
/// Deterministic for a fixed seed; accumulation order is fixed.
pub fn integrate_mc<F>(n: usize, samples: usize, seed: u64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    if samples < 1000 {
        return Err(Error::TooFewSamples(samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; n + 1];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count = 0.0f64;
    for _ in 0..samples {
        loop {
            let mut r2 = 0.0;
            for c in point.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *c = g;
                r2 += g * g;
            }
            if r2 > 1e-24 {
                let r = r2.sqrt();
                for c in point.iter_mut() {
                    *c /= r;
                }
                break;
            }
        }
        let v = f(&point);
        if !v.is_finite() {
            return Err(Error::IntegrationFailure {
                context: "monte-carlo sample".into(),
            });
        }
        count += 1.0;
        let d = v - mean;
        mean += d / count;
        m2 += d * (v - mean);
    }
    let area = surface_area(n);
    let var = m2 / (count - 1.0);
    let se = area * (var / count).sqrt();
    Ok((area * mean, se))
}

/// Product-Gauss directions on S^(m-1): polar angles on [0, pi] with the
/// sin-power measure folded into the weights, final azimuth on [0, 2 pi].
fn angular_directions(m: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let gl = gauss_legendre(order.max(2));
    let mut dirs: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for level in 0..(m - 1) {
        let last = level == m - 2;
        let (a, b) = if last {
            (0.0, 2.0 * std::f64::consts::PI)
        } else {
            (0.0, std::f64::consts::PI)
        };
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut next = Vec::with_capacity(dirs.len() * gl.nodes.len());
        for (angles, w) in &dirs {
            for (x, gw) in gl.nodes.iter().zip(&gl.weights) {
                let phi = mid + half * x;
                let sin_pow = if last {
                    1.0
                } else {
                    phi.sin().powi((m - 2 - level) as i32)
                };
                let mut a2 = angles.clone();
                a2.push(phi);
                next.push((a2, w * gw * half * sin_pow));
            }
        }
        dirs = next;
    }
    // Convert angle tuples to unit vectors in R^m.
    dirs.into_iter()
        .map(|(angles, w)| {
            let mut v = vec![0.0; m];
            let mut sin_prod = 1.0;
            for (j, phi) in angles.iter().enumerate() {
                v[j] = sin_prod * phi.cos();
                sin_prod *= phi.sin();
            }
            v[m - 1] = sin_prod;
            (v, w)
        })
        .collect()
}

/// Stereographic radial-angular rule for general integrands on S^n:
/// Gauss-Legendre in the polar angle from the chart pole times a
/// product-Gauss rule over the latitude directions. Used for three or
/// more centers or fully general integrands.
pub fn integrate_radial_angular<F>(
    n: usize,
    chart: &StereoChart,
    radial_nodes: usize,
    angular_order: usize,
    theta_panels: &[f64],
    mut f: F,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let frame = crate::sphere::orthonormal_frame(chart.pole());
    let dirs = angular_directions(n, angular_order);
    let gl = gauss_legendre(radial_nodes);
    let m = n + 1;
    let mut point = vec![0.0; m];
    let mut acc = 0.0;
    let mut bad = false;
    for win in theta_panels.windows(2) {
        acc += gl.integrate(win[0], win[1], |theta| {
            let (ct, st) = (theta.cos(), theta.sin());
            let mut inner = 0.0;
            for (dir, w) in &dirs {
                for i in 0..m {
                    let mut tang = 0.0;
                    for (j, dj) in dir.iter().enumerate() {
                        tang += dj * frame[j + 1][i];
                    }
                    point[i] = ct * frame[0][i] + st * tang;
                }
                let v = f(&point);
                if !v.is_finite() {
                    bad = true;
                } else {
                    inner += w * v;
                }
            }
            inner * st.powi(n as i32 - 1)
        });
    }
    if bad {
        return Err(Error::IntegrationFailure {
            context: "radial-angular integrand".into(),
        });
    }
    check_finite(acc, "radial-angular accumulation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SpherePoint;

    #[test]
    fn gauss_legendre_exactness() {
        let gl = GaussLegendre::new(8);
        // Exact for polynomials up to degree 15.
        let v = gl.integrate(-1.0, 1.0, |x| x.powi(14));
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn axisym_surface_area_and_symmetries() {
        let pi = std::f64::consts::PI;
        // f == 1, n = 5 gives the S^5 area pi^3.
        let v = integrate_axisym(5, 128, |_| 1.0).unwrap();
        assert!((v - pi.powi(3)).abs() < 1e-10 * pi.powi(3));
        // Odd symmetry about the equator.
        let v = integrate_axisym(6, 128, |t| t.cos()).unwrap();
        assert!(v.abs() < 1e-12);
        // Hemisphere indicator: half the area. The jump breaks spectral
        // accuracy, so split panels at the equator.
        let v = integrate_axisym_panels(5, 128, &[0.0, pi / 2.0, pi], |t| {
            if t <= pi / 2.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!((v - pi.powi(3) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn axisym_doubling_converges() {
        // Smooth integrand: doubling nodes moves the value < 1e-9.
        let f = |t: f64| (1.0 + 0.5 * t.cos()).powf(2.5) * (3.0 * t).sin().cos();
        let a = integrate_axisym(5, 128, f).unwrap();
        let b = integrate_axisym(5, 256, f).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn axisym_rejects_nonfinite() {
        let r = integrate_axisym(5, 64, |t| 1.0 / (t - t));
        assert!(matches!(r, Err(Error::IntegrationFailure { .. })));
    }

    #[test]
    fn biaxisym_constant_and_reduction() {
        let pi = std::f64::consts::PI;
        for n in [5usize, 6] {
            let v = integrate_biaxisym_panels(n, 96, &[0.0, pi], |_, _| 1.0).unwrap();
            assert!(
                (v - surface_area(n)).abs() < 1e-9 * surface_area(n),
                "n={n}: {v}"
            );
            // Depending only on theta must agree with the axisym rule.
            let f1 = |t: f64| (1.0 + 0.3 * t.cos()).powi(3);
            let a = integrate_axisym(n, 96, f1).unwrap();
            let b = integrate_biaxisym_panels(n, 96, &[0.0, pi], |t, _| f1(t)).unwrap();
            assert!((a - b).abs() < 1e-8 * a.abs());
        }
    }

    #[test]
    fn monte_carlo_contract() {
        // Zero-variance integrand reproduces the area exactly.
        let (v, se) = integrate_mc(5, 2000, 0, |_| 1.0).unwrap();
        assert!((v - surface_area(5)).abs() < 1e-12);
        assert!(se.abs() < 1e-12);
        // Odd coordinate averages to zero within 3 sigma.
        let (v, se) = integrate_mc(5, 20_000, 1, |x| x[0]).unwrap();
        assert!(v.abs() < 3.0 * se);
        // x_1^2 averages to area/6 on S^5 within 3 sigma.
        let (v, se) = integrate_mc(5, 40_000, 2, |x| x[0] * x[0]).unwrap();
        assert!((v - surface_area(5) / 6.0).abs() < 3.0 * se);
        // Determinism for a fixed seed.
        let (v2, _) = integrate_mc(5, 40_000, 2, |x| x[0] * x[0]).unwrap();
        assert_eq!(v, v2);
        assert!(matches!(
            integrate_mc(5, 10, 0, |_| 1.0),
            Err(Error::TooFewSamples(10))
        ));
    }

    #[test]
    fn radial_angular_area_and_moment() {
        let pi = std::f64::consts::PI;
        for n in [5usize, 6] {
            let chart = StereoChart::new(SpherePoint::pole(n, 0));
            // Order 8 per angle is the default; it is a cross-check rule,
            // good to ~4-6 digits on direction-dependent integrands.
            let v = integrate_radial_angular(n, &chart, 48, 8, &[0.0, pi], |_| 1.0).unwrap();
            assert!(
                (v - surface_area(n)).abs() < 1e-5 * surface_area(n),
                "area n={n}: {v}"
            );
            let v16 = integrate_radial_angular(n, &chart, 48, 16, &[0.0, pi], |_| 1.0).unwrap();
            assert!(
                (v16 - surface_area(n)).abs() < 1e-10 * surface_area(n),
                "area16 n={n}: {v16}"
            );
            // Second moment of one coordinate: area / (n+1).
            let v =
                integrate_radial_angular(n, &chart, 48, 8, &[0.0, pi], |x| x[1] * x[1]).unwrap();
            let expect = surface_area(n) / (n as f64 + 1.0);
            assert!((v - expect).abs() < 2e-3 * expect, "moment n={n}: {v}");
            // Doubling the angular order tightens it by orders of magnitude.
            let v16 =
                integrate_radial_angular(n, &chart, 48, 16, &[0.0, pi], |x| x[1] * x[1]).unwrap();
            assert!((v16 - expect).abs() < 1e-9 * expect, "moment16 n={n}: {v16}");
        }
    }

    #[test]
    fn quadrature_rule_defaults() {
        let r = QuadratureRule::default();
        assert_eq!(r.nodes, 256);
        assert_eq!(r.angular_order, 8);
        assert_eq!(r.mc_samples, 1_000_000);
        assert_eq!(r.seed, 0);
    }
}
