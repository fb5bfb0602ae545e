//! Geometry of the round spheres S^5 and S^6.
//!
//! Points are stored ambiently as unit vectors in R^(n+1); charts are
//! transient objects so no coordinate singularity is ever persisted.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

pub mod quad;

/// Surface area of the unit n-sphere, `2 pi^((n+1)/2) / Gamma((n+1)/2)`.
pub fn surface_area(n: usize) -> f64 {
    let half = (n as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// Lanczos approximation, accurate to ~1e-13 for the arguments used here.
pub fn gamma(x: f64) -> f64 {
    // g = 7, n = 9 coefficients.
    const COEFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return pi / ((pi * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = COEFS[0];
    let t = x + 7.5;
    for (i, &c) in COEFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// A point of S^n stored as a unit vector in R^(n+1).
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes the given ambient vector onto the sphere.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let r = norm(&coords);
        if !r.is_finite() || r < 1e-14 {
            return Err(Error::IntegrationFailure {
                context: "cannot normalize a (near-)zero vector onto the sphere".into(),
            });
        }
        let coords = coords.into_iter().map(|c| c / r).collect();
        Ok(SpherePoint { coords })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(v.to_vec())
    }

    /// The i-th coordinate pole `+e_i` of S^n.
    pub fn pole(n: usize, i: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[i] = 1.0;
        SpherePoint { coords }
    }

    pub fn antipode(&self) -> Self {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Sphere dimension n (ambient dimension minus one).
    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    #[inline]
    pub fn inner(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    /// Moves the point by an ambient displacement and renormalizes.
    pub fn retract(&self, step: &[f64]) -> SpherePoint {
        let coords: Vec<f64> = self
            .coords
            .iter()
            .zip(step)
            .map(|(x, s)| x + s)
            .collect();
        SpherePoint::new(coords).expect("retraction of a finite step stays normalizable")
    }
}

/// Clamping tolerance before `acos`; guards pure round-off excursions.
const COS_CLAMP: f64 = 1e-14;

fn clamp_cos(c: f64) -> f64 {
    if c > 1.0 {
        debug_assert!(c < 1.0 + COS_CLAMP * 10.0);
        1.0
    } else if c < -1.0 {
        debug_assert!(c > -1.0 - COS_CLAMP * 10.0);
        -1.0
    } else {
        c
    }
}

/// Geodesic distance `arccos <x, y>` in [0, pi].
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    clamp_cos(x.inner(y)).acos()
}

/// Green function of the Paneitz operator on S^6, `(1 - cos d)^-1`.
/// Defined for any pair of distinct points regardless of dimension.
pub fn green_function(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let c = clamp_cos(x.inner(y));
    let denom = 1.0 - c;
    if denom <= 1e-14 {
        return Err(Error::CoincidentPoints);
    }
    Ok(1.0 / denom)
}

/// Orthonormal frame `(axis, t_1, ..., t_n)` built deterministically by a
/// Householder reflection; columns after the first span the tangent space.
pub fn orthonormal_frame(axis: &SpherePoint) -> Vec<Vec<f64>> {
    let a = axis.coords();
    let m = a.len();
    let sigma = if a[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = a.to_vec();
    v[0] += sigma;
    let vv = dot(&v, &v);
    let mut frame = Vec::with_capacity(m);
    // Column j of H = I - 2 v v^T / (v.v); column 0 equals -sigma * a, so we
    // flip signs to start the frame with the axis itself.
    for j in 0..m {
        let mut col = vec![0.0; m];
        col[j] = 1.0;
        let f = 2.0 * v[j] / vv;
        for i in 0..m {
            col[i] -= f * v[i];
        }
        if j == 0 {
            for c in col.iter_mut() {
                *c *= -sigma;
            }
        }
        frame.push(col);
    }
    frame
}

/// Tangent basis at `axis`: the frame without its first column.
pub fn tangent_basis(axis: &SpherePoint) -> Vec<Vec<f64>> {
    orthonormal_frame(axis).split_off(1)
}

/// Orthonormal frame adapted to two centers: `(a1, w, s_1, ..., s_(n-1))`
/// where `w` spans the geodesic direction from `a1` toward `a2`.
pub fn biaxial_frame(a1: &SpherePoint, a2: &SpherePoint) -> Result<Vec<Vec<f64>>> {
    let c = clamp_cos(a1.inner(a2));
    let s = (1.0 - c * c).max(0.0).sqrt();
    if s < 1e-12 {
        return Err(Error::DegenerateFrame);
    }
    let m = a1.coords().len();
    let mut w = vec![0.0; m];
    for i in 0..m {
        w[i] = (a2.coords()[i] - c * a1.coords()[i]) / s;
    }
    let mut frame = vec![a1.coords().to_vec(), w];
    // Extend with Gram-Schmidt over the tangent frame of a1.
    for cand in tangent_basis(a1) {
        let mut v = cand;
        for f in &frame {
            let p = dot(&v, f);
            for i in 0..m {
                v[i] -= p * f[i];
            }
        }
        let r = norm(&v);
        if r > 1e-8 {
            for x in v.iter_mut() {
                *x /= r;
            }
            frame.push(v);
            if frame.len() == m {
                break;
            }
        }
    }
    debug_assert_eq!(frame.len(), m);
    Ok(frame)
}

/// Stereographic chart projecting through `-pole`, so `pole` maps to the
/// origin of R^n.
#[derive(Debug, Clone)]
pub struct StereoChart {
    pole: SpherePoint,
    tangent: Vec<Vec<f64>>,
}

impl StereoChart {
    pub fn new(pole: SpherePoint) -> Self {
        let tangent = tangent_basis(&pole);
        StereoChart { pole, tangent }
    }

    pub fn pole(&self) -> &SpherePoint {
        &self.pole
    }

    /// Forward projection. Errors at the antipode of the pole.
    pub fn forward(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        let c = clamp_cos(x.inner(&self.pole));
        if 1.0 + c < 1e-13 {
            return Err(Error::ChartDomain);
        }
        // x = cos(theta) a + x_perp, chart point y = x_perp / (1 + cos theta).
        let mut y = Vec::with_capacity(self.tangent.len());
        for t in &self.tangent {
            y.push(dot(x.coords(), t) / (1.0 + c));
        }
        Ok(y)
    }

    /// Inverse projection; defined for every y in R^n.
    pub fn inverse(&self, y: &[f64]) -> SpherePoint {
        let r2 = dot(y, y);
        let m = self.pole.coords().len();
        let mut x = vec![0.0; m];
        let f = 2.0 / (1.0 + r2);
        for i in 0..m {
            x[i] = (1.0 - r2) / (1.0 + r2) * self.pole.coords()[i];
        }
        for (k, t) in self.tangent.iter().enumerate() {
            for i in 0..m {
                x[i] += f * y[k] * t[i];
            }
        }
        SpherePoint::new(x).expect("stereographic inverse lands on the sphere")
    }

    /// Conformal volume density J with
    /// `int_{S^n} f = int_{R^n} (f * J)(inverse(y)) dy`,
    /// namely `J(x) = (1 + <x, pole>)^n`.
    pub fn jacobian(&self, x: &SpherePoint) -> Result<f64> {
        let c = clamp_cos(x.inner(&self.pole));
        if 1.0 + c < 1e-13 {
            return Err(Error::ChartDomain);
        }
        Ok((1.0 + c).powi(self.pole.dim() as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub fn random_point(n: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
        use rand_distr::StandardNormal;
        loop {
            let v: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(p) = SpherePoint::new(v) {
                return p;
            }
        }
    }

    #[test]
    fn distance_trivial_values() {
        let e1 = SpherePoint::pole(5, 0);
        let e2 = SpherePoint::pole(5, 1);
        assert!((geodesic_distance(&e1, &e1.antipode()) - std::f64::consts::PI).abs() < 1e-15);
        assert!((geodesic_distance(&e1, &e2) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(geodesic_distance(&e1, &e1), 0.0);
    }

    #[test]
    fn distance_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let (x, y, z) = (
                random_point(5, &mut rng),
                random_point(5, &mut rng),
                random_point(5, &mut rng),
            );
            let dxy = geodesic_distance(&x, &y);
            let dyx = geodesic_distance(&y, &x);
            assert_eq!(dxy, dyx);
            assert!(dxy <= geodesic_distance(&x, &z) + geodesic_distance(&z, &y) + 1e-12);
        }
    }

    #[test]
    fn green_function_values() {
        let e1 = SpherePoint::pole(6, 0);
        let e2 = SpherePoint::pole(6, 1);
        assert!((green_function(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        assert!((green_function(&e1, &e1.antipode()).unwrap() - 0.5).abs() < 1e-15);
        // d = pi/3 has cos d = 1/2, so G = 2.
        let x = SpherePoint::new(vec![0.5, 3f64.sqrt() / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((green_function(&e1, &x).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(green_function(&e1, &e1), Err(Error::CoincidentPoints));
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5usize, 6] {
            let a = random_point(n, &mut rng);
            let f = orthonormal_frame(&a);
            assert_eq!(f.len(), n + 1);
            for i in 0..f.len() {
                for j in 0..f.len() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&f[i], &f[j]) - expect).abs() < 1e-12);
                }
            }
            assert!((dot(&f[0], a.coords()) - 1.0).abs() < 1e-12);

            let b = random_point(n, &mut rng);
            let bf = biaxial_frame(&a, &b).unwrap();
            for i in 0..bf.len() {
                for j in 0..bf.len() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&bf[i], &bf[j]) - expect).abs() < 1e-11);
                }
            }
            // b lies in the span of the first two frame vectors.
            let c0 = dot(b.coords(), &bf[0]);
            let c1 = dot(b.coords(), &bf[1]);
            assert!((c0 * c0 + c1 * c1 - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn chart_roundtrip_and_pole() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [5usize, 6] {
            let pole = random_point(n, &mut rng);
            let chart = StereoChart::new(pole.clone());
            let y0 = chart.forward(&pole).unwrap();
            assert!(norm(&y0) < 1e-14);
            for _ in 0..100 {
                let x = random_point(n, &mut rng);
                if 1.0 + x.inner(&pole) < 1e-6 {
                    continue;
                }
                let y = chart.forward(&x).unwrap();
                let back = chart.inverse(&y);
                let err: f64 = back
                    .coords()
                    .iter()
                    .zip(x.coords())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10, "roundtrip error {err}");
            }
            assert_eq!(
                chart.forward(&pole.antipode()),
                Err(Error::ChartDomain)
            );
        }
    }

    #[test]
    fn surface_area_closed_forms() {
        let pi = std::f64::consts::PI;
        assert!((surface_area(5) - pi.powi(3)).abs() < 1e-10);
        assert!((surface_area(6) - 16.0 * pi.powi(3) / 15.0).abs() < 1e-10);
        assert!((surface_area(4) - 8.0 * pi * pi / 3.0).abs() < 1e-10);
        assert!((surface_area(2) - 4.0 * pi).abs() < 1e-12);
    }
}
