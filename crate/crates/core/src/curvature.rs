//! Candidate curvature functions K as polynomials in ambient
//! coordinates, with exact intrinsic derivatives on the sphere.
//!
//! Restricting K to polynomials buys three things: exact gradients and
//! Hessians for the Morse analysis, an exact spherical Laplacian through
//! the extension identity `Lap_S f = Lap f - d2f/dr2 - n df/dr`, and
//! exact latitude averages that collapse the bubble integrals to one or
//! two angles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, SymMatrix};
use crate::sphere::{surface_area, SpherePoint};

pub const MAX_VARS: usize = 7;

type Exps = [u8; MAX_VARS];

/// Sparse polynomial in up to [`MAX_VARS`] variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub nvars: usize,
    terms: BTreeMap<Exps, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Poly::zero(nvars);
        if c != 0.0 {
            p.terms.insert([0; MAX_VARS], c);
        }
        p
    }

    pub fn monomial(nvars: usize, exps: &[u8], coeff: f64) -> Self {
        assert!(exps.len() == nvars);
        let mut p = Poly::zero(nvars);
        if coeff != 0.0 {
            let mut key = [0u8; MAX_VARS];
            key[..nvars].copy_from_slice(exps);
            p.terms.insert(key, coeff);
        }
        p
    }

    /// Degree-1 polynomial `<x, v>`.
    pub fn linear_form(v: &[f64]) -> Self {
        let mut p = Poly::zero(v.len());
        for (i, &c) in v.iter().enumerate() {
            if c != 0.0 {
                let mut key = [0u8; MAX_VARS];
                key[i] = 1;
                p.terms.insert(key, c);
            }
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn insert(&mut self, key: Exps, c: f64) {
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += c;
        if entry.abs() < 1e-300 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(other.nvars);
        for (k, &c) in &other.terms {
            out.insert(*k, c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if s != 0.0 {
            for (k, &c) in &self.terms {
                out.terms.insert(*k, c * s);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars.max(other.nvars));
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let mut k = [0u8; MAX_VARS];
                for i in 0..MAX_VARS {
                    k[i] = ka[i] + kb[i];
                }
                out.insert(k, ca * cb);
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (k, &c) in &self.terms {
            if k[var] > 0 {
                let mut kk = *k;
                kk[var] -= 1;
                out.insert(kk, c * k[var] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in k.iter().enumerate().take(self.nvars) {
                if e > 0 {
                    t *= x[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `x_i = sum_k basis[k][i] * y_k`, producing a polynomial
    /// in the `y` variables. `basis` holds one ambient vector per new
    /// variable.
    pub fn compose_linear(&self, basis: &[Vec<f64>]) -> Poly {
        let nv = basis.len();
        assert!(nv <= MAX_VARS);
        // Linear forms for each original variable.
        let forms: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<f64> = basis.iter().map(|b| b[i]).collect();
                Poly::linear_form(&coeffs)
            })
            .collect();
        let mut out = Poly::zero(nv);
        for (k, &c) in &self.terms {
            let mut term = Poly::constant(nv, c);
            for (i, &e) in k.iter().enumerate().take(self.nvars) {
                for _ in 0..e {
                    term = term.mul(&forms[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

fn double_factorial(k: i64) -> f64 {
    let mut acc = 1.0;
    let mut i = k;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

/// Mean of the monomial `prod v_i^(e_i)` over the uniform sphere
/// S^(m-1) in R^m: zero unless all exponents are even, in which case
/// `prod (e_i - 1)!! / (m (m+2) ... (m + 2B - 2))` with `B = sum e_i / 2`.
pub fn sphere_monomial_mean(exps: &[u8], m: usize) -> f64 {
    let mut num = 1.0;
    let mut b = 0i64;
    for &e in exps {
        if e % 2 == 1 {
            return 0.0;
        }
        num *= double_factorial(e as i64 - 1);
        b += e as i64 / 2;
    }
    let mut den = 1.0;
    for k in 0..b {
        den *= (m as i64 + 2 * k) as f64;
    }
    num / den
}

/// Exact integral of a polynomial over S^n (ambient dimension n+1).
pub fn sphere_integral(p: &Poly, n: usize) -> f64 {
    let m = n + 1;
    assert!(p.nvars <= m);
    let mut acc = 0.0;
    for (k, &c) in &p.terms {
        acc += c * sphere_monomial_mean(&k[..m], m);
    }
    acc * surface_area(n)
}

/// Zonal reduction of a polynomial about an axis: the average over the
/// latitude sphere at polar angle theta, expressed exactly as
/// `sum c * cos^a(theta) * sin^b(theta)`.
#[derive(Debug, Clone)]
pub struct ZonalPoly {
    terms: Vec<(u32, u32, f64)>,
}

impl ZonalPoly {
    pub fn eval(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        self.terms
            .iter()
            .map(|&(a, b, w)| w * c.powi(a as i32) * s.powi(b as i32))
            .sum()
    }
}

/// Biaxial reduction: average over the fiber sphere orthogonal to the
/// plane of two centers, expressed as terms
/// `c * cos^a(theta) sin^b(theta) cos^e(psi) sin^f(psi)`.
#[derive(Debug, Clone)]
pub struct BiaxialPoly {
    terms: Vec<(u32, u32, u32, u32, f64)>,
}

impl BiaxialPoly {
    pub fn eval(&self, theta: f64, psi: f64) -> f64 {
        let (ct, st) = (theta.cos(), theta.sin());
        let (cp, sp) = (psi.cos(), psi.sin());
        self.terms
            .iter()
            .map(|&(a, b, e, f, w)| {
                w * ct.powi(a as i32) * st.powi(b as i32) * cp.powi(e as i32) * sp.powi(f as i32)
            })
            .sum()
    }
}

/// Serialized form of a curvature field: ambient monomials and their
/// coefficients. The file schema is stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureFile {
    pub n: usize,
    pub terms: Vec<CurvatureTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureTerm {
    pub exponents: Vec<u8>,
    pub coeff: f64,
}

/// A positive Morse candidate K on S^n, stored as an ambient polynomial.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    n: usize,
    poly: Poly,
    grad: Vec<Poly>,
    hess: Vec<Vec<Poly>>,
    label: Option<String>,
}

impl CurvatureField {
    /// Builds the field and verifies positivity on a deterministic grid
    /// (coordinate poles plus 4096 seeded samples).
    pub fn new(n: usize, poly: Poly, label: Option<String>) -> Result<Self> {
        if n != 5 && n != 6 {
            return Err(Error::UnsupportedDimension(n));
        }
        if poly.nvars != n + 1 {
            return Err(Error::CurvatureFormat(format!(
                "polynomial has {} variables; expected {}",
                poly.nvars,
                n + 1
            )));
        }
        let grad: Vec<Poly> = (0..=n).map(|i| poly.partial(i)).collect();
        let hess: Vec<Vec<Poly>> = (0..=n)
            .map(|i| (0..=n).map(|j| grad[i].partial(j)).collect())
            .collect();
        let field = CurvatureField {
            n,
            poly,
            grad,
            hess,
            label,
        };
        field.check_positive()?;
        Ok(field)
    }

    fn check_positive(&self) -> Result<()> {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::StandardNormal;
        let mut min = f64::INFINITY;
        for i in 0..=self.n {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; self.n + 1];
                c[i] = sign;
                min = min.min(self.poly.eval(&c));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x4b5f);
        let mut v = vec![0.0; self.n + 1];
        for _ in 0..4096 {
            let mut r2 = 0.0;
            for c in v.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *c = g;
                r2 += g * g;
            }
            let r = r2.sqrt();
            for c in v.iter_mut() {
                *c /= r;
            }
            min = min.min(self.poly.eval(&v));
        }
        if min <= 0.0 {
            return Err(Error::NonPositiveCurvature { value: min });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn from_file(file: &CurvatureFile) -> Result<Self> {
        if file.n != 5 && file.n != 6 {
            return Err(Error::UnsupportedDimension(file.n));
        }
        let nvars = file.n + 1;
        let mut poly = Poly::zero(nvars);
        for (ti, t) in file.terms.iter().enumerate() {
            if t.exponents.len() != nvars {
                return Err(Error::CurvatureFormat(format!(
                    "term {} has {} exponents; expected {}",
                    ti,
                    t.exponents.len(),
                    nvars
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::CurvatureFormat(format!(
                    "term {ti} has a non-finite coefficient"
                )));
            }
            poly = poly.add(&Poly::monomial(nvars, &t.exponents, t.coeff));
        }
        Self::new(file.n, poly, file.label.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CurvatureFile =
            serde_json::from_str(text).map_err(|e| Error::CurvatureFormat(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> CurvatureFile {
        CurvatureFile {
            n: self.n,
            terms: self
                .poly
                .terms()
                .map(|(k, &c)| CurvatureTerm {
                    exponents: k[..=self.n].to_vec(),
                    coeff: c,
                })
                .collect(),
            label: self.label.clone(),
        }
    }

    /// `K(x)`.
    pub fn eval(&self, x: &SpherePoint) -> f64 {
        self.poly.eval(x.coords())
    }

    /// Intrinsic gradient as an ambient vector tangent at `x`.
    pub fn grad(&self, x: &SpherePoint) -> Vec<f64> {
        let c = x.coords();
        let mut g: Vec<f64> = self.grad.iter().map(|p| p.eval(c)).collect();
        let radial = dot(&g, c);
        for (gi, xi) in g.iter_mut().zip(c) {
            *gi -= radial * xi;
        }
        g
    }

    /// Intrinsic Hessian in the provided orthonormal tangent basis:
    /// `B_kl = t_k^T H t_l - (grad P . x) delta_kl` (the second term is
    /// the second-fundamental-form correction).
    pub fn hess_in_basis(&self, x: &SpherePoint, basis: &[Vec<f64>]) -> SymMatrix {
        let c = x.coords();
        let m = self.n + 1;
        let h: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| self.hess[i][j].eval(c)).collect())
            .collect();
        let radial: f64 = (0..m).map(|i| self.grad[i].eval(c) * c[i]).sum();
        let nb = basis.len();
        let mut out = SymMatrix::zeros(nb);
        for k in 0..nb {
            for l in 0..nb {
                let mut acc = 0.0;
                for i in 0..m {
                    let mut hi = 0.0;
                    for j in 0..m {
                        hi += h[i][j] * basis[l][j];
                    }
                    acc += basis[k][i] * hi;
                }
                if k == l {
                    acc -= radial;
                }
                out.set(k, l, acc);
            }
        }
        out
    }

    /// Spherical Laplacian via the extension identity:
    /// `Lap_S K = Lap K - x^T H x - n (grad K . x)`.
    pub fn laplacian(&self, x: &SpherePoint) -> f64 {
        let c = x.coords();
        let m = self.n + 1;
        let mut lap = 0.0;
        let mut xhx = 0.0;
        for i in 0..m {
            lap += self.hess[i][i].eval(c);
            for j in 0..m {
                xhx += c[i] * self.hess[i][j].eval(c) * c[j];
            }
        }
        let radial: f64 = (0..m).map(|i| self.grad[i].eval(c) * c[i]).sum();
        lap - xhx - self.n as f64 * radial
    }

    /// Exact latitude average about `axis`.
    pub fn zonal_average(&self, axis: &SpherePoint) -> ZonalPoly {
        zonal_average_poly(&self.poly, axis)
    }

    /// Exact fiber average adapted to the two centers.
    pub fn biaxial_average(&self, a1: &SpherePoint, a2: &SpherePoint) -> Result<BiaxialPoly> {
        biaxial_average_poly(&self.poly, a1, a2)
    }
}

/// Latitude average of an arbitrary polynomial about an axis.
pub fn zonal_average_poly(p: &Poly, axis: &SpherePoint) -> ZonalPoly {
    let frame = crate::sphere::orthonormal_frame(axis);
    let q = p.compose_linear(&frame);
    // y_0 = cos(theta), (y_1.. ) = sin(theta) * u with u on S^(n-1).
    let m = axis.coords().len() - 1;
    let mut terms = Vec::new();
    for (k, &c) in q.terms() {
        let mean = sphere_monomial_mean(&k[1..=m], m);
        if mean == 0.0 {
            continue;
        }
        let b: u32 = k[1..=m].iter().map(|&e| e as u32).sum();
        terms.push((k[0] as u32, b, c * mean));
    }
    ZonalPoly { terms }
}

/// Fiber average of a polynomial for the biaxial parametrization
/// `x = cos(t) a1 + sin(t) cos(p) w + sin(t) sin(p) v`, `v` on S^(n-2).
pub fn biaxial_average_poly(p: &Poly, a1: &SpherePoint, a2: &SpherePoint) -> Result<BiaxialPoly> {
    let frame = crate::sphere::biaxial_frame(a1, a2)?;
    let q = p.compose_linear(&frame);
    let m = a1.coords().len() - 2; // fiber sphere S^(m-1)
    let mut terms = Vec::new();
    for (k, &c) in q.terms() {
        let mean = sphere_monomial_mean(&k[2..2 + m], m);
        if mean == 0.0 {
            continue;
        }
        let f: u32 = k[2..2 + m].iter().map(|&e| e as u32).sum();
        let e1 = k[1] as u32;
        terms.push((k[0] as u32, e1 + f, e1, f, c * mean));
    }
    Ok(BiaxialPoly { terms })
}

/// `sum_i x_i dP/dx_i`, the radial derivative of the extension.
pub fn radial_derivative_poly(p: &Poly) -> Poly {
    let mut out = Poly::zero(p.nvars);
    for i in 0..p.nvars {
        let mut e = vec![0u8; p.nvars];
        e[i] = 1;
        out = out.add(&p.partial(i).mul(&Poly::monomial(p.nvars, &e, 1.0)));
    }
    out
}

/// Spherical Laplacian of a polynomial as a polynomial (valid on |x| = 1):
/// `Lap P - x^T H x - n x . grad P`.
pub fn sphere_laplacian_poly(p: &Poly, n: usize) -> Poly {
    let nv = p.nvars;
    let mut lap = Poly::zero(nv);
    let mut xhx = Poly::zero(nv);
    for i in 0..nv {
        let pi = p.partial(i);
        lap = lap.add(&pi.partial(i));
        for j in 0..nv {
            let mut e = vec![0u8; nv];
            e[i] += 1;
            e[j] += 1;
            xhx = xhx.add(&pi.partial(j).mul(&Poly::monomial(nv, &e, 1.0)));
        }
    }
    let radial = radial_derivative_poly(p);
    lap.add(&xhx.scale(-1.0)).add(&radial.scale(-(n as f64)))
}

/// `|grad_S P|^2 = |grad P|^2 - (x . grad P)^2` as a polynomial on |x|=1.
pub fn sphere_grad_sq_poly(p: &Poly) -> Poly {
    let nv = p.nvars;
    let mut g2 = Poly::zero(nv);
    for i in 0..nv {
        let pi = p.partial(i);
        g2 = g2.add(&pi.mul(&pi));
    }
    let radial = radial_derivative_poly(p);
    g2.add(&radial.mul(&radial).scale(-1.0))
}

/// Standard test families used across the suite.
pub mod families {
    use super::*;

    /// `K = 1 + eps * x_0`.
    pub fn linear(n: usize, eps: f64) -> Result<CurvatureField> {
        let nv = n + 1;
        let mut e = vec![0u8; nv];
        e[0] = 1;
        let poly = Poly::constant(nv, 1.0).add(&Poly::monomial(nv, &e, eps));
        CurvatureField::new(n, poly, Some(format!("linear eps={eps}")))
    }

    /// `K = 1 + sum_i a_i x_i^2` with strictly positive coefficients.
    pub fn quadratic(n: usize, coeffs: &[f64]) -> Result<CurvatureField> {
        let nv = n + 1;
        assert_eq!(coeffs.len(), nv);
        let mut poly = Poly::constant(nv, 1.0);
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = vec![0u8; nv];
            e[i] = 2;
            poly = poly.add(&Poly::monomial(nv, &e, a));
        }
        CurvatureField::new(n, poly, Some("quadratic family".into()))
    }

    /// `K = k0 + c x_0^4 + sum_(j>=1) b_j x_j^2`; the quartic term makes
    /// the antipodal pair (+-e_0) carry a large negative Laplacian, which
    /// is how the sign of the pair's least eigenvalue is engineered.
    pub fn quartic_pair(n: usize, k0: f64, c: f64, b: &[f64]) -> Result<CurvatureField> {
        let nv = n + 1;
        assert_eq!(b.len(), n);
        let mut e0 = vec![0u8; nv];
        e0[0] = 4;
        let mut poly = Poly::constant(nv, k0).add(&Poly::monomial(nv, &e0, c));
        for (j, &bj) in b.iter().enumerate() {
            let mut e = vec![0u8; nv];
            e[j + 1] = 2;
            poly = poly.add(&Poly::monomial(nv, &e, bj));
        }
        CurvatureField::new(n, poly, Some("quartic antipodal pair".into()))
    }
}
