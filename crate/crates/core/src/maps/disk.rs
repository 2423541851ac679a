//! Disk points near the boundary, Möbius maps and finite Blaschke products.
//!
//! Thin zero sequences such as `1 − e^{−2^k}` leave the range of `f64` after a
//! few terms (`1 − e^{−64}` rounds to `1.0`), so disk points are stored as a
//! gap `1 − |z|` plus an angle, and Möbius maps are evaluated from gaps.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::{c, C64};
use crate::rotation::RotationNumber;

/// `z = (1 − gap)·e^{i·angle}` with `0 < gap ≤ 1`; the origin has gap 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskPoint {
    gap: f64,
    angle: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { gap: 1.0, angle: 0.0 };

    pub fn new(z: C64) -> Result<Self> {
        let r = z.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(LabError::NotInterior {
                domain: "disk".into(),
                margin: 1.0 - r,
            });
        }
        if r == 0.0 {
            return Ok(DiskPoint::ORIGIN);
        }
        Ok(DiskPoint {
            gap: 1.0 - r,
            angle: z.arg(),
        })
    }

    pub fn from_gap(gap: f64, angle: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) || !angle.is_finite() {
            return Err(LabError::validation(format!(
                "disk point gap must lie in (0, 1], got {gap} (angle {angle})"
            )));
        }
        if gap == 1.0 {
            return Ok(DiskPoint::ORIGIN);
        }
        Ok(DiskPoint {
            gap,
            angle: angle.rem_euclid(std::f64::consts::TAU),
        })
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn modulus(&self) -> f64 {
        1.0 - self.gap
    }

    /// `1 − |z|²`, accurate near the boundary.
    pub fn one_minus_mod_sq(&self) -> f64 {
        self.gap * (2.0 - self.gap)
    }

    pub fn is_origin(&self) -> bool {
        self.gap == 1.0
    }

    pub fn value(&self) -> C64 {
        C64::from_polar(self.modulus(), self.angle)
    }

    /// `e^{iθ} z`.
    pub fn rotate(&self, theta: f64) -> DiskPoint {
        if self.is_origin() {
            return *self;
        }
        DiskPoint {
            gap: self.gap,
            angle: (self.angle + theta).rem_euclid(std::f64::consts::TAU),
        }
    }

    /// Unimodular factor making `u·M_z` the normalized Blaschke factor:
    /// `z̄/|z|`, or `−1` at the origin (so the factor is the identity `w ↦ w`).
    pub fn blaschke_unit(&self) -> C64 {
        if self.is_origin() {
            c(-1.0, 0.0)
        } else {
            C64::from_polar(1.0, -self.angle)
        }
    }
}

/// `(1 − e^{iΔ}, e^{iΔ})` for `Δ = θ_z − θ_a`, with the first entry free of cancellation.
fn phase_parts(a: &DiskPoint, z: &DiskPoint) -> (C64, C64) {
    let delta = z.angle - a.angle;
    let half = (delta / 2.0).sin();
    let e = C64::from_polar(1.0, delta);
    (c(2.0 * half * half, -delta.sin()), e)
}

/// `1 − ā z`.
pub fn one_minus_conj_mul(a: &DiskPoint, z: &DiskPoint) -> C64 {
    let (one_minus_e, e) = phase_parts(a, z);
    one_minus_e + e * (a.gap + z.gap - a.gap * z.gap)
}

/// The involution `M_a(z) = (a − z)/(1 − āz)` at disk points, returned gap-aware.
pub fn mobius(a: &DiskPoint, z: &DiskPoint) -> DiskPoint {
    let (one_minus_e, e) = phase_parts(a, z);
    let den = one_minus_e + e * (a.gap + z.gap - a.gap * z.gap);
    let num = C64::from_polar(1.0, a.angle) * (one_minus_e + e * z.gap - a.gap);
    let (num_abs, den_abs) = (num.norm(), den.norm());
    if num_abs == 0.0 {
        return DiskPoint::ORIGIN;
    }
    let modulus = num_abs / den_abs;
    let one_minus_sq = a.one_minus_mod_sq() * z.one_minus_mod_sq() / (den_abs * den_abs);
    let gap = (one_minus_sq / (1.0 + modulus.min(1.0))).clamp(f64::MIN_POSITIVE, 1.0);
    DiskPoint {
        gap,
        angle: (num / den).arg().rem_euclid(std::f64::consts::TAU),
    }
}

/// Finite Blaschke product `λ · Π u_k M_{z_k}(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blaschke {
    zeros: Vec<DiskPoint>,
    front: RotationNumber,
}

impl Blaschke {
    pub fn new(zeros: Vec<DiskPoint>, front: RotationNumber) -> Self {
        Blaschke { zeros, front }
    }

    /// Zeros `1 − e^{−2^k}` for `k = 1..=count`, stored by their exact gaps.
    pub fn thin_zeros(count: u32) -> Vec<DiskPoint> {
        (1..=count)
            .map(|k| DiskPoint::from_gap((-(2f64.powi(k as i32))).exp(), 0.0).expect("gap in (0,1)"))
            .collect()
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    pub fn front(&self) -> &RotationNumber {
        &self.front
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Value and derivative at a disk point.
    pub fn eval_with_derivative(&self, w: &DiskPoint) -> (C64, C64) {
        let n = self.zeros.len();
        let mut vals = Vec::with_capacity(n);
        let mut ders = Vec::with_capacity(n);
        for zk in &self.zeros {
            let u = zk.blaschke_unit();
            vals.push(u * mobius(zk, w).value());
            let den = one_minus_conj_mul(zk, w);
            ders.push(-u * zk.one_minus_mod_sq() / (den * den));
        }
        let one = c(1.0, 0.0);
        let mut prefix = vec![one; n + 1];
        for k in 0..n {
            prefix[k + 1] = prefix[k] * vals[k];
        }
        let mut suffix = vec![one; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] * vals[k];
        }
        let lam = self.front.to_complex();
        let deriv: C64 = (0..n).map(|k| prefix[k] * ders[k] * suffix[k + 1]).sum();
        (lam * prefix[n], lam * deriv)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.eval_with_derivative(&DiskPoint::new(z)?).0)
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        Ok(self.eval_with_derivative(&DiskPoint::new(z)?).1)
    }

    /// `(1 − |z_k|²)|B′(z_k)|` for each zero.
    pub fn derivative_profile(&self) -> Vec<f64> {
        self.zeros
            .iter()
            .map(|zk| zk.one_minus_mod_sq() * self.eval_with_derivative(zk).1.norm())
            .collect()
    }

    /// The Blaschke product `B ∘ S` for `S(z) = e^{iθ} M_a(z)`.
    pub fn compose_mobius(&self, a: &DiskPoint, rotation: &RotationNumber) -> Blaschke {
        let theta = rotation.angle();
        let e_theta = rotation.to_complex();
        let mut lam = self.front.to_complex();
        let mut zeros = Vec::with_capacity(self.zeros.len());
        for zk in &self.zeros {
            let shifted = zk.rotate(-theta);
            let cj = mobius(a, &shifted);
            let d = one_minus_conj_mul(a, &shifted);
            let psi = -d / d.conj();
            lam *= zk.blaschke_unit() * e_theta * psi / cj.blaschke_unit();
            zeros.push(cj);
        }
        Blaschke {
            zeros,
            front: RotationNumber::from_phase(lam),
        }
    }
}

/// Deleted pseudo-hyperbolic products `d_k = Π_{j≠k} |(z_k − z_j)/(1 − z̄_j z_k)|`.
pub fn thinness_products(zeros: &[DiskPoint]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(zeros.len());
    for (k, zk) in zeros.iter().enumerate() {
        let mut d = 1.0;
        for (j, zj) in zeros.iter().enumerate() {
            if j == k {
                continue;
            }
            let m = mobius(zj, zk);
            if m.is_origin() {
                return Err(LabError::validation(format!(
                    "duplicate zeros at positions {} and {}",
                    j.min(k) + 1,
                    j.max(k) + 1
                )));
            }
            d *= m.modulus();
        }
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(c(re, im)).unwrap()
    }

    #[test]
    fn mobius_matches_direct_formula() {
        let a = dp(0.3, -0.4);
        for z in [dp(0.1, 0.2), dp(-0.7, 0.05), DiskPoint::ORIGIN, dp(0.6, 0.6)] {
            let direct = (a.value() - z.value()) / (c(1.0, 0.0) - a.value().conj() * z.value());
            let m = mobius(&a, &z);
            assert!((m.value() - direct).norm() < 1e-15);
        }
        assert!(mobius(&a, &a).is_origin());
        assert!((mobius(&a, &DiskPoint::ORIGIN).value() - a.value()).norm() < 1e-15);
    }

    #[test]
    fn mobius_keeps_gaps_near_the_boundary() {
        let zs = Blaschke::thin_zeros(6);
        // M_{z_6}(z_5) is real and equals -(g5 - g6)/(g5 + g6 - g5 g6), modulus just below 1.
        let m = mobius(&zs[5], &zs[4]);
        let (g5, g6) = (zs[4].gap(), zs[5].gap());
        let expected_gap = (2.0 * g6 - g5 * g6) / (g5 + g6 - g5 * g6);
        assert!((m.gap() - expected_gap).abs() < 1e-12 * expected_gap);
        assert!(m.gap() > 0.0 && m.gap() < 1e-13);
    }

    #[test]
    fn thinness_examples() {
        assert_eq!(thinness_products(&[DiskPoint::ORIGIN]).unwrap(), vec![1.0]);
        let d = thinness_products(&[DiskPoint::ORIGIN, dp(0.5, 0.0)]).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        assert!(thinness_products(&[dp(0.5, 0.0), dp(0.5, 0.0)]).is_err());
    }

    #[test]
    fn blaschke_derivative_at_a_zero() {
        let b = Blaschke::new(vec![DiskPoint::ORIGIN, dp(0.5, 0.0)], RotationNumber::ONE);
        assert!((b.derivative(c(0.0, 0.0)).unwrap().norm() - 0.5).abs() < 1e-15);
        let b = Blaschke::new(vec![DiskPoint::ORIGIN], RotationNumber::ONE);
        assert!((b.eval(c(0.3, 0.2)).unwrap() - c(0.3, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn derivative_profile_is_deleted_product() {
        let mut zeros = vec![DiskPoint::ORIGIN];
        zeros.extend(Blaschke::thin_zeros(6));
        let b = Blaschke::new(zeros.clone(), RotationNumber::rational(1, 5).unwrap());
        let prof = b.derivative_profile();
        let thin = thinness_products(&zeros).unwrap();
        for (p, t) in prof.iter().zip(&thin) {
            assert!((p - t).abs() < 1e-10, "{p} vs {t}");
        }
    }

    #[test]
    fn composition_with_mobius_is_exact() {
        let b = Blaschke::new(vec![dp(0.2, 0.5), dp(-0.6, 0.1), DiskPoint::ORIGIN], RotationNumber::rational(1, 7).unwrap());
        let a = dp(0.4, -0.3);
        let rot = RotationNumber::rational(2, 9).unwrap();
        let composed = b.compose_mobius(&a, &rot);
        for z in [c(0.1, 0.1), c(-0.5, 0.3), c(0.0, -0.8)] {
            let s = rot.to_complex() * mobius(&a, &DiskPoint::new(z).unwrap()).value();
            let direct = b.eval(s).unwrap();
            assert!((composed.eval(z).unwrap() - direct).norm() < 1e-13);
        }
    }
}
