//! Exact spectra of composition operators with polydisk symbols
//! `φ(z) = (λ_1 z_{τ(1)}, …, λ_n z_{τ(n)})`.
//!
//! Everything here is integer arithmetic on fractions of a turn. The only
//! floating-point code evaluates eigenfunctions for verification.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::maps::{DiskPoint, HoloMap};
use crate::rotation::RotationNumber;

/// Smallest positive `k` with `λ^k = 1`; `None` for irrational rotations.
pub fn order(r: &RotationNumber) -> Option<u64> {
    r.order()
}

/// `num/den` of a turn, deliberately left unreduced so group elements share a denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn to_rotation(self) -> RotationNumber {
        RotationNumber::rational(self.num as i64, self.den as i64).expect("positive denominator")
    }

    pub fn to_complex(self) -> C64 {
        self.to_rotation().to_complex()
    }

    /// Same value over the denominator `den`, if representable.
    pub fn over(self, den: u64) -> Option<Fraction> {
        (den % self.den == 0).then(|| Fraction {
            num: self.num * (den / self.den),
            den,
        })
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reduced `p/q` turns; irrational rotations have no fraction.
fn turns_of(r: &RotationNumber) -> Option<(u64, u64)> {
    match r {
        RotationNumber::Rational { p, q } => Some((*p, *q)),
        RotationNumber::Irrational { .. } => None,
    }
}

fn add_turns(a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    let den = a.1.lcm(&b.1);
    let num = (a.0 * (den / a.1) + b.0 * (den / b.1)) % den;
    reduce(num, den)
}

fn reduce(num: u64, den: u64) -> (u64, u64) {
    let g = num.gcd(&den).max(1);
    (num / g, den / g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolClass {
    Automorphism,
    NonAutoOnto,
    Unknown,
}

/// Disjoint cycles of a 0-based permutation, each starting at its smallest element.
pub fn cycle_decomposition(tau: &[usize]) -> Result<Vec<Vec<usize>>> {
    check_permutation(tau)?;
    let mut seen = vec![false; tau.len()];
    let mut cycles = Vec::new();
    for start in 0..tau.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut i = tau[start];
        while i != start {
            seen[i] = true;
            cycle.push(i);
            i = tau[i];
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Order of a permutation: the lcm of its cycle lengths.
pub fn permutation_order(tau: &[usize]) -> Result<u64> {
    Ok(cycle_decomposition(tau)?
        .iter()
        .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64))))
}

fn check_permutation(tau: &[usize]) -> Result<()> {
    let mut seen = vec![false; tau.len()];
    for &t in tau {
        if t >= tau.len() || std::mem::replace(&mut seen[t], true) {
            return Err(LabError::validation(format!(
                "{tau:?} is not a permutation of 0..{}",
                tau.len()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolydiskSymbol {
    lambdas: Vec<RotationNumber>,
    tau: Vec<usize>,
    class: SymbolClass,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolDoc {
    lambdas: Vec<RotationNumber>,
    tau: Option<Vec<usize>>,
    class: SymbolClass,
}

impl PolydiskSymbol {
    /// `tau` is 0-based: coordinate `i` of the image reads `z_{tau[i]}`.
    pub fn new(lambdas: Vec<RotationNumber>, tau: Vec<usize>, class: SymbolClass) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(LabError::validation("a polydisk symbol needs at least one coordinate"));
        }
        if tau.len() != lambdas.len() {
            return Err(LabError::DimensionMismatch {
                expected: lambdas.len(),
                got: tau.len(),
            });
        }
        check_permutation(&tau)?;
        Ok(PolydiskSymbol { lambdas, tau, class })
    }

    pub fn rotation(lambdas: Vec<RotationNumber>) -> Result<Self> {
        let tau = (0..lambdas.len()).collect();
        PolydiskSymbol::new(lambdas, tau, SymbolClass::Automorphism)
    }

    /// Parses `{"lambdas": [...], "tau": [1-based], "class": "..."}`; `tau` defaults to the identity.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDoc =
            serde_json::from_str(text).map_err(|e| LabError::validation(format!("symbol document: {e}")))?;
        let n = doc.lambdas.len();
        let tau = match doc.tau {
            None => (0..n).collect(),
            Some(t) => t
                .into_iter()
                .map(|i| {
                    i.checked_sub(1)
                        .ok_or_else(|| LabError::validation("tau entries are 1-based"))
                })
                .collect::<Result<_>>()?,
        };
        PolydiskSymbol::new(doc.lambdas, tau, doc.class)
    }

    pub fn lambdas(&self) -> &[RotationNumber] {
        &self.lambdas
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn class(&self) -> SymbolClass {
        self.class
    }

    pub fn dimension(&self) -> usize {
        self.lambdas.len()
    }

    /// The symbol as a polydisk automorphism.
    pub fn to_map(&self) -> Result<HoloMap> {
        let half = RotationNumber::rational(1, 2)?;
        let factors = self
            .lambdas
            .iter()
            .map(|l| (DiskPoint::ORIGIN, l.compose(&half)))
            .collect();
        HoloMap::polydisk_automorphism(factors, self.tau.clone())
    }

    /// Exact `φ(z)` without going through the Möbius machinery.
    pub fn apply(&self, z: &[C64]) -> Result<Vec<C64>> {
        LabError::check_len(self.dimension(), z.len())?;
        Ok(self
            .lambdas
            .iter()
            .zip(&self.tau)
            .map(|(l, &t)| l.to_complex() * z[t])
            .collect())
    }

    /// Turn sum of the multipliers along each cycle, `None` when a cycle carries an irrational one.
    fn cycle_data(&self) -> Result<Vec<(Vec<usize>, Option<(u64, u64)>)>> {
        Ok(cycle_decomposition(&self.tau)?
            .into_iter()
            .map(|cyc| {
                let total = cyc.iter().try_fold((0, 1), |acc, &i| {
                    turns_of(&self.lambdas[i]).map(|t| add_turns(acc, t))
                });
                (cyc, total)
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    ClosedUnitDisk,
    UnitCircle,
    FiniteCyclicGroup { order: u64, elements: Vec<Fraction> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    #[serde(flatten)]
    pub kind: SpectrumKind,
    /// Elements of the group generated by the `λ_j`, over the denominator of the result.
    pub guaranteed_eigenvalues: Vec<Fraction>,
    /// Order of the eigenvalue group found from monomial orbits, when finite.
    pub eigenvalue_group_order: Option<u64>,
    pub warnings: Vec<String>,
}

/// Order of the group of eigenvalues carried by polynomial eigenfunctions.
///
/// A cycle of length `α` with multiplier product `Λ` contributes the group
/// generated by `1/α` and `Λ/α`; the whole group is their sum.
pub fn eigenvalue_group_order(sym: &PolydiskSymbol) -> Result<Option<u64>> {
    let mut order = 1u64;
    for (cyc, total) in sym.cycle_data()? {
        let Some((p, q)) = total else { return Ok(None) };
        let alpha = cyc.len() as u64;
        let (_, d) = reduce(p, q * alpha);
        order = order.lcm(&alpha).lcm(&d);
    }
    Ok(Some(order))
}

pub fn spectrum(sym: &PolydiskSymbol) -> Result<SpectrumResult> {
    let mut warnings = Vec::new();
    let kind = match sym.class {
        SymbolClass::Unknown => {
            return Err(LabError::validation(
                "the spectrum needs a classified symbol (automorphism or non_auto_onto)",
            ))
        }
        SymbolClass::NonAutoOnto => SpectrumKind::ClosedUnitDisk,
        SymbolClass::Automorphism => {
            let orders: Option<Vec<u64>> = sym.lambdas.iter().map(order).collect();
            match orders {
                None => SpectrumKind::UnitCircle,
                Some(orders) => {
                    let g = orders.iter().fold(1u64, |a, q| a.lcm(q));
                    let l = g.lcm(&permutation_order(&sym.tau)?);
                    let elements: Vec<Fraction> = (0..l).map(|k| Fraction { num: k, den: l }).collect();
                    let exact = eigenvalue_group_order(sym)?.expect("all rotations rational");
                    if exact != l {
                        warnings.push(format!(
                            "polynomial eigenfunctions produce a cyclic group of order {exact}, \
                             while lcm(ord λ_j, ord τ) = {l}"
                        ));
                    }
                    let guaranteed = (0..g).map(|k| Fraction { num: k * (l / g), den: l }).collect();
                    return Ok(SpectrumResult {
                        kind: SpectrumKind::FiniteCyclicGroup { order: l, elements },
                        guaranteed_eigenvalues: guaranteed,
                        eigenvalue_group_order: Some(exact),
                        warnings,
                    });
                }
            }
        }
    };
    Ok(SpectrumResult {
        kind,
        guaranteed_eigenvalues: Vec::new(),
        eigenvalue_group_order: None,
        warnings,
    })
}

/// Determinant of the `α×α` matrix with `−μ` on the diagonal, ones on the
/// superdiagonal and a one in the bottom-left corner; equals `(−1)^α(μ^α − 1)`.
pub fn resolvent_determinant(alpha: usize, mu: C64) -> Result<C64> {
    if alpha == 0 {
        return Err(LabError::validation("alpha must be at least 1"));
    }
    let mut a = CMatrix::zeros(alpha, alpha);
    for i in 0..alpha {
        a[(i, i)] = -mu;
        if i + 1 < alpha {
            a[(i, i + 1)] = c(1.0, 0.0);
        }
    }
    a[(alpha - 1, 0)] += c(1.0, 0.0);
    a.determinant()
}

/// Coefficients `x` of linear `f(z) = Σ x_j z_j` with `f∘φ = e^{2πi·eig} f`.
///
/// The system decouples over cycles: around a cycle `x_{τ(i)} = λ_i x_i / μ`,
/// which closes up exactly when `μ^α` equals the product of the cycle's
/// multipliers. One basis vector is returned per such cycle; cycles with an
/// irrational multiplier never close up for a rational `eig`.
pub fn permutation_eigenfunctions(tau: &[usize], lambda: &[RotationNumber], eig: Fraction) -> Result<Vec<Vec<C64>>> {
    let sym = PolydiskSymbol::new(lambda.to_vec(), tau.to_vec(), SymbolClass::Automorphism)?;
    if eig.den == 0 {
        return Err(LabError::validation("eigenvalue denominator must be positive"));
    }
    let mu = reduce(eig.num % eig.den, eig.den);
    let mut out = Vec::new();
    for (cyc, total) in sym.cycle_data()? {
        let Some(total) = total else { continue };
        let alpha = cyc.len() as u64;
        if reduce((mu.0 * alpha) % mu.1, mu.1) != total {
            continue;
        }
        let mut x = vec![c(0.0, 0.0); tau.len()];
        // x_{τ^k(i0)} = (λ_{i0}⋯λ_{τ^{k-1}(i0)}) μ^{−k} x_{i0}, tracked in turns.
        let mut acc = (0u64, 1u64);
        let mut i = cyc[0];
        for k in 0..cyc.len() {
            let back = reduce((mu.1 - (mu.0 * k as u64) % mu.1) % mu.1, mu.1);
            x[i] = Fraction::from(add_turns(acc, back)).to_complex();
            acc = add_turns(acc, turns_of(&lambda[i]).expect("rational cycle"));
            i = tau[i];
        }
        out.push(x);
    }
    Ok(out)
}

impl From<(u64, u64)> for Fraction {
    fn from((num, den): (u64, u64)) -> Self {
        Fraction { num, den }
    }
}

/// Product over cycles of `Σ_k coef_k · z_{var_k}^{deg}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPolynomial {
    pub eigenvalue: Fraction,
    pub factors: Vec<Vec<(C64, usize, u32)>>,
}

impl EigenPolynomial {
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.factors
            .iter()
            .map(|terms| terms.iter().map(|(a, i, d)| a * z[*i].powu(*d)).sum::<C64>())
            .product()
    }

    /// `max |f(φ(z)) − μ f(z)|` over `points`.
    pub fn residual(&self, sym: &PolydiskSymbol, points: &[Vec<C64>]) -> Result<f64> {
        let mu = self.eigenvalue.to_complex();
        let mut worst = 0.0f64;
        for z in points {
            let w = sym.apply(z)?;
            worst = worst.max((self.eval(&w) - mu * self.eval(z)).norm());
        }
        Ok(worst)
    }
}

/// Per-cycle eigenvalues reachable with a single-variable orbit:
/// `μ_c = (a + d·Λ)/α` for `d ≥ 1`, or `0` from the constant function.
fn cycle_eigenvalues(alpha: u64, total: (u64, u64), den: u64) -> HashMap<u64, u32> {
    let mut out = HashMap::from([(0u64, 0u32)]);
    // d ranges over one period of Λ^d, shifted to start at 1.
    for d in 1..=total.1 {
        let lam_d = reduce((total.0 * d) % total.1, total.1);
        for a in 0..alpha {
            let (p, q) = reduce((a * lam_d.1 + lam_d.0) % (lam_d.1 * alpha), lam_d.1 * alpha);
            if den % q == 0 {
                out.entry(p * (den / q)).or_insert(d as u32);
            }
        }
    }
    out
}

/// A polynomial eigenfunction for the eigenvalue `eig`, if it lies in the eigenvalue group.
pub fn eigenfunction(sym: &PolydiskSymbol, eig: Fraction) -> Result<Option<EigenPolynomial>> {
    let Some(n) = eigenvalue_group_order(sym)? else {
        return Ok(None);
    };
    let Some(target) = eig.over(n).or_else(|| {
        let (p, q) = reduce(eig.num % eig.den, eig.den);
        Fraction { num: p, den: q }.over(n)
    }) else {
        return Ok(None);
    };
    let cycles = sym.cycle_data()?;
    // Reachable sums over the cycles processed so far, with one choice of (μ_c, d) per cycle.
    let mut reach: HashMap<u64, Vec<(u64, u32)>> = HashMap::from([(0, Vec::new())]);
    for (cyc, total) in &cycles {
        let options = cycle_eigenvalues(cyc.len() as u64, total.expect("finite group"), n);
        let mut next = HashMap::new();
        let mut keys: Vec<_> = reach.keys().copied().collect();
        keys.sort_unstable();
        for s in keys {
            let mut opts: Vec<_> = options.iter().collect();
            opts.sort_unstable();
            for (&m, &d) in opts {
                let key = (s + m) % n;
                next.entry(key).or_insert_with(|| {
                    let mut v = reach[&s].clone();
                    v.push((m, d));
                    v
                });
            }
        }
        reach = next;
    }
    let Some(choice) = reach.get(&(target.num % n)) else {
        return Ok(None);
    };
    let mut factors = Vec::new();
    for ((cyc, _), &(m, d)) in cycles.iter().zip(choice) {
        if d == 0 {
            continue;
        }
        // Σ_k μ_c^{−k} C_φ^k (z_{i0}^d), with C_φ^k z_{i0}^d = (λ_{i0}⋯)^d z_{τ^k(i0)}^d.
        let mut terms = Vec::new();
        let mut acc = (0u64, 1u64);
        let mut i = cyc[0];
        for k in 0..cyc.len() as u64 {
            let back = reduce((n - (m * k) % n) % n, n);
            let coef = Fraction::from(add_turns(acc, back)).to_complex();
            terms.push((coef, i, d));
            let (p, q) = turns_of(&sym.lambdas[i]).expect("rational");
            acc = add_turns(acc, reduce((p * d as u64) % q, q));
            i = sym.tau[i];
        }
        factors.push(terms);
    }
    Ok(Some(EigenPolynomial {
        eigenvalue: target,
        factors,
    }))
}
