//! Picard lattices of the Hirzebruch surface `F_e` and its iterated blow-ups.
//!
//! Classes are integer vectors over the basis `[Δ₀, Γ, E₁, …, E_r]`, where `Δ₀`
//! is the negative section (`Δ₀² = -e`), `Γ` a fibre, and `E_i` the exceptional
//! curves. Pulled-back classes keep their names after a blow-up, so embedding a
//! class only appends zero coordinates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Identifies the lattice a class lives in.
///
/// The intersection form depends only on `e` and the number of blow-ups, so
/// that is all the id records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceId {
    e: i64,
    rank: usize,
    flipped: bool,
}

impl SurfaceId {
    pub fn basis_size(&self) -> usize {
        self.rank
    }

    pub fn blowup_count(&self) -> usize {
        self.rank - 2
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.e)?;
        if self.rank > 2 {
            write!(f, " blown up {}x", self.rank - 2)?;
        }
        if self.flipped {
            write!(f, " (flipped form)")?;
        }
        Ok(())
    }
}

/// What created an exceptional curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointTag {
    Label(String),
    /// Multiplicities `(k₁, …, k₇)` of the branch components at the point.
    Multiplicities(Vec<i64>),
}

impl fmt::Display for PointTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointTag::Label(s) => f.write_str(s),
            PointTag::Multiplicities(k) => write!(f, "{}", format_tuple(k)),
        }
    }
}

pub(crate) fn format_tuple(values: &[i64]) -> String {
    let parts: Vec<String> = values.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    coords: Vec<i64>,
    surface: SurfaceId,
}

impl DivisorClass {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn surface_id(&self) -> SurfaceId {
        self.surface
    }

    /// Coefficient of `Δ₀`.
    pub fn section_coeff(&self) -> i64 {
        self.coords[0]
    }

    /// Coefficient of `Γ`.
    pub fn fiber_coeff(&self) -> i64 {
        self.coords[1]
    }

    /// Coefficients of `E₁, …, E_r`.
    pub fn exceptional_coeffs(&self) -> &[i64] {
        &self.coords[2..]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass {
            coords: self.coords.iter().map(|&c| c * k).collect(),
            surface: self.surface,
        }
    }

    /// Exact halving; `None` if any coordinate is odd.
    pub fn halve(&self) -> Option<DivisorClass> {
        if self.coords.iter().any(|c| c % 2 != 0) {
            return None;
        }
        Some(DivisorClass {
            coords: self.coords.iter().map(|c| c / 2).collect(),
            surface: self.surface,
        })
    }

    fn zip_with(&self, other: &DivisorClass, op: impl Fn(i64, i64) -> i64) -> DivisorClass {
        assert_eq!(
            self.surface, other.surface,
            "arithmetic on classes from different surfaces"
        );
        DivisorClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            surface: self.surface,
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.coords.len() - 2;
        let mut first = true;
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = match i {
                0 => "Δ₀".to_string(),
                1 => "Γ".to_string(),
                _ if r == 1 => "E".to_string(),
                _ => format!("E{}", i - 1),
            };
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            f.write_str(&name)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        &self + &rhs
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        &self - &rhs
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scale(self)
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        rhs.scale(self)
    }
}

/// Curves against which nefness is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TestCurve {
    NegativeSection,
    Fiber,
    /// `E_i` (zero-based).
    Exceptional(usize),
    /// Strict transform `Γ - E_i` of the fibre through the i-th point.
    FiberThrough(usize),
}

impl TestCurve {
    pub fn class(&self, surface: &SurfaceModel) -> DivisorClass {
        match *self {
            TestCurve::NegativeSection => surface.section(),
            TestCurve::Fiber => surface.fiber(),
            TestCurve::Exceptional(i) => surface.exceptional(i),
            TestCurve::FiberThrough(i) => &surface.fiber() - &surface.exceptional(i),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NefFailure {
    NegativeOn { curve: TestCurve, value: i64 },
    NotBig { self_intersection: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NefCheck {
    pub self_intersection: i64,
    pub failure: Option<NefFailure>,
    /// Display form of the failing curve, if any.
    pub witness: Option<String>,
}

impl NefCheck {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// `F_e` together with an ordered list of blown-up points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    e: i64,
    blowups: Vec<PointTag>,
    flipped: bool,
}

impl SurfaceModel {
    pub fn hirzebruch(e: u32) -> SurfaceModel {
        SurfaceModel {
            e: i64::from(e),
            blowups: Vec::new(),
            flipped: false,
        }
    }

    pub fn f1() -> SurfaceModel {
        SurfaceModel::hirzebruch(1)
    }

    /// Negates the whole intersection form. Only the verification harness's
    /// negative control uses this.
    #[doc(hidden)]
    pub fn with_flipped_form(mut self) -> SurfaceModel {
        self.flipped = !self.flipped;
        self
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn blowups(&self) -> &[PointTag] {
        &self.blowups
    }

    pub fn basis_size(&self) -> usize {
        2 + self.blowups.len()
    }

    pub fn id(&self) -> SurfaceId {
        SurfaceId {
            e: self.e,
            rank: self.basis_size(),
            flipped: self.flipped,
        }
    }

    pub fn class(&self, coords: Vec<i64>) -> Result<DivisorClass> {
        if coords.len() != self.basis_size() {
            return Err(Error::Length {
                expected: self.basis_size(),
                found: coords.len(),
            });
        }
        Ok(DivisorClass {
            coords,
            surface: self.id(),
        })
    }

    /// `a·Δ₀ + b·Γ + Σ exc[i]·E_i`.
    ///
    /// Panics if `exc` has the wrong length.
    pub fn combo(&self, a: i64, b: i64, exc: &[i64]) -> DivisorClass {
        assert_eq!(
            exc.len(),
            self.blowups.len(),
            "wrong number of exceptional coefficients"
        );
        let mut coords = Vec::with_capacity(self.basis_size());
        coords.push(a);
        coords.push(b);
        coords.extend_from_slice(exc);
        DivisorClass {
            coords,
            surface: self.id(),
        }
    }

    pub fn zero(&self) -> DivisorClass {
        self.unit(None)
    }

    pub fn section(&self) -> DivisorClass {
        self.unit(Some(0))
    }

    pub fn fiber(&self) -> DivisorClass {
        self.unit(Some(1))
    }

    /// Exceptional curve of the i-th blow-up (zero-based). Panics when out of range.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        assert!(i < self.blowups.len(), "no exceptional curve E{}", i + 1);
        self.unit(Some(2 + i))
    }

    fn unit(&self, at: Option<usize>) -> DivisorClass {
        let mut coords = vec![0; self.basis_size()];
        if let Some(i) = at {
            coords[i] = 1;
        }
        DivisorClass {
            coords,
            surface: self.id(),
        }
    }

    fn check(&self, d: &DivisorClass) -> Result<()> {
        if d.surface != self.id() {
            return Err(Error::SurfaceMismatch {
                expected: self.id().to_string(),
                found: d.surface.to_string(),
            });
        }
        Ok(())
    }

    fn pairing(&self, i: usize, j: usize) -> i64 {
        let value = match (i, j) {
            (0, 0) => -self.e,
            (0, 1) | (1, 0) => 1,
            (1, 1) => 0,
            (a, b) if a == b => -1,
            _ => 0,
        };
        if self.flipped {
            -value
        } else {
            value
        }
    }

    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
        self.check(a)?;
        self.check(b)?;
        let n = self.basis_size();
        let mut total = 0i64;
        for i in 0..n {
            if a.coords[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b.coords[j] != 0 {
                    total += a.coords[i] * self.pairing(i, j) * b.coords[j];
                }
            }
        }
        Ok(total)
    }

    pub fn self_intersection(&self, d: &DivisorClass) -> Result<i64> {
        self.intersect(d, d)
    }

    /// `K = -2Δ₀ - (e+2)Γ + ΣE_i`.
    pub fn canonical_class(&self) -> DivisorClass {
        let exc = vec![1; self.blowups.len()];
        self.combo(-2, -(self.e + 2), &exc)
    }

    /// `h⁰` of `aΔ₀ + bΓ - Σ m_i E_i`, assuming the imposed points give
    /// independent conditions.
    ///
    /// Refuses classes with a positive exceptional coefficient; see
    /// [`SurfaceModel::h0_split`].
    pub fn h0(&self, d: &DivisorClass) -> Result<u64> {
        self.check(d)?;
        if d.exceptional_coeffs().iter().any(|&c| c > 0) {
            return Err(Error::AmbiguousEffectivePart {
                class: d.to_string(),
            });
        }
        let (a, b) = (d.section_coeff(), d.fiber_coeff());
        if a < 0 {
            return Ok(0);
        }
        let base: i64 = (0..=a).map(|k| (b - k * self.e + 1).max(0)).sum();
        let conditions: i64 = d
            .exceptional_coeffs()
            .iter()
            .map(|&c| {
                let m = -c;
                m * (m + 1) / 2
            })
            .sum();
        Ok((base - conditions).max(0) as u64)
    }

    /// Splits `D` into `(D', F)` where `F` collects the positive exceptional
    /// coefficients. `F` is a fixed component of `|D|`, so `h⁰(D) = h⁰(D')`.
    pub fn split_exceptional(&self, d: &DivisorClass) -> Result<(DivisorClass, DivisorClass)> {
        self.check(d)?;
        let mut moving = d.clone();
        let mut fixed = self.zero();
        for i in 2..d.coords.len() {
            if d.coords[i] > 0 {
                fixed.coords[i] = d.coords[i];
                moving.coords[i] = 0;
            }
        }
        Ok((moving, fixed))
    }

    /// `h⁰` after splitting off exceptional fixed components.
    pub fn h0_split(&self, d: &DivisorClass) -> Result<u64> {
        let (moving, _) = self.split_exceptional(d)?;
        self.h0(&moving)
    }

    pub fn blow_up(&self, tag: PointTag) -> SurfaceModel {
        let mut blowups = self.blowups.clone();
        blowups.push(tag);
        SurfaceModel {
            e: self.e,
            blowups,
            flipped: self.flipped,
        }
    }

    /// Pulls back a class from a surface this one was blown up from.
    pub fn embed(&self, d: &DivisorClass) -> Result<DivisorClass> {
        let src = d.surface;
        if src.e != self.e || src.flipped != self.flipped || src.rank > self.basis_size() {
            return Err(Error::SurfaceMismatch {
                expected: format!("a model below {}", self.id()),
                found: src.to_string(),
            });
        }
        let mut coords = d.coords.clone();
        coords.resize(self.basis_size(), 0);
        Ok(DivisorClass {
            coords,
            surface: self.id(),
        })
    }

    /// The finite list of curves used for the nef test. Blown-up points are
    /// taken on distinct fibres and off `Δ₀`.
    pub fn test_curves(&self) -> Vec<TestCurve> {
        let r = self.blowups.len();
        let mut curves = vec![TestCurve::NegativeSection, TestCurve::Fiber];
        curves.extend((0..r).map(TestCurve::Exceptional));
        curves.extend((0..r).map(TestCurve::FiberThrough));
        curves
    }

    pub fn is_nef_and_big(&self, d: &DivisorClass) -> Result<NefCheck> {
        self.check(d)?;
        let self_intersection = self.self_intersection(d)?;
        for curve in self.test_curves() {
            let class = curve.class(self);
            let value = self.intersect(d, &class)?;
            if value < 0 {
                return Ok(NefCheck {
                    self_intersection,
                    failure: Some(NefFailure::NegativeOn { curve, value }),
                    witness: Some(class.to_string()),
                });
            }
        }
        let failure = (self_intersection <= 0).then_some(NefFailure::NotBig { self_intersection });
        Ok(NefCheck {
            self_intersection,
            failure,
            witness: None,
        })
    }

    /// Arithmetic genus `1 + C·(C+K)/2`.
    pub fn adjunction_genus(&self, c: &DivisorClass) -> Result<i64> {
        let k = self.canonical_class();
        let product = self.intersect(c, &(c + &k))?;
        if product % 2 != 0 {
            return Err(Error::AdjunctionParity {
                class: c.to_string(),
                product,
            });
        }
        Ok(1 + product / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blown(times: usize) -> SurfaceModel {
        (0..times).fold(SurfaceModel::f1(), |s, i| {
            s.blow_up(PointTag::Label(format!("P{i}")))
        })
    }

    #[test]
    fn intersection_examples() {
        let s = SurfaceModel::f1();
        let d0 = s.section();
        let g = s.fiber();
        assert_eq!(s.intersect(&d0, &d0).unwrap(), -1);
        assert_eq!(s.intersect(&g, &g).unwrap(), 0);
        let k = s.combo(-2, -3, &[]);
        assert_eq!(s.self_intersection(&k).unwrap(), 8);

        let y = blown(1);
        let c = y.combo(2, 2, &[-1]);
        assert_eq!(y.self_intersection(&c).unwrap(), 3);
    }

    #[test]
    fn mismatched_surface_is_domain_error() {
        let s = SurfaceModel::f1();
        let y = blown(1);
        let err = y.intersect(&y.fiber(), &s.fiber()).unwrap_err();
        assert!(matches!(err, Error::SurfaceMismatch { .. }));
        assert!(s.class(vec![1, 2, 3]).is_err());
    }

    #[test]
    fn canonical_class_examples() {
        let s = SurfaceModel::f1();
        assert_eq!(s.canonical_class(), s.combo(-2, -3, &[]));
        assert_eq!(s.self_intersection(&s.canonical_class()).unwrap(), 8);
        let y = blown(1);
        assert_eq!(y.canonical_class(), y.combo(-2, -3, &[1]));
    }

    #[test]
    fn h0_examples() {
        let s = SurfaceModel::f1();
        assert_eq!(s.h0(&s.combo(1, 3, &[])).unwrap(), 7);
        assert_eq!(s.h0(&s.zero()).unwrap(), 1);
        assert_eq!(s.h0(&(-s.fiber())).unwrap(), 0);
        let y = blown(1);
        assert_eq!(y.h0(&y.combo(1, 4, &[-2])).unwrap(), 6);
    }

    #[test]
    fn h0_refuses_added_exceptional_part() {
        let y = blown(1);
        let d = y.combo(-1, 3, &[1]);
        assert!(matches!(
            y.h0(&d),
            Err(Error::AmbiguousEffectivePart { .. })
        ));
        let (moving, fixed) = y.split_exceptional(&d).unwrap();
        assert_eq!(moving, y.combo(-1, 3, &[0]));
        assert_eq!(fixed, y.exceptional(0));
        assert_eq!(y.h0_split(&d).unwrap(), 0);
        assert_eq!(y.h0_split(&y.combo(1, 2, &[1])).unwrap(), 5);
    }

    #[test]
    fn blow_up_examples() {
        let s = SurfaceModel::f1();
        let y = s.blow_up(PointTag::Label("P".into()));
        assert_eq!(y.basis_size(), 3);
        let c = s.combo(2, 2, &[]);
        let c_up = y.embed(&c).unwrap();
        assert_eq!(y.self_intersection(&c_up).unwrap(), 4);
        assert_eq!(s.self_intersection(&c).unwrap(), 4);

        let z = blown(2);
        assert_eq!(
            z.intersect(&z.exceptional(0), &z.exceptional(1)).unwrap(),
            0
        );
        assert_eq!(z.canonical_class(), z.combo(-2, -3, &[1, 1]));
        assert!(s.embed(&c_up).is_err());
    }

    #[test]
    fn nef_and_big_examples() {
        let s = SurfaceModel::f1();
        for n in 1..20 {
            assert!(s.is_nef_and_big(&s.combo(2, 2 * n, &[])).unwrap().holds());
            assert!(s
                .is_nef_and_big(&s.combo(2, 2 * n + 1, &[]))
                .unwrap()
                .holds());
        }
        let v = s.is_nef_and_big(&(-s.fiber())).unwrap();
        assert_eq!(
            v.failure,
            Some(NefFailure::NegativeOn {
                curve: TestCurve::NegativeSection,
                value: -1
            })
        );
        assert_eq!(v.witness.as_deref(), Some("Δ₀"));
        let fiber = s.is_nef_and_big(&s.fiber()).unwrap();
        assert_eq!(
            fiber.failure,
            Some(NefFailure::NotBig {
                self_intersection: 0
            })
        );
    }

    #[test]
    fn adjunction_examples() {
        let s = SurfaceModel::f1();
        assert_eq!(s.adjunction_genus(&s.fiber()).unwrap(), 0);
        assert_eq!(s.adjunction_genus(&s.section()).unwrap(), 0);
        let y = blown(1);
        assert_eq!(y.adjunction_genus(&y.exceptional(0)).unwrap(), 0);
        // 2Δ₀ + 2Γ: smooth bisections of genus 0 on F1
        assert_eq!(s.adjunction_genus(&s.combo(2, 2, &[])).unwrap(), 0);
    }

    #[test]
    fn display_forms() {
        let y = blown(1);
        assert_eq!(y.combo(2, 2, &[-1]).to_string(), "2Δ₀ + 2Γ - E");
        assert_eq!(y.combo(-1, 0, &[1]).to_string(), "-Δ₀ + E");
        assert_eq!(y.zero().to_string(), "0");
        let z = blown(2);
        assert_eq!(z.combo(0, 1, &[-1, -2]).to_string(), "Γ - E1 - 2E2");
    }
}
