//! Building data of `Z₂^m`-covers of rational surfaces.
//!
//! Branch components `D_i` are indexed by the nonzero group elements, the
//! character bundles `L_χ` by the nontrivial characters. A cover exists iff
//! `2L_χ ≡ Σ_{χ(σ_i) = -1} D_i` for every nontrivial `χ`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{parity_matrix, Character, ParityMatrix};
use crate::picard::{format_tuple, DivisorClass, NefCheck, PointTag, SurfaceModel};

/// Multiplicities `(k₁, …, k_{2^m-1})` of the branch components at a point.
/// An entry of `-1` means the exceptional curve is added to that component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointType(Vec<i64>);

impl PointType {
    pub fn new(entries: Vec<i64>) -> Result<PointType> {
        rank_for_len(entries.len())?;
        if let Some(&bad) = entries.iter().find(|&&k| k < -1) {
            return Err(Error::Inconsistent(format!(
                "multiplicity {bad} below -1 in {}",
                format_tuple(&entries)
            )));
        }
        Ok(PointType(entries))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> u32 {
        rank_for_len(self.0.len()).expect("validated on construction")
    }

    pub fn is_valid(&self) -> bool {
        validate_point_type(&self.0)
    }
}

impl fmt::Display for PointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_tuple(&self.0))
    }
}

fn rank_for_len(len: usize) -> Result<u32> {
    let rank = (len + 1).trailing_zeros();
    if len == 0 || (len + 1) != 1usize << rank {
        return Err(Error::Length {
            expected: 7,
            found: len,
        });
    }
    Ok(rank)
}

/// Things taken on trust rather than computed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    ComponentsSmooth,
    NormalCrossings,
    /// Imposed points give independent conditions on sections.
    GeneralPosition,
    NotComposedWithPencil,
    /// The base-point-free column is a claim, not a proof of freeness.
    BasePointFreeClaim,
    Contraction {
        curve: String,
        count: i64,
    },
    /// Class-level consistency only; no claim that the curves exist.
    Candidate,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::ComponentsSmooth => f.write_str("components_smooth"),
            Assumption::NormalCrossings => f.write_str("normal_crossings"),
            Assumption::GeneralPosition => f.write_str("general_position"),
            Assumption::NotComposedWithPencil => f.write_str("not_composed_with_pencil"),
            Assumption::BasePointFreeClaim => f.write_str("bpf_claimed"),
            Assumption::Contraction { curve, count } => {
                write!(f, "contracted {count} (-1)-curves over {curve}")
            }
            Assumption::Candidate => f.write_str("candidate"),
        }
    }
}

impl Serialize for Assumption {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchData {
    rank: u32,
    divisors: Vec<DivisorClass>,
    imposed_points: Vec<PointType>,
    assumptions: Vec<Assumption>,
}

impl BranchData {
    /// `divisors[i]` is `D_{i+1}`; the length must be `2^m - 1`.
    pub fn new(surface: &SurfaceModel, divisors: Vec<DivisorClass>) -> Result<BranchData> {
        let rank = rank_for_len(divisors.len())?;
        for d in &divisors {
            if d.surface_id() != surface.id() {
                return Err(Error::SurfaceMismatch {
                    expected: surface.id().to_string(),
                    found: d.surface_id().to_string(),
                });
            }
        }
        let branch = BranchData {
            rank,
            divisors,
            imposed_points: Vec::new(),
            assumptions: vec![
                Assumption::ComponentsSmooth,
                Assumption::NormalCrossings,
                Assumption::GeneralPosition,
            ],
        };
        branch.check_effective(surface)?;
        Ok(branch)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn divisors(&self) -> &[DivisorClass] {
        &self.divisors
    }

    /// `D_i`, 1-based.
    pub fn divisor(&self, index: usize) -> &DivisorClass {
        &self.divisors[index - 1]
    }

    pub fn imposed_points(&self) -> &[PointType] {
        &self.imposed_points
    }

    pub fn assumptions(&self) -> &[Assumption] {
        &self.assumptions
    }

    pub fn add_assumption(&mut self, a: Assumption) {
        if !self.assumptions.contains(&a) {
            self.assumptions.push(a);
        }
    }

    /// `B = ΣD_i`.
    pub fn total(&self, surface: &SurfaceModel) -> DivisorClass {
        self.divisors.iter().fold(surface.zero(), |acc, d| &acc + d)
    }

    /// Class-level effectivity: nonnegative `Δ₀`/`Γ` parts, exceptional
    /// coefficients bounded by the recorded multiplicities, and a nonzero
    /// section count for every nonzero component.
    pub fn check_effective(&self, surface: &SurfaceModel) -> Result<()> {
        for (i, d) in self.divisors.iter().enumerate() {
            let not_effective = || Error::NotEffective {
                index: i + 1,
                class: d.to_string(),
            };
            if d.is_zero() {
                continue;
            }
            if d.section_coeff() < 0 || d.fiber_coeff() < 0 {
                return Err(not_effective());
            }
            for (j, &c) in d.exceptional_coeffs().iter().enumerate() {
                let allowed = match surface.blowups().get(j) {
                    Some(PointTag::Multiplicities(k)) => k.get(i).copied().unwrap_or(0).max(0),
                    _ => 0,
                };
                if c < -allowed {
                    return Err(not_effective());
                }
            }
            if surface.h0_split(d)? == 0 {
                return Err(not_effective());
            }
        }
        Ok(())
    }
}

/// True iff every character sum `Σ_{χ(σ_i) = -1} k_i` is even.
///
/// Slices whose length is not `2^m - 1` are never valid.
pub fn validate_point_type(k: &[i64]) -> bool {
    let Ok(rank) = rank_for_len(k.len()) else {
        return false;
    };
    let Ok(parity) = parity_matrix(rank) else {
        return false;
    };
    parity.rows().iter().all(|row| {
        row.iter()
            .zip(k)
            .filter(|(&e, _)| e == 1)
            .map(|(_, &ki)| ki)
            .sum::<i64>()
            % 2
            == 0
    })
}

/// Blows up one point with multiplicities `k` and subtracts `k_i·E` from each
/// `D_i`.
pub fn impose_point(
    surface: &SurfaceModel,
    branch: &BranchData,
    k: &PointType,
) -> Result<(SurfaceModel, BranchData)> {
    if k.entries().len() != branch.divisors.len() {
        return Err(Error::Length {
            expected: branch.divisors.len(),
            found: k.entries().len(),
        });
    }
    if !k.is_valid() {
        return Err(Error::InvalidPointType(k.to_string()));
    }
    let blown = surface.blow_up(PointTag::Multiplicities(k.entries().to_vec()));
    let e_new = blown.exceptional(blown.blowups().len() - 1);
    let divisors = branch
        .divisors
        .iter()
        .zip(k.entries())
        .map(|(d, &ki)| Ok(&blown.embed(d)? - &e_new.scale(ki)))
        .collect::<Result<Vec<_>>>()?;
    let mut imposed_points = branch.imposed_points.clone();
    imposed_points.push(k.clone());
    let new_branch = BranchData {
        rank: branch.rank,
        divisors,
        imposed_points,
        assumptions: branch.assumptions.clone(),
    };
    new_branch.check_effective(&blown)?;
    Ok((blown, new_branch))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverData {
    surface: SurfaceModel,
    branch: BranchData,
    parity: ParityMatrix,
    /// `L_χ` in character-index order.
    l_classes: Vec<DivisorClass>,
}

impl CoverData {
    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn branch(&self) -> &BranchData {
        &self.branch
    }

    pub fn parity(&self) -> &ParityMatrix {
        &self.parity
    }

    pub fn rank(&self) -> u32 {
        self.branch.rank
    }

    pub fn degree(&self) -> i64 {
        1 << self.branch.rank
    }

    pub fn l(&self, chi: Character) -> &DivisorClass {
        &self.l_classes[chi.index() - 1]
    }

    pub fn l_classes(&self) -> &[DivisorClass] {
        &self.l_classes
    }

    /// `(χ, L_χ)` in presentation order.
    pub fn building_table(&self) -> Vec<(Character, DivisorClass)> {
        Character::display_order(self.rank())
            .expect("rank validated")
            .into_iter()
            .map(|chi| (chi, self.l(chi).clone()))
            .collect()
    }

    /// `Σ_{χ(σ_i) = -1} D_i` for one character.
    pub fn branch_sum(&self, chi: Character) -> DivisorClass {
        self.parity
            .support(chi)
            .into_iter()
            .fold(self.surface.zero(), |acc, i| &acc + self.branch.divisor(i))
    }

    /// `2L_χ - Σ D_i` for every character; all zero for valid data.
    pub fn residuals(&self) -> Vec<(Character, DivisorClass)> {
        Character::nontrivial(self.rank())
            .expect("rank validated")
            .into_iter()
            .map(|chi| (chi, &self.l(chi).scale(2) - &self.branch_sum(chi)))
            .collect()
    }

    /// Characters whose `L_χ` is the zero class; the cover equations require
    /// none. On these surfaces Pic has no torsion, so zero class means trivial
    /// bundle.
    pub fn trivial_characters(&self) -> Vec<Character> {
        Character::nontrivial(self.rank())
            .expect("rank validated")
            .into_iter()
            .filter(|&chi| self.l(chi).is_zero())
            .collect()
    }

    /// `M = 2K_Y + ΣD_j`, so that `2K_X ≡ f*M`.
    pub fn two_k_pullclass(&self) -> DivisorClass {
        &self.surface.canonical_class().scale(2) + &self.branch.total(&self.surface)
    }
}

pub fn solve_building_data(surface: &SurfaceModel, branch: &BranchData) -> Result<CoverData> {
    for d in branch.divisors() {
        if d.surface_id() != surface.id() {
            return Err(Error::SurfaceMismatch {
                expected: surface.id().to_string(),
                found: d.surface_id().to_string(),
            });
        }
    }
    let parity = parity_matrix(branch.rank)?;
    let mut cover = CoverData {
        surface: surface.clone(),
        branch: branch.clone(),
        parity,
        l_classes: Vec::new(),
    };
    for chi in Character::nontrivial(branch.rank)? {
        let sum = cover.branch_sum(chi);
        let half = sum.halve().ok_or_else(|| Error::NoCover {
            character: chi.to_string(),
            sum: sum.to_string(),
        })?;
        cover.l_classes.push(half);
    }
    Ok(cover)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub k2: i64,
    pub pg: i64,
    pub chi: i64,
    pub q: i64,
    /// `M` with `2K_X ≡ f*M`.
    pub two_k_pullclass: DivisorClass,
    /// `h⁰(L_χ + K_Y)` per character, presentation order.
    pub pg_contributions: Vec<(Character, u64)>,
}

/// Invariants of the smooth cover of a rational surface: `p_g(Y) = 0`,
/// `χ(O_Y) = 1`. `q` is derived from `χ = 1 - q + p_g`.
pub fn invariants(cover: &CoverData) -> Result<Invariants> {
    let s = cover.surface();
    let k = s.canonical_class();
    let m = cover.two_k_pullclass();
    let degree = cover.degree();

    let m2 = s.self_intersection(&m)?;
    if (degree * m2) % 4 != 0 {
        return Err(Error::NonIntegral {
            class: m.to_string(),
            numerator: degree * m2,
            denominator: 4,
        });
    }
    let k2 = degree * m2 / 4;

    let mut pg = 0i64;
    let mut pg_contributions = Vec::new();
    let mut chi_numerator = 0i64;
    for chi in Character::display_order(cover.rank())? {
        let l = cover.l(chi);
        let lk = l + &k;
        let h = s.h0_split(&lk)?;
        pg += h as i64;
        pg_contributions.push((chi, h));
        chi_numerator += s.intersect(l, &lk)?;
    }
    if chi_numerator % 2 != 0 {
        return Err(Error::NonIntegral {
            class: "Σ L(L+K)".into(),
            numerator: chi_numerator,
            denominator: 2,
        });
    }
    let chi = degree + chi_numerator / 2;
    Ok(Invariants {
        k2,
        pg,
        chi,
        q: pg - chi + 1,
        two_k_pullclass: m,
        pg_contributions,
    })
}

/// Nef-and-big test of `2K_Y + ΣD_j`.
pub fn minimality_check(cover: &CoverData) -> Result<NefCheck> {
    cover.surface().is_nef_and_big(&cover.two_k_pullclass())
}
