//! The nine families: base branch data, imposed point, tower and, for the
//! last family, the contraction that makes the cover minimal.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{
    impose_point, invariants, minimality_check, solve_building_data, Assumption, BranchData,
    CoverData, Invariants, PointType,
};
use crate::error::{Error, Result};
use crate::group::Character;
use crate::picard::{DivisorClass, SurfaceModel};
use crate::tower::{canonical_image_degree, FixedPartReport, Tower, TowerSummary};

pub const MIN_N: i64 = 2;
pub const MAX_N: i64 = 1_000_000;
pub const MAP_DEGREE: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyId(u32);

impl FamilyId {
    pub fn new(id: u32) -> Result<FamilyId> {
        if (1..=9).contains(&id) {
            Ok(FamilyId(id))
        } else {
            Err(Error::FamilyOutOfRange(id))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = FamilyId> {
        (1..=9).map(FamilyId)
    }

    fn spec(self) -> &'static FamilySpec {
        &FAMILIES[self.0 as usize - 1]
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Construction {
    One,
    Two,
}

impl Construction {
    /// `D₁..D₇` on `surface`, which must be `F_e` before any blow-up.
    pub fn branch(self, surface: &SurfaceModel, n: i64) -> Result<BranchData> {
        let z = surface.zero();
        let c = |a, b| surface.combo(a, b, &[]);
        let divisors = match self {
            Construction::One => vec![
                z.clone(),
                c(0, 2 * n),
                c(2, 2),
                z.clone(),
                z,
                c(2, 2),
                c(2, 2),
            ],
            Construction::Two => vec![
                z.clone(),
                z,
                c(0, 1),
                c(2, 1),
                c(2, 2),
                c(2, 2),
                c(0, 2 * n + 1),
            ],
        };
        BranchData::new(surface, divisors)
    }

    /// The family built on this construction with no imposed point.
    pub fn base_family(self) -> FamilyId {
        match self {
            Construction::One => FamilyId(1),
            Construction::Two => FamilyId(5),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::One => f.write_str("construction 1"),
            Construction::Two => f.write_str("construction 2"),
        }
    }
}

struct FamilySpec {
    construction: Construction,
    point: Option<[i64; 7]>,
    /// Step characters, first step first.
    tower: [[u8; 3]; 3],
    /// Internal construction parameter minus the public one.
    shift: i64,
    bpf_claimed: bool,
    /// Fibre through the imposed point, `Γ - E`, lying on this component.
    contraction: Option<usize>,
}

const TOWER_ONE: [[u8; 3]; 3] = [[0, 1, 0], [1, 0, 0], [0, 0, 1]];
const TOWER_FOUR: [[u8; 3]; 3] = [[1, 1, 1], [1, 0, 1], [1, 0, 0]];
const TOWER_TWO: [[u8; 3]; 3] = [[1, 1, 1], [0, 1, 1], [0, 1, 0]];

const fn spec(
    construction: Construction,
    point: Option<[i64; 7]>,
    tower: [[u8; 3]; 3],
    bpf_claimed: bool,
) -> FamilySpec {
    FamilySpec {
        construction,
        point,
        tower,
        shift: 0,
        bpf_claimed,
        contraction: None,
    }
}

static FAMILIES: [FamilySpec; 9] = [
    spec(Construction::One, None, TOWER_ONE, true),
    spec(
        Construction::One,
        Some([0, 1, 1, 0, 0, 1, 1]),
        TOWER_ONE,
        true,
    ),
    spec(
        Construction::One,
        Some([0, 0, 0, 0, 0, 2, 2]),
        TOWER_ONE,
        true,
    ),
    spec(
        Construction::One,
        Some([0, 0, 1, 0, -1, 1, 2]),
        TOWER_FOUR,
        false,
    ),
    spec(Construction::Two, None, TOWER_TWO, false),
    spec(
        Construction::Two,
        Some([0, 0, 0, 1, 1, 1, 1]),
        TOWER_TWO,
        false,
    ),
    spec(
        Construction::Two,
        Some([0, 0, 0, 0, 2, 2, 0]),
        TOWER_TWO,
        false,
    ),
    spec(
        Construction::Two,
        Some([0, 0, -1, 1, 2, 0, 1]),
        TOWER_TWO,
        false,
    ),
    FamilySpec {
        construction: Construction::Two,
        point: Some([0, 0, -1, 1, 2, 2, 1]),
        tower: TOWER_TWO,
        shift: 1,
        bpf_claimed: false,
        contraction: Some(7),
    },
];

pub fn construction_of(id: FamilyId) -> Construction {
    id.spec().construction
}

pub fn imposed_point(id: FamilyId) -> Option<PointType> {
    id.spec()
        .point
        .map(|k| PointType::new(k.to_vec()).expect("table entries are well formed"))
}

pub fn tower_characters(id: FamilyId) -> Vec<Character> {
    id.spec()
        .tower
        .iter()
        .map(|b| Character::new(b).expect("table entries are well formed"))
        .collect()
}

/// The construction parameter actually used for public parameter `n`.
pub fn internal_n(id: FamilyId, n: i64) -> i64 {
    n + id.spec().shift
}

/// Cover data for `id` at the internal parameter `n`.
pub fn family_cover(base: &SurfaceModel, id: FamilyId, n: i64) -> Result<CoverData> {
    let spec = id.spec();
    let branch = spec.construction.branch(base, n)?;
    match imposed_point(id) {
        None => solve_building_data(base, &branch),
        Some(k) => {
            let (surface, branch) = impose_point(base, &branch, &k)?;
            solve_building_data(&surface, &branch)
        }
    }
}

/// Closed-form row of the main table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremRow {
    pub k2: i64,
    pub pg: i64,
    pub q: i64,
    pub bpf: bool,
}

pub fn expected_row(id: FamilyId, n: i64) -> TheoremRow {
    let (k2, pg, q) = match id.get() {
        1 => (16 * n - 8, 2 * n + 1, 0),
        2 => (16 * n - 16, 2 * n, 0),
        3 => (16 * n - 16, 2 * n, 1),
        4 => (16 * n - 10, 2 * n, 0),
        5 => (16 * n, 2 * n + 1, 0),
        6 => (16 * n - 8, 2 * n, 0),
        7 => (16 * n - 8, 2 * n, 1),
        8 => (16 * n - 2, 2 * n, 0),
        _ => (16 * n, 2 * n, 1),
    };
    TheoremRow {
        k2,
        pg,
        q,
        bpf: id.get() <= 3,
    }
}

/// A family part-way through construction.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub id: FamilyId,
    pub n: i64,
    pub internal_n: i64,
    pub tower: Tower,
    pub invariants: Invariants,
    /// `M` with `2K_X ≡ f*M` on the current model.
    pub two_k_class: DivisorClass,
    pub fixed: FixedPartReport,
    pub moving_class: DivisorClass,
    pub assumptions: Vec<Assumption>,
    pub contracted: Option<(DivisorClass, i64)>,
}

pub fn assemble(base: &SurfaceModel, id: FamilyId, n: i64) -> Result<Assembly> {
    check_n(n)?;
    let internal = internal_n(id, n);
    let cover = family_cover(base, id, internal)?;
    let invariants = invariants(&cover)?;
    let tower = Tower::new(cover, &tower_characters(id))?;
    let fixed = tower.fixed_part_report()?;
    let mut assumptions = tower.cover().branch().assumptions().to_vec();
    assumptions.push(Assumption::NotComposedWithPencil);
    Ok(Assembly {
        id,
        n,
        internal_n: internal,
        two_k_class: invariants.two_k_pullclass.clone(),
        moving_class: fixed.moving_class.clone(),
        invariants,
        fixed,
        tower,
        assumptions,
        contracted: None,
    })
}

/// Number of disjoint `(-1)`-curves making up `½f*C` for a curve `C` lying
/// on the branch component `D_index`.
pub fn minus_one_curves_over(tower: &Tower, curve: &DivisorClass, index: usize) -> Result<i64> {
    let rest = tower.cover().branch().divisor(index) - curve;
    if tower.surface().h0_split(&rest)? == 0 {
        return Err(Error::Inconsistent(format!(
            "{curve} is not a component of D{index}"
        )));
    }
    // Every branch component is ramified exactly once over the whole cover.
    let top = tower.curve_at(curve, tower.len(), 1)?;
    let kc = 2 * (top.genus - 1) - top.self_int;
    if top.self_int >= 0 || kc != top.self_int {
        return Err(Error::Inconsistent(format!(
            "pullback of {curve} has square {} and canonical degree {kc}; not a union of (-1)-curves",
            top.self_int
        )));
    }
    Ok(-top.self_int)
}

/// Contracts the `count` disjoint `(-1)`-curves lying over `curve`.
pub fn contract_step(mut a: Assembly, curve: &DivisorClass, count: i64) -> Result<Assembly> {
    if count == 0 {
        return Ok(a);
    }
    let surface = a.tower.surface();
    let c2 = surface.self_intersection(curve)?;
    if c2 != -1 {
        return Err(Error::NotMinusOneCurve {
            class: curve.to_string(),
            self_intersection: c2,
        });
    }
    let m = &a.two_k_class - curve;
    let k2 = a.invariants.k2 + count;
    let expected = a.tower.cover().degree() * surface.self_intersection(&m)? / 4;
    if expected != k2 {
        return Err(Error::InconsistentContraction {
            k2: a.invariants.k2,
            count,
            expected,
        });
    }
    // The contracted curves are fixed in |f*N| when N meets C negatively.
    let reduced = &a.moving_class - curve;
    let top = a.tower.len();
    if surface.intersect(&a.moving_class, curve)? < 0
        && a.tower.h0_pullback(&reduced, top)? == a.tower.h0_pullback(&a.moving_class, top)?
    {
        a.moving_class = reduced;
    }
    a.invariants.k2 = k2;
    a.invariants.two_k_pullclass = m.clone();
    a.two_k_class = m;
    a.assumptions.push(Assumption::Contraction {
        curve: curve.to_string(),
        count,
    });
    a.contracted = Some((curve.clone(), count));
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub id: FamilyId,
    pub n: i64,
    pub internal_n: i64,
    pub construction: Construction,
    pub point: Option<PointType>,
    pub invariants: Invariants,
    pub two_k_class: DivisorClass,
    pub moving_class: DivisorClass,
    pub image_degree: i64,
    pub map_degree: i64,
    pub nodes: Option<i64>,
    pub fixed: FixedPartReport,
    pub bpf: bool,
    pub assumptions: Vec<Assumption>,
    pub checks: Vec<Check>,
    pub tower: Tower,
    pub contracted: Option<(DivisorClass, i64)>,
}

/// The flat record behind the JSON and CSV output.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub family: u32,
    pub n: i64,
    pub K2: i64,
    pub pg: i64,
    pub chi: i64,
    pub q: i64,
    pub map_degree: i64,
    pub image_degree: i64,
    pub bpf: bool,
    pub fixed_part: String,
    pub nodes: Option<i64>,
    pub assumptions: Vec<String>,
}

impl FamilyReport {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn cover(&self) -> &CoverData {
        self.tower.cover()
    }

    pub fn surface(&self) -> &SurfaceModel {
        self.tower.surface()
    }

    pub fn row(&self) -> TheoremRow {
        TheoremRow {
            k2: self.invariants.k2,
            pg: self.invariants.pg,
            q: self.invariants.q,
            bpf: self.bpf,
        }
    }

    pub fn fixed_part_label(&self) -> String {
        if self.fixed.fixed_class.is_zero() {
            "0".to_owned()
        } else {
            format!("1/2 f*({})", self.fixed.fixed_class)
        }
    }

    pub fn building_data(&self) -> Vec<(Character, DivisorClass)> {
        self.cover().building_table()
    }

    pub fn tower_summary(&self) -> TowerSummary {
        self.tower.summary()
    }

    pub fn record(&self) -> FamilyRecord {
        FamilyRecord {
            family: self.id.get(),
            n: self.n,
            K2: self.invariants.k2,
            pg: self.invariants.pg,
            chi: self.invariants.chi,
            q: self.invariants.q,
            map_degree: self.map_degree,
            image_degree: self.image_degree,
            bpf: self.bpf,
            fixed_part: self.fixed_part_label(),
            nodes: self.nodes,
            assumptions: self.assumptions.iter().map(ToString::to_string).collect(),
        }
    }
}

fn check_n(n: i64) -> Result<()> {
    if (MIN_N..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            n,
            min: MIN_N,
            max: MAX_N,
        })
    }
}

/// Runs the consistency checks and freezes the report.
pub fn finish(a: Assembly) -> Result<FamilyReport> {
    let spec = a.id.spec();
    let cover = a.tower.cover();
    let surface = a.tower.surface();
    let inv = &a.invariants;
    let mut checks = Vec::new();

    let bad: Vec<String> = cover
        .residuals()
        .into_iter()
        .filter(|(_, r)| !r.is_zero())
        .map(|(chi, r)| format!("{chi}: {r}"))
        .collect();
    checks.push(Check::new(
        "cover_residuals",
        bad.is_empty(),
        bad.join("; "),
    ));

    let trivial: Vec<String> = cover
        .trivial_characters()
        .iter()
        .map(ToString::to_string)
        .collect();
    checks.push(Check::new(
        "nontrivial_l",
        trivial.is_empty(),
        trivial.join(" "),
    ));

    checks.push(Check::new(
        "chi_consistency",
        inv.chi == 1 - inv.q + inv.pg,
        format!("chi {} pg {} q {}", inv.chi, inv.pg, inv.q),
    ));

    let m2 = surface.self_intersection(&a.two_k_class)?;
    checks.push(Check::new(
        "k2_even",
        inv.k2 % 2 == 0 && inv.k2 == cover.degree() * m2 / 4,
        format!("K2 {} from M^2 = {m2}", inv.k2),
    ));

    let nef = surface.is_nef_and_big(&a.two_k_class)?;
    checks.push(Check::new(
        "minimality",
        nef.holds(),
        nef.witness.clone().unwrap_or_default(),
    ));

    checks.push(Check::new(
        "canonical_identity",
        a.fixed.canonical_identity,
        format!("2({}) + {}", a.fixed.moving_class, a.fixed.fixed_class),
    ));

    let top = a.tower.len();
    let h0_moving = a.tower.h0_pullback(&a.moving_class, top)?;
    checks.push(Check::new(
        "moving_sections",
        h0_moving as i64 == inv.pg,
        format!("h0 {} against pg {}", h0_moving, inv.pg),
    ));

    let image_degree =
        canonical_image_degree(surface, &a.moving_class, cover.degree(), MAP_DEGREE)?;
    checks.push(Check::new(
        "image_degree",
        image_degree > 0,
        format!("moving class {}", a.moving_class),
    ));

    let bpf = a.fixed.bpf_claimed && spec.bpf_claimed;
    let mut assumptions = a.assumptions;
    if bpf {
        assumptions.push(Assumption::BasePointFreeClaim);
    }
    let nodes = Some(a.tower.count_nodes(top));
    Ok(FamilyReport {
        id: a.id,
        n: a.n,
        internal_n: a.internal_n,
        construction: spec.construction,
        point: imposed_point(a.id),
        invariants: a.invariants,
        two_k_class: a.two_k_class,
        moving_class: a.moving_class,
        image_degree,
        map_degree: MAP_DEGREE,
        nodes,
        fixed: a.fixed,
        bpf,
        assumptions,
        checks,
        tower: a.tower,
        contracted: a.contracted,
    })
}

pub fn build_family(id: u32, n: i64) -> Result<FamilyReport> {
    build_family_on(&SurfaceModel::f1(), id, n)
}

/// As [`build_family`] over an arbitrary unblown base.
pub fn build_family_on(base: &SurfaceModel, id: u32, n: i64) -> Result<FamilyReport> {
    let id = FamilyId::new(id)?;
    let mut a = assemble(base, id, n)?;
    if let Some(index) = id.spec().contraction {
        let curve = &a.tower.surface().fiber() - &a.tower.surface().exceptional(0);
        let count = minus_one_curves_over(&a.tower, &curve, index)?;
        a = contract_step(a, &curve, count)?;
    }
    finish(a)
}

/// The nine rows in order.
pub fn theorem_table(n: i64) -> Result<Vec<FamilyReport>> {
    theorem_table_on(&SurfaceModel::f1(), n)
}

pub fn theorem_table_on(base: &SurfaceModel, n: i64) -> Result<Vec<FamilyReport>> {
    check_n(n)?;
    (1..=9u32)
        .into_par_iter()
        .map(|id| build_family_on(base, id, n))
        .collect()
}

/// Pre-contraction minimality witness, if the raw cover is not minimal.
pub fn raw_minimality_witness(id: FamilyId, n: i64) -> Result<Option<String>> {
    let cover = family_cover(&SurfaceModel::f1(), id, internal_n(id, n))?;
    Ok(minimality_check(&cover)?.witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_table(id: u32, n: i64) -> Vec<String> {
        let r = build_family(id, n).unwrap();
        r.building_data()
            .into_iter()
            .map(|(_, l)| l.to_string())
            .collect()
    }

    #[test]
    fn theorem_rows_small_n() {
        let expected = [
            (24, 5, 0, true),
            (16, 4, 0, true),
            (16, 4, 1, true),
            (22, 4, 0, false),
            (32, 5, 0, false),
            (24, 4, 0, false),
            (24, 4, 1, false),
            (30, 4, 0, false),
            (32, 4, 1, false),
        ];
        let rows = theorem_table(2).unwrap();
        for (r, e) in rows.iter().zip(expected) {
            assert_eq!(
                (r.invariants.k2, r.invariants.pg, r.invariants.q, r.bpf),
                e,
                "family {}",
                r.id
            );
            assert!(
                r.consistent(),
                "family {}: {:?}",
                r.id,
                r.failed_checks().collect::<Vec<_>>()
            );
        }
        assert_eq!(
            theorem_table(3).unwrap()[0].row(),
            expected_row(FamilyId(1), 3)
        );
        assert_eq!(theorem_table(5).unwrap()[7].invariants.k2, 78);
    }

    #[test]
    fn closed_forms() {
        for n in 2..30 {
            for r in theorem_table(n).unwrap() {
                assert_eq!(r.row(), expected_row(r.id, n), "family {} n {n}", r.id);
                assert!(r.consistent());
                assert_eq!(r.fixed.fixed_class.is_zero(), r.id.get() <= 3);
            }
        }
    }

    #[test]
    fn family_two_building_data() {
        assert_eq!(
            l_table(2, 4),
            [
                "2Δ₀ + 2Γ - E",
                "3Δ₀ + 7Γ - 2E",
                "2Δ₀ + 2Γ - E",
                "Δ₀ + 5Γ - E",
                "2Δ₀ + 2Γ - E",
                "Δ₀ + 5Γ - E",
                "Δ₀ + 5Γ - E",
            ]
        );
    }

    #[test]
    fn image_degrees_and_fixed_parts() {
        for n in 2..20 {
            let degrees: Vec<i64> = theorem_table(n)
                .unwrap()
                .iter()
                .map(|r| r.image_degree)
                .collect();
            let m = 2 * n - 2;
            assert_eq!(degrees, vec![2 * n - 1, m, m, m, 2 * n - 1, m, m, m, m]);
        }
        let r = build_family(8, 3).unwrap();
        assert_eq!(r.fixed_part_label(), "1/2 f*(Γ + E)");
        let r = build_family(4, 3).unwrap();
        assert_eq!(r.fixed_part_label(), "1/2 f*(E)");
        assert_eq!(r.nodes, Some(30));
    }

    #[test]
    fn family_nine_contraction() {
        for n in 2..20 {
            let id = FamilyId::new(9).unwrap();
            let a = assemble(&SurfaceModel::f1(), id, n).unwrap();
            let internal = n + 1;
            assert_eq!(a.invariants.k2, 16 * internal - 18);
            let s = a.tower.surface().clone();
            let curve = &s.fiber() - &s.exceptional(0);
            assert_eq!(minus_one_curves_over(&a.tower, &curve, 7).unwrap(), 2);
            assert_eq!(
                raw_minimality_witness(id, n).unwrap(),
                Some(curve.to_string())
            );

            let same = contract_step(a.clone(), &curve, 0).unwrap();
            assert_eq!(same.invariants, a.invariants);
            assert!(matches!(
                contract_step(a.clone(), &s.fiber(), 2),
                Err(Error::NotMinusOneCurve { .. })
            ));
            assert!(matches!(
                contract_step(a.clone(), &curve, 3),
                Err(Error::InconsistentContraction { .. })
            ));

            let done = contract_step(a, &curve, 2).unwrap();
            assert_eq!(done.invariants.k2, 16 * internal - 16);
            assert_eq!(done.moving_class, s.combo(1, internal - 1, &[-1]));
            let r = finish(done).unwrap();
            assert_eq!(r.image_degree, 2 * internal - 4);
            assert_eq!(r.fixed_part_label(), "1/2 f*(Γ + E)");
            assert!(r
                .assumptions
                .iter()
                .any(|a| matches!(a, Assumption::Contraction { count: 2, .. })));
        }
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(build_family(0, 3).unwrap_err(), Error::FamilyOutOfRange(0));
        assert_eq!(
            build_family(10, 3).unwrap_err(),
            Error::FamilyOutOfRange(10)
        );
        assert!(matches!(
            build_family(9, 1),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            theorem_table(MAX_N + 1),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(build_family(9, MAX_N).is_ok());
    }

    #[test]
    fn record_round_trip() {
        let r = build_family(1, 2).unwrap().record();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"K2\":24"));
        let back: FamilyRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
