//! The self-check suite behind `z2cover verify`.

use serde::Serialize;

use crate::cover::{solve_building_data, validate_point_type, BranchData};
use crate::error::Result;
use crate::families::{
    build_family_on, contract_step, expected_row, family_cover, internal_n, tower_characters,
    Assembly, FamilyId, FamilyReport, MAX_N, MIN_N,
};
use crate::group::{chi_value, parity_matrix, Character, GroupElement};
use crate::picard::SurfaceModel;
use crate::search::enumerate_point_types;
use crate::tower::Tower;
use crate::Error;

/// Deliberate corruption used to show the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    FlipIntersectionSign,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub name: &'static str,
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl CheckTally {
    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn record_result(&mut self, r: Result<bool>, detail: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, detail),
            Err(e) => self.record(false, || format!("{}: {e}", detail())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub n_lo: i64,
    pub n_hi: i64,
    pub checks: Vec<CheckTally>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0 && c.passed > 0)
    }
}

/// `L_χ = aΔ₀ + (b_n·n + b)Γ + eE` in presentation order.
type Fixture = [(i64, i64, i64, i64); 7];

const FIXTURES: [(u32, Fixture); 7] = [
    (
        2,
        [
            (2, 2, 0, -1),
            (3, 3, 1, -2),
            (2, 2, 0, -1),
            (1, 1, 1, -1),
            (2, 2, 0, -1),
            (1, 1, 1, -1),
            (1, 1, 1, -1),
        ],
    ),
    (
        3,
        [
            (2, 2, 0, -2),
            (3, 3, 1, -2),
            (2, 2, 0, -1),
            (1, 1, 1, 0),
            (2, 2, 0, -1),
            (1, 1, 1, -1),
            (1, 1, 1, -1),
        ],
    ),
    (
        4,
        [
            (2, 2, 0, -1),
            (3, 3, 1, -2),
            (2, 2, 0, -1),
            (1, 1, 1, 0),
            (2, 2, 0, -1),
            (1, 1, 1, 0),
            (1, 1, 1, -1),
        ],
    ),
    (
        6,
        [
            (3, 3, 1, -2),
            (1, 2, 1, -1),
            (1, 2, 1, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -1),
            (1, 1, 1, -1),
        ],
    ),
    (
        7,
        [
            (3, 3, 1, -2),
            (1, 2, 1, -1),
            (1, 2, 1, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -2),
            (1, 1, 1, 0),
        ],
    ),
    (
        8,
        [
            (3, 3, 1, -2),
            (1, 2, 1, 0),
            (1, 2, 1, -1),
            (2, 2, 0, -1),
            (2, 2, 0, 0),
            (2, 2, 0, -1),
            (1, 1, 1, -1),
        ],
    ),
    (
        9,
        [
            (3, 3, 1, -3),
            (1, 2, 1, -1),
            (1, 2, 1, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -1),
            (2, 2, 0, -2),
            (1, 1, 1, -1),
        ],
    ),
];

struct Suite {
    base: SurfaceModel,
    checks: Vec<CheckTally>,
}

impl Suite {
    fn tally(&mut self, name: &'static str) -> &mut CheckTally {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(CheckTally {
            name,
            ..CheckTally::default()
        });
        self.checks.last_mut().expect("just pushed")
    }

    fn family(&mut self, id: u32, n: i64) -> Option<FamilyReport> {
        match build_family_on(&self.base, id, n) {
            Ok(r) => Some(r),
            Err(e) => {
                self.tally("theorem_table")
                    .record(false, || format!("family {id} n {n}: {e}"));
                None
            }
        }
    }

    fn tower(&self, id: u32, n: i64) -> Result<Tower> {
        let id = FamilyId::new(id)?;
        Tower::new(
            family_cover(&self.base, id, internal_n(id, n))?,
            &tower_characters(id),
        )
    }

    fn per_n(&mut self, n: i64) {
        let reports: Vec<FamilyReport> = (1..=9).filter_map(|id| self.family(id, n)).collect();
        for r in &reports {
            let expected = expected_row(r.id, n);
            self.tally("theorem_table").record(r.row() == expected, || {
                format!(
                    "family {} n {n}: got {:?}, expected {:?}",
                    r.id,
                    r.row(),
                    expected
                )
            });
            let cover = r.cover();
            let laws = cover.residuals().iter().all(|(_, d)| d.is_zero())
                && cover.trivial_characters().is_empty()
                && r.invariants.chi == 1 - r.invariants.q + r.invariants.pg
                && r.invariants.k2 % 2 == 0
                && r.checks
                    .iter()
                    .find(|c| c.name == "minimality")
                    .is_some_and(|c| c.passed);
            self.tally("cover_laws").record(laws, || {
                let failed: Vec<_> = r.failed_checks().map(|c| c.name).collect();
                format!("family {} n {n}: {failed:?}", r.id)
            });
            let image = match r.id.get() {
                1 | 5 => 2 * n - 1,
                9 => 2 * r.internal_n - 4,
                _ => 2 * n - 2,
            };
            let square = r.surface().self_intersection(&r.moving_class);
            self.tally("image_degree").record(
                r.image_degree == image && square.is_ok_and(|s| 8 * r.image_degree == 8 * s),
                || format!("family {} n {n}: {} against {image}", r.id, r.image_degree),
            );
        }
        let base = self.base.clone();
        let r = construction_one_internals(&base, n);
        self.tally("construction_one")
            .record_result(r, || format!("n {n}"));
        let r = self.fixtures(n);
        self.tally("building_data")
            .record_result(r, || format!("n {n}"));
        let r = self.tower_numerics(n);
        self.tally("tower_numerics")
            .record_result(r, || format!("n {n}"));
    }

    fn fixtures(&self, n: i64) -> Result<bool> {
        let mut ok = true;
        for (id, table) in FIXTURES {
            let fid = FamilyId::new(id)?;
            let n_int = internal_n(fid, n);
            let cover = family_cover(&self.base, fid, n_int)?;
            let s = cover.surface();
            for ((_, l), (a, b, bn, e)) in cover.building_table().into_iter().zip(table) {
                ok &= l == s.combo(a, bn * n_int + b, &[e]);
            }
        }
        Ok(ok)
    }

    fn tower_numerics(&self, n: i64) -> Result<bool> {
        let four = self.tower(4, n)?;
        let s = four.surface();
        let chain: Vec<(i64, i64)> = four
            .pullback_curve(&s.exceptional(0), &[3])?
            .iter()
            .map(|c| (c.self_int, c.genus))
            .collect();
        let k2 = s.combo(1, n, &[-1]);
        let fixed = four.fixed_part_report()?;
        let mut ok = chain == [(-1, 0), (-2, 0), (-4, 1), (-2, 1)]
            && four.count_nodes(3) == 8 * n + 6
            && four.h0_pullback(&k2, 3)? == 2 * n as u64
            && fixed.moving_class == k2
            && fixed.fixed_class == s.exceptional(0)
            && fixed.canonical_identity
            && fixed.nontrivial_fixed_part;

        let five = self.tower(5, n)?;
        let s = five.surface();
        let genera: Vec<i64> = five.track_component(3)?.iter().map(|c| c.genus).collect();
        let k2 = s.combo(1, n, &[]);
        let fixed = five.fixed_part_report()?;
        ok &= genera == [0, 0, 3, 3]
            && five.count_nodes(3) == 8 * n + 12
            && five.h0_pullback(&k2, 3)? == 2 * n as u64 + 1
            && fixed.moving_class == k2
            && fixed.fixed_class == s.fiber()
            && fixed.canonical_identity
            && fixed.nontrivial_fixed_part;
        Ok(ok)
    }

    fn oracles(&mut self) {
        let f1 = SurfaceModel::f1();
        let mut h0_ok = true;
        for a in 0..=10 {
            for b in 0..=10 {
                let lattice = (0..=a)
                    .flat_map(|i| (0..=b).map(move |j| (i, j)))
                    .filter(|&(i, j)| j + i <= b)
                    .count();
                h0_ok &= f1
                    .h0(&f1.combo(a, b, &[]))
                    .is_ok_and(|h| h as usize == lattice);
            }
        }
        self.tally("oracles")
            .record(h0_ok, || "h0 against monomial count".into());

        let parity_ok = parity_matrix(3).is_ok_and(|m| {
            Character::nontrivial(3).unwrap().into_iter().all(|chi| {
                (1..=7).all(|i| {
                    let sigma = GroupElement::from_index(3, i).unwrap();
                    let direct = u8::from(chi_value(chi, sigma) == -1);
                    m.entry(chi, i) == direct
                })
            })
        });
        self.tally("oracles")
            .record(parity_ok, || "parity matrix against characters".into());

        let brute = |k: &[i64]| {
            Character::nontrivial(3).unwrap().into_iter().all(|chi| {
                (1..=7)
                    .filter(|&i| chi_value(chi, GroupElement::from_index(3, i).unwrap()) == -1)
                    .map(|i| k[i - 1])
                    .sum::<i64>()
                    % 2
                    == 0
            })
        };
        let mut parity_count = 0u64;
        let mut agree = true;
        for (lo, hi) in [(0i64, 2i64), (-1, 2)] {
            let base = (hi - lo + 1) as u64;
            for mut code in 0..base.pow(7) {
                let mut k = [0i64; 7];
                for slot in k.iter_mut().rev() {
                    *slot = lo + (code % base) as i64;
                    code /= base;
                }
                agree &= validate_point_type(&k) == brute(&k);
                parity_count += 1;
            }
        }
        self.tally("oracles")
            .record(agree && parity_count == 3u64.pow(7) + 4u64.pow(7), || {
                "point type validation".into()
            });

        let code = enumerate_point_types(0, 1, false);
        let closed = code.len() == 15
            && code.iter().all(|a| {
                code.iter().all(|b| {
                    let x: Vec<i64> = a.iter().zip(b).map(|(p, q)| p ^ q).collect();
                    x.iter().all(|&v| v == 0) || code.contains(&x)
                })
            });
        self.tally("oracles")
            .record(closed, || "xor closure".into());
    }

    fn negative_controls(&mut self) {
        let base = self.base.clone();
        let odd = (|| -> Result<bool> {
            let c = |a, b| base.combo(a, b, &[]);
            let z = base.zero();
            let branch = BranchData::new(
                &base,
                vec![z.clone(), c(0, 5), c(2, 2), z.clone(), z, c(2, 2), c(2, 2)],
            )?;
            Ok(matches!(
                solve_building_data(&base, &branch),
                Err(Error::NoCover { .. })
            ))
        })();
        self.tally("negative_controls")
            .record_result(odd, || "odd branch accepted".into());
        self.tally("negative_controls")
            .record(!validate_point_type(&[1, 0, 0, 0, 0, 0, 0]), || {
                "(1,0,0,0,0,0,0) accepted".into()
            });
        let contraction = (|| -> Result<bool> {
            let id = FamilyId::new(9)?;
            let a: Assembly = crate::families::assemble(&base, id, MIN_N)?;
            let fiber = a.tower.surface().fiber();
            Ok(matches!(
                contract_step(a, &fiber, 2),
                Err(Error::NotMinusOneCurve { .. })
            ))
        })();
        self.tally("negative_controls")
            .record_result(contraction, || "fibre contracted".into());
    }
}

fn construction_one_internals(base: &SurfaceModel, n: i64) -> Result<bool> {
    let id = FamilyId::new(1)?;
    let cover = family_cover(base, id, n)?;
    let inv = crate::cover::invariants(&cover)?;
    let s = cover.surface();
    let only_010 = inv.pg_contributions.iter().all(|&(chi, h)| {
        if chi.bits() == [0, 1, 0] {
            h == 2 * n as u64 + 1
        } else {
            h == 0
        }
    });
    Ok(inv.two_k_pullclass == s.combo(2, 2 * n, &[])
        && inv.k2 == 8 * (2 * n - 1)
        && inv.pg == 2 * n + 1
        && only_010
        && inv.chi == 2 * n + 2
        && inv.q == 0)
}

/// Runs every check for `n` in `n_lo..=n_hi`.
pub fn run(n_lo: i64, n_hi: i64, fault: Option<Fault>) -> Result<VerifySummary> {
    if !(MIN_N <= n_lo && n_lo <= n_hi && n_hi <= MAX_N) {
        return Err(Error::ParameterOutOfRange {
            n: if n_lo < MIN_N { n_lo } else { n_hi },
            min: MIN_N,
            max: MAX_N,
        });
    }
    let base = match fault {
        None => SurfaceModel::f1(),
        Some(Fault::FlipIntersectionSign) => SurfaceModel::f1().with_flipped_form(),
    };
    let mut suite = Suite {
        base,
        checks: Vec::new(),
    };
    for name in [
        "theorem_table",
        "construction_one",
        "building_data",
        "tower_numerics",
        "image_degree",
        "oracles",
        "cover_laws",
        "negative_controls",
    ] {
        suite.tally(name);
    }
    for n in n_lo..=n_hi {
        suite.per_n(n);
    }
    suite.oracles();
    suite.negative_controls();
    Ok(VerifySummary {
        n_lo,
        n_hi,
        checks: suite.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let s = run(2, 6, None).unwrap();
        assert!(s.all_passed(), "{s:#?}");
        assert_eq!(s.checks[0].passed, 45);
    }

    #[test]
    fn flipped_form_fails() {
        let s = run(2, 3, Some(Fault::FlipIntersectionSign)).unwrap();
        assert!(!s.all_passed());
        assert!(
            s.checks
                .iter()
                .find(|c| c.name == "theorem_table")
                .unwrap()
                .failed
                > 0
        );
    }

    #[test]
    fn bad_ranges() {
        assert!(run(1, 3, None).is_err());
        assert!(run(5, 3, None).is_err());
        assert!(run(2, MAX_N + 1, None).is_err());
    }
}
