//! Exhaustive search over point-multiplicity vectors.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{
    impose_point, invariants, minimality_check, solve_building_data, validate_point_type,
    Assumption, PointType,
};
use crate::families::{construction_of, imposed_point, Construction, FamilyId};
use crate::picard::SurfaceModel;

pub const DEFAULT_MAX_MULT: i64 = 4;
const LENGTH: u32 = 7;

/// All valid nonzero `k ∈ [min, max]^7` in lexicographic order. Entries
/// below zero need `allow_exceptional`, and nothing below `-1` is produced.
pub fn enumerate_point_types(
    min_entry: i64,
    max_entry: i64,
    allow_exceptional: bool,
) -> Vec<Vec<i64>> {
    let lo = min_entry.max(if allow_exceptional { -1 } else { 0 });
    if lo > max_entry {
        return Vec::new();
    }
    let base = (max_entry - lo + 1) as u64;
    let total = base.pow(LENGTH);
    (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut k = vec![0i64; LENGTH as usize];
            for slot in k.iter_mut().rev() {
                *slot = lo + (code % base) as i64;
                code /= base;
            }
            (k.iter().any(|&x| x != 0) && validate_point_type(&k)).then_some(k)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateInvariants {
    #[serde(rename = "K2")]
    pub k2: i64,
    pub pg: i64,
    pub chi: i64,
    pub q: i64,
    pub minimal: bool,
    pub witness: Option<String>,
}

/// One scanned configuration. `point` is `None` for the unmodified base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub point: Option<String>,
    /// The table family with this exact configuration, if any.
    pub family: Option<u32>,
    pub outcome: std::result::Result<CandidateInvariants, Failure>,
    pub assumptions: Vec<Assumption>,
}

impl Candidate {
    fn sort_key(&self) -> Option<(i64, i64, i64)> {
        self.outcome.as_ref().ok().map(|i| (i.k2, i.pg, i.q))
    }
}

fn family_for(construction: Construction, point: Option<&PointType>) -> Option<u32> {
    FamilyId::all()
        .find(|&id| construction_of(id) == construction && imposed_point(id).as_ref() == point)
        .map(FamilyId::get)
}

fn evaluate(construction: Construction, n: i64, point: Option<&PointType>) -> Candidate {
    let base = SurfaceModel::f1();
    let fail = |check: &'static str, e: crate::Error| Failure {
        check,
        message: e.to_string(),
    };
    let run = || -> std::result::Result<(CandidateInvariants, Vec<Assumption>), Failure> {
        let branch = construction
            .branch(&base, n)
            .map_err(|e| fail("branch", e))?;
        let (surface, mut branch) = match point {
            None => (base.clone(), branch),
            Some(k) => impose_point(&base, &branch, k).map_err(|e| fail("impose", e))?,
        };
        branch.add_assumption(Assumption::Candidate);
        let cover = solve_building_data(&surface, &branch).map_err(|e| fail("solve", e))?;
        let inv = invariants(&cover).map_err(|e| fail("invariants", e))?;
        let nef = minimality_check(&cover).map_err(|e| fail("minimality", e))?;
        Ok((
            CandidateInvariants {
                k2: inv.k2,
                pg: inv.pg,
                chi: inv.chi,
                q: inv.q,
                minimal: nef.holds(),
                witness: nef.witness,
            },
            branch.assumptions().to_vec(),
        ))
    };
    let (outcome, assumptions) = match run() {
        Ok((inv, a)) => (Ok(inv), a),
        Err(f) => (Err(f), vec![Assumption::Candidate]),
    };
    Candidate {
        point: point.map(ToString::to_string),
        family: family_for(construction, point),
        outcome,
        assumptions,
    }
}

/// The base configuration plus one candidate per point, sorted by
/// `(K², p_g, q)`; failures come last in input order.
pub fn scan_configs(construction: Construction, n: i64, points: &[PointType]) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = std::iter::once(None)
        .chain(points.iter().map(Some))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| evaluate(construction, n, p))
        .collect();
    out.sort_by(|a, b| match (a.sort_key(), b.sort_key()) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(k: &[i64]) -> PointType {
        PointType::new(k.to_vec()).unwrap()
    }

    #[test]
    fn binary_solutions_form_a_code() {
        let found = enumerate_point_types(0, 1, false);
        assert!(found.contains(&vec![0, 1, 1, 0, 0, 1, 1]));
        assert_eq!(found.len(), 15);
        for a in &found {
            for b in &found {
                let x: Vec<i64> = a.iter().zip(b).map(|(p, q)| p ^ q).collect();
                assert!(x.iter().all(|&v| v == 0) || found.contains(&x));
            }
        }
        let mut sorted = found.clone();
        sorted.sort();
        assert_eq!(sorted, found);
    }

    #[test]
    fn table_points_are_found() {
        let two = enumerate_point_types(0, 2, false);
        assert!(two.contains(&vec![0, 0, 0, 0, 0, 2, 2]));
        assert!(two.contains(&vec![0, 0, 0, 0, 2, 2, 0]));
        assert!(two.iter().all(|k| k.iter().all(|&x| x >= 0)));
        let exc = enumerate_point_types(-1, 2, true);
        for k in [
            [0, 0, 1, 0, -1, 1, 2],
            [0, 0, -1, 1, 2, 0, 1],
            [0, 0, -1, 1, 2, 2, 1],
        ] {
            assert!(exc.contains(&k.to_vec()));
        }
        assert_eq!(enumerate_point_types(-1, 2, false), two);
        assert!(enumerate_point_types(3, 2, true).is_empty());
    }

    #[test]
    fn scan_reproduces_rows() {
        let n = 4;
        let points: Vec<PointType> = (2..=4)
            .map(|i| imposed_point(FamilyId::new(i).unwrap()).unwrap())
            .collect();
        let out = scan_configs(Construction::One, n, &points);
        let rows: Vec<(Option<u32>, i64, i64, i64)> = out
            .iter()
            .map(|c| {
                let i = c.outcome.as_ref().unwrap();
                (c.family, i.k2, i.pg, i.q)
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                (Some(2), 48, 8, 0),
                (Some(3), 48, 8, 1),
                (Some(4), 54, 8, 0),
                (Some(1), 56, 9, 0)
            ]
        );

        let points: Vec<PointType> = (6..=9)
            .map(|i| imposed_point(FamilyId::new(i).unwrap()).unwrap())
            .collect();
        let out = scan_configs(Construction::Two, n, &points);
        let nine = out.iter().find(|c| c.family == Some(9)).unwrap();
        let i = nine.outcome.as_ref().unwrap();
        assert_eq!((i.k2, i.minimal), (16 * n - 18, false));
        assert_eq!(out.len(), 5);

        let base = scan_configs(Construction::Two, n, &[]);
        assert_eq!(base.len(), 1);
        assert_eq!(base[0].family, Some(5));
    }

    #[test]
    fn failures_are_data() {
        // D₁ = 0 cannot pass through a point
        let out = scan_configs(Construction::One, 3, &[pt(&[1, 1, 1, 0, 0, 0, 0])]);
        assert_eq!(out.len(), 2);
        let failed = out[1].outcome.as_ref().unwrap_err();
        assert_eq!(failed.check, "impose");
        assert!(out[0].outcome.is_ok());
    }
}
