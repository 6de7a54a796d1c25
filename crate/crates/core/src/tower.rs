//! A `Z₂^m`-cover factored as a chain of double covers
//! `X = X_m → X_{m-1} → … → X_0 = Y`.
//!
//! Step `s` is the double cover attached to the character `χ_s`; the
//! intermediate surface is `X_s = X / H_s` with
//! `H_s = {σ : χ_1(σ) = … = χ_s(σ) = 1}`. Everything is computed from classes
//! on `Y`: a class `C` pulled back to `X_s` has `(f*C)² = 2^s·C²`.

use serde::Serialize;

use crate::cover::{invariants, CoverData};
use crate::error::{Error, Result};
use crate::group::{Character, GroupElement};
use crate::picard::{DivisorClass, SurfaceModel};

/// Two branch components whose crossings become isolated branch points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodePair {
    pub a: usize,
    pub b: usize,
    /// `D_a · D_b` on `Y`.
    pub crossings: i64,
    /// Points of `X_s` over each crossing, all fixed by the step involution.
    pub preimages: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerStep {
    pub character: Character,
    pub l_class: DivisorClass,
    /// 1-based indices of the components whose pullbacks are ramified here.
    pub curve_branch: Vec<usize>,
    pub node_pairs: Vec<NodePair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrackedCurve {
    pub base_class: DivisorClass,
    pub level: usize,
    /// Number of ramified steps so far; the curve upstairs is
    /// `(1/2^halvings)·f*C`.
    pub halvings: u32,
    pub self_int: i64,
    pub genus: i64,
}

/// `K_{X_1} ≡ f*(K + L)` for a double cover branched on a smooth curve in `|2L|`.
pub fn step_canonical(level_k: &DivisorClass, l: &DivisorClass) -> DivisorClass {
    level_k + l
}

/// `deg(φ(X))` from `cover_degree · N² = map_degree · deg(image)`, with `N`
/// the class on `Y` whose pullback is the moving part.
pub fn canonical_image_degree(
    surface: &SurfaceModel,
    moving: &DivisorClass,
    cover_degree: i64,
    map_degree: i64,
) -> Result<i64> {
    let upstairs = cover_degree * surface.self_intersection(moving)?;
    if map_degree <= 0 || upstairs % map_degree != 0 {
        return Err(Error::Inconsistent(format!(
            "moving part square {upstairs} is not divisible by the map degree {map_degree}"
        )));
    }
    Ok(upstairs / map_degree)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPartReport {
    /// Class `N` on `Y` with moving part `f*N`.
    pub moving_class: DivisorClass,
    /// Components ramified at the last step; the fixed part is `½f*(Σ D_i)`.
    pub fixed_components: Vec<usize>,
    pub fixed_class: DivisorClass,
    pub fixed_curves: Vec<TrackedCurve>,
    pub h0_k: i64,
    pub h0_moving: u64,
    pub nontrivial_fixed_part: bool,
    pub bpf_claimed: bool,
    /// `2N + Σ D_i = 2K_Y + ΣD_j`, i.e. `K_X ≡ f*N + fixed part`.
    pub canonical_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepSummary {
    pub step: usize,
    pub character: Character,
    pub l_class: DivisorClass,
    /// `D_i = class` for each ramified curve.
    pub curve_branch: Vec<String>,
    pub nodes: i64,
    /// `K` of the surface reached by this step, as a class on `Y` if it is one.
    pub canonical: Option<DivisorClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSummary {
    pub steps: Vec<StepSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    cover: CoverData,
    characters: Vec<Character>,
    steps: Vec<TowerStep>,
}

impl Tower {
    /// The step characters must generate the character group.
    pub fn new(cover: CoverData, characters: &[Character]) -> Result<Tower> {
        let rank = cover.rank();
        if characters.len() != rank as usize
            || characters
                .iter()
                .any(|c| c.rank() != rank || c.is_trivial())
        {
            return Err(Error::DegenerateTower);
        }
        let mut tower = Tower {
            cover,
            characters: characters.to_vec(),
            steps: Vec::new(),
        };
        let nonzero = GroupElement::nonzero(rank)?;
        if nonzero.iter().any(|&s| tower.in_subgroup(s, rank as usize)) {
            return Err(Error::DegenerateTower);
        }
        for s in 1..=rank as usize {
            let step = tower.build_step(s)?;
            tower.steps.push(step);
        }
        Ok(tower)
    }

    pub fn cover(&self) -> &CoverData {
        &self.cover
    }

    pub fn surface(&self) -> &SurfaceModel {
        self.cover.surface()
    }

    pub fn steps(&self) -> &[TowerStep] {
        &self.steps
    }

    /// Step `s`, 1-based.
    pub fn step(&self, s: usize) -> &TowerStep {
        &self.steps[s - 1]
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    fn in_subgroup(&self, sigma: GroupElement, level: usize) -> bool {
        self.characters[..level]
            .iter()
            .all(|c| c.value_at(sigma) == 1)
    }

    /// The step at which `σ` leaves the chain of subgroups.
    fn exit_step(&self, sigma: GroupElement) -> usize {
        (1..=self.len())
            .find(|&s| !self.in_subgroup(sigma, s))
            .expect("tower characters generate the dual group")
    }

    fn element(&self, index: usize) -> GroupElement {
        GroupElement::from_index(self.cover.rank(), index).expect("index in range")
    }

    fn build_step(&self, s: usize) -> Result<TowerStep> {
        let surface = self.surface();
        let branch = self.cover.branch();
        let count = branch.divisors().len();
        let live: Vec<usize> = (1..=count)
            .filter(|&i| !branch.divisor(i).is_zero())
            .collect();
        let curve_branch = live
            .iter()
            .copied()
            .filter(|&i| self.exit_step(self.element(i)) == s)
            .collect();

        let mut node_pairs = Vec::new();
        for (ia, &a) in live.iter().enumerate() {
            for &b in &live[ia + 1..] {
                let (sa, sb) = (self.element(a), self.element(b));
                if self.exit_step(sa) == s || self.exit_step(sb) == s {
                    continue;
                }
                let sum = sa ^ sb;
                if self.exit_step(sum) != s {
                    continue;
                }
                // |G/H_s| / |S/(S ∩ H_s)| points of X_s over each crossing.
                let stabilizer = [GroupElement::identity(sa.rank())?, sa, sb, sum];
                let in_h = stabilizer
                    .iter()
                    .filter(|&&g| self.in_subgroup(g, s))
                    .count() as i64;
                let preimages = (1i64 << s) * in_h / 4;
                node_pairs.push(NodePair {
                    a,
                    b,
                    crossings: surface.intersect(branch.divisor(a), branch.divisor(b))?,
                    preimages,
                });
            }
        }
        let character = self.characters[s - 1];
        Ok(TowerStep {
            character,
            l_class: self.cover.l(character).clone(),
            curve_branch,
            node_pairs,
        })
    }

    /// Isolated branch points of step `s`.
    pub fn count_nodes(&self, s: usize) -> i64 {
        self.step(s)
            .node_pairs
            .iter()
            .map(|p| p.crossings * p.preimages)
            .sum()
    }

    /// `T_s` with `2K_{X_s} ≡ f*T_s`: `2K_Y` plus every component already
    /// ramified by level `s`.
    pub fn doubled_canonical(&self, level: usize) -> DivisorClass {
        let surface = self.surface();
        let branch = self.cover.branch();
        (1..=branch.divisors().len())
            .filter(|&i| !self.in_subgroup(self.element(i), level))
            .fold(surface.canonical_class().scale(2), |acc, i| {
                &acc + branch.divisor(i)
            })
    }

    /// `K_{X_s}` as a pullback of a class on `Y`, when one exists.
    pub fn level_canonical(&self, level: usize) -> Option<DivisorClass> {
        self.doubled_canonical(level).halve()
    }

    /// Follows `C` up the tower. At a ramified step `f*C = 2C'`.
    pub fn pullback_curve(
        &self,
        c: &DivisorClass,
        ramified_steps: &[usize],
    ) -> Result<Vec<TrackedCurve>> {
        (0..=self.len())
            .map(|level| {
                let halvings = ramified_steps
                    .iter()
                    .filter(|&&s| s >= 1 && s <= level)
                    .count() as u32;
                self.curve_at(c, level, halvings)
            })
            .collect()
    }

    /// `(1/2^halvings)·f*C` on `X_level`. Intermediate levels are only
    /// meaningful while `C` avoids the singular points of `X_level`.
    pub fn curve_at(&self, c: &DivisorClass, level: usize, halvings: u32) -> Result<TrackedCurve> {
        let surface = self.surface();
        let exact = |num: i64, den: i64| -> Result<i64> {
            if num % den != 0 {
                return Err(Error::NonIntegral {
                    class: c.to_string(),
                    numerator: num,
                    denominator: den,
                });
            }
            Ok(num / den)
        };
        let scale = 1i64 << level;
        let self_int = exact(
            scale * surface.self_intersection(c)?,
            1i64 << (2 * halvings),
        )?;
        let kc = exact(
            scale * surface.intersect(&self.doubled_canonical(level), c)?,
            2i64 << halvings,
        )?;
        let sum = self_int + kc;
        if sum % 2 != 0 {
            return Err(Error::AdjunctionParity {
                class: c.to_string(),
                product: sum,
            });
        }
        Ok(TrackedCurve {
            base_class: c.clone(),
            level,
            halvings,
            self_int,
            genus: 1 + sum / 2,
        })
    }

    /// Chain of the branch component `D_i`, ramified where `σ_i` leaves the
    /// subgroup chain.
    pub fn track_component(&self, index: usize) -> Result<Vec<TrackedCurve>> {
        let step = self.exit_step(self.element(index));
        self.pullback_curve(self.cover.branch().divisor(index), &[step])
    }

    /// `h⁰(f*M)` by the two-term projection formula
    /// `h⁰(f*M) = h⁰(M) + h⁰(M - L)` applied once per step.
    pub fn h0_pullback(&self, m: &DivisorClass, up_to_step: usize) -> Result<u64> {
        if up_to_step == 0 {
            return self.surface().h0_split(m);
        }
        let l = &self.step(up_to_step).l_class;
        Ok(self.h0_pullback(m, up_to_step - 1)? + self.h0_pullback(&(m - l), up_to_step - 1)?)
    }

    pub fn summary(&self) -> TowerSummary {
        let branch = self.cover.branch();
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, step)| StepSummary {
                step: i + 1,
                character: step.character,
                l_class: step.l_class.clone(),
                curve_branch: step
                    .curve_branch
                    .iter()
                    .map(|&j| format!("D{j} = {}", branch.divisor(j)))
                    .collect(),
                nodes: self.count_nodes(i + 1),
                canonical: self.level_canonical(i + 1),
            })
            .collect();
        TowerSummary { steps }
    }

    pub fn fixed_part_report(&self) -> Result<FixedPartReport> {
        let surface = self.surface();
        let top = self.len();
        let moving_class = self.level_canonical(top - 1).ok_or_else(|| {
            Error::Inconsistent(format!(
                "canonical class of X_{} is not a pullback: {}",
                top - 1,
                self.doubled_canonical(top - 1)
            ))
        })?;
        let fixed_components = self.step(top).curve_branch.clone();
        let branch = self.cover.branch();
        let fixed_class = fixed_components
            .iter()
            .fold(surface.zero(), |acc, &i| &acc + branch.divisor(i));
        let fixed_curves = fixed_components
            .iter()
            .map(|&i| Ok(self.track_component(i)?.pop().expect("nonempty chain")))
            .collect::<Result<Vec<_>>>()?;
        let h0_k = invariants(&self.cover)?.pg;
        let h0_moving = self.h0_pullback(&moving_class, top)?;
        let equal = h0_k == h0_moving as i64;
        let canonical_identity =
            &moving_class.scale(2) + &fixed_class == self.cover.two_k_pullclass();
        Ok(FixedPartReport {
            nontrivial_fixed_part: equal && !fixed_class.is_zero(),
            bpf_claimed: equal && fixed_class.is_zero(),
            moving_class,
            fixed_components,
            fixed_class,
            fixed_curves,
            h0_k,
            h0_moving,
            canonical_identity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family_cover, tower_characters, FamilyId};

    fn tower(id: u32, n: i64) -> Tower {
        let id = FamilyId::new(id).unwrap();
        let cover = family_cover(&SurfaceModel::f1(), id, n).unwrap();
        Tower::new(cover, &tower_characters(id)).unwrap()
    }

    #[test]
    fn step_canonical_examples() {
        for n in 2..20 {
            let t = tower(4, n);
            let s = t.surface();
            let k1 = step_canonical(&s.canonical_class(), &t.step(1).l_class);
            assert_eq!(k1, s.combo(-1, n - 2, &[0]));
            assert_eq!(t.level_canonical(1), Some(k1.clone()));
            let k2 = step_canonical(&k1, &t.step(2).l_class);
            assert_eq!(k2, s.combo(1, n, &[-1]));

            let t = tower(5, n);
            let s = t.surface();
            let k1 = step_canonical(&s.canonical_class(), &t.step(1).l_class);
            let k2 = step_canonical(&k1, &t.step(2).l_class);
            assert_eq!(k2, s.combo(1, n, &[]));
            assert_eq!(step_canonical(&k2, &s.zero()), k2);
        }
    }

    #[test]
    fn exceptional_curve_chain_family_four() {
        for n in 2..20 {
            let t = tower(4, n);
            let e = t.surface().exceptional(0);
            let chain = t.pullback_curve(&e, &[3]).unwrap();
            let pairs: Vec<(i64, i64)> = chain.iter().map(|c| (c.self_int, c.genus)).collect();
            assert_eq!(pairs, vec![(-1, 0), (-2, 0), (-4, 1), (-2, 1)]);
            assert_eq!(t.track_component(5).unwrap(), chain);
        }
    }

    #[test]
    fn fiber_chain_construction_two() {
        for n in 2..20 {
            let t = tower(5, n);
            let chain = t.track_component(3).unwrap();
            let genera: Vec<i64> = chain.iter().map(|c| c.genus).collect();
            assert_eq!(genera, vec![0, 0, 3, 3]);
            assert_eq!(chain[2].self_int, 0);
            assert_eq!(chain[3].self_int, 0);
        }
    }

    #[test]
    fn node_counts() {
        for n in 2..20 {
            let t = tower(4, n);
            let pairs: Vec<(usize, usize)> =
                t.step(3).node_pairs.iter().map(|p| (p.a, p.b)).collect();
            assert_eq!(pairs, vec![(2, 7), (3, 6)]);
            assert_eq!(t.count_nodes(3), 8 * n + 6);

            let t = tower(5, n);
            let pairs: Vec<(usize, usize)> =
                t.step(3).node_pairs.iter().map(|p| (p.a, p.b)).collect();
            assert_eq!(pairs, vec![(4, 7), (5, 6)]);
            assert_eq!(t.count_nodes(3), 8 * n + 12);
        }
    }

    #[test]
    fn node_pairs_of_first_construction() {
        // second step: crossings of D₂ + D₃ with D₆ + D₇; third: D₂∩D₃, D₆∩D₇
        let t = tower(1, 3);
        let second: Vec<(usize, usize)> = t.step(2).node_pairs.iter().map(|p| (p.a, p.b)).collect();
        assert_eq!(second, vec![(2, 6), (2, 7), (3, 6), (3, 7)]);
        assert!(t.step(2).curve_branch.is_empty());
        let third: Vec<(usize, usize)> = t.step(3).node_pairs.iter().map(|p| (p.a, p.b)).collect();
        assert_eq!(third, vec![(2, 3), (6, 7)]);
        assert!(t.step(3).curve_branch.is_empty());
    }

    #[test]
    fn zero_crossings_give_no_nodes() {
        let t = tower(4, 2);
        let p = NodePair {
            a: 1,
            b: 4,
            crossings: 0,
            preimages: 2,
        };
        assert_eq!(p.crossings * p.preimages, 0);
        // D₁ = D₄ = 0 never appear in a pair
        assert!(t
            .steps()
            .iter()
            .flat_map(|s| &s.node_pairs)
            .all(|p| p.a != 1 && p.b != 4));
    }

    #[test]
    fn h0_pullback_examples() {
        for n in 2..20 {
            let t = tower(4, n);
            let s = t.surface();
            assert_eq!(
                t.h0_pullback(&s.combo(1, n, &[-1]), 3).unwrap(),
                2 * n as u64
            );
            assert_eq!(t.h0_pullback(&s.zero(), 3).unwrap(), 1);

            let t = tower(5, n);
            let s = t.surface();
            assert_eq!(
                t.h0_pullback(&s.combo(1, n, &[]), 3).unwrap(),
                2 * n as u64 + 1
            );
        }
    }

    #[test]
    fn fixed_part_reports() {
        for n in 2..20 {
            let r = tower(4, n).fixed_part_report().unwrap();
            assert!(r.nontrivial_fixed_part && r.canonical_identity);
            assert_eq!(r.fixed_components, vec![5]);
            assert_eq!(
                (r.fixed_curves[0].genus, r.fixed_curves[0].self_int),
                (1, -2)
            );
            assert_eq!((r.h0_k, r.h0_moving), (2 * n, 2 * n as u64));

            let r = tower(5, n).fixed_part_report().unwrap();
            assert!(r.nontrivial_fixed_part && r.canonical_identity);
            assert_eq!(r.fixed_components, vec![3]);
            assert_eq!(r.fixed_curves[0].genus, 3);
            assert_eq!(r.h0_moving, 2 * n as u64 + 1);

            let r = tower(1, n).fixed_part_report().unwrap();
            assert!(r.bpf_claimed && !r.nontrivial_fixed_part && r.canonical_identity);
            assert!(r.fixed_class.is_zero());
        }
    }

    #[test]
    fn image_degree_examples() {
        let s = SurfaceModel::f1();
        let y = s.blow_up(crate::picard::PointTag::Label("P".into()));
        for n in 2..20 {
            assert_eq!(
                canonical_image_degree(&s, &s.combo(1, n, &[]), 8, 8).unwrap(),
                2 * n - 1
            );
            assert_eq!(
                canonical_image_degree(&y, &y.combo(1, n, &[-1]), 8, 8).unwrap(),
                2 * n - 2
            );
            assert_eq!(
                canonical_image_degree(&y, &y.combo(1, n - 1, &[-1]), 8, 8).unwrap(),
                2 * n - 4
            );
        }
        assert!(canonical_image_degree(&s, &s.combo(1, 2, &[]), 8, 16).is_err());
    }

    #[test]
    fn degenerate_tower_rejected() {
        let id = FamilyId::new(1).unwrap();
        let cover = family_cover(&SurfaceModel::f1(), id, 2).unwrap();
        let c = |b: [u8; 3]| Character::new(&b).unwrap();
        let chars = [c([1, 0, 0]), c([0, 1, 0]), c([1, 1, 0])];
        assert_eq!(
            Tower::new(cover, &chars).unwrap_err(),
            Error::DegenerateTower
        );
    }
}
