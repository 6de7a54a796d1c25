//! Elementary abelian groups `Z₂^m`, their characters, and the parity system
//! tying characters to branch indices.
//!
//! Both group elements and characters are stored as bitmasks whose most
//! significant bit is the first coordinate, so the branch index `i` of
//! `D_i` is just the integer value of `σ_i`: `D₁ ↔ (0,0,1)`, `D₄ ↔ (1,0,0)`.

use std::fmt;
use std::ops::BitXor;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: u32 = 12;

fn check_rank(rank: u32) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::GroupRank {
            max: MAX_RANK,
            found: rank,
        });
    }
    Ok(())
}

fn bits_to_value(bits: &[u8]) -> Result<u32> {
    let rank = bits.len() as u32;
    check_rank(rank)?;
    bits.iter().try_fold(0u32, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | u32::from(b)),
        _ => Err(Error::Inconsistent(format!("bit value {b} is not 0 or 1"))),
    })
}

fn value_to_bits(value: u32, rank: u32) -> Vec<u8> {
    (0..rank).rev().map(|k| ((value >> k) & 1) as u8).collect()
}

fn fmt_bits(value: u32, rank: u32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = value_to_bits(value, rank)
        .iter()
        .map(u8::to_string)
        .collect();
    write!(f, "({})", parts.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    rank: u32,
    value: u32,
}

impl GroupElement {
    pub fn new(bits: &[u8]) -> Result<GroupElement> {
        Ok(GroupElement {
            rank: bits.len() as u32,
            value: bits_to_value(bits)?,
        })
    }

    /// Element with integer value `index` (so `D_index` for nonzero `index`).
    pub fn from_index(rank: u32, index: usize) -> Result<GroupElement> {
        check_rank(rank)?;
        if index >= 1usize << rank {
            return Err(Error::Length {
                expected: (1usize << rank) - 1,
                found: index,
            });
        }
        Ok(GroupElement {
            rank,
            value: index as u32,
        })
    }

    pub fn identity(rank: u32) -> Result<GroupElement> {
        GroupElement::from_index(rank, 0)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn bits(&self) -> Vec<u8> {
        value_to_bits(self.value, self.rank)
    }

    pub fn is_identity(&self) -> bool {
        self.value == 0
    }

    /// All nonidentity elements in branch-index order.
    pub fn nonzero(rank: u32) -> Result<Vec<GroupElement>> {
        check_rank(rank)?;
        Ok((1..1u32 << rank)
            .map(|value| GroupElement { rank, value })
            .collect())
    }
}

impl BitXor for GroupElement {
    type Output = GroupElement;
    fn bitxor(self, rhs: GroupElement) -> GroupElement {
        assert_eq!(self.rank, rhs.rank, "group elements of different rank");
        GroupElement {
            rank: self.rank,
            value: self.value ^ rhs.value,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.value, self.rank, f)
    }
}

/// `χ_j(σ) = (-1)^{⟨j,σ⟩}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    rank: u32,
    value: u32,
}

impl Character {
    pub fn new(bits: &[u8]) -> Result<Character> {
        Ok(Character {
            rank: bits.len() as u32,
            value: bits_to_value(bits)?,
        })
    }

    pub fn from_index(rank: u32, index: usize) -> Result<Character> {
        let g = GroupElement::from_index(rank, index)?;
        Ok(Character {
            rank,
            value: g.value,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn bits(&self) -> Vec<u8> {
        value_to_bits(self.value, self.rank)
    }

    pub fn is_trivial(&self) -> bool {
        self.value == 0
    }

    /// Nontrivial characters in index order.
    pub fn nontrivial(rank: u32) -> Result<Vec<Character>> {
        check_rank(rank)?;
        Ok((1..1u32 << rank)
            .map(|value| Character { rank, value })
            .collect())
    }

    /// Nontrivial characters in presentation order: by weight, and within a
    /// weight by decreasing value. For rank 3 this is
    /// `100, 010, 001, 110, 101, 011, 111`.
    pub fn display_order(rank: u32) -> Result<Vec<Character>> {
        let mut chars = Character::nontrivial(rank)?;
        chars.sort_by_key(|c| (c.value.count_ones(), std::cmp::Reverse(c.value)));
        Ok(chars)
    }

    /// `+1` or `-1`.
    pub fn value_at(&self, sigma: GroupElement) -> i8 {
        chi_value(*self, sigma)
    }
}

impl BitXor for Character {
    type Output = Character;
    fn bitxor(self, rhs: Character) -> Character {
        assert_eq!(self.rank, rhs.rank, "characters of different rank");
        Character {
            rank: self.rank,
            value: self.value ^ rhs.value,
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.value, self.rank, f)
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Panics if the ranks differ.
pub fn chi_value(chi: Character, sigma: GroupElement) -> i8 {
    assert_eq!(
        chi.rank, sigma.rank,
        "character and element of different rank"
    );
    if (chi.value & sigma.value).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Pairs each branch index `i ∈ 1..2^m` with `σ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchIndexMap {
    rank: u32,
}

impl BranchIndexMap {
    pub fn new(rank: u32) -> Result<BranchIndexMap> {
        check_rank(rank)?;
        Ok(BranchIndexMap { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Number of branch indices, `2^m - 1`.
    pub fn len(&self) -> usize {
        (1usize << self.rank) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `σ_i` for the 1-based branch index `i`.
    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index == 0 || index > self.len() {
            return Err(Error::Length {
                expected: self.len(),
                found: index,
            });
        }
        GroupElement::from_index(self.rank, index)
    }

    pub fn index_of(&self, sigma: GroupElement) -> Option<usize> {
        (!sigma.is_identity() && sigma.rank == self.rank).then_some(sigma.index())
    }
}

/// 0/1 matrix with rows indexed by nontrivial characters (index order) and
/// columns by branch indices; an entry is 1 exactly when `χ(σ_i) = -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityMatrix {
    rank: u32,
    rows: Vec<Vec<u8>>,
}

impl ParityMatrix {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn row(&self, chi: Character) -> &[u8] {
        assert!(!chi.is_trivial(), "the trivial character has no parity row");
        &self.rows[chi.index() - 1]
    }

    pub fn entry(&self, chi: Character, branch_index: usize) -> u8 {
        self.row(chi)[branch_index - 1]
    }

    /// 1-based branch indices appearing in the row of `chi`.
    pub fn support(&self, chi: Character) -> Vec<usize> {
        self.row(chi)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 1)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

pub fn parity_matrix(rank: u32) -> Result<ParityMatrix> {
    let elements = GroupElement::nonzero(rank)?;
    let rows = Character::nontrivial(rank)?
        .into_iter()
        .map(|chi| {
            elements
                .iter()
                .map(|&sigma| u8::from(chi_value(chi, sigma) == -1))
                .collect()
        })
        .collect();
    Ok(ParityMatrix { rank, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(bits: [u8; 3]) -> Character {
        Character::new(&bits).unwrap()
    }

    fn el(bits: [u8; 3]) -> GroupElement {
        GroupElement::new(&bits).unwrap()
    }

    #[test]
    fn chi_value_examples() {
        assert_eq!(chi_value(ch([1, 0, 0]), el([1, 0, 0])), -1);
        assert_eq!(chi_value(ch([1, 0, 0]), el([0, 1, 1])), 1);
        assert_eq!(chi_value(ch([1, 1, 1]), el([1, 1, 0])), 1);
    }

    #[test]
    fn branch_index_convention() {
        let map = BranchIndexMap::new(3).unwrap();
        let expected = [
            [0, 0, 1],
            [0, 1, 0],
            [0, 1, 1],
            [1, 0, 0],
            [1, 0, 1],
            [1, 1, 0],
            [1, 1, 1],
        ];
        for (i, bits) in expected.iter().enumerate() {
            assert_eq!(map.element(i + 1).unwrap().bits(), bits.to_vec());
            assert_eq!(map.index_of(el(*bits)), Some(i + 1));
        }
        assert!(map.element(0).is_err());
        assert!(map.element(8).is_err());
        assert_eq!(map.index_of(el([0, 0, 0])), None);
    }

    #[test]
    fn parity_rows_match_cover_equations() {
        let p = parity_matrix(3).unwrap();
        assert_eq!(p.support(ch([1, 0, 0])), vec![4, 5, 6, 7]);
        assert_eq!(p.support(ch([0, 1, 0])), vec![2, 3, 6, 7]);
        assert_eq!(p.support(ch([0, 0, 1])), vec![1, 3, 5, 7]);
        assert_eq!(p.support(ch([1, 1, 0])), vec![2, 3, 4, 5]);
        assert_eq!(p.support(ch([1, 0, 1])), vec![1, 3, 4, 6]);
        assert_eq!(p.support(ch([0, 1, 1])), vec![1, 2, 5, 6]);
        assert_eq!(p.support(ch([1, 1, 1])), vec![1, 2, 4, 7]);
    }

    #[test]
    fn parity_matrix_rank_one() {
        let p = parity_matrix(1).unwrap();
        assert_eq!(p.rows(), &[vec![1]]);
    }

    #[test]
    fn parity_matrix_row_and_column_weights() {
        let p = parity_matrix(3).unwrap();
        for r in 0..7 {
            assert_eq!(p.rows()[r].iter().filter(|&&e| e == 1).count(), 4);
            assert_eq!(p.rows().iter().filter(|row| row[r] == 1).count(), 4);
            for c in 0..7 {
                assert_eq!(p.rows()[r][c], p.rows()[c][r]);
            }
        }
    }

    #[test]
    fn display_order_is_presentation_order() {
        let order: Vec<String> = Character::display_order(3)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            order,
            ["(1,0,0)", "(0,1,0)", "(0,0,1)", "(1,1,0)", "(1,0,1)", "(0,1,1)", "(1,1,1)"]
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GroupElement::new(&[]).is_err());
        assert!(GroupElement::new(&[0, 2]).is_err());
        assert!(parity_matrix(0).is_err());
    }
}
